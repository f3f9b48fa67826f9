//! Order maps of algebraic exponential sums via root counting on slices.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::ExpSum;
use crate::membership::in_lopsided_amoeba;
use crate::raster::{components, raster, ComplementComponent, Window};
use crate::roots::roots_univariate;
use crate::scalars::ExtScalar;

/// Distance to a log-root-modulus below which a point counts as on the amoeba.
pub const ON_AMOEBA_TOLERANCE: f64 = 1e-8;

/// Phase samples used by [`order_multivariate`] unless told otherwise.
pub const DEFAULT_PHASE_SAMPLES: usize = 32;

/// `lo + #{roots r : log|r| < x}` for `f = w^lo·p(w)`.
pub fn order_univariate(f: &ExpSum, x: f64) -> Result<i64> {
    let (lo, p) = f.laurent_univariate()?;
    let count = count_inside(&p, x).map_err(|(log_modulus, _)| Error::OnAmoeba {
        x,
        log_modulus,
        tolerance: ON_AMOEBA_TOLERANCE,
    })?;
    Ok(lo + count as i64)
}

/// Roots of `p` with `log|r| < x`, or the offending log-modulus.
fn count_inside(p: &[Complex64], x: f64) -> std::result::Result<usize, (f64, Option<Error>)> {
    let roots = roots_univariate(p).map_err(|e| (f64::NAN, Some(e)))?;
    let mut count = 0;
    for l in roots.log_moduli() {
        if (l - x).abs() < ON_AMOEBA_TOLERANCE {
            return Err((l, None));
        }
        if l < x {
            count += 1;
        }
    }
    Ok(count)
}

/// Coordinate `j` of the order at `x`: roots in `w_j` of the slice through
/// `|w_i| = e^{x_i}` with random phases, counted inside `|w_j| < e^{x_j}`.
/// Every sample must agree.
pub fn order_multivariate(f: &ExpSum, x: &[f64], j: usize, samples: usize, seed: u64) -> Result<i64> {
    let n = f.nvars();
    if x.len() != n || j >= n {
        return Err(Error::ShapeMismatch(format!("point of length {} for {n} variables", x.len())));
    }
    let cols = f.integer_exponents().ok_or(Error::NotAlgebraic)?;
    let terms: Vec<(Complex64, &Vec<i64>)> = f
        .coefficients()
        .iter()
        .zip(&cols)
        .filter(|(c, _)| c.norm() > 0.0)
        .map(|(c, a)| (*c, a))
        .collect();
    let lo = terms.iter().map(|(_, a)| a[j]).min().expect("some coefficient is nonzero");
    let hi = terms.iter().map(|(_, a)| a[j]).max().expect("some coefficient is nonzero");
    let shift = terms
        .iter()
        .map(|(c, a)| c.norm().ln() + (0..n).filter(|&i| i != j).map(|i| a[i] as f64 * x[i]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut common: Option<usize> = None;
    for s in 0..samples.max(1) {
        let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let mut p = vec![Complex64::new(0.0, 0.0); (hi - lo) as usize + 1];
        for (c, a) in &terms {
            let mut log_mod = c.norm().ln() - shift;
            let mut arg = c.arg();
            for i in (0..n).filter(|&i| i != j) {
                log_mod += a[i] as f64 * x[i];
                arg += a[i] as f64 * phases[i];
            }
            p[(a[j] - lo) as usize] += Complex64::from_polar(log_mod.exp(), arg);
        }
        let count = match count_inside(&p, x[j]) {
            Ok(c) => c,
            Err((l, e)) => {
                return Err(Error::OnAmoebaOrIllConditioned(match e {
                    Some(e) => format!("sample {s}: {e}"),
                    None => format!("sample {s}: log|root| = {l} within {ON_AMOEBA_TOLERANCE:e} of {}", x[j]),
                }))
            }
        };
        match common {
            None => common = Some(count),
            Some(c) if c != count => {
                return Err(Error::OnAmoebaOrIllConditioned(format!(
                    "phase samples disagree: {c} vs {count} roots inside"
                )))
            }
            _ => {}
        }
    }
    Ok(lo + common.expect("at least one sample") as i64)
}

/// The full order vector at `x` for an algebraic sum in any number of variables.
pub fn order_vector(f: &ExpSum, x: &[f64], samples: usize, seed: u64) -> Result<Vec<i64>> {
    if f.nvars() == 1 {
        return Ok(vec![order_univariate(f, x[0])?]);
    }
    (0..f.nvars())
        .map(|j| order_multivariate(f, x, j, samples, seed))
        .collect()
}

/// `T·β`. A `β` one entry shorter than `T` has columns is read in
/// homogeneous coordinates `(1, β)` and the top entry of the result dropped.
pub fn order_pullback(t: &[Vec<ExtScalar>], beta: &[i64]) -> Result<Vec<ExtScalar>> {
    let cols = t.first().map_or(0, Vec::len);
    let (full, strip): (Vec<i64>, bool) = if beta.len() == cols {
        (beta.to_vec(), false)
    } else if beta.len() + 1 == cols {
        (std::iter::once(1).chain(beta.iter().copied()).collect(), true)
    } else {
        return Err(Error::ShapeMismatch(format!("β of length {} for T with {cols} columns", beta.len())));
    };
    let mut out = Vec::with_capacity(t.len());
    for row in t {
        let mut acc = ExtScalar::zero(row[0].basis());
        for (x, &b) in row.iter().zip(&full) {
            acc = acc.add(&x.scale(&crate::scalars::Rational::from_integer(b.into())))?;
        }
        out.push(acc);
    }
    if strip {
        out.remove(0);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    /// Distinct orders discovered in the window, sorted.
    pub orders: Vec<Vec<i64>>,
    pub components: Vec<ComponentSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentSummary {
    pub representative: Vec<f64>,
    pub pixels: usize,
    pub touches_boundary: bool,
    pub order: Option<Vec<i64>>,
}

/// Complement components of the lopsided raster with orders evaluated at
/// their representatives. `f` must be dehomogenized with at most 2 variables;
/// for one variable only the `x` extent of the window is used.
pub fn omega_set(f: &ExpSum, window: Window, resolution: [usize; 2], seed: u64) -> Result<OmegaReport> {
    let n = f.nvars();
    if n == 0 || n > 2 {
        return Err(Error::InvalidInput(format!("rasters need 1 or 2 variables, found {n}")));
    }
    if !f.is_algebraic() {
        return Err(Error::NotAlgebraic);
    }
    let res = if n == 1 { [resolution[0], 1] } else { resolution };
    let r = raster(|p| in_lopsided_amoeba(f, &p[..n]), window, res);
    let mut comps = components(&r);
    let orders: Vec<Option<Vec<i64>>> = comps
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let x = &c.representative[..n];
            match order_vector(f, x, DEFAULT_PHASE_SAMPLES, seed.wrapping_add(i as u64)) {
                Ok(o) => Some(o),
                Err(e) => {
                    log::warn!("skipping component at {x:?}: {e}");
                    None
                }
            }
        })
        .collect();
    for (c, o) in comps.iter_mut().zip(orders) {
        c.order = o;
    }
    let set: BTreeSet<Vec<i64>> = comps.iter().filter_map(|c| c.order.clone()).collect();
    Ok(OmegaReport {
        orders: set.into_iter().collect(),
        components: comps.iter().map(|c| summarize(c, n)).collect(),
    })
}

fn summarize(c: &ComplementComponent, n: usize) -> ComponentSummary {
    ComponentSummary {
        representative: c.representative[..n].to_vec(),
        pixels: c.len(),
        touches_boundary: c.touches_boundary,
        order: c.order.clone(),
    }
}
