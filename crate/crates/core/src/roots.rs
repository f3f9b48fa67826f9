//! Simultaneous polynomial root finding (Aberth–Ehrlich).

use std::f64::consts::PI;

use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Maximum accepted backward error `|p(r)| / Σ|c_k||r|^k`.
pub const BACKWARD_ERROR_LIMIT: f64 = 1e-10;

const MAX_ITERATIONS: usize = 1000;

#[derive(Clone, Debug, Serialize)]
pub struct RootList {
    /// Roots with multiplicity, ascending by modulus, ties by argument.
    pub roots: Vec<Complex64>,
    pub backward_errors: Vec<f64>,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn log_moduli(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.norm().ln()).collect()
    }
}

fn horner(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

/// `|p(z)| / Σ |c_k| |z|^k`.
pub fn backward_error(p: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let scale = p.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    if scale == 0.0 {
        return 0.0;
    }
    horner(p, z).0.norm() / scale
}

/// Starting points on circles given by the upper Newton polygon of `log|c_k|`.
fn initial_points(p: &[Complex64]) -> Vec<Complex64> {
    let pts: Vec<(usize, f64)> = p
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| (k, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &q in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (q.1 - a.1) - (b.1 - a.1) * (q.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    let mut out = Vec::with_capacity(p.len() - 1);
    for (e, w) in hull.windows(2).enumerate() {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let m = j - i;
        let radius = ((li - lj) / m as f64).exp();
        for k in 0..m {
            let angle = 2.0 * PI * k as f64 / m as f64 + 0.4 + 0.7 * e as f64;
            out.push(Complex64::from_polar(radius, angle));
        }
    }
    out
}

/// All roots of `Σ_k coeffs[k]·w^k`.
pub fn roots_univariate(coeffs: &[Complex64]) -> Result<RootList> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("non-finite coefficient".into()));
    }
    let top = coeffs
        .iter()
        .rposition(|c| c.norm() > 0.0)
        .ok_or(Error::ZeroPolynomial)?;
    let low = coeffs.iter().position(|c| c.norm() > 0.0).expect("some coefficient is nonzero");
    let p: Vec<Complex64> = coeffs[low..=top].to_vec();
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let deg = p.len() - 1;
    if deg > 0 {
        roots.extend(aberth(&p)?);
    }
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    let full: Vec<Complex64> = coeffs[..=top].to_vec();
    let backward_errors: Vec<f64> = roots.iter().map(|&r| backward_error(&full, r)).collect();
    if let Some(e) = backward_errors.iter().find(|&&e| !(e < BACKWARD_ERROR_LIMIT)) {
        return Err(Error::NoConvergence(format!("backward error {e:e}")));
    }
    Ok(RootList {
        roots,
        backward_errors,
    })
}

fn aberth(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = p.len() - 1;
    if deg == 1 {
        return Ok(vec![-p[0] / p[1]]);
    }
    let mut z = initial_points(p);
    debug_assert_eq!(z.len(), deg);
    let mut converged = vec![false; deg];
    for _ in 0..MAX_ITERATIONS {
        for k in 0..deg {
            if converged[k] {
                continue;
            }
            let (v, d) = horner(p, z[k]);
            if v.norm() == 0.0 {
                converged[k] = true;
                continue;
            }
            let ratio = v / d;
            let s: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !step.is_finite() {
                let nudge = Complex64::new(1e-8, 1e-8) * (1.0 + z[k].norm());
                z[k] += nudge;
                continue;
            }
            z[k] -= step;
            if step.norm() <= 1e-15 * z[k].norm() || backward_error(p, z[k]) < 1e-17 {
                converged[k] = true;
            }
        }
        if converged.iter().all(|&c| c) {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = horner(p, *r);
            if d.norm() == 0.0 {
                break;
            }
            let cand = *r - v / d;
            if cand.is_finite() && backward_error(p, cand) < backward_error(p, *r) {
                *r = cand;
            } else {
                break;
            }
        }
    }
    Ok(z)
}
