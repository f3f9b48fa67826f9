//! Rasters of amoeba approximations at three levels, slice-root sampling of
//! actual zeros, and the deformation limit sweep.

use std::f64::consts::TAU;

use num::complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::{homogenize, DeformationFamily, ExpSum};
use crate::membership::{caisson_lopsided_member, in_lopsided_amoeba};
use crate::raster::{hausdorff, raster, GridRaster, Window};
use crate::roots::roots_univariate;
use crate::support_lattice::{minimal_rational_lift, LiftRelation, SupportMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    /// Sampled zeros of `f` on phase slices (algebraic, n ≤ 2).
    A,
    /// Lopsided caisson membership through a lift.
    B,
    /// Lopsided membership of `f`.
    I,
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Self::A),
            "B" | "b" => Ok(Self::B),
            "I" | "i" => Ok(Self::I),
            _ => Err(Error::Parse(format!("unknown level {s:?}"))),
        }
    }
}

/// A coordinate plane (or line) through `base` in ℝⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub base: Vec<f64>,
    pub x_axis: usize,
    pub y_axis: Option<usize>,
}

impl Slice {
    /// The whole space for n = 1 or n = 2.
    pub fn full(n: usize) -> Result<Self> {
        match n {
            1 => Ok(Self {
                base: vec![0.0],
                x_axis: 0,
                y_axis: None,
            }),
            2 => Ok(Self {
                base: vec![0.0; 2],
                x_axis: 0,
                y_axis: Some(1),
            }),
            _ => Err(Error::InvalidInput(format!("{n} variables need an explicit slice"))),
        }
    }

    pub fn point(&self, p: [f64; 2]) -> Vec<f64> {
        let mut x = self.base.clone();
        x[self.x_axis] = p[0];
        if let Some(k) = self.y_axis {
            x[k] = p[1];
        }
        x
    }

    fn check(&self, n: usize) -> Result<()> {
        let ok = self.base.len() == n
            && self.x_axis < n
            && self.y_axis.map_or(true, |k| k < n && k != self.x_axis);
        if ok {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("slice {self:?} for {n} variables")))
        }
    }
}

/// Lopsided caisson membership of `f` at `x`, homogenizing `f` when the lift
/// is on the homogenized support.
pub fn caisson_member(f: &ExpSum, lift: &LiftRelation, x: &[f64]) -> Result<bool> {
    if lift.base().nrows() == f.nvars() + 1 && !f.support().top_row_is_ones() {
        let h = homogenize(f)?;
        let hx: Vec<f64> = std::iter::once(0.0).chain(x.iter().copied()).collect();
        caisson_lopsided_member(&h, lift, &hx)
    } else {
        caisson_lopsided_member(f, lift, x)
    }
}

/// The minimal rational lift of the homogenized support of `f`.
pub fn default_lift(f: &ExpSum) -> Result<LiftRelation> {
    let support = if f.support().top_row_is_ones() {
        f.support().clone()
    } else {
        f.support().with_ones_row()
    };
    Ok(minimal_rational_lift(&SupportMatrix::new(support)?))
}

/// `log|w_k|` of the zeros of `f` on the slice where every other variable
/// `w_j` has `log|w_j| = x[j]` and argument `phases[j]`.
pub fn slice_zero_logs(f: &ExpSum, k: usize, x: &[f64], phases: &[f64]) -> Result<Vec<f64>> {
    let exps = f
        .integer_exponents()
        .ok_or(Error::NotAlgebraic)?;
    let lo = exps.iter().map(|e| e[k]).min().unwrap_or(0);
    let hi = exps.iter().map(|e| e[k]).max().unwrap_or(0);
    let mut p = vec![Complex64::new(0.0, 0.0); (hi - lo) as usize + 1];
    for (e, c) in exps.iter().zip(f.coefficients()) {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (j, &a) in e.iter().enumerate() {
            if j != k {
                re += a as f64 * x[j];
                im += a as f64 * phases[j];
            }
        }
        p[(e[k] - lo) as usize] += c * Complex64::from_polar(re.exp(), im);
    }
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Ok(Vec::new());
    }
    for c in p.iter_mut() {
        *c /= scale;
    }
    let roots = roots_univariate(&p)?;
    Ok(roots.roots.iter().filter(|r| r.norm() > 0.0).map(|r| r.norm().ln()).collect())
}

/// Phase samples used by level-A rasters.
pub const DEFAULT_PHASES: usize = 64;

/// Rasterizes one approximation level of `f` on a slice.
pub fn level_raster(
    f: &ExpSum,
    level: Level,
    lift: Option<&LiftRelation>,
    slice: &Slice,
    window: Window,
    resolution: [usize; 2],
) -> Result<GridRaster> {
    slice.check(f.nvars())?;
    match level {
        Level::I => Ok(raster(|p| in_lopsided_amoeba(f, &slice.point(p)), window, resolution)),
        Level::B => {
            let owned;
            let lift = match lift {
                Some(l) => l,
                None => {
                    owned = default_lift(f)?;
                    &owned
                }
            };
            caisson_member(f, lift, &slice.point([window.x[0], window.y[0]]))?;
            Ok(raster(
                |p| caisson_member(f, lift, &slice.point(p)).unwrap_or(true),
                window,
                resolution,
            ))
        }
        Level::A => sampled_amoeba(f, slice, window, resolution, DEFAULT_PHASES),
    }
}

/// Pixels hit by zeros of `f` on `phases` evenly spaced phase slices, swept
/// along both axes.
pub fn sampled_amoeba(
    f: &ExpSum,
    slice: &Slice,
    window: Window,
    resolution: [usize; 2],
    phases: usize,
) -> Result<GridRaster> {
    slice.check(f.nvars())?;
    if !f.is_algebraic() {
        return Err(Error::NotAlgebraic);
    }
    let n = f.nvars();
    if n > 2 || (n == 2 && slice.y_axis.is_none()) {
        return Err(Error::InvalidInput("level A needs the full space of at most two variables".into()));
    }
    let mut out = GridRaster::empty(window, resolution);
    let [nx, ny] = resolution;
    if n == 1 {
        for l in slice_zero_logs(f, 0, &[0.0], &[0.0])? {
            if let Some((ix, _)) = out.pixel_of([l, 0.5 * (window.y[0] + window.y[1])]) {
                for iy in 0..ny {
                    out.set(ix, iy, true);
                }
            }
        }
        return Ok(out);
    }
    let phase_list: Vec<f64> = (0..phases.max(1)).map(|k| TAU * k as f64 / phases.max(1) as f64).collect();
    let (ax, ay) = (slice.x_axis, slice.y_axis.expect("checked"));
    // column sweep fixes the x axis, row sweep the y axis
    let sweep = |fixed: usize, free: usize, count: usize, coord: &(dyn Fn(usize) -> f64 + Sync)| -> Result<Vec<(f64, f64)>> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let v = coord(i);
                let mut x = vec![0.0; 2];
                x[fixed] = v;
                let mut hits = Vec::new();
                for &t in &phase_list {
                    let mut ph = vec![0.0; 2];
                    ph[fixed] = t;
                    for l in slice_zero_logs(f, free, &x, &ph)? {
                        let mut p = [0.0; 2];
                        p[fixed] = v;
                        p[free] = l;
                        hits.push((p[ax], p[ay]));
                    }
                }
                Ok(hits)
            })
            .collect::<Result<Vec<_>>>()
            .map(|v| v.concat())
    };
    let g = out.clone();
    let cols = sweep(ax, ay, nx, &|i| g.center(i, 0)[0])?;
    let rows = sweep(ay, ax, ny, &|i| g.center(0, i)[1])?;
    for (a, b) in cols.into_iter().chain(rows) {
        if let Some((ix, iy)) = out.pixel_of([a, b]) {
            out.set(ix, iy, true);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub distance: f64,
}

/// Hausdorff distances between the lopsided raster of `f_λ` on the
/// `(z, t)` plane and the caisson raster of `f` extended constantly in `t`.
pub fn limit_sweep(
    family: &DeformationFamily,
    lambdas: &[f64],
    window: Window,
    resolution: [usize; 2],
) -> Result<Vec<SweepRow>> {
    let f = family.base();
    if f.nvars() + family.k() != 2 || family.k() == 0 {
        return Err(Error::InvalidInput("the sweep needs one base and one deformation variable".into()));
    }
    if lambdas.iter().any(|&l| l == 0.0 || !l.is_finite()) {
        return Err(Error::InvalidInput("λ values must be finite and nonzero".into()));
    }
    let lift = default_lift(f)?;
    let limit = raster(
        |p| caisson_member(f, &lift, &[p[0]]).unwrap_or(true),
        window,
        resolution,
    );
    lambdas
        .iter()
        .map(|&lambda| {
            let fl = family.deform(lambda)?;
            let r = raster(|p| in_lopsided_amoeba(&fl, &p), window, resolution);
            Ok(SweepRow {
                lambda,
                distance: hausdorff(&r, &limit)?,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("lambda,distance\n");
    for r in rows {
        s.push_str(&format!("{},{}\n", r.lambda, r.distance));
    }
    s
}
