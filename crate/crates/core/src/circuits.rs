//! Barycentric circuits, the coefficient region bounded by a hypocycloid,
//! and certificates for complement components obtained through lifts.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::{Integer, One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::{dehomogenize, phi_transport, ExpSum};
use crate::linalg;
use crate::scalars::{ExtScalar, Rational};
use crate::support_lattice::LiftRelation;

/// `|ψ(φ) − c|` below which a Newton refinement counts as a hit.
pub const HIT_TOLERANCE: f64 = 1e-9;

/// Tolerance on the orthogonal residual of `eq(g)` against `H_T`.
pub const SUBSPACE_TOLERANCE: f64 = 1e-9;

/// Function evaluations allowed for the cell subdivision of one probe.
const SUBDIVISION_BUDGET: usize = 400_000;

#[derive(Clone, Debug)]
pub struct BarycentricCircuit {
    /// Column indices of `α(0), …, α(n)` in the sum.
    pub vertex_indices: Vec<usize>,
    pub barycenter_index: usize,
    pub vertices: Vec<Vec<ExtScalar>>,
    pub barycenter: Vec<ExtScalar>,
    pub simplex_coeffs: Vec<Complex64>,
    /// `c_γ`, the negated stored coefficient of the barycenter term.
    pub barycenter_coeff: Complex64,
}

impl BarycentricCircuit {
    pub fn dim(&self) -> usize {
        self.barycenter.len()
    }

    /// `(Π|c_j|)^{1/(1+n)}`.
    pub fn radius_scale(&self) -> f64 {
        let n = self.dim() as f64;
        (self.simplex_coeffs.iter().map(|c| c.norm().ln()).sum::<f64>() / (n + 1.0)).exp()
    }

    /// `α(j) − γ` for each vertex, exactly.
    pub fn offsets(&self) -> Result<Vec<Vec<ExtScalar>>> {
        self.vertices
            .iter()
            .map(|v| v.iter().zip(&self.barycenter).map(|(a, g)| a.sub(g)).collect())
            .collect()
    }

    /// The same circuit with another barycenter coefficient `c_γ`.
    pub fn with_barycenter_coeff(&self, c: Complex64) -> Self {
        Self {
            barycenter_coeff: c,
            ..self.clone()
        }
    }
}

/// Finds a column that is the exact mean of the other `n+1` affinely
/// independent columns of a dehomogenized sum with `N = n + 2` terms.
pub fn detect_circuit(f: &ExpSum) -> Option<BarycentricCircuit> {
    let n = f.nvars();
    if f.nterms() != n + 2 {
        return None;
    }
    let a = f.support();
    let cols: Vec<Vec<ExtScalar>> = (0..a.ncols()).map(|j| a.column(j)).collect();
    let count = Rational::from_integer((n + 1).into());
    for k in 0..cols.len() {
        let others: Vec<usize> = (0..cols.len()).filter(|&j| j != k).collect();
        let mut sum: Vec<ExtScalar> = cols[k].iter().map(|x| ExtScalar::zero(x.basis())).collect();
        for &j in &others {
            for (s, x) in sum.iter_mut().zip(&cols[j]) {
                *s = s.add(x).ok()?;
            }
        }
        let mean_ok = sum.iter().zip(&cols[k]).all(|(s, g)| *s == g.scale(&count));
        if !mean_ok {
            continue;
        }
        let basis = a.basis();
        let mut m: Vec<Vec<ExtScalar>> = vec![vec![ExtScalar::from_integer(basis, 1); n + 1]];
        for i in 0..n {
            m.push(others.iter().map(|&j| cols[j][i].clone()).collect());
        }
        if linalg::generic_rank(&m) != n + 1 {
            continue;
        }
        let coeffs = f.coefficients();
        if others.iter().any(|&j| coeffs[j].norm() == 0.0) {
            continue;
        }
        return Some(BarycentricCircuit {
            vertices: others.iter().map(|&j| cols[j].clone()).collect(),
            simplex_coeffs: others.iter().map(|&j| coeffs[j]).collect(),
            vertex_indices: others,
            barycenter_index: k,
            barycenter: cols[k].clone(),
            barycenter_coeff: -coeffs[k],
        });
    }
    None
}

/// The point where all simplex terms `|c_j| e^{⟨x,α(j)⟩}` coincide.
pub fn equilibrium_point(circuit: &BarycentricCircuit) -> Vec<f64> {
    let n = circuit.dim();
    if n == 0 {
        return Vec::new();
    }
    let v: Vec<Vec<f64>> = circuit
        .vertices
        .iter()
        .map(|col| col.iter().map(ExtScalar::approximate).collect())
        .collect();
    let m = DMatrix::from_fn(n, n, |j, k| v[j + 1][k] - v[0][k]);
    let l0 = circuit.simplex_coeffs[0].norm().ln();
    let rhs = DVector::from_fn(n, |j, _| l0 - circuit.simplex_coeffs[j + 1].norm().ln());
    let x = m.lu().solve(&rhs).expect("vertices are affinely independent");
    x.iter().copied().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum ProbeVerdict {
    CertifiedOutside,
    HeuristicInside { witness: Vec<f64> },
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionProbe {
    pub query: [f64; 2],
    #[serde(flatten)]
    pub verdict: ProbeVerdict,
    /// Certified distance from the region when outside; otherwise the
    /// smallest sampled distance minus the covering radius (≤ 0).
    pub margin: f64,
}

impl RegionProbe {
    pub fn is_outside(&self) -> bool {
        self.verdict == ProbeVerdict::CertifiedOutside
    }
}

/// Default torus grid per axis.
pub fn default_grid(n: usize) -> usize {
    match n {
        0 | 1 => 4096,
        2 => 512,
        _ => 128,
    }
}

/// Sampled image of `ψ(φ) = R·Σ_j e^{i(arg c_j + ⟨α(j) − γ, φ⟩)}` with a
/// covering radius, answering probes for many query points.
pub struct RegionSampler {
    n: usize,
    radius: f64,
    args: Vec<f64>,
    offsets: Vec<Vec<f64>>,
    period: f64,
    grid: usize,
    step: f64,
    lipschitz: Vec<f64>,
    cover: f64,
    curvature: f64,
    values: Vec<Complex64>,
    index: BucketIndex,
}

impl RegionSampler {
    pub fn new(circuit: &BarycentricCircuit, grid_per_axis: usize) -> Result<Self> {
        let n = circuit.dim();
        if n == 0 {
            return Err(Error::InvalidInput("a circuit needs n ≥ 1".into()));
        }
        if grid_per_axis < 8 {
            return Err(Error::InvalidInput(format!("grid_per_axis = {grid_per_axis} < 8")));
        }
        let exact = circuit.offsets()?;
        let mut denom = num::BigInt::one();
        for x in exact.iter().flatten() {
            let q = x
                .as_rational()
                .ok_or_else(|| Error::InvalidInput("the region needs a rational circuit".into()))?;
            denom = denom.lcm(q.denom());
        }
        let period = 2.0 * PI * denom.to_f64().unwrap_or(f64::INFINITY);
        let offsets: Vec<Vec<f64>> = exact
            .iter()
            .map(|v| v.iter().map(ExtScalar::approximate).collect())
            .collect();
        let radius = circuit.radius_scale();
        let lipschitz: Vec<f64> = (0..n)
            .map(|k| radius * offsets.iter().map(|d| d[k].abs()).sum::<f64>())
            .collect();
        let step = period / grid_per_axis as f64;
        let cover = 0.5 * step * lipschitz.iter().sum::<f64>();
        let curvature = radius * offsets.iter().map(|d| d.iter().map(|x| x.abs()).sum::<f64>().powi(2)).sum::<f64>();
        let args: Vec<f64> = circuit.simplex_coeffs.iter().map(|c| c.arg()).collect();
        let mut s = Self {
            n,
            radius,
            args,
            offsets,
            period,
            grid: grid_per_axis,
            step,
            lipschitz,
            cover,
            curvature,
            values: Vec::new(),
            index: BucketIndex::default(),
        };
        let total = grid_per_axis
            .checked_pow(n as u32)
            .filter(|&t| t <= 50_000_000)
            .ok_or_else(|| Error::InvalidInput("torus grid is too large".into()))?;
        s.values = (0..total)
            .into_par_iter()
            .map(|i| s.psi(&s.grid_point(i)))
            .collect();
        s.index = BucketIndex::new(&s.values);
        Ok(s)
    }

    pub fn covering_radius(&self) -> f64 {
        self.cover
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.values
    }

    fn grid_point(&self, mut i: usize) -> Vec<f64> {
        let mut phi = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            phi.push((i % self.grid) as f64 * self.step);
            i /= self.grid;
        }
        phi
    }

    pub fn psi(&self, phi: &[f64]) -> Complex64 {
        self.args
            .iter()
            .zip(&self.offsets)
            .map(|(a, d)| {
                let t = a + d.iter().zip(phi).map(|(x, y)| x * y).sum::<f64>();
                Complex64::from_polar(1.0, t)
            })
            .sum::<Complex64>()
            * self.radius
    }

    fn psi_jacobian(&self, phi: &[f64]) -> (Complex64, Vec<Complex64>) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut jac = vec![Complex64::new(0.0, 0.0); self.n];
        for (a, d) in self.args.iter().zip(&self.offsets) {
            let t = a + d.iter().zip(phi).map(|(x, y)| x * y).sum::<f64>();
            let e = Complex64::from_polar(self.radius, t);
            v += e;
            for (jk, dk) in jac.iter_mut().zip(d) {
                *jk += Complex64::new(0.0, *dk) * e;
            }
        }
        (v, jac)
    }

    pub fn probe(&self, c: Complex64) -> RegionProbe {
        let query = [c.re, c.im];
        if self.n == 1 {
            return self.probe_segment(c);
        }
        let (best, dmin) = self.index.nearest(&self.values, c);
        if dmin > self.cover {
            return RegionProbe {
                query,
                verdict: ProbeVerdict::CertifiedOutside,
                margin: dmin - self.cover,
            };
        }
        let mut starts = self.index.within(&self.values, c, self.cover);
        starts.sort_by(|&a, &b| (self.values[a] - c).norm().total_cmp(&(self.values[b] - c).norm()));
        starts.truncate(8);
        if starts.is_empty() {
            starts.push(best);
        }
        for &s in &starts {
            if let Some(w) = self.refine(self.grid_point(s), c) {
                return RegionProbe {
                    query,
                    verdict: ProbeVerdict::HeuristicInside { witness: w },
                    margin: dmin - self.cover,
                };
            }
        }
        match self.subdivide(c) {
            Some(m) => RegionProbe {
                query,
                verdict: ProbeVerdict::CertifiedOutside,
                margin: m,
            },
            None => RegionProbe {
                query,
                verdict: ProbeVerdict::Unknown,
                margin: dmin - self.cover,
            },
        }
    }

    /// For n = 1 the region is the segment `[−2R, 2R]·e^{iμ}`.
    fn probe_segment(&self, c: Complex64) -> RegionProbe {
        let mu = 0.5 * (self.args[0] + self.args[1]);
        let u = Complex64::from_polar(1.0, mu);
        let along = (c * u.conj()).re;
        let t = along.clamp(-2.0 * self.radius, 2.0 * self.radius);
        let dist = (c - u * t).norm();
        let query = [c.re, c.im];
        if dist > HIT_TOLERANCE * (1.0 + self.radius) {
            return RegionProbe {
                query,
                verdict: ProbeVerdict::CertifiedOutside,
                margin: dist,
            };
        }
        // ψ = 2R e^{iμ} cos(δφ + (a₁ − a₀)/2)
        let delta = self.offsets[1][0];
        let phase = (t / (2.0 * self.radius)).clamp(-1.0, 1.0).acos();
        let phi = (phase - 0.5 * (self.args[1] - self.args[0])) / delta;
        RegionProbe {
            query,
            verdict: ProbeVerdict::HeuristicInside { witness: vec![phi] },
            margin: -dist,
        }
    }

    /// Gauss–Newton on `ψ(φ) = c` with minimum-norm steps.
    fn refine(&self, mut phi: Vec<f64>, c: Complex64) -> Option<Vec<f64>> {
        for _ in 0..60 {
            let (v, jac) = self.psi_jacobian(&phi);
            let r = v - c;
            if r.norm() < HIT_TOLERANCE {
                return Some(phi);
            }
            let j = DMatrix::from_fn(2, self.n, |row, k| if row == 0 { jac[k].re } else { jac[k].im });
            let rv = DVector::from_vec(vec![r.re, r.im]);
            let jjt = &j * j.transpose();
            let y = jjt.lu().solve(&rv)?;
            let step = j.transpose() * y;
            if !step.iter().all(|s| s.is_finite()) {
                return None;
            }
            let mut t = 1.0;
            loop {
                let cand: Vec<f64> = phi.iter().zip(step.iter()).map(|(p, s)| p - t * s).collect();
                if (self.psi(&cand) - c).norm() < r.norm() || t < 1e-6 {
                    phi = cand;
                    break;
                }
                t *= 0.5;
            }
        }
        None
    }

    /// Cell subdivision around all grid points within the covering radius.
    /// Returns a certified positive distance, or None on a hit or when the
    /// budget runs out.
    fn subdivide(&self, c: Complex64) -> Option<f64> {
        let mut stack: Vec<(Vec<f64>, f64)> = self
            .index
            .within(&self.values, c, self.cover * (1.0 + 1e-12))
            .into_iter()
            .map(|i| (self.grid_point(i), 0.5 * self.step))
            .collect();
        let ltot: f64 = self.lipschitz.iter().sum();
        let mut margin = f64::INFINITY;
        let mut evals = 0usize;
        while let Some((center, half)) = stack.pop() {
            let (v, jac) = self.psi_jacobian(&center);
            let d = (v - c).norm();
            evals += 1;
            if d < HIT_TOLERANCE || evals > SUBDIVISION_BUDGET {
                return None;
            }
            // |ψ(φ+δ) − ψ(φ)| ≤ Σ|∂ₖψ|·w + ½·w²·R·Σⱼ(Σₖ|dⱼₖ|)² for |δₖ| ≤ w
            let taylor = half * jac.iter().map(|j| j.norm()).sum::<f64>() + 0.5 * half * half * self.curvature;
            let lower = d - taylor.min(half * ltot) - 1e-12 * (1.0 + d);
            if lower > 0.0 {
                margin = margin.min(lower);
                continue;
            }
            let h2 = 0.5 * half;
            for mask in 0..(1usize << self.n) {
                let child: Vec<f64> = center
                    .iter()
                    .enumerate()
                    .map(|(k, x)| if mask >> k & 1 == 1 { x + h2 } else { x - h2 })
                    .collect();
                stack.push((child, h2));
            }
        }
        margin.is_finite().then_some(margin).or(Some(self.cover))
    }

    /// The region's period along each torus axis.
    pub fn period(&self) -> f64 {
        self.period
    }
}

/// Uniform bucket grid over the bounding box of sampled points.
#[derive(Default)]
struct BucketIndex {
    lo: [f64; 2],
    size: [f64; 2],
    dims: [usize; 2],
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl BucketIndex {
    fn new(points: &[Complex64]) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            lo = [lo[0].min(p.re), lo[1].min(p.im)];
            hi = [hi[0].max(p.re), hi[1].max(p.im)];
        }
        let b = ((points.len() as f64 / 4.0).sqrt() as usize).clamp(1, 1024);
        let span = [(hi[0] - lo[0]).max(1e-12), (hi[1] - lo[1]).max(1e-12)];
        let size = [span[0] / b as f64, span[1] / b as f64];
        let mut idx = Self {
            lo,
            size,
            dims: [b, b],
            starts: Vec::new(),
            items: Vec::new(),
        };
        let keys: Vec<usize> = points.iter().map(|p| idx.key(idx.cell(*p))).collect();
        let mut counts = vec![0usize; b * b + 1];
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for i in 0..b * b {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut items = vec![0; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            items[fill[k]] = i;
            fill[k] += 1;
        }
        idx.starts = counts;
        idx.items = items;
        idx
    }

    fn cell(&self, p: Complex64) -> [usize; 2] {
        let f = |v: f64, lo: f64, s: f64, d: usize| (((v - lo) / s).floor().max(0.0) as usize).min(d - 1);
        [
            f(p.re, self.lo[0], self.size[0], self.dims[0]),
            f(p.im, self.lo[1], self.size[1], self.dims[1]),
        ]
    }

    fn key(&self, c: [usize; 2]) -> usize {
        c[1] * self.dims[0] + c[0]
    }

    fn bucket(&self, c: [usize; 2]) -> &[usize] {
        let k = self.key(c);
        &self.items[self.starts[k]..self.starts[k + 1]]
    }

    fn nearest(&self, points: &[Complex64], q: Complex64) -> (usize, f64) {
        let c = self.cell(q);
        let mut best = (usize::MAX, f64::INFINITY);
        let cell_min = self.size[0].min(self.size[1]);
        let maxr = self.dims[0].max(self.dims[1]);
        for r in 0..=maxr {
            if r >= 1 && (r - 1) as f64 * cell_min > best.1 {
                break;
            }
            let (x0, x1) = (c[0] as i64 - r as i64, c[0] as i64 + r as i64);
            let (y0, y1) = (c[1] as i64 - r as i64, c[1] as i64 + r as i64);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let on_ring = x == x0 || x == x1 || y == y0 || y == y1;
                    if !on_ring || x < 0 || y < 0 || x >= self.dims[0] as i64 || y >= self.dims[1] as i64 {
                        continue;
                    }
                    for &i in self.bucket([x as usize, y as usize]) {
                        let d = (points[i] - q).norm();
                        if d < best.1 || (d == best.1 && i < best.0) {
                            best = (i, d);
                        }
                    }
                }
            }
        }
        best
    }

    fn within(&self, points: &[Complex64], q: Complex64, radius: f64) -> Vec<usize> {
        let a = self.cell(q - Complex64::new(radius, radius));
        let b = self.cell(q + Complex64::new(radius, radius));
        let mut out = Vec::new();
        for y in a[1]..=b[1] {
            for x in a[0]..=b[0] {
                out.extend(self.bucket([x, y]).iter().filter(|&&i| (points[i] - q).norm() <= radius));
            }
        }
        out.sort_unstable();
        out
    }
}

/// One-shot probe of `c` against the region of `circuit`.
pub fn region_probe(circuit: &BarycentricCircuit, c: Complex64, grid_per_axis: usize) -> Result<RegionProbe> {
    Ok(RegionSampler::new(circuit, grid_per_axis)?.probe(c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypocycloid {
    /// `−27 + 18r² + r⁴ − 8r³cos3θ`
    Ex1,
    /// `−4096 + 768r² + 6r⁴ + r⁶ − 54r⁴cos4θ`
    Ex2,
}

/// The implicit boundary polynomial `h(r, θ)` with `θ = arg(c_γ)`.
pub fn hypocycloid_implicit(example: Hypocycloid, r: f64, theta: f64) -> f64 {
    match example {
        Hypocycloid::Ex1 => -27.0 + 18.0 * r * r + r.powi(4) - 8.0 * r.powi(3) * (3.0 * theta).cos(),
        Hypocycloid::Ex2 => {
            -4096.0 + 768.0 * r * r + 6.0 * r.powi(4) + r.powi(6) - 54.0 * r.powi(4) * (4.0 * theta).cos()
        }
    }
}

/// An arc of arguments, in units of π, running counterclockwise from
/// `start` to `end`; `start > end` means the arc passes through ±π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArgInterval {
    pub start: f64,
    pub end: f64,
}

impl ArgInterval {
    pub fn contains(&self, arg_pi: f64) -> bool {
        let a = wrap_pi(arg_pi);
        if self.start <= self.end {
            (self.start..=self.end).contains(&a)
        } else {
            a >= self.start || a <= self.end
        }
    }

    pub fn midpoint(&self) -> f64 {
        let len = (self.end - self.start).rem_euclid(2.0);
        wrap_pi(self.start + 0.5 * len)
    }
}

/// Wraps an angle in units of π into (−1, 1].
pub fn wrap_pi(a: f64) -> f64 {
    let w = (a + 1.0).rem_euclid(2.0) - 1.0;
    if w <= -1.0 {
        w + 2.0
    } else {
        w
    }
}

/// Arguments of the stored coefficient `c` (so `c_γ = −c`) for which every
/// `c = r·e^{iθ}` with `r > radius` lies outside the region. The region is
/// star-shaped about the origin, so this is the set of θ whose point at
/// `radius` is certified outside. `steps` is the number of scan samples
/// over the circle; boundaries are refined by bisection.
pub fn safe_argument_intervals(circuit: &BarycentricCircuit, radius: f64, steps: usize) -> Result<Vec<ArgInterval>> {
    safe_argument_intervals_with(&RegionSampler::new(circuit, default_grid(circuit.dim()))?, radius, steps)
}

pub fn safe_argument_intervals_with(sampler: &RegionSampler, radius: f64, steps: usize) -> Result<Vec<ArgInterval>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let steps = steps.max(16);
    // θ is the argument of c in units of π, c_γ = −c
    let safe = |theta: f64| sampler.probe(-Complex64::from_polar(radius, theta * PI)).is_outside();
    let thetas: Vec<f64> = (0..steps).map(|i| -1.0 + 2.0 * i as f64 / steps as f64).collect();
    let flags: Vec<bool> = thetas.par_iter().map(|&t| safe(t)).collect();
    if flags.iter().all(|&f| f) {
        return Ok(vec![ArgInterval { start: -1.0, end: 1.0 }]);
    }
    if flags.iter().all(|&f| !f) {
        return Ok(Vec::new());
    }
    let h = 2.0 / steps as f64;
    let refine = |a: f64, fa: bool| {
        // boundary between a and a + h
        let (mut lo, mut hi) = (a, a + h);
        for _ in 0..22 {
            let mid = 0.5 * (lo + hi);
            if safe(mid) == fa {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let changes: Vec<usize> = (0..steps).filter(|&i| flags[i] != flags[(i + 1) % steps]).collect();
    let bounds: Vec<(f64, bool)> = changes
        .par_iter()
        .map(|&i| (wrap_pi(refine(thetas[i], flags[i])), flags[(i + 1) % steps]))
        .collect();
    // bounds alternate between entering (true) and leaving (false) the safe set
    let mut out = Vec::new();
    let first_enter = bounds.iter().position(|b| b.1).expect("some change enters the safe set");
    for k in 0..bounds.len() {
        let (start, entering) = bounds[(first_enter + k) % bounds.len()];
        if entering {
            let (end, _) = bounds[(first_enter + k + 1) % bounds.len()];
            out.push(ArgInterval { start, end });
        }
    }
    out.sort_by(|a, b| a.start.total_cmp(&b.start));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FailureReason {
    NotACircuitLift,
    EquilibriumOffSubspace,
    RegionInconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum Verdict {
    Certified,
    Failed { reason: FailureReason },
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub stages: Vec<Stage>,
    pub verdict: Verdict,
    /// `T·γ` with the homogenizing entry dropped, exactly.
    pub order: Option<Vec<String>>,
    pub order_approx: Option<Vec<f64>>,
    pub equilibrium: Option<Vec<f64>>,
    pub subspace_residual: Option<f64>,
    pub barycenter_coeff: Option<[f64; 2]>,
    pub probe: Option<RegionProbe>,
}

impl CertificateReport {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// Runs transport, circuit detection, equilibrium, the `H_T` check and the
/// region probe. `grid` of None uses [`default_grid`].
pub fn certify_component(
    f: &ExpSum,
    lift: &LiftRelation,
    grid: Option<usize>,
    timings: bool,
) -> Result<CertificateReport> {
    let mut report = CertificateReport {
        stages: Vec::new(),
        verdict: Verdict::Failed {
            reason: FailureReason::NotACircuitLift,
        },
        order: None,
        order_approx: None,
        equilibrium: None,
        subspace_residual: None,
        barycenter_coeff: None,
        probe: None,
    };
    let mut clock = Instant::now();
    let mut stage = |report: &mut CertificateReport, name: &'static str, passed: bool, detail: String| {
        let millis = timings.then(|| clock.elapsed().as_secs_f64() * 1e3);
        clock = Instant::now();
        report.stages.push(Stage {
            name,
            passed,
            detail,
            millis,
        });
    };

    if !lift.lift().is_rational() {
        return Err(Error::InvalidInput("the lift must be rational".into()));
    }
    let g = phi_transport(f, lift)?;
    stage(&mut report, "transport", true, format!("g has {} variables", g.nvars()));

    let gd = if g.support().top_row_is_ones() || !lift.lift().top_row_is_ones() {
        dehomogenize(&g)?
    } else {
        g.clone()
    };
    let Some(circuit) = detect_circuit(&gd) else {
        stage(&mut report, "circuit", false, "the lifted support is not a barycentric circuit".into());
        return Ok(report);
    };
    let gamma: Vec<String> = circuit.barycenter.iter().map(|x| x.to_string()).collect();
    stage(&mut report, "circuit", true, format!("barycenter ({})", gamma.join(", ")));

    let eq = equilibrium_point(&circuit);
    report.equilibrium = Some(eq.clone());
    stage(&mut report, "equilibrium", true, format!("{eq:?}"));

    // (t, eq) ∈ H_T = Row(T) for some t
    let (_, residual) = pull_back(lift, &eq);
    report.subspace_residual = Some(residual);
    let scale = 1.0 + eq.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let on_subspace = residual < SUBSPACE_TOLERANCE * scale;
    stage(&mut report, "subspace", on_subspace, format!("residual {residual:e}"));
    if !on_subspace {
        report.verdict = Verdict::Failed {
            reason: FailureReason::EquilibriumOffSubspace,
        };
        return Ok(report);
    }

    let cg = circuit.barycenter_coeff;
    report.barycenter_coeff = Some([cg.re, cg.im]);
    let probe = region_probe(&circuit, cg, grid.unwrap_or_else(|| default_grid(circuit.dim())))?;
    let outside = probe.is_outside();
    stage(&mut report, "region", outside, format!("{:?}, margin {:e}", probe.verdict, probe.margin));
    report.probe = Some(probe);
    if !outside {
        report.verdict = Verdict::Failed {
            reason: FailureReason::RegionInconclusive,
        };
        return Ok(report);
    }

    let basis = lift.lift().basis();
    let homog_gamma: Vec<ExtScalar> = std::iter::once(ExtScalar::from_integer(basis, 1))
        .chain(circuit.barycenter.iter().cloned())
        .collect();
    let mut order = Vec::with_capacity(lift.factor().len());
    for row in lift.factor() {
        let mut acc = ExtScalar::zero(basis);
        for (x, y) in row.iter().zip(&homog_gamma) {
            acc = acc.add(&x.mul(y)?)?;
        }
        order.push(acc);
    }
    if lift.base().top_row_is_ones() {
        order.remove(0);
    }
    report.order_approx = Some(order.iter().map(ExtScalar::approximate).collect());
    report.order = Some(order.iter().map(|x| x.to_string()).collect());
    report.verdict = Verdict::Certified;
    Ok(report)
}

/// Least-squares `y` with `y·S ≈ b`, and the residual `|y·S − b|`.
fn solve_on_span(rows: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, f64) {
    let k = rows.len();
    let m = b.len();
    let st = DMatrix::from_fn(m, k, |i, j| rows[j][i]);
    let bv = DVector::from_column_slice(b);
    let y = st.clone().svd(true, true).solve(&bv, 1e-12).unwrap_or_else(|_| DVector::zeros(k));
    let residual = (&st * &y - bv).norm();
    (y.iter().copied().collect(), residual)
}

/// `x·T + s·e₀ = (0, eq)` for the lifted equilibrium `eq`.
fn pull_back(lift: &LiftRelation, eq: &[f64]) -> (Vec<f64>, f64) {
    let m = lift.lift().nrows();
    let mut span = lift.factor_approx();
    span.push((0..m).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect());
    let target: Vec<f64> = std::iter::once(0.0).chain(eq.iter().copied()).collect();
    let (mut y, residual) = solve_on_span(&span, &target);
    y.pop();
    (y, residual)
}

/// The base point over the equilibrium of the transported circuit, in the
/// coordinates of `f` (dropping the homogenizing one when `f` has it
/// stripped). None unless the lift gives a circuit whose equilibrium lies
/// on `H_T`.
pub fn base_equilibrium(f: &ExpSum, lift: &LiftRelation) -> Option<Vec<f64>> {
    let g = dehomogenize(&phi_transport(f, lift).ok()?).ok()?;
    let eq = equilibrium_point(&detect_circuit(&g)?);
    let (x, residual) = pull_back(lift, &eq);
    let scale = 1.0 + eq.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if residual >= SUBSPACE_TOLERANCE * scale {
        return None;
    }
    Some(if lift.base().top_row_is_ones() { x[1..].to_vec() } else { x })
}
