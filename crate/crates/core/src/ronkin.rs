//! Quasi-Monte Carlo estimates of the Ronkin function
//! `N_f(x) = ∫ log|f_χ(x)| dχ` over the character torus of ℤ[A].

use std::f64::consts::TAU;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::{character_coordinates, ExpSum};

/// Lower clip for `log|f_χ|` at exact zeros.
pub const LOG_CLIP: f64 = -745.0;

/// Independent random shifts of the lattice rule.
pub const SHIFTS: usize = 8;

const CHUNK: usize = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct RonkinEstimate {
    pub value: f64,
    /// Standard error across the random shifts.
    pub std_error: f64,
    /// Integrand evaluations clipped at [`LOG_CLIP`].
    pub clipped: usize,
    pub samples: usize,
}

/// Rank-1 lattice generator `(1, a, a², …) mod m` with `a ≈ m/φ`.
fn generator(m: usize, dim: usize) -> Vec<u64> {
    let m64 = m as u64;
    let mut a = ((m as f64) * 0.618_033_988_749_894_9).round() as u64;
    a = a.max(1);
    while m64 > 1 && gcd(a, m64) != 1 {
        a += 1;
    }
    let mut g = Vec::with_capacity(dim);
    let mut v = 1 % m64.max(1);
    for _ in 0..dim {
        g.push(v);
        v = (v * a) % m64.max(1);
    }
    g
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Prepared integrand `θ ↦ log|Σ a_α e^{i⟨θ, k_α⟩}| + shift`.
struct Integrand {
    amps: Vec<Complex64>,
    coords: Vec<Vec<f64>>,
    shift: f64,
    dim: usize,
}

impl Integrand {
    fn new(f: &ExpSum, x: &[f64]) -> Result<Self> {
        if x.len() != f.nvars() {
            return Err(Error::ShapeMismatch(format!("point of length {} for {} variables", x.len(), f.nvars())));
        }
        let logs = f.term_log_moduli(x);
        let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let amps = logs
            .iter()
            .zip(f.coefficients())
            .map(|(l, c)| Complex64::from_polar((l - shift).exp(), c.arg()))
            .collect();
        let coords = character_coordinates(f);
        let dim = coords.first().map_or(0, Vec::len);
        Ok(Self {
            amps,
            coords,
            shift,
            dim,
        })
    }

    fn eval(&self, u: &[f64]) -> (f64, bool) {
        let s: Complex64 = self
            .amps
            .iter()
            .zip(&self.coords)
            .map(|(a, k)| {
                let angle: f64 = k.iter().zip(u).map(|(ki, ui)| ki * ui).sum::<f64>() * TAU;
                a * Complex64::from_polar(1.0, angle)
            })
            .sum();
        let l = s.norm().ln();
        if l < LOG_CLIP || l.is_nan() {
            (LOG_CLIP + self.shift, true)
        } else {
            (l + self.shift, false)
        }
    }
}

pub fn ronkin_estimate(f: &ExpSum, x: &[f64], samples: usize, seed: u64) -> Result<RonkinEstimate> {
    let integrand = Integrand::new(f, x)?;
    if integrand.dim == 0 {
        let (v, clipped) = integrand.eval(&[]);
        return Ok(RonkinEstimate {
            value: v,
            std_error: 0.0,
            clipped: usize::from(clipped),
            samples: 1,
        });
    }
    let m = (samples / SHIFTS).max(1);
    let g = generator(m, integrand.dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<Vec<f64>> = (0..SHIFTS)
        .map(|_| (0..integrand.dim).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let mut means = Vec::with_capacity(SHIFTS);
    let mut clipped = 0;
    for shift in &shifts {
        // fixed chunking keeps the summation order independent of the pool size
        let parts: Vec<(f64, usize)> = (0..m.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut u = vec![0.0; integrand.dim];
                let mut sum = 0.0;
                let mut clip = 0;
                for k in c * CHUNK..((c + 1) * CHUNK).min(m) {
                    for (d, ud) in u.iter_mut().enumerate() {
                        let base = ((k as u64 * g[d]) % m as u64) as f64 / m as f64;
                        *ud = (base + shift[d]).fract();
                    }
                    let (v, cl) = integrand.eval(&u);
                    sum += v;
                    clip += usize::from(cl);
                }
                (sum, clip)
            })
            .collect();
        let total: f64 = parts.iter().map(|p| p.0).sum();
        clipped += parts.iter().map(|p| p.1).sum::<usize>();
        means.push(total / m as f64);
    }
    let value = means.iter().sum::<f64>() / SHIFTS as f64;
    let var = means.iter().map(|q| (q - value).powi(2)).sum::<f64>() / (SHIFTS - 1) as f64;
    Ok(RonkinEstimate {
        value,
        std_error: (var / SHIFTS as f64).sqrt(),
        clipped,
        samples: m * SHIFTS,
    })
}

/// Central finite differences of the estimate with common random numbers.
pub fn ronkin_gradient(f: &ExpSum, x: &[f64], h: f64, samples: usize, seed: u64) -> Result<Vec<f64>> {
    (0..x.len())
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let a = ronkin_estimate(f, &xp, samples, seed)?.value;
            let b = ronkin_estimate(f, &xm, samples, seed)?.value;
            Ok((a - b) / (2.0 * h))
        })
        .collect()
}
