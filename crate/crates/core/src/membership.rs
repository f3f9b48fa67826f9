//! Lopsided membership, caisson membership through a lift, and lopsided
//! dominance thresholds.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expsum::{phi_transport, ExpSum};
use crate::support_lattice::LiftRelation;

/// Relative slack for strict domination.
pub const DOMINATION_SLACK: f64 = 1e-12;

/// The index of the unique term whose modulus strictly exceeds the sum of
/// all others at `x`, if there is one.
pub fn lopsided_dominator(f: &ExpSum, x: &[f64]) -> Option<usize> {
    dominator_of_logs(&f.term_log_moduli(x))
}

/// Domination test on `log|c_α| + ⟨x,α⟩` values.
pub fn dominator_of_logs(logs: &[f64]) -> Option<usize> {
    let (top, m) = logs
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    if m == f64::NEG_INFINITY {
        return None;
    }
    if m == f64::INFINITY {
        let infinite = logs.iter().filter(|v| **v == f64::INFINITY).count();
        return (infinite == 1).then_some(top);
    }
    let rest: f64 = logs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != top)
        .map(|(_, v)| (v - m).exp())
        .sum();
    (1.0 > rest * (1.0 + DOMINATION_SLACK)).then_some(top)
}

pub fn in_lopsided_amoeba(f: &ExpSum, x: &[f64]) -> bool {
    lopsided_dominator(f, x).is_none()
}

/// Lopsided membership of `ι(x) = x·T` for the transported sum `Φ(f)`.
pub fn caisson_lopsided_member(f: &ExpSum, lift: &LiftRelation, x: &[f64]) -> Result<bool> {
    let g = phi_transport(f, lift)?;
    Ok(in_lopsided_amoeba(&g, &lift.embed(x)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceThreshold {
    pub value: f64,
    /// Some terms can be driven to zero along a recession direction; the
    /// value is then an infimum that is not attained.
    pub recession: bool,
    /// A minimizer of the remaining objective (None when it is empty).
    pub minimizer: Option<Vec<f64>>,
}

/// `inf_x Σ_{α≠index} |c_α| e^{⟨x, α − α(index)⟩}`.
pub fn dominance_threshold(f: &ExpSum, index: usize) -> Result<DominanceThreshold> {
    if index >= f.nterms() {
        return Err(Error::InvalidInput(format!("term {index} out of range")));
    }
    let n = f.nvars();
    let base = &f.exponents()[index];
    let mut deltas: Vec<Vec<f64>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (j, (c, a)) in f.coefficients().iter().zip(f.exponents()).enumerate() {
        if j == index || c.norm() == 0.0 {
            continue;
        }
        deltas.push(a.iter().zip(base).map(|(x, y)| x - y).collect());
        weights.push(c.norm().ln());
    }
    if deltas.is_empty() {
        return Ok(DominanceThreshold {
            value: 0.0,
            recession: true,
            minimizer: None,
        });
    }
    let kept = non_recessive_terms(&deltas, n)?;
    let recession = kept.len() < deltas.len();
    if kept.is_empty() {
        return Ok(DominanceThreshold {
            value: 0.0,
            recession,
            minimizer: None,
        });
    }
    let d: Vec<&Vec<f64>> = kept.iter().map(|&i| &deltas[i]).collect();
    let w: Vec<f64> = kept.iter().map(|&i| weights[i]).collect();
    let (log_value, x) = minimize_log_sum_exp(&d, &w, n)?;
    Ok(DominanceThreshold {
        value: log_value.exp(),
        recession,
        minimizer: Some(x),
    })
}

/// Terms that stay bounded below along every direction: `α` is kept iff
/// some `λ ≥ 0` with `λ_α > 0` has `Σ λ_β δ_β = 0`.
fn non_recessive_terms(deltas: &[Vec<f64>], n: usize) -> Result<Vec<usize>> {
    let m = deltas.len();
    let solve = |objective: &dyn Fn(usize) -> f64| -> Result<Vec<f64>> {
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = (0..m).map(|i| lp.add_var(objective(i), (0.0, 1.0))).collect();
        for k in 0..n {
            let expr: Vec<_> = vars.iter().zip(deltas).map(|(v, d)| (*v, d[k])).collect();
            lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, 0.0);
        }
        let sol = lp
            .solve()
            .map_err(|e| Error::NoConvergence(format!("recession LP: {e}")))?;
        Ok(vars.iter().map(|v| *sol.var_value(*v)).collect())
    };
    let total = solve(&|_| 1.0)?;
    let mut kept: Vec<bool> = total.iter().map(|&l| l > 1e-9).collect();
    for i in 0..m {
        if !kept[i] {
            let single = solve(&|j| if j == i { 1.0 } else { 0.0 })?;
            if single[i] > 1e-9 {
                for (k, l) in kept.iter_mut().zip(&single) {
                    *k |= *l > 1e-9;
                }
            }
        }
    }
    Ok((0..m).filter(|&i| kept[i]).collect())
}

/// Damped Newton on `log Σ e^{w_i + ⟨δ_i, x⟩}` restricted to `span(δ)`.
fn minimize_log_sum_exp(deltas: &[&Vec<f64>], weights: &[f64], n: usize) -> Result<(f64, Vec<f64>)> {
    let m = deltas.len();
    let dmat = DMatrix::from_fn(m, n, |i, k| deltas[i][k]);
    // orthonormal basis Q of the row space of D
    let svd = dmat.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-12 * smax.max(1.0))
        .count();
    let q = DMatrix::from_fn(n, rank, |k, j| {
        let idx = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > 1e-12 * smax.max(1.0))
            .nth(j)
            .expect("rank counts these");
        vt[(idx, k)]
    });
    let e = &dmat * &q; // m × rank
    let w = DVector::from_column_slice(weights);

    let eval = |y: &DVector<f64>| -> (f64, DVector<f64>, DMatrix<f64>) {
        let s = &e * y + &w;
        let mx = s.max();
        let p = s.map(|v| (v - mx).exp());
        let z = p.sum();
        let p = p / z;
        let val = mx + z.ln();
        let g = e.transpose() * &p;
        let ep = DMatrix::from_fn(m, rank, |i, j| e[(i, j)] * p[i]);
        let h = e.transpose() * ep - &g * g.transpose();
        (val, g, h)
    };

    let mut y = DVector::zeros(rank);
    let (mut val, mut g, mut h) = eval(&y);
    for _ in 0..500 {
        if g.norm() < 1e-10 {
            break;
        }
        let reg = DMatrix::identity(rank, rank) * (1e-14 * (1.0 + h.norm()));
        let step = match (&h + &reg).cholesky() {
            Some(ch) => ch.solve(&(-&g)),
            None => -&g,
        };
        let slope = g.dot(&step);
        let mut t = 1.0;
        loop {
            let cand = &y + &step * t;
            let (cv, cg, ch) = eval(&cand);
            if cv <= val + 1e-4 * t * slope || t < 1e-12 {
                y = cand;
                val = cv;
                g = cg;
                h = ch;
                break;
            }
            t *= 0.5;
        }
    }
    if g.norm() >= 1e-8 {
        return Err(Error::NoConvergence(format!("gradient norm {:e}", g.norm())));
    }
    let x = &q * &y;
    Ok((val, x.iter().copied().collect()))
}
