//! Exponential sums `f(z) = Σ c_α e^{⟨z,α⟩}`, coefficient transport along
//! lifts, dehomogenization, characters and the deformation family `f_λ`.

use std::sync::Arc;

use num::complex::Complex64;
use num::ToPrimitive;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalars::{rationalize, ExtScalar, RealBasis};
use crate::support_lattice::{self, ExponentMatrix, LiftRelation};

/// Denominator bound used when `λκ` entries become exact exponents.
pub const DEFORMATION_DENOMINATOR: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct ExpSum {
    support: ExponentMatrix,
    coefficients: Vec<Complex64>,
    // columns of the support in floating point
    exps: Vec<Vec<f64>>,
}

impl ExpSum {
    pub fn new(support: ExponentMatrix, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != support.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for {} support points",
                coefficients.len(),
                support.ncols()
            )));
        }
        if coefficients.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidInput("all coefficients are zero".into()));
        }
        if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("coefficient {c} is not finite")));
        }
        support.check_distinct_columns()?;
        let exps = support.approx_columns();
        Ok(Self {
            support,
            coefficients,
            exps,
        })
    }

    /// Univariate sum `Σ c_k e^{e_k z}` over rational exponents given as integers.
    pub fn univariate(exponents: &[i64], coefficients: Vec<Complex64>) -> Result<Self> {
        Self::new(ExponentMatrix::from_integers(&[exponents])?, coefficients)
    }

    /// Sum over integer exponent columns (each inner vector is one exponent).
    pub fn from_integer_columns(columns: &[Vec<i64>], coefficients: Vec<Complex64>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        let rows: Vec<Vec<i64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        let support = if n == 0 {
            ExponentMatrix::new(&RealBasis::rational(), Vec::new(), columns.len())?
        } else {
            ExponentMatrix::from_integers(&rows)?
        };
        Self::new(support, coefficients)
    }

    pub fn support(&self) -> &ExponentMatrix {
        &self.support
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Number of variables (rows of the support).
    pub fn nvars(&self) -> usize {
        self.support.nrows()
    }

    pub fn nterms(&self) -> usize {
        self.coefficients.len()
    }

    /// Exponent columns in floating point.
    pub fn exponents(&self) -> &[Vec<f64>] {
        &self.exps
    }

    /// Same support, new coefficients.
    pub fn with_coefficients(&self, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != self.nterms() {
            return Err(Error::ShapeMismatch("coefficient count".into()));
        }
        let mut g = Self::new(self.support.clone(), coefficients)?;
        g.exps = self.exps.clone();
        Ok(g)
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.nvars());
        self.coefficients
            .iter()
            .zip(&self.exps)
            .map(|(c, a)| c * a.iter().zip(z).map(|(ai, zi)| zi * ai).sum::<Complex64>().exp())
            .sum()
    }

    /// `log|c_α| + ⟨x, α⟩` for each term; `-∞` for vanishing coefficients.
    pub fn term_log_moduli(&self, x: &[f64]) -> Vec<f64> {
        self.coefficients
            .iter()
            .zip(&self.exps)
            .map(|(c, a)| c.norm().ln() + a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>())
            .collect()
    }

    /// Integer exponent columns when the support is algebraic.
    pub fn integer_exponents(&self) -> Option<Vec<Vec<i64>>> {
        self.support.integer_columns()
    }

    pub fn is_algebraic(&self) -> bool {
        self.integer_exponents().is_some()
    }

    /// For a univariate algebraic sum: `(lowest exponent, dense coefficients)`
    /// of the Laurent polynomial, so that `f = w^lo · Σ_k p_k w^k`.
    pub fn laurent_univariate(&self) -> Result<(i64, Vec<Complex64>)> {
        if self.nvars() != 1 {
            return Err(Error::InvalidInput(format!("expected one variable, found {}", self.nvars())));
        }
        let cols = self.integer_exponents().ok_or(Error::NotAlgebraic)?;
        let lo = cols.iter().map(|c| c[0]).min().expect("nonempty support");
        let hi = cols.iter().map(|c| c[0]).max().expect("nonempty support");
        let mut p = vec![Complex64::new(0.0, 0.0); (hi - lo) as usize + 1];
        for (c, col) in self.coefficients.iter().zip(&cols) {
            p[(col[0] - lo) as usize] += c;
        }
        Ok((lo, p))
    }
}

fn same_support(f: &ExpSum, a: &ExponentMatrix) -> bool {
    f.support() == a
}

/// `Φ(f)`: the same coefficients on the support of the lift.
pub fn phi_transport(f: &ExpSum, lift: &LiftRelation) -> Result<ExpSum> {
    if !same_support(f, lift.base()) {
        return Err(Error::SupportMismatch);
    }
    ExpSum::new(lift.lift().exponents().clone(), f.coefficients().to_vec())
}

/// `z·T` for complex `z`, the argument at which `Φ(f)` reproduces `f(z)`.
pub fn embed_complex(lift: &LiftRelation, z: &[Complex64]) -> Vec<Complex64> {
    let t = lift.factor_approx();
    (0..lift.lift().nrows())
        .map(|j| z.iter().zip(&t).map(|(zi, row)| zi * row[j]).sum())
        .collect()
}

/// Exact change of variables `A' = S·A` making the pseudo-homogeneity form
/// `(1, 0, …, 0)`, followed by removal of the all-ones top row.
///
/// With `z = z'·S` one has `f(z) = e^{z'₀}·g(z'₁, …, z'ₙ)`; when the top row
/// of `A` is already all ones, `S` is the identity.
pub fn dehomogenize(f: &ExpSum) -> Result<ExpSum> {
    let a = f.support();
    if a.top_row_is_ones() {
        let rows = a.rows()[1..].to_vec();
        let support = ExponentMatrix::new(a.basis(), rows, a.ncols())?;
        return ExpSum::new(support, f.coefficients().to_vec());
    }
    let s = dehomogenizing_transform(a)?;
    let mut rows = Vec::with_capacity(a.nrows());
    for srow in &s {
        let mut out = Vec::with_capacity(a.ncols());
        for j in 0..a.ncols() {
            let mut acc = ExtScalar::zero(a.basis());
            for (sk, arow) in srow.iter().zip(a.rows()) {
                acc = acc.add(&sk.mul(&arow[j])?)?;
            }
            out.push(acc);
        }
        rows.push(out);
    }
    debug_assert!(rows[0].iter().all(ExtScalar::is_one));
    rows.remove(0);
    let support = ExponentMatrix::new(a.basis(), rows, a.ncols())?;
    ExpSum::new(support, f.coefficients().to_vec())
}

/// Rows `ξ` and `e_i` for `i ≠ p`, where `p` is the first nonzero entry of `ξ`.
pub fn dehomogenizing_transform(a: &ExponentMatrix) -> Result<Vec<Vec<ExtScalar>>> {
    let xi = support_lattice::pseudo_homogeneity_form(a)?;
    let p = xi.iter().position(|x| !x.is_zero()).ok_or(Error::NotPseudoHomogeneous)?;
    let basis = a.basis();
    let mut s = vec![xi.clone()];
    for i in (0..xi.len()).filter(|&i| i != p) {
        s.push((0..xi.len()).map(|j| ExtScalar::from_integer(basis, i64::from(i == j))).collect());
    }
    Ok(s)
}

/// Prepends the all-ones row: `f(z₀, z) = e^{z₀}·g(z)`.
pub fn homogenize(f: &ExpSum) -> Result<ExpSum> {
    ExpSum::new(f.support().with_ones_row(), f.coefficients().to_vec())
}

/// Coordinates of every column in a fixed ℤ-basis of the group ℤ[A].
/// The number of coordinates is `ρ(A)`.
pub fn character_coordinates(f: &ExpSum) -> Vec<Vec<f64>> {
    let lattice = linalg::lattice_basis(&support_lattice::flattened_columns(f.support()));
    lattice
        .coords
        .iter()
        .map(|c| c.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect()
}

/// Coefficients `c_α·χ(α)` with `χ(α) = exp(i⟨θ, coords(α)⟩)`.
pub fn character_coefficients(f: &ExpSum, coords: &[Vec<f64>], phases: &[f64]) -> Vec<Complex64> {
    f.coefficients()
        .iter()
        .zip(coords)
        .map(|(c, k)| {
            let angle: f64 = k.iter().zip(phases).map(|(a, b)| a * b).sum();
            c * Complex64::from_polar(1.0, angle)
        })
        .collect()
}

/// `f_χ` for the character with phases `θ ∈ ℝ^ρ`.
pub fn perturb_character(f: &ExpSum, phases: &[f64]) -> Result<ExpSum> {
    let coords = character_coordinates(f);
    let rho = coords.first().map_or(0, Vec::len);
    if phases.len() != rho {
        return Err(Error::ShapeMismatch(format!("{} phases for a group of rank {rho}", phases.len())));
    }
    f.with_coefficients(character_coefficients(f, &coords, phases))
}

/// `f_λ(z, t) = Σ c_α e^{⟨α,z⟩ + λ⟨κ_α,t⟩}`.
#[derive(Clone, Debug)]
pub struct DeformationFamily {
    base: ExpSum,
    kappas: Vec<Vec<f64>>,
}

impl DeformationFamily {
    pub fn new(base: ExpSum, kappas: Vec<Vec<f64>>) -> Result<Self> {
        if kappas.len() != base.nterms() {
            return Err(Error::ShapeMismatch(format!("{} κ vectors for {} terms", kappas.len(), base.nterms())));
        }
        let k = kappas.first().map_or(0, Vec::len);
        if kappas.iter().any(|v| v.len() != k) {
            return Err(Error::ShapeMismatch("κ vectors of different lengths".into()));
        }
        if kappas.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("κ entries must be finite".into()));
        }
        Ok(Self { base, kappas })
    }

    pub fn base(&self) -> &ExpSum {
        &self.base
    }

    pub fn kappas(&self) -> &[Vec<f64>] {
        &self.kappas
    }

    /// Number of deformation variables.
    pub fn k(&self) -> usize {
        self.kappas.first().map_or(0, Vec::len)
    }

    /// `f_λ` with support `[α; λκ]`. The exact exponents rationalize `λκ`;
    /// evaluation uses the floating `λκ` directly.
    pub fn deform(&self, lambda: f64) -> Result<ExpSum> {
        let a = self.base.support();
        let basis: Arc<RealBasis> = Arc::clone(a.basis());
        let mut rows = a.rows().to_vec();
        for i in 0..self.k() {
            rows.push(
                self.kappas
                    .iter()
                    .map(|kap| ExtScalar::from_rational(&basis, rationalize(lambda * kap[i], DEFORMATION_DENOMINATOR)))
                    .collect(),
            );
        }
        let support = ExponentMatrix::new(&basis, rows, a.ncols())?;
        let mut g = ExpSum::new(support, self.base.coefficients().to_vec())?;
        for (col, (base_col, kap)) in g.exps.iter_mut().zip(self.base.exps.iter().zip(&self.kappas)) {
            *col = base_col.iter().copied().chain(kap.iter().map(|x| lambda * x)).collect();
        }
        Ok(g)
    }

    /// The auxiliary sum `g(z, t)` with support `[α; κ]`, so `f_λ(z,t) = g(z, λt)`.
    pub fn auxiliary(&self) -> Result<ExpSum> {
        self.deform(1.0)
    }
}
