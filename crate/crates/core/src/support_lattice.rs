//! Supports as matrices, the lift order `⟦B⟧ ⊑ ⟦A⟧ ⇔ Row(A) ⊆ Row(B)`, ranks,
//! lattice operations and minimal rational lifts.

use std::collections::HashMap;
use std::ops::Deref;
use std::sync::Arc;

use num::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, QMatrix};
use crate::scalars::{ExtScalar, Rational, RealBasis};

/// A `(rows × N)` matrix of exponents over a declared basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentMatrix {
    basis: Arc<RealBasis>,
    rows: Vec<Vec<ExtScalar>>,
    ncols: usize,
}

impl ExponentMatrix {
    /// Builds a matrix; an empty `rows` list describes `ncols` zero-dimensional columns.
    pub fn new(basis: &Arc<RealBasis>, rows: Vec<Vec<ExtScalar>>, ncols: usize) -> Result<Self> {
        if ncols == 0 {
            return Err(Error::InvalidInput("a support needs at least one column".into()));
        }
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::ShapeMismatch(format!(
                    "row of length {} in a matrix with {ncols} columns",
                    row.len()
                )));
            }
            if let Some(x) = row.iter().find(|x| x.basis().as_ref() != basis.as_ref()) {
                return Err(Error::BasisMismatch(format!("entry {x} uses another basis")));
            }
        }
        Ok(Self {
            basis: Arc::clone(basis),
            rows,
            ncols,
        })
    }

    /// Errors with the first pair of coinciding columns.
    pub fn check_distinct_columns(&self) -> Result<()> {
        let mut seen: HashMap<Vec<ExtScalar>, usize> = HashMap::new();
        for j in 0..self.ncols {
            if let Some(&i) = seen.get(&self.column(j)) {
                return Err(Error::DuplicateColumn(i, j));
            }
            seen.insert(self.column(j), j);
        }
        Ok(())
    }

    pub fn from_rows(basis: &Arc<RealBasis>, rows: Vec<Vec<ExtScalar>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        Self::new(basis, rows, ncols)
    }

    pub fn from_rationals(rows: &QMatrix) -> Result<Self> {
        let basis = RealBasis::rational();
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|q| ExtScalar::from_rational(&basis, q.clone())).collect())
            .collect();
        Self::from_rows(&basis, rows)
    }

    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let q: QMatrix = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect();
        Self::from_rationals(&q)
    }

    pub fn basis(&self) -> &Arc<RealBasis> {
        &self.basis
    }

    pub fn rows(&self) -> &[Vec<ExtScalar>] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn entry(&self, i: usize, j: usize) -> &ExtScalar {
        &self.rows[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<ExtScalar> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn is_rational(&self) -> bool {
        self.rows.iter().flatten().all(ExtScalar::is_rational)
    }

    pub fn rational_rows(&self) -> Option<QMatrix> {
        self.is_rational().then(|| linalg::slice(&self.rows, 0))
    }

    /// Columns as integer vectors, when every entry is an integer.
    pub fn integer_columns(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.ncols)
            .map(|j| {
                self.rows
                    .iter()
                    .map(|r| {
                        r[j].as_rational()
                            .filter(|q| q.is_integer())
                            .and_then(|q| q.to_integer().to_i64())
                    })
                    .collect::<Option<Vec<i64>>>()
            })
            .collect()
    }

    pub fn approx_columns(&self) -> Vec<Vec<f64>> {
        (0..self.ncols)
            .map(|j| self.rows.iter().map(|r| r[j].approximate()).collect())
            .collect()
    }

    pub fn top_row_is_ones(&self) -> bool {
        self.rows.first().is_some_and(|r| r.iter().all(ExtScalar::is_one))
    }

    /// Prepends the all-ones row (homogenization of a dehomogenized support).
    pub fn with_ones_row(&self) -> Self {
        let mut rows = vec![vec![ExtScalar::from_integer(&self.basis, 1); self.ncols]];
        rows.extend(self.rows.iter().cloned());
        Self {
            basis: Arc::clone(&self.basis),
            rows,
            ncols: self.ncols,
        }
    }

    /// Every column translated by `v`.
    pub fn translated(&self, v: &[ExtScalar]) -> Result<Self> {
        if v.len() != self.nrows() {
            return Err(Error::ShapeMismatch("translation vector length".into()));
        }
        let rows = self
            .rows
            .iter()
            .zip(v)
            .map(|(row, vi)| row.iter().map(|x| x.add(vi)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(&self.basis, rows, self.ncols)
    }
}

/// A pseudo-homogeneous support: the all-ones vector lies in the row span.
///
/// Lattice operations may return class representatives whose columns repeat
/// (the top class is spanned by 𝟏 alone); only [`SupportMatrix::new`] insists
/// on distinct columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportMatrix(ExponentMatrix);

impl SupportMatrix {
    pub fn new(m: ExponentMatrix) -> Result<Self> {
        m.check_distinct_columns()?;
        Self::class(m)
    }

    /// A representative of a class in the lattice; columns may coincide.
    pub fn class(m: ExponentMatrix) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::NotPseudoHomogeneous);
        }
        let ones = vec![ExtScalar::from_integer(m.basis(), 1); m.ncols()];
        let mut stacked = m.rows().to_vec();
        let r = linalg::generic_rank(&stacked);
        stacked.push(ones);
        if linalg::generic_rank(&stacked) != r {
            return Err(Error::NotPseudoHomogeneous);
        }
        Ok(Self(m))
    }

    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(ExponentMatrix::from_integers(rows)?)
    }

    pub fn from_rationals(rows: &QMatrix) -> Result<Self> {
        Self::new(ExponentMatrix::from_rationals(rows)?)
    }

    /// The `N × N` identity, a lift of every support with `N` columns.
    pub fn identity(n: usize, basis: &Arc<RealBasis>) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| ExtScalar::from_integer(basis, i64::from(i == j)))
                    .collect()
            })
            .collect();
        Self(ExponentMatrix::new(basis, rows, n).expect("identity columns are distinct"))
    }

    pub fn exponents(&self) -> &ExponentMatrix {
        &self.0
    }

    pub fn into_exponents(self) -> ExponentMatrix {
        self.0
    }
}

impl Deref for SupportMatrix {
    type Target = ExponentMatrix;

    fn deref(&self) -> &ExponentMatrix {
        &self.0
    }
}

/// A factorization `A = T·B` of a base support through a lift.
#[derive(Clone, Debug)]
pub struct LiftRelation {
    base: SupportMatrix,
    lift: SupportMatrix,
    factor: Vec<Vec<ExtScalar>>,
}

impl LiftRelation {
    /// Computes the factor with [`factorize`].
    pub fn new(base: SupportMatrix, lift: SupportMatrix) -> Result<Self> {
        let factor = factorize(&base, &lift)?;
        Ok(Self { base, lift, factor })
    }

    /// Accepts an explicit factor after checking `A = T·B` exactly.
    pub fn from_parts(base: SupportMatrix, lift: SupportMatrix, factor: Vec<Vec<ExtScalar>>) -> Result<Self> {
        if !linalg::product_equals(&factor, lift.rows(), base.rows()) {
            return Err(Error::InvalidInput("A = T·B does not hold".into()));
        }
        Ok(Self { base, lift, factor })
    }

    /// The trivial factorization `A = I·A`.
    pub fn trivial(base: SupportMatrix) -> Self {
        let n = base.nrows();
        let basis = Arc::clone(base.basis());
        let factor = (0..n)
            .map(|i| (0..n).map(|j| ExtScalar::from_integer(&basis, i64::from(i == j))).collect())
            .collect();
        Self {
            lift: base.clone(),
            base,
            factor,
        }
    }

    pub fn base(&self) -> &SupportMatrix {
        &self.base
    }

    pub fn lift(&self) -> &SupportMatrix {
        &self.lift
    }

    pub fn factor(&self) -> &[Vec<ExtScalar>] {
        &self.factor
    }

    pub fn factor_approx(&self) -> Vec<Vec<f64>> {
        self.factor
            .iter()
            .map(|r| r.iter().map(ExtScalar::approximate).collect())
            .collect()
    }

    /// The embedding `ι(x) = x·T` in floating point.
    pub fn embed(&self, x: &[f64]) -> Vec<f64> {
        let t = self.factor_approx();
        let m = self.lift.nrows();
        (0..m)
            .map(|j| x.iter().zip(&t).map(|(xi, row)| xi * row[j]).sum())
            .collect()
    }
}

fn check_same_shape(a: &ExponentMatrix, b: &ExponentMatrix) -> Result<()> {
    if a.ncols() != b.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{} columns vs {} columns",
            a.ncols(),
            b.ncols()
        )));
    }
    if a.basis() != b.basis() {
        return Err(Error::BasisMismatch(format!(
            "{:?} vs {:?}",
            a.basis().labels(),
            b.basis().labels()
        )));
    }
    Ok(())
}

/// A linear form `ξ` with `ξ·A = 𝟏`, the basic solution of the exact system.
pub fn pseudo_homogeneity_form(a: &ExponentMatrix) -> Result<Vec<ExtScalar>> {
    let ones = vec![ExtScalar::from_integer(a.basis(), 1); a.ncols()];
    if let Some(xi) = linalg::solve_left_ext(a.basis(), a.rows(), a.ncols(), &ones) {
        return Ok(xi);
    }
    let mut stacked = a.rows().to_vec();
    let r = linalg::generic_rank(&stacked);
    stacked.push(ones);
    if linalg::generic_rank(&stacked) == r {
        Err(Error::NotRepresentable("ξ has entries outside the span of the basis".into()))
    } else {
        Err(Error::NotPseudoHomogeneous)
    }
}

/// `r(A)`, the rank of the matrix.
pub fn rank_r(a: &ExponentMatrix) -> usize {
    linalg::generic_rank(a.rows())
}

/// `r̂(A) = N − r(A)`.
pub fn rhat(a: &ExponentMatrix) -> usize {
    a.ncols() - rank_r(a)
}

/// Columns flattened to rational vectors of length `rows · dim(basis)`.
pub fn flattened_columns(a: &ExponentMatrix) -> QMatrix {
    (0..a.ncols())
        .map(|j| {
            a.rows()
                .iter()
                .flat_map(|row| row[j].coords().iter().cloned())
                .collect()
        })
        .collect()
}

/// `ρ(A)`, the rank of the group ℤ[A] generated by the columns.
pub fn rank_rho(a: &ExponentMatrix) -> usize {
    linalg::rank(&flattened_columns(a))
}

/// `Row(A) = Row(B)`.
pub fn row_space_equal(a: &ExponentMatrix, b: &ExponentMatrix) -> Result<bool> {
    check_same_shape(a, b)?;
    let ra = rank_r(a);
    if ra != rank_r(b) {
        return Ok(false);
    }
    let mut stacked = a.rows().to_vec();
    stacked.extend(b.rows().iter().cloned());
    Ok(linalg::generic_rank(&stacked) == ra)
}

/// `⟦B⟧ ⊑ ⟦A⟧`, i.e. `Row(A) ⊆ Row(B)`.
pub fn is_lift(b: &ExponentMatrix, a: &ExponentMatrix) -> Result<bool> {
    check_same_shape(a, b)?;
    let rb = rank_r(b);
    let mut stacked = b.rows().to_vec();
    stacked.extend(a.rows().iter().cloned());
    Ok(linalg::generic_rank(&stacked) == rb)
}

/// RREF of a rational row space: the canonical class representative.
pub fn canonical_row_space(a: &ExponentMatrix) -> Option<QMatrix> {
    a.rational_rows().map(|rows| linalg::row_space_basis(&rows))
}

/// An exact factor `T` with `A = T·B`.
pub fn factorize(a: &ExponentMatrix, b: &ExponentMatrix) -> Result<Vec<Vec<ExtScalar>>> {
    check_same_shape(a, b)?;
    let mut t = Vec::with_capacity(a.nrows());
    for row in a.rows() {
        match linalg::solve_left_ext(b.basis(), b.rows(), b.ncols(), row) {
            Some(x) => t.push(x),
            None => {
                return Err(if is_lift(b, a)? {
                    Error::NotRepresentable("the factor T has entries outside the span of the basis".into())
                } else {
                    Error::NotALift
                })
            }
        }
    }
    Ok(t)
}

fn rows_to_ext(basis: &Arc<RealBasis>, rows: &QMatrix) -> Vec<Vec<ExtScalar>> {
    rows.iter()
        .map(|r| r.iter().map(|q| ExtScalar::from_rational(basis, q.clone())).collect())
        .collect()
}

/// The unique minimal rational lift: the ℚ-span of all rational slices of
/// the rows of `A`, in RREF, with its factor.
pub fn minimal_rational_lift(a: &SupportMatrix) -> LiftRelation {
    let dim = a.basis().dim();
    let slices: QMatrix = a
        .rows()
        .iter()
        .flat_map(|row| (0..dim).map(move |l| row.iter().map(|x| x.coords()[l].clone()).collect::<Vec<_>>()))
        .collect();
    let b_rows = linalg::row_space_basis(&slices);
    let basis = a.basis();
    let lift_exps = ExponentMatrix::new(basis, rows_to_ext(basis, &b_rows), a.ncols())
        .expect("columns of a lift of A are distinct");
    let lift = SupportMatrix::new(lift_exps).expect("Row(B) contains Row(A) and hence 1");
    let factor = factorize(a, &lift).expect("every slice lies in the span of the lift");
    LiftRelation {
        base: a.clone(),
        lift,
        factor,
    }
}

/// `(meet, join)`: the meet has row space `Row(B₁) + Row(B₂)`, the join
/// `Row(B₁) ∩ Row(B₂)`.
pub fn lattice_meet_join(b1: &SupportMatrix, b2: &SupportMatrix) -> Result<(SupportMatrix, SupportMatrix)> {
    check_same_shape(b1, b2)?;
    let basis = b1.basis();
    let n = b1.ncols();

    let meet_rows: Vec<Vec<ExtScalar>> = match (b1.rational_rows(), b2.rational_rows()) {
        (Some(r1), Some(r2)) => {
            let mut all = r1;
            all.extend(r2);
            rows_to_ext(basis, &linalg::row_space_basis(&all))
        }
        _ => {
            let mut kept: Vec<Vec<ExtScalar>> = Vec::new();
            for row in b1.rows().iter().chain(b2.rows()) {
                kept.push(row.clone());
                if linalg::generic_rank(&kept) < kept.len() {
                    kept.pop();
                }
            }
            kept
        }
    };
    let meet = SupportMatrix::class(ExponentMatrix::new(basis, meet_rows, n)?)?;

    let (Some(r1), Some(r2)) = (b1.rational_rows(), b2.rational_rows()) else {
        return Err(Error::NotRepresentable(
            "the intersection of irrational row spaces is not spanned by rows over the basis".into(),
        ));
    };
    let mut complements = linalg::nullspace(&r1, n);
    complements.extend(linalg::nullspace(&r2, n));
    let join_rows = if complements.is_empty() {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect()
    } else {
        linalg::row_space_basis(&linalg::nullspace(&complements, n))
    };
    let join = SupportMatrix::class(ExponentMatrix::new(basis, rows_to_ext(basis, &join_rows), n)?)?;
    Ok((meet, join))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::parse_rational;

    pub(crate) fn pi_support() -> SupportMatrix {
        let basis = RealBasis::with_elements(&[("pi", std::f64::consts::PI)]).unwrap();
        let s = |a: &str, b: &str| ExtScalar::from_strings(&basis, &[a, b]).unwrap();
        let rows = vec![
            vec![s("1", "0"), s("1", "0"), s("1", "0")],
            vec![s("0", "0"), s("1", "0"), s("0", "1")],
        ];
        SupportMatrix::new(ExponentMatrix::from_rows(&basis, rows).unwrap()).unwrap()
    }

    fn paper_lift(basis: &Arc<RealBasis>) -> SupportMatrix {
        let q = |x: i64| ExtScalar::from_integer(basis, x);
        let rows = vec![
            vec![q(1), q(1), q(1)],
            vec![q(0), q(1), q(0)],
            vec![q(0), q(0), q(1)],
        ];
        SupportMatrix::new(ExponentMatrix::from_rows(basis, rows).unwrap()).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            SupportMatrix::from_integers(&[[0, 1, 2]]),
            Err(Error::NotPseudoHomogeneous)
        ));
        assert!(matches!(
            SupportMatrix::from_integers(&[[1, 1, 1], [0, 1, 0]]),
            Err(Error::DuplicateColumn(0, 2))
        ));
        assert!(SupportMatrix::class(ExponentMatrix::from_integers(&[[1, 1, 1]]).unwrap()).is_ok());
        assert!(SupportMatrix::from_integers(&[[2, 2], [0, 1]]).is_ok());
    }

    #[test]
    fn pseudo_homogeneity_examples() {
        let xi = pseudo_homogeneity_form(&pi_support()).unwrap();
        let s: Vec<Vec<String>> = xi.iter().map(ExtScalar::to_strings).collect();
        assert_eq!(s, vec![vec!["1", "0"], vec!["0", "0"]]);

        let a = SupportMatrix::from_integers(&[[1, 1], [0, 1]]).unwrap();
        let xi = pseudo_homogeneity_form(&a).unwrap();
        assert!(xi[0].is_one() && xi[1].is_zero());

        let a = SupportMatrix::from_integers(&[[2, 2], [0, 1]]).unwrap();
        let xi = pseudo_homogeneity_form(&a).unwrap();
        assert_eq!(xi[0].as_rational().unwrap(), &parse_rational("1/2").unwrap());
        assert!(xi[1].is_zero());

        let not = ExponentMatrix::from_integers(&[[0, 1, 2]]).unwrap();
        assert_eq!(pseudo_homogeneity_form(&not), Err(Error::NotPseudoHomogeneous));
    }

    #[test]
    fn ranks_of_the_pi_example() {
        let a = pi_support();
        assert_eq!(rank_r(&a), 2);
        assert_eq!(rhat(&a), 1);
        assert_eq!(rank_rho(&a), 3);
        let b = paper_lift(a.basis());
        assert_eq!(rank_r(&b), 3);
        assert_eq!(rhat(&b), 0);
        let ones = SupportMatrix::class(ExponentMatrix::from_integers(&[[1, 1, 1, 1]]).unwrap()).unwrap();
        assert_eq!((rank_r(&ones), rhat(&ones)), (1, 3));
    }

    #[test]
    fn rho_of_small_irrational_support() {
        let basis = RealBasis::with_elements(&[("pi", std::f64::consts::PI)]).unwrap();
        let s = |a: &str, b: &str| ExtScalar::from_strings(&basis, &[a, b]).unwrap();
        let a = ExponentMatrix::from_rows(&basis, vec![vec![s("1", "0"), s("1", "0")], vec![s("0", "0"), s("0", "1")]])
            .unwrap();
        assert_eq!(rank_rho(&a), 2);
        assert_eq!(rank_r(&a), 2);
    }

    #[test]
    fn rational_supports_have_rho_equal_r() {
        let a = SupportMatrix::from_integers(&[[1, 1, 1, 1], [0, 3, 4, 9]]).unwrap();
        assert_eq!(rank_rho(&a), rank_r(&a));
    }

    #[test]
    fn row_space_comparisons() {
        let a = pi_support();
        let mut dup = a.rows().to_vec();
        dup.push(a.rows()[1].clone());
        let dup = ExponentMatrix::new(a.basis(), dup, 3).unwrap();
        assert!(row_space_equal(&a, &dup).unwrap());
        let doubled: Vec<Vec<ExtScalar>> = a
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| x.scale(&Rational::from_integer(2.into()))).collect())
            .collect();
        let doubled = ExponentMatrix::new(a.basis(), doubled, 3).unwrap();
        assert!(row_space_equal(&a, &doubled).unwrap());
        assert!(!row_space_equal(&a, &paper_lift(a.basis())).unwrap());
        let other = SupportMatrix::from_integers(&[[1, 1], [0, 1]]).unwrap();
        assert!(matches!(row_space_equal(&a, &other), Err(Error::BasisMismatch(_)) | Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn lift_relation_examples() {
        let a = pi_support();
        let b = paper_lift(a.basis());
        assert!(is_lift(&SupportMatrix::identity(3, a.basis()), &a).unwrap());
        assert!(is_lift(&b, &a).unwrap());
        assert!(!is_lift(&a, &b).unwrap());

        let t = factorize(&a, &b).unwrap();
        let s: Vec<Vec<Vec<String>>> = t.iter().map(|r| r.iter().map(ExtScalar::to_strings).collect()).collect();
        assert_eq!(
            s,
            vec![
                vec![vec!["1", "0"], vec!["0", "0"], vec!["0", "0"]],
                vec![vec!["0", "0"], vec!["1", "0"], vec!["0", "1"]],
            ]
        );
        let t_self = factorize(&a, &a).unwrap();
        assert!(t_self[0][0].is_one() && t_self[0][1].is_zero() && t_self[1][1].is_one() && t_self[1][0].is_zero());
        let t_id = factorize(&a, &SupportMatrix::identity(3, a.basis())).unwrap();
        assert_eq!(t_id, a.rows().to_vec());
        assert_eq!(factorize(&b, &a), Err(Error::NotALift));
    }

    #[test]
    fn minimal_lift_of_pi_example() {
        let a = pi_support();
        let lift = minimal_rational_lift(&a);
        assert!(lift.lift().is_rational());
        assert!(row_space_equal(lift.lift(), &paper_lift(a.basis())).unwrap());
        assert_eq!(rank_r(lift.lift()), rank_rho(&a));
        assert!(linalg::product_equals(lift.factor(), lift.lift().rows(), a.rows()));
        // idempotent
        let again = minimal_rational_lift(lift.lift());
        assert!(row_space_equal(again.lift(), lift.lift()).unwrap());
    }

    #[test]
    fn minimal_lift_of_rational_support_is_itself() {
        let a = SupportMatrix::from_integers(&[[1, 1, 1, 1], [0, 3, 4, 9]]).unwrap();
        let lift = minimal_rational_lift(&a);
        assert!(row_space_equal(lift.lift(), &a).unwrap());
        let t: QMatrix = linalg::slice(lift.factor(), 0);
        assert_eq!(linalg::rank(&t), 2);
    }

    #[test]
    fn meet_join_examples() {
        let b1 = SupportMatrix::from_integers(&[[1, 1, 1], [1, -1, 0]]).unwrap();
        let b2 = SupportMatrix::from_integers(&[[1, 1, 1], [1, 0, -1]]).unwrap();
        let (meet, join) = lattice_meet_join(&b1, &b2).unwrap();
        assert_eq!(rank_r(&join), 1);
        assert!(row_space_equal(&join, &ExponentMatrix::from_integers(&[[1, 1, 1]]).unwrap()).unwrap());
        assert_eq!(rank_r(&meet), 3);
        let (m, j) = lattice_meet_join(&b1, &b1).unwrap();
        assert!(row_space_equal(&m, &b1).unwrap());
        assert!(row_space_equal(&j, &b1).unwrap());
    }

    #[test]
    fn irrational_join_is_rejected_but_meet_works() {
        let a = pi_support();
        let b = paper_lift(a.basis());
        assert!(matches!(lattice_meet_join(&a, &b), Err(Error::NotRepresentable(_))));
    }

    #[test]
    fn embed_is_x_times_t() {
        let a = pi_support();
        let rel = LiftRelation::new(a.clone(), paper_lift(a.basis())).unwrap();
        let y = rel.embed(&[0.5, 2.0]);
        assert!((y[0] - 0.5).abs() < 1e-15);
        assert!((y[1] - 2.0).abs() < 1e-15);
        assert!((y[2] - 2.0 * std::f64::consts::PI).abs() < 1e-14);
    }
}
