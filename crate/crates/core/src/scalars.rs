//! Exact scalars: rationals and ℚ-linear combinations of a declared set of reals.
//!
//! An [`ExtScalar`] is a coordinate vector over a [`RealBasis`] whose first
//! element is the constant 1. The remaining basis elements (for instance π)
//! are a user contract: they must be ℚ-linearly independent, and rank
//! computations further treat them as algebraically independent.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(format!("rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| err())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let frac_num: BigInt = frac.parse().map_err(|_| err())?;
        let denom = num::pow(BigInt::from(10), frac.len());
        let magnitude = Rational::from_integer(int_part.abs()) + Rational::new(frac_num, denom);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let p: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(p))
}

/// Formats as `"p"` for integers and `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Numerator or denominator too large for a direct conversion.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Best rational approximation of `x` with denominator at most `max_denominator`
/// (continued fractions with a final semiconvergent check).
pub fn rationalize(x: f64, max_denominator: u64) -> Rational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let negative = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let max_q = max_denominator.max(1) as u128;
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e30 {
            break;
        }
        let a = a as u128;
        let q2 = q0 + a * q1;
        if q2 > max_q {
            // Largest admissible semiconvergent.
            let k = (max_q - q0) / q1;
            let (ps, qs) = (p0 + k * p1, q0 + k * q1);
            let best = if ((ps as f64 / qs as f64) - x.abs()).abs()
                < ((p1 as f64 / q1 as f64) - x.abs()).abs()
            {
                (ps, qs)
            } else {
                (p1, q1)
            };
            p1 = best.0;
            q1 = best.1;
            break;
        }
        let p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - v.floor();
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if negative {
        -r
    } else {
        r
    }
}

/// The declared reals `1 = b₀, b₁, …, b_k` over which exponents are expressed.
#[derive(Debug, Clone, PartialEq)]
pub struct RealBasis {
    labels: Vec<String>,
    approximations: Vec<f64>,
}

impl RealBasis {
    /// The basis `{1}`: every scalar is rational.
    pub fn rational() -> Arc<Self> {
        Arc::new(Self {
            labels: vec!["1".to_string()],
            approximations: vec![1.0],
        })
    }

    /// Builds `{1} ∪ extra`. Labels must be distinct and different from `"1"`.
    pub fn with_elements<S: AsRef<str>>(extra: &[(S, f64)]) -> Result<Arc<Self>> {
        let mut labels = vec!["1".to_string()];
        let mut approximations = vec![1.0];
        for (label, value) in extra {
            let label = label.as_ref().to_string();
            if labels.contains(&label) {
                return Err(Error::InvalidInput(format!("duplicate basis label {label:?}")));
            }
            if !value.is_finite() {
                return Err(Error::InvalidInput(format!("basis element {label:?} is not finite")));
            }
            labels.push(label);
            approximations.push(*value);
        }
        Ok(Arc::new(Self {
            labels,
            approximations,
        }))
    }

    /// Approximations for labels that can be declared without a value.
    pub fn well_known(label: &str) -> Option<f64> {
        match label {
            "pi" | "π" => Some(std::f64::consts::PI),
            "e" => Some(std::f64::consts::E),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn approximations(&self) -> &[f64] {
        &self.approximations
    }
}

fn same_basis(a: &Arc<RealBasis>, b: &Arc<RealBasis>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Exact element `Σ coords[i]·basis[i]`.
#[derive(Clone)]
pub struct ExtScalar {
    basis: Arc<RealBasis>,
    coords: Vec<Rational>,
}

impl ExtScalar {
    pub fn new(basis: &Arc<RealBasis>, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != basis.dim() {
            return Err(Error::BasisMismatch(format!(
                "{} coordinates for a basis of dimension {}",
                coords.len(),
                basis.dim()
            )));
        }
        Ok(Self {
            basis: Arc::clone(basis),
            coords,
        })
    }

    pub fn zero(basis: &Arc<RealBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            coords: vec![Rational::zero(); basis.dim()],
        }
    }

    pub fn from_rational(basis: &Arc<RealBasis>, q: Rational) -> Self {
        let mut s = Self::zero(basis);
        s.coords[0] = q;
        s
    }

    pub fn from_integer(basis: &Arc<RealBasis>, n: i64) -> Self {
        Self::from_rational(basis, Rational::from_integer(n.into()))
    }

    /// The basis element `b_index` itself.
    pub fn basis_element(basis: &Arc<RealBasis>, index: usize) -> Result<Self> {
        if index >= basis.dim() {
            return Err(Error::BasisMismatch(format!("no basis element {index}")));
        }
        let mut s = Self::zero(basis);
        s.coords[index] = Rational::one();
        Ok(s)
    }

    /// Parses one string per basis element, e.g. `["1/2", "1"]` for `1/2 + π`.
    pub fn from_strings<S: AsRef<str>>(basis: &Arc<RealBasis>, parts: &[S]) -> Result<Self> {
        let coords = parts
            .iter()
            .map(|p| parse_rational(p.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(basis, coords)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(format_rational).collect()
    }

    pub fn basis(&self) -> &Arc<RealBasis> {
        &self.basis
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    fn check_basis(&self, other: &Self) -> Result<()> {
        if same_basis(&self.basis, &other.basis) {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!(
                "{:?} vs {:?}",
                self.basis.labels, other.basis.labels
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            basis: Arc::clone(&self.basis),
            coords,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            basis: Arc::clone(&self.basis),
            coords,
        })
    }

    pub fn negate(&self) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            coords: self.coords.iter().map(|c| c * q).collect(),
        }
    }

    /// Product, defined when at least one factor is rational.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        if other.is_rational() {
            Ok(self.scale(&other.coords[0]))
        } else if self.is_rational() {
            Ok(other.scale(&self.coords[0]))
        } else {
            Err(Error::NotRepresentable(format!(
                "product ({self}) * ({other}) leaves the span of the basis"
            )))
        }
    }

    pub fn approximate(&self) -> f64 {
        self.coords
            .iter()
            .zip(self.basis.approximations())
            .map(|(c, b)| rational_to_f64(c) * b)
            .sum()
    }

    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(Zero::is_zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.is_rational() && self.coords[0].is_one()
    }

    /// The rational value, if the scalar is rational.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then(|| &self.coords[0])
    }
}

impl PartialEq for ExtScalar {
    fn eq(&self, other: &Self) -> bool {
        same_basis(&self.basis, &other.basis) && self.coords == other.coords
    }
}

impl Eq for ExtScalar {}

impl std::hash::Hash for ExtScalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, label) in self.coords.iter().zip(self.basis.labels()) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if label == "1" {
                write!(f, "{}", format_rational(c))?;
            } else {
                write!(f, "{}*{}", format_rational(c), label)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtScalar({self})")
    }
}
