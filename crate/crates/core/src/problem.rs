//! JSON problem files: a basis, an exponent matrix, coefficients, named lifts
//! and raster defaults.
//!
//! ```json
//! {
//!   "basis": ["pi", {"label": "s", "value": 1.4142135623730951}],
//!   "support": [[1, 1, 1], [0, 1, "pi"]],
//!   "coefficients": [1, {"re": 1, "im": 0}, {"mod": 3.5, "arg_pi": 0.63}],
//!   "lifts": {"B": [[1, 1, 1], [0, 1, 0], [0, 0, 1]]},
//!   "window": [-2, 2, -2, 2],
//!   "resolution": 400,
//!   "seed": 7,
//!   "deformation": [[0], [1], [0]]
//! }
//! ```
//!
//! Matrix entries are integers or strings such as `"3/4"`, `"1/2*pi + 1"` or
//! `"-pi"`. When the support is not pseudo-homogeneous, lifts are read as
//! lifts of the support with a row of ones prepended.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::complex::Complex64;
use num::Zero;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expsum::{homogenize, DeformationFamily, ExpSum};
use crate::raster::Window;
use crate::scalars::{parse_rational, ExtScalar, Rational, RealBasis};
use crate::support_lattice::{is_lift, ExponentMatrix, LiftRelation, SupportMatrix};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BasisEntry {
    Known(String),
    Valued { label: String, value: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Cell {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CoefficientSpec {
    Real(f64),
    Cartesian { re: f64, #[serde(default)] im: f64 },
    Polar {
        #[serde(rename = "mod")]
        modulus: f64,
        arg_pi: f64,
    },
}

impl CoefficientSpec {
    fn value(&self) -> Complex64 {
        match *self {
            Self::Real(x) => Complex64::new(x, 0.0),
            Self::Cartesian { re, im } => Complex64::new(re, im),
            Self::Polar { modulus, arg_pi } => polar_pi(modulus, arg_pi),
        }
    }
}

/// `r·e^{iπa}`, exact on the axes.
pub fn polar_pi(r: f64, arg_pi: f64) -> Complex64 {
    let a = arg_pi.rem_euclid(2.0);
    match a {
        x if x == 0.0 => Complex64::new(r, 0.0),
        x if x == 0.5 => Complex64::new(0.0, r),
        x if x == 1.0 => Complex64::new(-r, 0.0),
        x if x == 1.5 => Complex64::new(0.0, -r),
        _ => Complex64::from_polar(r, arg_pi * std::f64::consts::PI),
    }
}

/// Parses `"mod,arg_pi"`.
pub fn parse_polar(s: &str) -> Result<Complex64> {
    let (m, a) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected \"mod,arg_pi\", got {s:?}")))?;
    let m: f64 = m.trim().parse().map_err(|_| Error::Parse(format!("modulus {m:?}")))?;
    let a: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("argument {a:?}")))?;
    Ok(polar_pi(m, a))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    #[serde(default)]
    basis: Vec<BasisEntry>,
    support: Vec<Vec<Cell>>,
    coefficients: Vec<CoefficientSpec>,
    #[serde(default)]
    lifts: BTreeMap<String, Vec<Vec<Cell>>>,
    window: Option<[f64; 4]>,
    resolution: Option<usize>,
    seed: Option<u64>,
    deformation: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub basis: Arc<RealBasis>,
    pub f: ExpSum,
    pub lifts: BTreeMap<String, LiftRelation>,
    pub window: Option<Window>,
    pub resolution: Option<usize>,
    pub seed: Option<u64>,
    pub deformation: Option<Vec<Vec<f64>>>,
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawProblem = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let entries = raw
            .basis
            .iter()
            .map(|e| match e {
                BasisEntry::Known(l) => RealBasis::well_known(l)
                    .map(|v| (l.clone(), v))
                    .ok_or_else(|| Error::Parse(format!("basis element {l:?} needs a value"))),
                BasisEntry::Valued { label, value } => Ok((label.clone(), *value)),
            })
            .collect::<Result<Vec<_>>>()?;
        let basis = if entries.is_empty() {
            RealBasis::rational()
        } else {
            RealBasis::with_elements(&entries)?
        };
        let support = matrix(&basis, &raw.support)?;
        let coefficients = raw.coefficients.iter().map(CoefficientSpec::value).collect();
        let f = ExpSum::new(support, coefficients)?;
        let window = raw.window.map(|w| Window::new(w[0], w[1], w[2], w[3])).transpose()?;
        let deformation = match raw.deformation {
            Some(k) => {
                DeformationFamily::new(f.clone(), k.clone())?;
                Some(k)
            }
            None => None,
        };
        let mut p = Self {
            basis,
            f,
            lifts: BTreeMap::new(),
            window,
            resolution: raw.resolution,
            seed: raw.seed,
            deformation,
        };
        let base = p.base_support()?;
        for (name, rows) in &raw.lifts {
            let b = matrix(&p.basis, rows)?;
            if !is_lift(&b, base.exponents())? {
                log::debug!("lift {name:?} rejected");
                return Err(Error::NotALift);
            }
            let lift = LiftRelation::new(base.clone(), SupportMatrix::new(b)?)?;
            p.lifts.insert(name.clone(), lift);
        }
        Ok(p)
    }

    /// The support as a pseudo-homogeneous matrix, homogenized if needed.
    pub fn base_support(&self) -> Result<SupportMatrix> {
        match SupportMatrix::new(self.f.support().clone()) {
            Ok(s) => Ok(s),
            Err(Error::NotPseudoHomogeneous) => SupportMatrix::new(self.f.support().with_ones_row()),
            Err(e) => Err(e),
        }
    }

    /// `f` written on [`Self::base_support`].
    pub fn base_sum(&self) -> Result<ExpSum> {
        if self.base_support()?.exponents() == self.f.support() {
            Ok(self.f.clone())
        } else {
            homogenize(&self.f)
        }
    }

    pub fn lift(&self, name: &str) -> Result<&LiftRelation> {
        self.lifts
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("no lift named {name:?}")))
    }

    pub fn family(&self) -> Result<DeformationFamily> {
        let k = self
            .deformation
            .clone()
            .ok_or_else(|| Error::InvalidInput("the problem has no deformation".into()))?;
        DeformationFamily::new(self.f.clone(), k)
    }
}

/// Parses a JSON matrix such as `[[1, 1], [0, "pi"]]` over `basis`.
pub fn parse_matrix_json(basis: &Arc<RealBasis>, text: &str) -> Result<ExponentMatrix> {
    let rows: Vec<Vec<Cell>> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    matrix(basis, &rows)
}

fn matrix(basis: &Arc<RealBasis>, rows: &[Vec<Cell>]) -> Result<ExponentMatrix> {
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|c| cell(basis, c)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let ncols = parsed.first().map_or(0, Vec::len);
    ExponentMatrix::new(basis, parsed, ncols)
}

fn cell(basis: &Arc<RealBasis>, c: &Cell) -> Result<ExtScalar> {
    match c {
        Cell::Int(n) => Ok(ExtScalar::from_integer(basis, *n)),
        Cell::Text(s) => parse_scalar(basis, s),
    }
}

/// Parses sums of terms `q`, `label`, `q*label` with signs, e.g.
/// `"1/2*pi + -1"` or `"3 - pi"`.
pub fn parse_scalar(basis: &Arc<RealBasis>, s: &str) -> Result<ExtScalar> {
    let err = || Error::Parse(format!("scalar {s:?}"));
    let mut coords = vec![Rational::zero(); basis.dim()];
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut negative = false;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '+' | '-' if cur.trim().is_empty() || cur.trim_end().ends_with(['*', '/']) => {
                if cur.trim().is_empty() {
                    if ch == '-' {
                        negative = !negative;
                    }
                } else {
                    cur.push(ch);
                }
            }
            '+' | '-' => {
                terms.push((negative, std::mem::take(&mut cur)));
                negative = ch == '-';
            }
            _ => cur.push(ch),
        }
    }
    terms.push((negative, cur));
    for (neg, term) in terms {
        let term = term.trim();
        if term.is_empty() {
            return Err(err());
        }
        let (q, label) = match term.split_once('*') {
            Some((q, l)) => (parse_rational(q)?, l.trim()),
            None => match parse_rational(term) {
                Ok(q) => (q, "1"),
                Err(_) => (Rational::from_integer(1.into()), term),
            },
        };
        let idx = basis
            .labels()
            .iter()
            .position(|l| l == label || (label == "π" && l == "pi") || (label == "pi" && l == "π"))
            .ok_or_else(err)?;
        coords[idx] += if neg { -q } else { q };
    }
    ExtScalar::new(basis, coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_round_trip_through_display() {
        let basis = RealBasis::with_elements(&[("pi", std::f64::consts::PI)]).unwrap();
        for s in ["0", "3", "-1/2", "pi", "-pi", "1/2*pi + 1", "3 - pi", "2*pi + -7/3", "1.5*pi"] {
            let x = parse_scalar(&basis, s).unwrap();
            assert_eq!(parse_scalar(&basis, &x.to_string()).unwrap(), x, "{s}");
        }
        assert_eq!(parse_scalar(&basis, "3 - pi").unwrap().to_string(), "3 + -1*pi");
        assert!(parse_scalar(&basis, "tau").is_err());
        assert!(parse_scalar(&basis, "1 +").is_err());
    }

    #[test]
    fn example_problem() {
        let p = Problem::from_json(
            r#"{
                "support": [[0, 3, 4, 9]],
                "coefficients": [1, 1, {"mod": 2.5, "arg_pi": 0.8333333333333334}, {"re": 1}],
                "lifts": {"B": [[1, 1, 1, 1], [0, 3, 4, 9], [0, 6, 2, 0]]},
                "window": [-2, 2, -2, 2],
                "seed": 3
            }"#,
        )
        .unwrap();
        assert_eq!(p.f.nterms(), 4);
        assert_eq!(p.base_support().unwrap().nrows(), 2);
        assert_eq!(p.base_sum().unwrap().nvars(), 2);
        assert!(p.lift("B").is_ok());
        assert_eq!(p.seed, Some(3));
    }

    #[test]
    fn irrational_support_and_bad_lift() {
        let p = Problem::from_json(
            r#"{"basis": ["pi"], "support": [[1, 1, 1], [0, 1, "pi"]], "coefficients": [1, 1, 1]}"#,
        )
        .unwrap();
        assert_eq!(p.basis.dim(), 2);
        let e = Problem::from_json(
            r#"{"support": [[1, 1, 1], [0, 1, 2]], "coefficients": [1, 1, 1], "lifts": {"X": [[1, 1, 1], [0, 2, 1]]}}"#,
        )
        .unwrap_err();
        assert!(matches!(e, Error::NotALift));
        assert!(Problem::from_json(r#"{"support": [[0, 1]], "coefficients": [1]}"#).is_err());
        assert!(Problem::from_json(r#"{"support": [[0, 1]], "coefficients": [1, 1], "extra": 1}"#).is_err());
    }

    #[test]
    fn polar_on_axes_is_exact() {
        assert_eq!(polar_pi(2.0, 1.0), Complex64::new(-2.0, 0.0));
        assert_eq!(parse_polar("3, 0.5").unwrap(), Complex64::new(0.0, 3.0));
        assert!(parse_polar("3").is_err());
    }
}
