//! Points of the group ℤ[B] inside the Newton polytope Conv(B).

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, QMatrix};
use crate::scalars::Rational;
use crate::support_lattice::ExponentMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonLatticePoints {
    /// Points are `points[i] / scale` in the affine coordinates of `B`.
    pub scale: i64,
    /// Sorted lexicographically; coordinates exclude the homogenizing row.
    pub points: Vec<Vec<i64>>,
}

impl NewtonLatticePoints {
    pub fn contains(&self, p: &[i64]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }
}

/// Enumerates ℤ[B] ∩ Conv(B) for a rational support. A support whose top
/// row is all ones is read as homogeneous; otherwise the ones row is added.
pub fn newton_lattice_points(b: &ExponentMatrix) -> Result<NewtonLatticePoints> {
    let rows = b
        .rational_rows()
        .ok_or_else(|| Error::InvalidInput("a rational support is required".into()))?;
    let n = b.ncols();
    let affine: QMatrix = if b.top_row_is_ones() { rows[1..].to_vec() } else { rows };
    let d = affine.len();
    let scale = affine
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scale_q = Rational::from_integer(scale.clone());
    // homogeneous integer columns (1, s·α)
    let cols: Vec<Vec<Rational>> = (0..n)
        .map(|j| {
            std::iter::once(Rational::one())
                .chain(affine.iter().map(|r| &r[j] * &scale_q))
                .collect()
        })
        .collect();
    let lattice = linalg::lattice_basis(&cols);
    let cone = Cone::new(&cols);

    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for c in &cols {
        for k in 0..d {
            let v = c[k + 1].to_integer().to_i64().ok_or_else(|| Error::InvalidInput("exponent too large".into()))?;
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    let volume: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as f64).product();
    if volume > 5e7 {
        return Err(Error::InvalidInput(format!("bounding box of {volume} points is too large")));
    }

    let mut points = Vec::new();
    let mut p = lo.clone();
    loop {
        let q: Vec<Rational> = std::iter::once(Rational::one())
            .chain(p.iter().map(|&v| Rational::from_integer(v.into())))
            .collect();
        if cone.contains(&q) && lattice.contains(&q) {
            points.push(p.clone());
        }
        let mut k = 0;
        loop {
            if k == d {
                points.sort();
                return Ok(NewtonLatticePoints {
                    scale: scale.to_i64().unwrap_or(i64::MAX),
                    points,
                });
            }
            if p[k] < hi[k] {
                p[k] += 1;
                break;
            }
            p[k] = lo[k];
            k += 1;
        }
    }
}

/// The cone over the columns, described by its linear span and, inside
/// the span, by facet inequalities.
struct Cone {
    span: QMatrix,
    // coordinates used after projecting onto the span
    pivots: Vec<usize>,
    normals: Vec<Vec<Rational>>,
}

impl Cone {
    fn new(cols: &[Vec<Rational>]) -> Self {
        let mut span = cols.to_vec();
        let pivots = linalg::rref(&mut span);
        span.truncate(pivots.len());
        let r = pivots.len();
        let proj: Vec<Vec<Rational>> = cols.iter().map(|c| pivots.iter().map(|&i| c[i].clone()).collect()).collect();
        let mut normals: Vec<Vec<Rational>> = Vec::new();
        if r >= 2 {
            for subset in combinations(proj.len(), r - 1) {
                let m: QMatrix = subset.iter().map(|&i| proj[i].clone()).collect();
                let ns = linalg::nullspace(&m, r);
                if ns.len() != 1 {
                    continue;
                }
                let mut nv = ns[0].clone();
                let vals: Vec<Rational> = proj.iter().map(|c| dot(&nv, c)).collect();
                let pos = vals.iter().any(|v| v.is_positive());
                let neg = vals.iter().any(|v| v.is_negative());
                if pos && neg {
                    continue;
                }
                if neg {
                    nv.iter_mut().for_each(|x| *x = -x.clone());
                }
                let g = nv
                    .iter()
                    .find(|x| !x.is_zero())
                    .map(|x| x.abs())
                    .unwrap_or_else(Rational::one);
                nv.iter_mut().for_each(|x| *x = &*x / &g);
                if !normals.contains(&nv) {
                    normals.push(nv);
                }
            }
        }
        Self { span, pivots, normals }
    }

    fn contains(&self, q: &[Rational]) -> bool {
        // q must lie in the span: reduce it against the RREF rows
        let mut rest = q.to_vec();
        for (row, &pc) in self.span.iter().zip(&self.pivots) {
            let f = rest[pc].clone();
            if !f.is_zero() {
                for (x, b) in rest.iter_mut().zip(row) {
                    *x -= &f * b;
                }
            }
        }
        if rest.iter().any(|x| !x.is_zero()) {
            return false;
        }
        let pq: Vec<Rational> = self.pivots.iter().map(|&i| q[i].clone()).collect();
        self.normals.iter().all(|nv| !dot(nv, &pq).is_negative())
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
