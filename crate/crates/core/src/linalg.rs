//! Exact linear algebra over ℚ, and over matrices of [`ExtScalar`]s.
//!
//! A matrix `M` with ExtScalar entries is read as `M(t) = Σ_l t_l·M_l` with
//! rational slices `M_l` and `t_0 = 1`. Its rank is the rank over the field
//! ℚ(t₁, …, t_k) of rational functions, computed by exact specialization.

use std::sync::Arc;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::scalars::{ExtScalar, Rational, RealBasis};

pub type QMatrix = Vec<Vec<Rational>>;

/// In-place reduced row echelon form. Returns the pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let nrows = m.len();
    if nrows == 0 {
        return Vec::new();
    }
    let ncols = m[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(p) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (x, p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Nonzero rows of the RREF: the canonical basis of the row space.
pub fn row_space_basis(m: &QMatrix) -> QMatrix {
    let mut w = m.clone();
    let r = rref(&mut w).len();
    w.truncate(r);
    w
}

pub fn transpose(m: &QMatrix, ncols: usize) -> QMatrix {
    (0..ncols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Basis (as rows) of `{x : m·x = 0}` for a matrix with `ncols` columns.
pub fn nullspace(m: &QMatrix, ncols: usize) -> QMatrix {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -w[i][f].clone();
            }
            v
        })
        .collect()
}

/// Solves `m·x = b` for a matrix with `ncols` columns; free variables are set to zero.
pub fn solve_right(m: &QMatrix, ncols: usize, b: &[Rational]) -> Option<Vec<Rational>> {
    let mut aug: QMatrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    if m.is_empty() {
        return b.iter().all(Zero::is_zero).then(|| vec![Rational::zero(); ncols]);
    }
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[i][ncols].clone();
    }
    Some(x)
}

/// Solves the row-vector system `x·m = b`.
pub fn solve_left(m: &QMatrix, ncols: usize, b: &[Rational]) -> Option<Vec<Rational>> {
    let mt = transpose(m, ncols);
    solve_right(&mt, m.len(), b)
}

/// Product `a·b` of rational matrices.
pub fn mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let ncols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..ncols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .fold(Rational::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

/// Slice `l` of an ExtScalar matrix: the rational matrix of `t_l` coefficients.
pub fn slice(m: &[Vec<ExtScalar>], l: usize) -> QMatrix {
    m.iter()
        .map(|row| row.iter().map(|x| x.coords()[l].clone()).collect())
        .collect()
}

/// Indices `l ≥ 1` of basis elements with a nonzero coefficient somewhere in `m`.
pub fn used_irrationals(m: &[Vec<ExtScalar>]) -> Vec<usize> {
    let dim = m
        .iter()
        .flat_map(|r| r.first())
        .map(|x| x.basis().dim())
        .next()
        .unwrap_or(1);
    (1..dim)
        .filter(|&l| m.iter().flatten().any(|x| !x.coords()[l].is_zero()))
        .collect()
}

fn specialize(m: &[Vec<ExtScalar>], used: &[usize], point: &[Rational]) -> QMatrix {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    used.iter()
                        .zip(point)
                        .fold(x.coords()[0].clone(), |acc, (&l, t)| acc + &x.coords()[l] * t)
                })
                .collect()
        })
        .collect()
}

/// Rank over ℚ(t) of an ExtScalar matrix.
///
/// Every `s×s` minor is a polynomial of degree at most `s` in each `t_l`, so a
/// nonzero minor cannot vanish on all of `{0, …, d}^k` with `d = min(rows, cols)`.
/// The maximum specialized rank over that grid is therefore exact.
pub fn generic_rank(m: &[Vec<ExtScalar>]) -> usize {
    if m.is_empty() || m[0].is_empty() {
        return 0;
    }
    let used = used_irrationals(m);
    if used.is_empty() {
        return rank(&slice(m, 0));
    }
    let d = m.len().min(m[0].len());
    // A "random-looking" point first; it is almost always generic.
    let probe: Vec<Rational> = used
        .iter()
        .enumerate()
        .map(|(i, _)| Rational::new(BigInt::from(7919 + 104_729 * i as i64), BigInt::from(9973 - 31 * i as i64)))
        .collect();
    let mut best = rank(&specialize(m, &used, &probe));
    if best == d {
        return best;
    }
    let k = used.len();
    let mut idx = vec![0usize; k];
    loop {
        let point: Vec<Rational> = idx.iter().map(|&v| Rational::from_integer(v.into())).collect();
        best = best.max(rank(&specialize(m, &used, &point)));
        if best == d {
            return best;
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] <= d {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Finds `x` with ExtScalar entries solving `x·m = b`, where `m` has `ncols` columns.
///
/// With `x = Σ t_i X_i` and `m = Σ t_j M_j`, the identity `x·m = b` is matched
/// monomial by monomial in `t_i t_j`, which is an exact rational system in the
/// `X_i`. Any solution found satisfies the real identity; free variables are
/// zero, unknowns ordered by basis coordinate then by row.
pub fn solve_left_ext(
    basis: &Arc<RealBasis>,
    m: &[Vec<ExtScalar>],
    ncols: usize,
    b: &[ExtScalar],
) -> Option<Vec<ExtScalar>> {
    let p = m.len();
    let dim = basis.dim();
    let slices: Vec<QMatrix> = (0..dim).map(|l| slice(m, l)).collect();
    let m_used: Vec<usize> = (0..dim)
        .filter(|&l| l == 0 || slices[l].iter().flatten().any(|x| !x.is_zero()))
        .collect();
    let b_used: Vec<usize> = (0..dim)
        .filter(|&l| l == 0 || b.iter().any(|x| !x.coords()[l].is_zero()))
        .collect();
    // A slice X_i with i outside both sets only produces monomials t_i·t_j that
    // nothing else can cancel, so it can be taken to be zero.
    let x_used: Vec<usize> = (0..dim)
        .filter(|&i| m_used.contains(&i) || b_used.contains(&i))
        .collect();
    let n_unknowns = x_used.len() * p;

    let mut monomials: Vec<(usize, usize)> = Vec::new();
    for &i in &x_used {
        for &j in &m_used {
            let key = (i.min(j), i.max(j));
            if !monomials.contains(&key) {
                monomials.push(key);
            }
        }
    }
    let mut eqs: QMatrix = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for &(lo, hi) in &monomials {
        for c in 0..ncols {
            let mut row = vec![Rational::zero(); n_unknowns];
            for (xi, &i) in x_used.iter().enumerate() {
                let j = if i == lo {
                    hi
                } else if i == hi {
                    lo
                } else {
                    continue;
                };
                if !m_used.contains(&j) {
                    continue;
                }
                for r in 0..p {
                    row[xi * p + r] += &slices[j][r][c];
                }
            }
            let target = if lo == 0 {
                b[c].coords()[hi].clone()
            } else {
                Rational::zero()
            };
            eqs.push(row);
            rhs.push(target);
        }
    }
    let sol = solve_right(&eqs, n_unknowns, &rhs)?;
    let x = (0..p)
        .map(|r| {
            let mut coords = vec![Rational::zero(); dim];
            for (xi, &i) in x_used.iter().enumerate() {
                coords[i] = sol[xi * p + r].clone();
            }
            ExtScalar::new(basis, coords).expect("dimension matches basis")
        })
        .collect();
    Some(x)
}

/// Checks `t·b == a` exactly, expanding products monomial by monomial.
pub fn product_equals(t: &[Vec<ExtScalar>], b: &[Vec<ExtScalar>], a: &[Vec<ExtScalar>]) -> bool {
    if t.len() != a.len() || t.iter().any(|row| row.len() != b.len()) {
        return false;
    }
    let ncols = a.first().map_or(0, Vec::len);
    if b.iter().any(|row| row.len() != ncols) {
        return false;
    }
    let Some(dim) = a.first().and_then(|r| r.first()).map(|x| x.basis().dim()) else {
        return true;
    };
    for (trow, arow) in t.iter().zip(a) {
        for c in 0..ncols {
            // Coefficients of t_i·t_j for i ≤ j.
            let mut acc = vec![vec![Rational::zero(); dim]; dim];
            for (tk, brow) in trow.iter().zip(b) {
                let bk = &brow[c];
                for i in 0..dim {
                    if tk.coords()[i].is_zero() {
                        continue;
                    }
                    for j in 0..dim {
                        if bk.coords()[j].is_zero() {
                            continue;
                        }
                        let (lo, hi) = (i.min(j), i.max(j));
                        acc[lo][hi] += &tk.coords()[i] * &bk.coords()[j];
                    }
                }
            }
            for (lo, accrow) in acc.iter().enumerate() {
                for (hi, v) in accrow.iter().enumerate().skip(lo) {
                    let expected = if lo == 0 {
                        arow[c].coords()[hi].clone()
                    } else {
                        Rational::zero()
                    };
                    if *v != expected {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// A ℤ-basis of the lattice generated by rational vectors, with coordinates
/// of every generator in that basis.
#[derive(Debug, Clone)]
pub struct LatticeBasis {
    /// Common denominator: lattice vectors are `basis rows / scale`.
    pub scale: BigInt,
    /// Row echelon ℤ-basis (scaled to integers).
    pub basis: Vec<Vec<BigInt>>,
    /// Integer coordinates of each generator with respect to `basis`.
    pub coords: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Integer coordinates of `v` if it belongs to the lattice.
    pub fn coordinates_of(&self, v: &[Rational]) -> Option<Vec<BigInt>> {
        let scaled: Vec<Rational> = v
            .iter()
            .map(|x| x * Rational::from_integer(self.scale.clone()))
            .collect();
        if scaled.iter().any(|x| !x.is_integer()) {
            return None;
        }
        let mut rest: Vec<BigInt> = scaled.iter().map(|x| x.to_integer()).collect();
        let mut z = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let pc = row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            let (q, r) = rest[pc].div_rem(&row[pc]);
            if !r.is_zero() {
                return None;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= &q * b;
            }
            z.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(z)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates_of(v).is_some()
    }
}

/// Integer row echelon reduction of the generators, tracking `U⁻¹` so that
/// `generators = U⁻¹·H` gives each generator's coordinates.
pub fn lattice_basis(generators: &[Vec<Rational>]) -> LatticeBasis {
    let n = generators.len();
    let dim = generators.first().map_or(0, Vec::len);
    let scale = generators
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut h: Vec<Vec<BigInt>> = generators
        .iter()
        .map(|g| {
            g.iter()
                .map(|x| (x * Rational::from_integer(scale.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut uinv: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let mut row = 0;
    for col in 0..dim {
        if row == n {
            break;
        }
        loop {
            let pick = (row..n)
                .filter(|&r| !h[r][col].is_zero())
                .min_by(|&a, &b| h[a][col].abs().cmp(&h[b][col].abs()));
            let Some(p) = pick else { break };
            if p != row {
                h.swap(p, row);
                for u in uinv.iter_mut() {
                    u.swap(p, row);
                }
            }
            let mut done = true;
            for r in row + 1..n {
                if h[r][col].is_zero() {
                    continue;
                }
                let q = h[r][col].div_floor(&h[row][col]);
                let pivot_row = h[row].clone();
                for (x, pv) in h[r].iter_mut().zip(&pivot_row) {
                    *x -= &q * pv;
                }
                for u in uinv.iter_mut() {
                    let add = &q * &u[r];
                    u[row] += add;
                }
                if !h[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if (row..n).any(|r| !h[r][col].is_zero()) {
            if h[row][col].is_negative() {
                for x in h[row].iter_mut() {
                    *x = -x.clone();
                }
                for u in uinv.iter_mut() {
                    u[row] = -u[row].clone();
                }
            }
            row += 1;
        }
    }
    let rank = row;
    h.truncate(rank);
    let coords = uinv.into_iter().map(|u| u[..rank].to_vec()).collect();
    LatticeBasis {
        scale,
        basis: h,
        coords,
    }
}
