//! Exact linear algebra over ℚ via fraction-free elimination on integer rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exprcore::Q;

/// Clears denominators and removes the integer content of a rational row.
pub fn integer_row(row: &[Q]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for x in row {
        if !x.is_zero() {
            l = l.lcm(x.denom());
        }
    }
    let mut out: Vec<BigInt> = row.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    normalize(&mut out);
    out
}

/// Divides by the content and makes the leading entry positive.
fn normalize(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in row.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
    }
    if g.is_zero() {
        return;
    }
    let neg = row.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    if neg {
        g = -g;
    }
    if !g.is_one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Row echelon form maintained incrementally with integer rows.
///
/// Each new row is reduced by cross-multiplication against the stored pivots
/// and divided by its content, so no fractions appear.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Adds a row; returns whether it increased the rank.
    pub fn push(&mut self, row: &[Q]) -> bool {
        debug_assert_eq!(row.len(), self.ncols);
        if row.iter().all(|x| x.is_zero()) {
            return false;
        }
        self.push_int(integer_row(row))
    }

    pub fn push_int(&mut self, mut r: Vec<BigInt>) -> bool {
        for (p, prow) in &self.rows {
            if r[*p].is_zero() {
                continue;
            }
            let a = prow[*p].clone();
            let b = r[*p].clone();
            let g = a.gcd(&b);
            let (a, b) = (&a / &g, &b / &g);
            for j in 0..self.ncols {
                if prow[j].is_zero() {
                    if !r[j].is_zero() {
                        r[j] = &r[j] * &a;
                    }
                } else {
                    r[j] = &r[j] * &a - &prow[j] * &b;
                }
            }
            normalize(&mut r);
        }
        match r.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let at = self.rows.partition_point(|(q, _)| *q < p);
                self.rows.insert(at, (p, r));
                true
            }
        }
    }

    /// Reduced row echelon form with unit pivots.
    pub fn rref(&self) -> (Vec<Vec<Q>>, Vec<usize>) {
        let mut rows: Vec<Vec<Q>> = self
            .rows
            .iter()
            .map(|(p, r)| {
                let lead = Q::from_integer(r[*p].clone());
                r.iter().map(|x| Q::from_integer(x.clone()) / &lead).collect()
            })
            .collect();
        let pivots: Vec<usize> = self.rows.iter().map(|(p, _)| *p).collect();
        for i in (0..rows.len()).rev() {
            let p = pivots[i];
            for k in 0..i {
                let f = rows[k][p].clone();
                if f.is_zero() {
                    continue;
                }
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in head[k].iter_mut().zip(&tail[0]) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        (rows, pivots)
    }

    /// Canonical kernel basis: one vector per free column `f`, with a 1 in
    /// position `f` and zeros in the other free positions.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let (rows, pivots) = self.rref();
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if pivots.contains(&f) {
                continue;
            }
            let mut v = vec![Q::zero(); self.ncols];
            v[f] = Q::one();
            for (r, &p) in rows.iter().zip(&pivots) {
                v[p] = -r[f].clone();
            }
            out.push(v);
        }
        out
    }
}

/// Rank by classical Bareiss elimination on the integer-scaled matrix.
pub fn bareiss_rank(m: &[Vec<Q>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let ncols = m[0].len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| integer_row(r)).collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for i in rank + 1..a.len() {
            for j in col + 1..ncols {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

/// Kernel of a rational matrix given by rows.
pub fn kernel(m: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut e = Echelon::new(ncols);
    for r in m {
        e.push(r);
    }
    e.kernel()
}

/// Canonical basis of the span of the given vectors (RREF rows).
pub fn span_basis(vectors: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut e = Echelon::new(ncols);
    for v in vectors {
        e.push(v);
    }
    e.rref().0
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vec<Q>], v: &[Q]) -> bool {
    let mut e = Echelon::new(v.len());
    for b in basis {
        e.push(b);
    }
    !e.push(v)
}

/// Exact inertia `(positive, negative, zero)` of a symmetric rational matrix
/// by symmetric Gaussian elimination.
pub fn inertia(m: &[Vec<Q>]) -> (usize, usize, usize) {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        if let Some(k) = active.iter().position(|&i| !a[i][i].is_zero()) {
            let p = active.remove(k);
            let d = a[p][p].clone();
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for &i in &active {
                let f = &a[i][p] / &d;
                if f.is_zero() {
                    continue;
                }
                for &j in &active {
                    let v = &f * &a[p][j];
                    a[i][j] -= v;
                }
            }
            continue;
        }
        // Zero diagonal: find an off-diagonal pair and rotate it onto the diagonal.
        let pair = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i != j && !a[i][j].is_zero());
        let Some((i, j)) = pair else {
            break;
        };
        // Replace row/column i by row/column i + j; the new diagonal entry is 2 a_ij.
        for k in 0..n {
            let v = a[j][k].clone();
            a[i][k] += v;
        }
        for k in 0..n {
            let v = a[k][j].clone();
            a[k][i] += v;
        }
    }
    (pos, neg, n - pos - neg)
}
