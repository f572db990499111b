//! From solutions `σ` to metrics, and the checks that verify them.

pub mod curvature;
pub mod geodesic;
pub mod reconstruct;

pub use curvature::{constant_curvature_check, constant_curvature_series, riemann_split, CurvatureCheck, RiemannSplit};
pub use geodesic::{geodesic_compare, GeodesicReport};
pub use reconstruct::{is_levi_civita, levi_civita, projective_equivalence, reconstruct_metric, LeviCivitaReport, MetricCandidate};

use crate::exprcore::{Scalar, Q};
use crate::tensorfield::{Down, TensorField, Up};

pub type Matrix<S> = Vec<Vec<S>>;

/// Determinant by cofactor expansion (dimensions here are at most 6).
pub fn det<S: Scalar>(m: &[Vec<S>]) -> S {
    let n = m.len();
    let cols: Vec<usize> = (0..n).collect();
    det_minor(m, 0, &cols)
}

fn det_minor<S: Scalar>(m: &[Vec<S>], row: usize, cols: &[usize]) -> S {
    match cols.len() {
        0 => S::one(),
        1 => m[row][cols[0]].clone(),
        2 => m[row][cols[0]]
            .mul(&m[row + 1][cols[1]])
            .sub(&m[row][cols[1]].mul(&m[row + 1][cols[0]])),
        _ => {
            let mut acc = S::zero();
            for (k, &c) in cols.iter().enumerate() {
                let e = &m[row][c];
                if e.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let t = e.mul(&det_minor(m, row + 1, &rest));
                acc = if k % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

/// Adjugate matrix, so that `m · adj(m) = det(m) I`.
pub fn adjugate<S: Scalar>(m: &[Vec<S>]) -> Matrix<S> {
    let n = m.len();
    if n == 1 {
        return vec![vec![S::one()]];
    }
    let mut out = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Matrix<S> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| m[r][c].clone()).collect())
                .collect();
            let d = det(&minor);
            out[i][j] = if (i + j) % 2 == 0 { d } else { d.neg() };
        }
    }
    out
}

/// Inverse via the adjugate; `None` when the determinant is not invertible.
pub fn inverse<S: Scalar>(m: &[Vec<S>]) -> Option<Matrix<S>> {
    let d = det(m).try_inv()?;
    Some(adjugate(m).into_iter().map(|row| row.into_iter().map(|x| x.mul(&d)).collect()).collect())
}

pub fn to_matrix<S: Scalar>(t: &TensorField<S>) -> Matrix<S> {
    let n = t.dim();
    (0..n).map(|a| (0..n).map(|b| t.get(&[a, b]).clone()).collect()).collect()
}

pub fn lower_field<S: Scalar>(m: &[Vec<S>]) -> TensorField<S> {
    TensorField::from_fn(m.len(), &[Down, Down], |i| m[i[0]][i[1]].clone())
}

pub fn upper_field<S: Scalar>(m: &[Vec<S>]) -> TensorField<S> {
    TensorField::from_fn(m.len(), &[Up, Up], |i| m[i[0]][i[1]].clone())
}

/// Values of a matrix field at a point in the scalar's own coordinates.
pub fn matrix_at<S: Scalar>(m: &[Vec<S>], at: &[Q]) -> Option<Vec<Vec<Q>>> {
    m.iter()
        .map(|row| row.iter().map(|x| x.eval_q(at).ok()).collect::<Option<Vec<_>>>())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprcore::RationalExpr as R;

    #[test]
    fn inverse_of_symbolic_matrix() {
        let m = vec![
            vec![&R::one() + &R::var(0), R::var(1), R::zero()],
            vec![R::var(1), R::int(2), R::ratio(1, 2)],
            vec![R::zero(), R::ratio(1, 2), &R::one() - &R::var(0)],
        ];
        let inv = inverse(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = R::zero();
                for k in 0..3 {
                    acc = &acc + &(&m[i][k] * &inv[k][j]);
                }
                assert_eq!(acc, if i == j { R::one() } else { R::zero() });
            }
        }
    }
}
