//! Metric reconstruction from `σ^{bc}` and the Levi-Civita tests.

use num_traits::Zero;

use super::{det, inverse, matrix_at, upper_field, Matrix};
use crate::error::{Error, Result};
use crate::exprcore::{ExprError, RationalExpr, Scalar, Q};
use crate::mobility::linalg::inertia;
use crate::projconn::AffineConnection;
use crate::tensorfield::TensorField;

/// A metric built from a solution `σ^{bc}` on the trace-free representative.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricCandidate<S: Scalar = RationalExpr> {
    pub sigma: Matrix<S>,
    /// `det σ`; the rescaling function is `f = −½ log det σ`.
    pub det_sigma: S,
    /// `Υ_a = ∂_a f = −∂_a det σ / (2 det σ)`.
    pub upsilon: Vec<S>,
    /// `g^{ab} = det(σ) σ^{ab}`.
    pub g_up: Matrix<S>,
    pub g_down: Matrix<S>,
    /// The projective change of the input connection by `Υ`.
    pub connection: AffineConnection<S>,
    /// `(positive, negative)` eigenvalue counts of `g` at the base point.
    pub signature: (usize, usize),
    pub definite: bool,
}

fn at_point<S: Scalar>(x: &S, at: &[Q]) -> Result<Q> {
    x.eval_q(at).map_err(|e| match e {
        ExprError::Pole => Error::PoleAtBasePoint,
        other => Error::Expr(other),
    })
}

/// Builds `g^{ab} = det(σ)σ^{ab}` and the connection changed by `Υ = df`,
/// `f = −½ log det σ`.
///
/// `c` must have vanishing Christoffel trace so that the coordinate volume is
/// parallel; `at` is the base point in the scalar's own coordinates.
pub fn reconstruct_metric<S: Scalar>(sigma: &[Vec<S>], c: &AffineConnection<S>, at: &[Q]) -> Result<MetricCandidate<S>> {
    let n = c.dim();
    if sigma.len() != n || sigma.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("σ must be {n} × {n}")));
    }
    if c.trace().iter().any(|t| !t.is_zero()) {
        return Err(Error::NotSpecial("reconstruction needs the trace-free representative".into()));
    }
    for a in 0..n {
        for b in 0..a {
            if sigma[a][b] != sigma[b][a] {
                return Err(Error::Shape("σ is not symmetric".into()));
            }
        }
    }
    let d = det(sigma);
    if at_point(&d, at)?.is_zero() {
        return Err(Error::DegenerateSigma);
    }
    let d_inv = d.try_inv().ok_or(Error::DegenerateSigma)?;
    let minus_half = Q::new((-1).into(), 2.into());
    let upsilon: Vec<S> = (0..n).map(|a| d.diff(a).mul(&d_inv).scale(&minus_half)).collect();
    let g_up: Matrix<S> = sigma.iter().map(|r| r.iter().map(|x| d.mul(x)).collect()).collect();
    let g_down = inverse(&g_up).ok_or(Error::DegenerateSigma)?;
    let connection = c.projective_change(&upsilon);
    let values = matrix_at(&g_up, at).ok_or(Error::PoleAtBasePoint)?;
    let (pos, neg, zero) = inertia(&values);
    if zero > 0 {
        return Err(Error::DegenerateSigma);
    }
    Ok(MetricCandidate {
        sigma: sigma.to_vec(),
        det_sigma: d,
        upsilon,
        g_up,
        g_down,
        connection,
        signature: (pos, neg),
        definite: neg == 0,
    })
}

/// Exact signature of a symmetric matrix field at a point.
pub fn signature_at<S: Scalar>(g: &[Vec<S>], at: &[Q]) -> Option<(usize, usize, usize)> {
    matrix_at(g, at).map(|m| inertia(&m))
}

/// Christoffel symbols of `g_ab` given also its inverse `g^{ab}`.
pub fn levi_civita_with<S: Scalar>(g_down: &[Vec<S>], g_up: &[Vec<S>]) -> AffineConnection<S> {
    let n = g_down.len();
    let half = Q::new(1.into(), 2.into());
    // First kind: Γ_dab = ½(∂_a g_db + ∂_b g_da − ∂_d g_ab).
    let mut first = vec![S::zero(); n * n * n];
    for dd in 0..n {
        for a in 0..n {
            for b in a..n {
                let v = g_down[dd][b]
                    .diff(a)
                    .add(&g_down[dd][a].diff(b))
                    .sub(&g_down[a][b].diff(dd))
                    .scale(&half);
                first[(dd * n + a) * n + b] = v.clone();
                first[(dd * n + b) * n + a] = v;
            }
        }
    }
    AffineConnection::from_fn(n, |c, a, b| {
        let mut acc = S::zero();
        for dd in 0..n {
            let f = &first[(dd * n + a) * n + b];
            if !f.is_zero() && !g_up[c][dd].is_zero() {
                acc.add_assign_ref(&g_up[c][dd].mul(f));
            }
        }
        acc
    })
}

/// Levi-Civita connection of a rational metric `g_ab`.
pub fn levi_civita(g_down: &[Vec<RationalExpr>]) -> Result<AffineConnection> {
    let g_up = inverse(g_down).ok_or(Error::DegenerateMetric)?;
    Ok(levi_civita_with(g_down, &g_up))
}

/// Residuals of the two Levi-Civita conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviCivitaReport<S: Scalar = RationalExpr> {
    /// Trace-free part of `∇_a g^{bc}`.
    pub trace_free: TensorField<S>,
    /// `∂_a det(g^{..}) + 2τ_a det(g^{..})`, zero iff the metric volume is parallel.
    pub volume: Vec<S>,
    pub holds: bool,
}

/// Whether `c` is the Levi-Civita connection of the metric with inverse
/// `g^{ab}`: `∇_a g^{bc}` is pure trace and the metric volume is parallel.
///
/// Series inputs are compared through total degree `order`.
pub fn is_levi_civita<S: Scalar>(c: &AffineConnection<S>, g_up: &[Vec<S>], order: Option<i32>) -> Result<LeviCivitaReport<S>> {
    let n = c.dim();
    let cut = |x: &S| match order {
        Some(k) => x.truncate(k),
        None => x.clone(),
    };
    let d = det(g_up);
    if d.is_zero() {
        return Err(Error::DegenerateMetric);
    }
    let grad = c.covariant_derivative(&upper_field(g_up));
    let trace_free = grad.trace_free_part()?.map(cut);
    let tau = c.trace();
    let two = Q::from_integer(2.into());
    let volume: Vec<S> = (0..n)
        .map(|a| cut(&d.diff(a).add(&tau[a].mul(&d).scale(&two))))
        .collect();
    let holds = trace_free.is_zero() && volume.iter().all(|v| v.is_zero());
    Ok(LeviCivitaReport {
        trace_free,
        volume,
        holds,
    })
}

/// Recovers `Υ` with `Γ₂ = Γ₁ + δΥ + δΥ`, or names the first component that
/// is not of that form (1-based indices).
pub fn projective_equivalence<S: Scalar>(c1: &AffineConnection<S>, c2: &AffineConnection<S>) -> Result<Vec<S>> {
    let n = c1.dim();
    if c2.dim() != n {
        return Err(Error::Shape(format!("dimensions {} and {} differ", n, c2.dim())));
    }
    let k = Q::new(1.into(), (n as i64 + 1).into());
    let diff = |c: usize, a: usize, b: usize| c2.gamma(c, a, b).sub(c1.gamma(c, a, b));
    let upsilon: Vec<S> = (0..n)
        .map(|a| {
            let mut acc = S::zero();
            for b in 0..n {
                acc.add_assign_ref(&diff(b, a, b));
            }
            acc.scale(&k)
        })
        .collect();
    for c in 0..n {
        for a in 0..n {
            for b in a..n {
                let mut r = diff(c, a, b);
                if a == c {
                    r = r.sub(&upsilon[b]);
                }
                if b == c {
                    r = r.sub(&upsilon[a]);
                }
                if !r.is_zero() {
                    return Err(Error::NotEquivalent(format!("Γ^{}_{{{}{}}}", c + 1, a + 1, b + 1)));
                }
            }
        }
    }
    Ok(upsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprcore::{q, qi, RationalExpr as R};
    use crate::metricize::{lower_field, to_matrix};

    fn x(i: usize) -> R {
        R::var(i)
    }

    fn r2(n: usize) -> R {
        (0..n).fold(R::zero(), |acc, i| &acc + &(&x(i) * &x(i)))
    }

    fn diag(v: Vec<R>) -> Matrix<R> {
        let n = v.len();
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { v[i].clone() } else { R::zero() }).collect())
            .collect()
    }

    fn klein_metric(n: usize) -> Matrix<R> {
        let den = &R::one() - &r2(n);
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut v = &(&x(a) * &x(b)) / &(&den * &den);
                        if a == b {
                            v = &v + &(&R::one() / &den);
                        }
                        v
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn euclidean_metric_has_flat_connection() {
        let g = diag(vec![R::one(); 3]);
        assert!(levi_civita(&g).unwrap().is_flat());
    }

    #[test]
    fn sphere_christoffels_match_closed_form() {
        let n = 2;
        let den = &R::one() + &r2(n);
        let conf = &R::int(4) / &(&den * &den);
        let g = diag(vec![conf; n]);
        let c = levi_civita(&g).unwrap();
        for cc in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut v = R::zero();
                    if a == cc {
                        v = &v + &x(b);
                    }
                    if b == cc {
                        v = &v + &x(a);
                    }
                    if a == b {
                        v = &v - &x(cc);
                    }
                    let expect = &(&v * &R::int(-2)) / &den;
                    assert_eq!(c.gamma(cc, a, b), &expect);
                }
            }
        }
        let g_up = inverse(&g).unwrap();
        assert!(is_levi_civita(&c, &g_up, None).unwrap().holds);
    }

    #[test]
    fn klein_christoffels_are_pure_trace() {
        let g = klein_metric(2);
        let c = levi_civita(&g).unwrap();
        let den = &R::one() - &r2(2);
        let flat: AffineConnection = AffineConnection::flat(2);
        let u = projective_equivalence(&flat, &c).unwrap();
        for a in 0..2 {
            assert_eq!(u[a], &x(a) / &den);
        }
        assert!(is_levi_civita(&c, &inverse(&g).unwrap(), None).unwrap().holds);
        // The flat connection preserves neither the Klein metric nor its volume.
        let r = is_levi_civita(&flat, &inverse(&g).unwrap(), None).unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn projective_equivalence_round_trip_and_rejection() {
        let c = AffineConnection::from_fn(2, |k, a, b| if k == 0 && a == 1 && b == 1 { x(0) } else { R::zero() });
        let u = vec![&x(1) * &x(1), R::ratio(1, 3)];
        let c2 = c.projective_change(&u);
        assert_eq!(projective_equivalence(&c, &c2).unwrap(), u);
        assert_eq!(projective_equivalence(&c, &c).unwrap(), vec![R::zero(), R::zero()]);
        let err = projective_equivalence(&AffineConnection::flat(2), &c).unwrap_err();
        assert_eq!(err, Error::NotEquivalent("Γ^1_{22}".into()));
    }

    #[test]
    fn identity_sigma_gives_euclidean_metric() {
        let flat: AffineConnection = AffineConnection::flat(3);
        let m = reconstruct_metric(&diag(vec![R::one(); 3]), &flat, &[qi(0), qi(0), qi(0)]).unwrap();
        assert_eq!(m.det_sigma, R::one());
        assert_eq!(m.g_up, diag(vec![R::one(); 3]));
        assert!(m.connection.is_flat());
        assert_eq!(m.signature, (3, 0));
    }

    #[test]
    fn constant_sigma_rescales() {
        let flat: AffineConnection = AffineConnection::flat(2);
        let m = reconstruct_metric(&diag(vec![R::one(), R::int(4)]), &flat, &[qi(0), qi(0)]).unwrap();
        assert_eq!(m.det_sigma, R::int(4));
        assert_eq!(m.g_up, diag(vec![R::int(4), R::int(16)]));
        assert_eq!(m.g_down, diag(vec![R::ratio(1, 4), R::ratio(1, 16)]));
        assert!(m.connection.is_flat());
        assert!(m.upsilon.iter().all(|u| u.is_zero()));
    }

    #[test]
    fn klein_sigma_reconstructs_klein_metric() {
        // Flat solution σ = δ − x xᵀ.
        let n = 2;
        let flat: AffineConnection = AffineConnection::flat(n);
        let sigma: Matrix<R> = (0..n)
            .map(|a| (0..n).map(|b| &(if a == b { R::one() } else { R::zero() }) - &(&x(a) * &x(b))).collect())
            .collect();
        let m = reconstruct_metric(&sigma, &flat, &[q(1, 3), q(-1, 4)]).unwrap();
        assert_eq!(m.g_down, klein_metric(n));
        assert!(m.definite);
        let lc = levi_civita(&m.g_down).unwrap();
        assert_eq!(lc, m.connection);
        assert!(is_levi_civita(&m.connection, &m.g_up, None).unwrap().holds);
        let back = to_matrix(&lower_field(&m.g_down));
        assert_eq!(back, m.g_down);
    }

    #[test]
    fn degenerate_sigma_is_rejected() {
        let flat: AffineConnection = AffineConnection::flat(2);
        let sigma = diag(vec![x(0), R::one()]);
        let e = reconstruct_metric(&sigma, &flat, &[qi(0), qi(0)]).unwrap_err();
        assert_eq!(e, Error::DegenerateSigma);
        let indefinite = reconstruct_metric(&diag(vec![R::one(), R::int(-1)]), &flat, &[qi(0), qi(0)]).unwrap();
        assert!(!indefinite.definite);
        assert_eq!(indefinite.signature, (1, 1));
    }
}
