//! Metric curvature: the Weyl/Schouten split and constant-curvature checks.

use num_traits::{Signed, Zero};

use super::inverse;
use super::reconstruct::levi_civita_with;
use crate::error::{Error, Result};
use crate::exprcore::{RationalExpr, Scalar, Series, Q};
use crate::tensorfield::{Down, TensorField, Up};

/// `R_abcd = g_ce R_ab^e_d` for the Levi-Civita connection of `g`.
pub fn riemann_lowered<S: Scalar>(g_down: &[Vec<S>], g_up: &[Vec<S>]) -> TensorField<S> {
    let n = g_down.len();
    let r = levi_civita_with(g_down, g_up).full_curvature();
    TensorField::from_fn(n, &[Down, Down, Down, Down], |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        let mut acc = S::zero();
        for e in 0..n {
            if !g_down[c][e].is_zero() {
                acc.add_assign_ref(&g_down[c][e].mul(r.get(&[a, b, e, d])));
            }
        }
        acc
    })
}

/// `G_abcd = g_ac g_bd − g_bc g_ad`, the curvature tensor of `κ = 1`.
fn unit_curvature<S: Scalar>(g: &[Vec<S>]) -> TensorField<S> {
    TensorField::from_fn(g.len(), &[Down, Down, Down, Down], |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        g[a][c].mul(&g[b][d]).sub(&g[b][c].mul(&g[a][d]))
    })
}

/// Curvature of a metric split into conformal Weyl and Ricci parts.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannSplit<S: Scalar = RationalExpr> {
    pub riemann: TensorField<S>,
    /// `C_ab^c_d`; `None` in dimension 2.
    pub weyl_conformal: Option<TensorField<S>>,
    /// Trace-free Ricci tensor `Φ_ab`.
    pub phi: TensorField<S>,
    pub scalar: S,
    /// `Q_ab = Φ_ab/(n−2) + R g_ab/(2n(n−1))`; `None` in dimension 2.
    pub schouten_metric: Option<TensorField<S>>,
    g_down: Vec<Vec<S>>,
    g_up: Vec<Vec<S>>,
}

/// Splits the curvature of `g_ab` (with inverse `g^{ab}`).
pub fn riemann_split<S: Scalar>(g_down: &[Vec<S>], g_up: &[Vec<S>]) -> Result<RiemannSplit<S>> {
    let n = g_down.len();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let riemann = riemann_lowered(g_down, g_up);
    // Ric_bd = g^{ac} R_abcd.
    let ricci = TensorField::from_fn(n, &[Down, Down], |i| {
        let mut acc = S::zero();
        for a in 0..n {
            for c in 0..n {
                if !g_up[a][c].is_zero() {
                    acc.add_assign_ref(&g_up[a][c].mul(riemann.get(&[a, i[0], c, i[1]])));
                }
            }
        }
        acc
    });
    let mut scalar = S::zero();
    for a in 0..n {
        for b in 0..n {
            if !g_up[a][b].is_zero() {
                scalar.add_assign_ref(&g_up[a][b].mul(ricci.get(&[a, b])));
            }
        }
    }
    let ni = n as i64;
    let inv_n = Q::new(1.into(), ni.into());
    let phi = TensorField::from_fn(n, &[Down, Down], |i| {
        ricci.get(i).sub(&scalar.mul(&g_down[i[0]][i[1]]).scale(&inv_n))
    });
    if n == 2 {
        return Ok(RiemannSplit {
            riemann,
            weyl_conformal: None,
            phi,
            scalar,
            schouten_metric: None,
            g_down: g_down.to_vec(),
            g_up: g_up.to_vec(),
        });
    }
    let k_phi = Q::new(1.into(), (ni - 2).into());
    let k_r = Q::new(1.into(), (2 * ni * (ni - 1)).into());
    let schouten = TensorField::from_fn(n, &[Down, Down], |i| {
        phi.get(i).scale(&k_phi).add(&scalar.mul(&g_down[i[0]][i[1]]).scale(&k_r))
    });
    let kulkarni = kulkarni_nomizu(g_down, &schouten);
    let c_lower = riemann.sub(&kulkarni)?;
    let weyl = raise_third(&c_lower, g_up);
    Ok(RiemannSplit {
        riemann,
        weyl_conformal: Some(weyl),
        phi,
        scalar,
        schouten_metric: Some(schouten),
        g_down: g_down.to_vec(),
        g_up: g_up.to_vec(),
    })
}

/// `g_ac Q_bd − g_bc Q_ad + Q_ac g_bd − Q_bc g_ad`.
fn kulkarni_nomizu<S: Scalar>(g: &[Vec<S>], q: &TensorField<S>) -> TensorField<S> {
    TensorField::from_fn(g.len(), &[Down, Down, Down, Down], |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        g[a][c]
            .mul(q.get(&[b, d]))
            .sub(&g[b][c].mul(q.get(&[a, d])))
            .add(&q.get(&[a, c]).mul(&g[b][d]))
            .sub(&q.get(&[b, c]).mul(&g[a][d]))
    })
}

fn raise_third<S: Scalar>(t: &TensorField<S>, g_up: &[Vec<S>]) -> TensorField<S> {
    let n = t.dim();
    TensorField::from_fn(n, &[Down, Down, Up, Down], |i| {
        let mut acc = S::zero();
        for e in 0..n {
            if !g_up[i[2]][e].is_zero() {
                acc.add_assign_ref(&g_up[i[2]][e].mul(t.get(&[i[0], i[1], e, i[3]])));
            }
        }
        acc
    })
}

impl<S: Scalar> RiemannSplit<S> {
    /// `C_abcd + g_ac Q_bd − g_bc Q_ad + Q_ac g_bd − Q_bc g_ad`.
    pub fn reassemble(&self) -> Option<TensorField<S>> {
        let n = self.riemann.dim();
        let (c, q) = (self.weyl_conformal.as_ref()?, self.schouten_metric.as_ref()?);
        let c_lower = TensorField::from_fn(n, &[Down, Down, Down, Down], |i| {
            let mut acc = S::zero();
            for e in 0..n {
                if !self.g_down[i[2]][e].is_zero() {
                    acc.add_assign_ref(&self.g_down[i[2]][e].mul(c.get(&[i[0], i[1], e, i[3]])));
                }
            }
            acc
        });
        c_lower.add(&kulkarni_nomizu(&self.g_down, q)).ok()
    }

    /// Projective Weyl tensor of the Levi-Civita connection rebuilt from the
    /// split: `C + (δ_a^c Φ_bd − δ_b^c Φ_ad)/((n−1)(n−2)) + (Φ_a^c g_bd − Φ_b^c g_ad)/(n−2)`.
    pub fn projective_weyl(&self) -> Option<TensorField<S>> {
        let n = self.riemann.dim();
        let c = self.weyl_conformal.as_ref()?;
        let ni = n as i64;
        let k1 = Q::new(1.into(), ((ni - 1) * (ni - 2)).into());
        let k2 = Q::new(1.into(), (ni - 2).into());
        let phi_up = |a: usize, cc: usize| {
            let mut acc = S::zero();
            for e in 0..n {
                if !self.g_up[cc][e].is_zero() {
                    acc.add_assign_ref(&self.g_up[cc][e].mul(self.phi.get(&[a, e])));
                }
            }
            acc
        };
        Some(TensorField::from_fn(n, &[Down, Down, Up, Down], |i| {
            let (a, b, cc, d) = (i[0], i[1], i[2], i[3]);
            let mut v = c.get(i).clone();
            let mut t = S::zero();
            if a == cc {
                t.add_assign_ref(self.phi.get(&[b, d]));
            }
            if b == cc {
                t = t.sub(self.phi.get(&[a, d]));
            }
            v.add_assign_ref(&t.scale(&k1));
            let u = phi_up(a, cc).mul(&self.g_down[b][d]).sub(&phi_up(b, cc).mul(&self.g_down[a][d]));
            v.add_assign_ref(&u.scale(&k2));
            v
        }))
    }
}

/// Outcome of a constant-curvature test.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureCheck {
    /// Sectional curvature at the first sample (or the base point).
    pub kappa: Q,
    pub kappas: Vec<Q>,
    /// Largest `|R_abcd − κ G_abcd|` over samples and components.
    pub deviation: Q,
    pub constant: bool,
}

fn inner<S: Scalar>(x: &TensorField<S>, y: &TensorField<S>, value: impl Fn(&S) -> Q) -> Q {
    x.components()
        .iter()
        .zip(y.components())
        .map(|(a, b)| value(a) * value(b))
        .sum()
}

/// Exact pointwise test of `R_abcd = κ(g_ac g_bd − g_bc g_ad)` with the
/// same `κ` at every sample.
pub fn constant_curvature_check(g_down: &[Vec<RationalExpr>], samples: &[Vec<Q>]) -> Result<CurvatureCheck> {
    if samples.is_empty() {
        return Err(Error::Shape("no sample points".into()));
    }
    let mut kappas = Vec::with_capacity(samples.len());
    let mut deviation = Q::zero();
    for p in samples {
        let g: Vec<Vec<Series>> = g_down
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| Series::expand(e, p, 2).map(|s| s.with_precision(2)))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::PoleAtBasePoint)?;
        let g_up = inverse(&g).ok_or(Error::DegenerateMetric)?;
        let r = riemann_lowered(&g, &g_up);
        let unit = unit_curvature(&g);
        let c0 = |s: &Series| s.constant_term();
        let kappa = inner(&r, &unit, c0) / inner(&unit, &unit, c0);
        for (a, b) in r.components().iter().zip(unit.components()) {
            let dev = (a.constant_term() - &kappa * b.constant_term()).abs();
            if dev > deviation {
                deviation = dev;
            }
        }
        kappas.push(kappa);
    }
    let constant = deviation.is_zero() && kappas.iter().all(|k| k == &kappas[0]);
    Ok(CurvatureCheck {
        kappa: kappas[0].clone(),
        kappas,
        deviation,
        constant,
    })
}

/// Test of `R_abcd = κ₀ G_abcd` as series through total degree `order`,
/// with `κ₀` read off at the expansion point.
pub fn constant_curvature_series(g_down: &[Vec<Series>], order: i32) -> Result<CurvatureCheck> {
    let g_up = inverse(g_down).ok_or(Error::DegenerateMetric)?;
    let r = riemann_lowered(g_down, &g_up);
    let unit = unit_curvature(g_down);
    let c0 = |s: &Series| s.constant_term();
    let kappa = inner(&r, &unit, c0) / inner(&unit, &unit, c0);
    let mut deviation = Q::zero();
    for (a, b) in r.components().iter().zip(unit.components()) {
        let res = a.sub_ref(&b.scale(&kappa)).with_precision(order);
        for (_, v) in res.poly().terms() {
            if v.abs() > deviation {
                deviation = v.abs();
            }
        }
    }
    Ok(CurvatureCheck {
        kappa: kappa.clone(),
        kappas: vec![kappa],
        constant: deviation.is_zero(),
        deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprcore::{q, qi, RationalExpr as R};
    use crate::projconn::ProjectiveData;

    fn x(i: usize) -> R {
        R::var(i)
    }

    fn r2(n: usize) -> R {
        (0..n).fold(R::zero(), |acc, i| &acc + &(&x(i) * &x(i)))
    }

    fn conformal(n: usize, f: R) -> Vec<Vec<R>> {
        (0..n)
            .map(|a| (0..n).map(|b| if a == b { f.clone() } else { R::zero() }).collect())
            .collect()
    }

    fn klein(n: usize) -> Vec<Vec<R>> {
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

    fn samples(n: usize) -> Vec<Vec<Q>> {
        vec![vec![qi(0); n], (0..n).map(|i| q(1, 3 + i as i64)).collect(), (0..n).map(|i| q(-1, 2 + 2 * i as i64)).collect()]
    }

    #[test]
    fn euclidean_has_zero_curvature() {
        let g = conformal(2, R::one());
        let c = constant_curvature_check(&g, &samples(2)).unwrap();
        assert!(c.constant);
        assert_eq!(c.kappa, qi(0));
    }

    #[test]
    fn sphere_has_unit_curvature() {
        let den = &R::one() + &r2(2);
        let g = conformal(2, &R::int(4) / &(&den * &den));
        let c = constant_curvature_check(&g, &samples(2)).unwrap();
        assert!(c.constant, "{:?}", c);
        assert_eq!(c.kappa, qi(1));
    }

    #[test]
    fn klein_three_has_curvature_minus_one() {
        let c = constant_curvature_check(&klein(3), &samples(3)).unwrap();
        assert!(c.constant, "{:?}", c);
        assert_eq!(c.kappa, qi(-1));
    }

    #[test]
    fn non_constant_curvature_is_detected() {
        let f = &R::one() + &(&x(0) * &x(0));
        let c = constant_curvature_check(&conformal(2, f), &samples(2)).unwrap();
        assert!(!c.constant);
    }

    #[test]
    fn constant_curvature_split_has_no_weyl_or_phi() {
        let g = klein(3);
        let g_up = inverse(&g).unwrap();
        let s = riemann_split(&g, &g_up).unwrap();
        assert!(s.weyl_conformal.as_ref().unwrap().is_zero());
        assert!(s.phi.is_zero());
        assert_eq!(s.scalar, R::int(-6));
        assert_eq!(s.reassemble().unwrap(), s.riemann);
    }

    #[test]
    fn split_reassembles_and_matches_projective_weyl() {
        let n = 3;
        let g: Vec<Vec<R>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| match (a, b) {
                        (0, 0) => &R::one() + &(&x(1) * &R::ratio(1, 4)),
                        (1, 1) => &R::one() + &(&x(0) * &x(2)).scale(&q(1, 4)),
                        (2, 2) => &R::one() + &(&x(0) * &x(0)).scale(&q(1, 4)),
                        (0, 2) | (2, 0) => x(1).scale(&q(1, 8)),
                        (0, 1) | (1, 0) => x(2).scale(&q(1, 8)),
                        _ => R::zero(),
                    })
                    .collect()
            })
            .collect();
        // Exact values at rational points through order-2 jets.
        let zero3 = |t: &TensorField<Series>| t.components().iter().all(|v| v.truncate(0).is_zero());
        for p in samples(n) {
            let gs: Vec<Vec<Series>> = g
                .iter()
                .map(|r| r.iter().map(|e| Series::expand(e, &p, 2).unwrap().with_precision(2)).collect())
                .collect();
            let g_up = inverse(&gs).unwrap();
            let s = riemann_split(&gs, &g_up).unwrap();
            // Conformal Weyl vanishes in dimension 3; the projective Weyl does not.
            assert!(zero3(s.weyl_conformal.as_ref().unwrap()));
            assert!(zero3(&s.reassemble().unwrap().sub(&s.riemann).unwrap()));
            let w = ProjectiveData::compute(&levi_civita_with(&gs, &g_up)).weyl;
            assert!(!zero3(&w));
            assert!(zero3(&s.projective_weyl().unwrap().sub(&w).unwrap()));
            // C is trace-free: C_ab^a_d = 0.
            assert!(zero3(&s.weyl_conformal.unwrap().contract(0, 2).unwrap()));
        }
    }

    #[test]
    fn four_dimensional_split_has_conformal_weyl() {
        let n = 4;
        let g: Vec<Vec<R>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut v = if a == b { R::one() } else { R::zero() };
                        if a == b {
                            v = &v + &(&x((a + 1) % n) * &x((a + 2) % n)).scale(&q(1, 4));
                        } else if a + b == 3 {
                            v = &v + &x(a.min(b)).scale(&q(1, 8));
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let p = vec![q(1, 3), q(-1, 5), q(1, 7), q(1, 2)];
        let gs: Vec<Vec<Series>> = g
            .iter()
            .map(|r| r.iter().map(|e| Series::expand(e, &p, 2).unwrap().with_precision(2)).collect())
            .collect();
        let g_up = inverse(&gs).unwrap();
        let s = riemann_split(&gs, &g_up).unwrap();
        let zero = |t: &TensorField<Series>| t.components().iter().all(|v| v.truncate(0).is_zero());
        let c = s.weyl_conformal.as_ref().unwrap();
        assert!(!zero(c));
        assert!(zero(&c.contract(0, 2).unwrap()));
        assert!(zero(&s.reassemble().unwrap().sub(&s.riemann).unwrap()));
        let w = ProjectiveData::compute(&levi_civita_with(&gs, &g_up)).weyl;
        assert!(zero(&s.projective_weyl().unwrap().sub(&w).unwrap()));
    }

    #[test]
    fn series_check_on_sphere() {
        let den = &R::one() + &r2(2);
        let g = conformal(2, &R::int(4) / &(&den * &den));
        let p = [q(1, 2), q(1, 5)];
        let gs: Vec<Vec<Series>> = g
            .iter()
            .map(|r| r.iter().map(|e| Series::expand(e, &p, 6).unwrap().with_precision(6)).collect())
            .collect();
        let c = constant_curvature_series(&gs, 3).unwrap();
        assert!(c.constant);
        assert_eq!(c.kappa, qi(1));
    }
}
