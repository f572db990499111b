//! Torsion-free affine connections and their projective invariants.
//!
//! Conventions: `Γ^c_{ab}` is stored at `[c][a][b]`; the full curvature is
//! `R_ab^c_d = ∂_aΓ^c_{bd} − ∂_bΓ^c_{ad} + Γ^c_{ae}Γ^e_{bd} − Γ^c_{be}Γ^e_{ad}`
//! and `Ric_bd = R_ab^a_d`, so the round sphere has `Ric = (n−1)g`.
//!
//! Weighted fields are represented by their components relative to the
//! coordinate volume form. A field of projective weight `w` then picks up
//! `(w/(n+1)) τ_a` in its covariant derivative, where `τ_a = Γ^c_{ca}`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exprcore::{DifferentialForm, ExprError, RationalExpr, Scalar, Series, Q};
use crate::tensorfield::{delta, Down, TensorField, Up, Variance};

#[derive(Clone, Debug, PartialEq)]
pub struct AffineConnection<S: Scalar = RationalExpr> {
    dim: usize,
    gamma: Vec<S>,
}

impl<S: Scalar> AffineConnection<S> {
    /// Builds a connection from `Γ^c_{ab}` laid out as `[c][a][b]`.
    pub fn new(dim: usize, gamma: Vec<S>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if gamma.len() != dim * dim * dim {
            return Err(Error::Shape(format!(
                "expected {} Christoffel symbols, got {}",
                dim * dim * dim,
                gamma.len()
            )));
        }
        let c = Self { dim, gamma };
        for k in 0..dim {
            for a in 0..dim {
                for b in a + 1..dim {
                    if c.gamma(k, a, b) != c.gamma(k, b, a) {
                        return Err(Error::Shape(format!(
                            "torsion: Γ^{}_{{{}{}}} differs from Γ^{}_{{{}{}}}",
                            k + 1,
                            a + 1,
                            b + 1,
                            k + 1,
                            b + 1,
                            a + 1
                        )));
                    }
                }
            }
        }
        Ok(c)
    }

    /// Builds a connection from `f(c, a, b)` evaluated for `a <= b`.
    pub fn from_fn<F: FnMut(usize, usize, usize) -> S>(dim: usize, mut f: F) -> Self {
        let mut gamma = vec![S::zero(); dim * dim * dim];
        for c in 0..dim {
            for a in 0..dim {
                for b in a..dim {
                    let v = f(c, a, b);
                    gamma[(c * dim + b) * dim + a] = v.clone();
                    gamma[(c * dim + a) * dim + b] = v;
                }
            }
        }
        Self { dim, gamma }
    }

    pub fn flat(dim: usize) -> Self {
        Self {
            dim,
            gamma: vec![S::zero(); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self, c: usize, a: usize, b: usize) -> &S {
        &self.gamma[(c * self.dim + a) * self.dim + b]
    }

    pub fn christoffels(&self) -> &[S] {
        &self.gamma
    }

    /// Christoffel symbols at a floating-point point, laid out like `gamma`.
    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.gamma.iter().map(|g| g.eval_f64(x)).collect()
    }

    pub fn is_flat(&self) -> bool {
        self.gamma.iter().all(|g| g.is_zero())
    }

    pub fn map<T: Scalar, F: FnMut(&S) -> T>(&self, f: F) -> AffineConnection<T> {
        AffineConnection {
            dim: self.dim,
            gamma: self.gamma.iter().map(f).collect(),
        }
    }

    /// Christoffel trace `τ_b = Γ^c_{cb}`.
    pub fn trace(&self) -> Vec<S> {
        let n = self.dim;
        (0..n)
            .map(|b| {
                let mut acc = S::zero();
                for c in 0..n {
                    acc.add_assign_ref(self.gamma(c, c, b));
                }
                acc
            })
            .collect()
    }

    /// `Γ̂^c_{ab} = Γ^c_{ab} + δ_a^c Υ_b + δ_b^c Υ_a`.
    pub fn projective_change(&self, upsilon: &[S]) -> Self {
        assert_eq!(upsilon.len(), self.dim, "Υ has the wrong length");
        let n = self.dim;
        Self::from_fn(n, |c, a, b| {
            let mut v = self.gamma(c, a, b).clone();
            if a == c {
                v.add_assign_ref(&upsilon[b]);
            }
            if b == c {
                v.add_assign_ref(&upsilon[a]);
            }
            v
        })
    }

    fn derivative_with(&self, t: &TensorField<S>, weight_term: Option<&[S]>) -> TensorField<S> {
        let n = self.dim;
        let mut sig = vec![Down];
        sig.extend_from_slice(t.signature());
        let tsig = t.signature().to_vec();
        let mut idx = Vec::with_capacity(tsig.len());
        let out = TensorField::from_fn(n, &sig, |full| {
            let a = full[0];
            let rest = &full[1..];
            let mut acc = t.get(rest).diff(a);
            if let Some(wt) = weight_term {
                let v = t.get(rest);
                if !wt[a].is_zero() && !v.is_zero() {
                    acc.add_assign_ref(&wt[a].mul(v));
                }
            }
            for (slot, var) in tsig.iter().enumerate() {
                for e in 0..n {
                    idx.clear();
                    idx.extend_from_slice(rest);
                    idx[slot] = e;
                    let v = t.get(&idx);
                    if v.is_zero() {
                        continue;
                    }
                    match var {
                        Up => {
                            let g = self.gamma(rest[slot], a, e);
                            if !g.is_zero() {
                                acc.add_assign_ref(&g.mul(v));
                            }
                        }
                        Down => {
                            let g = self.gamma(e, a, rest[slot]);
                            if !g.is_zero() {
                                acc = acc.sub(&g.mul(v));
                            }
                        }
                    }
                }
            }
            acc
        });
        out.with_weight(t.weight())
    }

    /// Covariant derivative `∇_a T`, with the derivative index first.
    ///
    /// The field must carry no exponential tag; see
    /// [`AffineConnection::covariant_derivative_tagged`].
    pub fn covariant_derivative(&self, t: &TensorField<S>) -> TensorField<S> {
        assert!(t.tag().is_zero(), "covariant_derivative needs an untagged field");
        if t.weight() == 0 {
            return self.derivative_with(t, None);
        }
        let k = Q::new(t.weight().into(), (self.dim as i64 + 1).into());
        let wt: Vec<S> = self.trace().iter().map(|x| x.scale(&k)).collect();
        self.derivative_with(t, Some(&wt))
    }

    /// Full curvature `R_ab^c_d` with signature `[Down, Down, Up, Down]`.
    pub fn full_curvature(&self) -> TensorField<S> {
        let n = self.dim;
        let mut r = TensorField::from_fn(n, &[Down, Down, Up, Down], |i| {
            let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
            if a >= b {
                return S::zero();
            }
            let mut acc = self.gamma(c, b, d).diff(a).sub(&self.gamma(c, a, d).diff(b));
            for e in 0..n {
                let t1 = self.gamma(c, a, e);
                let t2 = self.gamma(e, b, d);
                if !t1.is_zero() && !t2.is_zero() {
                    acc.add_assign_ref(&t1.mul(t2));
                }
                let t3 = self.gamma(c, b, e);
                let t4 = self.gamma(e, a, d);
                if !t3.is_zero() && !t4.is_zero() {
                    acc = acc.sub(&t3.mul(t4));
                }
            }
            acc
        });
        for a in 0..n {
            for b in 0..a {
                for c in 0..n {
                    for d in 0..n {
                        let v = r.get(&[b, a, c, d]).neg();
                        r.set(&[a, b, c, d], v);
                    }
                }
            }
        }
        r
    }

    pub fn ricci(&self) -> TensorField<S> {
        ricci_of(&self.full_curvature())
    }

    /// Components `β_ab = −(Ric_ab − Ric_ba)/(n+1)`, computed as
    /// `(∂_aτ_b − ∂_bτ_a)/(n+1)`: the quadratic terms of Ricci are symmetric.
    pub fn beta(&self) -> TensorField<S> {
        let n = self.dim;
        let tau = self.trace();
        let k = Q::new(1.into(), (n as i64 + 1).into());
        TensorField::from_fn(n, &[Down, Down], |i| tau[i[1]].diff(i[0]).sub(&tau[i[0]].diff(i[1])).scale(&k))
    }

    /// Whether the Ricci tensor is symmetric.
    pub fn is_special(&self) -> bool {
        self.beta().is_zero()
    }

    /// Curvature decomposition of a special connection.
    pub fn decompose_curvature(&self) -> Result<ProjectiveData<S>> {
        let data = ProjectiveData::compute(self);
        if !data.beta.is_zero() {
            return Err(Error::NotSpecial("Ricci tensor is not symmetric".into()));
        }
        Ok(data)
    }

    /// `∇_cW_ab^c_d − (n−2)(∇_aP_bd − ∇_bP_ad)`, which vanishes identically.
    pub fn bianchi_contracted_check(&self, d: &ProjectiveData<S>) -> TensorField<S> {
        let n = self.dim;
        let dw = self.covariant_derivative(&d.weyl);
        let div = dw.contract(0, 3).expect("slots 0 and 3 have opposite variance");
        let k = Q::from_integer((2 * (n as i64 - 2)).into());
        div.sub(&d.cotton_york.scale(&k)).expect("same shape")
    }
}

fn ricci_of<S: Scalar>(r: &TensorField<S>) -> TensorField<S> {
    r.contract(0, 2).expect("slots 0 and 2 have opposite variance")
}

fn beta_of<S: Scalar>(ric: &TensorField<S>) -> TensorField<S> {
    let n = ric.dim();
    let k = Q::new((-1).into(), (n as i64 + 1).into());
    TensorField::from_fn(n, &[Down, Down], |i| {
        ric.get(&[i[0], i[1]]).sub(ric.get(&[i[1], i[0]])).scale(&k)
    })
}

/// Ricci, β, Schouten, Weyl and Cotton–York tensors of a connection.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveData<S: Scalar = RationalExpr> {
    pub curvature: TensorField<S>,
    pub ricci: TensorField<S>,
    pub beta: TensorField<S>,
    pub schouten: TensorField<S>,
    pub weyl: TensorField<S>,
    pub cotton_york: TensorField<S>,
}

impl<S: Scalar> ProjectiveData<S> {
    /// Decomposition `R_ab^c_d = W_ab^c_d + δ_a^c P_bd − δ_b^c P_ad + β_ab δ^c_d`,
    /// valid for any torsion-free connection.
    pub fn compute(c: &AffineConnection<S>) -> Self {
        let n = c.dim();
        let curvature = c.full_curvature();
        let ricci = ricci_of(&curvature);
        let beta = beta_of(&ricci);
        let sym = Q::new(1.into(), (2 * (n as i64 - 1)).into());
        let asym = Q::new(1.into(), (2 * (n as i64 + 1)).into());
        let schouten = TensorField::from_fn(n, &[Down, Down], |i| {
            let r_ab = ricci.get(&[i[0], i[1]]);
            let r_ba = ricci.get(&[i[1], i[0]]);
            r_ab.add(r_ba).scale(&sym).add(&r_ab.sub(r_ba).scale(&asym))
        });
        let weyl = TensorField::from_fn(n, &[Down, Down, Up, Down], |i| {
            let (a, b, cc, d) = (i[0], i[1], i[2], i[3]);
            let mut v = curvature.get(i).clone();
            if a == cc {
                v = v.sub(schouten.get(&[b, d]));
            }
            if b == cc {
                v.add_assign_ref(schouten.get(&[a, d]));
            }
            if cc == d {
                v = v.sub(beta.get(&[a, b]));
            }
            v
        });
        let dp = c.covariant_derivative(&schouten);
        let half = Q::new(1.into(), 2.into());
        let cotton_york = TensorField::from_fn(n, &[Down, Down, Down], |i| {
            dp.get(&[i[0], i[1], i[2]])
                .sub(dp.get(&[i[1], i[0], i[2]]))
                .scale(&half)
        });
        Self {
            curvature,
            ricci,
            beta,
            schouten,
            weyl,
            cotton_york,
        }
    }
}

/// Output of [`AffineConnection::specialize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Specialization {
    /// Special representative with vanishing Christoffel trace.
    pub connection: AffineConnection,
    /// Total `Υ` of the change from the input connection.
    pub upsilon: Vec<RationalExpr>,
    /// `f` with `df` equal to the exact part of `Υ`, when it is polynomial.
    pub exact_part: Option<RationalExpr>,
}

impl AffineConnection<RationalExpr> {
    /// The 2-form `β`, checked to be closed.
    pub fn beta_form(&self) -> Result<DifferentialForm> {
        let b = self.beta();
        let form = DifferentialForm::new(self.dim, 2, b.components().to_vec())?;
        if !form.is_closed() {
            return Err(Error::Internal("dβ does not vanish".into()));
        }
        Ok(form)
    }

    /// Projectively changes to the representative with symmetric Ricci
    /// tensor and zero Christoffel trace.
    pub fn specialize(&self) -> Result<Specialization> {
        let n = self.dim;
        let beta = self.beta_form()?;
        let upsilon0: Vec<RationalExpr> = if beta.is_zero() {
            vec![RationalExpr::zero(); n]
        } else {
            let h = beta.homotopy_potential()?;
            h.components().iter().map(|x| -x).collect()
        };
        let c1 = self.projective_change(&upsilon0);
        let tau = c1.trace();
        let k = Q::new((-1).into(), (n as i64 + 1).into());
        let upsilon1: Vec<RationalExpr> = tau.iter().map(|t| t.scale(&k)).collect();
        let connection = c1.projective_change(&upsilon1);
        let exact_part = match DifferentialForm::one_form(tau).homotopy_potential() {
            Ok(h) => Some(h.components()[0].scale(&k)),
            Err(ExprError::NotPolynomial) => None,
            Err(e) => return Err(Error::Internal(format!("trace is not closed: {}", e))),
        };
        let upsilon = upsilon0.iter().zip(&upsilon1).map(|(a, b)| a + b).collect();
        Ok(Specialization {
            connection,
            upsilon,
            exact_part,
        })
    }

    /// Taylor expansion of the Christoffel symbols at `point`.
    pub fn expand(&self, point: &[Q], order: i32) -> Result<AffineConnection<Series>> {
        let mut inverses = HashMap::new();
        let gamma = self
            .gamma
            .iter()
            .map(|g| Series::expand_cached(g, point, order, &mut inverses))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::PoleAtBasePoint)?;
        Ok(AffineConnection {
            dim: self.dim,
            gamma,
        })
    }

    /// Covariant derivative of a field whose components are taken relative
    /// to a `∇`-parallel volume form, so no weight term appears. The
    /// exponential tag is differentiated: `∂(e^t T) = e^t (∂T + ∂t·T)`.
    pub fn covariant_derivative_tagged(&self, t: &TensorField) -> TensorField {
        let untagged = TensorField::from_components(
            t.dim(),
            t.signature(),
            t.components().to_vec(),
        )
        .expect("same shape");
        let base = self.derivative_with(&untagged, None);
        let n = self.dim;
        let dtag: Vec<RationalExpr> = (0..n).map(|a| t.tag().diff(a)).collect();
        let mut sig = vec![Down];
        sig.extend_from_slice(t.signature());
        TensorField::from_fn(n, &sig, |full| {
            let v = t.get(&full[1..]);
            base.get(full) + &(&dtag[full[0]] * v)
        })
        .with_weight(t.weight())
        .with_tag(t.tag().clone())
    }
}

/// Signature of a weight `−2` field `σ^{bc}`.
pub const SIGMA_SIGNATURE: [Variance; 2] = [Up, Up];

/// Delta tensor `δ_a^b` as a field.
pub fn identity_field<S: Scalar>(n: usize) -> TensorField<S> {
    TensorField::from_fn(n, &[Down, Up], |i| delta(i[0], i[1]))
}
