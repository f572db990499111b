//! Sections of `⊙²TM ⊕ TM ⊕ ℝ` and the tampered connection on them.
//!
//! Slots are packed as `σ^{bc}` for `b <= c` (row-major upper triangle),
//! then `μ^b`, then `ρ`, for `N = (n+1)(n+2)/2` entries. All three parts have
//! projective weight −2.

use crate::error::Result;
use crate::exprcore::{Scalar, Q};
use crate::projconn::{AffineConnection, ProjectiveData};

pub fn slot_count(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

pub fn sigma_slot(n: usize, b: usize, c: usize) -> usize {
    let (b, c) = if b <= c { (b, c) } else { (c, b) };
    b * n - b * (b + 1) / 2 + c
}

pub fn mu_slot(n: usize, b: usize) -> usize {
    n * (n + 1) / 2 + b
}

pub fn rho_slot(n: usize) -> usize {
    n * (n + 1) / 2 + n
}

/// Inverse of [`sigma_slot`] on the σ block.
pub fn sigma_pair(n: usize, k: usize) -> (usize, usize) {
    for b in 0..n {
        for c in b..n {
            if sigma_slot(n, b, c) == k {
                return (b, c);
            }
        }
    }
    panic!("slot {} is not a σ slot", k)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TractorSection<S: Scalar> {
    dim: usize,
    slots: Vec<S>,
}

impl<S: Scalar> TractorSection<S> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            slots: vec![S::zero(); slot_count(dim)],
        }
    }

    pub fn from_slots(dim: usize, slots: Vec<S>) -> Self {
        assert_eq!(slots.len(), slot_count(dim));
        Self { dim, slots }
    }

    /// `sigma(b, c)` is read for `b <= c` only.
    pub fn from_parts<F: FnMut(usize, usize) -> S>(dim: usize, mut sigma: F, mu: Vec<S>, rho: S) -> Self {
        assert_eq!(mu.len(), dim);
        let mut slots = Vec::with_capacity(slot_count(dim));
        for b in 0..dim {
            for c in b..dim {
                slots.push(sigma(b, c));
            }
        }
        slots.extend(mu);
        slots.push(rho);
        Self { dim, slots }
    }

    pub fn unit(dim: usize, k: usize) -> Self {
        let mut s = Self::zeros(dim);
        s.slots[k] = S::one();
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> &[S] {
        &self.slots
    }

    pub fn into_slots(self) -> Vec<S> {
        self.slots
    }

    pub fn sigma(&self, b: usize, c: usize) -> &S {
        &self.slots[sigma_slot(self.dim, b, c)]
    }

    pub fn mu(&self, b: usize) -> &S {
        &self.slots[mu_slot(self.dim, b)]
    }

    pub fn rho(&self) -> &S {
        &self.slots[rho_slot(self.dim)]
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(|s| s.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn diff(&self, a: usize) -> Self {
        self.map(|s| s.diff(a))
    }

    pub fn map<T: Scalar, F: FnMut(&S) -> T>(&self, f: F) -> TractorSection<T> {
        TractorSection {
            dim: self.dim,
            slots: self.slots.iter().map(f).collect(),
        }
    }

    fn zip<F: Fn(&S, &S) -> S>(&self, o: &Self, f: F) -> Self {
        assert_eq!(self.dim, o.dim);
        Self {
            dim: self.dim,
            slots: self.slots.iter().zip(&o.slots).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

/// Change of splitting under `∇ ↦ ∇ + Υ`:
/// `μ^b ↦ μ^b + Υ_cσ^{bc}`, `ρ ↦ ρ + 2Υ_bμ^b + Υ_bΥ_cσ^{bc}`.
pub fn tractor_transform<S: Scalar>(s: &TractorSection<S>, upsilon: &[S]) -> TractorSection<S> {
    let n = s.dim;
    assert_eq!(upsilon.len(), n);
    let mut out = s.clone();
    let mut rho = s.rho().clone();
    for b in 0..n {
        let mut ys = S::zero();
        for c in 0..n {
            ys.add_assign_ref(&upsilon[c].mul(s.sigma(b, c)));
        }
        rho.add_assign_ref(&upsilon[b].mul(&ys));
        rho.add_assign_ref(&upsilon[b].mul(s.mu(b)).scale(&Q::from_integer(2.into())));
        out.slots[mu_slot(n, b)] = s.mu(b).add(&ys);
    }
    out.slots[rho_slot(n)] = rho;
    out
}

fn mat_mul<S: Scalar>(x: &[S], y: &[S], m: usize) -> Vec<S> {
    let mut out = vec![S::zero(); m * m];
    for i in 0..m {
        for k in 0..m {
            let a = &x[i * m + k];
            if a.is_zero() {
                continue;
            }
            for j in 0..m {
                let b = &y[k * m + j];
                if !b.is_zero() {
                    out[i * m + j].add_assign_ref(&a.mul(b));
                }
            }
        }
    }
    out
}

fn mat_vec<S: Scalar>(x: &[S], v: &[S], m: usize) -> Vec<S> {
    (0..m)
        .map(|i| {
            let mut acc = S::zero();
            for j in 0..m {
                let a = &x[i * m + j];
                if !a.is_zero() && !v[j].is_zero() {
                    acc.add_assign_ref(&a.mul(&v[j]));
                }
            }
            acc
        })
        .collect()
}

/// The tampered connection `D_a s = ∂_a s + A_a s`, or the plain tractor
/// connection when built with `modified = false`.
#[derive(Clone, Debug)]
pub struct TractorConnection<S: Scalar> {
    dim: usize,
    modified: bool,
    matrices: Vec<Vec<S>>,
}

impl<S: Scalar> TractorConnection<S> {
    /// Requires a special connection.
    pub fn tampered(c: &AffineConnection<S>) -> Result<Self> {
        let d = c.decompose_curvature()?;
        Ok(Self::new(c, &d, true))
    }

    pub fn new(c: &AffineConnection<S>, d: &ProjectiveData<S>, modified: bool) -> Self {
        let n = c.dim();
        let m = slot_count(n);
        let kappa: Vec<S> = {
            let k = Q::new((-2).into(), (n as i64 + 1).into());
            c.trace().iter().map(|t| t.scale(&k)).collect()
        };
        let mut matrices = vec![vec![S::zero(); m * m]; n];
        for j in 0..m {
            let e = TractorSection::unit(n, j);
            for (a, mat) in matrices.iter_mut().enumerate() {
                let col = algebraic_part(c, d, &kappa, modified, a, &e);
                for (i, v) in col.slots.into_iter().enumerate() {
                    mat[i * m + j] = v;
                }
            }
        }
        Self {
            dim: n,
            modified,
            matrices,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_modified(&self) -> bool {
        self.modified
    }

    /// `A_a` as an `N × N` row-major matrix.
    pub fn matrix(&self, a: usize) -> &[S] {
        &self.matrices[a]
    }

    pub fn matrices(&self) -> &[Vec<S>] {
        &self.matrices
    }

    /// `D_a s` for `a = 0..n`.
    pub fn derivative(&self, s: &TractorSection<S>) -> Vec<TractorSection<S>> {
        let m = slot_count(self.dim);
        (0..self.dim)
            .map(|a| {
                let lin = mat_vec(&self.matrices[a], &s.slots, m);
                let slots = s.slots.iter().zip(lin).map(|(x, y)| x.diff(a).add(&y)).collect();
                TractorSection { dim: self.dim, slots }
            })
            .collect()
    }

    /// `F_ab = ∂_aA_b − ∂_bA_a + A_aA_b − A_bA_a`.
    pub fn curvature(&self) -> TamperedCurvature<S> {
        let n = self.dim;
        let m = slot_count(n);
        let mut action = vec![vec![S::zero(); m * m]; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let ab = mat_mul(&self.matrices[a], &self.matrices[b], m);
                let ba = mat_mul(&self.matrices[b], &self.matrices[a], m);
                let f: Vec<S> = (0..m * m)
                    .map(|k| {
                        self.matrices[b][k]
                            .diff(a)
                            .sub(&self.matrices[a][k].diff(b))
                            .add(&ab[k])
                            .sub(&ba[k])
                    })
                    .collect();
                action[b * n + a] = f.iter().map(|x| x.neg()).collect();
                action[a * n + b] = f;
            }
        }
        TamperedCurvature { dim: n, action }
    }
}

/// Non-derivative part of `D_a s`.
fn algebraic_part<S: Scalar>(
    c: &AffineConnection<S>,
    d: &ProjectiveData<S>,
    kappa: &[S],
    modified: bool,
    a: usize,
    s: &TractorSection<S>,
) -> TractorSection<S> {
    let n = c.dim();
    let inv_n = Q::new(1.into(), (n as i64).into());
    let two = Q::from_integer(2.into());
    let mut out = TractorSection::zeros(n);
    for b in 0..n {
        for cc in b..n {
            let mut v = kappa[a].mul(s.sigma(b, cc));
            for e in 0..n {
                v.add_assign_ref(&c.gamma(b, a, e).mul(s.sigma(e, cc)));
                v.add_assign_ref(&c.gamma(cc, a, e).mul(s.sigma(b, e)));
            }
            if a == b {
                v = v.sub(s.mu(cc));
            }
            if a == cc {
                v = v.sub(s.mu(b));
            }
            out.slots[sigma_slot(n, b, cc)] = v;
        }
    }
    for b in 0..n {
        let mut v = kappa[a].mul(s.mu(b));
        for e in 0..n {
            v.add_assign_ref(&c.gamma(b, a, e).mul(s.mu(e)));
        }
        if a == b {
            v = v.sub(s.rho());
        }
        for e in 0..n {
            v.add_assign_ref(&d.schouten.get(&[a, e]).mul(s.sigma(b, e)));
        }
        if modified {
            let mut w = S::zero();
            for e in 0..n {
                for f in 0..n {
                    w.add_assign_ref(&d.weyl.get(&[a, e, b, f]).mul(s.sigma(e, f)));
                }
            }
            v = v.sub(&w.scale(&inv_n));
        }
        out.slots[mu_slot(n, b)] = v;
    }
    let mut v = kappa[a].mul(s.rho());
    for b in 0..n {
        v.add_assign_ref(&d.schouten.get(&[a, b]).mul(s.mu(b)).scale(&two));
    }
    if modified {
        let mut y = S::zero();
        for b in 0..n {
            for e in 0..n {
                y.add_assign_ref(&d.cotton_york.get(&[a, b, e]).mul(s.sigma(b, e)));
            }
        }
        v = v.sub(&y.scale(&(&two * &two * &inv_n)));
    }
    out.slots[rho_slot(n)] = v;
    out
}

/// Curvature of the tampered connection: an `N × N` matrix per index pair.
#[derive(Clone, Debug, PartialEq)]
pub struct TamperedCurvature<S: Scalar> {
    dim: usize,
    action: Vec<Vec<S>>,
}

impl<S: Scalar> TamperedCurvature<S> {
    pub fn matrix(&self, a: usize, b: usize) -> &[S] {
        &self.action[a * self.dim + b]
    }

    pub fn apply(&self, a: usize, b: usize, s: &TractorSection<S>) -> TractorSection<S> {
        let m = slot_count(self.dim);
        TractorSection {
            dim: self.dim,
            slots: mat_vec(self.matrix(a, b), &s.slots, m),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.action.iter().all(|m| m.iter().all(|x| x.is_zero()))
    }

    pub fn map<T: Scalar, F: FnMut(&S) -> T>(&self, mut f: F) -> TamperedCurvature<T> {
        TamperedCurvature {
            dim: self.dim,
            action: self.action.iter().map(|m| m.iter().map(&mut f).collect()).collect(),
        }
    }
}

/// Top (`σ`) slot of the curvature acting on `σ`:
/// `W_ab^c_eσ^{de} + W_ab^d_eσ^{ce} + (1/n)(δ_a^cU_b^d + δ_a^dU_b^c − δ_b^cU_a^d − δ_b^dU_a^c)`
/// with `U_b^d = W_be^d_fσ^{ef}`. Entries are indexed by `sigma_slot(c, d)`.
pub fn curvature_top_row<S: Scalar>(d: &ProjectiveData<S>, a: usize, b: usize, s: &TractorSection<S>) -> Vec<S> {
    let n = d.weyl.dim();
    let inv_n = Q::new(1.into(), (n as i64).into());
    let u = |x: usize, y: usize| {
        let mut acc = S::zero();
        for e in 0..n {
            for f in 0..n {
                acc.add_assign_ref(&d.weyl.get(&[x, e, y, f]).mul(s.sigma(e, f)));
            }
        }
        acc
    };
    let mut out = vec![S::zero(); n * (n + 1) / 2];
    for c in 0..n {
        for dd in c..n {
            let mut v = S::zero();
            for e in 0..n {
                v.add_assign_ref(&d.weyl.get(&[a, b, c, e]).mul(s.sigma(dd, e)));
                v.add_assign_ref(&d.weyl.get(&[a, b, dd, e]).mul(s.sigma(c, e)));
            }
            let mut corr = S::zero();
            if a == c {
                corr.add_assign_ref(&u(b, dd));
            }
            if a == dd {
                corr.add_assign_ref(&u(b, c));
            }
            if b == c {
                corr = corr.sub(&u(a, dd));
            }
            if b == dd {
                corr = corr.sub(&u(a, c));
            }
            out[sigma_slot(n, c, dd)] = v.add(&corr.scale(&inv_n));
        }
    }
    out
}
