//! Differential forms on a coordinate chart and the radial homotopy operator.
//!
//! A `k`-form stores all `n^k` components `ω_{a1..ak}`, totally antisymmetric,
//! with `ω = (1/k!) ω_{a1..ak} dx^{a1} ∧ ... ∧ dx^{ak}`. In this convention
//! `(dη)_{ab} = ∂_a η_b - ∂_b η_a`.

use num_traits::Zero;

use super::poly::{Monomial, Poly};
use super::ratfn::RationalExpr;
use super::{ExprError, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialForm {
    dim: usize,
    degree: usize,
    components: Vec<RationalExpr>,
}

fn flat_index(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

fn unflatten(mut k: usize, n: usize, len: usize) -> Vec<usize> {
    let mut idx = vec![0; len];
    for slot in idx.iter_mut().rev() {
        *slot = k % n;
        k /= n;
    }
    idx
}

/// Sign of the permutation sorting `idx`, or 0 if an index repeats.
fn perm_sign(idx: &[usize]) -> i32 {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return 0;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

impl DifferentialForm {
    /// Builds a form from all components, checking total antisymmetry.
    pub fn new(dim: usize, degree: usize, components: Vec<RationalExpr>) -> Result<Self, ExprError> {
        if components.len() != dim.pow(degree as u32) {
            return Err(ExprError::Shape(format!(
                "{}-form in dimension {} needs {} components, got {}",
                degree,
                dim,
                dim.pow(degree as u32),
                components.len()
            )));
        }
        let form = Self {
            dim,
            degree,
            components,
        };
        if !form.is_antisymmetric() {
            return Err(ExprError::Shape("components are not antisymmetric".into()));
        }
        Ok(form)
    }

    /// Builds a form from its values on strictly increasing index tuples.
    pub fn from_fn<F: FnMut(&[usize]) -> RationalExpr>(dim: usize, degree: usize, mut f: F) -> Self {
        let total = dim.pow(degree as u32);
        let mut components = vec![RationalExpr::zero(); total];
        for k in 0..total {
            let idx = unflatten(k, dim, degree);
            if idx.windows(2).all(|w| w[0] < w[1]) {
                let v = f(&idx);
                components[k] = v;
            }
        }
        for k in 0..total {
            let idx = unflatten(k, dim, degree);
            let s = perm_sign(&idx);
            if s == 0 || idx.windows(2).all(|w| w[0] < w[1]) {
                continue;
            }
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            let base = components[flat_index(&sorted, dim)].clone();
            components[k] = if s > 0 { base } else { -base };
        }
        Self {
            dim,
            degree,
            components,
        }
    }

    pub fn scalar(dim: usize, f: RationalExpr) -> Self {
        Self {
            dim,
            degree: 0,
            components: vec![f],
        }
    }

    pub fn one_form(components: Vec<RationalExpr>) -> Self {
        Self {
            dim: components.len(),
            degree: 1,
            components,
        }
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            components: vec![RationalExpr::zero(); dim.pow(degree as u32)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[RationalExpr] {
        &self.components
    }

    pub fn get(&self, idx: &[usize]) -> &RationalExpr {
        &self.components[flat_index(idx, self.dim)]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    fn is_antisymmetric(&self) -> bool {
        if self.degree < 2 {
            return true;
        }
        let total = self.components.len();
        for k in 0..total {
            let idx = unflatten(k, self.dim, self.degree);
            let s = perm_sign(&idx);
            let c = &self.components[k];
            if s == 0 {
                if !c.is_zero() {
                    return false;
                }
                continue;
            }
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            let base = &self.components[flat_index(&sorted, self.dim)];
            let expect = if s > 0 { base.clone() } else { -base };
            if *c != expect {
                return false;
            }
        }
        true
    }

    /// Exterior derivative.
    pub fn d(&self) -> DifferentialForm {
        let n = self.dim;
        let k = self.degree;
        DifferentialForm::from_fn(n, k + 1, |idx| {
            let mut acc = RationalExpr::zero();
            for i in 0..=k {
                let mut rest: Vec<usize> = idx.to_vec();
                let a = rest.remove(i);
                let term = self.get(&rest).diff(a);
                if i % 2 == 0 {
                    acc = &acc + &term;
                } else {
                    acc = &acc - &term;
                }
            }
            acc
        })
    }

    pub fn is_closed(&self) -> bool {
        self.degree >= self.dim || self.d().is_zero()
    }

    pub fn add(&self, o: &DifferentialForm) -> DifferentialForm {
        assert_eq!((self.dim, self.degree), (o.dim, o.degree));
        DifferentialForm {
            dim: self.dim,
            degree: self.degree,
            components: self
                .components
                .iter()
                .zip(&o.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &Q) -> DifferentialForm {
        DifferentialForm {
            dim: self.dim,
            degree: self.degree,
            components: self.components.iter().map(|c| c.scale(k)).collect(),
        }
    }

    pub fn neg(&self) -> DifferentialForm {
        self.scale(&-Q::from_integer(1.into()))
    }

    /// Radial homotopy `H(ω)_{b..}(x) = ∫_0^1 t^{k-1} x^a ω_{ab..}(tx) dt`.
    ///
    /// For a closed polynomial form this returns a potential with `dH(ω) = ω`.
    pub fn homotopy_potential(&self) -> Result<DifferentialForm, ExprError> {
        if self.degree == 0 {
            return Err(ExprError::Shape("homotopy operator needs degree >= 1".into()));
        }
        if self.components.iter().any(|c| !c.is_polynomial()) {
            return Err(ExprError::NotPolynomial);
        }
        if !self.is_closed() {
            return Err(ExprError::NotClosed);
        }
        let n = self.dim;
        let k = self.degree;
        let out_len = n.pow((k - 1) as u32);
        let mut components = Vec::with_capacity(out_len);
        for flat in 0..out_len {
            let rest = unflatten(flat, n, k - 1);
            let mut terms: Vec<(Monomial, Q)> = Vec::new();
            for a in 0..n {
                let mut idx = Vec::with_capacity(k);
                idx.push(a);
                idx.extend_from_slice(&rest);
                let comp = self.get(&idx).numerator();
                for (m, c) in comp.terms() {
                    let w = Q::new(1.into(), (k as i64 + m.degree() as i64).into());
                    terms.push((m.mul(&Monomial::var(a)), c * w));
                }
            }
            components.push(RationalExpr::from_poly(Poly::from_terms(terms)));
        }
        let potential = DifferentialForm {
            dim: n,
            degree: k - 1,
            components,
        };
        debug_assert!(potential.d().sub(self).is_zero());
        Ok(potential)
    }

    pub fn sub(&self, o: &DifferentialForm) -> DifferentialForm {
        self.add(&o.neg())
    }
}

impl Zero for DifferentialForm {
    fn zero() -> Self {
        DifferentialForm::zero(0, 0)
    }
    fn is_zero(&self) -> bool {
        DifferentialForm::is_zero(self)
    }
}

impl std::ops::Add for DifferentialForm {
    type Output = DifferentialForm;
    fn add(self, o: DifferentialForm) -> DifferentialForm {
        DifferentialForm::add(&self, &o)
    }
}
