//! Truncated multivariate Taylor series with exact rational coefficients.
//!
//! A `Series` lives in local coordinates `y = x - p` around some base point
//! `p` that the series itself does not record. Its precision is the highest
//! total degree whose coefficients are known; exact polynomials have
//! unbounded precision.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;

use super::poly::{Monomial, Poly};
use super::ratfn::RationalExpr;
use super::{ExprError, Q};

#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    poly: Poly,
    /// `None` means exact; `Some(k)` means coefficients of degree `<= k` are known.
    prec: Option<i32>,
}

impl Series {
    pub fn zero() -> Self {
        Self {
            poly: Poly::zero(),
            prec: None,
        }
    }

    pub fn constant(q: Q) -> Self {
        Self {
            poly: Poly::constant(q),
            prec: None,
        }
    }

    /// An exact polynomial in local coordinates.
    pub fn exact(poly: Poly) -> Self {
        Self { poly, prec: None }
    }

    /// A polynomial known only up to total degree `prec`.
    pub fn truncated(poly: Poly, prec: i32) -> Self {
        Self {
            poly: truncate(poly, prec),
            prec: Some(prec),
        }
    }

    /// Taylor expansion of a rational function at `point`, to degree `order`.
    pub fn expand(e: &RationalExpr, point: &[Q], order: i32) -> Result<Self, ExprError> {
        Self::expand_cached(e, point, order, &mut HashMap::new())
    }

    /// [`Series::expand`] reusing inverses of denominators seen before.
    pub fn expand_cached(
        e: &RationalExpr,
        point: &[Q],
        order: i32,
        inverses: &mut HashMap<Poly, Option<Series>>,
    ) -> Result<Self, ExprError> {
        let num = e.numerator().shift(point);
        if e.is_polynomial() {
            return Ok(Self::exact(num));
        }
        let inv = inverses
            .entry(e.denominator().clone())
            .or_insert_with(|| Self::exact(e.denominator().shift(point)).inverse_to(order))
            .as_ref()
            .ok_or(ExprError::Pole)?;
        Ok(Self::exact(num).mul_ref(inv))
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn precision(&self) -> Option<i32> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// No nonzero coefficient within the known precision.
    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn constant_term(&self) -> Q {
        self.poly.constant_term()
    }

    /// Coefficient of `y^m` (zero if unknown or absent).
    pub fn coeff(&self, m: &Monomial) -> Q {
        self.poly
            .terms()
            .iter()
            .find(|t| &t.0 == m)
            .map_or_else(Q::zero, |t| t.1.clone())
    }

    pub fn with_precision(&self, prec: i32) -> Self {
        let p = match self.prec {
            Some(k) => k.min(prec),
            None => prec,
        };
        Self::truncated(self.poly.clone(), p)
    }

    fn combine_prec(a: Option<i32>, b: Option<i32>) -> Option<i32> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    fn make(poly: Poly, prec: Option<i32>) -> Self {
        match prec {
            None => Self { poly, prec },
            Some(k) => Self::truncated(poly, k),
        }
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        Self::make(self.poly.add(&o.poly), Self::combine_prec(self.prec, o.prec))
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        Self::make(self.poly.sub(&o.poly), Self::combine_prec(self.prec, o.prec))
    }

    pub fn neg_ref(&self) -> Self {
        Self {
            poly: self.poly.neg(),
            prec: self.prec,
        }
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            poly: self.poly.scale(k),
            prec: self.prec,
        }
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        if self.poly.is_zero() && self.prec.is_none() || o.poly.is_zero() && o.prec.is_none() {
            return Self::zero();
        }
        // Precision of a product: unknown terms of one factor meet the lowest
        // nonzero degree of the other.
        let prec = match (self.prec, o.prec) {
            (None, None) => None,
            (Some(a), None) => Some(a + low_degree(&o.poly)),
            (None, Some(b)) => Some(b + low_degree(&self.poly)),
            (Some(a), Some(b)) => Some((a + low_degree(&o.poly)).min(b + low_degree(&self.poly))),
        };
        match prec {
            None => Self::exact(self.poly.mul(&o.poly)),
            Some(k) => Self::truncated(mul_truncated(&self.poly, &o.poly, k), k),
        }
    }

    /// Multiplicative inverse up to degree `order`; needs a nonzero constant term.
    pub fn inverse_to(&self, order: i32) -> Option<Self> {
        let c0 = self.poly.constant_term();
        if c0.is_zero() {
            return None;
        }
        let order = match self.prec {
            Some(k) => k.min(order),
            None => order,
        };
        let inv0 = c0.recip();
        if self.poly.is_constant() {
            return Some(Self::constant(inv0));
        }
        // 1/a = (1/a0) * sum_k u^k with u = 1 - a/a0 having no constant term.
        let u = Poly::one().sub(&self.poly.scale(&inv0));
        let mut acc = Poly::one();
        let mut power = Poly::one();
        for _ in 0..order.max(0) {
            power = mul_truncated(&power, &u, order);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Some(Self::truncated(acc.scale(&inv0), order))
    }

    pub fn try_inv(&self) -> Option<Self> {
        match self.prec {
            Some(k) => self.inverse_to(k),
            None if self.poly.is_constant() && !self.poly.is_zero() => {
                Some(Self::constant(self.poly.constant_term().recip()))
            }
            None => None,
        }
    }

    pub fn diff(&self, k: usize) -> Self {
        Self::make(self.poly.diff(k), self.prec.map(|p| p - 1))
    }

    /// Value of the truncated polynomial at local offset `y`.
    pub fn eval_local(&self, y: &[Q]) -> Q {
        self.poly.eval(y)
    }

    pub fn eval_local_f64(&self, y: &[f64]) -> f64 {
        self.poly.eval_f64(y)
    }
}

fn low_degree(p: &Poly) -> i32 {
    p.terms().last().map_or(i32::MAX / 4, |t| t.0.degree() as i32)
}

fn truncate(p: Poly, prec: i32) -> Poly {
    if prec < 0 {
        return Poly::zero();
    }
    if p.total_degree() as i32 <= prec {
        return p;
    }
    Poly::from_terms(
        p.into_terms()
            .into_iter()
            .filter(|t| t.0.degree() as i32 <= prec),
    )
}

fn mul_truncated(a: &Poly, b: &Poly, prec: i32) -> Poly {
    if prec < 0 {
        return Poly::zero();
    }
    a.mul_bounded(b, Some(prec as u32))
}

impl Default for Series {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.prec {
            None => write!(f, "{}", self.poly),
            Some(k) => write!(f, "{} + O(|y|^{})", self.poly, k + 1),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn geometric_series_inverse() {
        // 1/(1 - y) = 1 + y + y^2 + ...
        let e = &RationalExpr::one() / &(&RationalExpr::one() - &RationalExpr::var(0));
        let s = Series::expand(&e, &[Q::zero()], 4).unwrap();
        for k in 0..=4u16 {
            assert_eq!(s.coeff(&Monomial::from_exps(&[k])), Q::one());
        }
        assert_eq!(s.precision(), Some(4));
    }

    #[test]
    fn product_with_inverse_is_one_to_precision() {
        let d = Poly::one()
            .add(&Poly::var(0).mul(&Poly::var(1)))
            .sub(&Poly::var(1).pow(2).scale(&Q::new(3.into(), 2.into())));
        let s = Series::exact(d);
        let inv = s.inverse_to(6).unwrap();
        let prod = s.mul_ref(&inv);
        assert_eq!(prod.poly(), &Poly::one());
        assert_eq!(prod.precision(), Some(6));
    }

    #[test]
    fn derivative_loses_one_order() {
        let s = Series::truncated(Poly::var(0).pow(3), 5);
        assert_eq!(s.diff(0).precision(), Some(4));
    }
}
