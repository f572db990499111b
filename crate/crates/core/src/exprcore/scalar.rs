use std::fmt::Debug;

use super::ratfn::RationalExpr;
use super::series::Series;
use super::{ExprError, Q};

/// Scalar fields that tensor components can live in.
///
/// Implemented by exact rational functions and by truncated Taylor series, so
/// the same curvature and tractor code runs symbolically or on jets.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn from_q(q: &Q) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, k: &Q) -> Self;
    fn diff(&self, var: usize) -> Self;
    fn is_zero(&self) -> bool;
    fn try_inv(&self) -> Option<Self>;
    /// Value at a point given in the scalar's own coordinates (chart
    /// coordinates for rational functions, local offsets for series).
    fn eval_q(&self, x: &[Q]) -> Result<Q, ExprError>;
    fn eval_f64(&self, x: &[f64]) -> f64;

    fn one() -> Self {
        Self::from_q(&num_traits::One::one())
    }

    fn from_int(k: i64) -> Self {
        Self::from_q(&Q::from_integer(k.into()))
    }

    /// Drops coefficients above total degree `order`; identity for exact scalars.
    fn truncate(&self, _order: i32) -> Self {
        self.clone()
    }

    fn add_assign_ref(&mut self, o: &Self) {
        if !o.is_zero() {
            *self = Scalar::add(self, o);
        }
    }
}

impl Scalar for RationalExpr {
    fn zero() -> Self {
        RationalExpr::zero()
    }
    fn from_q(q: &Q) -> Self {
        RationalExpr::constant(q.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self.add_ref(o)
    }
    fn sub(&self, o: &Self) -> Self {
        self.sub_ref(o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_ref(o)
    }
    fn neg(&self) -> Self {
        self.neg_ref()
    }
    fn scale(&self, k: &Q) -> Self {
        RationalExpr::scale(self, k)
    }
    fn diff(&self, var: usize) -> Self {
        RationalExpr::diff(self, var)
    }
    fn is_zero(&self) -> bool {
        RationalExpr::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        self.recip().ok()
    }
    fn eval_q(&self, x: &[Q]) -> Result<Q, ExprError> {
        self.evaluate(x)
    }
    fn eval_f64(&self, x: &[f64]) -> f64 {
        RationalExpr::eval_f64(self, x)
    }
}

impl Scalar for Series {
    fn zero() -> Self {
        Series::zero()
    }
    fn from_q(q: &Q) -> Self {
        Series::constant(q.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self.add_ref(o)
    }
    fn sub(&self, o: &Self) -> Self {
        self.sub_ref(o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_ref(o)
    }
    fn neg(&self) -> Self {
        self.neg_ref()
    }
    fn scale(&self, k: &Q) -> Self {
        Series::scale(self, k)
    }
    fn diff(&self, var: usize) -> Self {
        Series::diff(self, var)
    }
    fn is_zero(&self) -> bool {
        Series::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        Series::try_inv(self)
    }
    fn eval_q(&self, x: &[Q]) -> Result<Q, ExprError> {
        Ok(self.eval_local(x))
    }
    fn eval_f64(&self, x: &[f64]) -> f64 {
        self.eval_local_f64(x)
    }
    fn truncate(&self, order: i32) -> Self {
        self.with_precision(order)
    }
}
