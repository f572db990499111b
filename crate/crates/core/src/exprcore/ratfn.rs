//! Canonical rational functions `numerator / denominator`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{write_poly, Poly};
use super::{ExprError, Q};

/// An exact multivariate rational function over ℚ in canonical form.
///
/// The numerator and denominator share no nonconstant factor and the
/// denominator is monic in graded-lex order, so two values are equal exactly
/// when their representations are.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalExpr {
    num: Poly,
    den: Poly,
}

impl Default for RationalExpr {
    fn default() -> Self {
        Self::zero()
    }
}

impl RationalExpr {
    pub fn zero() -> Self {
        Self {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(q: Q) -> Self {
        Self {
            num: Poly::constant(q),
            den: Poly::one(),
        }
    }

    pub fn int(k: i64) -> Self {
        Self::from_poly(Poly::from_int(k))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::constant(Q::new(n.into(), d.into()))
    }

    /// Coordinate function `x_{i+1}` (zero-based index).
    pub fn var(i: usize) -> Self {
        Self::from_poly(Poly::var(i))
    }

    pub fn from_poly(p: Poly) -> Self {
        Self {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds `num / den` and canonicalizes.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_constant() {
            let c = den.constant_term();
            return Self {
                num: if c.is_one() { num } else { num.scale(&c.recip()) },
                den: Poly::one(),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Self::normalize_den(num, den)
    }

    fn normalize_den(num: Poly, den: Poly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            Self { num, den }
        } else {
            let inv = lc.recip();
            Self {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    /// The value if this is a constant.
    pub fn as_constant(&self) -> Option<Q> {
        self.is_constant().then(|| self.num.constant_term())
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(self.num.add(&o.num));
        }
        if self.den == o.den {
            return Self::canonical(self.num.add(&o.num), self.den.clone());
        }
        if o.den.is_one() {
            return Self::add_poly(self, &o.num);
        }
        if self.den.is_one() {
            return Self::add_poly(o, &self.num);
        }
        let g = gcd(&self.den, &o.den);
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        let d2 = o.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d2).add(&o.num.mul(&d1));
        let den = self.den.mul(&d2);
        if g.is_one() {
            // Coprime denominators: any common factor of num and den must
            // divide g, which is trivial.
            return Self::normalize_den(num, den);
        }
        Self::canonical(num, den)
    }

    // a/b + p with gcd(a, b) = 1 stays reduced.
    fn add_poly(r: &Self, p: &Poly) -> Self {
        let num = r.num.add(&p.mul(&r.den));
        if num.is_zero() {
            return Self::zero();
        }
        Self {
            num,
            den: r.den.clone(),
        }
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        self.add_ref(&o.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        Self {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(self.num.mul(&o.num));
        }
        // Cross-cancel; the product of the reduced parts is reduced.
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = o.den.div_exact(&g1).expect("gcd divides");
        let n2 = o.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        Self::normalize_den(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Result<Self, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Self::normalize_den(self.den.clone(), self.num.clone()))
    }

    pub fn div_ref(&self, o: &Self) -> Result<Self, ExprError> {
        Ok(self.mul_ref(&o.recip()?))
    }

    pub fn pow(&self, e: i32) -> Result<Self, ExprError> {
        if e >= 0 {
            Ok(Self {
                num: self.num.pow(e as u32),
                den: self.den.pow(e as u32),
            }
            .renormalized())
        } else {
            self.recip()?.pow(-e)
        }
    }

    fn renormalized(self) -> Self {
        Self::normalize_den(self.num, self.den)
    }

    /// Exact partial derivative in variable `k` (zero-based).
    pub fn diff(&self, k: usize) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.diff(k));
        }
        let dn = self.num.diff(k);
        let dd = self.den.diff(k);
        if dd.is_zero() {
            return Self::canonical(dn, self.den.clone());
        }
        // (n' d - n d') / d^2, reducing by the part of d that survives.
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        if num.is_zero() {
            return Self::zero();
        }
        let g = gcd(&num, &self.den);
        let num = num.div_exact(&g).expect("gcd divides");
        let d_over_g = self.den.div_exact(&g).expect("gcd divides");
        // Remaining denominator d * (d/g); num is coprime to d/g but may
        // still share factors with d.
        let g2 = gcd(&num, &self.den);
        let num = num.div_exact(&g2).expect("gcd divides");
        let first = self.den.div_exact(&g2).expect("gcd divides");
        Self::normalize_den(num, first.mul(&d_over_g))
    }

    /// Exact value at a rational point.
    pub fn evaluate(&self, p: &[Q]) -> Result<Q, ExprError> {
        let d = self.den.eval(p);
        if d.is_zero() {
            return Err(ExprError::Pole);
        }
        Ok(self.num.eval(p) / d)
    }

    pub fn eval_f64(&self, p: &[f64]) -> f64 {
        self.num.eval_f64(p) / self.den.eval_f64(p)
    }

    /// Highest variable index (exclusive) occurring.
    pub fn nvars(&self) -> usize {
        self.num.nvars().max(self.den.nvars())
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> NamedExpr<'a> {
        NamedExpr { expr: self, names }
    }
}

/// Display adapter using custom variable names.
pub struct NamedExpr<'a> {
    expr: &'a RationalExpr,
    names: &'a [String],
}

impl fmt::Display for NamedExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, Some(self.names))
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &RationalExpr, names: Option<&[String]>) -> fmt::Result {
    if e.den.is_one() {
        return write_poly(f, &e.num, names);
    }
    let wrap_num = e.num.len() > 1;
    if wrap_num {
        write!(f, "(")?;
    }
    write_poly(f, &e.num, names)?;
    if wrap_num {
        write!(f, ")")?;
    }
    write!(f, "/(")?;
    write_poly(f, &e.den, names)?;
    write!(f, ")")
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, None)
    }
}

impl fmt::Debug for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl From<Poly> for RationalExpr {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl From<i64> for RationalExpr {
    fn from(k: i64) -> Self {
        Self::int(k)
    }
}

impl Zero for RationalExpr {
    fn zero() -> Self {
        RationalExpr::zero()
    }
    fn is_zero(&self) -> bool {
        RationalExpr::is_zero(self)
    }
}

impl One for RationalExpr {
    fn one() -> Self {
        RationalExpr::one()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&RationalExpr> for &RationalExpr {
            type Output = RationalExpr;
            fn $m(self, o: &RationalExpr) -> RationalExpr {
                self.$inner(o)
            }
        }
        impl $tr<RationalExpr> for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, o: RationalExpr) -> RationalExpr {
                (&self).$inner(&o)
            }
        }
        impl $tr<&RationalExpr> for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, o: &RationalExpr) -> RationalExpr {
                (&self).$inner(o)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Div<&RationalExpr> for &RationalExpr {
    type Output = RationalExpr;
    /// Panics on division by the zero function; use [`RationalExpr::div_ref`]
    /// for a fallible version.
    fn div(self, o: &RationalExpr) -> RationalExpr {
        self.div_ref(o).expect("division by zero rational function")
    }
}

impl Div<RationalExpr> for RationalExpr {
    type Output = RationalExpr;
    fn div(self, o: RationalExpr) -> RationalExpr {
        &self / &o
    }
}

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        self.neg_ref()
    }
}

impl Neg for RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        self.neg_ref()
    }
}
