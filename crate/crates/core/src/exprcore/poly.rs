//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept sorted in strictly decreasing graded-lex order with no zero
//! coefficients, so structural equality is value equality.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::Q;

/// Largest number of chart coordinates supported by the fixed-width monomials.
pub const MAX_VARS: usize = 8;

/// Exponent vector `x1^e1 ... xn^en`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(i: usize) -> Self {
        let mut m = Self::default();
        m.exps[i] = 1;
        m
    }

    pub fn from_exps(e: &[u16]) -> Self {
        assert!(e.len() <= MAX_VARS, "too many variables");
        let mut m = Self::default();
        m.exps[..e.len()].copy_from_slice(e);
        m
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u16 {
        self.exps[i]
    }

    #[inline]
    pub fn exps(&self) -> &[u16; MAX_VARS] {
        &self.exps
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.exps[i] = m.exps[i]
                .checked_add(o.exps[i])
                .expect("monomial exponent overflow");
        }
        m
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exps[i] <= o.exps[i])
    }

    /// `self / o`, assuming `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.exps[i] -= o.exps[i];
        }
        m
    }

    pub fn gcd(&self, o: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.exps[i] = m.exps[i].min(o.exps[i]);
        }
        m
    }

    pub fn with_exp(&self, i: usize, e: u16) -> Monomial {
        let mut m = *self;
        m.exps[i] = e;
        m
    }

    /// Index one past the highest variable that occurs.
    pub fn nvars(&self) -> usize {
        self.exps
            .iter()
            .rposition(|&e| e != 0)
            .map_or(0, |p| p + 1)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.iter().rev().cmp(other.exps.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.exps[..self.nvars()])
    }
}

/// A polynomial over the rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    // Strictly decreasing monomials, nonzero coefficients.
    terms: Vec<(Monomial, Q)>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Q::from_integer(BigInt::from(c)))
    }

    pub fn var(i: usize) -> Self {
        Self {
            terms: vec![(Monomial::var(i), Q::one())],
        }
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(it: I) -> Self {
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (m, c) in it {
            *acc.entry(m).or_insert_with(Q::zero) += c;
        }
        Self::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, Q>) -> Self {
        let mut terms: Vec<(Monomial, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Self { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Q)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant term.
    pub fn constant_term(&self) -> Q {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => Q::zero(),
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, Q)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> Q {
        self.terms.first().map_or_else(Q::zero, |t| t.1.clone())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.0.degree())
    }

    pub fn degree_in(&self, v: usize) -> u16 {
        self.terms.iter().map(|t| t.0.exp(v)).max().unwrap_or(0)
    }

    pub fn nvars(&self) -> usize {
        self.terms.iter().map(|t| t.0.nvars()).max().unwrap_or(0)
    }

    pub fn has_var(&self, v: usize) -> bool {
        self.terms.iter().any(|t| t.0.exp(v) > 0)
    }

    /// Gcd of all monomials occurring.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(first.0, |g, t| g.gcd(&t.0)),
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c * k)).collect(),
        }
    }

    /// Divides every monomial by `mono`, which must divide all of them.
    pub fn div_monomial(&self, mono: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.div(mono), c.clone())).collect(),
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.merge(o, false)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.merge(o, true)
    }

    fn merge(&self, o: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &o.terms;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        Poly { terms: out }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        self.mul_bounded(o, None)
    }

    /// Product keeping only terms of total degree `<= max_degree`.
    ///
    /// Coefficients are scaled to integers so the inner loop avoids
    /// per-product gcds; each output coefficient is reduced once.
    pub fn mul_bounded(&self, o: &Poly, max_degree: Option<u32>) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let keep = |d: u32| max_degree.is_none_or(|m| d <= m);
        if self.terms.len() == 1 || o.terms.len() == 1 {
            let (single, other) = if self.terms.len() == 1 { (self, o) } else { (o, self) };
            let (m, c) = &single.terms[0];
            let terms = other
                .terms
                .iter()
                .filter(|(mo, _)| keep(mo.degree() + m.degree()))
                .map(|(mo, x)| (mo.mul(m), x * c))
                .collect();
            return Poly { terms };
        }
        let integral = |p: &Poly| -> (BigInt, Vec<(Monomial, u32, BigInt)>) {
            let l = p.denominator_lcm();
            let v = p
                .terms
                .iter()
                .map(|(m, c)| (*m, m.degree(), c.numer() * (&l / c.denom())))
                .collect();
            (l, v)
        };
        let (la, a) = integral(self);
        let (lb, mut b) = integral(o);
        // Ascending degree lets the inner loop stop early.
        b.reverse();
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(a.len() * b.len());
        for (ma, da, ca) in &a {
            for (mb, db, cb) in &b {
                if !keep(da + db) {
                    break;
                }
                let p = ca * cb;
                match acc.get_mut(&ma.mul(mb)) {
                    Some(v) => *v += p,
                    None => {
                        acc.insert(ma.mul(mb), p);
                    }
                }
            }
        }
        let den = la * lb;
        let map = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(m, v)| (m, Q::new(v, den.clone())))
            .collect();
        Poly::from_map(map)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Partial derivative with respect to variable `v`.
    pub fn diff(&self, v: usize) -> Poly {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e > 0 {
                terms.push((m.with_exp(v, e - 1), c * Q::from_integer(BigInt::from(e))));
            }
        }
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    let x = point
                        .get(i)
                        .unwrap_or_else(|| panic!("point has no coordinate for x{}", i + 1));
                    t *= pow_q(x, e as u32);
                }
            }
            total += t;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = q_to_f64(c);
                for (i, &e) in m.exps().iter().enumerate() {
                    if e > 0 {
                        t *= point[i].powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Substitutes `x_i -> point_i + x_i` for every variable.
    pub fn shift(&self, point: &[Q]) -> Poly {
        if point.iter().all(|q| q.is_zero()) {
            return self.clone();
        }
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (m, c) in &self.terms {
            // Expand prod_i (p_i + x_i)^{e_i}.
            let mut partial: Vec<(Monomial, Q)> = vec![(Monomial::one(), c.clone())];
            for i in 0..m.nvars() {
                let e = m.exp(i);
                if e == 0 {
                    continue;
                }
                let p = point.get(i).cloned().unwrap_or_else(Q::zero);
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for k in 0..=e {
                    // C(e,k) p^{e-k} x_i^k
                    let coef = binomial(e as u64, k as u64) * pow_q(&p, (e - k) as u32);
                    if coef.is_zero() {
                        continue;
                    }
                    for (pm, pc) in &partial {
                        next.push((pm.with_exp(i, k), pc * &coef));
                    }
                }
                partial = next;
            }
            for (pm, pc) in partial {
                *acc.entry(pm).or_insert_with(Q::zero) += pc;
            }
        }
        Poly::from_map(acc)
    }

    /// Coefficients with respect to variable `v`, indexed by power of `v`.
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Q)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            buckets[m.exp(v) as usize].push((m.with_exp(v, 0), c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut t| {
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Poly { terms: t }
            })
            .collect()
    }

    /// Inverse of [`Poly::coeffs_in`].
    pub fn from_coeffs_in(v: usize, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            for (m, q) in &c.terms {
                debug_assert_eq!(m.exp(v), 0);
                terms.push((m.with_exp(v, k as u16), q.clone()));
            }
        }
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let inv = dc.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !dm.divides(m) {
                    return None;
                }
                terms.push((m.div(dm), c * &inv));
            }
            return Some(Poly { terms });
        }
        if self.total_degree() < d.total_degree() {
            return None;
        }
        for v in 0..MAX_VARS {
            if self.degree_in(v) < d.degree_in(v) {
                return None;
            }
        }
        let (dm, dc) = d.terms[0].clone();
        let inv = dc.recip();
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.terms.first().cloned() {
            if !dm.divides(&rm) {
                return None;
            }
            let qm = rm.div(&dm);
            let qc = &rc * &inv;
            rem = rem.sub(&d.mul_monomial(&qm, &qc));
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.terms.first() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Polynomial obtained by substituting rational values for every variable
    /// except `keep`, returned as dense univariate coefficients (low to high).
    pub fn univariate_image(&self, keep: usize, values: &[Q]) -> Vec<Q> {
        let deg = self.degree_in(keep) as usize;
        let mut out = vec![Q::zero(); deg + 1];
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..m.nvars() {
                if i == keep {
                    continue;
                }
                let e = m.exp(i);
                if e > 0 {
                    t *= pow_q(&values[i], e as u32);
                }
            }
            out[m.exp(keep) as usize] += t;
        }
        out
    }

    /// Lcm of coefficient denominators, useful for clearing fractions.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.terms
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            let c = a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

pub fn pow_q(x: &Q, e: u32) -> Q {
    num_traits::pow::pow(x.clone(), e as usize)
}

pub fn binomial(n: u64, k: u64) -> Q {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Q::from_integer(r)
}

pub fn q_to_f64(q: &Q) -> f64 {
    use num_traits::ToPrimitive;
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large numerator or denominator: scale down both.
            let nb = q.numer().bits() as i64;
            let db = q.denom().bits() as i64;
            let shift = (nb.max(db) - 1000).max(0) as usize;
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                if q.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            } else {
                n / d
            }
        }
    }
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_q(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn write_poly(
    f: &mut fmt::Formatter<'_>,
    p: &Poly,
    names: Option<&[String]>,
) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (k, (m, c)) in p.terms.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let mut factors: Vec<String> = Vec::new();
        if !abs.is_one() || m.is_one() {
            factors.push(fmt_q(&abs));
        }
        for i in 0..m.nvars() {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let name = match names {
                Some(n) if i < n.len() => n[i].clone(),
                _ => format!("x{}", i + 1),
            };
            if e == 1 {
                factors.push(name);
            } else {
                factors.push(format!("{}^{}", name, e));
            }
        }
        write!(f, "{}", factors.join("*"))?;
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self, None)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}
