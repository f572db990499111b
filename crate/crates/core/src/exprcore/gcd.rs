//! Multivariate polynomial gcd over the rationals.
//!
//! Layered: monomial content and divisibility shortcuts, then a coprimality
//! proof from univariate images, and finally a recursive primitive
//! pseudo-remainder sequence. All results are monic (or zero).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{Poly, MAX_VARS};
use super::Q;

/// Monic gcd of `a` and `b`; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a1 = a.div_monomial(&ma);
    let b1 = b.div_monomial(&mb);
    let core = gcd_no_monomial(&a1, &b1);
    core.mul_monomial(&mg, &Q::one()).monic()
}

fn gcd_no_monomial(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if let Some(g) = divisibility_shortcut(a, b) {
        return g;
    }
    if provably_coprime(a, b) {
        return Poly::one();
    }
    gcd_prs(a, b)
}

fn divisibility_shortcut(a: &Poly, b: &Poly) -> Option<Poly> {
    if a.total_degree() >= b.total_degree() {
        if a.div_exact(b).is_some() {
            return Some(b.monic());
        }
    } else if b.div_exact(a).is_some() {
        return Some(a.monic());
    }
    None
}

/// Evaluation values for the non-kept variables; deterministic per attempt.
fn eval_point(attempt: usize) -> Vec<Q> {
    const PRIMES: [i64; 16] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59];
    (0..MAX_VARS)
        .map(|i| {
            let k = PRIMES[(i + 3 * attempt) % PRIMES.len()] + attempt as i64;
            Q::new(BigInt::from(k), BigInt::from(1 + (i as i64 + attempt as i64) % 3))
        })
        .collect()
}

/// Proves `gcd(a, b)` is constant when possible.
///
/// For each variable `v`, evaluating the other variables at a point where the
/// leading coefficients in `v` do not vanish gives univariate images whose gcd
/// degree bounds the `v`-degree of the true gcd from above.
fn provably_coprime(a: &Poly, b: &Poly) -> bool {
    let nv = a.nvars().max(b.nvars());
    for v in 0..nv {
        let da = a.degree_in(v);
        let db = b.degree_in(v);
        if da == 0 || db == 0 {
            continue;
        }
        let lca = a.coeffs_in(v).pop().unwrap();
        let lcb = b.coeffs_in(v).pop().unwrap();
        let mut proved = false;
        for attempt in 0..4 {
            let pt = eval_point(attempt);
            if lca.eval(&pt).is_zero() || lcb.eval(&pt).is_zero() {
                continue;
            }
            let ia = a.univariate_image(v, &pt);
            let ib = b.univariate_image(v, &pt);
            if univariate_gcd_degree(ia, ib) == 0 {
                proved = true;
            }
            break;
        }
        if !proved {
            return false;
        }
    }
    true
}

fn trim(p: &mut Vec<Q>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn univariate_gcd_degree(mut a: Vec<Q>, mut b: Vec<Q>) -> usize {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 && b[0].is_zero() {
            return a.len() - 1;
        }
        if b.len() == 1 {
            return 0;
        }
        // a mod b
        let lb = b.last().unwrap().clone();
        while a.len() >= b.len() && !(a.len() == 1 && a[0].is_zero()) {
            let la = a.last().unwrap().clone();
            let k = &la / &lb;
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[i + shift] -= &k * c;
            }
            a.pop();
            trim(&mut a);
            if a.is_empty() {
                a.push(Q::zero());
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
}

/// Recursive primitive PRS gcd.
fn gcd_prs(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if let Some(g) = divisibility_shortcut(a, b) {
        return g;
    }
    let nv = a.nvars().max(b.nvars());
    let v = (0..nv).rev().find(|&v| a.has_var(v) || b.has_var(v)).unwrap();
    if !a.has_var(v) {
        return gcd(a, &content_in(b, v));
    }
    if !b.has_var(v) {
        return gcd(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd(&ca, &cb);
    let mut r0 = a.div_exact(&ca).expect("content divides");
    let mut r1 = b.div_exact(&cb).expect("content divides");
    if r0.degree_in(v) < r1.degree_in(v) {
        std::mem::swap(&mut r0, &mut r1);
    }
    let g = loop {
        let r = pseudo_rem(&r0, &r1, v);
        if r.is_zero() {
            break r1;
        }
        if r.degree_in(v) == 0 {
            break Poly::one();
        }
        r0 = r1;
        r1 = primitive_part_in(&r, v);
    };
    let g = if g.is_constant() {
        g
    } else {
        primitive_part_in(&g, v)
    };
    c.mul(&g).monic()
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content_in(p: &Poly, v: usize) -> Poly {
    let coeffs = p.coeffs_in(v);
    let mut g = Poly::zero();
    for c in coeffs.iter().rev() {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

fn primitive_part_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    p.div_exact(&c).expect("content divides").monic()
}

/// Pseudo-remainder of `a` by `b` with respect to variable `v`.
fn pseudo_rem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let mut r = a.coeffs_in(v);
    let bc = b.coeffs_in(v);
    let db = bc.len() - 1;
    let lb = bc[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        // r <- lb * r - lr * v^{dr-db} * b
        for c in r.iter_mut() {
            *c = c.mul(&lb);
        }
        let shift = dr - db;
        for (i, c) in bc.iter().enumerate() {
            r[i + shift] = r[i + shift].sub(&lr.mul(c));
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        while r.len() > 1 && r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        // Keep coefficient growth in check.
        let rp = Poly::from_coeffs_in(v, &r);
        if rp.is_zero() {
            return rp;
        }
        let lcm = rp.denominator_lcm();
        let scaled = if lcm.is_one() { rp } else { rp.scale(&Q::from_integer(lcm)) };
        let icont = integer_content(&scaled);
        let scaled = scaled.scale(&Q::new(BigInt::one(), icont));
        r = scaled.coeffs_in(v);
        if r.len() <= db {
            break;
        }
    }
    Poly::from_coeffs_in(v, &r)
}

fn integer_content(p: &Poly) -> BigInt {
    use num_integer::Integer;
    let g = p
        .terms()
        .iter()
        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()));
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}
