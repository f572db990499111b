#![allow(dead_code)]

use projmetric::exprcore::{q, Poly, RationalExpr as R, Q};
use projmetric::projconn::AffineConnection;
use projmetric::tensorfield::{Down, TensorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn x(i: usize) -> R {
    R::var(i)
}

pub fn r2(n: usize) -> R {
    (0..n).fold(R::zero(), |acc, i| &acc + &(&x(i) * &x(i)))
}

/// Random polynomial in `n` variables of total degree `<= deg` with
/// coefficients `k/den`, `|k| <= kmax`.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, deg: u32, kmax: i64, den: i64) -> R {
    let mut terms = Vec::new();
    let mut exps = vec![0u16; n];
    loop {
        let d: u32 = exps.iter().map(|&e| e as u32).sum();
        if d <= deg {
            let k = rng.gen_range(-kmax..=kmax);
            if k != 0 {
                terms.push((projmetric::exprcore::Monomial::from_exps(&exps), q(k, den)));
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return R::from_poly(Poly::from_terms(terms));
            }
            exps[i] += 1;
            if exps[i] as u32 <= deg {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

/// Random torsion-free connection with polynomial Christoffel symbols.
pub fn random_connection(rng: &mut ChaCha8Rng, n: usize, deg: u32) -> AffineConnection {
    AffineConnection::from_fn(n, |_, _, _| random_poly(rng, n, deg, 2, 1))
}

/// Random special connection with zero Christoffel trace.
pub fn random_special(rng: &mut ChaCha8Rng, n: usize, deg: u32) -> AffineConnection {
    let c = random_connection(rng, n, deg);
    let k = q(-1, n as i64 + 1);
    let u: Vec<R> = c.trace().iter().map(|t| t.scale(&k)).collect();
    c.projective_change(&u)
}

pub fn gradient(f: &R, n: usize) -> Vec<R> {
    (0..n).map(|a| f.diff(a)).collect()
}

/// Klein model: `Γ^c_{ab} = (δ_a^c x_b + δ_b^c x_a)/(1 − |x|²)`.
pub fn klein_connection(n: usize) -> AffineConnection {
    let den = &R::one() - &r2(n);
    AffineConnection::from_fn(n, |c, a, b| {
        let mut v = R::zero();
        if a == c {
            v = &v + &x(b);
        }
        if b == c {
            v = &v + &x(a);
        }
        &v / &den
    })
}

/// `g_ab = δ_ab/(1 − r²) + x_a x_b/(1 − r²)²`.
pub fn klein_metric(n: usize) -> TensorField {
    let den = &R::one() - &r2(n);
    TensorField::from_fn(n, &[Down, Down], |i| {
        let mut v = &(&x(i[0]) * &x(i[1])) / &(&den * &den);
        if i[0] == i[1] {
            v = &v + &(&R::one() / &den);
        }
        v
    })
}

/// Stereographic sphere `g_ab = 4δ_ab/(1 + r²)²`.
pub fn sphere_metric(n: usize) -> TensorField {
    let den = &R::one() + &r2(n);
    let conf = &R::int(4) / &(&den * &den);
    TensorField::from_fn(n, &[Down, Down], |i| if i[0] == i[1] { conf.clone() } else { R::zero() })
}

pub fn sphere_connection(n: usize) -> AffineConnection {
    let den = &R::one() + &r2(n);
    AffineConnection::from_fn(n, |c, a, b| {
        let mut v = R::zero();
        if a == c {
            v = &v + &x(b);
        }
        if b == c {
            v = &v + &x(a);
        }
        if a == b {
            v = &v - &x(c);
        }
        &(&v * &R::int(-2)) / &den
    })
}

pub fn qv(v: &[(i64, i64)]) -> Vec<Q> {
    v.iter().map(|&(a, b)| q(a, b)).collect()
}

/// Residual lower bound of the least-squares oracle for the corrected
/// non-metrizable witness, as archived in `tests/data`.
pub fn witness_oracle_bound() -> f64 {
    let text = include_str!("../data/witness_oracle.json");
    let v: serde_json::Value = serde_json::from_str(text).expect("valid archive");
    v["min_singular_value"].as_f64().expect("bound is a number")
}
