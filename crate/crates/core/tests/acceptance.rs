//! Acceptance criteria. Prints one line per criterion and exits nonzero if
//! any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::*;
use num_traits::Zero;
use projmetric::cli::pipeline::sample_points;
use projmetric::cli::spec::{ConnectionSpec, SpecOptions};
use projmetric::cli::{run_analysis, AnalysisOptions, Verdict};
use projmetric::exprcore::{default_vars, q, qi, RationalExpr as R, Q};
use projmetric::metricize::{constant_curvature_check, levi_civita, reconstruct_metric};
use projmetric::mobility::degree_of_mobility;
use projmetric::mobility::linalg::span_basis;
use projmetric::projconn::AffineConnection;
use projmetric::tensorfield::{Down, TensorField, Up};
use projmetric::tractor::{mu_slot, rho_slot, sigma_slot, slot_count, tractor_transform, TractorConnection, TractorSection};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn spec_for(c: AffineConnection, base: Vec<Q>) -> ConnectionSpec {
    let n = c.dim();
    ConnectionSpec {
        dimension: n,
        variables: default_vars(n),
        connection: c,
        base_point: base,
        options: SpecOptions::default(),
    }
}

fn zero_point(n: usize) -> Vec<Q> {
    vec![Q::zero(); n]
}

/// Slot polynomials of a section keyed by `(slot, exponents)`.
fn coefficients(s: &TractorSection<R>) -> BTreeMap<(usize, Vec<u16>), Q> {
    let mut out = BTreeMap::new();
    for (k, e) in s.slots().iter().enumerate() {
        assert!(e.is_polynomial());
        for (m, c) in e.numerator().terms() {
            out.insert((k, m.exps().to_vec()), c.clone());
        }
    }
    out
}

/// Flat-space solution `σ = s + xm + mx + rxx`, `μ = m + rx`, `ρ = r` for the
/// parameters `(s, m, r)` laid out like a tractor section.
fn flat_general_solution(n: usize, params: &[Q]) -> TractorSection<R> {
    let s = |b: usize, c: usize| R::constant(params[sigma_slot(n, b.min(c), b.max(c))].clone());
    let m: Vec<R> = (0..n).map(|b| R::constant(params[mu_slot(n, b)].clone())).collect();
    let r = R::constant(params[rho_slot(n)].clone());
    TractorSection::from_parts(
        n,
        |b, c| &(&(&s(b, c) + &(&x(b) * &m[c])) + &(&x(c) * &m[b])) + &(&r * &(&x(b) * &x(c))),
        (0..n).map(|b| &m[b] + &(&r * &x(b))).collect(),
        r.clone(),
    )
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (n, expected) in [(2, 6), (3, 10)] {
        let p: Vec<Q> = (0..n).map(|i| q(i as i64 + 1, 3 * (i as i64 + 2))).collect();
        let j = degree_of_mobility(&AffineConnection::flat(n), &p, 6).unwrap();
        let jets: Vec<_> = (0..j.dimension()).map(|i| coefficients(&j.section(i))).collect();
        let family: Vec<_> = (0..slot_count(n))
            .map(|k| {
                let mut e = vec![Q::zero(); slot_count(n)];
                e[k] = qi(1);
                coefficients(&flat_general_solution(n, &e))
            })
            .collect();
        let keys: BTreeSet<_> = jets.iter().chain(&family).flat_map(|m| m.keys().cloned()).collect();
        let vec_of = |m: &BTreeMap<(usize, Vec<u16>), Q>| -> Vec<Q> { keys.iter().map(|k| m.get(k).cloned().unwrap_or_else(Q::zero)).collect() };
        let jv: Vec<_> = jets.iter().map(vec_of).collect();
        let fv: Vec<_> = family.iter().map(vec_of).collect();
        let all: Vec<_> = jv.iter().chain(&fv).cloned().collect();
        let (rj, rf, ru) = (span_basis(&jv, keys.len()).len(), span_basis(&fv, keys.len()).len(), span_basis(&all, keys.len()).len());
        let ok = j.dimension() == expected && j.stabilized && rj == expected && rf == expected && ru == expected;
        pass &= ok;
        notes.push(format!("n={n}: mobility {} (bound {expected}), span ranks jets/family/union {rj}/{rf}/{ru}", j.dimension()));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_2() -> Outcome {
    let mut g = rng(20);
    let mut checked = 0;
    let mut failures = Vec::new();
    for draw in 0..20 {
        let n = 2 + draw % 2;
        let mut params = vec![Q::zero(); slot_count(n)];
        // s = LLᵀ + I with small rational L keeps σ positive definite at 0.
        let l: Vec<Vec<Q>> = (0..n).map(|_| (0..n).map(|_| q(g.gen_range(-2..=2), 4)).collect()).collect();
        for b in 0..n {
            for c in b..n {
                let mut v: Q = (0..n).map(|k| &l[b][k] * &l[c][k]).sum();
                if b == c {
                    v += qi(1);
                }
                params[sigma_slot(n, b, c)] = v;
            }
            params[mu_slot(n, b)] = q(g.gen_range(-2..=2), 4);
        }
        params[rho_slot(n)] = q(g.gen_range(-2..=2), 4);
        let sol = flat_general_solution(n, &params);
        let sigma: Vec<Vec<R>> = (0..n).map(|b| (0..n).map(|c| sol.sigma(b.min(c), b.max(c)).clone()).collect()).collect();
        let flat = AffineConnection::flat(n);
        let p = zero_point(n);
        let ok = match reconstruct_metric(&sigma, &flat, &p) {
            Ok(m) if m.definite => match constant_curvature_check(&m.g_down, &sample_points(&p, 4)) {
                Ok(chk) => chk.constant && chk.deviation.is_zero(),
                Err(_) => false,
            },
            _ => false,
        };
        checked += 1;
        if !ok {
            failures.push(draw);
        }
    }
    outcome(failures.is_empty(), format!("{checked} draws, exact constant curvature; failures {failures:?}"))
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let models: [(&str, usize, AffineConnection, f64); 4] = [
        ("Klein", 2, klein_connection(2), -1.0),
        ("Klein", 3, klein_connection(3), -1.0),
        ("sphere", 2, sphere_connection(2), 1.0),
        ("sphere", 3, sphere_connection(3), 1.0),
    ];
    for (name, n, c, target) in models {
        let special = c.specialize().unwrap().connection;
        let flat = TractorConnection::tampered(&special).unwrap().curvature().is_zero();
        let spec = spec_for(c, zero_point(n));
        let report = run_analysis(&spec, &AnalysisOptions::resolve(&spec, None, None, None)).unwrap();
        let mobility = report.mobility.as_ref().map_or(0, |m| m.dimension);
        let best = report
            .metrics
            .iter()
            .filter(|m| m.constant_curvature == Some(true))
            .filter_map(|m| m.kappa_normalized)
            .map(|k| (k - target).abs())
            .fold(f64::INFINITY, f64::min);
        let ok = flat && mobility == (n + 1) * (n + 2) / 2 && best <= 1e-9;
        pass &= ok;
        notes.push(format!("{name}{n}: curvature zero {flat}, mobility {mobility}, |κ−({target})| {best:.1e}"));
    }
    outcome(pass, notes.join("; "))
}

/// `δ + E` with `E` symmetric of degree ≤ 2 and coefficients in `{0, ±1/4}`.
fn random_metric(g: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<Vec<R>> {
    let mut m = vec![vec![R::zero(); n]; n];
    for a in 0..n {
        for b in a..n {
            let mut e = random_poly(g, n, 2, 1, 4);
            if a == b {
                e = &e + &R::one();
            }
            m[a][b] = e.clone();
            m[b][a] = e;
        }
    }
    m
}

fn criterion_4() -> Outcome {
    let mut g = rng(4);
    let mut notes = Vec::new();
    let mut pass = true;
    for n in [2, 3] {
        let mut worst: f64 = 0.0;
        let mut bad = Vec::new();
        for k in 0..10 {
            let gd = random_metric(&mut g, n);
            let c = levi_civita(&gd).unwrap();
            let spec = spec_for(c, zero_point(n));
            let opts = AnalysisOptions::resolve(&spec, None, Some(10), None);
            let report = run_analysis(&spec, &opts).unwrap();
            let ok = match (&report.verdict, &report.verification) {
                (Verdict::Metrizable, Some(v)) => {
                    worst = worst.max(v.geodesic_defect);
                    v.levi_civita && v.representation != "series" && v.geodesic_defect < 1e-6
                }
                _ => false,
            };
            if !ok {
                bad.push(k);
            }
        }
        pass &= bad.is_empty();
        notes.push(format!("n={n}: 10 metrics, exact Υ, max defect {worst:.1e}, failures {bad:?}"));
    }
    outcome(pass, notes.join("; "))
}

fn random_sigma(g: &mut rand_chacha::ChaCha8Rng, n: usize) -> TensorField {
    let mut s = TensorField::zeros(n, &[Up, Up]);
    for b in 0..n {
        for c in b..n {
            let e = random_poly(g, n, 1, 2, 1);
            s.set(&[b, c], e.clone());
            s.set(&[c, b], e);
        }
    }
    s.with_weight(-2)
}

/// Correction terms `(0, W_ac^b_dσ^{cd}, 4Y_abcσ^{bc})` for each `a`.
fn correction(d: &projmetric::projconn::ProjectiveData, s: &TensorField) -> Vec<TractorSection<R>> {
    let n = s.dim();
    (0..n)
        .map(|a| {
            let mu: Vec<R> = (0..n)
                .map(|b| {
                    let mut acc = R::zero();
                    for c in 0..n {
                        for e in 0..n {
                            acc = &acc + &(d.weyl.get(&[a, c, b, e]) * s.get(&[c, e]));
                        }
                    }
                    acc
                })
                .collect();
            let mut rho = R::zero();
            for b in 0..n {
                for c in 0..n {
                    rho = &rho + &(d.cotton_york.get(&[a, b, c]) * s.get(&[b, c]));
                }
            }
            TractorSection::from_parts(n, |_, _| R::zero(), mu, &rho * &R::int(4))
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let mut g = rng(5);
    let mut counts = [0usize; 4];
    let cases = 100;
    for k in 0..cases {
        let n = 2 + k % 2;
        let c = random_special(&mut g, n, 1);
        let f = random_poly(&mut g, n, 2, 2, 3);
        let u = gradient(&f, n);
        let ch = c.projective_change(&u);
        let d = c.decompose_curvature().unwrap();
        let dh = ch.decompose_curvature().unwrap();
        if dh.weyl == d.weyl {
            counts[0] += 1;
        }
        // Ŷ_abc = Y_abc + ½Υ_eW_ab^e_c
        let yhat = TensorField::from_fn(n, &[Down, Down, Down], |i| {
            let mut acc = d.cotton_york.get(i).clone();
            for e in 0..n {
                acc = &acc + &(&(&u[e] * d.weyl.get(&[i[0], i[1], e, i[2]])) * &R::ratio(1, 2));
            }
            acc
        });
        if dh.cotton_york == yhat {
            counts[1] += 1;
        }
        let s = random_sigma(&mut g, n);
        let transported: Vec<_> = correction(&d, &s).iter().map(|t| tractor_transform(t, &u)).collect();
        if correction(&dh, &s) == transported {
            counts[2] += 1;
        }
        let lhs = ch.covariant_derivative_tagged(&s.reweight(&f)).trace_free_part().unwrap();
        let rhs = c.covariant_derivative_tagged(&s).trace_free_part().unwrap().reweight(&f);
        if lhs == rhs && lhs.tag() == rhs.tag() {
            counts[3] += 1;
        }
    }
    outcome(
        counts.iter().all(|&k| k == cases),
        format!(
            "{cases} cases: W invariant {}, Ŷ law {}, correction transform {}, trace-free operator {}",
            counts[0], counts[1], counts[2], counts[3]
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut g = rng(6);
    let mut good = 0;
    for k in 0..25 {
        let n = 2 + k % 2;
        let c = random_special(&mut g, n, 1);
        let tc = TractorConnection::tampered(&c).unwrap();
        let f = tc.curvature();
        let ok = (0..slot_count(n)).all(|slot| {
            let s = TractorSection::<R>::unit(n, slot);
            let ds = tc.derivative(&s);
            let dds: Vec<Vec<_>> = ds.iter().map(|t| tc.derivative(t)).collect();
            (0..n).all(|a| (0..n).all(|b| dds[b][a].sub(&dds[a][b]) == f.apply(a, b, &s)))
        });
        if ok {
            good += 1;
        }
    }
    outcome(good == 25, format!("{good}/25 connections agree on every slot"))
}

fn criterion_7() -> Outcome {
    let mut g = rng(7);
    let mut notes = Vec::new();
    let mut pass = true;
    for n in [3, 4] {
        let mut good = 0;
        for _ in 0..25 {
            let c = random_special(&mut g, n, 1);
            let d = c.decompose_curvature().unwrap();
            let div = c.covariant_derivative(&d.weyl).contract(0, 3).unwrap();
            let dp = c.covariant_derivative(&d.schouten);
            let k = qi(n as i64 - 2);
            let lhs = TensorField::from_fn(n, &[Down, Down, Down], |i| {
                let curl = dp.get(&[i[0], i[1], i[2]]) - dp.get(&[i[1], i[0], i[2]]);
                div.get(i) - &curl.scale(&k)
            });
            if lhs.is_zero() {
                good += 1;
            }
        }
        pass &= good == 25;
        notes.push(format!("n={n}: {good}/25 zero"));
    }
    outcome(pass, notes.join("; "))
}

/// The corrected witness `Γ^1_22 = x¹, Γ^2_11 = (x²)²`.
fn corrected_witness() -> AffineConnection {
    AffineConnection::from_fn(2, |c, a, b| match (c, a, b) {
        (0, 1, 1) => x(0),
        (1, 0, 0) => &x(1) * &x(1),
        _ => R::zero(),
    })
}

fn witness_verdict(c: AffineConnection) -> (Vec<usize>, bool, Verdict) {
    let spec = spec_for(c, zero_point(2));
    let opts = AnalysisOptions::resolve(&spec, Some(8), None, None);
    let report = run_analysis(&spec, &opts).unwrap();
    let m = report.mobility.expect("special input has a mobility report");
    (m.dims, m.stabilized, report.verdict)
}

fn criterion_8() -> (Outcome, Outcome) {
    let literal = AffineConnection::from_fn(2, |c, a, b| if (c, a, b) == (0, 1, 1) { x(0) } else { R::zero() });
    let flat = TractorConnection::tampered(&literal).unwrap().curvature().is_zero();
    let (dims, stabilized, verdict) = witness_verdict(literal);
    let ok = dims.last() == Some(&0) && stabilized && matches!(verdict, Verdict::NotMetrizableAtOrder(_));
    let first = outcome(
        ok,
        format!("literal witness Γ^1_22 = x1: tampered curvature zero {flat}, dims {dims:?}, verdict {verdict}"),
    );
    let (dims, stabilized, verdict) = witness_verdict(corrected_witness());
    let bound = common::witness_oracle_bound();
    let ok = dims.last() == Some(&0) && stabilized && matches!(verdict, Verdict::NotMetrizableAtOrder(_)) && bound > 0.0;
    let second = outcome(
        ok,
        format!("corrected witness Γ^1_22 = x1, Γ^2_11 = x2^2: dims {dims:?}, stabilized {stabilized}, verdict {verdict}, archived residual bound {bound:.3e}"),
    );
    (first, second)
}

fn criterion_9() -> Outcome {
    let mut g = rng(9);
    let mut good = 0;
    for k in 0..25 {
        let n = 2 + usize::from(k % 5 == 4);
        let c = levi_civita(&random_metric(&mut g, n)).unwrap();
        let f = random_poly(&mut g, n, 2, 2, 3);
        let input = c.projective_change(&gradient(&f, n));
        let sp = input.specialize().unwrap().connection;
        if sp.trace().iter().all(R::is_zero) && sp.beta().is_zero() {
            good += 1;
        }
    }
    let rough = random_connection(&mut g, 3, 1);
    let beta = rough.beta_form().unwrap();
    let closed = beta.d().is_zero();
    outcome(
        good == 25 && !beta.is_zero() && closed,
        format!("{good}/25 specialized with zero trace and β; non-symmetric Ricci gives β ≠ 0 {}, dβ = 0 {closed}", !beta.is_zero()),
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn main() {
    let mut rows: Vec<(String, Outcome, Duration)> = Vec::new();
    let runs: [(&str, fn() -> Outcome); 7] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
    ];
    for (id, f) in runs {
        let (o, t) = timed(f);
        rows.push((id.to_string(), o, t));
    }
    let ((lit, fixed), t) = timed(criterion_8);
    rows.push(("8".into(), lit, t));
    rows.push(("8 (corrected witness, informational)".into(), fixed, Duration::ZERO));
    let (o, t) = timed(criterion_9);
    rows.push(("9".into(), o, t));

    let mut failed = 0;
    for (id, o, t) in &rows {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let informational = id.contains("informational");
        if !o.pass && !informational {
            failed += 1;
        }
        println!("criterion {id}: {status} ({:.2}s) {}", t.as_secs_f64(), o.detail);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
