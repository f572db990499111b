mod common;

use common::*;
use projmetric::exprcore::{q, q_to_f64, RationalExpr as R, Q};
use projmetric::mobility::{degree_of_mobility, exact_solutions, parallel_transport, residual};
use projmetric::projconn::AffineConnection;
use projmetric::tractor::{rho_slot, sigma_slot, slot_count, TractorConnection, TractorSection};

fn special(c: &AffineConnection) -> AffineConnection {
    c.specialize().unwrap().connection
}

fn literal_witness() -> AffineConnection {
    AffineConnection::from_fn(2, |c, a, b| if (c, a, b) == (0, 1, 1) { x(0) } else { R::zero() })
}

fn corrected_witness() -> AffineConnection {
    AffineConnection::from_fn(2, |c, a, b| match (c, a, b) {
        (0, 1, 1) => x(0),
        (1, 0, 0) => &x(1) * &x(1),
        _ => R::zero(),
    })
}

fn f64s(v: &[Q]) -> Vec<f64> {
    v.iter().map(q_to_f64).collect()
}

#[test]
fn dimension_is_independent_of_base_point() {
    let points = [qv(&[(0, 1), (0, 1)]), qv(&[(1, 3), (-1, 5)]), qv(&[(-1, 4), (1, 2)])];
    for c in [AffineConnection::flat(2), special(&klein_connection(2))] {
        for p in &points {
            let j = degree_of_mobility(&c, p, 5).unwrap();
            assert_eq!((j.dimension(), j.stabilized), (6, true), "{p:?}");
        }
    }
    let points3 = [qv(&[(0, 1), (0, 1), (0, 1)]), qv(&[(1, 5), (0, 1), (-1, 7)]), qv(&[(1, 9), (1, 4), (1, 3)])];
    for c in [AffineConnection::flat(3), special(&klein_connection(3))] {
        for p in &points3 {
            assert_eq!(degree_of_mobility(&c, p, 4).unwrap().dimension(), 10, "{p:?}");
        }
    }
}

#[test]
fn dimension_never_increases_with_order() {
    let mut g = rng(31);
    for _ in 0..4 {
        let c = random_special(&mut g, 2, 1);
        let j = degree_of_mobility(&c, &qv(&[(1, 7), (-2, 9)]), 7).unwrap();
        assert!(j.dims.windows(2).all(|w| w[1] <= w[0]), "{:?}", j.dims);
        assert!(j.dimension() <= slot_count(2));
    }
}

#[test]
fn single_symbol_perturbation_is_projectively_flat() {
    let c = literal_witness();
    let tc = TractorConnection::tampered(&c).unwrap();
    assert!(tc.curvature().is_zero());
    let j = degree_of_mobility(&c, &qv(&[(0, 1), (0, 1)]), 8).unwrap();
    assert_eq!(j.dims, vec![6; 9]);
    // σ = ∂₁ ⊗ ∂₁ with μ = ρ = 0 is parallel.
    let s = TractorSection::from_parts(2, |b, c| if (b, c) == (0, 0) { R::one() } else { R::zero() }, vec![R::zero(); 2], R::zero());
    assert!(tc.derivative(&s).iter().all(TractorSection::is_zero));
}

#[test]
fn corrected_witness_has_no_parallel_sections() {
    let c = corrected_witness();
    assert!(!TractorConnection::tampered(&c).unwrap().curvature().is_zero());
    for p in [qv(&[(0, 1), (0, 1)]), qv(&[(1, 3), (-1, 2)])] {
        let j = degree_of_mobility(&c, &p, 8).unwrap();
        assert_eq!(j.dims.last(), Some(&0));
        assert!(j.stabilized);
        if p.iter().all(|x| *x == q(0, 1)) {
            assert_eq!(j.dims, vec![6, 6, 5, 3, 2, 1, 0, 0, 0]);
        }
    }
}

#[test]
fn flat_jets_are_exact_and_have_zero_residual() {
    let flat = AffineConnection::flat(2);
    let tc = TractorConnection::tampered(&flat).unwrap();
    let j = degree_of_mobility(&flat, &qv(&[(1, 2), (1, 3)]), 4).unwrap();
    let pts = vec![qv(&[(0, 1), (0, 1)]), qv(&[(3, 4), (-1, 2)])];
    for (i, s) in exact_solutions(&tc, &j).into_iter().enumerate() {
        let s = s.expect("flat jets are polynomial");
        assert_eq!(residual(&tc, &s, &pts).unwrap(), 0.0, "basis {i}");
    }
    assert_eq!(residual(&tc, &TractorSection::zeros(2), &pts).unwrap(), 0.0);
}

#[test]
fn residual_vanishes_at_base_point_and_decays_with_order() {
    let c = special(&sphere_connection(2));
    let tc = TractorConnection::tampered(&c).unwrap();
    let p = qv(&[(0, 1), (0, 1)]);
    let pts = vec![qv(&[(1, 4), (0, 1)]), qv(&[(-1, 8), (1, 5)]), qv(&[(0, 1), (-1, 4)])];
    let low = degree_of_mobility(&c, &p, 6).unwrap();
    let high = degree_of_mobility(&c, &p, 10).unwrap();
    assert_eq!((low.dimension(), high.dimension()), (6, 6));
    for i in 0..6 {
        assert_eq!(residual(&tc, &high.section(i), &[p.clone()]).unwrap(), 0.0);
        let (r6, r10) = (residual(&tc, &low.section(i), &pts).unwrap(), residual(&tc, &high.section(i), &pts).unwrap());
        assert!(r10 < r6 * 0.1, "basis {i}: {r6} then {r10}");
    }
    let klein = special(&klein_connection(2));
    let ktc = TractorConnection::tampered(&klein).unwrap();
    let j = degree_of_mobility(&klein, &p, 8).unwrap();
    let half = vec![qv(&[(1, 2), (0, 1)]), qv(&[(-1, 4), (1, 3)])];
    for i in 0..6 {
        assert!(residual(&ktc, &j.section(i), &half).unwrap() <= 1e-8);
    }
}

#[test]
fn transport_matches_taylor_values() {
    let cases = [
        (special(&klein_connection(2)), 8, qv(&[(1, 4), (0, 1)])),
        (special(&sphere_connection(2)), 10, qv(&[(1, 8), (1, 16)])),
    ];
    for (c, order, end) in cases {
        let tc = TractorConnection::tampered(&c).unwrap();
        let j = degree_of_mobility(&c, &qv(&[(0, 1), (0, 1)]), order).unwrap();
        for i in 0..j.dimension() {
            let s = parallel_transport(&tc, &[qv(&[(0, 1), (0, 1)]), end.clone()], &f64s(&j.admissible_space[i])).unwrap();
            let taylor = j.eval_local_f64(i, &f64s(&end));
            let err = s.iter().zip(&taylor).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-7, "basis {i}: {err}");
        }
    }
}

#[test]
fn holonomy_of_small_loops_approaches_curvature() {
    let c = corrected_witness();
    let tc = TractorConnection::tampered(&c).unwrap();
    let f = tc.curvature();
    let p = [q(1, 5), q(-1, 3)];
    let mut s0v = vec![0.0; 6];
    s0v[sigma_slot(2, 0, 0)] = 1.0;
    s0v[sigma_slot(2, 1, 1)] = 1.0;
    s0v[rho_slot(2)] = 0.5;
    let s0 = TractorSection::from_slots(2, s0v.iter().map(|v| R::constant(Q::from_float(*v).unwrap())).collect());
    let fs: Vec<f64> = f.apply(0, 1, &s0).slots().iter().map(|e| q_to_f64(&e.evaluate(&p).unwrap())).collect();
    let fnorm = fs.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(fnorm > 1e-3);
    let mut errs = Vec::new();
    for k in [64i64, 128, 256] {
        // Square of side h centered at p.
        let h = q(1, k);
        let half = q(1, 2 * k);
        let corner = |dx: i64, dy: i64| vec![&p[0] - &half + &h * q(dx, 1), &p[1] - &half + &h * q(dy, 1)];
        let path = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1), corner(0, 0)];
        let out = parallel_transport(&tc, &path, &s0v).unwrap();
        let h2 = q_to_f64(&(&h * &h));
        let dev: Vec<f64> = out.iter().zip(&s0v).map(|(a, b)| (a - b) / h2).collect();
        let err = |sign: f64| dev.iter().zip(&fs).map(|(d, x)| (d - sign * x).powi(2)).sum::<f64>().sqrt() / fnorm;
        errs.push(err(1.0).min(err(-1.0)));
    }
    assert!(errs[2] <= 0.05, "{errs:?}");
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}
