//! Numeric parallel transport along polylines and residual evaluation.

use crate::error::{Error, Result};
use crate::exprcore::{q_to_f64, ExprError, RationalExpr, Q};
use crate::tractor::{slot_count, TractorConnection, TractorSection};

pub const RK_TOL: f64 = 1e-10;
const MIN_STEP: f64 = 1e-14;

/// Connection matrices prepared for fast floating-point evaluation.
pub struct NumericConnection {
    dim: usize,
    slots: usize,
    entries: Vec<Vec<(usize, usize, RationalExpr)>>,
}

impl NumericConnection {
    pub fn new(tc: &TractorConnection<RationalExpr>) -> Self {
        let n = tc.dim();
        let m = slot_count(n);
        let entries = (0..n)
            .map(|a| {
                tc.matrix(a)
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(k, e)| (k / m, k % m, e.clone()))
                    .collect()
            })
            .collect();
        Self { dim: n, slots: m, entries }
    }

    /// `ds/dt = −Σ_a ẋ^a A_a(x) s`.
    fn rhs(&self, x: &[f64], v: &[f64], s: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.slots];
        for a in 0..self.dim {
            if v[a] == 0.0 {
                continue;
            }
            for (i, j, e) in &self.entries[a] {
                out[*i] -= v[a] * e.eval_f64(x) * s[*j];
            }
        }
        out
    }
}

fn rk4_step(c: &NumericConnection, x0: &[f64], v: &[f64], t: f64, h: f64, s: &[f64]) -> Vec<f64> {
    let at = |tt: f64| -> Vec<f64> { x0.iter().zip(v).map(|(a, b)| a + tt * b).collect() };
    let axpy = |s: &[f64], k: &[f64], f: f64| -> Vec<f64> { s.iter().zip(k).map(|(a, b)| a + f * b).collect() };
    let k1 = c.rhs(&at(t), v, s);
    let k2 = c.rhs(&at(t + h / 2.0), v, &axpy(s, &k1, h / 2.0));
    let k3 = c.rhs(&at(t + h / 2.0), v, &axpy(s, &k2, h / 2.0));
    let k4 = c.rhs(&at(t + h), v, &axpy(s, &k3, h));
    (0..s.len())
        .map(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Integrates along the segment `x0 + t v`, `t ∈ [0, 1]`, with step doubling.
fn transport_segment(c: &NumericConnection, x0: &[f64], v: &[f64], s0: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut s = s0.to_vec();
    let mut t = 0.0;
    let mut h: f64 = 0.05;
    while t < 1.0 {
        h = h.min(1.0 - t);
        let big = rk4_step(c, x0, v, t, h, &s);
        let half = rk4_step(c, x0, v, t, h / 2.0, &s);
        let small = rk4_step(c, x0, v, t + h / 2.0, h / 2.0, &half);
        if small.iter().any(|x| !x.is_finite()) || big.iter().any(|x| !x.is_finite()) {
            return Err(Error::PoleOnPath(t));
        }
        let err: f64 = big.iter().zip(&small).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / 15.0;
        let scale = norm(&small).max(1.0);
        if err <= tol * scale {
            // Richardson extrapolation of the two estimates.
            s = small.iter().zip(&big).map(|(a, b)| a + (a - b) / 15.0).collect();
            t += h;
            let grow = if err == 0.0 { 2.0 } else { (0.9 * (tol * scale / err).powf(0.2)).clamp(0.2, 2.0) };
            h *= grow;
        } else {
            h *= (0.9 * (tol * scale / err).powf(0.2)).clamp(0.1, 0.5);
            if h < MIN_STEP {
                return Err(Error::StepUnderflow(t));
            }
        }
    }
    Ok(s)
}

/// Transports `s0` along the polyline through `path`.
pub fn parallel_transport(tc: &TractorConnection<RationalExpr>, path: &[Vec<Q>], s0: &[f64]) -> Result<Vec<f64>> {
    let c = NumericConnection::new(tc);
    let pts: Vec<Vec<f64>> = path.iter().map(|p| p.iter().map(q_to_f64).collect()).collect();
    parallel_transport_f64(&c, &pts, s0, RK_TOL)
}

pub fn parallel_transport_f64(c: &NumericConnection, path: &[Vec<f64>], s0: &[f64], tol: f64) -> Result<Vec<f64>> {
    if s0.len() != c.slots {
        return Err(Error::Shape(format!("section has {} slots, expected {}", s0.len(), c.slots)));
    }
    let mut s = s0.to_vec();
    for w in path.windows(2) {
        let v: Vec<f64> = w[1].iter().zip(&w[0]).map(|(b, a)| b - a).collect();
        s = transport_segment(c, &w[0], &v, &s, tol)?;
    }
    Ok(s)
}

/// Largest absolute value over slots and sample points of `D_a s`.
///
/// Returns exactly `0.0` when `D s` vanishes identically.
pub fn residual(tc: &TractorConnection<RationalExpr>, s: &TractorSection<RationalExpr>, points: &[Vec<Q>]) -> Result<f64> {
    let ds = tc.derivative(s);
    if ds.iter().all(|d| d.is_zero()) {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for p in points {
        for d in &ds {
            for e in d.slots() {
                let v = e.evaluate(p).map_err(|e| match e {
                    ExprError::Pole => Error::PoleAtBasePoint,
                    other => Error::Expr(other),
                })?;
                worst = worst.max(q_to_f64(&v).abs());
            }
        }
    }
    Ok(worst)
}
