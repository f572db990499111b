//! Numeric comparison of unparameterized geodesics.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exprcore::Scalar;
use crate::projconn::AffineConnection;

const MIN_STEP: f64 = 1e-12;

/// Geodesic traces and the largest transverse defect seen along them.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicReport {
    pub max_defect: f64,
    /// Per seed, the accepted `(t, x)` samples.
    pub trajectories: Vec<Vec<(f64, Vec<f64>)>>,
}

impl GeodesicReport {
    /// CSV with columns `trajectory,t,x1,…,xn`.
    pub fn to_csv(&self) -> String {
        let n = self.trajectories.iter().find_map(|t| t.first()).map_or(0, |(_, x)| x.len());
        let mut out = String::from("trajectory,t");
        for i in 1..=n {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for (k, tr) in self.trajectories.iter().enumerate() {
            for (t, x) in tr {
                let _ = write!(out, "{k},{t}");
                for v in x {
                    let _ = write!(out, ",{v}");
                }
                out.push('\n');
            }
        }
        out
    }
}

/// `Γ(v, v)^c` from Christoffel values laid out as `(c·n + a)·n + b`.
fn quad(gamma: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|c| {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    acc += gamma[(c * n + a) * n + b] * v[a] * v[b];
                }
            }
            acc
        })
        .collect()
}

fn rhs<S: Scalar>(c: &AffineConnection<S>, y: &[f64]) -> Vec<f64> {
    let n = y.len() / 2;
    let (x, v) = y.split_at(n);
    let acc = quad(&c.eval_f64(x), v);
    v.iter().copied().chain(acc.into_iter().map(|a| -a)).collect()
}

fn rk4<S: Scalar>(c: &AffineConnection<S>, y: &[f64], h: f64) -> Vec<f64> {
    let axpy = |k: &[f64], f: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + f * b).collect() };
    let k1 = rhs(c, y);
    let k2 = rhs(c, &axpy(&k1, h / 2.0));
    let k3 = rhs(c, &axpy(&k2, h / 2.0));
    let k4 = rhs(c, &axpy(&k3, h));
    (0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Component of `Γ₂(v,v) − Γ₁(v,v)` orthogonal to `v`, divided by `|v|²`.
fn transverse_defect<S: Scalar>(c1: &AffineConnection<S>, c2: &AffineConnection<S>, x: &[f64], v: &[f64]) -> f64 {
    let d1 = quad(&c1.eval_f64(x), v);
    let d2 = quad(&c2.eval_f64(x), v);
    let d: Vec<f64> = d2.iter().zip(&d1).map(|(a, b)| a - b).collect();
    let vv: f64 = v.iter().map(|a| a * a).sum();
    let dv: f64 = d.iter().zip(v).map(|(a, b)| a * b).sum();
    let perp: f64 = d.iter().zip(v).map(|(a, b)| (a - dv / vv * b).powi(2)).sum::<f64>().sqrt();
    perp / vv
}

fn trace_one<S: Scalar>(
    c1: &AffineConnection<S>,
    c2: &AffineConnection<S>,
    x0: &[f64],
    v0: &[f64],
    length: f64,
    tol: f64,
) -> Result<(f64, Vec<(f64, Vec<f64>)>)> {
    let n = x0.len();
    let mut y: Vec<f64> = x0.iter().chain(v0).copied().collect();
    let mut t = 0.0;
    let mut h: f64 = length / 32.0;
    let mut worst = transverse_defect(c1, c2, x0, v0);
    let mut trace = vec![(0.0, x0.to_vec())];
    while t < length {
        h = h.min(length - t);
        let big = rk4(c1, &y, h);
        let half = rk4(c1, &y, h / 2.0);
        let small = rk4(c1, &half, h / 2.0);
        if small.iter().chain(&big).any(|v| !v.is_finite()) {
            return Err(Error::PoleOnPath(t));
        }
        let err = big.iter().zip(&small).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / 15.0;
        let scale = small.iter().map(|a| a.abs()).fold(1.0, f64::max);
        if err <= tol * scale {
            y = small;
            t += h;
            let (x, v) = y.split_at(n);
            let dfct = transverse_defect(c1, c2, x, v);
            if !dfct.is_finite() {
                return Err(Error::PoleOnPath(t));
            }
            worst = worst.max(dfct);
            trace.push((t, x.to_vec()));
            h *= if err == 0.0 { 2.0 } else { (0.9 * (tol * scale / err).powf(0.2)).clamp(0.2, 2.0) };
        } else {
            h *= (0.9 * (tol * scale / err).powf(0.2)).clamp(0.1, 0.5);
            if h < MIN_STEP {
                return Err(Error::StepUnderflow(t));
            }
        }
    }
    Ok((worst, trace))
}

/// Integrates `c1`-geodesics from each `(point, direction)` seed for
/// parameter length `length` and measures how far each fails to be an
/// unparameterized `c2`-geodesic.
pub fn geodesic_compare<S: Scalar>(
    c1: &AffineConnection<S>,
    c2: &AffineConnection<S>,
    seeds: &[(Vec<f64>, Vec<f64>)],
    length: f64,
    tol: f64,
) -> Result<GeodesicReport> {
    let runs: Vec<_> = seeds
        .par_iter()
        .map(|(x, v)| trace_one(c1, c2, x, v, length, tol))
        .collect::<Result<_>>()?;
    let max_defect = runs.iter().map(|r| r.0).fold(0.0, f64::max);
    Ok(GeodesicReport {
        max_defect,
        trajectories: runs.into_iter().map(|r| r.1).collect(),
    })
}
