//! The analysis pipeline: specialize, prolong, solve, reconstruct, verify.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::report::*;
use super::spec::{christoffel_map, ConnectionSpec};
use crate::error::{Error, Result};
use crate::exprcore::{fmt_q, q_to_f64, Poly, RationalExpr, Scalar, Series, Q};
use crate::metricize::{
    constant_curvature_check, constant_curvature_series, det, geodesic_compare, inverse, is_levi_civita,
    projective_equivalence, reconstruct::levi_civita_with, reconstruct::signature_at, reconstruct_metric, Matrix,
};
use crate::mobility::linalg::{in_span, inertia, kernel};
use crate::mobility::{degree_of_mobility, JetSolution};
use crate::projconn::{AffineConnection, ProjectiveData};
use crate::tractor::{rho_slot, sigma_slot, slot_count};

/// Resolved options for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub max_order: usize,
    pub samples: usize,
    pub tolerance: f64,
}

impl AnalysisOptions {
    /// Spec options, overridden by explicit values, with defaults
    /// `max_order = 2n + 4`, `samples = 4`, `tolerance = 1e-6`.
    pub fn resolve(spec: &ConnectionSpec, max_order: Option<usize>, samples: Option<usize>, tolerance: Option<f64>) -> Self {
        let o = &spec.options;
        Self {
            max_order: max_order.or(o.max_order).unwrap_or(2 * spec.dimension + 4),
            samples: samples.or(o.samples).unwrap_or(4).max(1),
            tolerance: tolerance.or(o.tolerance).unwrap_or(1e-6),
        }
    }
}

/// Geodesic parameter length used for defect measurements.
pub const GEODESIC_LENGTH: f64 = 0.2;
/// Cap on candidates built from pairs of basis vectors.
const MAX_PAIR_CANDIDATES: usize = 24;

fn q_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn expr_strings(v: &[RationalExpr], names: &[String]) -> Vec<String> {
    v.iter().map(|e| e.display_with(names).to_string()).collect()
}

fn matrix_strings(m: &[Vec<RationalExpr>], names: &[String]) -> Vec<Vec<String>> {
    m.iter().map(|r| expr_strings(r, names)).collect()
}

/// Deterministic sample points near `p`, starting with `p` itself.
pub fn sample_points(p: &[Q], k: usize) -> Vec<Vec<Q>> {
    let n = p.len();
    (0..k)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let sign: i64 = if (i + j) % 2 == 0 { 1 } else { -1 };
                    let off = Q::new((sign * j as i64).into(), (16 * (i as i64 + 1)).into());
                    &p[i] + off
                })
                .collect()
        })
        .collect()
}

/// Deterministic geodesic seeds `(x, v)` around `center`.
pub fn geodesic_seeds(center: &[f64], k: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = center.len();
    (0..k)
        .map(|j| {
            let x: Vec<f64> = (0..n)
                .map(|i| center[i] + 0.03 * (((i + 2 * j) % 5) as f64 - 2.0))
                .collect();
            let mut v: Vec<f64> = (0..n).map(|i| if i == j % n { 1.0 } else { 0.25 * ((i + j) % 3) as f64 - 0.25 }).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            (x, v)
        })
        .collect()
}

fn sigma_block(n: usize, v: &[Q]) -> Vec<Vec<Q>> {
    (0..n)
        .map(|b| (0..n).map(|c| v[sigma_slot(n, b.min(c), b.max(c))].clone()).collect())
        .collect()
}

fn det_q(m: &[Vec<Q>]) -> Q {
    let r: Vec<Vec<RationalExpr>> = m.iter().map(|row| row.iter().map(|x| RationalExpr::constant(x.clone())).collect()).collect();
    det(&r).as_constant().expect("constant matrix")
}

/// Coefficients of `v` over the reduced row echelon basis.
fn coordinates(jet: &JetSolution, v: &[Q]) -> Vec<Q> {
    jet.admissible_space
        .iter()
        .map(|row| {
            let p = row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            v[p].clone()
        })
        .collect()
}

/// An admissible initial value with `σ = δ`, if there is one.
fn identity_sigma_solution(jet: &JetSolution) -> Option<Vec<Q>> {
    let n = jet.dim;
    let d = jet.dimension();
    let mut rows = Vec::new();
    for b in 0..n {
        for c in b..n {
            let s = sigma_slot(n, b, c);
            let mut row: Vec<Q> = jet.admissible_space.iter().map(|v| v[s].clone()).collect();
            row.push(if b == c { -Q::from_integer(1.into()) } else { Q::zero() });
            rows.push(row);
        }
    }
    let ker = kernel(&rows, d + 1);
    let sol = ker.iter().find(|k| !k[d].is_zero())?;
    let scale = sol[d].clone();
    let coeffs: Vec<Q> = sol[..d].iter().map(|x| x / &scale).collect();
    Some(jet.combine(&coeffs).0)
}

struct Candidate {
    source: String,
    init: Vec<Q>,
}

fn candidates(jet: &JetSolution) -> Vec<Candidate> {
    let n = jet.dim;
    let m = slot_count(n);
    let mut out: Vec<Candidate> = Vec::new();
    let push = |source: String, init: Vec<Q>, out: &mut Vec<Candidate>| {
        if init.iter().all(|x| x.is_zero()) || out.iter().any(|c| c.init == init) {
            return;
        }
        out.push(Candidate { source, init });
    };
    for kappa in [-1i64, 0, 1] {
        let mut v = vec![Q::zero(); m];
        for b in 0..n {
            v[sigma_slot(n, b, b)] = Q::from_integer(1.into());
        }
        v[rho_slot(n)] = Q::from_integer(kappa.into());
        if in_span(&jet.admissible_space, &v) {
            push(format!("probe sigma=identity mu=0 rho={kappa}"), v, &mut out);
        }
    }
    if let Some(v) = identity_sigma_solution(jet) {
        push("probe sigma=identity".into(), v, &mut out);
    }
    for (i, v) in jet.admissible_space.iter().enumerate() {
        push(format!("basis {}", i + 1), v.clone(), &mut out);
    }
    let d = jet.dimension();
    let mut pairs = 0;
    'outer: for i in 0..d {
        for j in i + 1..d {
            for sign in [1i64, -1] {
                if pairs == MAX_PAIR_CANDIDATES {
                    break 'outer;
                }
                let v: Vec<Q> = jet.admissible_space[i]
                    .iter()
                    .zip(&jet.admissible_space[j])
                    .map(|(a, b)| a + b * Q::from_integer(sign.into()))
                    .collect();
                let op = if sign > 0 { '+' } else { '-' };
                push(format!("basis {} {op} basis {}", i + 1, j + 1), v, &mut out);
                pairs += 1;
            }
        }
    }
    out
}

/// Largest total degree among the polynomials.
fn max_degree(ps: &[Poly]) -> u32 {
    ps.iter().map(Poly::total_degree).max().unwrap_or(0)
}

fn sigma_polys(n: usize, slots: &[Poly]) -> Matrix<Poly> {
    (0..n)
        .map(|b| (0..n).map(|c| slots[sigma_slot(n, b.min(c), b.max(c))].clone()).collect())
        .collect()
}

struct Outcome {
    report: MetricReport,
    verified: bool,
    definite: bool,
}

struct Context<'a> {
    spec: &'a ConnectionSpec,
    opts: &'a AnalysisOptions,
    special: &'a AffineConnection,
    jet: &'a JetSolution,
    samples: Vec<Vec<Q>>,
    neg_p: Vec<Q>,
    input_series: AffineConnection<Series>,
}

impl Context<'_> {
    fn names(&self) -> &[String] {
        &self.spec.variables
    }

    fn to_global(&self, p: &Poly) -> RationalExpr {
        RationalExpr::from_poly(p.shift(&self.neg_p))
    }

    fn kappa_normalized(&self, kappa: &Q, g_down_at_p: &[Vec<Q>]) -> f64 {
        let n = g_down_at_p.len() as f64;
        q_to_f64(kappa) * q_to_f64(&det_q(g_down_at_p)).abs().powf(1.0 / n)
    }

    fn geodesics_exact(&self, c2: &AffineConnection) -> Option<f64> {
        let center: Vec<f64> = self.spec.base_point.iter().map(q_to_f64).collect();
        let seeds = geodesic_seeds(&center, self.opts.samples);
        geodesic_compare(&self.spec.connection, c2, &seeds, GEODESIC_LENGTH, 1e-10)
            .ok()
            .map(|r| r.max_defect)
    }

    fn geodesics_series(&self, c2: &AffineConnection<Series>) -> Option<f64> {
        let seeds = geodesic_seeds(&vec![0.0; self.spec.dimension], self.opts.samples);
        geodesic_compare(&self.input_series, c2, &seeds, GEODESIC_LENGTH / 2.0, 1e-10)
            .ok()
            .map(|r| r.max_defect)
    }

    /// Verifies an exact metric through its Levi-Civita connection.
    fn verify_exact(&self, mut report: MetricReport, g_down: Matrix<RationalExpr>, g_up: Matrix<RationalExpr>, lc: AffineConnection, lc_checked: bool) -> Outcome {
        let names = self.names().to_vec();
        let lc_ok = lc_checked || is_levi_civita(&lc, &g_up, None).map(|r| r.holds).unwrap_or(false);
        report.levi_civita = lc_ok;
        let upsilon = projective_equivalence(&self.spec.connection, &lc);
        match &upsilon {
            Ok(u) => report.upsilon = Some(expr_strings(u, &names)),
            Err(e) => report.error = Some(e.to_string()),
        }
        let definite = self.definite_on_samples(&g_up, &mut report);
        report.g_down = Some(matrix_strings(&g_down, &names));
        report.g_up = Some(matrix_strings(&g_up, &names));
        if let Ok(cc) = constant_curvature_check(&g_down, &self.samples) {
            let g0: Option<Vec<Vec<Q>>> = g_down
                .iter()
                .map(|r| r.iter().map(|e| e.evaluate(&self.spec.base_point).ok()).collect())
                .collect();
            report.kappa = Some(fmt_q(&cc.kappa));
            report.kappa_normalized = g0.map(|g0| self.kappa_normalized(&cc.kappa, &g0));
            report.constant_curvature = Some(cc.constant);
            report.curvature_deviation = Some(fmt_q(&cc.deviation));
        }
        let verified = lc_ok && upsilon.is_ok();
        if verified {
            report.geodesic_defect = self.geodesics_exact(&lc);
        }
        Outcome {
            verified,
            definite,
            report,
        }
    }

    fn definite_on_samples(&self, g_up: &[Vec<RationalExpr>], report: &mut MetricReport) -> bool {
        let mut all = true;
        for p in &self.samples {
            match signature_at(g_up, p) {
                Some((pos, _, _)) if pos == g_up.len() => {}
                _ => all = false,
            }
        }
        if !all && report.definite {
            report.warnings.push("signature changes on the sampled region".into());
        }
        report.definite && all
    }

    fn evaluate(&self, cand: &Candidate) -> Outcome {
        let n = self.spec.dimension;
        let order = self.jet.order as i32;
        let names = self.names().to_vec();
        let mut init = cand.init.clone();
        let mut report = MetricReport::new(cand.source.clone(), q_strings(&init));
        let sigma0 = sigma_block(n, &init);
        let d0 = det_q(&sigma0);
        if d0.is_zero() {
            report.error = Some(Error::DegenerateSigma.to_string());
            return Outcome { report, verified: false, definite: false };
        }
        let g0: Vec<Vec<Q>> = sigma0.iter().map(|r| r.iter().map(|x| x * &d0).collect()).collect();
        let (pos, neg, _) = inertia(&g0);
        if neg == n && pos == 0 {
            // Only reachable for even n: −σ gives −g.
            init.iter_mut().for_each(|x| *x = -x.clone());
            report.warnings.push("sign of σ flipped to make g positive definite".into());
        }
        let coeffs = coordinates(self.jet, &init);
        let (_, slots) = self.jet.combine(&coeffs);
        let sigma_p = sigma_polys(n, &slots);

        // Exact route: the jet is visibly polynomial.
        if max_degree(&slots) + 2 <= order as u32 {
            let sigma: Matrix<RationalExpr> = sigma_p.iter().map(|r| r.iter().map(|p| self.to_global(p)).collect()).collect();
            if let Ok(mc) = reconstruct_metric(&sigma, self.special, &self.spec.base_point) {
                let lc_ok = is_levi_civita(&mc.connection, &mc.g_up, None).map(|r| r.holds).unwrap_or(false);
                if lc_ok {
                    report.representation = "exact".into();
                    report.sigma = Some(matrix_strings(&sigma, &names));
                    report.det_sigma = Some(mc.det_sigma.display_with(&names).to_string());
                    report.signature = [mc.signature.0, mc.signature.1];
                    report.definite = mc.definite;
                    return self.verify_exact(report, mc.g_down, mc.g_up, mc.connection, true);
                }
            }
        }

        // Jet route.
        let sigma_s: Matrix<Series> = sigma_p
            .iter()
            .map(|r| r.iter().map(|p| Series::truncated(p.clone(), order)).collect())
            .collect();
        let special_s = match self.special.expand(&self.spec.base_point, order) {
            Ok(c) => c,
            Err(e) => {
                report.error = Some(e.to_string());
                return Outcome { report, verified: false, definite: false };
            }
        };
        let zero = vec![Q::zero(); n];
        let mc = match reconstruct_metric(&sigma_s, &special_s, &zero) {
            Ok(mc) => mc,
            Err(e) => {
                report.error = Some(e.to_string());
                return Outcome { report, verified: false, definite: false };
            }
        };
        report.signature = [mc.signature.0, mc.signature.1];
        report.definite = mc.definite;
        report.sigma = Some(
            sigma_p
                .iter()
                .map(|r| r.iter().map(|p| self.to_global(p).display_with(&names).to_string()).collect())
                .collect(),
        );

        // Promotion: a metric whose jet is visibly polynomial.
        let promote = |m: &Matrix<Series>| -> Option<Matrix<RationalExpr>> {
            let polys: Vec<Poly> = m.iter().flatten().map(|s| s.poly().clone()).collect();
            let prec = m.iter().flatten().filter_map(Series::precision).min().unwrap_or(order);
            (max_degree(&polys) as i32 + 2 <= prec).then(|| {
                m.iter().map(|r| r.iter().map(|s| self.to_global(s.poly())).collect()).collect()
            })
        };
        for (from_down, candidate) in [(true, promote(&mc.g_down)), (false, promote(&mc.g_up))] {
            let Some(g) = candidate else { continue };
            let Some(other) = inverse(&g) else { continue };
            let (g_down, g_up) = if from_down { (g, other) } else { (other, g) };
            let lc = levi_civita_with(&g_down, &g_up);
            if projective_equivalence(&self.spec.connection, &lc).is_ok() {
                report.representation = "promoted".into();
                return self.verify_exact(report, g_down, g_up, lc, true);
            }
        }

        // Series verification through a safe order.
        report.representation = "series".into();
        report.jet_order = Some(self.jet.order);
        let lc_order = order - 3;
        let mut verified = false;
        if lc_order >= 0 {
            report.verified_through = Some(lc_order as usize);
            let lc_ok = is_levi_civita(&mc.connection, &mc.g_up, Some(lc_order)).map(|r| r.holds).unwrap_or(false);
            report.levi_civita = lc_ok;
            let cut = |c: &AffineConnection<Series>| c.map(|s| s.truncate(lc_order));
            match projective_equivalence(&cut(&self.input_series), &cut(&mc.connection)) {
                Ok(u) => {
                    report.upsilon = Some(u.iter().map(|s| self.to_global(s.poly()).display_with(&names).to_string()).collect());
                    verified = lc_ok;
                }
                Err(e) => report.error = Some(e.to_string()),
            }
        }
        report.g_up = Some(
            mc.g_up
                .iter()
                .map(|r| r.iter().map(|s| self.to_global(s.poly()).display_with(&names).to_string()).collect())
                .collect(),
        );
        if order >= 4 {
            if let Ok(cc) = constant_curvature_series(&mc.g_down, order - 4) {
                let g0: Vec<Vec<Q>> = mc.g_down.iter().map(|r| r.iter().map(Series::constant_term).collect()).collect();
                report.kappa = Some(fmt_q(&cc.kappa));
                report.kappa_normalized = Some(self.kappa_normalized(&cc.kappa, &g0));
                report.constant_curvature = Some(cc.constant);
                report.curvature_deviation = Some(fmt_q(&cc.deviation));
            }
        }
        if verified {
            report.geodesic_defect = self.geodesics_series(&mc.connection);
        }
        Outcome {
            verified,
            definite: mc.definite,
            report,
        }
    }
}

fn mobility_report(jet: &JetSolution) -> MobilityReport {
    MobilityReport {
        dimension: jet.dimension(),
        bound: slot_count(jet.dim),
        dims: jet.dims.clone(),
        order: jet.order,
        stabilized: jet.stabilized,
        stabilization_order: jet.stabilization_order(),
    }
}

fn solution_reports(jet: &JetSolution) -> Vec<SolutionReport> {
    let n = jet.dim;
    jet.admissible_space
        .iter()
        .zip(&jet.series)
        .map(|(v, polys)| {
            let (p, q, z) = inertia(&sigma_block(n, v));
            SolutionReport {
                initial: q_strings(v),
                sigma_signature: [p, q, z],
                polynomial: max_degree(polys) + 2 <= jet.order as u32,
            }
        })
        .collect()
}

fn input_echo(spec: &ConnectionSpec, opts: &AnalysisOptions) -> InputEcho {
    InputEcho {
        dimension: spec.dimension,
        variables: spec.variables.clone(),
        christoffel: spec.christoffel_strings(),
        base_point: q_strings(&spec.base_point),
        max_order: opts.max_order,
        samples: opts.samples,
        tolerance: opts.tolerance,
    }
}

/// Runs the jets only.
pub fn run_mobility(spec: &ConnectionSpec, opts: &AnalysisOptions) -> Result<MobilityOnlyReport> {
    let sp = spec.connection.specialize()?;
    let jet = degree_of_mobility(&sp.connection, &spec.base_point, opts.max_order)?;
    Ok(MobilityOnlyReport {
        schema: SCHEMA_VERSION,
        input: input_echo(spec, opts),
        mobility: mobility_report(&jet),
        solutions: solution_reports(&jet),
    })
}

/// The full pipeline.
pub fn run_analysis(spec: &ConnectionSpec, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let names = &spec.variables;
    let p = &spec.base_point;
    let beta_nonzero = !spec.connection.is_special();
    let input_series = spec.connection.expand(p, opts.max_order as i32 + 1)?;
    let mut report = AnalysisReport {
        schema: SCHEMA_VERSION,
        input: input_echo(spec, opts),
        special_gauge: None,
        beta_nonzero,
        mobility: None,
        solutions: Vec::new(),
        metrics: Vec::new(),
        verification: None,
        warnings: Vec::new(),
        verdict: Verdict::ObstructedByBeta,
    };
    let sp = match spec.connection.specialize() {
        Ok(sp) => sp,
        Err(e) if beta_nonzero => {
            report.warnings.push(format!("β could not be removed: {e}"));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.special_gauge = Some(SpecialGauge {
        upsilon: expr_strings(&sp.upsilon, names),
        f: sp.exact_part.as_ref().map(|f| f.display_with(names).to_string()),
        christoffel: christoffel_map(&sp.connection, names),
    });
    let jet = degree_of_mobility(&sp.connection, p, opts.max_order)?;
    report.mobility = Some(mobility_report(&jet));
    report.solutions = solution_reports(&jet);
    if !jet.stabilized {
        report.warnings.push(format!("NotStabilized: dimension still changing at order {}", jet.order));
    }
    if jet.dimension() == 0 {
        report.verdict = Verdict::NotMetrizableAtOrder(jet.order);
        return Ok(report);
    }
    let ctx = Context {
        spec,
        opts,
        special: &sp.connection,
        jet: &jet,
        samples: sample_points(p, opts.samples),
        neg_p: p.iter().map(|x| -x.clone()).collect(),
        input_series,
    };
    let mut witness: Option<usize> = None;
    let mut indefinite = false;
    for cand in candidates(&jet) {
        let is_pair = cand.source.contains(" basis ");
        if is_pair && witness.is_some() {
            break;
        }
        let out = ctx.evaluate(&cand);
        let passes_geodesics = out.report.geodesic_defect.is_some_and(|d| d <= opts.tolerance);
        if out.verified && out.definite && passes_geodesics && witness.is_none() {
            witness = Some(report.metrics.len());
        }
        if out.verified && !out.definite {
            indefinite = true;
        }
        report.metrics.push(out.report);
    }
    report.verification = witness.map(|i| {
        let m = &report.metrics[i];
        Verification {
            witness: i,
            representation: m.representation.clone(),
            levi_civita: m.levi_civita,
            upsilon: m.upsilon.clone().unwrap_or_default(),
            geodesic_defect: m.geodesic_defect.unwrap_or(f64::NAN),
        }
    });
    report.verdict = if witness.is_some() {
        Verdict::Metrizable
    } else if indefinite {
        Verdict::IndefiniteOnly
    } else {
        report
            .warnings
            .push("admissible solutions exist but none reconstructs to a verified metric at the base point".into());
        Verdict::NotMetrizableAtOrder(jet.order)
    };
    Ok(report)
}

/// Projective curvature of the input connection.
pub fn run_curvature(spec: &ConnectionSpec) -> Result<CurvatureReport> {
    let names = &spec.variables;
    let d = ProjectiveData::compute(&spec.connection);
    let dump = |t: &crate::tensorfield::TensorField| -> BTreeMap<String, String> {
        let n = t.dim();
        let mut out = BTreeMap::new();
        for (k, v) in t.components().iter().enumerate() {
            if !v.is_zero() {
                let idx = crate::tensorfield::unflat(k, n, t.rank());
                let key = idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
                out.insert(key, v.display_with(names).to_string());
            }
        }
        out
    };
    Ok(CurvatureReport {
        schema: SCHEMA_VERSION,
        input: input_echo(spec, &AnalysisOptions::resolve(spec, None, None, None)),
        special: d.beta.is_zero(),
        weyl: dump(&d.weyl),
        schouten: dump(&d.schouten),
        cotton_york: dump(&d.cotton_york),
        beta: dump(&d.beta),
    })
}

/// Projective equivalence and geodesic comparison of two specs.
pub fn run_compare(a: &ConnectionSpec, b: &ConnectionSpec, samples: usize) -> Result<CompareReport> {
    if a.variables != b.variables || a.dimension != b.dimension {
        return Err(Error::Spec("both specs must use the same dimension and variable names".into()));
    }
    let names = &a.variables;
    let eq = projective_equivalence(&a.connection, &b.connection);
    let center: Vec<f64> = a.base_point.iter().map(q_to_f64).collect();
    let seeds = geodesic_seeds(&center, samples.max(1));
    let geo = geodesic_compare(&a.connection, &b.connection, &seeds, GEODESIC_LENGTH, 1e-10);
    Ok(CompareReport {
        schema: SCHEMA_VERSION,
        equivalent: eq.is_ok(),
        upsilon: eq.as_ref().ok().map(|u| expr_strings(u, names)),
        obstruction: eq.err().map(|e| e.to_string()),
        geodesic_defect: geo.as_ref().ok().map(|r| r.max_defect),
        geodesic_error: geo.err().map(|e| e.to_string()),
    })
}

