//! Report documents. Exact quantities are rational strings; floats are decimals.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

pub const SCHEMA_VERSION: u32 = 1;

/// Outcome of `analyze`, each with its own process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Metrizable,
    NotMetrizableAtOrder(usize),
    IndefiniteOnly,
    ObstructedByBeta,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Metrizable => 0,
            Verdict::NotMetrizableAtOrder(_) => 10,
            Verdict::IndefiniteOnly => 11,
            Verdict::ObstructedByBeta => 12,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Metrizable => write!(f, "METRIZABLE"),
            Verdict::NotMetrizableAtOrder(m) => write!(f, "NOT_METRIZABLE_AT_ORDER({m})"),
            Verdict::IndefiniteOnly => write!(f, "INDEFINITE_ONLY"),
            Verdict::ObstructedByBeta => write!(f, "OBSTRUCTED_BY_BETA"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Serializes non-finite floats as `null`.
fn finite<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputEcho {
    pub dimension: usize,
    pub variables: Vec<String>,
    pub christoffel: BTreeMap<String, String>,
    pub base_point: Vec<String>,
    pub max_order: usize,
    pub samples: usize,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecialGauge {
    /// Total `Υ` taking the input to the trace-free representative.
    pub upsilon: Vec<String>,
    /// Polynomial `f` with `df` the exact part of `Υ`, when it exists.
    pub f: Option<String>,
    pub christoffel: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MobilityReport {
    pub dimension: usize,
    pub bound: usize,
    pub dims: Vec<usize>,
    pub order: usize,
    pub stabilized: bool,
    pub stabilization_order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionReport {
    /// Value of `(σ, μ, ρ)` at the base point in slot order.
    pub initial: Vec<String>,
    /// Inertia `(positive, negative, zero)` of `σ` at the base point.
    pub sigma_signature: [usize; 3],
    /// Whether the jet has no terms in its top two degrees.
    pub polynomial: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub source: String,
    pub initial: Vec<String>,
    /// `exact`, `promoted` (exact metric recognized from jets) or `series`.
    pub representation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jet_order: Option<usize>,
    /// Series claims hold through this total degree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified_through: Option<usize>,
    pub sigma: Option<Vec<Vec<String>>>,
    pub det_sigma: Option<String>,
    pub g_up: Option<Vec<Vec<String>>>,
    pub g_down: Option<Vec<Vec<String>>>,
    pub signature: [usize; 2],
    pub definite: bool,
    pub levi_civita: bool,
    /// `Υ` with `Γ_metric = Γ_input + δΥ + δΥ`.
    pub upsilon: Option<Vec<String>>,
    pub kappa: Option<String>,
    pub kappa_normalized: Option<f64>,
    pub constant_curvature: Option<bool>,
    pub curvature_deviation: Option<String>,
    pub geodesic_defect: Option<f64>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

impl MetricReport {
    pub fn new(source: String, initial: Vec<String>) -> Self {
        Self {
            source,
            initial,
            representation: "none".into(),
            jet_order: None,
            verified_through: None,
            sigma: None,
            det_sigma: None,
            g_up: None,
            g_down: None,
            signature: [0, 0],
            definite: false,
            levi_civita: false,
            upsilon: None,
            kappa: None,
            kappa_normalized: None,
            constant_curvature: None,
            curvature_deviation: None,
            geodesic_defect: None,
            warnings: Vec::new(),
            error: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    /// Index into `metrics` of the verified positive definite witness.
    pub witness: usize,
    pub representation: String,
    pub levi_civita: bool,
    pub upsilon: Vec<String>,
    #[serde(serialize_with = "finite")]
    pub geodesic_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub input: InputEcho,
    pub special_gauge: Option<SpecialGauge>,
    pub beta_nonzero: bool,
    pub mobility: Option<MobilityReport>,
    pub solutions: Vec<SolutionReport>,
    pub metrics: Vec<MetricReport>,
    pub verification: Option<Verification>,
    pub warnings: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MobilityOnlyReport {
    pub schema: u32,
    pub input: InputEcho,
    pub mobility: MobilityReport,
    pub solutions: Vec<SolutionReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub schema: u32,
    pub input: InputEcho,
    /// Whether `β` vanishes.
    pub special: bool,
    /// Nonzero components keyed by 1-based indices in signature order.
    pub weyl: BTreeMap<String, String>,
    pub schouten: BTreeMap<String, String>,
    pub cotton_york: BTreeMap<String, String>,
    pub beta: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub schema: u32,
    pub equivalent: bool,
    pub upsilon: Option<Vec<String>>,
    pub obstruction: Option<String>,
    pub geodesic_defect: Option<f64>,
    pub geodesic_error: Option<String>,
}
