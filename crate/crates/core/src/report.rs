//! JSON documents written by the command-line tool and the C interface.

use crate::chart::Chart;
use crate::equivalence::{EquivalenceReport, LiftReport};
use crate::framing::frame_from_symbol;
use crate::geometry::{charges, metric_data, potentials, Charges, Signature};
use crate::spectral;
use crate::symbol::{FullSymbol, ValidationReport};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub signature: Signature,
    /// `g^{αβ}` at the origin.
    pub g_up_at_origin: Vec<Vec<f64>>,
    pub rho_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialSummary {
    pub a_at_origin: Vec<f64>,
    /// Electric potential at the origin (3D).
    pub a4_at_origin: Option<f64>,
    /// `∮ A` along each coordinate circle through the origin.
    pub periods: Vec<f64>,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameSummary {
    pub det_range: [f64; 2],
    pub orthonormality_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub kind: &'static str,
    pub symbol: String,
    pub dim: usize,
    pub grid: usize,
    pub validation: ValidationReport,
    pub metric: Option<MetricSummary>,
    pub potentials: Option<PotentialSummary>,
    pub charges: Option<Charges>,
    pub frame: Option<FrameSummary>,
    pub errors: Vec<String>,
}

impl AnalysisReport {
    pub fn ok(&self) -> bool {
        self.validation.valid && self.errors.is_empty()
    }
}

/// Runs every per-symbol invariant, recording failures instead of stopping.
/// Invalid symbols only get the validation block.
pub fn analyze(s: &FullSymbol, name: &str, chart: &Chart) -> crate::Result<AnalysisReport> {
    let validation = s.validate(chart)?;
    let mut report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        kind: "analysis",
        symbol: name.into(),
        dim: chart.dim(),
        grid: chart.resolution(),
        validation,
        metric: None,
        potentials: None,
        charges: None,
        frame: None,
        errors: vec![],
    };
    if !report.validation.valid {
        return Ok(report);
    }
    let dim = chart.dim();
    let md = match metric_data(s, chart) {
        Ok(md) => md,
        Err(e) => {
            report.errors.push(e.to_string());
            return Ok(report);
        }
    };
    let (lo, hi) = md.rho_range();
    let g = &md.points[0].g_up;
    report.metric = Some(MetricSummary {
        signature: md.signature,
        g_up_at_origin: (0..dim)
            .map(|i| (0..dim).map(|j| g[(i, j)]).collect())
            .collect(),
        rho_range: [lo, hi],
    });
    match potentials(s, &md, chart) {
        Ok(pot) => {
            let comps: Vec<Vec<f64>> = (0..dim).map(|k| pot.component(k)).collect();
            report.potentials = Some(PotentialSummary {
                a_at_origin: pot.values[0].a[..dim].to_vec(),
                a4_at_origin: (dim == 3).then_some(pot.values[0].a4),
                periods: spectral::axis_periods(&comps, chart),
                max_residual: pot.max_residual(),
            });
        }
        Err(e) => report.errors.push(e.to_string()),
    }
    match charges(s, &md, chart) {
        Ok(c) => report.charges = Some(c),
        Err(e) => report.errors.push(e.to_string()),
    }
    match frame_from_symbol(s, &md, chart) {
        Ok(f) => {
            report.frame = Some(FrameSummary {
                det_range: [f.det_range.0, f.det_range.1],
                orthonormality_defect: f.orthonormality_defect,
            })
        }
        Err(e) => report.errors.push(e.to_string()),
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonDocument {
    pub schema_version: u32,
    pub kind: &'static str,
    pub first: String,
    pub second: String,
    pub report: EquivalenceReport,
}

impl ComparisonDocument {
    pub fn new(first: &str, second: &str, report: EquivalenceReport) -> Self {
        ComparisonDocument {
            schema_version: SCHEMA_VERSION,
            kind: "comparison",
            first: first.into(),
            second: second.into(),
            report,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftDocument {
    pub schema_version: u32,
    pub kind: &'static str,
    pub first: String,
    pub second: String,
    pub report: LiftReport,
}

impl LiftDocument {
    pub fn new(first: &str, second: &str, report: LiftReport) -> Self {
        LiftDocument {
            schema_version: SCHEMA_VERSION,
            kind: "lift",
            first: first.into(),
            second: second.into(),
            report,
        }
    }
}
