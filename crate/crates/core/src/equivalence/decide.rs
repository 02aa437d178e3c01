//! Pairwise gauge-equivalence decision on a torus.

use super::cohomology::{cohomology_compare, construct_phase, CohomologyResult, Lattice};
use super::gauge::{gauge_jet, GaugeMap, Group};
use crate::chart::{Chart, Point};
use crate::error::{Error, Result};
use crate::framing::{
    algebra_lift, frame_jet_at, global_lift_torus, monodromy_class, monodromy_on_grid,
    normalize_transition, LiftFamily, MAX_LOOP_SAMPLES,
};
use crate::geometry::{charges, metric_data, potentials, Charges, MetricData};
use crate::mat2::{Mat2, MatJet};
use crate::symbol::{FullSymbol, SymbolJet};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Compare principal symbols only.
    Principal,
    /// Compare full symbols, including potentials.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub metric: f64,
    pub conformal: f64,
    pub potential: f64,
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            metric: 1e-9,
            conformal: 1e-8,
            potential: 1e-8,
            residual: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub group: Group,
    pub mode: Mode,
    /// Defaults to half-period for GL/U and strict for SL/SU.
    pub lattice: Option<Lattice>,
    pub tol: Tolerances,
    /// Loop samples for monodromy of pointwise symbols; defaults to `max(N, 64)`.
    pub loop_samples: Option<usize>,
}

impl CompareOptions {
    pub fn new(group: Group, mode: Mode) -> Self {
        CompareOptions {
            group,
            mode,
            lattice: None,
            tol: Tolerances::default(),
            loop_samples: None,
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice.unwrap_or(if self.group.is_special() {
            Lattice::Strict
        } else {
            Lattice::HalfPeriod
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Charges,
    Metric,
    Transition,
    Monodromy,
    Lift,
    Potentials,
    Residual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageResult {
    pub stage: Stage,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChargeComparison {
    pub c_top: [i8; 2],
    pub c_tem: Option<[i8; 2]>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricComparison {
    /// Whether a conformal factor was allowed.
    pub conformal: bool,
    /// `max |g̃ − λ̂g|` (with `λ̂ = 1` unless conformal).
    pub max_deviation: f64,
    /// Largest `max/min − 1` of the componentwise ratios (conformal only).
    pub ratio_spread: Option<f64>,
    pub factor_range: Option<[f64; 2]>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionSummary {
    pub group_defect: f64,
    pub lambda_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialComparison {
    pub cohomology: Option<CohomologyResult>,
    /// `max |Ã₄ − A₄|` (3D).
    pub electric_max_difference: Option<f64>,
    /// `max |Ã − Â|` where `Â` belongs to the gauged first symbol.
    pub gauge_potential_difference: Option<f64>,
    pub phase_winding: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residuals {
    /// `max ‖R*E^αR − Ẽ^α‖∞`.
    pub principal: Option<f64>,
    /// `max` over `E` and `F` after folding in the phase.
    pub full: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeSample {
    pub x: Vec<f64>,
    pub re: [[f64; 2]; 2],
    pub im: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub group: Group,
    pub mode: Mode,
    pub lattice: Lattice,
    pub grid: usize,
    pub equivalent: bool,
    pub failed_stage: Option<Stage>,
    pub stages: Vec<StageResult>,
    pub charges: Option<ChargeComparison>,
    pub metric: Option<MetricComparison>,
    pub transition: Option<TransitionSummary>,
    pub monodromy: Option<Vec<i8>>,
    pub lift_exists: Option<bool>,
    pub compensator: Option<Vec<u8>>,
    pub potentials: Option<PotentialComparison>,
    pub residuals: Residuals,
    /// The constructed `R` on a coarse subgrid.
    pub gauge_samples: Vec<GaugeSample>,
}

impl EquivalenceReport {
    fn new(opts: &CompareOptions, grid: usize) -> Self {
        EquivalenceReport {
            group: opts.group,
            mode: opts.mode,
            lattice: opts.lattice(),
            grid,
            equivalent: false,
            failed_stage: None,
            stages: vec![],
            charges: None,
            metric: None,
            transition: None,
            monodromy: None,
            lift_exists: None,
            compensator: None,
            potentials: None,
            residuals: Residuals {
                principal: None,
                full: None,
            },
            gauge_samples: vec![],
        }
    }

    fn pass(&mut self, stage: Stage, detail: impl Into<String>) {
        self.stages.push(StageResult {
            stage,
            passed: true,
            detail: detail.into(),
        });
    }

    fn fail(mut self, stage: Stage, detail: impl Into<String>) -> Decision {
        self.stages.push(StageResult {
            stage,
            passed: false,
            detail: detail.into(),
        });
        self.failed_stage = Some(stage);
        self.equivalent = false;
        Decision {
            report: self,
            gauge: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub report: EquivalenceReport,
    /// The constructed gauge map when equivalent.
    pub gauge: Option<GaugeMap>,
}

fn compare_charges(a: &Charges, b: &Charges) -> ChargeComparison {
    let c_tem = match (a.c_tem, b.c_tem) {
        (Some(x), Some(y)) => Some([x, y]),
        _ => None,
    };
    let matched = a.c_top == b.c_top && c_tem.is_none_or(|[x, y]| x == y);
    ChargeComparison {
        c_top: [a.c_top, b.c_top],
        c_tem,
        matched,
    }
}

fn compare_metrics(md: &MetricData, mdt: &MetricData, opts: &CompareOptions) -> MetricComparison {
    let conformal = opts.group == Group::GL;
    if !conformal {
        let dev = md
            .points
            .par_iter()
            .zip(mdt.points.par_iter())
            .map(|(a, b)| (&b.g_up - &a.g_up).amax())
            .reduce(|| 0.0, f64::max);
        return MetricComparison {
            conformal,
            max_deviation: dev,
            ratio_spread: None,
            factor_range: None,
            matched: dev <= opts.tol.metric,
        };
    }
    let per: Vec<(f64, f64, f64)> = md
        .points
        .par_iter()
        .zip(mdt.points.par_iter())
        .map(|(a, b)| {
            let scale = a.g_up.amax();
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (x, y) in a.g_up.iter().zip(b.g_up.iter()) {
                if x.abs() > 1e-6 * scale {
                    let r = y / x;
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
            }
            let factor = 0.5 * (lo + hi);
            let dev = (&b.g_up - &a.g_up * factor).amax();
            let spread = if lo > 0.0 {
                hi / lo - 1.0
            } else {
                f64::INFINITY
            };
            (factor, spread, dev)
        })
        .collect();
    let spread = per.iter().map(|p| p.1).fold(0.0, f64::max);
    let dev = per.iter().map(|p| p.2).fold(0.0, f64::max);
    let range = per.iter().fold([f64::INFINITY, f64::NEG_INFINITY], |r, p| {
        [r[0].min(p.0), r[1].max(p.0)]
    });
    MetricComparison {
        conformal,
        max_deviation: dev,
        ratio_spread: Some(spread),
        factor_range: Some(range),
        matched: range[0] > 0.0
            && spread <= opts.tol.conformal
            && dev <= opts.tol.conformal * range[1].max(1.0),
    }
}

/// Transition data with first partials at one point.
struct TransitionJet {
    lambda: f64,
    o0: DMatrix<f64>,
    dlog_lambda: [f64; 4],
    omega: Vec<DMatrix<f64>>,
    group_defect: f64,
}

fn transition_jet(j: &SymbolJet, jt: &SymbolJet, dim: usize) -> Result<TransitionJet> {
    let f = frame_jet_at(j, dim)?;
    let ft = frame_jet_at(jt, dim)?;
    let e_inv =
        f.e.clone()
            .try_inverse()
            .ok_or(Error::DegenerateFrame(0.0))?;
    let o = &ft.e * &e_inv;
    let n = normalize_transition(&o)?;
    let o_inv = o.clone().try_inverse().ok_or(Error::DegenerateFrame(0.0))?;
    let mut dlog_lambda = [0.0; 4];
    let mut omega = Vec::with_capacity(dim);
    for g in 0..dim {
        let d_o = (&ft.de[g] - &o * &f.de[g]) * &e_inv;
        let w = &o_inv * d_o;
        dlog_lambda[g] = w.trace() / dim as f64;
        omega.push(w - DMatrix::identity(dim, dim) * dlog_lambda[g]);
    }
    Ok(TransitionJet {
        lambda: n.lambda,
        o0: n.o0,
        dlog_lambda,
        omega,
        group_defect: n.group_defect,
    })
}

fn transition_at_point(s: &FullSymbol, st: &FullSymbol, p: &Point) -> Result<DMatrix<f64>> {
    let dim = s.dim();
    let e = frame_jet_at(&s.jet(p)?, dim)?.e;
    let et = frame_jet_at(&st.jet(p)?, dim)?.e;
    Ok(et * e.try_inverse().ok_or(Error::DegenerateFrame(0.0))?)
}

/// Monodromy of the frame transition from `s` to `st`.
pub fn transition_monodromy(
    s: &FullSymbol,
    st: &FullSymbol,
    chart: &Chart,
    o_grid: &[DMatrix<f64>],
    loop_samples: Option<usize>,
) -> Result<Vec<i8>> {
    if s.is_pointwise() && st.is_pointwise() {
        let n = loop_samples.unwrap_or(chart.resolution().max(64));
        monodromy_class(
            |p| transition_at_point(s, st, p),
            chart,
            n,
            MAX_LOOP_SAMPLES.max(n),
        )
    } else {
        monodromy_on_grid(o_grid, chart)
    }
}

fn check_inputs(s: &FullSymbol, st: &FullSymbol, chart: &Chart, group: Group) -> Result<()> {
    let dim = chart.dim();
    if group.dim() != dim {
        return Err(Error::GroupDimensionMismatch {
            group: group.to_string(),
            expected: group.dim(),
            dim,
        });
    }
    for sym in [s, st] {
        if sym.dim() != dim {
            return Err(Error::ArityMismatch {
                expected: dim,
                got: sym.dim(),
            });
        }
        let v = sym.validate(chart)?;
        if !v.valid {
            return Err(Error::InvalidSymbol(format!(
                "hermiticity defect {:e}, frame determinant {:e}, trace defect {:?}",
                v.hermiticity_defect, v.min_frame_det, v.trace_defect
            )));
        }
    }
    Ok(())
}

fn coarse_samples(chart: &Chart, r: &[MatJet]) -> Vec<GaugeSample> {
    let step = (chart.resolution() / 4).max(1);
    (0..chart.num_points())
        .filter(|&k| {
            chart.multi_index(k)[..chart.dim()]
                .iter()
                .all(|i| i % step == 0)
        })
        .map(|k| {
            let m = r[k].v.0;
            GaugeSample {
                x: chart.point(k).as_slice().to_vec(),
                re: [[m[0][0].re, m[0][1].re], [m[1][0].re, m[1][1].re]],
                im: [[m[0][0].im, m[0][1].im], [m[1][0].im, m[1][1].im]],
            }
        })
        .collect()
}

fn principal_residual(a: &[SymbolJet], b: &[SymbolJet], dim: usize) -> f64 {
    a.par_iter()
        .zip(b.par_iter())
        .map(|(x, y)| {
            (0..dim)
                .map(|k| (x.e[k] - y.e[k]).max_abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

fn full_residual(a: &[SymbolJet], b: &[SymbolJet], dim: usize) -> f64 {
    principal_residual(a, b, dim).max(
        a.par_iter()
            .zip(b.par_iter())
            .map(|(x, y)| (x.f - y.f).max_abs())
            .reduce(|| 0.0, f64::max),
    )
}

/// Decides whether `st` is the image of `s` under a gauge map in `opts.group`,
/// constructing the map when it is.
pub fn decide_equivalence(
    s: &FullSymbol,
    st: &FullSymbol,
    chart: &Chart,
    opts: &CompareOptions,
) -> Result<Decision> {
    check_inputs(s, st, chart, opts.group)?;
    let dim = chart.dim();
    let mut report = EquivalenceReport::new(opts, chart.resolution());

    let jets = s.sample(chart)?;
    let jets_t = st.sample(chart)?;
    let md = metric_data(s, chart)?;
    let mdt = metric_data(st, chart)?;

    let cc = compare_charges(&charges(s, &md, chart)?, &charges(st, &mdt, chart)?);
    let matched = cc.matched;
    let detail = format!("c_top {:?}, c_tem {:?}", cc.c_top, cc.c_tem);
    report.charges = Some(cc);
    if !matched {
        return Ok(report.fail(Stage::Charges, detail));
    }
    report.pass(Stage::Charges, detail);

    let mc = compare_metrics(&md, &mdt, opts);
    let matched = mc.matched;
    let detail = format!("max deviation {:e}", mc.max_deviation);
    report.metric = Some(mc);
    if !matched {
        return Ok(report.fail(Stage::Metric, detail));
    }
    report.pass(Stage::Metric, detail);

    let tj: Result<Vec<TransitionJet>> = jets
        .par_iter()
        .zip(jets_t.par_iter())
        .map(|(a, b)| transition_jet(a, b, dim))
        .collect();
    let tj = match tj {
        Ok(t) => t,
        Err(e) => return Ok(report.fail(Stage::Transition, e.to_string())),
    };
    let group_defect = tj.iter().map(|t| t.group_defect).fold(0.0, f64::max);
    let lambda_range = tj.iter().fold([f64::INFINITY, 0.0f64], |r, t| {
        [r[0].min(t.lambda), r[1].max(t.lambda)]
    });
    report.transition = Some(TransitionSummary {
        group_defect,
        lambda_range,
    });
    report.pass(Stage::Transition, format!("group defect {group_defect:e}"));

    let o0: Vec<DMatrix<f64>> = tj.iter().map(|t| t.o0.clone()).collect();
    let signs = match transition_monodromy(s, st, chart, &o0, opts.loop_samples) {
        Ok(v) => v,
        Err(e) => return Ok(report.fail(Stage::Monodromy, e.to_string())),
    };
    report.monodromy = Some(signs.clone());
    let family = if opts.group.is_special() {
        LiftFamily::Special
    } else {
        LiftFamily::General
    };
    if family == LiftFamily::Special && signs.iter().any(|s| *s != 1) {
        report.lift_exists = Some(false);
        return Ok(report.fail(
            Stage::Monodromy,
            format!("monodromy {signs:?} admits no {} lift", opts.group),
        ));
    }
    report.pass(Stage::Monodromy, format!("monodromy {signs:?}"));

    let lift = match global_lift_torus(&o0, chart, &signs, family) {
        Ok(l) => l,
        Err(e) => {
            report.lift_exists = Some(false);
            return Ok(report.fail(Stage::Lift, e.to_string()));
        }
    };
    report.lift_exists = Some(true);
    report.compensator = Some(lift.kappa.clone());

    // R = λ^{−p} e^{−iκ·x/2} V*, with dV = V X(Ω).
    let p = if dim == 4 { 1.5 } else { 1.0 };
    let kappa = lift.kappa.clone();
    let r_jets: Vec<MatJet> = (0..chart.num_points())
        .into_par_iter()
        .map(|k| {
            let t = &tj[k];
            let x = chart.point(k);
            let phase: f64 = kappa
                .iter()
                .zip(x.as_slice())
                .map(|(q, x)| *q as f64 * x)
                .sum();
            let pre = C64::new(0.0, -0.5 * phase).exp() * t.lambda.powf(-p);
            let vd = lift.sheet[k].dagger();
            let v = vd.scale(pre);
            let mut d = [Mat2::ZERO; 4];
            for g in 0..dim {
                let log_term = C64::new(-p * t.dlog_lambda[g], -0.5 * kappa[g] as f64);
                d[g] = v.scale(log_term) + (algebra_lift(&t.omega[g]).dagger() * vd).scale(pre);
            }
            MatJet { v, d }
        })
        .collect();
    let gauge = match GaugeMap::from_samples(chart, r_jets.clone(), opts.group) {
        Ok(g) => g,
        Err(e) => return Ok(report.fail(Stage::Lift, e.to_string())),
    };
    report.pass(
        Stage::Lift,
        format!(
            "compensator {:?}, verification {:e}",
            lift.kappa, lift.verification
        ),
    );

    let shat: Vec<SymbolJet> = jets
        .par_iter()
        .zip(r_jets.par_iter())
        .map(|(a, r)| gauge_jet(a, r, dim))
        .collect();
    let principal = principal_residual(&shat, &jets_t, dim);
    report.residuals.principal = Some(principal);

    if opts.mode == Mode::Principal {
        report.gauge_samples = coarse_samples(chart, &r_jets);
        if principal > opts.tol.residual {
            return Ok(report.fail(Stage::Residual, format!("principal residual {principal:e}")));
        }
        report.pass(Stage::Residual, format!("principal residual {principal:e}"));
        report.equivalent = true;
        return Ok(Decision {
            report,
            gauge: Some(gauge),
        });
    }

    let pot = potentials(s, &md, chart)?;
    let pot_t = potentials(st, &mdt, chart)?;
    let mut comparison = PotentialComparison {
        cohomology: None,
        electric_max_difference: None,
        gauge_potential_difference: None,
        phase_winding: None,
    };
    let coh = cohomology_compare(&pot, &pot_t, chart, opts.lattice());
    let coh = match coh {
        Ok(c) => c,
        Err(e) => {
            report.potentials = Some(comparison);
            return Ok(report.fail(Stage::Potentials, e.to_string()));
        }
    };
    let same_class = coh.same_class;
    let periods = coh.periods.clone();
    comparison.cohomology = Some(coh);
    if dim == 3 {
        let diff = pot
            .values
            .iter()
            .zip(&pot_t.values)
            .map(|(a, b)| (a.a4 - b.a4).abs())
            .fold(0.0, f64::max);
        comparison.electric_max_difference = Some(diff);
        if diff > opts.tol.potential {
            report.potentials = Some(comparison);
            return Ok(report.fail(
                Stage::Potentials,
                format!("electric potentials differ by {diff:e}"),
            ));
        }
    }
    if !same_class {
        report.potentials = Some(comparison);
        return Ok(report.fail(
            Stage::Potentials,
            format!("potential periods {periods:?} outside the lattice"),
        ));
    }

    let shat_sym = FullSymbol::from_samples(chart, shat)?;
    let md_hat = metric_data(&shat_sym, chart)?;
    let pot_hat = potentials(&shat_sym, &md_hat, chart)?;
    let omega: Vec<Vec<f64>> = (0..dim)
        .map(|a| {
            pot_t
                .values
                .iter()
                .zip(&pot_hat.values)
                .map(|(x, y)| x.a[a] - y.a[a])
                .collect()
        })
        .collect();
    let gap = omega.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    comparison.gauge_potential_difference = Some(gap);

    let final_jets: Vec<MatJet> = if opts.group.is_special() {
        if gap > opts.tol.potential {
            report.potentials = Some(comparison);
            return Ok(report.fail(Stage::Potentials, format!("potentials differ by {gap:e}")));
        }
        r_jets
    } else {
        let phase = match construct_phase(&omega, chart) {
            Ok(ph) => ph,
            Err(e) => {
                report.potentials = Some(comparison);
                return Ok(report.fail(Stage::Potentials, e.to_string()));
            }
        };
        comparison.phase_winding = Some(phase.winding.clone());
        r_jets
            .par_iter()
            .enumerate()
            .map(|(k, r)| {
                let z = C64::new(0.0, phase.value(chart, k)).exp();
                let mut d = [Mat2::ZERO; 4];
                for g in 0..dim {
                    d[g] = (r.v.scale(C64::new(0.0, omega[g][k])) + r.d[g]).scale(z);
                }
                MatJet { v: r.v.scale(z), d }
            })
            .collect()
    };
    report.potentials = Some(comparison);
    report.pass(Stage::Potentials, format!("potential gap {gap:e}"));

    let gauge = match GaugeMap::from_samples(chart, final_jets.clone(), opts.group) {
        Ok(g) => g,
        Err(e) => return Ok(report.fail(Stage::Lift, e.to_string())),
    };
    let shat: Vec<SymbolJet> = jets
        .par_iter()
        .zip(final_jets.par_iter())
        .map(|(a, r)| gauge_jet(a, r, dim))
        .collect();
    let full = full_residual(&shat, &jets_t, dim);
    report.residuals.full = Some(full);
    report.gauge_samples = coarse_samples(chart, &final_jets);
    if full > opts.tol.residual {
        return Ok(report.fail(Stage::Residual, format!("full residual {full:e}")));
    }
    report.pass(Stage::Residual, format!("full residual {full:e}"));
    report.equivalent = true;
    Ok(Decision {
        report,
        gauge: Some(gauge),
    })
}

/// Frame transition and monodromy between two symbols, without building a gauge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftReport {
    pub grid: usize,
    pub lambda_range: [f64; 2],
    pub group_defect: f64,
    pub monodromy: Vec<i8>,
    pub special_lift_exists: bool,
    pub general_lift_exists: bool,
    /// The transition `O` at the origin, row-major.
    pub transition_at_origin: Vec<Vec<f64>>,
}

pub fn lift_report(
    s: &FullSymbol,
    st: &FullSymbol,
    chart: &Chart,
    loop_samples: Option<usize>,
) -> Result<LiftReport> {
    let dim = chart.dim();
    for sym in [s, st] {
        if sym.dim() != dim {
            return Err(Error::ArityMismatch {
                expected: dim,
                got: sym.dim(),
            });
        }
    }
    let jets = s.sample(chart)?;
    let jets_t = st.sample(chart)?;
    let parts: Result<Vec<(DMatrix<f64>, f64, f64, DMatrix<f64>)>> = jets
        .par_iter()
        .zip(jets_t.par_iter())
        .map(|(a, b)| {
            let e = frame_jet_at(a, dim)?.e;
            let et = frame_jet_at(b, dim)?.e;
            let o = et * e.try_inverse().ok_or(Error::DegenerateFrame(0.0))?;
            let n = normalize_transition(&o)?;
            Ok((n.o0, n.lambda, n.group_defect, o))
        })
        .collect();
    let parts = parts?;
    let o0: Vec<DMatrix<f64>> = parts.iter().map(|p| p.0.clone()).collect();
    let monodromy = transition_monodromy(s, st, chart, &o0, loop_samples)?;
    let general_lift_exists =
        global_lift_torus(&o0, chart, &monodromy, LiftFamily::General).is_ok();
    let origin = &parts[0].3;
    Ok(LiftReport {
        grid: chart.resolution(),
        lambda_range: parts.iter().fold([f64::INFINITY, 0.0f64], |r, p| {
            [r[0].min(p.1), r[1].max(p.1)]
        }),
        group_defect: parts.iter().map(|p| p.2).fold(0.0, f64::max),
        special_lift_exists: monodromy.iter().all(|s| *s == 1) && general_lift_exists,
        general_lift_exists,
        monodromy,
        transition_at_origin: (0..dim)
            .map(|i| (0..dim).map(|j| origin[(i, j)]).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    #[test]
    fn dirac_twisted_unitary_and_special_unitary() {
        let c = Chart::new(3, 16, None).unwrap();
        let a = builtins::dirac3(&c).unwrap();
        let b = builtins::twisted3(&c).unwrap();
        let u = decide_equivalence(&a, &b, &c, &CompareOptions::new(Group::U, Mode::Principal))
            .unwrap();
        assert!(u.report.equivalent, "{:?}", u.report.stages);
        assert!(u.report.residuals.principal.unwrap() < 1e-8);
        let su = decide_equivalence(&a, &b, &c, &CompareOptions::new(Group::SU, Mode::Principal))
            .unwrap();
        assert!(!su.report.equivalent);
        assert_eq!(su.report.failed_stage, Some(Stage::Monodromy));
        assert_eq!(su.report.monodromy, Some(vec![1, 1, -1]));
    }

    #[test]
    fn reflexive_weyl() {
        let c = Chart::new(4, 8, None).unwrap();
        let w = builtins::weyl4(&c).unwrap();
        for g in [Group::GL, Group::SL] {
            let d = decide_equivalence(&w, &w, &c, &CompareOptions::new(g, Mode::Full)).unwrap();
            assert!(d.report.equivalent, "{:?}", d.report.stages);
            let r = d.gauge.unwrap().jet(&Point::origin(4)).unwrap().v;
            assert!(
                (r - Mat2::IDENTITY).max_abs() < 1e-12 || (r + Mat2::IDENTITY).max_abs() < 1e-12
            );
        }
    }

    #[test]
    fn group_dimension_mismatch() {
        let c = Chart::new(3, 8, None).unwrap();
        let a = builtins::dirac3(&c).unwrap();
        assert!(matches!(
            decide_equivalence(&a, &a, &c, &CompareOptions::new(Group::GL, Mode::Full)),
            Err(Error::GroupDimensionMismatch { .. })
        ));
    }
}
