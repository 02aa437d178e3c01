//! Gauge maps and their action `S(u, v) ↦ S(Ru, Rv)` on full symbols.

use crate::chart::{Chart, Point};
use crate::error::{Error, Result};
use crate::expr::{Expr, MatrixExpr};
use crate::mat2::{Mat2, MatJet};
use crate::symbol::{FullSymbol, SymbolJet};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub const GROUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    GL,
    SL,
    U,
    SU,
}

impl Group {
    /// Chart dimension the equivalence problem for this group lives in.
    pub fn dim(self) -> usize {
        match self {
            Group::GL | Group::SL => 4,
            Group::U | Group::SU => 3,
        }
    }

    pub fn is_special(self) -> bool {
        matches!(self, Group::SL | Group::SU)
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::GL => "gl",
            Group::SL => "sl",
            Group::U => "u",
            Group::SU => "su",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Group::GL),
            "sl" => Ok(Group::SL),
            "u" => Ok(Group::U),
            "su" => Ok(Group::SU),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// Checks membership of one matrix; returns the relevant defect.
pub fn group_defect(m: &Mat2, group: Group) -> f64 {
    let det = m.det();
    let mut defect: f64 = 0.0;
    if group.is_special() {
        defect = defect.max((det - C64::new(1.0, 0.0)).norm());
    }
    if matches!(group, Group::U | Group::SU) {
        defect = defect.max((m.dagger() * *m - Mat2::IDENTITY).max_abs());
    }
    defect
}

#[derive(Debug, Clone)]
enum Repr {
    Expr(MatrixExpr),
    Sampled {
        chart: Chart,
        jets: Arc<Vec<MatJet>>,
    },
}

/// A matrix field `R(x)` tagged with its group, checked on a grid.
#[derive(Debug, Clone)]
pub struct GaugeMap {
    group: Group,
    repr: Repr,
}

fn check_samples(values: impl ParallelIterator<Item = Mat2>, group: Group) -> Result<()> {
    let (min_det, defect) = values
        .map(|m| (m.det().norm(), group_defect(&m, group)))
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    if !(min_det > GROUP_TOL) {
        return Err(Error::SingularGauge(min_det));
    }
    if !(defect <= GROUP_TOL) {
        return Err(Error::NotInGroup(format!(
            "gauge map misses {group} by {defect:e}"
        )));
    }
    Ok(())
}

impl GaugeMap {
    pub fn new(r: MatrixExpr, group: Group, chart: &Chart) -> Result<Self> {
        r.bind(chart.dim())?;
        let vals: Result<Vec<Mat2>> = (0..chart.num_points())
            .into_par_iter()
            .map(|k| r.value(&chart.point(k)))
            .collect();
        check_samples(vals?.into_par_iter(), group)?;
        Ok(GaugeMap {
            group,
            repr: Repr::Expr(r),
        })
    }

    pub fn from_samples(chart: &Chart, jets: Vec<MatJet>, group: Group) -> Result<Self> {
        if jets.len() != chart.num_points() {
            return Err(Error::GridMismatch);
        }
        check_samples(jets.par_iter().map(|j| j.v), group)?;
        Ok(GaugeMap {
            group,
            repr: Repr::Sampled {
                chart: chart.clone(),
                jets: Arc::new(jets),
            },
        })
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn expression(&self) -> Option<&MatrixExpr> {
        match &self.repr {
            Repr::Expr(e) => Some(e),
            Repr::Sampled { .. } => None,
        }
    }

    pub fn sample_chart(&self) -> Option<&Chart> {
        match &self.repr {
            Repr::Sampled { chart, .. } => Some(chart),
            Repr::Expr(_) => None,
        }
    }

    pub fn jet(&self, x: &Point) -> Result<MatJet> {
        match &self.repr {
            Repr::Expr(e) => e.eval(x),
            Repr::Sampled { chart, jets } => {
                let k = chart
                    .grid_index_of(x)
                    .ok_or(Error::OffGrid(chart.resolution()))?;
                Ok(jets[k])
            }
        }
    }

    pub fn sample(&self, chart: &Chart) -> Result<Arc<Vec<MatJet>>> {
        match &self.repr {
            Repr::Sampled { chart: own, jets } => {
                if own.resolution() == chart.resolution() && own.dim() == chart.dim() {
                    Ok(jets.clone())
                } else {
                    Err(Error::GridMismatch)
                }
            }
            Repr::Expr(e) => {
                let v: Result<Vec<MatJet>> = (0..chart.num_points())
                    .into_par_iter()
                    .map(|k| e.eval(&chart.point(k)))
                    .collect();
                Ok(Arc::new(v?))
            }
        }
    }

    /// Pointwise inverse `R⁻¹`, in the same group.
    pub fn inverse(&self, chart: &Chart) -> Result<GaugeMap> {
        match &self.repr {
            Repr::Expr(r) => {
                let m = &r.0;
                let det = m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]));
                let inv = MatrixExpr([
                    [m[1][1].div(&det), m[0][1].neg().div(&det)],
                    [m[1][0].neg().div(&det), m[0][0].div(&det)],
                ]);
                GaugeMap::new(inv, self.group, chart)
            }
            Repr::Sampled { chart: own, jets } => {
                let inv: Result<Vec<MatJet>> = jets
                    .iter()
                    .map(|j| {
                        let vi = j.v.inverse().ok_or(Error::SingularGauge(0.0))?;
                        Ok(MatJet {
                            v: vi,
                            d: j.d.map(|d| -(vi * d * vi)),
                        })
                    })
                    .collect();
                GaugeMap::from_samples(own, inv?, self.group)
            }
        }
    }

    /// Pointwise product `self · other`: acting by `self` then by `other`.
    pub fn compose(&self, other: &GaugeMap, chart: &Chart) -> Result<GaugeMap> {
        let group = if self.group == other.group {
            self.group
        } else {
            Group::GL
        };
        if let (Repr::Expr(a), Repr::Expr(b)) = (&self.repr, &other.repr) {
            return GaugeMap::new(a.mul(b), group, chart);
        }
        let (a, b) = (self.sample(chart)?, other.sample(chart)?);
        let jets = a.iter().zip(b.iter()).map(|(x, y)| x.mul(y)).collect();
        GaugeMap::from_samples(chart, jets, group)
    }
}

/// Transformed jet: `Ẽ^α = R*E^αR`, `F̃ = R*FR + (i/2)(R*_{,α}E^αR − R*E^αR_{,α})`.
pub fn gauge_jet(s: &SymbolJet, r: &MatJet, dim: usize) -> SymbolJet {
    s.gauged(r, dim)
}

/// `S ↦ S(Ru, Rv)`. Stays pointwise (and symbolic on request) when both inputs
/// are pointwise.
pub fn apply_gauge(s: &FullSymbol, r: &GaugeMap, chart: &Chart) -> Result<FullSymbol> {
    let dim = s.dim();
    if chart.dim() != dim {
        return Err(Error::GridMismatch);
    }
    if let (true, Some(rx)) = (s.is_pointwise(), r.expression()) {
        return FullSymbol::gauged(s, rx, chart);
    }
    let grid = s.sample_chart().or(r.sample_chart()).unwrap_or(chart);
    if grid.resolution() != chart.resolution() {
        return Err(Error::GridMismatch);
    }
    let sj = s.sample(chart)?;
    let rj = r.sample(chart)?;
    let jets: Vec<SymbolJet> = sj
        .par_iter()
        .zip(rj.par_iter())
        .map(|(a, b)| gauge_jet(a, b, dim))
        .collect();
    FullSymbol::from_samples(chart, jets)
}

/// Non-vanishing complex scalar field `c(x)` of a volume form.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeForm(pub Expr);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReduceSide {
    /// Gauge the second symbol by `diag(c/c̃, 1)`.
    Second,
    /// Gauge the first symbol by `diag(c̃/c, 1)`.
    First,
}

/// The gauge `diag(num/den, 1)`.
pub fn volume_gauge(num: &VolumeForm, den: &VolumeForm, chart: &Chart) -> Result<GaugeMap> {
    for v in [num, den] {
        v.0.bind(chart.dim())?;
        let min = (0..chart.num_points())
            .into_par_iter()
            .map(|k| v.0.value_at(chart.point(k).as_slice()).map(|z| z.norm()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if !(min > GROUP_TOL) {
            return Err(Error::VanishingVolumeForm);
        }
    }
    let q = MatrixExpr([
        [num.0.div(&den.0), Expr::zero()],
        [Expr::zero(), Expr::one()],
    ]);
    GaugeMap::new(q, Group::GL, chart)
}

/// Matches volume forms so a subsequent SL/SU comparison applies.
pub fn volume_form_reduction(
    s: &FullSymbol,
    c: &VolumeForm,
    st: &FullSymbol,
    ct: &VolumeForm,
    chart: &Chart,
    side: ReduceSide,
) -> Result<(FullSymbol, FullSymbol)> {
    match side {
        ReduceSide::Second => {
            let q = volume_gauge(c, ct, chart)?;
            Ok((s.clone(), apply_gauge(st, &q, chart)?))
        }
        ReduceSide::First => {
            let q = volume_gauge(ct, c, chart)?;
            Ok((apply_gauge(s, &q, chart)?, st.clone()))
        }
    }
}
