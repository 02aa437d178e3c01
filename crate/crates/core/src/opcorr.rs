//! Sesquilinear forms versus the operators they define through an inner
//! product `⟨u, v⟩_μ = ∫ u* v μ`.

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::MetricData;
use crate::mat2::Mat2;
use crate::symbol::{FullSymbol, SymbolJet};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

type Vec2 = [C64; 2];

const ZERO2: Vec2 = [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];

/// A ℂ²-valued section with first partials at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionJet {
    pub v: Vec2,
    pub d: [Vec2; 4],
}

/// A section given by expressions or by grid samples.
#[derive(Debug, Clone, PartialEq)]
pub enum SectionField {
    Expr([Expr; 2]),
    Grid { chart: Chart, values: Vec<Vec2> },
}

fn dot(u: &Vec2, v: &Vec2) -> C64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

impl SectionField {
    pub fn from_exprs(a: Expr, b: Expr) -> Self {
        SectionField::Expr([a, b])
    }

    pub fn values(&self, chart: &Chart) -> Result<Vec<Vec2>> {
        Ok(self.jets(chart)?.into_iter().map(|j| j.v).collect())
    }

    /// Jets on the grid: exact for expressions, fourth-order central
    /// differences for grid samples.
    pub fn jets(&self, chart: &Chart) -> Result<Vec<SectionJet>> {
        match self {
            SectionField::Expr(e) => {
                for x in e {
                    x.bind(chart.dim())?;
                }
                (0..chart.num_points())
                    .into_par_iter()
                    .map(|k| {
                        let p = chart.point(k);
                        let (a, b) = (e[0].eval(&p)?, e[1].eval(&p)?);
                        let mut d = [ZERO2; 4];
                        for g in 0..4 {
                            d[g] = [a.d[g], b.d[g]];
                        }
                        Ok(SectionJet { v: [a.v, b.v], d })
                    })
                    .collect()
            }
            SectionField::Grid { chart: own, values } => {
                if own.resolution() != chart.resolution()
                    || own.dim() != chart.dim()
                    || values.len() != chart.num_points()
                {
                    return Err(Error::GridMismatch);
                }
                let n = chart.resolution() as isize;
                let h = chart.spacing();
                Ok((0..chart.num_points())
                    .into_par_iter()
                    .map(|k| {
                        let idx = chart.multi_index(k);
                        let mut d = [ZERO2; 4];
                        for g in 0..chart.dim() {
                            let at = |off: isize| {
                                let mut j = idx;
                                j[g] = (idx[g] as isize + off).rem_euclid(n) as usize;
                                values[chart.flat_index(&j[..chart.dim()])]
                            };
                            let (m2, m1, p1, p2) = (at(-2), at(-1), at(1), at(2));
                            for c in 0..2 {
                                d[g][c] = (m2[c] - m1[c] * 8.0 + p1[c] * 8.0 - p2[c]) / (12.0 * h);
                            }
                        }
                        SectionJet { v: values[k], d }
                    })
                    .collect())
            }
        }
    }
}

/// Positive density `μ` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub values: Vec<f64>,
}

impl DensityField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidSymbol("density must be positive".into()));
        }
        Ok(DensityField { values })
    }

    pub fn constant(chart: &Chart, c: f64) -> Result<Self> {
        Self::new(vec![c; chart.num_points()])
    }

    /// `μ = ρ`.
    pub fn from_metric(md: &MetricData) -> Self {
        DensityField {
            values: md.points.iter().map(|p| p.rho).collect(),
        }
    }
}

fn quadrature(chart: &Chart, values: Vec<C64>) -> Result<C64> {
    chart.integrate_periodic(&values)
}

/// `∫ −(i/2)u*E^α v_{,α} + (i/2)u*_{,α}E^α v + u*Fv`.
pub fn form_value(
    s: &FullSymbol,
    u: &SectionField,
    v: &SectionField,
    chart: &Chart,
) -> Result<C64> {
    let sj = s.sample(chart)?;
    form_value_on(&sj, s.dim(), &u.jets(chart)?, &v.jets(chart)?, chart)
}

pub fn form_value_on(
    sj: &[SymbolJet],
    dim: usize,
    u: &[SectionJet],
    v: &[SectionJet],
    chart: &Chart,
) -> Result<C64> {
    if sj.len() != u.len() || u.len() != v.len() {
        return Err(Error::GridMismatch);
    }
    let half_i = C64::new(0.0, 0.5);
    let vals: Vec<C64> = (0..sj.len())
        .into_par_iter()
        .map(|k| {
            let (j, a, b) = (&sj[k], &u[k], &v[k]);
            let mut acc = dot(&a.v, &j.f.apply(b.v));
            for g in 0..dim {
                acc += -half_i * dot(&a.v, &j.e[g].apply(b.d[g]))
                    + half_i * dot(&a.d[g], &j.e[g].apply(b.v));
            }
            acc
        })
        .collect();
    quadrature(chart, vals)
}

/// `⟨u, v⟩_μ = ∫ u* v μ`.
pub fn inner_product(
    u: &SectionField,
    v: &SectionField,
    mu: &DensityField,
    chart: &Chart,
) -> Result<C64> {
    let (a, b) = (u.values(chart)?, v.values(chart)?);
    inner_product_on(&a, &b, mu, chart)
}

pub fn inner_product_on(a: &[Vec2], b: &[Vec2], mu: &DensityField, chart: &Chart) -> Result<C64> {
    if a.len() != b.len() || a.len() != mu.values.len() {
        return Err(Error::GridMismatch);
    }
    quadrature(
        chart,
        (0..a.len())
            .map(|k| dot(&a[k], &b[k]) * mu.values[k])
            .collect(),
    )
}

/// `L_sub = F + (i/2) E^α_{,α}`.
pub fn subprincipal_of_operator_at(jet: &SymbolJet, dim: usize) -> Mat2 {
    let div = (0..dim).fold(Mat2::ZERO, |m, a| m + jet.de[a][a]);
    jet.f + div.scale(C64::new(0.0, 0.5))
}

pub fn subprincipal_of_operator(s: &FullSymbol, chart: &Chart) -> Result<Vec<Mat2>> {
    let dim = s.dim();
    Ok(s.sample(chart)?
        .iter()
        .map(|j| subprincipal_of_operator_at(j, dim))
        .collect())
}

/// `Lv = (1/μ)(−iE^α v_{,α} + Fv − (i/2)E^α_{,α} v)`.
pub fn apply_operator(
    s: &FullSymbol,
    mu: &DensityField,
    v: &SectionField,
    chart: &Chart,
) -> Result<SectionField> {
    let sj = s.sample(chart)?;
    let values = apply_operator_on(&sj, s.dim(), mu, &v.jets(chart)?)?;
    Ok(SectionField::Grid {
        chart: chart.clone(),
        values,
    })
}

pub fn apply_operator_on(
    sj: &[SymbolJet],
    dim: usize,
    mu: &DensityField,
    v: &[SectionJet],
) -> Result<Vec<Vec2>> {
    if sj.len() != v.len() || v.len() != mu.values.len() {
        return Err(Error::GridMismatch);
    }
    let i = C64::new(0.0, 1.0);
    Ok((0..sj.len())
        .into_par_iter()
        .map(|k| {
            let (j, b) = (&sj[k], &v[k]);
            let div = (0..dim).fold(Mat2::ZERO, |m, a| m + j.de[a][a]);
            let mut m = j.f.apply(b.v);
            let corr = div.scale(i * -0.5).apply(b.v);
            for c in 0..2 {
                m[c] += corr[c];
            }
            for g in 0..dim {
                let t = j.e[g].apply(b.d[g]);
                for c in 0..2 {
                    m[c] -= i * t[c];
                }
            }
            let w = 1.0 / mu.values[k];
            [m[0] * w, m[1] * w]
        })
        .collect())
}
