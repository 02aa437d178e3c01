//! Closed 1-forms on the grid: class comparison and phase construction.

use crate::chart::{Chart, TWO_PI};
use crate::error::{Error, Result};
use crate::geometry::CovectorPotential;
use crate::spectral;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const CLOSED_TOL: f64 = 1e-8;
pub const PERIOD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lattice {
    /// Same class iff all periods vanish.
    Strict,
    /// Same class iff all periods lie in `πℤ`.
    HalfPeriod,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohomologyResult {
    pub same_class: bool,
    pub lattice: Lattice,
    /// `∮ (Ã − A)` along each coordinate circle through the origin.
    pub periods: Vec<f64>,
    pub max_curl: f64,
}

fn nearest_multiple_defect(x: f64, unit: f64) -> f64 {
    (x - unit * (x / unit).round()).abs()
}

/// Compares `ω` against the period lattice.
pub fn classify_form(
    omega: &[Vec<f64>],
    chart: &Chart,
    lattice: Lattice,
) -> Result<CohomologyResult> {
    let max_curl = spectral::curl_defect(omega, chart);
    if !(max_curl <= CLOSED_TOL) {
        return Err(Error::NotClosed(max_curl));
    }
    let periods = spectral::axis_periods(omega, chart);
    let same_class = periods.iter().all(|p| match lattice {
        Lattice::Strict => p.abs() <= PERIOD_TOL,
        Lattice::HalfPeriod => nearest_multiple_defect(*p, PI) <= PERIOD_TOL,
    });
    Ok(CohomologyResult {
        same_class,
        lattice,
        periods,
        max_curl,
    })
}

pub fn difference(a: &CovectorPotential, at: &CovectorPotential, dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|k| {
            at.values
                .iter()
                .zip(&a.values)
                .map(|(x, y)| x.a[k] - y.a[k])
                .collect()
        })
        .collect()
}

pub fn cohomology_compare(
    a: &CovectorPotential,
    at: &CovectorPotential,
    chart: &Chart,
    lattice: Lattice,
) -> Result<CohomologyResult> {
    if a.values.len() != chart.num_points() || at.values.len() != chart.num_points() {
        return Err(Error::GridMismatch);
    }
    classify_form(&difference(a, at, chart.dim()), chart, lattice)
}

/// A circle-valued phase `φ = w·x + ψ` with integer winding `w` and periodic `ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    pub winding: Vec<i64>,
    pub periodic: Vec<f64>,
    pub max_curl: f64,
}

impl Phase {
    pub fn value(&self, chart: &Chart, k: usize) -> f64 {
        let x = chart.point(k);
        self.winding
            .iter()
            .zip(x.as_slice())
            .map(|(w, x)| *w as f64 * x)
            .sum::<f64>()
            + self.periodic[k]
    }
}

/// `φ` with `∇φ = ω`, single valued modulo `2π`.
pub fn construct_phase(omega: &[Vec<f64>], chart: &Chart) -> Result<Phase> {
    let max_curl = spectral::curl_defect(omega, chart);
    if !(max_curl <= CLOSED_TOL) {
        return Err(Error::NotClosed(max_curl));
    }
    let periods = spectral::axis_periods(omega, chart);
    if periods
        .iter()
        .any(|p| nearest_multiple_defect(*p, TWO_PI) > PERIOD_TOL)
    {
        return Err(Error::NoSingleValuedPhase(periods));
    }
    let winding: Vec<i64> = periods
        .iter()
        .map(|p| (p / TWO_PI).round() as i64)
        .collect();
    let reduced: Vec<Vec<f64>> = omega
        .iter()
        .zip(&winding)
        .map(|(w, n)| w.iter().map(|v| v - *n as f64).collect())
        .collect();
    let periodic = spectral::potential_of(&reduced, chart);
    Ok(Phase {
        winding,
        periodic,
        max_curl,
    })
}
