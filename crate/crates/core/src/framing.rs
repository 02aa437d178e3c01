//! Frames from principal symbols, frame transitions, the spin homomorphism
//! and its two-valued inverse, and lifting over torus cycles.
//!
//! Convention: `Π(𝓡)_j^k = ½ tr(s^j 𝓡 s^k 𝓡*)`, i.e. `𝓡 s^k 𝓡* = Π(𝓡)_j^k s^j`.
//! With this choice `Π` is a homomorphism, `Π(Id) = Id`, and a gauge map acting
//! by `E ↦ R* E R` moves frames by `ẽ = (ρ/ρ̃) Π(R*) e`.

use crate::chart::{Chart, Point};
use crate::error::{Error, Result};
use crate::geometry::MetricData;
use crate::mat2::{pauli, Mat2};
use crate::symbol::{FullSymbol, SymbolJet};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

pub const ORTHONORMAL_TOL: f64 = 1e-9;
pub const GROUP_TOL: f64 = 1e-9;
pub const LIFT_TOL: f64 = 1e-8;
/// A continuation step must beat the other sign by this factor.
pub const SIGN_MARGIN: f64 = 2.0;
pub const MAX_LOOP_SAMPLES: usize = 1 << 14;

pub fn eta_matrix(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            0.0
        } else if i == 3 {
            -1.0
        } else {
            1.0
        }
    })
}

/// `Π(𝓡)` restricted to the first `dim` basis elements.
pub fn spin_hom(r: &Mat2, dim: usize) -> DMatrix<f64> {
    let s = pauli();
    let rd = r.dagger();
    let images: Vec<Mat2> = (0..dim).map(|k| *r * s[k] * rd).collect();
    DMatrix::from_fn(dim, dim, |j, k| 0.5 * (s[j] * images[k]).trace().re)
}

/// Frame with row `j` the vector `e_j`, plus its partials `de[γ] = ∂_γ e`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameJet {
    pub e: DMatrix<f64>,
    pub de: Vec<DMatrix<f64>>,
    pub rho: f64,
    /// `det tr(s^j E^α)/2`.
    pub c_det: f64,
}

fn density_exponent(dim: usize) -> f64 {
    if dim == 4 {
        1.0 / 3.0
    } else {
        0.5
    }
}

/// `e_j^α = tr(s^j E^α)/(2ρ)` with `ρ = |det c|^{1/3}` (4D) or `|det c|^{1/2}` (3D).
pub fn frame_jet_at(jet: &SymbolJet, dim: usize) -> Result<FrameJet> {
    let s = pauli();
    let c = jet.pauli_frame(dim);
    let c_det = c.determinant();
    if c_det.abs() <= crate::symbol::NONDEGENERATE_TOL {
        return Err(Error::DegenerateFrame(c_det.abs()));
    }
    let p = density_exponent(dim);
    let rho = c_det.abs().powf(p);
    let e = &c / rho;
    let c_inv = c
        .clone()
        .try_inverse()
        .ok_or(Error::DegenerateFrame(c_det.abs()))?;
    let de = (0..dim)
        .map(|g| {
            let dc = DMatrix::from_fn(dim, dim, |j, a| 0.5 * (s[j] * jet.de[a][g]).trace().re);
            let dlog = (&c_inv * &dc).trace() * p;
            &dc / rho - &e * dlog
        })
        .collect();
    Ok(FrameJet { e, de, rho, c_det })
}

/// Orthonormal frame field on the grid.
#[derive(Debug, Clone)]
pub struct Frame {
    pub dim: usize,
    pub e: Vec<DMatrix<f64>>,
    /// Largest deviation of `g(e_j, e_k)` from `η_{jk}`.
    pub orthonormality_defect: f64,
    /// Range of `|det tr(s^j E^α)/2|`.
    pub det_range: (f64, f64),
}

pub fn orthonormality_defect(e: &DMatrix<f64>, g_down: &DMatrix<f64>) -> f64 {
    (e * g_down * e.transpose() - eta_matrix(e.nrows())).amax()
}

pub fn frame_from_symbol(s: &FullSymbol, md: &MetricData, chart: &Chart) -> Result<Frame> {
    let jets = s.sample(chart)?;
    let dim = s.dim();
    let rows: Result<Vec<(DMatrix<f64>, f64, f64)>> = jets
        .par_iter()
        .zip(md.points.par_iter())
        .map(|(j, pm)| {
            let fj = frame_jet_at(j, dim)?;
            let defect = orthonormality_defect(&fj.e, &pm.g_down);
            Ok((fj.e, defect, fj.c_det.abs()))
        })
        .collect();
    let rows = rows?;
    let defect = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let det_range = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.2), hi.max(r.2))
    });
    if defect > ORTHONORMAL_TOL {
        return Err(Error::NotInGroup(format!(
            "frame not orthonormal (defect {defect:e})"
        )));
    }
    Ok(Frame {
        dim,
        e: rows.into_iter().map(|r| r.0).collect(),
        orthonormality_defect: defect,
        det_range,
    })
}

/// `O/λ` split of a transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub lambda: f64,
    pub o0: DMatrix<f64>,
    pub group_defect: f64,
}

/// Splits `O = λ O₀` with `O₀ ∈ SO⁺(3,1)` (4D) or `O₀ ∈ SO(3)` (3D, `λ = 1`
/// when `O` is orthogonal; otherwise `λ = (det O)^{1/3}`).
pub fn normalize_transition(o: &DMatrix<f64>) -> Result<Normalized> {
    let dim = o.nrows();
    let det = o.determinant();
    if det <= 0.0 {
        return Err(Error::NotInGroup(format!(
            "transition has det {det:.3e} ≤ 0"
        )));
    }
    let lambda = det.powf(1.0 / dim as f64);
    let o0 = o / lambda;
    let eta = eta_matrix(dim);
    let defect = (&o0 * &eta * o0.transpose() - &eta).amax();
    if defect > GROUP_TOL {
        return Err(Error::NotInGroup(format!(
            "transition fails the group test by {defect:e}"
        )));
    }
    if dim == 4 && o0[(3, 3)] <= 0.0 {
        return Err(Error::NotInGroup(
            "transition reverses time orientation".into(),
        ));
    }
    Ok(Normalized {
        lambda,
        o0,
        group_defect: defect,
    })
}

#[derive(Debug, Clone)]
pub struct FrameTransition {
    pub o: Vec<DMatrix<f64>>,
    pub lambda: Vec<f64>,
    pub o0: Vec<DMatrix<f64>>,
    pub group_defect: f64,
}

/// `O = ẽ e⁻¹` pointwise, so that `ẽ_j = O_j^k e_k`.
pub fn transition(e: &Frame, et: &Frame) -> Result<FrameTransition> {
    if e.e.len() != et.e.len() || e.dim != et.dim {
        return Err(Error::GridMismatch);
    }
    let parts: Result<Vec<(DMatrix<f64>, Normalized)>> =
        e.e.par_iter()
            .zip(et.e.par_iter())
            .map(|(a, b)| {
                let inv = a.clone().try_inverse().ok_or(Error::DegenerateFrame(0.0))?;
                let o = b * inv;
                let n = normalize_transition(&o)?;
                Ok((o, n))
            })
            .collect();
    let parts = parts?;
    let group_defect = parts.iter().map(|p| p.1.group_defect).fold(0.0, f64::max);
    let mut out = FrameTransition {
        o: vec![],
        lambda: vec![],
        o0: vec![],
        group_defect,
    };
    for (o, n) in parts {
        out.o.push(o);
        out.lambda.push(n.lambda);
        out.o0.push(n.o0);
    }
    Ok(out)
}

/// Unit quaternion `(w, x, y, z)` of a rotation matrix, largest-component branch.
fn quaternion(r: &DMatrix<f64>) -> [f64; 4] {
    let (m00, m11, m22) = (r[(0, 0)], r[(1, 1)], r[(2, 2)]);
    let tr = m00 + m11 + m22;
    let q = if tr > m00.max(m11).max(m22) {
        let s = (1.0 + tr).sqrt() * 2.0;
        [
            0.25 * s,
            (r[(2, 1)] - r[(1, 2)]) / s,
            (r[(0, 2)] - r[(2, 0)]) / s,
            (r[(1, 0)] - r[(0, 1)]) / s,
        ]
    } else if m00 >= m11 && m00 >= m22 {
        let s = (1.0 + m00 - m11 - m22).sqrt() * 2.0;
        [
            (r[(2, 1)] - r[(1, 2)]) / s,
            0.25 * s,
            (r[(0, 1)] + r[(1, 0)]) / s,
            (r[(0, 2)] + r[(2, 0)]) / s,
        ]
    } else if m11 >= m22 {
        let s = (1.0 + m11 - m00 - m22).sqrt() * 2.0;
        [
            (r[(0, 2)] - r[(2, 0)]) / s,
            (r[(0, 1)] + r[(1, 0)]) / s,
            0.25 * s,
            (r[(1, 2)] + r[(2, 1)]) / s,
        ]
    } else {
        let s = (1.0 + m22 - m00 - m11).sqrt() * 2.0;
        [
            (r[(1, 0)] - r[(0, 1)]) / s,
            (r[(0, 2)] + r[(2, 0)]) / s,
            (r[(1, 2)] + r[(2, 1)]) / s,
            0.25 * s,
        ]
    };
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    q.map(|v| v / n)
}

fn rotation_lift(r: &DMatrix<f64>) -> Mat2 {
    let [w, x, y, z] = quaternion(r);
    let s = pauli();
    Mat2::scalar(C64::new(w, 0.0))
        - (s[0].scale_re(x) + s[1].scale_re(y) + s[2].scale_re(z)).scale(C64::new(0.0, 1.0))
}

/// One of the two `𝓡` with `det 𝓡 = 1` and `Π(𝓡) = O₀`.
pub fn lift_pointwise(o0: &DMatrix<f64>) -> Result<Mat2> {
    let dim = o0.nrows();
    let lift = match dim {
        3 => rotation_lift(o0),
        4 => {
            let gamma = o0[(3, 3)];
            let u = [o0[(0, 3)], o0[(1, 3)], o0[(2, 3)]];
            let c = ((gamma + 1.0) / 2.0).sqrt();
            let us = Mat2::from_pauli_coefficients(&[u[0], u[1], u[2], 0.0]);
            let h = Mat2::scalar(C64::new(c, 0.0)) + us.scale_re(0.5 / c);
            let h_inv = h
                .inverse()
                .ok_or(Error::LiftVerificationFailed(f64::INFINITY))?;
            let q = spin_hom(&h_inv, 4) * o0;
            let rot = q.view((0, 0), (3, 3)).into_owned();
            h * rotation_lift(&rot)
        }
        d => return Err(Error::BadDimension(d)),
    };
    let err = (spin_hom(&lift, dim) - o0).amax();
    if !(err <= LIFT_TOL) {
        return Err(Error::LiftVerificationFailed(err));
    }
    Ok(lift)
}

/// Lie-algebra element `X` with `Π(exp(tX)) = exp(tΩ)`; `Ω ∈ so(3,1)` or `so(3)`.
pub fn algebra_lift(omega: &DMatrix<f64>) -> Mat2 {
    let s = pauli();
    let i = C64::new(0.0, 1.0);
    let rot =
        s[0].scale_re(omega[(2, 1)]) + s[1].scale_re(omega[(0, 2)]) + s[2].scale_re(omega[(1, 0)]);
    let mut x = rot.scale(-0.5 * i);
    if omega.nrows() == 4 {
        for j in 0..3 {
            x += s[j].scale_re(0.5 * omega[(j, 3)]);
        }
    }
    x
}

/// Picks `σ ∈ {±1}` with `σ·next` continuing `prev`.
fn continue_sign(prev: &Mat2, next: &Mat2) -> Option<f64> {
    let same = (*next - *prev).norm();
    let flip = (*next + *prev).norm();
    if flip >= SIGN_MARGIN * same {
        Some(1.0)
    } else if same >= SIGN_MARGIN * flip {
        Some(-1.0)
    } else {
        None
    }
}

enum LoopOutcome {
    Sign(i8),
    Ambiguous,
}

fn loop_sign<F>(o_at: &F, chart: &Chart, axis: usize, n: usize) -> Result<LoopOutcome>
where
    F: Fn(&Point) -> Result<DMatrix<f64>> + Sync,
{
    let pts = chart.loop_samples(axis, n)?;
    let lifts: Result<Vec<Mat2>> = pts
        .par_iter()
        .map(|p| {
            let n = normalize_transition(&o_at(p)?)?;
            lift_pointwise(&n.o0)
        })
        .collect();
    let lifts = lifts?;
    let mut prev = lifts[0];
    for next in lifts.iter().skip(1) {
        match continue_sign(&prev, next) {
            Some(s) => prev = next.scale_re(s),
            None => return Ok(LoopOutcome::Ambiguous),
        }
    }
    match continue_sign(&prev, &lifts[0]) {
        Some(s) => Ok(LoopOutcome::Sign(s as i8)),
        None => Ok(LoopOutcome::Ambiguous),
    }
}

/// Monodromy sign of the lifted transition along each coordinate circle
/// through the origin. Sampling doubles from `n_samples` up to `max_samples`
/// while a continuation step is ambiguous.
pub fn monodromy_class<F>(
    o_at: F,
    chart: &Chart,
    n_samples: usize,
    max_samples: usize,
) -> Result<Vec<i8>>
where
    F: Fn(&Point) -> Result<DMatrix<f64>> + Sync,
{
    let mut signs = Vec::with_capacity(chart.dim());
    for axis in 1..=chart.dim() {
        let mut n = n_samples;
        loop {
            match loop_sign(&o_at, chart, axis, n)? {
                LoopOutcome::Sign(s) => {
                    signs.push(s);
                    break;
                }
                LoopOutcome::Ambiguous if n * 2 <= max_samples => n *= 2,
                LoopOutcome::Ambiguous => return Err(Error::SamplingTooCoarse(n)),
            }
        }
    }
    Ok(signs)
}

/// Monodromy of a transition sampled on the grid.
pub fn monodromy_on_grid(o: &[DMatrix<f64>], chart: &Chart) -> Result<Vec<i8>> {
    if o.len() != chart.num_points() {
        return Err(Error::GridMismatch);
    }
    let n = chart.resolution();
    monodromy_class(
        |p| {
            let k = chart.grid_index_of(p).ok_or(Error::OffGrid(n))?;
            Ok(o[k].clone())
        },
        chart,
        n,
        n,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftFamily {
    /// SL(2,ℂ) / SU(2): no phase freedom beyond ±1.
    Special,
    /// GL(2,ℂ) / U(2): a phase compensator may be used.
    General,
}

/// A continuous lift of a transition field over the whole grid.
#[derive(Debug, Clone)]
pub struct GlobalLift {
    /// Compensator exponents `κ_j ∈ {0,1}`.
    pub kappa: Vec<u8>,
    /// Sign-continued lifts `V` with `det V = 1` (discontinuous across the cut
    /// on axes with `κ_j = 1`).
    pub sheet: Vec<Mat2>,
    /// `𝓡 = e^{iκ·x/2} V`, continuous and single valued.
    pub values: Vec<Mat2>,
    /// Largest `|Π(𝓡) − O₀|`.
    pub verification: f64,
}

pub fn compensator(kappa: &[u8], x: &Point) -> C64 {
    let phase: f64 = kappa
        .iter()
        .zip(x.as_slice())
        .map(|(k, x)| *k as f64 * x)
        .sum();
    C64::new(0.0, 0.5 * phase).exp()
}

/// Builds a lift of `o0` (already normalized) over the grid.
pub fn global_lift_torus(
    o0: &[DMatrix<f64>],
    chart: &Chart,
    signs: &[i8],
    family: LiftFamily,
) -> Result<GlobalLift> {
    if o0.len() != chart.num_points() {
        return Err(Error::GridMismatch);
    }
    if family == LiftFamily::Special && signs.iter().any(|s| *s != 1) {
        return Err(Error::NoLift(signs.to_vec()));
    }
    let dim = chart.dim();
    let raw: Result<Vec<Mat2>> = o0.par_iter().map(lift_pointwise).collect();
    let mut sheet = raw?;
    for k in 1..sheet.len() {
        let idx = chart.multi_index(k);
        let axis = (0..dim).find(|&a| idx[a] != 0).expect("k > 0");
        let prev = sheet[k - chart.stride(axis)];
        let s =
            continue_sign(&prev, &sheet[k]).ok_or(Error::SamplingTooCoarse(chart.resolution()))?;
        sheet[k] = sheet[k].scale_re(s);
    }
    let kappa: Vec<u8> = signs.iter().map(|s| u8::from(*s == -1)).collect();
    let values: Vec<Mat2> = (0..sheet.len())
        .map(|k| sheet[k].scale(compensator(&kappa, &chart.point(k))))
        .collect();
    let n = chart.resolution();
    for k in 0..values.len() {
        let idx = chart.multi_index(k);
        for a in 0..dim {
            let mut next = idx;
            next[a] = (idx[a] + 1) % n;
            let j = chart.flat_index(&next[..dim]);
            if continue_sign(&values[k], &values[j]) != Some(1.0) {
                return Err(Error::ClosureFailure(format!(
                    "lift discontinuous along axis {}",
                    a + 1
                )));
            }
        }
    }
    let verification = values
        .par_iter()
        .zip(o0.par_iter())
        .map(|(v, o)| (spin_hom(v, dim) - o).amax())
        .reduce(|| 0.0, f64::max);
    if !(verification <= LIFT_TOL) {
        return Err(Error::LiftVerificationFailed(verification));
    }
    Ok(GlobalLift {
        kappa,
        sheet,
        values,
        verification,
    })
}
