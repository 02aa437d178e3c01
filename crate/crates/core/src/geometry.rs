//! Metric, covariant subprincipal symbol, potentials and charges extracted
//! from a symbol.

use crate::chart::{Chart, Point};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::symbol::{FullSymbol, SymbolJet};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const POTENTIAL_RESIDUAL_TOL: f64 = 1e-8;
pub const REALITY_TOL: f64 = 1e-10;
pub const CHARGE_TOL: f64 = 1e-9;
pub const TIMELIKE_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Signature {
    Lorentzian,
    Riemannian,
}

/// Metric quantities at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMetric {
    /// Metric density `𝐠^{αβ}`.
    pub gd: DMatrix<f64>,
    /// `𝐠_{αβ}`, the inverse of `gd`.
    pub gd_inv: DMatrix<f64>,
    pub rho: f64,
    pub g_up: DMatrix<f64>,
    pub g_down: DMatrix<f64>,
}

/// `𝐠^{αβ} = −½(tr E^α tr E^β − tr(E^α E^β))`.
pub fn metric_density(jet: &SymbolJet, dim: usize) -> Result<DMatrix<f64>> {
    let mut gd = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            let v = -0.5 * (jet.e[a].trace() * jet.e[b].trace() - (jet.e[a] * jet.e[b]).trace());
            if v.im.abs() > SYMMETRY_TOL * (1.0 + v.re.abs()) {
                return Err(Error::SignatureViolation(format!(
                    "metric density entry ({a},{b}) is not real"
                )));
            }
            gd[(a, b)] = v.re;
        }
    }
    for a in 0..dim {
        for b in 0..a {
            if (gd[(a, b)] - gd[(b, a)]).abs() > SYMMETRY_TOL * (1.0 + gd[(a, b)].abs()) {
                return Err(Error::SignatureViolation(
                    "metric density not symmetric".into(),
                ));
            }
        }
    }
    Ok(gd)
}

pub fn metric_at(jet: &SymbolJet, dim: usize) -> Result<PointMetric> {
    let gd = metric_density(jet, dim)?;
    let eig = nalgebra::SymmetricEigen::new(gd.clone()).eigenvalues;
    let scale = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || eig.iter().any(|v| v.abs() <= 1e-12 * scale) {
        return Err(Error::DegenerateMetric);
    }
    let negative = eig.iter().filter(|v| **v < 0.0).count();
    let det = gd.determinant();
    let rho = match dim {
        4 => {
            if negative != 1 || det >= 0.0 {
                return Err(Error::SignatureViolation(format!(
                    "expected signature (3,1), found {} negative eigenvalues",
                    negative
                )));
            }
            (-det).powf(1.0 / 6.0)
        }
        3 => {
            if negative != 0 {
                return Err(Error::SignatureViolation(format!(
                    "expected positive definite metric, found {} negative eigenvalues",
                    negative
                )));
            }
            det.powf(0.25)
        }
        d => return Err(Error::BadDimension(d)),
    };
    let gd_inv = gd.clone().try_inverse().ok_or(Error::DegenerateMetric)?;
    let g_up = &gd / (rho * rho);
    let g_down = &gd_inv * (rho * rho);
    Ok(PointMetric {
        gd,
        gd_inv,
        rho,
        g_up,
        g_down,
    })
}

/// Metric data over the grid of a chart.
#[derive(Debug, Clone)]
pub struct MetricData {
    pub signature: Signature,
    pub points: Vec<PointMetric>,
}

impl MetricData {
    pub fn rho_range(&self) -> (f64, f64) {
        self.points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.rho), hi.max(p.rho))
            })
    }
}

pub fn metric_data(s: &FullSymbol, chart: &Chart) -> Result<MetricData> {
    let jets = s.sample(chart)?;
    let dim = s.dim();
    let points: Result<Vec<_>> = jets.par_iter().map(|j| metric_at(j, dim)).collect();
    let signature = if dim == 4 {
        Signature::Lorentzian
    } else {
        Signature::Riemannian
    };
    Ok(MetricData {
        signature,
        points: points?,
    })
}

/// `𝐒_csub = F + (i/16) 𝐠_{αβ} B^{αβ}`, where `B^{αβ}` is the second momentum
/// derivative of the bracket `{S_prin, adj S_prin, S_prin}`.
pub fn csub_at(jet: &SymbolJet, pm: &PointMetric, dim: usize) -> Mat2 {
    let adj: Vec<Mat2> = (0..dim).map(|a| jet.e[a].adj()).collect();
    let mut acc = Mat2::ZERO;
    for a in 0..dim {
        for b in 0..dim {
            let w = pm.gd_inv[(a, b)];
            if w == 0.0 {
                continue;
            }
            let mut bracket = Mat2::ZERO;
            for c in 0..dim {
                let (ea_c, eb_c, ec) = (jet.de[a][c], jet.de[b][c], jet.e[c]);
                bracket += ea_c * adj[b] * ec + eb_c * adj[a] * ec
                    - ec * adj[b] * ea_c
                    - ec * adj[a] * eb_c;
            }
            acc += bracket.scale_re(w);
        }
    }
    jet.f + acc.scale(C64::new(0.0, 1.0 / 16.0))
}

/// Potentials at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointPotential {
    /// Magnetic (3D) or electromagnetic (4D) covector, unused slots zero.
    pub a: [f64; 4],
    /// Electric potential (3D only, zero in 4D).
    pub a4: f64,
    /// `‖𝐒_csub − E^α A_α − A₄ Id‖∞`.
    pub residual: f64,
    /// Largest imaginary part discarded when reading off the real solution.
    pub imag_residue: f64,
}

pub fn potential_at(jet: &SymbolJet, pm: &PointMetric, dim: usize) -> PointPotential {
    let csub = csub_at(jet, pm, dim);
    let traces: Vec<C64> = (0..dim).map(|b| (csub * jet.e[b].adj()).trace()).collect();
    let mut out = PointPotential::default();
    let mut imag: f64 = 0.0;
    for a in 0..dim {
        let v: C64 = (0..dim).map(|b| traces[b] * pm.gd_inv[(a, b)]).sum::<C64>() * -0.5;
        out.a[a] = v.re;
        imag = imag.max(v.im.abs());
    }
    if dim == 3 {
        let t = csub.trace() * 0.5;
        out.a4 = t.re;
        imag = imag.max(t.im.abs());
    }
    let recon = (0..dim).fold(Mat2::scalar(C64::new(out.a4, 0.0)), |m, a| {
        m + jet.e[a].scale_re(out.a[a])
    });
    out.residual = (csub - recon).max_abs();
    out.imag_residue = imag;
    out
}

#[derive(Debug, Clone)]
pub struct CovectorPotential {
    pub values: Vec<PointPotential>,
}

impl CovectorPotential {
    pub fn max_residual(&self) -> f64 {
        self.values.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
    pub fn component(&self, axis: usize) -> Vec<f64> {
        self.values.iter().map(|p| p.a[axis]).collect()
    }
    pub fn electric(&self) -> Vec<f64> {
        self.values.iter().map(|p| p.a4).collect()
    }
}

pub fn covariant_subprincipal(s: &FullSymbol, md: &MetricData, chart: &Chart) -> Result<Vec<Mat2>> {
    let jets = s.sample(chart)?;
    let dim = s.dim();
    Ok(jets
        .par_iter()
        .zip(md.points.par_iter())
        .map(|(j, pm)| csub_at(j, pm, dim))
        .collect())
}

pub fn potentials(s: &FullSymbol, md: &MetricData, chart: &Chart) -> Result<CovectorPotential> {
    let jets = s.sample(chart)?;
    let dim = s.dim();
    let values: Vec<PointPotential> = jets
        .par_iter()
        .zip(md.points.par_iter())
        .map(|(j, pm)| potential_at(j, pm, dim))
        .collect();
    let worst = values
        .iter()
        .map(|p| p.residual.max(p.imag_residue))
        .fold(0.0, f64::max);
    if worst >= POTENTIAL_RESIDUAL_TOL || !worst.is_finite() {
        return Err(Error::ResidualTooLarge(worst));
    }
    Ok(CovectorPotential { values })
}

/// Potential of a pointwise-evaluable symbol at an arbitrary point.
pub fn potential_at_point(s: &FullSymbol, x: &Point) -> Result<PointPotential> {
    let jet = s.jet(x)?;
    let pm = metric_at(&jet, s.dim())?;
    Ok(potential_at(&jet, &pm, s.dim()))
}

/// Orientation trace: `tr(E¹E²E³)` in 3D. In 4D the plain product trace
/// carries metric terms, so the alternating product is antisymmetrized:
/// `(1/24) Σ_π sgn π tr(adj E^{π1} E^{π2} adj E^{π3} E^{π4})`.
fn orientation_trace(e: &[Mat2; 4], dim: usize) -> C64 {
    if dim == 3 {
        return (e[0] * e[1] * e[2]).trace();
    }
    let mut sum = C64::new(0.0, 0.0);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).any(|i| (i + 1..4).any(|j| p[i] == p[j])) {
                        continue;
                    }
                    let inversions = (0..4)
                        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                        .filter(|&(i, j)| p[i] > p[j])
                        .count();
                    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
                    sum += (e[a].adj() * e[b] * e[c].adj() * e[d]).trace() * sign;
                }
            }
        }
    }
    sum / 24.0
}

/// Unrounded charge values at one point: `(c_top, t, t·q)`.
pub fn charge_values_at(
    jet: &SymbolJet,
    pm: &PointMetric,
    dim: usize,
    q: Option<[f64; 4]>,
) -> (C64, [f64; 4], f64) {
    let vol = pm.gd_inv.determinant().abs().sqrt();
    let c_top = C64::new(0.0, -0.5) * vol * orientation_trace(&jet.e, dim);
    let mut t = [0.0; 4];
    let mut tq = 0.0;
    if dim == 4 {
        for a in 0..4 {
            t[a] = jet.e[a].trace().re / pm.rho;
        }
        let q = q.unwrap_or([0.0, 0.0, 0.0, 1.0]);
        tq = (0..4).map(|a| t[a] * q[a]).sum();
    }
    (c_top, t, tq)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Charges {
    pub c_top: i8,
    /// Largest `|c − c_top|` over the grid.
    pub c_top_deviation: f64,
    pub c_tem: Option<i8>,
    /// Smallest `|t·q|` over the grid (4D).
    pub c_tem_margin: Option<f64>,
    /// Timelike field `t^α`, 4D only.
    #[serde(skip)]
    pub t: Vec<[f64; 4]>,
}

pub fn charges(s: &FullSymbol, md: &MetricData, chart: &Chart) -> Result<Charges> {
    let jets = s.sample(chart)?;
    let dim = s.dim();
    if dim == 4 && chart.q_ref().is_none() {
        return Err(Error::MissingReferenceCovector);
    }
    let vals: Vec<(C64, [f64; 4], f64, f64)> = jets
        .par_iter()
        .zip(md.points.par_iter())
        .map(|(j, pm)| {
            let (c, t, tq) = charge_values_at(j, pm, dim, chart.q_ref());
            let tt = if dim == 4 {
                (0..4)
                    .flat_map(|a| (0..4).map(move |b| (a, b)))
                    .map(|(a, b)| pm.g_down[(a, b)] * t[a] * t[b])
                    .sum()
            } else {
                -1.0
            };
            (c, t, tq, tt)
        })
        .collect();
    let first = vals[0].0.re;
    let c_top: i8 = if first >= 0.0 { 1 } else { -1 };
    let mut dev: f64 = 0.0;
    for (c, _, _, _) in &vals {
        let d = (C64::new(c_top as f64, 0.0) - c).norm();
        dev = dev.max(d);
    }
    if dev > CHARGE_TOL {
        return Err(Error::NonConstantCharge(format!(
            "topological charge deviates from {c_top} by {dev:e}"
        )));
    }
    if dim == 3 {
        return Ok(Charges {
            c_top,
            c_top_deviation: dev,
            c_tem: None,
            c_tem_margin: None,
            t: vec![],
        });
    }
    let worst_tt = vals.iter().map(|v| v.3).fold(f64::NEG_INFINITY, f64::max);
    if worst_tt >= -TIMELIKE_MARGIN {
        return Err(Error::NotTimelike(worst_tt));
    }
    let sign0 = vals[0].2 > 0.0;
    let c_tem: i8 = if sign0 { 1 } else { -1 };
    let mut margin = f64::INFINITY;
    for v in &vals {
        if (v.2 > 0.0) != sign0 || v.2 == 0.0 {
            return Err(Error::NonConstantCharge(
                "temporal charge changes sign".into(),
            ));
        }
        margin = margin.min(v.2.abs());
    }
    Ok(Charges {
        c_top,
        c_top_deviation: dev,
        c_tem: Some(c_tem),
        c_tem_margin: Some(margin),
        t: vals.iter().map(|v| v.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::expr::MatrixExpr;
    use crate::mat2::pauli;

    fn chart3(n: usize) -> Chart {
        Chart::new(3, n, None).unwrap()
    }

    fn dirac_with_f(f: MatrixExpr, c: &Chart) -> FullSymbol {
        let (e, _) = builtins::dirac3(c)
            .unwrap()
            .expressions()
            .map(|(e, f)| (e.to_vec(), f.clone()))
            .unwrap();
        FullSymbol::from_canonical(e, f, c).unwrap()
    }

    #[test]
    fn dirac_metric_is_euclidean() {
        let c = chart3(8);
        let md = metric_data(&builtins::dirac3(&c).unwrap(), &c).unwrap();
        for p in &md.points {
            assert!((&p.g_up - DMatrix::<f64>::identity(3, 3)).amax() < 1e-12);
            assert!((p.rho - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weyl_metric_is_minkowski() {
        let c = Chart::new(4, 8, None).unwrap();
        let md = metric_data(&builtins::weyl4(&c).unwrap(), &c).unwrap();
        let eta = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0]));
        assert_eq!(md.signature, Signature::Lorentzian);
        for p in &md.points {
            assert!((&p.g_up - &eta).amax() < 1e-12);
            assert!((&p.g_up * &p.g_down - DMatrix::<f64>::identity(4, 4)).amax() < 1e-10);
            assert!((p.rho - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn twisted_metric_matches_untwisted() {
        let c = chart3(8);
        let md = metric_data(&builtins::twisted3(&c).unwrap(), &c).unwrap();
        for p in &md.points {
            assert!((&p.g_up - DMatrix::<f64>::identity(3, 3)).amax() < 1e-12);
        }
    }

    #[test]
    fn definite_4d_metric_is_rejected() {
        let c = Chart::new(4, 8, None).unwrap();
        let s = pauli();
        let i_s3 = MatrixExpr::parse([["1", "0"], ["0", "-1"]]).unwrap();
        let e = vec![
            MatrixExpr::constant(&s[0]),
            MatrixExpr::constant(&s[1]),
            i_s3.clone(),
            i_s3,
        ];
        let sym = FullSymbol::from_canonical(e, MatrixExpr::zero(), &c).unwrap();
        assert!(metric_data(&sym, &c).is_err());
    }

    #[test]
    fn csub_of_constant_symbol_is_f() {
        let c = chart3(8);
        let f = MatrixExpr::parse([["0.5", "1 - 2*i"], ["1 + 2*i", "-3"]]).unwrap();
        let sym = dirac_with_f(f.clone(), &c);
        let md = metric_data(&sym, &c).unwrap();
        let cs = covariant_subprincipal(&sym, &md, &c).unwrap();
        let fv = f.value(&Point::origin(3)).unwrap();
        for m in cs {
            assert_eq!(m, fv);
        }
    }

    /// Direct evaluation of `{P, adj P, P}` at momenta `p` by central
    /// differences in `x`, then a second difference in `p`.
    fn bracket_fd(s: &FullSymbol, x: &[f64], a: usize, b: usize) -> Mat2 {
        let dim = s.dim();
        let prin = |y: &[f64], p: &[f64]| -> Mat2 {
            let jet = s.jet(&Point::new(y)).unwrap();
            (0..dim).fold(Mat2::ZERO, |m, k| m + jet.e[k].scale_re(p[k]))
        };
        let h = 1e-5;
        let bracket = |p: &[f64]| -> Mat2 {
            let mut out = Mat2::ZERO;
            let pm = prin(x, p);
            let adj = pm.adj();
            for g in 0..dim {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[g] += h;
                xm[g] -= h;
                let px = (prin(&xp, p) - prin(&xm, p)).scale_re(0.5 / h);
                let mut unit = vec![0.0; dim];
                unit[g] = 1.0;
                let pp = prin(x, &unit);
                out += px * adj * pp - pp * adj * px;
            }
            out
        };
        // The bracket is quadratic in p, so a unit-step second difference is exact.
        let mut ea = vec![0.0; dim];
        let mut eb = vec![0.0; dim];
        ea[a] = 1.0;
        eb[b] = 1.0;
        let z = vec![0.0; dim];
        let pab: Vec<f64> = (0..dim).map(|k| ea[k] + eb[k]).collect();
        bracket(&pab) - bracket(&ea) - bracket(&eb) + bracket(&z)
    }

    #[test]
    fn twisted_csub_matches_bracket_oracle() {
        let c = chart3(8);
        let sym = builtins::twisted3(&c).unwrap();
        for x in [[0.0, 0.0, 0.0], [0.3, 1.1, 2.0], [5.0, 0.2, 4.4]] {
            let jet = sym.jet(&Point::new(&x)).unwrap();
            let pm = metric_at(&jet, 3).unwrap();
            let cs = csub_at(&jet, &pm, 3);
            let mut oracle = Mat2::ZERO;
            for a in 0..3 {
                for b in 0..3 {
                    oracle += bracket_fd(&sym, &x, a, b).scale_re(pm.gd_inv[(a, b)]);
                }
            }
            let oracle = oracle.scale(C64::new(0.0, 1.0 / 16.0));
            assert!((cs - oracle).max_abs() < 1e-8, "{cs:?} vs {oracle:?}");
            assert!(cs.max_abs() > 0.1);
            assert!(cs.hermiticity_defect() < 1e-10);
        }
    }

    #[test]
    fn builtin_csub_is_hermitian() {
        let c3 = chart3(8);
        let c4 = Chart::new(4, 8, None).unwrap();
        for (sym, c) in [
            (builtins::dirac3(&c3).unwrap(), &c3),
            (builtins::twisted3(&c3).unwrap(), &c3),
            (builtins::weyl4(&c4).unwrap(), &c4),
            (builtins::weyl4_twisted(&c4).unwrap(), &c4),
        ] {
            let md = metric_data(&sym, c).unwrap();
            for m in covariant_subprincipal(&sym, &md, c).unwrap() {
                assert!(m.hermiticity_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn weyl_potential_vanishes() {
        let c = Chart::new(4, 8, None).unwrap();
        let sym = builtins::weyl4(&c).unwrap();
        let md = metric_data(&sym, &c).unwrap();
        let pot = potentials(&sym, &md, &c).unwrap();
        for p in &pot.values {
            assert!(p.a.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn constant_potential_is_recovered() {
        let c = chart3(8);
        let a0 = [0.25, -1.5, 0.75];
        let s = pauli();
        let f = Mat2::from_pauli_coefficients(&a0);
        let _ = s;
        let sym = dirac_with_f(MatrixExpr::constant(&f), &c);
        let md = metric_data(&sym, &c).unwrap();
        let pot = potentials(&sym, &md, &c).unwrap();
        for p in &pot.values {
            for k in 0..3 {
                assert!((p.a[k] - a0[k]).abs() < 1e-10);
            }
            assert!(p.a4.abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_f_is_electric() {
        let c = chart3(8);
        let sym = dirac_with_f(
            MatrixExpr::parse([["cos(x1)*sin(x2)", "0"], ["0", "cos(x1)*sin(x2)"]]).unwrap(),
            &c,
        );
        let md = metric_data(&sym, &c).unwrap();
        let pot = potentials(&sym, &md, &c).unwrap();
        for (k, p) in pot.values.iter().enumerate() {
            let x = c.point(k);
            let phi = x.coords[0].cos() * x.coords[1].sin();
            assert!(p.a.iter().all(|v| v.abs() < 1e-14));
            assert!((p.a4 - phi).abs() < 1e-14);
        }
    }

    #[test]
    fn twisted_csub_is_half_identity() {
        // csub of the F = 0 twisted symbol is ½ Id: zero magnetic, ½ electric.
        let c = chart3(8);
        let sym = builtins::twisted3(&c).unwrap();
        let md = metric_data(&sym, &c).unwrap();
        let pot = potentials(&sym, &md, &c).unwrap();
        for p in &pot.values {
            assert!(p.a.iter().all(|v| v.abs() < 1e-12));
            assert!((p.a4 - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dirac_charge_and_reflection() {
        let c = chart3(8);
        let sym = builtins::dirac3(&c).unwrap();
        let md = metric_data(&sym, &c).unwrap();
        assert_eq!(charges(&sym, &md, &c).unwrap().c_top, 1);

        let (e, f) = sym.expressions().unwrap();
        let mut e = e.to_vec();
        e[0] = e[0].scale(&crate::expr::Expr::num(-1.0));
        let flipped = FullSymbol::from_canonical(e, f.clone(), &c).unwrap();
        let md = metric_data(&flipped, &c).unwrap();
        let ch = charges(&flipped, &md, &c).unwrap();
        assert_eq!(ch.c_top, -1);
        // Oracle: tr(−s¹ s² s³) = −2i, so −(i/2)(−2i) = −1.
        let s = pauli();
        let direct = C64::new(0.0, -0.5) * ((-s[0]) * s[1] * s[2]).trace();
        assert!((direct - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn weyl_timelike_field() {
        let c = Chart::new(4, 8, None).unwrap();
        let sym = builtins::weyl4(&c).unwrap();
        let md = metric_data(&sym, &c).unwrap();
        let ch = charges(&sym, &md, &c).unwrap();
        assert_eq!(ch.c_top, 1);
        assert_eq!(ch.c_tem, Some(1));
        for t in &ch.t {
            assert_eq!(*t, [0.0, 0.0, 0.0, 2.0]);
        }
    }
}
