//! Full symbols `S_full(x, p) = E^α(x) p_α + F(x)` of first-order Hermitian
//! sesquilinear forms acting on ℂ²-valued functions.

use crate::chart::{Chart, Point};
use crate::error::{Error, Result};
use crate::expr::MatrixExpr;
use crate::mat2::{pauli, Mat2, MatJet};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::{Arc, Mutex, OnceLock};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const NONDEGENERATE_TOL: f64 = 1e-10;
pub const TRACE_FREE_TOL: f64 = 1e-12;

/// Momentum `p_α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covector(pub [f64; 4]);

impl Covector {
    pub fn new(p: &[f64]) -> Self {
        let mut c = [0.0; 4];
        c[..p.len()].copy_from_slice(p);
        Covector(c)
    }
}

/// Coefficients of a symbol and their first partials at one point.
/// `de[α][γ] = ∂_γ E^α`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymbolJet {
    pub e: [Mat2; 4],
    pub de: [[Mat2; 4]; 4],
    pub f: Mat2,
}

impl SymbolJet {
    pub fn principal(&self, dim: usize, p: &Covector) -> Mat2 {
        (0..dim).fold(Mat2::ZERO, |acc, a| acc + self.e[a].scale_re(p.0[a]))
    }

    /// Density-valued frame coefficients `tr(s^j E^α) / 2`, row `j`, column `α`.
    pub fn pauli_frame(&self, dim: usize) -> nalgebra::DMatrix<f64> {
        let s = pauli();
        nalgebra::DMatrix::from_fn(dim, dim, |j, a| 0.5 * (s[j] * self.e[a]).trace().re)
    }

    /// Transformed jet: `Ẽ^α = R*E^αR`, `F̃ = R*FR + (i/2)(R*_{,α}E^αR − R*E^αR_{,α})`.
    pub fn gauged(&self, r: &MatJet, dim: usize) -> SymbolJet {
        let rd = r.dagger();
        let mut out = SymbolJet::default();
        let mut corr = Mat2::ZERO;
        for a in 0..dim {
            let e = MatJet {
                v: self.e[a],
                d: self.de[a],
            };
            let t = rd.mul(&e).mul(r);
            out.e[a] = t.v;
            out.de[a] = t.d;
            corr += rd.d[a] * self.e[a] * r.v - rd.v * self.e[a] * r.d[a];
        }
        out.f = rd.v * self.f * r.v + corr.scale(C64::new(0.0, 0.5));
        out
    }
}

/// Symbolic form of [`SymbolJet::gauged`].
fn gauged_expressions(e: &[MatrixExpr], f: &MatrixExpr, r: &MatrixExpr) -> Symbolic {
    let rd = r.dagger();
    let half_i = crate::expr::Expr::constant(C64::new(0.0, 0.5));
    let mut corr = MatrixExpr::zero();
    let mut et = Vec::with_capacity(e.len());
    for (a, ea) in e.iter().enumerate() {
        et.push(rd.mul(ea).mul(r));
        let t1 = rd.diff(a).mul(ea).mul(r);
        let t2 = rd.mul(ea).mul(&r.diff(a));
        corr = corr.add(&t1.sub(&t2));
    }
    (et, rd.mul(f).mul(r).add(&corr.scale(&half_i)))
}

/// The general form `∫ u* A^α v_α + u_α* B^α v + u* C v`.
#[derive(Debug, Clone)]
pub struct RawForm {
    pub a: Vec<MatrixExpr>,
    pub b: Vec<MatrixExpr>,
    pub c: MatrixExpr,
}

type Symbolic = (Vec<MatrixExpr>, MatrixExpr);

#[derive(Debug, Clone)]
enum Repr {
    Expr {
        e: Vec<MatrixExpr>,
        f: MatrixExpr,
    },
    /// `base` gauged by the expression `r`, evaluated jet-wise; the symbolic
    /// coefficients are only built on request.
    Gauged {
        base: Arc<FullSymbol>,
        r: MatrixExpr,
        symbolic: Arc<OnceLock<Symbolic>>,
    },
    Sampled {
        chart: Chart,
        jets: Arc<Vec<SymbolJet>>,
    },
}

type SampleCache = Arc<Mutex<Option<(Chart, Arc<Vec<SymbolJet>>)>>>;

/// Canonical-form full symbol. Immutable; clones share storage.
#[derive(Debug, Clone)]
pub struct FullSymbol {
    dim: usize,
    repr: Repr,
    cache: SampleCache,
}

impl FullSymbol {
    fn with_repr(dim: usize, repr: Repr) -> Self {
        FullSymbol {
            dim,
            repr,
            cache: SampleCache::default(),
        }
    }

    /// Builds `S_full = E^α p_α + F` from expression fields; validation is left to
    /// [`FullSymbol::validate`].
    pub fn from_canonical(e: Vec<MatrixExpr>, f: MatrixExpr, chart: &Chart) -> Result<Self> {
        let dim = chart.dim();
        if e.len() != dim {
            return Err(Error::ArityMismatch {
                expected: dim,
                got: e.len(),
            });
        }
        for m in e.iter().chain(std::iter::once(&f)) {
            m.bind(dim)?;
        }
        Ok(Self::with_repr(dim, Repr::Expr { e, f }))
    }

    /// Canonical form of `RawForm`: `E = i(A − B)`, `F = C − ½ ∂_α(A^α + B^α)`.
    pub fn from_raw(raw: &RawForm, chart: &Chart) -> Result<Self> {
        let dim = chart.dim();
        for v in [&raw.a, &raw.b] {
            if v.len() != dim {
                return Err(Error::ArityMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        let i = MatrixExpr::constant(&Mat2::scalar(C64::new(0.0, 1.0)));
        let half = crate::expr::Expr::num(-0.5);
        let mut e = Vec::with_capacity(dim);
        let mut f = raw.c.clone();
        for a in 0..dim {
            let diff = raw.a[a].sub(&raw.b[a]);
            e.push(i.mul(&diff));
            let div = raw.a[a].add(&raw.b[a]).diff(a);
            f = f.add(&div.scale(&half));
        }
        Self::from_canonical(e, f, chart)
    }

    /// Symbol given by its values and `E` partials on the nodes of `chart`.
    pub fn from_samples(chart: &Chart, jets: Vec<SymbolJet>) -> Result<Self> {
        if jets.len() != chart.num_points() {
            return Err(Error::GridMismatch);
        }
        Ok(Self::with_repr(
            chart.dim(),
            Repr::Sampled {
                chart: chart.clone(),
                jets: Arc::new(jets),
            },
        ))
    }

    /// `S(Ru, Rv)` for a pointwise symbol and an expression gauge map.
    pub fn gauged(base: &FullSymbol, r: &MatrixExpr, chart: &Chart) -> Result<Self> {
        if !base.is_pointwise() {
            return Err(Error::InvalidSymbol(
                "gauged symbol needs a pointwise base".into(),
            ));
        }
        if chart.dim() != base.dim {
            return Err(Error::GridMismatch);
        }
        r.bind(base.dim)?;
        let repr = Repr::Gauged {
            base: Arc::new(base.clone()),
            r: r.clone(),
            symbolic: Arc::default(),
        };
        Ok(Self::with_repr(base.dim, repr))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Expression coefficients `(E, F)` when the symbol is expression-backed.
    pub fn expressions(&self) -> Option<(&[MatrixExpr], &MatrixExpr)> {
        match &self.repr {
            Repr::Expr { e, f } => Some((e, f)),
            Repr::Gauged { base, r, symbolic } => {
                let (e, f) = symbolic.get_or_init(|| {
                    let (e, f) = base.expressions().expect("pointwise base");
                    gauged_expressions(e, f, r)
                });
                Some((e, f))
            }
            Repr::Sampled { .. } => None,
        }
    }

    /// Whether the symbol can be evaluated away from grid nodes.
    pub fn is_pointwise(&self) -> bool {
        !matches!(self.repr, Repr::Sampled { .. })
    }

    /// Chart the samples live on, for grid-backed symbols.
    pub fn sample_chart(&self) -> Option<&Chart> {
        match &self.repr {
            Repr::Sampled { chart, .. } => Some(chart),
            _ => None,
        }
    }

    pub fn jet(&self, x: &Point) -> Result<SymbolJet> {
        match &self.repr {
            Repr::Expr { e, f } => {
                let mut jet = SymbolJet::default();
                for (a, m) in e.iter().enumerate() {
                    let mj = m.eval(x)?;
                    jet.e[a] = mj.v;
                    jet.de[a] = mj.d;
                }
                jet.f = f.value(x)?;
                Ok(jet)
            }
            Repr::Gauged { base, r, .. } => Ok(base.jet(x)?.gauged(&r.eval(x)?, self.dim)),
            Repr::Sampled { chart, jets } => {
                let k = chart
                    .grid_index_of(x)
                    .ok_or(Error::OffGrid(chart.resolution()))?;
                Ok(jets[k])
            }
        }
    }

    /// Jets at every node of `chart`, in flat grid order. The most recent
    /// sampling is cached.
    pub fn sample(&self, chart: &Chart) -> Result<Arc<Vec<SymbolJet>>> {
        if chart.dim() != self.dim {
            return Err(Error::GridMismatch);
        }
        if let Repr::Sampled { chart: own, jets } = &self.repr {
            if own.resolution() == chart.resolution() {
                return Ok(jets.clone());
            }
            return Err(Error::GridMismatch);
        }
        if let Some((c, jets)) = self.cache.lock().expect("cache lock").as_ref() {
            if c == chart {
                return Ok(jets.clone());
            }
        }
        let v: Result<Vec<SymbolJet>> = (0..chart.num_points())
            .into_par_iter()
            .map(|k| self.jet(&chart.point(k)))
            .collect();
        let jets = Arc::new(v?);
        *self.cache.lock().expect("cache lock") = Some((chart.clone(), jets.clone()));
        Ok(jets)
    }

    /// `S_prin(x, p) = E^α(x) p_α`.
    pub fn principal_at(&self, x: &Point, p: &Covector) -> Result<Mat2> {
        Ok(self.jet(x)?.principal(self.dim, p))
    }

    pub fn subprincipal_at(&self, x: &Point) -> Result<Mat2> {
        Ok(self.jet(x)?.f)
    }

    /// Hermiticity, non-degeneracy and (3D) trace-freeness over the grid.
    pub fn validate(&self, chart: &Chart) -> Result<ValidationReport> {
        let jets = self.sample(chart)?;
        let dim = self.dim;
        let per_point: Vec<(f64, f64, f64)> = jets
            .par_iter()
            .map(|j| {
                let herm = (0..dim)
                    .map(|a| j.e[a].hermiticity_defect())
                    .fold(j.f.hermiticity_defect(), f64::max);
                let det = j.pauli_frame(dim).determinant().abs();
                let tr = (0..dim).map(|a| j.e[a].trace().norm()).fold(0.0, f64::max);
                (herm, det, tr)
            })
            .collect();
        let hermiticity_defect = per_point.iter().map(|t| t.0).fold(0.0, f64::max);
        let min_frame_det = per_point.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
        let trace_defect = (dim == 3).then(|| per_point.iter().map(|t| t.2).fold(0.0, f64::max));
        let hermitian = hermiticity_defect <= HERMITIAN_TOL;
        let non_degenerate = min_frame_det > NONDEGENERATE_TOL;
        let trace_free = trace_defect.map(|t| t <= TRACE_FREE_TOL);
        Ok(ValidationReport {
            hermiticity_defect,
            min_frame_det,
            trace_defect,
            hermitian,
            non_degenerate,
            trace_free,
            valid: hermitian && non_degenerate && trace_free.unwrap_or(true),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Largest entry of `E^α − (E^α)*` or `F − F*` over the grid.
    pub hermiticity_defect: f64,
    /// Smallest `|det tr(s^j E^α)/2|` over the grid; zero exactly when the
    /// principal symbol vanishes for some nonzero momentum.
    pub min_frame_det: f64,
    /// Largest `|tr E^α|` (3D only).
    pub trace_defect: Option<f64>,
    pub hermitian: bool,
    pub non_degenerate: bool,
    pub trace_free: Option<bool>,
    pub valid: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::expr::parse_expression;

    fn chart3() -> Chart {
        Chart::new(3, 8, None).unwrap()
    }

    fn m(s: [[&str; 2]; 2]) -> MatrixExpr {
        MatrixExpr::parse(s).unwrap()
    }

    #[test]
    fn arity_is_checked() {
        let e = vec![MatrixExpr::identity(), MatrixExpr::identity()];
        assert_eq!(
            FullSymbol::from_canonical(e, MatrixExpr::zero(), &chart3()).unwrap_err(),
            Error::ArityMismatch {
                expected: 3,
                got: 2
            }
        );
    }

    #[test]
    fn dirac_principal_symbol() {
        let s = builtins::dirac3(&chart3()).unwrap();
        let x = Point::origin(3);
        let p = s
            .principal_at(&x, &Covector::new(&[0.0, 0.0, 1.0]))
            .unwrap();
        assert_eq!(p, pauli()[2]);
        assert_eq!(
            s.principal_at(&x, &Covector::new(&[0.0; 3])).unwrap(),
            Mat2::ZERO
        );
    }

    #[test]
    fn twisted_principal_symbol_at_pi() {
        let s = builtins::twisted3(&chart3()).unwrap();
        let x = Point::new(&[0.0, 0.0, std::f64::consts::PI]);
        let p = s
            .principal_at(&x, &Covector::new(&[1.0, 0.0, 0.0]))
            .unwrap();
        assert!((p + pauli()[0]).max_abs() < 1e-15);
    }

    #[test]
    fn raw_form_with_constant_fields() {
        let c = chart3();
        let s = pauli();
        let half_i = C64::new(0.0, 0.5);
        let a: Vec<_> = (0..3)
            .map(|k| MatrixExpr::constant(&s[k].scale(-half_i)))
            .collect();
        let b: Vec<_> = (0..3)
            .map(|k| MatrixExpr::constant(&s[k].scale(half_i)))
            .collect();
        let sym = FullSymbol::from_raw(
            &RawForm {
                a,
                b,
                c: MatrixExpr::zero(),
            },
            &c,
        )
        .unwrap();
        let jet = sym.jet(&Point::new(&[0.3, 1.0, 2.0])).unwrap();
        for k in 0..3 {
            assert!((jet.e[k] - s[k]).max_abs() < 1e-15);
        }
        assert_eq!(jet.f, Mat2::ZERO);
    }

    #[test]
    fn raw_form_cancellation_is_degenerate() {
        let c = chart3();
        let g = m([["sin(x1)", "i"], ["2", "x2"]]);
        let sym = FullSymbol::from_raw(
            &RawForm {
                a: vec![g.clone(); 3],
                b: vec![g; 3],
                c: MatrixExpr::zero(),
            },
            &c,
        )
        .unwrap();
        let report = sym.validate(&c).unwrap();
        assert!(!report.non_degenerate);
        assert_eq!(report.min_frame_det, 0.0);
    }

    #[test]
    fn raw_form_derivative_term_matches_finite_differences() {
        let c = chart3();
        let a1 = m([["-i*sin(x1)", "0"], ["0", "-i*sin(x1)"]]);
        let raw = RawForm {
            a: vec![a1.clone(), MatrixExpr::zero(), MatrixExpr::zero()],
            b: vec![MatrixExpr::zero(); 3],
            c: MatrixExpr::zero(),
        };
        let sym = FullSymbol::from_raw(&raw, &c).unwrap();
        // Oracle: F = −½ ∂₁(A¹ + B¹) by central differences of the raw entry.
        let entry = parse_expression("-i*sin(x1)").unwrap();
        let h = 1e-5;
        for x1 in [0.0, 0.7, 2.0, 4.4] {
            let fwd = entry.value_at(&[x1 + h, 0.0, 0.0]).unwrap();
            let bwd = entry.value_at(&[x1 - h, 0.0, 0.0]).unwrap();
            let oracle_f = -0.5 * (fwd - bwd) / (2.0 * h);
            let jet = sym.jet(&Point::new(&[x1, 0.0, 0.0])).unwrap();
            assert!((jet.e[0].0[0][0] - C64::new(x1.sin(), 0.0)).norm() < 1e-15);
            assert!((jet.f.0[0][0] - oracle_f).norm() < 1e-9);
            // The conversion formula gives (i/2)cos(x¹) on the diagonal.
            assert!((jet.f.0[1][1] - C64::new(0.0, 0.5 * x1.cos())).norm() < 1e-14);
        }
    }

    #[test]
    fn constant_hermitian_shift_of_raw_form() {
        let c = chart3();
        let s = pauli();
        let half_i = C64::new(0.0, 0.5);
        let g = Mat2::new(
            C64::new(1.0, 0.0),
            C64::new(0.3, -0.2),
            C64::new(0.3, 0.2),
            C64::new(-2.0, 0.0),
        );
        let a: Vec<_> = (0..3)
            .map(|k| MatrixExpr::constant(&s[k].scale(-half_i)))
            .collect();
        let b: Vec<_> = (0..3)
            .map(|k| MatrixExpr::constant(&s[k].scale(half_i)))
            .collect();
        let base = FullSymbol::from_raw(
            &RawForm {
                a: a.clone(),
                b: b.clone(),
                c: MatrixExpr::zero(),
            },
            &c,
        )
        .unwrap();
        let shift = MatrixExpr::constant(&g);
        let shifted = RawForm {
            a: a.iter().map(|x| x.add(&shift)).collect(),
            b: b.iter()
                .map(|x| x.add(&MatrixExpr::constant(&g.dagger())))
                .collect(),
            c: MatrixExpr::zero(),
        };
        let shifted = FullSymbol::from_raw(&shifted, &c).unwrap();
        let x = Point::new(&[0.1, 0.2, 0.3]);
        let (j0, j1) = (base.jet(&x).unwrap(), shifted.jet(&x).unwrap());
        for k in 0..3 {
            assert!((j0.e[k] - j1.e[k]).max_abs() < 1e-15);
        }
        assert!((j0.f - j1.f).max_abs() < 1e-15);
    }

    #[test]
    fn validation_reports() {
        let c = chart3();
        let r = builtins::dirac3(&c).unwrap().validate(&c).unwrap();
        assert!(r.valid && r.hermitian && r.trace_free == Some(true));
        assert!((r.min_frame_det - 1.0).abs() < 1e-15);

        let s = FullSymbol::from_canonical(
            vec![
                m([["i", "1"], ["1", "0"]]),
                m([["0", "-i"], ["i", "0"]]),
                m([["1", "0"], ["0", "-1"]]),
            ],
            MatrixExpr::zero(),
            &c,
        )
        .unwrap();
        let r = s.validate(&c).unwrap();
        assert!(!r.hermitian);
        assert!((r.hermiticity_defect - 2.0).abs() < 1e-15);

        let s1 = m([["0", "1"], ["1", "0"]]);
        let s = FullSymbol::from_canonical(
            vec![s1.clone(), s1, m([["1", "0"], ["0", "-1"]])],
            MatrixExpr::zero(),
            &c,
        )
        .unwrap();
        let r = s.validate(&c).unwrap();
        assert!(!r.non_degenerate && !r.valid);
    }

    #[test]
    fn principal_symbol_is_additive_in_momentum() {
        let c = chart3();
        let s = builtins::twisted3(&c).unwrap();
        let x = Point::new(&[0.5, 1.5, 2.5]);
        let p = Covector::new(&[0.3, -1.0, 2.0]);
        let q = Covector::new(&[1.1, 0.4, -0.7]);
        let sum = Covector::new(&[1.4, -0.6, 1.3]);
        let lhs = s.principal_at(&x, &sum).unwrap();
        let rhs = s.principal_at(&x, &p).unwrap() + s.principal_at(&x, &q).unwrap();
        assert!((lhs - rhs).max_abs() < 1e-15);
    }
}
