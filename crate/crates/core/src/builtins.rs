//! Built-in symbols.

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::MatrixExpr;
use crate::symbol::FullSymbol;

pub const NAMES: &[&str] = &[
    "dirac3",
    "twisted3",
    "twisted3_k000",
    "weyl4",
    "weyl4_twisted",
];

const S1: [[&str; 2]; 2] = [["0", "1"], ["1", "0"]];
const S2: [[&str; 2]; 2] = [["0", "-i"], ["i", "0"]];
const S3: [[&str; 2]; 2] = [["1", "0"], ["0", "-1"]];
const ID: [[&str; 2]; 2] = [["1", "0"], ["0", "1"]];

fn parse(m: [[&str; 2]; 2]) -> MatrixExpr {
    MatrixExpr::parse(m).expect("built-in entries parse")
}

fn twisted_fields(phase: &str) -> Vec<MatrixExpr> {
    let up = format!("exp(i*({phase}))");
    let down = format!("exp(-i*({phase}))");
    let up_i = format!("-i*exp(i*({phase}))");
    let down_i = format!("i*exp(-i*({phase}))");
    vec![
        parse([["0", &up], [&down, "0"]]),
        parse([["0", &up_i], [&down_i, "0"]]),
        parse(S3),
    ]
}

/// Massless Dirac symbol `s^α p_α` on 𝕋³.
pub fn dirac3(chart: &Chart) -> Result<FullSymbol> {
    FullSymbol::from_canonical(
        vec![parse(S1), parse(S2), parse(S3)],
        MatrixExpr::zero(),
        chart,
    )
}

/// Dirac principal symbol conjugated by `diag(e^{−ix³}, 1)`, with `F = 0`.
pub fn twisted3(chart: &Chart) -> Result<FullSymbol> {
    FullSymbol::from_canonical(twisted_fields("x3"), MatrixExpr::zero(), chart)
}

/// Dirac principal symbol conjugated by `diag(e^{−iκ·x}, 1)`, `κ ∈ {0,1}³`, with `F = 0`.
pub fn twisted3_k(kappa: [u8; 3], chart: &Chart) -> Result<FullSymbol> {
    let terms: Vec<String> = (0..3)
        .filter(|&j| kappa[j] != 0)
        .map(|j| format!("x{}", j + 1))
        .collect();
    if terms.is_empty() {
        return dirac3(chart);
    }
    FullSymbol::from_canonical(twisted_fields(&terms.join("+")), MatrixExpr::zero(), chart)
}

/// Weyl symbol `s^α p_α` with `s^4 = Id` on 𝕋⁴.
pub fn weyl4(chart: &Chart) -> Result<FullSymbol> {
    FullSymbol::from_canonical(
        vec![parse(S1), parse(S2), parse(S3), parse(ID)],
        MatrixExpr::zero(),
        chart,
    )
}

/// Weyl symbol with the spatial part twisted by `e^{ix³}` as in [`twisted3`].
pub fn weyl4_twisted(chart: &Chart) -> Result<FullSymbol> {
    let mut e = twisted_fields("x3");
    e.push(parse(ID));
    FullSymbol::from_canonical(e, MatrixExpr::zero(), chart)
}

/// Parses `twisted3_kXYZ` into `κ`.
pub fn parse_kappa(name: &str) -> Option<[u8; 3]> {
    let bits = name.strip_prefix("twisted3_k")?.as_bytes();
    if bits.len() != 3 || bits.iter().any(|b| *b != b'0' && *b != b'1') {
        return None;
    }
    Some([bits[0] - b'0', bits[1] - b'0', bits[2] - b'0'])
}

/// Dimension a built-in lives in.
pub fn builtin_dim(name: &str) -> Option<usize> {
    match name {
        "dirac3" | "twisted3" => Some(3),
        "weyl4" | "weyl4_twisted" => Some(4),
        n if parse_kappa(n).is_some() => Some(3),
        _ => None,
    }
}

pub fn builtin(name: &str, chart: &Chart) -> Result<FullSymbol> {
    let dim = builtin_dim(name).ok_or_else(|| Error::UnknownName(name.to_string()))?;
    if dim != chart.dim() {
        return Err(Error::ArityMismatch {
            expected: chart.dim(),
            got: dim,
        });
    }
    match name {
        "dirac3" => dirac3(chart),
        "twisted3" => twisted3(chart),
        "weyl4" => weyl4(chart),
        "weyl4_twisted" => weyl4_twisted(chart),
        n => twisted3_k(parse_kappa(n).expect("checked above"), chart),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Point;
    use crate::expr::parse_expression;
    use crate::mat2::pauli;
    use num_complex::Complex64 as C64;

    #[test]
    fn kappa_names() {
        assert_eq!(parse_kappa("twisted3_k101"), Some([1, 0, 1]));
        assert_eq!(parse_kappa("twisted3_k12"), None);
        assert_eq!(parse_kappa("twisted3_k201"), None);
        assert_eq!(builtin_dim("weyl4_twisted"), Some(4));
        assert_eq!(builtin_dim("nope"), None);
    }

    #[test]
    fn twisted_k001_is_twisted3() {
        let c = Chart::new(3, 8, None).unwrap();
        let a = twisted3(&c).unwrap();
        let b = twisted3_k([0, 0, 1], &c).unwrap();
        for x in c.points().step_by(37) {
            assert_eq!(a.jet(&x).unwrap(), b.jet(&x).unwrap());
        }
    }

    #[test]
    fn builtin_derivatives_match_finite_differences() {
        let c = Chart::new(3, 8, None).unwrap();
        let sym = twisted3_k([1, 1, 1], &c).unwrap();
        let (e, _) = sym.expressions().unwrap();
        let h = 1e-5;
        let x = [0.4, 2.2, 5.1];
        for m in e {
            for entry in m.entries() {
                let text = entry.to_string();
                let reparsed = parse_expression(&text).unwrap();
                let d = entry.eval_at(&x).unwrap();
                for k in 0..3 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[k] += h;
                    xm[k] -= h;
                    let fd = (reparsed.value_at(&xp).unwrap() - reparsed.value_at(&xm).unwrap())
                        / (2.0 * h);
                    assert!((d.d[k] - fd).norm() <= 1e-8 * (1.0 + fd.norm()));
                }
            }
        }
    }

    #[test]
    fn twisted_is_conjugated_dirac() {
        let c = Chart::new(3, 8, None).unwrap();
        let sym = twisted3(&c).unwrap();
        let s = pauli();
        for x3 in [0.0, 1.0, 3.5] {
            let r = crate::mat2::Mat2::diag(C64::new(0.0, -x3).exp(), C64::new(1.0, 0.0));
            let jet = sym.jet(&Point::new(&[0.0, 0.0, x3])).unwrap();
            for k in 0..3 {
                assert!((jet.e[k] - r.dagger() * s[k] * r).max_abs() < 1e-15);
            }
        }
    }
}
