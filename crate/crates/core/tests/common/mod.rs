#![allow(dead_code)]

use gaugeforms::equivalence::{GaugeMap, Group};
use gaugeforms::{Chart, FullSymbol, Mat2, MatrixExpr};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A real trigonometric term `amp·cos(k·x + phase)` with `k ∈ {−1,0,1}^dim`.
pub fn trig(rng: &mut ChaCha8Rng, dim: usize, amp: f64) -> String {
    let a = rng.gen_range(-amp..amp);
    let ph = rng.gen_range(0.0..std::f64::consts::TAU);
    let arg: Vec<String> = (1..=dim)
        .map(|k| format!("({})*x{k}", rng.gen_range(-1i32..=1)))
        .collect();
    format!("({a:.9})*cos({}+({ph:.9}))", arg.join("+"))
}

/// Sum of `terms` trigonometric terms.
pub fn trig_sum(rng: &mut ChaCha8Rng, dim: usize, amp: f64, terms: usize) -> String {
    (0..terms)
        .map(|_| trig(rng, dim, amp))
        .collect::<Vec<_>>()
        .join("+")
}

fn pauli(j: usize) -> [[&'static str; 2]; 2] {
    match j {
        0 => [["0", "1"], ["1", "0"]],
        1 => [["0", "-i"], ["i", "0"]],
        2 => [["1", "0"], ["0", "-1"]],
        _ => [["1", "0"], ["0", "1"]],
    }
}

/// `Σ_j c_j s^j` with string coefficients.
pub fn combine(c: &[String]) -> [[String; 2]; 2] {
    let mut out: [[Vec<String>; 2]; 2] = Default::default();
    for (j, cj) in c.iter().enumerate() {
        let s = pauli(j);
        for r in 0..2 {
            for k in 0..2 {
                if s[r][k] != "0" {
                    out[r][k].push(format!("({})*({cj})", s[r][k]));
                }
            }
        }
    }
    out.map(|row| {
        row.map(|v| {
            if v.is_empty() {
                "0".to_string()
            } else {
                v.join("+")
            }
        })
    })
}

/// Random Hermitian matrix of trigonometric polynomials.
pub fn hermitian_field(rng: &mut ChaCha8Rng, dim: usize, amp: f64) -> [[String; 2]; 2] {
    let c: Vec<String> = (0..4).map(|_| trig_sum(rng, dim, amp, 2)).collect();
    combine(&[c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
}

pub fn matrix(m: &[[String; 2]; 2]) -> MatrixExpr {
    MatrixExpr::parse([[&m[0][0], &m[0][1]], [&m[1][0], &m[1][1]]])
        .expect("generated entries parse")
}

/// Coefficient strings `c_j^α = δ_j^α + ε·(trig)`; `x_dependent = false` keeps them constant.
pub fn frame_coefficients(
    rng: &mut ChaCha8Rng,
    dim: usize,
    eps: f64,
    x_dependent: bool,
) -> Vec<Vec<String>> {
    (0..dim)
        .map(|a| {
            (0..dim)
                .map(|j| {
                    let base = if a == j { 1.0 } else { 0.0 };
                    let pert = if x_dependent {
                        trig(rng, dim, eps)
                    } else {
                        format!("{:.9}", rng.gen_range(-eps..eps))
                    };
                    format!("{base}+{pert}")
                })
                .collect()
        })
        .collect()
}

pub fn principal_fields(coeffs: &[Vec<String>]) -> Vec<[[String; 2]; 2]> {
    coeffs.iter().map(|c| combine(c)).collect()
}

/// A random valid symbol near the Dirac (3D) or Weyl (4D) symbol.
pub fn random_symbol(rng: &mut ChaCha8Rng, chart: &Chart, eps: f64) -> FullSymbol {
    let dim = chart.dim();
    let e = principal_fields(&frame_coefficients(rng, dim, eps, true));
    let f = hermitian_field(rng, dim, 0.5);
    FullSymbol::from_canonical(e.iter().map(matrix).collect(), matrix(&f), chart)
        .expect("random symbol")
}

fn mul(a: &[[String; 2]; 2], b: &[[String; 2]; 2]) -> [[String; 2]; 2] {
    let e = |i: usize, j: usize| format!("({})*({})+({})*({})", a[i][0], b[0][j], a[i][1], b[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn scale(s: &str, a: &[[String; 2]; 2]) -> [[String; 2]; 2] {
    a.clone().map(|row| row.map(|v| format!("({s})*({v})")))
}

/// Integer winding phase `n·x` with `n ∈ {−1,0,1}^dim`.
fn winding(rng: &mut ChaCha8Rng, dim: usize) -> String {
    let terms: Vec<String> = (1..=dim)
        .map(|k| format!("({})*x{k}", rng.gen_range(-1i32..=1)))
        .collect();
    terms.join("+")
}

pub fn su2_entries(rng: &mut ChaCha8Rng, dim: usize, amp: f64) -> [[String; 2]; 2] {
    let t = trig_sum(rng, dim, amp, 2);
    let p1 = trig_sum(rng, dim, amp, 2);
    let p2 = trig_sum(rng, dim, amp, 2);
    [
        [
            format!("cos({t})*exp(i*({p1}))"),
            format!("-sin({t})*exp(-i*({p2}))"),
        ],
        [
            format!("sin({t})*exp(i*({p2}))"),
            format!("cos({t})*exp(-i*({p1}))"),
        ],
    ]
}

/// Random gauge entries in `group`; `wind` allows a winding phase for U and GL.
pub fn gauge_entries(
    rng: &mut ChaCha8Rng,
    dim: usize,
    group: Group,
    amp: f64,
    wind: bool,
) -> [[String; 2]; 2] {
    let u = su2_entries(rng, dim, amp);
    match group {
        Group::SU => u,
        Group::U => {
            let ph = if wind {
                format!("{}+{}", winding(rng, dim), trig(rng, dim, amp))
            } else {
                trig(rng, dim, amp)
            };
            scale(&format!("exp(i*({ph}))"), &u)
        }
        Group::SL | Group::GL => {
            let s = trig_sum(rng, dim, amp, 2);
            let wr = trig(rng, dim, amp);
            let wi = trig(rng, dim, amp);
            let upper = [
                [format!("exp({s})"), format!("({wr})+i*({wi})")],
                ["0".to_string(), format!("exp(-({s}))")],
            ];
            let m = mul(&u, &upper);
            if group == Group::SL {
                m
            } else {
                let sigma = trig_sum(rng, dim, amp, 2);
                let ph = if wind {
                    format!("{}+{}", winding(rng, dim), trig(rng, dim, amp))
                } else {
                    trig(rng, dim, amp)
                };
                scale(&format!("exp(({sigma})+i*({ph}))"), &m)
            }
        }
    }
}

pub fn random_gauge(
    rng: &mut ChaCha8Rng,
    chart: &Chart,
    group: Group,
    amp: f64,
    wind: bool,
) -> GaugeMap {
    let m = gauge_entries(rng, chart.dim(), group, amp, wind);
    GaugeMap::new(matrix(&m), group, chart).expect("random gauge")
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_mat2(rng: &mut ChaCha8Rng) -> Mat2 {
    let mut m = Mat2::ZERO;
    for row in m.0.iter_mut() {
        for z in row.iter_mut() {
            *z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    m
}

/// Random element of SL(2,ℂ).
pub fn random_sl2c(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let m = random_mat2(rng);
        let d = m.det();
        if d.norm() > 0.1 {
            return m.scale(d.sqrt().inv());
        }
    }
}
