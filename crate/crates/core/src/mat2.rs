//! Dense 2×2 complex matrices and the Pauli basis.

use num_complex::Complex64 as C64;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[C64; 2]; 2]);

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2([[a, ZERO], [ZERO, d]])
    }

    pub fn scalar(s: C64) -> Self {
        Self::diag(s, s)
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Adjugate: `[[a, b], [c, d]] ↦ [[d, -b], [-c, a]]`.
    pub fn adj(&self) -> Self {
        let m = &self.0;
        Mat2([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        Some(self.adj().scale(d.inv()))
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.dagger()).max_abs()
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Real coefficients `x_j` with `self = Σ x_j s^j` (j = 1..4, `s^4 = Id`),
    /// exact for Hermitian input.
    pub fn pauli_coefficients(&self) -> [f64; 4] {
        let p = pauli();
        [
            0.5 * (p[0] * *self).trace().re,
            0.5 * (p[1] * *self).trace().re,
            0.5 * (p[2] * *self).trace().re,
            0.5 * self.trace().re,
        ]
    }

    pub fn from_pauli_coefficients(x: &[f64]) -> Self {
        let p = pauli();
        x.iter()
            .zip(p.iter())
            .fold(Mat2::ZERO, |acc, (c, s)| acc + s.scale_re(*c))
    }
}

/// The standard Hermitian basis `s^1, s^2, s^3, s^4 = Id`.
pub fn pauli() -> [Mat2; 4] {
    [
        Mat2([[ZERO, ONE], [ONE, ZERO]]),
        Mat2([[ZERO, -I], [I, ZERO]]),
        Mat2([[ONE, ZERO], [ZERO, -ONE]]),
        Mat2::IDENTITY,
    ]
}

/// Minkowski signature `diag(1, 1, 1, -1)` restricted to the first `dim` axes.
pub fn eta(dim: usize) -> Vec<f64> {
    (0..dim).map(|j| if j == 3 { -1.0 } else { 1.0 }).collect()
}

/// A matrix value with its first partials `d[k] = ∂_k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MatJet {
    pub v: Mat2,
    pub d: [Mat2; 4],
}

impl MatJet {
    pub fn constant(v: Mat2) -> Self {
        MatJet {
            v,
            d: [Mat2::ZERO; 4],
        }
    }

    pub fn dagger(&self) -> Self {
        MatJet {
            v: self.v.dagger(),
            d: self.d.map(|m| m.dagger()),
        }
    }

    /// Product rule.
    pub fn mul(&self, o: &MatJet) -> MatJet {
        let mut d = [Mat2::ZERO; 4];
        for (k, slot) in d.iter_mut().enumerate() {
            *slot = self.d[k] * o.v + self.v * o.d[k];
        }
        MatJet { v: self.v * o.v, d }
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale_re(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_trace_orthogonality() {
        let s = pauli();
        for j in 0..4 {
            for k in 0..4 {
                let t = (s[j] * s[k]).trace();
                let expected = if j == k { 2.0 } else { 0.0 };
                assert!((t - C64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn pauli_anticommutator() {
        let s = pauli();
        for j in 0..3 {
            for k in 0..3 {
                let ac = s[j] * s[k] + s[k] * s[j];
                let expected = if j == k {
                    Mat2::scalar(C64::new(2.0, 0.0))
                } else {
                    Mat2::ZERO
                };
                assert!((ac - expected).max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn adjugate_is_det_times_inverse() {
        let m = Mat2::new(
            C64::new(1.0, 2.0),
            C64::new(0.5, -1.0),
            C64::new(3.0, 0.0),
            C64::new(-2.0, 0.5),
        );
        let p = m * m.adj();
        assert!((p - Mat2::scalar(m.det())).max_abs() < 1e-14);
    }

    #[test]
    fn pauli_coefficients_round_trip() {
        let x = [0.3, -1.2, 0.7, 2.5];
        let m = Mat2::from_pauli_coefficients(&x);
        let y = m.pauli_coefficients();
        for (a, b) in x.iter().zip(y.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
