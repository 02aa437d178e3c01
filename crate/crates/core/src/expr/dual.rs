//! Forward-mode dual numbers over ℂ carrying up to four first partials.

use num_complex::Complex64 as C64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: C64,
    pub d: [C64; 4],
}

const Z: C64 = C64::new(0.0, 0.0);

impl Dual {
    pub fn constant(v: C64) -> Self {
        Dual { v, d: [Z; 4] }
    }

    /// The coordinate function `x^(axis+1)` at value `x`.
    pub fn variable(x: f64, axis: usize) -> Self {
        let mut d = [Z; 4];
        d[axis] = C64::new(1.0, 0.0);
        Dual {
            v: C64::new(x, 0.0),
            d,
        }
    }

    fn chain(self, v: C64, dv: C64) -> Self {
        Dual {
            v,
            d: self.d.map(|x| x * dv),
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }

    pub fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }

    pub fn powi(self, n: i32) -> Option<Self> {
        match n {
            0 => Some(Dual::constant(C64::new(1.0, 0.0))),
            n if n > 0 => {
                let v = self.v.powi(n);
                let dv = self.v.powi(n - 1) * n as f64;
                Some(self.chain(v, dv))
            }
            n => Dual::constant(C64::new(1.0, 0.0)).checked_div(self.powi(-n)?),
        }
    }

    pub fn checked_div(self, o: Dual) -> Option<Self> {
        if o.v.norm() == 0.0 {
            return None;
        }
        let inv = o.v.inv();
        let v = self.v * inv;
        let mut d = [Z; 4];
        for (k, slot) in d.iter_mut().enumerate() {
            *slot = (self.d[k] - v * o.d[k]) * inv;
        }
        Some(Dual { v, d })
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        let mut d = self.d;
        for (a, b) in d.iter_mut().zip(o.d) {
            *a += b;
        }
        Dual { v: self.v + o.v, d }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        self + (-o)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            v: -self.v,
            d: self.d.map(|x| -x),
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        let mut d = [Z; 4];
        for (k, slot) in d.iter_mut().enumerate() {
            *slot = self.d[k] * o.v + self.v * o.d[k];
        }
        Dual { v: self.v * o.v, d }
    }
}

impl Div for Dual {
    type Output = Option<Dual>;
    fn div(self, o: Dual) -> Option<Dual> {
        self.checked_div(o)
    }
}
