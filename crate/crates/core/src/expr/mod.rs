//! Expression language for complex scalar fields on a chart.
//!
//! Expressions are immutable trees over numeric literals, `i`, `pi`, the
//! coordinates `x1..x4`, the four arithmetic operators, integer powers and
//! `sin`, `cos`, `exp`. Evaluation returns exact first partials through
//! [`Dual`] numbers. Symbolic conjugation and differentiation are provided so
//! that gauge-transformed symbols stay expression-backed.

mod dual;
mod parse;

pub use dual::Dual;
pub use parse::parse_expression;

use crate::chart::Point;
use crate::error::{Error, Result};
use crate::mat2::{Mat2, MatJet};
use num_complex::Complex64 as C64;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Imag,
    Pi,
    /// Complex constant produced by symbolic construction; never by the parser.
    Const(C64),
    /// Coordinate `x^k`, 1-based.
    Var(usize),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Call(Func, Expr),
}

/// Cheaply clonable handle to an immutable expression tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(x: f64) -> Self {
        Expr::from_node(Node::Num(x))
    }

    pub fn constant(c: C64) -> Self {
        if c.im == 0.0 && c.re >= 0.0 {
            Expr::num(c.re)
        } else {
            Expr::from_node(Node::Const(c))
        }
    }

    pub fn var(k: usize) -> Self {
        Expr::from_node(Node::Var(k))
    }

    pub fn zero() -> Self {
        Expr::num(0.0)
    }

    pub fn one() -> Self {
        Expr::num(1.0)
    }

    /// Value of the tree if it contains no variables.
    pub fn as_constant(&self) -> Option<C64> {
        match self.node() {
            Node::Num(x) => Some(C64::new(*x, 0.0)),
            Node::Imag => Some(C64::new(0.0, 1.0)),
            Node::Pi => Some(C64::new(std::f64::consts::PI, 0.0)),
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(C64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        self.as_constant() == Some(C64::new(1.0, 0.0))
    }

    // Folding builders. They only collapse constants, zeros and ones.

    pub fn add(&self, o: &Expr) -> Expr {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_constant(), o.as_constant()) {
            return Expr::constant(a + b);
        }
        Expr::from_node(Node::Add(self.clone(), o.clone()))
    }

    pub fn sub(&self, o: &Expr) -> Expr {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.neg();
        }
        if let (Some(a), Some(b)) = (self.as_constant(), o.as_constant()) {
            return Expr::constant(a - b);
        }
        Expr::from_node(Node::Sub(self.clone(), o.clone()))
    }

    pub fn mul(&self, o: &Expr) -> Expr {
        if self.is_zero() || o.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_constant(), o.as_constant()) {
            return Expr::constant(a * b);
        }
        Expr::from_node(Node::Mul(self.clone(), o.clone()))
    }

    pub fn div(&self, o: &Expr) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        if o.is_one() {
            return self.clone();
        }
        Expr::from_node(Node::Div(self.clone(), o.clone()))
    }

    pub fn neg(&self) -> Expr {
        if let Some(c) = self.as_constant() {
            return Expr::constant(-c);
        }
        if let Node::Neg(inner) = self.node() {
            return inner.clone();
        }
        Expr::from_node(Node::Neg(self.clone()))
    }

    pub fn powi(&self, n: i32) -> Expr {
        match n {
            0 => Expr::one(),
            1 => self.clone(),
            _ => Expr::from_node(Node::Pow(self.clone(), n)),
        }
    }

    pub fn call(f: Func, arg: &Expr) -> Expr {
        Expr::from_node(Node::Call(f, arg.clone()))
    }

    /// Largest coordinate index referenced (0 if none).
    pub fn max_var(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Imag | Node::Pi | Node::Const(_) => 0,
            Node::Var(k) => *k,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.max_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    /// Checks that only `x1..x_dim` are referenced.
    pub fn bind(&self, dim: usize) -> Result<()> {
        let k = self.max_var();
        if k > dim {
            return Err(Error::VariableOutOfRange { var: k, dim });
        }
        Ok(())
    }

    /// Value and exact first partials at `x`.
    pub fn eval(&self, x: &Point) -> Result<Dual> {
        self.eval_at(x.as_slice())
    }

    pub fn eval_at(&self, x: &[f64]) -> Result<Dual> {
        Ok(match self.node() {
            Node::Num(v) => Dual::constant(C64::new(*v, 0.0)),
            Node::Imag => Dual::constant(C64::new(0.0, 1.0)),
            Node::Pi => Dual::constant(C64::new(std::f64::consts::PI, 0.0)),
            Node::Const(c) => Dual::constant(*c),
            Node::Var(k) => match x.get(k - 1) {
                Some(v) => Dual::variable(*v, k - 1),
                None => {
                    return Err(Error::VariableOutOfRange {
                        var: *k,
                        dim: x.len(),
                    })
                }
            },
            Node::Neg(a) => -a.eval_at(x)?,
            Node::Add(a, b) => a.eval_at(x)? + b.eval_at(x)?,
            Node::Sub(a, b) => a.eval_at(x)? - b.eval_at(x)?,
            Node::Mul(a, b) => a.eval_at(x)? * b.eval_at(x)?,
            Node::Div(a, b) => (a.eval_at(x)? / b.eval_at(x)?).ok_or(Error::DivisionByZero)?,
            Node::Pow(a, n) => a.eval_at(x)?.powi(*n).ok_or(Error::DivisionByZero)?,
            Node::Call(f, a) => {
                let v = a.eval_at(x)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                }
            }
        })
    }

    pub fn value_at(&self, x: &[f64]) -> Result<C64> {
        Ok(self.eval_at(x)?.v)
    }

    /// Pointwise complex conjugate. Coordinates are real and `sin`, `cos`,
    /// `exp` commute with conjugation, so only constants change.
    pub fn conj(&self) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Pi | Node::Var(_) => self.clone(),
            Node::Imag => Expr::constant(C64::new(0.0, -1.0)),
            Node::Const(c) => Expr::constant(c.conj()),
            Node::Neg(a) => a.conj().neg(),
            Node::Add(a, b) => a.conj().add(&b.conj()),
            Node::Sub(a, b) => a.conj().sub(&b.conj()),
            Node::Mul(a, b) => a.conj().mul(&b.conj()),
            Node::Div(a, b) => a.conj().div(&b.conj()),
            Node::Pow(a, n) => a.conj().powi(*n),
            Node::Call(f, a) => Expr::call(*f, &a.conj()),
        }
    }

    /// Symbolic partial derivative with respect to `x^(axis+1)`.
    pub fn diff(&self, axis: usize) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Imag | Node::Pi | Node::Const(_) => Expr::zero(),
            Node::Var(k) => {
                if *k == axis + 1 {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Neg(a) => a.diff(axis).neg(),
            Node::Add(a, b) => a.diff(axis).add(&b.diff(axis)),
            Node::Sub(a, b) => a.diff(axis).sub(&b.diff(axis)),
            Node::Mul(a, b) => a.diff(axis).mul(b).add(&a.mul(&b.diff(axis))),
            Node::Div(a, b) => {
                let num = a.diff(axis).mul(b).sub(&a.mul(&b.diff(axis)));
                if num.is_zero() {
                    return Expr::zero();
                }
                num.div(&b.powi(2))
            }
            Node::Pow(a, n) => {
                let da = a.diff(axis);
                if da.is_zero() {
                    return Expr::zero();
                }
                Expr::num(*n as f64).mul(&a.powi(n - 1)).mul(&da)
            }
            Node::Call(f, a) => {
                let da = a.diff(axis);
                if da.is_zero() {
                    return Expr::zero();
                }
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, a),
                    Func::Cos => Expr::call(Func::Sin, a).neg(),
                    Func::Exp => self.clone(),
                };
                outer.mul(&da)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn fmt_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x < 0.0 || (x == 0.0 && x.is_sign_negative()) {
        write!(f, "(-{})", -x)
    } else {
        write!(f, "{x}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Num(x) => fmt_real(f, *x),
            Node::Imag => write!(f, "i"),
            Node::Pi => write!(f, "pi"),
            Node::Const(c) => {
                if c.im == 0.0 {
                    fmt_real(f, c.re)
                } else if c.re == 0.0 {
                    write!(f, "(")?;
                    fmt_real(f, c.im)?;
                    write!(f, "*i)")
                } else {
                    write!(f, "(")?;
                    fmt_real(f, c.re)?;
                    write!(f, " + ")?;
                    fmt_real(f, c.im)?;
                    write!(f, "*i)")
                }
            }
            Node::Var(k) => write!(f, "x{k}"),
            Node::Neg(a) => {
                write!(f, "-")?;
                a.fmt_child(f, 5)
            }
            Node::Add(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " + ")?;
                b.fmt_child(f, 2)
            }
            Node::Sub(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " - ")?;
                b.fmt_child(f, 2)
            }
            Node::Mul(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "*")?;
                b.fmt_child(f, 3)
            }
            Node::Div(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "/")?;
                b.fmt_child(f, 3)
            }
            Node::Pow(a, n) => {
                a.fmt_child(f, 5)?;
                write!(f, "^{n}")
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A 2×2 matrix of expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixExpr(pub [[Expr; 2]; 2]);

impl MatrixExpr {
    pub fn parse(entries: [[&str; 2]; 2]) -> Result<Self> {
        Ok(MatrixExpr([
            [
                parse_expression(entries[0][0])?,
                parse_expression(entries[0][1])?,
            ],
            [
                parse_expression(entries[1][0])?,
                parse_expression(entries[1][1])?,
            ],
        ]))
    }

    pub fn constant(m: &Mat2) -> Self {
        let c = |z: C64| Expr::constant(z);
        MatrixExpr([[c(m.0[0][0]), c(m.0[0][1])], [c(m.0[1][0]), c(m.0[1][1])]])
    }

    pub fn zero() -> Self {
        Self::constant(&Mat2::ZERO)
    }

    pub fn identity() -> Self {
        Self::constant(&Mat2::IDENTITY)
    }

    pub fn entries(&self) -> impl Iterator<Item = &Expr> {
        self.0.iter().flatten()
    }

    pub fn max_var(&self) -> usize {
        self.entries().map(Expr::max_var).max().unwrap_or(0)
    }

    pub fn bind(&self, dim: usize) -> Result<()> {
        self.entries().try_for_each(|e| e.bind(dim))
    }

    pub fn is_constant(&self) -> bool {
        self.max_var() == 0
    }

    pub fn eval(&self, x: &Point) -> Result<MatJet> {
        let mut jet = MatJet::default();
        for r in 0..2 {
            for c in 0..2 {
                let d = self.0[r][c].eval(x)?;
                jet.v.0[r][c] = d.v;
                for k in 0..4 {
                    jet.d[k].0[r][c] = d.d[k];
                }
            }
        }
        Ok(jet)
    }

    pub fn value(&self, x: &Point) -> Result<Mat2> {
        let mut m = Mat2::ZERO;
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] = self.0[r][c].value_at(x.as_slice())?;
            }
        }
        Ok(m)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        let m = &self.0;
        MatrixExpr([[f(&m[0][0]), f(&m[0][1])], [f(&m[1][0]), f(&m[1][1])]])
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        MatrixExpr([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn diff(&self, axis: usize) -> Self {
        self.map(|e| e.diff(axis))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        MatrixExpr([
            [a[0][0].add(&b[0][0]), a[0][1].add(&b[0][1])],
            [a[1][0].add(&b[1][0]), a[1][1].add(&b[1][1])],
        ])
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        MatrixExpr([
            [a[0][0].sub(&b[0][0]), a[0][1].sub(&b[0][1])],
            [a[1][0].sub(&b[1][0]), a[1][1].sub(&b[1][1])],
        ])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        let entry = |r: usize, c: usize| a[r][0].mul(&b[0][c]).add(&a[r][1].mul(&b[1][c]));
        MatrixExpr([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
    }

    pub fn scale(&self, s: &Expr) -> Self {
        self.map(|e| s.mul(e))
    }

    pub fn to_strings(&self) -> [[String; 2]; 2] {
        let m = &self.0;
        [
            [m[0][0].to_string(), m[0][1].to_string()],
            [m[1][0].to_string(), m[1][1].to_string()],
        ]
    }
}
