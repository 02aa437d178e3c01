//! Gauge-theoretic invariants of first-order 2×2 Hermitian sesquilinear forms
//! on coordinate tori.

pub mod builtins;
pub mod chart;
pub mod cli;
pub mod config;
pub mod equivalence;
pub mod error;
pub mod expr;
pub mod framing;
pub mod geometry;
pub mod mat2;
pub mod opcorr;
pub mod report;
pub mod spectral;
pub mod symbol;

pub use chart::{Chart, Point};
pub use error::{Error, Result};
pub use expr::{parse_expression, Expr, MatrixExpr};
pub use mat2::Mat2;
pub use symbol::{Covector, FullSymbol, RawForm, SymbolJet, ValidationReport};
