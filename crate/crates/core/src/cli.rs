//! The `gaugeforms` command-line tool.

use crate::builtins;
use crate::chart::Chart;
use crate::config::{ConfigDocument, Manifold};
use crate::equivalence::{
    apply_gauge, decide_equivalence, lift_report, CompareOptions, Group, Lattice, Mode,
};
use crate::error::Error;
use crate::report::{analyze, ComparisonDocument, LiftDocument};
use crate::symbol::FullSymbol;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_EQUIVALENT: i32 = 3;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "GAUGEFORMS_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "gaugeforms",
    version,
    about = "Gauge invariants and equivalence of 2x2 first-order forms on tori"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a symbol and report metric, potentials, charges and frame data.
    Analyze(AnalyzeArgs),
    /// Decide whether two symbols are gauge equivalent.
    Compare(CompareArgs),
    /// Apply a gauge map from a config file and print the resulting config.
    Transform(TransformArgs),
    /// Report the frame transition between two symbols and its spin lift data.
    Lift(LiftArgs),
}

#[derive(Args, Debug)]
pub struct Common {
    /// Config file with a [manifold] block and named blocks.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Points per axis; overrides the config.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Symbol name from the config, or a built-in.
    pub symbol: Option<String>,
    /// A built-in symbol (dirac3, twisted3, twisted3_kXYZ, weyl4, weyl4_twisted).
    #[arg(long, conflicts_with = "symbol")]
    pub builtin: Option<String>,
    /// Report invalid symbols with exit status 0.
    #[arg(long)]
    pub allow_invalid: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GroupArg {
    Gl,
    Sl,
    U,
    Su,
}

impl From<GroupArg> for Group {
    fn from(g: GroupArg) -> Group {
        match g {
            GroupArg::Gl => Group::GL,
            GroupArg::Sl => Group::SL,
            GroupArg::U => Group::U,
            GroupArg::Su => Group::SU,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Principal,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LatticeArg {
    Strict,
    HalfPeriod,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    pub first: String,
    pub second: String,
    #[arg(long, value_enum, default_value = "u")]
    pub group: GroupArg,
    #[arg(long, value_enum, default_value = "full")]
    pub mode: ModeArg,
    /// Period lattice for the potential comparison.
    #[arg(long, value_enum)]
    pub lattice: Option<LatticeArg>,
    #[arg(long)]
    pub tol_metric: Option<f64>,
    #[arg(long)]
    pub tol_conformal: Option<f64>,
    #[arg(long)]
    pub tol_potential: Option<f64>,
    #[arg(long)]
    pub tol_residual: Option<f64>,
    /// Samples per loop for the monodromy of expression symbols.
    #[arg(long)]
    pub loop_samples: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    pub symbol: String,
    /// Gauge block name from the config.
    pub gauge: String,
    /// Name of the emitted symbol block.
    #[arg(long, default_value = "transformed")]
    pub name: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    pub first: String,
    pub second: String,
    #[arg(long)]
    pub loop_samples: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::UnknownIdentifier { .. }
            | Error::VariableOutOfRange { .. }
            | Error::Config { .. } => EXIT_PARSE,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn default_grid(dim: usize) -> usize {
    if dim == 3 {
        32
    } else {
        12
    }
}

struct Context {
    doc: Option<ConfigDocument>,
    chart: Chart,
}

fn load(common: &Common, names: &[&str]) -> Result<Context, Failure> {
    let doc = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: EXIT_PARSE,
                message: format!("{}: {e}", path.display()),
            })?;
            Some(ConfigDocument::parse(&text)?)
        }
        None => None,
    };
    let chart = match &doc {
        Some(d) => Chart::new(
            d.manifold.dim,
            common.grid.unwrap_or(d.manifold.grid),
            d.manifold.q_ref,
        )?,
        None => {
            let dim = names
                .iter()
                .map(|n| builtins::builtin_dim(n).ok_or_else(|| Error::UnknownName((*n).into())))
                .collect::<Result<Vec<_>, _>>()?;
            let d = dim.first().copied().unwrap_or(3);
            if dim.iter().any(|x| *x != d) {
                return Err(Failure {
                    code: EXIT_INVALID,
                    message: "built-ins of different dimension".into(),
                });
            }
            let q = (d == 4).then_some([0.0, 0.0, 0.0, 1.0]);
            Chart::new(d, common.grid.unwrap_or_else(|| default_grid(d)), q)?
        }
    };
    Ok(Context { doc, chart })
}

impl Context {
    fn symbol(&self, name: &str) -> Result<FullSymbol, Failure> {
        Ok(match &self.doc {
            Some(d) => d.symbol(name, &self.chart)?,
            None => builtins::builtin(name, &self.chart)?,
        })
    }
}

fn emit(common: &Common, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure {
        code: EXIT_INVALID,
        message: e.to_string(),
    };
    match &common.output {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn run_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let name = a
        .builtin
        .as_deref()
        .or(a.symbol.as_deref())
        .ok_or_else(|| Failure {
            code: EXIT_PARSE,
            message: "no symbol given".into(),
        })?;
    let ctx = load(
        &a.common,
        if a.common.config.is_some() {
            &[]
        } else {
            std::slice::from_ref(&name)
        },
    )?;
    let s = ctx.symbol(name)?;
    let report = analyze(&s, name, &ctx.chart)?;
    emit(&a.common, &json(&report), out)?;
    Ok(if report.ok() || a.allow_invalid {
        EXIT_OK
    } else {
        EXIT_INVALID
    })
}

fn run_compare(a: &CompareArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let names = [a.first.as_str(), a.second.as_str()];
    let ctx = load(
        &a.common,
        if a.common.config.is_some() {
            &[]
        } else {
            &names
        },
    )?;
    let s = ctx.symbol(&a.first)?;
    let st = ctx.symbol(&a.second)?;
    let mode = match a.mode {
        ModeArg::Principal => Mode::Principal,
        ModeArg::Full => Mode::Full,
    };
    let mut opts = CompareOptions::new(a.group.into(), mode);
    opts.lattice = a.lattice.map(|l| match l {
        LatticeArg::Strict => Lattice::Strict,
        LatticeArg::HalfPeriod => Lattice::HalfPeriod,
    });
    opts.loop_samples = a.loop_samples;
    for (slot, v) in [
        (&mut opts.tol.metric, a.tol_metric),
        (&mut opts.tol.conformal, a.tol_conformal),
        (&mut opts.tol.potential, a.tol_potential),
        (&mut opts.tol.residual, a.tol_residual),
    ] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    let decision = decide_equivalence(&s, &st, &ctx.chart, &opts)?;
    let equivalent = decision.report.equivalent;
    emit(
        &a.common,
        &json(&ComparisonDocument::new(
            &a.first,
            &a.second,
            decision.report,
        )),
        out,
    )?;
    Ok(if equivalent {
        EXIT_OK
    } else {
        EXIT_NOT_EQUIVALENT
    })
}

fn run_transform(a: &TransformArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.common.config.is_none() {
        return Err(Failure {
            code: EXIT_PARSE,
            message: "transform needs --config with a [gauge] block".into(),
        });
    }
    let ctx = load(&a.common, &[])?;
    let doc = ctx.doc.as_ref().expect("config loaded");
    let s = ctx.symbol(&a.symbol)?;
    let r = doc.gauge(&a.gauge, &ctx.chart)?;
    let st = apply_gauge(&s, &r, &ctx.chart)?;
    let mut result = ConfigDocument::new(Manifold {
        dim: ctx.chart.dim(),
        grid: ctx.chart.resolution(),
        q_ref: ctx.chart.q_ref(),
    });
    result.push_symbol(&a.name, &st)?;
    emit(&a.common, &result.render(), out)?;
    Ok(EXIT_OK)
}

fn run_lift(a: &LiftArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let names = [a.first.as_str(), a.second.as_str()];
    let ctx = load(
        &a.common,
        if a.common.config.is_some() {
            &[]
        } else {
            &names
        },
    )?;
    let s = ctx.symbol(&a.first)?;
    let st = ctx.symbol(&a.second)?;
    let report = lift_report(&s, &st, &ctx.chart, a.loop_samples)?;
    emit(
        &a.common,
        &json(&LiftDocument::new(&a.first, &a.second, report)),
        out,
    )?;
    Ok(EXIT_OK)
}

/// Sizes the global thread pool from `GAUGEFORMS_THREADS` when set.
pub fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Analyze(a) => run_analyze(a, out),
        Command::Compare(a) => run_compare(a, out),
        Command::Transform(a) => run_transform(a, out),
        Command::Lift(a) => run_lift(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
