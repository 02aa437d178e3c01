//! C interface to `gaugeforms`.
//!
//! Every function returns a [`GfStatus`]. On failure a message is kept per thread and
//! can be read with [`gf_last_error_message`]. Strings handed out by the library are
//! owned by the caller and released with [`gf_string_free`].

use gaugeforms::builtins;
use gaugeforms::config::ConfigDocument;
use gaugeforms::equivalence::{
    decide_equivalence, lift_report, CompareOptions, Group, Lattice, Mode,
};
use gaugeforms::framing::{lift_pointwise, spin_hom};
use gaugeforms::report::{analyze, ComparisonDocument, LiftDocument};
use gaugeforms::{Chart, Error, FullSymbol, Mat2};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed config text or expression.
    Parse = 3,
    /// Unknown name, bad dimension or grid, group not matching the dimension.
    InvalidArgument = 4,
    /// A numerical stage failed (degenerate metric, no lift, ...).
    Computation = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfGroup {
    GL = 0,
    SL = 1,
    U = 2,
    SU = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfMode {
    Principal = 0,
    Full = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfLattice {
    /// Half-period for GL/U, strict for SL/SU.
    Default = 0,
    Strict = 1,
    HalfPeriod = 2,
}

/// Options for [`gf_compare`]. Non-positive tolerances and a zero sample count mean
/// the library defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GfCompareOptions {
    pub group: GfGroup,
    pub mode: GfMode,
    pub lattice: GfLattice,
    pub tol_metric: f64,
    pub tol_conformal: f64,
    pub tol_potential: f64,
    pub tol_residual: f64,
    pub loop_samples: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfComplex {
    pub re: f64,
    pub im: f64,
}

/// A parsed config file. Opaque to C.
pub struct GfDocument {
    inner: ConfigDocument,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. }
            | Error::UnknownIdentifier { .. }
            | Error::VariableOutOfRange { .. }
            | Error::Config { .. } => GfStatus::Parse,
            Error::UnknownName(_)
            | Error::BadDimension(_)
            | Error::BadResolution(_)
            | Error::GroupDimensionMismatch { .. }
            | Error::ArityMismatch { .. }
            | Error::UnexpectedReferenceCovector => GfStatus::InvalidArgument,
            _ => GfStatus::Computation,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GfStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GfStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GfStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(GfStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GfStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn write_json<T: serde::Serialize>(v: &T, out: *mut *mut c_char) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).expect("reports serialize");
    *out = CString::new(s).expect("JSON has no nul").into_raw();
    Ok(())
}

fn default_grid(dim: usize) -> usize {
    if dim == 3 {
        32
    } else {
        12
    }
}

struct Resolved {
    chart: Chart,
    symbols: Vec<FullSymbol>,
}

/// Builds the chart from the document, or from the built-ins' dimension when `doc` is
/// null, and loads the named symbols.
unsafe fn resolve(doc: *const GfDocument, names: &[&str], grid: u32) -> Result<Resolved, Failure> {
    let grid = (grid > 0).then_some(grid as usize);
    let doc = doc.as_ref().map(|d| &d.inner);
    let chart = match doc {
        Some(d) => Chart::new(
            d.manifold.dim,
            grid.unwrap_or(d.manifold.grid),
            d.manifold.q_ref,
        )?,
        None => {
            let dims = names
                .iter()
                .map(|n| builtins::builtin_dim(n).ok_or_else(|| Error::UnknownName((*n).into())))
                .collect::<Result<Vec<_>, _>>()?;
            if dims.iter().any(|d| *d != dims[0]) {
                return Err(Failure(
                    GfStatus::InvalidArgument,
                    "built-ins of different dimension".into(),
                ));
            }
            let d = dims[0];
            let q = (d == 4).then_some([0.0, 0.0, 0.0, 1.0]);
            Chart::new(d, grid.unwrap_or_else(|| default_grid(d)), q)?
        }
    };
    let symbols = names
        .iter()
        .map(|n| match doc {
            Some(d) => d.symbol(n, &chart),
            None => builtins::builtin(n, &chart),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Resolved { chart, symbols })
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn gf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn gf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses config text into a document.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_document_parse(
    text: *const c_char,
    out: *mut *mut GfDocument,
) -> GfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inner = ConfigDocument::parse(self::text(text, "text")?)?;
        *out = Box::into_raw(Box::new(GfDocument { inner }));
        Ok(())
    })
}

/// Releases a document. Null is ignored.
///
/// # Safety
/// `doc` must come from [`gf_document_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gf_document_free(doc: *mut GfDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Number of symbol blocks in a document.
///
/// # Safety
/// `doc` must be a live document.
#[no_mangle]
pub unsafe extern "C" fn gf_document_symbol_count(doc: *const GfDocument) -> usize {
    doc.as_ref().map_or(0, |d| d.inner.symbols.len())
}

/// Analysis report as JSON. `doc` may be null to use built-in symbols; `grid` 0 picks
/// the document's grid or the built-in default. `out_valid` may be null.
///
/// # Safety
/// Pointers must be valid; `name` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn gf_analyze(
    doc: *const GfDocument,
    name: *const c_char,
    grid: u32,
    out_valid: *mut bool,
    out_json: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        *out_json = ptr::null_mut();
        let name = text(name, "name")?;
        let r = resolve(doc, &[name], grid)?;
        let report = analyze(&r.symbols[0], name, &r.chart)?;
        if !out_valid.is_null() {
            *out_valid = report.ok();
        }
        write_json(&report, out_json)
    })
}

/// Default comparison options for a group.
#[no_mangle]
pub extern "C" fn gf_compare_options_default(group: GfGroup) -> GfCompareOptions {
    GfCompareOptions {
        group,
        mode: GfMode::Full,
        lattice: GfLattice::Default,
        tol_metric: 0.0,
        tol_conformal: 0.0,
        tol_potential: 0.0,
        tol_residual: 0.0,
        loop_samples: 0,
    }
}

fn compare_options(o: &GfCompareOptions) -> CompareOptions {
    let group = match o.group {
        GfGroup::GL => Group::GL,
        GfGroup::SL => Group::SL,
        GfGroup::U => Group::U,
        GfGroup::SU => Group::SU,
    };
    let mode = match o.mode {
        GfMode::Principal => Mode::Principal,
        GfMode::Full => Mode::Full,
    };
    let mut opts = CompareOptions::new(group, mode);
    opts.lattice = match o.lattice {
        GfLattice::Default => None,
        GfLattice::Strict => Some(Lattice::Strict),
        GfLattice::HalfPeriod => Some(Lattice::HalfPeriod),
    };
    for (slot, v) in [
        (&mut opts.tol.metric, o.tol_metric),
        (&mut opts.tol.conformal, o.tol_conformal),
        (&mut opts.tol.potential, o.tol_potential),
        (&mut opts.tol.residual, o.tol_residual),
    ] {
        if v > 0.0 {
            *slot = v;
        }
    }
    opts.loop_samples = (o.loop_samples > 0).then_some(o.loop_samples as usize);
    opts
}

/// Equivalence decision as JSON. `options` may be null for the U defaults;
/// `out_equivalent` may be null.
///
/// # Safety
/// Pointers must be valid; names nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn gf_compare(
    doc: *const GfDocument,
    first: *const c_char,
    second: *const c_char,
    grid: u32,
    options: *const GfCompareOptions,
    out_equivalent: *mut bool,
    out_json: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        *out_json = ptr::null_mut();
        let (a, b) = (text(first, "first")?, text(second, "second")?);
        let opts = compare_options(
            &options
                .as_ref()
                .copied()
                .unwrap_or_else(|| gf_compare_options_default(GfGroup::U)),
        );
        let r = resolve(doc, &[a, b], grid)?;
        let decision = decide_equivalence(&r.symbols[0], &r.symbols[1], &r.chart, &opts)?;
        if !out_equivalent.is_null() {
            *out_equivalent = decision.report.equivalent;
        }
        write_json(&ComparisonDocument::new(a, b, decision.report), out_json)
    })
}

/// Frame transition and spin-lift data as JSON. `loop_samples` 0 means the default.
///
/// # Safety
/// Pointers must be valid; names nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn gf_lift(
    doc: *const GfDocument,
    first: *const c_char,
    second: *const c_char,
    grid: u32,
    loop_samples: u32,
    out_json: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        *out_json = ptr::null_mut();
        let (a, b) = (text(first, "first")?, text(second, "second")?);
        let r = resolve(doc, &[a, b], grid)?;
        let samples = (loop_samples > 0).then_some(loop_samples as usize);
        let report = lift_report(&r.symbols[0], &r.symbols[1], &r.chart, samples)?;
        write_json(&LiftDocument::new(a, b, report), out_json)
    })
}

/// `Π(R)` for a 2x2 matrix `r` (row-major, 4 entries) into `out` (row-major `dim*dim`).
/// `dim` is 3 for the rotation part or 4 for the Lorentz action.
///
/// # Safety
/// `r` must hold 4 values and `out` room for `dim*dim`.
#[no_mangle]
pub unsafe extern "C" fn gf_spin_hom(r: *const GfComplex, dim: u32, out: *mut f64) -> GfStatus {
    guard(|| {
        if r.is_null() {
            return Err(null("r"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if dim != 3 && dim != 4 {
            return Err(Error::BadDimension(dim as usize).into());
        }
        let v: Vec<Complex64> = std::slice::from_raw_parts(r, 4)
            .iter()
            .map(|z| Complex64::new(z.re, z.im))
            .collect();
        let m = spin_hom(&Mat2::new(v[0], v[1], v[2], v[3]), dim as usize);
        let n = dim as usize;
        let out = std::slice::from_raw_parts_mut(out, n * n);
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = m[(i, j)];
            }
        }
        Ok(())
    })
}

/// An `SU(2)` matrix `R` (row-major into `out`) with `Π(R) = o` for a rotation `o`
/// (row-major, 9 entries). The sign of `R` is not fixed.
///
/// # Safety
/// `o` must hold 9 values and `out` room for 4.
#[no_mangle]
pub unsafe extern "C" fn gf_lift_rotation(o: *const f64, out: *mut GfComplex) -> GfStatus {
    guard(|| {
        if o.is_null() {
            return Err(null("o"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let m = DMatrix::from_row_slice(3, 3, std::slice::from_raw_parts(o, 9));
        let r = lift_pointwise(&m)?;
        let out = std::slice::from_raw_parts_mut(out, 4);
        for (k, slot) in out.iter_mut().enumerate() {
            let z = r.0[k / 2][k % 2];
            *slot = GfComplex { re: z.re, im: z.im };
        }
        Ok(())
    })
}
