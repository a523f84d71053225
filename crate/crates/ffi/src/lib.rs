//! C ABI for packinglab.
//!
//! Every fallible function returns a [`PlStatus`]; on failure a message is
//! available from [`pl_last_error`] on the same thread. Objects are opaque
//! handles released with their `_free` function. Strings returned through
//! `char **` out-parameters are owned by the caller and released with
//! [`pl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use packinglab::arithmetic::{vinberg_test, VinbergVerdict};
use packinglab::coxeter::{gram_from_diagram, CoxeterDiagram, GramMatrix};
use packinglab::error::Error;
use packinglab::exactnum::QuadExt;
use packinglab::geometrize::{geometrize, PipelineOptions, TargetSpec};
use packinglab::localglobal::{bends_generators, residue_orbit};
use packinglab::orbit::{certify_integral, generate, OrbitConfig, Packing, WallSystem};
use packinglab::render::{render_svg, Viewport};
use packinglab::structure::enumerate_decompositions;
use serde_json::json;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed text, JSON or diagram input.
    Parse = 3,
    /// Well-formed input violating a mathematical precondition.
    InvalidInput = 4,
    /// Mixed quadratic fields or an unrepresentable value.
    Field = 5,
    Singular = 6,
    NoConvergence = 7,
    /// A search or enumeration limit was exceeded.
    Limit = 8,
    Unsupported = 9,
    OutOfRange = 10,
    Panic = 11,
}

pub struct PlWallSystem(WallSystem);
pub struct PlGram(GramMatrix);
pub struct PlPacking(Packing);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PlStatus {
    match e {
        Error::NumberParse { .. }
        | Error::DiagramParse { .. }
        | Error::BadMultiplicity { .. }
        | Error::DuplicateEdge { .. }
        | Error::Format(_)
        | Error::Io(_) => PlStatus::Parse,
        Error::DiscMismatch { .. } | Error::BadDiscriminant(_) | Error::UnrepresentableAngle { .. } => PlStatus::Field,
        Error::SingularGram | Error::SingularCluster | Error::DivisionByZero => PlStatus::Singular,
        Error::NoConvergence { .. } | Error::GaugeDeficient(_) | Error::NoCandidate { .. } | Error::Ambiguous { .. } => {
            PlStatus::NoConvergence
        }
        Error::FrontierOverflow { .. } | Error::TooManyWalls { .. } => PlStatus::Limit,
        Error::UnsupportedDimension(_) => PlStatus::Unsupported,
        _ => PlStatus::InvalidInput,
    }
}

struct Fail(PlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), format!("{}: {e}", e.kind()))
    }
}

type Res<T> = Result<T, Fail>;

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Res<()>) -> PlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PlStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            PlStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Res<&'a str> {
    if s.is_null() {
        return Err(Fail(PlStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(PlStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Res<&'a T> {
    p.as_ref().ok_or_else(|| Fail(PlStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Res<()> {
    if out.is_null() {
        return Err(Fail(PlStatus::NullPointer, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Res<()> {
    if out.is_null() {
        return Err(Fail(PlStatus::NullPointer, "null output pointer".into()));
    }
    *out = CString::new(s).map_err(|_| Fail(PlStatus::InvalidInput, "string contains nul".into()))?.into_raw();
    Ok(())
}

unsafe fn check_out<T>(out: *mut T) -> Res<()> {
    if out.is_null() {
        Err(Fail(PlStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

/// Message for the most recent failure on this thread; empty after a
/// success. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn pl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn pl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a wall system from its JSON form.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_system_parse(json: *const c_char, out: *mut *mut PlWallSystem) -> PlStatus {
    guard(|| put(out, PlWallSystem(WallSystem::parse(text(json)?)?)))
}

/// # Safety
/// `sys` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pl_system_free(sys: *mut PlWallSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of walls, or 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_system_wall_count(sys: *const PlWallSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.walls().len())
}

/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_system_to_json(sys: *const PlWallSystem, out: *mut *mut c_char) -> PlStatus {
    guard(|| put_string(out, handle(sys)?.0.to_string_pretty()))
}

/// Gram matrix of all walls of a system.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_system_gram(sys: *const PlWallSystem, out: *mut *mut PlGram) -> PlStatus {
    guard(|| put(out, PlGram(handle(sys)?.0.gram()?)))
}

/// Compiles Coxeter diagram text into its Gram matrix.
///
/// # Safety
/// `diagram` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_gram_from_diagram(diagram: *const c_char, out: *mut *mut PlGram) -> PlStatus {
    guard(|| put(out, PlGram(gram_from_diagram(&CoxeterDiagram::parse(text(diagram)?)?)?)))
}

/// Reads `{"format": 1, "gram": [[...]]}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_gram_parse(json: *const c_char, out: *mut *mut PlGram) -> PlStatus {
    guard(|| put(out, PlGram(GramMatrix::parse_json(text(json)?)?)))
}

/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_gram_free(g: *mut PlGram) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_gram_size(g: *const PlGram) -> usize {
    g.as_ref().map_or(0, |g| g.0.size())
}

/// Entry `(i, j)`, 0-based, in the exact text format.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_gram_entry(g: *const PlGram, i: usize, j: usize, out: *mut *mut c_char) -> PlStatus {
    guard(|| {
        let g = &handle(g)?.0;
        if i >= g.size() || j >= g.size() {
            return Err(Fail(PlStatus::OutOfRange, format!("entry ({i}, {j}) outside a {0}x{0} matrix", g.size())));
        }
        put_string(out, g.get(i, j).map_or_else(|| "?".into(), ToString::to_string))
    })
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_gram_to_json(g: *const PlGram, out: *mut *mut c_char) -> PlStatus {
    guard(|| {
        let s = serde_json::to_string(&handle(g)?.0.to_json()).map_err(Error::from)?;
        put_string(out, s)
    })
}

/// Cyclic-product test as JSON: `{"verdict": "NonArithmetic", "cycle":
/// [...], "product": "..."}` with 1-based indices, or `{"verdict":
/// "PassesUpTo", "max_len": L}`.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_vinberg(g: *const PlGram, max_len: usize, out: *mut *mut c_char) -> PlStatus {
    guard(|| {
        let v = match vinberg_test(&handle(g)?.0, max_len)? {
            VinbergVerdict::NonArithmetic { cycle, product } => json!({
                "verdict": "NonArithmetic",
                "cycle": cycle.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "product": product.to_string(),
            }),
            VinbergVerdict::PassesUpTo { max_len } => json!({ "verdict": "PassesUpTo", "max_len": max_len }),
        };
        put_string(out, v.to_string())
    })
}

/// All decompositions as a JSON array of `{"cluster": [...], "cocluster":
/// [...]}` with 1-based indices.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_decompose(g: *const PlGram, out: *mut *mut c_char) -> PlStatus {
    guard(|| {
        let one = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
        let all: Vec<_> = enumerate_decompositions(&handle(g)?.0)?
            .iter()
            .map(|d| json!({ "cluster": one(&d.cluster), "cocluster": one(&d.cocluster) }))
            .collect();
        put_string(out, serde_json::Value::from(all).to_string())
    })
}

/// Enumerates the packing (or superpacking when `superpacking` is nonzero)
/// up to the bend `bound`, given in the exact text format.
///
/// # Safety
/// `sys` must be a live handle, `bound` a nul-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pl_orbit(
    sys: *const PlWallSystem,
    bound: *const c_char,
    max_word: usize,
    superpacking: c_int,
    jobs: usize,
    out: *mut *mut PlPacking,
) -> PlStatus {
    guard(|| {
        let ws = &handle(sys)?.0;
        let bound: QuadExt = text(bound)?.parse()?;
        let cfg = OrbitConfig { jobs: jobs.max(1), ..OrbitConfig::new(bound, max_word) };
        put(out, PlPacking(generate(ws, &cfg, superpacking != 0)?))
    })
}

/// Reads a packing file.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_packing_parse(json: *const c_char, out: *mut *mut PlPacking) -> PlStatus {
    guard(|| {
        let file = serde_json::from_str(text(json)?).map_err(Error::from)?;
        put(out, PlPacking(Packing::from_json(file)?.0))
    })
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_packing_free(p: *mut PlPacking) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_packing_len(p: *const PlPacking) -> usize {
    p.as_ref().map_or(0, |p| p.0.len())
}

/// 1 if the enumeration reached every sphere within the bound, else 0.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_packing_saturated(p: *const PlPacking) -> c_int {
    p.as_ref().map_or(0, |p| c_int::from(p.0.saturated))
}

/// Bend of sphere `i` (0-based) in the exact text format.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_packing_bend(p: *const PlPacking, i: usize, out: *mut *mut c_char) -> PlStatus {
    guard(|| {
        let p = &handle(p)?.0;
        let s = p.spheres.get(i).ok_or_else(|| Fail(PlStatus::OutOfRange, format!("sphere {i} of {}", p.len())))?;
        put_string(out, s.bend().to_string())
    })
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_packing_to_json(p: *const PlPacking, out: *mut *mut c_char) -> PlStatus {
    guard(|| {
        let s = serde_json::to_string(&handle(p)?.0.to_json(None)).map_err(Error::from)?;
        put_string(out, s)
    })
}

/// Writes 1 to `integral` if every bend is a rational integer, else 0.
///
/// # Safety
/// `p` must be a live handle; `integral` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_certify(p: *const PlPacking, integral: *mut c_int) -> PlStatus {
    guard(|| {
        check_out(integral)?;
        *integral = c_int::from(certify_integral(&handle(p)?.0).integral);
        Ok(())
    })
}

/// SVG drawing with a viewport fitted to the packing.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_render_svg(
    p: *const PlPacking,
    size_px: u32,
    min_radius_px: f64,
    labels: c_int,
    out: *mut *mut c_char,
) -> PlStatus {
    guard(|| {
        let p = &handle(p)?.0;
        if size_px == 0 {
            return Err(Fail(PlStatus::InvalidInput, "size must be positive".into()));
        }
        let vp = Viewport { min_radius_px, ..Viewport::fit(p, size_px) };
        put_string(out, render_svg(p, &vp, labels != 0)?)
    })
}

/// Numerical realization followed by exact recovery in `Q(sqrt d)` and
/// exact verification.
///
/// # Safety
/// `target_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_geometrize(
    target_json: *const c_char,
    d: u64,
    denom_bound: u64,
    seed: u64,
    out: *mut *mut PlWallSystem,
) -> PlStatus {
    guard(|| {
        let t = TargetSpec::parse(text(target_json)?)?;
        let opts = PipelineOptions { d, denom_bound, seed, ..PipelineOptions::default() };
        put(out, PlWallSystem(geometrize(&t, &opts)?.system))
    })
}

/// Bend residues mod `modulus` reachable from the cluster bends, as a JSON
/// array.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_residues(sys: *const PlWallSystem, modulus: u64, out: *mut *mut c_char) -> PlStatus {
    guard(|| {
        let ws = &handle(sys)?.0;
        let b: Vec<QuadExt> = ws.cluster_walls().iter().map(|w| w.bend().clone()).collect();
        let ro = residue_orbit(&bends_generators(ws)?, &b, modulus)?;
        put_string(out, json!(ro.residues).to_string())
    })
}

