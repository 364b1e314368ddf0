//! C ABI for the modgraph engine.
//!
//! Objects are opaque handles created by `mg_*_new`/`mg_*_build` functions and
//! released with the matching `mg_*_free`. Every fallible call returns an
//! [`MgStatus`]; on failure [`mg_last_error`] describes the cause. Strings
//! returned to the caller are freed with [`mg_string_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use modgraph::coefficients::{com_system, lie_system, Bounds, ComKind, ModularOperadData};
use modgraph::feynman::{build_ft, FeynmanComplex};
use modgraph::fiber_complex::{admissible_edges, homology_profile, verify_retract};
use modgraph::graphs::{families, ModularGraph};
use modgraph::homalg::betti_numbers;
use modgraph::nestings::verify_polytope;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MgStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An argument was rejected (unknown name, unstable type, malformed input).
    InvalidArgument = 3,
    /// The computation failed; see `mg_last_error`.
    ComputationFailed = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// A coefficient system.
pub struct MgCoefficients(ModularOperadData);

/// A Feynman transform complex with lazily computed Betti numbers.
pub struct MgComplex {
    ft: FeynmanComplex,
    betti: OnceLock<BTreeMap<i64, usize>>,
}

/// A modular graph.
pub struct MgGraph(ModularGraph);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn guard(f: impl FnOnce() -> Result<(), (MgStatus, String)>) -> MgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MgStatus::Panic
        }
    }
}

type Fail = (MgStatus, String);

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err((MgStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|e| (MgStatus::InvalidUtf8, e.to_string()))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| (MgStatus::NullPointer, "null output pointer".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| (MgStatus::NullPointer, "null handle".into()))
}

fn invalid(e: impl std::fmt::Display) -> Fail {
    (MgStatus::InvalidArgument, e.to_string())
}

fn failed(e: impl std::fmt::Display) -> Fail {
    (MgStatus::ComputationFailed, e.to_string())
}

fn give<T>(out: &mut *mut T, v: T) {
    *out = Box::into_raw(Box::new(v));
}

/// Message of the last failure on this thread, or null. Free with `mg_string_free`.
#[no_mangle]
pub extern "C" fn mg_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn mg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mg_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}

/// A built-in system (`com-envelope`, `com-extension`, `lie-odd`) covering every
/// vertex of graphs of type `(g, n)`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_coefficients_builtin(name: *const c_char, g: usize, n: usize, out: *mut *mut MgCoefficients) -> MgStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let bounds = Bounds::for_type(g, n);
        let data = match text(name)? {
            "com-envelope" => com_system(ComKind::Envelope, bounds),
            "com-extension" => com_system(ComKind::Extension, bounds),
            "lie-odd" => lie_system(bounds.weight.max(3)).map_err(failed)?.oddify(),
            other => return Err(invalid(format!("unknown coefficient system {other:?}"))),
        };
        give(out, MgCoefficients(data));
        Ok(())
    })
}

/// A system from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_coefficients_from_json(json: *const c_char, out: *mut *mut MgCoefficients) -> MgStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let data = ModularOperadData::from_json(text(json)?).map_err(invalid)?;
        give(out, MgCoefficients(data));
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn mg_coefficients_free(c: *mut MgCoefficients) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Build `FT(coefficients)(g, n)`.
///
/// # Safety
/// `coeff` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_feynman_build(coeff: *const MgCoefficients, g: usize, n: usize, out: *mut *mut MgComplex) -> MgStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let c = handle(coeff)?;
        if n + 2 * g < 3 {
            return Err(invalid(format!("type ({g},{n}) is unstable")));
        }
        let ft = build_ft(&c.0, g, n).map_err(failed)?;
        give(out, MgComplex { ft, betti: OnceLock::new() });
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn mg_complex_free(c: *mut MgComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Lowest and highest degree with a nonzero chain group. Both are 0 for the zero complex.
///
/// # Safety
/// `c` must be a live handle; `lo` and `hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_complex_degree_range(c: *const MgComplex, lo: *mut i64, hi: *mut i64) -> MgStatus {
    guard(|| {
        let c = handle(c)?;
        let (lo, hi) = (out_ptr(lo)?, out_ptr(hi)?);
        let d = c.ft.complex.degrees();
        *lo = d.first().copied().unwrap_or(0);
        *hi = d.last().copied().unwrap_or(0);
        Ok(())
    })
}

/// Dimension of the chain group in `degree`.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_complex_dim(c: *const MgComplex, degree: i64, out: *mut usize) -> MgStatus {
    guard(|| {
        *out_ptr(out)? = handle(c)?.ft.complex.dim(degree);
        Ok(())
    })
}

/// Betti number in `degree`, computed exactly on first use.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_complex_betti(c: *const MgComplex, degree: i64, out: *mut usize) -> MgStatus {
    guard(|| {
        let c = handle(c)?;
        let out = out_ptr(out)?;
        let b = c.betti.get_or_init(|| betti_numbers(&c.ft.complex));
        *out = b.get(&degree).copied().unwrap_or(0);
        Ok(())
    })
}

/// Euler characteristic of the complex.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_complex_euler(c: *const MgComplex, out: *mut i64) -> MgStatus {
    guard(|| {
        *out_ptr(out)? = handle(c)?.ft.complex.euler_characteristic();
        Ok(())
    })
}

/// The basis and exact differential as JSON. Free with `mg_string_free`.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_complex_dump_json(c: *const MgComplex, out: *mut *mut c_char) -> MgStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let s = CString::new(handle(c)?.ft.dump()).map_err(failed)?;
        *out = s.into_raw();
        Ok(())
    })
}

/// A named family member (`path:k`, `cycle:k`, `bouquet:k`, `K4`, `theta`) or graph JSON.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_graph_new(spec: *const c_char, out: *mut *mut MgGraph) -> MgStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let s = text(spec)?;
        let g = if s.trim_start().starts_with('{') { ModularGraph::from_json(s) } else { families::by_name(s) };
        give(out, MgGraph(g.map_err(invalid)?));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn mg_graph_free(g: *mut MgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_graph_num_edges(g: *const MgGraph, out: *mut usize) -> MgStatus {
    guard(|| {
        *out_ptr(out)? = handle(g)?.0.num_edges();
        Ok(())
    })
}

/// Check every retract identity for every admissible edge, and that the fiber
/// complex has homology of rank one in degree `−|E|`.
///
/// # Safety
/// `g` must be a live handle; `all_hold` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_fiber_verify(g: *const MgGraph, all_hold: *mut bool) -> MgStatus {
    guard(|| {
        let g = &handle(g)?.0;
        let out = out_ptr(all_hold)?;
        let mut ok = true;
        for e in admissible_edges(g) {
            ok &= verify_retract(g, e).map_err(failed)?.all_hold();
        }
        let ne = g.num_edges() as i64;
        ok &= homology_profile(g) == BTreeMap::from([(-ne, 1)]);
        *out = ok;
        Ok(())
    })
}

/// Compare the nesting poset with the tubing poset of the line graph.
///
/// # Safety
/// `g` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_polytope_verify(g: *const MgGraph, isomorphic: *mut bool, full_nestings: *mut usize) -> MgStatus {
    guard(|| {
        let g = &handle(g)?.0;
        let (iso, full) = (out_ptr(isomorphic)?, out_ptr(full_nestings)?);
        let r = verify_polytope(g);
        *iso = r.isomorphic && r.nesting_f_vector == r.tubing_f_vector;
        *full = r.full_nestings;
        Ok(())
    })
}
