//! C ABI for the normal-mode library.
//!
//! Conventions:
//! - Handles (`SnmSpec`, `SnmSolution`) are opaque; create them through the
//!   constructor functions and release them with the matching `_free`.
//! - Every fallible call returns an [`SnmStatus`]; outputs arrive through
//!   pointer arguments that are written only on `SNM_STATUS_OK`.
//! - On failure, [`snm_last_error_message`] returns a thread-local,
//!   NUL-terminated description valid until the next failing call on the
//!   same thread.
//! - Strings returned through `char**` are owned by the caller and must be
//!   released with [`snm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use nalgebra::DVector;

use snmodes::error::Error;
use snmodes::output::modes_json;
use snmodes::spectral::{Branch, SpectralSolution};
use snmodes::system::{Species, SystemSpec};
use snmodes::verify::verify_report;
use snmodes::wavefunction::{energy_first_order, phi0, Occupancy};

/// Call outcome. Zero is success; anything else leaves outputs untouched.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// JSON could not be parsed.
    ParseError = 3,
    /// The record violated a field constraint.
    InvalidSpec = 4,
    /// An index or dimension was out of range.
    OutOfRange = 5,
    /// The configuration has no stable harmonic expansion here.
    Unstable = 6,
    /// Any other runtime failure; see `snm_last_error_message`.
    Runtime = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let sanitized = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained NUL").expect("static"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn status_for(err: &Error) -> SnmStatus {
    match err {
        Error::Validation { .. } => SnmStatus::InvalidSpec,
        Error::PairIndexDomain { .. }
        | Error::IndexDomain { .. }
        | Error::DimensionMismatch { .. }
        | Error::SpeciesAbsent { .. }
        | Error::Occupancy { .. } => SnmStatus::OutOfRange,
        Error::UnstableStructure { .. }
        | Error::UnstableMode { .. }
        | Error::DegenerateBasis { .. } => SnmStatus::Unstable,
        Error::SpdViolation { .. } | Error::NotSymmetric { .. } => SnmStatus::InvalidSpec,
    }
}

fn fail(err: &Error) -> SnmStatus {
    let status = status_for(err);
    set_error(err.to_string());
    status
}

/// Opaque validated system record.
pub struct SnmSpec {
    spec: SystemSpec,
}

/// Opaque reduced solution, retaining the record it came from.
pub struct SnmSolution {
    spec: SystemSpec,
    solution: SpectralSolution,
}

/// One distinct root of the reduced problem.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SnmRoot {
    /// Species digit: 0, 1, or 2.
    pub species: i32,
    /// Branch sign: +1, -1, or 0 for an untagged (scalar) root.
    pub branch: i32,
    /// Squared frequency.
    pub lambda: f64,
    /// Frequency; NaN when `lambda < 0`.
    pub omega: f64,
    /// Radial-angular mixing angle; NaN for scalar roots.
    pub theta: f64,
    /// Normalization constant of the reduced coefficient vector.
    pub normalization: f64,
    /// Number of modes sharing this root.
    pub multiplicity: u64,
}

unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, SnmStatus> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return Err(SnmStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| {
        set_error(format!("invalid UTF-8 argument: {e}"));
        SnmStatus::InvalidUtf8
    })
}

unsafe fn occupancy_arg(json: *const c_char) -> Result<Occupancy, SnmStatus> {
    if json.is_null() {
        return Ok(Occupancy::ground());
    }
    let text = utf8_arg(json)?;
    serde_json::from_str(text).map_err(|e| {
        set_error(format!("occupancy JSON: {e}"));
        SnmStatus::ParseError
    })
}

/// Parses and validates a system record from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn snm_spec_parse(
    json: *const c_char,
    out: *mut *mut SnmSpec,
) -> SnmStatus {
    if out.is_null() {
        set_error("null output pointer".into());
        return SnmStatus::NullPointer;
    }
    let text = match utf8_arg(json) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let raw: SystemSpec = match serde_json::from_str(text) {
        Ok(raw) => raw,
        Err(e) => {
            set_error(format!("system JSON: {e}"));
            return SnmStatus::ParseError;
        }
    };
    match raw.validated() {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(SnmSpec { spec }));
            SnmStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Releases a record handle. Null is ignored.
///
/// # Safety
/// `spec` must come from [`snm_spec_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn snm_spec_free(spec: *mut SnmSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Reads the coordinate counts `N`, `P = N(N+1)/2`, `M = N(N-1)/2`.
///
/// # Safety
/// All pointers must be valid; `spec` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn snm_spec_counts(
    spec: *const SnmSpec,
    n: *mut u64,
    p: *mut u64,
    m: *mut u64,
) -> SnmStatus {
    if spec.is_null() || n.is_null() || p.is_null() || m.is_null() {
        set_error("null argument".into());
        return SnmStatus::NullPointer;
    }
    let handle = &*spec;
    *n = handle.spec.n as u64;
    *p = handle.spec.p() as u64;
    *m = handle.spec.m() as u64;
    SnmStatus::Ok
}

/// Solves the reduced eigenproblems in closed form.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn snm_solve(
    spec: *const SnmSpec,
    out: *mut *mut SnmSolution,
) -> SnmStatus {
    if spec.is_null() || out.is_null() {
        set_error("null argument".into());
        return SnmStatus::NullPointer;
    }
    let handle = &*spec;
    match SpectralSolution::solve(&handle.spec) {
        Ok(solution) => {
            *out = Box::into_raw(Box::new(SnmSolution {
                spec: handle.spec.clone(),
                solution,
            }));
            SnmStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Releases a solution handle. Null is ignored.
///
/// # Safety
/// `solution` must come from [`snm_solve`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn snm_solution_free(solution: *mut SnmSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of distinct roots (5 for N >= 4, fewer for tiny systems).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn snm_solution_root_count(
    solution: *const SnmSolution,
    out: *mut u64,
) -> SnmStatus {
    if solution.is_null() || out.is_null() {
        set_error("null argument".into());
        return SnmStatus::NullPointer;
    }
    *out = (*solution).solution.roots().len() as u64;
    SnmStatus::Ok
}

/// Reads root `index` (0-based, ordered 0+, 0-, 1+, 1-, 2).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn snm_solution_root(
    solution: *const SnmSolution,
    index: u64,
    out: *mut SnmRoot,
) -> SnmStatus {
    if solution.is_null() || out.is_null() {
        set_error("null argument".into());
        return SnmStatus::NullPointer;
    }
    let handle = &*solution;
    let roots = handle.solution.roots();
    let Some((mu, lambda, multiplicity)) = roots.get(index as usize).copied() else {
        set_error(format!(
            "root index {index} out of range ({} roots)",
            roots.len()
        ));
        return SnmStatus::OutOfRange;
    };
    let species_sol = handle
        .solution
        .species(mu.species)
        .expect("listed root species present");
    let (theta, normalization) = match (&species_sol.eigen, mu.branch) {
        (snmodes::spectral::SpeciesEigen::Coupled(pair), Some(branch)) => {
            (pair.theta(branch), pair.c(branch))
        }
        (snmodes::spectral::SpeciesEigen::Scalar { c, .. }, None) => (f64::NAN, *c),
        _ => unreachable!("branch tags match the eigen shape"),
    };
    *out = SnmRoot {
        species: match mu.species {
            Species::Trivial => 0,
            Species::Standard => 1,
            Species::TwoRow => 2,
        },
        branch: match mu.branch {
            Some(Branch::Plus) => 1,
            Some(Branch::Minus) => -1,
            None => 0,
        },
        lambda,
        omega: if lambda >= 0.0 { lambda.sqrt() } else { f64::NAN },
        theta,
        normalization,
        multiplicity: multiplicity as u64,
    };
    SnmStatus::Ok
}

/// Serializes the full mode report (same document as the CLI `modes`).
///
/// # Safety
/// Pointers must be valid; release the string with [`snm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn snm_solution_to_json(
    solution: *const SnmSolution,
    out: *mut *mut c_char,
) -> SnmStatus {
    if solution.is_null() || out.is_null() {
        set_error("null argument".into());
        return SnmStatus::NullPointer;
    }
    let handle = &*solution;
    let doc = modes_json(&handle.spec, &handle.solution);
    let text = serde_json::to_string(&doc).expect("document serializes");
    let c = CString::new(text).expect("JSON contains no NUL");
    *out = c.into_raw();
    SnmStatus::Ok
}

/// Energy through first order for an occupancy JSON array
/// (`[{"mu":"1+","n":1,"count":2}, ...]`; null means the ground state).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn snm_energy(
    solution: *const SnmSolution,
    occupancy_json: *const c_char,
    out: *mut f64,
) -> SnmStatus {
    if solution.is_null() || out.is_null() {
        set_error("null argument".into());
        return SnmStatus::NullPointer;
    }
    let handle = &*solution;
    let occupancy = match occupancy_arg(occupancy_json) {
        Ok(o) => o,
        Err(status) => return status,
    };
    match energy_first_order(&handle.spec, &handle.solution, &occupancy) {
        Ok(e) => {
            *out = e;
            SnmStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Zeroth-order wave-function value at `q` (length `len`, which must be
/// `P`). Null `q` evaluates at the origin.
///
/// # Safety
/// `q` must point to `len` readable doubles when non-null.
#[no_mangle]
pub unsafe extern "C" fn snm_phi0(
    solution: *const SnmSolution,
    q: *const f64,
    len: u64,
    occupancy_json: *const c_char,
    out: *mut f64,
) -> SnmStatus {
    if solution.is_null() || out.is_null() {
        set_error("null argument".into());
        return SnmStatus::NullPointer;
    }
    let handle = &*solution;
    let p = handle.spec.p();
    let vector = if q.is_null() {
        DVector::zeros(p)
    } else {
        if len as usize != p {
            set_error(format!("q has {len} entries, expected {p}"));
            return SnmStatus::OutOfRange;
        }
        DVector::from_column_slice(std::slice::from_raw_parts(q, p))
    };
    let occupancy = match occupancy_arg(occupancy_json) {
        Ok(o) => o,
        Err(status) => return status,
    };
    match phi0(&vector, &handle.solution, &occupancy) {
        Ok(value) => {
            *out = value;
            SnmStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Runs the dense verification suite. Writes 1 to `pass` when every check
/// holds. When `report_json` is non-null it receives the full report (free
/// with [`snm_string_free`]).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn snm_verify(
    spec: *const SnmSpec,
    seed: u64,
    pass: *mut i32,
    report_json: *mut *mut c_char,
) -> SnmStatus {
    if spec.is_null() || pass.is_null() {
        set_error("null argument".into());
        return SnmStatus::NullPointer;
    }
    let handle = &*spec;
    match verify_report(&handle.spec, seed) {
        Ok(report) => {
            *pass = i32::from(report.pass);
            if !report_json.is_null() {
                let doc = snmodes::output::verify_json(&handle.spec, &report);
                let text = serde_json::to_string(&doc).expect("report serializes");
                *report_json = CString::new(text).expect("no NUL").into_raw();
            }
            SnmStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must have been returned by this library and not already freed.
#[no_mangle]
pub unsafe extern "C" fn snm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Thread-local description of the most recent failure on this thread.
/// Valid until the next failing call; never null.
#[no_mangle]
pub extern "C" fn snm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn snm_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
