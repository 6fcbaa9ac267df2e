//! C ABI over the coupled-channel PT-symmetric square well solver.
//!
//! Conventions:
//!
//! - opaque handles (`PtwellParams`, `PtwellSpectrum`) own Rust data and
//!   must be released with their matching `*_free` function;
//! - every fallible call returns a [`PtwellStatus`] and writes results
//!   through out-pointers, which are left untouched on failure;
//! - all functions are thread-safe; handles are immutable after creation.
//!
//! The matching header is `include/ptwell.h`, maintained by hand against
//! this surface and checked by the `header_matches_exports` test.

use ptwell::model::{CouplingParams, SpinSector};
use ptwell::secular::{
    find_critical_z, solve_level_at, solve_spectrum, SolverError, SpectrumResult,
};
use ptwell::states::quasi_parity;
use std::ffi::{c_char, c_double, c_int, c_uint};

/// Status codes shared with the C header.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtwellStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    RootNotFound = 3,
    NoMerge = 4,
    InvalidArgument = 5,
    AccidentalNode = 6,
}

impl From<&SolverError> for PtwellStatus {
    fn from(err: &SolverError) -> Self {
        match err {
            SolverError::RootNotFound { .. } => PtwellStatus::RootNotFound,
            SolverError::NoMerge(_, _) => PtwellStatus::NoMerge,
            _ => PtwellStatus::InvalidArgument,
        }
    }
}

/// Opaque coupling-parameter handle.
pub struct PtwellParams {
    inner: CouplingParams,
}

/// Opaque solved-spectrum handle.
pub struct PtwellSpectrum {
    inner: SpectrumResult,
}

/// One solved level, C layout.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PtwellLevel {
    pub n: c_uint,
    /// Spin sector, +1 or -1.
    pub sigma: c_int,
    pub s: c_double,
    pub t: c_double,
    pub energy: c_double,
    /// Root offset Q_n.
    pub q: c_double,
    /// Quasi-parity sign, +1 or -1; 0 when the overlap vanishes
    /// accidentally and no sign exists.
    pub quasi_parity: c_int,
}

/// A detected level coalescence, C layout.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PtwellMergeEvent {
    pub n_lower: c_uint,
    pub n_upper: c_uint,
    /// |Z_eff| at coalescence.
    pub z_critical: c_double,
    /// External Z at which the pair merges: z_critical - sqrt(xy).
    pub critical_z: c_double,
    /// Common root value at coalescence.
    pub s_merge: c_double,
}

fn sector_from_int(sigma: c_int) -> Option<SpinSector> {
    match sigma {
        1 => Some(SpinSector::Plus),
        -1 => Some(SpinSector::Minus),
        _ => None,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ptwell_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static message for a status code.
#[no_mangle]
pub extern "C" fn ptwell_status_message(status: PtwellStatus) -> *const c_char {
    let msg: &'static str = match status {
        PtwellStatus::Ok => "ok\0",
        PtwellStatus::NullPointer => "null pointer argument\0",
        PtwellStatus::InvalidParams => "invalid coupling parameters (X and Y must be positive)\0",
        PtwellStatus::RootNotFound => "no real root: level pair complexified or out of domain\0",
        PtwellStatus::NoMerge => "pair does not merge within the search bound\0",
        PtwellStatus::InvalidArgument => "invalid argument\0",
        PtwellStatus::AccidentalNode => "accidental node: quasi-parity sign undefined\0",
    };
    msg.as_ptr() as *const c_char
}

/// The conventional two-decimal critical strength of the single-channel
/// well; `ptwell_find_critical_z` recomputes it to solver precision.
#[no_mangle]
pub extern "C" fn ptwell_z_crit_default() -> c_double {
    ptwell::Z_CRIT_DEFAULT
}

/// Create a parameter handle. X > 0, Y > 0; Z any real.
///
/// # Safety
/// `out` must be a valid pointer to a `*mut PtwellParams` slot.
#[no_mangle]
pub unsafe extern "C" fn ptwell_params_new(
    x: c_double,
    y: c_double,
    z: c_double,
    out: *mut *mut PtwellParams,
) -> PtwellStatus {
    if out.is_null() {
        return PtwellStatus::NullPointer;
    }
    match CouplingParams::new(x, y, z) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(PtwellParams { inner })) };
            PtwellStatus::Ok
        }
        Err(_) => PtwellStatus::InvalidParams,
    }
}

/// Release a parameter handle. Null is a no-op.
///
/// # Safety
/// `params` must be null or a pointer previously returned by
/// [`ptwell_params_new`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ptwell_params_free(params: *mut PtwellParams) {
    if !params.is_null() {
        drop(unsafe { Box::from_raw(params) });
    }
}

/// Effective sector strength Z_eff(sigma) = Z + sigma sqrt(XY).
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ptwell_z_eff(
    params: *const PtwellParams,
    sigma: c_int,
    out: *mut c_double,
) -> PtwellStatus {
    if params.is_null() || out.is_null() {
        return PtwellStatus::NullPointer;
    }
    let Some(sector) = sector_from_int(sigma) else {
        return PtwellStatus::InvalidArgument;
    };
    unsafe { *out = (*params).inner.z_eff(sector) };
    PtwellStatus::Ok
}

/// Whether sqrt(XY) + |Z| < z_crit.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ptwell_is_physical(
    params: *const PtwellParams,
    z_crit: c_double,
    out: *mut c_int,
) -> PtwellStatus {
    if params.is_null() || out.is_null() {
        return PtwellStatus::NullPointer;
    }
    if !(z_crit > 0.0) {
        return PtwellStatus::InvalidArgument;
    }
    unsafe { *out = (*params).inner.is_physical(z_crit) as c_int };
    PtwellStatus::Ok
}

fn level_record(root: &ptwell::LevelRoot) -> PtwellLevel {
    PtwellLevel {
        n: root.n() as c_uint,
        sigma: root.sigma().as_i32(),
        s: root.s(),
        t: root.t(),
        energy: root.energy(),
        q: root.q_correction(),
        quasi_parity: quasi_parity(root).map(|r| r.as_i32()).unwrap_or(0),
    }
}

/// Solve one level of one sector.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ptwell_solve_level(
    params: *const PtwellParams,
    n: c_uint,
    sigma: c_int,
    tol: c_double,
    out: *mut PtwellLevel,
) -> PtwellStatus {
    if params.is_null() || out.is_null() {
        return PtwellStatus::NullPointer;
    }
    let Some(sector) = sector_from_int(sigma) else {
        return PtwellStatus::InvalidArgument;
    };
    let z_eff = unsafe { (*params).inner.z_eff(sector) };
    match solve_level_at(n as usize, sector, z_eff, tol) {
        Ok(root) => {
            unsafe { *out = level_record(&root) };
            PtwellStatus::Ok
        }
        Err(e) => PtwellStatus::from(&e),
    }
}

/// Solve all levels 0..=n_max of both sectors into a spectrum handle.
/// Succeeds even when the spectrum is non-physical; inspect
/// [`ptwell_spectrum_is_physical`].
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ptwell_solve_spectrum(
    params: *const PtwellParams,
    n_max: c_uint,
    tol: c_double,
    out: *mut *mut PtwellSpectrum,
) -> PtwellStatus {
    if params.is_null() || out.is_null() {
        return PtwellStatus::NullPointer;
    }
    if !(tol > 0.0) {
        return PtwellStatus::InvalidArgument;
    }
    let inner = solve_spectrum(unsafe { &(*params).inner }, n_max as usize, tol);
    unsafe { *out = Box::into_raw(Box::new(PtwellSpectrum { inner })) };
    PtwellStatus::Ok
}

/// Release a spectrum handle. Null is a no-op.
///
/// # Safety
/// `spectrum` must be null or a pointer previously returned by
/// [`ptwell_solve_spectrum`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ptwell_spectrum_free(spectrum: *mut PtwellSpectrum) {
    if !spectrum.is_null() {
        drop(unsafe { Box::from_raw(spectrum) });
    }
}

/// Number of solved levels (levels lost to complexification are absent).
///
/// # Safety
/// `spectrum` must be a valid spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn ptwell_spectrum_len(spectrum: *const PtwellSpectrum) -> c_uint {
    if spectrum.is_null() {
        return 0;
    }
    unsafe { (*spectrum).inner.levels.len() as c_uint }
}

/// 1 when every requested level is real, else 0.
///
/// # Safety
/// `spectrum` must be a valid spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn ptwell_spectrum_is_physical(spectrum: *const PtwellSpectrum) -> c_int {
    if spectrum.is_null() {
        return 0;
    }
    unsafe { (*spectrum).inner.physical as c_int }
}

/// Copy out level `index` (energy-ascending order).
///
/// # Safety
/// `spectrum` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ptwell_spectrum_level(
    spectrum: *const PtwellSpectrum,
    index: c_uint,
    out: *mut PtwellLevel,
) -> PtwellStatus {
    if spectrum.is_null() || out.is_null() {
        return PtwellStatus::NullPointer;
    }
    let levels = unsafe { &(*spectrum).inner.levels };
    let Some(root) = levels.get(index as usize) else {
        return PtwellStatus::InvalidArgument;
    };
    unsafe { *out = level_record(root) };
    PtwellStatus::Ok
}

/// Locate the coalescence of the adjacent pair (n_lower, n_lower + 1) as
/// |Z_eff| grows, for a given coupling product xy >= 0.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ptwell_find_critical_z(
    xy_product: c_double,
    n_lower: c_uint,
    tol: c_double,
    out: *mut PtwellMergeEvent,
) -> PtwellStatus {
    if out.is_null() {
        return PtwellStatus::NullPointer;
    }
    let pair = (n_lower as usize, n_lower as usize + 1);
    match find_critical_z(xy_product, pair, tol) {
        Ok(event) => {
            unsafe {
                *out = PtwellMergeEvent {
                    n_lower: event.pair.0 as c_uint,
                    n_upper: event.pair.1 as c_uint,
                    z_critical: event.z_critical,
                    critical_z: event.critical_z,
                    s_merge: event.s_merge,
                }
            };
            PtwellStatus::Ok
        }
        Err(e) => PtwellStatus::from(&e),
    }
}

/// Perturbation-series offset at the given order (1 or 2).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ptwell_q_series(
    n: c_uint,
    z_eff: c_double,
    order: c_uint,
    out: *mut c_double,
) -> PtwellStatus {
    if out.is_null() {
        return PtwellStatus::NullPointer;
    }
    if order != 1 && order != 2 {
        return PtwellStatus::InvalidArgument;
    }
    unsafe { *out = ptwell::perturbation::q_series(n as usize, z_eff, order as u8) };
    PtwellStatus::Ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn rejects_null_and_bad_arguments() {
        unsafe {
            assert_eq!(ptwell_params_new(1.0, 1.0, 0.0, ptr::null_mut()), PtwellStatus::NullPointer);
            let mut params: *mut PtwellParams = ptr::null_mut();
            assert_eq!(ptwell_params_new(0.0, 1.0, 0.0, &mut params), PtwellStatus::InvalidParams);
            assert!(params.is_null());
            ptwell_params_free(ptr::null_mut());
            ptwell_spectrum_free(ptr::null_mut());
        }
    }

    #[test]
    fn version_and_messages_are_nul_terminated_static() {
        unsafe {
            let v = std::ffi::CStr::from_ptr(ptwell_version());
            assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
            let m = std::ffi::CStr::from_ptr(ptwell_status_message(PtwellStatus::NoMerge));
            assert!(m.to_str().unwrap().contains("merge"));
        }
    }
}
