//! Exercises the C ABI end to end through the exported extern "C"
//! functions, exactly as a foreign caller would.

use ptwell_ffi::*;
use std::ptr;

#[test]
fn spectrum_roundtrip_through_handles() {
    unsafe {
        let mut params: *mut PtwellParams = ptr::null_mut();
        assert_eq!(ptwell_params_new(1.0, 1.0, 0.0, &mut params), PtwellStatus::Ok);
        assert!(!params.is_null());

        let mut z_eff = 0.0f64;
        assert_eq!(ptwell_z_eff(params, 1, &mut z_eff), PtwellStatus::Ok);
        assert_eq!(z_eff, 1.0);
        assert_eq!(ptwell_z_eff(params, 3, &mut z_eff), PtwellStatus::InvalidArgument);

        let mut physical = 0i32;
        assert_eq!(
            ptwell_is_physical(params, ptwell_z_crit_default(), &mut physical),
            PtwellStatus::Ok
        );
        assert_eq!(physical, 1);

        let mut spectrum: *mut PtwellSpectrum = ptr::null_mut();
        assert_eq!(ptwell_solve_spectrum(params, 3, 1e-12, &mut spectrum), PtwellStatus::Ok);
        assert_eq!(ptwell_spectrum_is_physical(spectrum), 1);
        assert_eq!(ptwell_spectrum_len(spectrum), 8);

        // Degenerate sigma pairs at Z = 0, energies ascending.
        let mut previous = f64::NEG_INFINITY;
        for index in 0..8 {
            let mut level = PtwellLevel {
                n: 0,
                sigma: 0,
                s: 0.0,
                t: 0.0,
                energy: 0.0,
                q: 0.0,
                quasi_parity: 0,
            };
            assert_eq!(ptwell_spectrum_level(spectrum, index, &mut level), PtwellStatus::Ok);
            assert!(level.energy >= previous);
            assert!(level.quasi_parity == 1 || level.quasi_parity == -1);
            previous = level.energy;
        }
        let mut level = PtwellLevel {
            n: 0,
            sigma: 0,
            s: 0.0,
            t: 0.0,
            energy: 0.0,
            q: 0.0,
            quasi_parity: 0,
        };
        assert_eq!(ptwell_spectrum_level(spectrum, 8, &mut level), PtwellStatus::InvalidArgument);

        ptwell_spectrum_free(spectrum);
        ptwell_params_free(params);
    }
}

#[test]
fn solve_level_and_failure_modes() {
    unsafe {
        let mut params: *mut PtwellParams = ptr::null_mut();
        // Nearly single channel with Z above critical: lowest pair gone.
        assert_eq!(ptwell_params_new(1e-12, 1e-12, 5.0, &mut params), PtwellStatus::Ok);
        let mut level = PtwellLevel {
            n: 0,
            sigma: 0,
            s: 0.0,
            t: 0.0,
            energy: 0.0,
            q: 0.0,
            quasi_parity: 0,
        };
        assert_eq!(
            ptwell_solve_level(params, 0, 1, 1e-12, &mut level),
            PtwellStatus::RootNotFound
        );
        assert_eq!(ptwell_solve_level(params, 2, 1, 1e-12, &mut level), PtwellStatus::Ok);
        assert!(level.energy > 0.0);
        ptwell_params_free(params);
    }
}

#[test]
fn critical_z_and_series() {
    unsafe {
        let mut event = PtwellMergeEvent {
            n_lower: 0,
            n_upper: 0,
            z_critical: 0.0,
            critical_z: 0.0,
            s_merge: 0.0,
        };
        assert_eq!(ptwell_find_critical_z(0.0, 0, 1e-8, &mut event), PtwellStatus::Ok);
        assert!((event.z_critical - ptwell_z_crit_default()).abs() < 0.02);
        assert_eq!(ptwell_find_critical_z(0.0, 1, 1e-8, &mut event), PtwellStatus::NoMerge);

        let mut q = 0.0f64;
        assert_eq!(ptwell_q_series(0, 1.0, 2, &mut q), PtwellStatus::Ok);
        assert!((q - 0.12182767746575048).abs() < 1e-15);
        assert_eq!(ptwell_q_series(0, 1.0, 3, &mut q), PtwellStatus::InvalidArgument);
    }
}

/// Every extern function exported here must be declared in the
/// hand-maintained header, and vice versa.
#[test]
fn header_matches_exports() {
    let header = include_str!("../include/ptwell.h");
    let source = include_str!("../src/lib.rs");
    let exported: Vec<&str> = source
        .lines()
        .filter_map(|line| {
            let line = line.trim();
            line.strip_prefix("pub unsafe extern \"C\" fn ")
                .or_else(|| line.strip_prefix("pub extern \"C\" fn "))
                .and_then(|rest| rest.split('(').next())
        })
        .collect();
    assert!(!exported.is_empty());
    for name in &exported {
        assert!(header.contains(name), "header is missing {name}");
    }
    for declared in header.lines().filter_map(|l| {
        let l = l.trim();
        if l.starts_with("PtwellStatus ptwell_")
            || l.starts_with("void ptwell_")
            || l.starts_with("double ptwell_")
            || l.starts_with("int ptwell_")
            || l.starts_with("unsigned int ptwell_")
            || l.starts_with("const char *ptwell_")
        {
            l.split("ptwell_").nth(1).and_then(|r| r.split('(').next()).map(|r| format!("ptwell_{r}"))
        } else {
            None
        }
    }) {
        assert!(
            exported.iter().any(|e| **e == declared),
            "header declares {declared} which is not exported"
        );
    }
}
