//! Asymptotic series for the root offsets Q_n and its validation against
//! exact roots.
//!
//! With L = (n+1) pi, rho = 1/L, alpha = 2 Z_eff / L, beta = alpha rho and
//! tau = (-1)^n, the offset admits the series
//!
//! ```text
//! Q = alpha beta Sigma(alpha, beta),
//! Sigma = sum_{k,l} c_kl alpha^{2k} beta^{2l},    c_00 = 1,
//! ```
//!
//! with exact rational coefficients through alpha^4:
//! c_10 = 1/6, c_01 = -3 tau, c_20 = 1/120, c_11 = (1 - 8 tau)/6, c_02 = 15.
//! In the original variables the second-order truncation reads
//!
//! ```text
//! Q_n = 4 Z_eff^2 / L^3  +  (8 Z_eff^4 / (3 L^5)) (1 + 18 (-1)^{n+1} / L^2)
//!       + O(Z_eff^6 / L^7).
//! ```
//!
//! Coefficients are fixed rationals rather than re-derived symbolically;
//! the (n+1)^-7 scaling of the exact-minus-series residual is the
//! regression guard for them.

use crate::model::{CouplingParams, SpinSector};
use crate::secular::{solve_level, SolverError};
use std::f64::consts::PI;

/// Reduced variables of the series at level `n` and strength `z_eff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesParams {
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Sign factor tau = (-1)^n.
    pub tau: f64,
}

impl SeriesParams {
    pub fn new(n: usize, z_eff: f64) -> Self {
        let l = (n as f64 + 1.0) * PI;
        let rho = 1.0 / l;
        let alpha = 2.0 * z_eff / l;
        SeriesParams {
            rho,
            alpha,
            beta: alpha * rho,
            tau: if n % 2 == 0 { 1.0 } else { -1.0 },
        }
    }
}

/// The coefficient table of Sigma through k + l <= 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaCoefficients {
    pub c00: f64,
    pub c10: f64,
    pub c01: f64,
    pub c20: f64,
    pub c11: f64,
    pub c02: f64,
}

impl SigmaCoefficients {
    /// The exact rational table for a given sign factor tau = (-1)^n.
    pub fn for_tau(tau: f64) -> Self {
        SigmaCoefficients {
            c00: 1.0,
            c10: 1.0 / 6.0,
            c01: -3.0 * tau,
            c20: 1.0 / 120.0,
            c11: (1.0 - 8.0 * tau) / 6.0,
            c02: 15.0,
        }
    }

    /// Quartic-in-alpha coefficients zeroed; used to compare the general
    /// parametrization against the explicit two-term formula, which shares
    /// exactly the k + l <= 1 terms.
    pub fn truncated_quadratic(tau: f64) -> Self {
        SigmaCoefficients { c20: 0.0, c11: 0.0, c02: 0.0, ..Self::for_tau(tau) }
    }
}

/// Series offset in the original variables, truncated at `order` in Z_eff^2
/// (order 1: the quadratic term; order 2: plus the quartic term).
///
/// Even in `z_eff`. Panics for orders outside {1, 2}: higher coefficients
/// are not published.
pub fn q_series(n: usize, z_eff: f64, order: u8) -> f64 {
    assert!(order == 1 || order == 2, "series order must be 1 or 2, got {order}");
    let l = (n as f64 + 1.0) * PI;
    let z2 = z_eff * z_eff;
    let leading = 4.0 * z2 / (l * l * l);
    if order == 1 {
        return leading;
    }
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 }; // (-1)^{n+1}
    leading + 8.0 * z2 * z2 / (3.0 * l.powi(5)) * (1.0 + 18.0 * sign / (l * l))
}

/// Series offset in the reduced variables: `alpha beta Sigma(alpha, beta)`
/// with Sigma truncated at the stored coefficient table.
pub fn q_series_general(series: SeriesParams, coeffs: SigmaCoefficients) -> f64 {
    let a2 = series.alpha * series.alpha;
    let b2 = series.beta * series.beta;
    let sigma = coeffs.c00
        + coeffs.c10 * a2
        + coeffs.c01 * b2
        + coeffs.c20 * a2 * a2
        + coeffs.c11 * a2 * b2
        + coeffs.c02 * b2 * b2;
    series.alpha * series.beta * sigma
}

/// One row of a series-versus-exact comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbRow {
    pub n: usize,
    pub sigma: SpinSector,
    pub q_exact: f64,
    pub q_order1: f64,
    pub q_order2: f64,
    pub err1: f64,
    pub err2: f64,
}

/// Solve the exact offsets over `n_range` for both sectors and tabulate
/// them against both series truncations.
pub fn compare_perturbation_exact(
    params: &CouplingParams,
    n_range: std::ops::RangeInclusive<usize>,
    tol: f64,
) -> Result<Vec<PerturbRow>, SolverError> {
    let mut rows = Vec::new();
    for n in n_range {
        for sigma in SpinSector::ALL {
            let root = solve_level(n, sigma, params, tol)?;
            let z_eff = params.z_eff(sigma);
            let q_exact = root.q_correction();
            let q1 = q_series(n, z_eff, 1);
            let q2 = q_series(n, z_eff, 2);
            rows.push(PerturbRow {
                n,
                sigma,
                q_exact,
                q_order1: q1,
                q_order2: q2,
                err1: (q_exact - q1).abs(),
                err2: (q_exact - q2).abs(),
            });
        }
    }
    Ok(rows)
}
