//! Root solver for the real secular equation `s sin 2s + t sinh 2t = 0`.
//!
//! On each spin sector the branch constraint `t = Z_eff / (2s)` turns the
//! quantization condition into a one-dimensional root problem in `s`. The
//! n-th root sits near `(n+1) pi/2`; writing `s = ((n+1) pi + tau q) / 2`
//! with `tau = (-1)^n` and using `sin 2s = -sin q` exactly, the equation
//! becomes
//!
//! ```text
//! g(q) = s(q) sin q - t(q) sinh 2t(q) = 0,
//! ```
//!
//! which is solved for the offset `q` directly. Brackets are located by a
//! 64-point scan of the residual over the window `(n+1) pi/2 +- pi/4`,
//! bisected, and polished with a secant pass; solving in `q` keeps the
//! offset at full relative precision even when it is ~1e-6 (high levels),
//! where `s`-space arithmetic would lose it to cancellation.
//!
//! Adjacent level pairs (2k, 2k+1) share the interval where `sin 2s < 0`;
//! as |Z_eff| grows their roots approach, coalesce and leave the real axis.
//! The coalescence is a tangency of the residual, located by bisecting on
//! |Z_eff| the sign of the residual minimum over the shared dip (the
//! minimum is strictly increasing in |Z_eff|).

use crate::model::{CouplingParams, LevelRoot, SpinSector};
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

/// Default tolerance on the root offset.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default upper bound on |Z_eff| when hunting for a level coalescence.
pub const DEFAULT_MERGE_SEARCH_BOUND: f64 = 64.0;

/// Number of scan points across one localization window.
const WINDOW_SCAN_POINTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    /// No sign change in the localization window and the shared dip has no
    /// negative excursion: the level pair has complexified (or the
    /// parameters are outside the physical domain).
    #[error("no real root for level n = {n} at Z_eff = {z_eff}: the level pair has merged and left the real axis, or the parameters are outside the physical domain")]
    RootNotFound { n: usize, z_eff: f64 },

    /// The requested pair cannot coalesce within the search bound.
    #[error("levels ({0}, {1}) do not merge within the search bound: adjacent pairs coalesce only when the lower index is even")]
    NoMerge(usize, usize),

    #[error("pair ({0}, {1}) is not adjacent")]
    NotAdjacent(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Residual of the secular equation, `f(s) = s sin 2s + t sinh 2t` with
/// `t = z_eff / (2s)`. Even in `z_eff`. Panics for s <= 0.
pub fn secular_residual(s: f64, z_eff: f64) -> f64 {
    assert!(s > 0.0, "secular_residual requires s > 0, got {s}");
    let t = z_eff / (2.0 * s);
    s * (2.0 * s).sin() + t * (2.0 * t).sinh()
}

/// Offset-space residual `g(q) = s sin q - t sinh 2t`, where
/// `s = ((n+1) pi + tau q)/2`, `tau = (-1)^n`. Identical root set to
/// [`secular_residual`] on the window (sin 2s = -sin q exactly), but `q`
/// carries the full relative precision of the offset.
fn offset_residual(n: usize, q: f64, z_eff: f64) -> f64 {
    let l = (n as f64 + 1.0) * PI;
    let tau = if n % 2 == 0 { 1.0 } else { -1.0 };
    let s = 0.5 * (l + tau * q);
    let t = z_eff / (2.0 * s);
    s * q.sin() - t * (2.0 * t).sinh()
}

/// Bisect `offset_residual` on a bracket [q_lo, q_hi] with g(q_lo) < 0 <
/// g(q_hi) expected, then polish with a secant pass. `tol` is the absolute
/// bracket tolerance; bisection continues past it down to the relative
/// floor so high levels keep full offset precision.
fn refine_offset(n: usize, z_eff: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = offset_residual(n, lo, z_eff);
    let fhi = offset_residual(n, hi, z_eff);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(flo * fhi < 0.0, "refine_offset needs a sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = offset_residual(n, mid, z_eff);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) != (flo > 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        let width = hi - lo;
        if width < tol && width < 1e-15 * lo.abs().max(hi.abs()).max(1e-30) {
            break;
        }
    }
    // One guarded secant pass across the final bracket.
    let (fl, fh) = (offset_residual(n, lo, z_eff), offset_residual(n, hi, z_eff));
    let mut best = 0.5 * (lo + hi);
    if fl != fh {
        let sec = lo - fl * (hi - lo) / (fh - fl);
        if sec > lo && sec < hi {
            best = sec;
        }
    }
    best
}

/// Scan the localization window of level `n` for sign-change brackets of
/// the secular residual. Returns brackets in ascending order, in offset
/// coordinates (q_lo < q_hi with g(q_lo) * g(q_hi) < 0).
fn window_brackets(n: usize, z_eff: f64) -> Vec<(f64, f64)> {
    let tau = if n % 2 == 0 { 1.0 } else { -1.0 };
    // s-window center +- pi/4 maps to q in (-pi/2, pi/2); scan in q but
    // order brackets by s so parity-based selection reads naturally.
    let q_of_i = |i: usize| -> f64 {
        let frac = i as f64 / (WINDOW_SCAN_POINTS - 1) as f64;
        // s ascending from center - pi/4 to center + pi/4
        let s_off = -PI / 4.0 + frac * (PI / 2.0);
        tau * 2.0 * s_off
    };
    let mut brackets = Vec::new();
    let mut prev_q = q_of_i(0);
    let mut prev_g = offset_residual(n, prev_q, z_eff);
    for i in 1..WINDOW_SCAN_POINTS {
        let q = q_of_i(i);
        let g = offset_residual(n, q, z_eff);
        if prev_g == 0.0 {
            brackets.push((prev_q, prev_q));
        } else if g != 0.0 && (prev_g > 0.0) != (g > 0.0) {
            let (a, b) = if prev_q < q { (prev_q, q) } else { (q, prev_q) };
            brackets.push((a, b));
        }
        prev_q = q;
        prev_g = g;
    }
    brackets
}

/// Successive parabolic refinement of the residual minimum over the shared
/// dip of an even/odd level pair, seeded with the best point of a coarse
/// scan; falls back to golden-section steps whenever the parabola stalls.
/// Returns (s_min, f_min).
fn dip_minimum(pair_base: usize, z_eff: f64) -> (f64, f64) {
    debug_assert!(pair_base % 2 == 0);
    let lo = (pair_base as f64 + 1.0) * PI / 2.0;
    let hi = (pair_base as f64 + 2.0) * PI / 2.0;
    let f = |s: f64| secular_residual(s, z_eff);

    let m = 128;
    let mut best_i = 0;
    let mut best_f = f64::INFINITY;
    for i in 0..=m {
        let s = lo + (hi - lo) * i as f64 / m as f64;
        let v = f(s);
        if v < best_f {
            best_f = v;
            best_i = i;
        }
    }
    let step = (hi - lo) / m as f64;
    let mut a = (lo + step * (best_i.max(1) - 1) as f64).max(lo);
    let mut b = (lo + step * (best_i + 1).min(m) as f64).min(hi);

    // Parabolic interpolation on (a, mid, b) with golden fallback.
    let inv_phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    let mut x1 = a + inv_phi * (b - a);
    let mut x2 = b - inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..120 {
        if b - a < 1e-13 {
            break;
        }
        // Try the parabola through (a, x1|x2, b) endpoints' best triple.
        let (xm, fm) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
        let (fa, fb) = (f(a), f(b));
        let denom = (xm - a) * (fm - fb) - (xm - b) * (fm - fa);
        let mut used_parabola = false;
        if denom.abs() > 0.0 {
            let vertex = xm
                - 0.5 * ((xm - a).powi(2) * (fm - fb) - (xm - b).powi(2) * (fm - fa)) / denom;
            if vertex > a && vertex < b && f(vertex) <= fm {
                // Shrink around the vertex.
                let w = 0.25 * (b - a);
                a = (vertex - w).max(a);
                b = (vertex + w).min(b);
                used_parabola = true;
            }
        }
        if !used_parabola {
            if f1 < f2 {
                b = x2;
            } else {
                a = x1;
            }
        }
        x1 = a + inv_phi * (b - a);
        x2 = b - inv_phi * (b - a);
        f1 = f(x1);
        f2 = f(x2);
    }
    let s_min = 0.5 * (a + b);
    (s_min, f(s_min))
}

/// Solve level `n` at an explicit effective strength. The spin label is
/// recorded on the returned root but plays no role in the equation; this is
/// the entry point for the single-channel (XY -> 0) limit.
pub fn solve_level_at(
    n: usize,
    sigma: SpinSector,
    z_eff: f64,
    tol: f64,
) -> Result<LevelRoot, SolverError> {
    if !(tol > 0.0) {
        return Err(SolverError::InvalidArgument(format!("tol must be > 0, got {tol}")));
    }
    let brackets = window_brackets(n, z_eff);
    let bracket = match brackets.len() {
        0 => {
            // Near a coalescence the lower root can leave its window into
            // the partner's; recover both roots from the shared dip.
            let base = n - (n % 2);
            let (s_min, f_min) = dip_minimum(base, z_eff);
            if f_min >= 0.0 {
                return Err(SolverError::RootNotFound { n, z_eff });
            }
            let tau = if n % 2 == 0 { 1.0 } else { -1.0 };
            let l = (n as f64 + 1.0) * PI;
            let q_of_s = |s: f64| tau * (2.0 * s - l);
            let (dip_lo, dip_hi) = ((base as f64 + 1.0) * PI / 2.0, (base as f64 + 2.0) * PI / 2.0);
            // Even member takes the lower root, odd member the upper.
            let (qa, qb) = if n % 2 == 0 {
                (q_of_s(dip_lo + 1e-12), q_of_s(s_min))
            } else {
                (q_of_s(s_min), q_of_s(dip_hi - 1e-12))
            };
            let (qa, qb) = if qa < qb { (qa, qb) } else { (qb, qa) };
            Some((qa, qb))
        }
        1 => Some(brackets[0]),
        // Two sign changes in one window happen just below a coalescence,
        // when both roots of the pair sit in the odd member's window.
        _ => {
            if n % 2 == 0 {
                Some(brackets[0])
            } else {
                Some(*brackets.last().unwrap())
            }
        }
    };
    let (qlo, qhi) = bracket.ok_or(SolverError::RootNotFound { n, z_eff })?;
    let q = if qlo == qhi { qlo } else { refine_offset(n, z_eff, qlo, qhi, tol) };
    Ok(LevelRoot::from_offset(n, sigma, q, z_eff))
}

/// Solve level `n` of one spin sector.
pub fn solve_level(
    n: usize,
    sigma: SpinSector,
    params: &CouplingParams,
    tol: f64,
) -> Result<LevelRoot, SolverError> {
    solve_level_at(n, sigma, params.z_eff(sigma), tol)
}

/// The adjacent pair that failed first when a spectrum is not entirely real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPair {
    pub pair: (usize, usize),
    pub sigma: SpinSector,
}

/// All levels 0..=n_max of both spin sectors.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub params: CouplingParams,
    /// Solved levels sorted by energy ascending, sigma = +1 first on ties.
    pub levels: Vec<LevelRoot>,
    pub physical: bool,
    pub n_max: usize,
    pub first_complex_pair: Option<ComplexPair>,
}

/// Solve all levels 0..=n_max for both spin sectors. Missing roots mark the
/// spectrum non-physical and are reported through `first_complex_pair`;
/// the surviving levels are still returned.
pub fn solve_spectrum(params: &CouplingParams, n_max: usize, tol: f64) -> SpectrumResult {
    let jobs: Vec<(usize, SpinSector)> = (0..=n_max)
        .flat_map(|n| SpinSector::ALL.into_iter().map(move |s| (n, s)))
        .collect();
    let solved: Vec<Result<LevelRoot, SolverError>> = jobs
        .par_iter()
        .map(|&(n, sigma)| solve_level(n, sigma, params, tol))
        .collect();

    let mut levels = Vec::with_capacity(solved.len());
    let mut first_complex_pair: Option<ComplexPair> = None;
    for (&(n, sigma), result) in jobs.iter().zip(&solved) {
        match result {
            Ok(root) => levels.push(*root),
            Err(_) => {
                let pair = (n - n % 2, n - n % 2 + 1);
                let candidate = ComplexPair { pair, sigma };
                let better = match first_complex_pair {
                    None => true,
                    Some(prev) => {
                        pair.0 < prev.pair.0
                            || (pair.0 == prev.pair.0 && sigma == SpinSector::Plus)
                    }
                };
                if better {
                    first_complex_pair = Some(candidate);
                }
            }
        }
    }
    levels.sort_by(|a, b| {
        a.energy()
            .partial_cmp(&b.energy())
            .unwrap()
            .then_with(|| a.sigma().cmp(&b.sigma()))
    });
    SpectrumResult {
        params: *params,
        physical: first_complex_pair.is_none(),
        levels,
        n_max,
        first_complex_pair,
    }
}

/// A detected coalescence of an adjacent level pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    pub pair: (usize, usize),
    /// Sector that reaches the critical |Z_eff| first as Z grows from 0.
    pub sigma: SpinSector,
    /// |Z_eff| at coalescence.
    pub z_critical: f64,
    /// External internal strength at which the pair merges for the given
    /// coupling product: `z_critical - sqrt(xy)`.
    pub critical_z: f64,
    /// Common root value at coalescence.
    pub s_merge: f64,
}

/// Locate the |Z_eff| at which the adjacent pair coalesces, by bisection on
/// the sign of the dip minimum of the residual (strictly increasing in
/// |Z_eff|). Only pairs with an even lower index share a dip; other pairs
/// never merge with each other.
pub fn find_critical_z(
    xy_product: f64,
    pair: (usize, usize),
    tol: f64,
) -> Result<MergeEvent, SolverError> {
    find_critical_z_bounded(xy_product, pair, tol, DEFAULT_MERGE_SEARCH_BOUND)
}

/// [`find_critical_z`] with an explicit search bound on |Z_eff|.
pub fn find_critical_z_bounded(
    xy_product: f64,
    pair: (usize, usize),
    tol: f64,
    search_bound: f64,
) -> Result<MergeEvent, SolverError> {
    if pair.1 != pair.0 + 1 {
        return Err(SolverError::NotAdjacent(pair.0, pair.1));
    }
    if !(xy_product >= 0.0) {
        return Err(SolverError::InvalidArgument(format!(
            "xy_product must be >= 0, got {xy_product}"
        )));
    }
    if !(tol > 0.0) || !(search_bound > 0.0) {
        return Err(SolverError::InvalidArgument(
            "tol and search_bound must be > 0".to_string(),
        ));
    }
    if pair.0 % 2 != 0 {
        // The two roots are separated by a half-window where the residual
        // is strictly positive; the lower root merges with its even partner
        // instead. No search can change that.
        return Err(SolverError::NoMerge(pair.0, pair.1));
    }
    let base = pair.0;
    // Expand until the dip minimum turns positive.
    let mut z_lo = 0.0;
    let mut z_hi = 1.0;
    loop {
        let (_, f_min) = dip_minimum(base, z_hi);
        if f_min > 0.0 {
            break;
        }
        z_lo = z_hi;
        z_hi *= 2.0;
        if z_hi > search_bound {
            return Err(SolverError::NoMerge(pair.0, pair.1));
        }
    }
    while z_hi - z_lo > tol {
        let z_mid = 0.5 * (z_lo + z_hi);
        if z_mid <= z_lo || z_mid >= z_hi {
            break;
        }
        let (_, f_min) = dip_minimum(base, z_mid);
        if f_min < 0.0 {
            z_lo = z_mid;
        } else {
            z_hi = z_mid;
        }
    }
    let z_critical = 0.5 * (z_lo + z_hi);
    let (s_merge, _) = dip_minimum(base, z_critical);
    Ok(MergeEvent {
        pair,
        sigma: SpinSector::Plus,
        z_critical,
        critical_z: z_critical - xy_product.sqrt(),
        s_merge,
    })
}

/// One grid point of a phase scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub xy: f64,
    pub z: f64,
    pub physical: bool,
    pub first_complex_pair: Option<ComplexPair>,
}

/// Map the real-spectrum domain over a grid of (XY, Z) values. Each grid
/// point solves levels 0..=n_max in both sectors directly from the
/// effective strengths, so xy = 0 (the single-channel limit) is admitted.
/// Rows come back in grid order regardless of the thread count.
pub fn phase_scan(xy_grid: &[f64], z_grid: &[f64], n_max: usize) -> Vec<PhasePoint> {
    let points: Vec<(f64, f64)> = xy_grid
        .iter()
        .flat_map(|&xy| z_grid.iter().map(move |&z| (xy, z)))
        .collect();
    points
        .par_iter()
        .map(|&(xy, z)| {
            let mut first_complex_pair = None;
            'outer: for n in 0..=n_max {
                for sigma in SpinSector::ALL {
                    let z_eff = z + sigma.sign() * xy.sqrt();
                    if solve_level_at(n, sigma, z_eff, DEFAULT_TOL).is_err() {
                        first_complex_pair = Some(ComplexPair {
                            pair: (n - n % 2, n - n % 2 + 1),
                            sigma,
                        });
                        break 'outer;
                    }
                }
            }
            PhasePoint { xy, z, physical: first_complex_pair.is_none(), first_complex_pair }
        })
        .collect()
}

/// Extract the reality boundary from a scan: for each xy, the midpoint
/// between the largest physical z and the first non-physical z above it.
/// Rows whose z-column never turns non-physical are skipped.
pub fn extract_boundary(points: &[PhasePoint]) -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.xy).collect();
    xs.dedup();
    let mut out = Vec::new();
    for &xy in &xs {
        let mut column: Vec<&PhasePoint> =
            points.iter().filter(|p| p.xy == xy && p.z >= 0.0).collect();
        column.sort_by(|a, b| a.z.partial_cmp(&b.z).unwrap());
        let mut boundary = None;
        for pair in column.windows(2) {
            if pair[0].physical && !pair[1].physical {
                boundary = Some(0.5 * (pair[0].z + pair[1].z));
                break;
            }
        }
        if let Some(b) = boundary {
            out.push((xy, b));
        }
    }
    out
}
