//! Explicit bound-state wavefunctions: matching amplitudes, parity
//! overlaps, quasi-parities, special normalization and the crossing-point
//! Wronskian.
//!
//! On each spin sector the wavefunction is a two-interval ansatz
//!
//! ```text
//! phi(x) = A sin(kappa (x+1))   on (-1, 0),
//! phi(x) = C sin(kappa* (1-x))  on (0, 1),       kappa = s - i t,
//! ```
//!
//! with continuity fixing `A = C sin(kappa*) / sin(kappa)` and the
//! derivative condition equivalent to the secular equation. The second
//! channel is slaved to the first, `chi = sigma omega phi`.
//!
//! Two distinct parity matrix elements appear, and both have closed forms:
//!
//! - [`parity_overlap`]: `(1/2s) sin2s cosh2t - (1/2t) cos2s sinh2t`, the
//!   trigonometric closed form whose sign defines the quasi-parity and the
//!   special normalization;
//! - [`theta_pairing_overlap`]: `int phi*(x) phi(-x) dx / (A A*)`, the
//!   Hermitian pairing that the swap-parity block operator induces on one
//!   channel; this is the quantity grid contractions of theta actually
//!   converge to.
//!
//! The two agree in sign across the physical domain (which is all the
//! quasi-parity construction needs) but differ in magnitude away from the
//! Hermitian limit.

use crate::model::{CouplingParams, LevelRoot, SpinSector};
use crate::secular::{solve_level, SolverError};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Below this |sin kappa| the continuity condition no longer determines the
/// amplitude ratio.
const DEGENERATE_MATCHING_EPS: f64 = 1e-14;

/// Below this |parity overlap| the quasi-parity sign is undefined.
const ACCIDENTAL_NODE_EPS: f64 = 1e-12;

/// |t| below which the parity overlap switches to the series limit of
/// sinh(2t)/(2t), balancing cancellation against truncation.
const PARITY_SERIES_EPS: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("degenerate matching at level n = {n}: |sin kappa| = {sin_mag:.3e} leaves the amplitude ratio undetermined")]
    DegenerateMatching { n: usize, sin_mag: f64 },

    #[error("accidental node at level n = {n}: |parity overlap| = {overlap:.3e} has no usable sign")]
    AccidentalNode { n: usize, overlap: f64 },

    #[error("the crossing-point Wronskian requires Z = 0, got Z = {0}")]
    NotAtCrossing(f64),

    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Quasi-parity sign of one level, the +/-1 relative-normalization factor
/// that makes the biorthogonal self-overlap positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuasiParity {
    value: i8,
}

impl QuasiParity {
    pub fn plus() -> Self {
        QuasiParity { value: 1 }
    }

    pub fn minus() -> Self {
        QuasiParity { value: -1 }
    }

    pub fn sign(self) -> f64 {
        self.value as f64
    }

    pub fn as_i32(self) -> i32 {
        self.value as i32
    }

    pub fn flipped(self) -> Self {
        QuasiParity { value: -self.value }
    }
}

/// A solved level together with its matched complex amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    root: LevelRoot,
    a: C64,
    c: C64,
}

impl BoundState {
    pub fn root(&self) -> &LevelRoot {
        &self.root
    }

    /// Left-interval amplitude.
    pub fn a(&self) -> C64 {
        self.a
    }

    /// Right-interval amplitude.
    pub fn c(&self) -> C64 {
        self.c
    }

    /// Left-interval wavenumber `kappa = s - i t`; the right interval
    /// carries its conjugate.
    pub fn kappa(&self) -> C64 {
        C64::new(self.root.s(), -self.root.t())
    }

    /// Residual of the continuity condition `A sin kappa - C sin kappa*`.
    pub fn continuity_residual(&self) -> f64 {
        let k = self.kappa();
        (self.a * k.sin() - self.c * k.conj().sin()).norm()
    }

    /// Residual of the derivative condition
    /// `A kappa cos kappa + C kappa* cos kappa*`.
    pub fn derivative_residual(&self) -> f64 {
        let k = self.kappa();
        let ks = k.conj();
        (self.a * k * k.cos() + self.c * ks * ks.cos()).norm()
    }
}

/// Match amplitudes with the fixed phase convention C = 1 (real, positive).
/// No normalization is applied; see [`match_amplitudes`] for the special
/// normalization.
pub fn match_amplitudes_raw(root: &LevelRoot) -> Result<BoundState, StateError> {
    let k = C64::new(root.s(), -root.t());
    let sin_k = k.sin();
    if sin_k.norm() < DEGENERATE_MATCHING_EPS {
        return Err(StateError::DegenerateMatching { n: root.n(), sin_mag: sin_k.norm() });
    }
    let c = C64::new(1.0, 0.0);
    let a = c * k.conj().sin() / sin_k;
    Ok(BoundState { root: *root, a, c })
}

/// Match amplitudes and rescale so the special self-overlap has magnitude
/// one; with the quasi-parity sign it is then exactly +1.
pub fn match_amplitudes(
    root: &LevelRoot,
    params: &CouplingParams,
) -> Result<BoundState, StateError> {
    let state = match_amplitudes_raw(root)?;
    normalize_special(&state, params)
}

/// Rescale amplitudes (C kept real and positive) so that
/// `|self_overlap| = 1`. Idempotent.
pub fn normalize_special(
    state: &BoundState,
    params: &CouplingParams,
) -> Result<BoundState, StateError> {
    let rho = quasi_parity(&state.root)?;
    let overlap = self_overlap(state, params, rho);
    let scale = 1.0 / overlap.abs().sqrt();
    Ok(BoundState { root: state.root, a: state.a * scale, c: state.c * scale })
}

/// Evaluate the two-channel wavefunction at x in [-1, 1]:
/// `(phi, chi = sigma omega phi)`. Exactly zero at both endpoints.
pub fn eval_wavefunction(state: &BoundState, params: &CouplingParams, x: f64) -> (C64, C64) {
    let phi = eval_phi(state, x);
    let chi = state.root.sigma().sign() * params.omega() * phi;
    (phi, chi)
}

/// The first-channel component phi alone.
pub fn eval_phi(state: &BoundState, x: f64) -> C64 {
    debug_assert!((-1.0..=1.0).contains(&x), "x = {x} outside [-1, 1]");
    let k = state.kappa();
    if x <= 0.0 {
        state.a * (k * (x + 1.0)).sin()
    } else {
        state.c * (k.conj() * (1.0 - x)).sin()
    }
}

/// Analytic spatial derivative of phi (piecewise; the left branch value at
/// x = 0).
pub fn eval_phi_derivative(state: &BoundState, x: f64) -> C64 {
    let k = state.kappa();
    if x <= 0.0 {
        state.a * k * (k * (x + 1.0)).cos()
    } else {
        -state.c * k.conj() * (k.conj() * (1.0 - x)).cos()
    }
}

/// Closed-form parity matrix element per unit A A*:
/// `(1/2s) sin 2s cosh 2t - (1/2t) cos 2s sinh 2t`,
/// with the series limit of sinh(2t)/(2t) below |t| = 1e-6.
pub fn parity_overlap(root: &LevelRoot) -> f64 {
    let s2 = 2.0 * root.s();
    let t2 = 2.0 * root.t();
    let first = s2.sin() / s2 * t2.cosh();
    if root.t().abs() < PARITY_SERIES_EPS {
        // sinh(2t)/(2t) = 1 + (2t)^2/6 + (2t)^4/120
        first - s2.cos() * (1.0 + t2 * t2 / 6.0 + t2.powi(4) / 120.0)
    } else {
        first - s2.cos() * t2.sinh() / t2
    }
}

/// Hermitian swap-parity pairing per unit A A*:
/// `int_{-1}^{1} phi*(x) phi(-x) dx / (A A*)
///  = 2 Re[ (sin^2 kappa / |sin kappa|^2) (1/2 - sin 2kappa* / (4 kappa*)) ]`.
/// This is what grid contractions against the swap-parity operator
/// converge to; it shares the sign of [`parity_overlap`] on the physical
/// domain but not the magnitude.
pub fn theta_pairing_overlap(root: &LevelRoot) -> f64 {
    let k = C64::new(root.s(), -root.t());
    let ks = k.conj();
    let sin_k = k.sin();
    let phase = sin_k * sin_k / sin_k.norm_sqr();
    let bracket = C64::new(0.5, 0.0) - (2.0 * ks).sin() / (4.0 * ks);
    2.0 * (phase * bracket).re
}

/// Same pairing for a concrete state, amplitudes included:
/// `2 Re[ A* C (1/2 - sin 2kappa*/(4 kappa*)) ]`.
pub fn theta_pairing_of_state(state: &BoundState) -> f64 {
    let ks = state.kappa().conj();
    let bracket = C64::new(0.5, 0.0) - (2.0 * ks).sin() / (4.0 * ks);
    2.0 * (state.a.conj() * state.c * bracket).re
}

/// Quasi-parity `sigma * sign(parity_overlap)`; fails on an accidental node
/// (vanishing overlap) rather than guessing a sign.
pub fn quasi_parity(root: &LevelRoot) -> Result<QuasiParity, StateError> {
    let overlap = parity_overlap(root);
    if overlap.abs() < ACCIDENTAL_NODE_EPS {
        return Err(StateError::AccidentalNode { n: root.n(), overlap });
    }
    let value = root.sigma().sign() * overlap.signum();
    Ok(if value > 0.0 { QuasiParity::plus() } else { QuasiParity::minus() })
}

/// Special self-overlap `2 sigma rho sqrt(XY) (A A*) parity_overlap`;
/// strictly positive with the quasi-parity sign of [`quasi_parity`].
pub fn self_overlap(state: &BoundState, params: &CouplingParams, rho: QuasiParity) -> f64 {
    let aa = state.a.norm_sqr();
    2.0 * state.root.sigma().sign()
        * rho.sign()
        * params.xy_product().sqrt()
        * aa
        * parity_overlap(&state.root)
}

/// Closed-form Wronskian of the two degenerate sigma = +/-1 states at the
/// level crossing Z = 0, evaluated at the matching point:
/// `W = A_- C_+ kappa* sin(2 kappa*)` with kappa the sigma = +1 wavenumber.
/// Nonzero: the crossing is a true degeneracy, not an exceptional point.
pub fn wronskian_at_crossing(
    params: &CouplingParams,
    n: usize,
    tol: f64,
) -> Result<C64, StateError> {
    if params.z() != 0.0 {
        return Err(StateError::NotAtCrossing(params.z()));
    }
    let root_plus = solve_level(n, SpinSector::Plus, params, tol)?;
    let root_minus = solve_level(n, SpinSector::Minus, params, tol)?;
    let plus = match_amplitudes(&root_plus, params)?;
    let minus = match_amplitudes(&root_minus, params)?;
    let ks = plus.kappa().conj();
    Ok(minus.a() * plus.c() * ks * (2.0 * ks).sin())
}

/// Pointwise scalar Wronskian `phi_+ phi_-' - phi_+' phi_-` from the
/// analytic derivatives. x-dependent away from the matching point because
/// the two sectors feel different reduced potentials.
pub fn wronskian_of_states(plus: &BoundState, minus: &BoundState, x: f64) -> C64 {
    eval_phi(plus, x) * eval_phi_derivative(minus, x)
        - eval_phi_derivative(plus, x) * eval_phi(minus, x)
}

/// Three-term weak-coupling estimate of the ground-state energy,
/// `pi^2/4 + XY/pi^2 + 2 sigma Z sqrt(XY)/pi^2`,
/// the O(lambda^4)-accurate expansion of `pi^2/4 + Z_eff^2/pi^2` with the
/// O(lambda^4) term Z^2 dropped.
pub fn ground_state_expansion(params: &CouplingParams, sigma: SpinSector) -> f64 {
    use std::f64::consts::PI;
    let pi2 = PI * PI;
    pi2 / 4.0
        + params.xy_product() / pi2
        + 2.0 * sigma.sign() * params.z() * params.xy_product().sqrt() / pi2
}
