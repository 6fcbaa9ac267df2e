//! Spectral solver and operator-algebra verification suite for a pair of
//! PT-symmetric square wells coupled through purely imaginary step
//! potentials.
//!
//! The model lives on the interval (-1, 1) in units hbar = 2m = 1 and is
//! controlled by three real strengths: the channel couplings `X`, `Y` and
//! the internal strength `Z`. A constant off-diagonal symmetry splits the
//! two-channel problem into spin sectors sigma = +/-1, each governed by the
//! real transcendental quantization condition
//!
//! ```text
//! s sin 2s + t sinh 2t = 0,        t = Z_eff(sigma) / (2 s),
//! Z_eff(sigma) = Z + sigma sqrt(X Y),      E = s^2 - t^2.
//! ```
//!
//! The crate provides:
//!
//! - [`model`]: coupling parameters, spin sectors and solved level records;
//! - [`secular`]: root bracketing/bisection for the quantization condition,
//!   full-spectrum assembly, level-merging (exceptional-point) detection and
//!   phase-diagram scans;
//! - [`perturbation`]: the large-index / weak-coupling series for the root
//!   offsets and its validation against exact roots;
//! - [`states`]: explicit two-interval wavefunctions, matching amplitudes,
//!   parity overlaps, quasi-parities, special normalization and the
//!   crossing-point Wronskian;
//! - [`operator`]: finite-difference block operators (H, Omega, theta) plus
//!   the quasi-parity and metric constructions with a named-identity
//!   verification report;
//! - [`output`]: byte-deterministic JSON/CSV serialization used by the CLI.

pub mod linalg;
pub mod model;
pub mod operator;
pub mod output;
pub mod perturbation;
pub mod quad;
pub mod report;
pub mod secular;
pub mod states;

pub use model::{CouplingParams, LevelRoot, ModelError, SpinSector, Z_CRIT_DEFAULT};
pub use secular::{
    find_critical_z, phase_scan, secular_residual, solve_level, solve_level_at, solve_spectrum,
    ComplexPair, MergeEvent, PhasePoint, SolverError, SpectrumResult,
};
pub use states::{
    eval_wavefunction, ground_state_expansion, match_amplitudes, normalize_special,
    parity_overlap, quasi_parity, self_overlap, theta_pairing_overlap, wronskian_at_crossing,
    BoundState, QuasiParity, StateError,
};

/// Version string embedded in all serialized outputs.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
