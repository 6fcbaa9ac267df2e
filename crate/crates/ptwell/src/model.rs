//! Coupling parameters, spin sectors and solved-level records.

use std::f64::consts::PI;
use thiserror::Error;

/// Critical internal strength of the single-channel well, as usually quoted
/// to two decimals. [`crate::secular::find_critical_z`] recomputes it to
/// solver precision; this constant is the quick-check default.
pub const Z_CRIT_DEFAULT: f64 = 4.48;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    /// X or Y reached the decoupling limit. At X -> 0 or Y -> 0 one channel
    /// decouples, omega = sqrt(X/Y) ceases to exist and the spin-sector
    /// reduction breaks down, so nonpositive couplings are rejected outright.
    #[error(
        "invalid coupling {name} = {value}: {name} must be > 0 \
         (the {name} -> 0 decoupling limit suppresses one channel and the \
         spin-like symmetry ceases to exist)"
    )]
    InvalidCoupling { name: &'static str, value: f64 },

    /// Root parameter out of range (s must be positive).
    #[error("invalid root parameter s = {0}: s must be > 0")]
    InvalidRoot(f64),
}

/// Spin-sector label: the eigenvalue sigma = +/-1 of the constant
/// channel-swap symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinSector {
    Plus,
    Minus,
}

impl SpinSector {
    pub const ALL: [SpinSector; 2] = [SpinSector::Plus, SpinSector::Minus];

    /// The eigenvalue +/-1 as a float.
    pub fn sign(self) -> f64 {
        match self {
            SpinSector::Plus => 1.0,
            SpinSector::Minus => -1.0,
        }
    }

    /// Integer form, +1 or -1.
    pub fn as_i32(self) -> i32 {
        match self {
            SpinSector::Plus => 1,
            SpinSector::Minus => -1,
        }
    }

    pub fn flip(self) -> SpinSector {
        match self {
            SpinSector::Plus => SpinSector::Minus,
            SpinSector::Minus => SpinSector::Plus,
        }
    }
}

impl std::fmt::Display for SpinSector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:+}", self.as_i32())
    }
}

/// The three real strengths of the coupled-channel well.
///
/// `X` and `Y` are the imaginary channel-coupling magnitudes, `Z` the
/// imaginary internal strength; all step potentials flip sign at x = 0.
/// Construction enforces X > 0 and Y > 0 (see [`ModelError::InvalidCoupling`]);
/// Z may be any real number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    x: f64,
    y: f64,
    z: f64,
}

impl CouplingParams {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, ModelError> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(ModelError::InvalidCoupling { name: "X", value: x });
        }
        if !(y > 0.0) || !y.is_finite() {
            return Err(ModelError::InvalidCoupling { name: "Y", value: y });
        }
        if !z.is_finite() {
            return Err(ModelError::InvalidCoupling { name: "Z", value: z });
        }
        Ok(CouplingParams { x, y, z })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// The product XY, the only combination of X and Y the spectrum feels.
    pub fn xy_product(&self) -> f64 {
        self.x * self.y
    }

    /// Effective internal strength of one spin sector,
    /// `Z_eff(sigma) = Z + sigma sqrt(XY)`.
    pub fn z_eff(&self, sigma: SpinSector) -> f64 {
        self.z + sigma.sign() * (self.x * self.y).sqrt()
    }

    /// Channel-asymmetry ratio `omega = sqrt(X/Y)`.
    pub fn omega(&self) -> f64 {
        (self.x / self.y).sqrt()
    }

    /// Whether both spin sectors stay inside the real-spectrum domain:
    /// sqrt(XY) + |Z| < z_crit.
    pub fn is_physical(&self, z_crit: f64) -> bool {
        (self.x * self.y).sqrt() + self.z.abs() < z_crit
    }
}

/// One solved level of the quantization condition.
///
/// The authoritative solved quantity is the offset
/// `q = 2 (-1)^n (s - (n+1) pi/2)`, kept at full precision; `s`, `t` and the
/// energy are derived from it. The energy is always recomputed as
/// `E = s^2 - t^2`, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRoot {
    n: usize,
    sigma: SpinSector,
    q: f64,
    s: f64,
    t: f64,
}

impl LevelRoot {
    /// Build a root record from a solved `s` (and the branch value of `t`).
    /// The offset is recomputed from `s`; prefer [`LevelRoot::from_offset`]
    /// when the offset itself is available at full precision.
    pub fn new(n: usize, sigma: SpinSector, s: f64, t: f64) -> Result<Self, ModelError> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(ModelError::InvalidRoot(s));
        }
        let tau = if n % 2 == 0 { 1.0 } else { -1.0 };
        let q = tau * (2.0 * s - (n as f64 + 1.0) * PI);
        Ok(LevelRoot { n, sigma, q, s, t })
    }

    /// Build a root record from the solved offset `q` and the sector's
    /// effective strength; `s` and `t` follow from the branch relations.
    pub fn from_offset(n: usize, sigma: SpinSector, q: f64, z_eff: f64) -> Self {
        let tau = if n % 2 == 0 { 1.0 } else { -1.0 };
        let s = 0.5 * ((n as f64 + 1.0) * PI + tau * q);
        let t = z_eff / (2.0 * s);
        LevelRoot { n, sigma, q, s, t }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> SpinSector {
        self.sigma
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// The solved offset `Q_n = 2 (-1)^n (s_n - (n+1) pi/2)`.
    pub fn q_correction(&self) -> f64 {
        self.q
    }

    /// Energy `E = s^2 - t^2`, recomputed.
    pub fn energy(&self) -> f64 {
        self.s * self.s - self.t * self.t
    }

    /// The sector strength recovered from the branch constraint, `2 s t`.
    pub fn z_eff(&self) -> f64 {
        2.0 * self.s * self.t
    }

    /// Same root record with the sector label flipped (s, t untouched).
    pub fn with_sigma(&self, sigma: SpinSector) -> LevelRoot {
        LevelRoot { sigma, ..*self }
    }

    /// Center of the localization window, `(n+1) pi/2`.
    pub fn window_center(n: usize) -> f64 {
        (n as f64 + 1.0) * PI / 2.0
    }
}
