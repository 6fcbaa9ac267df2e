//! Finite-dimensional block-operator representations of the Hamiltonian,
//! the channel-swap symmetry, the swap-parity pseudo-metric, the
//! quasi-parity operator and the physical metric, with a named-identity
//! verification suite.
//!
//! Two representations coexist, tagged on every operator:
//!
//! - the **grid** basis: N interior points of (-1, 1), second differences
//!   with Dirichlet ends, diagonal step potentials. The grid is symmetric
//!   and N is even, so no node sits at x = 0 and the discrete swap-parity
//!   identities (`H^dag theta = theta H`, `[H, Omega] = 0`, involutions)
//!   hold exactly, to rounding.
//! - the **truncated eigenbasis**: levels 0..=n_max of both sectors,
//!   sampled from the analytic wavefunctions, with left (dual) vectors
//!   corrected through the swap-parity Gram matrix so biorthonormality is
//!   exact on the grid. Spectral reconstructions, quasi-parity and metric
//!   sandwiches are built from these duals; identities involving them are
//!   then limited by the Gram conditioning rather than by the O(h^2)
//!   accuracy of raw grid contractions.
//!
//! Raw finite-difference residuals `||H psi - E psi||` against sampled
//! analytic states are reported separately: the interaction steps at x = 0
//! make them O(h^2) only when the sector strength vanishes, and the report
//! treats them as a discretization diagnostic, not an algebra check.

use crate::linalg::{hermitian_eigenvalues, vec_norm, CMatrix};
use crate::model::{CouplingParams, SpinSector};
use crate::quad::integrate_complex;
use crate::report::{IdentityCheck, NormKind, VerificationReport};
use crate::secular::{solve_level, SolverError};
use crate::states::{
    eval_phi, match_amplitudes, quasi_parity, BoundState, QuasiParity, StateError,
};
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("grid size must be even and positive, got {0}")]
    OddGridSize(usize),

    #[error("insufficient basis: quasi-parity and metric assembly need n_max >= 2, got {0}")]
    InsufficientBasis(usize),

    #[error("non-positive metric coefficient S[{index}] = {value}")]
    NonPositiveCoefficient { index: usize, value: f64 },

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error(transparent)]
    State(#[from] StateError),
}

/// Uniform symmetric grid of N interior points, h = 2/(N+1),
/// x_i = -1 + i h for i = 1..=N. N must be even so no node lands on the
/// potential step at x = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self, OperatorError> {
        if n == 0 || n % 2 != 0 {
            return Err(OperatorError::OddGridSize(n));
        }
        Ok(Grid { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 / (self.n as f64 + 1.0)
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        -1.0 + (i as f64 + 1.0) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

/// Which representation a block operator lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Grid { n: usize },
    EigenTruncated { k: usize },
}

/// A 2x2-partitioned complex operator over a tagged basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    basis: Basis,
    half_dim: usize,
    mat: CMatrix,
}

impl BlockOperator {
    pub fn from_blocks(
        basis: Basis,
        b11: &CMatrix,
        b12: &CMatrix,
        b21: &CMatrix,
        b22: &CMatrix,
    ) -> Self {
        let m = b11.rows();
        for b in [b11, b12, b21, b22] {
            assert_eq!((b.rows(), b.cols()), (m, m), "blocks must share dimension");
        }
        let mat = CMatrix::from_fn(2 * m, 2 * m, |i, j| {
            let (bi, ii) = (i / m, i % m);
            let (bj, jj) = (j / m, j % m);
            match (bi, bj) {
                (0, 0) => b11[(ii, jj)],
                (0, 1) => b12[(ii, jj)],
                (1, 0) => b21[(ii, jj)],
                _ => b22[(ii, jj)],
            }
        });
        BlockOperator { basis, half_dim: m, mat }
    }

    pub fn from_matrix(basis: Basis, mat: CMatrix) -> Self {
        assert_eq!(mat.rows(), mat.cols());
        assert_eq!(mat.rows() % 2, 0);
        let half_dim = mat.rows() / 2;
        BlockOperator { basis, half_dim, mat }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn half_dim(&self) -> usize {
        self.half_dim
    }

    pub fn dim(&self) -> usize {
        2 * self.half_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn block(&self, bi: usize, bj: usize) -> CMatrix {
        assert!(bi < 2 && bj < 2);
        let m = self.half_dim;
        CMatrix::from_fn(m, m, |i, j| self.mat[(bi * m + i, bj * m + j)])
    }

    fn assert_same_basis(&self, other: &BlockOperator) {
        assert_eq!(
            self.basis, other.basis,
            "block operators live in different bases; refusing the operation"
        );
    }

    pub fn mul(&self, other: &BlockOperator) -> BlockOperator {
        self.assert_same_basis(other);
        BlockOperator::from_matrix(self.basis, self.mat.mul(&other.mat))
    }

    pub fn sub(&self, other: &BlockOperator) -> BlockOperator {
        self.assert_same_basis(other);
        BlockOperator::from_matrix(self.basis, self.mat.sub(&other.mat))
    }

    pub fn add(&self, other: &BlockOperator) -> BlockOperator {
        self.assert_same_basis(other);
        BlockOperator::from_matrix(self.basis, self.mat.add(&other.mat))
    }

    pub fn adjoint(&self) -> BlockOperator {
        BlockOperator::from_matrix(self.basis, self.mat.adjoint())
    }

    pub fn scale(&self, factor: C64) -> BlockOperator {
        BlockOperator::from_matrix(self.basis, self.mat.scale(factor))
    }

    pub fn identity_like(&self) -> BlockOperator {
        BlockOperator::from_matrix(self.basis, CMatrix::identity(self.dim()))
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.mat.apply(v)
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::SpectralEstimate => self.mat.spectral_norm_estimate(40),
            _ => self.mat.max_abs(),
        }
    }
}

/// Potential step sign: +1 left of the origin, -1 right of it. No node
/// sits at zero on an even grid.
fn step_sign(x: f64) -> f64 {
    if x < 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn kinetic_block(grid: &Grid) -> CMatrix {
    let n = grid.len();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(2.0 * inv_h2, 0.0)
        } else if i.abs_diff(j) == 1 {
            C64::new(-inv_h2, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn parity_block(grid: &Grid) -> CMatrix {
    let n = grid.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i + j == n - 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn diag_block(grid: &Grid, f: impl Fn(f64) -> C64) -> CMatrix {
    let n = grid.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = f(grid.node(i));
    }
    m
}

/// Full two-channel Hamiltonian: second differences on the diagonal blocks
/// plus the purely imaginary step potentials (internal strength on the
/// diagonal blocks, channel couplings off-diagonal).
pub fn build_hamiltonian(params: &CouplingParams, grid: &Grid) -> BlockOperator {
    let kin = kinetic_block(grid);
    let (x, y, z) = (params.x(), params.y(), params.z());
    let va = diag_block(grid, |xi| C64::new(0.0, z * step_sign(xi)));
    let wb = diag_block(grid, |xi| C64::new(0.0, y * step_sign(xi)));
    let wa = diag_block(grid, |xi| C64::new(0.0, x * step_sign(xi)));
    let h11 = kin.add(&va);
    let h22 = h11.clone();
    BlockOperator::from_blocks(Basis::Grid { n: grid.len() }, &h11, &wb, &wa, &h22)
}

/// Reduced single-channel Hamiltonian of one sector:
/// `-d^2/dx^2 + i Z_eff(sigma) step(x)`.
pub fn build_sub_hamiltonian(params: &CouplingParams, grid: &Grid, sigma: SpinSector) -> CMatrix {
    let z_eff = params.z_eff(sigma);
    kinetic_block(grid).add(&diag_block(grid, |xi| C64::new(0.0, z_eff * step_sign(xi))))
}

/// Channel-swap symmetry `Omega = [[0, I/omega], [omega I, 0]]`.
pub fn build_omega(params: &CouplingParams, grid: &Grid) -> BlockOperator {
    let n = grid.len();
    let omega = params.omega();
    let zero = CMatrix::zeros(n, n);
    let upper = CMatrix::identity(n).scale(C64::new(1.0 / omega, 0.0));
    let lower = CMatrix::identity(n).scale(C64::new(omega, 0.0));
    BlockOperator::from_blocks(Basis::Grid { n }, &zero, &upper, &lower, &zero)
}

/// Swap-parity pseudo-metric `theta = [[0, P], [P, 0]]` with P the grid
/// index reversal. Hermitian, involutive, indefinite.
pub fn build_theta(grid: &Grid) -> BlockOperator {
    let n = grid.len();
    let zero = CMatrix::zeros(n, n);
    let p = parity_block(grid);
    BlockOperator::from_blocks(Basis::Grid { n }, &zero, &p, &p, &zero)
}

/// Spin projector `Pi_sigma = (I + sigma Omega)/2`.
pub fn build_projector(params: &CouplingParams, grid: &Grid, sigma: SpinSector) -> BlockOperator {
    let omega = build_omega(params, grid);
    omega
        .scale(C64::new(sigma.sign(), 0.0))
        .add(&omega.identity_like())
        .scale(C64::new(0.5, 0.0))
}

/// One member of the truncated eigenbasis.
#[derive(Debug, Clone, Copy)]
pub struct BasisLevel {
    pub n: usize,
    pub sigma: SpinSector,
    pub energy: f64,
    pub rho: QuasiParity,
}

/// Truncated two-channel eigenbasis on a grid: sampled right vectors, the
/// swap-parity Gram matrix and the exactly-biorthonormal dual (left)
/// vectors, plus the single-channel machinery for the reduced quasi-parity
/// routes.
pub struct TruncatedBasis {
    grid: Grid,
    params: CouplingParams,
    levels: Vec<BasisLevel>,
    states: Vec<BoundState>,
    /// Right vectors as columns, 2N x K.
    right: CMatrix,
    /// Dual vectors as columns, 2N x K; dual_j^H right_k = delta_jk.
    dual: CMatrix,
    /// Grid pseudo-norms v_k^H theta v_k.
    theta_norms: Vec<f64>,
    /// Single-channel sampled wavefunctions, N x (n_max+1), per sector.
    channel: [CMatrix; 2],
    /// Single-channel duals under the parity pairing, per sector.
    channel_dual: [CMatrix; 2],
}

impl TruncatedBasis {
    /// Sample levels 0..=n_max of both sectors with special-normalized
    /// amplitudes and build the exact dual bases.
    pub fn build(
        params: &CouplingParams,
        grid: &Grid,
        n_max: usize,
        tol: f64,
    ) -> Result<Self, OperatorError> {
        let n = grid.len();
        let per_sector = n_max + 1;
        let k_total = 2 * per_sector;

        let mut levels = Vec::with_capacity(k_total);
        let mut states = Vec::with_capacity(k_total);
        let mut right = CMatrix::zeros(2 * n, k_total);
        let mut channel = [CMatrix::zeros(n, per_sector), CMatrix::zeros(n, per_sector)];

        for (si, sigma) in SpinSector::ALL.into_iter().enumerate() {
            let sqrt_y = params.y().sqrt();
            let sqrt_x = params.x().sqrt();
            for level in 0..=n_max {
                let root = solve_level(level, sigma, params, tol)?;
                let state = match_amplitudes(&root, params)?;
                let rho = quasi_parity(&root)?;
                let k = si * per_sector + level;
                for i in 0..n {
                    let phi = eval_phi(&state, grid.node(i));
                    channel[si][(i, level)] = phi;
                    right[(i, k)] = phi * sqrt_y;
                    right[(i + n, k)] = phi * sigma.sign() * sqrt_x;
                }
                levels.push(BasisLevel { n: level, sigma, energy: root.energy(), rho });
                states.push(state);
            }
        }

        // theta V: channel swap plus index reversal.
        let theta_right = CMatrix::from_fn(2 * n, k_total, |i, k| {
            if i < n {
                right[(2 * n - 1 - i, k)]
            } else {
                right[(n - 1 - (i - n), k)]
            }
        });
        // Swap-parity Gram; Hermitian, near-diagonal with the quasi-parity
        // sign pattern.
        let gram = theta_right.adjoint().mul(&right);
        let theta_norms: Vec<f64> = (0..k_total).map(|k| gram[(k, k)].re).collect();
        let gram_inv = gram.solve(&CMatrix::identity(k_total));
        let dual = theta_right.mul(&gram_inv);

        // Single-channel duals under the plain parity pairing.
        let mut channel_dual = [CMatrix::zeros(n, per_sector), CMatrix::zeros(n, per_sector)];
        for si in 0..2 {
            let f = &channel[si];
            let pf = CMatrix::from_fn(n, per_sector, |i, k| f[(n - 1 - i, k)]);
            let sub_gram = pf.adjoint().mul(f);
            let sub_inv = sub_gram.solve(&CMatrix::identity(per_sector));
            channel_dual[si] = pf.mul(&sub_inv);
        }

        Ok(TruncatedBasis {
            grid: *grid,
            params: *params,
            levels,
            states,
            right,
            dual,
            theta_norms,
            channel,
            channel_dual,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &CouplingParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.levels.len() / 2 - 1
    }

    pub fn levels(&self) -> &[BasisLevel] {
        &self.levels
    }

    pub fn states(&self) -> &[BoundState] {
        &self.states
    }

    /// k-th right vector (length 2N).
    pub fn right_vector(&self, k: usize) -> Vec<C64> {
        (0..self.right.rows()).map(|i| self.right[(i, k)]).collect()
    }

    /// k-th dual vector (length 2N).
    pub fn dual_vector(&self, k: usize) -> Vec<C64> {
        (0..self.dual.rows()).map(|i| self.dual[(i, k)]).collect()
    }

    /// Grid pseudo-norm v_k^H theta v_k.
    pub fn theta_norm(&self, k: usize) -> f64 {
        self.theta_norms[k]
    }

    fn grid_basis(&self) -> Basis {
        Basis::Grid { n: self.grid.len() }
    }

    fn sandwich(&self, left: &CMatrix, diag: &[C64], right_adj: &CMatrix) -> BlockOperator {
        let k = diag.len();
        let mut scaled = left.clone();
        for kk in 0..k {
            for i in 0..scaled.rows() {
                scaled[(i, kk)] *= diag[kk];
            }
        }
        BlockOperator::from_matrix(self.grid_basis(), scaled.mul(&right_adj.adjoint()))
    }

    /// Completeness projector onto the span, `P = sum_k v_k w_k^H`.
    pub fn span_projector(&self) -> BlockOperator {
        let ones = vec![C64::new(1.0, 0.0); self.len()];
        self.sandwich(&self.right, &ones, &self.dual)
    }

    /// Spectral reconstruction of H on the span.
    pub fn spectral_hamiltonian(&self) -> BlockOperator {
        let diag: Vec<C64> = self.levels.iter().map(|l| C64::new(l.energy, 0.0)).collect();
        self.sandwich(&self.right, &diag, &self.dual)
    }

    /// Spectral reconstruction of Omega on the span.
    pub fn spectral_omega(&self) -> BlockOperator {
        let diag: Vec<C64> = self.levels.iter().map(|l| C64::new(l.sigma.sign(), 0.0)).collect();
        self.sandwich(&self.right, &diag, &self.dual)
    }

    /// Reduced quasi-parity operator of one sector on the single-channel
    /// grid, `R(sigma) = sum_n |phi_n> rho_n <dual_n|`.
    pub fn reduced_quasi_parity(&self, sigma: SpinSector) -> CMatrix {
        let si = if sigma == SpinSector::Plus { 0 } else { 1 };
        let per_sector = self.len() / 2;
        let mut scaled = self.channel[si].clone();
        for k in 0..per_sector {
            let rho = self.levels[si * per_sector + k].rho.sign();
            for i in 0..scaled.rows() {
                scaled[(i, k)] *= rho;
            }
        }
        scaled.mul(&self.channel_dual[si].adjoint())
    }
}

/// Quasi-parity operator assembled from the eigenbasis sum
/// `Q = sum_k |E_k> rho_k <<E_k|` (full-space duals).
pub fn build_quasi_parity(basis: &TruncatedBasis) -> Result<BlockOperator, OperatorError> {
    if basis.n_max() < 2 {
        return Err(OperatorError::InsufficientBasis(basis.n_max()));
    }
    let diag: Vec<C64> = basis.levels().iter().map(|l| C64::new(l.rho.sign(), 0.0)).collect();
    Ok(basis.sandwich(&basis.right, &diag, &basis.dual))
}

/// Quasi-parity operator assembled blockwise from the reduced sector
/// operators, `Q = sum_sigma R(sigma) Pi_sigma`, i.e.
/// `(1/2) [[R+ + R-, (R+ - R-)/omega], [omega (R+ - R-), R+ + R-]]`.
pub fn build_quasi_parity_blocks(basis: &TruncatedBasis) -> Result<BlockOperator, OperatorError> {
    if basis.n_max() < 2 {
        return Err(OperatorError::InsufficientBasis(basis.n_max()));
    }
    let omega = basis.params().omega();
    let r_plus = basis.reduced_quasi_parity(SpinSector::Plus);
    let r_minus = basis.reduced_quasi_parity(SpinSector::Minus);
    let sum = r_plus.add(&r_minus).scale(C64::new(0.5, 0.0));
    let diff = r_plus.sub(&r_minus).scale(C64::new(0.5, 0.0));
    Ok(BlockOperator::from_blocks(
        Basis::Grid { n: basis.grid().len() },
        &sum,
        &diff.scale(C64::new(1.0 / omega, 0.0)),
        &diff.scale(C64::new(omega, 0.0)),
        &sum,
    ))
}

/// Factorized special metric assembled blockwise from the reduced
/// quasi-parities,
/// `Theta = (1/2) [[omega (PR+ - PR-), PR+ + PR-], [PR+ + PR-, (PR+ - PR-)/omega]]`.
pub fn build_metric_blocks(basis: &TruncatedBasis) -> Result<BlockOperator, OperatorError> {
    if basis.n_max() < 2 {
        return Err(OperatorError::InsufficientBasis(basis.n_max()));
    }
    let omega = basis.params().omega();
    let p = parity_block(basis.grid());
    let pr_plus = p.mul(&basis.reduced_quasi_parity(SpinSector::Plus));
    let pr_minus = p.mul(&basis.reduced_quasi_parity(SpinSector::Minus));
    let sum = pr_plus.add(&pr_minus).scale(C64::new(0.5, 0.0));
    let diff = pr_plus.sub(&pr_minus).scale(C64::new(0.5, 0.0));
    Ok(BlockOperator::from_blocks(
        Basis::Grid { n: basis.grid().len() },
        &diff.scale(C64::new(omega, 0.0)),
        &sum,
        &sum,
        &diff.scale(C64::new(1.0 / omega, 0.0)),
    ))
}

/// The coefficient choice that makes the metric sandwich coincide with
/// `theta Q` on the span: `S_k = rho_k v_k^H theta v_k`, positive exactly
/// when each quasi-parity sign matches the sign of its grid pseudo-norm.
pub fn special_metric_coefficients(basis: &TruncatedBasis) -> Vec<f64> {
    basis
        .levels()
        .iter()
        .enumerate()
        .map(|(k, level)| level.rho.sign() * basis.theta_norm(k))
        .collect()
}

/// Metric sandwich over the dual basis, `Theta = sum_k w_k S_k w_k^H`.
/// Hermitian by construction; positive on the span iff every S_k > 0.
pub fn build_metric(
    basis: &TruncatedBasis,
    coefficients: &[f64],
) -> Result<BlockOperator, OperatorError> {
    for (index, &value) in coefficients.iter().enumerate() {
        if !(value > 0.0) {
            return Err(OperatorError::NonPositiveCoefficient { index, value });
        }
    }
    Ok(build_metric_unchecked(basis, coefficients))
}

/// Metric sandwich without the positivity gate; negative coefficients are
/// admitted so indefinite (mis-signed) metrics can be exhibited.
pub fn build_metric_unchecked(basis: &TruncatedBasis, coefficients: &[f64]) -> BlockOperator {
    assert_eq!(coefficients.len(), basis.len());
    let diag: Vec<C64> = coefficients.iter().map(|&s| C64::new(s, 0.0)).collect();
    basis.sandwich(&basis.dual, &diag, &basis.dual)
}

/// Eigenvalues of the metric restricted to the truncated span: the
/// Hermitian pencil `T x = lambda B x` with `T = V^H Theta V` and the Gram
/// `B = V^H V`, reduced by Cholesky and diagonalized by Jacobi rotations.
pub fn gram_projected_eigenvalues(basis: &TruncatedBasis, theta: &BlockOperator) -> Vec<f64> {
    let k = basis.len();
    let v = &basis.right;
    let t = v.adjoint().mul(&theta.matrix().mul(v));
    let b = v.adjoint().mul(v);
    let l = b.cholesky().expect("Gram matrix of independent states is positive definite");
    // M = L^-1 T L^-H, Hermitian with the pencil's eigenvalues.
    let li_t = l.solve_lower_triangular(&t);
    let m = l.solve_lower_triangular(&li_t.adjoint()).adjoint();
    // Symmetrize away the last rounding asymmetry before Jacobi.
    let m_sym = CMatrix::from_fn(k, k, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    hermitian_eigenvalues(&m_sym)
}

/// Relative finite-difference eigen-residual `||H v - E v|| / (||v|| (1 + |E|))`
/// of one sampled basis state against the grid Hamiltonian.
pub fn fd_eigen_residual(basis: &TruncatedBasis, hamiltonian: &BlockOperator, k: usize) -> f64 {
    let v = basis.right_vector(k);
    let e = basis.levels()[k].energy;
    let hv = hamiltonian.apply(&v);
    let mut residual = 0.0;
    for (i, hvi) in hv.iter().enumerate() {
        residual += (hvi - e * v[i]).norm_sqr();
    }
    residual.sqrt() / (vec_norm(&v) * (1.0 + e.abs()))
}

/// Settings for [`verify_operator_algebra`].
#[derive(Debug, Clone, Copy)]
pub struct VerifySettings {
    pub grid_n: usize,
    pub n_max: usize,
    pub tol: f64,
    pub norm: NormKind,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings { grid_n: 200, n_max: 8, tol: 1e-12, norm: NormKind::MaxAbs }
    }
}

/// Residual of `H^dag theta - theta H`, relative to ||H||. Exact (to
/// rounding) for the symmetric-grid discretization.
pub fn verify_pseudo_hermiticity(
    h: &BlockOperator,
    theta: &BlockOperator,
    norm: NormKind,
) -> IdentityCheck {
    let residual = h.adjoint().mul(theta).sub(&theta.mul(h)).norm(norm) / h.norm(norm);
    IdentityCheck::new("hamiltonian_pseudo_hermiticity", residual, 1e-13, norm)
}

fn max_vector_residual(
    basis: &TruncatedBasis,
    mut action: impl FnMut(&[C64], usize) -> Vec<C64>,
) -> f64 {
    let mut worst = 0.0_f64;
    for k in 0..basis.len() {
        let v = basis.right_vector(k);
        let r = action(&v, k);
        let num: f64 = r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(num / vec_norm(&v));
    }
    worst
}

/// Completeness of the biorthogonal span projector and spectral
/// reconstruction of H and Omega on the span.
pub fn verify_completeness_and_spectral(
    basis: &TruncatedBasis,
    norm: NormKind,
) -> Vec<IdentityCheck> {
    let mut checks = Vec::new();
    let span_projector = basis.span_projector();
    let k_total = basis.len();

    let mut completeness = max_vector_residual(basis, |v, _| {
        let pv = span_projector.apply(v);
        pv.iter().zip(v).map(|(a, b)| a - b).collect()
    });
    // Deterministic pseudo-random combinations stay in the span.
    let mut seed = 0x2545f4914f6cdd1d_u64;
    let mut next = || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((seed >> 33) as f64) / (u32::MAX as f64) - 0.5
    };
    for _ in 0..3 {
        let mut v = vec![C64::new(0.0, 0.0); 2 * basis.grid().len()];
        for k in 0..k_total {
            let coeff = C64::new(next(), next());
            for (i, vi) in basis.right_vector(k).into_iter().enumerate() {
                v[i] += coeff * vi;
            }
        }
        let pv = span_projector.apply(&v);
        let num: f64 = pv.iter().zip(&v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        completeness = completeness.max(num / vec_norm(&v));
    }
    checks.push(IdentityCheck::new("span_completeness", completeness, 1e-9, NormKind::Vector));

    let omega_span = basis.spectral_omega();
    let omega_recon = max_vector_residual(basis, |v, k| {
        let ov = omega_span.apply(v);
        let sigma = basis.levels()[k].sigma.sign();
        ov.iter().zip(v).map(|(a, b)| a - sigma * b).collect()
    });
    checks.push(IdentityCheck::new("omega_reconstruction", omega_recon, 1e-9, NormKind::Vector));

    let h_span = basis.spectral_hamiltonian();
    let mut h_recon = 0.0_f64;
    for k in 0..k_total {
        let v = basis.right_vector(k);
        let hv = h_span.apply(&v);
        let e = basis.levels()[k].energy;
        let num: f64 =
            hv.iter().zip(&v).map(|(a, b)| (a - e * b).norm_sqr()).sum::<f64>().sqrt();
        h_recon = h_recon.max(num / (vec_norm(&v) * (1.0 + e.abs())));
    }
    checks.push(IdentityCheck::new(
        "hamiltonian_reconstruction",
        h_recon,
        1e-9,
        NormKind::Vector,
    ));
    let _ = norm;
    checks
}

/// Partitioned-structure identities: the full-space swap-parity pairing
/// against its single-channel reduction (grid assembly and quadrature),
/// the coincidence of the reduced and full-space relative-normalization
/// signs, and the parity-pseudo-Hermiticity of the reduced
/// sub-Hamiltonians.
pub fn verify_partitioning(basis: &TruncatedBasis, norm: NormKind) -> Vec<IdentityCheck> {
    let params = basis.params();
    let grid = *basis.grid();
    let mut checks = Vec::new();

    let mut partition_grid = 0.0_f64;
    let per_sector = basis.len() / 2;
    for (k, level) in basis.levels().iter().enumerate() {
        let si = if level.sigma == SpinSector::Plus { 0 } else { 1 };
        let f: Vec<C64> =
            (0..grid.len()).map(|i| basis.channel[si][(i, k % per_sector)]).collect();
        let mut pf_pairing = C64::new(0.0, 0.0);
        for i in 0..grid.len() {
            pf_pairing += f[i].conj() * f[grid.len() - 1 - i];
        }
        let expected = 2.0 * level.sigma.sign() * params.xy_product().sqrt() * pf_pairing.re;
        let actual = basis.theta_norm(k);
        partition_grid =
            partition_grid.max((actual - expected).abs() / actual.abs().max(1e-300));
    }
    checks.push(IdentityCheck::new(
        "partition_overlap_grid",
        partition_grid,
        1e-8,
        NormKind::Scalar,
    ));

    let mut partition_quad = 0.0_f64;
    for (k, level) in basis.levels().iter().enumerate().take(5) {
        let state = &basis.states()[k];
        let pair = |x: f64| eval_phi(state, x).conj() * eval_phi(state, -x);
        let sub = integrate_complex(&pair, -1.0, 0.0, 1e-12)
            + integrate_complex(&pair, 0.0, 1.0, 1e-12);
        // Full-space theta pairing of the partitioned vector, by quadrature
        // of both channel combinations.
        let full = 2.0 * level.sigma.sign() * params.xy_product().sqrt() * sub.re;
        let direct = {
            let sqrt_x = params.x().sqrt();
            let sqrt_y = params.y().sqrt();
            let upper = |x: f64| {
                (eval_phi(state, x) * sqrt_y).conj()
                    * (eval_phi(state, -x) * level.sigma.sign() * sqrt_x)
            };
            let lower = |x: f64| {
                (eval_phi(state, x) * level.sigma.sign() * sqrt_x).conj()
                    * (eval_phi(state, -x) * sqrt_y)
            };
            let a = integrate_complex(&upper, -1.0, 0.0, 1e-12)
                + integrate_complex(&upper, 0.0, 1.0, 1e-12);
            let b = integrate_complex(&lower, -1.0, 0.0, 1e-12)
                + integrate_complex(&lower, 0.0, 1.0, 1e-12);
            (a + b).re
        };
        partition_quad = partition_quad.max((full - direct).abs() / full.abs().max(1e-300));
    }
    checks.push(IdentityCheck::new(
        "partition_overlap_quadrature",
        partition_quad,
        1e-8,
        NormKind::Scalar,
    ));

    // The reduced and full-space relative-normalization signs coincide:
    // rho_k (from the closed-form overlap) equals the sign of the grid
    // pseudo-norm, which is sigma times the single-channel parity pairing.
    let mismatches = basis
        .levels()
        .iter()
        .enumerate()
        .filter(|(k, level)| level.rho.sign() != basis.theta_norm(*k).signum())
        .count();
    checks.push(IdentityCheck::new(
        "rn_constants_coincide",
        mismatches as f64,
        0.0,
        NormKind::Scalar,
    ));

    // Reduced sub-Hamiltonians are parity-pseudo-Hermitian exactly.
    let p_block = parity_block(&grid);
    let mut sub_pt = 0.0_f64;
    for sigma in SpinSector::ALL {
        let sub = build_sub_hamiltonian(params, &grid, sigma);
        let diff = sub.sub(&p_block.mul(&sub.adjoint()).mul(&p_block));
        sub_pt = sub_pt.max(diff.max_abs() / sub.max_abs());
    }
    checks.push(IdentityCheck::new("sub_hamiltonian_pt_symmetry", sub_pt, 1e-13, norm));

    checks
}

/// Run the full identity suite and collect one named check per identity.
pub fn verify_operator_algebra(
    params: &CouplingParams,
    settings: &VerifySettings,
) -> Result<VerificationReport, OperatorError> {
    let grid = Grid::new(settings.grid_n)?;
    let norm = settings.norm;
    let mut report = VerificationReport::default();

    let h = build_hamiltonian(params, &grid);
    let omega = build_omega(params, &grid);
    let theta = build_theta(&grid);
    let identity = h.identity_like();
    let h_scale = h.norm(norm);

    // Exact discrete identities of the grid operators.
    report.push(IdentityCheck::new(
        "theta_involution",
        theta.mul(&theta).sub(&identity).norm(norm),
        1e-13,
        norm,
    ));
    report.push(IdentityCheck::new(
        "omega_involution",
        omega.mul(&omega).sub(&identity).norm(norm),
        1e-13,
        norm,
    ));
    report.push(IdentityCheck::new(
        "omega_pseudo_hermiticity",
        omega.adjoint().sub(&theta.mul(&omega).mul(&theta)).norm(norm),
        1e-13,
        norm,
    ));
    report.push(verify_pseudo_hermiticity(&h, &theta, norm));
    report.push(IdentityCheck::new(
        "hamiltonian_omega_commutator",
        h.mul(&omega).sub(&omega.mul(&h)).norm(norm) / h_scale,
        1e-13,
        norm,
    ));

    let pi_plus = build_projector(params, &grid, SpinSector::Plus);
    let pi_minus = build_projector(params, &grid, SpinSector::Minus);
    report.push(IdentityCheck::new(
        "projector_completeness",
        pi_plus.add(&pi_minus).sub(&identity).norm(norm),
        1e-13,
        norm,
    ));
    report.push(IdentityCheck::new(
        "projector_idempotent",
        pi_plus
            .mul(&pi_plus)
            .sub(&pi_plus)
            .norm(norm)
            .max(pi_minus.mul(&pi_minus).sub(&pi_minus).norm(norm)),
        1e-13,
        norm,
    ));
    report.push(IdentityCheck::new(
        "projector_orthogonal",
        pi_plus.mul(&pi_minus).norm(norm),
        1e-13,
        norm,
    ));

    // Truncated eigenbasis constructions.
    let basis = TruncatedBasis::build(params, &grid, settings.n_max, settings.tol)?;

    for check in verify_completeness_and_spectral(&basis, norm) {
        report.push(check);
    }

    // Raw finite-difference residual of the sampled states: discretization
    // diagnostic; the interaction step at the origin keeps it far above
    // the algebra tolerances unless a sector strength vanishes.
    let fd_res =
        (0..basis.len()).map(|k| fd_eigen_residual(&basis, &h, k)).fold(0.0, f64::max);
    report.push(IdentityCheck::new("eigen_residual_fd", fd_res, 0.05, NormKind::Vector));

    // Quasi-parity: eigen-action, involution, and the two assembly routes.
    let q = build_quasi_parity(&basis)?;
    let q_blocks = build_quasi_parity_blocks(&basis)?;
    let q_action = max_vector_residual(&basis, |v, k| {
        let qv = q.apply(v);
        let rho = basis.levels()[k].rho.sign();
        qv.iter().zip(v).map(|(a, b)| a - rho * b).collect()
    });
    report.push(IdentityCheck::new("quasi_parity_eigenaction", q_action, 1e-8, NormKind::Vector));

    let q_sq = q.mul(&q);
    let q_invol = max_vector_residual(&basis, |v, _| {
        let qqv = q_sq.apply(v);
        qqv.iter().zip(v).map(|(a, b)| a - b).collect()
    });
    report.push(IdentityCheck::new("quasi_parity_involution", q_invol, 1e-8, NormKind::Vector));

    report.push(IdentityCheck::new(
        "quasi_parity_route_agreement",
        q.sub(&q_blocks).norm(norm),
        1e-8,
        norm,
    ));

    let h_span = basis.spectral_hamiltonian();
    let h_span_scale = h_span.norm(norm);
    report.push(IdentityCheck::new(
        "quasi_parity_commutes_with_h",
        h_span.mul(&q).sub(&q.mul(&h_span)).norm(norm) / h_span_scale,
        1e-8,
        norm,
    ));

    // Metric: Hermiticity, positivity, quasi-Hermiticity, factorizations.
    let coefficients = special_metric_coefficients(&basis);
    let theta_metric = build_metric(&basis, &coefficients)?;
    report.push(IdentityCheck::new(
        "metric_hermitian",
        theta_metric.sub(&theta_metric.adjoint()).norm(norm),
        1e-10,
        norm,
    ));

    let eigs = gram_projected_eigenvalues(&basis, &theta_metric);
    let min_eig = eigs.first().copied().unwrap_or(0.0);
    let max_eig = eigs.last().copied().unwrap_or(0.0);
    // Positivity margin: smallest pencil eigenvalue must clear a relative
    // floor; report the shortfall as the residual.
    let positivity_floor = 1e-12 * max_eig.abs().max(1e-300);
    report.push(IdentityCheck::new(
        "metric_positive_on_span",
        (positivity_floor - min_eig).max(0.0),
        0.0,
        NormKind::Scalar,
    ));

    report.push(IdentityCheck::new(
        "metric_quasi_hermiticity",
        h_span.adjoint().mul(&theta_metric).sub(&theta_metric.mul(&h_span)).norm(norm)
            / (h_span_scale * theta_metric.norm(norm)).max(1e-300),
        1e-8,
        norm,
    ));

    // Theta_special equals theta Q on the span.
    let theta_q = theta.mul(&q);
    let factor_res = max_vector_residual(&basis, |v, _| {
        let a = theta_metric.apply(v);
        let b = theta_q.apply(v);
        a.iter().zip(&b).map(|(x, y)| x - y).collect()
    });
    report.push(IdentityCheck::new(
        "metric_equals_theta_q_on_span",
        factor_res,
        1e-8,
        NormKind::Vector,
    ));

    // Blockwise factorized metric against theta Q, route-independent.
    let theta_blocks = build_metric_blocks(&basis)?;
    report.push(IdentityCheck::new(
        "metric_block_factorization",
        theta_blocks.sub(&theta_q).norm(norm),
        1e-8,
        norm,
    ));

    for check in verify_partitioning(&basis, norm) {
        report.push(check);
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secular::DEFAULT_TOL;
    use crate::states::parity_overlap;

    fn test_params() -> CouplingParams {
        CouplingParams::new(1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn grid_rejects_odd_sizes() {
        assert!(Grid::new(7).is_err());
        assert!(Grid::new(0).is_err());
        let grid = Grid::new(8).unwrap();
        assert_eq!(grid.spacing(), 2.0 / 9.0);
        // Symmetric about zero, no node at the origin.
        let nodes = grid.nodes();
        for (i, &x) in nodes.iter().enumerate() {
            assert!((x + nodes[nodes.len() - 1 - i]).abs() < 1e-15);
            assert!(x != 0.0);
        }
    }

    #[test]
    fn basis_mismatch_panics() {
        let grid_a = Grid::new(4).unwrap();
        let grid_b = Grid::new(6).unwrap();
        let ta = build_theta(&grid_a);
        let tb = build_theta(&grid_b);
        let result = std::panic::catch_unwind(|| ta.mul(&tb));
        assert!(result.is_err());
    }

    #[test]
    fn hermitian_limit_block_diagonal_rayleigh() {
        // Nearly decoupled channels: the first-channel discrete sine is an
        // exact eigenvector of the kinetic block; its Rayleigh quotient is
        // the known lowest finite-difference eigenvalue, pi^2/4 + O(h^2).
        use std::f64::consts::PI;
        let params = CouplingParams::new(1e-300, 1e-300, 0.0).unwrap();
        let mut previous_error = f64::INFINITY;
        for n in [100usize, 200, 400] {
            let grid = Grid::new(n).unwrap();
            let h = build_hamiltonian(&params, &grid);
            let mut v = vec![C64::new(0.0, 0.0); 2 * n];
            for i in 0..n {
                v[i] = C64::new((PI * (grid.node(i) + 1.0) / 2.0).sin(), 0.0);
            }
            let hv = h.apply(&v);
            let num: C64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
            let den: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            let rayleigh = num.re / den;
            let error = (rayleigh - PI * PI / 4.0).abs();
            let h_sq = grid.spacing() * grid.spacing();
            assert!(error < PI.powi(4) / 192.0 * h_sq * 1.5, "N={n}: error {error:.3e}");
            assert!(error < previous_error / 3.0, "O(h^2) convergence");
            previous_error = error;
        }
    }

    #[test]
    fn fd_residual_halves_by_four_in_kink_free_sector() {
        // Z = -sqrt(XY) makes Z_eff(+1) = 0: the sigma = +1 state has a
        // smooth second derivative and the sampled-state residual is pure
        // O(h^2) truncation.
        let params = CouplingParams::new(1.0, 1.0, -1.0).unwrap();
        let mut previous = f64::INFINITY;
        for n in [100usize, 200, 400] {
            let grid = Grid::new(n).unwrap();
            let h = build_hamiltonian(&params, &grid);
            let basis = TruncatedBasis::build(&params, &grid, 0, DEFAULT_TOL).unwrap();
            let k = basis
                .levels()
                .iter()
                .position(|l| l.sigma == SpinSector::Plus)
                .unwrap();
            let res = fd_eigen_residual(&basis, &h, k);
            if previous.is_finite() {
                let ratio = previous / res;
                assert!((3.2..5.0).contains(&ratio), "halving ratio {ratio}");
            }
            previous = res;
        }
    }

    #[test]
    fn hermitian_limit_is_self_adjoint() {
        // X = Y -> 0, Z = 0: the operator degenerates to the real symmetric
        // kinetic matrix and pseudo-Hermiticity becomes plain Hermiticity.
        let params = CouplingParams::new(1e-300, 1e-300, 0.0).unwrap();
        let grid = Grid::new(60).unwrap();
        let h = build_hamiltonian(&params, &grid);
        assert!(h.adjoint().sub(&h).norm(NormKind::MaxAbs) <= 1e-14);
        let theta = build_theta(&grid);
        let check = verify_pseudo_hermiticity(&h, &theta, NormKind::MaxAbs);
        assert!(check.pass && check.residual <= 1e-14);
    }

    #[test]
    fn standalone_verify_entries() {
        let params = test_params();
        let grid = Grid::new(80).unwrap();
        let basis = TruncatedBasis::build(&params, &grid, 3, DEFAULT_TOL).unwrap();

        let completeness = verify_completeness_and_spectral(&basis, NormKind::MaxAbs);
        assert_eq!(completeness.len(), 3);
        for check in &completeness {
            assert!(check.pass, "{}: {:.3e}", check.name, check.residual);
        }

        let partitioning = verify_partitioning(&basis, NormKind::MaxAbs);
        assert_eq!(partitioning.len(), 4);
        for check in &partitioning {
            assert!(check.pass, "{}: {:.3e}", check.name, check.residual);
        }
    }

    #[test]
    fn pseudo_hermiticity_detects_perturbation() {
        let params = test_params();
        let grid = Grid::new(100).unwrap();
        let h = build_hamiltonian(&params, &grid);
        let theta = build_theta(&grid);
        let clean = h.adjoint().mul(&theta).sub(&theta.mul(&h)).norm(NormKind::MaxAbs);
        assert!(clean < 1e-13);

        let mut perturbed_mat = h.matrix().clone();
        perturbed_mat[(3, 3)] += C64::new(1e-3, 0.0);
        let perturbed = BlockOperator::from_matrix(h.basis(), perturbed_mat);
        let residual =
            perturbed.adjoint().mul(&theta).sub(&theta.mul(&perturbed)).norm(NormKind::MaxAbs);
        assert!(residual > 5e-4 && residual < 5e-3, "residual {residual:.3e}");
    }

    #[test]
    fn insufficient_basis_rejected() {
        let params = test_params();
        let grid = Grid::new(40).unwrap();
        let basis = TruncatedBasis::build(&params, &grid, 1, DEFAULT_TOL).unwrap();
        assert!(matches!(
            build_quasi_parity(&basis),
            Err(OperatorError::InsufficientBasis(1))
        ));
    }

    #[test]
    fn metric_rejects_nonpositive_coefficients() {
        let params = test_params();
        let grid = Grid::new(40).unwrap();
        let basis = TruncatedBasis::build(&params, &grid, 2, DEFAULT_TOL).unwrap();
        let mut coefficients = special_metric_coefficients(&basis);
        coefficients[0] = -coefficients[0];
        assert!(matches!(
            build_metric(&basis, &coefficients),
            Err(OperatorError::NonPositiveCoefficient { index: 0, .. })
        ));
    }

    #[test]
    fn flipped_quasi_parity_breaks_positivity() {
        let params = test_params();
        let grid = Grid::new(60).unwrap();
        let basis = TruncatedBasis::build(&params, &grid, 3, DEFAULT_TOL).unwrap();
        let mut coefficients = special_metric_coefficients(&basis);
        assert!(coefficients.iter().all(|&s| s > 0.0));
        coefficients[2] = -coefficients[2];
        let theta = build_metric_unchecked(&basis, &coefficients);
        let eigs = gram_projected_eigenvalues(&basis, &theta);
        assert!(eigs[0] < 0.0, "flipped sign must produce a negative eigenvalue, got {eigs:?}");
    }

    #[test]
    fn full_identity_suite_passes() {
        // The theta-Q factorization residual is limited by the O(h^4)
        // accuracy of the grid swap-parity pairings, so run at the
        // production grid size.
        let params = test_params();
        let settings = VerifySettings::default();
        let report = verify_operator_algebra(&params, &settings).unwrap();
        for check in &report.checks {
            assert!(
                check.pass,
                "{} failed: residual {:.3e} tolerance {:.3e}",
                check.name, check.residual, check.tolerance
            );
        }
    }

    #[test]
    fn quasi_parity_acts_with_unit_eigenvalues() {
        let params = test_params();
        let grid = Grid::new(60).unwrap();
        let basis = TruncatedBasis::build(&params, &grid, 2, DEFAULT_TOL).unwrap();
        let q = build_quasi_parity(&basis).unwrap();
        for k in 0..basis.len() {
            let v = basis.right_vector(k);
            let qv = q.apply(&v);
            let rho = basis.levels()[k].rho.sign();
            let err: f64 =
                qv.iter().zip(&v).map(|(a, b)| (a - rho * b).norm_sqr()).sum::<f64>().sqrt();
            assert!(err / vec_norm(&v) < 1e-10);
        }
    }

    #[test]
    fn parity_overlap_signs_match_grid_pseudo_norms() {
        // The closed-form overlap sign drives the quasi-parity; the grid
        // pseudo-norm must agree for the special coefficients to be
        // positive.
        let params = test_params();
        let grid = Grid::new(120).unwrap();
        let basis = TruncatedBasis::build(&params, &grid, 6, DEFAULT_TOL).unwrap();
        for (k, level) in basis.levels().iter().enumerate() {
            let state = &basis.states()[k];
            let f_sign = parity_overlap(state.root()).signum() * level.sigma.sign();
            assert_eq!(f_sign, basis.theta_norm(k).signum(), "level {k}");
        }
    }
}
