//! Dense complex matrices and the few factorizations the operator algebra
//! needs: LU solves for dual-basis construction, Cholesky for Gram
//! projection, and a cyclic Jacobi eigensolver (Hermitian matrices are
//! embedded as real symmetric ones of twice the size).

use num_complex::Complex64 as C64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, b) in out.data.iter_mut().zip(&other.data) {
            *o -= b;
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, b) in out.data.iter_mut().zip(&other.data) {
            *o += b;
        }
        out
    }

    pub fn scale(&self, factor: C64) -> CMatrix {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o *= factor;
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Power-iteration estimate of the largest singular value.
    pub fn spectral_norm_estimate(&self, iterations: usize) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let mut v: Vec<C64> =
            (0..self.cols).map(|j| C64::new(1.0 + (j as f64 * 0.7).sin(), 0.3)).collect();
        let mut norm = 0.0;
        let at = self.adjoint();
        for _ in 0..iterations {
            let w = self.apply(&v);
            let u = at.apply(&w);
            let scale = vec_norm(&u);
            if scale == 0.0 {
                return 0.0;
            }
            norm = scale.sqrt();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi = ui / scale;
            }
        }
        norm
    }

    /// Solve A X = B by LU with partial pivoting (A square, well
    /// conditioned for the Gram systems this backs). Panics on a
    /// numerically singular pivot.
    pub fn solve(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let mut lu = self.clone();
        let mut x = rhs.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (mut pivot_row, mut pivot_mag) = (col, lu[(col, col)].norm());
            for r in col + 1..n {
                let mag = lu[(r, col)].norm();
                if mag > pivot_mag {
                    pivot_row = r;
                    pivot_mag = mag;
                }
            }
            assert!(pivot_mag > 1e-300, "singular matrix in solve");
            if pivot_row != col {
                for j in 0..n {
                    lu.data.swap(col * n + j, pivot_row * n + j);
                }
                for j in 0..x.cols {
                    x.data.swap(col * x.cols + j, pivot_row * x.cols + j);
                }
                perm.swap(col, pivot_row);
            }
            let pivot = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / pivot;
                lu[(r, col)] = factor;
                for j in col + 1..n {
                    let v = lu[(col, j)];
                    lu[(r, j)] -= factor * v;
                }
                for j in 0..x.cols {
                    let v = x[(col, j)];
                    x[(r, j)] -= factor * v;
                }
            }
        }
        for col in (0..n).rev() {
            let pivot = lu[(col, col)];
            for j in 0..x.cols {
                x[(col, j)] /= pivot;
            }
            for r in 0..col {
                let factor = lu[(r, col)];
                for j in 0..x.cols {
                    let v = x[(col, j)];
                    x[(r, j)] -= factor * v;
                }
            }
        }
        x
    }

    /// Cholesky factor L (lower) of a Hermitian positive-definite matrix.
    pub fn cholesky(&self) -> Option<CMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut l = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum -= l[(i, k)] * l[(j, k)].conj();
                }
                if i == j {
                    if sum.re <= 0.0 || sum.im.abs() > 1e-10 * sum.re.abs().max(1e-300) {
                        return None;
                    }
                    l[(i, j)] = C64::new(sum.re.sqrt(), 0.0);
                } else {
                    l[(i, j)] = sum / l[(j, j)];
                }
            }
        }
        Some(l)
    }

    /// Solve L X = B for lower-triangular L.
    pub fn solve_lower_triangular(&self, rhs: &CMatrix) -> CMatrix {
        let n = self.rows;
        let mut x = rhs.clone();
        for col in 0..n {
            let pivot = self[(col, col)];
            for j in 0..x.cols {
                x[(col, j)] /= pivot;
            }
            for r in col + 1..n {
                let factor = self[(r, col)];
                for j in 0..x.cols {
                    let v = x[(col, j)];
                    x[(r, j)] -= factor * v;
                }
            }
        }
        x
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// ascending. Destroys nothing; suitable for the small (<= ~100) systems
/// the Gram projections produce.
pub fn jacobi_eigenvalues_sym(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(&m)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}

fn frobenius(m: &[Vec<f64>]) -> f64 {
    m.iter().flat_map(|r| r.iter()).map(|x| x * x).sum::<f64>().sqrt()
}

/// Eigenvalues of a complex Hermitian matrix, ascending, via the real
/// symmetric embedding [[Re, -Im], [Im, Re]] (each eigenvalue appears
/// twice; duplicates are collapsed positionally).
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let n = h.rows();
    assert_eq!(n, h.cols());
    let mut real = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let v = h[(i, j)];
            real[i][j] = v.re;
            real[i][j + n] = -v.im;
            real[i + n][j] = v.im;
            real[i + n][j + n] = v.re;
        }
    }
    let doubled = jacobi_eigenvalues_sym(&real);
    // Doubled spectrum: take every other entry of the sorted list.
    doubled.into_iter().step_by(2).collect()
}
