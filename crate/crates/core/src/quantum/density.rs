use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::state::{PureState, NORM_TOL, ZERO};
use crate::error::{Error, Result};

/// Smallest eigenvalue tolerated in a density operator or POVM element.
pub const PSD_TOL: f64 = 1e-10;

/// A density operator on one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    matrix: DMatrix<Complex64>,
}

impl DensityOp {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || !(dim == 2 || dim == 4) {
            return Err(Error::param(format!(
                "density operator must be 2x2 or 4x4, got {}x{}",
                dim,
                matrix.ncols()
            )));
        }
        let herm = hermitian_defect(&matrix);
        if herm > NORM_TOL {
            return Err(Error::param(format!(
                "matrix is not Hermitian (defect {herm})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::param(format!("trace must be 1, got {tr}")));
        }
        let min = hermitian_eigenvalues(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::param(format!("negative eigenvalue {min}")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn from_pure(state: &PureState) -> Self {
        Self {
            matrix: outer(state),
        }
    }

    /// Amplitude vector `v` to `|v><v|`; `v` must be normalized.
    pub(crate) fn from_vector(v: &[Complex64]) -> Self {
        let d = v.len();
        Self {
            matrix: DMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj()),
        }
    }

    /// `sum_k w_k |s_k><s_k|` with weights summing to one.
    pub fn mixture(parts: &[(f64, PureState)]) -> Result<Self> {
        let mut m = DMatrix::from_element(2, 2, ZERO);
        for (w, s) in parts {
            m += outer(s) * Complex64::new(*w, 0.0);
        }
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `<psi|rho|psi>` for a single-qubit operator.
    pub fn expectation(&self, state: &PureState) -> f64 {
        assert_eq!(
            self.dim(),
            2,
            "expectation of a single-qubit state needs a 2x2 operator"
        );
        let a = state.amplitudes();
        let mut acc = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                acc += a[i].conj() * self.matrix[(i, j)] * a[j];
            }
        }
        acc.re
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &DensityOp) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Reduced operator of one qubit of a two-qubit operator (qubit 0 is the
    /// most significant index bit).
    pub fn partial_trace(&self, keep: usize) -> Result<DensityOp> {
        if self.dim() != 4 {
            return Err(Error::param(
                "partial trace needs a two-qubit (4x4) operator",
            ));
        }
        if keep > 1 {
            return Err(Error::param(format!(
                "no qubit {keep} in a two-qubit operator"
            )));
        }
        let mut out = DMatrix::from_element(2, 2, ZERO);
        for r in 0..2 {
            for c in 0..2 {
                let mut acc = ZERO;
                for t in 0..2 {
                    let (i, j) = if keep == 0 {
                        (r * 2 + t, c * 2 + t)
                    } else {
                        (t * 2 + r, t * 2 + c)
                    };
                    acc += self.matrix[(i, j)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(DensityOp { matrix: out })
    }
}

/// `(1/2) tr|rho - sigma|`, from the eigenvalues of the Hermitian difference.
pub fn trace_distance(rho: &DensityOp, sigma: &DensityOp) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::param(format!(
            "dimension mismatch: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let diff = &rho.matrix - &sigma.matrix;
    Ok(0.5 * trace_norm(&diff))
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<Complex64>) -> f64 {
    hermitian_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

pub(crate) fn outer(state: &PureState) -> DMatrix<Complex64> {
    let a = state.amplitudes();
    DMatrix::from_fn(2, 2, |i, j| a[i] * a[j].conj())
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
