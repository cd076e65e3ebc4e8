//! Positive unit-trace matrices: the finite-dimensional carriers of states.

use crate::error::{QfeError, Result};
use crate::kernel::eta;
use crate::linalg::{hermitian_eig, hermiticity_defect, CMat, C64};

/// A positive semidefinite matrix of unit trace, with its spectrum cached.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMat,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e−10), positivity (eigenvalues ≥ −1e−10) and
    /// unit trace (|tr − 1| ≤ 1e−10).
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(QfeError::InvalidArgument(
                "density matrix must be square and nonempty".into(),
            ));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > 1e-10 {
            return Err(QfeError::InvalidArgument(format!(
                "density matrix not Hermitian: defect {herm:.3e}"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(QfeError::InvalidArgument(format!(
                "density matrix trace {} is not 1",
                trace
            )));
        }
        let eig = hermitian_eig(&matrix);
        if let Some(min) = eig.values.first() {
            if *min < -1e-10 {
                return Err(QfeError::InvalidArgument(format!(
                    "density matrix not positive semidefinite: min eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(DensityMatrix {
            matrix,
            eigenvalues: eig.values,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// −Tr ρ log ρ = Σ η(μ_i), in nats.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues.iter().map(|&m| eta(m)).sum()
    }

    /// Tr(ρ X).
    pub fn expectation(&self, op: &CMat) -> C64 {
        (&self.matrix * op).trace()
    }
}
