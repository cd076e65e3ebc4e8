//! Exact finite-dimensional fermion machinery: Jordan–Wigner representation,
//! quasi-free density operators built from the correlation matrix, one-mode
//! matrix units, modular flow on the one-particle space, and the closed-form
//! entropy of a quasi-free state.

use crate::density::DensityMatrix;
use crate::error::{QfeError, Result};
use crate::kernel::ecar_clamped;
use crate::linalg::{hermitian_eig, hermiticity_defect, max_abs, CMat, CVec, HermitianEigen, C64};
use crate::max_dense_dim;

const CLAMP: f64 = 1e-12;

/// Hermitian correlation matrix of a gauge-invariant quasi-free fermion
/// state; spectrum lies in `[0, 1]` up to the admission tolerance.
#[derive(Debug, Clone)]
pub struct CarCorrelation {
    matrix: CMat,
    eig: HermitianEigen,
}

impl CarCorrelation {
    /// Admission tolerance 1e−10 on Hermiticity and on the spectral range.
    pub fn new(matrix: CMat) -> Result<Self> {
        Self::with_spectral_tolerance(matrix, 1e-10)
    }

    /// Same, with a caller-chosen spectral tolerance (block-Toeplitz
    /// restrictions accumulate quadrature error and use 1e−8).
    pub fn with_spectral_tolerance(matrix: CMat, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(QfeError::InvalidCorrelation(
                "correlation matrix must be square and nonempty".into(),
            ));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > 1e-10 {
            return Err(QfeError::InvalidCorrelation(format!(
                "not Hermitian: defect {defect:.3e}"
            )));
        }
        let eig = hermitian_eig(&matrix);
        for &l in &eig.values {
            if l < -tol || l > 1.0 + tol {
                return Err(QfeError::InvalidCorrelation(format!(
                    "eigenvalue {l} outside [0, 1] beyond tolerance {tol:.1e}"
                )));
            }
        }
        Ok(CarCorrelation { matrix, eig })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Eigenvalues ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    /// S(ω_A) = Tr[η(A) + η(1−A)] = Σ_i [η(λ_i) + η(1−λ_i)], in nats.
    pub fn entropy(&self) -> f64 {
        self.eig.values.iter().map(|&l| ecar_clamped(l)).sum()
    }

    /// λ = (Af, f).
    pub fn occupation(&self, f: &CVec) -> f64 {
        f.dotc(&(&self.matrix * f)).re
    }

    /// Compression V* A V to the span of orthonormal columns.
    pub fn restrict(&self, basis: &CMat) -> Result<CarCorrelation> {
        if basis.nrows() != self.dim() || basis.ncols() == 0 || basis.ncols() > self.dim() {
            return Err(QfeError::InvalidArgument(format!(
                "basis shape {}×{} incompatible with dimension {}",
                basis.nrows(),
                basis.ncols(),
                self.dim()
            )));
        }
        let gram = basis.adjoint() * basis - CMat::identity(basis.ncols(), basis.ncols());
        let defect = max_abs(&gram);
        if defect > 1e-10 {
            return Err(QfeError::InvalidArgument(format!(
                "basis columns not orthonormal: Gram defect {defect:.3e}"
            )));
        }
        CarCorrelation::new(basis.adjoint() * &self.matrix * basis)
    }

    /// One-particle modular flow f ↦ B^{it} f with B = A/(1−A).
    ///
    /// Requires the spectrum to stay clear of {0, 1}: eigenvalues inside the
    /// 1e−12 clamp margin make B^{it} discontinuous and are rejected.
    pub fn modular_flow(&self, f: &CVec, t: f64) -> Result<CVec> {
        if f.len() != self.dim() {
            return Err(QfeError::InvalidArgument(format!(
                "vector length {} does not match dimension {}",
                f.len(),
                self.dim()
            )));
        }
        for &l in &self.eig.values {
            if !(CLAMP..=1.0 - CLAMP).contains(&l) {
                return Err(QfeError::SingularModularFlow(format!(
                    "eigenvalue {l} at the boundary of (0, 1)"
                )));
            }
        }
        let b_it = self.eig.map(|l| {
            let phase = t * (l / (1.0 - l)).ln();
            C64::new(phase.cos(), phase.sin())
        });
        Ok(b_it * f)
    }

    /// Quasi-free density operator on the 2^d Jordan–Wigner representation:
    /// ρ ∝ exp(Σ_{jk} (log B)_{jk} a*_j a_k) with B = A(1−A)^{−1}, normalized
    /// by trace. Eigenvalues of A are clamped to [1e−12, 1−1e−12] first.
    pub fn quasifree_density(&self) -> Result<DensityMatrix> {
        let rep = FermionRep::new(self.dim())?;
        let log_b = self.eig.map_real(|l| {
            let l = l.clamp(CLAMP, 1.0 - CLAMP);
            (l / (1.0 - l)).ln()
        });
        let h = rep.quadratic_form(&log_b);
        density_from_quadratic(&h)
    }
}

/// exp(H)/Tr exp(H) for Hermitian H, via eigendecomposition with a max-shift.
pub(crate) fn density_from_quadratic(h: &CMat) -> Result<DensityMatrix> {
    let eig = hermitian_eig(h);
    let top = eig.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = eig.values.iter().map(|&e| (e - top).exp()).collect();
    let z: f64 = weights.iter().sum();
    let rho = eig.map_real(|e| ((e - top).exp()) / z);
    DensityMatrix::new(rho)
}

/// Jordan–Wigner matrices for `d` fermion modes on a 2^d space. The vacuum
/// is basis index 0 and mode 0 carries the leftmost Kronecker factor.
#[derive(Debug, Clone)]
pub struct FermionRep {
    d: usize,
    annihilators: Vec<CMat>,
}

impl FermionRep {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(QfeError::InvalidArgument(
                "mode count must be positive".into(),
            ));
        }
        if d > 12 || (1usize << d) > max_dense_dim() {
            return Err(QfeError::ResourceLimit(format!(
                "2^{d} exceeds the dense-dimension guard ({} / QFE_MAX_DIM)",
                max_dense_dim()
            )));
        }
        let lower = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let z = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-1.0, 0.0),
            ],
        );
        let mut annihilators = Vec::with_capacity(d);
        let mut string = CMat::identity(1, 1);
        for j in 0..d {
            let right = CMat::identity(1 << (d - 1 - j), 1 << (d - 1 - j));
            annihilators.push(string.kronecker(&lower).kronecker(&right));
            string = string.kronecker(&z);
        }
        Ok(FermionRep { d, annihilators })
    }

    pub fn mode_count(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        1 << self.d
    }

    /// a_j.
    pub fn annihilator(&self, j: usize) -> &CMat {
        &self.annihilators[j]
    }

    /// a*_j.
    pub fn creator(&self, j: usize) -> CMat {
        self.annihilators[j].adjoint()
    }

    /// a(f) = Σ_j conj(f_j) a_j (antilinear in f).
    pub fn annihilator_for(&self, f: &CVec) -> CMat {
        let dim = self.dim();
        let mut out = CMat::zeros(dim, dim);
        for j in 0..self.d {
            out += &self.annihilators[j] * f[j].conj();
        }
        out
    }

    /// a*(f) = Σ_j f_j a*_j (linear in f).
    pub fn creator_for(&self, f: &CVec) -> CMat {
        self.annihilator_for(f).adjoint()
    }

    /// Σ_{jk} K_{jk} a*_j a_k for a d×d coefficient matrix K.
    pub fn quadratic_form(&self, k: &CMat) -> CMat {
        let dim = self.dim();
        let mut out = CMat::zeros(dim, dim);
        for j in 0..self.d {
            let mut combo = CMat::zeros(dim, dim);
            for l in 0..self.d {
                let coeff = k[(j, l)];
                if coeff.norm() > 0.0 {
                    combo += &self.annihilators[l] * coeff;
                }
            }
            out += self.annihilators[j].adjoint() * combo;
        }
        out
    }

    /// One-mode matrix units for a unit vector f:
    /// e11 = a(f)a*(f), e12 = a(f), e21 = a*(f), e22 = a*(f)a(f).
    pub fn matrix_units(&self, f: &CVec) -> Result<CarMatrixUnits> {
        if f.len() != self.d {
            return Err(QfeError::InvalidArgument(format!(
                "vector length {} does not match mode count {}",
                f.len(),
                self.d
            )));
        }
        if (f.norm() - 1.0).abs() > 1e-12 {
            return Err(QfeError::InvalidArgument(format!(
                "f must be a unit vector; ‖f‖ = {}",
                f.norm()
            )));
        }
        let a = self.annihilator_for(f);
        let a_star = a.adjoint();
        Ok(CarMatrixUnits {
            e11: &a * &a_star,
            e22: &a_star * &a,
            e12: a,
            e21: a_star,
        })
    }
}

/// The 2×2 system of matrix units generated by a single fermion mode.
#[derive(Debug, Clone)]
pub struct CarMatrixUnits {
    pub e11: CMat,
    pub e12: CMat,
    pub e21: CMat,
    pub e22: CMat,
}
