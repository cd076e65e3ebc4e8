//! Dense complex-Hermitian linear algebra helpers shared across the crate.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Largest entry magnitude.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// ‖M − M*‖_max.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// (M + M*)/2.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending, columns
/// of `vectors` the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    /// V diag(f(λ)) V* for a complex-valued function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMat {
        let n = self.values.len();
        if n == 0 {
            return CMat::zeros(0, 0);
        }
        let d = CMat::from_diagonal(&CVec::from_iterator(n, self.values.iter().map(|&x| f(x))));
        &self.vectors * d * self.vectors.adjoint()
    }

    /// V diag(f(λ)) V* for a real-valued function of the eigenvalues.
    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> CMat {
        self.map(|x| C64::new(f(x), 0.0))
    }
}

/// Eigendecomposition of a (numerically) Hermitian matrix. The input is
/// symmetrized first, so roundoff-level asymmetry is tolerated; callers are
/// responsible for rejecting genuinely non-Hermitian input beforehand.
pub fn hermitian_eig(m: &CMat) -> HermitianEigen {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eig requires a square matrix");
    if n == 0 {
        return HermitianEigen {
            values: vec![],
            vectors: CMat::zeros(0, 0),
        };
    }
    if n == 1 {
        return HermitianEigen {
            values: vec![m[(0, 0)].re],
            vectors: CMat::identity(1, 1),
        };
    }
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEigen { values, vectors }
}

/// f(M) for Hermitian M, real-valued f.
pub fn hermitian_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    hermitian_eig(m).map_real(f)
}

/// Standard normal sample (Box–Muller).
pub fn gauss(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn random_ginibre(rng: &mut impl Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| C64::new(gauss(rng), gauss(rng)))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let qr = random_ginibre(rng, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// Random Hermitian matrix with the prescribed spectrum, U diag(s) U*.
pub fn random_hermitian_with_spectrum(rng: &mut impl Rng, spectrum: &[f64]) -> CMat {
    let n = spectrum.len();
    let u = random_unitary(rng, n);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        n,
        spectrum.iter().map(|&x| C64::new(x, 0.0)),
    ));
    &u * d * u.adjoint()
}

/// Random Hermitian matrix, entries O(scale).
pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> CMat {
    let g = random_ginibre(rng, n).map(|z| z * C64::new(scale * 0.5, 0.0));
    hermitize(&g)
}

/// Random unit vector.
pub fn random_unit_vector(rng: &mut impl Rng, n: usize) -> CVec {
    loop {
        let v = CVec::from_fn(n, |_, _| C64::new(gauss(rng), gauss(rng)));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / C64::new(norm, 0.0);
        }
    }
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}
