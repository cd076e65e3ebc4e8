//! Bosonic machinery on truncated Fock spaces: geometric occupation law,
//! one-mode matrix units, Weyl operators, number-operator truncation and
//! quasi-free density operators.

use crate::density::DensityMatrix;
use crate::error::{QfeError, Result};
use crate::kernel::eccr_clamped;
use crate::linalg::{hermitian_eig, hermiticity_defect, max_abs, CMat, CVec, HermitianEigen, C64};
use crate::max_dense_dim;

const CLAMP: f64 = 1e-12;

/// Hermitian positive semidefinite correlation matrix of a gauge-invariant
/// quasi-free boson state.
#[derive(Debug, Clone)]
pub struct CcrCorrelation {
    matrix: CMat,
    eig: HermitianEigen,
}

impl CcrCorrelation {
    pub fn new(matrix: CMat) -> Result<Self> {
        Self::with_spectral_tolerance(matrix, 1e-10)
    }

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
            if l < -tol {
                return Err(QfeError::InvalidCorrelation(format!(
                    "eigenvalue {l} negative beyond tolerance {tol:.1e}"
                )));
            }
        }
        Ok(CcrCorrelation { matrix, eig })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    /// S(ω_A) = Tr[(1+A)log(1+A) − A log A] = Σ_i [η(λ_i) − η(1+λ_i)].
    pub fn entropy(&self) -> f64 {
        self.eig.values.iter().map(|&l| eccr_clamped(l)).sum()
    }

    /// λ = (Af, f).
    pub fn occupation(&self, f: &CVec) -> f64 {
        f.dotc(&(&self.matrix * f)).re
    }
}

/// Single-mode occupation probabilities p_k = λ^k/(1+λ)^{k+1}, k < cutoff,
/// together with the tail mass (λ/(1+λ))^cutoff.
#[derive(Debug, Clone)]
pub struct OccupationLaw {
    pub probs: Vec<f64>,
    pub tail: f64,
}

pub fn mode_occupation_probs(lambda: f64, cutoff: usize) -> Result<OccupationLaw> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(QfeError::InvalidArgument(format!(
            "occupation parameter {lambda} must be a nonnegative real"
        )));
    }
    if cutoff == 0 {
        return Err(QfeError::InvalidArgument("cutoff must be ≥ 1".into()));
    }
    let beta = lambda / (1.0 + lambda);
    let scale = 1.0 / (1.0 + lambda);
    let mut probs = Vec::with_capacity(cutoff);
    let mut pk = scale; // p_0
    for _ in 0..cutoff {
        probs.push(pk);
        pk *= beta;
    }
    let tail = beta.powi(cutoff as i32);
    Ok(OccupationLaw { probs, tail })
}

/// Truncated multimode Fock space with per-mode occupation `< cutoff`;
/// dimension cutoff^d. Mode 0 carries the leftmost Kronecker factor and the
/// vacuum is basis index 0.
#[derive(Debug, Clone)]
pub struct TruncatedFock {
    d: usize,
    cutoff: usize,
    annihilators: Vec<CMat>,
}

impl TruncatedFock {
    pub fn new(d: usize, cutoff: usize) -> Result<Self> {
        if d == 0 || cutoff == 0 {
            return Err(QfeError::InvalidArgument(
                "mode count and cutoff must be positive".into(),
            ));
        }
        let dim = (cutoff as f64).powi(d as i32);
        if dim > max_dense_dim() as f64 {
            return Err(QfeError::ResourceLimit(format!(
                "{cutoff}^{d} exceeds the dense-dimension guard ({} / QFE_MAX_DIM)",
                max_dense_dim()
            )));
        }
        let mut single = CMat::zeros(cutoff, cutoff);
        for k in 1..cutoff {
            single[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
        }
        let mut annihilators = Vec::with_capacity(d);
        for j in 0..d {
            let left = CMat::identity(cutoff.pow(j as u32), cutoff.pow(j as u32));
            let right = CMat::identity(
                cutoff.pow((d - 1 - j) as u32),
                cutoff.pow((d - 1 - j) as u32),
            );
            annihilators.push(left.kronecker(&single).kronecker(&right));
        }
        Ok(TruncatedFock {
            d,
            cutoff,
            annihilators,
        })
    }

    pub fn mode_count(&self) -> usize {
        self.d
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.d as u32)
    }

    /// Total occupation of basis state `index`.
    pub fn total_occupation(&self, index: usize) -> usize {
        let mut rest = index;
        let mut total = 0;
        for _ in 0..self.d {
            total += rest % self.cutoff;
            rest /= self.cutoff;
        }
        total
    }

    pub fn annihilator(&self, j: usize) -> &CMat {
        &self.annihilators[j]
    }

    pub fn creator(&self, j: usize) -> CMat {
        self.annihilators[j].adjoint()
    }

    /// a(f) = Σ_j conj(f_j) a_j.
    pub fn annihilator_for(&self, f: &CVec) -> CMat {
        let dim = self.dim();
        let mut out = CMat::zeros(dim, dim);
        for j in 0..self.d {
            out += &self.annihilators[j] * f[j].conj();
        }
        out
    }

    pub fn creator_for(&self, f: &CVec) -> CMat {
        self.annihilator_for(f).adjoint()
    }

    /// Σ_{jk} K_{jk} a*_j a_k.
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

    /// Total number operator N = Σ_j a*_j a_j, assembled exactly as the
    /// diagonal of occupation totals.
    pub fn number_operator(&self) -> CMat {
        let dim = self.dim();
        CMat::from_fn(dim, dim, |r, c| {
            if r == c {
                C64::new(self.total_occupation(r) as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Spectral projection of the number operator onto total occupation
    /// ≤ n − 1. Exactly idempotent and commutes with N exactly.
    pub fn truncation_projector(&self, n: usize) -> CMat {
        let dim = self.dim();
        CMat::from_fn(dim, dim, |r, c| {
            if r == c && self.total_occupation(r) < n {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Field operator Φ(f) = (a(f) + a*(f))/√2.
    pub fn field_operator(&self, f: &CVec) -> CMat {
        let a = self.annihilator_for(f);
        let a_star = a.adjoint();
        (a + a_star).map(|z| z / C64::new(2f64.sqrt(), 0.0))
    }

    /// Weyl operator W(f) = exp(iΦ(f)) on the truncation.
    pub fn weyl(&self, f: &CVec) -> Result<CMat> {
        if f.len() != self.d {
            return Err(QfeError::InvalidArgument(format!(
                "vector length {} does not match mode count {}",
                f.len(),
                self.d
            )));
        }
        let phi = self.field_operator(f);
        Ok(hermitian_eig(&phi).map(|x| C64::new(x.cos(), x.sin())))
    }

    /// Defect of the Weyl relation W(f)W(g) = e^{i Im(f,g)/2} W(f+g),
    /// measured as the largest entry of the difference compressed to total
    /// occupation < cutoff/2, where truncation artifacts are negligible.
    pub fn weyl_relation_defect(&self, f: &CVec, g: &CVec) -> Result<f64> {
        let wf = self.weyl(f)?;
        let wg = self.weyl(g)?;
        let sum = f + g;
        let wfg = self.weyl(&sum)?;
        // (f, g) linear in the first argument: Σ f_j conj(g_j)
        let im = f
            .iter()
            .zip(g.iter())
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            .im;
        let phase = C64::new((im / 2.0).cos(), (im / 2.0).sin());
        let diff = wf * wg - wfg * phase;
        let probe = self.truncation_projector(self.cutoff.div_ceil(2));
        Ok(max_abs(&(&probe * diff * &probe)))
    }

    /// One-mode matrix units e_{jk}(f): e_{kk} is the number eigenprojection
    /// at k and e_{k+n,k} = √(k!/(k+n)!) a*^n e_{kk}. Single-mode spaces
    /// only.
    pub fn matrix_units(&self, j: usize, k: usize) -> Result<CMat> {
        if self.d != 1 {
            return Err(QfeError::InvalidArgument(
                "matrix units are built on a single-mode Fock space".into(),
            ));
        }
        if j >= self.cutoff || k >= self.cutoff {
            return Err(QfeError::InvalidArgument(format!(
                "indices ({j}, {k}) beyond cutoff {}",
                self.cutoff
            )));
        }
        if j < k {
            return Ok(self.matrix_units(k, j)?.adjoint());
        }
        let dim = self.dim();
        let mut e_kk = CMat::zeros(dim, dim);
        e_kk[(k, k)] = C64::new(1.0, 0.0);
        let n = j - k;
        if n == 0 {
            return Ok(e_kk);
        }
        // √(k!/(k+n)!) via a log-sum to dodge factorial overflow
        let log_coeff: f64 = ((k + 1)..=(k + n)).map(|m| (m as f64).ln()).sum();
        let coeff = C64::new((-0.5 * log_coeff).exp(), 0.0);
        let a_star = self.creator(0);
        let mut out = e_kk;
        for _ in 0..n {
            out = &a_star * out;
        }
        Ok(out * coeff)
    }

    /// Second quantization Γ(V) of the one-particle unitary V = e^{iK},
    /// given its Hermitian generator K: Γ(V) = exp(i Σ_{jk} K_{jk} a*_j a_k).
    /// Exact on the untruncated occupation block.
    pub fn second_quantization(&self, generator: &CMat) -> Result<CMat> {
        if generator.nrows() != self.d || generator.ncols() != self.d {
            return Err(QfeError::InvalidArgument(format!(
                "generator must be {0}×{0}",
                self.d
            )));
        }
        if hermiticity_defect(generator) > 1e-10 {
            return Err(QfeError::InvalidArgument(
                "generator must be Hermitian".into(),
            ));
        }
        let h = self.quadratic_form(generator);
        Ok(hermitian_eig(&h).map(|x| C64::new(x.cos(), x.sin())))
    }
}

/// A quasi-free density operator on a truncated Fock space, with the
/// geometric tail mass cut off by the truncation.
#[derive(Debug, Clone)]
pub struct TruncatedDensity {
    pub density: DensityMatrix,
    /// (λ_max/(1+λ_max))^cutoff — the per-mode weight beyond the truncation.
    pub tail_mass: f64,
    /// Raised when the tail mass exceeds 1e−3 and the cutoff is too small
    /// for faithful moments.
    pub cutoff_warning: bool,
}

/// Quasi-free density Γ(B)/Tr Γ(B) with B = A(1+A)^{−1}, realized as
/// exp(Σ_{jk} (log B)_{jk} a*_j a_k) normalized on the truncation. For
/// diagonal A this reproduces the renormalized geometric occupation law
/// exactly; for rotated A it agrees with the second-quantized conjugation
/// up to tail-sized truncation terms.
pub fn quasifree_density(corr: &CcrCorrelation, cutoff: usize) -> Result<TruncatedDensity> {
    let fock = TruncatedFock::new(corr.dim(), cutoff)?;
    let log_b = {
        let eig = hermitian_eig(corr.matrix());
        eig.map_real(|l| {
            let l = l.max(CLAMP);
            (l / (1.0 + l)).ln()
        })
    };
    let h = fock.quadratic_form(&log_b);
    let density = crate::car::density_from_quadratic(&h)?;
    let lambda_max = corr
        .eigenvalues()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
        .max(0.0);
    let tail_mass = (lambda_max / (1.0 + lambda_max)).powi(cutoff as i32);
    Ok(TruncatedDensity {
        density,
        tail_mass,
        cutoff_warning: tail_mass > 1e-3,
    })
}

/// Exact |gap| bound for the entropy of the truncated, renormalized
/// geometric law against Σ_k η(p_k): covers the renormalization term, the
/// η-tail and the log-normalization, summed over modes.
pub fn entropy_tail_bound(lambdas: &[f64], cutoff: usize) -> f64 {
    lambdas
        .iter()
        .map(|&l| {
            if l <= 0.0 {
                return 0.0;
            }
            let beta = l / (1.0 + l);
            let t = beta.powi(cutoff as i32);
            if t == 0.0 {
                return 0.0;
            }
            let eccr = eccr_clamped(l);
            // Σ_{k≥N} k p_k = t (N + β/(1−β))
            let mean_tail = t * (cutoff as f64 + beta / (1.0 - beta));
            let eta_tail = -(1.0 - beta).ln() * t - beta.ln() * mean_tail;
            (t / (1.0 - t)) * eccr + eta_tail + (1.0 - t).ln().abs()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::eta;
    use crate::linalg::{kron, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cdiag(entries: &[f64]) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(
            entries.len(),
            entries.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    #[test]
    fn occupation_law_reference_values() {
        let law = mode_occupation_probs(1.0, 3).unwrap();
        assert!((law.probs[0] - 0.5).abs() < 1e-15);
        assert!((law.probs[1] - 0.25).abs() < 1e-15);
        assert!((law.probs[2] - 0.125).abs() < 1e-15);
        assert!((law.tail - 0.125).abs() < 1e-15);
        let total: f64 = law.probs.iter().sum::<f64>() + law.tail;
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn occupation_law_vacuum() {
        let law = mode_occupation_probs(0.0, 4).unwrap();
        assert_eq!(law.probs[0], 1.0);
        assert!(law.probs[1..].iter().all(|&p| p == 0.0));
        assert_eq!(law.tail, 0.0);
    }

    #[test]
    fn occupation_law_tail_decay() {
        let law = mode_occupation_probs(3.0, 200).unwrap();
        assert!(law.tail < 1e-24);
        let total: f64 = law.probs.iter().sum::<f64>() + law.tail;
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn occupation_law_rejects_negative() {
        assert!(matches!(
            mode_occupation_probs(-0.5, 4),
            Err(QfeError::InvalidArgument(_))
        ));
    }

    #[test]
    fn entropy_reference_values() {
        let corr = CcrCorrelation::new(cdiag(&[1.0])).unwrap();
        assert!((corr.entropy() - 2.0 * 2f64.ln()).abs() < 1e-12);
        let zero = CcrCorrelation::new(CMat::zeros(1, 1)).unwrap();
        assert_eq!(zero.entropy(), 0.0);
        let three = CcrCorrelation::new(cdiag(&[3.0])).unwrap();
        assert!((three.entropy() - (4.0 * 4f64.ln() - 3.0 * 3f64.ln())).abs() < 1e-12);
    }

    /// Shannon entropy of the geometric law with a deep cutoff matches the
    /// closed form.
    #[test]
    fn entropy_matches_geometric_shannon_oracle() {
        let lambda = 3.0;
        let law = mode_occupation_probs(lambda, 200).unwrap();
        let shannon: f64 = law.probs.iter().map(|&p| eta(p)).sum();
        let corr = CcrCorrelation::new(cdiag(&[lambda])).unwrap();
        assert!((corr.entropy() - shannon).abs() < 1e-10);
    }

    #[test]
    fn truncated_commutation_relation() {
        let fock = TruncatedFock::new(2, 4).unwrap();
        let dim = fock.dim();
        for i in 0..2 {
            for j in 0..2 {
                let comm =
                    fock.annihilator(i) * fock.creator(j) - fock.creator(j) * fock.annihilator(i);
                let expected = if i == j {
                    CMat::identity(dim, dim)
                } else {
                    CMat::zeros(dim, dim)
                };
                // exact on states with every mode occupation ≤ cutoff − 2
                for r in 0..dim {
                    for c in 0..dim {
                        let r_ok = (0..2).all(|m| (r / 4usize.pow(m)) % 4 <= 2);
                        let c_ok = (0..2).all(|m| (c / 4usize.pow(m)) % 4 <= 2);
                        if r_ok && c_ok {
                            assert!((comm[(r, c)] - expected[(r, c)]).norm() < 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_density_matches_renormalized_geometric_law() {
        let lambda = 1.0;
        let n = 16;
        let corr = CcrCorrelation::new(cdiag(&[lambda])).unwrap();
        let out = quasifree_density(&corr, n).unwrap();
        let law = mode_occupation_probs(lambda, n).unwrap();
        for k in 0..n {
            let want = law.probs[k] / (1.0 - law.tail);
            let got = out.density.matrix()[(k, k)].re;
            assert!((got - want).abs() < 1e-12, "k = {k}");
        }
        assert!(!out.cutoff_warning);
        assert!((out.tail_mass - 0.5f64.powi(16)).abs() < 1e-18);
    }

    #[test]
    fn vacuum_density() {
        let corr = CcrCorrelation::new(CMat::zeros(1, 1)).unwrap();
        let out = quasifree_density(&corr, 8).unwrap();
        let mut vac = CMat::zeros(8, 8);
        vac[(0, 0)] = C64::new(1.0, 0.0);
        assert!(max_abs(&(out.density.matrix() - vac)) < 1e-10);
    }

    #[test]
    fn product_structure_for_diagonal_two_modes() {
        let n = 8;
        let corr = CcrCorrelation::new(cdiag(&[0.5, 2.0])).unwrap();
        let joint = quasifree_density(&corr, n).unwrap();
        let rho1 = quasifree_density(&CcrCorrelation::new(cdiag(&[0.5])).unwrap(), n).unwrap();
        let rho2 = quasifree_density(&CcrCorrelation::new(cdiag(&[2.0])).unwrap(), n).unwrap();
        let product = kron(rho1.density.matrix(), rho2.density.matrix());
        assert!(max_abs(&(joint.density.matrix() - product)) < 1e-8);
    }

    #[test]
    fn density_moments_match_correlation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 24;
        let u = random_unitary(&mut rng, 2);
        let a = &u * cdiag(&[0.3, 0.8]) * u.adjoint();
        let corr = CcrCorrelation::new(a.clone()).unwrap();
        let out = quasifree_density(&corr, n).unwrap();
        let fock = TruncatedFock::new(2, n).unwrap();
        let tol = 1e-6f64.max(10.0 * n as f64 * out.tail_mass);
        for i in 0..2 {
            for j in 0..2 {
                let op = fock.creator(i) * fock.annihilator(j);
                let got = out.density.expectation(&op);
                let want = a[(j, i)];
                assert!((got - want).norm() < tol, "moment ({i},{j})");
            }
        }
    }

    #[test]
    fn density_cutoff_warning_fires() {
        let corr = CcrCorrelation::new(cdiag(&[3.0])).unwrap();
        let out = quasifree_density(&corr, 4).unwrap();
        assert!(out.cutoff_warning);
    }

    #[test]
    fn matrix_units_reference_structure() {
        let fock = TruncatedFock::new(1, 6).unwrap();
        let e00 = fock.matrix_units(0, 0).unwrap();
        let mut vac = CMat::zeros(6, 6);
        vac[(0, 0)] = C64::new(1.0, 0.0);
        assert!(max_abs(&(&e00 - &vac)) < 1e-15);
        // e_{jk} = |j⟩⟨k| on the untruncated block
        for j in 0..5 {
            for k in 0..5 {
                let e = fock.matrix_units(j, k).unwrap();
                let mut want = CMat::zeros(6, 6);
                want[(j, k)] = C64::new(1.0, 0.0);
                assert!(max_abs(&(&e - &want)) < 1e-12, "unit ({j},{k})");
            }
        }
    }

    #[test]
    fn matrix_unit_composition() {
        let fock = TruncatedFock::new(1, 4).unwrap();
        let e21 = fock.matrix_units(2, 1).unwrap();
        let e10 = fock.matrix_units(1, 0).unwrap();
        let e20 = fock.matrix_units(2, 0).unwrap();
        assert!(max_abs(&(&e21 * &e10 - &e20)) < 1e-14);
    }

    #[test]
    fn matrix_units_state_values_follow_geometric_law() {
        let lambda = 0.7;
        let n = 32;
        let corr = CcrCorrelation::new(cdiag(&[lambda])).unwrap();
        let out = quasifree_density(&corr, n).unwrap();
        let fock = TruncatedFock::new(1, n).unwrap();
        let law = mode_occupation_probs(lambda, n).unwrap();
        for k in 0..5 {
            let e_kk = fock.matrix_units(k, k).unwrap();
            let got = out.density.expectation(&e_kk).re;
            assert!((got - law.probs[k]).abs() < 10.0 * law.tail + 1e-12);
        }
        // off-diagonal units have zero expectation in a gauge-invariant state
        let e10 = fock.matrix_units(1, 0).unwrap();
        assert!(out.density.expectation(&e10).norm() < 1e-10);
    }

    #[test]
    fn matrix_units_reject_out_of_range() {
        let fock = TruncatedFock::new(1, 4).unwrap();
        assert!(fock.matrix_units(4, 0).is_err());
        let multi = TruncatedFock::new(2, 4).unwrap();
        assert!(multi.matrix_units(0, 0).is_err());
    }

    #[test]
    fn truncation_projector_ranks_and_gauge_invariance() {
        let fock = TruncatedFock::new(2, 4).unwrap();
        let p1 = fock.truncation_projector(1);
        assert_eq!(p1.map(|z| z.re).trace() as i64, 1); // vacuum only
        let p3 = fock.truncation_projector(3);
        assert_eq!(p3.map(|z| z.re).trace() as i64, 6); // k1+k2 ≤ 2
        assert!(max_abs(&(&p3 * &p3 - &p3)) < 1e-15);
        let n_op = fock.number_operator();
        assert!(max_abs(&(&p3 * &n_op - &n_op * &p3)) < 1e-15);
        // gauge rotation Γ(e^{iθ}) commutes with the projector exactly
        let theta = 0.73;
        let gen = cdiag(&[theta, theta]);
        let gauge = fock.second_quantization(&gen).unwrap();
        assert!(max_abs(&(&gauge * &p3 * gauge.adjoint() - &p3)) < 1e-12);
    }

    #[test]
    fn weyl_identity_at_zero() {
        let fock = TruncatedFock::new(1, 8).unwrap();
        let w = fock.weyl(&CVec::zeros(1)).unwrap();
        assert!(max_abs(&(&w - CMat::identity(8, 8))) < 1e-14);
    }

    #[test]
    fn weyl_expectation_matches_gaussian_formula() {
        let n = 32;
        let lambda = 1.0;
        let corr = CcrCorrelation::new(cdiag(&[lambda])).unwrap();
        let out = quasifree_density(&corr, n).unwrap();
        let fock = TruncatedFock::new(1, n).unwrap();
        for norm in [0.3, 0.7, 1.0] {
            let f = CVec::from_vec(vec![C64::new(norm, 0.0)]);
            let w = fock.weyl(&f).unwrap();
            let got = out.density.expectation(&w);
            let want = (-0.25 * norm * norm - 0.5 * lambda * norm * norm).exp();
            assert!(
                (got - C64::new(want, 0.0)).norm() < 1e-4,
                "‖f‖ = {norm}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn weyl_relation_defect_decays_with_cutoff() {
        let f = CVec::from_vec(vec![C64::new(0.5, 0.0)]);
        let g = CVec::from_vec(vec![C64::new(0.0, 0.5)]);
        let mut previous = f64::INFINITY;
        for n in [8, 16, 32] {
            let fock = TruncatedFock::new(1, n).unwrap();
            let defect = fock.weyl_relation_defect(&f, &g).unwrap();
            assert!(defect < previous, "defect grew at cutoff {n}");
            previous = defect;
        }
        assert!(previous <= 1e-6);
    }

    #[test]
    fn second_quantization_transforms_creators() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 12;
        let fock = TruncatedFock::new(2, n).unwrap();
        let k = crate::linalg::random_hermitian(&mut rng, 2, 0.8);
        let gamma = fock.second_quantization(&k).unwrap();
        let v = hermitian_eig(&k).map(|x| C64::new(x.cos(), x.sin()));
        // Γ(V) a*(f) Γ(V)* = a*(V f) on the untruncated block
        let f = crate::linalg::random_unit_vector(&mut rng, 2);
        let lhs = &gamma * fock.creator_for(&f) * gamma.adjoint();
        let rhs = fock.creator_for(&(&v * &f));
        let probe = fock.truncation_projector(n / 2);
        assert!(max_abs(&(&probe * (lhs - rhs) * &probe)) < 1e-9);
    }

    #[test]
    fn entropy_tail_bound_is_a_true_bound() {
        for lambda in [0.1, 0.5, 1.0, 3.0] {
            let corr = CcrCorrelation::new(cdiag(&[lambda])).unwrap();
            let exact = corr.entropy();
            for n in [4usize, 8, 16] {
                let truncated = quasifree_density(&corr, n).unwrap();
                let gap = (truncated.density.von_neumann_entropy() - exact).abs();
                let bound = entropy_tail_bound(&[lambda], n);
                assert!(
                    gap <= bound + 1e-12,
                    "λ = {lambda}, N = {n}: gap {gap:.3e} > bound {bound:.3e}"
                );
            }
        }
    }

    #[test]
    fn resource_guard_enforced() {
        assert!(matches!(
            TruncatedFock::new(4, 16),
            Err(QfeError::ResourceLimit(_))
        ));
    }
}
