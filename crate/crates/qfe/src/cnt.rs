//! Finite-dimensional dynamical-entropy ingredients: Umegaki relative
//! entropy, the positive functional x ↦ φ(·σ_{−i/2}(x)) realized as
//! ρ^{1/2} x ρ^{1/2}, the partition mutual-entropy functional evaluated at a
//! given partition of unity, the word-entropy term over commuting
//! projections, and the classical near-independence defect.

use crate::density::DensityMatrix;
use crate::error::{QfeError, Result};
use crate::kernel::eta;
use crate::linalg::{hermitian_eig, hermiticity_defect, max_abs, CMat, HermitianEigen, C64};
use nalgebra::DMatrix;

const FAITHFUL_CLAMP: f64 = 1e-12;

/// A normal state on a matrix algebra, with the spectral data needed for
/// modular-style constructions cached. Densities are clamped to be faithful
/// (eigenvalues floored at 1e−12) before any logarithm is taken.
#[derive(Debug, Clone)]
pub struct MatrixState {
    density: DensityMatrix,
    eig: HermitianEigen,
}

impl MatrixState {
    pub fn new(density: DensityMatrix) -> Self {
        let eig = hermitian_eig(density.matrix());
        MatrixState { density, eig }
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    /// φ(x) = Tr(ρ x).
    pub fn expectation(&self, x: &CMat) -> C64 {
        self.density.expectation(x)
    }

    /// ρ^{1/2}.
    pub fn sqrt(&self) -> CMat {
        self.eig.map_real(|l| l.max(0.0).sqrt())
    }

    /// log ρ with eigenvalues floored at the faithfulness clamp.
    pub fn log_clamped(&self) -> CMat {
        self.eig.map_real(|l| l.max(FAITHFUL_CLAMP).ln())
    }

    /// Columns of the eigenbasis where ρ falls below the faithfulness clamp.
    fn kernel_columns(&self) -> Vec<usize> {
        self.eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l < FAITHFUL_CLAMP)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Umegaki relative entropy S(φ, ψ) = Tr[D_ψ (log D_ψ − log D_φ)], with the
/// state φ as the reference and the (possibly subnormalized) positive
/// functional ψ inside the trace. ψ must be supported where φ is: mass on
/// the ε-kernel of φ beyond 1e−8 is rejected.
pub fn relative_entropy(reference: &MatrixState, functional: &CMat) -> Result<f64> {
    let d = reference.dim();
    if functional.nrows() != d || functional.ncols() != d {
        return Err(QfeError::InvalidArgument(format!(
            "functional is {}×{}, state dimension is {d}",
            functional.nrows(),
            functional.ncols()
        )));
    }
    if hermiticity_defect(functional) > 1e-10 {
        return Err(QfeError::InvalidArgument(
            "functional density not Hermitian".into(),
        ));
    }
    let psi = hermitian_eig(functional);
    if let Some(&min) = psi.values.first() {
        if min < -1e-10 {
            return Err(QfeError::InvalidArgument(format!(
                "functional density not positive: min eigenvalue {min:.3e}"
            )));
        }
    }
    let kernel_cols = reference.kernel_columns();
    if !kernel_cols.is_empty() {
        let mut mass = 0.0;
        for &c in &kernel_cols {
            let v = reference.eig.vectors.column(c);
            mass += v.dotc(&(functional * v)).re;
        }
        if mass > 1e-8 {
            return Err(QfeError::UndefinedRelativeEntropy(format!(
                "functional carries mass {mass:.3e} on the kernel of the reference state"
            )));
        }
    }
    // Tr D_ψ log D_ψ = Σ μ log μ over the support of ψ
    let own: f64 = psi.values.iter().map(|&m| -eta(m)).sum();
    let cross = (functional * reference.log_clamped()).trace().re;
    Ok(own - cross)
}

/// The positive functional φ(·σ_{−i/2}(x)) represented by its density
/// ρ^{1/2} x ρ^{1/2}. For x ≥ 0 this is positive with total mass φ(x); the
/// operator σ_{−i/2}(x) itself is never formed.
pub fn sigma_half_functional(state: &MatrixState, x: &CMat) -> Result<CMat> {
    let d = state.dim();
    if x.nrows() != d || x.ncols() != d {
        return Err(QfeError::InvalidArgument(format!(
            "x is {}×{}, state dimension is {d}",
            x.nrows(),
            x.ncols()
        )));
    }
    let s = state.sqrt();
    Ok(&s * x * &s)
}

/// A finite family of positive matrices summing to the identity, optionally
/// indexed by a multi-index shape (one axis per channel).
#[derive(Debug, Clone)]
pub struct PartitionFamily {
    elements: Vec<CMat>,
    shape: Vec<usize>,
}

impl PartitionFamily {
    /// Flat partition (single axis).
    pub fn new(elements: Vec<CMat>) -> Result<Self> {
        let len = elements.len();
        Self::with_shape(elements, vec![len])
    }

    /// Multi-indexed partition, elements in row-major order over `shape`.
    pub fn with_shape(elements: Vec<CMat>, shape: Vec<usize>) -> Result<Self> {
        if elements.is_empty() || shape.iter().product::<usize>() != elements.len() {
            return Err(QfeError::InvalidArgument(format!(
                "{} elements do not fill shape {shape:?}",
                elements.len()
            )));
        }
        let d = elements[0].nrows();
        let mut sum = CMat::zeros(d, d);
        for (i, x) in elements.iter().enumerate() {
            if x.nrows() != d || x.ncols() != d {
                return Err(QfeError::InvalidArgument(format!(
                    "elements[{i}] has mismatched dimension"
                )));
            }
            if hermiticity_defect(x) > 1e-10 {
                return Err(QfeError::InvalidArgument(format!(
                    "elements[{i}] is not Hermitian"
                )));
            }
            let eig = hermitian_eig(x);
            if let Some(&min) = eig.values.first() {
                if min < -1e-10 {
                    return Err(QfeError::InvalidArgument(format!(
                        "elements[{i}] is not positive semidefinite: min eigenvalue {min:.3e}"
                    )));
                }
            }
            sum += x;
        }
        let defect = max_abs(&(sum - CMat::identity(d, d)));
        if defect > 1e-10 {
            return Err(QfeError::InvalidArgument(format!(
                "partition does not sum to the identity: defect {defect:.3e}"
            )));
        }
        Ok(PartitionFamily { elements, shape })
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for axis in (0..self.shape.len()).rev() {
            idx[axis] = flat % self.shape[axis];
            flat /= self.shape[axis];
        }
        idx
    }

    /// Marginal x^{(k)}_i = Σ over all elements whose k-th index is i.
    pub fn marginal(&self, axis: usize, index: usize) -> CMat {
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for (flat, x) in self.elements.iter().enumerate() {
            if self.multi_index(flat)[axis] == index {
                out += x;
            }
        }
        out
    }
}

/// A channel into the ambient matrix algebra: the data of a unital
/// completely positive map from a finite-dimensional algebra, described by
/// the images of its generators.
#[derive(Debug, Clone)]
pub enum Channel {
    /// Embedding of the abelian algebra C^n: images of the minimal
    /// idempotents (a positive decomposition of the identity).
    Abelian { idempotent_images: Vec<CMat> },
    /// Embedding of a full matrix algebra Mat_d: images of the matrix units
    /// e_{lm}, row-major (`images[l*dim + m] = γ(e_{lm})`).
    MatrixAlgebra { dim: usize, unit_images: Vec<CMat> },
}

impl Channel {
    fn validate(&self, ambient: usize) -> Result<()> {
        match self {
            Channel::Abelian { idempotent_images } => {
                if idempotent_images.is_empty() {
                    return Err(QfeError::InvalidArgument("empty abelian channel".into()));
                }
                let mut sum = CMat::zeros(ambient, ambient);
                for (i, q) in idempotent_images.iter().enumerate() {
                    if q.nrows() != ambient || q.ncols() != ambient {
                        return Err(QfeError::InvalidArgument(format!(
                            "channel image {i} has wrong dimension"
                        )));
                    }
                    sum += q;
                }
                if max_abs(&(sum - CMat::identity(ambient, ambient))) > 1e-10 {
                    return Err(QfeError::InvalidArgument(
                        "abelian channel images do not sum to the identity".into(),
                    ));
                }
                Ok(())
            }
            Channel::MatrixAlgebra { dim, unit_images } => {
                if *dim == 0 || unit_images.len() != dim * dim {
                    return Err(QfeError::InvalidArgument(format!(
                        "matrix-algebra channel needs dim² images, got {}",
                        unit_images.len()
                    )));
                }
                let mut sum = CMat::zeros(ambient, ambient);
                for l in 0..*dim {
                    sum += &unit_images[l * dim + l];
                }
                if max_abs(&(sum - CMat::identity(ambient, ambient))) > 1e-10 {
                    return Err(QfeError::InvalidArgument(
                        "matrix-unit images are not unital".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Density of the pulled-back functional ψ∘γ on the channel's domain.
    /// For a functional with density D: (ψ∘γ)(e_{lm}) = Tr(D γ(e_{lm})),
    /// so the pullback density has entry (m, l) equal to that trace.
    fn pullback(&self, functional: &CMat) -> CMat {
        match self {
            Channel::Abelian { idempotent_images } => {
                let n = idempotent_images.len();
                let mut out = CMat::zeros(n, n);
                for (i, q) in idempotent_images.iter().enumerate() {
                    out[(i, i)] = C64::new((functional * q).trace().re, 0.0);
                }
                out
            }
            Channel::MatrixAlgebra { dim, unit_images } => {
                let mut out = CMat::zeros(*dim, *dim);
                for l in 0..*dim {
                    for m in 0..*dim {
                        out[(m, l)] = (functional * &unit_images[l * dim + m]).trace();
                    }
                }
                // pullback of a positive functional through a CP map is
                // positive; symmetrize away the trace roundoff
                crate::linalg::hermitize(&out)
            }
        }
    }
}

/// The partition mutual-entropy functional evaluated at a GIVEN partition of
/// unity (a lower bound on the channel mutual entropy, which is a supremum
/// over such partitions):
///
/// Σ_I η(φ(x_I)) + Σ_k Σ_{i} S(φ∘γ_k, φ(·σ_{−i/2}(x^{(k)}_i))∘γ_k).
pub fn mutual_entropy_value(
    state: &MatrixState,
    channels: &[Channel],
    partition: &PartitionFamily,
) -> Result<f64> {
    if channels.is_empty() {
        return Err(QfeError::InvalidArgument("no channels given".into()));
    }
    if partition.shape().len() != channels.len() {
        return Err(QfeError::InvalidArgument(format!(
            "partition is indexed by {} axes but {} channels were given",
            partition.shape().len(),
            channels.len()
        )));
    }
    if partition.dim() != state.dim() {
        return Err(QfeError::InvalidArgument(
            "partition dimension does not match the state".into(),
        ));
    }
    for ch in channels {
        ch.validate(state.dim())?;
    }
    let mut value = 0.0;
    for x in partition.elements() {
        value += eta(state.expectation(x).re);
    }
    for (k, channel) in channels.iter().enumerate() {
        let rho_pull = channel.pullback(state.density().matrix());
        let reference = MatrixState::new(DensityMatrix::new(rho_pull)?);
        for i in 0..partition.shape()[k] {
            let marginal = partition.marginal(k, i);
            let functional = sigma_half_functional(state, &marginal)?;
            let pulled = channel.pullback(&functional);
            value += relative_entropy(&reference, &pulled)?;
        }
    }
    Ok(value)
}

/// Normalized η-sum of word probabilities over a commuting partition:
/// (1/k) Σ_{i_0…i_{k−1}} η(φ(p_{i_0} α(p_{i_1}) ⋯ α^{k−1}(p_{i_{k−1}}))),
/// with α the conjugation by the given unitary.
///
/// Restricted to commuting families: for noncommuting words the values need
/// not be real and the η-sum loses meaning, so commutation of all iterated
/// projections is enforced to 1e−8.
pub fn word_entropy_term(
    state: &MatrixState,
    partition: &PartitionFamily,
    alpha: &CMat,
    steps: usize,
) -> Result<f64> {
    let d = state.dim();
    if steps == 0 {
        return Err(QfeError::InvalidArgument("steps must be ≥ 1".into()));
    }
    if alpha.nrows() != d || alpha.ncols() != d {
        return Err(QfeError::InvalidArgument(
            "automorphism unitary has wrong dimension".into(),
        ));
    }
    if max_abs(&(alpha.adjoint() * alpha - CMat::identity(d, d))) > 1e-10 {
        return Err(QfeError::InvalidArgument(
            "automorphism matrix is not unitary".into(),
        ));
    }
    if partition.dim() != d {
        return Err(QfeError::InvalidArgument(
            "partition dimension does not match the state".into(),
        ));
    }
    for (i, p) in partition.elements().iter().enumerate() {
        if max_abs(&(p * p - p)) > 1e-8 {
            return Err(QfeError::InvalidArgument(format!(
                "partition element {i} is not a projection"
            )));
        }
    }
    let n = partition.elements().len();
    let words_total = (n as f64).powi(steps as i32);
    if words_total > 1e6 {
        return Err(QfeError::ResourceLimit(format!(
            "{n}^{steps} words exceed the enumeration budget"
        )));
    }
    // iterates[t][i] = α^t(p_i)
    let mut iterates: Vec<Vec<CMat>> = vec![partition.elements().to_vec()];
    for t in 1..steps {
        let prev = &iterates[t - 1];
        let next: Vec<CMat> = prev.iter().map(|p| alpha * p * alpha.adjoint()).collect();
        iterates.push(next);
    }
    let flat: Vec<&CMat> = iterates.iter().flatten().collect();
    for a in 0..flat.len() {
        for b in (a + 1)..flat.len() {
            let comm = flat[a] * flat[b] - flat[b] * flat[a];
            let defect = max_abs(&comm);
            if defect > 1e-8 {
                return Err(QfeError::NoncommutingPartition(format!(
                    "iterated projections fail to commute: defect {defect:.3e}"
                )));
            }
        }
    }
    // depth-first enumeration with prefix products
    let mut total = 0.0;
    let mut prob_sum = 0.0;
    let mut stack: Vec<(usize, CMat)> = vec![(0, CMat::identity(d, d))];
    while let Some((depth, prefix)) = stack.pop() {
        if depth == steps {
            let p = state.expectation(&prefix).re;
            total += eta(p.max(0.0));
            prob_sum += p;
            continue;
        }
        for p in &iterates[depth] {
            stack.push((depth + 1, &prefix * p));
        }
    }
    if (prob_sum - 1.0).abs() > 1e-8 {
        return Err(QfeError::Numeric(format!(
            "word probabilities sum to {prob_sum}, expected 1"
        )));
    }
    Ok(total / steps as f64)
}

/// Verdict of a near-independence check on a classical joint distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndependenceClass {
    /// Dependence within δ and entropy defect within ε.
    Holds,
    /// The dependence exceeds δ: the hypothesis does not apply.
    DependenceExceedsDelta,
    /// Dependence within δ, yet defect beyond ε: the chosen δ admits too
    /// much dependence for this ε.
    DeltaTooLargeForEpsilon,
}

/// Near-independence defect report for a joint distribution p(i, j).
#[derive(Debug, Clone)]
pub struct NearIndependenceReport {
    /// max_{i,j} |p(i,j) − p(i·)p(·j)|.
    pub max_dependence: f64,
    /// Σ_i η(p(i·)) + Σ_j η(p(·j)) − Σ_{ij} η(p(i,j)) — the mutual
    /// information of the pair, always ≥ 0.
    pub defect: f64,
    pub within_delta: bool,
    pub inequality_holds: bool,
    pub classification: IndependenceClass,
}

/// Checks that near-independent marginals force near-additive entropies:
/// if |p(i,j) − p(i·)p(·j)| ≤ δ for all (i, j), then
/// Σ η(p(i,j)) ≥ Σ η(p(i·)) + Σ η(p(·j)) − ε. Reports the actual defect.
pub fn near_independence_check(
    joint: &DMatrix<f64>,
    delta: f64,
    epsilon: f64,
) -> Result<NearIndependenceReport> {
    if joint.is_empty() {
        return Err(QfeError::InvalidArgument("empty distribution".into()));
    }
    let mut total = 0.0;
    for &p in joint.iter() {
        if !p.is_finite() || p < -1e-12 {
            return Err(QfeError::InvalidArgument(format!(
                "entry {p} is not a probability"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(QfeError::InvalidArgument(format!(
            "distribution sums to {total}, expected 1"
        )));
    }
    let rows: Vec<f64> = (0..joint.nrows()).map(|i| joint.row(i).sum()).collect();
    let cols: Vec<f64> = (0..joint.ncols()).map(|j| joint.column(j).sum()).collect();
    let mut max_dependence = 0.0f64;
    let mut joint_entropy = 0.0;
    for i in 0..joint.nrows() {
        for j in 0..joint.ncols() {
            max_dependence = max_dependence.max((joint[(i, j)] - rows[i] * cols[j]).abs());
            joint_entropy += eta(joint[(i, j)].max(0.0));
        }
    }
    let marginal_entropy: f64 =
        rows.iter().map(|&p| eta(p)).sum::<f64>() + cols.iter().map(|&p| eta(p)).sum::<f64>();
    let defect = marginal_entropy - joint_entropy;
    let within_delta = max_dependence <= delta;
    let inequality_holds = defect <= epsilon;
    let classification = match (within_delta, inequality_holds) {
        (true, true) => IndependenceClass::Holds,
        (false, _) => IndependenceClass::DependenceExceedsDelta,
        (true, false) => IndependenceClass::DeltaTooLargeForEpsilon,
    };
    Ok(NearIndependenceReport {
        max_dependence,
        defect,
        within_delta,
        inequality_holds,
        classification,
    })
}

/// Random joint distribution p ⊗ q + u vᵀ with zero-sum u and v, so the
/// marginals stay exactly p and q while every entry is perturbed by at most
/// delta/2. Used by the verification suite and the acceptance tests.
pub fn random_near_independent(rng: &mut impl rand::Rng, n: usize, delta: f64) -> DMatrix<f64> {
    let raw_p: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.0)).collect();
    let raw_q: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.0)).collect();
    let sp: f64 = raw_p.iter().sum();
    let sq: f64 = raw_q.iter().sum();
    let p: Vec<f64> = raw_p.iter().map(|x| x / sp).collect();
    let q: Vec<f64> = raw_q.iter().map(|x| x / sq).collect();
    fn zero_sum(rng: &mut impl rand::Rng, n: usize, bound: f64) -> Vec<f64> {
        if bound <= 0.0 {
            return vec![0.0; n];
        }
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-bound..bound)).collect();
        let mean: f64 = v.iter().sum::<f64>() / n as f64;
        for x in &mut v {
            *x -= mean;
        }
        v
    }
    let bound = (delta / 2.0).sqrt() / 2.0;
    let u = zero_sum(rng, n, bound);
    let v = zero_sum(rng, n, bound);
    DMatrix::from_fn(n, n, |i, j| (p[i] * q[j] + u[i] * v[j]).max(0.0))
}
