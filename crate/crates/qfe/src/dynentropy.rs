//! Entropy rates of Bogoliubov dynamics: the spectral-integral formula over
//! direct-integral data, its multiplication-operator form, and the empirical
//! rate through block-Toeplitz restrictions of the state to finitely many
//! dynamical translates, plus the cell-averaging limit used to compare
//! coarse-grained spectra with fiberwise integrals.

use crate::car::CarCorrelation;
use crate::ccr::CcrCorrelation;
use crate::error::{QfeError, Result};
use crate::kernel::{ecar_clamped, eccr_clamped};
use crate::linalg::{CMat, C64};
use crate::max_dense_dim;
use crate::spectra::{DirectIntegralModel, FiberGrid, MultiplicationModel};
use crate::Algebra;
use rayon::prelude::*;
use std::f64::consts::TAU;

pub use crate::kernel::eta;

/// Fermionic entropy integrand η(λ) + η(1−λ). Inputs may stray from [0, 1]
/// by at most 1e−12.
pub fn ecar(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || !(-1e-12..=1.0 + 1e-12).contains(&lambda) {
        return Err(QfeError::InvalidArgument(format!(
            "ecar argument {lambda} outside [0, 1]"
        )));
    }
    Ok(ecar_clamped(lambda))
}

/// Bosonic entropy integrand η(λ) − η(1+λ). Inputs may dip below 0 by at
/// most 1e−12.
pub fn eccr(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda < -1e-12 {
        return Err(QfeError::InvalidArgument(format!(
            "eccr argument {lambda} must be ≥ 0"
        )));
    }
    Ok(eccr_clamped(lambda))
}

fn kernel_for(algebra: Algebra) -> fn(f64) -> f64 {
    match algebra {
        Algebra::Car => ecar_clamped,
        Algebra::Ccr => eccr_clamped,
    }
}

/// Entropy rate from direct-integral spectral data:
/// h = ∫_T Σ_b E(λ_b(z)) dλ(z), with E the per-algebra kernel. The singular
/// spectral part contributes zero; an empty grid yields zero.
pub fn spectral_entropy_rate(model: &DirectIntegralModel) -> f64 {
    let kernel = kernel_for(model.algebra());
    let mut total = 0.0;
    for (j, &w) in model.grid().weights().iter().enumerate() {
        let fiber_sum: f64 = model.fiber_eigenvalues(j).iter().map(|&l| kernel(l)).sum();
        total += w * fiber_sum;
    }
    total
}

/// Entropy rate of a multiplication-operator model:
/// h = (1/2π) ∫_I E(ρ(x)) |ω′(x)| dx by per-interval midpoint quadrature.
pub fn multiplication_entropy_rate(model: &MultiplicationModel) -> f64 {
    let kernel = kernel_for(model.algebra());
    let mut total = 0.0;
    for iv in model.intervals() {
        let w = iv.weight();
        let mut acc = 0.0;
        for (&op, &r) in iv.omega_prime().iter().zip(iv.rho().iter()) {
            acc += kernel(r) * op.abs();
        }
        total += w * acc;
    }
    total / TAU
}

/// Matrix-valued symbol z ↦ Â(θ) sampled on a uniform circle grid; the
/// generator of block-Toeplitz restrictions.
#[derive(Debug, Clone)]
pub struct SymbolFunction {
    model: DirectIntegralModel,
    m0: usize,
}

impl SymbolFunction {
    pub fn new(grid: FiberGrid, samples: Vec<CMat>, algebra: Algebra) -> Result<Self> {
        if samples.is_empty() {
            return Err(QfeError::InvalidModel(
                "a symbol needs at least one sample".into(),
            ));
        }
        let m0 = samples[0].nrows();
        if m0 == 0 {
            return Err(QfeError::InvalidModel(
                "symbol multiplicity must be positive".into(),
            ));
        }
        if let Some(j) = samples.iter().position(|s| s.nrows() != m0) {
            return Err(QfeError::InvalidModel(format!(
                "samples[{j}] has dimension {} but the symbol is {m0}×{m0}",
                samples[j].nrows()
            )));
        }
        let model = DirectIntegralModel::new(grid, samples, algebra)?;
        Ok(SymbolFunction { model, m0 })
    }

    /// Scalar symbol from real samples.
    pub fn scalar(grid: FiberGrid, samples: &[f64], algebra: Algebra) -> Result<Self> {
        let mats = samples
            .iter()
            .map(|&x| CMat::from_element(1, 1, C64::new(x, 0.0)))
            .collect();
        Self::new(grid, mats, algebra)
    }

    pub fn multiplicity(&self) -> usize {
        self.m0
    }

    pub fn algebra(&self) -> Algebra {
        self.model.algebra()
    }

    pub fn grid(&self) -> &FiberGrid {
        self.model.grid()
    }

    pub fn samples(&self) -> &[CMat] {
        self.model.fibers()
    }

    /// The symbol viewed as direct-integral data (same grid and fibers).
    pub fn as_model(&self) -> &DirectIntegralModel {
        &self.model
    }
}

/// Fourier coefficient blocks ĉ_p = Σ_j w_j (Â(θ_j) − Â̄) e^{−ipθ_j} for
/// p = 0..n−1, with the node mean Â̄ carried entirely by ĉ_0. On the uniform
/// grid the oscillatory kernel sums vanish identically, so constant symbols
/// produce exactly diagonal restrictions.
fn fourier_blocks(symbol: &SymbolFunction, n: usize) -> Vec<CMat> {
    let grid = symbol.grid();
    let m0 = symbol.multiplicity();
    let mut mean = CMat::zeros(m0, m0);
    for (j, &w) in grid.weights().iter().enumerate() {
        mean += &symbol.samples()[j] * C64::new(w, 0.0);
    }
    let mut blocks = Vec::with_capacity(n);
    blocks.push(mean.clone());
    for p in 1..n {
        let mut block = CMat::zeros(m0, m0);
        for (j, (&w, &theta)) in grid.weights().iter().zip(grid.nodes().iter()).enumerate() {
            let phase = -(p as f64) * theta;
            let e = C64::new(phase.cos(), phase.sin()) * C64::new(w, 0.0);
            block += (&symbol.samples()[j] - &mean) * e;
        }
        blocks.push(block);
    }
    blocks
}

/// Correlation matrix of the state restricted to `n` consecutive dynamical
/// translates of the cyclic subspace: the (n·m0)×(n·m0) block-Toeplitz
/// matrix with blocks ĉ_{k−l}. Requires the uniform grid and the aliasing
/// guard n_nodes ≥ 4n.
pub fn toeplitz_restriction(symbol: &SymbolFunction, n: usize) -> Result<CMat> {
    if n == 0 {
        return Err(QfeError::InvalidArgument(
            "block count must be positive".into(),
        ));
    }
    if !symbol.grid().is_uniform() {
        return Err(QfeError::GridResolution(
            "Fourier blocks require the uniform midpoint grid".into(),
        ));
    }
    let n_nodes = symbol.grid().len();
    if n_nodes < 4 * n {
        return Err(QfeError::GridResolution(format!(
            "grid of {n_nodes} nodes is too coarse for {n} blocks (need ≥ {})",
            4 * n
        )));
    }
    let m0 = symbol.multiplicity();
    let blocks = fourier_blocks(symbol, n);
    let adjoints: Vec<CMat> = blocks.iter().map(|b| b.adjoint()).collect();
    let mut t = CMat::zeros(n * m0, n * m0);
    for l in 0..n {
        for k in 0..n {
            let block = if l >= k {
                &blocks[l - k]
            } else {
                &adjoints[k - l]
            };
            t.view_mut((l * m0, k * m0), (m0, m0)).copy_from(block);
        }
    }
    Ok(t)
}

/// Empirical rate ladder S_n/n with the spectral-integral reference value
/// and an Aitken Δ² extrapolation of the ladder.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub sizes: Vec<usize>,
    pub block_entropies: Vec<f64>,
    /// S_n/n, nats per step.
    pub rates: Vec<f64>,
    /// Spectral-integral value for the same symbol.
    pub formula_value: f64,
    /// Aitken Δ² of the rate ladder (falls back to the last rate when the
    /// ladder is too short or the differences degenerate).
    pub extrapolated_rate: f64,
}

/// Entropy of one block-Toeplitz restriction. Spectra may leak outside the
/// admissible range by quadrature error; tolerance 1e−8, failure beyond.
fn restriction_entropy(symbol: &SymbolFunction, n: usize) -> Result<f64> {
    let t = toeplitz_restriction(symbol, n)?;
    match symbol.algebra() {
        Algebra::Car => Ok(CarCorrelation::with_spectral_tolerance(t, 1e-8)?.entropy()),
        Algebra::Ccr => Ok(CcrCorrelation::with_spectral_tolerance(t, 1e-8)?.entropy()),
    }
}

/// Aitken Δ² acceleration from the last three terms.
pub fn aitken_extrapolate(seq: &[f64]) -> f64 {
    let n = seq.len();
    if n == 0 {
        return f64::NAN;
    }
    if n < 3 {
        return seq[n - 1];
    }
    let (x0, x1, x2) = (seq[n - 3], seq[n - 2], seq[n - 1]);
    let d2 = x2 - 2.0 * x1 + x0;
    if d2.abs() < 1e-300 {
        return x2;
    }
    x2 - (x2 - x1) * (x2 - x1) / d2
}

/// Rate study over an ascending ladder of block counts.
pub fn toeplitz_entropy_rates(symbol: &SymbolFunction, sizes: &[usize]) -> Result<RateReport> {
    if sizes.is_empty() {
        return Err(QfeError::InvalidArgument("empty size ladder".into()));
    }
    for w in sizes.windows(2) {
        if w[0] >= w[1] {
            return Err(QfeError::InvalidArgument(
                "sizes must be strictly ascending".into(),
            ));
        }
    }
    let m0 = symbol.multiplicity();
    let largest = *sizes.last().unwrap();
    if largest * m0 > max_dense_dim() {
        return Err(QfeError::ResourceLimit(format!(
            "restriction dimension {} exceeds the dense-dimension guard ({} / QFE_MAX_DIM)",
            largest * m0,
            max_dense_dim()
        )));
    }
    let block_entropies: Vec<f64> = sizes
        .par_iter()
        .map(|&n| restriction_entropy(symbol, n))
        .collect::<Result<_>>()?;
    let rates: Vec<f64> = sizes
        .iter()
        .zip(block_entropies.iter())
        .map(|(&n, &s)| s / n as f64)
        .collect();
    Ok(RateReport {
        sizes: sizes.to_vec(),
        block_entropies,
        formula_value: spectral_entropy_rate(symbol.as_model()),
        extrapolated_rate: aitken_extrapolate(&rates),
        rates,
    })
}

/// Comparison of the cell-averaged composition with its limit:
/// `averaged` = (1/n) Σ_k f(mean of g over cell k),
/// `limit`    = mean of f∘g over all samples.
#[derive(Debug, Clone, Copy)]
pub struct CellAverageComparison {
    pub averaged: f64,
    pub limit: f64,
}

/// Per-cell averaging of `g` (midpoint samples on a uniform grid over
/// [0, 1]) against `f` applied pointwise. The sample count must refine the
/// cell count.
pub fn cell_average_comparison(
    g: &[f64],
    f: impl Fn(f64) -> f64,
    n: usize,
) -> Result<CellAverageComparison> {
    if n == 0 {
        return Err(QfeError::InvalidArgument(
            "cell count must be positive".into(),
        ));
    }
    if g.is_empty() || !g.len().is_multiple_of(n) {
        return Err(QfeError::InvalidArgument(format!(
            "{} samples do not refine {n} cells",
            g.len()
        )));
    }
    if let Some(j) = g.iter().position(|x| !x.is_finite()) {
        return Err(QfeError::Numeric(format!("g[{j}] is not finite")));
    }
    let per_cell = g.len() / n;
    let mut averaged = 0.0;
    for cell in 0..n {
        let mean: f64 = g[cell * per_cell..(cell + 1) * per_cell]
            .iter()
            .sum::<f64>()
            / per_cell as f64;
        averaged += f(mean);
    }
    averaged /= n as f64;
    let limit = g.iter().map(|&x| f(x)).sum::<f64>() / g.len() as f64;
    Ok(CellAverageComparison { averaged, limit })
}

/// Per-bin counts of entropy-carrying eigenvalue branches across a
/// refinement ladder of models, and the verdict on their stability.
#[derive(Debug, Clone)]
pub struct FinitenessReport {
    pub bin_edges: Vec<f64>,
    /// counts[model][bin] = max over fibers of entropy-carrying eigenvalues
    /// falling in the bin.
    pub counts: Vec<Vec<usize>>,
    pub stable: bool,
    pub warning: Option<String>,
}

/// Flags spectral data whose per-bin branch counts keep growing under
/// refinement — finite entropy requires fiber spectra to be pure point, so
/// densely filling spectra are suspect. Eigenvalues whose entropy kernel
/// vanishes (λ ∈ {0, 1} for fermions, λ = 0 for bosons) contribute nothing
/// and are not counted.
pub fn finiteness_diagnostic(
    models: &[DirectIntegralModel],
    bin_edges: &[f64],
) -> Result<FinitenessReport> {
    if models.is_empty() {
        return Err(QfeError::InvalidArgument(
            "at least one model is required".into(),
        ));
    }
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QfeError::InvalidArgument(
            "bin edges must be ascending with at least two entries".into(),
        ));
    }
    let kernel = kernel_for(models[0].algebra());
    let n_bins = bin_edges.len() - 1;
    let mut counts = Vec::with_capacity(models.len());
    for (mi, model) in models.iter().enumerate() {
        let mut model_counts = vec![0usize; n_bins];
        for j in 0..model.grid().len() {
            let mut fiber_counts = vec![0usize; n_bins];
            for &l in model.fiber_eigenvalues(j) {
                if kernel(l) <= 1e-12 {
                    continue;
                }
                if l < bin_edges[0] || l > *bin_edges.last().unwrap() {
                    return Err(QfeError::InvalidArgument(format!(
                        "models[{mi}]: eigenvalue {l} outside the binned range"
                    )));
                }
                let bin = bin_edges[1..]
                    .iter()
                    .position(|&e| l <= e)
                    .unwrap_or(n_bins - 1);
                fiber_counts[bin] += 1;
            }
            for (b, &c) in fiber_counts.iter().enumerate() {
                model_counts[b] = model_counts[b].max(c);
            }
        }
        counts.push(model_counts);
    }
    let mut warning = None;
    for b in 0..n_bins {
        let series: Vec<usize> = counts.iter().map(|c| c[b]).collect();
        let nondecreasing = series.windows(2).all(|w| w[0] <= w[1]);
        let grew = *series.last().unwrap() >= 2 * series[0].max(1);
        if models.len() > 1 && nondecreasing && grew {
            warning = Some(format!(
                "branch count in bin ({}, {}] grows under refinement ({} → {}) without stabilizing",
                bin_edges[b],
                bin_edges[b + 1],
                series[0],
                series.last().unwrap()
            ));
            break;
        }
    }
    Ok(FinitenessReport {
        bin_edges: bin_edges.to_vec(),
        counts,
        stable: warning.is_none(),
        warning,
    })
}
