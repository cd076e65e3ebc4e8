//! Spectral data in direct-integral form: quadrature grids on the circle,
//! Hermitian fiber families, fiberwise diagonalization with eigenvector
//! branch matching, and multiplication-operator presentations.

use crate::error::{QfeError, Result};
use crate::linalg::{hermitian_eig, hermiticity_defect, CMat, C64};
use crate::Algebra;
use std::f64::consts::TAU;

/// Quadrature grid on the circle carrying normalized Lebesgue measure.
///
/// Nodes are angles in `[0, 2π)`, strictly increasing; weights are positive
/// and sum to 1 within 1e−12. The empty grid is the degenerate model with no
/// absolutely continuous spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl FiberGrid {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(QfeError::InvalidArgument(format!(
                "grid has {} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.is_empty() {
            return Ok(FiberGrid { nodes, weights });
        }
        for (j, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(QfeError::InvalidArgument(format!(
                    "weights[{j}] = {w} is not strictly positive"
                )));
            }
        }
        for (j, &t) in nodes.iter().enumerate() {
            if !t.is_finite() || !(0.0..TAU).contains(&t) {
                return Err(QfeError::InvalidArgument(format!(
                    "nodes[{j}] = {t} outside [0, 2π)"
                )));
            }
            if j > 0 && t <= nodes[j - 1] {
                return Err(QfeError::InvalidArgument(format!(
                    "nodes not strictly increasing at index {j}"
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(QfeError::InvalidArgument(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(FiberGrid { nodes, weights })
    }

    /// Composite midpoint rule: nodes θ_j = 2π(j + 1/2)/n, weights 1/n.
    pub fn uniform(n_nodes: usize) -> Result<Self> {
        if n_nodes == 0 {
            return Err(QfeError::InvalidArgument(
                "uniform grid needs at least one node".into(),
            ));
        }
        let w = 1.0 / n_nodes as f64;
        let nodes = (0..n_nodes)
            .map(|j| TAU * (j as f64 + 0.5) / n_nodes as f64)
            .collect();
        Ok(FiberGrid {
            nodes,
            weights: vec![w; n_nodes],
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Whether the grid is the uniform midpoint grid (equal weights, equal
    /// spacing within 1e−9). Fourier-coefficient quadrature requires this.
    pub fn is_uniform(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return false;
        }
        let w = 1.0 / n as f64;
        let step = TAU / n as f64;
        self.weights.iter().all(|&x| (x - w).abs() <= 1e-9)
            && self
                .nodes
                .iter()
                .enumerate()
                .all(|(j, &t)| (t - step * (j as f64 + 0.5)).abs() <= 1e-9)
    }

    /// Weighted sum Σ_j w_j v_j realizing ∫_T v dλ.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.nodes.len() {
            return Err(QfeError::InvalidArgument(format!(
                "expected {} samples, got {}",
                self.nodes.len(),
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(QfeError::Numeric(format!(
                "sample {j} is not finite: {}",
                values[j]
            )));
        }
        Ok(self
            .weights
            .iter()
            .zip(values.iter())
            .map(|(w, v)| w * v)
            .sum())
    }
}

/// Direct-integral spectral data: a fiber correlation matrix `A_z` per grid
/// node, tagged with the algebra that constrains its spectrum. Fibers may
/// have different (including zero) dimensions.
///
/// `singular_rate` records the mass of the singular spectral part, which
/// contributes no entropy; it only surfaces in diagnostics.
#[derive(Debug, Clone)]
pub struct DirectIntegralModel {
    grid: FiberGrid,
    fibers: Vec<CMat>,
    fiber_eigs: Vec<crate::linalg::HermitianEigen>,
    algebra: Algebra,
    singular_rate: f64,
}

fn check_fiber_spectrum(values: &[f64], algebra: Algebra, j: usize) -> Result<()> {
    for &l in values {
        let ok = match algebra {
            Algebra::Car => (-1e-10..=1.0 + 1e-10).contains(&l),
            Algebra::Ccr => l >= -1e-10,
        };
        if !ok {
            return Err(QfeError::InvalidModel(format!(
                "fibers[{j}]: eigenvalue {l} outside the admissible range for {algebra:?}"
            )));
        }
    }
    Ok(())
}

impl DirectIntegralModel {
    pub fn new(grid: FiberGrid, fibers: Vec<CMat>, algebra: Algebra) -> Result<Self> {
        if fibers.len() != grid.len() {
            return Err(QfeError::InvalidModel(format!(
                "{} fibers for {} grid nodes",
                fibers.len(),
                grid.len()
            )));
        }
        let mut fiber_eigs = Vec::with_capacity(fibers.len());
        for (j, f) in fibers.iter().enumerate() {
            if f.nrows() != f.ncols() {
                return Err(QfeError::InvalidModel(format!("fibers[{j}] not square")));
            }
            let defect = hermiticity_defect(f);
            if defect > 1e-10 {
                return Err(QfeError::InvalidModel(format!(
                    "fibers[{j}] not Hermitian: defect {defect:.3e}"
                )));
            }
            let eig = hermitian_eig(f);
            check_fiber_spectrum(&eig.values, algebra, j)?;
            fiber_eigs.push(eig);
        }
        Ok(DirectIntegralModel {
            grid,
            fibers,
            fiber_eigs,
            algebra,
            singular_rate: 0.0,
        })
    }

    pub fn with_singular_rate(mut self, rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(QfeError::InvalidModel(format!(
                "singular rate {rate} must be a nonnegative real"
            )));
        }
        self.singular_rate = rate;
        Ok(self)
    }

    pub fn grid(&self) -> &FiberGrid {
        &self.grid
    }

    pub fn fibers(&self) -> &[CMat] {
        &self.fibers
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn singular_rate(&self) -> f64 {
        self.singular_rate
    }

    /// Fiber eigenvalues at node `j`, ascending (no branch matching).
    pub fn fiber_eigenvalues(&self, j: usize) -> &[f64] {
        &self.fiber_eigs[j].values
    }

    /// Fiberwise diagonalization with eigenvector branch matching.
    ///
    /// Branch `b` at node `j+1` is assigned to the node-`j` branch whose
    /// eigenvector maximizes |overlap|; ties break by ascending eigenvalue.
    /// When consecutive fibers have different dimensions the assignment
    /// resets to ascending order. Branches beyond a fiber's dimension are
    /// absent (`None`).
    pub fn eigencurves(&self) -> EigencurveSet {
        let n_nodes = self.grid.len();
        let n_curves = self.fibers.iter().map(|f| f.nrows()).max().unwrap_or(0);
        let mut curves = vec![vec![None; n_nodes]; n_curves];
        let mut frames = Vec::with_capacity(n_nodes);
        // branch -> eigenvector column of the previous node, in branch order
        let mut prev_frame: Option<CMat> = None;
        for (j, eig) in self.fiber_eigs.iter().enumerate() {
            let d = eig.values.len();
            let assignment: Vec<usize> = match &prev_frame {
                Some(pf) if pf.ncols() == d && d > 0 => assign_branches(pf, &eig.vectors),
                _ => (0..d).collect(),
            };
            // column b of the frame is the eigenvector of branch b
            let mut frame = CMat::zeros(d, d);
            for (branch, &col) in assignment.iter().enumerate() {
                curves[branch][j] = Some(eig.values[col]);
                frame.set_column(branch, &eig.vectors.column(col));
            }
            prev_frame = Some(frame.clone());
            frames.push(frame);
        }
        EigencurveSet { curves, frames }
    }
}

/// Greedy max-overlap assignment: returns `assignment[branch] = column` of
/// the current eigenvector matrix. Ties within 1e−9 of overlap resolve by
/// ascending column index, which keeps the previous ordering at eigenvalue
/// crossings (columns arrive sorted by eigenvalue).
fn assign_branches(prev_frame: &CMat, current: &CMat) -> Vec<usize> {
    let d = prev_frame.ncols();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for b in 0..d {
        for c in 0..d {
            let mut overlap = C64::new(0.0, 0.0);
            for r in 0..d {
                overlap += prev_frame[(r, b)].conj() * current[(r, c)];
            }
            pairs.push((overlap.norm(), b, c));
        }
    }
    pairs.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap()
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    let mut assignment = vec![usize::MAX; d];
    let mut branch_taken = vec![false; d];
    let mut col_taken = vec![false; d];
    for (_, b, c) in pairs {
        if !branch_taken[b] && !col_taken[c] {
            assignment[b] = c;
            branch_taken[b] = true;
            col_taken[c] = true;
        }
    }
    assignment
}

/// Matched eigenvalue branches λ_b(θ_j) and per-node eigenvector frames.
///
/// `curves[b][j]` is `None` where the fiber dimension at node `j` is below
/// `b + 1`. Frame columns are ordered by branch.
#[derive(Debug, Clone)]
pub struct EigencurveSet {
    curves: Vec<Vec<Option<f64>>>,
    frames: Vec<CMat>,
}

impl EigencurveSet {
    pub fn n_curves(&self) -> usize {
        self.curves.len()
    }

    pub fn curves(&self) -> &[Vec<Option<f64>>] {
        &self.curves
    }

    pub fn frames(&self) -> &[CMat] {
        &self.frames
    }

    /// Eigenvalues present at node `j`, in branch order.
    pub fn values_at(&self, j: usize) -> Vec<f64> {
        self.curves.iter().filter_map(|c| c[j]).collect()
    }

    /// Rebuild the fiber family V diag(λ) V* (for round-trip checks).
    pub fn reconstruct_fibers(&self) -> Vec<CMat> {
        let n_nodes = self.frames.len();
        (0..n_nodes)
            .map(|j| {
                let frame = &self.frames[j];
                let d = frame.nrows();
                let mut diag = CMat::zeros(d, d);
                for b in 0..d {
                    if let Some(l) = self.curves[b][j] {
                        diag[(b, b)] = C64::new(l, 0.0);
                    }
                }
                frame * diag * frame.adjoint()
            })
            .collect()
    }
}

/// One open interval of a multiplication-operator model with midpoint
/// samples of ω′ and ρ.
#[derive(Debug, Clone)]
pub struct IntervalSamples {
    a: f64,
    b: f64,
    omega_prime: Vec<f64>,
    rho: Vec<f64>,
}

impl IntervalSamples {
    pub fn new(a: f64, b: f64, omega_prime: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(QfeError::InvalidModel(format!(
                "interval ({a}, {b}) is not a bounded open interval"
            )));
        }
        if omega_prime.len() != rho.len() || omega_prime.is_empty() {
            return Err(QfeError::InvalidModel(format!(
                "interval ({a}, {b}): ω′ has {} samples, ρ has {}",
                omega_prime.len(),
                rho.len()
            )));
        }
        if omega_prime.iter().any(|x| !x.is_finite()) || rho.iter().any(|x| !x.is_finite()) {
            return Err(QfeError::Numeric(format!(
                "interval ({a}, {b}): non-finite sample"
            )));
        }
        Ok(IntervalSamples {
            a,
            b,
            omega_prime,
            rho,
        })
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn omega_prime(&self) -> &[f64] {
        &self.omega_prime
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// Quadrature weight per sample, (b − a)/n.
    pub fn weight(&self) -> f64 {
        (self.b - self.a) / self.omega_prime.len() as f64
    }
}

/// Multiplication-operator model: U = multiplication by e^{iω}, A =
/// multiplication by ρ on L²(I), with ω′ and ρ sampled over disjoint open
/// intervals.
#[derive(Debug, Clone)]
pub struct MultiplicationModel {
    intervals: Vec<IntervalSamples>,
    algebra: Algebra,
}

impl MultiplicationModel {
    pub fn new(intervals: Vec<IntervalSamples>, algebra: Algebra) -> Result<Self> {
        let mut spans: Vec<(f64, f64)> = intervals.iter().map(|i| (i.a, i.b)).collect();
        spans.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in spans.windows(2) {
            if w[0].1 > w[1].0 + 1e-12 {
                return Err(QfeError::InvalidModel(format!(
                    "intervals ({}, {}) and ({}, {}) overlap",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        for iv in &intervals {
            for (k, &r) in iv.rho.iter().enumerate() {
                let ok = match algebra {
                    Algebra::Car => (-1e-12..=1.0 + 1e-12).contains(&r),
                    Algebra::Ccr => r >= -1e-12,
                };
                if !ok {
                    return Err(QfeError::InvalidModel(format!(
                        "interval ({}, {}): rho[{k}] = {r} outside the admissible range",
                        iv.a, iv.b
                    )));
                }
            }
        }
        Ok(MultiplicationModel { intervals, algebra })
    }

    pub fn intervals(&self) -> &[IntervalSamples] {
        &self.intervals
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }
}
