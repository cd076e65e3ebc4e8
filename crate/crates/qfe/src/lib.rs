//! Entropy rates of Bogoliubov automorphisms of CAR and CCR algebras with
//! respect to gauge-invariant quasi-free states.
//!
//! The central quantity is the spectral integral
//! `h = ∫_T Tr E(A_z) dλ(z)` over the unit circle, where `A_z` is the fiber
//! of the correlation operator over the absolutely continuous part of the
//! dynamics and `E` is the per-eigenvalue entropy kernel
//! (`η(λ) + η(1−λ)` for fermions, `η(λ) − η(1+λ)` for bosons, `η(t) = −t log t`).
//! The crate evaluates this integral from sampled spectral data
//! ([`spectra::DirectIntegralModel`]) or from a multiplication-operator
//! presentation ([`spectra::MultiplicationModel`]), and cross-validates it at
//! desk scale three independent ways:
//!
//! * exact 2^d Jordan–Wigner representations of quasi-free fermion states
//!   and truncated-Fock representations of quasi-free boson states
//!   ([`car`], [`ccr`]);
//! * empirical entropy rates of block-Toeplitz restrictions of the state to
//!   finitely many dynamical translates ([`dynentropy`]);
//! * finite-dimensional dynamical-entropy functionals: Umegaki relative
//!   entropy, partition mutual entropy and word-entropy rates ([`cnt`]).
//!
//! The `qfe` binary drives batch scenarios from JSON configs; see [`cli`].

pub mod car;
pub mod ccr;
pub mod cli;
pub mod cnt;
pub mod density;
pub mod dynentropy;
pub mod error;
mod kernel;
pub mod linalg;
pub mod spectra;

pub use error::{QfeError, Result};

use serde::{Deserialize, Serialize};

/// Which canonical (anti)commutation structure a model refers to.
///
/// The choice selects the admissible correlation spectrum (`[0, 1]` for
/// fermions, `[0, ∞)` for bosons) and the entropy kernel applied to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    /// Canonical anticommutation relations (fermions).
    Car,
    /// Canonical commutation relations (bosons, Weyl form).
    Ccr,
}

/// Largest dense matrix dimension the exact representations will allocate.
///
/// Defaults to 4096; override with the `QFE_MAX_DIM` environment variable.
pub fn max_dense_dim() -> usize {
    std::env::var("QFE_MAX_DIM")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(4096)
}
