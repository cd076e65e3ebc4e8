//! Entropy kernels. Total (clamping) variants used on already-validated
//! spectra; the domain-checked public versions live in [`crate::dynentropy`].

/// η(t) = −t log t, extended by η(t) = 0 for t ≤ 0.
pub fn eta(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        -t * t.ln()
    }
}

/// Fermionic per-eigenvalue entropy η(λ) + η(1−λ), input clamped to [0, 1].
pub fn ecar_clamped(lambda: f64) -> f64 {
    let l = lambda.clamp(0.0, 1.0);
    eta(l) + eta(1.0 - l)
}

/// Bosonic per-eigenvalue entropy η(λ) − η(1+λ) = (1+λ)log(1+λ) − λ log λ,
/// input clamped to [0, ∞).
pub fn eccr_clamped(lambda: f64) -> f64 {
    let l = lambda.max(0.0);
    eta(l) - eta(1.0 + l)
}
