//! C interface to the qfe entropy library.
//!
//! Conventions:
//! * every fallible call returns a [`QfeStatus`] and writes results through
//!   out-pointers; `qfe_last_error_message` retrieves a thread-local
//!   description of the most recent failure;
//! * complex matrices are passed as flat `double` arrays of length
//!   `2 * dim * dim`, row-major, entries interleaved as (re, im);
//! * direct-integral models are built through an opaque [`QfeModel`] handle
//!   on the uniform midpoint grid, one Hermitian fiber per node.

use qfe::car::CarCorrelation;
use qfe::ccr::CcrCorrelation;
use qfe::dynentropy::{
    multiplication_entropy_rate, spectral_entropy_rate, toeplitz_entropy_rates, SymbolFunction,
};
use qfe::linalg::{CMat, C64};
use qfe::spectra::{DirectIntegralModel, FiberGrid, IntervalSamples, MultiplicationModel};
use qfe::{Algebra, QfeError};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::slice;

/// Status of a qfe call. Nonzero values match the CLI exit-code classes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfeStatus {
    Ok = 0,
    /// Invalid argument, model or correlation data.
    InvalidArgument = 2,
    /// Numerical failure (non-finite input, undefined value).
    NumericError = 3,
    /// A dense-dimension or enumeration guard was hit.
    ResourceLimit = 4,
    /// A required pointer was null.
    NullPointer = 5,
}

/// Which canonical (anti)commutation structure a model uses.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfeAlgebra {
    Car = 0,
    Ccr = 1,
}

impl From<QfeAlgebra> for Algebra {
    fn from(a: QfeAlgebra) -> Algebra {
        match a {
            QfeAlgebra::Car => Algebra::Car,
            QfeAlgebra::Ccr => Algebra::Ccr,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &QfeError) -> QfeStatus {
    match err.exit_code() {
        2 => QfeStatus::InvalidArgument,
        3 => QfeStatus::NumericError,
        _ => QfeStatus::ResourceLimit,
    }
}

fn fail(err: QfeError) -> QfeStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

fn null_pointer(what: &str) -> QfeStatus {
    set_error(&format!("{what} is null"));
    QfeStatus::NullPointer
}

/// Reads a flat interleaved complex matrix. Caller guarantees the pointer
/// covers 2*dim*dim doubles.
unsafe fn matrix_from_raw(dim: usize, data: *const f64) -> CMat {
    let raw = slice::from_raw_parts(data, 2 * dim * dim);
    CMat::from_fn(dim, dim, |i, j| {
        let at = 2 * (i * dim + j);
        C64::new(raw[at], raw[at + 1])
    })
}

unsafe fn write_out(out: *mut f64, value: f64) -> QfeStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    *out = value;
    QfeStatus::Ok
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn qfe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing qfe call on the same thread.
#[no_mangle]
pub extern "C" fn qfe_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Fermionic entropy integrand η(λ) + η(1−λ), λ ∈ [0, 1].
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn qfe_ecar(lambda: f64, out: *mut f64) -> QfeStatus {
    match qfe::dynentropy::ecar(lambda) {
        Ok(v) => write_out(out, v),
        Err(e) => fail(e),
    }
}

/// Bosonic entropy integrand η(λ) − η(1+λ), λ ≥ 0.
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn qfe_eccr(lambda: f64, out: *mut f64) -> QfeStatus {
    match qfe::dynentropy::eccr(lambda) {
        Ok(v) => write_out(out, v),
        Err(e) => fail(e),
    }
}

/// Entropy of the quasi-free fermion state with the given Hermitian
/// correlation matrix (spectrum in [0, 1]), in nats.
///
/// # Safety
/// `matrix` must point to 2*dim*dim doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qfe_entropy_car(
    dim: usize,
    matrix: *const f64,
    out: *mut f64,
) -> QfeStatus {
    if matrix.is_null() {
        return null_pointer("matrix");
    }
    match CarCorrelation::new(matrix_from_raw(dim, matrix)) {
        Ok(corr) => write_out(out, corr.entropy()),
        Err(e) => fail(e),
    }
}

/// Entropy of the quasi-free boson state with the given Hermitian positive
/// semidefinite correlation matrix, in nats.
///
/// # Safety
/// `matrix` must point to 2*dim*dim doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qfe_entropy_ccr(
    dim: usize,
    matrix: *const f64,
    out: *mut f64,
) -> QfeStatus {
    if matrix.is_null() {
        return null_pointer("matrix");
    }
    match CcrCorrelation::new(matrix_from_raw(dim, matrix)) {
        Ok(corr) => write_out(out, corr.entropy()),
        Err(e) => fail(e),
    }
}

/// Direct-integral model under construction: a uniform midpoint grid on the
/// circle with one Hermitian fiber per node (empty until set).
pub struct QfeModel {
    algebra: Algebra,
    fibers: Vec<CMat>,
    singular_rate: f64,
}

/// Creates a model handle with `n_nodes` uniform grid nodes and 0×0 fibers.
/// Returns null when `n_nodes` is 0. Free with `qfe_model_free`.
#[no_mangle]
pub extern "C" fn qfe_model_new(algebra: QfeAlgebra, n_nodes: usize) -> *mut QfeModel {
    if n_nodes == 0 {
        set_error("n_nodes must be positive");
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(QfeModel {
        algebra: algebra.into(),
        fibers: vec![CMat::zeros(0, 0); n_nodes],
        singular_rate: 0.0,
    }))
}

/// Sets the Hermitian fiber at `node` (0-based). `dim` may be 0 to mark an
/// empty fiber; otherwise `matrix` must point to 2*dim*dim doubles.
///
/// # Safety
/// `model` must come from `qfe_model_new`; `matrix` must be valid for the
/// declared dimension.
#[no_mangle]
pub unsafe extern "C" fn qfe_model_set_fiber(
    model: *mut QfeModel,
    node: usize,
    dim: usize,
    matrix: *const f64,
) -> QfeStatus {
    let Some(model) = model.as_mut() else {
        return null_pointer("model");
    };
    if node >= model.fibers.len() {
        set_error(&format!(
            "node {node} out of range (model has {} nodes)",
            model.fibers.len()
        ));
        return QfeStatus::InvalidArgument;
    }
    if dim == 0 {
        model.fibers[node] = CMat::zeros(0, 0);
        return QfeStatus::Ok;
    }
    if matrix.is_null() {
        return null_pointer("matrix");
    }
    model.fibers[node] = matrix_from_raw(dim, matrix);
    QfeStatus::Ok
}

/// Records the mass of the singular spectral part (diagnostic only; the
/// singular part contributes zero entropy).
///
/// # Safety
/// `model` must come from `qfe_model_new`.
#[no_mangle]
pub unsafe extern "C" fn qfe_model_set_singular_rate(model: *mut QfeModel, rate: f64) -> QfeStatus {
    let Some(model) = model.as_mut() else {
        return null_pointer("model");
    };
    if !rate.is_finite() || rate < 0.0 {
        set_error("singular rate must be a nonnegative real");
        return QfeStatus::InvalidArgument;
    }
    model.singular_rate = rate;
    QfeStatus::Ok
}

/// Evaluates the spectral-integral entropy rate of the model, in nats per
/// step. Validates all fibers (Hermiticity, admissible spectrum).
///
/// # Safety
/// `model` must come from `qfe_model_new`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qfe_model_entropy_rate(
    model: *const QfeModel,
    out: *mut f64,
) -> QfeStatus {
    let Some(model) = model.as_ref() else {
        return null_pointer("model");
    };
    let grid = match FiberGrid::uniform(model.fibers.len()) {
        Ok(g) => g,
        Err(e) => return fail(e),
    };
    match DirectIntegralModel::new(grid, model.fibers.clone(), model.algebra)
        .and_then(|m| m.with_singular_rate(model.singular_rate))
    {
        Ok(m) => write_out(out, spectral_entropy_rate(&m)),
        Err(e) => fail(e),
    }
}

/// Releases a model handle. Null is ignored.
///
/// # Safety
/// `model` must come from `qfe_model_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qfe_model_free(model: *mut QfeModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Entropy rate of a multiplication-operator model on a single interval
/// (a, b): (1/2π) ∫ E(ρ(x)) |ω′(x)| dx with midpoint samples of ω′ and ρ.
///
/// # Safety
/// `omega_prime` and `rho` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qfe_multiplication_entropy_rate(
    algebra: QfeAlgebra,
    len: usize,
    a: f64,
    b: f64,
    omega_prime: *const f64,
    rho: *const f64,
    out: *mut f64,
) -> QfeStatus {
    if omega_prime.is_null() {
        return null_pointer("omega_prime");
    }
    if rho.is_null() {
        return null_pointer("rho");
    }
    let op = slice::from_raw_parts(omega_prime, len).to_vec();
    let rho = slice::from_raw_parts(rho, len).to_vec();
    let model = IntervalSamples::new(a, b, op, rho)
        .and_then(|iv| MultiplicationModel::new(vec![iv], algebra.into()));
    match model {
        Ok(m) => write_out(out, multiplication_entropy_rate(&m)),
        Err(e) => fail(e),
    }
}

/// Empirical entropy rate S_n/n of the n-block Toeplitz restriction of a
/// scalar symbol sampled on the uniform midpoint grid, together with the
/// spectral-integral value for the same symbol.
///
/// # Safety
/// `samples` must point to `n_nodes` doubles; the out-pointers must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn qfe_toeplitz_entropy_rate(
    algebra: QfeAlgebra,
    n_nodes: usize,
    samples: *const f64,
    n_blocks: usize,
    out_rate: *mut f64,
    out_formula: *mut f64,
) -> QfeStatus {
    if samples.is_null() {
        return null_pointer("samples");
    }
    if out_rate.is_null() || out_formula.is_null() {
        return null_pointer("out");
    }
    let data = slice::from_raw_parts(samples, n_nodes);
    let report = FiberGrid::uniform(n_nodes)
        .and_then(|grid| SymbolFunction::scalar(grid, data, algebra.into()))
        .and_then(|symbol| toeplitz_entropy_rates(&symbol, &[n_blocks]));
    match report {
        Ok(r) => {
            *out_rate = r.rates[0];
            *out_formula = r.formula_value;
            QfeStatus::Ok
        }
        Err(e) => fail(e),
    }
}
