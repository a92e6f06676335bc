//! Error-generator framework for mid-circuit measurements (MCMs).
//!
//! This crate models a single-qubit mid-circuit measurement as a *quantum
//! instrument* — a pair of completely positive maps `{Q_0, Q_1}`, one per
//! outcome, whose sum is trace preserving — represented in the Pauli transfer
//! matrix (PTM) convention. Errors on the instrument are organized through a
//! two-qubit circuit *gadget*: the measured qubit is entangled with a virtual
//! qubit by a CNOT, an arbitrary two-qubit error channel acts, and the virtual
//! qubit is read out destructively. Post-measurement error channels of the
//! gadget, expanded to first order in a two-qubit elementary error generator,
//! land in a 28-dimensional space of *deviation maps* with a physically
//! labelled basis (stochastic, asymmetry, rotation, correlation, and
//! measurement-weakness sectors). Projecting a fitted instrument onto that
//! basis yields 28 interpretable error strengths and aggregate figures of
//! merit.
//!
//! The crate also contains everything needed to exercise the framework end to
//! end without hardware: a GST-style experiment design for one qubit with an
//! MCM, synthetic data generation, maximum-likelihood fitting of five nested
//! instrument models, model-selection statistics, and a small IQ-plane readout
//! simulator with leakage post-selection.
//!
//! Module map:
//! - [`pauli`]: Pauli operators, normalized Pauli bases, superoperator indexing.
//! - [`linalg`]: matrix functions (exp, log, sqrt, pseudo-inverse) on real and
//!   complex matrices, implemented directly over `nalgebra`.
//! - [`ptm`]: PTM ⟷ Choi conversions, CP/TP checks, standard channels.
//! - [`instrument`]: the [`instrument::Instrument`] type and constructors.
//! - [`circuit`]: circuit layers, outcome strings, probability evaluation.
//! - [`gateset`]: named one-qubit gate sets with error channels.
//! - [`errorgen`]: elementary error generators (H/S/C/A taxonomy) for 1 and 2
//!   qubits, and first-order projection of channels onto them.
//! - [`gadget`]: the two-qubit → instrument "crunch" map and its linearization.
//! - [`fomgi`]: the 28-element deviation basis, dual basis, strength
//!   extraction, classification, composites, and bootstrap error bars.
//! - [`models`]: the five instrument-model parameterizations used in fits.
//! - [`experiments`]: experiment designs, synthetic data, dataset IO.
//! - [`optimize`]: L-BFGS with exact reverse-mode gradients of the likelihood.
//! - [`inference`]: model fitting, gauge alignment, model-selection statistics.
//! - [`iq`]: IQ readout clouds, clustering, leakage post-selection.

pub mod circuit;
pub mod errorgen;
pub mod experiments;
pub mod fomgi;
pub mod gadget;
pub mod gateset;
pub mod inference;
pub mod instrument;
pub mod iq;
pub mod linalg;
pub mod models;
pub mod optimize;
pub mod pauli;
pub mod ptm;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A map failed a complete-positivity check beyond tolerance.
    #[error("map is not completely positive: min Choi eigenvalue {0:.3e}")]
    NotCompletelyPositive(f64),
    /// A map or instrument failed a trace-preservation check.
    #[error("map is not trace preserving: deviation {0:.3e}")]
    NotTracePreserving(f64),
    /// Matrix logarithm failed (eigenvalue on the branch cut or iteration
    /// did not converge).
    #[error("matrix logarithm failed: {0}")]
    LogmFailed(String),
    /// An input had the wrong shape or an index was out of range.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A label string was not recognized.
    #[error("unknown label: {0}")]
    UnknownLabel(String),
    /// Numerical optimization failed to produce a usable result.
    #[error("optimization failed: {0}")]
    Optimization(String),
    /// An internal cross-check (construction-time self-test) failed.
    #[error("self-test failed: {0}")]
    SelfTest(String),
    /// Dataset or config IO / (de)serialization problem.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
