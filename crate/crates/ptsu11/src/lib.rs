//! Driven su(1,1) oscillator under a non-unitary time-dependent gauge
//! transformation.
//!
//! The model Hamiltonian H(t) = Omega*Sz + G*(S+ e^{i omega t} - S- e^{-i omega t})
//! is non-Hermitian but PT-symmetric. A time-periodic similarity transform R(t)
//! maps it onto a static Hermitian kernel 2*Gamma*Sz. This crate builds the
//! truncated Fock-space operators, solves the auxiliary angle equation, applies
//! and verifies the gauge reduction, evolves states biorthogonally, computes the
//! non-adiabatic Berry phase by three routes, and mirrors the whole construction
//! on the complexified classical side (canonical map, generating function,
//! Hannay angle, quantum-classical correspondence).

pub mod classical;
pub mod dynamics;
pub mod fock;
pub mod gauge;
pub mod numerics;

pub use fock::{FockSpace, OperatorMatrix};
pub use gauge::{Branch, GaugeSolution, ModelParams};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Unified error type for all modules.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Delta = 0: the auxiliary angle is undefined.
    #[error("degenerate parameters: Delta = 0 (omega + Omega = 0 and G = 0)")]
    DegenerateParameters,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} outside certified range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    /// |tan(eta/2)| >= 1: the gauge operator has no bounded matrix
    /// representation and truncated products do not converge.
    #[error("matrix exponential did not converge: |tan(eta/2)| = {tau_abs}")]
    ExponentialDidNotConverge { tau_abs: f64 },

    /// Tail certification failed at the hard cutoff limit.
    #[error("cutoff not converged: tail norm {tail:e} at hard max cutoff {cutoff}")]
    CutoffNotConverged { tail: f64, cutoff: usize },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("quadrature did not converge: error estimate {error:e}")]
    QuadratureNotConverged { error: f64 },

    /// The kernel oscillator is inverted; position-space eigenfunctions do not
    /// decay.
    #[error("non-normalizable kernel state: Gamma = {gamma} <= 0")]
    NonNormalizable { gamma: f64 },

    /// Transformed-Hamiltonian coefficient failed its identity check.
    #[error("transformed-Hamiltonian coefficient {name} = {value} deviates from {expected}")]
    CoefficientMismatch {
        name: &'static str,
        value: C64,
        expected: C64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
