//! Two-variable autonomous ODE systems with homogeneous cubic right-hand sides
//!
//! ```text
//! x1' = c11 x1^3 + c12 x1^2 x2 + c13 x1 x2^2 + c14 x2^3
//! x2' = c21 x1^3 + c22 x1^2 x2 + c23 x1 x2^2 + c24 x2^3
//! ```
//!
//! restricted to the subclass that is solvable by algebraic operations. The
//! subclass is parametrized by seven complex numbers `a1, a2, b1, b2, g1, g2, g3`
//! through the linear change of variables `y = a1 x1 + a2 x2`,
//! `w = b1 x1 + b2 x2`. The crate provides the forward map, the two
//! constraints cutting out the subclass, the inverse map, the exact
//! initial-value solution, an independent Runge-Kutta oracle and the
//! isochronous extension.

pub mod algebra;
pub mod constraints;
pub mod integrator;
pub mod inversion;
pub mod isochronous;
pub mod model;
pub mod reduced;
pub mod solver;

mod closed_forms;

pub use algebra::C64;
pub use constraints::ConstraintReport;
pub use model::{Coeff, CoefficientSet, ParameterSet};

/// Coarse failure class, used by the CLI to choose an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numerical,
    Constraint,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("degenerate parametrization: {0}")]
    Degenerate(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("formula not applicable: {0}")]
    Inapplicable(String),
    #[error("blow-up at t = {t}")]
    BlowUp { t: C64 },
    #[error("continuation failed at t = {t}: {reason}")]
    Continuation { t: C64, reason: String },
    #[error("no completion found after {seeds} starts")]
    CompletionFailure { seeds: usize },
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("inversion failed: {0}")]
    Inversion(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Validation(_) | Error::Degenerate(_) => ErrorClass::Validation,
            Error::Constraint(_) => ErrorClass::Constraint,
            _ => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
