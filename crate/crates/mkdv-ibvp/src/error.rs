//! Crate-wide error type and exit-code mapping.

use num_complex::Complex64;

/// Largest exponent magnitude we allow inside `exp` calls. Double precision
/// overflows just past `|Re| = 709`; anything that big means a caller left
/// the domain where the relevant eigenfunction is bounded, which is a bug in
/// the call site, not in the data.
pub const EXP_GUARD: f64 = 700.0;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("exponent range: Re = {re:.3e} exceeds the guard ({ctx})")]
    ExponentRange { re: f64, ctx: &'static str },

    #[error("invalid data: {0}")]
    DataValidation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("singular jump: |{which}| denominator = {denom_abs:.3e} at k = {k}")]
    SingularJump {
        which: &'static str,
        k: Complex64,
        denom_abs: f64,
    },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("linear solver failure: {0}")]
    LinearSolve(String),

    #[error("oracle certification failed: pde residual = {residual:.3e} (tolerance {tol:.1e})")]
    Certification { residual: f64, tol: f64 },

    #[error("global relation violated: max residual = {max_residual:.3e} (run with override to proceed)")]
    Incompatible { max_residual: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error in {path} line {line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 = input error, 3 = numerical
    /// failure, 4 = incompatibility verdict without override.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DataValidation(_)
            | Error::Config(_)
            | Error::GridMismatch(_)
            | Error::Parse { .. }
            | Error::Io(_) => 2,
            Error::Incompatible { .. } => 4,
            _ => 3,
        }
    }
}
