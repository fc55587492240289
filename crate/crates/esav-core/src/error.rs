use thiserror::Error;

/// Everything that can go wrong in the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("singular operator: a + b*s(k) vanishes at wavenumber (kx = {kx}, ky = {ky})")]
    SingularOperator { kx: f64, ky: f64 },

    #[error(
        "exponent overflow guard tripped: |{arg:.6e}| > {limit}; \
         increase the auxiliary-variable constant C"
    )]
    ExponentOverflow { arg: f64, limit: f64 },

    #[error(
        "extrapolated auxiliary variable is non-positive (r_tilde = {r_tilde:.6e}) at step {step}"
    )]
    ExtrapolationDegenerate { r_tilde: f64, step: usize },

    #[error("invalid SAV constant: E1 + C = {value:.6e} is not positive; increase C")]
    InvalidC { value: f64 },

    #[error("degenerate scalar reduction: 1x1 pivot = {pivot:.6e}")]
    DegenerateReduction { pivot: f64 },

    #[error(
        "inner solver did not converge: {iters} iterations, last relative update {residual:.6e}"
    )]
    IterationLimit { iters: usize, residual: f64 },

    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    #[error("unknown config key `{key}`")]
    UnknownKey { key: String },

    #[error("config validation: {0}")]
    Validation(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
