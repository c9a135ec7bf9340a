use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("decay guard: {0}")]
    Decay(String),
    #[error("under-resolved: {0}")]
    UnderResolved(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("realness check failed: sup|Im| = {im:e}, sup|Re| = {re:e}")]
    Realness { im: f64, re: f64 },
    #[error("smoothing certificate failed: residual {residual:e} exceeds {limit:e}")]
    Certificate { residual: f64, limit: f64 },
    #[error("unsupported symbol: {0}")]
    UnsupportedSymbol(String),
    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),
    #[error("step instability at t = {t}: {detail}")]
    Instability { t: f64, detail: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
