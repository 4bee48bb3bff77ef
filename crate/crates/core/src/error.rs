use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step size violates resolution rule: dtau * max(|delta|, |omega|) = {product:.4} > {limit}")]
    StepTooLarge { product: f64, limit: f64 },

    #[error("non-finite value at tau index {tau_index}, zeta index {zeta_index}")]
    NonFinite { tau_index: usize, zeta_index: usize },

    #[error("point outside grid: {0}")]
    OutOfGrid(String),

    #[error("spectral parameter {spectral:.6} MHz collides with quadrature node {node:.6} MHz")]
    NodeCollision { spectral: f64, node: f64 },

    #[error("unstable finite-difference derivative for {parameter}: successive halvings differ by {relative:.3e}")]
    UnstableDerivative { parameter: &'static str, relative: f64 },

    #[error("tau grid too short: {0}")]
    GridTooShort(String),

    #[error("no identifiable soliton: maximal polarization deviation {deviation:.3e} below threshold")]
    NoSoliton { deviation: f64 },

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("zero field: dark state undefined")]
    ZeroField,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
