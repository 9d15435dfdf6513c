use std::path::PathBuf;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported complex dimension {0} (supported: 1, 2, 3)")]
    UnsupportedDimension(usize),

    #[error("empty Bellman family")]
    EmptyFamily,

    #[error("stencil exits domain at point {point} along offset {offset:?}")]
    StencilExitsDomain { point: usize, offset: Vec<i32> },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("kernel under-resolved: eps = {eps} < h = {h}")]
    KernelUnderResolved { eps: f64, h: f64 },

    #[error("not ω-psh: {count} violations, worst Levi value {worst:e}")]
    NotPsh { count: usize, worst: f64 },

    #[error("density must be positive (min W = {min:e})")]
    DensityNotPositive { min: f64 },

    #[error("negative density sample {value:e} at grid index {index}")]
    NegativeDensity { index: usize, value: f64 },

    #[error("incompatible total masses: ∫W = {density_mass:e}, ∫det ω = {omega_mass:e}")]
    IncompatibleMasses { density_mass: f64, omega_mass: f64 },

    #[error("missing boundary data for ball problem")]
    MissingBoundary,

    #[error("Hessian not positive at grid index {index} (Bellman value {value:e})")]
    HessianNotPositive { index: usize, value: f64 },

    #[error("expression error at byte {pos}: {msg}")]
    Expression { pos: usize, msg: String },

    #[error("config error at {pointer}: {msg}")]
    Config { pointer: String, msg: String },

    #[error("grid CSV error: {0}")]
    GridCsv(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
