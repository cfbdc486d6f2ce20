use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid band-limit {0}: must be at least 1")]
    InvalidBandLimit(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("root finder did not converge for partition point t = {t}")]
    RootNotConverged { t: usize },

    #[error("every remaining candidate leaves the order-{m} block singular")]
    IllConditionedGrid { m: usize },

    #[error("{what} {value} out of range for band-limit {band_limit}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        band_limit: usize,
    },

    #[error("band-limit mismatch: {left} vs {right}")]
    BandLimitMismatch { left: usize, right: usize },

    #[error("ill-conditioned solve at order {m}: condition number {kappa:.3e}")]
    IllConditionedSolve { m: i64, kappa: f64 },

    #[error("order {m} aliases on ring {k} (needs |m| <= k)")]
    Aliasing { m: i64, k: usize },

    #[error("{what} is limited to L <= {max}, got L = {got}")]
    SizeGuard {
        what: &'static str,
        max: usize,
        got: usize,
    },

    #[error("singular least-squares system: numerical rank {rank} of {size}")]
    SingularSystem { rank: usize, size: usize },

    #[error("malformed file: {0}")]
    Malformed(String),

    #[error("unsupported file version: {0}")]
    Version(String),

    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
