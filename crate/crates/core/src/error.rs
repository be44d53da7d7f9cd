use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("I_{order}({x}) overflows the floating-point range; use the scaled form")]
    Overflow { order: u32, x: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("hbar_eff = {0} is not the resonance value 4*pi")]
    NotResonant(f64),

    #[error(
        "momentum lattice of {n_modes} modes too small at t = {t}: \
         edge tail mass {tail_mass:e} exceeds {limit:e}"
    )]
    Resolution {
        t: u64,
        n_modes: usize,
        tail_mass: f64,
        limit: f64,
    },

    #[error("insufficient fit support: {0}")]
    InsufficientSupport(String),

    #[error("fitted curvature {0:e} is not concave")]
    NonConcave(f64),

    #[error("fitted decay slope {0:e} is not negative")]
    NonDecaying(f64),

    #[error("second differences need unit spacing, found a gap of {0} kicks")]
    Spacing(u64),

    #[error("all {cells} sweep cells failed")]
    SweepFailed { cells: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line contract: 1 for configuration
    /// and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::InvalidParams(_) | Error::Io(_) | Error::Json(_) => 1,
            _ => 2,
        }
    }
}
