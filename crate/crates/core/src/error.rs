use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),

    #[error("domain: {0}")]
    Domain(String),

    #[error("evanescent {leg} component: q = {q:.6e} rad/m >= k = {k:.6e} rad/m")]
    Evanescent { leg: Leg, q: f64, k: f64 },

    #[error("numerical: {0}")]
    Numerical(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("oracle refused: {0}")]
    SizeGuard(String),

    #[error("lookup: {0}")]
    Lookup(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    Pump,
    Signal,
    Idler,
}

impl std::fmt::Display for Leg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Leg::Pump => "pump",
            Leg::Signal => "signal",
            Leg::Idler => "idler",
        })
    }
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::SizeGuard(_) | Error::Lookup(_) | Error::Io(_) => 2,
            Error::Domain(_) | Error::Evanescent { .. } => 3,
            Error::Numerical(_) => 4,
            Error::Invariant(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
