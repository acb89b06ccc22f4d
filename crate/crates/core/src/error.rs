use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Each variant maps to one stable machine-readable code (see [`Error::code`]),
/// which the command-line front end emits in its error JSON.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("allocation error: {0}")]
    Allocation(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("schema violation: {0}")]
    Schema(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateParameters(_) => "degenerate_parameters",
            Error::Validation(_) => "validation",
            Error::Domain(_) => "domain",
            Error::UnsupportedRegime(_) => "unsupported_regime",
            Error::Size(_) => "size_limit",
            Error::Allocation(_) => "allocation",
            Error::Numeric(_) => "numeric",
            Error::Input(_) => "input",
            Error::Schema(_) => "schema",
            Error::Io(_) => "io",
        }
    }

    /// Process exit status used by the CLI for this error.
    pub fn exit_status(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::Schema(_) => 3,
            Error::Validation(_) => 4,
            Error::DegenerateParameters(_) => 5,
            Error::Domain(_) => 6,
            Error::UnsupportedRegime(_) => 7,
            Error::Size(_) => 8,
            Error::Allocation(_) => 9,
            Error::Numeric(_) => 10,
            Error::Io(_) => 11,
        }
    }

    /// Every code the library can emit, in exit-status order.
    pub const CODES: [&'static str; 10] = [
        "input",
        "schema",
        "validation",
        "degenerate_parameters",
        "domain",
        "unsupported_regime",
        "size_limit",
        "allocation",
        "numeric",
        "io",
    ];
}

pub type Result<T> = std::result::Result<T, Error>;
