use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("scan needs {requested} samples but the budget is {budget}")]
    Budget { requested: usize, budget: usize },

    #[error("aura not enclosed along direction #{direction} (signature still changing near r = {radius}); raise r_max")]
    AuraNotEnclosed { direction: usize, radius: f64 },

    #[error("averaging tie: off-diagonal range {range:e} is below the tie epsilon")]
    Tie { range: f64 },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } => 1,
            _ => 2,
        }
    }
}
