use std::fmt;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A size/limit was exceeded (sieve limit, dimension cap, enumeration cap).
    Capacity {
        what: String,
        required: u64,
        limit: u64,
    },
    /// A pointwise map or integrand was evaluated outside its domain.
    Domain { op: &'static str, detail: String },
    /// Strict positivity could not be certified on the sampling grid.
    Positivity { grid_min: f64, required: f64 },
    /// A matrix violated the Hermitian invariant.
    NonHermitian { max_asymmetry: f64 },
    /// A precondition on arguments was violated.
    Invalid(String),
    /// A numerical sanity check failed (residuals, trace identities).
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Capacity {
                what,
                required,
                limit,
            } => write!(f, "capacity exceeded: {what} requires {required}, limit is {limit}"),
            Error::Domain { op, detail } => write!(f, "domain error in {op}: {detail}"),
            Error::Positivity { grid_min, required } => write!(
                f,
                "positivity certification failed: grid minimum {grid_min} below required margin {required}"
            ),
            Error::NonHermitian { max_asymmetry } => {
                write!(f, "matrix is not Hermitian (max asymmetry {max_asymmetry})")
            }
            Error::Invalid(detail) => write!(f, "invalid argument: {detail}"),
            Error::Numerical(detail) => write!(f, "numerical check failed: {detail}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
