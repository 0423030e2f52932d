use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    Domain(&'static str),
    /// Inner partition not contained in the outer one.
    Shape,
    /// Evaluation at a pole of a meromorphic function.
    Pole,
    /// A truncation, tail or decay certificate could not be met.
    Diagnostic { what: &'static str, value: f64, limit: f64 },
    /// Input data failed validation (empty sample, unnormalized pmf, ...).
    Invalid(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(s) => write!(f, "parameter out of range: {s}"),
            Error::Shape => write!(f, "inner partition is not contained in outer partition"),
            Error::Pole => write!(f, "evaluation at a pole"),
            Error::Diagnostic { what, value, limit } => {
                write!(f, "{what}: {value:e} exceeds {limit:e}")
            }
            Error::Invalid(s) => write!(f, "invalid input: {s}"),
        }
    }
}

impl core::error::Error for Error {}
