use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inverse branch undefined: second coordinate is zero")]
    InverseUndefined,
    #[error("iterate overflowed to a non-finite value")]
    Overflow,
    #[error("the origin is excluded from this set")]
    OriginExcluded,
    #[error("division by zero")]
    DivisionByZero,
    #[error("parameter c = {re}{im:+}i is not real but a real computation was requested")]
    NonRealParameter { re: f64, im: f64 },
    #[error("{what} = {value} is outside the supported range {range}")]
    ParameterOutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("escape radius {radius} does not exceed the required bound {bound}")]
    RadiusTooSmall { radius: f64, bound: f64 },
    #[error("radius constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("base point is not a saddle (multipliers {0:?})")]
    NotASaddle([f64; 2]),
    #[error("manifold branch died at its seed segment")]
    BranchDied,
    #[error("invalid argument: {0}")]
    InvalidSpec(String),
    #[error("unsupported output format '{0}'")]
    UnsupportedFormat(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
