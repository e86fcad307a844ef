use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    NotPrime(u64),
    ZeroDegree,
    FieldTooLarge { order: u64, bound: u64 },
    /// `n` does not divide `q - 1`.
    IndexNotDivisor { q: u64, n: u64 },
    /// `q(q-1)/n` is odd.
    OddArity { q: u64, n: u64 },
    NotPrimePower(u64),
    NotCoprime { r: u64, n: u64 },
    PointOutOfRange { point: usize, degree: usize },
    DegreeMismatch { expected: usize, found: usize },
    NonSquare { rows: usize, row: usize, len: usize },
    ColorGap { missing: u32 },
    NotAFiber,
    NotAScheme { fibers: usize },
    TooLarge { what: &'static str, size: usize, bound: usize },
    UnsupportedDimension(usize),
    NotAPermutation,
    /// A structural check failed; `detail` carries the witness.
    Verification { check: &'static str, detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(r) => write!(f, "characteristic {r} is not prime"),
            Error::ZeroDegree => write!(f, "extension degree must be at least 1"),
            Error::FieldTooLarge { order, bound } => {
                write!(f, "field order {order} exceeds bound {bound}")
            }
            Error::IndexNotDivisor { q, n } => write!(f, "n = {n} does not divide q-1 = {}", q - 1),
            Error::OddArity { q, n } => write!(f, "q(q-1)/n odd for q = {q}, n = {n}"),
            Error::NotPrimePower(q) => write!(f, "{q} is not a prime power"),
            Error::NotCoprime { r, n } => write!(f, "gcd({r}, {n}) != 1"),
            Error::PointOutOfRange { point, degree } => {
                write!(f, "point {point} out of range for degree {degree}")
            }
            Error::DegreeMismatch { expected, found } => {
                write!(f, "degree mismatch: expected {expected}, found {found}")
            }
            Error::NonSquare { rows, row, len } => {
                write!(f, "matrix with {rows} rows has row {row} of length {len}")
            }
            Error::ColorGap { missing } => write!(f, "color {missing} does not occur"),
            Error::NotAFiber => write!(f, "point set is not a fiber"),
            Error::NotAScheme { fibers } => write!(f, "configuration has {fibers} fibers, not 1"),
            Error::TooLarge { what, size, bound } => {
                write!(f, "{what} of size {size} exceeds bound {bound}")
            }
            Error::UnsupportedDimension(m) => write!(f, "only m = 2 is supported, got {m}"),
            Error::NotAPermutation => write!(f, "image list is not a bijection"),
            Error::Verification { check, detail } => write!(f, "{check} failed: {detail}"),
        }
    }
}

impl core::error::Error for Error {}
