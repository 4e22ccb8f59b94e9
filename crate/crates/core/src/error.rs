use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what} has a pole at {at}")]
    Pole { what: &'static str, at: String },
    #[error("{what} vanishes at {at}")]
    Zero { what: &'static str, at: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{a} is not invertible modulo {c}")]
    NotInvertible { a: i64, c: u64 },
    #[error("integrality check failed at n = {n}: a_n n^11 = {value}")]
    NotIntegral { n: u64, value: String },
    #[error("index {index} is outside the table bound {bound}")]
    OutOfRange { index: u64, bound: u64 },
    #[error("residue series not converged at x = {x}: final term {last} exceeds tolerance {tol}")]
    Unconverged { x: String, last: String, tol: String },
    #[error("rounding error {bound} exceeds tolerance {tol} at x = {x}; raise the precision")]
    PrecisionLoss { x: String, bound: String, tol: String },
    #[error("quadrature integrand does not decay: |g(T)|/max|g| = {ratio}")]
    NonDecaying { ratio: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix is singular to working precision at pivot {0}")]
    Singular(usize),
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
