//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported: every element of a binary field is a square")]
    EvenCharacteristic,
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("division by zero in the field")]
    DivisionByZero,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable x{index}: arity is {arity}")]
    UnknownVariable { index: usize, arity: usize },
    #[error("the symbol t denotes the adjoined root and needs an extension field (e > 1)")]
    TSymbolInPrimeField,
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial has no non-constant monomials")]
    NoMonomials,
    #[error("bound undefined: log4 q <= 4*log4 log4 q at q={0}")]
    DomainError(u128),
    #[error("no strategy hypothesis holds for this polynomial: {0}")]
    StrategyHypothesisUnmet(String),
    #[error("infeasible plan: {0}")]
    InfeasibleCollapse(String),
    #[error("no witness found: {0}")]
    NoWitness(String),
    #[error("0 cannot belong to an F-Diophantine set")]
    ZeroElement,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
