use thiserror::Error;

/// Errors reported by every fallible operation in this crate.
///
/// Variants split into two families. Input problems (`InvalidInput`,
/// `WrongShape`, `Parse`) mean the caller handed us data that does not
/// describe a well-formed object. Mathematical failures (`NotPositive`,
/// `NotCp`, `NotPhiMap`, ...) mean the object is well-formed but the
/// property being certified does not hold.
#[derive(Debug, Error)]
pub enum Error {
    /// Dimension mismatches, incompatible algebras, non-finite entries.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix or Gram expected to be positive semidefinite is not.
    #[error("not positive semidefinite: {0}")]
    NotPositive(String),

    /// A linear map expected to be completely positive is not.
    #[error("not completely positive: {0}")]
    NotCp(String),

    /// Inner products of the domain module do not span its coefficient
    /// algebra, so no map can be inferred uniquely.
    #[error("inner products do not span the coefficient algebra: {0}")]
    NotFull(String),

    /// No linear map is consistent with the supplied module map.
    #[error("no consistent linear map exists: {0}")]
    Inconsistent(String),

    /// The module map fails the inner-product compatibility test.
    #[error("not a phi-map: {0}")]
    NotPhiMap(String),

    /// A candidate map does not vanish on null vectors of its domain.
    #[error("map does not vanish on null vectors: {0}")]
    WellDefinednessFailure(String),

    /// A candidate map does not preserve inner products.
    #[error("not an isometry: {0}")]
    NotIsometry(String),

    /// The operation needs a specific shape (single matrix block,
    /// operator-model codomain) that the input does not have.
    #[error("unsupported shape: {0}")]
    WrongShape(String),

    /// Malformed instance files.
    #[error("parse error: {0}")]
    Parse(String),

    /// Internal inconsistency; indicates corrupted intermediate data.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of a mathematical check on well-formed input,
    /// false for malformed input. The CLI maps the former to exit code 1
    /// and the latter to exit code 2.
    pub fn is_check_failure(&self) -> bool {
        matches!(
            self,
            Error::NotPositive(_)
                | Error::NotCp(_)
                | Error::NotFull(_)
                | Error::Inconsistent(_)
                | Error::NotPhiMap(_)
                | Error::WellDefinednessFailure(_)
                | Error::NotIsometry(_)
        )
    }
}
