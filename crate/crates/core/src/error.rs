use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
///
/// Variants that come from invariant checks carry the witness that failed,
/// so a rejected input can be located without re-running the check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error("associativity fails for ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element 0 is not a two-sided identity (fails at {0})")]
    BadIdentity(usize),
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("not a homomorphism: f({0}*{1}) != f({0})*f({1})")]
    NotHomomorphism(usize, usize),
    #[error("element set is not a subgroup (witness {0})")]
    NotClosed(usize),
    #[error("conjugation moves point {point} outside the set (by {by})")]
    NotStable { point: usize, by: usize },
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("map is not surjective (element {0} of the target is missed)")]
    NotSurjective(usize),
    #[error("group is not abelian ({0} and {1} do not commute)")]
    NotAbelian(usize, usize),
    #[error("simplicial identity {identity} fails at dimension {dim}, simplex {simplex}")]
    SimplicialIdentity {
        identity: String,
        dim: usize,
        simplex: usize,
    },
    #[error("simplicial map does not commute with {op} at dimension {dim}, simplex {simplex}")]
    NotSimplicial {
        op: String,
        dim: usize,
        simplex: usize,
    },
    #[error("truncation mismatch: {0}")]
    TruncationMismatch(String),
    #[error("space is not connected ({0} components)")]
    NotConnected(usize),
    #[error("group action is invalid: {0}")]
    ActionInvalid(String),
    #[error("truncation dimension {have} is too small, need at least {need}")]
    DimensionBudget { have: usize, need: usize },
    #[error("k-invariant source does not match the previous stage: {0}")]
    MismatchedSource(String),
    #[error("target is not fibrant over the base: horn {horn:?} in dimension {dim} has no filler")]
    NotFibrant { dim: usize, horn: Vec<usize> },
    #[error("tower is incompatible: {0}")]
    IncompatibleTower(String),
    #[error("coverings live over different Galois towers")]
    TowerMismatch,
    #[error("scheme map is not equivariant at point {point} for element {elem}")]
    NotEquivariant { point: usize, elem: usize },
    #[error("covering has the wrong shape: {0}")]
    WrongCoverShape(String),
    #[error("fixed vertex {0} has no assigned homotopy class")]
    UnassignedVertex(usize),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
