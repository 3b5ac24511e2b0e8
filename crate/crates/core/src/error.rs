//! One error type for the whole crate.
//!
//! Everything except `Internal` is a user-facing domain error: bad input
//! geometry, a divisor that fails to be principal, a cochain that fails the
//! cocycle law, and so on. `Internal` marks a violated invariant that the
//! mathematics guarantees, i.e. a bug in this crate, and callers should treat
//! it differently from ordinary failures.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // ---- curve structure ----
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("curve has no vertices")]
    EmptyCurve,
    #[error("curve is not connected")]
    Disconnected,
    #[error("edge `{0}`: length must be a positive rational or infinite")]
    BadLength(String),
    #[error("edge `{0}`: multiplicity must be a positive integer")]
    BadMultiplicity(String),
    #[error("vertex `{0}` is 1-valent on a finite edge; every leaf must have infinite length")]
    FiniteLeaf(String),
    #[error("edge `{0}` has infinite length but no 1-valent infinite endpoint")]
    InfiniteInnerEdge(String),
    #[error("edge `{0}` joins two infinite points; subdivide it with a finite 2-valent vertex")]
    DoubleInfiniteEdge(String),
    #[error("vertex `{0}`: `infinite` flag contradicts incidence (a vertex is infinite iff it is 1-valent on an infinite edge)")]
    BadVertexKind(String),
    #[error("vertex `{0}`: edge multiplicities differ across a 2-valent vertex")]
    MultiplicityMismatchAt2Valent(String),
    #[error("curve is homeomorphic to a circle but edge multiplicities are not all equal")]
    BadCircleMultiplicity,
    #[error("bad point: {0}")]
    BadPoint(String),
    #[error("bad rational literal `{0}`")]
    BadRational(String),
    #[error("malformed input: {0}")]
    BadInput(String),

    // ---- piecewise-linear functions ----
    #[error("objects live on different base curves")]
    BaseMismatch,
    #[error("cannot evaluate at infinite point `{0}`")]
    EvalAtInfinitePoint(String),
    #[error("non-integer slope: {0}")]
    NonIntegerSlope(String),
    #[error("order {value} at {point} is not an integer")]
    NonIntegerOrder { point: String, value: String },

    // ---- automorphisms and groups ----
    #[error("automorphism group is infinite: {0}")]
    InfiniteAutGroup(String),
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("not closed under composition: {0}")]
    NotClosed(String),
    #[error("element list does not contain the identity")]
    MissingIdentity,
    #[error("elements {0} and {1} act identically")]
    DuplicateElement(usize, usize),
    #[error("composition does not stabilize any finite refinement (infinite-order isometry)")]
    InfiniteOrderComposition,

    // ---- divisors and the principal-divisor solver ----
    #[error("divisor has degree {0}, expected 0")]
    DegreeNonzero(i64),
    #[error("not principal: forced slope {slope} on `{edge}` is not an integer")]
    NotPrincipal { edge: String, slope: String },
    #[error("divisor is not invariant under element {0}")]
    NotInvariantDivisor(usize),

    // ---- cohomology and symmetrization ----
    #[error("not a cocycle: {0}")]
    NotACocycle(String),
    #[error("divisor cochain is inconsistent on an orbit: {0}")]
    WellDefinednessViolation(String),
    #[error("divisor class is not invariant: element {element} forces slope {slope} on `{edge}`")]
    NotInvariantClass {
        element: usize,
        edge: String,
        slope: String,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures that signal a bug in this crate rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
