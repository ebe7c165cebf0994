use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the
/// individual modules; most carry enough context to be actionable from
/// the command line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // network validation
    #[error("graph contains a directed cycle")]
    CyclicGraph,
    #[error("source vertex {0} has incoming edges")]
    SourceHasInEdges(String),
    #[error("terminal vertex {0} has outgoing edges")]
    TerminalHasOutEdges(String),
    #[error("terminal {0} is not reachable from the source")]
    UnreachableTerminal(String),
    #[error("intermediate vertex {0} lies on no source-terminal path")]
    DanglingIntermediate(String),
    #[error("terminal set is empty")]
    EmptyTerminalSet,
    #[error("source may not be a terminal")]
    SourceIsTerminal,
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("edge id {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("network has {0} vertices, above the limit of {1} for exhaustive cut enumeration")]
    TooManyVertices(usize, usize),

    // graph queries
    #[error("vertex {0} cannot reach vertex {1}")]
    Unreachable(String, String),
    #[error("vertex {0} is not a terminal")]
    NotATerminal(String),
    #[error("edge set {0:?} does not precede edge set {1:?}")]
    NotPreceding(Vec<usize>, Vec<usize>),

    // channels
    #[error("channel input space has {0} elements, above the configured limit {1}")]
    DomainTooLarge(u128, u128),
    #[error("channel spaces are incompatible: {0}")]
    SpaceMismatch(String),
    #[error("code word lies outside the channel input space")]
    WordOutsideDomain,

    // finite fields and MDS codes
    #[error("{0} is not a prime power <= 256")]
    NotPrimePower(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("received word is not decodable within the error radius")]
    DecodeFailure,
    #[error("alphabet size {needed} required, field has order {have}")]
    SuggestedMinimumField { needed: usize, have: usize },

    // network codes
    #[error("arity mismatch at {0}: expected {1}, got {2}")]
    ArityMismatch(String, usize, usize),
    #[error("error pattern touches edge {0} outside the vulnerable set")]
    ErrorOutsideVulnerableSet(usize),
    #[error("network code field does not match the requested alphabet")]
    FieldMismatch,

    // schemes, bounds, reductions
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("network is not a simple 2-level network")]
    NotTwoLevel,
    #[error("network is not a simple 3-level network")]
    NotSimple3Level,
    #[error("invalid cut pair: {0}")]
    InvalidCutPair(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("level matrix dimensions do not chain: {0}")]
    DimensionMismatch(String),

    // search
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
