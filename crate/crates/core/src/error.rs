use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must be connected: vertex `{0}` is unreachable")]
    Disconnected(String),

    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),

    #[error("loop at vertex `{0}`")]
    Loop(String),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(String, String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("graph has no vertices")]
    Empty,

    #[error("vertex index {0} out of range")]
    IndexOutOfRange(usize),

    #[error("not a spanning tree: {0}")]
    NotSpanningTree(String),

    #[error("power k = {0} is not supported (need k >= {1})")]
    InvalidPower(usize, usize),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("enumeration budget exceeded: {needed} items requested, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("invalid Cartesian power: {0}")]
    InvalidCartesianPower(String),

    #[error("monomial has degree {found}, expected {expected}")]
    WrongDegree { expected: usize, found: usize },

    #[error("monomial has {found} exponents, graph has {expected} vertices")]
    WrongArity { expected: usize, found: usize },

    #[error("cannot parse monomial `{0}`")]
    BadMonomial(String),

    #[error("state `{0}` is not a vertex of the reduced power")]
    UnknownState(String),

    #[error("edge vectors belong to different host graphs")]
    MixedHosts,

    #[error("not a cycle: {0}")]
    NotACycle(String),

    #[error("host graph carries no reduced-power edge annotations")]
    Unannotated,

    #[error("invalid rate specification: {0}")]
    InvalidRate(String),

    #[error("structural irreversibility: rate {from} -> {to} is {value} (must be > 0){context}")]
    NonPositiveRate {
        from: String,
        to: String,
        value: String,
        context: String,
    },

    #[error("move {from} -> {to} impossible from state `{state}`: no token on {from}")]
    EmptyOrigin {
        from: String,
        to: String,
        state: String,
    },

    #[error("steady-state solve failed: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
