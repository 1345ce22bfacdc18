use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // kernel
    #[error("malformed linear system: {0}")]
    MalformedSystem(String),
    #[error("linear system has no feasible solution")]
    Infeasible,
    #[error("objective is unbounded over the solution set")]
    Unbounded,
    #[error("invalid probability interval [{lower}, {upper}]")]
    InvalidInterval { lower: String, upper: String },
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    // logic
    #[error("formula syntax error at column {column}: {message}")]
    ParseFormula { column: usize, message: String },
    #[error("atom {0:?} has no truth value in the assignment")]
    UnboundAtom(String),
    #[error("{atoms} atoms exceed the enumeration cap of {cap}")]
    AtomLimitExceeded { atoms: usize, cap: usize },

    // deduction
    #[error("rule shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("multiple derivation needs identical sentences, got {0} and {1}")]
    SentenceMismatch(String, String),
    #[error("inconsistent premises: intervals for {sentence} do not intersect")]
    InconsistentPremises { sentence: String },
    #[error("budget must be at least 1")]
    InvalidBudget,

    // worlds / decide
    #[error("at least two distinct conditions are required")]
    DegenerateConditions,
    #[error("semantic tree would exceed the cap of {cap} leaves")]
    LeafLimitExceeded { cap: usize },
    #[error("sentence {0} is already in the tree")]
    DuplicateSentence(String),
    #[error("condition {0} cannot be evaluated from the tree sentences")]
    ConditionNotInTree(String),
    #[error("conditions do not partition the variables: {0}")]
    ConditionPartition(String),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("the credal set is empty; the belief state is inconsistent")]
    InfeasibleCredal,
    #[error("admissible set is empty")]
    EmptyAdmissible,
    #[error("invalid decision problem: {0}")]
    InvalidProblem(String),

    // maxent
    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),
    #[error("solution set is a single point")]
    DegenerateSegment,
    #[error("point does not lie in the solution set")]
    PointNotInSet,
    #[error("solution set has dimension {0}; only segments are supported")]
    UnsupportedDimension(usize),

    // input files
    #[error("line {line}, column {column}: {message}")]
    InvalidFile { line: usize, column: usize, message: String },
    #[error("{context}: {source}")]
    Located { context: String, source: Box<Error> },

    // pdb
    #[error("not a subset: {0}")]
    NotASubset(String),
    #[error("scheme is not a refinement of the database scheme: {0}")]
    NotARefinement(String),
    #[error("ambiguous projection: {0}")]
    AmbiguousProjection(String),
    #[error("inconsistent database: {0}")]
    InconsistentDatabase(String),
    #[error("condition attribute {0} appears in no table")]
    UncoveredCondition(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("unknown attribute or value: {0}")]
    Unknown(String),
}

impl Error {
    /// The innermost error under any [`Error::Located`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Located { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn at(self, context: impl Into<String>) -> Error {
        Error::Located { context: context.into(), source: Box::new(self) }
    }
}
