use thiserror::Error;

/// Domain errors shared by the engines. Parse errors have their own type in
/// the ATDL module; validation findings are data, not errors.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("scale value {value} is outside 1..=5")]
    ScaleOutOfRange { value: u8 },

    #[error("bundle has no attack tree")]
    MissingTree,

    #[error("unknown tree node `{0}`")]
    UnknownNode(String),

    #[error("unknown goal `{0}`")]
    UnknownGoal(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unknown risk `{0}`")]
    UnknownRisk(String),

    #[error("unknown corpus `{0}`")]
    UnknownCorpus(String),

    #[error("risk `{risk}` has no resolvable candidate path")]
    NoCandidatePaths { risk: String },

    #[error("path likelihood requires at least one binding")]
    EmptyBindingList,

    #[error("pin {pin} on vector `{vector}` lies outside the admissible range [{min},{max}]")]
    PinOutsideRange { vector: String, pin: u8, min: u8, max: u8 },

    #[error("path enumeration exceeded the budget of {budget} paths")]
    PathBudgetExceeded { budget: usize },

    #[error("brute-force enumeration refused: {leaves} leaves exceed the limit of {limit}")]
    TooManyLeaves { leaves: usize, limit: usize },

    #[error("vector `{0}` has no satisfiable attack path")]
    InfeasibleVector(String),

    #[error("bundle failed validation with {errors} error(s)")]
    InvalidBundle { errors: usize },

    #[error("bundle cannot be serialized: {reason} (at {entity})")]
    Unserializable { entity: String, reason: String },

    #[error("highlighted steps do not satisfy the tree root")]
    InvalidHighlight,

    #[error("scenario `{scenario}` references unknown id `{id}`")]
    UnknownScenarioRef { scenario: String, id: String },
}
