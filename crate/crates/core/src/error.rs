use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised while building models or answering causal queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(String),
    #[error("range of `{0}` is empty")]
    EmptyRange(String),
    #[error("value `{value}` appears twice in the range of `{var}`")]
    DuplicateValue { var: String, value: String },
    #[error("no equation for endogenous variable `{0}`")]
    MissingEquation(String),
    #[error("more than one equation for `{0}`")]
    DuplicateEquation(String),
    #[error("`{0}` is exogenous and cannot have an equation")]
    EquationForExogenous(String),
    #[error("cyclic model: {}", .cycle.join(" -> "))]
    CyclicModel { cycle: Vec<String> },
    #[error("equation for `{target}` yields `{value}`, outside its range, at {assignment}")]
    OutOfRangeEquationOutput {
        target: String,
        assignment: String,
        value: String,
    },
    #[error("equation for `{target}` cannot be evaluated at {assignment}: {reason}")]
    EquationEval {
        target: String,
        assignment: String,
        reason: String,
    },
    #[error("table for `{target}`: {reason}")]
    InvalidTable { target: String, reason: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value `{value}` is not in the range of `{var}`")]
    ValueOutOfRange { var: String, value: String },
    #[error("`{0}` is exogenous; only endogenous variables are allowed here")]
    NotEndogenous(String),
    #[error("variable `{0}` appears more than once")]
    RepeatedVariable(String),
    #[error("{what} has {size} settings, above the limit of {limit}")]
    ScaleExceeded {
        what: String,
        size: u128,
        limit: u64,
    },
    #[error("formula contains an intervention, which is not allowed here")]
    FormulaContainsIntervention,
    #[error("interventions cannot be nested")]
    NestedIntervention,
    #[error("intervention is empty")]
    EmptyIntervention,
    #[error("candidate conjunction is empty")]
    EmptyCandidate,
    #[error("conditioning event has probability zero: {0}")]
    ZeroProbabilityCondition(String),
    #[error("weights sum to {0}, not 1")]
    WeightSumNotOne(String),
    #[error("weight {0} is negative")]
    NegativeWeight(String),
    #[error("goodness value {0} is outside [0, 1]")]
    InvalidGoodness(String),
    #[error("model is not a depth-two classifier: {0}")]
    NotDepthTwoModel(String),
    #[error("no context survives the restriction")]
    EmptyRestriction,
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("invalid rational `{0}`")]
    InvalidRational(String),
    #[error("{0}")]
    Invalid(String),
}
