//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by model construction, signature computation, kernels,
/// reliability queries, and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("component `{0}` has no state assignment")]
    UnassignedComponent(String),

    #[error("invalid component name `{0}`: names are non-empty tokens of letters, digits and underscores")]
    InvalidComponentName(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("structure is not monotone: state {{{lower}}} functions but superset {{{upper}}} does not")]
    NonMonotone { lower: String, upper: String },

    #[error("boundary violation: {0}")]
    BoundaryViolation(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("structure references undeclared component `{0}`")]
    UnknownComponent(String),

    #[error("component `{component}` references undeclared type `{type_name}`")]
    UnknownType { component: String, type_name: String },

    #[error("duplicate system name `{0}`")]
    DuplicateSystemName(String),

    #[error("duplicate component `{0}`")]
    DuplicateComponent(String),

    #[error("duplicate type `{0}`")]
    DuplicateType(String),

    #[error("invalid system name `{0}`: names are non-empty tokens of letters, digits and underscores")]
    InvalidSystemName(String),

    #[error("expected a model with {expected} systems, found {found}")]
    WrongArity { expected: String, found: usize },

    #[error("expected a model with {expected} component type(s), found {found}")]
    WrongTypeCount { expected: usize, found: usize },

    #[error("level {level} out of range 0..={max} for {what}")]
    LevelOutOfRange {
        what: String,
        level: usize,
        max: usize,
    },

    #[error("level vector infeasible for the time ordering: {0}")]
    InfeasibleLevels(String),

    #[error("query level vector is infeasible for the table ordering: {0}")]
    InfeasibleQuery(String),

    #[error("invalid time {0}: times must be finite and nonnegative")]
    NegativeTime(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("conditioning on a null event: {0}")]
    ConditioningOnNullEvent(String),

    #[error("invalid time order: {0}")]
    InvalidTimeOrder(String),

    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("event `{0}` is not monotone; bounds require a monotone event kind")]
    NonMonotoneEvent(String),

    #[error("invalid order specification `{0}`")]
    InvalidOrder(String),

    #[error("invalid table document: {0}")]
    InvalidTable(String),

    #[error("invalid model file: {0}")]
    InvalidModelFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
