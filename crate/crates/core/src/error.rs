//! Error types, grouped by subsystem.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("not a chain complex: {0}")]
    NotAComplex(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("not a short exact sequence: {0}")]
    NotExact(String),
    #[error("consistency failure: {0}")]
    ConsistencyFailure(String),
}

#[derive(Debug, Error)]
pub enum SurgeryError {
    #[error("twist curve {0} is not an embedded aux curve")]
    NonEmbeddedTwistCurve(String),
    #[error("curve {0} is an alpha curve; alpha curves are never twisted")]
    TargetIsAlpha(String),
    #[error("bigon between the pair contains basepoint region {0}")]
    BasepointInBigon(String),
    #[error("finger move would pass through basepoint region {0}")]
    CrossesBasepointRegion(String),
    #[error("invalid finger move: {0}")]
    InvalidFingerMove(String),
    #[error("invalid surgery: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum OpenBookError {
    #[error("unsupported page: {0}")]
    UnsupportedPage(String),
    #[error("twist curve {0} does not lie in the inverted-page half")]
    TwistCurveOutsidePage(String),
    #[error("no adapted knot configuration: {0}")]
    NoAdaptedConfiguration(String),
    #[error("delta curve is not adapted: {0}")]
    DeltaNotAdapted(String),
}

#[derive(Debug, Error)]
pub enum FloerError {
    #[error("diagram is not nice: {0}")]
    NotNice(String),
    #[error("diagram is not admissible: violating domain {0}")]
    NotAdmissible(String),
    #[error("domain corners do not match the generator pair: {0}")]
    CornerMismatch(String),
    #[error("missing marks on the diagram: {0}")]
    MissingMarks(String),
    #[error("generator splitting violated: nonzero lower-left block entry {0}")]
    SplittingViolated(String),
    #[error("nicify step budget exhausted after {steps} steps; remaining badness {badness}")]
    StepBudgetExhausted { steps: usize, badness: usize, audit: String },
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("complex validation failed: {0}")]
    Invalid(String),
    #[error("unknown id: {0}")]
    UnknownId(String),
    #[error("serialization: {0}")]
    Serde(String),
}

/// Pipeline errors carry the stage at which the underlying failure occurred.
#[derive(Debug, Error)]
#[error("stage {stage}: {source}")]
pub struct PipelineError {
    pub stage: &'static str,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

impl PipelineError {
    pub fn new<E>(stage: &'static str, source: E) -> Self
    where
        E: std::error::Error + Send + Sync + 'static,
    {
        PipelineError { stage, source: Box::new(source) }
    }
}
