//! Crate-wide error type.

/// Errors produced by mesh construction, spline evaluation, FEM solves,
/// gradient evaluation, and the optimization drivers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("thickness at station {index} is {value} m, below the admissible minimum {min} m")]
    NonPositiveThickness { index: usize, value: f64, min: f64 },

    #[error("triangle {element} has nonpositive signed area {area}")]
    DegenerateCell { element: usize, area: f64 },

    #[error("sample x = {x} lies outside the knot span [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("least-squares system is rank deficient: {detail}")]
    RankDeficient { detail: String },

    #[error("linear solve failed: {detail}")]
    SolveFailure { detail: String },

    #[error("analytic intensity oracle requires an integer Weibull module, got m = {m}")]
    NonIntegerM { m: f64 },

    #[error("boundary facet {facet} has length {length} below 1e-14")]
    DegenerateFacet { facet: usize, length: f64 },

    #[error("every component of the volume gradient is below 1e-14; scaling ratio undefined")]
    AllRatiosUndefined,

    #[error("line search found no admissible step within {max_halvings} halvings")]
    StepFailure { max_halvings: u32 },

    #[error("config parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config key `{key}` invalid: {message}")]
    Validation { key: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether an optimizer line search may treat this error as a failed
    /// sufficient-decrease check (infeasible candidate shape) rather than
    /// aborting the run.
    #[must_use]
    pub fn is_infeasible_shape(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveThickness { .. } | Error::DegenerateCell { .. }
        )
    }
}
