use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh parameters: {0}")]
    InvalidMesh(String),

    #[error("mesh needs {requested} lattice vertices, budget is {budget}")]
    VertexBudget { requested: usize, budget: usize },

    #[error("field has {got} values, manifold has {expected} vertices")]
    FieldLength { expected: usize, got: usize },

    #[error("conformal factor must be positive and finite (vertex {vertex}: {value})")]
    NonPositiveField { vertex: usize, value: f64 },

    #[error("conformal factor degenerate: min {min:e} below floor {floor:e}")]
    DegenerateField { min: f64, floor: f64 },

    #[error("{op} is not supported on {topology} meshes")]
    Unsupported { op: &'static str, topology: &'static str },

    #[error("point lies outside the chart: {0}")]
    OutsideChart(String),

    #[error("empty region: {0}")]
    EmptyRegion(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge after {iterations} iterations (worst relative residual {worst_residual:e}, tolerance {tolerance:e})")]
    NoConvergence {
        iterations: usize,
        worst_residual: f64,
        tolerance: f64,
        residuals: Vec<f64>,
    },

    #[error("not a metric space: {0}")]
    NotMetric(String),

    #[error("point sets differ: {0}")]
    PointSetMismatch(String),

    #[error("problem too large for exhaustive search: {size} points (limit {limit})")]
    TooLarge { size: usize, limit: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage {
            stage,
            source: Box::new(e),
        }
    }
}
