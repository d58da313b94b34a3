use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("design variable `{name}` = {value} outside [{lo}, {hi}]")]
    OutOfBounds {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),

    #[error("hydrodynamic coefficients: field `{field}` row {row}: {reason}")]
    Coefficients {
        field: &'static str,
        row: usize,
        reason: String,
    },

    #[error("coefficient file does not match geometry (file {file}, expected {expected})")]
    StaleCoefficients { file: String, expected: String },

    #[error("frequency {omega} rad/s outside tabulated range [{lo}, {hi}]")]
    Extrapolation { omega: f64, lo: f64, hi: f64 },

    #[error("accumulator over-full: liquid volume {liquid} m3 >= capacity {capacity} m3")]
    AccumulatorOverfull { liquid: f64, capacity: f64 },

    #[error("degenerate mechanism geometry at theta = {theta} rad")]
    DegenerateMechanism { theta: f64 },

    #[error("infeasible cost model: {0}")]
    InfeasibleCost(String),

    #[error("parameter `{key}`: {reason}")]
    Parameter { key: String, reason: String },

    #[error("NDBC format error at line {line}: {reason}")]
    NdbcFormat { line: usize, reason: String },

    #[error("clustering: {0}")]
    Clustering(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
