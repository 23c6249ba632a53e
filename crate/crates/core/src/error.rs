use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two points share an abscissa, so no `y = m x + z` form exists.
    #[error("points ({x1}, {y1}) and ({x2}, {y2}) define a vertical line")]
    VerticalLine { x1: f64, y1: f64, x2: f64, y2: f64 },

    /// The Tx-Rx line is horizontal or vertical, so its mid-perpendicular has no finite slope.
    #[error("Tx-Rx line has degenerate slope (m = {slope})")]
    DegenerateSlope { slope: f64 },

    #[error("lines are parallel (denominator {denominator:e})")]
    ParallelLines { denominator: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature on [{lo}, {hi}] did not reach tolerance {target:e} (estimated error {estimate:e})")]
    QuadratureFailure {
        lo: f64,
        hi: f64,
        estimate: f64,
        target: f64,
    },

    #[error("configuration is degenerate: {0}")]
    DegenerateConfig(String),
}
