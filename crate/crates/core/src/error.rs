use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point ({r}, {x3}) lies outside the domain")]
    OutsideDomain { r: f64, x3: f64 },
    #[error("point ({r}, {x3}) lies outside the slab 0 <= x3 <= 1")]
    OutsideSlab { r: f64, x3: f64 },
    #[error("finite-difference stencil at ({r}, {x3}) crosses a region interface")]
    StepCrossesInterface { r: f64, x3: f64 },
    #[error("axis limit at x3 = {x3} is singular (image radius {radius} at r -> 0)")]
    AxisSingular { x3: f64, radius: f64 },
    #[error("point ({r}, {x3}) is on or too close to a singular set")]
    SingularPoint { r: f64, x3: f64 },
    #[error("trace inversion failed at image angle {theta}")]
    TraceInversionFailed { theta: f64 },
    #[error("argument {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("no sign change bracketing the root on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("nonpositive Jacobian {0}")]
    NonpositiveJacobian(f64),
    #[error("quadrature budget exhausted with error estimate {err} (value {value})")]
    BudgetExceeded { value: f64, err: f64 },
    #[error("samples {a:?} and {b:?} collide under the map")]
    CollisionDetected { a: [f64; 3], b: [f64; 3] },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
