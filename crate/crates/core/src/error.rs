use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("HorizontalViolation: residual {residual:.3e} exceeds {tol:.3e}")]
    HorizontalViolation { residual: f64, tol: f64 },
    #[error("LegendrianViolation: residual {residual:.3e} exceeds {tol:.3e}")]
    LegendrianViolation { residual: f64, tol: f64 },
    #[error("NonGeneric: {0}")]
    NonGeneric(String),
    #[error("DerivTooSmall: frame components vanish at t = {t}")]
    DerivTooSmall { t: f64 },
    #[error("PushoffCollision: no admissible push-off distance")]
    PushoffCollision,
    #[error("DegenerateTangency: branches cannot be ordered at t = ({t0}, {t1})")]
    DegenerateTangency { t0: f64, t1: f64 },
    #[error("AreaObstruction: total area {area:.3e} exceeds {tol:.3e}")]
    AreaObstruction { area: f64, tol: f64 },
    #[error("NotRegular: {0}")]
    NotRegular(String),
    #[error("WindowOverlap: windows around {p} and {n} intersect")]
    WindowOverlap { p: f64, n: f64 },
    #[error("MoveNotApplicable: {0}")]
    MoveNotApplicable(String),
    #[error("ResolutionExhausted: winding not resolved at {0} samples")]
    ResolutionExhausted(usize),
    #[error("NotConverged: raw value {raw} at grid {grid}")]
    NotConverged { raw: f64, grid: usize },
    #[error("NotRegularValue: Jacobian {jac:.3e} at a preimage")]
    NotRegularValue { jac: f64 },
    #[error("BadParameters: {0}")]
    BadParameters(String),
    #[error("InterpolationDegenerate: tangent antiparallel to the target at t0 = {t0}")]
    InterpolationDegenerate { t0: f64 },
    #[error("ParseError: line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
