use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("vector is not on the light cone (form value {form:.3e})")]
    NotNull { form: f64 },

    #[error("projective point lies at infinity (vanishing first component)")]
    PointAtInfinity,

    #[error("grid too small: need at least {need} nodes per axis, got {got}")]
    GridTooSmall { need: usize, got: usize },

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("evaluation failed at (u,v)=({u:.6},{v:.6}): {what}")]
    Eval { what: String, u: f64, v: f64 },

    #[error("surface definition invalid: {0}")]
    BadSurface(String),

    #[error("no umbilic-free nodes survive masking; invariants are undefined here")]
    NoUsableNodes,

    #[error("field is not normal to the surface (tangential residual {residual:.3e})")]
    NotNormal { residual: f64 },

    #[error("dual construction needs a parallel Hopf direction; defect {defect:.3e} exceeds {limit:.0e}")]
    NotSWillmore { defect: f64, limit: f64 },

    #[error("operation requires an R3 chart, surface targets {target}")]
    TargetNotR3 { target: &'static str },

    #[error("initial frame violates {what}: residual {residual:.3e}")]
    BadFrameInit { what: String, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
