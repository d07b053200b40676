use thiserror::Error;

/// Errors produced by the direct and inverse solvers.
#[derive(Debug, Error)]
pub enum TevpError {
    #[error("refractive index is not positive at r = {r} (n = {value})")]
    NonPositiveIndex { r: f64, value: f64 },

    #[error("inversion of the travel-time map failed: {0}")]
    QuadratureFailure(String),

    #[error("zeta = {zeta} lies outside [0, {delta}]")]
    OutOfDomain { zeta: f64, delta: f64 },

    #[error("phi(0, zeta) vanishes near zeta = {zeta}; the coefficient recurrence needs 1/f^2")]
    VanishingF { zeta: f64 },

    #[error("coefficient recurrence overflowed at sigma_{order}")]
    RecurrenceOverflow { order: usize },

    #[error(
        "characteristic function vanishes on the contour of box \
         [{re_min}, {re_max}] x [{im_min}, {im_max}]i"
    )]
    ZeroOnContour {
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
    },

    #[error("winding numbers are not additive on box [{re_min}, {re_max}] x [{im_min}, {im_max}]i")]
    WindingMismatch {
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
    },

    #[error("characteristic function is identically zero on the sampled segment")]
    DegenerateIdenticallyZero,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("linear system needs at least {needed} equations, got {available}")]
    DimensionError { needed: usize, available: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("expression error: {0}")]
    Expression(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl TevpError {
    /// Whether the error stems from bad input rather than a numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            TevpError::InvalidInput(_)
                | TevpError::Expression(_)
                | TevpError::OutOfDomain { .. }
                | TevpError::DimensionError { .. }
                | TevpError::NonPositiveIndex { .. }
                | TevpError::Io(_)
                | TevpError::Json(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            TevpError::NonPositiveIndex { .. } => "NonPositiveIndex",
            TevpError::QuadratureFailure(_) => "QuadratureFailure",
            TevpError::OutOfDomain { .. } => "OutOfDomain",
            TevpError::VanishingF { .. } => "VanishingF",
            TevpError::RecurrenceOverflow { .. } => "RecurrenceOverflow",
            TevpError::ZeroOnContour { .. } => "ZeroOnContour",
            TevpError::WindingMismatch { .. } => "WindingMismatch",
            TevpError::DegenerateIdenticallyZero => "DegenerateIdenticallyZero",
            TevpError::DegenerateFit(_) => "DegenerateFit",
            TevpError::DimensionError { .. } => "DimensionError",
            TevpError::InvalidInput(_) => "InvalidInput",
            TevpError::Expression(_) => "Expression",
            TevpError::Io(_) => "Io",
            TevpError::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, TevpError>;
