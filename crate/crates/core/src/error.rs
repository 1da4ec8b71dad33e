use thiserror::Error;

/// Errors raised by the analysis operations.
///
/// Regularity violations found by [`crate::graph::EmbeddedGraph::validate`] are
/// reported as data, not through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arc `{0}`")]
    UnknownArc(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("adaptive quadrature did not converge (estimated error {error:e} after {intervals} subintervals)")]
    QuadratureNonconverged { error: f64, intervals: usize },
    #[error("apex lies on arc `{0}`")]
    ApexOnArc(String),
    #[error("apex lies on the graph")]
    ApexOnGraph,
    #[error("arc `{0}` is tangent to the radial direction from the apex")]
    RadialTangency(String),
    #[error("arc endpoint coincides with the apex")]
    EndpointIsApex,
    #[error("two tangent directions coincide")]
    DuplicateDirection,
    #[error("points are antipodal; the minimizing geodesic is not unique")]
    AntipodalPair,
    #[error("operation requires {expected} ambient space")]
    WrongSpace { expected: &'static str },
    #[error("point is not on the model space: {0}")]
    OffModel(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownVertex(_) => "UNKNOWN_VERTEX",
            Error::UnknownArc(_) => "UNKNOWN_ARC",
            Error::DuplicateId(_) => "DUPLICATE_ID",
            Error::Disconnected => "DISCONNECTED",
            Error::UnknownExample(_) => "UNKNOWN_EXAMPLE",
            Error::BadParams(_) => "BAD_PARAMS",
            Error::QuadratureNonconverged { .. } => "QUADRATURE_NONCONVERGED",
            Error::ApexOnArc(_) => "APEX_ON_ARC",
            Error::ApexOnGraph => "APEX_ON_GRAPH",
            Error::RadialTangency(_) => "RADIAL_TANGENCY",
            Error::EndpointIsApex => "ENDPOINT_IS_APEX",
            Error::DuplicateDirection => "DUPLICATE_DIRECTION",
            Error::AntipodalPair => "ANTIPODAL_PAIR",
            Error::WrongSpace { .. } => "WRONG_SPACE",
            Error::OffModel(_) => "OFF_MODEL",
            Error::Schema(_) => "SCHEMA",
        }
    }

    /// True for failures of an iterative numerical method.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::QuadratureNonconverged { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
