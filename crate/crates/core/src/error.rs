use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid arguments to a curve constructor.
    #[error("construction error: {0}")]
    Construction(String),

    /// A parameter outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The curve passes through itself, so a pairwise kernel is singular.
    #[error("singular integrand: {0}")]
    SingularIntegrand(String),

    /// Embeddedness was lost during a deformation.
    #[error("embeddedness lost: {0}")]
    NotEmbedded(String),

    /// Tangent vanishes outside the declared constant interval.
    #[error("zero tangent at sample {index} outside the constant interval")]
    ZeroTangent { index: usize },

    /// Consecutive indicatrix vertices are antipodal, so the connecting geodesic is ambiguous.
    #[error("antipodal consecutive indicatrix vertices at {index}")]
    AntipodalVertices { index: usize },

    /// A construction invariant failed; this indicates a bug or an unsupported input.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(#[from] serde_json::Error),
}

impl Error {
    /// Short stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Construction(_) => "construction",
            Error::Domain(_) => "domain",
            Error::SingularIntegrand(_) => "singular_integrand",
            Error::NotEmbedded(_) => "not_embedded",
            Error::ZeroTangent { .. } => "zero_tangent",
            Error::AntipodalVertices { .. } => "antipodal_vertices",
            Error::Invariant(_) => "invariant",
            Error::Io(_) => "io",
            Error::Format(_) => "format",
        }
    }
}
