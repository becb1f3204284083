use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge length must be positive and finite, got {0}")]
    InvalidEdge(f64),

    #[error("r = {r} outside [{lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },

    #[error("radical {name} has argument {arg} < -tolerance at r = {r}")]
    RadicalDomain { name: &'static str, r: f64, arg: f64 },

    #[error("arcsine argument {arg} outside [-1-tol, 1+tol] in {term}")]
    ArcsineDomain { term: &'static str, arg: f64 },

    #[error("facet index {0} outside 0..8")]
    FacetIndex(usize),

    #[error("facet pair ({0}, {0}) is a self-pair; pair densities are defined for distinct facets")]
    SelfPair(usize),

    #[error("quadrature breakpoints must be sorted, start at 0, and include all branch points; got {0}")]
    BadQuadrature(String),

    #[error("grid must satisfy 0 <= start < stop <= sqrt(2)*edge with count >= 2")]
    BadGrid,

    #[error("invalid Monte Carlo config: {0}")]
    BadMcConfig(String),

    #[error("no interior points accepted; sampling configuration is degenerate")]
    DegenerateSampling,
}

pub type Result<T> = std::result::Result<T, Error>;
