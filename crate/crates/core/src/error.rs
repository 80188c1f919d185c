use thiserror::Error;

use crate::rational::Rational;

/// Errors raised by the domain operations.
///
/// Parse and schema failures live in [`crate::manifest::ManifestError`]; this
/// enum only covers data that parsed but is mathematically inconsistent.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("partial dilatation needs nonzero p and q")]
    ZeroDilatationEntry,

    #[error("slope vector must be nonzero")]
    ZeroSlope,

    #[error("slope multiplicity must be positive")]
    ZeroMultiplicity,

    #[error("sublattice basis is degenerate (determinant 0)")]
    DegenerateCover,

    #[error("gluing matrix has determinant {det}, expected +1 or -1")]
    BadGluing { det: i128 },

    #[error("h = {value} is not an integer")]
    NonIntegralH { value: Rational },

    #[error("l+ - l- = ({0}, {1}) is not an integer multiple of the reduction curve")]
    NotParallel(i128, i128),

    #[error("reduction curve must be primitive with multiplicity 1")]
    NonPrimitiveReductionCurve,

    #[error("twist power m must be positive")]
    ZeroTwistPower,

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("graph is not well formed: {0}")]
    InvalidGraph(String),

    #[error("not a covering: {0}")]
    NotACovering(String),

    #[error("crossing {crossing} on torus {torus} is not flow transverse: curve is parallel to the {side} degeneracy slope")]
    NotFlowTransverse {
        crossing: String,
        torus: String,
        side: &'static str,
    },

    #[error("bad segment: {0}")]
    BadSegment(String),

    #[error("flow manifest is not well formed: {0}")]
    InvalidManifest(String),

    #[error("bad parameters: {0}")]
    BadParams(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
