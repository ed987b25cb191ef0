//! Finite covering towers and minimality certificates for closed geodesics
//! on closed hyperbolic surfaces.

pub mod certify;
pub mod checker;
pub mod cover;
pub mod geometry;
pub mod group;
pub mod homology;
pub mod intersect;
pub mod measure;
pub mod partition;

pub use group::{Letter, SurfaceGroup, Word};
pub use homology::{HomologyVector, IntMatrix};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurfcertError {
    #[error("bad word token {token:?} at position {position}")]
    WordSyntax { token: String, position: usize },
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(usize),
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("integer overflow during exact elimination")]
    IntegerOverflow,
    #[error("matrix file line {line}: {message}")]
    MatrixFile { line: usize, message: String },
    #[error("relator holonomy differs from the identity by {0:e}")]
    RelatorResidual(f64),
    #[error("non-hyperbolic element: {0}")]
    NotHyperbolic(String),
    #[error("the trivial word has no closed geodesic")]
    TrivialCurve,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cover index exceeds {0}")]
    IndexTooLarge(usize),
    #[error("invalid cover table: {0}")]
    InvalidCover(String),
    #[error("cover homology has torsion {0:?}")]
    TorsionInHomology(Vec<i64>),
    #[error("json: {0}")]
    Json(String),
    #[error("search incomplete: {0}")]
    SearchIncomplete(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl SurfcertError {
    /// Stable identifier of the error, qualified by the layer that raises it.
    pub fn code(&self) -> &'static str {
        use SurfcertError::*;
        match self {
            WordSyntax { .. } => "surface-group/word-syntax",
            GenusTooSmall(_) => "surface-group/genus",
            GeneratorOutOfRange { .. } => "surface-group/generator-range",
            IntegerOverflow => "covering-spaces/overflow",
            IndexTooLarge(_) => "covering-spaces/index",
            InvalidCover(_) => "covering-spaces/invalid-cover",
            TorsionInHomology(_) => "covering-spaces/torsion",
            MatrixFile { .. } => "fuchsian-geometry/matrix-file",
            RelatorResidual(_) => "fuchsian-geometry/relator-residual",
            NotHyperbolic(_) => "fuchsian-geometry/not-hyperbolic",
            TrivialCurve => "fuchsian-geometry/trivial-curve",
            SearchIncomplete(_) => "curves-partitions/incomplete",
            InvalidParameter(_) => "core/invalid-parameter",
            Json(_) => "core/json",
            Inconsistent(_) => "core/inconsistent",
        }
    }
}

/// Shortest decimal form of `x` after rounding to 15 significant digits.
pub fn round_real(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.14e}", x).parse().unwrap_or(x)
}

pub fn format_real(x: f64) -> String {
    format!("{}", round_real(x))
}
