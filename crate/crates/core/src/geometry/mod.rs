//! Exact projective geometry at desk scale: Veronese and Segre maps, linear
//! projections to the plane, recovery of plane curves from points, and the
//! property checks built on them. All arithmetic is exact.

pub mod chow;
pub mod curve;
pub mod linalg;
pub mod point;
pub mod poly;
pub mod projection;
pub mod random;
pub mod segre;
pub mod suites;
pub mod veronese;

use num_bigint::BigUint;
use thiserror::Error;

use crate::magnitude::exact;

pub use chow::{
    chow_determinant_vector, image_dimension_check, match_via_projections, project_curve_to_plane_chow,
    recover_plane_curve, ImageDimension, MatchOutcome, PlaneChowPoint, ProjectedCurve,
};
pub use curve::{sample_curve, ParameterizedCurve};
pub use point::ProjectivePoint;
pub use poly::HomogeneousPolynomial;
pub use projection::{apply_projection, build_chart_projections, build_projections, nondegeneracy_determinant, LinearProjection};
pub use segre::{segre_embed, segre_pushforward_equations, SegrePushforward};
pub use veronese::{perturb_veronese, veronese_embed};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("all coordinates vanish")]
    ZeroVector,
    #[error("invalid projection nodes: {0}")]
    InvalidBetas(String),
    #[error("point lies in the center of the projection")]
    InLightSource,
    #[error("points lie on a {nullity}-dimensional family of curves of this degree")]
    AmbiguousCurve { nullity: usize },
    #[error("no curve of this degree passes through the points")]
    NoCurve,
    #[error("every maximal minor vanishes")]
    DegenerateSubsystem,
    #[error("the image is a single point")]
    ImageIsPoint,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("perturbation rejected: {0}")]
    PerturbationRejected(String),
    #[error("projection matrix does not have rank 3")]
    RankDeficient,
    #[error("found {found} distinct image points, need {needed}")]
    InsufficientSamples { found: usize, needed: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// `C(4 delta0 + M, M)`: hyperplanes in general position through which a
/// transversal one to a curve of degree `2 delta0` must pass, since its
/// dual has degree at most `4 delta0`.
pub fn dual_degree_transversality_budget(delta0: &BigUint, big_m: &BigUint) -> Result<BigUint, GeometryError> {
    if delta0 < &BigUint::from(1u32) || big_m < &BigUint::from(3u32) {
        return Err(GeometryError::InvalidArgument("need delta0 >= 1 and M >= 3".into()));
    }
    Ok(exact::binomial(&(delta0 * 4u32 + big_m), big_m))
}
