//! Piecewise Pythagorean-hodograph (PH) parameterization of 3D curves.
//!
//! Given any sufficiently smooth curve, this crate converts it into a
//! piecewise degree-17 PH curve carrying an exact, twice-differentiable
//! moving coordinate system: position, adapted frame (Euler-Rodrigues),
//! angular velocity, parametric speed, arc length, curvature and torsion,
//! all in closed form from a compact set of quaternion coefficients.
//!
//! The conversion splits the curve into uniform segments, interpolates the
//! C4 Hermite data of each segment with a quaternion-preimage construction,
//! removes the residual roll offset between adjacent frames, and refines the
//! segmentation until the maximum deviation from the source curve drops
//! below a requested tolerance. The approximation error decays with the
//! sixth power of the segment width.
//!
//! Modules:
//! - [`quat`]: quaternion algebra, the commutative star product and the
//!   closed-form star-linear / star-quadratic solvers
//! - [`bernstein`]: Bernstein-Bezier polynomials over real, vector and
//!   quaternion coefficients
//! - [`phcurve`]: a single PH segment and its derived coordinate system
//! - [`hermite`]: C4 Hermite interpolation producing one PH segment
//! - [`pipeline`]: segmentation, frame continuity and the tolerance loop
//! - [`ingest`]: curve sources (analytic test curves, spline fits of
//!   sampled data, CSV loading)
//! - [`document`]: serialization of a fitted parameterization
//! - [`verify`]: geometric property checks used by the CLI and tests

pub mod bernstein;
pub mod document;
pub mod hermite;
pub mod ingest;
pub mod phcurve;
pub mod pipeline;
pub mod quat;
pub mod verify;

pub use document::ParameterizationDocument;
pub use hermite::{c4_interpolate, HermiteC4Data, InterpolantParams};
pub use ingest::CurveSource;
pub use phcurve::PHSegment;
pub use pipeline::{phodcos, PHPath, PipelineConfig};
pub use quat::{Quaternion, Vector3};
