//! Conversion pipeline: segment a source curve, interpolate every segment,
//! remove the roll offset between adjacent frames, measure the conversion
//! error and refine the segmentation until it drops below tolerance.
//!
//! The global parameter `Ξ ∈ [ξ0, ξf]` maps onto segment `k`'s local
//! parameter by `Ξ = ξ0 + (k + ξ) h` with uniform width `h`; order-m
//! derivatives of the source therefore enter the Hermite data scaled by
//! `hᵐ`, and frame rates and speeds returned for the global parameter are
//! the local ones divided by `h`.

use thiserror::Error;

use crate::hermite::{c4_interpolate, HermiteC4Data, HermiteError, InterpolantParams};
use crate::ingest::CurveSource;
use crate::phcurve::{FrameSample, Geometry, PHSegment, PhCurveError};
use crate::quat::{rot_i, Vector3};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Hermite(#[from] HermiteError),
    #[error(transparent)]
    PhCurve(#[from] PhCurveError),
    #[error("frame mismatch {mismatch:e} at junction {junction} after both roll signs")]
    ContinuityFailure { junction: usize, mismatch: f64 },
    #[error(
        "error {last_error:e} still above tolerance at the {max_segments}-segment cap"
    )]
    ToleranceUnreachable { max_segments: usize, last_error: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// How the segment count grows between tolerance-loop iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Growth {
    /// `n_s ← n_s + 1`.
    Increment,
    /// `n_s ← 2 n_s`; matches the convergence-study refinement.
    #[default]
    Double,
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineConfig {
    /// Conversion-error tolerance ε.
    pub epsilon: f64,
    pub n_s_init: usize,
    pub growth: Growth,
    /// Dense error-sampling resolution per segment.
    pub samples_per_segment: usize,
    /// Safety cap on the segment count.
    pub max_segments: usize,
}

impl PipelineConfig {
    pub fn new(epsilon: f64) -> Self {
        PipelineConfig {
            epsilon,
            n_s_init: 2,
            growth: Growth::Double,
            samples_per_segment: 1000,
            max_segments: 4096,
        }
    }

    fn validate(&self) -> Result<(), PipelineError> {
        if !(self.epsilon > 0.0) {
            return Err(PipelineError::InvalidConfig("epsilon must be > 0".into()));
        }
        if self.n_s_init < 1 {
            return Err(PipelineError::InvalidConfig("n_s_init must be >= 1".into()));
        }
        if self.samples_per_segment < 2 {
            return Err(PipelineError::InvalidConfig(
                "samples_per_segment must be >= 2".into(),
            ));
        }
        Ok(())
    }
}

/// One row of the tolerance-loop log.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub n_segments: usize,
    pub max_error: f64,
    /// Previous error / this error; absent on the first row.
    pub ratio: Option<f64>,
}

/// A piecewise PH curve over a global parameter range, with uniform
/// segment width. Immutable once built.
#[derive(Debug, Clone)]
pub struct PHPath {
    segments: Vec<PHSegment>,
    xi0: f64,
    xif: f64,
    h: f64,
}

impl PHPath {
    pub fn from_parts(segments: Vec<PHSegment>, xi0: f64, xif: f64) -> Self {
        assert!(!segments.is_empty() && xif > xi0);
        let h = (xif - xi0) / segments.len() as f64;
        PHPath {
            segments,
            xi0,
            xif,
            h,
        }
    }

    pub fn segments(&self) -> &[PHSegment] {
        &self.segments
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xi0, self.xif)
    }

    /// Uniform segment width in the global parameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Resolve a global parameter to `(segment index, local ξ ∈ [0, 1])`.
    pub fn locate(&self, xi: f64) -> (usize, f64) {
        let n = self.segments.len();
        let s = (xi - self.xi0) / self.h;
        let k = (s.floor() as isize).clamp(0, n as isize - 1) as usize;
        let local = (s - k as f64).clamp(0.0, 1.0);
        (k, local)
    }

    pub fn position(&self, xi: f64) -> Vector3 {
        let (k, local) = self.locate(xi);
        self.segments[k].position(local)
    }

    /// Frame, angular velocity and speed at a global parameter; `omega`
    /// and `sigma` are per unit of the global parameter (local values
    /// divided by `h`).
    pub fn frame(&self, xi: f64) -> Result<FrameSample, PhCurveError> {
        let (k, local) = self.locate(xi);
        let mut f = self.segments[k].erf(local)?;
        f.omega = f.omega * (1.0 / self.h);
        f.sigma /= self.h;
        Ok(f)
    }

    /// Arc length (accumulated from ξ0), curvature and torsion at a
    /// global parameter. Curvature and torsion are geometric invariants,
    /// so no rescaling is needed; arc length sums whole preceding
    /// segments plus the partial current one.
    pub fn geometry(&self, xi: f64) -> Result<Geometry, PhCurveError> {
        let (k, local) = self.locate(xi);
        let mut g = self.segments[k].geometry(local)?;
        for seg in &self.segments[..k] {
            g.arc_length += seg.arc_length();
        }
        Ok(g)
    }

    pub fn arc_length(&self) -> f64 {
        self.segments.iter().map(PHSegment::arc_length).sum()
    }
}

/// C4 Hermite data of segment `k` out of `n_s`, with the order-m source
/// derivative scaled by `hᵐ` for the local parameter.
pub fn extract_segment_data(src: &dyn CurveSource, k: usize, n_s: usize) -> HermiteC4Data {
    assert!(k < n_s);
    let (xi0, xif) = src.domain();
    let h = (xif - xi0) / n_s as f64;
    let xi_b = xi0 + k as f64 * h;
    let xi_e = xi_b + h;
    let d = |xi: f64, m: usize| src.evaluate(xi, m) * h.powi(m as i32);
    HermiteC4Data {
        p_b: d(xi_b, 0),
        p_e: d(xi_e, 0),
        v_b: d(xi_b, 1),
        v_e: d(xi_e, 1),
        a_b: d(xi_b, 2),
        a_e: d(xi_e, 2),
        j_b: d(xi_b, 3),
        j_e: d(xi_e, 3),
        s_b: d(xi_b, 4),
        s_e: d(xi_e, 4),
    }
}

/// Interpolate every segment of a uniform `n_s`-split of the source with
/// zero free parameters. No continuity pass is applied here.
pub fn interpolate_path(src: &dyn CurveSource, n_s: usize) -> Result<PHPath, PipelineError> {
    let (xi0, xif) = src.domain();
    let params = InterpolantParams::default();
    let segments = (0..n_s)
        .map(|k| Ok(c4_interpolate(&extract_segment_data(src, k, n_s), &params)?))
        .collect::<Result<Vec<_>, PipelineError>>()?;
    Ok(PHPath::from_parts(segments, xi0, xif))
}

/// Junction frame mismatch after right-multiplying segment preimage
/// control points by `Q_{angle}`.
fn junction_mismatch(prev: &PHSegment, next: &PHSegment) -> Result<f64, PipelineError> {
    let a = prev.erf(1.0)?.rotation;
    let b = next.erf(0.0)?.rotation;
    Ok(a.frobenius_distance(&b))
}

fn rolled(seg: &PHSegment, angle: f64) -> PHSegment {
    let q = rot_i(angle);
    let pre = std::array::from_fn(|i| seg.preimage()[i] * q);
    PHSegment::new(pre, seg.start_point())
}

const JUNCTION_TOL: f64 = 1e-6;

/// Remove the roll-angle offset between the frames of consecutive
/// segments. For each junction the roll angle α between the normal-plane
/// axes is measured and segment k+1's preimage is rotated along its fiber
/// by `Q_{±α/2}` (the sign that closes the frame gap); the control-point
/// sign is then flipped if the opposite sheet of the double cover is
/// closer. The curve itself is unchanged throughout.
pub fn enforce_frame_continuity(path: PHPath) -> Result<PHPath, PipelineError> {
    let PHPath {
        mut segments,
        xi0,
        xif,
        ..
    } = path;
    for k in 0..segments.len().saturating_sub(1) {
        let prev_frame = segments[k].erf(1.0)?.rotation;
        let next_frame = segments[k + 1].erf(0.0)?.rotation;
        let e2p = prev_frame.col(1);
        let alpha = e2p.dot(next_frame.col(2)).atan2(e2p.dot(next_frame.col(1)));
        let plus = rolled(&segments[k + 1], 0.5 * alpha);
        let minus = rolled(&segments[k + 1], -0.5 * alpha);
        let m_plus = junction_mismatch(&segments[k], &plus)?;
        let m_minus = junction_mismatch(&segments[k], &minus)?;
        let (mut best, mismatch) = if m_plus <= m_minus {
            (plus, m_plus)
        } else {
            (minus, m_minus)
        };
        if mismatch > JUNCTION_TOL {
            return Err(PipelineError::ContinuityFailure {
                junction: k,
                mismatch,
            });
        }
        // stay on one sheet of the double cover
        let a_end = segments[k].preimage_at(1.0);
        let a_start = best.preimage_at(0.0);
        if (a_start + a_end).norm() < (a_start - a_end).norm() {
            let pre = std::array::from_fn(|i| -best.preimage()[i]);
            best = PHSegment::new(pre, best.start_point());
        }
        segments[k + 1] = best;
    }
    Ok(PHPath::from_parts(segments, xi0, xif))
}

/// Maximum same-parameter deviation `‖γ(Ξ) − 𝒑ᵏ(ξ)‖` over a dense uniform
/// sampling of every segment.
pub fn conversion_error(src: &dyn CurveSource, path: &PHPath, samples_per_segment: usize) -> f64 {
    assert!(samples_per_segment >= 2);
    let (xi0, _) = path.domain();
    let h = path.h();
    let mut worst = 0.0f64;
    for (k, seg) in path.segments().iter().enumerate() {
        for s in 0..=samples_per_segment {
            let local = s as f64 / samples_per_segment as f64;
            let global = xi0 + (k as f64 + local) * h;
            let err = (src.evaluate(global, 0) - seg.position(local)).norm();
            worst = worst.max(err);
        }
    }
    worst
}

fn build_once(src: &dyn CurveSource, n_s: usize) -> Result<PHPath, PipelineError> {
    enforce_frame_continuity(interpolate_path(src, n_s)?)
}

/// The full conversion loop: interpolate at the current segment count,
/// fix frame continuity, measure the error, and refine until it drops
/// below `cfg.epsilon`. A degenerate segment triggers one automatic retry
/// at doubled `n_s` before the error propagates.
pub fn phodcos(
    src: &dyn CurveSource,
    cfg: &PipelineConfig,
) -> Result<(PHPath, Vec<ConvergenceRow>), PipelineError> {
    cfg.validate()?;
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut n_s = cfg.n_s_init;
    let mut prev_error: Option<f64> = None;
    loop {
        let path = match build_once(src, n_s) {
            Ok(p) => p,
            Err(e @ (PipelineError::Hermite(_) | PipelineError::PhCurve(_))) => {
                if 2 * n_s <= cfg.max_segments {
                    match build_once(src, 2 * n_s) {
                        Ok(p) => {
                            n_s *= 2;
                            p
                        }
                        Err(_) => return Err(e),
                    }
                } else {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        };
        let error = conversion_error(src, &path, cfg.samples_per_segment);
        rows.push(ConvergenceRow {
            n_segments: n_s,
            max_error: error,
            ratio: prev_error.map(|p| p / error),
        });
        if error < cfg.epsilon {
            return Ok((path, rows));
        }
        prev_error = Some(error);
        let next = match cfg.growth {
            Growth::Increment => n_s + 1,
            Growth::Double => n_s * 2,
        };
        if next > cfg.max_segments {
            return Err(PipelineError::ToleranceUnreachable {
                max_segments: cfg.max_segments,
                last_error: error,
            });
        }
        n_s = next;
    }
}
