//! Geometric property suites: planarity, rigid-motion invariance,
//! reversion, fiber invariance and the PH condition, packaged as
//! pass/fail reports for the CLI and the acceptance tests.

use crate::hermite::{c4_interpolate, c4_interpolate_full, InterpolantParams};
use crate::ingest::CurveSource;
use crate::phcurve::PHSegment;
use crate::pipeline::{enforce_frame_continuity, extract_segment_data, interpolate_path};
use crate::quat::{rot_i, Quaternion, Vector3};

#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl PropertyReport {
    fn pass(name: &'static str, detail: String) -> Self {
        PropertyReport {
            name,
            passed: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        PropertyReport {
            name,
            passed: false,
            detail,
        }
    }

    fn from_error(name: &'static str, err: impl std::fmt::Display) -> Self {
        PropertyReport::fail(name, format!("construction failed: {err}"))
    }
}

const VERIFY_SEGMENTS: usize = 4;
const SAMPLES: usize = 400;

fn sample_xis(src: &dyn CurveSource) -> impl Iterator<Item = f64> + '_ {
    let (lo, hi) = src.domain();
    (0..=SAMPLES).map(move |i| lo + (hi - lo) * i as f64 / SAMPLES as f64)
}

/// Planar sources stay planar: if every source sample has `y = 0`, the
/// interpolated path must satisfy `max |y| < 1e−10`. Reported as passed
/// (with a note) for non-planar sources.
pub fn check_planarity(src: &dyn CurveSource) -> PropertyReport {
    const NAME: &str = "planarity";
    let source_planar = sample_xis(src).all(|xi| src.evaluate(xi, 0).y.abs() < 1e-12)
        && sample_xis(src).all(|xi| src.evaluate(xi, 1).y.abs() < 1e-12);
    if !source_planar {
        return PropertyReport::pass(NAME, "skipped: source is not planar".into());
    }
    let path = match interpolate_path(src, VERIFY_SEGMENTS) {
        Ok(p) => p,
        Err(e) => return PropertyReport::from_error(NAME, e),
    };
    let worst = sample_xis(src)
        .map(|xi| path.position(xi).y.abs())
        .fold(0.0, f64::max);
    if worst < 1e-10 {
        PropertyReport::pass(NAME, format!("max |y| = {worst:e}"))
    } else {
        PropertyReport::fail(NAME, format!("max |y| = {worst:e} exceeds 1e-10"))
    }
}

struct TransformedSource<'a> {
    inner: &'a dyn CurveSource,
    rotation: Quaternion,
    translation: Vector3,
}

impl CurveSource for TransformedSource<'_> {
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn evaluate(&self, xi: f64, order: usize) -> Vector3 {
        let v = self.rotation.rotate(self.inner.evaluate(xi, order));
        if order == 0 {
            v + self.translation
        } else {
            v
        }
    }

    fn describe(&self) -> String {
        format!("{} (rigidly moved)", self.inner.describe())
    }
}

/// Interpolating rigidly moved data gives the rigidly moved interpolant:
/// translation `(−1, 0, 2.5)` plus a half-turn of π/2 about y, compared
/// pointwise after applying the inverse transform, to 1e−9.
pub fn check_rigid_motion(src: &dyn CurveSource) -> PropertyReport {
    const NAME: &str = "rigid-motion invariance";
    let angle = std::f64::consts::FRAC_PI_4; // half of π/2 about y
    let rotation = Quaternion::new(angle.cos(), 0.0, angle.sin(), 0.0);
    let translation = Vector3::new(-1.0, 0.0, 2.5);
    let moved = TransformedSource {
        inner: src,
        rotation,
        translation,
    };
    let base = match interpolate_path(src, VERIFY_SEGMENTS) {
        Ok(p) => p,
        Err(e) => return PropertyReport::from_error(NAME, e),
    };
    let transformed = match interpolate_path(&moved, VERIFY_SEGMENTS) {
        Ok(p) => p,
        Err(e) => return PropertyReport::from_error(NAME, e),
    };
    let inv = rotation.conj();
    let worst = sample_xis(src)
        .map(|xi| {
            let back = inv.rotate(transformed.position(xi) - translation);
            (back - base.position(xi)).norm()
        })
        .fold(0.0, f64::max);
    if worst < 1e-9 {
        PropertyReport::pass(NAME, format!("max deviation = {worst:e}"))
    } else {
        PropertyReport::fail(NAME, format!("max deviation = {worst:e} exceeds 1e-9"))
    }
}

/// Interpolating reversed data gives the reversed curve:
/// `p̄(1−ξ) = p(ξ)` to 1e−9, on a single segment spanning the domain.
pub fn check_reversion(src: &dyn CurveSource) -> PropertyReport {
    const NAME: &str = "reversion";
    let data = extract_segment_data(src, 0, 1);
    let params = InterpolantParams::default();
    let fwd = match c4_interpolate(&data, &params) {
        Ok(s) => s,
        Err(e) => return PropertyReport::from_error(NAME, e),
    };
    let rev = match c4_interpolate(&data.reversed(), &params) {
        Ok(s) => s,
        Err(e) => return PropertyReport::from_error(NAME, e),
    };
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..=SAMPLES {
        let xi = i as f64 / SAMPLES as f64;
        let a = fwd.position(xi);
        scale = scale.max(a.norm());
        worst = worst.max((rev.position(1.0 - xi) - a).norm());
    }
    if worst < 1e-9 * scale {
        PropertyReport::pass(NAME, format!("max deviation = {worst:e}"))
    } else {
        PropertyReport::fail(NAME, format!("max deviation = {worst:e} exceeds 1e-9·scale"))
    }
}

/// The free angular parameters move along the fiber of the hodograph map:
/// a nonzero middle angle and a global `Q_φ` right-multiplication both
/// leave the path unchanged to 1e−12.
pub fn check_fiber_invariance(src: &dyn CurveSource) -> PropertyReport {
    const NAME: &str = "fiber invariance";
    let data = extract_segment_data(src, 0, 2);
    let params = InterpolantParams::default();
    let base = match c4_interpolate_full(&data, &params, 0.0) {
        Ok(s) => s,
        Err(e) => return PropertyReport::from_error(NAME, e),
    };
    let tilted = match c4_interpolate_full(&data, &params, 0.9) {
        Ok(s) => s,
        Err(e) => return PropertyReport::from_error(NAME, e),
    };
    let phi = 0.37;
    let q = rot_i(phi);
    let rolled_pre = std::array::from_fn(|i| base.preimage()[i] * q);
    let rolled = PHSegment::new(rolled_pre, base.start_point());
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..=SAMPLES {
        let xi = i as f64 / SAMPLES as f64;
        let p = base.position(xi);
        scale = scale.max(p.norm());
        worst = worst.max((tilted.position(xi) - p).norm());
        worst = worst.max((rolled.position(xi) - p).norm());
    }
    if worst < 1e-12 * scale {
        PropertyReport::pass(NAME, format!("max deviation = {worst:e}"))
    } else {
        PropertyReport::fail(NAME, format!("max deviation = {worst:e} exceeds 1e-12·scale"))
    }
}

/// The PH condition: the hodograph norm equals the polynomial parametric
/// speed, `|𝒉(ξ)| = σ(ξ)`, to 1e−10 relative at 100 points per segment.
pub fn check_ph_condition(src: &dyn CurveSource) -> PropertyReport {
    const NAME: &str = "PH condition";
    let path = match interpolate_path(src, VERIFY_SEGMENTS)
        .and_then(enforce_frame_continuity)
    {
        Ok(p) => p,
        Err(e) => return PropertyReport::from_error(NAME, e),
    };
    let mut worst = 0.0f64;
    for seg in path.segments() {
        for i in 0..=100 {
            let xi = i as f64 / 100.0;
            let h = seg.hodograph().eval(xi).norm();
            let sigma = seg.sigma(xi);
            worst = worst.max((h - sigma).abs() / sigma.max(1e-300));
        }
    }
    if worst < 1e-10 {
        PropertyReport::pass(NAME, format!("max relative |h|/σ gap = {worst:e}"))
    } else {
        PropertyReport::fail(NAME, format!("max relative |h|/σ gap = {worst:e} exceeds 1e-10"))
    }
}

/// Run every property suite against a source.
pub fn run_property_suites(src: &dyn CurveSource) -> Vec<PropertyReport> {
    vec![
        check_planarity(src),
        check_rigid_motion(src),
        check_reversion(src),
        check_fiber_invariance(src),
        check_ph_condition(src),
    ]
}
