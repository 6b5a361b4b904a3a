//! C4 Hermite interpolation: build one PH segment from position and the
//! first four derivative vectors at both ends of a segment.
//!
//! The construction brings the data into a standard pose, recovers the
//! boundary hodograph control points, solves a ladder of star-quadratic
//! and star-linear equations for the outer preimage control points, closes
//! the system through the middle control point `A_4`, and finally restores
//! the original pose. With all free parameters at zero the interpolant has
//! approximation order 6 and is planarity-, rigid-motion- and
//! reversion-invariant.

use thiserror::Error;

use crate::phcurve::PHSegment;
use crate::quat::{
    solve_linear_star, solve_quadratic_star, star, QuatError, Quaternion, Vector3, TOL_DEG,
};

#[derive(Debug, Error, PartialEq)]
pub enum HermiteError {
    /// `v_b + v_e` is too small to orient the standard form; the segment
    /// must be re-split.
    #[error("degenerate velocity sum: |v_b + v_e| = {norm:e}")]
    DegenerateVelocitySum { norm: f64 },
    #[error(transparent)]
    Quat(#[from] QuatError),
    /// The built segment failed to reproduce its own boundary data; either
    /// a coefficient bug or pathological data.
    #[error("interpolation residual {residual:e} exceeds tolerance")]
    InterpolationResidual { residual: f64 },
}

/// C4 Hermite boundary data for one segment over local ξ ∈ [0, 1].
///
/// Derivatives are taken w.r.t. the local parameter: when extracted from a
/// global curve with segment width `h`, the order-k derivative carries a
/// factor `h^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteC4Data {
    pub p_b: Vector3,
    pub p_e: Vector3,
    pub v_b: Vector3,
    pub v_e: Vector3,
    pub a_b: Vector3,
    pub a_e: Vector3,
    pub j_b: Vector3,
    pub j_e: Vector3,
    pub s_b: Vector3,
    pub s_e: Vector3,
}

impl HermiteC4Data {
    /// The same segment traversed backwards.
    pub fn reversed(&self) -> HermiteC4Data {
        HermiteC4Data {
            p_b: self.p_e,
            p_e: self.p_b,
            v_b: -self.v_e,
            v_e: -self.v_b,
            a_b: self.a_e,
            a_e: self.a_b,
            j_b: -self.j_e,
            j_e: -self.j_b,
            s_b: self.s_e,
            s_e: self.s_b,
        }
    }

    fn vectors(&self) -> [Vector3; 10] {
        [
            self.p_b, self.p_e, self.v_b, self.v_e, self.a_b, self.a_e, self.j_b, self.j_e,
            self.s_b, self.s_e,
        ]
    }

    /// Largest component norm, used to scale relative tolerances.
    pub fn magnitude(&self) -> f64 {
        self.vectors().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn map(&self, f: impl Fn(Vector3) -> Vector3) -> HermiteC4Data {
        HermiteC4Data {
            p_b: f(self.p_b),
            p_e: f(self.p_e),
            v_b: f(self.v_b),
            v_e: f(self.v_e),
            a_b: f(self.a_b),
            a_e: f(self.a_e),
            j_b: f(self.j_b),
            j_e: f(self.j_e),
            s_b: f(self.s_b),
            s_e: f(self.s_e),
        }
    }
}

/// Free parameters of the nine-parameter interpolant family. The middle
/// angular parameter is fixed to zero by the preimage fiber; all-zero
/// parameters give the order-6 optimal interpolant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InterpolantParams {
    pub theta0: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub tau5: f64,
    pub tau6: f64,
    pub tau7: f64,
    pub theta8: f64,
}

/// Rotation followed by translation; maps standard-form quantities back to
/// the original pose.
#[derive(Debug, Clone, Copy)]
pub struct RigidTransform {
    pub rotation: Quaternion,
    pub translation: Vector3,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: Quaternion::ONE,
            translation: Vector3::ZERO,
        }
    }

    pub fn apply_point(&self, p: Vector3) -> Vector3 {
        self.rotation.rotate(p) + self.translation
    }

    pub fn apply_vector(&self, v: Vector3) -> Vector3 {
        self.rotation.rotate(v)
    }
}

/// Weights of the averaged preimage control point `A_p = Σ λ_i A_i`,
/// indexed 0..=8, as exact rationals.
pub const AP_WEIGHTS: [(i64, i64); 9] = [
    (1, 442),
    (5, 663),
    (35, 2431),
    (49, 2431),
    (490, 21879),
    (49, 2431),
    (35, 2431),
    (5, 663),
    (1, 442),
];

/// Common denominator of the `c_p` quadratic-form coefficients.
pub const CP_DENOM: i64 = 112_633_092;

/// Star-product terms of `c_p`: entry `(i, j, num)` contributes
/// `(num / CP_DENOM) · A_i ⋆ A_j`. The middle control point (index 4) does
/// not appear; it is the unknown the closing equation solves for.
pub const CP_TERMS: [(usize, usize, i64); 36] = [
    (0, 0, 147_807),
    (0, 1, 144_540),
    (0, 2, 61_908),
    (0, 3, 19_404),
    (0, 5, -6_468),
    (0, 6, -6_300),
    (0, 7, -3_636),
    (0, 8, -1_130),
    (1, 1, 72_732),
    (1, 2, 94_248),
    (1, 3, 38_808),
    (1, 5, -17_640),
    (1, 6, -18_648),
    (1, 7, -11_336),
    (1, 8, -3_636),
    (2, 2, 40_572),
    (2, 3, 41_160),
    (2, 5, -24_696),
    (2, 6, -28_616),
    (2, 7, -18_648),
    (2, 8, -6_300),
    (3, 3, 12_348),
    (3, 5, -19_208),
    (3, 6, -24_696),
    (3, 7, -17_640),
    (3, 8, -6_468),
    (5, 5, 12_348),
    (5, 6, 41_160),
    (5, 7, 38_808),
    (5, 8, 19_404),
    (6, 6, 40_572),
    (6, 7, 94_248),
    (6, 8, 61_908),
    (7, 7, 72_732),
    (7, 8, 144_540),
    (8, 8, 147_807),
];

/// Shortest-arc rotation taking the unit vector `u` to +x, as a unit
/// quaternion. Falls back to a half-turn about +y when `u` points along −x.
fn rotation_to_x(u: Vector3) -> Quaternion {
    let w = 1.0 + u.x;
    if w < TOL_DEG {
        return Quaternion::J;
    }
    // u × x̂ = (0, u.z, -u.y)
    let q = Quaternion::new(w, 0.0, u.z, -u.y);
    q * (1.0 / q.norm())
}

/// Transform Hermite data into standard form: start point at the origin
/// and `v_b + v_e` a positive multiple of +x. Returns the standardized
/// data and the rigid transform mapping standard-form quantities back to
/// the original pose.
pub fn to_standard_form(
    data: &HermiteC4Data,
) -> Result<(HermiteC4Data, RigidTransform), HermiteError> {
    let vsum = data.v_b + data.v_e;
    let norm = vsum.norm();
    if norm <= TOL_DEG {
        return Err(HermiteError::DegenerateVelocitySum { norm });
    }
    let q = rotation_to_x(vsum * (1.0 / norm));
    let p_b = data.p_b;
    let mut sf = data.map(|v| q.rotate(v));
    sf.p_b = Vector3::ZERO;
    sf.p_e = q.rotate(data.p_e - p_b);
    let back = RigidTransform {
        rotation: q.conj(),
        translation: p_b,
    };
    Ok((sf, back))
}

/// Invert the boundary relations between Hermite data and the hodograph
/// control points: returns `(h_0..h_3, h_13..h_16)`.
pub fn boundary_hodograph_points(data: &HermiteC4Data) -> ([Vector3; 4], [Vector3; 4]) {
    let h0 = data.v_b;
    let h1 = h0 + data.a_b * (1.0 / 16.0);
    let h2 = data.j_b * (1.0 / 240.0) - h0 + h1 * 2.0;
    let h3 = (data.s_b + h0 * 3360.0 - h1 * 10080.0 + h2 * 10080.0) * (1.0 / 3360.0);
    let h16 = data.v_e;
    let h15 = h16 - data.a_e * (1.0 / 16.0);
    let h14 = data.j_e * (1.0 / 240.0) + h15 * 2.0 - h16;
    let h13 = (h14 * 10080.0 - h15 * 10080.0 + h16 * 3360.0 - data.s_e) * (1.0 / 3360.0);
    ([h0, h1, h2, h3], [h13, h14, h15, h16])
}

fn cp_from_outer(a: &[Quaternion; 9]) -> Vector3 {
    let mut acc = Vector3::ZERO;
    for &(i, j, num) in CP_TERMS.iter() {
        acc = acc + star(a[i], a[j]) * (num as f64 / CP_DENOM as f64);
    }
    acc
}

/// Relative tolerance of the post-construction boundary check.
const RESIDUAL_TOL: f64 = 1e-9;

/// Build the PH segment interpolating `data` with the given free
/// parameters (middle angular parameter fixed to zero).
pub fn c4_interpolate(
    data: &HermiteC4Data,
    params: &InterpolantParams,
) -> Result<PHSegment, HermiteError> {
    c4_interpolate_full(data, params, 0.0)
}

/// Same as [`c4_interpolate`] with the middle angular parameter exposed.
///
/// `theta4` is the fiber coordinate of the interpolant family: shifting it
/// shifts all three angular parameters together, which right-multiplies
/// the whole preimage by `Q_{θ4}` and leaves the path unchanged. This is
/// why it can be fixed to zero without losing any interpolant.
pub fn c4_interpolate_full(
    data: &HermiteC4Data,
    params: &InterpolantParams,
    theta4: f64,
) -> Result<PHSegment, HermiteError> {
    let (sf, back) = to_standard_form(data)?;
    let (hb, he) = boundary_hodograph_points(&sf);
    let [h0, h1, h2, h3] = hb;
    let [h13, h14, h15, h16] = he;

    let a0 = solve_quadratic_star(h0, params.theta0 + theta4)?;
    let a8 = solve_quadratic_star(h16, params.theta8 + theta4)?;
    let a1 = solve_linear_star(a0, h1, params.tau1)?;
    let a7 = solve_linear_star(a8, h15, params.tau7)?;
    let a2 = solve_linear_star(a0, (h2 * 15.0 - star(a1, a1) * 8.0) * (1.0 / 7.0), params.tau2)?;
    let a6 = solve_linear_star(a8, (h14 * 15.0 - star(a7, a7) * 8.0) * (1.0 / 7.0), params.tau6)?;
    let a3 = solve_linear_star(a0, h3 * 5.0 - star(a1, a2) * 4.0, params.tau3)?;
    let a5 = solve_linear_star(a8, h13 * 5.0 - star(a6, a7) * 4.0, params.tau5)?;

    // Closing equation for the middle control point: A_p^2* = λ4 (p_e - p_b) - c_p
    let mut outer = [Quaternion::ZERO; 9];
    outer[0] = a0;
    outer[1] = a1;
    outer[2] = a2;
    outer[3] = a3;
    outer[5] = a5;
    outer[6] = a6;
    outer[7] = a7;
    outer[8] = a8;
    let lambda4 = AP_WEIGHTS[4].0 as f64 / AP_WEIGHTS[4].1 as f64;
    let rhs = (sf.p_e - sf.p_b) * lambda4 - cp_from_outer(&outer);
    let a_p = solve_quadratic_star(rhs, theta4)?;
    let mut acc = a_p;
    for (i, &(num, den)) in AP_WEIGHTS.iter().enumerate() {
        if i != 4 {
            acc = acc - outer[i] * (num as f64 / den as f64);
        }
    }
    let a4 = acc * (1.0 / lambda4);

    let mut preimage = outer;
    preimage[4] = a4;
    // back to the original pose: a world rotation q acts on the preimage
    // as A -> qA, since (qA) i (qA)* = q (A i A*) q*
    for a in preimage.iter_mut() {
        *a = back.rotation * *a;
    }
    let segment = PHSegment::new(preimage, data.p_b);
    check_residual(&segment, data)?;
    Ok(segment)
}

fn check_residual(segment: &PHSegment, data: &HermiteC4Data) -> Result<(), HermiteError> {
    let h = segment.hodograph();
    let h1 = h.derivative();
    let h2 = h1.derivative();
    let h3 = h2.derivative();
    let checks = [
        (segment.position(0.0), data.p_b),
        (segment.position(1.0), data.p_e),
        (h.eval(0.0), data.v_b),
        (h.eval(1.0), data.v_e),
        (h1.eval(0.0), data.a_b),
        (h1.eval(1.0), data.a_e),
        (h2.eval(0.0), data.j_b),
        (h2.eval(1.0), data.j_e),
        (h3.eval(0.0), data.s_b),
        (h3.eval(1.0), data.s_e),
    ];
    let residual = checks
        .iter()
        .map(|(got, want)| (*got - *want).norm())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOL * (1.0 + data.magnitude()) {
        return Err(HermiteError::InterpolationResidual { residual });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::rot_i;
    use rand::{Rng, SeedableRng};

    fn xhat() -> Vector3 {
        Vector3::new(1.0, 0.0, 0.0)
    }

    pub fn random_data(rng: &mut impl Rng, scale: f64) -> HermiteC4Data {
        let mut v = || {
            Vector3::new(
                rng.gen_range(-scale..scale),
                rng.gen_range(-scale..scale),
                rng.gen_range(-scale..scale),
            )
        };
        HermiteC4Data {
            p_b: v(),
            p_e: v(),
            v_b: v(),
            v_e: v(),
            a_b: v(),
            a_e: v(),
            j_b: v(),
            j_e: v(),
            s_b: v(),
            s_e: v(),
        }
    }

    fn straight_line_data() -> HermiteC4Data {
        HermiteC4Data {
            p_b: Vector3::ZERO,
            p_e: xhat(),
            v_b: xhat(),
            v_e: xhat(),
            a_b: Vector3::ZERO,
            a_e: Vector3::ZERO,
            j_b: Vector3::ZERO,
            j_e: Vector3::ZERO,
            s_b: Vector3::ZERO,
            s_e: Vector3::ZERO,
        }
    }

    #[test]
    fn standard_form_noop_for_standard_data() {
        let d = straight_line_data();
        let (sf, back) = to_standard_form(&d).unwrap();
        assert_eq!(sf, d);
        assert!((back.rotation - Quaternion::ONE).norm() < 1e-15);
        assert_eq!(back.translation, Vector3::ZERO);
    }

    #[test]
    fn standard_form_rotates_and_translates() {
        let mut d = straight_line_data();
        d.p_b = Vector3::new(1.0, 1.0, 1.0);
        d.p_e = d.p_b + Vector3::new(0.0, 1.0, 0.0);
        d.v_b = Vector3::new(0.0, 1.0, 0.0);
        d.v_e = Vector3::new(0.0, 1.0, 0.0);
        let (sf, back) = to_standard_form(&d).unwrap();
        assert!(sf.p_b.norm() < 1e-15);
        let vsum = sf.v_b + sf.v_e;
        assert!(vsum.x > 0.0 && vsum.y.abs() < 1e-12 && vsum.z.abs() < 1e-12);
        let restored = back.apply_point(sf.p_b);
        assert!((restored - Vector3::new(1.0, 1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn standard_form_antiparallel_fallback() {
        let mut d = straight_line_data();
        d.v_b = -xhat();
        d.v_e = -xhat();
        let (sf, _) = to_standard_form(&d).unwrap();
        assert!((sf.v_b + sf.v_e).x > 0.0);
    }

    #[test]
    fn standard_form_round_trip_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let d = random_data(&mut rng, 3.0);
            if (d.v_b + d.v_e).norm() < 1e-3 {
                continue;
            }
            let (sf, back) = to_standard_form(&d).unwrap();
            let restored_pb = back.apply_point(sf.p_b);
            let restored_pe = back.apply_point(sf.p_e);
            assert!((restored_pb - d.p_b).norm() <= 1e-12 * (1.0 + d.magnitude()));
            assert!((restored_pe - d.p_e).norm() <= 1e-12 * (1.0 + d.magnitude()));
            for (got, want) in [
                (back.apply_vector(sf.v_b), d.v_b),
                (back.apply_vector(sf.v_e), d.v_e),
                (back.apply_vector(sf.a_b), d.a_b),
                (back.apply_vector(sf.a_e), d.a_e),
                (back.apply_vector(sf.j_b), d.j_b),
                (back.apply_vector(sf.j_e), d.j_e),
                (back.apply_vector(sf.s_b), d.s_b),
                (back.apply_vector(sf.s_e), d.s_e),
            ] {
                assert!((got - want).norm() <= 1e-12 * (1.0 + d.magnitude()));
            }
        }
    }

    #[test]
    fn degenerate_velocity_sum_rejected() {
        let mut d = straight_line_data();
        d.v_e = -d.v_b;
        assert!(matches!(
            to_standard_form(&d),
            Err(HermiteError::DegenerateVelocitySum { .. })
        ));
    }

    #[test]
    fn boundary_points_examples() {
        let d = straight_line_data();
        let (hb, he) = boundary_hodograph_points(&d);
        for h in hb.iter().chain(he.iter()) {
            assert!((*h - xhat()).norm() < 1e-14);
        }
        let mut d = straight_line_data();
        d.a_b = Vector3::new(16.0, 0.0, 0.0);
        let (hb, _) = boundary_hodograph_points(&d);
        assert!((hb[1] - Vector3::new(2.0, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn boundary_points_forward_oracle() {
        // reconstruct v,a,j,s at the ends from the 8 boundary hodograph
        // points through bernstein derivatives of a padded hodograph
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let d = random_data(&mut rng, 2.0);
        let (hb, he) = boundary_hodograph_points(&d);
        let mut ctrl = vec![Vector3::ZERO; 17];
        ctrl[..4].copy_from_slice(&hb);
        ctrl[13..].copy_from_slice(&he);
        let h = crate::bernstein::BernsteinPoly::new(ctrl);
        let h1 = h.derivative();
        let h2 = h1.derivative();
        let h3 = h2.derivative();
        let tol = 1e-9 * (1.0 + d.magnitude());
        assert!((h.eval(0.0) - d.v_b).norm() < tol);
        assert!((h.eval(1.0) - d.v_e).norm() < tol);
        assert!((h1.eval(0.0) - d.a_b).norm() < tol);
        assert!((h1.eval(1.0) - d.a_e).norm() < tol);
        assert!((h2.eval(0.0) - d.j_b).norm() < tol);
        assert!((h2.eval(1.0) - d.j_e).norm() < tol);
        assert!((h3.eval(0.0) - d.s_b).norm() < tol);
        assert!((h3.eval(1.0) - d.s_e).norm() < tol);
    }

    #[test]
    fn straight_line_interpolation() {
        let seg = c4_interpolate(&straight_line_data(), &InterpolantParams::default()).unwrap();
        for a in seg.preimage() {
            assert!((*a - Quaternion::I).norm() < 1e-12);
        }
        for k in 0..=20 {
            let xi = k as f64 / 20.0;
            let p = seg.position(xi);
            assert!((p - Vector3::new(xi, 0.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn random_data_boundary_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut done = 0;
        while done < 50 {
            let d = random_data(&mut rng, 2.0);
            if (d.v_b + d.v_e).norm() < 1e-2 {
                continue;
            }
            // the residual check inside c4_interpolate IS the oracle here
            let seg = c4_interpolate(&d, &InterpolantParams::default());
            assert!(seg.is_ok(), "{seg:?}");
            done += 1;
        }
    }

    #[test]
    fn theta4_fiber_leaves_path_unchanged() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let d = random_data(&mut rng, 1.0);
        let p0 = c4_interpolate_full(&d, &InterpolantParams::default(), 0.0).unwrap();
        let p1 = c4_interpolate_full(&d, &InterpolantParams::default(), 1.1).unwrap();
        for k in 0..=50 {
            let xi = k as f64 / 50.0;
            let a = p0.position(xi);
            let b = p1.position(xi);
            assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn planarity_is_preserved() {
        // data confined to the xz-plane stays there
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut d = random_data(&mut rng, 1.0);
        for v in [
            &mut d.p_b, &mut d.p_e, &mut d.v_b, &mut d.v_e, &mut d.a_b, &mut d.a_e, &mut d.j_b,
            &mut d.j_e, &mut d.s_b, &mut d.s_e,
        ] {
            v.y = 0.0;
        }
        let seg = c4_interpolate(&d, &InterpolantParams::default()).unwrap();
        for k in 0..=200 {
            let xi = k as f64 / 200.0;
            assert!(seg.position(xi).y.abs() < 1e-10);
        }
    }

    #[test]
    fn reversion_with_zero_params() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let d = random_data(&mut rng, 1.0);
        let fwd = c4_interpolate(&d, &InterpolantParams::default()).unwrap();
        let rev = c4_interpolate(&d.reversed(), &InterpolantParams::default()).unwrap();
        for k in 0..=100 {
            let xi = k as f64 / 100.0;
            let a = fwd.position(xi);
            let b = rev.position(1.0 - xi);
            assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()), "xi = {xi}");
        }
    }

    #[test]
    fn rigid_motion_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(51);
        let d = random_data(&mut rng, 1.0);
        let q = rot_i(0.4) * Quaternion::new(0.8, 0.0, 0.6, 0.0) * (1.0 / 1.0);
        let q = q * (1.0 / q.norm());
        let t = Vector3::new(-1.0, 0.5, 2.0);
        let m = RigidTransform { rotation: q, translation: t };
        let md = HermiteC4Data {
            p_b: m.apply_point(d.p_b),
            p_e: m.apply_point(d.p_e),
            v_b: m.apply_vector(d.v_b),
            v_e: m.apply_vector(d.v_e),
            a_b: m.apply_vector(d.a_b),
            a_e: m.apply_vector(d.a_e),
            j_b: m.apply_vector(d.j_b),
            j_e: m.apply_vector(d.j_e),
            s_b: m.apply_vector(d.s_b),
            s_e: m.apply_vector(d.s_e),
        };
        let base = c4_interpolate(&d, &InterpolantParams::default()).unwrap();
        let moved = c4_interpolate(&md, &InterpolantParams::default()).unwrap();
        for k in 0..=100 {
            let xi = k as f64 / 100.0;
            let expect = m.apply_point(base.position(xi));
            let got = moved.position(xi);
            assert!((got - expect).norm() <= 1e-9 * (1.0 + expect.norm()));
        }
    }
}
