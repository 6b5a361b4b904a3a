//! A single Pythagorean-hodograph segment of degree 17 and its derived
//! coordinate-system quantities.
//!
//! A degree-8 quaternion preimage `A(ξ)` generates the degree-16 hodograph
//! `h(ξ) = A𝒊A*` and the degree-17 path. The parametric speed
//! `σ(ξ) = |A(ξ)|²` is itself a polynomial, which is what makes arc length,
//! the adapted Euler-Rodrigues frame, its angular velocity, curvature and
//! torsion available in closed form.

use thiserror::Error;

use crate::bernstein::BernsteinPoly;
use crate::quat::{star, Quaternion, Vector3, TOL_DEG};

#[derive(Debug, Error, PartialEq)]
pub enum PhCurveError {
    /// `|A(ξ)|` vanished: the curve has a cusp at this parameter.
    #[error("vanishing preimage at xi = {xi}: |A| = {norm:e}")]
    VanishingPreimage { xi: f64, norm: f64 },
    /// The parametric speed vanished; curvature/torsion are undefined.
    #[error("singular parametric speed at xi = {xi}: sigma = {sigma:e}")]
    SingularSpeed { xi: f64, sigma: f64 },
}

/// Bernstein product terms mapping the degree-8 preimage to the degree-16
/// hodograph: entry `(i, j, num, den)` contributes `(num/den) · A_i ⋆ A_j`
/// to hodograph control point `h_{i+j}`.
pub const HODOGRAPH_TERMS: [(usize, usize, i64, i64); 45] = [
    (0, 0, 1, 1),
    (0, 1, 1, 1),
    (0, 2, 7, 15),
    (1, 1, 8, 15),
    (0, 3, 2, 10),
    (1, 2, 8, 10),
    (0, 4, 5, 65),
    (1, 3, 32, 65),
    (2, 2, 28, 65),
    (0, 5, 1, 39),
    (1, 4, 10, 39),
    (2, 3, 28, 39),
    (0, 6, 1, 143),
    (1, 5, 16, 143),
    (2, 4, 70, 143),
    (3, 3, 56, 143),
    (0, 7, 1, 715),
    (1, 6, 28, 715),
    (2, 5, 196, 715),
    (3, 4, 490, 715),
    (0, 8, 1, 6435),
    (1, 7, 64, 6435),
    (2, 6, 784, 6435),
    (3, 5, 3136, 6435),
    (4, 4, 2450, 6435),
    (1, 8, 1, 715),
    (2, 7, 28, 715),
    (3, 6, 196, 715),
    (4, 5, 490, 715),
    (2, 8, 1, 143),
    (3, 7, 16, 143),
    (4, 6, 70, 143),
    (5, 5, 56, 143),
    (3, 8, 1, 39),
    (4, 7, 10, 39),
    (5, 6, 28, 39),
    (4, 8, 5, 65),
    (5, 7, 32, 65),
    (6, 6, 28, 65),
    (5, 8, 2, 10),
    (6, 7, 8, 10),
    (6, 8, 7, 15),
    (7, 7, 8, 15),
    (7, 8, 1, 1),
    (8, 8, 1, 1),
];

/// Hodograph control points `h_0..h_16` from the preimage control points.
pub fn hodograph_from_preimage(preimage: &[Quaternion; 9]) -> [Vector3; 17] {
    let mut h = [Vector3::ZERO; 17];
    for &(i, j, num, den) in HODOGRAPH_TERMS.iter() {
        h[i + j] = h[i + j] + star(preimage[i], preimage[j]) * (num as f64 / den as f64);
    }
    h
}

/// Parametric-speed control points: `σ(ξ) = |A(ξ)|²` expands with the same
/// Bernstein product coefficients, with the 4-component dot product in
/// place of the star product.
pub fn speed_from_preimage(preimage: &[Quaternion; 9]) -> [f64; 17] {
    let mut s = [0.0; 17];
    for &(i, j, num, den) in HODOGRAPH_TERMS.iter() {
        s[i + j] += preimage[i].dot(preimage[j]) * (num as f64 / den as f64);
    }
    s
}

/// Path control points from hodograph control points and the start point:
/// `p_i = p_0 + (1/17) Σ_{j<i} h_j`.
pub fn path_from_hodograph(h: &[Vector3; 17], p0: Vector3) -> [Vector3; 18] {
    let mut p = [p0; 18];
    let inv = 1.0 / 17.0;
    for i in 1..18 {
        p[i] = p[i - 1] + h[i - 1] * inv;
    }
    p
}

/// Column-major 3x3 rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    cols: [Vector3; 3],
}

impl Mat3 {
    pub fn from_columns(c1: Vector3, c2: Vector3, c3: Vector3) -> Self {
        Mat3 { cols: [c1, c2, c3] }
    }

    pub fn identity() -> Self {
        Mat3::from_columns(
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
        )
    }

    pub fn col(&self, i: usize) -> Vector3 {
        self.cols[i]
    }

    pub fn det(&self) -> f64 {
        self.cols[0].dot(self.cols[1].cross(self.cols[2]))
    }

    pub fn frobenius_distance(&self, other: &Mat3) -> f64 {
        self.cols
            .iter()
            .zip(other.cols.iter())
            .map(|(a, b)| {
                let d = *a - *b;
                d.dot(d)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Row-major flattening `[r11, r12, r13, r21, ...]`.
    pub fn to_row_major(&self) -> [f64; 9] {
        let [c1, c2, c3] = self.cols;
        [c1.x, c2.x, c3.x, c1.y, c2.y, c3.y, c1.z, c2.z, c3.z]
    }
}

/// Frame, angular velocity and speed at one parameter value. The angular
/// velocity is per unit of the segment-local parameter ξ; dividing by the
/// parametric speed converts it to per-arc-length.
#[derive(Debug, Clone, Copy)]
pub struct FrameSample {
    /// Adapted frame; columns are `e1` (unit tangent), `e2`, `e3`.
    pub rotation: Mat3,
    /// Angular velocity of the frame w.r.t. ξ.
    pub omega: Vector3,
    /// Parametric speed `σ(ξ) = |dp/dξ|`.
    pub sigma: f64,
}

/// Closed-form geometric quantities at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct Geometry {
    /// Arc length accumulated from the segment start.
    pub arc_length: f64,
    pub curvature: f64,
    /// Frenet torsion; zero (and flagged) where curvature vanishes.
    pub torsion: f64,
    pub torsion_defined: bool,
}

/// One degree-17 PH segment: 9 preimage control points plus the start
/// point, with the hodograph, path and speed polynomials cached eagerly.
#[derive(Debug, Clone)]
pub struct PHSegment {
    preimage: [Quaternion; 9],
    p0: Vector3,
    preimage_poly: BernsteinPoly<Quaternion>,
    preimage_deriv: BernsteinPoly<Quaternion>,
    hodograph: BernsteinPoly<Vector3>,
    hodograph_d1: BernsteinPoly<Vector3>,
    hodograph_d2: BernsteinPoly<Vector3>,
    path: BernsteinPoly<Vector3>,
    sigma: BernsteinPoly<f64>,
}

impl PHSegment {
    pub fn new(preimage: [Quaternion; 9], p0: Vector3) -> Self {
        let h = hodograph_from_preimage(&preimage);
        let hodograph = BernsteinPoly::new(h.to_vec());
        let hodograph_d1 = hodograph.derivative();
        let hodograph_d2 = hodograph_d1.derivative();
        let path = BernsteinPoly::new(path_from_hodograph(&h, p0).to_vec());
        let sigma = BernsteinPoly::new(speed_from_preimage(&preimage).to_vec());
        let preimage_poly = BernsteinPoly::new(preimage.to_vec());
        let preimage_deriv = preimage_poly.derivative();
        PHSegment {
            preimage,
            p0,
            preimage_poly,
            preimage_deriv,
            hodograph,
            hodograph_d1,
            hodograph_d2,
            path,
            sigma,
        }
    }

    pub fn preimage(&self) -> &[Quaternion; 9] {
        &self.preimage
    }

    pub fn start_point(&self) -> Vector3 {
        self.p0
    }

    pub fn path(&self) -> &BernsteinPoly<Vector3> {
        &self.path
    }

    pub fn hodograph(&self) -> &BernsteinPoly<Vector3> {
        &self.hodograph
    }

    pub fn sigma_poly(&self) -> &BernsteinPoly<f64> {
        &self.sigma
    }

    pub fn preimage_poly(&self) -> &BernsteinPoly<Quaternion> {
        &self.preimage_poly
    }

    pub fn position(&self, xi: f64) -> Vector3 {
        self.path.eval(xi)
    }

    pub fn preimage_at(&self, xi: f64) -> Quaternion {
        self.preimage_poly.eval(xi)
    }

    pub fn sigma(&self, xi: f64) -> f64 {
        self.sigma.eval(xi)
    }

    /// Total arc length of the segment (exact Bernstein integral of σ).
    pub fn arc_length(&self) -> f64 {
        self.sigma.integral(0.0, 1.0)
    }

    /// Euler-Rodrigues frame and angular velocity at `xi`.
    ///
    /// `e_v = A v A* / |A|²` for `v ∈ {𝒊, 𝒋, 𝒌}`; the axis derivatives come
    /// from the quotient rule on the quaternion polynomials, keeping the
    /// angular velocity exact rather than numerically differentiated.
    pub fn erf(&self, xi: f64) -> Result<FrameSample, PhCurveError> {
        let (e, ep, sigma) = self.frame_axes(xi)?;
        let chi1 = ep[1].dot(e[2]);
        let chi2 = ep[2].dot(e[0]);
        let chi3 = ep[0].dot(e[1]);
        let omega = e[0] * chi1 + e[1] * chi2 + e[2] * chi3;
        Ok(FrameSample {
            rotation: Mat3::from_columns(e[0], e[1], e[2]),
            omega,
            sigma,
        })
    }

    /// Frame axes and their analytic first derivatives w.r.t. ξ.
    pub fn frame_axes(&self, xi: f64) -> Result<([Vector3; 3], [Vector3; 3], f64), PhCurveError> {
        let a = self.preimage_poly.eval(xi);
        let ad = self.preimage_deriv.eval(xi);
        let n = a.norm_sq();
        if n.sqrt() <= TOL_DEG {
            return Err(PhCurveError::VanishingPreimage { xi, norm: n.sqrt() });
        }
        let np = 2.0 * a.dot(ad);
        let inv_n = 1.0 / n;
        let mut e = [Vector3::ZERO; 3];
        let mut ep = [Vector3::ZERO; 3];
        for (idx, v) in [Quaternion::I, Quaternion::J, Quaternion::K].into_iter().enumerate() {
            let big = (a * v * a.conj()).vector();
            // (A v A*)' = A' v A* + A v A'* = 2 vec(A' v A*)
            let big_p = (ad * v * a.conj()).vector() * 2.0;
            e[idx] = big * inv_n;
            ep[idx] = big_p * inv_n - big * (np * inv_n * inv_n);
        }
        Ok((e, ep, n))
    }

    /// Arc length, curvature and torsion at `xi`.
    pub fn geometry(&self, xi: f64) -> Result<Geometry, PhCurveError> {
        let arc_length = self.sigma.integral(0.0, xi);
        let sigma = self.sigma.eval(xi);
        if sigma <= TOL_DEG {
            return Err(PhCurveError::SingularSpeed { xi, sigma });
        }
        let d1 = self.hodograph.eval(xi);
        let d2 = self.hodograph_d1.eval(xi);
        let d3 = self.hodograph_d2.eval(xi);
        let c = d1.cross(d2);
        let c_norm = c.norm();
        let curvature = c_norm / (sigma * sigma * sigma);
        let (torsion, torsion_defined) = if c_norm <= TOL_DEG {
            (0.0, false)
        } else {
            (c.dot(d3) / (c_norm * c_norm), true)
        };
        Ok(Geometry {
            arc_length,
            curvature,
            torsion,
            torsion_defined,
        })
    }
}
