//! Quaternion algebra, the commutative star product, and the closed-form
//! solvers for the star-linear and star-quadratic equations.
//!
//! The star product `A ⋆ B = ½(A𝒊B* + B𝒊A*)` is always a pure quaternion
//! and equals the vector part of `A𝒊B*`. PH hodographs arise as `A ⋆ A`,
//! and the Hermite construction repeatedly inverts `X ⋆ B = a` and
//! `X ⋆ X = a`, whose full solution families are exposed here through an
//! explicit free parameter.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Degeneracy tolerance for the solver preconditions, absolute on
/// normalized quantities.
pub const TOL_DEG: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum QuatError {
    /// The divisor quaternion of a star-linear solve is (numerically) zero.
    #[error("degenerate quaternion: |B| = {norm:e} is below tolerance")]
    DegenerateQuaternion { norm: f64 },
    /// The right-hand side of a star-quadratic solve is zero or a negative
    /// multiple of 𝒊. For segment data this means the boundary velocity
    /// points opposite the standard-form axis and the segment must be
    /// re-split.
    #[error("degenerate hodograph direction: right-hand side is zero or a negative multiple of i")]
    DegenerateHodographDirection,
}

/// 3-vector, also acting as a pure quaternion (scalar part zero).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vector3 {
    pub const ZERO: Vector3 = Vector3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vector3 { x, y, z }
    }

    pub fn dot(self, rhs: Vector3) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    pub fn cross(self, rhs: Vector3) -> Vector3 {
        Vector3 {
            x: self.y * rhs.z - self.z * rhs.y,
            y: self.z * rhs.x - self.x * rhs.z,
            z: self.x * rhs.y - self.y * rhs.x,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Unit vector in the same direction; `None` if the norm is below `TOL_DEG`.
    pub fn normalized(self) -> Option<Vector3> {
        let n = self.norm();
        (n > TOL_DEG).then(|| self * (1.0 / n))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vector3 {
    type Output = Vector3;
    fn add(self, rhs: Vector3) -> Vector3 {
        Vector3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vector3 {
    type Output = Vector3;
    fn sub(self, rhs: Vector3) -> Vector3 {
        Vector3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vector3 {
    type Output = Vector3;
    fn mul(self, s: f64) -> Vector3 {
        Vector3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vector3 {
    type Output = Vector3;
    fn neg(self) -> Vector3 {
        self * -1.0
    }
}

/// Quaternion with scalar-first component order `(w, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const ONE: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const I: Quaternion = Quaternion { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };
    pub const J: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 1.0, z: 0.0 };
    pub const K: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    /// Embed a vector as a pure quaternion.
    pub const fn from_vector(v: Vector3) -> Self {
        Quaternion { w: 0.0, x: v.x, y: v.y, z: v.z }
    }

    pub fn conj(self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sq(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// 4-component dot product.
    pub fn dot(self, rhs: Quaternion) -> f64 {
        self.w * rhs.w + self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    pub fn vector(self) -> Vector3 {
        Vector3::new(self.x, self.y, self.z)
    }

    /// Rotate a vector by this (unit) quaternion: `q v q*`.
    pub fn rotate(self, v: Vector3) -> Vector3 {
        (self * Quaternion::from_vector(v) * self.conj()).vector()
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    /// Hamilton product (𝒊𝒋 = 𝒌, 𝒋𝒌 = 𝒊, 𝒌𝒊 = 𝒋, 𝒊² = 𝒋² = 𝒌² = −1).
    fn mul(self, r: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self * -1.0
    }
}

/// The commutative star product `A ⋆ B = ½(A𝒊B* + B𝒊A*)`.
///
/// Algebraically this equals the vector part of `A𝒊B*` (the symmetrization
/// cancels the scalar part exactly), so it is computed as such.
pub fn star(a: Quaternion, b: Quaternion) -> Vector3 {
    (a * Quaternion::I * b.conj()).vector()
}

/// `A ⋆ A`, the hodograph image of a preimage point.
pub fn star_sq(a: Quaternion) -> Vector3 {
    star(a, a)
}

/// Unit quaternion `Q_φ = cos φ + 𝒊 sin φ`; right-multiplying a preimage
/// point by it leaves `A𝒊A*` unchanged (the fiber of the hodograph map).
pub fn rot_i(phi: f64) -> Quaternion {
    Quaternion::new(phi.cos(), phi.sin(), 0.0, 0.0)
}

/// Solve the star-linear equation `X ⋆ B = a`.
///
/// The solutions form the one-parameter family
/// `X_τ = −(τ + a) B 𝒊 / |B|²`; `tau` selects the member.
pub fn solve_linear_star(b: Quaternion, a: Vector3, tau: f64) -> Result<Quaternion, QuatError> {
    let norm = b.norm();
    if norm <= TOL_DEG {
        return Err(QuatError::DegenerateQuaternion { norm });
    }
    let lhs = Quaternion::new(tau, a.x, a.y, a.z);
    Ok((lhs * b * Quaternion::I) * (-1.0 / b.norm_sq()))
}

/// Solve the star-quadratic equation `X ⋆ X = a`.
///
/// Requires `a` to be nonzero and not a negative multiple of 𝒊. The
/// solutions form the one-parameter family
/// `X_φ = √|a| · (a/|a| + 𝒊)/|a/|a| + 𝒊| · Q_φ`; `phi` selects the member.
pub fn solve_quadratic_star(a: Vector3, phi: f64) -> Result<Quaternion, QuatError> {
    let n = a.norm();
    if n <= TOL_DEG {
        return Err(QuatError::DegenerateHodographDirection);
    }
    let u = a * (1.0 / n);
    let shifted = Quaternion::new(0.0, u.x + 1.0, u.y, u.z);
    let m = shifted.norm();
    if m <= TOL_DEG {
        return Err(QuatError::DegenerateHodographDirection);
    }
    Ok(shifted * (n.sqrt() / m) * rot_i(phi))
}
