//! Bernstein-Bezier polynomials over real, vector and quaternion
//! coefficients: de Casteljau evaluation, differentiation and exact
//! integration.
//!
//! One generic engine serves the parametric speed (real), hodograph and
//! path (vector) and preimage (quaternion) polynomials. Degrees reach 17,
//! where monomial bases are ill-conditioned; de Casteljau stays stable.

use std::ops::{Add, Mul, Sub};

use crate::quat::{Quaternion, Vector3};

/// Coefficient types the Bernstein engine can carry.
pub trait Coefficient:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    const ZERO: Self;
}

impl Coefficient for f64 {
    const ZERO: f64 = 0.0;
}

impl Coefficient for Vector3 {
    const ZERO: Vector3 = Vector3::ZERO;
}

impl Coefficient for Quaternion {
    const ZERO: Quaternion = Quaternion::ZERO;
}

/// Polynomial of degree `n` in Bernstein-Bezier form with `n + 1` control
/// coefficients over the local parameter `ξ ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinPoly<C> {
    ctrl: Vec<C>,
}

impl<C: Coefficient> BernsteinPoly<C> {
    /// Build from control coefficients; `ctrl.len() = degree + 1 >= 1`.
    pub fn new(ctrl: Vec<C>) -> Self {
        assert!(!ctrl.is_empty(), "a Bernstein polynomial needs at least one coefficient");
        BernsteinPoly { ctrl }
    }

    pub fn degree(&self) -> usize {
        self.ctrl.len() - 1
    }

    pub fn ctrl(&self) -> &[C] {
        &self.ctrl
    }

    /// Evaluate at `xi` by the de Casteljau recursion.
    ///
    /// Intended for `xi` in `[0, 1]`; slightly outside values are accepted
    /// for finite-difference probes.
    pub fn eval(&self, xi: f64) -> C {
        debug_assert!((-1e-6..=1.0 + 1e-6).contains(&xi), "xi = {xi} outside [0,1]");
        let mut work = self.ctrl.clone();
        let n = self.degree();
        for r in 1..=n {
            for i in 0..=(n - r) {
                work[i] = work[i] * (1.0 - xi) + work[i + 1] * xi;
            }
        }
        work[0]
    }

    /// Derivative polynomial, degree `n - 1` with coefficients
    /// `n (c_{i+1} - c_i)`. The derivative of a constant is the zero
    /// constant polynomial.
    pub fn derivative(&self) -> BernsteinPoly<C> {
        let n = self.degree();
        if n == 0 {
            return BernsteinPoly::new(vec![C::ZERO]);
        }
        let scale = n as f64;
        let ctrl = self
            .ctrl
            .windows(2)
            .map(|w| (w[1] - w[0]) * scale)
            .collect();
        BernsteinPoly::new(ctrl)
    }
}

impl BernsteinPoly<f64> {
    /// Exact definite integral over `[xi_b, xi_e] ⊆ [0, 1]` via the
    /// Bernstein antiderivative (cumulative sums scaled by `1/(n+1)`).
    pub fn integral(&self, xi_b: f64, xi_e: f64) -> f64 {
        debug_assert!(0.0 <= xi_b && xi_b <= xi_e && xi_e <= 1.0 + 1e-12);
        let anti = self.antiderivative();
        anti.eval(xi_e) - anti.eval(xi_b)
    }

    /// Antiderivative polynomial with value 0 at `ξ = 0`.
    pub fn antiderivative(&self) -> BernsteinPoly<f64> {
        let inv = 1.0 / (self.degree() as f64 + 1.0);
        let mut ctrl = Vec::with_capacity(self.ctrl.len() + 1);
        let mut acc = 0.0;
        ctrl.push(0.0);
        for &c in &self.ctrl {
            acc += c * inv;
            ctrl.push(acc);
        }
        BernsteinPoly::new(ctrl)
    }
}
