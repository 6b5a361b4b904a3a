//! Curve sources: analytic test curves with exact derivatives, spline fits
//! of sampled data, CSV loading and finite-difference fallbacks.
//!
//! Everything downstream consumes the [`CurveSource`] trait: a parameter
//! domain plus position and derivatives up to order 4. Sources are
//! immutable after construction and safe to evaluate concurrently.

use std::path::Path;

use thiserror::Error;

use crate::quat::Vector3;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("need at least 8 samples, got {count}")]
    InsufficientSamples { count: usize },
    #[error("sample parameters must be strictly increasing (violated at index {index})")]
    NonMonotonicParameter { index: usize },
    #[error("row {row}: {message}")]
    ParseError { row: usize, message: String },
    #[error("file contains no data rows")]
    EmptyFile,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(
        "derivative of order {order} disagrees with finite differences at xi = {xi} \
         (relative error {relative_error:e})"
    )]
    DerivativeMismatch {
        order: usize,
        xi: f64,
        relative_error: f64,
    },
}

/// A parametric curve with derivatives up to order 4.
pub trait CurveSource: Sync {
    /// Parameter domain `[xi0, xif]`.
    fn domain(&self) -> (f64, f64);

    /// Order-`order` derivative at `xi`; `order = 0` is the position.
    /// `order` must be in `0..=4` and `xi` inside the domain.
    fn evaluate(&self, xi: f64, order: usize) -> Vector3;

    /// Short human-readable description for document metadata.
    fn describe(&self) -> String;
}

// ---------------------------------------------------------------------------
// Built-in analytic curves
// ---------------------------------------------------------------------------

/// The oscillatory test curve
/// `λ(ξ) = (1.5 sin 7.2ξ, cos 9ξ, e^{cos 1.8ξ})` on `[0, 1]`, with
/// hand-coded exact derivatives.
pub struct ExemplaryCurve {
    /// Zero the y component (the planar variant).
    planar: bool,
}

impl ExemplaryCurve {
    pub fn new() -> Self {
        ExemplaryCurve { planar: false }
    }

    pub fn planar() -> Self {
        ExemplaryCurve { planar: true }
    }
}

impl Default for ExemplaryCurve {
    fn default() -> Self {
        ExemplaryCurve::new()
    }
}

/// d^m/dξ^m of `a sin(wξ)`: `a w^m sin(wξ + m π/2)`.
fn sin_deriv(a: f64, w: f64, xi: f64, m: usize) -> f64 {
    a * w.powi(m as i32) * (w * xi + m as f64 * std::f64::consts::FRAC_PI_2).sin()
}

fn cos_deriv(a: f64, w: f64, xi: f64, m: usize) -> f64 {
    a * w.powi(m as i32) * (w * xi + m as f64 * std::f64::consts::FRAC_PI_2).cos()
}

/// d^m/dξ^m of `e^{cos(wξ)}` via Faà di Bruno with `g = cos(wξ)`.
fn exp_cos_deriv(w: f64, xi: f64, m: usize) -> f64 {
    let g = (w * xi).cos();
    let g1 = -w * (w * xi).sin();
    let g2 = -w * w * g;
    let g3 = -w * w * g1;
    let g4 = -w * w * g2;
    let e = g.exp();
    match m {
        0 => e,
        1 => g1 * e,
        2 => (g2 + g1 * g1) * e,
        3 => (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * e,
        4 => {
            (g4 + 4.0 * g1 * g3 + 3.0 * g2 * g2 + 6.0 * g1 * g1 * g2 + g1 * g1 * g1 * g1) * e
        }
        _ => panic!("derivative order {m} not supported"),
    }
}

impl CurveSource for ExemplaryCurve {
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn evaluate(&self, xi: f64, order: usize) -> Vector3 {
        let x = sin_deriv(1.5, 7.2, xi, order);
        let y = if self.planar {
            0.0
        } else {
            cos_deriv(1.0, 9.0, xi, order)
        };
        let z = exp_cos_deriv(1.8, xi, order);
        Vector3::new(x, y, z)
    }

    fn describe(&self) -> String {
        if self.planar {
            "builtin:exemplary-planar".into()
        } else {
            "builtin:exemplary".into()
        }
    }
}

/// The straight line `γ(ξ) = (ξ, 0, 0)` on `[0, 1]`.
pub struct LineCurve;

impl CurveSource for LineCurve {
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn evaluate(&self, xi: f64, order: usize) -> Vector3 {
        match order {
            0 => Vector3::new(xi, 0.0, 0.0),
            1 => Vector3::new(1.0, 0.0, 0.0),
            _ => Vector3::ZERO,
        }
    }

    fn describe(&self) -> String {
        "builtin:line".into()
    }
}

/// One turn of a unit-radius helix with unit pitch on `[0, 1]`.
pub struct HelixCurve;

impl CurveSource for HelixCurve {
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn evaluate(&self, xi: f64, order: usize) -> Vector3 {
        let w = 2.0 * std::f64::consts::PI;
        let z = match order {
            0 => xi,
            1 => 1.0,
            _ => 0.0,
        };
        Vector3::new(cos_deriv(1.0, w, xi, order), sin_deriv(1.0, w, xi, order), z)
    }

    fn describe(&self) -> String {
        "builtin:helix".into()
    }
}

/// Look up a built-in curve by its CLI name.
pub fn builtin_source(name: &str) -> Option<Box<dyn CurveSource>> {
    match name {
        "exemplary" => Some(Box::new(ExemplaryCurve::new())),
        "exemplary-planar" => Some(Box::new(ExemplaryCurve::planar())),
        "line" => Some(Box::new(LineCurve)),
        "helix" => Some(Box::new(HelixCurve)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Finite-difference machinery (Fornberg weights)
// ---------------------------------------------------------------------------

/// Finite-difference weights for the order-`m` derivative at `z` on the
/// given nodes (Fornberg's recurrence). Works for arbitrary, including
/// one-sided, node placements.
pub fn fd_weights(z: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > m, "need more than {m} nodes for an order-{m} derivative");
    // c[k][j]: weight of node j for derivative order k
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c.swap_remove(m)
}

/// Nine uniformly spaced nodes of pitch `h` around `xi`, shifted to stay
/// inside `[lo, hi]` (one-sided near the edges).
fn fd_nodes(xi: f64, h: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut start = xi - 4.0 * h;
    if start < lo {
        start = lo;
    }
    if start + 8.0 * h > hi {
        start = hi - 8.0 * h;
    }
    (0..9).map(|i| start + i as f64 * h).collect()
}

/// 8th-order finite-difference estimate of `d/dxi [src.evaluate(·, order)]`.
fn fd_of_order(src: &dyn CurveSource, xi: f64, order: usize, h: f64) -> Vector3 {
    let (lo, hi) = src.domain();
    let nodes = fd_nodes(xi, h, lo, hi);
    let w = fd_weights(xi, &nodes, 1);
    let mut acc = Vector3::ZERO;
    for (node, wi) in nodes.iter().zip(w.iter()) {
        acc = acc + src.evaluate(*node, order) * *wi;
    }
    acc
}

/// Validation hook: check that each derivative order `m` in `1..=4` agrees
/// with an 8th-order finite difference of order `m − 1` at interior sample
/// points, to 1e−5 relative. Chaining through successive first derivatives
/// keeps the stencil order low, which is what makes the check usable for
/// spline sources whose 5th derivative jumps at knots.
pub fn validate_source(src: &dyn CurveSource) -> Result<(), IngestError> {
    let (lo, hi) = src.domain();
    let width = hi - lo;
    let h = (1e-5 * width).max(1e-7);
    let n_probe = 23;
    for m in 1..=4usize {
        // scale per order: largest derivative magnitude over the probes
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        let mut worst_xi = lo;
        for i in 0..n_probe {
            let xi = lo + width * (i as f64 + 0.5) / n_probe as f64;
            let exact = src.evaluate(xi, m);
            let approx = fd_of_order(src, xi, m - 1, h);
            scale = scale.max(exact.norm());
            let err = (exact - approx).norm();
            if err > worst {
                worst = err;
                worst_xi = xi;
            }
        }
        let rel = worst / scale.max(1.0);
        if rel > 1e-5 {
            return Err(IngestError::DerivativeMismatch {
                order: m,
                xi: worst_xi,
                relative_error: rel,
            });
        }
    }
    Ok(())
}

/// Wraps a position-only function with finite-difference derivatives:
/// 8th-order stencils of pitch `max(1e−4, 1e−3·width)`, one-sided at the
/// domain edges.
pub struct FiniteDifferenceSource<F: Fn(f64) -> Vector3 + Sync> {
    f: F,
    lo: f64,
    hi: f64,
    h: f64,
}

impl<F: Fn(f64) -> Vector3 + Sync> FiniteDifferenceSource<F> {
    pub fn new(f: F, lo: f64, hi: f64) -> Self {
        assert!(hi > lo);
        let h = (1e-3 * (hi - lo)).max(1e-4);
        FiniteDifferenceSource { f, lo, hi, h }
    }
}

impl<F: Fn(f64) -> Vector3 + Sync> CurveSource for FiniteDifferenceSource<F> {
    fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn evaluate(&self, xi: f64, order: usize) -> Vector3 {
        if order == 0 {
            return (self.f)(xi);
        }
        let nodes = fd_nodes(xi, self.h, self.lo, self.hi);
        let w = fd_weights(xi, &nodes, order);
        let mut acc = Vector3::ZERO;
        for (node, wi) in nodes.iter().zip(w.iter()) {
            acc = acc + (self.f)(*node) * *wi;
        }
        acc
    }

    fn describe(&self) -> String {
        "finite-difference".into()
    }
}

// ---------------------------------------------------------------------------
// Quintic spline fit of sampled data
// ---------------------------------------------------------------------------

/// Degree of the interpolating spline: the lowest degree that is C⁴ across
/// knots, matching the derivative order the pipeline consumes.
const SPLINE_DEGREE: usize = 5;

/// Sampled curve fitted with an interpolating quintic B-spline per
/// coordinate (clamped knots by knot averaging, collocation solve).
pub struct SampledCurve {
    knots: Vec<f64>,
    ctrl: Vec<Vector3>,
    lo: f64,
    hi: f64,
    fit_residual: f64,
    description: String,
}

fn find_span(knots: &[f64], p: usize, n_ctrl: usize, u: f64) -> usize {
    if u >= knots[n_ctrl] {
        return n_ctrl - 1;
    }
    let mut lo = p;
    let mut hi = n_ctrl;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if u < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Nonzero B-spline basis functions and derivatives up to order `nd` at
/// `u` in span `span`; `out[k][j]` is the k-th derivative of basis
/// `span − p + j`.
fn ders_basis_funs(span: usize, u: f64, p: usize, nd: usize, knots: &[f64]) -> Vec<Vec<f64>> {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders = vec![vec![0.0; p + 1]; nd + 1];
    ders[0][..(p + 1)].copy_from_slice(&ndu.iter().map(|row| row[p]).collect::<Vec<_>>());
    for r in 0..=p {
        let mut a = vec![vec![0.0; p + 1]; 2];
        let mut s1 = 0;
        let mut s2 = 1;
        a[0][0] = 1.0;
        for k in 1..=nd.min(p) {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
            for j in j1..=j2 {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][(rk + j as isize) as usize];
                d += a[s2][j] * ndu[(rk + j as isize) as usize][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for k in 1..=nd.min(p) {
        for v in ders[k].iter_mut() {
            *v *= factor;
        }
        factor *= (p - k) as f64;
    }
    ders
}

/// Dense LU solve with partial pivoting, shared factorization for the
/// three coordinate right-hand sides.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<Vector3>) -> Vec<Vector3> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = 1.0 / a[col][col];
        for row in (col + 1)..n {
            let factor = a[row][col] * inv;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] = b[row] - b[col] * factor;
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc = acc - b[k] * a[col][k];
        }
        b[col] = acc * (1.0 / a[col][col]);
    }
    b
}

impl SampledCurve {
    /// Interpolating quintic spline through the samples. The fit residual
    /// (max distance from the spline to a sample) is recorded and checked
    /// against `fit_tol`.
    pub fn from_samples(
        points: &[(f64, Vector3)],
        fit_tol: f64,
    ) -> Result<SampledCurve, IngestError> {
        let n = points.len();
        if n < 8 {
            return Err(IngestError::InsufficientSamples { count: n });
        }
        for i in 1..n {
            if points[i].0 <= points[i - 1].0 {
                return Err(IngestError::NonMonotonicParameter { index: i });
            }
        }
        let p = SPLINE_DEGREE;
        let t: Vec<f64> = points.iter().map(|s| s.0).collect();
        // clamped knot vector with interior knots by knot averaging
        let mut knots = vec![t[0]; p + 1];
        for j in 1..=(n - p - 1) {
            let avg: f64 = t[j..j + p].iter().sum::<f64>() / p as f64;
            knots.push(avg);
        }
        knots.extend(std::iter::repeat(t[n - 1]).take(p + 1));
        // collocation matrix: row k holds the nonzero basis values at t_k
        let mut a = vec![vec![0.0; n]; n];
        for (k, &u) in t.iter().enumerate() {
            let span = find_span(&knots, p, n, u);
            let ders = ders_basis_funs(span, u, p, 0, &knots);
            for j in 0..=p {
                a[k][span - p + j] = ders[0][j];
            }
        }
        let rhs: Vec<Vector3> = points.iter().map(|s| s.1).collect();
        let ctrl = solve_dense(a, rhs);
        let mut curve = SampledCurve {
            knots,
            ctrl,
            lo: t[0],
            hi: t[n - 1],
            fit_residual: 0.0,
            description: format!("samples:{n}"),
        };
        let residual = points
            .iter()
            .map(|&(u, pt)| (curve.evaluate(u, 0) - pt).norm())
            .fold(0.0, f64::max);
        curve.fit_residual = residual;
        if residual > fit_tol {
            return Err(IngestError::ParseError {
                row: 0,
                message: format!("fit residual {residual:e} exceeds fit_tol {fit_tol:e}"),
            });
        }
        Ok(curve)
    }

    pub fn fit_residual(&self) -> f64 {
        self.fit_residual
    }

    pub fn set_description(&mut self, description: String) {
        self.description = description;
    }
}

impl CurveSource for SampledCurve {
    fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn evaluate(&self, xi: f64, order: usize) -> Vector3 {
        let u = xi.clamp(self.lo, self.hi);
        let p = SPLINE_DEGREE;
        let span = find_span(&self.knots, p, self.ctrl.len(), u);
        let ders = ders_basis_funs(span, u, p, order, &self.knots);
        let mut acc = Vector3::ZERO;
        for j in 0..=p {
            acc = acc + self.ctrl[span - p + j] * ders[order][j];
        }
        acc
    }

    fn describe(&self) -> String {
        self.description.clone()
    }
}

// ---------------------------------------------------------------------------
// CSV loading
// ---------------------------------------------------------------------------

/// Load trajectory samples from a CSV file: rows of `x,y,z` (parameter
/// assigned uniformly by row index) or `t,x,y,z` (parameter affinely
/// normalized to `[0, 1]`); comma- or whitespace-delimited; an optional
/// header row is detected by a non-numeric first token.
pub fn load_orbit_csv(path: &Path) -> Result<Vec<(f64, Vector3)>, IngestError> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = if trimmed.contains(',') {
            trimmed.split(',').map(str::trim).collect()
        } else {
            trimmed.split_whitespace().collect()
        };
        // header: first data-bearing line whose first token is not a number
        if rows.is_empty() && tokens[0].parse::<f64>().is_err() {
            continue;
        }
        let values: Result<Vec<f64>, _> = tokens.iter().map(|t| t.parse::<f64>()).collect();
        let values = values.map_err(|e| IngestError::ParseError {
            row,
            message: e.to_string(),
        })?;
        if values.len() != 3 && values.len() != 4 {
            return Err(IngestError::ParseError {
                row,
                message: format!("expected 3 or 4 columns, got {}", values.len()),
            });
        }
        if let Some(w) = width {
            if values.len() != w {
                return Err(IngestError::ParseError {
                    row,
                    message: format!("column count changed from {w} to {}", values.len()),
                });
            }
        } else {
            width = Some(values.len());
        }
        rows.push((row, values));
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    let n = rows.len();
    let samples = match width.unwrap() {
        3 => rows
            .iter()
            .enumerate()
            .map(|(i, (_, v))| {
                let xi = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                (xi, Vector3::new(v[0], v[1], v[2]))
            })
            .collect(),
        4 => {
            let t0 = rows[0].1[0];
            let tf = rows[n - 1].1[0];
            if tf <= t0 {
                return Err(IngestError::ParseError {
                    row: rows[n - 1].0,
                    message: "time column must increase".into(),
                });
            }
            rows.iter()
                .map(|(_, v)| ((v[0] - t0) / (tf - t0), Vector3::new(v[1], v[2], v[3])))
                .collect()
        }
        _ => unreachable!(),
    };
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn exemplary_values_at_zero() {
        let c = ExemplaryCurve::new();
        let p = c.evaluate(0.0, 0);
        assert!((p - Vector3::new(0.0, 1.0, std::f64::consts::E)).norm() < 1e-15);
        let v = c.evaluate(0.0, 1);
        assert!((v - Vector3::new(10.8, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn exemplary_derivatives_match_finite_differences() {
        let c = ExemplaryCurve::new();
        // large enough to keep the 1/h^m rounding amplification below the
        // 1e-6 gate at order 4, small enough for the truncation term
        let h = 1e-2;
        for k in 0..20 {
            // deterministic pseudo-random probes away from the edges
            let xi = 0.05 + 0.9 * ((k as f64 * 0.618034) % 1.0);
            for m in 1..=4usize {
                let nodes: Vec<f64> = (0..9).map(|i| xi + (i as f64 - 4.0) * h).collect();
                let w = fd_weights(xi, &nodes, m);
                let mut fd = Vector3::ZERO;
                for (node, wi) in nodes.iter().zip(w.iter()) {
                    fd = fd + c.evaluate(*node, 0) * *wi;
                }
                let exact = c.evaluate(xi, m);
                assert!(
                    (fd - exact).norm() <= 1e-6 * exact.norm().max(1.0),
                    "m = {m}, xi = {xi}"
                );
            }
        }
    }

    #[test]
    fn planar_variant_zeroes_y() {
        let c = ExemplaryCurve::planar();
        for k in 0..=10 {
            let xi = k as f64 / 10.0;
            for m in 0..=4 {
                assert_eq!(c.evaluate(xi, m).y, 0.0);
            }
        }
    }

    #[test]
    fn line_and_helix_derivatives() {
        let line = LineCurve;
        assert_eq!(line.evaluate(0.3, 0), Vector3::new(0.3, 0.0, 0.0));
        assert_eq!(line.evaluate(0.3, 1), Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(line.evaluate(0.3, 2), Vector3::ZERO);
        let helix = HelixCurve;
        let p = helix.evaluate(0.0, 0);
        assert!((p - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        let w = 2.0 * std::f64::consts::PI;
        let v = helix.evaluate(0.25, 1);
        assert!((v - Vector3::new(-w, 0.0, 1.0)).norm() < 1e-12);
        assert!(validate_source(&helix).is_ok());
    }

    #[test]
    fn builtin_lookup() {
        for name in ["exemplary", "exemplary-planar", "line", "helix"] {
            assert!(builtin_source(name).is_some(), "{name}");
        }
        assert!(builtin_source("nonesuch").is_none());
    }

    #[test]
    fn fd_weights_match_known_central_stencil() {
        // 8th-order central first derivative on unit-spaced symmetric nodes
        let nodes: Vec<f64> = (-4..=4).map(|i| i as f64).collect();
        let w = fd_weights(0.0, &nodes, 1);
        let expected = [
            1.0 / 280.0,
            -4.0 / 105.0,
            1.0 / 5.0,
            -4.0 / 5.0,
            0.0,
            4.0 / 5.0,
            -1.0 / 5.0,
            4.0 / 105.0,
            -1.0 / 280.0,
        ];
        for (a, b) in w.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn validate_source_passes_builtins_and_catches_lies() {
        assert!(validate_source(&ExemplaryCurve::new()).is_ok());
        assert!(validate_source(&LineCurve).is_ok());

        struct Liar;
        impl CurveSource for Liar {
            fn domain(&self) -> (f64, f64) {
                (0.0, 1.0)
            }
            fn evaluate(&self, xi: f64, order: usize) -> Vector3 {
                match order {
                    0 => Vector3::new(xi * xi, 0.0, 0.0),
                    1 => Vector3::new(7.0, 0.0, 0.0), // wrong on purpose
                    _ => Vector3::ZERO,
                }
            }
            fn describe(&self) -> String {
                "liar".into()
            }
        }
        assert!(matches!(
            validate_source(&Liar),
            Err(IngestError::DerivativeMismatch { order: 1, .. })
        ));
    }

    #[test]
    fn finite_difference_source_derivatives() {
        let c = ExemplaryCurve::new();
        let fd = FiniteDifferenceSource::new(|xi| c.evaluate(xi, 0), 0.0, 1.0);
        for m in 1..=4usize {
            let mut scale = 0.0f64;
            let mut worst = 0.0f64;
            for k in 0..=20 {
                let xi = k as f64 / 20.0;
                let exact = c.evaluate(xi, m);
                scale = scale.max(exact.norm());
                worst = worst.max((fd.evaluate(xi, m) - exact).norm());
            }
            assert!(worst <= 1e-4 * scale, "order {m}: {worst:e} vs scale {scale:e}");
        }
    }

    #[test]
    fn spline_reproduces_line_with_flat_higher_derivatives() {
        let samples: Vec<(f64, Vector3)> = (0..20)
            .map(|i| {
                let xi = i as f64 / 19.0;
                (xi, Vector3::new(xi, 2.0 * xi, -xi))
            })
            .collect();
        let c = SampledCurve::from_samples(&samples, 1e-8).unwrap();
        assert!(c.fit_residual() < 1e-10);
        for k in 0..=50 {
            let xi = k as f64 / 50.0;
            let p = c.evaluate(xi, 0);
            assert!((p - Vector3::new(xi, 2.0 * xi, -xi)).norm() < 1e-9);
            for m in 2..=4 {
                assert!(c.evaluate(xi, m).norm() < 1e-8 * 3.0, "m = {m}, xi = {xi}");
            }
        }
    }

    #[test]
    fn spline_fit_of_exemplary_curve() {
        let src = ExemplaryCurve::new();
        let samples: Vec<(f64, Vector3)> = (0..500)
            .map(|i| {
                let xi = i as f64 / 499.0;
                (xi, src.evaluate(xi, 0))
            })
            .collect();
        let fit = SampledCurve::from_samples(&samples, 1e-8).unwrap();
        assert!(validate_source(&fit).is_ok());
        for k in 0..=997 {
            let xi = k as f64 / 997.0;
            let err = (fit.evaluate(xi, 0) - src.evaluate(xi, 0)).norm();
            assert!(err < 1e-8, "xi = {xi}: {err:e}");
        }
    }

    #[test]
    fn spline_closed_ellipse() {
        let samples: Vec<(f64, Vector3)> = (0..200)
            .map(|i| {
                let xi = i as f64 / 199.0;
                let th = 2.0 * std::f64::consts::PI * xi;
                (xi, Vector3::new(2.0 * th.cos(), th.sin(), 0.0))
            })
            .collect();
        let c = SampledCurve::from_samples(&samples, 1e-9).unwrap();
        let gap = (c.evaluate(0.0, 0) - c.evaluate(1.0, 0)).norm();
        assert!(gap < 1e-9);
    }

    #[test]
    fn spline_input_validation() {
        let short: Vec<(f64, Vector3)> =
            (0..5).map(|i| (i as f64, Vector3::ZERO)).collect();
        assert!(matches!(
            SampledCurve::from_samples(&short, 1e-6),
            Err(IngestError::InsufficientSamples { count: 5 })
        ));
        let mut bad: Vec<(f64, Vector3)> =
            (0..10).map(|i| (i as f64 / 9.0, Vector3::ZERO)).collect();
        bad[4].0 = bad[3].0;
        assert!(matches!(
            SampledCurve::from_samples(&bad, 1e-6),
            Err(IngestError::NonMonotonicParameter { index: 4 })
        ));
    }

    #[test]
    fn spline_is_deterministic() {
        let samples: Vec<(f64, Vector3)> = (0..50)
            .map(|i| {
                let xi = i as f64 / 49.0;
                (xi, Vector3::new(xi.sin(), xi.cos(), xi * xi))
            })
            .collect();
        let a = SampledCurve::from_samples(&samples, 1e-8).unwrap();
        let b = SampledCurve::from_samples(&samples, 1e-8).unwrap();
        for (x, y) in a.ctrl.iter().zip(b.ctrl.iter()) {
            assert_eq!(x.to_array(), y.to_array());
        }
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn csv_three_columns_uniform_parameter() {
        let mut body = String::new();
        for i in 0..100 {
            body.push_str(&format!("{}.0,2.0,3.0\n", i));
        }
        let f = write_temp(&body);
        let samples = load_orbit_csv(f.path()).unwrap();
        assert_eq!(samples.len(), 100);
        assert_eq!(samples[0].0, 0.0);
        assert!((samples[42].0 - 42.0 / 99.0).abs() < 1e-15);
        assert_eq!(samples[99].0, 1.0);
        assert_eq!(samples[7].1, Vector3::new(7.0, 2.0, 3.0));
    }

    #[test]
    fn csv_four_columns_normalized_time() {
        let f = write_temp("t,x,y,z\n10.0,1,2,3\n15.0,4,5,6\n20.0,7,8,9\n");
        let samples = load_orbit_csv(f.path()).unwrap();
        assert_eq!(samples.len(), 3);
        assert_eq!(samples[0].0, 0.0);
        assert_eq!(samples[1].0, 0.5);
        assert_eq!(samples[2].0, 1.0);
        assert_eq!(samples[1].1, Vector3::new(4.0, 5.0, 6.0));
    }

    #[test]
    fn csv_whitespace_and_scientific() {
        let f = write_temp("1.0e0 2.0e0 3.0e-1\n2.0 3.0 4.0\n");
        let samples = load_orbit_csv(f.path()).unwrap();
        assert_eq!(samples[0].1, Vector3::new(1.0, 2.0, 0.3));
    }

    #[test]
    fn csv_malformed_row_names_row() {
        let mut body = String::new();
        for i in 1..=10 {
            if i == 7 {
                body.push_str("1.0,oops,3.0\n");
            } else {
                body.push_str("1.0,2.0,3.0\n");
            }
        }
        let f = write_temp(&body);
        match load_orbit_csv(f.path()) {
            Err(IngestError::ParseError { row: 7, .. }) => {}
            other => panic!("expected ParseError at row 7, got {other:?}"),
        }
    }

    #[test]
    fn csv_empty_file() {
        let f = write_temp("x,y,z\n");
        assert!(matches!(load_orbit_csv(f.path()), Err(IngestError::EmptyFile)));
        let f = write_temp("");
        assert!(matches!(load_orbit_csv(f.path()), Err(IngestError::EmptyFile)));
    }
}
