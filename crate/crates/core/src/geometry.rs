//! Beam midline geometry.
//!
//! A [`Curve`] wraps a [`ParamCurve`] together with its arc-length map, so that
//! every query is posed in arc length `s ∈ [0, L]`. The solver only ever asks
//! for [`FrameSample`]s (position, unit tangent and curvature vector). Frenet
//! frames and the closest-point map are provided for verification and are not
//! used on the solution path.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::GaussLegendre;
use crate::{Mat3, Vec3};

/// Below this speed `|dr/dξ|` a curve is rejected as degenerate.
pub const MIN_SPEED: f64 = 1e-14;

/// Number of Gauss points used per arc-length table interval.
const ARC_GAUSS_POINTS: usize = 16;

/// Default number of arc-length table samples per spline piece.
const SAMPLES_PER_PIECE: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate curve: |dr/dxi| = {speed:e} at xi = {xi}")]
    DegenerateCurve { xi: f64, speed: f64 },
    #[error("arc length {s} outside [0, {length}]")]
    OutOfRange { s: f64, length: f64 },
    #[error("zero curvature at s = {s} (|kappa| = {kappa:e}); Frenet frame undefined")]
    ZeroCurvature { s: f64, kappa: f64 },
    #[error("closest point is ambiguous: {count} minimizers at distance {distance}")]
    AmbiguousClosestPoint { count: usize, distance: f64 },
    #[error("point projects beyond the curve end (xi = {xi})")]
    BeyondEnd { xi: f64 },
    #[error("invalid curve: {0}")]
    Invalid(String),
}

/// Analytic or spline description of the midline.
///
/// Parameter domains: line `[0, 1]`; arc and helix use the angle itself;
/// a Hermite spline with `n` points uses `[0, n - 1]` with one unit per piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamCurve {
    Line {
        start: Vec3,
        end: Vec3,
    },
    /// `r(φ) = center + radius (cos φ e1 + sin φ e2)`; `e2` is orthogonalized
    /// against `e1` on construction.
    Arc {
        center: Vec3,
        radius: f64,
        basis: [Vec3; 2],
        angle: [f64; 2],
    },
    /// `r(φ) = center + (a cos φ, a sin φ, b φ)`.
    Helix {
        #[serde(default = "Vec3::zeros")]
        center: Vec3,
        radius: f64,
        pitch: f64,
        angle: [f64; 2],
    },
    /// Piecewise cubic Hermite curve; `tangents[i]` is `dr/dξ` at knot `i`.
    HermiteSpline {
        points: Vec<Vec3>,
        tangents: Vec<Vec3>,
    },
}

/// Raw derivatives of `r` with respect to the curve parameter.
#[derive(Debug, Clone, Copy)]
pub struct ParamDerivatives {
    pub r: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
}

impl ParamCurve {
    /// Builds a Hermite spline from knots and the two end tangents, with
    /// Catmull-Rom interior tangents.
    pub fn spline_with_end_tangents(points: Vec<Vec3>, start: Vec3, end: Vec3) -> Self {
        let n = points.len();
        let mut tangents = Vec::with_capacity(n);
        for i in 0..n {
            let m = if i == 0 {
                start
            } else if i + 1 == n {
                end
            } else {
                (points[i + 1] - points[i - 1]) * 0.5
            };
            tangents.push(m);
        }
        ParamCurve::HermiteSpline { points, tangents }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            ParamCurve::Line { .. } => (0.0, 1.0),
            ParamCurve::Arc { angle, .. } | ParamCurve::Helix { angle, .. } => (angle[0], angle[1]),
            ParamCurve::HermiteSpline { points, .. } => (0.0, (points.len() - 1) as f64),
        }
    }

    /// Constant `|dr/dξ|` for the analytic kinds.
    pub fn constant_speed(&self) -> Option<f64> {
        match self {
            ParamCurve::Line { start, end } => Some((end - start).norm()),
            ParamCurve::Arc { radius, .. } => Some(*radius),
            ParamCurve::Helix { radius, pitch, .. } => Some(radius.hypot(*pitch)),
            ParamCurve::HermiteSpline { .. } => None,
        }
    }

    fn pieces(&self) -> usize {
        match self {
            ParamCurve::HermiteSpline { points, .. } => points.len() - 1,
            _ => 1,
        }
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let bad = |m: &str| Err(GeometryError::Invalid(m.to_string()));
        match self {
            ParamCurve::Line { start, end } => {
                if (end - start).norm() <= MIN_SPEED {
                    return Err(GeometryError::DegenerateCurve {
                        xi: 0.0,
                        speed: (end - start).norm(),
                    });
                }
            }
            ParamCurve::Arc {
                radius, basis, angle, ..
            } => {
                if !(*radius > 0.0) {
                    return bad("arc radius must be positive");
                }
                if !(angle[1] > angle[0]) {
                    return bad("arc angle range must be increasing");
                }
                let e1 = basis[0];
                let e2 = basis[1] - e1 * (basis[1].dot(&e1) / e1.norm_squared().max(f64::MIN_POSITIVE));
                if e1.norm() < 1e-12 || e2.norm() < 1e-12 * basis[1].norm().max(1.0) {
                    return bad("arc basis vectors must be independent");
                }
            }
            ParamCurve::Helix {
                radius, pitch, angle, ..
            } => {
                if !(*radius > 0.0) || !pitch.is_finite() {
                    return bad("helix radius must be positive");
                }
                if !(angle[1] > angle[0]) {
                    return bad("helix angle range must be increasing");
                }
            }
            ParamCurve::HermiteSpline { points, tangents } => {
                if points.len() < 2 {
                    return bad("spline needs at least two points");
                }
                if tangents.len() != points.len() {
                    return bad("spline needs one tangent per point");
                }
            }
        }
        Ok(())
    }

    /// Orthonormalized arc basis.
    fn arc_basis(basis: &[Vec3; 2]) -> (Vec3, Vec3) {
        let e1 = basis[0].normalize();
        let e2 = (basis[1] - e1 * basis[1].dot(&e1)).normalize();
        (e1, e2)
    }

    pub fn derivatives(&self, xi: f64) -> ParamDerivatives {
        match self {
            ParamCurve::Line { start, end } => ParamDerivatives {
                r: start + (end - start) * xi,
                d1: end - start,
                d2: Vec3::zeros(),
                d3: Vec3::zeros(),
            },
            ParamCurve::Arc {
                center,
                radius,
                basis,
                ..
            } => {
                let (e1, e2) = Self::arc_basis(basis);
                let (s, c) = xi.sin_cos();
                let radial = e1 * c + e2 * s;
                let along = e2 * c - e1 * s;
                ParamDerivatives {
                    r: center + radial * *radius,
                    d1: along * *radius,
                    d2: -radial * *radius,
                    d3: -along * *radius,
                }
            }
            ParamCurve::Helix {
                center,
                radius: a,
                pitch: b,
                ..
            } => {
                let (s, c) = xi.sin_cos();
                ParamDerivatives {
                    r: center + Vec3::new(a * c, a * s, b * xi),
                    d1: Vec3::new(-a * s, a * c, *b),
                    d2: Vec3::new(-a * c, -a * s, 0.0),
                    d3: Vec3::new(a * s, -a * c, 0.0),
                }
            }
            ParamCurve::HermiteSpline { points, tangents } => {
                let pieces = points.len() - 1;
                let i = (xi.floor().max(0.0) as usize).min(pieces - 1);
                let u = xi - i as f64;
                let (p0, p1, m0, m1) = (points[i], points[i + 1], tangents[i], tangents[i + 1]);
                let (u2, u3) = (u * u, u * u * u);
                let h = [2.0 * u3 - 3.0 * u2 + 1.0, u3 - 2.0 * u2 + u, -2.0 * u3 + 3.0 * u2, u3 - u2];
                let dh = [6.0 * u2 - 6.0 * u, 3.0 * u2 - 4.0 * u + 1.0, -6.0 * u2 + 6.0 * u, 3.0 * u2 - 2.0 * u];
                let ddh = [12.0 * u - 6.0, 6.0 * u - 4.0, -12.0 * u + 6.0, 6.0 * u - 2.0];
                let dddh = [12.0, 6.0, -12.0, 6.0];
                let comb = |w: [f64; 4]| p0 * w[0] + m0 * w[1] + p1 * w[2] + m1 * w[3];
                ParamDerivatives {
                    r: comb(h),
                    d1: comb(dh),
                    d2: comb(ddh),
                    d3: comb(dddh),
                }
            }
        }
    }

    /// Knot parameters that split the domain into smooth pieces.
    fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.domain();
        match self {
            ParamCurve::HermiteSpline { points, .. } => (0..points.len()).map(|i| i as f64).collect(),
            _ => vec![a, b],
        }
    }
}

/// Monotone table of `(ξ, s)` pairs with quadrature-exact interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcLengthTable {
    xi: Vec<f64>,
    s: Vec<f64>,
}

impl ArcLengthTable {
    /// Tabulates arc length with `n_samples` points, always including the
    /// piece breakpoints of the curve.
    pub fn build(curve: &ParamCurve, n_samples: usize) -> Result<Self, GeometryError> {
        if n_samples < 2 {
            return Err(GeometryError::Invalid("arc-length table needs at least two samples".into()));
        }
        let breaks = curve.breakpoints();
        let pieces = breaks.len() - 1;
        let per_piece = (n_samples - 1).div_ceil(pieces).max(1);
        let mut xi = Vec::with_capacity(pieces * per_piece + 1);
        for w in breaks.windows(2) {
            for k in 0..per_piece {
                xi.push(w[0] + (w[1] - w[0]) * k as f64 / per_piece as f64);
            }
        }
        xi.push(*breaks.last().unwrap());

        let rule = GaussLegendre::new(ARC_GAUSS_POINTS);
        let mut s = Vec::with_capacity(xi.len());
        s.push(0.0);
        for w in xi.windows(2) {
            let ds = integrate_speed(curve, &rule, w[0], w[1])?;
            if !(ds > 0.0) {
                return Err(GeometryError::DegenerateCurve { xi: w[0], speed: 0.0 });
            }
            s.push(s.last().unwrap() + ds);
        }
        Ok(Self { xi, s })
    }

    pub fn length(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xi.iter().copied().zip(self.s.iter().copied())
    }

    fn interval_of_xi(&self, xi: f64) -> usize {
        match self.xi.binary_search_by(|v| v.total_cmp(&xi)) {
            Ok(i) => i.min(self.xi.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xi.len() - 2),
        }
    }

    fn interval_of_s(&self, s: f64) -> usize {
        match self.s.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => i.min(self.s.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.s.len() - 2),
        }
    }

    pub fn arc_length(&self, curve: &ParamCurve, xi: f64) -> f64 {
        let i = self.interval_of_xi(xi);
        let rule = GaussLegendre::new(ARC_GAUSS_POINTS);
        self.s[i] + integrate_speed(curve, &rule, self.xi[i], xi).unwrap_or(0.0)
    }

    /// Inverse map by safeguarded Newton iteration inside the bracketing
    /// table interval.
    pub fn parameter(&self, curve: &ParamCurve, s: f64) -> f64 {
        let i = self.interval_of_s(s);
        let (mut lo, mut hi) = (self.xi[i], self.xi[i + 1]);
        let (s_lo, s_hi) = (self.s[i], self.s[i + 1]);
        let rule = GaussLegendre::new(ARC_GAUSS_POINTS);
        let mut xi = lo + (hi - lo) * ((s - s_lo) / (s_hi - s_lo)).clamp(0.0, 1.0);
        for _ in 0..60 {
            let f = s_lo + integrate_speed(curve, &rule, self.xi[i], xi).unwrap_or(0.0) - s;
            if f > 0.0 {
                hi = xi;
            } else {
                lo = xi;
            }
            let speed = curve.derivatives(xi).d1.norm();
            let mut next = xi - f / speed;
            if !(next >= lo && next <= hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - xi).abs() <= 1e-15 * (1.0 + xi.abs()) {
                return next;
            }
            xi = next;
        }
        xi
    }
}

fn integrate_speed(curve: &ParamCurve, rule: &GaussLegendre, a: f64, b: f64) -> Result<f64, GeometryError> {
    if a == b {
        return Ok(0.0);
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in rule.points().iter().zip(rule.weights()) {
        let xi = mid + half * x;
        let speed = curve.derivatives(xi).d1.norm();
        if speed < MIN_SPEED {
            return Err(GeometryError::DegenerateCurve { xi, speed });
        }
        acc += w * speed;
    }
    Ok(acc * half)
}

/// Position, unit tangent and curvature vector at arc length `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSample {
    pub s: f64,
    pub x: Vec3,
    pub t: Vec3,
    pub kappa: Vec3,
}

impl FrameSample {
    pub fn tangent_projector(&self) -> Mat3 {
        tangent_projector(&self.t)
    }

    pub fn normal_projector(&self) -> Mat3 {
        normal_projector(&self.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame {
    pub t: Vec3,
    pub n: Vec3,
    pub b: Vec3,
    pub kappa: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestPointResult {
    pub p: Vec3,
    pub zeta: Vec3,
    pub s: f64,
}

/// `P = t ⊗ t`.
pub fn tangent_projector(t: &Vec3) -> Mat3 {
    t * t.transpose()
}

/// `Q = I - t ⊗ t`.
pub fn normal_projector(t: &Vec3) -> Mat3 {
    Matrix3::identity() - t * t.transpose()
}

/// Any orthonormal pair completing `t` to a right-handed basis.
pub fn normal_pair(t: &Vec3) -> (Vec3, Vec3) {
    let a = if t.x.abs() <= t.y.abs() && t.x.abs() <= t.z.abs() {
        Vec3::x()
    } else if t.y.abs() <= t.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let n1 = (a - t * t.dot(&a)).normalize();
    let n2 = t.cross(&n1);
    (n1, n2)
}

#[derive(Debug, Clone, PartialEq)]
enum ArcMap {
    Uniform { xi0: f64, speed: f64 },
    Table(ArcLengthTable),
}

/// Midline curve parametrized by arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    param: ParamCurve,
    map: ArcMap,
    length: f64,
}

impl Curve {
    pub fn new(param: ParamCurve) -> Result<Self, GeometryError> {
        param.validate()?;
        let param = match param {
            ParamCurve::Arc {
                center,
                radius,
                basis,
                angle,
            } => {
                let (e1, e2) = ParamCurve::arc_basis(&basis);
                ParamCurve::Arc {
                    center,
                    radius,
                    basis: [e1, e2],
                    angle,
                }
            }
            other => other,
        };
        check_regular(&param)?;
        let (xi0, xi1) = param.domain();
        let (map, length) = match param.constant_speed() {
            Some(speed) => (ArcMap::Uniform { xi0, speed }, speed * (xi1 - xi0)),
            None => {
                let table = ArcLengthTable::build(&param, SAMPLES_PER_PIECE * param.pieces() + 1)?;
                let l = table.length();
                (ArcMap::Table(table), l)
            }
        };
        Ok(Self { param, map, length })
    }

    pub fn param(&self) -> &ParamCurve {
        &self.param
    }

    pub fn is_straight(&self) -> bool {
        matches!(self.param, ParamCurve::Line { .. })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    fn check_s(&self, s: f64) -> Result<f64, GeometryError> {
        let slack = 1e-12 * self.length;
        if !(s >= -slack && s <= self.length + slack) {
            return Err(GeometryError::OutOfRange { s, length: self.length });
        }
        Ok(s.clamp(0.0, self.length))
    }

    pub fn parameter_at(&self, s: f64) -> Result<f64, GeometryError> {
        let s = self.check_s(s)?;
        Ok(match &self.map {
            ArcMap::Uniform { xi0, speed } => xi0 + s / speed,
            ArcMap::Table(table) => table.parameter(&self.param, s),
        })
    }

    pub fn arc_length_at(&self, xi: f64) -> f64 {
        match &self.map {
            ArcMap::Uniform { xi0, speed } => (xi - xi0) * speed,
            ArcMap::Table(table) => table.arc_length(&self.param, xi),
        }
    }

    pub fn position(&self, s: f64) -> Result<Vec3, GeometryError> {
        Ok(self.param.derivatives(self.parameter_at(s)?).r)
    }

    pub fn frame(&self, s: f64) -> Result<FrameSample, GeometryError> {
        let s = self.check_s(s)?;
        let d = self.param.derivatives(self.parameter_at(s)?);
        let speed = d.d1.norm();
        let t = d.d1 / speed;
        let kappa = (d.d2 - t * d.d2.dot(&t)) / (speed * speed);
        Ok(FrameSample { s, x: d.r, t, kappa })
    }

    /// Frenet frame with the default threshold `κ_min = 1e-10 / L`.
    pub fn frenet(&self, s: f64) -> Result<FrenetFrame, GeometryError> {
        self.frenet_with_threshold(s, 1e-10 / self.length)
    }

    pub fn frenet_with_threshold(&self, s: f64, kappa_min: f64) -> Result<FrenetFrame, GeometryError> {
        let frame = self.frame(s)?;
        let kappa = frame.kappa.norm();
        if kappa <= kappa_min {
            return Err(GeometryError::ZeroCurvature { s: frame.s, kappa });
        }
        let d = self.param.derivatives(self.parameter_at(frame.s)?);
        let n = frame.kappa / kappa;
        let b = frame.t.cross(&n);
        let c = d.d1.cross(&d.d2);
        let tau = c.dot(&d.d3) / c.norm_squared();
        Ok(FrenetFrame {
            t: frame.t,
            n,
            b,
            kappa,
            tau,
        })
    }

    /// Closest point on the curve by dense sampling, golden-section
    /// bracketing and Newton refinement on `(x - r(ξ))·r'(ξ) = 0`.
    pub fn closest_point(&self, x: &Vec3) -> Result<ClosestPointResult, GeometryError> {
        let (xi0, xi1) = self.param.domain();
        let m = 200 * self.param.pieces();
        let xs: Vec<f64> = (0..=m).map(|i| xi0 + (xi1 - xi0) * i as f64 / m as f64).collect();
        let d2: Vec<f64> = xs
            .iter()
            .map(|&xi| (self.param.derivatives(xi).r - x).norm_squared())
            .collect();

        let mut candidates = Vec::new();
        for i in 0..=m {
            let left = if i > 0 { d2[i - 1] } else { f64::INFINITY };
            let right = if i < m { d2[i + 1] } else { f64::INFINITY };
            if d2[i] <= left && d2[i] <= right {
                let lo = xs[i.saturating_sub(1)];
                let hi = xs[(i + 1).min(m)];
                candidates.push(self.refine(x, lo, hi, xs[i]));
            }
        }

        let dist = |xi: f64| (self.param.derivatives(xi).r - x).norm();
        let best = candidates
            .iter()
            .copied()
            .min_by(|a, b| dist(*a).total_cmp(&dist(*b)))
            .expect("at least one sample is a local minimum");
        let d_best = dist(best);
        let p_best = self.param.derivatives(best).r;
        let tol = 1e-9 * d_best.max(1e-6 * self.length);
        let mut rivals: Vec<Vec3> = vec![p_best];
        for &c in &candidates {
            let p = self.param.derivatives(c).r;
            if (dist(c) - d_best).abs() <= tol && rivals.iter().all(|q| (p - q).norm() > 1e-6 * self.length) {
                rivals.push(p);
            }
        }
        if rivals.len() > 1 {
            return Err(GeometryError::AmbiguousClosestPoint {
                count: rivals.len(),
                distance: d_best,
            });
        }

        let d = self.param.derivatives(best);
        let mut zeta = x - d.r;
        let t = d.d1.normalize();
        let at_end = best <= xi0 || best >= xi1;
        if at_end && zeta.dot(&t).abs() > 1e-10 * zeta.norm().max(1e-14 * self.length) {
            return Err(GeometryError::BeyondEnd { xi: best });
        }
        if zeta.norm() <= 1e-14 * self.length {
            zeta = Vec3::zeros();
        }
        Ok(ClosestPointResult {
            p: x - zeta,
            zeta,
            s: self.arc_length_at(best).clamp(0.0, self.length),
        })
    }

    fn refine(&self, x: &Vec3, mut lo: f64, mut hi: f64, guess: f64) -> f64 {
        let f = |xi: f64| (self.param.derivatives(xi).r - x).norm_squared();
        // Golden-section bracketing to a coarse tolerance.
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut a = hi - g * (hi - lo);
        let mut b = lo + g * (hi - lo);
        let (mut fa, mut fb) = (f(a), f(b));
        for _ in 0..40 {
            if fa < fb {
                hi = b;
                b = a;
                fb = fa;
                a = hi - g * (hi - lo);
                fa = f(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + g * (hi - lo);
                fb = f(b);
            }
        }
        let (xi0, xi1) = self.param.domain();
        let mut xi = 0.5 * (lo + hi);
        if f(guess) < f(xi) && (guess == xi0 || guess == xi1) {
            xi = guess;
        }
        for _ in 0..30 {
            let d = self.param.derivatives(xi);
            let diff = d.r - x;
            let g1 = diff.dot(&d.d1);
            let g2 = d.d1.norm_squared() + diff.dot(&d.d2);
            if g2 <= 0.0 {
                break;
            }
            let next = (xi - g1 / g2).clamp(xi0, xi1);
            if (next - xi).abs() <= 1e-16 * (1.0 + xi.abs()) {
                xi = next;
                break;
            }
            xi = next;
        }
        xi
    }
}

fn check_regular(param: &ParamCurve) -> Result<(), GeometryError> {
    let (a, b) = param.domain();
    let m = 256 * param.pieces();
    for i in 0..=m {
        let xi = a + (b - a) * i as f64 / m as f64;
        let speed = param.derivatives(xi).d1.norm();
        if !(speed >= MIN_SPEED) {
            return Err(GeometryError::DegenerateCurve { xi, speed });
        }
    }
    // Piece ends are evaluated from the left piece as well to catch C0 gaps.
    if let ParamCurve::HermiteSpline { points, tangents } = param {
        for i in 1..points.len() - 1 {
            if !points[i].iter().all(|v| v.is_finite()) || !tangents[i].iter().all(|v| v.is_finite()) {
                return Err(GeometryError::Invalid(format!("non-finite spline data at knot {i}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn quarter_arc(r: f64) -> Curve {
        Curve::new(ParamCurve::Arc {
            center: Vec3::zeros(),
            radius: r,
            basis: [Vec3::x(), Vec3::y()],
            angle: [0.0, PI / 2.0],
        })
        .unwrap()
    }

    fn helix(a: f64, b: f64) -> Curve {
        Curve::new(ParamCurve::Helix {
            center: Vec3::zeros(),
            radius: a,
            pitch: b,
            angle: [0.0, 2.0 * PI],
        })
        .unwrap()
    }

    #[test]
    fn closed_form_lengths() {
        assert_relative_eq!(quarter_arc(1.0).length(), PI / 2.0, max_relative = 1e-15);
        let line = Curve::new(ParamCurve::Line {
            start: Vec3::zeros(),
            end: Vec3::new(3.0, 4.0, 0.0),
        })
        .unwrap();
        assert_eq!(line.length(), 5.0);
    }

    #[test]
    fn helix_length_matches_quadrature_table() {
        let c = helix(1.0, 1.0);
        let exact = 2.0 * PI * 2f64.sqrt();
        assert_relative_eq!(c.length(), exact, max_relative = 1e-14);
        let table = ArcLengthTable::build(c.param(), 64).unwrap();
        assert!((table.length() - exact).abs() <= 1e-10 * exact);
    }

    #[test]
    fn table_is_monotone_and_round_trips() {
        let c = Curve::new(ParamCurve::spline_with_end_tangents(
            vec![Vec3::zeros(), Vec3::new(1.0, 1.0, 0.0), Vec3::new(2.0, 0.0, 1.0), Vec3::new(3.0, 0.5, 0.0)],
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
        ))
        .unwrap();
        let table = ArcLengthTable::build(c.param(), 40).unwrap();
        let s: Vec<f64> = table.samples().map(|(_, s)| s).collect();
        assert!(s.windows(2).all(|w| w[1] > w[0]));
        for k in 0..=50 {
            let xi = 3.0 * k as f64 / 50.0;
            let s = c.arc_length_at(xi);
            let back = c.parameter_at(s).unwrap();
            assert!((back - xi).abs() <= 1e-9, "xi {xi} -> {back}");
        }
    }

    #[test]
    fn arc_curvature_points_to_center() {
        let c = Curve::new(ParamCurve::Arc {
            center: Vec3::new(1.0, 2.0, 0.0),
            radius: 2.0,
            basis: [Vec3::x(), Vec3::y()],
            angle: [0.3, 2.0],
        })
        .unwrap();
        for k in 0..=10 {
            let f = c.frame(c.length() * k as f64 / 10.0).unwrap();
            assert_relative_eq!(f.kappa.norm(), 0.5, max_relative = 1e-14);
            let to_center = (Vec3::new(1.0, 2.0, 0.0) - f.x).normalize();
            assert_relative_eq!(f.kappa.normalize().dot(&to_center), 1.0, max_relative = 1e-14);
            assert!(f.t.dot(&f.kappa).abs() < 1e-10);
        }
    }

    #[test]
    fn line_is_straight_and_has_no_frenet_frame() {
        let c = Curve::new(ParamCurve::Line {
            start: Vec3::zeros(),
            end: Vec3::new(1.0, 1.0, 1.0),
        })
        .unwrap();
        assert_eq!(c.frame(0.5).unwrap().kappa, Vec3::zeros());
        assert!(matches!(c.frenet(0.5), Err(GeometryError::ZeroCurvature { .. })));
    }

    #[test]
    fn out_of_range_arc_length() {
        let c = quarter_arc(1.0);
        assert!(matches!(c.frame(2.0), Err(GeometryError::OutOfRange { .. })));
        assert!(matches!(c.frame(-0.1), Err(GeometryError::OutOfRange { .. })));
    }

    #[test]
    fn degenerate_spline_is_rejected() {
        let err = Curve::new(ParamCurve::HermiteSpline {
            points: vec![Vec3::zeros(), Vec3::zeros()],
            tangents: vec![Vec3::zeros(), Vec3::zeros()],
        })
        .unwrap_err();
        assert!(matches!(err, GeometryError::DegenerateCurve { .. }));
    }

    #[test]
    fn helix_curvature_and_torsion() {
        let c = helix(1.0, 1.0);
        let h = 1e-4;
        for k in 1..10 {
            let s = c.length() * k as f64 / 10.0;
            let f = c.frenet(s).unwrap();
            assert!((f.kappa - 0.5).abs() < 1e-8);
            assert!((f.tau - 0.5).abs() < 1e-8);
            let fd = (c.frame(s + h).unwrap().t - c.frame(s - h).unwrap().t) / (2.0 * h);
            assert!((fd.norm() - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn planar_arc_has_no_torsion() {
        let c = quarter_arc(3.0);
        assert!(c.frenet(1.0).unwrap().tau.abs() < 1e-8);
    }

    #[test]
    fn closest_point_off_circle() {
        let c = Curve::new(ParamCurve::Arc {
            center: Vec3::zeros(),
            radius: 1.0,
            basis: [Vec3::x(), Vec3::y()],
            angle: [-1.0, 1.0],
        })
        .unwrap();
        let r = c.closest_point(&Vec3::new(1.5, 0.0, 0.0)).unwrap();
        assert_relative_eq!(r.p, Vec3::new(1.0, 0.0, 0.0), epsilon = 1e-12);
        assert_relative_eq!(r.zeta, Vec3::new(0.5, 0.0, 0.0), epsilon = 1e-12);
        let on = c.closest_point(&c.position(0.4).unwrap()).unwrap();
        assert!(on.zeta.norm() < 1e-12);
    }

    #[test]
    fn closest_point_at_center_is_ambiguous() {
        let c = Curve::new(ParamCurve::Arc {
            center: Vec3::zeros(),
            radius: 1.0,
            basis: [Vec3::x(), Vec3::y()],
            angle: [-1.0, 1.0],
        })
        .unwrap();
        assert!(matches!(
            c.closest_point(&Vec3::zeros()),
            Err(GeometryError::AmbiguousClosestPoint { .. })
        ));
    }

    #[test]
    fn projectors_partition_identity() {
        let t = Vec3::new(0.3, -0.4, 0.5).normalize();
        let p = tangent_projector(&t);
        let q = normal_projector(&t);
        assert!((p + q - Mat3::identity()).norm() < 1e-14);
        assert!((p * p - p).norm() < 1e-14);
        assert!((q * q - q).norm() < 1e-14);
        assert!((p * q).norm() < 1e-14);
    }
}
