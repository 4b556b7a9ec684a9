//! Cross-section properties and the material law.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::normal_projector;
use crate::{Mat3, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SectionError {
    #[error("invalid section: {0}")]
    Invalid(String),
    #[error("section director is parallel to the tangent (angle {angle:e} rad)")]
    DegenerateDirector { angle: f64 },
}

/// Linear elastic constants. `nu` is kept only for analytic reference formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub e: f64,
    pub g: f64,
    pub nu: Option<f64>,
}

impl Material {
    pub fn from_e_nu(e: f64, nu: f64) -> Result<Self, SectionError> {
        if !(nu > -1.0 && nu < 0.5) {
            return Err(SectionError::Invalid(format!("Poisson ratio {nu} outside (-1, 0.5)")));
        }
        Self::checked(e, e / (2.0 * (1.0 + nu)), Some(nu))
    }

    pub fn from_e_g(e: f64, g: f64) -> Result<Self, SectionError> {
        Self::checked(e, g, None)
    }

    fn checked(e: f64, g: f64, nu: Option<f64>) -> Result<Self, SectionError> {
        if !(e > 0.0 && e.is_finite()) {
            return Err(SectionError::Invalid(format!("elastic modulus must be positive, got {e}")));
        }
        if !(g > 0.0 && g.is_finite()) {
            return Err(SectionError::Invalid(format!("shear modulus must be positive, got {g}")));
        }
        Ok(Self { e, g, nu })
    }
}

/// Second moments of area.
///
/// `Oriented` holds `i1 = ∫ξ1² dA` with `ξ1` measured along the director
/// (projected onto the normal plane) and `i2 = ∫ξ2² dA` along `t × director`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inertia {
    Isotropic { i: f64 },
    Oriented { i1: f64, i2: f64, director: Vec3 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSection {
    pub area: f64,
    pub inertia: Inertia,
    pub polar: f64,
}

/// Shapes understood by [`section_from_shape`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SectionShape {
    /// `h` is measured along the director.
    Rect { w: f64, h: f64 },
    Circle { d: f64 },
    /// Rectangle of unit depth and thickness `t`, bending in the thickness
    /// direction. Treated as isotropic with `I = t³/12`.
    UnitDepthRect { t: f64 },
}

pub fn section_from_shape(shape: SectionShape, director: Option<Vec3>) -> Result<CrossSection, SectionError> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(SectionError::Invalid(format!("{name} must be positive, got {v}")))
        }
    };
    let section = match shape {
        SectionShape::Rect { w, h } => {
            positive("w", w)?;
            positive("h", h)?;
            let i1 = w * h.powi(3) / 12.0;
            let i2 = w.powi(3) * h / 12.0;
            let polar = (w * h.powi(3) + w.powi(3) * h) / 12.0;
            let inertia = match director {
                Some(d) => {
                    if d.norm() == 0.0 || !d.iter().all(|v| v.is_finite()) {
                        return Err(SectionError::Invalid("director must be a nonzero vector".into()));
                    }
                    Inertia::Oriented {
                        i1,
                        i2,
                        director: d.normalize(),
                    }
                }
                None if w == h => Inertia::Isotropic { i: i1 },
                None => {
                    return Err(SectionError::Invalid(
                        "a rectangle with w != h needs a director".into(),
                    ))
                }
            };
            CrossSection {
                area: w * h,
                inertia,
                polar,
            }
        }
        SectionShape::Circle { d } => {
            positive("d", d)?;
            let pi = std::f64::consts::PI;
            CrossSection {
                area: pi * d * d / 4.0,
                inertia: Inertia::Isotropic { i: pi * d.powi(4) / 64.0 },
                polar: pi * d.powi(4) / 32.0,
            }
        }
        SectionShape::UnitDepthRect { t } => {
            positive("t", t)?;
            let i = t.powi(3) / 12.0;
            CrossSection {
                area: t,
                inertia: Inertia::Isotropic { i },
                polar: 2.0 * i,
            }
        }
    };
    Ok(section)
}

impl CrossSection {
    /// `I_Σ = ∫ (ζ × t) ⊗ (ζ × t) dA` for the section whose normal is `t`.
    pub fn inertia_tensor(&self, t: &Vec3) -> Result<Mat3, SectionError> {
        match self.inertia {
            Inertia::Isotropic { i } => Ok(normal_projector(t) * i),
            Inertia::Oriented { i1, i2, director } => {
                let (n1, n2) = oriented_axes(t, &director)?;
                Ok(n2 * n2.transpose() * i1 + n1 * n1.transpose() * i2)
            }
        }
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self.inertia, Inertia::Isotropic { .. })
    }

    /// Scales area by `a` and both inertias and the polar moment by `b`.
    fn scaled(&self, a: f64, b: f64) -> Self {
        let inertia = match self.inertia {
            Inertia::Isotropic { i } => Inertia::Isotropic { i: i * b },
            Inertia::Oriented { i1, i2, director } => Inertia::Oriented {
                i1: i1 * b,
                i2: i2 * b,
                director,
            },
        };
        Self {
            area: self.area * a,
            inertia,
            polar: self.polar * b,
        }
    }
}

/// Section axes `(n1, n2)`: `n1` is the director projected onto the normal
/// plane of `t`, `n2 = t × n1`.
pub fn oriented_axes(t: &Vec3, director: &Vec3) -> Result<(Vec3, Vec3), SectionError> {
    let d = director.normalize();
    let proj = d - t * d.dot(t);
    let angle = proj.norm().asin();
    if !(angle >= 1e-6) {
        return Err(SectionError::DegenerateDirector { angle });
    }
    let n1 = proj.normalize();
    Ok((n1, t.cross(&n1)))
}

/// Family of sections parametrized by a thickness `t`, with
/// `|A| = t^p |A|ref` and `I, J = t^q Iref, Jref`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThicknessFamily {
    pub reference: CrossSection,
    pub area_exponent: i32,
    pub inertia_exponent: i32,
}

impl ThicknessFamily {
    /// Sections whose diameter is proportional to `t`: area ∝ t², inertia ∝ t⁴.
    pub fn similar(reference: CrossSection) -> Self {
        Self {
            reference,
            area_exponent: 2,
            inertia_exponent: 4,
        }
    }

    /// Unit-depth rectangles: area ∝ t, inertia ∝ t³.
    pub fn unit_depth() -> Self {
        Self {
            reference: section_from_shape(SectionShape::UnitDepthRect { t: 1.0 }, None)
                .expect("unit reference is valid"),
            area_exponent: 1,
            inertia_exponent: 3,
        }
    }

    pub fn scale(&self, t: f64) -> Result<CrossSection, SectionError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(SectionError::Invalid(format!("thickness must be positive, got {t}")));
        }
        if t == 1.0 {
            return Ok(self.reference);
        }
        Ok(self
            .reference
            .scaled(t.powi(self.area_exponent), t.powi(self.inertia_exponent)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    /// Midpoint-rule integral over the rectangle `[-w/2, w/2] × [-h/2, h/2]`
    /// with `ξ2` along the first and `ξ1` along the second side.
    fn rect_quadrature(w: f64, h: f64, n: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
        let (dw, dh) = (w / n as f64, h / n as f64);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x2 = -w / 2.0 + (i as f64 + 0.5) * dw;
                let x1 = -h / 2.0 + (j as f64 + 0.5) * dh;
                acc += f(x1, x2) * dw * dh;
            }
        }
        acc
    }

    #[test]
    fn unit_depth_rect() {
        let s = section_from_shape(SectionShape::UnitDepthRect { t: 0.1 }, None).unwrap();
        assert_relative_eq!(s.area, 0.1);
        assert_relative_eq!(s.inertia_tensor(&Vec3::x()).unwrap()[(1, 1)], 1e-3 / 12.0, max_relative = 1e-14);
    }

    #[test]
    fn circle_closed_form() {
        let s = section_from_shape(SectionShape::Circle { d: 2.0 }, None).unwrap();
        assert_relative_eq!(s.area, PI, max_relative = 1e-15);
        assert_eq!(s.inertia, Inertia::Isotropic { i: PI / 4.0 });
        assert_relative_eq!(s.polar, PI / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn rect_polar_moment_matches_quadrature() {
        let s = section_from_shape(SectionShape::Rect { w: 2.0, h: 3.0 }, Some(Vec3::y())).unwrap();
        assert_relative_eq!(s.polar, 6.5, max_relative = 1e-15);
        let numeric = rect_quadrature(2.0, 3.0, 2000, |a, b| a * a + b * b);
        assert!((numeric - 6.5).abs() <= 1e-6 * 6.5);
    }

    #[test]
    fn oriented_inertia_tensor_matches_quadrature() {
        let t = Vec3::x();
        let s = section_from_shape(SectionShape::Rect { w: 1.0, h: 2.0 }, Some(Vec3::y())).unwrap();
        let tensor = s.inertia_tensor(&t).unwrap();
        let (n1, n2) = oriented_axes(&t, &Vec3::y()).unwrap();
        // Gauss 2x2 per cell is exact for the quadratic integrand.
        let mut oracle = Mat3::zeros();
        let g = crate::quadrature::GaussLegendre::new(2);
        for (x1, w1) in g.on_interval(-1.0, 1.0) {
            for (x2, w2) in g.on_interval(-0.5, 0.5) {
                let zeta = n1 * x1 + n2 * x2;
                let v = zeta.cross(&t);
                oracle += v * v.transpose() * (w1 * w2);
            }
        }
        assert!((tensor - oracle).norm() <= 1e-8 * oracle.norm());
        // centroid
        let mut centroid = Vec3::zeros();
        for (x1, w1) in g.on_interval(-1.0, 1.0) {
            for (x2, w2) in g.on_interval(-0.5, 0.5) {
                centroid += (n1 * x1 + n2 * x2) * (w1 * w2);
            }
        }
        assert!(centroid.norm() < 1e-15);
    }

    #[test]
    fn isotropic_tensor_annihilates_tangent() {
        let s = section_from_shape(SectionShape::UnitDepthRect { t: 2.0 }, None).unwrap();
        let tensor = s.inertia_tensor(&Vec3::z()).unwrap();
        assert_relative_eq!(tensor, Mat3::from_diagonal(&Vec3::new(2.0 / 3.0, 2.0 / 3.0, 0.0)), epsilon = 1e-15);
        let iso = CrossSection {
            area: 1.0,
            inertia: Inertia::Isotropic { i: 2.0 },
            polar: 4.0,
        };
        assert_eq!(iso.inertia_tensor(&Vec3::z()).unwrap(), Mat3::from_diagonal(&Vec3::new(2.0, 2.0, 0.0)));
    }

    #[test]
    fn director_along_tangent_is_rejected() {
        let s = section_from_shape(SectionShape::Rect { w: 1.0, h: 2.0 }, Some(Vec3::x())).unwrap();
        assert!(matches!(
            s.inertia_tensor(&Vec3::x()),
            Err(SectionError::DegenerateDirector { .. })
        ));
    }

    #[test]
    fn non_positive_dimensions_are_rejected() {
        assert!(section_from_shape(SectionShape::Circle { d: 0.0 }, None).is_err());
        assert!(section_from_shape(SectionShape::Rect { w: -1.0, h: 1.0 }, Some(Vec3::y())).is_err());
        assert!(ThicknessFamily::unit_depth().scale(0.0).is_err());
    }

    #[test]
    fn thickness_scaling() {
        let square = section_from_shape(SectionShape::Rect { w: 1.0, h: 1.0 }, None).unwrap();
        let fam = ThicknessFamily::similar(square);
        assert_eq!(fam.scale(1.0).unwrap(), square);
        let half = fam.scale(0.5).unwrap();
        assert_relative_eq!(half.area, 0.25 * square.area);
        assert_relative_eq!(half.polar, 0.0625 * square.polar);
        let ud = ThicknessFamily::unit_depth().scale(0.1).unwrap();
        assert_relative_eq!(ud.area, 0.1, max_relative = 1e-15);
        match ud.inertia {
            Inertia::Isotropic { i } => assert_relative_eq!(i, 1e-3 / 12.0, max_relative = 1e-14),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn material_from_poisson_ratio() {
        let m = Material::from_e_nu(1e6, 0.3).unwrap();
        assert_relative_eq!(m.g, 1e6 / 2.6);
        assert!(Material::from_e_g(-1.0, 1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn isotropic_trace_equals_polar(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, d in 0.1f64..5.0) {
            let v = Vec3::new(x, y, z);
            proptest::prop_assume!(v.norm() > 1e-3);
            let t = v.normalize();
            let s = section_from_shape(SectionShape::Circle { d }, None).unwrap();
            let tensor = s.inertia_tensor(&t).unwrap();
            proptest::prop_assert!((tensor.trace() - s.polar).abs() <= 1e-12 * s.polar);
            proptest::prop_assert!((tensor * t).norm() <= 1e-14 * s.polar);
            proptest::prop_assert!((tensor - tensor.transpose()).norm() == 0.0);
        }
    }
}
