//! The beam problem statement: geometry, material, section, end conditions
//! and loads.

use crate::discretization::{Formulation, Mesh1D, QuadPolicy};
use crate::geometry::Curve;
use crate::section::{CrossSection, Material};
use crate::Vec3;

/// One row of the end-condition table: either a prescribed resultant
/// (natural) or a prescribed kinematic value (essential).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Row<T> {
    Natural(T),
    Essential(T),
}

impl<T: Copy> Row<T> {
    pub fn is_essential(&self) -> bool {
        matches!(self, Row::Essential(_))
    }

    pub fn value(&self) -> T {
        match *self {
            Row::Natural(v) | Row::Essential(v) => v,
        }
    }
}

/// Conditions at one beam end.
///
/// Natural values are the section resultants `N·t`, `S`, `M`, `T·t` at that
/// end. Essential values are `u_t`, `Q u_mid`, `Q θ` and `θ_t`. Vector values
/// are projected onto the normal plane of the end tangent when used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndCondition {
    pub stretch: Row<f64>,
    pub shear: Row<Vec3>,
    pub bend: Row<Vec3>,
    pub twist: Row<f64>,
}

impl EndCondition {
    pub fn clamped() -> Self {
        Self {
            stretch: Row::Essential(0.0),
            shear: Row::Essential(Vec3::zeros()),
            bend: Row::Essential(Vec3::zeros()),
            twist: Row::Essential(0.0),
        }
    }

    pub fn free() -> Self {
        Self {
            stretch: Row::Natural(0.0),
            shear: Row::Natural(Vec3::zeros()),
            bend: Row::Natural(Vec3::zeros()),
            twist: Row::Natural(0.0),
        }
    }

    /// Midline fixed, rotations free.
    pub fn pinned() -> Self {
        Self {
            stretch: Row::Essential(0.0),
            shear: Row::Essential(Vec3::zeros()),
            bend: Row::Natural(Vec3::zeros()),
            twist: Row::Natural(0.0),
        }
    }

    pub fn essential_rows(&self) -> usize {
        usize::from(self.stretch.is_essential())
            + 2 * usize::from(self.shear.is_essential())
            + 2 * usize::from(self.bend.is_essential())
            + usize::from(self.twist.is_essential())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    pub start: EndCondition,
    pub end: EndCondition,
}

impl BoundaryConditions {
    pub fn cantilever() -> Self {
        Self {
            start: EndCondition::clamped(),
            end: EndCondition::free(),
        }
    }
}

/// Body force density (force per volume), constant over each cross-section.
#[derive(Debug, Clone, PartialEq)]
pub enum BodyForce {
    Uniform(Vec3),
    /// Piecewise linear in `s` through the given `(s, f)` samples, held
    /// constant beyond the first and last sample.
    Table(Vec<(f64, Vec3)>),
}

impl Default for BodyForce {
    fn default() -> Self {
        BodyForce::Uniform(Vec3::zeros())
    }
}

impl BodyForce {
    pub fn at(&self, s: f64) -> Vec3 {
        match self {
            BodyForce::Uniform(f) => *f,
            BodyForce::Table(rows) => {
                let Some(first) = rows.first() else {
                    return Vec3::zeros();
                };
                if s <= first.0 {
                    return first.1;
                }
                for w in rows.windows(2) {
                    let ((s0, f0), (s1, f1)) = (w[0], w[1]);
                    if s <= s1 {
                        let r = if s1 > s0 { (s - s0) / (s1 - s0) } else { 1.0 };
                        return f0 + (f1 - f0) * r;
                    }
                }
                rows.last().unwrap().1
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BodyForce::Uniform(f) => f.iter().all(|v| *v == 0.0),
            BodyForce::Table(rows) => rows.iter().all(|(_, f)| f.iter().all(|v| *v == 0.0)),
        }
    }
}

/// External force and moment applied at a beam end, in global components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointLoad {
    pub force: Vec3,
    pub moment: Vec3,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadCase {
    pub body: BodyForce,
    pub start: PointLoad,
    pub end: PointLoad,
}

impl LoadCase {
    pub fn tip_force(force: Vec3) -> Self {
        Self {
            end: PointLoad {
                force,
                moment: Vec3::zeros(),
            },
            ..Self::default()
        }
    }

    pub fn tip_moment(moment: Vec3) -> Self {
        Self {
            end: PointLoad {
                force: Vec3::zeros(),
                moment,
            },
            ..Self::default()
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let body = match &self.body {
            BodyForce::Uniform(f) => BodyForce::Uniform(f * alpha),
            BodyForce::Table(rows) => BodyForce::Table(rows.iter().map(|(s, f)| (*s, f * alpha)).collect()),
        };
        let scale = |p: &PointLoad| PointLoad {
            force: p.force * alpha,
            moment: p.moment * alpha,
        };
        Self {
            body,
            start: scale(&self.start),
            end: scale(&self.end),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamModel {
    pub curve: Curve,
    pub material: Material,
    pub section: CrossSection,
    pub bcs: BoundaryConditions,
    pub loads: LoadCase,
}

impl BeamModel {
    pub fn with_loads(&self, loads: LoadCase) -> Self {
        Self { loads, ..self.clone() }
    }
}

/// Mesh, element formulation and quadrature policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub mesh: Mesh1D,
    pub formulation: Formulation,
    pub policy: QuadPolicy,
}

impl Discretization {
    pub fn uniform(
        model: &BeamModel,
        elements: usize,
        formulation: Formulation,
        policy: QuadPolicy,
    ) -> Result<Self, crate::discretization::DiscretizationError> {
        Ok(Self {
            mesh: Mesh1D::uniform(model.curve.length(), elements)?,
            formulation,
            policy,
        })
    }
}
