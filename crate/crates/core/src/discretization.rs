//! Arc-length meshes, scalar finite element spaces, quadrature policies and
//! the global DOF layout of the three beam formulations.
//!
//! Every space is built on the arc-length chart of each element, so Hermite
//! derivative DOFs are derivatives with respect to `s`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::GaussLegendre;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscretizationError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("derivative of order {order} is not available for {space:?}")]
    UnsupportedOrder { space: ScalarSpace, order: usize },
    #[error("arc length {s} lies outside element {element} [{start}, {end}]")]
    OutsideElement { s: f64, element: usize, start: f64, end: f64 },
}

/// Nodes `s_0 < … < s_N` on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn uniform(length: f64, elements: usize) -> Result<Self, DiscretizationError> {
        if elements == 0 {
            return Err(DiscretizationError::InvalidMesh("at least one element is required".into()));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(DiscretizationError::InvalidMesh(format!("length must be positive, got {length}")));
        }
        let mut nodes: Vec<f64> = (0..=elements).map(|i| length * i as f64 / elements as f64).collect();
        nodes[elements] = length;
        Ok(Self { nodes })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, DiscretizationError> {
        if nodes.len() < 2 {
            return Err(DiscretizationError::InvalidMesh("at least two nodes are required".into()));
        }
        if nodes[0] != 0.0 {
            return Err(DiscretizationError::InvalidMesh("first node must be at s = 0".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(DiscretizationError::InvalidMesh("nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes })
    }

    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn length(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    /// Element containing `s`; interior nodes belong to the element on their right.
    pub fn locate(&self, s: f64) -> usize {
        let n = self.elements();
        match self.nodes.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }
}

/// Scalar piecewise polynomial spaces on a [`Mesh1D`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarSpace {
    /// Continuous piecewise linear.
    P1,
    /// Continuous piecewise quadratic with midpoint nodes.
    P2,
    /// C1 cubic Hermite with value and `d/ds` DOFs at every vertex.
    H3,
}

/// Basis values on one element; entries past `len` are unused.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeValues {
    pub len: usize,
    pub value: [f64; 4],
    pub d1: [f64; 4],
    pub d2: [f64; 4],
}

impl ScalarSpace {
    pub fn degree(self) -> usize {
        match self {
            ScalarSpace::P1 => 1,
            ScalarSpace::P2 => 2,
            ScalarSpace::H3 => 3,
        }
    }

    pub fn local_len(self) -> usize {
        match self {
            ScalarSpace::P1 => 2,
            ScalarSpace::P2 => 3,
            ScalarSpace::H3 => 4,
        }
    }

    pub fn n_dofs(self, mesh: &Mesh1D) -> usize {
        let n = mesh.elements();
        match self {
            ScalarSpace::P1 => n + 1,
            ScalarSpace::P2 => 2 * n + 1,
            ScalarSpace::H3 => 2 * (n + 1),
        }
    }

    /// Global scalar DOFs of element `e` in local basis order. For H3 the
    /// order is `(value_a, slope_a, value_b, slope_b)`.
    pub fn element_dofs(self, e: usize) -> [usize; 4] {
        match self {
            ScalarSpace::P1 => [e, e + 1, usize::MAX, usize::MAX],
            ScalarSpace::P2 => [2 * e, 2 * e + 1, 2 * e + 2, usize::MAX],
            ScalarSpace::H3 => [2 * e, 2 * e + 1, 2 * e + 2, 2 * e + 3],
        }
    }

    /// Scalar DOF carrying the value at mesh vertex `v`.
    pub fn vertex_value_dof(self, v: usize) -> usize {
        match self {
            ScalarSpace::P1 => v,
            ScalarSpace::P2 | ScalarSpace::H3 => 2 * v,
        }
    }

    /// Scalar DOF carrying `d/ds` at vertex `v` (H3 only).
    pub fn vertex_slope_dof(self, v: usize) -> Option<usize> {
        match self {
            ScalarSpace::H3 => Some(2 * v + 1),
            _ => None,
        }
    }

    /// Evaluates the element basis at `s`, with derivatives up to `order`.
    pub fn shape_eval(
        self,
        mesh: &Mesh1D,
        e: usize,
        s: f64,
        order: usize,
    ) -> Result<ShapeValues, DiscretizationError> {
        if order > 2 || (order == 2 && self != ScalarSpace::H3) {
            return Err(DiscretizationError::UnsupportedOrder { space: self, order });
        }
        let (a, b) = mesh.element(e);
        let h = b - a;
        let slack = 1e-12 * h;
        if !(s >= a - slack && s <= b + slack) {
            return Err(DiscretizationError::OutsideElement {
                s,
                element: e,
                start: a,
                end: b,
            });
        }
        Ok(self.shape_on_element(h, ((s - a) / h).clamp(0.0, 1.0)))
    }

    /// Basis at local coordinate `x ∈ [0, 1]` on an element of length `h`.
    pub fn shape_on_element(self, h: f64, x: f64) -> ShapeValues {
        let mut out = ShapeValues {
            len: self.local_len(),
            value: [0.0; 4],
            d1: [0.0; 4],
            d2: [0.0; 4],
        };
        match self {
            ScalarSpace::P1 => {
                out.value[..2].copy_from_slice(&[1.0 - x, x]);
                out.d1[..2].copy_from_slice(&[-1.0 / h, 1.0 / h]);
            }
            ScalarSpace::P2 => {
                out.value[..3].copy_from_slice(&[
                    2.0 * x * x - 3.0 * x + 1.0,
                    4.0 * x * (1.0 - x),
                    x * (2.0 * x - 1.0),
                ]);
                out.d1[..3].copy_from_slice(&[(4.0 * x - 3.0) / h, (4.0 - 8.0 * x) / h, (4.0 * x - 1.0) / h]);
                out.d2[..3].copy_from_slice(&[4.0 / (h * h), -8.0 / (h * h), 4.0 / (h * h)]);
            }
            ScalarSpace::H3 => {
                let (x2, x3) = (x * x, x * x * x);
                out.value = [
                    1.0 - 3.0 * x2 + 2.0 * x3,
                    h * (x - 2.0 * x2 + x3),
                    3.0 * x2 - 2.0 * x3,
                    h * (x3 - x2),
                ];
                out.d1 = [
                    (-6.0 * x + 6.0 * x2) / h,
                    1.0 - 4.0 * x + 3.0 * x2,
                    (6.0 * x - 6.0 * x2) / h,
                    3.0 * x2 - 2.0 * x,
                ];
                out.d2 = [
                    (-6.0 + 12.0 * x) / (h * h),
                    (-4.0 + 6.0 * x) / h,
                    (6.0 - 12.0 * x) / (h * h),
                    (6.0 * x - 2.0) / h,
                ];
            }
        }
        out
    }

    /// Nodal interpolant of `f`; `df` supplies `d/ds` for the H3 slope DOFs.
    pub fn interpolate(self, mesh: &Mesh1D, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_dofs(mesh)];
        for (v, &s) in mesh.nodes().iter().enumerate() {
            out[self.vertex_value_dof(v)] = f(s);
            if let Some(d) = self.vertex_slope_dof(v) {
                out[d] = df(s);
            }
        }
        if self == ScalarSpace::P2 {
            for e in 0..mesh.elements() {
                let (a, b) = mesh.element(e);
                out[2 * e + 1] = f(0.5 * (a + b));
            }
        }
        out
    }

    /// Value and first derivative of a coefficient vector at `s`.
    pub fn evaluate(self, mesh: &Mesh1D, coeffs: &[f64], s: f64) -> (f64, f64) {
        let e = mesh.locate(s);
        let (a, b) = mesh.element(e);
        let sh = self.shape_on_element(b - a, ((s - a) / (b - a)).clamp(0.0, 1.0));
        let dofs = self.element_dofs(e);
        (0..sh.len).fold((0.0, 0.0), |(v, d), i| {
            (v + sh.value[i] * coeffs[dofs[i]], d + sh.d1[i] * coeffs[dofs[i]])
        })
    }
}

/// The three supported beam discretizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Timoshenko: quadratic midline, linear angle.
    TimoshenkoP2p1,
    /// Timoshenko: C1 cubic Hermite midline, quadratic angle.
    TimoshenkoH3p2,
    /// Euler–Bernoulli: C1 cubic Hermite midline, quadratic twist angle.
    EulerBernoulliH3,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [
        Formulation::TimoshenkoP2p1,
        Formulation::TimoshenkoH3p2,
        Formulation::EulerBernoulliH3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::TimoshenkoP2p1 => "timoshenko_p2p1",
            Formulation::TimoshenkoH3p2 => "timoshenko_h3p2",
            Formulation::EulerBernoulliH3 => "euler_bernoulli_h3",
        }
    }

    pub fn midline_space(self) -> ScalarSpace {
        match self {
            Formulation::TimoshenkoP2p1 => ScalarSpace::P2,
            Formulation::TimoshenkoH3p2 | Formulation::EulerBernoulliH3 => ScalarSpace::H3,
        }
    }

    pub fn angle_space(self) -> ScalarSpace {
        match self {
            Formulation::TimoshenkoP2p1 => ScalarSpace::P1,
            Formulation::TimoshenkoH3p2 | Formulation::EulerBernoulliH3 => ScalarSpace::P2,
        }
    }

    /// 3 for the Timoshenko rotation vector, 1 for the Euler–Bernoulli twist.
    pub fn angle_components(self) -> usize {
        match self {
            Formulation::EulerBernoulliH3 => 1,
            _ => 3,
        }
    }

    pub fn is_euler_bernoulli(self) -> bool {
        self == Formulation::EulerBernoulliH3
    }
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum QuadPolicy {
    Full,
    #[default]
    Reduced,
}

impl QuadPolicy {
    pub fn name(self) -> &'static str {
        match self {
            QuadPolicy::Full => "full",
            QuadPolicy::Reduced => "reduced",
        }
    }
}

/// The four terms of the bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermClass {
    Stretch,
    Shear,
    Bend,
    Twist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleRole {
    Full,
    Reduced,
}

/// Gauss points `(s, w)` on one element, in arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub role: RuleRole,
    pub points: Vec<(f64, f64)>,
}

/// Points per element of the full rule: enough to integrate the bending and
/// twisting integrands exactly on straight elements.
pub fn full_points(formulation: Formulation) -> usize {
    match formulation {
        Formulation::TimoshenkoP2p1 => 3,
        Formulation::TimoshenkoH3p2 | Formulation::EulerBernoulliH3 => 4,
    }
}

/// Reduced rule for stretching and shearing: exact for cubics.
pub const REDUCED_POINTS: usize = 2;

pub fn points_per_element(formulation: Formulation, policy: QuadPolicy, term: TermClass) -> (usize, RuleRole) {
    match (policy, term) {
        (QuadPolicy::Reduced, TermClass::Stretch | TermClass::Shear) => (REDUCED_POINTS, RuleRole::Reduced),
        _ => (full_points(formulation), RuleRole::Full),
    }
}

pub fn quadrature(
    formulation: Formulation,
    policy: QuadPolicy,
    term: TermClass,
    element: (f64, f64),
) -> QuadratureRule {
    let (n, role) = points_per_element(formulation, policy, term);
    QuadratureRule {
        role,
        points: GaussLegendre::new(n).on_interval(element.0, element.1),
    }
}

/// Global numbering: midline block first (`3 j + c` for scalar DOF `j` and
/// Cartesian component `c`), then the angle block.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub formulation: Formulation,
    midline_scalar: usize,
    angle_scalar: usize,
}

impl DofMap {
    pub fn new(formulation: Formulation, mesh: &Mesh1D) -> Self {
        Self {
            formulation,
            midline_scalar: formulation.midline_space().n_dofs(mesh),
            angle_scalar: formulation.angle_space().n_dofs(mesh),
        }
    }

    pub fn midline_offset(&self) -> usize {
        0
    }

    pub fn angle_offset(&self) -> usize {
        3 * self.midline_scalar
    }

    pub fn total(&self) -> usize {
        3 * self.midline_scalar + self.formulation.angle_components() * self.angle_scalar
    }

    pub fn midline(&self, scalar: usize, component: usize) -> usize {
        3 * scalar + component
    }

    pub fn angle(&self, scalar: usize, component: usize) -> usize {
        self.angle_offset() + self.formulation.angle_components() * scalar + component
    }

    /// Local element layout: midline basis `a`, component `c` at `3a + c`;
    /// then angle basis `b`, component `c` at `3m + nc·b + c`.
    pub fn element_dofs(&self, e: usize) -> Vec<usize> {
        let mid = self.formulation.midline_space();
        let ang = self.formulation.angle_space();
        let nc = self.formulation.angle_components();
        let md = mid.element_dofs(e);
        let ad = ang.element_dofs(e);
        let mut out = Vec::with_capacity(3 * mid.local_len() + nc * ang.local_len());
        for &j in &md[..mid.local_len()] {
            out.extend((0..3).map(|c| self.midline(j, c)));
        }
        for &j in &ad[..ang.local_len()] {
            out.extend((0..nc).map(|c| self.angle(j, c)));
        }
        out
    }

    pub fn local_len(&self) -> usize {
        3 * self.formulation.midline_space().local_len()
            + self.formulation.angle_components() * self.formulation.angle_space().local_len()
    }
}
