//! Finite elements for curved beams posed intrinsically on the midline.
//!
//! Unknowns are the midline displacement and the cross-section rotation in
//! global Cartesian components. The only geometric data the element routines
//! need at a quadrature point are the unit tangent `t` and the curvature vector
//! `κ = dt/ds`, so no normal frame is ever constructed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod benchmarks;
pub mod compensated;
pub mod config;
pub mod discretization;
pub mod geometry;
pub mod model;
pub mod postprocess;
pub mod quadrature;
pub mod section;
pub mod solver;
pub mod validation;

pub use assembly::{assemble, LinearSystem};
pub use discretization::{Formulation, QuadPolicy};
pub use geometry::{Curve, ParamCurve};
pub use model::{BeamModel, BodyForce, BoundaryConditions, Discretization, EndCondition, LoadCase, PointLoad, Row};
pub use section::{CrossSection, Material, SectionShape};
pub use solver::{solve, SolutionFields};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
