//! Checks against results obtained without the element routines: closed-form
//! beam solutions, statics of a cantilever, and an energy evaluated from the
//! interpolated fields with explicit projector matrices.

use std::f64::consts::FRAC_PI_2;

use cbeam_core::assembly::{assemble, assemble_stiffness};
use cbeam_core::discretization::{DofMap, Formulation, QuadPolicy};
use cbeam_core::geometry::{normal_pair, Curve, ParamCurve};
use cbeam_core::model::{BeamModel, BodyForce, BoundaryConditions, Discretization, LoadCase, PointLoad};
use cbeam_core::postprocess::{evaluate_fields, resultants};
use cbeam_core::quadrature::GaussLegendre;
use cbeam_core::section::{section_from_shape, Material, SectionShape};
use cbeam_core::solver::{solve, SolutionFields, SolveReport};
use cbeam_core::{Mat3, Vec3};
use nalgebra::DVector;

fn beam(curve: ParamCurve, shape: SectionShape, director: Option<Vec3>, loads: LoadCase) -> BeamModel {
    BeamModel {
        curve: Curve::new(curve).unwrap(),
        material: Material::from_e_nu(2.0e3, 0.25).unwrap(),
        section: section_from_shape(shape, director).unwrap(),
        bcs: BoundaryConditions::cantilever(),
        loads,
    }
}

fn with_coefficients(disc: &Discretization, x: DVector<f64>) -> SolutionFields {
    SolutionFields {
        formulation: disc.formulation,
        mesh: disc.mesh.clone(),
        dofs: DofMap::new(disc.formulation, &disc.mesh),
        coefficients: x,
        multipliers: DVector::zeros(0),
        constraint_labels: Vec::new(),
        report: SolveReport {
            condition_estimate: 1.0,
            residual: 0.0,
            constraint_residual: 0.0,
        },
    }
}

/// Energy density written with P = t⊗t, Q = I − P and the skew matrix of t.
fn tensor_energy(model: &BeamModel, sol: &SolutionFields) -> f64 {
    let m = &model.material;
    let sec = &model.section;
    let gl = GaussLegendre::new(8);
    let mut total = 0.0;
    for e in 0..sol.mesh.elements() {
        let (a, b) = sol.mesh.element(e);
        for (s, w) in gl.on_interval(a, b) {
            let pf = evaluate_fields(model, sol, s).unwrap();
            let t = pf.frame.t;
            let p = t * t.transpose();
            let q = Mat3::identity() - p;
            let tx = t.cross_matrix();
            let inertia = sec.inertia_tensor(&t).unwrap();
            let j = &pf.jet;
            let density = if sol.formulation.is_euler_bernoulli() {
                let bend = q * (tx * j.ddu);
                m.e * sec.area * (p * j.du).norm_squared() + m.e * bend.dot(&(inertia * bend)) + m.g * sec.polar * pf.dtheta_t.powi(2)
            } else {
                let shear = q * j.du + tx * j.theta;
                m.e * sec.area * (p * j.du).norm_squared()
                    + m.g * sec.area * shear.norm_squared()
                    + m.e * (q * j.dtheta).dot(&(inertia * (q * j.dtheta)))
                    + m.g * sec.polar * (p * j.dtheta).norm_squared()
            };
            total += w * density;
        }
    }
    total
}

#[test]
fn stiffness_matches_projector_form_energy() {
    let curve = ParamCurve::Line {
        start: Vec3::new(0.2, 0.1, -0.3),
        end: Vec3::new(1.7, 0.9, 0.4),
    };
    let shape = SectionShape::Rect { w: 0.05, h: 0.12 };
    let model = beam(curve, shape, Some(Vec3::new(0.0, 0.0, 1.0)), LoadCase::default());
    for f in Formulation::ALL {
        let disc = Discretization::uniform(&model, 3, f, QuadPolicy::Full).unwrap();
        let k = assemble_stiffness(&model, &disc).unwrap();
        for seed in 0..5u32 {
            // A fixed pseudo-random coefficient vector.
            let x = DVector::from_fn(k.nrows(), |i, _| ((i as f64 + 1.0) * (seed as f64 + 0.37) * 12.9898).sin());
            let discrete = x.dot(&(&k * &x));
            let oracle = tensor_energy(&model, &with_coefficients(&disc, x));
            assert!(
                (discrete - oracle).abs() <= 1e-11 * oracle,
                "{f} seed {seed}: {discrete:e} vs {oracle:e}"
            );
        }
    }
}

fn straight_cantilever(loads: LoadCase) -> (BeamModel, f64, Vec3, Vec3) {
    let axis = Vec3::new(3.0, 0.0, 4.0) / 5.0;
    let length = 2.0;
    let model = beam(
        ParamCurve::Line {
            start: Vec3::zeros(),
            end: axis * length,
        },
        SectionShape::Circle { d: 0.15 },
        None,
        loads,
    );
    let (n1, _) = normal_pair(&axis);
    (model, length, axis, n1)
}

/// Uniform transverse load q on a Timoshenko cantilever:
/// w(x) = q x²(6L² − 4Lx + x²)/(24EI) + q(Lx − x²/2)/(GA).
#[test]
fn distributed_load_cantilever_deflection() {
    let (probe, length, _, n1) = straight_cantilever(LoadCase::default());
    let q_vol = 0.4;
    let model = probe.with_loads(LoadCase {
        body: BodyForce::Uniform(n1 * q_vol),
        ..LoadCase::default()
    });
    let m = model.material;
    let sec = model.section;
    let q = q_vol * sec.area;
    let ei = m.e * sec.inertia_tensor(&Vec3::x()).unwrap()[(1, 1)];
    let ga = m.g * sec.area;
    let exact = |x: f64, shear: bool| {
        q * x * x * (6.0 * length * length - 4.0 * length * x + x * x) / (24.0 * ei)
            + if shear { q * (length * x - x * x / 2.0) / ga } else { 0.0 }
    };
    for f in [Formulation::TimoshenkoH3p2, Formulation::EulerBernoulliH3] {
        let shear = !f.is_euler_bernoulli();
        let mut errors = Vec::new();
        for n in [2, 4, 8] {
            let disc = Discretization::uniform(&model, n, f, QuadPolicy::Full).unwrap();
            let sol = solve(&assemble(&model, &disc).unwrap()).unwrap();
            let err = disc
                .mesh
                .nodes()
                .iter()
                .map(|&s| {
                    let w = evaluate_fields(&model, &sol, s).unwrap().jet.u.dot(&n1);
                    (w - exact(s, shear)).abs() / exact(length, shear)
                })
                .fold(0.0, f64::max);
            errors.push(err);
        }
        // Cubic Hermite elements are nodally exact for the bending ODE; the
        // Timoshenko variant adds a quadratic shear part that is also exact.
        assert!(errors.iter().all(|&e| e < 1e-10), "{f}: {errors:?}");
    }
}

/// Away from the support the internal force equals the tip force and the
/// internal moment equals the tip moment plus the lever-arm term, on any
/// curve. Checked on a quarter circle at the two-point Gauss points, where
/// the reduced-rule resultants are most accurate.
#[test]
fn arc_resultants_converge_to_statics() {
    let radius = 1.0;
    let force = Vec3::new(0.3, -0.2, 0.5) * 1e-3;
    let moment = Vec3::new(0.1, 0.2, -0.1) * 1e-3;
    let model = beam(
        ParamCurve::Arc {
            center: Vec3::zeros(),
            radius,
            basis: [Vec3::x(), Vec3::y()],
            angle: [0.0, FRAC_PI_2],
        },
        SectionShape::Circle { d: 0.1 },
        None,
        LoadCase {
            end: PointLoad { force, moment },
            ..LoadCase::default()
        },
    );
    let length = model.curve.length();
    let tip = model.curve.position(length).unwrap();
    for f in [Formulation::TimoshenkoP2p1, Formulation::TimoshenkoH3p2] {
        let mut worst = Vec::new();
        for n in [4, 8, 16, 32] {
            let disc = Discretization::uniform(&model, n, f, QuadPolicy::Reduced).unwrap();
            let sol = solve(&assemble(&model, &disc).unwrap()).unwrap();
            let mut err: f64 = 0.0;
            let points = (0..n).flat_map(|e| GaussLegendre::new(2).on_interval(disc.mesh.element(e).0, disc.mesh.element(e).1));
            for (s, _) in points {
                let r = resultants(&model, &sol, s).unwrap();
                let x = model.curve.position(s).unwrap();
                let f_stat = force;
                let m_stat = moment + (tip - x).cross(&force);
                err = err
                    .max((r.axial + r.shear - f_stat).norm() / force.norm())
                    .max((r.moment + r.torsion - m_stat).norm() / m_stat.norm());
            }
            worst.push(err);
        }
        // The moment is EI θ', so its order follows the derivative of the
        // rotation space: P1 gives first order, P2 superconverges to third
        // at these points.
        let expected = if f == Formulation::TimoshenkoP2p1 { 0.9 } else { 2.8 };
        for w in worst.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= expected, "{f}: order {order} from {worst:?}");
        }
    }
}

#[test]
fn straight_cantilever_support_shear_equals_load() {
    let (probe, _, _, n1) = straight_cantilever(LoadCase::default());
    let p = 2e-3;
    let model = probe.with_loads(LoadCase::tip_force(n1 * p));
    for f in [Formulation::TimoshenkoP2p1, Formulation::TimoshenkoH3p2] {
        let disc = Discretization::uniform(&model, 4, f, QuadPolicy::Full).unwrap();
        let sol = solve(&assemble(&model, &disc).unwrap()).unwrap();
        let r = resultants(&model, &sol, 0.0).unwrap();
        assert!((r.shear.norm() - p).abs() <= 1e-8 * p, "{f}: {:e}", r.shear.norm());
        assert!((r.shear - n1 * p).norm() <= 1e-8 * p, "{f}");
    }
}

#[test]
fn uniform_torsion_is_exact() {
    let (probe, _, axis, _) = straight_cantilever(LoadCase::default());
    let torque = 3e-3;
    let model = probe.with_loads(LoadCase::tip_moment(axis * torque));
    for f in Formulation::ALL {
        let disc = Discretization::uniform(&model, 3, f, QuadPolicy::Full).unwrap();
        let sol = solve(&assemble(&model, &disc).unwrap()).unwrap();
        for k in 0..=6 {
            let s = model.curve.length() * k as f64 / 6.0;
            let r = resultants(&model, &sol, s).unwrap();
            assert!((r.torsion - axis * torque).norm() <= 1e-10 * torque, "{f} s={s}");
            assert!(r.moment.norm() <= 1e-10 * torque, "{f} s={s}");
        }
    }
}
