//! Field evaluation, section resultants, reactions, energies and CSV export.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::Serialize;
use thiserror::Error;

use crate::assembly::{FieldJet, LinearSystem};
use crate::discretization::{quadrature, QuadPolicy, TermClass};
use crate::quadrature::GaussLegendre;
use crate::geometry::{FrameSample, GeometryError};
use crate::model::{BeamModel, EndCondition, Row};
use crate::section::SectionError;
use crate::solver::SolutionFields;
use crate::Vec3;

#[derive(Debug, Error)]
pub enum PostprocessError {
    #[error("arc length {s} is outside [0, {length}]")]
    OutOfRange { s: f64, length: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
}

/// Interpolated fields at one point. For Euler–Bernoulli solutions
/// `theta = t×u' + θ_t t` and `dtheta` is its arc-length derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFields {
    pub frame: FrameSample,
    pub jet: FieldJet,
    pub theta_t: f64,
    pub dtheta_t: f64,
}

pub fn evaluate_fields(model: &BeamModel, sol: &SolutionFields, s: f64) -> Result<PointFields, PostprocessError> {
    let length = sol.mesh.length();
    if !(s >= -1e-12 * length && s <= length * (1.0 + 1e-12)) {
        return Err(PostprocessError::OutOfRange { s, length });
    }
    let s = s.clamp(0.0, length);
    let frame = model.curve.frame(s)?;
    let f = sol.formulation;
    let mesh = &sol.mesh;
    let e = mesh.locate(s);
    let (a, b) = mesh.element(e);
    let x = ((s - a) / (b - a)).clamp(0.0, 1.0);
    let mid = f.midline_space();
    let ang = f.angle_space();
    let ms = mid.shape_on_element(b - a, x);
    let ashape = ang.shape_on_element(b - a, x);
    let md = mid.element_dofs(e);
    let ad = ang.element_dofs(e);
    let c = &sol.coefficients;
    let mut jet = FieldJet::default();
    for i in 0..ms.len {
        let v = Vec3::from_fn(|k, _| c[sol.dofs.midline(md[i], k)]);
        jet.u += v * ms.value[i];
        jet.du += v * ms.d1[i];
        if mid == crate::discretization::ScalarSpace::H3 {
            jet.ddu += v * ms.d2[i];
        }
    }
    let t = frame.t;
    let kappa = frame.kappa;
    if f.is_euler_bernoulli() {
        let (mut th, mut dth) = (0.0, 0.0);
        for i in 0..ashape.len {
            let v = c[sol.dofs.angle(ad[i], 0)];
            th += v * ashape.value[i];
            dth += v * ashape.d1[i];
        }
        jet.theta = t.cross(&jet.du) + t * th;
        jet.dtheta = kappa.cross(&jet.du) + t.cross(&jet.ddu) + kappa * th + t * dth;
        Ok(PointFields {
            frame,
            jet,
            theta_t: th,
            dtheta_t: dth,
        })
    } else {
        for i in 0..ashape.len {
            let v = Vec3::from_fn(|k, _| c[sol.dofs.angle(ad[i], k)]);
            jet.theta += v * ashape.value[i];
            jet.dtheta += v * ashape.d1[i];
        }
        Ok(PointFields {
            frame,
            jet,
            theta_t: t.dot(&jet.theta),
            dtheta_t: kappa.dot(&jet.theta) + t.dot(&jet.dtheta),
        })
    }
}

/// Axial force, shear force, bending moment and torsion at `s`, all as
/// global vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resultants {
    pub s: f64,
    pub axial: Vec3,
    pub shear: Vec3,
    pub moment: Vec3,
    pub torsion: Vec3,
}

impl Resultants {
    pub fn zero(s: f64) -> Self {
        Self {
            s,
            axial: Vec3::zeros(),
            shear: Vec3::zeros(),
            moment: Vec3::zeros(),
            torsion: Vec3::zeros(),
        }
    }

    /// Largest component-wise difference, relative to the largest magnitude
    /// of each resultant pair.
    pub fn max_relative_difference(&self, other: &Resultants) -> f64 {
        [
            (self.axial, other.axial),
            (self.shear, other.shear),
            (self.moment, other.moment),
            (self.torsion, other.torsion),
        ]
        .iter()
        .map(|(a, b)| {
            let scale = a.norm().max(b.norm());
            if scale == 0.0 {
                0.0
            } else {
                (a - b).norm() / scale
            }
        })
        .fold(0.0, f64::max)
    }
}

/// Resultants from the plain measures `P u'`, `Q u' − θ×t`, `θ'`, `P θ'`.
pub fn resultants(model: &BeamModel, sol: &SolutionFields, s: f64) -> Result<Resultants, PostprocessError> {
    let pf = evaluate_fields(model, sol, s)?;
    let t = pf.frame.t;
    let jet = &pf.jet;
    let mat = &model.material;
    let sec = &model.section;
    let q = pf.frame.normal_projector();
    let shear = if sol.formulation.is_euler_bernoulli() {
        Vec3::zeros()
    } else {
        (q * jet.du - jet.theta.cross(&t)) * (mat.g * sec.area)
    };
    Ok(Resultants {
        s: pf.frame.s,
        axial: t * (mat.e * sec.area * t.dot(&jet.du)),
        shear,
        moment: sec.inertia_tensor(&t)? * jet.dtheta * mat.e,
        torsion: t * (mat.g * sec.polar * t.dot(&jet.dtheta)),
    })
}

/// Resultants from the tangential/normal split of the fields, which exposes
/// the curvature coupling terms:
///
/// ```text
/// N = EA ((u_t)' − (Qu)·κ) t
/// S = GA (Q(Qu)' − (Qθ)×t + u_t κ)
/// M = E I_Σ ((Qθ)' + θ_t κ)
/// T = GJ ((θ_t)' − (Qθ)·κ) t
/// ```
pub fn resultants_curvature_form(
    model: &BeamModel,
    sol: &SolutionFields,
    s: f64,
) -> Result<Resultants, PostprocessError> {
    let pf = evaluate_fields(model, sol, s)?;
    let t = pf.frame.t;
    let kappa = pf.frame.kappa;
    let q = pf.frame.normal_projector();
    let jet = &pf.jet;
    let mat = &model.material;
    let sec = &model.section;

    let u_t = t.dot(&jet.u);
    let du_t = kappa.dot(&jet.u) + t.dot(&jet.du);
    let qu = jet.u - t * u_t;
    let dqu = jet.du - kappa * u_t - t * du_t;

    let (q_theta, dq_theta) = if sol.formulation.is_euler_bernoulli() {
        (t.cross(&jet.du), kappa.cross(&jet.du) + t.cross(&jet.ddu))
    } else {
        let qth = jet.theta - t * pf.theta_t;
        (qth, jet.dtheta - kappa * pf.theta_t - t * pf.dtheta_t)
    };

    let shear = if sol.formulation.is_euler_bernoulli() {
        Vec3::zeros()
    } else {
        (q * dqu - q_theta.cross(&t) + kappa * u_t) * (mat.g * sec.area)
    };
    Ok(Resultants {
        s: pf.frame.s,
        axial: t * (mat.e * sec.area * (du_t - qu.dot(&kappa))),
        shear,
        moment: sec.inertia_tensor(&t)? * (dq_theta + kappa * pf.theta_t) * mat.e,
        torsion: t * (mat.g * sec.polar * (pf.dtheta_t - q_theta.dot(&kappa))),
    })
}

/// Normal-plane shear angle `Qγ` with `(Qγ)×t = Q u' − (Qθ)×t`, that is
/// `Qγ = t×(Q u') − Qθ`. Identically zero for Euler–Bernoulli solutions.
pub fn shear_angle(model: &BeamModel, sol: &SolutionFields, s: f64) -> Result<Vec3, PostprocessError> {
    if sol.formulation.is_euler_bernoulli() {
        return Ok(Vec3::zeros());
    }
    let pf = evaluate_fields(model, sol, s)?;
    let t = pf.frame.t;
    let q = pf.frame.normal_projector();
    Ok(t.cross(&(q * pf.jet.du)) - q * pf.jet.theta)
}

/// `n` equally spaced arc-length samples including both ends.
pub fn uniform_samples(length: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| length * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Gauss points of the full rule on every element.
pub fn gauss_samples(sol: &SolutionFields) -> Vec<f64> {
    (0..sol.mesh.elements())
        .flat_map(|e| {
            quadrature(sol.formulation, QuadPolicy::Full, TermClass::Bend, sol.mesh.element(e))
                .points
                .into_iter()
                .map(|(s, _)| s)
        })
        .collect()
}

/// Reaction force and moment delivered by the supports at one end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndReaction {
    pub force: Vec3,
    pub moment: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reactions {
    pub start: EndReaction,
    pub end: EndReaction,
}

pub fn reactions(model: &BeamModel, system: &LinearSystem, sol: &SolutionFields) -> Result<Reactions, PostprocessError> {
    let r = sol.reaction_vector(system);
    let f = sol.formulation;
    let mid = f.midline_space();
    let ang = f.angle_space();
    let at = |v: usize, s: f64| -> Result<EndReaction, PostprocessError> {
        let t = model.curve.frame(s)?.t;
        let j = mid.vertex_value_dof(v);
        let k = ang.vertex_value_dof(v);
        let force = Vec3::from_fn(|c, _| r[sol.dofs.midline(j, c)]);
        let moment = if f.is_euler_bernoulli() {
            let js = mid.vertex_slope_dof(v).expect("Hermite midline");
            let slope = Vec3::from_fn(|c, _| r[sol.dofs.midline(js, c)]);
            t.cross(&slope) + t * r[sol.dofs.angle(k, 0)]
        } else {
            Vec3::from_fn(|c, _| r[sol.dofs.angle(k, c)])
        };
        Ok(EndReaction { force, moment })
    };
    Ok(Reactions {
        start: at(0, 0.0)?,
        end: at(sol.mesh.elements(), sol.mesh.length())?,
    })
}

/// Total applied force and moment about the origin, from the model alone.
/// The body force is integrated per mesh element with a rule fine enough to
/// be exact to rounding for smooth curves.
const APPLIED_LOAD_POINTS: usize = 12;

pub fn applied_load(model: &BeamModel, sol: &SolutionFields) -> Result<EndReaction, PostprocessError> {
    let mut force = Vec3::zeros();
    let mut moment = Vec3::zeros();
    for e in 0..sol.mesh.elements() {
        let (a, b) = sol.mesh.element(e);
        for (s, w) in GaussLegendre::new(APPLIED_LOAD_POINTS).on_interval(a, b) {
            let f = model.loads.body.at(s) * (model.section.area * w);
            let x = model.curve.position(s)?;
            force += f;
            moment += x.cross(&f);
        }
    }
    let length = model.curve.length();
    for (s, sign, bc, point) in [
        (0.0, -1.0, &model.bcs.start, &model.loads.start),
        (length, 1.0, &model.bcs.end, &model.loads.end),
    ] {
        let frame = model.curve.frame(s)?;
        let t = frame.t;
        let (nat_f, nat_m) = natural_end_load(bc, &t);
        let f = point.force + nat_f * sign;
        force += f;
        moment += frame.x.cross(&f) + point.moment + nat_m * sign;
    }
    Ok(EndReaction { force, moment })
}

fn natural_end_load(bc: &EndCondition, t: &Vec3) -> (Vec3, Vec3) {
    let q = |v: Vec3| v - t * v.dot(t);
    let mut f = Vec3::zeros();
    let mut m = Vec3::zeros();
    if let Row::Natural(n) = bc.stretch {
        f += t * n;
    }
    if let Row::Natural(sv) = bc.shear {
        f += q(sv);
    }
    if let Row::Natural(mv) = bc.bend {
        m += q(mv);
    }
    if let Row::Natural(tt) = bc.twist {
        m += t * tt;
    }
    (f, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energies {
    /// `½ a(u_h, u_h)`
    pub strain: f64,
    /// `a(u_h, u_h)`
    pub bilinear: f64,
    /// `l(u_h)`
    pub external_work: f64,
}

pub fn energies(system: &LinearSystem, sol: &SolutionFields) -> Energies {
    let x = &sol.coefficients;
    let a = x.dot(&(&system.k * x));
    Energies {
        strain: 0.5 * a,
        bilinear: a,
        external_work: system.rhs.dot(x),
    }
}

/// Scalar outputs of one solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub formulation: String,
    pub quadrature: String,
    pub elements: usize,
    pub length: f64,
    pub tip_displacement: Vec3,
    pub tip_rotation: Vec3,
    pub max_displacement: f64,
    pub reactions: Reactions,
    pub energy: Energies,
}

pub fn summarize(model: &BeamModel, system: &LinearSystem, sol: &SolutionFields) -> Result<Summary, PostprocessError> {
    let length = sol.mesh.length();
    let tip = evaluate_fields(model, sol, length)?;
    let max_displacement = uniform_samples(length, 201)
        .into_iter()
        .map(|s| evaluate_fields(model, sol, s).map(|p| p.jet.u.norm()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Summary {
        formulation: sol.formulation.name().to_string(),
        quadrature: system.policy.name().to_string(),
        elements: sol.mesh.elements(),
        length,
        tip_displacement: tip.jet.u,
        tip_rotation: tip.jet.theta,
        max_displacement,
        reactions: reactions(model, system, sol)?,
        energy: energies(system, sol),
    })
}

pub const CENTERLINE_HEADER: &str = "s,x,y,z,ux,uy,uz,thx,thy,thz";
pub const RESULTANTS_HEADER: &str = "s,Nx,Ny,Nz,Sx,Sy,Sz,Mx,My,Mz,Tx,Ty,Tz";

/// One centerline row: `s`, position, displacement, rotation.
pub fn centerline_rows(model: &BeamModel, sol: &SolutionFields, samples: &[f64]) -> Result<Vec<[f64; 10]>, PostprocessError> {
    samples
        .iter()
        .map(|&s| {
            let pf = evaluate_fields(model, sol, s)?;
            let x = pf.frame.x;
            let (u, th) = (pf.jet.u, pf.jet.theta);
            Ok([pf.frame.s, x[0], x[1], x[2], u[0], u[1], u[2], th[0], th[1], th[2]])
        })
        .collect()
}

pub fn resultant_rows(model: &BeamModel, sol: &SolutionFields, samples: &[f64]) -> Result<Vec<[f64; 13]>, PostprocessError> {
    samples
        .iter()
        .map(|&s| {
            let r = resultants(model, sol, s)?;
            let mut row = [0.0; 13];
            row[0] = r.s;
            for (i, v) in [r.axial, r.shear, r.moment, r.torsion].iter().enumerate() {
                row[1 + 3 * i..4 + 3 * i].copy_from_slice(v.as_slice());
            }
            Ok(row)
        })
        .collect()
}

fn format_csv<const N: usize>(header: &str, rows: &[[f64; N]]) -> String {
    let mut out = String::with_capacity(rows.len() * N * 24 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn write_csv<const N: usize>(path: &Path, header: &str, rows: &[[f64; N]]) -> Result<(), PostprocessError> {
    std::fs::write(path, format_csv(header, rows)).map_err(|source| PostprocessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a numeric CSV written by [`write_csv`], checking the header.
pub fn read_csv<const N: usize>(path: &Path, header: &str) -> Result<Vec<[f64; N]>, PostprocessError> {
    let text = std::fs::read_to_string(path).map_err(|source| PostprocessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |line: usize, message: String| PostprocessError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(parse_err(1, format!("expected header `{header}`")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let mut row = [0.0; N];
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != N {
                return Err(parse_err(i + 2, format!("expected {N} fields, found {}", fields.len())));
            }
            for (slot, field) in row.iter_mut().zip(fields) {
                *slot = field.parse().map_err(|e| parse_err(i + 2, format!("{e}")))?;
            }
            Ok(row)
        })
        .collect()
}

/// Writes `centerline.csv` and `resultants.csv` into `dir`.
pub fn export(model: &BeamModel, sol: &SolutionFields, samples: &[f64], dir: &Path) -> Result<(), PostprocessError> {
    std::fs::create_dir_all(dir).map_err(|source| PostprocessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write_csv(&dir.join("centerline.csv"), CENTERLINE_HEADER, &centerline_rows(model, sol, samples)?)?;
    write_csv(&dir.join("resultants.csv"), RESULTANTS_HEADER, &resultant_rows(model, sol, samples)?)?;
    Ok(())
}

/// Coefficient vector of the displacement part only.
pub fn midline_coefficients(sol: &SolutionFields) -> DVector<f64> {
    sol.coefficients.rows(0, sol.dofs.angle_offset()).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::discretization::{Formulation, QuadPolicy};
    use crate::geometry::{Curve, ParamCurve};
    use crate::model::{BoundaryConditions, Discretization, LoadCase};
    use crate::section::{section_from_shape, Material, SectionShape};
    use crate::solver::solve;

    fn straight(loads: LoadCase) -> BeamModel {
        BeamModel {
            curve: Curve::new(ParamCurve::Line {
                start: Vec3::zeros(),
                end: Vec3::new(3.0, 0.0, 0.0),
            })
            .unwrap(),
            material: Material::from_e_nu(1e4, 0.3).unwrap(),
            section: section_from_shape(SectionShape::Circle { d: 0.3 }, None).unwrap(),
            bcs: BoundaryConditions::cantilever(),
            loads,
        }
    }

    fn solved(model: &BeamModel, f: Formulation, n: usize) -> (LinearSystem, SolutionFields) {
        let disc = Discretization::uniform(model, n, f, QuadPolicy::Full).unwrap();
        let sys = assemble(model, &disc).unwrap();
        let sol = solve(&sys).unwrap();
        (sys, sol)
    }

    #[test]
    fn zero_solution_has_zero_resultants() {
        let model = straight(LoadCase::default());
        for f in Formulation::ALL {
            let (_, sol) = solved(&model, f, 2);
            for s in uniform_samples(3.0, 7) {
                let r = resultants(&model, &sol, s).unwrap();
                assert_eq!(r.max_relative_difference(&Resultants::zero(s)), 0.0);
                assert_eq!(r.axial.norm() + r.shear.norm() + r.moment.norm() + r.torsion.norm(), 0.0);
            }
        }
    }

    #[test]
    fn tip_load_shear_balances_load() {
        let p = Vec3::new(0.0, -2.0, 0.0);
        let model = straight(LoadCase::tip_force(p));
        for f in [Formulation::TimoshenkoP2p1, Formulation::TimoshenkoH3p2] {
            let (_, sol) = solved(&model, f, 4);
            for s in uniform_samples(3.0, 9) {
                let r = resultants(&model, &sol, s).unwrap();
                assert!((r.shear - p).norm() <= 1e-8 * p.norm(), "{f} at {s}: {:?}", r.shear);
                // The quadratic angle also captures the linear moment exactly.
                if f == Formulation::TimoshenkoH3p2 {
                    let lever = Vec3::new(3.0 - s, 0.0, 0.0).cross(&p);
                    assert!((r.moment - lever).norm() <= 1e-8 * 6.0, "{f} at {s}: {:?}", r.moment);
                }
            }
        }
    }

    #[test]
    fn uniform_torsion_is_exact() {
        let torque = 0.7;
        let model = straight(LoadCase::tip_moment(Vec3::new(torque, 0.0, 0.0)));
        for f in Formulation::ALL {
            let (_, sol) = solved(&model, f, 3);
            for s in uniform_samples(3.0, 11) {
                let r = resultants(&model, &sol, s).unwrap();
                assert!((r.torsion - Vec3::new(torque, 0.0, 0.0)).norm() < 1e-10, "{f}");
                assert!(r.moment.norm() < 1e-10);
                let pf = evaluate_fields(&model, &sol, s).unwrap();
                assert!(pf.jet.u.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn euler_bernoulli_shear_angle_is_zero() {
        let model = straight(LoadCase::tip_force(Vec3::new(0.0, 0.0, 1.0)));
        let (_, sol) = solved(&model, Formulation::EulerBernoulliH3, 2);
        assert_eq!(shear_angle(&model, &sol, 1.0).unwrap(), Vec3::zeros());
    }

    #[test]
    fn shear_angle_reproduces_shear_force() {
        let p = Vec3::new(0.0, 0.0, 1.5);
        let model = straight(LoadCase::tip_force(p));
        let (_, sol) = solved(&model, Formulation::TimoshenkoH3p2, 3);
        let ga = model.material.g * model.section.area;
        let expected = Vec3::x().cross(&p) / ga;
        for s in uniform_samples(3.0, 5) {
            let gamma = shear_angle(&model, &sol, s).unwrap();
            let r = resultants(&model, &sol, s).unwrap();
            assert!((gamma.cross(&Vec3::x()) * ga - r.shear).norm() <= 1e-10 * p.norm());
            // The constant-shear state: γ = t×S/(GA).
            assert!((gamma - expected).norm() <= 1e-8 * expected.norm());
        }
    }

    #[test]
    fn out_of_range_sample() {
        let model = straight(LoadCase::default());
        let (_, sol) = solved(&model, Formulation::TimoshenkoP2p1, 1);
        assert!(matches!(resultants(&model, &sol, 3.5), Err(PostprocessError::OutOfRange { .. })));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let model = straight(LoadCase::tip_force(Vec3::new(0.1, 0.2, -0.3)));
        let (_, sol) = solved(&model, Formulation::TimoshenkoP2p1, 3);
        let dir = tempfile::tempdir().unwrap();
        let samples = uniform_samples(3.0, 17);
        export(&model, &sol, &samples, dir.path()).unwrap();
        let rows: Vec<[f64; 10]> = read_csv(&dir.path().join("centerline.csv"), CENTERLINE_HEADER).unwrap();
        assert_eq!(rows, centerline_rows(&model, &sol, &samples).unwrap());
        let res: Vec<[f64; 13]> = read_csv(&dir.path().join("resultants.csv"), RESULTANTS_HEADER).unwrap();
        assert_eq!(res.len(), 17);
        let text = std::fs::read_to_string(dir.path().join("resultants.csv")).unwrap();
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn zero_export_reads_back_zeros() {
        let model = straight(LoadCase::default());
        let (_, sol) = solved(&model, Formulation::EulerBernoulliH3, 2);
        let dir = tempfile::tempdir().unwrap();
        export(&model, &sol, &uniform_samples(3.0, 5), dir.path()).unwrap();
        let rows: Vec<[f64; 13]> = read_csv(&dir.path().join("resultants.csv"), RESULTANTS_HEADER).unwrap();
        assert!(rows.iter().all(|r| r[1..].iter().all(|v| *v == 0.0)));
    }
}
