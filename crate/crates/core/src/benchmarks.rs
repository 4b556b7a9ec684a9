//! Reference problems with closed-form tip deflections, convergence and
//! locking studies, and demonstration models for curvature coupling.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{assemble, AssemblyError};
use crate::discretization::{DiscretizationError, Formulation, QuadPolicy};
use crate::geometry::{Curve, GeometryError, ParamCurve};
use crate::model::{BeamModel, BoundaryConditions, Discretization, EndCondition, LoadCase, Row};
use crate::postprocess::{evaluate_fields, PostprocessError};
use crate::section::{section_from_shape, Material, SectionError, SectionShape};
use crate::solver::{solve, SolverError};
use crate::Vec3;

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("invalid benchmark input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error(transparent)]
    Discretization(#[from] DiscretizationError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Postprocess(#[from] PostprocessError),
}

/// Length of the straight cantilever.
pub const STRAIGHT_LENGTH: f64 = 10.0;
/// Mean radius of the quarter arc.
pub const ARC_RADIUS: f64 = 1.0;
/// Tip load magnitude used by the studies.
pub const DEFAULT_LOAD: f64 = 1.0;

/// Tip deflection of a unit-depth rectangular cantilever of thickness `t`
/// under an end shear load `p`, including the shear correction.
pub fn analytic_straight_tip(p: f64, e: f64, nu: f64, t: f64, l: f64) -> f64 {
    let i = t.powi(3) / 12.0;
    -p / (6.0 * e * i) * ((4.0 + 5.0 * nu) * t * t * l / 4.0 + 2.0 * l.powi(3))
}

/// Radial tip deflection of a clamped quarter ring with inner radius `a` and
/// outer radius `b` (unit depth) under a radial end load `p`:
///
/// ```text
/// u_x = −p π (a² + b²) / (E [(a² − b²) + (a² + b²) ln(b/a)])
/// ```
///
/// The bracket cancels catastrophically for thin rings, so it is evaluated
/// as `4 m² Σ_{k≥1} 4k/(4k² − 1) x^{2k+1}` with `m = (a + b)/2` and
/// `x = (b − a)/(b + a)` when `x` is small.
pub fn analytic_quarter_arc_tip(p: f64, e: f64, a: f64, b: f64) -> Result<f64, BenchmarkError> {
    if !(a > 0.0 && b > a && e > 0.0) {
        return Err(BenchmarkError::Invalid(format!(
            "quarter arc needs 0 < a < b and E > 0, got a = {a}, b = {b}, E = {e}"
        )));
    }
    let m = 0.5 * (a + b);
    let x = 0.5 * (b - a) / m;
    let bracket = if x < 0.125 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = 0.0;
        for k in 1..200 {
            term *= x2;
            let kf = k as f64;
            let add = 4.0 * kf / (4.0 * kf * kf - 1.0) * term;
            sum += add;
            if add <= 1e-18 * sum {
                break;
            }
        }
        4.0 * m * m * sum
    } else {
        (a * a - b * b) + (a * a + b * b) * (b / a).ln()
    };
    Ok(-p * PI * (a * a + b * b) / (e * bracket))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Straight,
    QuarterArc,
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Straight => "straight",
            Benchmark::QuarterArc => "quarter_arc",
        }
    }

    /// Cantilever of thickness `t` with its tip load applied.
    pub fn model(self, t: f64, material: Material, p: f64) -> Result<BeamModel, BenchmarkError> {
        if !(t > 0.0) {
            return Err(BenchmarkError::Invalid(format!("thickness must be positive, got {t}")));
        }
        let section = section_from_shape(SectionShape::UnitDepthRect { t }, None)?;
        let (curve, load) = match self {
            Benchmark::Straight => (
                ParamCurve::Line {
                    start: Vec3::zeros(),
                    end: Vec3::new(STRAIGHT_LENGTH, 0.0, 0.0),
                },
                Vec3::new(0.0, -p, 0.0),
            ),
            Benchmark::QuarterArc => (
                ParamCurve::Arc {
                    center: Vec3::zeros(),
                    radius: ARC_RADIUS,
                    basis: [Vec3::x(), Vec3::y()],
                    angle: [-FRAC_PI_2, 0.0],
                },
                Vec3::new(-p, 0.0, 0.0),
            ),
        };
        Ok(BeamModel {
            curve: Curve::new(curve)?,
            material,
            section,
            bcs: BoundaryConditions::cantilever(),
            loads: LoadCase::tip_force(load),
        })
    }

    /// Index of the tip displacement component compared with the reference.
    pub fn qoi_component(self) -> usize {
        match self {
            Benchmark::Straight => 1,
            Benchmark::QuarterArc => 0,
        }
    }

    pub fn qoi_name(self) -> &'static str {
        match self {
            Benchmark::Straight => "tip_uy",
            Benchmark::QuarterArc => "tip_ux",
        }
    }

    pub fn reference(self, t: f64, material: &Material, p: f64) -> Result<f64, BenchmarkError> {
        match self {
            Benchmark::Straight => {
                let nu = material.nu.unwrap_or(material.e / (2.0 * material.g) - 1.0);
                Ok(analytic_straight_tip(p, material.e, nu, t, STRAIGHT_LENGTH))
            }
            Benchmark::QuarterArc => analytic_quarter_arc_tip(p, material.e, ARC_RADIUS - 0.5 * t, ARC_RADIUS + 0.5 * t),
        }
    }
}

/// Solves `model` and returns the tip displacement.
pub fn tip_displacement(
    model: &BeamModel,
    elements: usize,
    formulation: Formulation,
    policy: QuadPolicy,
) -> Result<Vec3, BenchmarkError> {
    let disc = Discretization::uniform(model, elements, formulation, policy)?;
    let sol = solve(&assemble(model, &disc)?)?;
    Ok(evaluate_fields(model, &sol, model.curve.length())?.jet.u)
}

pub fn default_material() -> Material {
    Material::from_e_nu(1e6, 0.3).expect("valid constants")
}

/// Fraction by which the error must drop per refinement before the series
/// counts as converging.
pub const PLATEAU_DECREASE: f64 = 0.2;
/// Points whose error is within this factor of the plateau level are left
/// out of the order fit.
pub const PLATEAU_MARGIN: f64 = 10.0;

/// A convergence or locking study over one benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySpec {
    pub benchmark: Benchmark,
    pub formulations: Vec<Formulation>,
    pub policies: Vec<QuadPolicy>,
    pub elements: Vec<usize>,
    pub thickness: Vec<f64>,
    pub material: Material,
    pub load: f64,
}

impl StudySpec {
    pub fn new(benchmark: Benchmark, formulations: Vec<Formulation>, policies: Vec<QuadPolicy>, elements: Vec<usize>, thickness: Vec<f64>) -> Self {
        Self {
            benchmark,
            formulations,
            policies,
            elements,
            thickness,
            material: default_material(),
            load: DEFAULT_LOAD,
        }
    }

    pub fn validate(&self) -> Result<(), BenchmarkError> {
        let bad = |m: &str| Err(BenchmarkError::Invalid(m.to_string()));
        if self.elements.is_empty() {
            return bad("element list is empty");
        }
        if self.elements.contains(&0) {
            return bad("element counts must be positive");
        }
        if self.elements.windows(2).any(|w| w[1] <= w[0]) {
            return bad("element counts must be strictly increasing");
        }
        if self.formulations.is_empty() {
            return bad("formulation list is empty");
        }
        if self.policies.is_empty() {
            return bad("quadrature list is empty");
        }
        if self.thickness.is_empty() {
            return bad("thickness list is empty");
        }
        if let Some(t) = self.thickness.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(BenchmarkError::Invalid(format!("thickness must be positive, got {t}")));
        }
        if !self.load.is_finite() {
            return bad("load must be finite");
        }
        Ok(())
    }

    fn series_keys(&self) -> Vec<SeriesKey> {
        let mut keys = Vec::new();
        for &formulation in &self.formulations {
            for &policy in &self.policies {
                for &t in &self.thickness {
                    keys.push(SeriesKey { formulation, policy, t });
                }
            }
        }
        keys
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesKey {
    pub formulation: Formulation,
    pub policy: QuadPolicy,
    pub t: f64,
}

/// One mesh of a convergence series.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub elements: usize,
    /// `Err` holds the message of a failed solve.
    pub qoi: Result<f64, String>,
    pub error: Option<f64>,
    pub rel_error: Option<f64>,
    /// Order from this mesh and the previous successful one.
    pub order: Option<f64>,
    pub plateau: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSeries {
    pub key: SeriesKey,
    pub reference: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Error level at which refinement stopped paying off, if reached.
    pub plateau_level: Option<f64>,
    /// Mean pairwise order over the pre-plateau points.
    pub fitted_order: Option<f64>,
}

impl ConvergenceSeries {
    fn from_qoi(key: SeriesKey, reference: f64, cells: Vec<(usize, Result<f64, String>)>) -> Self {
        let mut rows: Vec<ConvergenceRow> = cells
            .into_iter()
            .map(|(elements, qoi)| {
                let error = qoi.as_ref().ok().map(|q| (q - reference).abs());
                ConvergenceRow {
                    elements,
                    error,
                    rel_error: error.map(|e| e / reference.abs()),
                    qoi,
                    order: None,
                    plateau: false,
                }
            })
            .collect();
        let ok: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].error.is_some()).collect();
        for w in ok.windows(2) {
            let (a, b) = (&rows[w[0]], &rows[w[1]]);
            let (ea, eb) = (a.error.unwrap(), b.error.unwrap());
            if ea > 0.0 && eb > 0.0 {
                let order = (ea / eb).ln() / (b.elements as f64 / a.elements as f64).ln();
                rows[w[1]].order = Some(order);
            }
        }
        let onset = ok
            .windows(2)
            .find(|w| rows[w[1]].error.unwrap() > (1.0 - PLATEAU_DECREASE) * rows[w[0]].error.unwrap())
            .map(|w| w[1]);
        let plateau_level = onset.map(|_| rows[*ok.last().unwrap()].error.unwrap());
        if let Some(start) = onset {
            for row in rows.iter_mut().skip(start) {
                row.plateau = true;
            }
        }
        let floor = plateau_level.map_or(0.0, |l| PLATEAU_MARGIN * l);
        let pre: Vec<usize> = ok
            .iter()
            .copied()
            .filter(|&i| !rows[i].plateau && rows[i].error.unwrap() > floor)
            .collect();
        let orders: Vec<f64> = pre.windows(2).filter(|w| w[1] == w[0] + 1).filter_map(|w| rows[w[1]].order).collect();
        let fitted_order = if rows.len() >= 3 && !orders.is_empty() {
            Some(orders.iter().sum::<f64>() / orders.len() as f64)
        } else {
            None
        };
        Self {
            key,
            reference,
            rows,
            plateau_level,
            fitted_order,
        }
    }

    pub fn relative_errors(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.rel_error).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub benchmark: Benchmark,
    pub series: Vec<ConvergenceSeries>,
}

/// Header of `convergence.csv`.
pub const CONVERGENCE_HEADER: &str = "benchmark,formulation,quadrature,t,n_elem,qoi,error,rel_error,order";

impl ConvergenceReport {
    pub fn find(&self, formulation: Formulation, policy: QuadPolicy, t: f64) -> Option<&ConvergenceSeries> {
        self.series
            .iter()
            .find(|s| s.key.formulation == formulation && s.key.policy == policy && s.key.t == t)
    }

    pub fn failures(&self) -> usize {
        self.series.iter().flat_map(|s| &s.rows).filter(|r| r.qoi.is_err()).count()
    }

    /// CSV text; failed cells leave the numeric columns empty and the order
    /// column is empty for series with fewer than three meshes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CONVERGENCE_HEADER);
        out.push('\n');
        let num = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        for series in &self.series {
            let show_order = series.rows.len() >= 3;
            for row in &series.rows {
                out += &format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    self.benchmark.name(),
                    series.key.formulation.name(),
                    series.key.policy.name(),
                    series.key.t,
                    row.elements,
                    num(row.qoi.as_ref().ok().copied()),
                    num(row.error),
                    num(row.rel_error),
                    if show_order { num(row.order) } else { String::new() },
                );
            }
        }
        out
    }
}

/// Runs `jobs` on a small scoped worker pool; results come back in input
/// order regardless of scheduling.
fn run_parallel<J: Sync, R: Send>(jobs: &[J], f: impl Fn(&J) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len()).max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<BTreeMap<usize, R>> = Mutex::new(BTreeMap::new());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let r = f(job);
                results.lock().expect("worker panicked").insert(i, r);
            });
        }
    });
    results.into_inner().expect("worker panicked").into_values().collect()
}

fn solve_cell(study: &StudySpec, key: SeriesKey, elements: usize) -> Result<f64, BenchmarkError> {
    let model = study.benchmark.model(key.t, study.material, study.load)?;
    let u = tip_displacement(&model, elements, key.formulation, key.policy)?;
    Ok(u[study.benchmark.qoi_component()])
}

/// Solves every cell of `study` and compares the tip quantity with the
/// analytic reference. A failing cell is recorded and the study continues.
pub fn run_convergence(study: &StudySpec) -> Result<ConvergenceReport, BenchmarkError> {
    study.validate()?;
    let keys = study.series_keys();
    let mut jobs = Vec::new();
    for (k, key) in keys.iter().enumerate() {
        for &n in &study.elements {
            jobs.push((k, *key, n));
        }
    }
    let results = run_parallel(&jobs, |&(_, key, n)| solve_cell(study, key, n).map_err(|e| e.to_string()));
    let mut series = Vec::new();
    for (k, key) in keys.iter().enumerate() {
        let reference = study.benchmark.reference(key.t, &study.material, study.load)?;
        let cells: Vec<(usize, Result<f64, String>)> = jobs
            .iter()
            .zip(&results)
            .filter(|((kk, _, _), _)| *kk == k)
            .map(|((_, _, n), r)| (*n, r.clone()))
            .collect();
        for (n, r) in &cells {
            if let Err(e) = r {
                log::warn!("{} {} {} t={} n={n}: {e}", study.benchmark.name(), key.formulation, key.policy.name(), key.t);
            }
        }
        series.push(ConvergenceSeries::from_qoi(*key, reference, cells));
    }
    Ok(ConvergenceReport {
        benchmark: study.benchmark,
        series,
    })
}

/// Relative tip errors of one formulation at one mesh, across policies and
/// thicknesses.
#[derive(Debug, Clone, PartialEq)]
pub struct LockingRow {
    pub formulation: Formulation,
    pub policy: QuadPolicy,
    pub t: f64,
    pub rel_error: Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LockingReport {
    pub benchmark: Benchmark,
    pub elements: usize,
    pub rows: Vec<LockingRow>,
}

impl LockingReport {
    pub fn rel_error(&self, formulation: Formulation, policy: QuadPolicy, t: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.formulation == formulation && r.policy == policy && r.t == t)
            .and_then(|r| r.rel_error.as_ref().ok().copied())
    }

    /// Full-rule error over reduced-rule error.
    pub fn policy_ratio(&self, formulation: Formulation, t: f64) -> Option<f64> {
        Some(self.rel_error(formulation, QuadPolicy::Full, t)? / self.rel_error(formulation, QuadPolicy::Reduced, t)?)
    }

    /// Error at thickness `t` over the error at `t_ref`, same policy.
    pub fn thickness_ratio(&self, formulation: Formulation, policy: QuadPolicy, t: f64, t_ref: f64) -> Option<f64> {
        Some(self.rel_error(formulation, policy, t)? / self.rel_error(formulation, policy, t_ref)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("benchmark,formulation,quadrature,t,n_elem,rel_error\n");
        for r in &self.rows {
            let e = r.rel_error.as_ref().map(|v| format!("{v:.16e}")).unwrap_or_default();
            out += &format!(
                "{},{},{},{},{},{e}\n",
                self.benchmark.name(),
                r.formulation.name(),
                r.policy.name(),
                r.t,
                self.elements
            );
        }
        out
    }
}

/// Compares quadrature policies and thicknesses on the finest mesh of the
/// study.
pub fn run_locking_study(study: &StudySpec) -> Result<LockingReport, BenchmarkError> {
    study.validate()?;
    let n = *study.elements.last().expect("validated");
    let keys = study.series_keys();
    let results = run_parallel(&keys, |key| -> Result<f64, String> {
        let reference = study.benchmark.reference(key.t, &study.material, study.load).map_err(|e| e.to_string())?;
        let q = solve_cell(study, *key, n).map_err(|e| e.to_string())?;
        Ok((q - reference).abs() / reference.abs())
    });
    let rows = keys
        .iter()
        .zip(results)
        .map(|(key, rel_error)| LockingRow {
            formulation: key.formulation,
            policy: key.policy,
            t: key.t,
            rel_error,
        })
        .collect();
    Ok(LockingReport {
        benchmark: study.benchmark,
        elements: n,
        rows,
    })
}

/// Radius of each half of the S-curve.
pub const S_CURVE_RADIUS: f64 = 1.0;
/// Helix radius, rise per radian and number of turns in the demo.
pub const HELIX_RADIUS: f64 = 1.0;
pub const HELIX_PITCH: f64 = 0.2;
pub const HELIX_TURNS: f64 = 3.0;

/// Planar S-curve in the xy plane from `(0, 0, 0)` down to `(0, −4R, 0)`:
/// two half circles of opposite turning, as a Hermite spline with eight
/// pieces per half and exact circle tangents.
pub fn s_curve() -> ParamCurve {
    let r = S_CURVE_RADIUS;
    let pieces = 8;
    let dphi = PI / pieces as f64;
    let mut points = Vec::new();
    let mut tangents = Vec::new();
    // Upper half: counter-clockwise about (0, −R), from φ = π/2 to 3π/2.
    for i in 0..=pieces {
        let phi = FRAC_PI_2 + dphi * i as f64;
        points.push(Vec3::new(r * phi.cos(), -r + r * phi.sin(), 0.0));
        tangents.push(Vec3::new(-phi.sin(), phi.cos(), 0.0) * (r * dphi));
    }
    // Lower half: clockwise about (0, −3R), from φ = π/2 to −π/2.
    for i in 1..=pieces {
        let phi = FRAC_PI_2 - dphi * i as f64;
        points.push(Vec3::new(r * phi.cos(), -3.0 * r + r * phi.sin(), 0.0));
        tangents.push(Vec3::new(phi.sin(), -phi.cos(), 0.0) * (r * dphi));
    }
    ParamCurve::HermiteSpline { points, tangents }
}

/// A named demonstration problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Demo {
    pub name: &'static str,
    pub model: BeamModel,
    /// The shape `model.section` was built from.
    pub shape: SectionShape,
    pub elements: usize,
    pub formulation: Formulation,
    pub policy: QuadPolicy,
}

/// Curvature-coupling demonstrations: S-curves under end torque and under
/// an out-of-plane load, a pushed and a pulled helix, and a straight beam
/// under end torque.
pub fn demo_configs() -> Result<Vec<Demo>, BenchmarkError> {
    let material = default_material();
    let shape = SectionShape::Circle { d: 0.1 };
    let section = section_from_shape(shape, None)?;
    let s_model = |loads: LoadCase| -> Result<BeamModel, BenchmarkError> {
        Ok(BeamModel {
            curve: Curve::new(s_curve())?,
            material,
            section,
            bcs: BoundaryConditions::cantilever(),
            loads,
        })
    };
    let s_end = Curve::new(s_curve())?;
    let t_end = s_end.frame(s_end.length())?.t;
    let helix_curve = Curve::new(ParamCurve::Helix {
        center: Vec3::zeros(),
        radius: HELIX_RADIUS,
        pitch: HELIX_PITCH,
        angle: [0.0, 2.0 * PI * HELIX_TURNS],
    })?;
    // Pinned with twist restrained at the start; the far end slides along
    // its tangent only.
    let helix_bcs = BoundaryConditions {
        start: EndCondition {
            twist: Row::Essential(0.0),
            ..EndCondition::pinned()
        },
        end: EndCondition {
            shear: Row::Essential(Vec3::zeros()),
            ..EndCondition::free()
        },
    };
    let helix = |fz: f64| BeamModel {
        curve: helix_curve.clone(),
        material,
        section,
        bcs: helix_bcs,
        loads: LoadCase::tip_force(Vec3::new(0.0, 0.0, fz)),
    };
    let straight = BeamModel {
        curve: Curve::new(ParamCurve::Line {
            start: Vec3::zeros(),
            end: Vec3::new(4.0, 0.0, 0.0),
        })?,
        material,
        section,
        bcs: BoundaryConditions::cantilever(),
        loads: LoadCase::tip_moment(Vec3::new(1e-3, 0.0, 0.0)),
    };
    let demo = |name, model, elements| Demo {
        name,
        model,
        shape,
        elements,
        formulation: Formulation::TimoshenkoH3p2,
        policy: QuadPolicy::Reduced,
    };
    Ok(vec![
        demo("s_curve_torque", s_model(LoadCase::tip_moment(t_end * 1e-3))?, 32),
        demo("s_curve_out_of_plane", s_model(LoadCase::tip_force(Vec3::new(0.0, 0.0, 1e-4)))?, 32),
        demo("helix_pull", helix(1e-3), 48),
        demo("helix_push", helix(-1e-3), 48),
        demo("straight_torque", straight, 8),
    ])
}
