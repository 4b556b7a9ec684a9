//! Stiffness, load and constraint assembly.
//!
//! At a quadrature point the Timoshenko integrand is
//!
//! ```text
//! EA (t·u')(t·v') + GA (Qu' + t×θ)·(Qv' + t×η) + E θ'·I_Σ η' + GJ (t·θ')(t·η')
//! ```
//!
//! with `' = d/ds`. The Euler–Bernoulli form drops the shear term, replaces
//! `θ'` by `κ×u' + t×u'' + θ_t κ` and the twist measure by
//! `θ_t' − (t×u')·κ`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::discretization::{quadrature, DiscretizationError, DofMap, Formulation, Mesh1D, QuadPolicy, ScalarSpace, ShapeValues, TermClass};
use crate::compensated::Dd;
use crate::geometry::{normal_pair, FrameSample, GeometryError};
use crate::model::{BeamModel, Discretization, EndCondition, Row};
use crate::section::SectionError;
use crate::{Mat3, Vec3};

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error(transparent)]
    Discretization(#[from] DiscretizationError),
    #[error("constraint `{label}` conflicts with an existing constraint on the same DOFs")]
    ConstraintConflict { label: String },
}

/// Field values and arc-length derivatives at one point. `ddu` is only
/// meaningful for Hermite midlines.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldJet {
    pub u: Vec3,
    pub du: Vec3,
    pub ddu: Vec3,
    pub theta: Vec3,
    pub dtheta: Vec3,
}

/// The strain factors of the Timoshenko form at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicMeasures {
    /// `P u'`
    pub axial: Vec3,
    /// `Q u'`
    pub transverse: Vec3,
    /// `Q u' − θ×t`
    pub shear: Vec3,
    /// `Q θ'`
    pub bending: Vec3,
    /// `P θ'`
    pub twist: Vec3,
}

pub fn kinematic_measures(frame: &FrameSample, jet: &FieldJet) -> KinematicMeasures {
    let t = frame.t;
    let p = frame.tangent_projector();
    let q = frame.normal_projector();
    let transverse = q * jet.du;
    KinematicMeasures {
        axial: p * jet.du,
        transverse,
        shear: transverse - jet.theta.cross(&t),
        bending: q * jet.dtheta,
        twist: p * jet.dtheta,
    }
}

/// Essential condition `Σ c_i x_i = value`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub value: f64,
    pub label: String,
}

impl Constraint {
    /// Rows coming from end conditions carry an `start.`/`end.` label.
    pub fn is_support(&self) -> bool {
        self.label.starts_with("start.") || self.label.starts_with("end.")
    }
}

/// Stiffness, load vector and multiplier constraints.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub k: DMatrix<f64>,
    /// Low-order part of the stiffness; `k + k_lo` is the double-double sum.
    pub k_lo: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub constraints: Vec<Constraint>,
    pub dofs: DofMap,
    pub mesh: Mesh1D,
    pub formulation: Formulation,
    pub policy: QuadPolicy,
}

impl LinearSystem {
    /// Appends a constraint. An exact repeat is dropped; a constraint on the
    /// same DOFs with proportional coefficients but an incompatible value is
    /// a conflict.
    pub fn add_constraint(&mut self, c: Constraint) -> Result<(), AssemblyError> {
        let norm = |c: &Constraint| c.coeffs.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        let nc = norm(&c);
        if nc == 0.0 {
            return Ok(());
        }
        let dense = |c: &Constraint| {
            let mut v: Vec<(usize, f64)> = c.coeffs.iter().copied().filter(|(_, x)| *x != 0.0).collect();
            v.sort_by_key(|(i, _)| *i);
            v
        };
        let a = dense(&c);
        for other in &self.constraints {
            let b = dense(other);
            if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.0 != y.0) {
                continue;
            }
            let nb = norm(other);
            let dot: f64 = a.iter().zip(&b).map(|(x, y)| x.1 * y.1).sum::<f64>() / (nc * nb);
            if (dot.abs() - 1.0).abs() > 1e-12 {
                continue;
            }
            let va = c.value / nc;
            let vb = other.value / nb * dot.signum();
            if (va - vb).abs() <= 1e-12 * (1.0 + va.abs().max(vb.abs())) {
                return Ok(());
            }
            return Err(AssemblyError::ConstraintConflict { label: c.label });
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn n_primal(&self) -> usize {
        self.dofs.total()
    }
}

/// Which terms of the bilinear form to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Terms {
    pub stretch: bool,
    pub shear: bool,
    pub bend: bool,
    pub twist: bool,
}

impl Terms {
    pub const ALL: Terms = Terms {
        stretch: true,
        shear: true,
        bend: true,
        twist: true,
    };

    pub fn only(term: TermClass) -> Self {
        Terms {
            stretch: term == TermClass::Stretch,
            shear: term == TermClass::Shear,
            bend: term == TermClass::Bend,
            twist: term == TermClass::Twist,
        }
    }

    fn includes(&self, term: TermClass) -> bool {
        match term {
            TermClass::Stretch => self.stretch,
            TermClass::Shear => self.shear,
            TermClass::Bend => self.bend,
            TermClass::Twist => self.twist,
        }
    }
}

fn cross_matrix(v: &Vec3) -> Mat3 {
    v.cross_matrix()
}

fn local_shapes(space: ScalarSpace, mesh: &Mesh1D, e: usize, s: f64) -> ShapeValues {
    let (a, b) = mesh.element(e);
    space.shape_on_element(b - a, ((s - a) / (b - a)).clamp(0.0, 1.0))
}

/// Strain operator rows for one term at one point, and the matching
/// material matrix.
fn term_operator(
    term: TermClass,
    formulation: Formulation,
    model: &BeamModel,
    frame: &FrameSample,
    mid: &ShapeValues,
    ang: &ShapeValues,
) -> Result<(DMatrix<f64>, DMatrix<f64>), AssemblyError> {
    let t = frame.t;
    let kappa = frame.kappa;
    let nm = mid.len;
    let na = ang.len;
    let off = 3 * nm;
    let nc = formulation.angle_components();
    let n = off + nc * na;
    let e = model.material.e;
    let g = model.material.g;
    let sec = &model.section;
    let set_block = |b: &mut DMatrix<f64>, col: usize, m: &Mat3| {
        for r in 0..3 {
            for c in 0..3 {
                b[(r, col + c)] += m[(r, c)];
            }
        }
    };
    let mat3 = |m: Mat3| DMatrix::from_fn(3, 3, |r, c| m[(r, c)]);
    let out = match (term, formulation.is_euler_bernoulli()) {
        (TermClass::Stretch, _) => {
            let mut b = DMatrix::zeros(1, n);
            for a in 0..nm {
                for c in 0..3 {
                    b[(0, 3 * a + c)] = t[c] * mid.d1[a];
                }
            }
            (b, DMatrix::from_element(1, 1, e * sec.area))
        }
        (TermClass::Shear, false) => {
            let mut b = DMatrix::zeros(3, n);
            let q = frame.normal_projector();
            let tx = cross_matrix(&t);
            for a in 0..nm {
                set_block(&mut b, 3 * a, &(q * mid.d1[a]));
            }
            for k in 0..na {
                set_block(&mut b, off + 3 * k, &(tx * ang.value[k]));
            }
            (b, DMatrix::identity(3, 3) * (g * sec.area))
        }
        (TermClass::Shear, true) => (DMatrix::zeros(0, n), DMatrix::zeros(0, 0)),
        (TermClass::Bend, false) => {
            let mut b = DMatrix::zeros(3, n);
            for k in 0..na {
                set_block(&mut b, off + 3 * k, &(Mat3::identity() * ang.d1[k]));
            }
            (b, mat3(sec.inertia_tensor(&t)? * e))
        }
        (TermClass::Bend, true) => {
            let mut b = DMatrix::zeros(3, n);
            let kx = cross_matrix(&kappa);
            let tx = cross_matrix(&t);
            for a in 0..nm {
                set_block(&mut b, 3 * a, &(kx * mid.d1[a] + tx * mid.d2[a]));
            }
            for k in 0..na {
                for c in 0..3 {
                    b[(c, off + k)] += kappa[c] * ang.value[k];
                }
            }
            (b, mat3(sec.inertia_tensor(&t)? * e))
        }
        (TermClass::Twist, false) => {
            let mut b = DMatrix::zeros(1, n);
            for k in 0..na {
                for c in 0..3 {
                    b[(0, off + 3 * k + c)] = t[c] * ang.d1[k];
                }
            }
            (b, DMatrix::from_element(1, 1, g * sec.polar))
        }
        (TermClass::Twist, true) => {
            let mut b = DMatrix::zeros(1, n);
            let kt = kappa.cross(&t);
            for a in 0..nm {
                for c in 0..3 {
                    b[(0, 3 * a + c)] = -kt[c] * mid.d1[a];
                }
            }
            for k in 0..na {
                b[(0, off + k)] = ang.d1[k];
            }
            (b, DMatrix::from_element(1, 1, g * sec.polar))
        }
    };
    Ok(out)
}

/// Square-root factor `√w Lᵀ B` of one quadrature contribution, `D = L Lᵀ`.
fn weighted_root(b: &DMatrix<f64>, d: &DMatrix<f64>, w: f64) -> DMatrix<f64> {
    let r = if d.nrows() == 1 {
        b * d[(0, 0)].max(0.0).sqrt()
    } else {
        let eig = d.clone().symmetric_eigen();
        let mut lt = eig.eigenvectors.transpose();
        for (i, lam) in eig.eigenvalues.iter().enumerate() {
            let f = lam.max(0.0).sqrt();
            lt.row_mut(i).scale_mut(f);
        }
        lt * b
    };
    r * w.sqrt()
}

/// Element stiffness of element `e` restricted to `terms`, as a
/// double-double pair `(hi, lo)`.
///
/// Each quadrature contribution is formed as `RᵀR` from its square-root
/// factor with exact products, so the near-null modes of the stiff shear and
/// stretch terms survive rounding.
pub fn element_stiffness_dd(
    model: &BeamModel,
    disc: &Discretization,
    e: usize,
    terms: Terms,
) -> Result<(DMatrix<f64>, DMatrix<f64>), AssemblyError> {
    let f = disc.formulation;
    let dofs = DofMap::new(f, &disc.mesh);
    let n = dofs.local_len();
    let element = disc.mesh.element(e);
    let mut roots: Vec<DMatrix<f64>> = Vec::new();
    for term in [TermClass::Stretch, TermClass::Shear, TermClass::Bend, TermClass::Twist] {
        if !terms.includes(term) || (term == TermClass::Shear && f.is_euler_bernoulli()) {
            continue;
        }
        let rule = quadrature(f, disc.policy, term, element);
        for &(s, w) in &rule.points {
            let frame = model.curve.frame(s)?;
            let mid = local_shapes(f.midline_space(), &disc.mesh, e, s);
            let ang = local_shapes(f.angle_space(), &disc.mesh, e, s);
            let (b, d) = term_operator(term, f, model, &frame, &mid, &ang)?;
            roots.push(weighted_root(&b, &d, w));
        }
    }
    let mut hi = DMatrix::zeros(n, n);
    let mut lo = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Dd::default();
            for r in &roots {
                for row in 0..r.nrows() {
                    let (a, b) = (r[(row, i)], r[(row, j)]);
                    if a != 0.0 && b != 0.0 {
                        acc.add_prod(a, b);
                    }
                }
            }
            let acc = acc.normalized();
            hi[(i, j)] = acc.hi;
            hi[(j, i)] = acc.hi;
            lo[(i, j)] = acc.lo;
            lo[(j, i)] = acc.lo;
        }
    }
    Ok((hi, lo))
}

pub fn element_stiffness(
    model: &BeamModel,
    disc: &Discretization,
    e: usize,
    terms: Terms,
) -> Result<DMatrix<f64>, AssemblyError> {
    Ok(element_stiffness_dd(model, disc, e, terms)?.0)
}

/// Global stiffness restricted to `terms`, as a double-double pair.
pub fn assemble_terms_dd(
    model: &BeamModel,
    disc: &Discretization,
    terms: Terms,
) -> Result<(DMatrix<f64>, DMatrix<f64>), AssemblyError> {
    let dofs = DofMap::new(disc.formulation, &disc.mesh);
    let n = dofs.total();
    let mut hi = DMatrix::zeros(n, n);
    let mut lo = DMatrix::zeros(n, n);
    for e in 0..disc.mesh.elements() {
        let (ke, le) = element_stiffness_dd(model, disc, e, terms)?;
        let map = dofs.element_dofs(e);
        for (i, &gi) in map.iter().enumerate() {
            for (j, &gj) in map.iter().enumerate() {
                let mut acc = Dd::new(hi[(gi, gj)], lo[(gi, gj)]);
                acc.add_dd(Dd { hi: ke[(i, j)], lo: le[(i, j)] });
                let acc = acc.normalized();
                hi[(gi, gj)] = acc.hi;
                lo[(gi, gj)] = acc.lo;
            }
        }
    }
    Ok((hi, lo))
}

pub fn assemble_terms(model: &BeamModel, disc: &Discretization, terms: Terms) -> Result<DMatrix<f64>, AssemblyError> {
    Ok(assemble_terms_dd(model, disc, terms)?.0)
}

pub fn assemble_stiffness(model: &BeamModel, disc: &Discretization) -> Result<DMatrix<f64>, AssemblyError> {
    assemble_terms(model, disc, Terms::ALL)
}

fn project_normal(v: Vec3, t: &Vec3, what: &str) -> Vec3 {
    let along = v.dot(t);
    if along.abs() > 1e-12 * v.norm().max(f64::MIN_POSITIVE) {
        log::warn!("{what} has a tangential component {along:e}; it is projected onto the normal plane");
    }
    v - t * along
}

/// Body-force and end-load vector.
pub fn assemble_load(model: &BeamModel, disc: &Discretization) -> Result<DVector<f64>, AssemblyError> {
    let f = disc.formulation;
    let mesh = &disc.mesh;
    let dofs = DofMap::new(f, mesh);
    let mut rhs = DVector::zeros(dofs.total());
    let area = model.section.area;
    let midspace = f.midline_space();
    if !model.loads.body.is_zero() {
        for e in 0..mesh.elements() {
            let rule = quadrature(f, QuadPolicy::Full, TermClass::Bend, mesh.element(e));
            let md = midspace.element_dofs(e);
            for &(s, w) in &rule.points {
                let force = model.loads.body.at(s) * area;
                let sh = local_shapes(midspace, mesh, e, s);
                for a in 0..sh.len {
                    for c in 0..3 {
                        rhs[dofs.midline(md[a], c)] += w * force[c] * sh.value[a];
                    }
                }
            }
        }
    }
    let ends = [
        (0usize, 0.0, -1.0, &model.bcs.start, &model.loads.start),
        (mesh.elements(), mesh.length(), 1.0, &model.bcs.end, &model.loads.end),
    ];
    for (v, s, sign, bc, point) in ends {
        let t = model.curve.frame(s)?.t;
        let j = midspace.vertex_value_dof(v);
        let k = f.angle_space().vertex_value_dof(v);
        let add_u = |rhs: &mut DVector<f64>, x: Vec3| {
            for c in 0..3 {
                rhs[dofs.midline(j, c)] += x[c];
            }
        };
        if let Row::Natural(n) = bc.stretch {
            add_u(&mut rhs, t * (sign * n));
        }
        if let Row::Natural(sv) = bc.shear {
            add_u(&mut rhs, project_normal(sv, &t, "natural shear force") * sign);
        }
        add_u(&mut rhs, point.force);
        let bend_nat = match bc.bend {
            Row::Natural(m) => project_normal(m, &t, "natural bending moment") * sign,
            Row::Essential(_) => Vec3::zeros(),
        };
        let twist_nat = match bc.twist {
            Row::Natural(tt) => sign * tt,
            Row::Essential(_) => 0.0,
        };
        if f.is_euler_bernoulli() {
            let js = midspace.vertex_slope_dof(v).expect("Hermite midline");
            let slope = bend_nat.cross(&t) + point.moment.cross(&t);
            for c in 0..3 {
                rhs[dofs.midline(js, c)] += slope[c];
            }
            rhs[dofs.angle(k, 0)] += twist_nat + point.moment.dot(&t);
        } else {
            let m = bend_nat + t * twist_nat + point.moment;
            for c in 0..3 {
                rhs[dofs.angle(k, c)] += m[c];
            }
        }
    }
    Ok(rhs)
}

/// Multiplier rows for the essential rows of one end condition.
pub fn end_constraints(
    formulation: Formulation,
    dofs: &DofMap,
    vertex: usize,
    t: &Vec3,
    bc: &EndCondition,
    tag: &str,
) -> Vec<Constraint> {
    let mid = formulation.midline_space();
    let ang = formulation.angle_space();
    let j = mid.vertex_value_dof(vertex);
    let k = ang.vertex_value_dof(vertex);
    let (n1, n2) = normal_pair(t);
    let on_u = |d: &Vec3| (0..3).map(|c| (dofs.midline(j, c), d[c])).collect::<Vec<_>>();
    let mut out = Vec::new();
    if let Row::Essential(ut) = bc.stretch {
        out.push(Constraint {
            coeffs: on_u(t),
            value: ut,
            label: format!("{tag}.stretch"),
        });
    }
    if let Row::Essential(u) = bc.shear {
        for (i, n) in [n1, n2].iter().enumerate() {
            out.push(Constraint {
                coeffs: on_u(n),
                value: n.dot(&u),
                label: format!("{tag}.shear{}", i + 1),
            });
        }
    }
    if let Row::Essential(th) = bc.bend {
        for (i, n) in [n1, n2].iter().enumerate() {
            let coeffs = if formulation.is_euler_bernoulli() {
                let js = mid.vertex_slope_dof(vertex).expect("Hermite midline");
                let d = n.cross(t);
                (0..3).map(|c| (dofs.midline(js, c), d[c])).collect()
            } else {
                (0..3).map(|c| (dofs.angle(k, c), n[c])).collect()
            };
            out.push(Constraint {
                coeffs,
                value: n.dot(&th),
                label: format!("{tag}.bend{}", i + 1),
            });
        }
    }
    if let Row::Essential(tt) = bc.twist {
        let coeffs = if formulation.is_euler_bernoulli() {
            vec![(dofs.angle(k, 0), 1.0)]
        } else {
            (0..3).map(|c| (dofs.angle(k, c), t[c])).collect()
        };
        out.push(Constraint {
            coeffs,
            value: tt,
            label: format!("{tag}.twist"),
        });
    }
    out
}

pub fn apply_essential_bcs(system: &mut LinearSystem, model: &BeamModel) -> Result<(), AssemblyError> {
    let n = system.mesh.elements();
    let ends = [
        (0usize, 0.0, &model.bcs.start, "start"),
        (n, system.mesh.length(), &model.bcs.end, "end"),
    ];
    for (v, s, bc, tag) in ends {
        let t = model.curve.frame(s)?.t;
        for c in end_constraints(system.formulation, &system.dofs, v, &t, bc, tag) {
            system.add_constraint(c)?;
        }
    }
    Ok(())
}

/// Relative energy below which a hourglass direction counts as null.
const HOURGLASS_NULL_RATIO: f64 = 1e-10;

/// Global pattern of the Hermite hourglass mode: unit slope at every vertex
/// in direction `c`, zero values. Within each element `u' = c P₂`, which the
/// two-point rule cannot see in the stretch and shear terms.
fn hourglass_slope_dofs(dofs: &DofMap, mesh: &Mesh1D, c: usize) -> Vec<usize> {
    (0..=mesh.elements())
        .map(|v| dofs.midline(ScalarSpace::H3.vertex_slope_dof(v).expect("Hermite midline"), c))
        .collect()
}

/// `Eᵃᵇ = mₐᵀ K m_b` for the three coordinate hourglass patterns, from the
/// double-double stiffness.
fn hourglass_gram(k: &DMatrix<f64>, k_lo: &DMatrix<f64>, modes: &[Vec<usize>; 3]) -> Mat3 {
    Mat3::from_fn(|a, b| {
        let mut acc = Dd::default();
        for &i in &modes[a] {
            for &j in &modes[b] {
                acc.add_dd(Dd { hi: k[(i, j)], lo: k_lo[(i, j)] });
            }
        }
        acc.value()
    })
}

/// Same Gram matrix with the stretch and shear terms integrated fully,
/// evaluated element by element.
fn hourglass_gram_full(model: &BeamModel, disc: &Discretization, modes: &[Vec<usize>; 3]) -> Result<Mat3, AssemblyError> {
    let full = Discretization {
        policy: QuadPolicy::Full,
        ..disc.clone()
    };
    let dofs = DofMap::new(disc.formulation, &disc.mesh);
    let mut gram = Mat3::zeros();
    for e in 0..disc.mesh.elements() {
        let ke = element_stiffness(model, &full, e, Terms::ALL)?;
        let map = dofs.element_dofs(e);
        let local: Vec<Vec<(usize, usize)>> = modes
            .iter()
            .map(|m| map.iter().enumerate().filter(|(_, g)| m.contains(g)).map(|(l, g)| (l, *g)).collect())
            .collect();
        for a in 0..3 {
            for b in 0..3 {
                for &(i, _) in &local[a] {
                    for &(j, _) in &local[b] {
                        gram[(a, b)] += ke[(i, j)];
                    }
                }
            }
        }
    }
    Ok(gram)
}

/// Gauge rows for reduced-integration hourglass modes of Hermite midlines.
///
/// With the two-point rule the pattern `u' = c P₂` on every element (zero
/// nodal values) carries no stretch or shear energy. For the Timoshenko
/// form this holds for every `c`; for Euler–Bernoulli only where the bending
/// and twist measures also vanish, i.e. `c` along a straight axis. Each null
/// direction gets one row `Σ_v c·u'(s_v) = 0`. The mode has zero nodal
/// values and vanishes at the reduced points, so the gauge changes neither
/// nodal displacements nor resultants sampled there.
pub fn hourglass_gauges(model: &BeamModel, disc: &Discretization, system: &LinearSystem) -> Result<Vec<Constraint>, AssemblyError> {
    if disc.policy != QuadPolicy::Reduced || disc.formulation.midline_space() != ScalarSpace::H3 {
        return Ok(Vec::new());
    }
    let modes = [0, 1, 2].map(|c| hourglass_slope_dofs(&system.dofs, &disc.mesh, c));
    let reduced = hourglass_gram(&system.k, &system.k_lo, &modes);
    let full = hourglass_gram_full(model, disc, &modes)?;
    let Some(chol) = full.cholesky() else {
        return Ok(Vec::new());
    };
    let l_inv = chol.l().try_inverse().expect("Cholesky factor is invertible");
    let c = l_inv * reduced * l_inv.transpose();
    let eig = (0.5 * (c + c.transpose())).symmetric_eigen();
    let scale = (modes[0].len() as f64).sqrt();
    let mut out = Vec::new();
    for (i, lam) in eig.eigenvalues.iter().enumerate() {
        if *lam > HOURGLASS_NULL_RATIO {
            continue;
        }
        let mut d: Vec3 = l_inv.transpose() * eig.eigenvectors.column(i);
        d /= d.norm();
        let mode: f64 = (0..3).map(|c| d[c] * modes[c].iter().map(|&g| system.rhs[g]).sum::<f64>()).sum();
        if mode.abs() > 1e-12 * system.rhs.norm() {
            log::warn!("the load excites a reduced-integration hourglass mode (work {mode:e}); use the full rule");
        }
        let coeffs = (0..3)
            .flat_map(|c| modes[c].iter().map(move |&g| (g, d[c] / scale)))
            .filter(|(_, v)| *v != 0.0)
            .collect();
        out.push(Constraint {
            coeffs,
            value: 0.0,
            label: format!("hourglass{}", out.len() + 1),
        });
    }
    Ok(out)
}

/// Stiffness, load and essential conditions in one pass.
pub fn assemble(model: &BeamModel, disc: &Discretization) -> Result<LinearSystem, AssemblyError> {
    let (k, k_lo) = assemble_terms_dd(model, disc, Terms::ALL)?;
    let mut system = LinearSystem {
        k,
        k_lo,
        rhs: assemble_load(model, disc)?,
        constraints: Vec::new(),
        dofs: DofMap::new(disc.formulation, &disc.mesh),
        mesh: disc.mesh.clone(),
        formulation: disc.formulation,
        policy: disc.policy,
    };
    apply_essential_bcs(&mut system, model)?;
    for c in hourglass_gauges(model, disc, &system)? {
        system.add_constraint(c)?;
    }
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Curve, ParamCurve};
    use crate::model::{BoundaryConditions, LoadCase};
    use crate::section::{section_from_shape, Material, SectionShape};

    fn straight(elements: usize, f: Formulation) -> (BeamModel, Discretization) {
        let curve = Curve::new(ParamCurve::Line {
            start: Vec3::zeros(),
            end: Vec3::new(2.0, 0.0, 0.0),
        })
        .unwrap();
        let model = BeamModel {
            curve,
            material: Material::from_e_nu(100.0, 0.25).unwrap(),
            section: section_from_shape(SectionShape::UnitDepthRect { t: 0.2 }, None).unwrap(),
            bcs: BoundaryConditions::cantilever(),
            loads: LoadCase::default(),
        };
        let disc = Discretization::uniform(&model, elements, f, QuadPolicy::Full).unwrap();
        (model, disc)
    }

    fn arc_model() -> BeamModel {
        let curve = Curve::new(ParamCurve::Arc {
            center: Vec3::zeros(),
            radius: 2.0,
            basis: [Vec3::x(), Vec3::y()],
            angle: [0.0, 1.0],
        })
        .unwrap();
        BeamModel {
            curve,
            material: Material::from_e_nu(100.0, 0.25).unwrap(),
            section: section_from_shape(SectionShape::Circle { d: 0.1 }, None).unwrap(),
            bcs: BoundaryConditions::cantilever(),
            loads: LoadCase::default(),
        }
    }

    #[test]
    fn quadratic_bar_stiffness() {
        let (model, disc) = straight(1, Formulation::TimoshenkoP2p1);
        let k = assemble_terms(&model, &disc, Terms::only(TermClass::Stretch)).unwrap();
        let ea_h = model.material.e * model.section.area / 2.0;
        let classic = [[7.0, -8.0, 1.0], [-8.0, 16.0, -8.0], [1.0, -8.0, 7.0]];
        for i in 0..3 {
            for j in 0..3 {
                let expected = ea_h * classic[i][j] / 3.0;
                assert!((k[(3 * i, 3 * j)] - expected).abs() < 1e-10 * ea_h, "{i} {j}");
                assert_eq!(k[(3 * i + 1, 3 * j + 1)], 0.0);
            }
        }
    }

    #[test]
    fn stiffness_is_symmetric_on_a_curve() {
        let model = arc_model();
        for f in Formulation::ALL {
            let disc = Discretization::uniform(&model, 3, f, QuadPolicy::Reduced).unwrap();
            let k = assemble_stiffness(&model, &disc).unwrap();
            assert!((&k - k.transpose()).norm() <= 1e-12 * k.norm(), "{f}");
        }
    }

    #[test]
    fn rigid_rotation_measures_vanish() {
        let model = arc_model();
        let omega = Vec3::new(0.3, -0.7, 0.2);
        for s in [0.0, 0.5, 1.3, 2.0] {
            let frame = model.curve.frame(s).unwrap();
            let jet = FieldJet {
                u: omega.cross(&frame.x),
                du: omega.cross(&frame.t),
                theta: omega,
                ..FieldJet::default()
            };
            let m = kinematic_measures(&frame, &jet);
            for v in [m.axial, m.shear, m.bending, m.twist] {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn tangential_field_on_arc_has_curvature_strain() {
        let model = arc_model();
        let frame = model.curve.frame(0.7).unwrap();
        // u = t gives u' = κ.
        let jet = FieldJet {
            u: frame.t,
            du: frame.kappa,
            ..FieldJet::default()
        };
        let m = kinematic_measures(&frame, &jet);
        assert!((m.transverse - frame.kappa).norm() < 1e-14);
        assert!((m.transverse.norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pure_twist_measures() {
        let (model, _) = straight(1, Formulation::TimoshenkoP2p1);
        let frame = model.curve.frame(1.0).unwrap();
        let jet = FieldJet {
            theta: frame.t * 0.4,
            ..FieldJet::default()
        };
        let m = kinematic_measures(&frame, &jet);
        assert!(m.shear.norm() < 1e-15 && m.twist.norm() == 0.0);
    }

    #[test]
    fn zero_loads_give_zero_rhs() {
        let (model, disc) = straight(3, Formulation::TimoshenkoH3p2);
        assert_eq!(assemble_load(&model, &disc).unwrap().norm(), 0.0);
    }

    #[test]
    fn tip_load_lands_on_end_midline_dofs() {
        let (model, disc) = straight(2, Formulation::TimoshenkoP2p1);
        let p = Vec3::new(0.5, -1.0, 2.0);
        let model = model.with_loads(LoadCase::tip_force(p));
        let rhs = assemble_load(&model, &disc).unwrap();
        let dofs = DofMap::new(disc.formulation, &disc.mesh);
        let j = ScalarSpace::P2.vertex_value_dof(2);
        for c in 0..3 {
            assert_eq!(rhs[dofs.midline(j, c)], p[c]);
        }
        assert_eq!(rhs.iter().filter(|v| **v != 0.0).count(), 3);
    }

    #[test]
    fn consistent_body_load_on_quadratic_bar() {
        let (mut model, disc) = straight(1, Formulation::TimoshenkoP2p1);
        let f = Vec3::new(1.0, 2.0, -3.0);
        model.loads.body = crate::model::BodyForce::Uniform(f);
        let rhs = assemble_load(&model, &disc).unwrap();
        let scale = 2.0 * model.section.area;
        for (a, wgt) in [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0].iter().enumerate() {
            for c in 0..3 {
                assert!((rhs[3 * a + c] - scale * wgt * f[c]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constraint_counts() {
        for (bc, rows) in [
            (EndCondition::clamped(), 6),
            (EndCondition::pinned(), 3),
            (EndCondition::free(), 0),
        ] {
            for f in Formulation::ALL {
                let (mut model, disc) = straight(2, f);
                model.bcs = BoundaryConditions {
                    start: bc,
                    end: EndCondition::free(),
                };
                let sys = assemble(&model, &disc).unwrap();
                assert_eq!(sys.constraints.len(), rows, "{f}");
            }
        }
    }

    #[test]
    fn hourglass_gauges_only_where_null() {
        let count = |model: &BeamModel, f| {
            let disc = Discretization::uniform(model, 4, f, QuadPolicy::Reduced).unwrap();
            let sys = assemble(model, &disc).unwrap();
            sys.constraints.iter().filter(|c| c.label.starts_with("hourglass")).count()
        };
        let (line, _) = straight(1, Formulation::TimoshenkoP2p1);
        let arc = arc_model();
        assert_eq!(count(&line, Formulation::TimoshenkoP2p1), 0);
        assert_eq!(count(&line, Formulation::TimoshenkoH3p2), 3);
        assert_eq!(count(&arc, Formulation::TimoshenkoH3p2), 3);
        assert_eq!(count(&line, Formulation::EulerBernoulliH3), 1);
        assert_eq!(count(&arc, Formulation::EulerBernoulliH3), 0);
    }

    #[test]
    fn conflicting_constraint_is_rejected() {
        let (model, disc) = straight(1, Formulation::TimoshenkoP2p1);
        let mut sys = assemble(&model, &disc).unwrap();
        let mut dup = sys.constraints[0].clone();
        sys.add_constraint(dup.clone()).unwrap();
        assert_eq!(sys.constraints.len(), 6);
        dup.value = 1.0;
        assert!(matches!(sys.add_constraint(dup), Err(AssemblyError::ConstraintConflict { .. })));
    }
}
