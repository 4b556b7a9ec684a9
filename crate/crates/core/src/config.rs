//! JSON model and study files.
//!
//! Unknown keys are rejected and every error names the offending key path,
//! e.g. `bcs.start.stretch: unknown variant ...`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmarks::{Benchmark, Demo, StudySpec, DEFAULT_LOAD};
use crate::discretization::{Formulation, Mesh1D, QuadPolicy};
use crate::geometry::{Curve, ParamCurve};
use crate::model::{BeamModel, BodyForce, BoundaryConditions, Discretization, EndCondition, LoadCase, PointLoad, Row};
use crate::section::{section_from_shape, Inertia, Material, SectionShape};
use crate::Vec3;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn schema(path: &str, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Schema {
        path: path.to_string(),
        message: message.to_string(),
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        schema(&path, e.into_inner())
    })
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `{"E": .., "nu": ..}` or `{"E": .., "G": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialFile {
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
}

impl MaterialFile {
    pub fn to_material(&self, path: &str) -> Result<Material, ConfigError> {
        match (self.nu, self.g) {
            (Some(nu), None) => Material::from_e_nu(self.e, nu),
            (None, Some(g)) => Material::from_e_g(self.e, g),
            _ => return Err(schema(path, "give exactly one of `nu` and `G`")),
        }
        .map_err(|e| schema(path, e))
    }

    pub fn from_material(m: &Material) -> Self {
        match m.nu {
            Some(nu) => Self { e: m.e, nu: Some(nu), g: None },
            None => Self { e: m.e, nu: None, g: Some(m.g) },
        }
    }
}

/// Section shape plus an optional reference director.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionFile {
    #[serde(flatten)]
    pub shape: SectionShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub director: Option<Vec3>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndPreset {
    Clamped,
    Pinned,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RowFile<T> {
    Natural(T),
    Essential(T),
}

impl<T> From<RowFile<T>> for Row<T> {
    fn from(r: RowFile<T>) -> Self {
        match r {
            RowFile::Natural(v) => Row::Natural(v),
            RowFile::Essential(v) => Row::Essential(v),
        }
    }
}

impl<T> From<Row<T>> for RowFile<T> {
    fn from(r: Row<T>) -> Self {
        match r {
            Row::Natural(v) => RowFile::Natural(v),
            Row::Essential(v) => RowFile::Essential(v),
        }
    }
}

/// A preset with optional per-row overrides, e.g.
/// `{"type": "free", "bend": {"natural": [0, 0, 1]}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndFile {
    #[serde(rename = "type")]
    pub preset: EndPreset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stretch: Option<RowFile<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shear: Option<RowFile<Vec3>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bend: Option<RowFile<Vec3>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<RowFile<f64>>,
}

impl EndFile {
    pub fn to_condition(&self) -> EndCondition {
        let base = match self.preset {
            EndPreset::Clamped => EndCondition::clamped(),
            EndPreset::Pinned => EndCondition::pinned(),
            EndPreset::Free => EndCondition::free(),
        };
        EndCondition {
            stretch: self.stretch.map_or(base.stretch, Row::from),
            shear: self.shear.map_or(base.shear, Row::from),
            bend: self.bend.map_or(base.bend, Row::from),
            twist: self.twist.map_or(base.twist, Row::from),
        }
    }

    /// Smallest description of `c`: the closest preset plus the rows that
    /// differ from it.
    pub fn from_condition(c: &EndCondition) -> Self {
        let presets = [
            (EndPreset::Clamped, EndCondition::clamped()),
            (EndPreset::Pinned, EndCondition::pinned()),
            (EndPreset::Free, EndCondition::free()),
        ];
        let diff = |b: &EndCondition| {
            usize::from(b.stretch != c.stretch) + usize::from(b.shear != c.shear) + usize::from(b.bend != c.bend) + usize::from(b.twist != c.twist)
        };
        let (preset, base) = presets.iter().min_by_key(|(_, b)| diff(b)).expect("non-empty");
        Self {
            preset: *preset,
            stretch: (base.stretch != c.stretch).then(|| c.stretch.into()),
            shear: (base.shear != c.shear).then(|| c.shear.into()),
            bend: (base.bend != c.bend).then(|| c.bend.into()),
            twist: (base.twist != c.twist).then(|| c.twist.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcsFile {
    pub start: EndFile,
    pub end: EndFile,
}

/// Uniform `[fx, fy, fz]` or a table of `[s, fx, fy, fz]` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BodyFile {
    Uniform(Vec3),
    Table(Vec<[f64; 4]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointLoadFile {
    #[serde(default = "Vec3::zeros")]
    pub force: Vec3,
    #[serde(default = "Vec3::zeros")]
    pub moment: Vec3,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodyFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<PointLoadFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<PointLoadFile>,
}

/// A single beam problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub curve: ParamCurve,
    pub material: MaterialFile,
    pub section: SectionFile,
    pub formulation: Formulation,
    pub elements: usize,
    #[serde(default)]
    pub quadrature: QuadPolicy,
    pub bcs: BcsFile,
    #[serde(default)]
    pub loads: LoadsFile,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        parse(text)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&read(path)?)
    }

    pub fn to_problem(&self) -> Result<(BeamModel, Discretization), ConfigError> {
        let curve = Curve::new(self.curve.clone()).map_err(|e| schema("curve", e))?;
        let material = self.material.to_material("material")?;
        let section = section_from_shape(self.section.shape, self.section.director).map_err(|e| schema("section", e))?;
        let body = match &self.loads.body {
            None => BodyForce::default(),
            Some(BodyFile::Uniform(f)) => BodyForce::Uniform(*f),
            Some(BodyFile::Table(rows)) => {
                if rows.windows(2).any(|w| w[1][0] < w[0][0]) {
                    return Err(schema("loads.body", "table arc lengths must be non-decreasing"));
                }
                BodyForce::Table(rows.iter().map(|r| (r[0], Vec3::new(r[1], r[2], r[3]))).collect())
            }
        };
        let point = |p: Option<PointLoadFile>| {
            let p = p.unwrap_or_default();
            PointLoad {
                force: p.force,
                moment: p.moment,
            }
        };
        let model = BeamModel {
            curve,
            material,
            section,
            bcs: BoundaryConditions {
                start: self.bcs.start.to_condition(),
                end: self.bcs.end.to_condition(),
            },
            loads: LoadCase {
                body,
                start: point(self.loads.start),
                end: point(self.loads.end),
            },
        };
        let mesh = Mesh1D::uniform(model.curve.length(), self.elements).map_err(|e| schema("elements", e))?;
        let disc = Discretization {
            mesh,
            formulation: self.formulation,
            policy: self.quadrature,
        };
        Ok((model, disc))
    }

    /// File form of a model; the section must have come from a shape.
    pub fn from_problem(model: &BeamModel, shape: SectionShape, elements: usize, formulation: Formulation, quadrature: QuadPolicy) -> Self {
        let director = match model.section.inertia {
            Inertia::Oriented { director, .. } => Some(director),
            Inertia::Isotropic { .. } => None,
        };
        let body = match &model.loads.body {
            b if b.is_zero() => None,
            BodyForce::Uniform(f) => Some(BodyFile::Uniform(*f)),
            BodyForce::Table(rows) => Some(BodyFile::Table(rows.iter().map(|(s, f)| [*s, f[0], f[1], f[2]]).collect())),
        };
        let point = |p: &PointLoad| {
            (p.force != Vec3::zeros() || p.moment != Vec3::zeros()).then_some(PointLoadFile {
                force: p.force,
                moment: p.moment,
            })
        };
        Self {
            curve: model.curve.param().clone(),
            material: MaterialFile::from_material(&model.material),
            section: SectionFile { shape, director },
            formulation,
            elements,
            quadrature,
            bcs: BcsFile {
                start: EndFile::from_condition(&model.bcs.start),
                end: EndFile::from_condition(&model.bcs.end),
            },
            loads: LoadsFile {
                body,
                start: point(&model.loads.start),
                end: point(&model.loads.end),
            },
        }
    }

    pub fn from_demo(demo: &Demo) -> Self {
        Self::from_problem(&demo.model, demo.shape, demo.elements, demo.formulation, demo.policy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    #[default]
    Convergence,
    Locking,
}

/// A benchmark study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyFile {
    pub benchmark: Benchmark,
    #[serde(default)]
    pub study: StudyKind,
    pub formulations: Vec<Formulation>,
    pub quadrature: Vec<QuadPolicy>,
    pub elements: Vec<usize>,
    pub thickness: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<MaterialFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load: Option<f64>,
}

impl StudyFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        parse(text)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&read(path)?)
    }

    pub fn to_spec(&self) -> Result<StudySpec, ConfigError> {
        let material = match &self.material {
            Some(m) => m.to_material("material")?,
            None => crate::benchmarks::default_material(),
        };
        let spec = StudySpec {
            benchmark: self.benchmark,
            formulations: self.formulations.clone(),
            policies: self.quadrature.clone(),
            elements: self.elements.clone(),
            thickness: self.thickness.clone(),
            material,
            load: self.load.unwrap_or(DEFAULT_LOAD),
        };
        spec.validate().map_err(|e| {
            let msg = e.to_string();
            let key = ["element", "formulation", "quadrature", "thickness", "load"]
                .into_iter()
                .find(|k| msg.contains(k))
                .map_or(".", |k| match k {
                    "element" => "elements",
                    "formulation" => "formulations",
                    other => other,
                });
            schema(key, msg)
        })?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANTILEVER: &str = r#"{
        "curve": {"kind": "line", "start": [0, 0, 0], "end": [10, 0, 0]},
        "material": {"E": 1e6, "nu": 0.3},
        "section": {"shape": "unit_depth_rect", "t": 0.1},
        "formulation": "timoshenko_h3p2",
        "elements": 4,
        "quadrature": "full",
        "bcs": {"start": {"type": "clamped"}, "end": {"type": "free"}},
        "loads": {"end": {"force": [0, -1, 0]}}
    }"#;

    #[test]
    fn parses_cantilever() {
        let file = ModelFile::parse(CANTILEVER).unwrap();
        let (model, disc) = file.to_problem().unwrap();
        assert_eq!(disc.mesh.elements(), 4);
        assert_eq!(model.bcs, BoundaryConditions::cantilever());
        assert_eq!(model.loads.end.force, Vec3::new(0.0, -1.0, 0.0));
        assert!((model.curve.length() - 10.0).abs() < 1e-14);
    }

    #[test]
    fn missing_key_is_named() {
        let text = CANTILEVER.replace(r#""bcs": {"start": {"type": "clamped"}, "end": {"type": "free"}},"#, "");
        let err = ModelFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("bcs"), "{err}");
    }

    #[test]
    fn unknown_key_reports_path() {
        let text = CANTILEVER.replace(r#"{"type": "clamped"}"#, r#"{"type": "clamped", "stiff": 1}"#);
        let err = ModelFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("bcs.start") && err.contains("stiff"), "{err}");
        let text = CANTILEVER.replace(r#""nu": 0.3"#, r#""nu": 0.3, "rho": 1"#);
        let err = ModelFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("material") && err.contains("rho"), "{err}");
        let text = CANTILEVER.replace(r#""t": 0.1"#, r#""t": 0.1, "h": 2"#);
        let err = ModelFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("section") && err.contains('h'), "{err}");
    }

    #[test]
    fn material_needs_exactly_one_shear_constant() {
        let text = CANTILEVER.replace(r#""nu": 0.3"#, r#""nu": 0.3, "G": 4e5"#);
        let err = ModelFile::parse(&text).unwrap().to_problem().unwrap_err().to_string();
        assert!(err.starts_with("material"), "{err}");
    }

    #[test]
    fn row_overrides_apply() {
        let text = CANTILEVER.replace(r#"{"type": "free"}"#, r#"{"type": "free", "twist": {"natural": 2.5}, "shear": {"essential": [0, 0, 0]}}"#);
        let (model, _) = ModelFile::parse(&text).unwrap().to_problem().unwrap();
        assert_eq!(model.bcs.end.twist, Row::Natural(2.5));
        assert!(model.bcs.end.shear.is_essential());
        assert!(!model.bcs.end.stretch.is_essential());
    }

    #[test]
    fn body_force_forms() {
        let uniform = CANTILEVER.replace(r#""loads": {"#, r#""loads": {"body": [0, -2, 0], "#);
        let (m, _) = ModelFile::parse(&uniform).unwrap().to_problem().unwrap();
        assert_eq!(m.loads.body.at(3.0), Vec3::new(0.0, -2.0, 0.0));
        let table = CANTILEVER.replace(r#""loads": {"#, r#""loads": {"body": [[0, 0, 0, 0], [10, 0, -4, 0]], "#);
        let (m, _) = ModelFile::parse(&table).unwrap().to_problem().unwrap();
        assert!((m.loads.body.at(5.0) - Vec3::new(0.0, -2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn model_round_trips_through_json() {
        let file = ModelFile::parse(CANTILEVER).unwrap();
        let (model, disc) = file.to_problem().unwrap();
        let back = ModelFile::from_problem(&model, file.section.shape, 4, disc.formulation, disc.policy);
        let text = serde_json::to_string_pretty(&back).unwrap();
        assert_eq!(ModelFile::parse(&text).unwrap(), file);
    }

    #[test]
    fn study_validation() {
        let ok = r#"{"benchmark": "quarter_arc", "formulations": ["timoshenko_p2p1"], "quadrature": ["reduced"],
                     "elements": [1, 2, 4], "thickness": [0.1]}"#;
        let spec = StudyFile::parse(ok).unwrap().to_spec().unwrap();
        assert_eq!(spec.benchmark, Benchmark::QuarterArc);
        let empty = ok.replace("[1, 2, 4]", "[]");
        let err = StudyFile::parse(&empty).unwrap().to_spec().unwrap_err().to_string();
        assert!(err.starts_with("elements"), "{err}");
        let bad = ok.replace("\"reduced\"", "\"lumped\"");
        let err = StudyFile::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("quadrature"), "{err}");
    }
}
