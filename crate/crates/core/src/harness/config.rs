//! JSON study configuration.
//!
//! ```json
//! {
//!   "name": "smooth2d",
//!   "dimension": 2,
//!   "problem": { "name": "smooth" },
//!   "study": { "degree": 2, "levels": 5, "scheme": "sip" },
//!   "alpha": [1.0, 1.0],
//!   "patches": [
//!     { "box": { "lo": [-0.5, -0.5], "hi": [0.0, 0.5] }, "elements": [2, 2] },
//!     { "spline": { "degree": 1, "knots": [[0,0,1,1],[0,0,1,1]],
//!                   "control_points": [[0,-0.5],[0.5,-0.5],[0,0.5],[0.5,0.5]] } }
//!   ],
//!   "interfaces": [
//!     { "left": { "patch": 0, "axis": 0, "side": "high" },
//!       "right": { "patch": 1, "axis": 0, "side": "low" },
//!       "permutation": [0], "flip": [false] }
//!   ]
//! }
//! ```
//!
//! Control points are listed with parametric axis 0 running fastest. Faces not
//! named by an interface carry Dirichlet data.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::problems::ProblemKind;
use crate::assembly::{DgConfig, Scheme};
use crate::geometry::{FaceSelector, GeometryPatch, InterfaceFace, MultiPatchDomain, Orientation, Side};
use crate::spline::{KnotVector, TensorSplineSpace};
use crate::{Error, Result};

/// Elements per axis of the base (level 0) mesh when a patch does not say.
pub const DEFAULT_BASE_ELEMENTS: usize = 2;

/// Samples per face axis for the interface coincidence check.
pub const INTERFACE_SAMPLES: usize = 7;
/// Samples per axis for the overlap spot check.
pub const OVERLAP_SAMPLES: usize = 5;
/// Samples per axis and `max/min` bound for the Jacobian check.
pub const JACOBIAN_SAMPLES: usize = 10;
pub const JACOBIAN_BOUND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Parameters of one refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub problem: ProblemKind,
    pub degree: usize,
    /// Number of levels `S`; level `s` halves the base mesh `s` times.
    pub levels: usize,
    pub scheme: Scheme,
    pub mu: Option<f64>,
    pub quadrature_order: Option<usize>,
    /// Krylov iteration cap; ten times the unknowns when absent.
    pub max_iterations: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::Config("degree must be at least 1".into()));
        }
        if self.levels < 2 {
            return Err(Error::Config("at least two levels are needed for a rate".into()));
        }
        if let Some(mu) = self.mu {
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(Error::Config(format!("penalty mu = {mu} must be positive")));
            }
        }
        if self.quadrature_order == Some(0) {
            return Err(Error::Config("quadrature order must be positive".into()));
        }
        Ok(())
    }

    pub fn dg_config(&self, dim: usize) -> Result<DgConfig> {
        let mut cfg = match self.mu {
            Some(mu) => DgConfig::new(self.scheme, mu)?,
            None => DgConfig::with_default_mu(self.scheme, self.degree, dim),
        };
        cfg.quadrature_order = self.quadrature_order;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StudySection {
    #[serde(default = "default_degree")]
    degree: usize,
    #[serde(default = "default_levels")]
    levels: usize,
    #[serde(default = "default_scheme")]
    scheme: Scheme,
    #[serde(default)]
    mu: Option<f64>,
    #[serde(default)]
    quadrature_order: Option<usize>,
    #[serde(default)]
    max_iterations: Option<usize>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default = "default_format")]
    format: OutputFormat,
}

fn default_degree() -> usize {
    2
}
fn default_levels() -> usize {
    4
}
fn default_scheme() -> Scheme {
    Scheme::Sip
}
fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

impl Default for StudySection {
    fn default() -> Self {
        Self {
            degree: default_degree(),
            levels: default_levels(),
            scheme: default_scheme(),
            mu: None,
            quadrature_order: None,
            max_iterations: None,
            output: None,
            format: default_format(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    /// Axis-aligned box, mapped multilinearly.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// B-spline patch with one knot vector per parametric axis.
    Spline {
        degree: usize,
        knots: Vec<Vec<f64>>,
        control_points: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    #[serde(flatten)]
    pub geometry: GeometrySpec,
    /// Base mesh elements per parametric axis.
    #[serde(default)]
    pub elements: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceSpec {
    pub patch: usize,
    pub axis: usize,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSpec {
    pub left: FaceSpec,
    pub right: FaceSpec,
    /// Identity when omitted.
    #[serde(default)]
    pub permutation: Option<Vec<usize>>,
    #[serde(default)]
    pub flip: Option<Vec<bool>>,
}

/// The configuration file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub name: Option<String>,
    pub dimension: usize,
    pub problem: ProblemKind,
    #[serde(default)]
    study: StudySection,
    pub alpha: Vec<f64>,
    pub patches: Vec<PatchSpec>,
    #[serde(default)]
    pub interfaces: Vec<InterfaceSpec>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn study(&self) -> StudyConfig {
        let s = &self.study;
        StudyConfig {
            problem: self.problem.clone(),
            degree: s.degree,
            levels: s.levels,
            scheme: s.scheme,
            mu: s.mu,
            quadrature_order: s.quadrature_order,
            max_iterations: s.max_iterations,
            output: s.output.clone(),
            format: s.format,
        }
    }

    fn geometry_patch(&self, id: usize, spec: &GeometrySpec) -> Result<GeometryPatch> {
        let d = self.dimension;
        match spec {
            GeometrySpec::Box { lo, hi } => {
                if lo.len() != d || hi.len() != d {
                    return Err(Error::Config(format!("patch {id}: box corners need {d} coordinates")));
                }
                if lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
                    return Err(Error::DegenerateGeometry {
                        patch: id,
                        reason: format!("empty box {lo:?}..{hi:?}"),
                    });
                }
                GeometryPatch::axis_box(id, lo, hi)
            }
            GeometrySpec::Spline {
                degree,
                knots,
                control_points,
            } => {
                if knots.len() != d {
                    return Err(Error::Config(format!("patch {id}: expected {d} knot vectors")));
                }
                let axes = knots
                    .iter()
                    .map(|k| KnotVector::new(*degree, k.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let space = TensorSplineSpace::new(axes)?;
                if control_points.iter().any(|c| c.len() != d) {
                    return Err(Error::Config(format!("patch {id}: control points need {d} coordinates")));
                }
                GeometryPatch::new(id, space, control_points.concat())
            }
        }
    }

    fn interface(&self, spec: &InterfaceSpec) -> Result<InterfaceFace> {
        let face_dim = self.dimension - 1;
        for f in [spec.left, spec.right] {
            if f.patch >= self.patches.len() {
                return Err(Error::Topology(format!("interface names missing patch {}", f.patch)));
            }
            if f.axis >= self.dimension {
                return Err(Error::Topology(format!("face axis {} out of range", f.axis)));
            }
        }
        Ok(InterfaceFace {
            left_patch: spec.left.patch,
            right_patch: spec.right.patch,
            left_face: FaceSelector::new(spec.left.axis, spec.left.side),
            right_face: FaceSelector::new(spec.right.axis, spec.right.side),
            orientation: Orientation {
                permutation: spec.permutation.clone().unwrap_or_else(|| (0..face_dim).collect()),
                flip: spec.flip.clone().unwrap_or_else(|| vec![false; face_dim]),
            },
        })
    }

    /// Builds the level 0 domain with solution spaces of the given degree and
    /// runs every geometric check.
    pub fn domain(&self, degree: usize) -> Result<MultiPatchDomain> {
        let d = self.dimension;
        if !(2..=3).contains(&d) {
            return Err(Error::Config(format!("dimension {d} not in {{2, 3}}")));
        }
        if self.alpha.len() != self.patches.len() {
            return Err(Error::Config(format!(
                "{} alpha values for {} patches",
                self.alpha.len(),
                self.patches.len()
            )));
        }
        if let Some((patch, &value)) = self.alpha.iter().enumerate().find(|(_, &a)| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::NonPositiveAlpha { patch, value });
        }
        let mut patches = Vec::with_capacity(self.patches.len());
        let mut spaces = Vec::with_capacity(self.patches.len());
        for (id, spec) in self.patches.iter().enumerate() {
            patches.push(self.geometry_patch(id, &spec.geometry)?);
            let elements = spec.elements.clone().unwrap_or_else(|| vec![DEFAULT_BASE_ELEMENTS; d]);
            if elements.len() != d || elements.contains(&0) {
                return Err(Error::Config(format!("patch {id}: elements must be {d} positive counts")));
            }
            spaces.push(TensorSplineSpace::uniform(degree, &elements)?);
        }
        let interfaces = self
            .interfaces
            .iter()
            .map(|s| self.interface(s))
            .collect::<Result<Vec<_>>>()?;
        let domain = MultiPatchDomain::new(patches, spaces, interfaces, self.alpha.clone())?;
        domain.check_jacobians(JACOBIAN_SAMPLES, JACOBIAN_BOUND)?;
        domain.verify_interfaces(INTERFACE_SAMPLES)?;
        domain.check_non_overlap(OVERLAP_SAMPLES)?;
        Ok(domain)
    }
}

/// Reads `path` and returns the study parameters with the verified level 0
/// domain.
pub fn load_config(path: &Path) -> Result<(StudyConfig, MultiPatchDomain)> {
    let file = ConfigFile::read(path)?;
    let study = file.study();
    study.validate()?;
    let domain = file.domain(study.degree)?;
    Ok((study, domain))
}
