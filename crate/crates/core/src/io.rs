//! Curve and family files.
//!
//! A curve file is either explicit samples,
//! `{"kind":"samples","closed":true,"points":[[x,y,z],...]}`, or an analytic
//! recipe such as
//! `{"kind":"analytic","name":"torus_knot","p":2,"q":3,"R":2.0,"r":1.0,"N":2048}`.
//! Coordinates are written with the shortest representation that round-trips,
//! so a written curve reads back bit-identical.
//!
//! A family manifest names a parameter grid and either one curve file per node
//! (paths relative to the manifest) or a built-in generator.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curve::{make_circle, make_perturbed_circle, make_torus_knot, ClosedCurve, Provenance, Vec3};
use crate::error::{Error, Result};
use crate::family::{
    flexed_trefoil, CurveFamily, ParamSpace, DEFAULT_CIRCLE_NODES, DEFAULT_ICOSPHERE_LEVEL,
    DEFAULT_INTERVAL_STEPS,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveFile {
    Samples { closed: bool, points: Vec<[f64; 3]> },
    Analytic(AnalyticCurve),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AnalyticCurve {
    Circle {
        radius: f64,
        #[serde(rename = "N")]
        n: usize,
    },
    TorusKnot {
        p: i64,
        q: i64,
        #[serde(rename = "R")]
        major: f64,
        #[serde(rename = "r")]
        minor: f64,
        #[serde(rename = "N")]
        n: usize,
    },
    PerturbedCircle {
        amplitude: f64,
        k: u32,
        height: f64,
        m: u32,
        #[serde(default)]
        phase: f64,
        #[serde(rename = "N")]
        n: usize,
    },
}

impl AnalyticCurve {
    pub fn samples(&self) -> usize {
        match *self {
            AnalyticCurve::Circle { n, .. }
            | AnalyticCurve::TorusKnot { n, .. }
            | AnalyticCurve::PerturbedCircle { n, .. } => n,
        }
    }

    /// The same recipe at a different sample count.
    pub fn with_samples(&self, n_samples: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            AnalyticCurve::Circle { n, .. }
            | AnalyticCurve::TorusKnot { n, .. }
            | AnalyticCurve::PerturbedCircle { n, .. } => *n = n_samples,
        }
        out
    }

    pub fn build(&self) -> Result<ClosedCurve> {
        match *self {
            AnalyticCurve::Circle { radius, n } => make_circle(radius, n),
            AnalyticCurve::TorusKnot { p, q, major, minor, n } => make_torus_knot(p, q, major, minor, n),
            AnalyticCurve::PerturbedCircle { amplitude, k, height, m, phase, n } => {
                make_perturbed_circle(amplitude, k, height, m, phase, n)
            }
        }
    }
}

impl CurveFile {
    pub fn from_curve(curve: &ClosedCurve) -> Self {
        CurveFile::Samples {
            closed: true,
            points: curve.samples().iter().map(|p| [p.x, p.y, p.z]).collect(),
        }
    }

    /// Build the curve; `n_samples` re-samples analytic recipes exactly and
    /// explicit samples by interpolation.
    pub fn to_curve(&self, origin: Option<&Path>, n_samples: Option<usize>) -> Result<ClosedCurve> {
        match self {
            CurveFile::Analytic(spec) => match n_samples {
                Some(n) => spec.with_samples(n).build(),
                None => spec.build(),
            },
            CurveFile::Samples { closed, points } => {
                if !closed {
                    return Err(Error::Construction("open curves are not supported".into()));
                }
                let meta = match origin {
                    Some(p) => Provenance::File {
                        path: p.display().to_string(),
                    },
                    None => Provenance::derived("parse"),
                };
                let samples = points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect();
                let curve = ClosedCurve::from_samples(samples, meta)?;
                match n_samples {
                    Some(n) if n != curve.len() => curve.resample(n),
                    _ => Ok(curve),
                }
            }
        }
    }
}

pub fn parse_curve(text: &str) -> Result<CurveFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn curve_to_string(curve: &ClosedCurve) -> Result<String> {
    Ok(serde_json::to_string(&CurveFile::from_curve(curve))?)
}

pub fn read_curve(path: &Path, n_samples: Option<usize>) -> Result<ClosedCurve> {
    let text = fs::read_to_string(path)?;
    parse_curve(&text)?.to_curve(Some(path), n_samples)
}

pub fn write_curve(path: &Path, curve: &ClosedCurve) -> Result<()> {
    let mut text = curve_to_string(curve)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Write unit vectors (an indicatrix) in the curve point format.
pub fn write_points(path: &Path, points: &[Vec3]) -> Result<()> {
    let file = CurveFile::Samples {
        closed: true,
        points: points.iter().map(|p| [p.x, p.y, p.z]).collect(),
    };
    fs::write(path, serde_json::to_string(&file)? + "\n")?;
    Ok(())
}

/// Parameter grid as named in a manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Sphere {
        dim: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<usize>,
    },
    SphereCrossInterval {
        dim: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        steps: Option<usize>,
    },
}

fn sphere_grid(dim: u32, nodes: Option<usize>) -> Result<ParamSpace> {
    match (dim, nodes) {
        (0, None) | (0, Some(2)) => Ok(ParamSpace::zero_sphere()),
        (1, n) => ParamSpace::circle(n.unwrap_or(DEFAULT_CIRCLE_NODES)),
        (2, None) => Ok(ParamSpace::icosphere(DEFAULT_ICOSPHERE_LEVEL)),
        (2, Some(n)) => (0..6)
            .find(|&level| 10 * 4usize.pow(level) + 2 == n)
            .map(ParamSpace::icosphere)
            .ok_or_else(|| Error::Domain(format!("no icosphere grid has {n} nodes"))),
        (d, n) => Err(Error::Domain(format!(
            "unsupported sphere grid: dim {d}, nodes {n:?}"
        ))),
    }
}

impl SpaceSpec {
    pub fn build(&self) -> Result<ParamSpace> {
        match *self {
            SpaceSpec::Sphere { dim, nodes } => sphere_grid(dim, nodes),
            SpaceSpec::SphereCrossInterval { dim, nodes, steps } => {
                sphere_grid(dim, nodes)?.cross_interval(steps.unwrap_or(DEFAULT_INTERVAL_STEPS))
            }
        }
    }
}

/// Built-in families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FamilyGenerator {
    FlexedTrefoil {
        #[serde(rename = "N")]
        n: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyManifest {
    pub space: SpaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<FamilyGenerator>,
}

impl FamilyManifest {
    /// Load the family; curve paths resolve against `dir`.
    pub fn load(&self, dir: &Path, n_samples: Option<usize>) -> Result<CurveFamily> {
        let space = self.space.build()?;
        match (&self.curves, &self.generator) {
            (Some(paths), None) => {
                let curves = paths
                    .iter()
                    .map(|p| read_curve(&dir.join(p), n_samples))
                    .collect::<Result<Vec<_>>>()?;
                CurveFamily::new(space, curves)
            }
            (None, Some(FamilyGenerator::FlexedTrefoil { n })) => {
                flexed_trefoil(&space, n_samples.unwrap_or(*n))
            }
            _ => Err(Error::Domain(
                "a manifest needs exactly one of `curves` or `generator`".into(),
            )),
        }
    }
}

pub fn read_manifest(path: &Path) -> Result<FamilyManifest> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Node curve file name inside a family directory.
pub fn node_file_name(node: usize) -> String {
    format!("node_{node:04}.json")
}

/// Write every curve of `family` into `dir` plus a manifest listing them.
pub fn write_family(dir: &Path, family: &CurveFamily, space: &SpaceSpec) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut names = Vec::with_capacity(family.curves.len());
    for (i, curve) in family.curves.iter().enumerate() {
        let name = node_file_name(i);
        write_curve(&dir.join(&name), curve)?;
        names.push(name);
    }
    let manifest = FamilyManifest {
        space: space.clone(),
        curves: Some(names),
        generator: None,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_format_matches_documented_fields() {
        let text = r#"{"kind":"analytic","name":"torus_knot","p":2,"q":3,"R":2.0,"r":1.0,"N":2048}"#;
        let file = parse_curve(text).unwrap();
        assert_eq!(
            file,
            CurveFile::Analytic(AnalyticCurve::TorusKnot {
                p: 2,
                q: 3,
                major: 2.0,
                minor: 1.0,
                n: 2048
            })
        );
        let curve = file.to_curve(None, Some(256)).unwrap();
        assert_eq!(curve.len(), 256);
        let back: serde_json::Value = serde_json::to_value(&file).unwrap();
        let orig: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(back, orig);
    }

    #[test]
    fn samples_round_trip_bit_exact() {
        let c = make_torus_knot(3, 2, 2.0, 0.5, 384).unwrap();
        let text = curve_to_string(&c).unwrap();
        assert!(text.starts_with(r#"{"kind":"samples","closed":true,"points":[["#));
        let back = parse_curve(&text).unwrap().to_curve(None, None).unwrap();
        assert_eq!(back.samples(), c.samples());
    }

    #[test]
    fn open_curves_rejected() {
        let text = r#"{"kind":"samples","closed":false,"points":[[0,0,0]]}"#;
        let err = parse_curve(text).unwrap().to_curve(None, None).unwrap_err();
        assert_eq!(err.kind(), "construction");
    }

    #[test]
    fn malformed_json_is_format_error() {
        assert_eq!(parse_curve("{").unwrap_err().kind(), "format");
        assert_eq!(
            parse_curve(r#"{"kind":"analytic","name":"spiral"}"#).unwrap_err().kind(),
            "format"
        );
    }

    #[test]
    fn space_specs() {
        let s: SpaceSpec = serde_json::from_str(r#"{"kind":"sphere","dim":2,"nodes":42}"#).unwrap();
        assert_eq!(s.build().unwrap().len(), 42);
        let s: SpaceSpec =
            serde_json::from_str(r#"{"kind":"sphere_cross_interval","dim":1,"nodes":8,"steps":3}"#)
                .unwrap();
        assert_eq!(s.build().unwrap().len(), 24);
        let s: SpaceSpec = serde_json::from_str(r#"{"kind":"sphere","dim":2,"nodes":50}"#).unwrap();
        assert!(s.build().is_err());
    }

    #[test]
    fn manifest_needs_one_source() {
        let m: FamilyManifest =
            serde_json::from_str(r#"{"space":{"kind":"sphere","dim":0}}"#).unwrap();
        assert!(m.load(Path::new("."), None).is_err());
        let m: FamilyManifest = serde_json::from_str(
            r#"{"space":{"kind":"sphere","dim":0},"generator":{"name":"flexed_trefoil","N":256}}"#,
        )
        .unwrap();
        assert_eq!(m.load(Path::new("."), None).unwrap().curves.len(), 2);
    }
}
