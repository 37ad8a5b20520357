//! JSON documents for linkages, configurations, touching configurations,
//! motions, reduction traces and flatten results.
//!
//! One document shape covers the first four: `vertices`, `edges`,
//! `rotation` and `outerFace` describe the linkage; `coords` makes it a
//! configuration, `coords` plus `offsets` a touching configuration, and
//! `samples` a motion. Unknown keys are rejected. Numbers are written in
//! shortest round-trip form, so reading a written file gives back the same
//! bits.

use std::collections::BTreeMap;
use std::sync::Arc;

use linklock_core::flatten::FlattenResult;
use linklock_core::rigidity::ReductionTrace;
use linklock_core::touching::{TouchError, TouchingConfig};
use linklock_core::{Configuration, Edge, Linkage, ModelError, Motion, Point, Sample};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    /// Malformed JSON, a missing or unknown key, or a value of the wrong type.
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed, but the value breaks an invariant.
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl From<ModelError> for IoError {
    fn from(e: ModelError) -> Self {
        IoError::Validation(e.to_string())
    }
}

impl From<TouchError> for IoError {
    fn from(e: TouchError) -> Self {
        IoError::Validation(e.to_string())
    }
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub a: String,
    pub b: String,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub t: f64,
    pub coords: BTreeMap<String, [f64; 2]>,
}

/// The on-disk shape shared by all geometry files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Document {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    /// Counter-clockwise edge indices around each vertex, keyed by vertex id.
    pub rotation: BTreeMap<String, Vec<usize>>,
    pub outer_face: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<BTreeMap<String, [f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<BTreeMap<String, [f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<SampleRecord>>,
}

/// What a [`Document`] turned out to hold.
#[derive(Clone, Debug, PartialEq)]
pub enum Loaded {
    Linkage(Linkage),
    Configuration(Configuration),
    Touching(TouchingConfig),
    Motion(Motion),
}

impl Loaded {
    pub fn kind(&self) -> &'static str {
        match self {
            Loaded::Linkage(_) => "linkage",
            Loaded::Configuration(_) => "configuration",
            Loaded::Touching(_) => "touching configuration",
            Loaded::Motion(_) => "motion",
        }
    }
}

fn point_map(l: &Linkage, pts: &[Point]) -> BTreeMap<String, [f64; 2]> {
    l.vertices().iter().zip(pts).map(|(v, p)| (v.clone(), [p.x, p.y])).collect()
}

fn points_of(l: &Linkage, map: &BTreeMap<String, [f64; 2]>, field: &str) -> Result<Vec<Point>, IoError> {
    if let Some(k) = map.keys().find(|k| l.index_of(k).is_none()) {
        return Err(IoError::Validation(format!("{field}: unknown vertex {k:?}")));
    }
    l.vertices()
        .iter()
        .map(|v| {
            map.get(v)
                .map(|&[x, y]| Point::new(x, y))
                .ok_or_else(|| IoError::Validation(format!("{field}: missing vertex {v:?}")))
        })
        .collect()
}

impl Document {
    pub fn from_linkage(l: &Linkage) -> Self {
        Document {
            vertices: l.vertices().to_vec(),
            edges: l.edges().iter().map(|e| EdgeRecord { a: e.a.clone(), b: e.b.clone(), length: e.length }).collect(),
            rotation: l.vertices().iter().zip(l.rotation()).map(|(v, r)| (v.clone(), r.clone())).collect(),
            outer_face: l.outer_face().to_string(),
            coords: None,
            offsets: None,
            samples: None,
        }
    }

    pub fn from_configuration(c: &Configuration) -> Self {
        Document { coords: Some(point_map(c.linkage(), c.coords())), ..Document::from_linkage(c.linkage()) }
    }

    pub fn from_touching(tc: &TouchingConfig) -> Self {
        Document { offsets: Some(point_map(tc.linkage(), tc.offsets())), ..Document::from_configuration(tc.base()) }
    }

    pub fn from_motion(m: &Motion) -> Self {
        let l = m.linkage();
        let samples = m.samples().iter().map(|s| SampleRecord { t: s.t, coords: point_map(l, &s.coords) }).collect();
        Document { samples: Some(samples), ..Document::from_linkage(l) }
    }

    pub fn linkage(&self) -> Result<Linkage, IoError> {
        let edges = self.edges.iter().map(|e| Edge::new(&e.a, &e.b, e.length)).collect();
        if let Some(k) = self.rotation.keys().find(|k| !self.vertices.contains(k)) {
            return Err(IoError::Validation(format!("rotation: unknown vertex {k:?}")));
        }
        let rotation = self
            .vertices
            .iter()
            .map(|v| self.rotation.get(v).cloned().ok_or_else(|| IoError::Validation(format!("rotation: missing vertex {v:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Linkage::new(self.vertices.clone(), edges, rotation, self.outer_face.clone())?)
    }

    /// Validates the document and builds the value it describes.
    pub fn load(&self) -> Result<Loaded, IoError> {
        let l = Arc::new(self.linkage()?);
        match (&self.coords, &self.offsets, &self.samples) {
            (None, None, None) => Ok(Loaded::Linkage(Arc::unwrap_or_clone(l))),
            (Some(c), None, None) => {
                let c = Configuration::new(l.clone(), points_of(&l, c, "coords")?)?;
                c.check_lengths()?;
                Ok(Loaded::Configuration(c))
            }
            (Some(c), Some(o), None) => {
                let base = Configuration::new(l.clone(), points_of(&l, c, "coords")?)?;
                let offsets = points_of(&l, o, "offsets")?;
                Ok(Loaded::Touching(TouchingConfig::new(base, offsets)?))
            }
            (None, None, Some(ss)) => {
                let samples = ss
                    .iter()
                    .map(|s| Ok(Sample { t: s.t, coords: points_of(&l, &s.coords, "samples.coords")? }))
                    .collect::<Result<Vec<_>, IoError>>()?;
                let m = Motion::new(l.clone(), samples)?;
                for i in 0..m.samples().len() {
                    m.configuration(i).check_lengths()?;
                }
                Ok(Loaded::Motion(m))
            }
            _ => Err(IoError::Validation("expected coords, coords with offsets, or samples, not a mix".into())),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn parse_document(text: &str) -> Result<Document, IoError> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse(text: &str) -> Result<Loaded, IoError> {
    parse_document(text)?.load()
}

pub fn linkage_to_json(l: &Linkage) -> String {
    to_json(&Document::from_linkage(l))
}

pub fn configuration_to_json(c: &Configuration) -> String {
    to_json(&Document::from_configuration(c))
}

pub fn touching_to_json(tc: &TouchingConfig) -> String {
    to_json(&Document::from_touching(tc))
}

pub fn motion_to_json(m: &Motion) -> String {
    to_json(&Document::from_motion(m))
}

fn expect_kind<T>(text: &str, want: &str, pick: impl FnOnce(Loaded) -> Result<T, Loaded>) -> Result<T, IoError> {
    pick(parse(text)?).map_err(|got| IoError::Validation(format!("expected a {want}, found a {}", got.kind())))
}

pub fn linkage_from_json(text: &str) -> Result<Linkage, IoError> {
    expect_kind(text, "linkage", |l| match l {
        Loaded::Linkage(x) => Ok(x),
        other => Err(other),
    })
}

pub fn configuration_from_json(text: &str) -> Result<Configuration, IoError> {
    expect_kind(text, "configuration", |l| match l {
        Loaded::Configuration(x) => Ok(x),
        other => Err(other),
    })
}

pub fn touching_from_json(text: &str) -> Result<TouchingConfig, IoError> {
    expect_kind(text, "touching configuration", |l| match l {
        Loaded::Touching(x) => Ok(x),
        other => Err(other),
    })
}

pub fn motion_from_json(text: &str) -> Result<Motion, IoError> {
    expect_kind(text, "motion", |l| match l {
        Loaded::Motion(x) => Ok(x),
        other => Err(other),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct StepRecord {
    pub rule: String,
    pub bar: String,
    pub collocated_with: String,
    pub witnesses: Vec<String>,
    pub pass: usize,
}

/// A reduction trace with edges and vertices named by label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct TraceRecord {
    pub steps: Vec<StepRecord>,
    pub pins: Vec<[String; 2]>,
    pub verdict: String,
    pub dof: usize,
    pub dof_touching: usize,
    pub passes: usize,
}

impl TraceRecord {
    pub fn new(t: &ReductionTrace, l: &Linkage) -> Self {
        TraceRecord {
            steps: t
                .steps
                .iter()
                .map(|s| StepRecord {
                    rule: s.rule.name().to_string(),
                    bar: l.label(s.bar),
                    collocated_with: l.label(s.collocated_with),
                    witnesses: s.witnesses.iter().map(|&w| l.label(w)).collect(),
                    pass: s.pass,
                })
                .collect(),
            pins: t.pins.iter().map(|&(a, b)| [l.vertices()[a].clone(), l.vertices()[b].clone()]).collect(),
            verdict: t.verdict.name().to_string(),
            dof: t.dof,
            dof_touching: t.dof_touching,
            passes: t.passes,
        }
    }
}

/// One flattened component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ComponentRecord {
    pub root: String,
    pub status: String,
    pub final_flatness: f64,
    pub max_displacement: f64,
    pub restart: u32,
    pub steps: u64,
    pub motion: Document,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct FlattenRecord {
    pub budget: u64,
    pub seed: u64,
    pub components: Vec<ComponentRecord>,
}

impl ComponentRecord {
    pub fn new(root: &str, r: &FlattenResult) -> Self {
        ComponentRecord {
            root: root.to_string(),
            status: r.status.name().to_string(),
            final_flatness: r.final_flatness,
            max_displacement: r.max_displacement,
            restart: r.restart,
            steps: r.steps,
            motion: Document::from_motion(&r.motion),
        }
    }
}
