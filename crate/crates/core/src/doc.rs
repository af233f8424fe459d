//! JSON scene and report documents with a canonical byte encoding: object
//! keys sorted, shortest round-trip float formatting, trailing newline. The
//! canonical form makes `parse . write` the identity and `write . parse`
//! byte-stable, which the golden-file tests rely on.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::chain::{Chain, PivotChoice};
use crate::geom::{Circle, Point, Tolerance, DEFAULT_REL_TOL};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("scene is not valid UTF-8")]
    Utf8,
    #[error("json error at {path}: {message}")]
    Json { path: String, message: String },
    #[error("duplicate circle id {0:?}")]
    DuplicateId(String),
    #[error("unknown circle id {0:?}")]
    UnknownId(String),
    #[error("radius of circle {0:?} must be positive and finite")]
    BadRadius(String),
    #[error("chain order must list at least two circles")]
    EmptyChain,
    #[error("a {kind} chain over {circles} circles needs {expected} pivots, got {got}")]
    PivotCount {
        kind: &'static str,
        circles: usize,
        expected: usize,
        got: usize,
    },
    #[error("start point is off its circle by {defect:.3e} (allowed {allowed:.3e})")]
    StartOffCircle { defect: f64, allowed: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleEntry {
    pub id: String,
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

/// Pivot choice in a scene file: the side labels resolve by the left/right
/// rule at load time; explicit coordinates support exact round trips of
/// derived scenes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PivotSpec {
    Named(NamedPivot),
    Explicit { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum NamedPivot {
    A,
    B,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PivotEntry {
    pub choice: PivotSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainEntry {
    pub order: Vec<String>,
    pub closed: bool,
    pub pivots: Vec<PivotEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartEntry {
    pub circle: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PointEntry {
    pub x: f64,
    pub y: f64,
}

pub const SCENE_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneDocument {
    pub version: String,
    pub circles: Vec<CircleEntry>,
    pub chain: ChainEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_i: Option<PointEntry>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub meta: Map<String, Value>,
    /// Unknown top-level fields; merged into `meta` after parsing.
    #[serde(default, flatten, skip_serializing_if = "Map::is_empty")]
    pub extra: Map<String, Value>,
}

impl SceneDocument {
    /// Build a document from a chain, numbering circles c1, c2, ...
    pub fn from_chain(chain: &Chain, start: Option<Point>, anchor: Option<Point>) -> Self {
        let circles = chain
            .circles
            .iter()
            .enumerate()
            .map(|(i, c)| CircleEntry {
                id: format!("c{}", i + 1),
                cx: c.center.x,
                cy: c.center.y,
                r: c.radius,
            })
            .collect::<Vec<_>>();
        let pivots = chain
            .pivots
            .iter()
            .map(|p| PivotEntry {
                choice: match p {
                    PivotChoice::A => PivotSpec::Named(NamedPivot::A),
                    PivotChoice::B => PivotSpec::Named(NamedPivot::B),
                    PivotChoice::Explicit(pt) => PivotSpec::Explicit { x: pt.x, y: pt.y },
                },
            })
            .collect();
        SceneDocument {
            version: SCENE_VERSION.to_string(),
            chain: ChainEntry {
                order: circles.iter().map(|c| c.id.clone()).collect(),
                closed: chain.closed,
                pivots,
            },
            circles,
            start: start.map(|p| StartEntry {
                circle: "c1".to_string(),
                x: p.x,
                y: p.y,
            }),
            anchor_i: anchor.map(|p| PointEntry { x: p.x, y: p.y }),
            meta: Map::new(),
            extra: Map::new(),
        }
    }

    /// Check the document invariants at relative tolerance `rel`.
    pub fn validate(&self, rel: f64) -> Result<(), DocError> {
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.circles {
            if !seen.insert(&c.id) {
                return Err(DocError::DuplicateId(c.id.clone()));
            }
            if !(c.r.is_finite() && c.r > 0.0) {
                return Err(DocError::BadRadius(c.id.clone()));
            }
        }
        if self.chain.order.len() < 2 {
            return Err(DocError::EmptyChain);
        }
        for id in &self.chain.order {
            if !seen.contains(id) {
                return Err(DocError::UnknownId(id.clone()));
            }
        }
        let n = self.chain.order.len();
        let expected = if self.chain.closed { n } else { n - 1 };
        if self.chain.pivots.len() != expected {
            return Err(DocError::PivotCount {
                kind: if self.chain.closed { "closed" } else { "open" },
                circles: n,
                expected,
                got: self.chain.pivots.len(),
            });
        }
        if let Some(start) = &self.start {
            let circle = self
                .circle_by_id(&start.circle)
                .ok_or_else(|| DocError::UnknownId(start.circle.clone()))?;
            let (chain, _) = self.chain_geometry()?;
            let tol = chain.tolerance_with_rel(rel);
            let defect = circle.signed_dist(Point::new(start.x, start.y)).abs();
            if defect > tol.eps() {
                return Err(DocError::StartOffCircle {
                    defect,
                    allowed: tol.eps(),
                });
            }
        }
        Ok(())
    }

    pub fn circle_by_id(&self, id: &str) -> Option<Circle> {
        self.circles
            .iter()
            .find(|c| c.id == id)
            .map(|c| Circle::new(Point::new(c.cx, c.cy), c.r))
    }

    /// The chain described by the document plus its default tolerance.
    pub fn chain_geometry(&self) -> Result<(Chain, Tolerance), DocError> {
        let mut circles = Vec::with_capacity(self.chain.order.len());
        for id in &self.chain.order {
            circles.push(
                self.circle_by_id(id)
                    .ok_or_else(|| DocError::UnknownId(id.clone()))?,
            );
        }
        let pivots = self
            .chain
            .pivots
            .iter()
            .map(|p| match &p.choice {
                PivotSpec::Named(NamedPivot::A) => PivotChoice::A,
                PivotSpec::Named(NamedPivot::B) => PivotChoice::B,
                PivotSpec::Explicit { x, y } => PivotChoice::Explicit(Point::new(*x, *y)),
            })
            .collect();
        let chain = if self.chain.closed {
            Chain::closed(circles, pivots)
        } else {
            Chain::open(circles, pivots)
        };
        let tol = chain.tolerance();
        Ok((chain, tol))
    }

    pub fn start_point(&self) -> Option<Point> {
        self.start.as_ref().map(|s| Point::new(s.x, s.y))
    }

    pub fn anchor_point(&self) -> Option<Point> {
        self.anchor_i.map(|p| Point::new(p.x, p.y))
    }
}

/// Parse and validate a scene document. Unknown top-level fields are
/// preserved in `meta`.
pub fn parse_scene(text: &[u8]) -> Result<SceneDocument, DocError> {
    let text = std::str::from_utf8(text).map_err(|_| DocError::Utf8)?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut doc: SceneDocument =
        serde_path_to_error::deserialize(de).map_err(|e| DocError::Json {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    let extra = std::mem::take(&mut doc.extra);
    for (k, v) in extra {
        doc.meta.entry(k).or_insert(v);
    }
    doc.validate(DEFAULT_REL_TOL)?;
    Ok(doc)
}

/// Canonical serialization: sorted keys, shortest round-trip floats,
/// trailing newline.
pub fn write_scene(doc: &SceneDocument) -> Vec<u8> {
    canonical_json(doc)
}

/// Canonically serialize any JSON-representable value.
pub fn canonical_json<T: Serialize>(value: &T) -> Vec<u8> {
    // serde_json's map type keeps keys sorted, so converting through Value
    // sorts struct fields as well.
    let value = serde_json::to_value(value).expect("value is JSON-representable");
    let mut bytes = serde_json::to_vec_pretty(&value).expect("JSON serialization");
    bytes.push(b'\n');
    bytes
}

/// Hex SHA-256 of the canonical scene bytes; ties reports to their scene.
pub fn scene_hash(doc: &SceneDocument) -> String {
    let digest = Sha256::digest(write_scene(doc));
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// One named check inside a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub values: Vec<f64>,
    pub defect: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, values: Vec<f64>, defect: f64, allowed: f64) -> Self {
        CheckRecord {
            name: name.into(),
            values,
            defect,
            pass: defect.abs() <= allowed,
        }
    }
}

/// A verification result tied to a scene by hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub kind: String,
    pub tolerance: f64,
    pub scene_hash: String,
    pub checks: Vec<CheckRecord>,
    pub overall: bool,
}

impl ReportDocument {
    pub fn new(kind: impl Into<String>, tolerance: f64, hash: String, checks: Vec<CheckRecord>) -> Self {
        let overall = checks.iter().all(|c| c.pass);
        ReportDocument {
            kind: kind.into(),
            tolerance,
            scene_hash: hash,
            checks,
            overall,
        }
    }
}
