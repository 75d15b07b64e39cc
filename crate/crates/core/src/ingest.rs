//! JSONL dataset format, validation and suitability filtering.
//!
//! Line 1 of a dataset file is a [`DatasetFileHeader`]; every following
//! non-blank line is one complete ego-graph:
//!
//! ```text
//! {"format_version":1,"population":"RANDOM","crawl_campaign":"...","created":"2021-..."}
//! {"landmark":"a","nodes":[{"id":"a","bans":{"typeahead":false,"search":false,"ghost":false}}],"edges":[]}
//! ```
//!
//! Files ending in `.gz` (or gzip streams on standard input, named `-`) are
//! decompressed transparently.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EgoGraph, NodeId, PopulationDataset};

pub const FORMAT_VERSION: u32 = 1;

/// Profile features with a known meaning. Count-valued unless listed in
/// [`BOOLEAN_FEATURES`].
pub const CANONICAL_FEATURES: [&str; 18] = [
    "can_media_tag",
    "default_profile",
    "default_profile_image",
    "fast_followers_count",
    "favorite_count",
    "followers_count",
    "friends_count",
    "geo_enabled",
    "has_custom_timelines",
    "has_extended_profile",
    "is_translator",
    "listed_count",
    "media_count",
    "normal_followers_count",
    "possibly_sensitive_editable",
    "protected",
    "statuses_count",
    "verified",
];

pub const BOOLEAN_FEATURES: [&str; 10] = [
    "can_media_tag",
    "default_profile",
    "default_profile_image",
    "geo_enabled",
    "has_custom_timelines",
    "has_extended_profile",
    "is_translator",
    "possibly_sensitive_editable",
    "protected",
    "verified",
];

pub fn is_boolean_feature(name: &str) -> bool {
    BOOLEAN_FEATURES.contains(&name)
}

pub fn is_canonical_feature(name: &str) -> bool {
    CANONICAL_FEATURES.contains(&name)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureValue {
    Bool(bool),
    Number(serde_json::Number),
}

impl FeatureValue {
    pub fn count(n: u64) -> Self {
        FeatureValue::Number(n.into())
    }

    /// Numeric view; booleans map to 0/1.
    pub fn as_f64(&self) -> f64 {
        match self {
            FeatureValue::Bool(b) => f64::from(u8::from(*b)),
            FeatureValue::Number(n) => n.as_f64().unwrap_or(f64::NAN),
        }
    }
}

/// Named profile features. Unknown names are kept as-is.
pub type FeatureVector = BTreeMap<String, FeatureValue>;

/// Checks canonical features for type: counts must be non-negative
/// integers, booleans must be strict JSON booleans.
pub fn feature_problems(features: &FeatureVector) -> Vec<String> {
    let mut out = Vec::new();
    for (name, value) in features {
        if !is_canonical_feature(name) {
            continue;
        }
        match (is_boolean_feature(name), value) {
            (true, FeatureValue::Bool(_)) => {}
            (true, FeatureValue::Number(_)) => out.push(format!("feature {name} must be a boolean")),
            (false, FeatureValue::Number(n)) if n.is_u64() => {}
            (false, _) => out.push(format!("feature {name} must be a non-negative integer")),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetFileHeader {
    pub format_version: u32,
    pub population: String,
    #[serde(default)]
    pub crawl_campaign: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("missing header line")]
    MissingHeader,
    #[error("invalid dataset: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    EmptyGraph,
    EmptyNodeId,
    DuplicateNode(NodeId),
    LandmarkMissing,
    DanglingEdge(NodeId, NodeId),
    SelfLoop(NodeId),
    DuplicateLandmark,
    BadFeature(NodeId, String),
}

/// One broken invariant, attributed to the landmark of its graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub landmark: NodeId,
    pub kind: ViolationKind,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let l = &self.landmark;
        match &self.kind {
            ViolationKind::EmptyGraph => write!(f, "graph {l}: no nodes"),
            ViolationKind::EmptyNodeId => write!(f, "graph {l}: empty node id"),
            ViolationKind::DuplicateNode(n) => write!(f, "graph {l}: duplicate node {n}"),
            ViolationKind::LandmarkMissing => write!(f, "graph {l}: landmark is not a node"),
            ViolationKind::DanglingEdge(a, b) => write!(f, "graph {l}: edge ({a},{b}) references unknown node"),
            ViolationKind::SelfLoop(n) => write!(f, "graph {l}: self-loop on {n}"),
            ViolationKind::DuplicateLandmark => write!(f, "graph {l}: landmark appears in more than one graph"),
            ViolationKind::BadFeature(n, msg) => write!(f, "graph {l}: node {n}: {msg}"),
        }
    }
}

pub fn validate_graph(g: &EgoGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind| {
        out.push(Violation {
            landmark: g.landmark.clone(),
            kind,
        })
    };
    if g.nodes.is_empty() {
        push(ViolationKind::EmptyGraph);
    }
    let mut ids: HashSet<&NodeId> = HashSet::with_capacity(g.nodes.len());
    for n in &g.nodes {
        if n.id.as_str().is_empty() {
            push(ViolationKind::EmptyNodeId);
        }
        if !ids.insert(&n.id) {
            push(ViolationKind::DuplicateNode(n.id.clone()));
        }
        if let Some(features) = &n.features {
            for msg in feature_problems(features) {
                push(ViolationKind::BadFeature(n.id.clone(), msg));
            }
        }
    }
    if !g.nodes.is_empty() && !ids.contains(&g.landmark) {
        push(ViolationKind::LandmarkMissing);
    }
    for (a, b) in &g.edges {
        if a == b {
            push(ViolationKind::SelfLoop(a.clone()));
        } else if !ids.contains(a) || !ids.contains(b) {
            push(ViolationKind::DanglingEdge(a.clone(), b.clone()));
        }
    }
    out
}

/// Every broken invariant in the dataset; empty iff the dataset is valid.
pub fn validate_dataset(d: &PopulationDataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut landmarks: HashSet<&NodeId> = HashSet::new();
    for g in &d.graphs {
        out.extend(validate_graph(g));
        if !landmarks.insert(&g.landmark) {
            out.push(Violation {
                landmark: g.landmark.clone(),
                kind: ViolationKind::DuplicateLandmark,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterReport {
    pub kept: usize,
    pub removed: usize,
}

/// Keeps graphs with at least `min_nodes` nodes.
pub fn filter_suitable(d: &PopulationDataset, min_nodes: usize) -> (PopulationDataset, FilterReport) {
    let graphs: Vec<EgoGraph> = d.graphs.iter().filter(|g| g.len() >= min_nodes).cloned().collect();
    let report = FilterReport {
        kept: graphs.len(),
        removed: d.graphs.len() - graphs.len(),
    };
    (
        PopulationDataset {
            graphs,
            ..d.clone()
        },
        report,
    )
}

fn open_input(path: &Path) -> Result<Box<dyn BufRead>, IngestError> {
    let io_err = |source| IngestError::Io {
        path: path.display().to_string(),
        source,
    };
    let raw: Box<dyn Read> = if path.as_os_str() == "-" {
        Box::new(io::stdin().lock())
    } else {
        Box::new(File::open(path).map_err(io_err)?)
    };
    let mut reader = BufReader::new(raw);
    let gz_name = path.extension().is_some_and(|e| e == "gz");
    let gz_magic = reader.fill_buf().map_err(io_err)?.starts_with(&[0x1f, 0x8b]);
    if gz_name || gz_magic {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<PopulationDataset, IngestError> {
    let path = path.as_ref();
    let reader = open_input(path)?;
    read_dataset(reader).map_err(|e| match e {
        IngestError::Io { source, .. } => IngestError::Io {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

/// Parses and validates a dataset from any reader.
pub fn read_dataset(reader: impl BufRead) -> Result<PopulationDataset, IngestError> {
    let mut lines = reader.lines().enumerate();
    let io_err = |source| IngestError::Io {
        path: "<stream>".into(),
        source,
    };
    let header: DatasetFileHeader = loop {
        match lines.next() {
            None => return Err(IngestError::MissingHeader),
            Some((i, line)) => {
                let line = line.map_err(io_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                break serde_json::from_str(&line).map_err(|e| IngestError::Parse {
                    line: i + 1,
                    message: format!("bad header: {e}"),
                })?;
            }
        }
    };
    if header.format_version != FORMAT_VERSION {
        return Err(IngestError::Version(header.format_version));
    }
    let mut graphs = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let g: EgoGraph = serde_json::from_str(&line).map_err(|e| IngestError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        graphs.push(g);
    }
    let dataset = PopulationDataset {
        name: header.population,
        crawl_campaign: header.crawl_campaign,
        created: header.created,
        metadata: header.metadata,
        graphs,
    };
    let violations = validate_dataset(&dataset);
    if !violations.is_empty() {
        return Err(IngestError::Invalid(violations));
    }
    Ok(dataset)
}

pub fn header_of(d: &PopulationDataset) -> DatasetFileHeader {
    DatasetFileHeader {
        format_version: FORMAT_VERSION,
        population: d.name.clone(),
        crawl_campaign: d.crawl_campaign.clone(),
        created: d.created,
        metadata: d.metadata.clone(),
    }
}

pub fn write_dataset(d: &PopulationDataset, mut w: impl Write) -> io::Result<()> {
    serde_json::to_writer(&mut w, &header_of(d))?;
    w.write_all(b"\n")?;
    for g in &d.graphs {
        serde_json::to_writer(&mut w, g)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Writes `d` to `path` (`-` for standard output), gzip-compressed when the
/// name ends in `.gz`.
pub fn save_dataset(d: &PopulationDataset, path: impl AsRef<Path>) -> Result<(), IngestError> {
    let path = path.as_ref();
    let io_err = |source| IngestError::Io {
        path: path.display().to_string(),
        source,
    };
    if path.as_os_str() == "-" {
        return write_dataset(d, BufWriter::new(io::stdout().lock())).map_err(io_err);
    }
    let file = BufWriter::new(File::create(path).map_err(io_err)?);
    if path.extension().is_some_and(|e| e == "gz") {
        let mut enc = GzEncoder::new(file, Compression::default());
        write_dataset(d, &mut enc).map_err(io_err)?;
        enc.finish().map_err(io_err)?.flush().map_err(io_err)
    } else {
        write_dataset(d, file).map_err(io_err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BanProfile, Node};

    const HEADER: &str = r#"{"format_version":1,"population":"RANDOM","crawl_campaign":"t","created":"2021-03-01T00:00:00Z"}"#;

    fn parse(body: &str) -> Result<PopulationDataset, IngestError> {
        read_dataset(io::Cursor::new(format!("{HEADER}\n{body}")))
    }

    #[test]
    fn two_node_graph() {
        let d = parse(r#"{"landmark":"a","nodes":[{"id":"a","bans":{"typeahead":true,"search":false,"ghost":false}},{"id":"b"}],"edges":[["b","a"]]}"#).unwrap();
        assert_eq!(d.graphs.len(), 1);
        assert_eq!(d.graphs[0].len(), 2);
        assert_eq!(d.name, "RANDOM");
        assert!(d.graphs[0].nodes[0].bans.banned());
        assert!(!d.graphs[0].nodes[1].bans.banned());
    }

    #[test]
    fn unknown_edge_endpoint_names_landmark() {
        let err = parse(r#"{"landmark":"root7","nodes":[{"id":"root7"}],"edges":[["root7","ghost"]]}"#).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, IngestError::Invalid(_)));
        assert!(msg.contains("root7"), "{msg}");
    }

    #[test]
    fn parse_error_carries_line_number() {
        let err = parse("{\"landmark\":\"a\",\"nodes\":[{\"id\":\"a\"}]}\n{not json").unwrap_err();
        match err {
            IngestError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_other_versions() {
        let err = read_dataset(io::Cursor::new(r#"{"format_version":2,"population":"x"}"#)).unwrap_err();
        assert!(matches!(err, IngestError::Version(2)));
        assert!(matches!(read_dataset(io::Cursor::new("")), Err(IngestError::MissingHeader)));
    }

    #[test]
    fn violations_are_reported() {
        let mut g = EgoGraph::singleton("a");
        g.nodes.push(Node::new("b", BanProfile::NONE));
        g.edges.push(("a".into(), "b".into()));
        let d = PopulationDataset::new("t", vec![g.clone()]);
        assert!(validate_dataset(&d).is_empty());

        let mut looped = g.clone();
        looped.edges.push(("b".into(), "b".into()));
        let v = validate_dataset(&PopulationDataset::new("t", vec![looped]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::SelfLoop("b".into()));

        let v = validate_dataset(&PopulationDataset::new("t", vec![g.clone(), g]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::DuplicateLandmark);
    }

    #[test]
    fn feature_types_are_strict() {
        let mut f = FeatureVector::new();
        f.insert("media_count".into(), FeatureValue::count(3));
        f.insert("verified".into(), FeatureValue::Bool(false));
        f.insert("some_new_field".into(), FeatureValue::Number(serde_json::Number::from_f64(0.5).unwrap()));
        assert!(feature_problems(&f).is_empty());
        f.insert("protected".into(), FeatureValue::count(1));
        f.insert("friends_count".into(), FeatureValue::Number((-4).into()));
        assert_eq!(feature_problems(&f).len(), 2);
    }

    #[test]
    fn unknown_features_survive_round_trip() {
        let line = r#"{"landmark":"a","nodes":[{"id":"a","features":{"media_count":12,"mystery_flag":true,"x":1.5}}],"edges":[]}"#;
        let d = parse(line).unwrap();
        let mut buf = Vec::new();
        write_dataset(&d, &mut buf).unwrap();
        let back = read_dataset(io::Cursor::new(buf)).unwrap();
        assert_eq!(back, d);
        let f = back.graphs[0].nodes[0].features.as_ref().unwrap();
        assert_eq!(f["mystery_flag"], FeatureValue::Bool(true));
        assert_eq!(f["media_count"].as_f64(), 12.0);
    }

    #[test]
    fn filtering() {
        let singles = PopulationDataset::new("t", vec![EgoGraph::singleton("a"), EgoGraph::singleton("b")]);
        let (kept, report) = filter_suitable(&singles, 2);
        assert!(kept.graphs.is_empty());
        assert_eq!(report, FilterReport { kept: 0, removed: 2 });
        let (same, _) = filter_suitable(&singles, 1);
        assert_eq!(same, singles);
    }

    #[test]
    fn gzip_and_plain_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut g = EgoGraph::singleton("a");
        g.nodes.push(Node::new("b", BanProfile::new(false, true, false)));
        g.edges.push(("b".into(), "a".into()));
        let d = PopulationDataset::new("BOTS", vec![g]);
        for name in ["d.jsonl", "d.jsonl.gz"] {
            let p = dir.path().join(name);
            save_dataset(&d, &p).unwrap();
            assert_eq!(load_dataset(&p).unwrap(), d);
        }
        let raw = std::fs::read(dir.path().join("d.jsonl.gz")).unwrap();
        assert_eq!(&raw[..2], &[0x1f, 0x8b]);
    }
}
