//! Plain-text pose-graph datasets in the g2o record layout.
//!
//! ```text
//! VERTEX_SE2 id x y theta
//! EDGE_SE2 i j dx dy dtheta I11 I12 I13 I22 I23 I33
//! VERTEX_SE3:QUAT id x y z qx qy qz qw
//! EDGE_SE3:QUAT i j x y z qx qy qz qw I11 I12 .. I16 I22 .. I66
//! ```
//!
//! Information entries are the row-major upper triangle. Blank lines and
//! lines starting with `#` are ignored; any other tag is skipped and counted.
//! Numbers are written with Rust's shortest round-trip `f64` formatting, so
//! parse → serialize → parse reproduces every value bit for bit.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, InfoMatrix, Pose, PoseGraph, Vertex, VertexId};

/// Eigenvalue floor applied to flagged constraints before analysis.
pub const NON_PD_CLAMP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    #[serde(rename = "2d")]
    Planar,
    #[serde(rename = "3d")]
    Spatial,
}

impl Dimension {
    pub fn block_dim(self) -> usize {
        match self {
            Dimension::Planar => 3,
            Dimension::Spatial => 6,
        }
    }

    fn vertex_tag(self) -> &'static str {
        match self {
            Dimension::Planar => "VERTEX_SE2",
            Dimension::Spatial => "VERTEX_SE3:QUAT",
        }
    }

    fn edge_tag(self) -> &'static str {
        match self {
            Dimension::Planar => "EDGE_SE2",
            Dimension::Spatial => "EDGE_SE3:QUAT",
        }
    }
}

/// Where a dataset comes from, and the counts it is expected to contain.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetDescriptor {
    pub source: DatasetSource,
    pub dimension: Option<Dimension>,
    pub declared: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetSource {
    Path(PathBuf),
    Inline(String),
}

impl DatasetDescriptor {
    pub fn path(p: impl AsRef<Path>) -> Self {
        Self {
            source: DatasetSource::Path(p.as_ref().to_path_buf()),
            dimension: None,
            declared: None,
        }
    }

    pub fn inline(text: impl Into<String>) -> Self {
        Self {
            source: DatasetSource::Inline(text.into()),
            dimension: None,
            declared: None,
        }
    }

    pub fn with_declared(mut self, n: usize, m: usize) -> Self {
        self.declared = Some((n, m));
        self
    }

    pub fn with_dimension(mut self, d: Dimension) -> Self {
        self.dimension = Some(d);
        self
    }

    /// Parses the dataset and checks the declared dimension and counts.
    pub fn load(&self) -> Result<ParsedGraph> {
        let parsed = match &self.source {
            DatasetSource::Path(p) => parse_pose_graph(&std::fs::read_to_string(p)?)?,
            DatasetSource::Inline(t) => parse_pose_graph(t)?,
        };
        if let Some(d) = self.dimension {
            if d != parsed.dimension {
                return Err(Error::Structural(format!(
                    "expected a {d:?} dataset, found {:?}",
                    parsed.dimension
                )));
            }
        }
        if let Some((n, m)) = self.declared {
            let got = (parsed.graph.n(), parsed.graph.m());
            if got != (n, m) {
                return Err(Error::Structural(format!(
                    "declared {n} vertices and {m} edges, parsed {} and {}",
                    got.0, got.1
                )));
            }
        }
        Ok(parsed)
    }
}

/// A parsed dataset: the graph with dense vertex indices plus what the
/// parser had to work around.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedGraph {
    pub graph: PoseGraph,
    pub dimension: Dimension,
    /// File id of each dense vertex index, ascending.
    pub original_ids: Vec<i64>,
    /// Indices of edges whose information matrix is not positive definite.
    pub non_pd_edges: Vec<usize>,
    /// Records with an unrecognised tag.
    pub skipped_records: usize,
}

impl ParsedGraph {
    /// The graph with every flagged information matrix clamped to
    /// [`NON_PD_CLAMP`], ready for weight derivation.
    pub fn analysis_graph(&self) -> PoseGraph {
        if self.non_pd_edges.is_empty() {
            return self.graph.clone();
        }
        let mut edges = self.graph.edges().to_vec();
        for &i in &self.non_pd_edges {
            edges[i].info = edges[i].info.clamped(NON_PD_CLAMP);
        }
        PoseGraph::new(self.graph.ell(), self.graph.vertices().to_vec(), edges)
            .expect("clamping keeps the graph valid")
    }

    pub fn serialize(&self) -> String {
        serialize_pose_graph(&self.graph, Some(&self.original_ids))
    }
}

struct Fields<'a> {
    line: usize,
    tokens: std::str::SplitWhitespace<'a>,
}

impl Fields<'_> {
    fn next_str(&mut self, what: &str) -> Result<&str> {
        self.tokens.next().ok_or_else(|| Error::Parse {
            line: self.line,
            message: format!("missing {what}"),
        })
    }

    fn float(&mut self, what: &str) -> Result<f64> {
        let line = self.line;
        let s = self.next_str(what)?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::Parse {
                line,
                message: format!("malformed {what} {s:?}"),
            }),
        }
    }

    fn floats<const N: usize>(&mut self, what: &str) -> Result<[f64; N]> {
        let mut out = [0.0; N];
        for v in &mut out {
            *v = self.float(what)?;
        }
        Ok(out)
    }

    fn id(&mut self, what: &str) -> Result<i64> {
        let line = self.line;
        let s = self.next_str(what)?;
        s.parse().map_err(|_| Error::Parse {
            line,
            message: format!("malformed {what} {s:?}"),
        })
    }

    fn finish(mut self) -> Result<()> {
        match self.tokens.next() {
            None => Ok(()),
            Some(t) => Err(Error::Parse {
                line: self.line,
                message: format!("unexpected trailing field {t:?}"),
            }),
        }
    }
}

struct RawEdge {
    line: usize,
    from: i64,
    to: i64,
    pose: Pose,
    upper: Vec<f64>,
}

fn record_dimension(tag: &str) -> Option<(Dimension, bool)> {
    match tag {
        "VERTEX_SE2" => Some((Dimension::Planar, true)),
        "EDGE_SE2" => Some((Dimension::Planar, false)),
        "VERTEX_SE3:QUAT" => Some((Dimension::Spatial, true)),
        "EDGE_SE3:QUAT" => Some((Dimension::Spatial, false)),
        _ => None,
    }
}

fn parse_pose(f: &mut Fields<'_>, dim: Dimension) -> Result<Pose> {
    match dim {
        Dimension::Planar => {
            let [x, y, theta] = f.floats::<3>("pose component")?;
            Ok(Pose::Se2 { x, y, theta })
        }
        Dimension::Spatial => {
            let [x, y, z, qx, qy, qz, qw] = f.floats::<7>("pose component")?;
            let line = f.line;
            Pose::se3([x, y, z], [qx, qy, qz, qw]).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })
        }
    }
}

/// Parses a 2D or 3D dataset. Vertices may appear anywhere in the file and
/// are re-indexed densely in ascending id order.
pub fn parse_pose_graph(text: &str) -> Result<ParsedGraph> {
    let mut dimension: Option<Dimension> = None;
    let mut vertices: Vec<(i64, Pose, usize)> = Vec::new();
    let mut raw_edges: Vec<RawEdge> = Vec::new();
    let mut skipped = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut f = Fields {
            line,
            tokens: trimmed.split_whitespace(),
        };
        let tag = f.next_str("tag")?;
        let Some((dim, is_vertex)) = record_dimension(tag) else {
            skipped += 1;
            continue;
        };
        match dimension {
            None => dimension = Some(dim),
            Some(d) if d != dim => {
                return Err(Error::Parse {
                    line,
                    message: format!("{tag} record in a {d:?} dataset"),
                })
            }
            _ => {}
        }
        if is_vertex {
            let id = f.id("vertex id")?;
            let pose = parse_pose(&mut f, dim)?;
            f.finish()?;
            vertices.push((id, pose, line));
        } else {
            let from = f.id("edge endpoint")?;
            let to = f.id("edge endpoint")?;
            let pose = parse_pose(&mut f, dim)?;
            let l = dim.block_dim();
            let upper = (0..l * (l + 1) / 2)
                .map(|_| f.float("information entry"))
                .collect::<Result<Vec<_>>>()?;
            f.finish()?;
            raw_edges.push(RawEdge {
                line,
                from,
                to,
                pose,
                upper,
            });
        }
    }

    if skipped > 0 {
        log::warn!("skipped {skipped} records with unrecognised tags");
    }
    let dimension =
        dimension.ok_or_else(|| Error::Structural("dataset contains no vertex or edge records".into()))?;
    if vertices.is_empty() {
        return Err(Error::Structural("dataset contains no vertices".into()));
    }

    vertices.sort_by_key(|v| v.0);
    if let Some(w) = vertices.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Structural(format!(
            "line {}: duplicate vertex id {}",
            w[1].2.max(w[0].2),
            w[1].0
        )));
    }
    let index: HashMap<i64, usize> = vertices.iter().enumerate().map(|(i, v)| (v.0, i)).collect();
    let original_ids = vertices.iter().map(|v| v.0).collect();
    let vertices = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| Vertex {
            id: VertexId(i),
            pose: Some(v.1),
        })
        .collect();

    let l = dimension.block_dim();
    let mut edges = Vec::with_capacity(raw_edges.len());
    let mut non_pd_edges = Vec::new();
    for (k, e) in raw_edges.into_iter().enumerate() {
        let lookup = |id: i64| {
            index.get(&id).copied().ok_or_else(|| {
                Error::Structural(format!("line {}: edge references missing vertex {id}", e.line))
            })
        };
        let (a, b) = (lookup(e.from)?, lookup(e.to)?);
        if a == b {
            return Err(Error::Structural(format!("line {}: self-loop on vertex {}", e.line, e.from)));
        }
        let info = InfoMatrix::from_upper_triangle(l, &e.upper).map_err(|err| Error::Parse {
            line: e.line,
            message: err.to_string(),
        })?;
        if !info.is_positive_definite() {
            non_pd_edges.push(k);
        }
        edges.push(Edge::new(a, b, info).with_relative_pose(e.pose));
    }
    if !non_pd_edges.is_empty() {
        log::warn!("{} information matrices are not positive definite", non_pd_edges.len());
    }

    Ok(ParsedGraph {
        graph: PoseGraph::new(l, vertices, edges)?,
        dimension,
        original_ids,
        non_pd_edges,
        skipped_records: skipped,
    })
}

fn write_pose(out: &mut String, pose: Option<Pose>, dim: Dimension) {
    match (pose, dim) {
        (Some(Pose::Se2 { x, y, theta }), _) => write!(out, " {x} {y} {theta}").unwrap(),
        (
            Some(Pose::Se3 {
                translation: t,
                rotation: q,
            }),
            _,
        ) => write!(out, " {} {} {} {} {} {} {}", t[0], t[1], t[2], q[0], q[1], q[2], q[3]).unwrap(),
        (None, Dimension::Planar) => out.push_str(" 0 0 0"),
        (None, Dimension::Spatial) => out.push_str(" 0 0 0 0 0 0 1"),
    }
}

/// Writes `g` in the text format. Vertices are labelled with `ids` when
/// given, else with their dense index. Missing poses are written as identity.
pub fn serialize_pose_graph(g: &PoseGraph, ids: Option<&[i64]>) -> String {
    let dim = if g.ell() == 6 {
        Dimension::Spatial
    } else {
        Dimension::Planar
    };
    let label = |i: usize| ids.map_or(i as i64, |ids| ids[i]);
    let mut out = String::new();
    for v in g.vertices() {
        write!(out, "{} {}", dim.vertex_tag(), label(v.id.0)).unwrap();
        write_pose(&mut out, v.pose, dim);
        out.push('\n');
    }
    for e in g.edges() {
        write!(out, "{} {} {}", dim.edge_tag(), label(e.from.0), label(e.to.0)).unwrap();
        write_pose(&mut out, e.relative_pose, dim);
        for v in e.info.upper_triangle() {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// First `k` vertices and every edge between them.
pub fn truncate_prefix(g: &PoseGraph, k: usize) -> Result<PoseGraph> {
    if k == 0 || k > g.n() {
        return Err(Error::InvalidArgument(format!(
            "prefix size {k} outside 1..={}",
            g.n()
        )));
    }
    let vertices = g.vertices()[..k].to_vec();
    let edges = g
        .edges()
        .iter()
        .filter(|e| e.from.0 < k && e.to.0 < k)
        .cloned()
        .collect();
    PoseGraph::new(g.ell(), vertices, edges)
}
