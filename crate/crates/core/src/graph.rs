//! Weighted multigraphs, edge degrees and the edge-list text format.
//!
//! Vertices are dense `0..n` ids; the label each vertex carried in the input
//! file is kept alongside. Parallel edges are allowed, self-loops are not,
//! and every weight is a strictly positive exact rational.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::rational::{self, Rational};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Default per-edge multiplicity cap for [`integerize_weights`].
pub const DEFAULT_MULTIPLICITY_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: self-loop on vertex `{label}`")]
    SelfLoop { line: usize, label: String },
    #[error("line {line}: edge weight {weight} is not positive")]
    NonPositiveWeight { line: usize, weight: String },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("graph has no edges")]
    NoEdges,
    #[error("edge {edge} references vertex {vertex} but the graph has {vertex_count} vertices")]
    VertexOutOfRange {
        edge: EdgeId,
        vertex: VertexId,
        vertex_count: usize,
    },
    #[error("edge {edge} is a self-loop")]
    SelfLoopEdge { edge: EdgeId },
    #[error("edge {edge} has non-positive weight {weight}")]
    NonPositiveEdgeWeight { edge: EdgeId, weight: String },
    #[error("edge {edge} would split into {multiplicity} parallel edges (cap {cap})")]
    MultiplicityCap {
        edge: EdgeId,
        multiplicity: String,
        cap: u64,
    },
    #[error("label table has {labels} entries for {vertex_count} vertices")]
    LabelCount { labels: usize, vertex_count: usize },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: Rational,
}

impl Edge {
    /// The endpoint opposite to `x`. `x` must be an endpoint.
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Immutable weighted multigraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRecord", into = "GraphRecord")]
pub struct Graph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<EdgeId>>,
}

impl Graph {
    /// Builds a graph on `vertex_count` vertices labelled `0..n`.
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Rational)>,
    ) -> Result<Self, GraphError> {
        let labels = (0..vertex_count).map(|v| v.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    /// Unit-weight graph from endpoint pairs.
    pub fn unweighted(
        vertex_count: usize,
        edges: &[(VertexId, VertexId)],
    ) -> Result<Self, GraphError> {
        Self::new(
            vertex_count,
            edges.iter().map(|&(u, v)| (u, v, Rational::one())),
        )
    }

    pub fn with_labels(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Rational)>,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut incidence = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (id, (u, v, weight)) in edges.into_iter().enumerate() {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange {
                        edge: id,
                        vertex: x,
                        vertex_count: n,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoopEdge { edge: id });
            }
            if !rational::is_positive(&weight) {
                return Err(GraphError::NonPositiveEdgeWeight {
                    edge: id,
                    weight: rational::format(&weight),
                });
            }
            incidence[u].push(id);
            incidence[v].push(id);
            list.push(Edge { u, v, weight });
        }
        Ok(Self {
            labels,
            edges: list,
            incidence,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Edge ids incident to `v`, parallel copies listed separately.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incidence[v]
    }

    /// Vertex degree counted with multiplicity.
    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v].len()
    }

    pub fn weight_f64(&self, e: EdgeId) -> f64 {
        rational::to_f64(&self.edges[e].weight)
    }

    /// Total weight w_G.
    pub fn total_weight(&self) -> Rational {
        self.edges
            .iter()
            .fold(Rational::zero(), |acc, e| acc + &e.weight)
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight.is_one())
    }

    /// True when no two edges share the same endpoint pair.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges
            .iter()
            .all(|e| seen.insert((e.u.min(e.v), e.u.max(e.v))))
    }

    /// Common degree when every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (0..self.vertex_count())
            .all(|v| self.degree(v) == d)
            .then_some(d)
    }

    /// Incident edges of `v` grouped by the neighbour they lead to.
    pub fn bundles(&self, v: VertexId) -> BTreeMap<VertexId, Vec<EdgeId>> {
        let mut out: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
        for &e in &self.incidence[v] {
            out.entry(self.edges[e].other(v)).or_default().push(e);
        }
        out
    }

    /// Edge list sorted by `(min endpoint, max endpoint, weight)`.
    pub fn canonical_edges(&self) -> Vec<(VertexId, VertexId, Rational)> {
        let mut list: Vec<_> = self
            .edges
            .iter()
            .map(|e| (e.u.min(e.v), e.u.max(e.v), e.weight.clone()))
            .collect();
        list.sort();
        list
    }

    /// Serializes into the edge-list text format; weights are omitted when 1.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let (a, b) = (&self.labels[e.u], &self.labels[e.v]);
            if e.weight.is_one() {
                let _ = writeln!(out, "{a} {b}");
            } else {
                let _ = writeln!(out, "{a} {b} {}", rational::format(&e.weight));
            }
        }
        out
    }

    /// SHA-256 over the canonical edge list; stable under edge reordering.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("n={}\n", self.vertex_count()));
        for (u, v, w) in self.canonical_edges() {
            hasher.update(format!("{u} {v} {}\n", rational::format(&w)));
        }
        hex::encode(hasher.finalize())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphRecord {
    vertex_count: usize,
    labels: Vec<String>,
    edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeRecord {
    u: VertexId,
    v: VertexId,
    #[serde(with = "rational::as_string")]
    weight: Rational,
}

impl From<Graph> for GraphRecord {
    fn from(g: Graph) -> Self {
        GraphRecord {
            vertex_count: g.vertex_count(),
            edges: g
                .edges
                .into_iter()
                .map(|e| EdgeRecord {
                    u: e.u,
                    v: e.v,
                    weight: e.weight,
                })
                .collect(),
            labels: g.labels,
        }
    }
}

impl TryFrom<GraphRecord> for Graph {
    type Error = GraphError;

    fn try_from(r: GraphRecord) -> Result<Self, GraphError> {
        if r.labels.len() != r.vertex_count {
            return Err(GraphError::LabelCount {
                labels: r.labels.len(),
                vertex_count: r.vertex_count,
            });
        }
        Graph::with_labels(r.labels, r.edges.into_iter().map(|e| (e.u, e.v, e.weight)))
    }
}

/// Parses edge-list text: one `u v [w]` per line, `#` starts a comment.
///
/// Integer labels are numbered in ascending numeric order, so files using
/// `0..n` keep their ids; other labels follow in order of first appearance.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut raw = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if !(2..=3).contains(&tokens.len()) {
            return Err(GraphError::Malformed {
                line: line_no,
                reason: format!("expected `u v [w]`, found {} fields", tokens.len()),
            });
        }
        let weight = match tokens.get(2) {
            Some(t) => rational::parse(t).map_err(|e| GraphError::Malformed {
                line: line_no,
                reason: e.to_string(),
            })?,
            None => Rational::one(),
        };
        if tokens[0] == tokens[1] {
            return Err(GraphError::SelfLoop {
                line: line_no,
                label: tokens[0].to_string(),
            });
        }
        if !rational::is_positive(&weight) {
            return Err(GraphError::NonPositiveWeight {
                line: line_no,
                weight: tokens[2].to_string(),
            });
        }
        raw.push((tokens[0].to_string(), tokens[1].to_string(), weight));
    }
    if raw.is_empty() {
        return Err(GraphError::NoEdges);
    }

    let mut numeric: Vec<(u64, String)> = Vec::new();
    let mut named: Vec<String> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (a, b, _) in &raw {
        for label in [a, b] {
            if seen.insert(label.clone()) {
                match label.parse::<u64>() {
                    Ok(n) => numeric.push((n, label.clone())),
                    Err(_) => named.push(label.clone()),
                }
            }
        }
    }
    numeric.sort();
    let labels: Vec<String> = numeric.into_iter().map(|(_, l)| l).chain(named).collect();
    let index: HashMap<&str, VertexId> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let edges: Vec<_> = raw
        .iter()
        .map(|(a, b, w)| (index[a.as_str()], index[b.as_str()], w.clone()))
        .collect();
    Graph::with_labels(labels, edges)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_edge_list(&text)
}

/// Per-edge degrees d_e = max(deg u, deg v) with their extremes δ and Δ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeDegreeProfile {
    pub degrees: Vec<usize>,
    pub min: usize,
    pub max: usize,
}

impl EdgeDegreeProfile {
    pub fn is_regular(&self) -> bool {
        self.min == self.max
    }
}

pub fn edge_degree_profile(g: &Graph) -> Result<EdgeDegreeProfile, GraphError> {
    if g.edge_count() == 0 {
        return Err(GraphError::NoEdges);
    }
    let degrees: Vec<usize> = g
        .edges()
        .iter()
        .map(|e| g.degree(e.u).max(g.degree(e.v)))
        .collect();
    let min = *degrees.iter().min().unwrap();
    let max = *degrees.iter().max().unwrap();
    Ok(EdgeDegreeProfile { degrees, min, max })
}

/// Result of [`integerize_weights`]: a unit-weight multigraph whose
/// Hamiltonian is `scale` times the input's.
#[derive(Debug, Clone)]
pub struct Integerized {
    pub graph: Graph,
    pub scale: Rational,
    /// Original edge id of every split edge.
    pub origin: Vec<EdgeId>,
}

/// Scales all weights by the LCM of their denominators and splits each edge
/// of integral weight k into k parallel unit edges.
pub fn integerize_weights(g: &Graph, cap: u64) -> Result<Integerized, GraphError> {
    let lcm = g.edges().iter().fold(num_bigint::BigInt::one(), |acc, e| {
        acc.lcm(e.weight.denom())
    });
    let scale = Rational::from_integer(lcm);
    let mut edges = Vec::new();
    let mut origin = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        let scaled = (&e.weight * &scale).to_integer();
        let k =
            scaled
                .to_u64()
                .filter(|&k| k <= cap)
                .ok_or_else(|| GraphError::MultiplicityCap {
                    edge: id,
                    multiplicity: scaled.to_string(),
                    cap,
                })?;
        for _ in 0..k {
            edges.push((e.u, e.v, Rational::one()));
            origin.push(id);
        }
    }
    Ok(Integerized {
        graph: Graph::with_labels(g.labels.clone(), edges)?,
        scale,
        origin,
    })
}
