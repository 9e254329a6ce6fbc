use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{QaoaError, Result};
use crate::rng::stream;

/// Regeneration budget for clustered instances.
pub const MAX_GENERATION_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexLabel {
    Cluster(usize),
    Separator(usize),
}

impl std::fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VertexLabel::Cluster(i) => write!(f, "cluster:{i}"),
            VertexLabel::Separator(i) => write!(f, "sep:{i}"),
        }
    }
}

impl std::str::FromStr for VertexLabel {
    type Err = QaoaError;

    fn from_str(s: &str) -> Result<VertexLabel> {
        let bad = || QaoaError::Format(format!("bad vertex label {s:?}"));
        let (kind, idx) = s.split_once(':').ok_or_else(bad)?;
        let idx: usize = idx.parse().map_err(|_| bad())?;
        match kind {
            "cluster" => Ok(VertexLabel::Cluster(idx)),
            "sep" => Ok(VertexLabel::Separator(idx)),
            _ => Err(bad()),
        }
    }
}

/// Simple undirected graph. Edges are stored as `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<Option<VertexLabel>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    labels: BTreeMap<String, String>,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(QaoaError::InvalidGraph(format!("self-loop at {a}")));
            }
            if a >= num_vertices || b >= num_vertices {
                return Err(QaoaError::InvalidGraph(format!("edge ({a}, {b}) out of range")));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(QaoaError::InvalidGraph(format!("duplicate edge {e:?}")));
            }
            out.push(e);
        }
        Ok(Graph {
            num_vertices,
            edges: out,
            labels: vec![None; num_vertices],
        })
    }

    pub fn with_labels(mut self, labels: Vec<Option<VertexLabel>>) -> Result<Graph> {
        if labels.len() != self.num_vertices {
            return Err(QaoaError::InvalidGraph("label count mismatch".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[Option<VertexLabel>] {
        &self.labels
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Connected components of the graph with `removed` deleted, each sorted.
    pub fn components_without(&self, removed: &[usize]) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.num_vertices];
        for &r in removed {
            seen[r] = true;
        }
        let mut comps = Vec::new();
        for s in 0..self.num_vertices {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components_without(&[]).len() <= 1
    }

    /// Vertices carrying `label`.
    pub fn vertices_with(&self, label: VertexLabel) -> Vec<usize> {
        (0..self.num_vertices)
            .filter(|&v| self.labels[v] == Some(label))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let rec = GraphRecord {
            num_vertices: self.num_vertices,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            labels: self
                .labels
                .iter()
                .enumerate()
                .filter_map(|(v, l)| l.map(|l| (v.to_string(), l.to_string())))
                .collect(),
        };
        serde_json::to_string(&rec).expect("graph serialises")
    }

    pub fn from_json(s: &str) -> Result<Graph> {
        let rec: GraphRecord = serde_json::from_str(s).map_err(|e| QaoaError::Format(e.to_string()))?;
        let edges: Vec<(usize, usize)> = rec.edges.iter().map(|e| (e[0], e[1])).collect();
        let mut labels = vec![None; rec.num_vertices];
        for (v, l) in &rec.labels {
            let v: usize = v
                .parse()
                .map_err(|_| QaoaError::Format(format!("bad vertex key {v:?}")))?;
            if v >= rec.num_vertices {
                return Err(QaoaError::Format(format!("label for missing vertex {v}")));
            }
            labels[v] = Some(l.parse()?);
        }
        Graph::new(rec.num_vertices, &edges)?.with_labels(labels)
    }
}

/// Parameters of the clustered chain family: `r` clusters of `n` vertices
/// joined by `r − 1` separator groups of `k` vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteredGraphSpec {
    pub r: usize,
    pub n: usize,
    pub k: usize,
    pub p_intra: f64,
    pub p_sep: f64,
    pub seed: u64,
}

impl ClusteredGraphSpec {
    pub fn new(r: usize, n: usize, k: usize, seed: u64) -> ClusteredGraphSpec {
        ClusteredGraphSpec {
            r,
            n,
            k,
            p_intra: 0.7,
            p_sep: 0.3,
            seed,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.r * self.n + (self.r - 1) * self.k
    }

    fn validate(&self) -> Result<()> {
        if self.r < 2 || self.n < 1 || self.k < 1 {
            return Err(QaoaError::InvalidSpec(format!(
                "need r >= 2, n >= 1, k >= 1 (got r={}, n={}, k={})",
                self.r, self.n, self.k
            )));
        }
        for p in [self.p_intra, self.p_sep] {
            if !(p > 0.0 && p <= 1.0) {
                return Err(QaoaError::InvalidSpec(format!("probability {p} outside (0, 1]")));
            }
        }
        Ok(())
    }

    /// First vertex of cluster `i`; separator group `i` starts `n` later.
    fn cluster_start(&self, i: usize) -> usize {
        i * (self.n + self.k)
    }
}

/// Samples a connected instance. Attempt `a` draws from stream `a` of
/// `spec.seed`.
pub fn generate_clustered_graph(spec: &ClusteredGraphSpec) -> Result<Graph> {
    spec.validate()?;
    let nv = spec.num_vertices();
    let mut labels = vec![None; nv];
    for i in 0..spec.r {
        let s = spec.cluster_start(i);
        labels[s..s + spec.n].fill(Some(VertexLabel::Cluster(i)));
        if i + 1 < spec.r {
            labels[s + spec.n..s + spec.n + spec.k].fill(Some(VertexLabel::Separator(i)));
        }
    }
    for attempt in 0..MAX_GENERATION_ATTEMPTS {
        let mut rng = stream(spec.seed, attempt as u64);
        let mut edges = Vec::new();
        for i in 0..spec.r {
            let s = spec.cluster_start(i);
            for a in s..s + spec.n {
                for b in a + 1..s + spec.n {
                    if rng.gen::<f64>() < spec.p_intra {
                        edges.push((a, b));
                    }
                }
            }
        }
        for i in 0..spec.r - 1 {
            let sep = spec.cluster_start(i) + spec.n;
            for c in [i, i + 1] {
                let s = spec.cluster_start(c);
                for a in s..s + spec.n {
                    for b in sep..sep + spec.k {
                        if rng.gen::<f64>() < spec.p_sep {
                            edges.push((a.min(b), a.max(b)));
                        }
                    }
                }
            }
        }
        edges.sort_unstable();
        let g = Graph::new(nv, &edges)?.with_labels(labels.clone())?;
        if g.is_connected() {
            return Ok(g);
        }
        log::debug!("clustered graph attempt {attempt} disconnected, resampling");
    }
    Err(QaoaError::RetryBudget {
        attempts: MAX_GENERATION_ATTEMPTS,
    })
}
