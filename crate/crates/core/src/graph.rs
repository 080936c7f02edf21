//! Weighted graphs with a vertex measure, edge weights and lengths, and a
//! designated boundary set.
//!
//! The edge measure of an edge is `weight * length`; integrals of
//! edgewise-linear functions against it are handled in [`crate::fnspace`].

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub measure: f64,
    pub boundary: bool,
}

/// An edge stored with orientation `u -> v`. Self-loops have `u == v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub length: f64,
}

impl Edge {
    /// Edge measure `a_e * l_e`.
    pub fn measure(&self) -> f64 {
        self.weight * self.length
    }

    /// `a_e / l_e`, the edge's contribution to the Laplacian.
    pub fn conductance(&self) -> f64 {
        self.weight / self.length
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite `w` (for a self-loop, `w` itself).
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug)]
pub struct WeightedGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    incident: Vec<Vec<usize>>,
}

/// Serialized vertex; omitted fields take their defaults (measure 1, interior).
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct VertexSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<bool>,
}

/// Serialized edge; omitted weight and length default to 1.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct EdgeSpec {
    pub u: String,
    pub v: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

/// The graph JSON document.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct GraphSpec {
    pub vertices: Vec<VertexSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
}

fn check_positive(what: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive {
            what: what.to_string(),
            value,
        })
    }
}

/// Validates a vertex/edge specification and builds the graph.
pub fn build_graph(spec: &GraphSpec) -> Result<WeightedGraph> {
    let vertices = spec
        .vertices
        .iter()
        .map(|v| Vertex {
            id: v.id.clone(),
            measure: v.measure.unwrap_or(1.0),
            boundary: v.boundary.unwrap_or(false),
        })
        .collect::<Vec<_>>();
    let mut index = HashMap::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        if index.insert(v.id.clone(), i).is_some() {
            return Err(Error::DuplicateVertex(v.id.clone()));
        }
    }
    let lookup = |id: &str| {
        index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    };
    let mut edges = Vec::with_capacity(spec.edges.len());
    for e in &spec.edges {
        edges.push(Edge {
            u: lookup(&e.u)?,
            v: lookup(&e.v)?,
            weight: e.a.unwrap_or(1.0),
            length: e.length.unwrap_or(1.0),
        });
    }
    WeightedGraph::from_parts(vertices, edges)
}

impl WeightedGraph {
    /// Builds a graph from already-indexed parts, validating every invariant.
    pub fn from_parts(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            check_positive(&format!("measure of `{}`", v.id), v.measure)?;
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.id.clone()));
            }
        }
        let n = vertices.len();
        let mut incident = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::UnknownVertex(format!("#{}", e.u.max(e.v))));
            }
            check_positive("edge weight", e.weight)?;
            check_positive("edge length", e.length)?;
            incident[e.u].push(k);
            if e.v != e.u {
                incident[e.v].push(k);
            }
        }
        Ok(Self {
            vertices,
            edges,
            index,
            incident,
        })
    }

    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: GraphSpec = serde_json::from_str(s)?;
        build_graph(&spec)
    }

    /// Full specification with every field explicit.
    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexSpec {
                    id: v.id.clone(),
                    measure: Some(v.measure),
                    boundary: Some(v.boundary),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    u: self.vertices[e.u].id.clone(),
                    v: self.vertices[e.v].id.clone(),
                    a: Some(e.weight),
                    length: Some(e.length),
                })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn id(&self, i: usize) -> &str {
        &self.vertices[i].id
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn measure(&self, i: usize) -> f64 {
        self.vertices[i].measure
    }

    pub fn measures(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.measure).collect()
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.vertices[i].boundary
    }

    /// Edge indices incident to `v`; a self-loop is listed once.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.is_boundary(i)).collect()
    }

    pub fn boundary(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_boundary(i)).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.iter().all(|v| !v.boundary)
    }

    pub fn total_measure(&self) -> f64 {
        self.vertices.iter().map(|v| v.measure).sum()
    }

    pub fn total_edge_measure(&self) -> f64 {
        self.edges.iter().map(Edge::measure).sum()
    }

    pub fn sup_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    pub fn has_unit_lengths(&self) -> bool {
        self.edges.iter().all(|e| e.length == 1.0)
    }

    /// All vertex measures and edge weights equal one.
    pub fn is_traditional(&self) -> bool {
        self.vertices.iter().all(|v| v.measure == 1.0) && self.edges.iter().all(|e| e.weight == 1.0)
    }

    /// Sorted, deduplicated neighbours of `v`, including `v` itself when it
    /// carries a self-loop.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.incident[v]
            .iter()
            .map(|&k| self.edges[k].other(v))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Connected components over the vertices accepted by `keep`, each sorted.
    pub fn components_within(&self, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || !keep(s) {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &k in &self.incident[x] {
                    let y = self.edges[k].other(x);
                    if !seen[y] && keep(y) {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components_within(|_| true).len() <= 1
    }

    /// Copy with the boundary flags replaced.
    pub fn with_boundary(&self, boundary: &[bool]) -> Result<Self> {
        if boundary.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: boundary.len(),
            });
        }
        let mut g = self.clone();
        for (v, &b) in g.vertices.iter_mut().zip(boundary) {
            v.boundary = b;
        }
        Ok(g)
    }

    /// Copy whose boundary is exactly the complement of `set`.
    pub fn restricted_to(&self, set: &[usize]) -> Result<Self> {
        let mut boundary = vec![true; self.n()];
        for &v in set {
            if v >= self.n() {
                return Err(Error::UnknownVertex(format!("#{v}")));
            }
            boundary[v] = false;
        }
        self.with_boundary(&boundary)
    }

    /// Copy with new vertex measures.
    pub fn with_measures(&self, measures: &[f64]) -> Result<Self> {
        if measures.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: measures.len(),
            });
        }
        let mut vertices = self.vertices.clone();
        for (v, &m) in vertices.iter_mut().zip(measures) {
            v.measure = m;
        }
        Self::from_parts(vertices, self.edges.clone())
    }

    /// Splits edge `e` by a new vertex at distance `offset` from its stored
    /// tail `u`. The two halves keep the weight; the edge is replaced in place
    /// by `u -> w` and `w -> v` is appended. Returns the new graph and `w`.
    pub fn subdivide_edge(&self, e: usize, offset: f64, id: &str, measure: f64) -> Result<(Self, usize)> {
        let edge = self
            .edges
            .get(e)
            .ok_or_else(|| Error::InvalidParameter(format!("no edge #{e}")))?;
        if !(offset > 0.0 && offset < edge.length) {
            return Err(Error::InvalidParameter(format!(
                "subdivision offset {offset} outside (0, {})",
                edge.length
            )));
        }
        let mut vertices = self.vertices.clone();
        let w = vertices.len();
        vertices.push(Vertex {
            id: id.to_string(),
            measure,
            boundary: false,
        });
        let mut edges = self.edges.clone();
        let tail = Edge {
            u: w,
            v: edge.v,
            weight: edge.weight,
            length: edge.length - offset,
        };
        edges[e] = Edge {
            u: edge.u,
            v: w,
            weight: edge.weight,
            length: offset,
        };
        edges.push(tail);
        Ok((Self::from_parts(vertices, edges)?, w))
    }
}

/// Incremental construction by vertex id.
#[derive(Default, Clone, Debug)]
pub struct GraphBuilder {
    spec: GraphSpec,
}

impl GraphBuilder {
    pub fn vertex(mut self, id: impl Into<String>) -> Self {
        self.spec.vertices.push(VertexSpec {
            id: id.into(),
            ..Default::default()
        });
        self
    }

    pub fn vertex_with(mut self, id: impl Into<String>, measure: f64, boundary: bool) -> Self {
        self.spec.vertices.push(VertexSpec {
            id: id.into(),
            measure: Some(measure),
            boundary: Some(boundary),
        });
        self
    }

    pub fn edge(self, u: impl Into<String>, v: impl Into<String>) -> Self {
        self.edge_with(u, v, 1.0, 1.0)
    }

    pub fn edge_with(mut self, u: impl Into<String>, v: impl Into<String>, a: f64, length: f64) -> Self {
        self.spec.edges.push(EdgeSpec {
            u: u.into(),
            v: v.into(),
            a: Some(a),
            length: Some(length),
        });
        self
    }

    pub fn build(self) -> Result<WeightedGraph> {
        build_graph(&self.spec)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HalfDegreeStats {
    pub rho: Vec<f64>,
    pub rho_inf: f64,
    pub rho_sup: f64,
}

/// rho(v) = V(v)^{-1} * sum over incident edges of E(e)/2; a self-loop counts once.
pub fn half_degrees(g: &WeightedGraph) -> HalfDegreeStats {
    let rho: Vec<f64> = (0..g.n())
        .map(|v| {
            let s: f64 = g.incident(v).iter().map(|&k| g.edges()[k].measure()).sum();
            s / (2.0 * g.measure(v))
        })
        .collect();
    let rho_inf = if rho.is_empty() {
        0.0
    } else {
        rho.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let rho_sup = rho.iter().copied().fold(0.0, f64::max);
    HalfDegreeStats { rho, rho_inf, rho_sup }
}

/// The measure making every half-degree equal to one.
pub fn natural_measure(g: &WeightedGraph) -> Result<WeightedGraph> {
    let mut measures = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let s: f64 = g.incident(v).iter().map(|&k| g.edges()[k].measure()).sum();
        if s <= 0.0 {
            return Err(Error::IsolatedVertex(g.id(v).to_string()));
        }
        measures.push(s / 2.0);
    }
    g.with_measures(&measures)
}

const REVERSIBILITY_TOL: f64 = 1e-9;

/// Graph of a reversible chain: V = pi, unit lengths, weight pi(u)K(u,v), one
/// edge per unordered pair with positive transition probability. Vertex ids
/// are "1".."n".
pub fn from_markov_chain(pi: &[f64], k: &[Vec<f64>]) -> Result<WeightedGraph> {
    let n = pi.len();
    if k.len() != n || k.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidTransition("matrix shape does not match pi".into()));
    }
    for (i, row) in k.iter().enumerate() {
        if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidTransition(format!("negative or non-finite entry in row {}", i + 1)));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidTransition(format!("row {} sums to {s}", i + 1)));
        }
    }
    let vertices = pi
        .iter()
        .enumerate()
        .map(|(i, &p)| Vertex {
            id: (i + 1).to_string(),
            measure: p,
            boundary: false,
        })
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u..n {
            let fwd = pi[u] * k[u][v];
            let bwd = pi[v] * k[v][u];
            if (fwd - bwd).abs() > REVERSIBILITY_TOL * fwd.abs().max(bwd.abs()) {
                return Err(Error::NotReversible(u + 1, v + 1));
            }
            if fwd > 0.0 {
                edges.push(Edge {
                    u,
                    v,
                    weight: fwd,
                    length: 1.0,
                });
            }
        }
    }
    WeightedGraph::from_parts(vertices, edges)
}

/// Two copies glued along the boundary. Glued vertices keep their ids and get
/// doubled measure; the second copy of an interior vertex `x` is named `x'`.
/// Returns the closed double and the involution swapping the copies.
pub fn double(g: &WeightedGraph) -> Result<(WeightedGraph, Vec<usize>)> {
    if g.is_closed() {
        return Err(Error::EmptyBoundary);
    }
    let n = g.n();
    let mut vertices: Vec<Vertex> = g
        .vertices()
        .iter()
        .map(|v| Vertex {
            id: v.id.clone(),
            measure: if v.boundary { 2.0 * v.measure } else { v.measure },
            boundary: false,
        })
        .collect();
    // mirror[i] = index of the second copy of i
    let mut mirror: Vec<usize> = (0..n).collect();
    for i in 0..n {
        if !g.is_boundary(i) {
            mirror[i] = vertices.len();
            vertices.push(Vertex {
                id: format!("{}'", g.id(i)),
                measure: g.measure(i),
                boundary: false,
            });
        }
    }
    let mut involution: Vec<usize> = mirror.clone();
    involution.resize(vertices.len(), 0);
    for i in 0..n {
        if mirror[i] != i {
            involution[mirror[i]] = i;
        }
    }
    let mut edges = g.edges().to_vec();
    edges.extend(g.edges().iter().map(|e| Edge {
        u: mirror[e.u],
        v: mirror[e.v],
        ..e.clone()
    }));
    Ok((WeightedGraph::from_parts(vertices, edges)?, involution))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LStats {
    /// L(v) = V(v)^{-1} * sum of a_e / l_e over non-loop incident edges.
    pub l: Vec<f64>,
    /// Supremum of L over interior vertices (0 when the interior is empty).
    pub l_sup: f64,
    /// `l_j[j][v]`: sup of L over interior vertices reachable from interior
    /// `v` by a path of at most `j` edges inside the interior; 0 for boundary
    /// vertices.
    pub l_j: Vec<Vec<f64>>,
}

pub fn l_stats(g: &WeightedGraph, jmax: usize) -> LStats {
    let n = g.n();
    let l: Vec<f64> = (0..n)
        .map(|v| {
            let s: f64 = g
                .incident(v)
                .iter()
                .map(|&k| &g.edges()[k])
                .filter(|e| !e.is_loop())
                .map(Edge::conductance)
                .sum();
            s / g.measure(v)
        })
        .collect();
    let l_sup = g.interior().iter().map(|&v| l[v]).fold(0.0, f64::max);
    let mut l_j = vec![vec![0.0; n]; jmax + 1];
    let mut dist = vec![usize::MAX; n];
    for s in g.interior() {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        let mut best = vec![0.0; jmax + 1];
        while let Some(x) = queue.pop_front() {
            let d = dist[x];
            if d > jmax {
                break;
            }
            best[d] = f64::max(best[d], l[x]);
            for &k in g.incident(x) {
                let y = g.edges()[k].other(x);
                if dist[y] == usize::MAX && !g.is_boundary(y) {
                    dist[y] = d + 1;
                    queue.push_back(y);
                }
            }
        }
        let mut run = 0.0;
        for j in 0..=jmax {
            run = f64::max(run, best[j]);
            l_j[j][s] = run;
        }
    }
    LStats { l, l_sup, l_j }
}
