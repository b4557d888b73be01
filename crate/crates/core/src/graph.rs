//! Simple undirected graphs keyed by opaque string ids.
//!
//! Vertex ids are kept in a `BTreeMap`, so every iteration order in this
//! crate (pebble game, Henneberg search, face traversal) follows sorted ids
//! and is reproducible run to run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque vertex identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

impl VertexId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_owned())
    }
}

impl From<String> for VertexId {
    fn from(s: String) -> Self {
        VertexId(s)
    }
}

/// An undirected edge with its endpoints in sorted order.
pub type Edge = (VertexId, VertexId);

/// Returns the edge `{a, b}` with endpoints sorted.
pub fn edge(a: &VertexId, b: &VertexId) -> Edge {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error("invalid Henneberg step: {0}")]
    InvalidStep(String),
    #[error("no Henneberg decomposition: {0}")]
    NotDecomposable(String),
}

/// A simple undirected graph: no loops, no parallel edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from declared vertices and an edge list, rejecting
    /// loops, repeated edges and undeclared endpoints.
    pub fn from_parts<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut g = Graph::new();
        for v in vertices {
            let v = v.into();
            if !g.add_vertex(v.clone()) {
                return Err(GraphError::Malformed(format!("duplicate vertex {v}")));
            }
        }
        for (a, b) in edges {
            g.add_edge(&a, &b)?;
        }
        Ok(g)
    }

    /// Complete graph on the given ids.
    pub fn complete<I>(ids: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<VertexId>,
    {
        let ids: Vec<VertexId> = ids.into_iter().map(Into::into).collect();
        let mut g = Graph::new();
        for v in &ids {
            g.add_vertex(v.clone());
        }
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                g.add_edge(a, b).expect("distinct ids");
            }
        }
        g
    }

    /// Returns false if the vertex was already present.
    pub fn add_vertex(&mut self, v: VertexId) -> bool {
        if self.adj.contains_key(&v) {
            return false;
        }
        self.adj.insert(v, BTreeSet::new());
        true
    }

    pub fn add_edge(&mut self, a: &VertexId, b: &VertexId) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::Malformed(format!("loop at {a}")));
        }
        if !self.adj.contains_key(a) || !self.adj.contains_key(b) {
            return Err(GraphError::Malformed(format!(
                "edge {a}-{b} uses an undeclared vertex"
            )));
        }
        if self.adj[a].contains(b) {
            return Err(GraphError::Malformed(format!("parallel edge {a}-{b}")));
        }
        self.adj.get_mut(a).unwrap().insert(b.clone());
        self.adj.get_mut(b).unwrap().insert(a.clone());
        Ok(())
    }

    pub fn remove_edge(&mut self, a: &VertexId, b: &VertexId) -> bool {
        let removed = self.adj.get_mut(a).is_some_and(|s| s.remove(b));
        if removed {
            self.adj.get_mut(b).unwrap().remove(a);
        }
        removed
    }

    /// Removes a vertex and its incident edges; returns the former neighbours.
    pub fn remove_vertex(&mut self, v: &VertexId) -> Option<BTreeSet<VertexId>> {
        let nbrs = self.adj.remove(v)?;
        for n in &nbrs {
            self.adj.get_mut(n).unwrap().remove(v);
        }
        Some(nbrs)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.adj.contains_key(v)
    }

    pub fn has_edge(&self, a: &VertexId, b: &VertexId) -> bool {
        self.adj.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn degree(&self, v: &VertexId) -> usize {
        self.adj.get(v).map_or(0, BTreeSet::len)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.adj.keys()
    }

    pub fn neighbors(&self, v: &VertexId) -> impl Iterator<Item = &VertexId> {
        self.adj.get(v).into_iter().flatten()
    }

    /// Edges with sorted endpoints, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId)> {
        self.adj
            .iter()
            .flat_map(|(a, nb)| nb.range(a.clone()..).map(move |b| (a, b)))
            .filter(|(a, b)| a != b)
    }

    /// Dense form: sorted vertex list and index pairs `(i, j)` with `i < j`,
    /// listed in lexicographic order.
    pub fn indexed(&self) -> (Vec<VertexId>, Vec<(usize, usize)>) {
        let ids: Vec<VertexId> = self.adj.keys().cloned().collect();
        let index: BTreeMap<&VertexId, usize> =
            ids.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let edges = self.edges().map(|(a, b)| (index[a], index[b])).collect();
        (ids, edges)
    }

    /// Applies an injective relabeling.
    pub fn relabel<F: Fn(&VertexId) -> VertexId>(&self, f: F) -> Graph {
        let mut g = Graph::new();
        for v in self.vertices() {
            assert!(g.add_vertex(f(v)), "relabeling must be injective");
        }
        for (a, b) in self.edges() {
            g.add_edge(&f(a), &f(b)).expect("relabeled edge");
        }
        g
    }

    /// Subgraph with the listed edges removed.
    pub fn without_edges<'a, I>(&self, edges: I) -> Graph
    where
        I: IntoIterator<Item = &'a Edge>,
    {
        let mut g = self.clone();
        for (a, b) in edges {
            g.remove_edge(a, b);
        }
        g
    }
}

/// On-disk form: `{"vertices": [...], "edges": [[a, b], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<[VertexId; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self, Self::Error> {
        Graph::from_parts(j.vertices, j.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            vertices: g.vertices().cloned().collect(),
            edges: g.edges().map(|(a, b)| [a.clone(), b.clone()]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VertexId {
        VertexId::from(s)
    }

    #[test]
    fn rejects_loops_and_parallel_edges() {
        let mut g = Graph::complete(["a", "b"]);
        assert!(matches!(
            g.add_edge(&v("a"), &v("a")),
            Err(GraphError::Malformed(_))
        ));
        assert!(matches!(
            g.add_edge(&v("b"), &v("a")),
            Err(GraphError::Malformed(_))
        ));
        assert!(matches!(
            g.add_edge(&v("a"), &v("z")),
            Err(GraphError::Malformed(_))
        ));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = Graph::complete(["a", "b", "c", "d"]);
        let s = serde_json::to_string(&g).unwrap();
        let back: Graph = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);

        let bad = r#"{"vertices":["a","b"],"edges":[["a","b"],["b","a"]]}"#;
        assert!(serde_json::from_str::<Graph>(bad).is_err());
        let undeclared = r#"{"vertices":["a"],"edges":[["a","b"]]}"#;
        assert!(serde_json::from_str::<Graph>(undeclared).is_err());
    }

    #[test]
    fn edges_are_sorted_pairs() {
        let g = Graph::complete(["c", "a", "b"]);
        let e: Vec<_> = g.edges().map(|(a, b)| (a.0.clone(), b.0.clone())).collect();
        assert_eq!(
            e,
            vec![
                ("a".into(), "b".into()),
                ("a".into(), "c".into()),
                ("b".into(), "c".into())
            ]
        );
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn remove_vertex_drops_incident_edges() {
        let mut g = Graph::complete(["a", "b", "c", "d"]);
        let nb = g.remove_vertex(&v("d")).unwrap();
        assert_eq!(nb.len(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree(&v("a")), 2);
    }
}
