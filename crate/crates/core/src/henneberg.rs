//! Henneberg steps: forward application, replay, and reverse search.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::graph::{Edge, Graph, GraphError, VertexId};
use crate::sparsity::{classify_sparsity, SparsityClass};

/// One inductive step adding the vertex `new_vertex`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum HennebergStep {
    /// New vertex joined to two existing vertices.
    H1 {
        new_vertex: VertexId,
        attach: [VertexId; 2],
    },
    /// New vertex subdividing `split_edge` and joined to `third`.
    H2 {
        new_vertex: VertexId,
        split_edge: [VertexId; 2],
        third: VertexId,
    },
}

impl HennebergStep {
    pub fn new_vertex(&self) -> &VertexId {
        match self {
            HennebergStep::H1 { new_vertex, .. } | HennebergStep::H2 { new_vertex, .. } => {
                new_vertex
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    SingleEdge,
    K4,
}

impl Base {
    pub fn size(self) -> usize {
        match self {
            Base::SingleEdge => 2,
            Base::K4 => 4,
        }
    }
}

/// A base graph (complete on `base_vertices`) followed by Henneberg steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HennebergSequence {
    pub base: Base,
    pub base_vertices: Vec<VertexId>,
    pub steps: Vec<HennebergStep>,
}

impl HennebergSequence {
    pub fn base_graph(&self) -> Result<Graph, GraphError> {
        if self.base_vertices.len() != self.base.size() {
            return Err(GraphError::InvalidStep(format!(
                "base {:?} needs {} vertices, got {}",
                self.base,
                self.base.size(),
                self.base_vertices.len()
            )));
        }
        let mut sorted = self.base_vertices.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.base_vertices.len() {
            return Err(GraphError::InvalidStep("repeated base vertex".into()));
        }
        Ok(Graph::complete(self.base_vertices.iter().cloned()))
    }

    /// Replays the base and every step.
    pub fn replay(&self) -> Result<Graph, GraphError> {
        let mut g = self.base_graph()?;
        for s in &self.steps {
            g = apply_step(&g, s)?;
        }
        Ok(g)
    }
}

/// Applies one step, leaving `g` untouched.
pub fn apply_step(g: &Graph, s: &HennebergStep) -> Result<Graph, GraphError> {
    let w = s.new_vertex();
    if g.contains(w) {
        return Err(GraphError::InvalidStep(format!(
            "vertex {w} already exists"
        )));
    }
    let mut out = g.clone();
    match s {
        HennebergStep::H1 { attach: [a, b], .. } => {
            if a == b {
                return Err(GraphError::InvalidStep(
                    "H1 attach vertices coincide".into(),
                ));
            }
            for x in [a, b] {
                if !g.contains(x) {
                    return Err(GraphError::InvalidStep(format!("unknown vertex {x}")));
                }
            }
            out.add_vertex(w.clone());
            out.add_edge(w, a).map_err(step_err)?;
            out.add_edge(w, b).map_err(step_err)?;
        }
        HennebergStep::H2 {
            split_edge: [a, b],
            third: c,
            ..
        } => {
            if !g.has_edge(a, b) {
                return Err(GraphError::InvalidStep(format!("no edge {a}-{b} to split")));
            }
            if !g.contains(c) || c == a || c == b {
                return Err(GraphError::InvalidStep(format!(
                    "third vertex {c} must exist and differ from {a}, {b}"
                )));
            }
            out.remove_edge(a, b);
            out.add_vertex(w.clone());
            for x in [a, b, c] {
                out.add_edge(w, x).map_err(step_err)?;
            }
        }
    }
    Ok(out)
}

fn step_err(e: GraphError) -> GraphError {
    GraphError::InvalidStep(e.to_string())
}

/// Reverse Henneberg search down to the base graph.
///
/// Laman graphs reduce to a single edge, Laman-plus-one graphs to K4. Every
/// reversal must keep the graph in its class; dead ends are backtracked.
pub fn henneberg_decompose(g: &Graph) -> Result<HennebergSequence, GraphError> {
    let (base, target) = match classify_sparsity(g) {
        SparsityClass::Laman => (Base::SingleEdge, Target::Laman),
        SparsityClass::LamanPlusK { k: 1, .. } => (Base::K4, Target::LamanPlusOne),
        other => {
            return Err(GraphError::NotDecomposable(format!(
                "graph is {other:?}, expected Laman or Laman-plus-one"
            )))
        }
    };
    let mut steps = Vec::new();
    let mut dead = HashSet::new();
    if !reduce(g, base, target, &mut steps, &mut dead) {
        return Err(GraphError::NotDecomposable(
            "reverse search exhausted all class-preserving reversals".into(),
        ));
    }
    steps.reverse();
    let mut base_vertices: Vec<VertexId> = Vec::new();
    let mut h = g.clone();
    for s in steps.iter().rev() {
        h.remove_vertex(s.new_vertex());
    }
    base_vertices.extend(h.vertices().cloned());
    Ok(HennebergSequence {
        base,
        base_vertices,
        steps,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Target {
    Laman,
    LamanPlusOne,
}

impl Target {
    fn holds(self, g: &Graph) -> bool {
        match self {
            Target::Laman => classify_sparsity(g) == SparsityClass::Laman,
            Target::LamanPlusOne => classify_sparsity(g).is_laman_plus_one(),
        }
    }
}

/// Candidate reversals in deterministic order: degree-2 vertices first, then
/// degree-3 vertices with each non-adjacent neighbour pair.
fn reversals(g: &Graph) -> Vec<(HennebergStep, Graph)> {
    let mut out = Vec::new();
    for w in g.vertices().filter(|w| g.degree(w) == 2) {
        let nb: Vec<VertexId> = g.neighbors(w).cloned().collect();
        let mut h = g.clone();
        h.remove_vertex(w);
        out.push((
            HennebergStep::H1 {
                new_vertex: w.clone(),
                attach: [nb[0].clone(), nb[1].clone()],
            },
            h,
        ));
    }
    for w in g.vertices().filter(|w| g.degree(w) == 3) {
        let nb: Vec<VertexId> = g.neighbors(w).cloned().collect();
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            let (a, b, c) = (&nb[i], &nb[j], &nb[k]);
            if g.has_edge(a, b) {
                continue;
            }
            let mut h = g.clone();
            h.remove_vertex(w);
            h.add_edge(a, b).expect("non-adjacent pair");
            out.push((
                HennebergStep::H2 {
                    new_vertex: w.clone(),
                    split_edge: [a.clone(), b.clone()],
                    third: c.clone(),
                },
                h,
            ));
        }
    }
    out
}

fn state_key(g: &Graph) -> Vec<Edge> {
    g.edges().map(|(a, b)| (a.clone(), b.clone())).collect()
}

fn reduce(
    g: &Graph,
    base: Base,
    target: Target,
    steps: &mut Vec<HennebergStep>,
    dead: &mut HashSet<Vec<Edge>>,
) -> bool {
    if g.vertex_count() == base.size() {
        let complete = base.size() * (base.size() - 1) / 2;
        return g.edge_count() == complete;
    }
    if g.vertex_count() < base.size() {
        return false;
    }
    let key = state_key(g);
    if dead.contains(&key) {
        return false;
    }
    for (step, h) in reversals(g) {
        if !target.holds(&h) {
            continue;
        }
        steps.push(step);
        if reduce(&h, base, target, steps, dead) {
            return true;
        }
        steps.pop();
    }
    dead.insert(key);
    false
}
