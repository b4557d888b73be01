//! Random Laman and Laman-plus-one graphs from forward Henneberg steps.
//!
//! By default every step is taken inside a face of a tracked rotation
//! system, so the graphs are planar and can be embedded on the sphere.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{placements, seed_k4};
use crate::graph::{Graph, VertexId};
use crate::henneberg::{apply_step, Base, HennebergStep};
use crate::rotation::RotationSystem;
use crate::sparsity::{classify_sparsity, SparsityClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusBase {
    Edge,
    K4,
}

impl CorpusBase {
    pub fn base(self) -> Base {
        match self {
            CorpusBase::Edge => Base::SingleEdge,
            CorpusBase::K4 => Base::K4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub count: usize,
    pub vertices: usize,
    pub seed: u64,
    pub base: CorpusBase,
    /// Keep every graph planar (required for embedding).
    pub planar: bool,
}

/// A generated graph with the forward steps that built it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusGraph {
    pub graph: Graph,
    pub steps: Vec<HennebergStep>,
}

fn name(i: usize) -> VertexId {
    VertexId(i.to_string())
}

fn base_rotation(base: CorpusBase) -> RotationSystem {
    match base {
        CorpusBase::Edge => {
            let mut m = BTreeMap::new();
            m.insert(name(0), vec![name(1)]);
            m.insert(name(1), vec![name(0)]);
            RotationSystem::from_map(m)
        }
        CorpusBase::K4 => seed_k4().rotation_system(),
    }
}

/// One random graph with `vertices` vertices (at least the base size).
pub fn random_graph(base: CorpusBase, vertices: usize, planar: bool, seed: u64) -> CorpusGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rot = base_rotation(base);
    let mut g = rot.graph();
    let mut steps = Vec::new();
    for i in g.vertex_count()..vertices {
        let w = name(i);
        let step = if planar {
            planar_step(&rot, &w, &mut rng)
        } else {
            free_step(&g, &w, &mut rng)
        };
        if planar {
            let options = placements(&rot, &step);
            let spec = options
                .choose(&mut rng)
                .expect("planar step was drawn from a face");
            rot = spec.apply(&rot);
        }
        g = apply_step(&g, &step).expect("generated step is valid");
        steps.push(step);
    }
    CorpusGraph { graph: g, steps }
}

fn planar_step(rot: &RotationSystem, w: &VertexId, rng: &mut ChaCha8Rng) -> HennebergStep {
    let faces = rot.faces();
    if rot.vertices().count() >= 3 && rng.random_bool(0.5) {
        // type 2: a random edge that separates two faces, and a third vertex
        // on the merged face
        let g = rot.graph();
        let edges: Vec<(VertexId, VertexId)> =
            g.edges().map(|(a, b)| (a.clone(), b.clone())).collect();
        for _ in 0..8 {
            let (a, b) = edges.choose(rng).unwrap().clone();
            let mut r = rot.clone();
            r.remove_edge(&a, &b);
            let merged: Vec<VertexId> = r
                .faces()
                .into_iter()
                .find(|f| f.contains(&a) && f.contains(&b))
                .unwrap_or_default()
                .into_iter()
                .filter(|x| *x != a && *x != b)
                .collect();
            if let Some(c) = merged.choose(rng) {
                let step = HennebergStep::H2 {
                    new_vertex: w.clone(),
                    split_edge: [a, b],
                    third: c.clone(),
                };
                if !placements(rot, &step).is_empty() {
                    return step;
                }
            }
        }
    }
    loop {
        let face = faces.choose(rng).unwrap();
        let mut distinct = face.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() >= 2 {
            let pair: Vec<&VertexId> = distinct.choose_multiple(rng, 2).collect();
            return HennebergStep::H1 {
                new_vertex: w.clone(),
                attach: [pair[0].clone(), pair[1].clone()],
            };
        }
    }
}

fn free_step(g: &Graph, w: &VertexId, rng: &mut ChaCha8Rng) -> HennebergStep {
    let vs: Vec<VertexId> = g.vertices().cloned().collect();
    if vs.len() >= 3 && rng.random_bool(0.5) {
        let edges: Vec<(VertexId, VertexId)> =
            g.edges().map(|(a, b)| (a.clone(), b.clone())).collect();
        let (a, b) = edges.choose(rng).unwrap().clone();
        let others: Vec<&VertexId> = vs.iter().filter(|x| **x != a && **x != b).collect();
        let c = (*others.choose(rng).unwrap()).clone();
        return HennebergStep::H2 {
            new_vertex: w.clone(),
            split_edge: [a, b],
            third: c,
        };
    }
    let pair: Vec<&VertexId> = vs.choose_multiple(rng, 2).collect();
    HennebergStep::H1 {
        new_vertex: w.clone(),
        attach: [pair[0].clone(), pair[1].clone()],
    }
}

/// `spec.count` graphs; graph `i` uses sub-seed `spec.seed ^ i`, so each is
/// independent of the others.
pub fn generate(spec: &CorpusSpec) -> Vec<CorpusGraph> {
    (0..spec.count)
        .map(|i| {
            let out = random_graph(spec.base, spec.vertices, spec.planar, spec.seed ^ i as u64);
            let class = classify_sparsity(&out.graph);
            let ok = match spec.base {
                CorpusBase::Edge => class == SparsityClass::Laman,
                CorpusBase::K4 => class.is_laman_plus_one(),
            };
            assert!(ok, "generated graph has class {class:?}");
            out
        })
        .collect()
}
