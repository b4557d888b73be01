#![allow(dead_code)]

use pseudotile::corpus::{random_graph, CorpusBase};
use pseudotile::embed::{embed_laman_plus_one, EmbedderConfig};
use pseudotile::graph::Graph;
use pseudotile::tiling::Tiling;

/// A random planar Laman-plus-one graph on `v` vertices and its embedding.
pub fn embedded(seed: u64, v: usize) -> (Graph, Tiling) {
    let g = random_graph(CorpusBase::K4, v, true, seed).graph;
    let t = embed_laman_plus_one(&g, &EmbedderConfig::with_seed(seed)).unwrap();
    (g, t)
}

pub fn corpus(n: u64) -> Vec<(Graph, Tiling)> {
    (0..n).map(|s| embedded(s, 5 + (s % 6) as usize)).collect()
}
