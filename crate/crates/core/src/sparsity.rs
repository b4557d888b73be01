//! (k, l)-sparsity via the pebble game, and the Laman classification built
//! on top of it.

use serde::{Deserialize, Serialize};

use crate::graph::{edge, Edge, Graph};

/// Incremental (k, l) pebble game on `n` vertices (requires `0 <= l < 2k`).
///
/// Every vertex starts with `k` pebbles. An edge is accepted when `l + 1`
/// pebbles can be gathered on its endpoints; it is then covered by one of
/// them and oriented away from the covering vertex.
#[derive(Clone, Debug)]
pub struct PebbleGame {
    k: usize,
    l: usize,
    pebbles: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl PebbleGame {
    pub fn new(n: usize, k: usize, l: usize) -> Self {
        assert!(l < 2 * k, "pebble game needs 0 <= l < 2k");
        PebbleGame {
            k,
            l,
            pebbles: vec![k; n],
            out: vec![Vec::new(); n],
        }
    }

    /// Tries to insert edge `{u, v}`; returns whether it was independent.
    pub fn insert(&mut self, u: usize, v: usize) -> bool {
        debug_assert_ne!(u, v);
        while self.pebbles[u] + self.pebbles[v] < self.l + 1 {
            let got = (self.pebbles[u] < self.k && self.gather(u, v))
                || (self.pebbles[v] < self.k && self.gather(v, u));
            if !got {
                return false;
            }
        }
        if self.pebbles[u] > 0 {
            self.pebbles[u] -= 1;
            self.out[u].push(v);
        } else {
            self.pebbles[v] -= 1;
            self.out[v].push(u);
        }
        true
    }

    /// Moves one free pebble to `target` along a reversed directed path,
    /// never touching `frozen`.
    fn gather(&mut self, target: usize, frozen: usize) -> bool {
        let n = self.pebbles.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[target] = true;
        seen[frozen] = true;
        let mut stack = vec![target];
        let mut found = None;
        'search: while let Some(x) = stack.pop() {
            for &y in &self.out[x] {
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                parent[y] = x;
                if self.pebbles[y] > 0 {
                    found = Some(y);
                    break 'search;
                }
                stack.push(y);
            }
        }
        let Some(src) = found else {
            return false;
        };
        // reverse the path target -> ... -> src
        self.pebbles[src] -= 1;
        let mut y = src;
        while y != target {
            let x = parent[y];
            let pos = self.out[x].iter().position(|&z| z == y).unwrap();
            self.out[x].swap_remove(pos);
            self.out[y].push(x);
            y = x;
        }
        self.pebbles[target] += 1;
        true
    }
}

/// Runs the (k, l) game over the edges in sorted order and splits them into
/// accepted (independent) and rejected edges.
pub fn pebble_partition(g: &Graph, k: usize, l: usize) -> (Vec<Edge>, Vec<Edge>) {
    let (ids, edges) = g.indexed();
    let mut game = PebbleGame::new(ids.len(), k, l);
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for (i, j) in edges {
        let e = edge(&ids[i], &ids[j]);
        if game.insert(i, j) {
            accepted.push(e);
        } else {
            rejected.push(e);
        }
    }
    (accepted, rejected)
}

/// True iff every vertex subset of size m spanning at least one edge spans
/// at most `k*m - l` edges. With the default `(2, 3)` this is Laman sparsity.
pub fn is_sparse(g: &Graph, k: usize, l: usize) -> bool {
    pebble_partition(g, k, l).1.is_empty()
}

/// Laman-type classification of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum SparsityClass {
    Laman,
    /// Becomes Laman after deleting the `k` witness edges.
    LamanPlusK {
        k: usize,
        witness: Vec<Edge>,
    },
    Deficient,
    Other,
}

impl SparsityClass {
    pub fn is_laman_plus_one(&self) -> bool {
        matches!(self, SparsityClass::LamanPlusK { k: 1, .. })
    }
}

pub fn classify_sparsity(g: &Graph) -> SparsityClass {
    let v = g.vertex_count();
    let e = g.edge_count();
    if v < 2 || e < 2 * v - 3 {
        return SparsityClass::Deficient;
    }
    let laman_count = 2 * v - 3;
    let (accepted, rejected) = pebble_partition(g, 2, 3);
    if accepted.len() != laman_count {
        return SparsityClass::Other;
    }
    if rejected.is_empty() {
        SparsityClass::Laman
    } else {
        SparsityClass::LamanPlusK {
            k: rejected.len(),
            witness: rejected,
        }
    }
}

pub fn is_laman(g: &Graph) -> bool {
    classify_sparsity(g) == SparsityClass::Laman
}

/// A rigidity circuit: `e = 2v - 2` and deleting any single edge leaves a
/// (2,3)-sparse graph, which is the same as every proper vertex subset of
/// size m spanning at most `2m - 3` edges.
pub fn is_rigidity_circuit(g: &Graph) -> bool {
    let v = g.vertex_count();
    if v < 2 || g.edge_count() != 2 * v - 2 {
        return false;
    }
    let edges: Vec<Edge> = g.edges().map(|(a, b)| (a.clone(), b.clone())).collect();
    edges
        .iter()
        .all(|e| is_sparse(&g.without_edges(std::iter::once(e)), 2, 3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;

    fn g(vs: &[&str], es: &[(&str, &str)]) -> Graph {
        Graph::from_parts(
            vs.iter().copied(),
            es.iter()
                .map(|(a, b)| (VertexId::from(*a), VertexId::from(*b))),
        )
        .unwrap()
    }

    #[test]
    fn small_examples() {
        let k4 = Graph::complete(["a", "b", "c", "d"]);
        assert!(!is_sparse(&k4, 2, 3));
        assert!(is_sparse(&g(&["a", "b"], &[("a", "b")]), 2, 3));
        let tri = Graph::complete(["a", "b", "c"]);
        assert!(is_sparse(&tri, 2, 3));
        assert!(is_sparse(&Graph::new(), 2, 3));
        assert!(is_sparse(&g(&["a"], &[]), 2, 3));
    }

    #[test]
    fn classification_examples() {
        let k4 = Graph::complete(["a", "b", "c", "d"]);
        match classify_sparsity(&k4) {
            SparsityClass::LamanPlusK { k, witness } => {
                assert_eq!(k, 1);
                assert_eq!(witness.len(), 1);
                assert!(is_laman(&k4.without_edges(&witness)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let mut k4m = k4.clone();
        k4m.remove_edge(&"a".into(), &"b".into());
        assert_eq!(classify_sparsity(&k4m), SparsityClass::Laman);
        assert_eq!(classify_sparsity(&g(&["a"], &[])), SparsityClass::Deficient);
        let path = g(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        assert_eq!(classify_sparsity(&path), SparsityClass::Deficient);
        // K4 plus a pendant triangle-free vertex of degree 1: e = 2v - 3 but dependent
        let mut other = k4.clone();
        other.add_vertex("e".into());
        other.add_edge(&"a".into(), &"e".into()).unwrap();
        assert_eq!(classify_sparsity(&other), SparsityClass::Other);
    }

    #[test]
    fn circuits() {
        let k4 = Graph::complete(["a", "b", "c", "d"]);
        assert!(is_rigidity_circuit(&k4));
        assert!(!is_rigidity_circuit(&Graph::complete(["a", "b", "c"])));
        let mut h = k4.clone();
        h.add_vertex("e".into());
        h.add_edge(&"a".into(), &"e".into()).unwrap();
        h.add_edge(&"b".into(), &"e".into()).unwrap();
        assert!(matches!(
            classify_sparsity(&h),
            SparsityClass::LamanPlusK { k: 1, .. }
        ));
        assert!(!is_rigidity_circuit(&h));
    }

    #[test]
    fn k5_is_laman_plus_three() {
        // v=5, e=10, 2v-3 = 7
        let k5 = Graph::complete(["a", "b", "c", "d", "e"]);
        assert!(matches!(
            classify_sparsity(&k5),
            SparsityClass::LamanPlusK { k: 3, .. }
        ));
    }

    #[test]
    fn general_kl_games() {
        // (1,1): forests
        let tri = Graph::complete(["a", "b", "c"]);
        assert!(!is_sparse(&tri, 1, 1));
        let path = g(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        assert!(is_sparse(&path, 1, 1));
        // (2,2): K4 has 6 = 2*4 - 2 edges
        assert!(is_sparse(&Graph::complete(["a", "b", "c", "d"]), 2, 2));
    }
}
