//! Canonical labeling for small graphs (individualization + refinement).
//!
//! Exponential in the worst case; intended for the instance sizes used by
//! the round-trip checks (a few dozen vertices at most).

use std::collections::BTreeMap;

use crate::graph::Graph;

/// Label-free form of a graph: vertex count plus the sorted edge list under
/// the lexicographically smallest discrete labeling found by the search.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

pub fn canonical_form(g: &Graph) -> CanonicalForm {
    let (ids, edges) = g.indexed();
    let n = ids.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let colors = refine(&adj, vec![0; n]);
    let mut best: Option<Vec<(usize, usize)>> = None;
    search(&adj, &edges, colors, &mut best);
    CanonicalForm {
        vertex_count: n,
        edges: best.unwrap_or_default(),
    }
}

pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && canonical_form(a) == canonical_form(b)
}

/// Equitable refinement: colour = rank of (colour, sorted neighbour colours).
fn refine(adj: &[Vec<usize>], mut colors: Vec<usize>) -> Vec<usize> {
    let n = adj.len();
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nc: Vec<usize> = adj[v].iter().map(|&w| colors[w]).collect();
                nc.sort_unstable();
                (colors[v], nc)
            })
            .collect();
        let mut distinct: Vec<&(usize, Vec<usize>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let rank: BTreeMap<&(usize, Vec<usize>), usize> =
            distinct.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let next: Vec<usize> = sigs.iter().map(|s| rank[s]).collect();
        let before = count_distinct(&colors);
        let after = distinct.len();
        colors = next;
        if after == before {
            return colors;
        }
    }
}

fn count_distinct(c: &[usize]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn search(
    adj: &[Vec<usize>],
    edges: &[(usize, usize)],
    colors: Vec<usize>,
    best: &mut Option<Vec<(usize, usize)>>,
) {
    let n = colors.len();
    let mut counts = vec![0usize; n];
    for &c in &colors {
        counts[c] += 1;
    }
    let target = (0..n).find(|&c| counts[c] > 1);
    let Some(cell) = target else {
        let mut relabeled: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (colors[a], colors[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        relabeled.sort_unstable();
        if best.as_ref().is_none_or(|b| relabeled < *b) {
            *best = Some(relabeled);
        }
        return;
    };
    for v in (0..n).filter(|&v| colors[v] == cell) {
        let split: Vec<usize> = (0..n)
            .map(|w| {
                if w == v {
                    2 * colors[w]
                } else {
                    2 * colors[w] + 1
                }
            })
            .collect();
        search(adj, edges, refine(adj, split), best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;

    #[test]
    fn relabeling_preserves_form() {
        let mut g = Graph::complete(["a", "b", "c", "d"]);
        g.add_vertex("e".into());
        g.add_edge(&"a".into(), &"e".into()).unwrap();
        g.add_edge(&"c".into(), &"e".into()).unwrap();
        let h = g.relabel(|v| VertexId(format!("z{}", 5 - (v.0.as_bytes()[0] - b'a'))));
        assert!(is_isomorphic(&g, &h));
    }

    #[test]
    fn distinguishes_non_isomorphic() {
        // path on 4 vertices vs star on 4 vertices
        let p = Graph::from_parts(
            ["a", "b", "c", "d"],
            [("a", "b"), ("b", "c"), ("c", "d")]
                .map(|(x, y)| (VertexId::from(x), VertexId::from(y))),
        )
        .unwrap();
        let s = Graph::from_parts(
            ["a", "b", "c", "d"],
            [("a", "b"), ("a", "c"), ("a", "d")]
                .map(|(x, y)| (VertexId::from(x), VertexId::from(y))),
        )
        .unwrap();
        assert!(!is_isomorphic(&p, &s));
    }

    #[test]
    fn regular_graphs_need_individualization() {
        // C6 vs two disjoint triangles: both 2-regular
        let cyc: Vec<(VertexId, VertexId)> = (0..6)
            .map(|i| (VertexId(i.to_string()), VertexId(((i + 1) % 6).to_string())))
            .collect();
        let c6 = Graph::from_parts((0..6).map(|i| i.to_string()), cyc).unwrap();
        let tris: Vec<(VertexId, VertexId)> = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
            .iter()
            .map(|&(a, b): &(i32, i32)| (VertexId(a.to_string()), VertexId(b.to_string())))
            .collect();
        let two = Graph::from_parts((0..6).map(|i| i.to_string()), tris).unwrap();
        assert!(!is_isomorphic(&c6, &two));
        let c6r = c6.relabel(|v| VertexId(format!("x{}", (v.0.parse::<u32>().unwrap() * 5) % 6)));
        assert!(is_isomorphic(&c6, &c6r));
    }
}
