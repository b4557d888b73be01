//! Combinatorial rotation systems: the cyclic order of neighbours around
//! each vertex, which fixes the face structure of an embedded graph.
//!
//! Orders are counter-clockwise seen from outside the sphere. Walking a face
//! along half-edge `x -> y` continues to `y -> z` where `z` precedes `x` in
//! the rotation at `y`, so faces come out counter-clockwise as well.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Graph, VertexId};

/// A corner of a face, named by the half-edge entering it: `(x, y)` is the
/// corner at `y` between the arrival from `x` and the departure that follows.
pub type Corner = (VertexId, VertexId);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RotationSystem {
    rot: BTreeMap<VertexId, Vec<VertexId>>,
}

impl RotationSystem {
    pub fn from_map(rot: BTreeMap<VertexId, Vec<VertexId>>) -> Self {
        RotationSystem { rot }
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.rot.keys()
    }

    pub fn neighbors(&self, v: &VertexId) -> &[VertexId] {
        self.rot.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.rot.contains_key(v)
    }

    pub fn graph(&self) -> Graph {
        let mut g = Graph::new();
        for v in self.rot.keys() {
            g.add_vertex(v.clone());
        }
        for (v, nb) in &self.rot {
            for w in nb {
                if v < w {
                    g.add_edge(v, w).expect("rotation neighbours are vertices");
                }
            }
        }
        g
    }

    fn position(&self, at: &VertexId, of: &VertexId) -> usize {
        self.rot[at]
            .iter()
            .position(|x| x == of)
            .unwrap_or_else(|| panic!("{of} is not a neighbour of {at}"))
    }

    /// Successor of half-edge `x -> y` along its face.
    pub fn next(&self, x: &VertexId, y: &VertexId) -> VertexId {
        let r = &self.rot[y];
        let i = self.position(y, x);
        r[(i + r.len() - 1) % r.len()].clone()
    }

    /// Half-edges of the face to the left of `x -> y`, starting with it.
    pub fn face_walk(&self, x: &VertexId, y: &VertexId) -> Vec<Corner> {
        let start = (x.clone(), y.clone());
        let mut out = vec![start.clone()];
        let (mut a, mut b) = start.clone();
        loop {
            let c = self.next(&a, &b);
            a = b;
            b = c;
            if (a.clone(), b.clone()) == start {
                return out;
            }
            out.push((a.clone(), b.clone()));
        }
    }

    /// All faces as half-edge cycles, each starting at its smallest half-edge,
    /// sorted.
    pub fn face_half_edges(&self) -> Vec<Vec<Corner>> {
        let mut seen: BTreeSet<Corner> = BTreeSet::new();
        let mut faces = Vec::new();
        for (x, nb) in &self.rot {
            for y in nb {
                let h = (x.clone(), y.clone());
                if seen.contains(&h) {
                    continue;
                }
                let walk = self.face_walk(x, y);
                seen.extend(walk.iter().cloned());
                faces.push(walk);
            }
        }
        faces.sort();
        faces
    }

    /// Faces as vertex cycles.
    pub fn faces(&self) -> Vec<Vec<VertexId>> {
        self.face_half_edges()
            .into_iter()
            .map(|f| f.into_iter().map(|(x, _)| x).collect())
            .collect()
    }

    pub fn face_count(&self) -> usize {
        self.face_half_edges().len()
    }

    /// Euler characteristic check: the rotation describes a sphere.
    pub fn is_spherical(&self) -> bool {
        let v = self.rot.len() as i64;
        let e = self.rot.values().map(Vec::len).sum::<usize>() as i64 / 2;
        v - e + self.face_count() as i64 == 2
    }

    pub fn remove_edge(&mut self, a: &VertexId, b: &VertexId) -> bool {
        let ia = self.rot.get(a).and_then(|r| r.iter().position(|x| x == b));
        let ib = self.rot.get(b).and_then(|r| r.iter().position(|x| x == a));
        match (ia, ib) {
            (Some(i), Some(j)) => {
                self.rot.get_mut(a).unwrap().remove(i);
                self.rot.get_mut(b).unwrap().remove(j);
                true
            }
            _ => false,
        }
    }

    /// Adds vertex `w` inside one face, joined to the vertices of `corners`.
    /// The corners must belong to a single face and be listed in face order.
    pub fn insert_vertex(&mut self, w: &VertexId, corners: &[Corner]) {
        for (x, y) in corners {
            let i = self.position(y, x);
            // w goes just before x, i.e. inside the corner (x, y)
            self.rot.get_mut(y).unwrap().insert(i, w.clone());
        }
        self.rot
            .insert(w.clone(), corners.iter().map(|(_, y)| y.clone()).collect());
    }

    /// Relabels vertices through `f`, which must be injective.
    pub fn relabel(&self, f: impl Fn(&VertexId) -> VertexId) -> Self {
        RotationSystem {
            rot: self
                .rot
                .iter()
                .map(|(v, nb)| (f(v), nb.iter().map(&f).collect()))
                .collect(),
        }
    }

    /// Rotation with every cyclic order rotated to start at its smallest
    /// neighbour, for comparison.
    pub fn normalized(&self) -> Self {
        RotationSystem {
            rot: self
                .rot
                .iter()
                .map(|(v, nb)| {
                    let mut nb = nb.clone();
                    if let Some(k) = (0..nb.len()).min_by(|&i, &j| nb[i].cmp(&nb[j])) {
                        nb.rotate_left(k);
                    }
                    (v.clone(), nb)
                })
                .collect(),
        }
    }
}
