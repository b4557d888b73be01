//! Half-edge cell complexes on the sphere with geodesic edges.
//!
//! Faces are explicit vertex cycles, oriented counter-clockwise as seen from
//! outside the sphere (face interior on the left of the walk). A [`Tiling`]
//! is validated once at construction and immutable afterwards.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::rotation::RotationSystem;
use crate::sphere::{
    arcs_cross, corner_angle, AngleClass, AngleKind, Arc, GeomError, SpherePoint, EPS_ANGLE,
};

/// Tolerance on the sum of corner angles around a vertex.
pub const EPS_ANGLE_SUM: f64 = 1e-9;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TilingError {
    #[error("malformed tiling: {0}")]
    Malformed(String),
    #[error("edges {0} and {1} cross")]
    CrossingEdges(String, String),
    #[error("not a spherical complex: {0}")]
    NonSphericalComplex(String),
    #[error(transparent)]
    Degenerate(#[from] GeomError),
    #[error("face {0} is neither a pseudo-triangle nor a pseudo-di-gon")]
    NonNiceTiling(usize),
}

/// Edge input: endpoints plus the choice of minor or major great-circle arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpec {
    pub a: VertexId,
    pub b: VertexId,
    pub major: bool,
}

impl EdgeSpec {
    pub fn minor(a: impl Into<VertexId>, b: impl Into<VertexId>) -> Self {
        EdgeSpec {
            a: a.into(),
            b: b.into(),
            major: false,
        }
    }

    pub fn major(a: impl Into<VertexId>, b: impl Into<VertexId>) -> Self {
        EdgeSpec {
            a: a.into(),
            b: b.into(),
            major: true,
        }
    }
}

/// Stored edge: vertex indices with `a < b` and the arc traversed `a -> b`.
#[derive(Clone, Debug)]
pub struct TilingEdge {
    pub a: usize,
    pub b: usize,
    pub major: bool,
    pub arc: Arc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfEdge {
    pub origin: usize,
    pub target: usize,
    pub twin: usize,
    pub next: usize,
    pub prev: usize,
    pub face: usize,
    pub edge: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TileTag {
    PseudoTriangle,
    PseudoDiGon,
    ConvexTile,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileClass {
    pub tag: TileTag,
    pub convex_corner_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointedReport {
    pub pointed: bool,
    pub non_pointed: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum NiceViolation {
    NotPointed { vertex: VertexId },
    Tile { face: usize, class: TileClass },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceReport {
    pub nice: bool,
    pub violation: Option<NiceViolation>,
}

/// Integer counts and the three residuals
/// `v - e + f2 + f3 - 2`, `c - (2 f2 + 3 f3)` and `c - (2e - v)`,
/// where `c` is the number of convex face corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub v: usize,
    pub e: usize,
    pub c: usize,
    pub f2: usize,
    pub f3: usize,
    pub euler_residual: i64,
    pub corner_residual_a: i64,
    pub corner_residual_b: i64,
}

impl CountReport {
    pub fn residuals_zero(&self) -> bool {
        self.euler_residual == 0 && self.corner_residual_a == 0 && self.corner_residual_b == 0
    }
}

#[derive(Clone, Debug)]
pub struct Tiling {
    ids: Vec<VertexId>,
    points: Vec<SpherePoint>,
    index: HashMap<VertexId, usize>,
    edges: Vec<TilingEdge>,
    faces: Vec<Vec<usize>>,
    face_half_edges: Vec<Vec<usize>>,
    half_edges: Vec<HalfEdge>,
    /// Angle at `origin(h)` inside `face(h)`, between `prev(h)` and `h`.
    corners: Vec<f64>,
}

impl PartialEq for Tiling {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
            && self.points == other.points
            && self.faces == other.faces
            && self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .zip(&other.edges)
                .all(|(x, y)| (x.a, x.b, x.major) == (y.a, y.b, y.major))
    }
}

impl Tiling {
    /// Validates and builds a tiling: twin structure, Euler relation,
    /// pairwise non-crossing arcs, and a full turn of corner angles at every
    /// vertex (which pins the face cycles to the geometric rotation).
    pub fn build(
        vertices: Vec<(VertexId, SpherePoint)>,
        edges: Vec<EdgeSpec>,
        faces: Vec<Vec<VertexId>>,
    ) -> Result<Self, TilingError> {
        let mut vertices = vertices;
        vertices.sort_by(|x, y| x.0.cmp(&y.0));
        for w in vertices.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(TilingError::Malformed(format!(
                    "duplicate vertex {}",
                    w[0].0
                )));
            }
        }
        let ids: Vec<VertexId> = vertices.iter().map(|(id, _)| id.clone()).collect();
        let points: Vec<SpherePoint> = vertices.iter().map(|(_, p)| *p).collect();
        let index: HashMap<VertexId, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i].distance(&points[j]) < EPS_ANGLE {
                    return Err(GeomError::Degenerate(format!(
                        "vertices {} and {} coincide",
                        ids[i], ids[j]
                    ))
                    .into());
                }
            }
        }
        let lookup = |v: &VertexId| {
            index
                .get(v)
                .copied()
                .ok_or_else(|| TilingError::Malformed(format!("unknown vertex {v}")))
        };

        let mut stored: Vec<TilingEdge> = Vec::with_capacity(edges.len());
        for spec in &edges {
            let (i, j) = (lookup(&spec.a)?, lookup(&spec.b)?);
            if i == j {
                return Err(TilingError::Malformed(format!("loop at {}", spec.a)));
            }
            let (a, b) = (i.min(j), i.max(j));
            let arc = Arc::new(points[a], points[b], spec.major)?;
            stored.push(TilingEdge {
                a,
                b,
                major: spec.major,
                arc,
            });
        }
        stored.sort_by_key(|e| (e.a, e.b));
        for w in stored.windows(2) {
            if (w[0].a, w[0].b) == (w[1].a, w[1].b) {
                return Err(TilingError::Malformed(format!(
                    "parallel edge {}-{}",
                    ids[w[0].a], ids[w[0].b]
                )));
            }
        }
        let edge_index: HashMap<(usize, usize), usize> = stored
            .iter()
            .enumerate()
            .map(|(k, e)| ((e.a, e.b), k))
            .collect();

        for i in 0..stored.len() {
            for j in i + 1..stored.len() {
                if arcs_cross(&stored[i].arc, &stored[j].arc)? {
                    let name = |k: usize| format!("{}-{}", ids[stored[k].a], ids[stored[k].b]);
                    return Err(TilingError::CrossingEdges(name(i), name(j)));
                }
            }
        }

        let mut cycles: Vec<Vec<usize>> = Vec::with_capacity(faces.len());
        for f in &faces {
            if f.len() < 3 {
                return Err(TilingError::Malformed(format!(
                    "face cycle of length {} (minimum 3)",
                    f.len()
                )));
            }
            cycles.push(f.iter().map(lookup).collect::<Result<_, _>>()?);
        }
        for c in cycles.iter_mut() {
            let start = (0..c.len()).min_by_key(|&k| c[k]).unwrap();
            c.rotate_left(start);
        }
        cycles.sort();

        let mut half_edges: Vec<HalfEdge> = Vec::with_capacity(2 * stored.len());
        let mut face_half_edges = Vec::with_capacity(cycles.len());
        let mut by_ends: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, c) in cycles.iter().enumerate() {
            let n = c.len();
            let base = half_edges.len();
            for k in 0..n {
                let (o, t) = (c[k], c[(k + 1) % n]);
                let key = (o.min(t), o.max(t));
                let Some(&edge) = edge_index.get(&key) else {
                    return Err(TilingError::Malformed(format!(
                        "face uses non-edge {}-{}",
                        ids[o], ids[t]
                    )));
                };
                if by_ends.insert((o, t), base + k).is_some() {
                    return Err(TilingError::Malformed(format!(
                        "half-edge {}->{} appears in two faces",
                        ids[o], ids[t]
                    )));
                }
                half_edges.push(HalfEdge {
                    origin: o,
                    target: t,
                    twin: usize::MAX,
                    next: base + (k + 1) % n,
                    prev: base + (k + n - 1) % n,
                    face: fi,
                    edge,
                });
            }
            face_half_edges.push((base..base + n).collect::<Vec<_>>());
        }
        if half_edges.len() != 2 * stored.len() {
            return Err(TilingError::Malformed(format!(
                "{} half-edges for {} edges",
                half_edges.len(),
                stored.len()
            )));
        }
        for he in half_edges.iter_mut() {
            let (o, t) = (he.origin, he.target);
            match by_ends.get(&(t, o)) {
                Some(&tw) => he.twin = tw,
                None => {
                    return Err(TilingError::Malformed(format!(
                        "half-edge {}->{} has no twin",
                        ids[o], ids[t]
                    )))
                }
            }
        }

        let (v, e, f) = (ids.len() as i64, stored.len() as i64, cycles.len() as i64);
        if v - e + f != 2 {
            return Err(TilingError::NonSphericalComplex(format!(
                "Euler characteristic v - e + f = {}",
                v - e + f
            )));
        }

        let mut t = Tiling {
            ids,
            points,
            index,
            edges: stored,
            faces: cycles,
            face_half_edges,
            half_edges,
            corners: Vec::new(),
        };
        let mut corners = Vec::with_capacity(t.half_edges.len());
        for h in 0..t.half_edges.len() {
            let he = t.half_edges[h];
            let back = t.half_edges[he.prev];
            let out_t = t.tangent(he.edge, he.origin);
            let back_t = t.tangent(back.edge, he.origin);
            corners.push(corner_angle(&t.points[he.origin], &out_t, &back_t)?);
        }
        t.corners = corners;
        let mut sums = vec![0.0; t.ids.len()];
        for (h, he) in t.half_edges.iter().enumerate() {
            sums[he.origin] += t.corners[h];
        }
        for (i, s) in sums.iter().enumerate() {
            if (s - TAU).abs() > EPS_ANGLE_SUM {
                return Err(TilingError::NonSphericalComplex(format!(
                    "corner angles at {} sum to {s}, not 2π",
                    t.ids[i]
                )));
            }
        }
        Ok(t)
    }

    /// Builds the tiling whose faces are read off the geometric rotation of
    /// arcs around each vertex.
    pub fn from_geometry(
        vertices: Vec<(VertexId, SpherePoint)>,
        edges: Vec<EdgeSpec>,
    ) -> Result<Self, TilingError> {
        let rot = geometric_rotation(&vertices, &edges)?;
        let faces = rot.faces();
        Tiling::build(vertices, edges, faces)
    }

    /// The same vertices with one more edge; faces are recomputed.
    pub fn with_edge(&self, e: EdgeSpec) -> Result<Self, TilingError> {
        let mut edges = self.edge_specs();
        edges.push(e);
        Tiling::from_geometry(self.vertex_list(), edges)
    }

    /// The same vertices without edge `a-b`; faces are recomputed.
    pub fn without_edge(&self, a: &VertexId, b: &VertexId) -> Result<Self, TilingError> {
        let edges: Vec<EdgeSpec> = self
            .edge_specs()
            .into_iter()
            .filter(|e| !((e.a == *a && e.b == *b) || (e.a == *b && e.b == *a)))
            .collect();
        if edges.len() == self.edge_count() {
            return Err(TilingError::Malformed(format!("no edge {a}-{b}")));
        }
        Tiling::from_geometry(self.vertex_list(), edges)
    }

    /// Unit tangent of `edge` at its endpoint `at`, pointing along the edge.
    pub fn tangent(&self, edge: usize, at: usize) -> nalgebra::Vector3<f64> {
        let e = &self.edges[edge];
        if at == e.a {
            e.arc.tangent_at_from()
        } else {
            e.arc.tangent_at_to()
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &VertexId {
        &self.ids[v]
    }

    pub fn index_of(&self, v: &VertexId) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn point(&self, v: usize) -> &SpherePoint {
        &self.points[v]
    }

    pub fn edges(&self) -> &[TilingEdge] {
        &self.edges
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search_by_key(&key, |e| (e.a, e.b)).ok()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face_half_edges(&self, f: usize) -> &[usize] {
        &self.face_half_edges[f]
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn half_edge(&self, h: usize) -> &HalfEdge {
        &self.half_edges[h]
    }

    /// Corner angle at `origin(h)` inside `face(h)`.
    pub fn corner(&self, h: usize) -> f64 {
        self.corners[h]
    }

    /// Next outgoing half-edge counter-clockwise around `origin(h)`.
    pub fn ccw_next(&self, h: usize) -> usize {
        self.half_edges[self.half_edges[h].prev].twin
    }

    /// Outgoing half-edges of `v` in counter-clockwise order, starting at
    /// the one towards the lowest-index neighbour.
    pub fn outgoing(&self, v: usize) -> Vec<usize> {
        let start = (0..self.half_edges.len())
            .filter(|&h| self.half_edges[h].origin == v)
            .min_by_key(|&h| self.half_edges[h].target);
        let Some(start) = start else {
            return Vec::new();
        };
        let mut out = vec![start];
        let mut h = self.ccw_next(start);
        while h != start {
            out.push(h);
            h = self.ccw_next(h);
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.outgoing(v).len()
    }

    /// The 1-skeleton as an abstract graph.
    pub fn skeleton(&self) -> Graph {
        Graph::from_parts(
            self.ids.iter().cloned(),
            self.edges
                .iter()
                .map(|e| (self.ids[e.a].clone(), self.ids[e.b].clone())),
        )
        .expect("tiling skeleton is simple")
    }

    /// Combinatorial rotation system (neighbours in counter-clockwise order).
    pub fn rotation_system(&self) -> RotationSystem {
        let mut rot = BTreeMap::new();
        for v in 0..self.ids.len() {
            let nb = self
                .outgoing(v)
                .into_iter()
                .map(|h| self.ids[self.half_edges[h].target].clone())
                .collect();
            rot.insert(self.ids[v].clone(), nb);
        }
        RotationSystem::from_map(rot)
    }

    pub fn edge_specs(&self) -> Vec<EdgeSpec> {
        self.edges
            .iter()
            .map(|e| EdgeSpec {
                a: self.ids[e.a].clone(),
                b: self.ids[e.b].clone(),
                major: e.major,
            })
            .collect()
    }

    pub fn vertex_list(&self) -> Vec<(VertexId, SpherePoint)> {
        self.ids
            .iter()
            .cloned()
            .zip(self.points.iter().copied())
            .collect()
    }

    pub fn face_ids(&self, f: usize) -> Vec<VertexId> {
        self.faces[f].iter().map(|&v| self.ids[v].clone()).collect()
    }

    /// Same complex with every point mapped through the orthogonal matrix `r`.
    pub fn rotated(&self, r: &nalgebra::Matrix3<f64>) -> Result<Tiling, TilingError> {
        let verts = self
            .ids
            .iter()
            .cloned()
            .zip(self.points.iter().map(|p| p.rotate(r)))
            .collect();
        let faces = (0..self.faces.len()).map(|f| self.face_ids(f)).collect();
        Tiling::build(verts, self.edge_specs(), faces)
    }

    pub fn corner_class(&self, h: usize) -> AngleClass {
        AngleClass::of(self.corners[h])
    }

    fn require_nondegenerate(&self, h: usize) -> Result<AngleKind, TilingError> {
        match self.corner_class(h).kind {
            AngleKind::Degenerate => Err(GeomError::Degenerate(format!(
                "flat corner at {}",
                self.ids[self.half_edges[h].origin]
            ))
            .into()),
            k => Ok(k),
        }
    }

    pub fn classify_face(&self, f: usize) -> Result<TileClass, TilingError> {
        let hs = &self.face_half_edges[f];
        let mut convex = 0;
        for &h in hs {
            if self.require_nondegenerate(h)? == AngleKind::Convex {
                convex += 1;
            }
        }
        let n = hs.len();
        let tag = match convex {
            3 => TileTag::PseudoTriangle,
            2 => TileTag::PseudoDiGon,
            c if c == n => TileTag::ConvexTile,
            _ => TileTag::Other,
        };
        Ok(TileClass {
            tag,
            convex_corner_count: convex,
        })
    }

    /// A vertex is pointed when exactly one of its corners is reflex.
    pub fn is_pointed(&self) -> Result<PointedReport, TilingError> {
        let mut reflex = vec![0usize; self.ids.len()];
        for h in 0..self.half_edges.len() {
            if self.require_nondegenerate(h)? == AngleKind::Reflex {
                reflex[self.half_edges[h].origin] += 1;
            }
        }
        let non_pointed: Vec<VertexId> = (0..self.ids.len())
            .filter(|&v| reflex[v] != 1)
            .map(|v| self.ids[v].clone())
            .collect();
        Ok(PointedReport {
            pointed: non_pointed.is_empty(),
            non_pointed,
        })
    }

    /// Pointed, and every tile a pseudo-triangle or pseudo-di-gon.
    pub fn is_nice(&self) -> Result<NiceReport, TilingError> {
        let pointed = self.is_pointed()?;
        if let Some(v) = pointed.non_pointed.first() {
            return Ok(NiceReport {
                nice: false,
                violation: Some(NiceViolation::NotPointed { vertex: v.clone() }),
            });
        }
        for f in 0..self.faces.len() {
            let class = self.classify_face(f)?;
            if !matches!(class.tag, TileTag::PseudoTriangle | TileTag::PseudoDiGon) {
                return Ok(NiceReport {
                    nice: false,
                    violation: Some(NiceViolation::Tile { face: f, class }),
                });
            }
        }
        Ok(NiceReport {
            nice: true,
            violation: None,
        })
    }

    pub fn count_report(&self) -> Result<CountReport, TilingError> {
        let (mut f2, mut f3, mut c) = (0usize, 0usize, 0usize);
        for f in 0..self.faces.len() {
            let class = self.classify_face(f)?;
            c += class.convex_corner_count;
            match class.tag {
                TileTag::PseudoDiGon => f2 += 1,
                TileTag::PseudoTriangle => f3 += 1,
                _ => return Err(TilingError::NonNiceTiling(f)),
            }
        }
        let (v, e) = (self.ids.len(), self.edges.len());
        let (vi, ei, ci, f2i, f3i) = (v as i64, e as i64, c as i64, f2 as i64, f3 as i64);
        Ok(CountReport {
            v,
            e,
            c,
            f2,
            f3,
            euler_residual: vi - ei + f2i + f3i - 2,
            corner_residual_a: ci - (2 * f2i + 3 * f3i),
            corner_residual_b: ci - (2 * ei - vi),
        })
    }

    /// Number of pseudo-di-gon tiles.
    pub fn digon_count(&self) -> Result<usize, TilingError> {
        let mut n = 0;
        for f in 0..self.faces.len() {
            if self.classify_face(f)?.tag == TileTag::PseudoDiGon {
                n += 1;
            }
        }
        Ok(n)
    }

    /// True when every face is a 3-cycle.
    pub fn is_simplicial(&self) -> bool {
        self.faces.iter().all(|f| f.len() == 3)
    }
}

/// Neighbour order around each vertex from arc tangents.
pub fn geometric_rotation(
    vertices: &[(VertexId, SpherePoint)],
    edges: &[EdgeSpec],
) -> Result<RotationSystem, TilingError> {
    let pos: HashMap<&VertexId, SpherePoint> = vertices.iter().map(|(v, p)| (v, *p)).collect();
    let mut tangents: BTreeMap<VertexId, Vec<(VertexId, nalgebra::Vector3<f64>)>> = vertices
        .iter()
        .map(|(v, _)| (v.clone(), Vec::new()))
        .collect();
    for e in edges {
        let (Some(pa), Some(pb)) = (pos.get(&e.a), pos.get(&e.b)) else {
            return Err(TilingError::Malformed(format!(
                "edge {}-{} has an unknown endpoint",
                e.a, e.b
            )));
        };
        let arc = Arc::new(*pa, *pb, e.major)?;
        tangents
            .get_mut(&e.a)
            .unwrap()
            .push((e.b.clone(), arc.tangent_at_from()));
        tangents
            .get_mut(&e.b)
            .unwrap()
            .push((e.a.clone(), arc.tangent_at_to()));
    }
    let mut rot = BTreeMap::new();
    for (v, mut ts) in tangents {
        ts.sort_by(|x, y| x.0.cmp(&y.0));
        let p = pos[&v];
        let ordered = match ts.first() {
            None => Vec::new(),
            Some((_, t0)) => {
                let t0 = *t0;
                let mut keyed: Vec<(f64, VertexId)> = ts
                    .into_iter()
                    .map(|(w, t)| (crate::sphere::ccw_sweep(&p, &t0, &t), w))
                    .collect();
                keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
                keyed.into_iter().map(|(_, w)| w).collect()
            }
        };
        rot.insert(v, ordered);
    }
    Ok(RotationSystem::from_map(rot))
}

/// On-disk tiling: vertex positions, edges, and face cycles.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TilingJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub faces: Vec<Vec<VertexId>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: VertexId,
    pub xyz: [f64; 3],
}

/// `[a, b]` for a minor arc, `{"ends": [a, b], "major": true}` otherwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeJson {
    Minor([VertexId; 2]),
    Tagged {
        ends: [VertexId; 2],
        #[serde(default)]
        major: bool,
    },
}

impl From<&Tiling> for TilingJson {
    fn from(t: &Tiling) -> Self {
        TilingJson {
            vertices: t
                .ids
                .iter()
                .zip(&t.points)
                .map(|(id, p)| VertexJson {
                    id: id.clone(),
                    xyz: p.xyz(),
                })
                .collect(),
            edges: t
                .edge_specs()
                .into_iter()
                .map(|e| {
                    if e.major {
                        EdgeJson::Tagged {
                            ends: [e.a, e.b],
                            major: true,
                        }
                    } else {
                        EdgeJson::Minor([e.a, e.b])
                    }
                })
                .collect(),
            faces: (0..t.faces.len()).map(|f| t.face_ids(f)).collect(),
        }
    }
}

impl TryFrom<TilingJson> for Tiling {
    type Error = TilingError;

    fn try_from(j: TilingJson) -> Result<Self, Self::Error> {
        let mut verts = Vec::with_capacity(j.vertices.len());
        for v in j.vertices {
            let [x, y, z] = v.xyz;
            verts.push((v.id, SpherePoint::new(x, y, z)?));
        }
        let edges = j
            .edges
            .into_iter()
            .map(|e| match e {
                EdgeJson::Minor([a, b]) => EdgeSpec { a, b, major: false },
                EdgeJson::Tagged {
                    ends: [a, b],
                    major,
                } => EdgeSpec { a, b, major },
            })
            .collect();
        Tiling::build(verts, edges, j.faces)
    }
}

impl Serialize for Tiling {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TilingJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tiling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = TilingJson::deserialize(d)?;
        Tiling::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Standard fixtures shared by tests and examples.
pub mod fixtures {
    use super::*;

    fn axis_points() -> Vec<(VertexId, SpherePoint)> {
        [
            ("px", [1.0, 0.0, 0.0]),
            ("nx", [-1.0, 0.0, 0.0]),
            ("py", [0.0, 1.0, 0.0]),
            ("ny", [0.0, -1.0, 0.0]),
            ("pz", [0.0, 0.0, 1.0]),
            ("nz", [0.0, 0.0, -1.0]),
        ]
        .into_iter()
        .map(|(id, [x, y, z])| (VertexId::from(id), SpherePoint::new(x, y, z).unwrap()))
        .collect()
    }

    /// Octahedral tiling: six axis points, twelve quarter-circle edges,
    /// eight octant faces.
    pub fn octahedron() -> Tiling {
        let (vertices, edges, faces) = octahedron_parts();
        Tiling::build(vertices, edges, faces).expect("octahedron fixture")
    }

    pub type Parts = (
        Vec<(VertexId, SpherePoint)>,
        Vec<EdgeSpec>,
        Vec<Vec<VertexId>>,
    );

    pub fn octahedron_parts() -> Parts {
        let ring = ["px", "py", "nx", "ny"];
        let mut edges = Vec::new();
        for k in 0..4 {
            edges.push(EdgeSpec::minor(ring[k], ring[(k + 1) % 4]));
            edges.push(EdgeSpec::minor(ring[k], "pz"));
            edges.push(EdgeSpec::minor(ring[k], "nz"));
        }
        let mut faces = Vec::new();
        for k in 0..4 {
            let (a, b) = (ring[k], ring[(k + 1) % 4]);
            faces.push(vec![a.into(), b.into(), "pz".into()]);
            faces.push(vec![b.into(), a.into(), "nz".into()]);
        }
        (axis_points(), edges, faces)
    }

    /// Cube-type tiling: eight points (±1,±1,±1)/√3, six square faces.
    pub fn cube() -> Tiling {
        let s = 1.0 / 3f64.sqrt();
        let name =
            |x: i32, y: i32, z: i32| format!("c{}{}{}", (x + 1) / 2, (y + 1) / 2, (z + 1) / 2);
        let mut verts = Vec::new();
        for x in [-1, 1] {
            for y in [-1, 1] {
                for z in [-1, 1] {
                    let p = SpherePoint::normalize(
                        nalgebra::Vector3::new(x as f64, y as f64, z as f64) * s,
                    )
                    .unwrap();
                    verts.push((VertexId(name(x, y, z)), p));
                }
            }
        }
        let mut edges = Vec::new();
        for x in [-1, 1] {
            for y in [-1, 1] {
                for z in [-1, 1] {
                    if x < 0 {
                        edges.push(EdgeSpec::minor(name(x, y, z), name(-x, y, z)));
                    }
                    if y < 0 {
                        edges.push(EdgeSpec::minor(name(x, y, z), name(x, -y, z)));
                    }
                    if z < 0 {
                        edges.push(EdgeSpec::minor(name(x, y, z), name(x, y, -z)));
                    }
                }
            }
        }
        Tiling::from_geometry(verts, edges).expect("cube fixture")
    }

    /// Nice tiling with e = 2v + 2: two squares at heights -1/2 and 1/2,
    /// the upper one turned by 135 degrees, each cut by a diagonal. Every
    /// lower vertex reaches the upper ring by one minor and one major arc,
    /// which makes all eight side triangles pseudo-digons.
    pub fn twisted_antiprism() -> Tiling {
        let (h, twist) = (0.5f64, 0.75 * std::f64::consts::PI);
        let r = (1.0 - h * h).sqrt();
        let lower = |k: usize| format!("s{}", k % 4);
        let upper = |k: usize| format!("n{}", k % 4);
        let mut verts = Vec::new();
        let mut edges = Vec::new();
        for k in 0..4 {
            let a = std::f64::consts::FRAC_PI_2 * k as f64;
            let b = a + twist;
            verts.push((
                VertexId(lower(k)),
                SpherePoint::normalize(nalgebra::Vector3::new(r * a.cos(), r * a.sin(), -h))
                    .unwrap(),
            ));
            verts.push((
                VertexId(upper(k)),
                SpherePoint::normalize(nalgebra::Vector3::new(r * b.cos(), r * b.sin(), h))
                    .unwrap(),
            ));
            edges.push(EdgeSpec::minor(lower(k), lower(k + 1)));
            edges.push(EdgeSpec::minor(upper(k), upper(k + 1)));
            edges.push(EdgeSpec::minor(lower(k), upper(k)));
            edges.push(EdgeSpec::major(lower(k), upper(k + 1)));
        }
        edges.push(EdgeSpec::minor(lower(0), lower(2)));
        edges.push(EdgeSpec::minor(upper(1), upper(3)));
        Tiling::from_geometry(verts, edges).expect("twisted antiprism fixture")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn twisted_antiprism_has_eight_digons() {
        let t = twisted_antiprism();
        let c = t.count_report().unwrap();
        assert_eq!((c.v, c.e), (8, 18));
        assert!(t.is_nice().unwrap().nice);
        assert_eq!((c.f2, c.f3), (8, 4));
        assert!(c.residuals_zero());
    }

    #[test]
    fn octahedron_is_valid_but_not_pointed() {
        let t = octahedron();
        assert_eq!(
            (t.vertex_count(), t.edge_count(), t.face_count()),
            (6, 12, 8)
        );
        let p = t.is_pointed().unwrap();
        assert!(!p.pointed);
        assert_eq!(p.non_pointed.len(), 6);
        let nice = t.is_nice().unwrap();
        assert!(!nice.nice);
        assert!(matches!(
            nice.violation,
            Some(NiceViolation::NotPointed { .. })
        ));
        for f in 0..8 {
            let c = t.classify_face(f).unwrap();
            assert_eq!(c.tag, TileTag::PseudoTriangle);
            assert_eq!(c.convex_corner_count, 3);
        }
        for h in 0..t.half_edges().len() {
            assert!((t.corner(h) - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn octahedron_counts_fail_only_the_pointed_identity() {
        let r = octahedron().count_report().unwrap();
        assert_eq!((r.v, r.e, r.c, r.f2, r.f3), (6, 12, 24, 0, 8));
        assert_eq!(r.euler_residual, 0);
        assert_eq!(r.corner_residual_a, 0);
        assert_eq!(r.corner_residual_b, 6);
    }

    #[test]
    fn missing_face_is_not_spherical() {
        let (v, e, mut f) = octahedron_parts();
        f.pop();
        assert!(matches!(
            Tiling::build(v, e, f),
            Err(TilingError::Malformed(_)) | Err(TilingError::NonSphericalComplex(_))
        ));
    }

    #[test]
    fn reversed_faces_fail_angle_sums() {
        let (v, e, f) = octahedron_parts();
        let f: Vec<Vec<VertexId>> = f
            .into_iter()
            .map(|mut c| {
                c.reverse();
                c
            })
            .collect();
        assert!(matches!(
            Tiling::build(v, e, f),
            Err(TilingError::NonSphericalComplex(_))
        ));
    }

    #[test]
    fn crossing_edges_are_rejected() {
        // square on the equator with both diagonals through the north cap
        let ids = ["a", "b", "c", "d"];
        let pts = [[1., 0., 0.2], [0., 1., 0.2], [-1., 0., 0.2], [0., -1., 0.2]];
        let verts: Vec<_> = ids
            .iter()
            .zip(pts)
            .map(|(i, [x, y, z])| {
                (
                    VertexId::from(*i),
                    SpherePoint::normalize(nalgebra::Vector3::new(x, y, z)).unwrap(),
                )
            })
            .collect();
        let edges = vec![
            EdgeSpec::minor("a", "b"),
            EdgeSpec::minor("b", "c"),
            EdgeSpec::minor("c", "d"),
            EdgeSpec::minor("d", "a"),
            EdgeSpec::minor("a", "c"),
            EdgeSpec::minor("b", "d"),
        ];
        let err = Tiling::from_geometry(verts, edges).unwrap_err();
        assert!(matches!(err, TilingError::CrossingEdges(_, _)), "{err:?}");
    }

    #[test]
    fn cube_faces_are_convex_quadrilaterals() {
        let t = cube();
        assert_eq!(
            (t.vertex_count(), t.edge_count(), t.face_count()),
            (8, 12, 6)
        );
        for f in 0..6 {
            let c = t.classify_face(f).unwrap();
            assert_eq!(c.tag, TileTag::ConvexTile);
            assert_eq!(c.convex_corner_count, 4);
        }
        let nice = t.is_nice().unwrap();
        assert!(!nice.nice);
        assert!(matches!(
            t.count_report(),
            Err(TilingError::NonNiceTiling(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let t = octahedron();
        let s = serde_json::to_string(&t).unwrap();
        let back: Tiling = serde_json::from_str(&s).unwrap();
        assert_eq!(t, back);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn from_geometry_recovers_octahedron_faces() {
        let (v, e, _) = octahedron_parts();
        let t = Tiling::from_geometry(v, e).unwrap();
        assert_eq!(t, octahedron());
    }

    #[test]
    fn remove_and_restore_an_edge() {
        let t = octahedron();
        let (a, b) = (VertexId::from("px"), VertexId::from("pz"));
        let cut = t.without_edge(&a, &b).unwrap();
        assert_eq!((cut.edge_count(), cut.face_count()), (11, 7));
        assert_eq!(cut.with_edge(EdgeSpec::minor("px", "pz")).unwrap(), t);
        assert!(cut.without_edge(&a, &b).is_err());
    }

    #[test]
    fn rotation_order_is_counter_clockwise() {
        let t = octahedron();
        let pz = t.index_of(&"pz".into()).unwrap();
        let nb: Vec<&str> = t
            .outgoing(pz)
            .into_iter()
            .map(|h| t.id(t.half_edge(h).target).as_str())
            .collect();
        // seen from above the north pole: +x, +y, -x, -y counter-clockwise
        assert_eq!(nb, vec!["nx", "ny", "px", "py"]);
    }
}
