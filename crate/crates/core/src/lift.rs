//! Lifting a self-stressed spherical tiling to a virtual polytope: a
//! support function that is linear on the cone over every tile.
//!
//! Across the half-edge `h = (i -> j)` with `L` the face on its left and `R`
//! on its right, the tile linears satisfy `a_L - a_R = w_ij (p_i x p_j)`.
//! Around a vertex these jumps telescope to zero exactly when the weights are
//! in equilibrium there, so a lift exists iff the weights form a self-stress.

use std::collections::VecDeque;
use std::fmt::Write as _;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VertexId;
use crate::stress::{edge_moment, equilibrium_residual, Stress, EPS_EQ};
use crate::tiling::{Tiling, TilingError};

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("weights are not a self-stress of this tiling (residual {0:.3e})")]
    NotASelfStress(f64),
    #[error("lift does not close up (residual {0:.3e})")]
    LiftInconsistent(f64),
    #[error("fan is not a nice pseudo-tiling")]
    NotNiceFan,
    #[error("edge {0} has no jump in the support function")]
    DegenerateJump(String),
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

/// How the dual spanning tree is grown from the root face.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    #[default]
    Bfs,
    Dfs,
}

/// Support function `x -> a_T . x` on the cone over each face `T` of the fan.
#[derive(Clone, Debug)]
pub struct VirtualPolytope {
    pub fan: Tiling,
    /// Indexed like `fan.faces()`.
    pub tile_linears: Vec<Vector3<f64>>,
    pub closure_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    CertifiedHyperbolic,
    NotCertified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeColor {
    /// The support function is concave up (convex) across the edge.
    Red,
    Blue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeColoring {
    /// Indexed like `fan.edges()`.
    pub colors: Vec<EdgeColor>,
}

impl EdgeColoring {
    pub fn count(&self, c: EdgeColor) -> usize {
        self.colors.iter().filter(|&&x| x == c).count()
    }
}

/// Polygon mesh with zero-based face indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            writeln!(out, "v {:?} {:?} {:?}", v[0], v[1], v[2]).unwrap();
        }
        for f in &self.faces {
            let idx: Vec<String> = f.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(out, "f {}", idx.join(" ")).unwrap();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub edge_id: String,
    /// `None` on edges the stress does not load.
    pub color: Option<EdgeColor>,
    /// Sign of the stress on the edge: +1, -1, or 0 when unloaded.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRow {
    pub vertex_id: VertexId,
    pub degree: usize,
    /// Position of the reflex corner among the corners around the vertex,
    /// counter-clockwise from the edge to the lowest neighbour; `None` when
    /// the vertex is not pointed.
    pub reflex_position: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub edges: Vec<EdgeRow>,
    pub vertices: Vec<VertexRow>,
}

impl SurveyReport {
    pub fn edges_csv(&self) -> String {
        let mut out = String::from("edge_id,color,sign\n");
        for r in &self.edges {
            let color = r.color.map_or(String::new(), |c| format!("{c:?}"));
            writeln!(out, "{},{},{}", r.edge_id, color, r.sign).unwrap();
        }
        out
    }

    pub fn vertices_csv(&self) -> String {
        let mut out = String::from("vertex_id,degree,reflex_position\n");
        for r in &self.vertices {
            let pos = r.reflex_position.map_or(String::new(), |p| p.to_string());
            writeln!(out, "{},{},{}", r.vertex_id, r.degree, pos).unwrap();
        }
        out
    }
}

fn edge_name(t: &Tiling, e: usize) -> String {
    let edge = &t.edges()[e];
    format!("{}-{}", t.id(edge.a), t.id(edge.b))
}

/// `w_e (p_i x p_j)` for half-edge `h = (i -> j)`: the jump `a_L - a_R`.
fn jump(t: &Tiling, w: &[f64], h: usize) -> Vector3<f64> {
    let he = t.half_edge(h);
    let m = edge_moment(t, he.edge) * w[he.edge];
    if he.origin == t.edges()[he.edge].a {
        m
    } else {
        -m
    }
}

/// Lift with the default gauge: root face 0 and a breadth-first tree.
pub fn lift(t: &Tiling, s: &Stress) -> Result<VirtualPolytope, LiftError> {
    lift_with(t, s, 0, TreeKind::Bfs)
}

/// Lift with `a_root = 0`, propagated along a spanning tree of the dual graph.
pub fn lift_with(
    t: &Tiling,
    s: &Stress,
    root: usize,
    tree: TreeKind,
) -> Result<VirtualPolytope, LiftError> {
    if !s.matches(t) {
        return Err(LiftError::NotASelfStress(f64::INFINITY));
    }
    let w = s.values();
    let scale = s.max_abs().max(1.0);
    let residual = equilibrium_residual(t, &w);
    if residual >= EPS_EQ * scale {
        return Err(LiftError::NotASelfStress(residual));
    }
    let f = t.face_count();
    let mut a: Vec<Option<Vector3<f64>>> = vec![None; f];
    if f > 0 {
        a[root] = Some(Vector3::zeros());
        let mut frontier = VecDeque::from([root]);
        while let Some(face) = match tree {
            TreeKind::Bfs => frontier.pop_front(),
            TreeKind::Dfs => frontier.pop_back(),
        } {
            let here = a[face].unwrap();
            for &h in t.face_half_edges(face) {
                let other = t.half_edge(t.half_edge(h).twin).face;
                if a[other].is_none() {
                    a[other] = Some(here - jump(t, &w, h));
                    frontier.push_back(other);
                }
            }
        }
    }
    let tile_linears: Vec<Vector3<f64>> = a
        .into_iter()
        .map(|x| x.expect("dual graph of a sphere is connected"))
        .collect();
    let closure_residual = (0..t.half_edges().len())
        .map(|h| {
            let he = t.half_edge(h);
            let right = t.half_edge(he.twin).face;
            (tile_linears[he.face] - tile_linears[right] - jump(t, &w, h)).norm()
        })
        .fold(0.0, f64::max);
    if closure_residual >= EPS_EQ * scale {
        return Err(LiftError::LiftInconsistent(closure_residual));
    }
    Ok(VirtualPolytope {
        fan: t.clone(),
        tile_linears,
        closure_residual,
    })
}

impl VirtualPolytope {
    /// Stress weights recovered from the jumps across each edge.
    pub fn stress(&self) -> Stress {
        let t = &self.fan;
        let w: Vec<f64> = (0..t.edge_count())
            .map(|e| {
                let h = self.left_half_edge(e);
                let m = edge_moment(t, e);
                let d = self.tile_linears[t.half_edge(h).face]
                    - self.tile_linears[t.half_edge(t.half_edge(h).twin).face];
                d.dot(&m) / m.norm_squared()
            })
            .collect();
        Stress::from_weights(t, &w)
    }

    /// The half-edge of `e` running from its first to its second endpoint.
    fn left_half_edge(&self, e: usize) -> usize {
        let t = &self.fan;
        let a = t.edges()[e].a;
        (0..t.half_edges().len())
            .find(|&h| t.half_edge(h).edge == e && t.half_edge(h).origin == a)
            .expect("every edge has two half-edges")
    }
}

/// Hyperbolic when the fan is pointed. Sufficient in general; for
/// simplicial fans the converse also holds.
pub fn is_hyperbolic_certificate(vp: &VirtualPolytope) -> Result<Certificate, LiftError> {
    Ok(if vp.fan.is_pointed()?.pointed {
        Certificate::CertifiedHyperbolic
    } else {
        Certificate::NotCertified
    })
}

/// Horns are dual to the pseudo-digons of a nice fan.
pub fn horn_count(vp: &VirtualPolytope) -> Result<usize, LiftError> {
    if !vp.fan.is_nice()?.nice {
        return Err(LiftError::NotNiceFan);
    }
    Ok(vp.fan.digon_count()?)
}

/// Colour of edge `e`, or `None` when the support function is flat across
/// it. Red where it bends upward crossing the edge, tested at the arc
/// midpoint in the direction of the right-hand face.
fn edge_color(vp: &VirtualPolytope, e: usize, scale: f64) -> Option<EdgeColor> {
    let t = &vp.fan;
    let h = vp.left_half_edge(e);
    let left = vp.tile_linears[t.half_edge(h).face];
    let right = vp.tile_linears[t.half_edge(t.half_edge(h).twin).face];
    let diff = right - left;
    if diff.norm() < EPS_EQ * scale {
        return None;
    }
    // the arc runs from a to b, so its normal points into the left face
    let into_right = -t.edges()[e].arc.normal();
    Some(if diff.dot(&into_right) >= 0.0 {
        EdgeColor::Red
    } else {
        EdgeColor::Blue
    })
}

fn jump_scale(vp: &VirtualPolytope) -> f64 {
    vp.tile_linears.iter().fold(1.0f64, |m, a| m.max(a.norm()))
}

pub fn color_edges(vp: &VirtualPolytope) -> Result<EdgeColoring, LiftError> {
    let scale = jump_scale(vp);
    let colors = (0..vp.fan.edge_count())
        .map(|e| {
            edge_color(vp, e, scale).ok_or_else(|| LiftError::DegenerateJump(edge_name(&vp.fan, e)))
        })
        .collect::<Result<_, _>>()?;
    Ok(EdgeColoring { colors })
}

/// Maxwell reciprocal: a vertex at `a_T` for each tile, a face for each fan
/// vertex through the tiles around it in counter-clockwise order.
pub fn reciprocal_surface(vp: &VirtualPolytope) -> Mesh {
    let t = &vp.fan;
    Mesh {
        vertices: vp.tile_linears.iter().map(|a| [a.x, a.y, a.z]).collect(),
        faces: (0..t.vertex_count())
            .map(|v| t.outgoing(v).iter().map(|&h| t.half_edge(h).face).collect())
            .collect(),
    }
}

/// Stress signs and colours per edge next to the corner pattern per vertex.
pub fn survey_report(vp: &VirtualPolytope) -> SurveyReport {
    let t = &vp.fan;
    let scale = jump_scale(vp);
    let stress = vp.stress();
    let edges = (0..t.edge_count())
        .map(|e| {
            let color = edge_color(vp, e, scale);
            let w = stress.weights[e].weight;
            EdgeRow {
                edge_id: edge_name(t, e),
                color,
                sign: match color {
                    None => 0,
                    Some(_) if w > 0.0 => 1,
                    Some(_) => -1,
                },
            }
        })
        .collect();
    let vertices = (0..t.vertex_count())
        .map(|v| {
            let out = t.outgoing(v);
            let reflex: Vec<usize> = out
                .iter()
                .enumerate()
                // the corner of face(h) at v lies between h and the next
                // outgoing half-edge
                .filter(|(_, &h)| t.corner(h) > std::f64::consts::PI)
                .map(|(k, _)| k)
                .collect();
            VertexRow {
                vertex_id: t.id(v).clone(),
                degree: out.len(),
                reflex_position: (reflex.len() == 1).then(|| reflex[0]),
            }
        })
        .collect();
    SurveyReport { edges, vertices }
}
