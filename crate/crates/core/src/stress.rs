//! Self-stresses of spherical frameworks.
//!
//! Weights `w` on the edges are in equilibrium when, at every vertex `i`,
//! the sum over incident edges of `w_ij * (p_i x p_j)` vanishes. This is the
//! compatibility condition for a piecewise linear function on the fan, so
//! every self-stress lifts (see [`crate::lift`]).

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::graph::VertexId;
use crate::tiling::Tiling;

/// Equilibrium tolerance, relative to the largest weight.
pub const EPS_EQ: f64 = 1e-8;
/// Relative singular value cut-off for the null space.
pub const SVD_REL_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeight {
    pub ends: [VertexId; 2],
    pub weight: f64,
}

/// Edge weights, listed in the tiling's edge order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stress {
    pub weights: Vec<EdgeWeight>,
}

impl Stress {
    pub fn from_weights(t: &Tiling, w: &[f64]) -> Self {
        assert_eq!(w.len(), t.edge_count(), "one weight per edge");
        Stress {
            weights: t
                .edges()
                .iter()
                .zip(w)
                .map(|(e, &weight)| EdgeWeight {
                    ends: [t.id(e.a).clone(), t.id(e.b).clone()],
                    weight,
                })
                .collect(),
        }
    }

    pub fn zero(t: &Tiling) -> Self {
        Self::from_weights(t, &vec![0.0; t.edge_count()])
    }

    pub fn values(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.weight).collect()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Stress {
            weights: self
                .weights
                .iter()
                .map(|w| EdgeWeight {
                    ends: w.ends.clone(),
                    weight: k * w.weight,
                })
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.weights.iter().fold(0.0, |m, w| m.max(w.weight.abs()))
    }

    /// Whether the weights are listed against exactly the edges of `t`.
    pub fn matches(&self, t: &Tiling) -> bool {
        self.weights.len() == t.edge_count()
            && self
                .weights
                .iter()
                .zip(t.edges())
                .all(|(w, e)| w.ends[0] == *t.id(e.a) && w.ends[1] == *t.id(e.b))
    }
}

/// `p_a x p_b` for edge `e`, in stored (sorted) endpoint order.
pub fn edge_moment(t: &Tiling, e: usize) -> Vector3<f64> {
    let edge = &t.edges()[e];
    t.point(edge.a).vec().cross(t.point(edge.b).vec())
}

/// The 3v x e equilibrium matrix: column `e = (a, b)` holds `p_a x p_b` in
/// block `a` and its negative in block `b`.
pub fn equilibrium_matrix(t: &Tiling) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(3 * t.vertex_count(), t.edge_count());
    for (k, e) in t.edges().iter().enumerate() {
        let c = edge_moment(t, k);
        for r in 0..3 {
            m[(3 * e.a + r, k)] = c[r];
            m[(3 * e.b + r, k)] = -c[r];
        }
    }
    m
}

/// Largest per-vertex force imbalance `|sum_j w_ij (p_i x p_j)|`.
pub fn equilibrium_residual(t: &Tiling, w: &[f64]) -> f64 {
    let mut force = vec![Vector3::zeros(); t.vertex_count()];
    for (k, e) in t.edges().iter().enumerate() {
        let c = edge_moment(t, k) * w[k];
        force[e.a] += c;
        force[e.b] -= c;
    }
    force.iter().fold(0.0, |m, f| m.max(f.norm()))
}

/// Whether `s` is a self-stress of `t` within [`EPS_EQ`] (scaled by the
/// largest weight when that exceeds one).
pub fn is_self_stress(t: &Tiling, s: &Stress) -> bool {
    s.matches(t) && equilibrium_residual(t, &s.values()) < EPS_EQ * s.max_abs().max(1.0)
}

/// Orthonormal basis of the self-stress space. A one-dimensional answer is
/// sign-normalized so its largest weight is positive.
pub fn self_stress_basis(t: &Tiling) -> Vec<Stress> {
    let e = t.edge_count();
    if e == 0 {
        return Vec::new();
    }
    let a = equilibrium_matrix(t);
    // pad so the SVD returns a full set of right singular vectors
    let rows = a.nrows().max(e);
    let padded = if rows > a.nrows() {
        let mut p = DMatrix::zeros(rows, e);
        p.rows_mut(0, a.nrows()).copy_from(&a);
        p
    } else {
        a
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.max();
    let cut = SVD_REL_THRESHOLD * sigma_max;
    let mut basis: Vec<Vec<f64>> = (0..e)
        .filter(|&k| sigma_max == 0.0 || svd.singular_values[k] < cut)
        .map(|k| v_t.row(k).iter().copied().collect())
        .collect();
    if let [w] = basis.as_mut_slice() {
        let big = w
            .iter()
            .copied()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if big < 0.0 {
            w.iter_mut().for_each(|x| *x = -*x);
        }
    }
    basis.iter().map(|w| Stress::from_weights(t, w)).collect()
}
