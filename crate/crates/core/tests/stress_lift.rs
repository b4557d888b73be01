mod common;

use std::collections::BTreeSet;

use nalgebra::{DMatrix, Rotation3, Unit, Vector3};
use proptest::prelude::*;
use pseudotile::embed::seed_k4;
use pseudotile::lift::{
    color_edges, horn_count, is_hyperbolic_certificate, lift, lift_with, reciprocal_surface,
    Certificate, EdgeColor, TreeKind,
};
use pseudotile::sparsity::{classify_sparsity, SparsityClass};
use pseudotile::stress::{self_stress_basis, Stress};
use pseudotile::tiling::{fixtures, Tiling};

/// Stress dimension as the corank of a freshly assembled equilibrium matrix.
fn corank(t: &Tiling) -> usize {
    let (v, e) = (t.vertex_count(), t.edge_count());
    let mut m = DMatrix::<f64>::zeros(3 * v, e);
    for (k, edge) in t.edges().iter().enumerate() {
        let c = t.point(edge.a).vec().cross(t.point(edge.b).vec());
        for r in 0..3 {
            m[(3 * edge.a + r, k)] = c[r];
            m[(3 * edge.b + r, k)] = -c[r];
        }
    }
    e - m.rank(1e-9)
}

/// Largest `|sum_j w_ij p_i x p_j|` over the vertices.
fn imbalance(t: &Tiling, w: &[f64]) -> f64 {
    let mut f = vec![Vector3::zeros(); t.vertex_count()];
    for (edge, &x) in t.edges().iter().zip(w) {
        let c = t.point(edge.a).vec().cross(t.point(edge.b).vec()) * x;
        f[edge.a] += c;
        f[edge.b] -= c;
    }
    f.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn only_stress(t: &Tiling) -> Stress {
    let basis = self_stress_basis(t);
    assert_eq!(basis.len(), 1);
    basis.into_iter().next().unwrap()
}

#[test]
fn embeddings_carry_exactly_one_stress() {
    for (g, t) in common::corpus(20) {
        assert_eq!(corank(&t), 1);
        let s = only_stress(&t);
        assert!(imbalance(&t, &s.values()) < 1e-8 * s.max_abs());
        let vp = lift(&t, &s).unwrap();
        assert!(vp.closure_residual < 1e-8);
        assert_eq!(horn_count(&vp).unwrap(), t.digon_count().unwrap());

        let SparsityClass::LamanPlusK { k: 1, witness } = classify_sparsity(&g) else {
            panic!("embedded graph is Laman-plus-one");
        };
        let (a, b) = &witness[0];
        let laman = t.without_edge(a, b).unwrap();
        assert_eq!(corank(&laman), 0);
        assert!(self_stress_basis(&laman).is_empty());
    }
}

#[test]
fn seed_pipeline() {
    let t = seed_k4();
    let vp = lift(&t, &only_stress(&t)).unwrap();
    assert_eq!(
        is_hyperbolic_certificate(&vp).unwrap(),
        Certificate::CertifiedHyperbolic
    );
    assert_eq!(horn_count(&vp).unwrap(), 4);
    let c = color_edges(&vp).unwrap();
    assert!(c.count(EdgeColor::Red) > 0 && c.count(EdgeColor::Blue) > 0);
}

#[test]
fn twisted_antiprism_has_eight_horns() {
    let t = fixtures::twisted_antiprism();
    assert!(matches!(
        classify_sparsity(&t.skeleton()),
        SparsityClass::LamanPlusK { k: 5, .. }
    ));
    let basis = self_stress_basis(&t);
    assert_eq!(basis.len(), corank(&t));
    assert_eq!(basis.len(), 5);
    for s in &basis {
        let vp = lift(&t, s).unwrap();
        assert_eq!(
            is_hyperbolic_certificate(&vp).unwrap(),
            Certificate::CertifiedHyperbolic
        );
        assert_eq!(horn_count(&vp).unwrap(), 8);
    }
}

#[test]
fn gauge_shifts_every_tile_by_the_same_vector() {
    for (_, t) in common::corpus(10) {
        let s = only_stress(&t);
        let base = lift(&t, &s).unwrap();
        for (root, tree) in [(0, TreeKind::Dfs), (t.face_count() - 1, TreeKind::Bfs)] {
            let other = lift_with(&t, &s, root, tree).unwrap();
            let shift = other.tile_linears[0] - base.tile_linears[0];
            for (x, y) in other.tile_linears.iter().zip(&base.tile_linears) {
                assert!((x - y - shift).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn lift_is_linear_in_the_stress() {
    let t = fixtures::octahedron();
    let basis = self_stress_basis(&t);
    assert_eq!(basis.len(), 3);
    assert_eq!(corank(&t), 3);
    let w: Vec<f64> = (0..t.edge_count())
        .map(|e| 2.0 * basis[0].values()[e] - 0.5 * basis[2].values()[e])
        .collect();
    let sum = lift(&t, &Stress::from_weights(&t, &w)).unwrap();
    let a = lift(&t, &basis[0]).unwrap();
    let b = lift(&t, &basis[2]).unwrap();
    for f in 0..t.face_count() {
        let expect = a.tile_linears[f] * 2.0 - b.tile_linears[f] * 0.5;
        assert!((sum.tile_linears[f] - expect).norm() < 1e-9);
    }
    assert!(is_hyperbolic_certificate(&a).unwrap() == Certificate::NotCertified);
}

#[test]
fn reciprocal_surface_is_dual() {
    for (_, t) in common::corpus(10) {
        let vp = lift(&t, &only_stress(&t)).unwrap();
        let m = reciprocal_surface(&vp);
        assert_eq!(m.vertices.len(), t.face_count());
        assert_eq!(m.faces.len(), t.vertex_count());
        // every fan edge becomes the mesh edge between the tiles it separates
        let mut mesh_edges = BTreeSet::new();
        for face in &m.faces {
            for i in 0..face.len() {
                let (x, y) = (face[i], face[(i + 1) % face.len()]);
                mesh_edges.insert((x.min(y), x.max(y)));
            }
        }
        let dual: BTreeSet<_> = t
            .half_edges()
            .iter()
            .map(|h| {
                let (x, y) = (h.face, t.half_edge(h.twin).face);
                (x.min(y), x.max(y))
            })
            .collect();
        assert_eq!(mesh_edges, dual);
        let obj = m.to_obj();
        assert_eq!(
            obj.lines().filter(|l| l.starts_with("v ")).count(),
            t.face_count()
        );
        assert_eq!(
            obj.lines().filter(|l| l.starts_with("f ")).count(),
            t.vertex_count()
        );
    }
}

fn rotation() -> impl Strategy<Value = Rotation3<f64>> {
    (
        -1.0f64..1.0,
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(z, phi, angle)| {
            let r = (1.0 - z * z).sqrt();
            let axis = Unit::new_normalize(Vector3::new(r * phi.cos(), r * phi.sin(), z));
            Rotation3::from_axis_angle(&axis, angle)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn negation_swaps_colours_and_scaling_keeps_them(k in 0.01f64..100.0) {
        let t = seed_k4();
        let s = only_stress(&t);
        let c = color_edges(&lift(&t, &s).unwrap()).unwrap();
        let scaled = color_edges(&lift(&t, &s.scaled(k)).unwrap()).unwrap();
        let negated = color_edges(&lift(&t, &s.scaled(-k)).unwrap()).unwrap();
        prop_assert_eq!(&c, &scaled);
        for (x, y) in c.colors.iter().zip(&negated.colors) {
            prop_assert_ne!(x, y);
        }
    }

    #[test]
    fn rotation_carries_the_lift_along(r in rotation(), seed in 0u64..20) {
        let (_, t) = common::embedded(seed, 7);
        let u = t.rotated(r.matrix()).unwrap();
        let s = only_stress(&t);
        let su = only_stress(&u);
        let (w, wu) = (s.values(), su.values());
        let ratio = wu[0] / w[0];
        prop_assert!((ratio.abs() - 1.0).abs() < 1e-6);
        for (x, y) in w.iter().zip(&wu) {
            prop_assert!((x * ratio - y).abs() < 1e-6 * s.max_abs());
        }
        let a = lift(&t, &s).unwrap();
        let b = lift(&u, &Stress::from_weights(&u, &w)).unwrap();
        for (x, y) in a.tile_linears.iter().zip(&b.tile_linears) {
            prop_assert!((r * x - y).norm() < 1e-8 * (1.0 + x.norm()));
        }
    }
}
