use std::f64::consts::{PI, TAU};

use nalgebra::{Rotation3, Unit, Vector3};
use proptest::prelude::*;
use pseudotile::embed::seed_k4;
use pseudotile::sphere::{arcs_cross, orient, Arc, SpherePoint};
use pseudotile::tiling::{fixtures, Tiling};

fn point() -> impl Strategy<Value = SpherePoint> {
    (-1.0f64..1.0, 0.0..TAU).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        SpherePoint::new(r * phi.cos(), r * phi.sin(), z).unwrap()
    })
}

fn rotation() -> impl Strategy<Value = Rotation3<f64>> {
    (point(), 0.0..TAU).prop_map(|(axis, angle)| {
        Rotation3::from_axis_angle(&Unit::new_normalize(*axis.vec()), angle)
    })
}

fn arc() -> impl Strategy<Value = Arc> {
    (point(), point(), any::<bool>())
        .prop_filter("endpoints well separated", |(a, b, _)| {
            let d = a.distance(b);
            d > 0.05 && d < PI - 0.05
        })
        .prop_map(|(a, b, major)| Arc::new(a, b, major).unwrap())
}

/// Position of `x` along `arc` measured from its start, for `x` on the
/// carrying great circle.
fn along(arc: &Arc, x: &Vector3<f64>) -> f64 {
    let n = arc.normal().normalize();
    let f = arc.from().vec();
    let t = n.cross(f);
    x.dot(&t).atan2(x.dot(f)).rem_euclid(TAU)
}

/// Crossing oracle by dense sampling: find where `a` passes through the
/// plane of `b` and test whether that point lies inside `b`. Returns `None`
/// when a crossing lies too close to an endpoint to call.
fn crosses_by_sampling(a: &Arc, b: &Arc) -> Option<bool> {
    let nb = b.normal().normalize();
    let pts = a.sample(4000);
    let mut hit = false;
    for w in pts.windows(2) {
        let (f0, f1) = (nb.dot(w[0].vec()), nb.dot(w[1].vec()));
        if f0 == 0.0 || (f0 > 0.0) != (f1 > 0.0) {
            let x = ((w[0].vec() * f1 - w[1].vec() * f0) / (f1 - f0)).normalize();
            let s = along(b, &x);
            if s < 1e-3 || TAU - s < 1e-3 || (s - b.length()).abs() < 1e-3 {
                return None;
            }
            if s < b.length() {
                hit = true;
            }
        }
    }
    Some(hit)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn orientation_is_antisymmetric(p in point(), q in point(), r in point()) {
        prop_assert_eq!(orient(&p, &q, &r), -orient(&q, &p, &r));
        prop_assert_eq!(orient(&p, &q, &r), orient(&q, &r, &p));
    }

    #[test]
    fn crossing_is_symmetric(a in arc(), b in arc()) {
        let ab = arcs_cross(&a, &b);
        let ba = arcs_cross(&b, &a);
        prop_assert_eq!(ab.is_ok(), ba.is_ok());
        if let (Ok(x), Ok(y)) = (ab, ba) {
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn crossing_matches_sampling(a in arc(), b in arc()) {
        let near = |x: &SpherePoint| {
            [b.from(), b.to()].iter().any(|y| x.distance(y) < 1e-2)
        };
        prop_assume!(!near(a.from()) && !near(a.to()));
        let (Some(x), Some(y)) = (crosses_by_sampling(&a, &b), crosses_by_sampling(&b, &a)) else {
            return Ok(());
        };
        prop_assume!(x == y);
        if let Ok(got) = arcs_cross(&a, &b) {
            prop_assert_eq!(got, x);
        }
    }

    #[test]
    fn rotating_a_tiling_keeps_its_classes(r in rotation()) {
        for t in [seed_k4(), fixtures::octahedron()] {
            let u = t.rotated(r.matrix()).unwrap();
            for f in 0..t.face_count() {
                prop_assert_eq!(t.classify_face(f).unwrap(), u.classify_face(f).unwrap());
            }
            prop_assert_eq!(t.count_report().unwrap(), u.count_report().unwrap());
            prop_assert_eq!(t.is_nice().unwrap().nice, u.is_nice().unwrap().nice);
        }
    }
}

#[test]
fn rotated_tiling_has_same_faces() {
    let t = seed_k4();
    let r = Rotation3::from_euler_angles(0.3, -1.1, 2.0);
    let u: Tiling = t.rotated(r.matrix()).unwrap();
    assert_eq!(t.faces(), u.faces());
    for h in 0..t.half_edges().len() {
        assert!((t.corner(h) - u.corner(h)).abs() < 1e-9);
    }
}
