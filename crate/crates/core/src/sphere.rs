//! Points, geodesic arcs and angle predicates on the unit sphere.
//!
//! Tolerance policy: [`EPS_ANGLE`] for angle classification and incidence
//! tests, [`EPS_DET`] for orientation signs. Nothing here is exact; callers
//! that hit a [`GeomError::Degenerate`] are expected to perturb and retry.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use thiserror::Error;

pub const EPS_ANGLE: f64 = 1e-9;
pub const EPS_DET: f64 = 1e-12;
/// Allowed deviation of a point's norm from 1.
pub const EPS_UNIT: f64 = 1e-12;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("point is not on the unit sphere (norm {0})")]
    NotUnit(f64),
}

/// A point on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint(Vector3<f64>);

impl SpherePoint {
    /// Accepts coordinates whose norm is within [`EPS_UNIT`] of 1.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GeomError> {
        let v = Vector3::new(x, y, z);
        let n = v.norm();
        if !n.is_finite() || (n - 1.0).abs() > EPS_UNIT {
            return Err(GeomError::NotUnit(n));
        }
        Ok(SpherePoint(v))
    }

    /// Projects a nonzero vector onto the sphere.
    pub fn normalize(v: Vector3<f64>) -> Option<Self> {
        let n = v.norm();
        (n > 1e-300 && n.is_finite()).then(|| SpherePoint(v / n))
    }

    pub fn vec(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn xyz(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint(-self.0)
    }

    /// Great-circle distance in radians.
    pub fn distance(&self, other: &SpherePoint) -> f64 {
        let c = self.0.cross(&other.0).norm();
        let d = self.0.dot(&other.0);
        c.atan2(d)
    }

    /// Unit tangent at `self` pointing along the minor arc towards `q`.
    pub fn tangent_towards(&self, q: &SpherePoint) -> Option<Vector3<f64>> {
        let t = q.0 - self.0 * self.0.dot(&q.0);
        let n = t.norm();
        (n > EPS_DET).then(|| t / n)
    }

    /// Point reached by walking `dist` radians from `self` along unit tangent `t`.
    pub fn walk(&self, t: &Vector3<f64>, dist: f64) -> SpherePoint {
        SpherePoint::normalize(self.0 * dist.cos() + t * dist.sin()).expect("unit walk")
    }

    /// Applies an orthogonal matrix.
    pub fn rotate(&self, r: &nalgebra::Matrix3<f64>) -> SpherePoint {
        SpherePoint::normalize(r * self.0).expect("rotation of unit vector")
    }
}

/// Sign of `det[p; q; r]`, zero when `|det| < EPS_DET`.
pub fn orient(p: &SpherePoint, q: &SpherePoint, r: &SpherePoint) -> i8 {
    let d = p.0.dot(&q.0.cross(&r.0));
    if d.abs() < EPS_DET {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

/// A geodesic segment from `from` to `to`.
///
/// `major` selects the long way round the great circle (length > π). Arcs
/// of length near 0, π or 2π are rejected: their great circle is ill-defined
/// or the segment is ambiguous.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    from: SpherePoint,
    to: SpherePoint,
    major: bool,
    /// Unit tangent at `from` in the direction of travel.
    start_tangent: Vector3<f64>,
    length: f64,
}

impl Arc {
    pub fn new(from: SpherePoint, to: SpherePoint, major: bool) -> Result<Self, GeomError> {
        let d = from.distance(&to);
        if !(EPS_ANGLE..=PI - EPS_ANGLE).contains(&d) {
            return Err(GeomError::Degenerate(format!(
                "arc endpoints coincide or are antipodal (distance {d})"
            )));
        }
        let t = from
            .tangent_towards(&to)
            .ok_or_else(|| GeomError::Degenerate("arc tangent undefined".into()))?;
        let (start_tangent, length) = if major { (-t, TAU - d) } else { (t, d) };
        Ok(Arc {
            from,
            to,
            major,
            start_tangent,
            length,
        })
    }

    pub fn minor(from: SpherePoint, to: SpherePoint) -> Result<Self, GeomError> {
        Arc::new(from, to, false)
    }

    pub fn from(&self) -> &SpherePoint {
        &self.from
    }

    pub fn to(&self) -> &SpherePoint {
        &self.to
    }

    pub fn is_major(&self) -> bool {
        self.major
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn reversed(&self) -> Arc {
        Arc::new(self.to, self.from, self.major).expect("reversal of a valid arc")
    }

    /// Unit normal of the carrying plane; travel is counter-clockwise about it.
    pub fn normal(&self) -> Vector3<f64> {
        self.from.0.cross(&self.start_tangent)
    }

    /// Unit tangent at `from`, pointing along the arc.
    pub fn tangent_at_from(&self) -> Vector3<f64> {
        self.start_tangent
    }

    /// Unit tangent at `to`, pointing back along the arc towards `from`.
    pub fn tangent_at_to(&self) -> Vector3<f64> {
        // travel direction on a circle counter-clockwise about n is n x p
        self.to.0.cross(&self.normal())
    }

    /// Point at arc length `s` from `from`.
    pub fn point_at(&self, s: f64) -> SpherePoint {
        self.from.walk(&self.start_tangent, s)
    }

    pub fn midpoint(&self) -> SpherePoint {
        self.point_at(0.5 * self.length)
    }

    /// Arc-length parameter of a point on the carrying great circle, in [0, 2π).
    fn parameter(&self, x: &Vector3<f64>) -> f64 {
        let th = x.dot(&self.start_tangent).atan2(x.dot(&self.from.0));
        th.rem_euclid(TAU)
    }

    /// True when `x` lies on the open arc, at least `eps` away from both ends.
    pub fn contains_interior(&self, x: &SpherePoint, eps: f64) -> bool {
        if x.0.dot(&self.normal()).abs() > eps {
            return false;
        }
        let th = self.parameter(&x.0);
        th > eps && th < self.length - eps
    }

    /// Angular distance from `x` to the closed arc.
    pub fn distance_to(&self, x: &SpherePoint) -> f64 {
        let off = x.0.dot(&self.normal()).clamp(-1.0, 1.0);
        let in_plane = x.0 - self.normal() * off;
        if in_plane.norm() > EPS_UNIT && self.parameter(&in_plane) <= self.length {
            return off.abs().asin();
        }
        x.distance(&self.from).min(x.distance(&self.to))
    }

    /// Samples `n + 1` points from `from` to `to` inclusive.
    pub fn sample(&self, n: usize) -> Vec<SpherePoint> {
        let n = n.max(1);
        (0..=n)
            .map(|i| {
                if i == 0 {
                    self.from
                } else if i == n {
                    self.to
                } else {
                    self.point_at(self.length * i as f64 / n as f64)
                }
            })
            .collect()
    }
}

fn same_point(a: &SpherePoint, b: &SpherePoint) -> bool {
    a.0 == b.0
}

/// True iff the open arcs share an interior point. Shared endpoints are not
/// crossings. An endpoint of one arc lying on the interior of the other, or
/// overlapping collinear arcs, is reported as degenerate.
pub fn arcs_cross(a: &Arc, b: &Arc) -> Result<bool, GeomError> {
    for (x, y) in [(a, b), (b, a)] {
        for e in [&y.from, &y.to] {
            if same_point(e, &x.from) || same_point(e, &x.to) {
                continue;
            }
            if x.contains_interior(e, EPS_ANGLE) {
                return Err(GeomError::Degenerate(
                    "arc endpoint lies on another arc".into(),
                ));
            }
        }
    }
    let na = a.normal();
    let nb = b.normal();
    let axis = na.cross(&nb);
    if axis.norm() < EPS_ANGLE {
        // same great circle: any overlap shows up at a midpoint
        if a.contains_interior(&b.midpoint(), EPS_ANGLE)
            || b.contains_interior(&a.midpoint(), EPS_ANGLE)
        {
            return Err(GeomError::Degenerate("collinear arcs overlap".into()));
        }
        return Ok(false);
    }
    let axis = axis.normalize();
    let shared: Vec<&SpherePoint> = [&a.from, &a.to]
        .into_iter()
        .filter(|p| same_point(p, &b.from) || same_point(p, &b.to))
        .collect();
    for cand in [axis, -axis] {
        if shared.iter().any(|p| (p.0 - cand).norm() < EPS_ANGLE) {
            continue;
        }
        let c = SpherePoint(cand);
        let ta = a.parameter(&c.0);
        let tb = b.parameter(&c.0);
        if ta > EPS_ANGLE
            && ta < a.length - EPS_ANGLE
            && tb > EPS_ANGLE
            && tb < b.length - EPS_ANGLE
        {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AngleKind {
    Convex,
    Reflex,
    Degenerate,
}

/// An angle in (0, 2π) and its class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleClass {
    pub value: f64,
    pub kind: AngleKind,
}

impl AngleClass {
    pub fn of(value: f64) -> Self {
        let kind = if value < PI - EPS_ANGLE {
            AngleKind::Convex
        } else if value > PI + EPS_ANGLE {
            AngleKind::Reflex
        } else {
            AngleKind::Degenerate
        };
        AngleClass { value, kind }
    }
}

/// Which side of the path `incoming` then `outgoing` holds the face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Counter-clockwise sweep (about the outward normal `at`) from tangent
/// `from_t` to tangent `to_t`, in [0, 2π).
pub fn ccw_sweep(at: &SpherePoint, from_t: &Vector3<f64>, to_t: &Vector3<f64>) -> f64 {
    let y = at.0.dot(&from_t.cross(to_t));
    let x = from_t.dot(to_t);
    y.atan2(x).rem_euclid(TAU)
}

/// Face corner given the two tangents at the vertex: the sweep from the
/// outgoing tangent to the one pointing back along the incoming edge, for a
/// face on the left of the boundary walk.
pub fn corner_angle(
    at: &SpherePoint,
    outgoing_t: &Vector3<f64>,
    back_t: &Vector3<f64>,
) -> Result<f64, GeomError> {
    let a = ccw_sweep(at, outgoing_t, back_t);
    if !(EPS_ANGLE..=TAU - EPS_ANGLE).contains(&a) {
        return Err(GeomError::Degenerate(
            "incident arcs leave the vertex in the same direction".into(),
        ));
    }
    Ok(a)
}

/// Angle at `at` between `incoming` (ending at `at`) and `outgoing`
/// (starting at `at`), measured inside the face on `side`.
pub fn interior_angle(
    incoming: &Arc,
    outgoing: &Arc,
    at: &SpherePoint,
    side: Side,
) -> Result<AngleClass, GeomError> {
    if !same_point(incoming.to(), at) || !same_point(outgoing.from(), at) {
        return Err(GeomError::Degenerate(
            "arcs are not incident to the vertex".into(),
        ));
    }
    let left = corner_angle(at, &outgoing.tangent_at_from(), &incoming.tangent_at_to())?;
    let value = match side {
        Side::Left => left,
        Side::Right => TAU - left,
    };
    Ok(AngleClass::of(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn p(x: f64, y: f64, z: f64) -> SpherePoint {
        SpherePoint::normalize(Vector3::new(x, y, z)).unwrap()
    }

    fn lonlat(lon_deg: f64, lat_deg: f64) -> SpherePoint {
        let (lo, la) = (lon_deg.to_radians(), lat_deg.to_radians());
        p(la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin())
    }

    #[test]
    fn orient_examples() {
        let (x, y, z) = (p(1., 0., 0.), p(0., 1., 0.), p(0., 0., 1.));
        assert_eq!(orient(&x, &y, &z), 1);
        assert_eq!(orient(&y, &x, &z), -1);
        assert_eq!(orient(&x, &y, &y.antipode()), 0);
    }

    #[test]
    fn rejects_non_unit_points() {
        assert!(SpherePoint::new(1.0, 0.0, 0.0).is_ok());
        assert!(matches!(
            SpherePoint::new(1.0, 1e-3, 0.0),
            Err(GeomError::NotUnit(_))
        ));
    }

    #[test]
    fn arcs_on_same_circle_disjoint() {
        let a = Arc::minor(lonlat(0., 0.), lonlat(30., 0.)).unwrap();
        let b = Arc::minor(lonlat(60., 0.), lonlat(90., 0.)).unwrap();
        assert!(!arcs_cross(&a, &b).unwrap());
    }

    #[test]
    fn long_equator_arc_vs_meridian() {
        let eq = Arc::minor(lonlat(0., 0.), lonlat(170., 0.)).unwrap();
        let mer = Arc::minor(lonlat(100., -20.), lonlat(100., 25.)).unwrap();
        assert!(arcs_cross(&eq, &mer).unwrap());
        assert!(arcs_cross(&mer, &eq).unwrap());
        // oracle: some sample of the meridian arc lies on the equator arc
        let samples = mer.sample(4000);
        let hit = samples
            .windows(2)
            .any(|w| w[0].vec().z.signum() != w[1].vec().z.signum());
        assert!(hit);
        let far = Arc::minor(lonlat(-100., -20.), lonlat(-100., 25.)).unwrap();
        assert!(!arcs_cross(&eq, &far).unwrap());
    }

    #[test]
    fn shared_endpoint_is_not_a_crossing() {
        let o = lonlat(0., 0.);
        let a = Arc::minor(o, lonlat(40., 10.)).unwrap();
        let b = Arc::minor(o, lonlat(-30., 50.)).unwrap();
        assert!(!arcs_cross(&a, &b).unwrap());
    }

    #[test]
    fn major_arcs_from_a_shared_vertex_meet_at_the_antipode() {
        let o = lonlat(0., 0.);
        let a = Arc::new(o, lonlat(40., 10.), true).unwrap();
        let b = Arc::new(o, lonlat(-30., 50.), true).unwrap();
        assert!(arcs_cross(&a, &b).unwrap());
    }

    #[test]
    fn t_junction_is_degenerate() {
        let a = Arc::minor(lonlat(0., 0.), lonlat(60., 0.)).unwrap();
        let b = Arc::minor(lonlat(30., 0.), lonlat(30., 40.)).unwrap();
        assert!(matches!(arcs_cross(&a, &b), Err(GeomError::Degenerate(_))));
    }

    #[test]
    fn octant_corner() {
        let (x, y, z) = (p(1., 0., 0.), p(0., 1., 0.), p(0., 0., 1.));
        // face x -> y -> z is counter-clockwise seen from outside
        let inc = Arc::minor(x, y).unwrap();
        let out = Arc::minor(y, z).unwrap();
        let left = interior_angle(&inc, &out, &y, Side::Left).unwrap();
        assert!((left.value - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(left.kind, AngleKind::Convex);
        let right = interior_angle(&inc, &out, &y, Side::Right).unwrap();
        assert!((right.value - 3.0 * FRAC_PI_2).abs() < 1e-12);
        assert_eq!(right.kind, AngleKind::Reflex);
    }

    #[test]
    fn straight_corner_is_degenerate_class() {
        let inc = Arc::minor(lonlat(-20., 0.), lonlat(0., 0.)).unwrap();
        let out = Arc::minor(lonlat(0., 0.), lonlat(20., 0.)).unwrap();
        let a = interior_angle(&inc, &out, &lonlat(0., 0.), Side::Left).unwrap();
        assert_eq!(a.kind, AngleKind::Degenerate);
    }

    #[test]
    fn doubling_back_is_an_error() {
        let inc = Arc::minor(lonlat(20., 0.), lonlat(0., 0.)).unwrap();
        let out = Arc::minor(lonlat(0., 0.), lonlat(30., 0.)).unwrap();
        assert!(interior_angle(&inc, &out, &lonlat(0., 0.), Side::Left).is_err());
    }

    #[test]
    fn arc_sampling_stays_on_circle() {
        let a = Arc::new(lonlat(10., 20.), lonlat(80., -10.), true).unwrap();
        assert!(a.length() > PI);
        for s in a.sample(16) {
            assert!(s.vec().dot(&a.normal()).abs() < 1e-12);
        }
        let back = a.tangent_at_to();
        let fwd_end = a.reversed().tangent_at_from();
        assert!((back - fwd_end).norm() < 1e-12);
    }

    #[test]
    fn antipodal_or_coincident_endpoints_rejected() {
        let x = p(1., 0., 0.);
        assert!(Arc::minor(x, x).is_err());
        assert!(Arc::minor(x, x.antipode()).is_err());
    }
}
