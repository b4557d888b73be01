//! SVG figures of spherical tilings under stereographic projection.
//!
//! The north panel shows the upper hemisphere projected from the south pole,
//! the south panel the lower one projected from the north pole and mirrored
//! so both are seen from outside the sphere. Every edge is one `<path>`
//! (with a subpath per panel); shaded digons likewise.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lift::{EdgeColor, EdgeColoring};
use crate::sphere::SpherePoint;
use crate::tiling::{TileTag, Tiling, TilingError};

/// Minimum distance of every vertex and edge from a projection pole.
pub const POLE_CLEARANCE: f64 = 1e-6;

const PANEL: f64 = 400.0;
const SCALE: f64 = 180.0;
/// Projected points are pulled in to this radius (in disk units) so the
/// output stays bounded and never reaches the neighbouring panel; only the
/// unit disk is visible.
const CLAMP: f64 = 1.2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    StereographicNorth,
    StereographicSouth,
    #[default]
    BothHemispheres,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Highlight {
    #[default]
    Digons,
    Colors,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub projection: Projection,
    pub samples_per_arc: usize,
    pub highlight: Highlight,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            projection: Projection::BothHemispheres,
            samples_per_arc: 32,
            highlight: Highlight::Digons,
        }
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("samples_per_arc must be at least 8 (got {0})")]
    TooFewSamples(usize),
    #[error("edge colouring has {got} entries for {want} edges")]
    ColoringMismatch { got: usize, want: usize },
    #[error("highlight=colors needs an edge colouring")]
    MissingColoring,
    #[error("no rotation keeps the tiling clear of the projection poles")]
    NoClearPole,
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

#[derive(Clone, Copy)]
enum Side {
    North,
    South,
}

impl Side {
    /// Planar coordinates with the y axis up.
    fn raw(self, p: &Vector3<f64>) -> (f64, f64) {
        match self {
            Side::North => (p.x / (1.0 + p.z), p.y / (1.0 + p.z)),
            Side::South => (p.x / (1.0 - p.z), -p.y / (1.0 - p.z)),
        }
    }

    fn project(self, p: &Vector3<f64>) -> (f64, f64) {
        let (u, v) = self.raw(p);
        let r = u.hypot(v);
        if r > CLAMP {
            (u * CLAMP / r, v * CLAMP / r)
        } else {
            (u, v)
        }
    }

    fn clamped(self, p: &Vector3<f64>) -> bool {
        let z = match self {
            Side::North => p.z,
            Side::South => -p.z,
        };
        // radius of the projection is sqrt((1 - z) / (1 + z))
        (1.0 - z) > CLAMP * CLAMP * (1.0 + z)
    }
}

struct Panel {
    side: Side,
    cx: f64,
    cy: f64,
}

impl Panel {
    fn xy(&self, p: &Vector3<f64>) -> (f64, f64) {
        let (u, v) = self.side.project(p);
        (self.cx + SCALE * u, self.cy - SCALE * v)
    }
}

/// Rotation that keeps every vertex and edge at least [`POLE_CLEARANCE`]
/// from both poles; the identity when nothing is close.
fn clear_rotation(t: &Tiling) -> Result<Matrix3<f64>, RenderError> {
    let axis = Unit::new_normalize(Vector3::new(1.0, 2.0, 3.0));
    let poles = [
        SpherePoint::new(0.0, 0.0, 1.0).unwrap(),
        SpherePoint::new(0.0, 0.0, -1.0).unwrap(),
    ];
    for k in 0..64 {
        let r = *Rotation3::from_axis_angle(&axis, 0.37 * k as f64).matrix();
        let back = r.transpose();
        // the rotated tiling is clear of a pole iff the tiling is clear of
        // the pole rotated back
        let clear = poles.iter().all(|pole| {
            let q = pole.rotate(&back);
            t.points().iter().all(|p| p.distance(&q) >= POLE_CLEARANCE)
                && t.edges()
                    .iter()
                    .all(|e| e.arc.distance_to(&q) >= POLE_CLEARANCE)
        });
        if clear {
            return Ok(r);
        }
    }
    Err(RenderError::NoClearPole)
}

fn fmt(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Points along the great-circle segment `a -> b`, refined where the
/// projection runs into the clamp circle so the clamped path still winds
/// correctly around the visible disk.
fn refine(side: Side, a: &Vector3<f64>, b: &Vector3<f64>, depth: u32, out: &mut Vec<Vector3<f64>>) {
    let (pa, pb) = (side.project(a), side.project(b));
    let turn = (pa.0 * pb.1 - pa.1 * pb.0)
        .atan2(pa.0 * pb.0 + pa.1 * pb.1)
        .abs();
    if depth < 24 && side.clamped(a) && side.clamped(b) && turn > 0.2 {
        let m = (a + b).normalize();
        refine(side, a, &m, depth + 1, out);
        out.push(m);
        refine(side, &m, b, depth + 1, out);
    }
}

fn polyline(side: Side, pts: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let mut out = Vec::with_capacity(pts.len());
    for (k, p) in pts.iter().enumerate() {
        if k > 0 {
            refine(side, &pts[k - 1], p, 0, &mut out);
        }
        out.push(*p);
    }
    out
}

/// Runs of the sampled edge that touch the visible disk.
fn edge_subpaths(panel: &Panel, pts: &[Vector3<f64>], d: &mut String) {
    let pts = polyline(panel.side, pts);
    let mut drawing = false;
    for k in 0..pts.len() {
        let visible = !panel.side.clamped(&pts[k])
            || (k > 0 && !panel.side.clamped(&pts[k - 1]))
            || (k + 1 < pts.len() && !panel.side.clamped(&pts[k + 1]));
        if !visible {
            drawing = false;
            continue;
        }
        let (x, y) = panel.xy(&pts[k]);
        let cmd = if drawing { 'L' } else { 'M' };
        write!(d, "{cmd}{} {} ", fmt(x), fmt(y)).unwrap();
        drawing = true;
    }
}

fn face_subpath(panel: &Panel, pts: &[Vector3<f64>], d: &mut String) {
    let mut ring = pts.to_vec();
    ring.push(pts[0]);
    let ring = polyline(panel.side, &ring);
    let ring = &ring[..ring.len() - 1];
    // a counter-clockwise face keeps its orientation in the plane unless it
    // wraps around the projection pole
    let raw: Vec<(f64, f64)> = ring.iter().map(|p| panel.side.raw(p)).collect();
    let area: f64 = (0..raw.len())
        .map(|i| {
            let (a, b) = (raw[i], raw[(i + 1) % raw.len()]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum();
    let xy: Vec<(f64, f64)> = ring.iter().map(|p| panel.xy(p)).collect();
    if area < 0.0 {
        // the face is the outside of its boundary: add an enclosing circle
        let r = SCALE * (CLAMP + 0.01);
        write!(
            d,
            "M{} {} A{r} {r} 0 1 0 {} {} A{r} {r} 0 1 0 {} {} Z ",
            fmt(panel.cx + r),
            fmt(panel.cy),
            fmt(panel.cx - r),
            fmt(panel.cy),
            fmt(panel.cx + r),
            fmt(panel.cy),
            r = fmt(r)
        )
        .unwrap();
    }
    for (k, (x, y)) in xy.iter().enumerate() {
        let cmd = if k == 0 { 'M' } else { 'L' };
        write!(d, "{cmd}{} {} ", fmt(*x), fmt(*y)).unwrap();
    }
    d.push_str("Z ");
}

/// Sampled boundary of face `f`, counter-clockwise.
fn face_points(t: &Tiling, f: usize, n: usize, r: &Matrix3<f64>) -> Vec<Vector3<f64>> {
    let mut out = Vec::new();
    for &h in t.face_half_edges(f) {
        let he = t.half_edge(h);
        let edge = &t.edges()[he.edge];
        let mut s = edge.arc.sample(n);
        if he.origin != edge.a {
            s.reverse();
        }
        s.pop();
        out.extend(s.iter().map(|p| r * p.vec()));
    }
    out
}

pub fn render_svg(
    t: &Tiling,
    spec: &RenderSpec,
    coloring: Option<&EdgeColoring>,
) -> Result<String, RenderError> {
    if spec.samples_per_arc < 8 {
        return Err(RenderError::TooFewSamples(spec.samples_per_arc));
    }
    if let Some(c) = coloring {
        if c.colors.len() != t.edge_count() {
            return Err(RenderError::ColoringMismatch {
                got: c.colors.len(),
                want: t.edge_count(),
            });
        }
    }
    if spec.highlight == Highlight::Colors && coloring.is_none() {
        return Err(RenderError::MissingColoring);
    }
    let rot = clear_rotation(t)?;
    let half = PANEL / 2.0;
    let panels: Vec<Panel> = match spec.projection {
        Projection::StereographicNorth => vec![Panel {
            side: Side::North,
            cx: half,
            cy: half,
        }],
        Projection::StereographicSouth => vec![Panel {
            side: Side::South,
            cx: half,
            cy: half,
        }],
        Projection::BothHemispheres => vec![
            Panel {
                side: Side::North,
                cx: half,
                cy: half,
            },
            Panel {
                side: Side::South,
                cx: PANEL + half,
                cy: half,
            },
        ],
    };
    let width = PANEL * panels.len() as f64;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = width,
        h = PANEL
    )
    .unwrap();
    svg.push_str("<defs><clipPath id=\"disks\">");
    for p in &panels {
        write!(
            svg,
            r#"<circle cx="{}" cy="{}" r="{}"/>"#,
            p.cx, p.cy, SCALE
        )
        .unwrap();
    }
    svg.push_str("</clipPath></defs>\n");
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for p in &panels {
        writeln!(
            svg,
            r##"<circle class="horizon" cx="{}" cy="{}" r="{}" fill="none" stroke="#999" stroke-dasharray="4 3"/>"##,
            p.cx, p.cy, SCALE
        )
        .unwrap();
    }

    if spec.highlight == Highlight::Digons {
        for f in 0..t.face_count() {
            if t.classify_face(f)?.tag != TileTag::PseudoDiGon {
                continue;
            }
            let pts = face_points(t, f, spec.samples_per_arc, &rot);
            let mut d = String::new();
            for p in &panels {
                face_subpath(p, &pts, &mut d);
            }
            writeln!(
                svg,
                r##"<path class="digon" clip-path="url(#disks)" fill="#bbbbbb" fill-rule="evenodd" stroke="none" d="{}"/>"##,
                d.trim_end()
            )
            .unwrap();
        }
    }

    for (k, e) in t.edges().iter().enumerate() {
        let pts: Vec<Vector3<f64>> = e
            .arc
            .sample(spec.samples_per_arc)
            .iter()
            .map(|p| rot * p.vec())
            .collect();
        let mut d = String::new();
        for p in &panels {
            edge_subpaths(p, &pts, &mut d);
        }
        let stroke = match (spec.highlight, coloring) {
            (Highlight::Colors, Some(c)) => match c.colors[k] {
                EdgeColor::Red => "#d62728",
                EdgeColor::Blue => "#1f4fd6",
            },
            _ => "#000000",
        };
        writeln!(
            svg,
            r#"<path class="edge" data-edge="{}-{}" clip-path="url(#disks)" fill="none" stroke="{stroke}" stroke-width="1.5" d="{}"/>"#,
            t.id(e.a),
            t.id(e.b),
            d.trim_end()
        )
        .unwrap();
    }

    for (v, p) in t.points().iter().enumerate() {
        let q = rot * p.vec();
        for panel in &panels {
            if !panel.side.clamped(&q) {
                let z = match panel.side {
                    Side::North => q.z,
                    Side::South => -q.z,
                };
                if z >= 0.0 {
                    let (x, y) = panel.xy(&q);
                    writeln!(
                        svg,
                        r#"<circle class="vertex" data-id="{}" cx="{}" cy="{}" r="2.5"/>"#,
                        t.id(v),
                        fmt(x),
                        fmt(y)
                    )
                    .unwrap();
                }
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::seed_k4;
    use crate::tiling::fixtures;

    fn count(svg: &str, class: &str) -> usize {
        svg.matches(&format!("<path class=\"{class}\"")).count()
    }

    #[test]
    fn seed_has_one_path_per_edge_and_digon() {
        let t = seed_k4();
        let svg = render_svg(&t, &RenderSpec::default(), None).unwrap();
        assert_eq!(count(&svg, "edge"), 6);
        assert_eq!(count(&svg, "digon"), 4);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }

    #[test]
    fn octahedron_needs_rotation() {
        // vertices sit on both poles
        let t = fixtures::octahedron();
        let r = clear_rotation(&t).unwrap();
        assert_ne!(r, Matrix3::identity());
        let svg = render_svg(
            &t,
            &RenderSpec {
                highlight: Highlight::None,
                ..Default::default()
            },
            None,
        )
        .unwrap();
        assert_eq!(count(&svg, "edge"), 12);
        assert_eq!(count(&svg, "digon"), 0);
    }

    #[test]
    fn rejects_coarse_sampling() {
        let spec = RenderSpec {
            samples_per_arc: 4,
            ..Default::default()
        };
        assert!(matches!(
            render_svg(&seed_k4(), &spec, None),
            Err(RenderError::TooFewSamples(4))
        ));
    }

    #[test]
    fn single_panel() {
        let spec = RenderSpec {
            projection: Projection::StereographicSouth,
            ..Default::default()
        };
        let svg = render_svg(&seed_k4(), &spec, None).unwrap();
        assert!(svg.contains(r#"width="400""#));
        assert_eq!(count(&svg, "edge"), 6);
    }
}
