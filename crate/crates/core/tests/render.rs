mod common;

use pseudotile::lift::{color_edges, lift};
use pseudotile::render::{render_svg, Highlight, Projection, RenderError, RenderSpec};
use pseudotile::stress::self_stress_basis;

fn classes(svg: &str) -> (usize, usize) {
    let doc = roxmltree::Document::parse(svg).expect("well-formed svg");
    let of = |c: &str| {
        doc.descendants()
            .filter(|n| n.has_tag_name("path") && n.attribute("class") == Some(c))
            .count()
    };
    (of("edge"), of("digon"))
}

#[test]
fn one_path_per_edge_and_per_digon() {
    for (_, t) in common::corpus(12) {
        let svg = render_svg(&t, &RenderSpec::default(), None).unwrap();
        assert_eq!(classes(&svg), (t.edge_count(), t.digon_count().unwrap()));
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}

#[test]
fn eight_digons_are_shaded() {
    let t = pseudotile::tiling::fixtures::twisted_antiprism();
    let svg = render_svg(&t, &RenderSpec::default(), None).unwrap();
    assert_eq!(classes(&svg), (18, 8));
}

#[test]
fn sampling_density_does_not_change_the_structure() {
    let (_, t) = common::embedded(5, 9);
    for projection in [
        Projection::StereographicNorth,
        Projection::StereographicSouth,
        Projection::BothHemispheres,
    ] {
        let at = |n| {
            let spec = RenderSpec {
                projection,
                samples_per_arc: n,
                highlight: Highlight::Digons,
            };
            classes(&render_svg(&t, &spec, None).unwrap())
        };
        assert_eq!(at(8), at(64));
    }
}

#[test]
fn rendering_is_deterministic() {
    let (_, t) = common::embedded(2, 10);
    let spec = RenderSpec::default();
    assert_eq!(
        render_svg(&t, &spec, None).unwrap(),
        render_svg(&t, &spec, None).unwrap()
    );
}

#[test]
fn colour_highlight_uses_the_colouring() {
    let t = pseudotile::embed::seed_k4();
    let vp = lift(&t, &self_stress_basis(&t)[0]).unwrap();
    let c = color_edges(&vp).unwrap();
    let spec = RenderSpec {
        highlight: Highlight::Colors,
        ..Default::default()
    };
    assert!(matches!(
        render_svg(&t, &spec, None),
        Err(RenderError::MissingColoring)
    ));
    let svg = render_svg(&t, &spec, Some(&c)).unwrap();
    assert_eq!(classes(&svg).0, 6);
}
