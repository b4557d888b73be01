mod common;

use pseudotile::canon::is_isomorphic;
use pseudotile::embed::{embed_laman_plus_one, embed_traced, seed_k4, EmbedError, EmbedderConfig};
use pseudotile::graph::Graph;
use pseudotile::tiling::Tiling;

#[test]
fn corpus_embeddings_are_nice_with_four_digons() {
    for (g, t) in common::corpus(30) {
        assert_eq!(t.skeleton(), g);
        assert!(t.is_nice().unwrap().nice);
        assert_eq!(t.digon_count().unwrap(), 4);
        let c = t.count_report().unwrap();
        assert!(c.residuals_zero(), "{c:?}");
        let (v, e) = (c.v as i64, c.e as i64);
        assert_eq!(c.f3 as i64, v - 4);
        assert_eq!(c.f2 as i64, e - 2 * v + 6);
    }
}

#[test]
fn same_seed_same_tiling() {
    let (g, t) = common::embedded(11, 9);
    let again = embed_laman_plus_one(&g, &EmbedderConfig::with_seed(11)).unwrap();
    assert_eq!(
        serde_json::to_string(&t).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
}

#[test]
fn json_round_trip_is_exact() {
    let (_, t) = common::embedded(4, 10);
    let s = serde_json::to_string(&t).unwrap();
    let back: Tiling = serde_json::from_str(&s).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.points(), t.points());
}

#[test]
fn relabelled_graph_embeds_to_the_same_combinatorics() {
    let (g, _) = common::embedded(7, 8);
    let h = g.relabel(|v| format!("x{}", v.as_str()).as_str().into());
    let t = embed_laman_plus_one(&h, &EmbedderConfig::with_seed(7)).unwrap();
    assert!(is_isomorphic(&t.skeleton(), &g));
    assert!(t.is_nice().unwrap().nice);
}

#[test]
fn k4_embeds_as_the_seed() {
    let g = Graph::complete(["0", "1", "2", "3"]);
    let e = embed_traced(&g, &EmbedderConfig::default()).unwrap();
    assert!(e.sequence.steps.is_empty() && e.backtracks.is_empty());
    assert_eq!(e.tiling, seed_k4());
}

#[test]
fn wrong_class_is_rejected() {
    let mut laman = Graph::complete(["a", "b", "c", "d"]);
    laman.remove_edge(&"a".into(), &"b".into());
    assert!(matches!(
        embed_laman_plus_one(&laman, &EmbedderConfig::default()),
        Err(EmbedError::NotLamanPlusOne(_))
    ));
}

#[test]
fn budget_is_validated() {
    let g = Graph::complete(["a", "b", "c", "d"]);
    let cfg = EmbedderConfig {
        max_samples_per_step: 0,
        ..EmbedderConfig::default()
    };
    assert!(matches!(
        embed_laman_plus_one(&g, &cfg),
        Err(EmbedError::InvalidConfig(_))
    ));
}
