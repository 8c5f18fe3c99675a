#![allow(dead_code)]

use std::path::PathBuf;

use lhsheaf::fixtures::CorpusGraph;
use lhsheaf::{build_flag_complex, Filtration};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// The committed 200-graph corpus.
pub fn corpus() -> Vec<CorpusGraph> {
    let text = std::fs::read_to_string(data_path("random_corpus.json")).expect("corpus file");
    serde_json::from_str(&text).expect("corpus json")
}

/// Flag complexes of the corpus, capped at dimension 3.
pub fn corpus_filtrations() -> Vec<Filtration> {
    corpus().iter().map(|g| build_flag_complex(&g.graph(), 3).unwrap()).collect()
}

/// Random weighted graphs on up to `max_n` vertices. Weights are multiples
/// of 1/4 so ties are common.
pub fn arb_graph(max_n: usize) -> impl proptest::strategy::Strategy<Value = lhsheaf::WeightedGraph> {
    use proptest::prelude::*;
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let m = pairs.len();
        (Just(n), Just(pairs), prop::collection::vec(prop::option::weighted(0.6, 1u32..=8), m)).prop_map(
            |(n, pairs, ws)| {
                let edges = pairs.into_iter().zip(ws).filter_map(|((u, v), w)| w.map(|w| (u, v, w as f64 / 4.0)));
                lhsheaf::WeightedGraph::new(n, edges).unwrap()
            },
        )
    })
}
