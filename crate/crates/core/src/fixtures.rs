//! Named test graphs and the seed-fixed random graph corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::WeightedGraph;

/// Seed of the committed random corpus.
pub const CORPUS_SEED: u64 = 0x5eaf_1a9c;
pub const CORPUS_SIZE: usize = 200;

fn unit(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
    WeightedGraph::new(n, edges.iter().map(|&(u, v)| (u, v, 1.0))).expect("fixture graph")
}

pub fn single_point() -> WeightedGraph {
    unit(1, &[])
}

pub fn triangle() -> WeightedGraph {
    unit(3, &[(0, 1), (0, 2), (1, 2)])
}

/// Cycle graph `C_n` with unit weights.
pub fn cycle(n: usize) -> WeightedGraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    unit(n, &edges)
}

/// Two disjoint unit-weight 4-cycles on vertices 0..4 and 4..8.
pub fn two_cycles() -> WeightedGraph {
    let mut edges: Vec<_> = (0..4).map(|i| (i, (i + 1) % 4)).collect();
    edges.extend((0..4).map(|i| (4 + i, 4 + (i + 1) % 4)));
    unit(8, &edges)
}

pub fn complete(n: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    unit(n, &edges)
}

/// Octahedron graph: `K_6` minus the three antipodal pairs (0,5), (1,3), (2,4).
/// Its flag complex is a triangulated 2-sphere.
pub fn octahedron() -> WeightedGraph {
    let mut edges = Vec::new();
    for i in 0..6 {
        for j in i + 1..6 {
            if !matches!((i, j), (0, 5) | (1, 3) | (2, 4)) {
                edges.push((i, j));
            }
        }
    }
    unit(6, &edges)
}

/// Corners of the unit square, all six pairs weighted by Euclidean distance.
pub fn unit_square_points() -> Vec<Vec<f64>> {
    vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]
}

pub fn unit_square() -> WeightedGraph {
    WeightedGraph::from_points(&unit_square_points(), crate::complex::Metric::Euclidean, None)
        .expect("square")
}

/// A 4-vertex graph where the local 1-classes of vertices 0 and 1 overlap
/// only on `[3, 4)`: vertex 0 gets its class at 2 and loses it when the
/// triangle `{0,1,2}` fills in at 4, vertex 1 gets its class at 3.
pub fn overlapping_lifespans() -> WeightedGraph {
    WeightedGraph::new(4, [(0, 1, 1.0), (0, 2, 2.0), (1, 3, 3.0), (1, 2, 4.0)]).expect("fixture")
}

/// Vertex 0's local 1-class lives on `[2, 3)` and vertex 1's is born at 5,
/// so the two never coexist.
pub fn disjoint_lifespans() -> WeightedGraph {
    WeightedGraph::new(4, [(0, 1, 1.0), (0, 2, 2.0), (1, 2, 3.0), (1, 3, 5.0)]).expect("fixture")
}

/// A named graph with its flag-complex dimension cap.
#[derive(Clone, Debug)]
pub struct Golden {
    pub name: &'static str,
    pub graph: WeightedGraph,
    pub max_dim: usize,
    /// Betti numbers of the final complex.
    pub betti: Vec<usize>,
}

/// The golden corpus with known Betti numbers of the final complex.
pub fn golden() -> Vec<Golden> {
    vec![
        Golden { name: "c4", graph: cycle(4), max_dim: 3, betti: vec![1, 1] },
        Golden { name: "two_c4", graph: two_cycles(), max_dim: 3, betti: vec![2, 2] },
        Golden { name: "octahedron", graph: octahedron(), max_dim: 3, betti: vec![1, 0, 1] },
        Golden { name: "k4", graph: complete(4), max_dim: 3, betti: vec![1, 0, 0] },
    ]
}

/// Serialized form of a corpus graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl CorpusGraph {
    pub fn graph(&self) -> WeightedGraph {
        WeightedGraph::new(self.vertex_count, self.edges.iter().copied()).expect("corpus graph")
    }
}

/// Random graphs with 3..=8 vertices and at most 16 edges. Weights are
/// multiples of 1/8 so that ties occur.
pub fn random_corpus(seed: u64, count: usize) -> Vec<CorpusGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(3..=8usize);
            let mut pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            pairs.shuffle(&mut rng);
            let m = rng.gen_range(1..=pairs.len().min(16));
            let mut chosen: Vec<_> = pairs[..m].to_vec();
            chosen.sort_unstable();
            let edges = chosen
                .into_iter()
                .map(|(u, v)| (u, v, rng.gen_range(1..=16u32) as f64 / 8.0))
                .collect();
            CorpusGraph { vertex_count: n, edges }
        })
        .collect()
}

/// Random graphs with continuous weights; critical simplices are tie-free
/// with probability one.
pub fn random_continuous(seed: u64, count: usize, max_vertices: usize) -> Vec<WeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(3..=max_vertices);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.6) {
                        edges.push((i, j, rng.gen_range(0.1..1.0)));
                    }
                }
            }
            WeightedGraph::new(n, edges).expect("random graph")
        })
        .collect()
}
