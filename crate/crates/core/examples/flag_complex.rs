// Vietoris-Rips filtration of the unit square's corners.

use lhsheaf::{build_flag_complex, Metric, WeightedGraph};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let corners = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    let graph = WeightedGraph::from_points(&corners, Metric::Euclidean, None)?;
    let f = build_flag_complex(&graph, 3)?;
    for i in 0..f.len() {
        println!("{:>2}  {:?}  {:.4}", i, f.simplex(i).vertices(), f.value(i));
    }
    assert_eq!(f.len(), 15);
    // both diagonals, all four triangles and the tetrahedron enter at √2
    assert_eq!(f.values().iter().filter(|&&v| v == 2f64.sqrt()).count(), 2 + 4 + 1);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
