// Local homology tells manifold points from the rest: every vertex of the
// octahedron sees a 2-sphere around it, a triangle's corners see nothing.

use lhsheaf::linalg::{Exact, ReduceOptions};
use lhsheaf::local_sheaf::compute_stalks;
use lhsheaf::{build_flag_complex, fixtures};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let opts = ReduceOptions::default();
    let oct = build_flag_complex(&fixtures::octahedron(), 3)?;
    for s in compute_stalks::<Exact>(&oct, 2, 1, &opts, 0)? {
        println!("octahedron vertex {}: dims k=1 {}, k=2 {}", s.vertex, s.dim(1), s.dim(2));
        assert_eq!((s.dim(1), s.dim(2)), (0, 1));
    }
    let k3 = build_flag_complex(&fixtures::triangle(), 2)?;
    assert!(compute_stalks::<Exact>(&k3, 1, 1, &opts, 0)?.iter().all(|s| s.is_empty()));
    println!("triangle: all stalks empty");
    Ok(())
}

fn main() {
    run_example().unwrap();
}
