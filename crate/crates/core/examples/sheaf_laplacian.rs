// Laplacian blocks of the 4-cycle and the kernel of the assembled operator.

use lhsheaf::linalg::{Exact, ReduceOptions};
use lhsheaf::local_sheaf::{assemble_laplacian, compute_stalks, laplacian_blocks, LaplacianMode};
use lhsheaf::oracle::DenseMatrix;
use lhsheaf::{build_flag_complex, fixtures};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = build_flag_complex(&fixtures::cycle(4), 2)?;
    let opts = ReduceOptions::default();
    let stalks = compute_stalks::<Exact>(&f, 1, 1, &opts, 0)?;
    let blocks = laplacian_blocks(&f, &stalks, 1, &opts, 0)?;
    for b in &blocks {
        for a in &b.atoms {
            println!("({}, {}) on [{}, {}): vA {:?} vB {:?}", b.u, b.v, a.interval.start, a.interval.end, a.v_a, a.v_b);
        }
    }
    let lap = assemble_laplacian(&f, &stalks, &blocks, 1, LaplacianMode::Slice(f.horizon()))?;
    for row in lap.to_dense() {
        println!("{}", row.iter().map(|x| format!("{x:>3}")).collect::<String>());
    }
    let kernel = DenseMatrix::from_rows(&lap.alive_part().to_dense()).nullity();
    println!("kernel dimension {kernel}");
    assert_eq!(kernel, 1);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
