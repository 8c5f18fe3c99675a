// Heat flow on the 4-cycle's sheaf: random features settle in the kernel.

use lhsheaf::diffusion::{diffuse, lambda_max, FeatureBundle};
use lhsheaf::linalg::ReduceOptions;
use lhsheaf::local_sheaf::{assemble_laplacian, compute_stalks, laplacian_blocks, LaplacianMode};
use lhsheaf::{build_flag_complex, fixtures};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = build_flag_complex(&fixtures::cycle(4), 2)?;
    let opts = ReduceOptions::default();
    let stalks = compute_stalks::<f64>(&f, 1, 1, &opts, 0)?;
    let blocks = laplacian_blocks(&f, &stalks, 1, &opts, 0)?;
    let lap = assemble_laplacian(&f, &stalks, &blocks, 1, LaplacianMode::Slice(f.horizon()))?;
    let x = FeatureBundle::random(&lap, 1, 42);
    let alpha = 0.9 / lambda_max(&lap, 10_000);
    let run = diffuse(&x, &lap, alpha, 500)?;
    for (step, e) in run.energies.iter().enumerate().step_by(50) {
        println!("step {step:>3}  energy {e:.3e}");
    }
    let last = *run.energies.last().ok_or("no steps")?;
    println!("final {:?}", run.features.channels[0]);
    assert!(last < 1e-10);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
