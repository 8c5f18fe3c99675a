// Stalk bases are only defined up to sign; the layer x ∘ ρ(|x|) does not care.

use lhsheaf::diffusion::{hypernet_weights, sign_equivariant_layer, LinearGain, Mlp};
use lhsheaf::linalg::{Exact, ReduceOptions};
use lhsheaf::local_sheaf::compute_stalk;
use lhsheaf::{build_flag_complex, fixtures};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = build_flag_complex(&fixtures::two_cycles(), 2)?;
    let stalk = compute_stalk::<Exact>(&f, 0, 1, 1, &ReduceOptions::default())?;
    // Ψ turns the (order, birth, death) of each cocycle pair into a weight
    let w = hypernet_weights(&stalk, 1, &Mlp::default_psi(), f.horizon());
    println!("W = {w:?}");
    let gain = LinearGain(w);
    let x = vec![0.7];
    let y = sign_equivariant_layer(&x, &gain)?;
    let y_flipped = sign_equivariant_layer(&[-0.7], &gain)?;
    println!("ψ(x) = {y:?}, ψ(-x) = {y_flipped:?}");
    assert_eq!(y_flipped[0], -y[0]);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
