// Persistent cohomology of a square, with representatives.

use lhsheaf::linalg::{Exact, ReduceOptions};
use lhsheaf::persistence::persistent_cohomology;
use lhsheaf::{build_flag_complex, fixtures};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = build_flag_complex(&fixtures::unit_square(), 2)?;
    let d = persistent_cohomology::<Exact>(&f, 1, &ReduceOptions::default())?;
    print!("{}", lhsheaf::io::diagram_csv(&d)?);
    let loop1 = d.of_order(1).next().ok_or("no loop")?;
    println!("loop born by {:?}, killed by {:?}", f.simplex(loop1.birth_index).vertices(), loop1.death_index.map(|j| f.simplex(j).vertices()));
    assert_eq!((loop1.birth, loop1.death), (1.0, 2f64.sqrt()));
    Ok(())
}

fn main() {
    run_example().unwrap();
}
