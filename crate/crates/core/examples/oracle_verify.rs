// Cross-checks on the golden graphs: fast path against dense linear algebra.

use lhsheaf::linalg::{Exact, ReduceOptions};
use lhsheaf::oracle;
use lhsheaf::persistence::persistent_cohomology;
use lhsheaf::{build_flag_complex, fixtures};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for g in fixtures::golden() {
        let f = build_flag_complex(&g.graph, g.max_dim)?;
        let top = g.betti.len() - 1;
        let d = persistent_cohomology::<Exact>(&f, top, &ReduceOptions::default())?;
        let fast: Vec<usize> = (0..=top).map(|k| d.betti_at(f.horizon(), k)).collect();
        let dense: Vec<usize> = (0..=top).map(|k| oracle::betti_dense(&f, f.horizon(), k)).collect();
        let excision = (0..f.vertices().len()).all(|v| oracle::excision_check(&f, v, top).is_ok_and(|r| r.holds()));
        println!("{:<10} fast {fast:?} dense {dense:?} excision {excision}", g.name);
        assert!(fast == g.betti && dense == g.betti && excision);
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
