mod common;

use proptest::prelude::*;

use lhsheaf::linalg::{Exact, Field, ReduceOptions};
use lhsheaf::local_sheaf::{assemble_laplacian, compute_stalks, laplacian_blocks, LaplacianMode, LocalStalk};
use lhsheaf::oracle::{self, DenseMatrix};
use lhsheaf::{build_flag_complex, Filtration};

fn stalks(f: &Filtration) -> Vec<LocalStalk<Exact>> {
    compute_stalks::<Exact>(f, 2, 1, &ReduceOptions::default(), 1).unwrap()
}

fn slice(f: &Filtration, st: &[LocalStalk<Exact>], k: usize, t: f64) -> Vec<Vec<Exact>> {
    let blocks = laplacian_blocks(f, st, k, &ReduceOptions::default(), 1).unwrap();
    assemble_laplacian(f, st, &blocks, k, LaplacianMode::Slice(t)).unwrap().to_dense()
}

/// Smallest eigenvalue sign test: a symmetric matrix is PSD iff every
/// principal pivot in exact LDLᵀ elimination is nonnegative (with zero
/// pivots forcing a zero row).
fn is_psd(m: &[Vec<Exact>]) -> bool {
    let n = m.len();
    let mut a = m.to_vec();
    let zero = Exact::from_i64(0);
    for p in 0..n {
        if a[p][p] < zero {
            return false;
        }
        if a[p][p] == zero {
            if (p..n).any(|j| a[p][j] != zero) {
                return false;
            }
            continue;
        }
        for i in p + 1..n {
            let factor = a[i][p].clone() / a[p][p].clone();
            for j in p..n {
                let d = factor.clone() * a[p][j].clone();
                a[i][j] = a[i][j].clone() - d;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn slices_are_symmetric_psd(g in common::arb_graph(7)) {
        let f = build_flag_complex(&g, 3).unwrap();
        let st = stalks(&f);
        for k in 1..=2 {
            for t in f.critical_values() {
                let m = slice(&f, &st, k, t);
                prop_assert!(DenseMatrix::from_rows(&m).is_symmetric());
                prop_assert!(is_psd(&m), "k={} t={}", k, t);
            }
        }
    }

    #[test]
    fn weighted_mode_is_self_adjoint_for_lifespans(g in common::arb_graph(7)) {
        // entry (a, b) is divided by a's lifespan, so diag(span) W is symmetric
        let f = build_flag_complex(&g, 3).unwrap();
        let st = stalks(&f);
        let blocks = laplacian_blocks(&f, &st, 1, &ReduceOptions::default(), 1).unwrap();
        let w = assemble_laplacian(&f, &st, &blocks, 1, LaplacianMode::Weighted).unwrap();
        let m = w.to_dense();
        let span = |a: usize| w.lifespans[a].end.min(f.horizon()) - w.lifespans[a].start;
        for a in (0..m.len()).filter(|&a| span(a) > 0.0) {
            for b in (0..m.len()).filter(|&b| span(b) > 0.0) {
                let (x, y) = (m[a][b].to_f64() * span(a), m[b][a].to_f64() * span(b));
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "({}, {}): {} vs {}", a, b, x, y);
            }
        }
    }

    #[test]
    fn kernel_counts_cycles(lengths in prop::collection::vec(4usize..8, 1..4), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        let mut base = 0;
        for &n in &lengths {
            for i in 0..n {
                let (u, v) = (base + i, base + (i + 1) % n);
                edges.push((u.min(v), u.max(v), rng.gen_range(1..=4) as f64 / 2.0));
            }
            base += n;
        }
        let g = lhsheaf::WeightedGraph::new(base, edges).unwrap();
        let f = build_flag_complex(&g, 3).unwrap();
        let st = stalks(&f);
        let blocks = laplacian_blocks(&f, &st, 1, &ReduceOptions::default(), 1).unwrap();
        let lap = assemble_laplacian(&f, &st, &blocks, 1, LaplacianMode::Slice(f.horizon())).unwrap();
        let nullity = DenseMatrix::from_rows(&lap.alive_part().to_dense()).nullity();
        prop_assert_eq!(nullity, lengths.len());
        prop_assert_eq!(nullity, oracle::betti_dense(&f, f.horizon(), 1));
    }

    #[test]
    fn sign_flip_conjugates_the_laplacian(g in common::arb_graph(7), pick in any::<prop::sample::Index>()) {
        let f = build_flag_complex(&g, 3).unwrap();
        let st = stalks(&f);
        let owners: Vec<(usize, usize)> = st
            .iter()
            .enumerate()
            .flat_map(|(v, s)| (0..s.cocycles.len()).filter(move |&i| s.cocycles[i].order == 1).map(move |i| (v, i)))
            .collect();
        prop_assume!(!owners.is_empty());
        let (v, i) = owners[pick.index(owners.len())];
        let mut flipped = st.clone();
        let c = &mut flipped[v].cocycles[i];
        for (_, x) in c.representative.iter_mut().chain(c.coboundary.iter_mut()) {
            *x = -x.clone();
        }
        // position of the flipped coordinate in the assembled order
        let offset: usize = st[..v].iter().map(|s| s.dim(1)).sum::<usize>()
            + st[v].cocycles[..i].iter().filter(|c| c.order == 1).count();
        let t = f.horizon();
        let (a, b) = (slice(&f, &st, 1, t), slice(&f, &flipped, 1, t));
        for r in 0..a.len() {
            for s in 0..a.len() {
                let sign = if (r == offset) != (s == offset) { -Exact::from_i64(1) } else { Exact::from_i64(1) };
                prop_assert_eq!(b[r][s].clone(), sign * a[r][s].clone());
            }
        }
    }

    #[test]
    fn atoms_end_no_later_than_their_cocycles(g in common::arb_graph(8)) {
        let f = build_flag_complex(&g, 3).unwrap();
        let st = stalks(&f);
        for k in 1..=2 {
            for b in laplacian_blocks(&f, &st, k, &ReduceOptions::default(), 1).unwrap() {
                for atom in &b.atoms {
                    prop_assert!(!atom.interval.is_empty());
                    for (a, _) in &atom.v_a {
                        prop_assert!(atom.interval.end <= b.lifespans_u[*a].end);
                    }
                    for (j, _) in &atom.v_b {
                        prop_assert!(atom.interval.end <= b.lifespans_v[*j].end);
                    }
                }
            }
        }
    }

    #[test]
    fn mayer_vietoris_on_adjacent_stars(g in common::arb_graph(6), pick in any::<prop::sample::Index>()) {
        prop_assume!(!g.edges().is_empty());
        let (u, v, _) = g.edges()[pick.index(g.edges().len())];
        let f = build_flag_complex(&g, 3).unwrap();
        let (a, b) = (f.vertex_star(u).unwrap(), f.vertex_star(v).unwrap());
        for k in 0..=2 {
            prop_assert!(oracle::check_mayer_vietoris(&f, &a, &b, k).unwrap().is_exact());
        }
    }
}

/// Two filled triangles joined by a bridge. The bridge endpoints are
/// non-manifold points with one local class each, and the only restriction
/// between them runs through the bridge, so the kernel is one dimensional
/// although the complex is contractible.
#[test]
fn kernel_exceeds_homology_at_non_manifold_points() {
    let g = lhsheaf::WeightedGraph::new(6, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (3, 5, 1.0), (4, 5, 1.0)]).unwrap();
    let f = build_flag_complex(&g, 3).unwrap();
    let st = stalks(&f);
    let dims: Vec<usize> = st.iter().map(|s| s.dim(1)).collect();
    assert_eq!(dims, [0, 0, 1, 1, 0, 0]);
    let blocks = laplacian_blocks(&f, &st, 1, &ReduceOptions::default(), 1).unwrap();
    let lap = assemble_laplacian(&f, &st, &blocks, 1, LaplacianMode::Slice(f.horizon())).unwrap();
    assert_eq!(DenseMatrix::from_rows(&lap.alive_part().to_dense()).nullity(), 1);
    assert_eq!(oracle::betti_dense(&f, f.horizon(), 1), 0);
}

#[test]
fn disjoint_stars_are_exact_too() {
    let f = build_flag_complex(&lhsheaf::fixtures::cycle(4), 2).unwrap();
    let (a, b) = (f.vertex_star(0).unwrap(), f.vertex_star(2).unwrap());
    assert!(f.intersection(&a, &b).is_empty());
    for k in 0..=1 {
        assert!(oracle::check_mayer_vietoris(&f, &a, &b, k).unwrap().is_exact());
    }
}

#[test]
fn triangle_has_no_blocks() {
    let f = build_flag_complex(&lhsheaf::fixtures::triangle(), 2).unwrap();
    let st = compute_stalks::<f64>(&f, 1, 1, &ReduceOptions::default(), 1).unwrap();
    let blocks = laplacian_blocks(&f, &st, 1, &ReduceOptions::default(), 1).unwrap();
    assert!(blocks.iter().all(|b| b.atoms.is_empty()));
    assert!(lhsheaf::local_sheaf::laplacian_dump(&st, &blocks, 1).blocks.is_empty());
}
