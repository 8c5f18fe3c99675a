//! Acceptance criteria, one printed line each. Runs as a plain binary under
//! `cargo test`; exits nonzero when any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lhsheaf::diffusion::{
    diffuse, dirichlet_energy, filtration_gradient, lambda_max, psi_layer_jvp, sign_equivariant_layer,
    weights_from_descriptors, Endpoint, FeatureBundle, LinearGain, Mlp, PSI_WIDTHS,
};
use lhsheaf::fixtures;
use lhsheaf::linalg::{Exact, Field, ReduceOptions};
use lhsheaf::local_sheaf::{
    assemble_laplacian, compute_stalk, compute_stalks, laplacian_blocks, AssembledLaplacian, LaplacianMode,
};
use lhsheaf::oracle::{self, DenseMatrix};
use lhsheaf::persistence::{persistent_cohomology, persistent_relative_cohomology};
use lhsheaf::{build_flag_complex, Filtration, Result};

const OPTS: ReduceOptions = ReduceOptions { eps: 1e-9, clearing: false };

/// Outcome of one criterion: `Ok(detail)` or `Err(first failure)`.
type Outcome = std::result::Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn golden_filtrations() -> Vec<(&'static str, Filtration)> {
    fixtures::golden().into_iter().map(|g| (g.name, build_flag_complex(&g.graph, g.max_dim).unwrap())).collect()
}

fn golden_betti() -> Outcome {
    for g in fixtures::golden() {
        let f = build_flag_complex(&g.graph, g.max_dim).unwrap();
        let top = g.betti.len() - 1;
        let d = lift(persistent_cohomology::<Exact>(&f, top, &OPTS))?;
        let fast: Vec<usize> = (0..=top).map(|k| d.betti_at(f.horizon(), k)).collect();
        let dense: Vec<usize> = (0..=top).map(|k| oracle::betti_dense(&f, f.horizon(), k)).collect();
        check(fast == g.betti && dense == g.betti, || format!("{}: fast {fast:?}, oracle {dense:?}, expected {:?}", g.name, g.betti))?;
        for t in f.critical_values() {
            for k in 0..=top {
                let (a, b) = (d.betti_at(t, k), oracle::betti_dense(&f, t, k));
                check(a == b, || format!("{} t={t} k={k}: fast {a}, oracle {b}", g.name))?;
            }
        }
    }
    Ok("C4 (1,1), two C4 (2,2), octahedron (1,0,1), K4 (1,0,0); fast == oracle at every threshold".into())
}

fn local_fixtures() -> Outcome {
    let cases: [(&str, lhsheaf::WeightedGraph, usize, [usize; 2]); 3] = [
        ("octahedron", fixtures::octahedron(), 3, [0, 1]),
        ("K3", fixtures::triangle(), 3, [0, 0]),
        ("C4", fixtures::cycle(4), 3, [1, 0]),
    ];
    for (name, g, dim, expected) in cases {
        let f = build_flag_complex(&g, dim).unwrap();
        let stalks = lift(compute_stalks::<Exact>(&f, 2, 1, &OPTS, 1))?;
        for s in &stalks {
            let got = [s.dim(1), s.dim(2)];
            check(got == expected, || format!("{name} vertex {}: stalk dims {got:?}, expected {expected:?}", s.vertex))?;
        }
    }
    Ok("octahedron one k=2 class, K3 empty, C4 one k=1 class at every vertex".into())
}

fn excision() -> Outcome {
    let mut compared = 0usize;
    for (gi, f) in common::corpus_filtrations().iter().enumerate() {
        let thresholds = f.critical_values();
        for v in 0..f.vertices().len() {
            let star = lift(f.vertex_star(v))?;
            let full = lift(persistent_relative_cohomology::<Exact>(f, &star, 2, &OPTS))?;
            let (trunc, local_star) = lift(f.truncate_neighborhood(&[v], 1))?;
            let truncated = lift(persistent_relative_cohomology::<Exact>(&trunc.filtration, &local_star, 2, &OPTS))?;
            let stalk = lift(compute_stalk::<Exact>(f, v, 2, 1, &OPTS))?;
            for &t in &thresholds {
                for k in 0..=2 {
                    let (a, b) = (truncated.betti_at(t, k), full.betti_at(t, k));
                    check(a == b, || format!("graph {gi} vertex {v} t={t} k={k}: truncated {a}, full {b}"))?;
                    if k >= 1 {
                        let s = stalk.of_order(k).iter().filter(|c| c.alive_at(t)).count();
                        check(s == b, || format!("graph {gi} vertex {v} t={t} k={k}: stalk {s}, full {b}"))?;
                    }
                    compared += 1;
                }
            }
            for k in 0..=2 {
                let r = lift(oracle::excision_check(f, v, k))?;
                check(r.holds(), || format!("graph {gi} vertex {v} k={k}: dense excision rows {:?}", r.rows))?;
            }
        }
    }
    Ok(format!("{compared} (graph, vertex, t, k) comparisons, exact carrier, zero tolerance"))
}

fn kernel_is_homology() -> Outcome {
    let mut lines = Vec::new();
    for (name, f) in golden_filtrations() {
        let stalks = lift(compute_stalks::<Exact>(&f, 2, 1, &OPTS, 1))?;
        for k in 1..=2 {
            let blocks = lift(laplacian_blocks(&f, &stalks, k, &OPTS, 1))?;
            let lap = lift(assemble_laplacian(&f, &stalks, &blocks, k, LaplacianMode::Slice(f.horizon())))?;
            let nullity = DenseMatrix::from_rows(&lap.alive_part().to_dense()).nullity();
            let beta = oracle::betti_dense(&f, f.horizon(), k);
            check(nullity == beta, || format!("{name} k={k}: kernel {nullity}, betti {beta}"))?;
            lines.push(format!("{name} k={k}: {beta}"));
        }
    }
    Ok(format!("orders 1..=2, exact rank; {}", lines.join(", ")))
}

fn float_laplacian(f: &Filtration, k: usize, mode: LaplacianMode) -> Result<AssembledLaplacian<f64>> {
    let stalks = compute_stalks::<f64>(f, k, 1, &OPTS, 1)?;
    let blocks = laplacian_blocks(f, &stalks, k, &OPTS, 1)?;
    assemble_laplacian(f, &stalks, &blocks, k, mode)
}

fn c4_diffusion() -> Outcome {
    let f = build_flag_complex(&fixtures::cycle(4), 2).unwrap();
    let lap = lift(float_laplacian(&f, 1, LaplacianMode::Slice(f.horizon())))?;
    let x = FeatureBundle::random(&lap, 1, 17);
    let lmax = lambda_max(&lap, 10_000);
    let run = lift(diffuse(&x, &lap, 0.9 / lmax, 500))?;
    let e = &run.energies;
    check(e.len() == 501, || format!("{} energies for 500 steps", e.len()))?;
    if let Some(i) = (1..e.len()).find(|&i| e[i] > e[i - 1]) {
        return Err(format!("energy rose at step {i}: {} -> {}", e[i - 1], e[i]));
    }
    let last = lift(dirichlet_energy(&run.features, &lap))?;
    check(last < 1e-10, || format!("final energy {last:e} >= 1e-10"))?;
    Ok(format!("λ_max {lmax:.6}, α = 0.9/λ_max, final energy {last:.3e} < 1e-10, non-increasing at all 500 steps"))
}

fn theorems() -> Outcome {
    let mut steps = 0usize;
    let mut firings = 0usize;
    let mut atoms = 0usize;
    for (gi, f) in common::corpus_filtrations().iter().enumerate() {
        for v in 0..f.vertices().len() {
            let star = lift(f.vertex_star(v))?;
            for k in 0..=2 {
                for r in [
                    lift(oracle::check_theorem_dies_earlier(f, &star, k))?,
                    lift(oracle::check_theorem_appears_earlier(f, &star, k))?,
                ] {
                    check(r.holds(), || format!("graph {gi} vertex {v} k={k}: {:?}", r.counterexample))?;
                    steps += r.steps_checked;
                    firings += r.firings.len();
                }
            }
        }
        let stalks = lift(compute_stalks::<Exact>(f, 2, 1, &OPTS, 1))?;
        for k in 1..=2 {
            for b in lift(laplacian_blocks(f, &stalks, k, &OPTS, 1))? {
                for atom in &b.atoms {
                    let deaths = atom
                        .v_a
                        .iter()
                        .map(|(a, _)| b.lifespans_u[*a].end)
                        .chain(atom.v_b.iter().map(|(i, _)| b.lifespans_v[*i].end));
                    for d in deaths {
                        check(atom.interval.end <= d, || format!("graph {gi} edge ({},{}) k={k}: atom ends after a cocycle", b.u, b.v))?;
                    }
                    atoms += 1;
                }
            }
        }
    }
    Ok(format!("{steps} steps checked densely, {firings} steps where the conclusion was exercised, {atoms} atoms end no later than their cocycles"))
}

fn psd_symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fixtures_checked = 0;
    let mut worst: f64 = 0.0;
    let mut all: Vec<(String, Filtration)> = golden_filtrations().into_iter().map(|(n, f)| (n.to_string(), f)).collect();
    for (i, f) in common::corpus_filtrations().into_iter().enumerate().take(50) {
        all.push((format!("corpus {i}"), f));
    }
    for (name, f) in &all {
        let stalks = lift(compute_stalks::<Exact>(f, 2, 1, &OPTS, 1))?;
        for k in 1..=2 {
            let blocks = lift(laplacian_blocks(f, &stalks, k, &OPTS, 1))?;
            for t in f.critical_values() {
                let lap = lift(assemble_laplacian(f, &stalks, &blocks, k, LaplacianMode::Slice(t)))?;
                check(lap.is_symmetric(), || format!("{name} k={k} t={t}: not symmetric"))?;
                let dense: Vec<Vec<f64>> =
                    lap.to_dense().iter().map(|r| r.iter().map(Field::to_f64).collect()).collect();
                let norm = dense.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
                for _ in 0..100 {
                    let x: Vec<f64> = (0..lap.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let xx: f64 = x.iter().map(|a| a * a).sum();
                    if xx == 0.0 {
                        continue;
                    }
                    let q: f64 = dense.iter().zip(&x).map(|(row, xi)| xi * row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()).sum();
                    let rel = q / (norm * xx);
                    worst = worst.min(rel);
                    check(rel >= -1e-8, || format!("{name} k={k} t={t}: Rayleigh quotient {rel:e}"))?;
                }
            }
        }
        fixtures_checked += 1;
    }
    Ok(format!("{fixtures_checked} fixtures, orders 1..=2, every threshold; exact symmetry; min xᵀLx/(‖L‖_F‖x‖²) = {worst:e} >= -1e-8"))
}

fn field_parity() -> Outcome {
    for (gi, f) in common::corpus_filtrations().iter().enumerate() {
        let mut a = lift(persistent_cohomology::<Exact>(f, 2, &OPTS))?.triples();
        let mut b = lift(persistent_cohomology::<f64>(f, 2, &OPTS))?.triples();
        let key = |x: &(usize, f64, f64), y: &(usize, f64, f64)| x.partial_cmp(y).unwrap();
        a.sort_by(key);
        b.sort_by(key);
        check(a == b, || format!("graph {gi}: exact {a:?}, float {b:?}"))?;
    }
    Ok("200 graphs, orders 0..=2, identical (k, birth, death) multisets".into())
}

fn random_gain(rng: &mut ChaCha8Rng, n: usize, draw: usize) -> LinearGain {
    if draw % 2 == 0 {
        LinearGain((0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect())
    } else {
        // a hypernetwork gain over random descriptors
        let desc: Vec<(usize, f64, f64)> = (0..n)
            .map(|_| {
                let s = rng.gen_range(0.0..2.0);
                (rng.gen_range(1..=2), s, s + rng.gen_range(0.1..2.0))
            })
            .collect();
        let mlp = Mlp::new(&PSI_WIDTHS, rng.gen()).unwrap();
        LinearGain(weights_from_descriptors(&desc, &mlp, 4.0))
    }
}

fn sign_equivariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut patterns = 0usize;
    for draw in 0..100 {
        let n = draw % 8 + 1;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let gain = random_gain(&mut rng, n, draw);
        let y = lift(sign_equivariant_layer(&x, &gain))?;
        for mask in 0u32..1 << n {
            let d: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let dx: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a * b).collect();
            let lhs = lift(sign_equivariant_layer(&dx, &gain))?;
            for i in 0..n {
                let err = (lhs[i] - d[i] * y[i]).abs();
                worst = worst.max(err);
                check(err <= 1e-12, || format!("draw {draw} dim {n} mask {mask:b}: error {err:e}"))?;
            }
            patterns += 1;
        }
    }
    Ok(format!("100 draws, dims 1..=8, {patterns} sign patterns, max |ψ(Dx) - Dψ(x)| = {worst:e} <= 1e-12"))
}

/// Tie-free graphs: distinct edge weights at least `gap` apart.
fn tie_free_graphs(count: usize, gap: f64) -> Vec<lhsheaf::WeightedGraph> {
    let mut out = Vec::new();
    let mut seed = 100;
    while out.len() < count {
        for g in fixtures::random_continuous(seed, 16, 6) {
            let mut w: Vec<f64> = g.edges().iter().map(|e| e.2).collect();
            w.sort_by(f64::total_cmp);
            if !w.is_empty() && w.windows(2).all(|p| p[1] - p[0] > gap) && out.len() < count {
                out.push(g);
            }
        }
        seed += 1;
    }
    out
}

fn gradients() -> Outcome {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for (gi, g) in tie_free_graphs(50, 1e-3).iter().enumerate() {
        let f = build_flag_complex(g, 3).unwrap();
        let d = lift(persistent_cohomology::<f64>(&f, 1, &OPTS))?;
        let perturbed = |e: usize, delta: f64| -> Result<Filtration> {
            let w = g.edges()[e].2 + delta;
            build_flag_complex(&g.with_weight(e, w)?, 3)
        };
        for e in 0..g.edges().len() {
            let (fp, fm) = (lift(perturbed(e, h))?, lift(perturbed(e, -h))?);
            for c in d.cocycles.iter() {
                for (end, index) in [(Endpoint::Birth, Some(c.birth_index)), (Endpoint::Death, c.death_index)] {
                    let Some(index) = index else { continue };
                    let grad = lift(filtration_gradient(&f, g, c, end))?;
                    let analytic = grad.iter().find(|p| p.0 == e).map_or(0.0, |p| p.1);
                    let fd = (fp.value(index) - fm.value(index)) / (2.0 * h);
                    check(fp.simplex(index) == f.simplex(index), || format!("graph {gi}: order changed under perturbation"))?;
                    let rel = (fd - analytic).abs() / analytic.abs().max(1.0);
                    worst = worst.max(rel);
                    check(rel < 1e-4, || format!("graph {gi} edge {e} k={}: analytic {analytic}, difference quotient {fd}", c.order))?;
                    checked += 1;
                }
            }
        }
    }
    let grad_line = format!("{checked} partials on 50 tie-free graphs, central step 1e-5, max relative error {worst:.2e} < 1e-4");

    // Ψ layer: forward perturbation against the analytic directional derivative
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst_jvp: f64 = 0.0;
    let eps = 1e-6;
    for draw in 0..50 {
        let n = draw % 6 + 1;
        let desc: Vec<(usize, f64, f64)> = (0..n)
            .map(|_| {
                let s = rng.gen_range(0.0..2.0);
                (rng.gen_range(1..=2), s, if rng.gen_bool(0.2) { f64::INFINITY } else { s + rng.gen_range(0.1..2.0) })
            })
            .collect();
        let mlp = Mlp::new(&PSI_WIDTHS, rng.gen()).unwrap();
        let sign = |_: usize| if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let x: Vec<f64> = (0..n).map(sign).collect::<Vec<f64>>().iter().map(|s| s * rand_mag(draw)).collect();
        let dx: Vec<f64> = (0..n).map(|i| ((i * 7 + draw) % 5) as f64 / 5.0 - 0.4).collect();
        let dp: Vec<f64> = (0..mlp.param_count()).map(|i| ((i * 13 + draw) % 11) as f64 / 11.0 - 0.5).collect();
        let (_, jvp) = lift(psi_layer_jvp(&x, &dx, &desc, &mlp, Some(&dp), 4.0))?;
        let shifted = |s: f64| -> Result<Vec<f64>> {
            let p: Vec<f64> = mlp.params().iter().zip(&dp).map(|(a, b)| a + s * b).collect();
            let m = Mlp::from_params(&PSI_WIDTHS, &p)?;
            let xs: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + s * b).collect();
            Ok(lift(psi_layer_jvp(&xs, &dx, &desc, &m, None, 4.0)).unwrap().0)
        };
        let (yp, ym) = (lift(shifted(eps))?, lift(shifted(-eps))?);
        let fd: Vec<f64> = yp.iter().zip(&ym).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
        let num = fd.iter().zip(&jvp).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den = jvp.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
        worst_jvp = worst_jvp.max(num / den);
        check(num / den < 1e-6, || format!("draw {draw}: layer JVP relative error {:e}", num / den))?;
    }
    Ok(format!("{grad_line}; Ψ layer JVP on 50 random directions, max relative error {worst_jvp:.2e} < 1e-6"))
}

fn rand_mag(draw: usize) -> f64 {
    0.5 + (draw % 7) as f64 / 4.0
}

fn parallel_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let max = std::thread::available_parallelism().map_or(1, |n| n.get());
    let commands: [&[&str]; 6] = [
        &["filtration"],
        &["persistence"],
        &["stalks"],
        &["laplacian", "--mode", "slice"],
        &["laplacian", "--mode", "weighted"],
        &["verify"],
    ];
    let mut files = 0;
    for g in fixtures::golden() {
        let input = dir.path().join(format!("{}.csv", g.name));
        let rows: Vec<String> = g.graph.edges().iter().map(|(u, v, w)| format!("{u},{v},{w:?}")).collect();
        std::fs::write(&input, rows.join("\n")).unwrap();
        for cmd in commands {
            let mut outputs = Vec::new();
            for threads in [1, 4, max] {
                let out = dir.path().join(format!("{}-{}-{threads}", g.name, cmd.join("-")));
                let mut args = vec!["lhsheaf".to_string()];
                args.extend(cmd.iter().map(|s| s.to_string()));
                args.extend(
                    ["--input", input.to_str().unwrap(), "--max-order", "2", "--threads", &threads.to_string(), "--out", out.to_str().unwrap()]
                        .map(String::from),
                );
                let code = lhsheaf::cli::run(args);
                check(code == 0, || format!("{} {cmd:?} with {threads} threads exited {code}", g.name))?;
                let mut names: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
                names.sort();
                let bytes: Vec<(String, Vec<u8>)> = names
                    .iter()
                    .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(p).unwrap()))
                    .collect();
                outputs.push(bytes);
            }
            check(outputs[0] == outputs[1] && outputs[1] == outputs[2], || format!("{} {cmd:?}: outputs differ across thread counts", g.name))?;
            files += outputs[0].len();
        }
    }
    Ok(format!("threads {{1, 4, {max}}}, {files} output files byte-identical across golden fixtures"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 11] = [
        ("golden Betti fixtures", Duration::from_secs(1), golden_betti),
        ("local homology fixtures", Duration::from_secs(1), local_fixtures),
        ("excision suite", Duration::from_secs(60), excision),
        ("sheaf kernel equals global homology", Duration::MAX, kernel_is_homology),
        ("diffusion on C4", Duration::from_secs(1), c4_diffusion),
        ("restriction theorem suites", Duration::from_secs(120), theorems),
        ("PSD and symmetry", Duration::MAX, psd_symmetry),
        ("field parity", Duration::MAX, field_parity),
        ("sign equivariance", Duration::MAX, sign_equivariance),
        ("gradient checks", Duration::MAX, gradients),
        ("parallel determinism", Duration::MAX, parallel_determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let budget_note = if *budget == Duration::MAX { String::new() } else { format!(" (budget {budget:?})") };
        let (ok, detail) = match outcome {
            Ok(d) if took <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.3}s{budget_note}]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
