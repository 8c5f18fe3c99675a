//! The `lhsheaf` command line.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 contract
//! violation during a computation, 4 failed verification.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::complex::{build_flag_complex, Filtration, Metric};
use crate::diffusion::{diffuse, lambda_max, FeatureBundle};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::io;
use crate::linalg::{Exact, Field, ReduceOptions};
use crate::local_sheaf::{assemble_laplacian, compute_stalks, laplacian_blocks, laplacian_dump, LaplacianMode, LocalStalk};
use crate::oracle::{self, VerifyRecord};
use crate::persistence::{persistent_cohomology, persistent_relative_cohomology};

#[derive(Parser, Debug)]
#[command(name = "lhsheaf", version, about = "Persistent local-homology sheaves of weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the Vietoris-Rips filtration.
    Filtration,
    /// Persistence diagram with representatives (JSON) and a k,birth,death CSV.
    Persistence,
    /// Per-vertex stalks of persistent local cohomology.
    Stalks,
    /// Sheaf Laplacian blocks and the assembled operator.
    Laplacian,
    /// Sheaf diffusion of features, with an energy trace.
    Diffuse(DiffuseArgs),
    /// Check the fast path against the dense oracle.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Input file: an edge list, a point cloud or a filtration dump.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Edges)]
    format: Format,
    #[arg(long, global = true, value_enum, default_value_t = MetricArg::Euclidean)]
    metric: MetricArg,
    /// Keep only each point's k nearest neighbors (symmetrized).
    #[arg(long, global = true)]
    knn: Option<usize>,
    /// Highest cohomology order K.
    #[arg(long, global = true, default_value_t = 1)]
    max_order: usize,
    /// Highest simplex dimension; defaults to K + 1.
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    rings: usize,
    #[arg(long, global = true, value_enum, default_value_t = FieldArg::Exact)]
    field: FieldArg,
    #[arg(long, global = true, default_value_t = 1e-9)]
    eps: f64,
    /// Skip reducing columns already known to be pivots.
    #[arg(long, global = true)]
    clearing: bool,
    /// `slice=<t>`, `slice` (at the largest filtration value) or `weighted`.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Order of the Laplacian; defaults to K.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output directory; without it results go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DiffuseArgs {
    /// Feature file; random features when absent.
    #[arg(long)]
    features: Option<PathBuf>,
    /// Step size; defaults to 0.9 / λ_max.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 500)]
    steps: usize,
    /// Seed for random features.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run on the built-in golden graphs instead of `--input`.
    #[arg(long)]
    golden: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Edges,
    Points,
    Filtration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Euclidean,
    Manhattan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Exact,
    Float,
}

/// Mode as given on the command line; `Slice(None)` means the horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeArg {
    Slice(Option<f64>),
    Weighted,
}

impl ModeArg {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "weighted" => Ok(ModeArg::Weighted),
            "slice" => Ok(ModeArg::Slice(None)),
            _ => {
                let t = s
                    .strip_prefix("slice=")
                    .and_then(|t| t.parse::<f64>().ok())
                    .filter(|t| t.is_finite())
                    .ok_or_else(|| Error::Config(format!("mode must be slice=<t>, slice or weighted, got {s:?}")))?;
                Ok(ModeArg::Slice(Some(t)))
            }
        }
    }

    fn resolve(self, filtration: &Filtration) -> LaplacianMode {
        match self {
            ModeArg::Slice(t) => LaplacianMode::Slice(t.unwrap_or_else(|| filtration.horizon())),
            ModeArg::Weighted => LaplacianMode::Weighted,
        }
    }
}

/// Validated settings shared by all commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub format: Format,
    pub metric: Metric,
    pub knn: Option<usize>,
    pub max_order: usize,
    pub max_dim: usize,
    pub rings: usize,
    pub field: FieldArg,
    pub reduce: ReduceOptions,
    pub mode: ModeArg,
    pub order: usize,
    pub threads: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(a: &CommonArgs) -> Result<Self> {
        let max_dim = a.max_dim.unwrap_or(a.max_order + 1);
        if max_dim < a.max_order + 1 {
            return Err(Error::Config(format!(
                "max order {} needs max dim at least {}, got {max_dim}",
                a.max_order,
                a.max_order + 1
            )));
        }
        if a.rings < 1 {
            return Err(Error::Config("rings must be at least 1".into()));
        }
        if !(a.eps > 0.0 && a.eps < 1.0) {
            return Err(Error::Config(format!("eps must lie in (0, 1), got {}", a.eps)));
        }
        if a.knn == Some(0) {
            return Err(Error::Config("knn must be at least 1".into()));
        }
        let order = a.order.unwrap_or(a.max_order);
        if order > a.max_order {
            return Err(Error::Config(format!("order {order} exceeds max order {}", a.max_order)));
        }
        Ok(Self {
            input: a.input.clone(),
            format: a.format,
            metric: match a.metric {
                MetricArg::Euclidean => Metric::Euclidean,
                MetricArg::Manhattan => Metric::Manhattan,
            },
            knn: a.knn,
            max_order: a.max_order,
            max_dim,
            rings: a.rings,
            field: a.field,
            reduce: ReduceOptions { eps: a.eps, clearing: a.clearing },
            mode: a.mode.as_deref().map_or(Ok(ModeArg::Slice(None)), ModeArg::parse)?,
            order,
            threads: a.threads,
            out: a.out.clone(),
        })
    }

    pub fn load_filtration(&self) -> Result<Filtration> {
        let path = self.input.as_deref().ok_or_else(|| Error::Config("--input is required".into()))?;
        if !path.is_file() {
            return Err(Error::Config(format!("{}: no such file", path.display())));
        }
        match self.format {
            Format::Edges => build_flag_complex(&io::read_edge_csv(path)?, self.max_dim),
            Format::Points => build_flag_complex(&io::read_point_graph(path, self.metric, self.knn)?, self.max_dim),
            Format::Filtration => {
                let f = io::read_filtration_json(path, None)?;
                if f.max_dim() < self.max_dim {
                    Filtration::from_entries(&f.to_entries(), Some(self.max_dim))
                } else {
                    Ok(f)
                }
            }
        }
    }
}

/// Named output documents of a command.
type Outputs = Vec<(&'static str, String)>;

fn emit(cfg: &RunConfig, outputs: &Outputs) -> Result<()> {
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for (name, text) in outputs {
                std::fs::write(dir.join(name), text)?;
            }
        }
        None => {
            for (_, text) in outputs {
                print!("{text}");
            }
        }
    }
    Ok(())
}

pub fn cmd_filtration(cfg: &RunConfig) -> Result<Outputs> {
    let f = cfg.load_filtration()?;
    Ok(vec![("filtration.json", io::filtration_json(&f)?)])
}

fn persistence_outputs<F: Field>(cfg: &RunConfig, f: &Filtration) -> Result<Outputs> {
    let d = persistent_cohomology::<F>(f, cfg.max_order, &cfg.reduce)?;
    Ok(vec![("diagram.json", io::diagram_json(&d)?), ("diagram.csv", io::diagram_csv(&d)?)])
}

pub fn cmd_persistence(cfg: &RunConfig) -> Result<Outputs> {
    let f = cfg.load_filtration()?;
    match cfg.field {
        FieldArg::Exact => persistence_outputs::<Exact>(cfg, &f),
        FieldArg::Float => persistence_outputs::<f64>(cfg, &f),
    }
}

fn stalks_of<F: Field>(cfg: &RunConfig, f: &Filtration) -> Result<Vec<LocalStalk<F>>> {
    compute_stalks(f, cfg.max_order, cfg.rings, &cfg.reduce, cfg.threads)
}

pub fn cmd_stalks(cfg: &RunConfig) -> Result<Outputs> {
    let f = cfg.load_filtration()?;
    let text = match cfg.field {
        FieldArg::Exact => io::stalks_json(&stalks_of::<Exact>(cfg, &f)?)?,
        FieldArg::Float => io::stalks_json(&stalks_of::<f64>(cfg, &f)?)?,
    };
    Ok(vec![("stalks.json", text)])
}

fn laplacian_outputs<F: Field>(cfg: &RunConfig, f: &Filtration) -> Result<Outputs> {
    let stalks = stalks_of::<F>(cfg, f)?;
    let blocks = laplacian_blocks(f, &stalks, cfg.order, &cfg.reduce, cfg.threads)?;
    let mut dump = serde_json::to_string_pretty(&laplacian_dump(&stalks, &blocks, cfg.order))?;
    dump.push('\n');
    let mode = cfg.mode.resolve(f);
    let lap = assemble_laplacian(f, &stalks, &blocks, cfg.order, mode)?;
    let name = match mode {
        LaplacianMode::Slice(_) => "laplacian_slice.mtx",
        LaplacianMode::Weighted => "laplacian_weighted.mtx",
    };
    let mtx = lap.matrix.map(|x: &F| x.to_f64()).to_matrix_market();
    Ok(vec![("laplacian.json", dump), (name, mtx)])
}

pub fn cmd_laplacian(cfg: &RunConfig) -> Result<Outputs> {
    let f = cfg.load_filtration()?;
    match cfg.field {
        FieldArg::Exact => laplacian_outputs::<Exact>(cfg, &f),
        FieldArg::Float => laplacian_outputs::<f64>(cfg, &f),
    }
}

fn float_laplacian(cfg: &RunConfig, f: &Filtration) -> Result<crate::local_sheaf::AssembledLaplacian<f64>> {
    let stalks = stalks_of::<f64>(cfg, f)?;
    let blocks = laplacian_blocks(f, &stalks, cfg.order, &cfg.reduce, cfg.threads)?;
    assemble_laplacian(f, &stalks, &blocks, cfg.order, cfg.mode.resolve(f))
}

fn cmd_diffuse(cfg: &RunConfig, args: &DiffuseArgs) -> Result<Outputs> {
    if cfg.mode == ModeArg::Weighted {
        return Err(Error::Config("diffusion runs on a slice Laplacian; use --mode slice=<t>".into()));
    }
    let f = cfg.load_filtration()?;
    let lap = float_laplacian(cfg, &f)?;
    let x = match &args.features {
        Some(p) => FeatureBundle::from_file(&lap, &io::read_features(p)?)?,
        None => FeatureBundle::random(&lap, 1, args.seed),
    };
    let alpha = match args.alpha {
        Some(a) => a,
        None => {
            let l = lambda_max(&lap, 10_000);
            if l == 0.0 {
                1.0
            } else {
                0.9 / l
            }
        }
    };
    let run = diffuse(&x, &lap, alpha, args.steps)?;
    Ok(vec![("features.json", io::features_json(&run.features.to_file())?), ("trace.csv", io::trace_csv(&run.energies))])
}

/// Fast path against oracle on one filtration. Orders `0..=max_order`.
///
/// `kernel` adds the check that the sheaf Laplacian's kernel has dimension
/// βₖ. That only holds where every vertex is a manifold point, as on the
/// golden fixtures, so it is off for arbitrary inputs.
pub fn verify_filtration(name: &str, f: &Filtration, cfg: &RunConfig, kernel: bool) -> Result<Vec<VerifyRecord>> {
    let mut records = Vec::new();
    let diagram = persistent_cohomology::<Exact>(f, cfg.max_order, &cfg.reduce)?;
    let thresholds = f.critical_values();
    let mut bad = None;
    'outer: for &t in &thresholds {
        for k in 0..=cfg.max_order {
            let (fast, dense) = (diagram.betti_at(t, k), oracle::betti_dense(f, t, k));
            if fast != dense {
                bad = Some(format!("t={t} k={k}: diagram {fast}, oracle {dense}"));
                break 'outer;
            }
        }
    }
    records.push(VerifyRecord::new("betti", name, bad));

    let stalks = stalks_of::<Exact>(cfg, f)?;
    let mut bad = None;
    let mut exc = None;
    let mut dies_earlier = None;
    let mut appears_earlier = None;
    for s in &stalks {
        let star = f.vertex_star(s.vertex)?;
        let full = persistent_relative_cohomology::<Exact>(f, &star, cfg.max_order, &cfg.reduce)?;
        for &t in &thresholds {
            for k in 1..=cfg.max_order {
                let local = s.of_order(k).iter().filter(|c| c.alive_at(t)).count();
                let whole = full.betti_at(t, k);
                let dense = oracle::local_betti_dense(f, t, &star, k)?;
                if bad.is_none() && !(local == whole && whole == dense) {
                    bad = Some(format!("vertex {} t={t} k={k}: truncated {local}, full {whole}, oracle {dense}", s.vertex));
                }
            }
        }
        for k in 0..=cfg.max_order {
            if exc.is_none() && !oracle::excision_check(f, s.vertex, k)?.holds() {
                exc = Some(format!("vertex {} k={k}", s.vertex));
            }
            let r1 = oracle::check_theorem_dies_earlier(f, &star, k)?;
            if let (None, Some(c)) = (&dies_earlier, &r1.counterexample) {
                dies_earlier = Some(format!("vertex {} k={k} step {} ({:?})", s.vertex, c.step, c.simplex));
            }
            let r2 = oracle::check_theorem_appears_earlier(f, &star, k)?;
            if let (None, Some(c)) = (&appears_earlier, &r2.counterexample) {
                appears_earlier = Some(format!("vertex {} k={k} step {} ({:?})", s.vertex, c.step, c.simplex));
            }
        }
    }
    records.push(VerifyRecord::new("local_betti", name, bad));
    records.push(VerifyRecord::new("excision", name, exc));
    records.push(VerifyRecord::new("restriction_dies_earlier", name, dies_earlier));
    records.push(VerifyRecord::new("restriction_appears_earlier", name, appears_earlier));

    let mut mv = None;
    for i in (0..f.len()).filter(|&i| f.dim(i) == 1) {
        let e = f.simplex(i).vertices();
        let (a, b) = (f.vertex_star(e[0])?, f.vertex_star(e[1])?);
        for k in 0..=cfg.max_order {
            if mv.is_none() && !oracle::check_mayer_vietoris(f, &a, &b, k)?.is_exact() {
                mv = Some(format!("edge {e:?} k={k}"));
            }
        }
    }
    records.push(VerifyRecord::new("mayer_vietoris", name, mv));

    if !kernel {
        return Ok(records);
    }
    let mut kernel = None;
    for k in 1..=cfg.max_order {
        let blocks = laplacian_blocks(f, &stalks, k, &cfg.reduce, cfg.threads)?;
        let lap = assemble_laplacian(f, &stalks, &blocks, k, LaplacianMode::Slice(f.horizon()))?;
        let nullity = oracle::DenseMatrix::from_rows(&lap.alive_part().to_dense()).nullity();
        let beta = oracle::betti_dense(f, f.horizon(), k);
        if kernel.is_none() && nullity != beta {
            kernel = Some(format!("k={k}: kernel {nullity}, betti {beta}"));
        }
    }
    records.push(VerifyRecord::new("sheaf_kernel", name, kernel));
    Ok(records)
}

fn cmd_verify(cfg: &RunConfig, args: &VerifyArgs) -> Result<(Outputs, bool)> {
    let mut records = Vec::new();
    if args.golden {
        for g in fixtures::golden() {
            let f = build_flag_complex(&g.graph, cfg.max_dim.max(g.max_dim))?;
            let mut records_cfg = cfg.clone();
            records_cfg.max_order = cfg.max_order.min(f.dim_cap() - 1);
            records.extend(verify_filtration(g.name, &f, &records_cfg, true)?);
        }
    } else {
        let f = cfg.load_filtration()?;
        let name = cfg.input.as_deref().and_then(Path::file_name).map_or("input".into(), |n| n.to_string_lossy().into_owned());
        records.extend(verify_filtration(&name, &f, cfg, false)?);
    }
    let ok = records.iter().all(|r| r.status == oracle::Status::Pass);
    let mut text = String::from("[\n");
    for (i, r) in records.iter().enumerate() {
        text.push_str("  ");
        text.push_str(&serde_json::to_string(r)?);
        text.push_str(if i + 1 < records.len() { ",\n" } else { "\n" });
    }
    text.push_str("]\n");
    Ok((vec![("verify.json", text)], ok))
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 2,
        Error::Verification(_) => 4,
        _ => 3,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("lhsheaf: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let cfg = RunConfig::from_args(&cli.common)?;
    let outputs = match &cli.command {
        Command::Filtration => cmd_filtration(&cfg)?,
        Command::Persistence => cmd_persistence(&cfg)?,
        Command::Stalks => cmd_stalks(&cfg)?,
        Command::Laplacian => cmd_laplacian(&cfg)?,
        Command::Diffuse(a) => cmd_diffuse(&cfg, a)?,
        Command::Verify(a) => {
            let (outputs, ok) = cmd_verify(&cfg, a)?;
            emit(&cfg, &outputs)?;
            if !ok {
                return Err(Error::Verification("at least one check failed, see verify.json".into()));
            }
            return Ok(());
        }
    };
    emit(&cfg, &outputs)
}
