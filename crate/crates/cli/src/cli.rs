//! Argument parsing and the verbs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dtpredict::dt::{delaunay, planar_mst, SpanningTree};
use dtpredict::gen::{edge_sample_model, flip_model, gen_points, perturb_model, Completion, Distribution};
use dtpredict::metrics::{full_report, ClosenessReport};
use dtpredict::repair::sampling::emst_repair;
use dtpredict::tri::{build_from_edges, write_points, EdgeKey, Triangulation};
use dtpredict::verify::{certify_subgraph, is_delaunay};

use crate::bench::{self, write_rows, BenchRow, ChainConfig, DsensConfig, Model, ProbConfig};
use crate::plot::Scatter;
use crate::{load_edges, load_points, run_repair, save_edges, with_workers, Algo, CliResult, Failure, Prediction, Status};

#[derive(Debug, Parser)]
#[command(name = "dtpredict", version, about = "Delaunay triangulations from predictions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate points and, optionally, a predicted triangulation.
    Gen(GenArgs),
    /// Repair a prediction into the Delaunay triangulation.
    Repair(RepairArgs),
    /// Print the closeness measures of a prediction.
    Metrics(MetricsArgs),
    /// Check that a triangulation is Delaunay, or certify a subgraph.
    Verify(VerifyArgs),
    /// Euclidean minimum spanning tree.
    Emst(EmstArgs),
    /// Benchmark sweeps.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenModel {
    None,
    Flip,
    Sample,
    Perturb,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "uniform-square")]
    pub dist: Distribution,
    #[arg(long, value_enum, default_value_t = GenModel::None)]
    pub model: GenModel,
    /// Flip attempts for the flip model.
    #[arg(long, default_value_t = 0)]
    pub steps: usize,
    /// Keep probability for the sample model.
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value = "random")]
    pub completion: Completion,
    /// Coordinate noise for the perturb model.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output points file.
    #[arg(long)]
    pub points: PathBuf,
    /// Output edges file of the prediction (the Delaunay edges for `none`).
    #[arg(long)]
    pub edges: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub edges: PathBuf,
}

impl InputArgs {
    fn load(&self) -> CliResult<Prediction> {
        let ps = load_points(&self.points)?;
        let edges = load_edges(&self.edges, &ps)?;
        Ok(Prediction::from_edges(ps, edges))
    }
}

#[derive(Debug, Args)]
pub struct RepairArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[command(flatten)]
    pub input: InputArgs,
    /// Output edges file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Certify that the edges are Delaunay edges instead of checking a
    /// full triangulation.
    #[arg(long)]
    pub subgraph: bool,
}

#[derive(Debug, Args)]
pub struct EmstArgs {
    #[arg(long)]
    pub points: PathBuf,
    /// A spanning tree to repair into the minimum one.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Repair cost against the number of random flips.
    Dsens(DsensArgs),
    /// Crossing counts of the probabilistic prediction models.
    Prob(ProbArgs),
    /// Fuzz the inequalities between the closeness measures.
    Chain(ChainArgs),
}

#[derive(Debug, Args)]
pub struct DsensArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,1,10,100,1000,10000")]
    pub ks: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "separator,sampling,baseline")]
    pub algos: Vec<Algo>,
    #[arg(long, default_value = "uniform-square")]
    pub dist: Distribution,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write an SVG scatter plot.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProbModel {
    Flip,
    SampleRandom,
    SampleLongest,
}

impl From<ProbModel> for Model {
    fn from(m: ProbModel) -> Model {
        match m {
            ProbModel::Flip => Model::Flip,
            ProbModel::SampleRandom => Model::SampleRandom,
            ProbModel::SampleLongest => Model::SampleLongest,
        }
    }
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.1")]
    pub rhos: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "flip,sample-random,sample-longest")]
    pub models: Vec<ProbModel>,
    #[arg(long, default_value = "uniform-square")]
    pub dist: Distribution,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 2000)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Constant of the crossing bound `d_cross <= c * max(1, d_vio^2)`.
    #[arg(long, default_value_t = 32.0)]
    pub vio_constant: f64,
    /// Output CSV of violations.
    #[arg(long)]
    pub violations: Option<PathBuf>,
}

/// Runs a parsed command line. Errors go to standard error.
pub fn run(cli: Cli) -> Status {
    match dispatch(cli.command) {
        Ok(()) => Status::Ok,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.status
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Gen(a) => gen(&a),
        Command::Repair(a) => repair(&a),
        Command::Metrics(a) => metrics(&a),
        Command::Verify(a) => verify(&a),
        Command::Emst(a) => emst(&a),
        Command::Bench(BenchCommand::Dsens(a)) => dsens(&a),
        Command::Bench(BenchCommand::Prob(a)) => prob(&a),
        Command::Bench(BenchCommand::Chain(a)) => chain(&a),
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn gen(a: &GenArgs) -> CliResult<()> {
    let ps = Arc::new(gen_points(a.n, a.dist, a.seed)?);
    let mut w = create(&a.points)?;
    write_points(&mut w, &ps)?;
    w.flush()?;
    let Some(path) = &a.edges else {
        return Ok(());
    };
    let dt = delaunay(&ps, a.seed)?;
    let edges = match a.model {
        GenModel::None => dt.canonical_edge_set(),
        GenModel::Flip => flip_model(&dt, a.steps, a.seed)?.triangulation.canonical_edge_set(),
        GenModel::Sample => edge_sample_model(&dt, a.rho, a.completion, a.seed)?.triangulation.canonical_edge_set(),
        GenModel::Perturb => perturb_model(&ps, a.eps, a.seed)?.edges(),
    };
    save_edges(path, &edges)
}

fn repair(a: &RepairArgs) -> CliResult<()> {
    let pred = a.input.load()?;
    let run = run_repair(a.algo, &pred, a.seed)?;
    save_edges(&a.out, &run.dt.canonical_edge_set())?;
    println!("millis {:.3}", run.millis);
    println!("incircle_count {}", run.ops.incircle);
    println!("orient_count {}", run.ops.orient);
    println!("walk_steps {}", run.ops.walk_steps);
    println!("flips {}", run.ops.flips);
    Ok(())
}

fn metrics(a: &MetricsArgs) -> CliResult<()> {
    let pred = a.input.load()?;
    let g = pred.triangulation()?;
    let dt = delaunay(g.points(), a.seed)?;
    let r = full_report(g, &dt)?;
    println!("{}", ClosenessReport::CSV_HEADER);
    println!("{}", r.csv_row(a.seed));
    Ok(())
}

fn non_delaunay_edge(g: &Triangulation) -> Option<EdgeKey> {
    g.edges().find(|&e| !g.is_locally_delaunay(e).unwrap_or(true))
}

fn verify(a: &VerifyArgs) -> CliResult<()> {
    let ok;
    let out = if a.subgraph {
        let ps = load_points(&a.input.points)?;
        let edges = load_edges(&a.input.edges, &ps)?;
        let g = build_from_edges(ps, &edges)?;
        let r = certify_subgraph(&g);
        ok = r.certified;
        json!({
            "certified": r.certified,
            "witness": r.witness.map(|(t, p)| json!({ "triangle": t, "point": p })),
            "uncovered_edge": r.uncovered_edge.map(|e| [e.lo(), e.hi()]),
        })
    } else {
        let pred = a.input.load()?;
        let g = pred.triangulation()?;
        ok = is_delaunay(g);
        let witness = if ok { None } else { non_delaunay_edge(g) };
        json!({
            "delaunay": ok,
            "witness_edge": witness.map(|e| [e.lo(), e.hi()]),
        })
    };
    println!("{out}");
    if ok {
        Ok(())
    } else {
        Err(Failure::verification("verification failed"))
    }
}

fn emst(a: &EmstArgs) -> CliResult<()> {
    let ps = load_points(&a.points)?;
    let tree = match &a.edges {
        Some(path) => {
            let edges = load_edges(path, &ps)?;
            emst_repair(&SpanningTree::new(ps, edges)?, a.seed)?
        }
        None => planar_mst(&delaunay(&ps, a.seed)?),
    };
    save_edges(&a.out, &tree.canonical_edge_set())?;
    println!("weight {:.12}", tree.weight());
    Ok(())
}

fn emit_rows(path: &Option<PathBuf>, rows: &[BenchRow]) -> CliResult<()> {
    match path {
        Some(p) => write_rows(create(p)?, rows),
        None => write_rows(io::stdout().lock(), rows),
    }
}

fn save_plot(path: &Path, plot: &Scatter) -> CliResult<()> {
    let mut w = create(path)?;
    w.write_all(plot.to_svg().as_bytes())?;
    w.flush()?;
    Ok(())
}

fn dsens(a: &DsensArgs) -> CliResult<()> {
    let cfg = DsensConfig { n: a.n, ks: a.ks.clone(), reps: a.reps, seed: a.seed, algos: a.algos.clone(), dist: a.dist };
    let rows = with_workers(|| bench::dsens(&cfg))??;
    emit_rows(&a.csv, &rows)?;
    if let Some(path) = &a.plot {
        let mut plot = Scatter::new(&format!("Repair cost, n = {}", a.n), "flips k", "incircle tests per point", true);
        for r in &rows {
            let k: f64 = r.k_or_rho.parse().unwrap_or(0.0);
            plot.add(&r.algo, k, r.incircle_count as f64 / r.n as f64);
        }
        save_plot(path, &plot)?;
    }
    Ok(())
}

fn prob(a: &ProbArgs) -> CliResult<()> {
    if let Some(&rho) = a.rhos.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Failure::input(dtpredict::Error::InvalidProbability(rho)));
    }
    let cfg = ProbConfig {
        n: a.n,
        rhos: a.rhos.clone(),
        trials: a.trials,
        seed: a.seed,
        models: a.models.iter().map(|&m| m.into()).collect(),
        dist: a.dist,
    };
    let rows = with_workers(|| bench::prob(&cfg))??;
    emit_rows(&a.csv, &rows)?;
    if let Some(path) = &a.plot {
        let ln_n = (a.n as f64).ln();
        let mut plot = Scatter::new(&format!("Crossings, n = {}", a.n), "(1/rho) ln n", "d_cross", false);
        for r in &rows {
            let rho: f64 = r.k_or_rho.parse().unwrap_or(1.0);
            plot.add(&r.algo, ln_n / rho, r.d_cross_max as f64);
        }
        save_plot(path, &plot)?;
    }
    Ok(())
}

fn chain(a: &ChainArgs) -> CliResult<()> {
    let cfg = ChainConfig { trials: a.trials, n_max: a.n_max, seed: a.seed, vio_constant: a.vio_constant };
    let (instances, violations) = with_workers(|| bench::chain(&cfg))??;
    if let Some(path) = &a.violations {
        let mut w = csv::Writer::from_writer(create(path)?);
        if violations.is_empty() {
            w.write_record(["seed", "n", "model", "check", "detail"])?;
        }
        for v in &violations {
            w.serialize(v)?;
        }
        w.flush()?;
    }
    println!("instances {instances}");
    println!("violations {}", violations.len());
    for v in violations.iter().take(10) {
        println!("seed {} n {} model {} check {}: {}", v.seed, v.n, v.model, v.check, v.detail);
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::verification(format!("{} violations", violations.len())))
    }
}
