//! Command-line front end and benchmark harness for `dtpredict`.

pub mod bench;
pub mod cli;
pub mod plot;

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use dtpredict::dt::delaunay;
use dtpredict::geom::counters::{self, OpCounts};
use dtpredict::repair::{sampling, separator};
use dtpredict::tri::{build_from_edges, read_edges, read_points, write_edges, EdgeKey, PointSet, Triangulation};
use dtpredict::Error;

/// Environment variable holding the number of benchmark workers.
pub const WORKERS_ENV: &str = "DTPREDICT_WORKERS";

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    VerificationFailed = 1,
    InputError = 2,
}

/// A failure and the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn input(e: impl fmt::Display) -> Self {
        Failure { status: Status::InputError, message: e.to_string() }
    }

    pub fn verification(e: impl fmt::Display) -> Self {
        Failure { status: Status::VerificationFailed, message: e.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::input(e)
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Algo {
    Separator,
    Sampling,
    Baseline,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Separator => "separator",
            Algo::Sampling => "sampling",
            Algo::Baseline => "baseline",
        })
    }
}

impl FromStr for Algo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Algo as clap::ValueEnum>::from_str(s, true)
    }
}

/// A prediction as read from disk: a triangulation when the edges form
/// one, otherwise just the edges.
pub enum Prediction {
    Triangulation(Triangulation),
    Edges(Arc<PointSet>, Vec<EdgeKey>),
}

impl Prediction {
    pub fn from_edges(ps: Arc<PointSet>, edges: Vec<EdgeKey>) -> Self {
        match build_from_edges(ps.clone(), &edges).and_then(|g| g.to_triangulation()) {
            Ok(t) => Prediction::Triangulation(t),
            Err(_) => Prediction::Edges(ps, edges),
        }
    }

    pub fn points(&self) -> &Arc<PointSet> {
        match self {
            Prediction::Triangulation(t) => t.points(),
            Prediction::Edges(ps, _) => ps,
        }
    }

    pub fn triangulation(&self) -> CliResult<&Triangulation> {
        match self {
            Prediction::Triangulation(t) => Ok(t),
            Prediction::Edges(ps, edges) => {
                // Rebuild to report why it is not a triangulation.
                let err = build_from_edges(ps.clone(), edges).and_then(|g| g.to_triangulation()).err();
                Err(Failure::input(err.map_or_else(|| "not a triangulation".to_string(), |e| e.to_string())))
            }
        }
    }
}

pub fn load_points(path: &Path) -> CliResult<Arc<PointSet>> {
    let f = File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    read_points(BufReader::new(f)).map(Arc::new).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn load_edges(path: &Path, ps: &PointSet) -> CliResult<Vec<EdgeKey>> {
    let f = File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let edges = read_edges(BufReader::new(f)).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if let Some(e) = edges.iter().find(|e| e.hi() as usize >= ps.len()) {
        return Err(Failure::input(Error::InvalidVertex(e.hi())));
    }
    Ok(edges)
}

pub fn save_edges(path: &Path, edges: &[EdgeKey]) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_edges(&mut w, edges)?;
    w.flush()?;
    Ok(())
}

/// Result of one repair run.
pub struct RepairRun {
    pub dt: Triangulation,
    pub ops: OpCounts,
    pub millis: f64,
}

/// Runs one repair algorithm on a prediction. The baseline ignores the
/// prediction. The sampling repair also accepts edges that cross.
pub fn run_repair(algo: Algo, pred: &Prediction, seed: u64) -> CliResult<RepairRun> {
    let start = Instant::now();
    let (dt, ops) = counters::measure(|| -> CliResult<Triangulation> {
        Ok(match (algo, pred) {
            (Algo::Baseline, p) => delaunay(p.points(), seed)?,
            (Algo::Separator, p) => {
                separator::repair_with(p.triangulation()?, &separator::SeparatorOptions { seed, ..Default::default() })?.0
            }
            (Algo::Sampling, Prediction::Triangulation(g)) => sampling::repair(g, seed)?,
            (Algo::Sampling, Prediction::Edges(ps, edges)) => {
                let t = sampling::spanning_tree_of_edges(ps, edges)?;
                sampling::repair_from_tree(&t, &sampling::SamplingOptions { seed, ..Default::default() })?.0
            }
        })
    });
    let millis = start.elapsed().as_secs_f64() * 1e3;
    Ok(RepairRun { dt: dt?, ops, millis })
}

/// Runs `f` on a thread pool sized by the worker variable when set.
pub fn with_workers<T: Send>(f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Failure::input(format!("{WORKERS_ENV}={v:?} is not a count")))?;
        b = b.num_threads(n.max(1));
    }
    let pool = b.build().map_err(|e| Failure::input(e.to_string()))?;
    Ok(pool.install(f))
}
