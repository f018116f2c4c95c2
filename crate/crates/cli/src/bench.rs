//! Benchmark sweeps. Every row is reproducible from its seed; only the
//! `millis` column depends on the machine.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use dtpredict::dt::delaunay;
use dtpredict::gen::{edge_sample_model, flip_model, gen_points, perturb_model, Completion, Distribution};
use dtpredict::geom::counters::{self, OpCounts};
use dtpredict::geom::PointId;
use dtpredict::metrics::{circle0_witness, combinatorial_report, full_report, ClosenessReport};
use dtpredict::tri::{PointSet, Triangulation};
use dtpredict::verify::dt_equal;

use crate::{run_repair, Algo, CliResult, Failure, Prediction};

pub const CSV_COLUMNS: [&str; 15] = [
    "n",
    "k_or_rho",
    "algo",
    "seed",
    "millis",
    "incircle_count",
    "orient_count",
    "walk_steps",
    "D",
    "D_local",
    "D_cross",
    "d_cross",
    "D_vio",
    "d_vio",
    "flip_upper",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k_or_rho: String,
    pub algo: String,
    pub seed: u64,
    pub millis: String,
    pub incircle_count: u64,
    pub orient_count: u64,
    pub walk_steps: u64,
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "D_local")]
    pub d_local: u64,
    #[serde(rename = "D_cross")]
    pub d_cross_total: u64,
    #[serde(rename = "d_cross")]
    pub d_cross_max: u64,
    #[serde(rename = "D_vio")]
    pub d_vio_total: u64,
    #[serde(rename = "d_vio")]
    pub d_vio_max: u64,
    pub flip_upper: Option<u64>,
}

impl BenchRow {
    fn new(k_or_rho: String, algo: String, seed: u64, millis: f64, ops: OpCounts, r: &ClosenessReport) -> Self {
        BenchRow {
            n: r.n,
            k_or_rho,
            algo,
            seed,
            millis: format!("{millis:.3}"),
            incircle_count: ops.incircle,
            orient_count: ops.orient,
            walk_steps: ops.walk_steps,
            d: r.d,
            d_local: r.d_local,
            d_cross_total: r.d_cross_total,
            d_cross_max: r.d_cross_max,
            d_vio_total: r.d_vio_total,
            d_vio_max: r.d_vio_max,
            flip_upper: r.flip_upper,
        }
    }
}

pub fn write_rows(w: impl Write, rows: &[BenchRow]) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(CSV_COLUMNS)?;
    }
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

fn instance_points(n: usize, dist: Distribution, seed: u64) -> CliResult<Arc<PointSet>> {
    Ok(Arc::new(gen_points(n, dist, seed)?))
}

#[derive(Clone, Debug)]
pub struct DsensConfig {
    pub n: usize,
    pub ks: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub algos: Vec<Algo>,
    pub dist: Distribution,
}

/// Flip-model sweep. Repetition `r` uses seed `seed + r` for its points and
/// its flips, so larger `k` continues the same flip sequence.
pub fn dsens(cfg: &DsensConfig) -> CliResult<Vec<BenchRow>> {
    let jobs: Vec<(usize, usize)> = (0..cfg.reps).flat_map(|r| cfg.ks.iter().map(move |&k| (r, k))).collect();
    let per_job: Vec<CliResult<Vec<BenchRow>>> = jobs
        .par_iter()
        .map(|&(r, k)| {
            let seed = cfg.seed + r as u64;
            let ps = instance_points(cfg.n, cfg.dist, seed)?;
            let dt = delaunay(&ps, seed)?;
            let g = flip_model(&dt, k, seed)?.triangulation;
            let report = full_report(&g, &dt)?;
            let pred = Prediction::Triangulation(g);
            let mut rows = Vec::new();
            for &algo in &cfg.algos {
                let run = run_repair(algo, &pred, seed)?;
                if !dt_equal(&run.dt, &dt) {
                    return Err(Failure::verification(format!(
                        "{algo} output differs from the Delaunay triangulation (k={k}, seed={seed})"
                    )));
                }
                rows.push(BenchRow::new(k.to_string(), algo.to_string(), seed, run.millis, run.ops, &report));
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_job {
        rows.extend(r?);
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Flip,
    SampleRandom,
    SampleLongest,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Flip, Model::SampleRandom, Model::SampleLongest];

    pub fn name(self) -> &'static str {
        match self {
            Model::Flip => "flip",
            Model::SampleRandom => "sample-random",
            Model::SampleLongest => "sample-longest",
        }
    }

    /// The prediction for keep rate `rho`. The flip model makes
    /// `(1 - rho) m` flip attempts.
    pub fn predict(self, dt: &Triangulation, rho: f64, seed: u64) -> CliResult<Triangulation> {
        Ok(match self {
            Model::Flip => {
                let steps = ((1.0 - rho) * dt.edge_count() as f64).round() as usize;
                flip_model(dt, steps, seed)?.triangulation
            }
            Model::SampleRandom => edge_sample_model(dt, rho, Completion::Random, seed)?.triangulation,
            Model::SampleLongest => edge_sample_model(dt, rho, Completion::LongestFirst, seed)?.triangulation,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ProbConfig {
    pub n: usize,
    pub rhos: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub models: Vec<Model>,
    pub dist: Distribution,
}

/// Probabilistic-model sweep. Counts and timing are those of generating
/// the prediction.
pub fn prob(cfg: &ProbConfig) -> CliResult<Vec<BenchRow>> {
    let jobs: Vec<(usize, f64)> = cfg.rhos.iter().flat_map(|&rho| (0..cfg.trials).map(move |t| (t, rho))).collect();
    let per_job: Vec<CliResult<Vec<BenchRow>>> = jobs
        .par_iter()
        .map(|&(t, rho)| {
            let seed = cfg.seed + t as u64;
            let ps = instance_points(cfg.n, cfg.dist, seed)?;
            let dt = delaunay(&ps, seed)?;
            let mut rows = Vec::new();
            for &m in &cfg.models {
                let start = Instant::now();
                let (g, ops) = counters::measure(|| m.predict(&dt, rho, seed));
                let millis = start.elapsed().as_secs_f64() * 1e3;
                let report = full_report(&g?, &dt)?;
                rows.push(BenchRow::new(rho.to_string(), m.name().to_string(), seed, millis, ops, &report));
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_job {
        rows.extend(r?);
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct ChainConfig {
    pub trials: usize,
    pub n_max: usize,
    pub seed: u64,
    /// Constant in `d_cross <= c * max(1, d_vio^2)`.
    pub vio_constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub n: usize,
    pub model: String,
    pub check: String,
    pub detail: String,
}

/// One fuzz instance: random size, distribution and prediction model, all
/// drawn from `seed`.
pub struct FuzzInstance {
    pub seed: u64,
    pub model: &'static str,
    pub dt: Triangulation,
    pub pred: Prediction,
    /// Triangles of a perturbed prediction that is not a triangulation.
    pub triangles: Vec<[PointId; 3]>,
}

impl FuzzInstance {
    pub fn new(seed: u64, n_max: usize) -> CliResult<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(4..=n_max.max(4));
        let dist = match rng.gen_range(0..3) {
            0 => Distribution::UniformSquare,
            1 => Distribution::GaussianClusters,
            _ => Distribution::GridJitter { jitter: rng.gen_range(0.0..0.45) },
        };
        let ps = instance_points(n, dist, rng.gen())?;
        let dt = delaunay(&ps, rng.gen())?;
        let mut triangles = Vec::new();
        let (model, pred) = match rng.gen_range(0..3) {
            0 => {
                let k = rng.gen_range(0..=2 * dt.edge_count());
                ("flip", Prediction::Triangulation(flip_model(&dt, k, rng.gen())?.triangulation))
            }
            1 => {
                let rho = rng.gen_range(0.05..=1.0);
                let c = if rng.gen() { Completion::Random } else { Completion::LongestFirst };
                ("sample", Prediction::Triangulation(edge_sample_model(&dt, rho, c, rng.gen())?.triangulation))
            }
            _ => {
                let eps = 10f64.powf(rng.gen_range(-4.0..-0.5));
                let p = perturb_model(&ps, eps, rng.gen())?;
                let pred = match p.to_triangulation() {
                    Ok(t) => Prediction::Triangulation(t),
                    Err(_) => {
                        triangles = p.triangles().to_vec();
                        Prediction::Edges(ps.clone(), p.edges())
                    }
                };
                ("perturb", pred)
            }
        };
        Ok(FuzzInstance { seed, model, dt, pred, triangles })
    }

    pub fn report(&self) -> CliResult<ClosenessReport> {
        Ok(match &self.pred {
            Prediction::Triangulation(g) => full_report(g, &self.dt)?,
            Prediction::Edges(ps, e) => combinatorial_report(ps, e, &self.triangles, &self.dt),
        })
    }

    /// The chain, circle and violation checks; returns the failed ones.
    pub fn chain_checks(&self, c: f64) -> CliResult<Vec<Violation>> {
        let r = self.report()?;
        let mut out = Vec::new();
        let mut fail = |check: &str, detail: String| {
            out.push(Violation { seed: self.seed, n: r.n, model: self.model.to_string(), check: check.to_string(), detail })
        };
        if r.d > r.d_cross_total {
            fail("D<=D_cross", format!("D={} D_cross={}", r.d, r.d_cross_total));
        }
        if let Prediction::Triangulation(g) = &self.pred {
            let flips = r.flip_upper.unwrap_or(0);
            if r.d_local > r.d {
                fail("D_local<=D", format!("D_local={} D={}", r.d_local, r.d));
            }
            if r.d > flips {
                fail("D<=flip_upper", format!("D={} flip_upper={flips}", r.d));
            }
            if let Some((t, q, count)) = circle0_witness(g, &self.dt, r.d_vio_max) {
                fail("circle0", format!("triangle {t:?} vertex {q}: {count} crossing edges > d_vio={}", r.d_vio_max));
            }
            let bound = c * (r.d_vio_max.max(1) as f64).powi(2);
            if r.d_cross_max as f64 > bound {
                fail("vio", format!("d_cross={} > {c}*max(1,d_vio^2) with d_vio={}", r.d_cross_max, r.d_vio_max));
            }
        }
        Ok(out)
    }
}

/// Fuzzes `trials` instances. Returns the instance count and every failed
/// check.
pub fn chain(cfg: &ChainConfig) -> CliResult<(usize, Vec<Violation>)> {
    let found: Vec<CliResult<Vec<Violation>>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            FuzzInstance::new(seed, cfg.n_max)?.chain_checks(cfg.vio_constant)
        })
        .collect();
    let mut all = Vec::new();
    for v in found {
        all.extend(v?);
    }
    Ok((cfg.trials, all))
}
