//! Point sets and predicted triangulations for experiments.

mod complete;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};

use crate::dt::delaunay;
use crate::error::{Error, Result};
use crate::geom::PointId;
use crate::tri::mesh::prev;
use crate::tri::{EdgeKey, PointSet, Triangulation};
use crate::verify::is_delaunay;

pub use complete::complete_triangulation;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distribution {
    UniformSquare,
    GaussianClusters,
    /// Square grid with each point moved by up to `jitter` grid spacings.
    GridJitter {
        jitter: f64,
    },
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::UniformSquare => write!(f, "uniform-square"),
            Distribution::GaussianClusters => write!(f, "gaussian-clusters"),
            Distribution::GridJitter { .. } => write!(f, "grid-jitter"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-square" | "uniform" => Ok(Distribution::UniformSquare),
            "gaussian-clusters" | "clusters" => Ok(Distribution::GaussianClusters),
            "grid-jitter" | "grid" => Ok(Distribution::GridJitter { jitter: 0.25 }),
            _ => Err(Error::InvalidParameter(format!("unknown distribution {s:?}"))),
        }
    }
}

/// `n` distinct points. The same seed always gives the same points.
pub fn gen_points(n: usize, dist: Distribution, seed: u64) -> Result<PointSet> {
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<(u64, u64)> = HashSet::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    let mut push = |c: (f64, f64), coords: &mut Vec<(f64, f64)>| {
        // -0.0 and 0.0 are the same point.
        let c = (c.0 + 0.0, c.1 + 0.0);
        if seen.insert((c.0.to_bits(), c.1.to_bits())) {
            coords.push(c);
        }
    };
    match dist {
        Distribution::UniformSquare => {
            while coords.len() < n {
                push((rng.gen::<f64>(), rng.gen::<f64>()), &mut coords);
            }
        }
        Distribution::GaussianClusters => {
            let k = (n / 500).clamp(1, 16);
            let centers: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
            let spread = Normal::new(0.0, 0.05).expect("valid deviation");
            while coords.len() < n {
                let (cx, cy) = centers[rng.gen_range(0..k)];
                push((cx + spread.sample(&mut rng), cy + spread.sample(&mut rng)), &mut coords);
            }
        }
        Distribution::GridJitter { jitter } => {
            if !(0.0..0.5).contains(&jitter) {
                return Err(Error::InvalidParameter(format!("jitter {jitter} outside [0, 0.5)")));
            }
            let side = (n as f64).sqrt().ceil() as usize;
            let mut cells: Vec<usize> = (0..side * side).collect();
            cells.shuffle(&mut rng);
            for &c in &cells[..n] {
                let (i, j) = ((c % side) as f64, (c / side) as f64);
                let dx = if jitter > 0.0 { rng.gen_range(-jitter..jitter) } else { 0.0 };
                let dy = if jitter > 0.0 { rng.gen_range(-jitter..jitter) } else { 0.0 };
                push((i + dx, j + dy), &mut coords);
            }
        }
    }
    PointSet::new(&coords)
}

/// Result of the random flip process.
#[derive(Clone, Debug)]
pub struct FlipOutcome {
    pub triangulation: Triangulation,
    /// Edge label picked at each step. Labels are indices into the sorted
    /// edge list of the input; a flipped edge keeps its label.
    pub picks: Vec<u32>,
    pub flips: usize,
}

/// Runs `steps` rounds of: pick a uniformly random edge and flip it when
/// its two triangles form a convex quadrilateral. Hull edges are picked
/// too and never flip.
pub fn flip_model(dt: &Triangulation, steps: usize, seed: u64) -> Result<FlipOutcome> {
    if !is_delaunay(dt) {
        return Err(Error::NotDelaunay);
    }
    let mut t = dt.clone();
    let mut labels = dt.canonical_edge_set();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = Vec::with_capacity(steps);
    let mut flips = 0;
    for _ in 0..steps {
        let l = rng.gen_range(0..labels.len());
        picks.push(l as u32);
        let e = labels[l];
        let h = t.find_half_edge(e.lo(), e.hi()).expect("labels track current edges");
        if t.is_flippable_half_edge(h) {
            let c = t.origin(prev(h));
            let d = t.origin(prev(t.twin(h)));
            t.flip_half_edge(h);
            labels[l] = EdgeKey::new(c, d);
            flips += 1;
        }
    }
    Ok(FlipOutcome { triangulation: t, picks, flips })
}

/// How the sampled edges are completed to a triangulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Completion {
    /// Candidate edges in random order.
    Random,
    /// Longest candidates first; long edges cross many Delaunay edges.
    LongestFirst,
}

impl fmt::Display for Completion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Completion::Random => write!(f, "random"),
            Completion::LongestFirst => write!(f, "longest-first"),
        }
    }
}

impl FromStr for Completion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Completion::Random),
            "longest-first" | "longest" => Ok(Completion::LongestFirst),
            _ => Err(Error::InvalidParameter(format!("unknown completion {s:?}"))),
        }
    }
}

/// A triangulation with its kept edges.
#[derive(Clone, Debug)]
pub struct SampleOutcome {
    pub triangulation: Triangulation,
    pub kept: Vec<EdgeKey>,
}

/// Keeps each Delaunay edge independently with probability `rho`, then
/// completes the kept edges to a triangulation of all points.
pub fn edge_sample_model(dt: &Triangulation, rho: f64, completion: Completion, seed: u64) -> Result<SampleOutcome> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidProbability(rho));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kept: Vec<EdgeKey> = dt.canonical_edge_set().into_iter().filter(|_| rng.gen_bool(rho)).collect();
    let triangulation = complete_triangulation(dt, &kept, completion, rng.gen())?;
    Ok(SampleOutcome { triangulation, kept })
}

/// Triangles over the true points that may overlap each other.
#[derive(Clone, Debug)]
pub struct CombinatorialTriangulation {
    points: Arc<PointSet>,
    triangles: Vec<[PointId; 3]>,
}

impl CombinatorialTriangulation {
    pub fn new(points: Arc<PointSet>, triangles: Vec<[PointId; 3]>) -> Self {
        CombinatorialTriangulation { points, triangles }
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn triangles(&self) -> &[[PointId; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> Vec<EdgeKey> {
        let mut e: Vec<EdgeKey> =
            self.triangles.iter().flat_map(|&[a, b, c]| [EdgeKey::new(a, b), EdgeKey::new(b, c), EdgeKey::new(c, a)]).collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// The same triangles as a plane triangulation, if they form one on the
    /// true points.
    pub fn to_triangulation(&self) -> Result<Triangulation> {
        let oriented: Vec<[PointId; 3]> = self
            .triangles
            .iter()
            .map(|&[a, b, c]| {
                let p = |v| self.points.get(v);
                if crate::geom::ccw(p(a), p(b), p(c)) {
                    [a, b, c]
                } else {
                    [a, c, b]
                }
            })
            .collect();
        let t = Triangulation::from_triangles(self.points.clone(), &oriented)?;
        t.validate_no_crossings()?;
        Ok(t)
    }
}

/// Delaunay triangulation of the points each moved by a uniform offset in
/// `[-eps, eps]^2`, with its triangles placed back on the true points.
pub fn perturb_model(ps: &Arc<PointSet>, eps: f64, seed: u64) -> Result<CombinatorialTriangulation> {
    if eps.is_nan() || eps < 0.0 || eps.is_infinite() {
        return Err(Error::InvalidParameter(format!("eps {eps} must be finite and non-negative")));
    }
    if eps == 0.0 {
        let dt = delaunay(ps, seed)?;
        return Ok(CombinatorialTriangulation::new(ps.clone(), dt.triangles().collect()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(ps.len());
    let mut moved = Vec::with_capacity(ps.len());
    for p in ps.points() {
        loop {
            let c = (p.x + rng.gen_range(-eps..=eps) + 0.0, p.y + rng.gen_range(-eps..=eps) + 0.0);
            if c.0.is_finite() && c.1.is_finite() && seen.insert((c.0.to_bits(), c.1.to_bits())) {
                moved.push(c);
                break;
            }
        }
    }
    let estimate = Arc::new(PointSet::new(&moved)?);
    let dt = delaunay(&estimate, seed)?;
    Ok(CombinatorialTriangulation::new(ps.clone(), dt.triangles().collect()))
}
