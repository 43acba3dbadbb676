//! One Monte Carlo run of the constrained opening process.
//!
//! Attempt times are never drawn: the order statistics of i.i.d. uniform
//! times form a uniform random permutation, so a run is driven by a shuffled
//! list of sites and the attempt count plays the role of time.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ClusterForest, Direction, LatticeGeometry, Neighbor, UnionOutcome, Winding, WrapEvent};

/// Which side of the volume-difference constraint lets a site open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Open when `M1 - M2 >= r` (or `M2 = 0`).
    #[default]
    Standard,
    /// Open when `M1 - M2 < r` (or `M2 = 0`).
    Opposite,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Standard => "standard",
            Mode::Opposite => "opposite",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Mode::Standard),
            "opposite" => Ok(Mode::Opposite),
            other => Err(Error::invalid(format!("unknown mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Model parameters for a family of runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParams {
    pub r: u32,
    pub mode: Mode,
    pub side: usize,
    pub seed: u64,
}

impl ModelParams {
    pub fn new(side: usize, r: u32) -> Self {
        ModelParams { r, mode: Mode::Standard, side, seed: 0 }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn geometry(&self) -> LatticeGeometry {
        LatticeGeometry::new(self.side)
    }

    /// The opening rule applied to the two largest adjacent volumes.
    #[inline]
    pub fn admits(&self, m1: usize, m2: usize) -> bool {
        if m2 == 0 {
            return true;
        }
        let diff = m1 - m2;
        match self.mode {
            Mode::Standard => diff >= self.r as usize,
            Mode::Opposite => diff < self.r as usize,
        }
    }
}

/// Order in which sites are attempted: `order[k]` is attempted at step `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttemptSchedule {
    order: Vec<u32>,
}

impl AttemptSchedule {
    /// Uniform random permutation of `0..n` (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.shuffle(rng);
        AttemptSchedule { order }
    }

    /// Schedule for run `run_index` of a job seeded with `master_seed`.
    pub fn for_run(n: usize, master_seed: u64, run_index: u64) -> Self {
        let mut rng = run_rng(master_seed, run_index);
        Self::random(n, &mut rng)
    }

    /// Validates that `order` is a permutation of `0..order.len()`.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &s in &order {
            if s >= n || std::mem::replace(&mut seen[s], true) {
                return Err(Error::invalid(format!("attempt order is not a permutation of 0..{n}")));
            }
        }
        Ok(AttemptSchedule { order: order.into_iter().map(|s| s as u32).collect() })
    }

    /// Schedule induced by sorting sites on their attempt times.
    ///
    /// Ties are broken by site id.
    pub fn from_times(times: &[f64]) -> Self {
        let mut order: Vec<u32> = (0..times.len() as u32).collect();
        order.sort_by(|&a, &b| times[a as usize].total_cmp(&times[b as usize]).then(a.cmp(&b)));
        AttemptSchedule { order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().map(|&s| s as usize)
    }

    pub fn site(&self, k: usize) -> usize {
        self.order[k] as usize
    }
}

/// Counter-based per-run generator: ChaCha8 keyed by the master seed, with
/// the run index selecting the stream.
pub fn run_rng(master_seed: u64, run_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(run_index);
    rng
}

/// Observables of the terminal configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalStats {
    pub sites: usize,
    pub open_sites: usize,
    pub largest_volume: usize,
    /// Number of distinct cluster volume values.
    pub distinct_volumes: usize,
}

impl FinalStats {
    pub fn rho(&self) -> f64 {
        self.open_sites as f64 / self.sites as f64
    }

    pub fn largest_fraction(&self) -> f64 {
        self.largest_volume as f64 / self.sites as f64
    }

    /// Statistics from a list of cluster volumes on `sites` sites.
    pub fn from_volumes(sites: usize, volumes: impl IntoIterator<Item = usize>) -> Self {
        let mut vols: Vec<usize> = volumes.into_iter().collect();
        vols.sort_unstable();
        let open_sites = vols.iter().sum();
        let largest_volume = vols.last().copied().unwrap_or(0);
        vols.dedup();
        FinalStats { sites, open_sites, largest_volume, distinct_volumes: vols.len() }
    }
}

/// Statistics of the forest's current configuration.
pub fn final_stats(forest: &ClusterForest) -> FinalStats {
    FinalStats::from_volumes(forest.geometry().sites(), forest.cluster_volumes())
}

/// Outcome of a single run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub params: ModelParams,
    /// Attempt index (1-based) at which a wrapping cluster first exists.
    pub first_wrap: Option<usize>,
    /// First wrap per direction, indexed by [`Direction::index`].
    pub wrap_by_direction: [Option<usize>; 2],
    pub opens: usize,
    pub final_stats: FinalStats,
}

/// The two largest distinct cluster volumes adjacent to `s`, `M1 >= M2`.
///
/// Closed neighbours count as volume 0 and a cluster touching `s` through
/// several bonds is counted once.
pub fn adjacent_top2(forest: &mut ClusterForest, s: usize) -> (usize, usize) {
    let adj = AdjacentClusters::collect(forest, s);
    adj.top2()
}

#[derive(Default)]
struct AdjacentClusters {
    roots: [usize; 4],
    volumes: [usize; 4],
    len: usize,
}

impl AdjacentClusters {
    #[inline]
    fn collect(forest: &mut ClusterForest, s: usize) -> Self {
        let nbs = forest.geometry().neighbors(s);
        Self::collect_from(forest, &nbs)
    }

    #[inline]
    fn collect_from(forest: &mut ClusterForest, nbs: &[Neighbor; 4]) -> Self {
        let mut adj = AdjacentClusters::default();
        for nb in nbs {
            if !forest.is_open(nb.site) {
                continue;
            }
            let (root, _) = forest.find(nb.site);
            if adj.roots[..adj.len].contains(&root) {
                continue;
            }
            adj.roots[adj.len] = root;
            adj.volumes[adj.len] = forest.root_volume(root);
            adj.len += 1;
        }
        adj
    }

    #[inline]
    fn top2(&self) -> (usize, usize) {
        let (mut m1, mut m2) = (0, 0);
        for &v in &self.volumes[..self.len] {
            if v > m1 {
                m2 = m1;
                m1 = v;
            } else if v > m2 {
                m2 = v;
            }
        }
        (m1, m2)
    }
}

/// Result of attempting to open one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attempt {
    /// The site opened; `winding` reports loops closed by its bonds.
    Opened { winding: Winding },
    Blocked,
}

/// Applies the opening rule to the untried site `s`.
///
/// An opened site is joined to every open neighbour; a blocked site stays
/// closed for the rest of the run.
pub fn attempt_open(forest: &mut ClusterForest, s: usize, params: &ModelParams) -> Attempt {
    assert_eq!(
        forest.state(s),
        crate::lattice::SiteState::Untried,
        "site {s} attempted twice"
    );
    let nbs = forest.geometry().neighbors(s);
    let (m1, m2) = AdjacentClusters::collect_from(forest, &nbs).top2();
    if !params.admits(m1, m2) {
        forest.block(s);
        return Attempt::Blocked;
    }
    forest.open(s);
    let mut winding = Winding::default();
    for nb in nbs {
        if !forest.is_open(nb.site) {
            continue;
        }
        if let UnionOutcome::AlreadySame { winding: w } = forest.union(s, nb.site, nb.step) {
            winding.horizontal |= w.horizontal;
            winding.vertical |= w.vertical;
        }
    }
    Attempt::Opened { winding }
}

/// Reusable state for executing runs of one parameter set.
#[derive(Debug, Clone)]
pub struct Engine {
    params: ModelParams,
    forest: ClusterForest,
}

impl Engine {
    pub fn new(params: ModelParams) -> Self {
        Engine { forest: ClusterForest::new(params.geometry()), params }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn forest(&self) -> &ClusterForest {
        &self.forest
    }

    /// Runs the full schedule and returns the record; the forest keeps the
    /// terminal configuration until the next call.
    pub fn run(&mut self, schedule: &AttemptSchedule) -> RunRecord {
        assert_eq!(schedule.len(), self.params.geometry().sites(), "schedule size mismatch");
        self.forest.reset();
        let mut events: Vec<WrapEvent> = Vec::with_capacity(2);
        let mut wrap_by_direction = [None; 2];
        for (k, s) in schedule.iter().enumerate() {
            if let Attempt::Opened { winding } = attempt_open(&mut self.forest, s, &self.params) {
                if !winding.any() {
                    continue;
                }
                for dir in Direction::ALL {
                    if winding.contains(dir) && wrap_by_direction[dir.index()].is_none() {
                        wrap_by_direction[dir.index()] = Some(k + 1);
                        events.push(WrapEvent { direction: dir, attempt_index: k + 1 });
                    }
                }
            }
        }
        let first_wrap = events.iter().map(|e| e.attempt_index).min();
        let final_stats = final_stats(&self.forest);
        RunRecord { params: self.params, first_wrap, wrap_by_direction, opens: self.forest.open_sites(), final_stats }
    }

    /// Run `run_index` of the job keyed by `params.seed`.
    pub fn run_indexed(&mut self, run_index: u64) -> RunRecord {
        let schedule = AttemptSchedule::for_run(self.params.geometry().sites(), self.params.seed, run_index);
        self.run(&schedule)
    }
}

/// Draws a schedule from `rng` and executes one run.
pub fn run_sweep<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> RunRecord {
    let schedule = AttemptSchedule::random(params.geometry().sites(), rng);
    Engine::new(*params).run(&schedule)
}
