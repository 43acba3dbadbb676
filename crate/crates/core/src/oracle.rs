//! Slow reference implementations used to check the engine.
//!
//! Nothing here touches the union-find: clusters are recomputed from scratch
//! by breadth-first search after every attempt, and wrapping is found by
//! embedding each cluster in the plane and looking for bonds whose
//! embedded length is not one lattice step.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::dynamics::{AttemptSchedule, FinalStats, Mode, ModelParams, RunRecord};
use crate::ensemble::{QCurve, StatsAccumulator};
use crate::error::{Error, Result};

/// Largest side accepted by [`naive_run`].
pub const NAIVE_MAX_SIDE: usize = 64;

/// Largest side accepted by [`exact_qcurve`] (`9!` schedules).
pub const EXACT_MAX_SIDE: usize = 3;

const STEPS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

struct Torus {
    l: i64,
}

impl Torus {
    fn neighbor(&self, s: usize, (dx, dy): (i64, i64)) -> usize {
        let x = s as i64 % self.l;
        let y = s as i64 / self.l;
        ((y + dy).rem_euclid(self.l) * self.l + (x + dx).rem_euclid(self.l)) as usize
    }
}

/// Cluster labelling of the open sites: `label[s]` is the cluster index of
/// an open site, `volumes[c]` the size of cluster `c`.
struct Labels {
    label: Vec<Option<usize>>,
    volumes: Vec<usize>,
}

fn label_clusters(torus: &Torus, open: &[bool]) -> Labels {
    let n = open.len();
    let mut label = vec![None; n];
    let mut volumes = Vec::new();
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if !open[seed] || label[seed].is_some() {
            continue;
        }
        let c = volumes.len();
        let mut size = 0;
        label[seed] = Some(c);
        queue.push_back(seed);
        while let Some(u) = queue.pop_front() {
            size += 1;
            for step in STEPS {
                let v = torus.neighbor(u, step);
                if open[v] && label[v].is_none() {
                    label[v] = Some(c);
                    queue.push_back(v);
                }
            }
        }
        volumes.push(size);
    }
    Labels { label, volumes }
}

/// Directions `(horizontal, vertical)` in which some open cluster winds
/// around the torus.
fn wrapping_directions(torus: &Torus, open: &[bool]) -> (bool, bool) {
    let n = open.len();
    let mut pos: Vec<Option<(i64, i64)>> = vec![None; n];
    let (mut wx, mut wy) = (false, false);
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if !open[seed] || pos[seed].is_some() {
            continue;
        }
        pos[seed] = Some((0, 0));
        queue.push_back(seed);
        while let Some(u) = queue.pop_front() {
            let (ux, uy) = pos[u].unwrap();
            for step in STEPS {
                let v = torus.neighbor(u, step);
                if !open[v] {
                    continue;
                }
                let want = (ux + step.0, uy + step.1);
                match pos[v] {
                    None => {
                        pos[v] = Some(want);
                        queue.push_back(v);
                    }
                    Some(have) => {
                        wx |= have.0 != want.0;
                        wy |= have.1 != want.1;
                    }
                }
            }
        }
    }
    (wx, wy)
}

/// Executes a run by direct recomputation of every cluster at every attempt.
pub fn naive_run(params: &ModelParams, schedule: &AttemptSchedule) -> Result<RunRecord> {
    naive_trace(params, schedule).map(|(rec, _)| rec)
}

/// Like [`naive_run`], also returning whether each attempt opened its site.
pub fn naive_trace(params: &ModelParams, schedule: &AttemptSchedule) -> Result<(RunRecord, Vec<bool>)> {
    let l = params.side;
    if !(2..=NAIVE_MAX_SIDE).contains(&l) {
        return Err(Error::invalid(format!("naive run supports 2 <= L <= {NAIVE_MAX_SIDE}, got {l}")));
    }
    let n = l * l;
    if schedule.len() != n {
        return Err(Error::invalid(format!("schedule has {} sites, lattice has {n}", schedule.len())));
    }
    let torus = Torus { l: l as i64 };
    let mut open = vec![false; n];
    let mut wraps: [Option<usize>; 2] = [None, None];
    let mut trace = Vec::with_capacity(n);
    for (k, s) in schedule.iter().enumerate() {
        let labels = label_clusters(&torus, &open);
        let mut adjacent: Vec<usize> = STEPS
            .iter()
            .filter_map(|&step| labels.label[torus.neighbor(s, step)])
            .collect();
        adjacent.sort_unstable();
        adjacent.dedup();
        let mut vols: Vec<usize> = adjacent.iter().map(|&c| labels.volumes[c]).collect();
        vols.sort_unstable_by(|a, b| b.cmp(a));
        let m1 = vols.first().copied().unwrap_or(0);
        let m2 = vols.get(1).copied().unwrap_or(0);
        let gap = m1.abs_diff(m2);
        let r = params.r as usize;
        let opens = m2 == 0
            || match params.mode {
                Mode::Standard => gap >= r,
                Mode::Opposite => gap < r,
            };
        trace.push(opens);
        if !opens {
            continue;
        }
        open[s] = true;
        let (wx, wy) = wrapping_directions(&torus, &open);
        for (slot, hit) in wraps.iter_mut().zip([wx, wy]) {
            if hit && slot.is_none() {
                *slot = Some(k + 1);
            }
        }
    }
    let labels = label_clusters(&torus, &open);
    let final_stats = FinalStats::from_volumes(n, labels.volumes.iter().copied());
    let first_wrap = wraps.iter().flatten().min().copied();
    let rec = RunRecord {
        params: *params,
        first_wrap,
        wrap_by_direction: wraps,
        opens: open.iter().filter(|&&o| o).count(),
        final_stats,
    };
    Ok((rec, trace))
}

/// Exact ensemble over every attempt order of a tiny lattice.
#[derive(Debug, Clone)]
pub struct ExactEnsemble {
    pub qcurve: QCurve,
    pub stats: StatsAccumulator,
}

/// Averages the wrap indicator over all `N!` schedules.
///
/// The returned curve counts every permutation as one run.
pub fn exact_qcurve(params: &ModelParams) -> Result<ExactEnsemble> {
    let l = params.side;
    if !(2..=EXACT_MAX_SIDE).contains(&l) {
        return Err(Error::invalid(format!("exhaustive enumeration supports 2 <= L <= {EXACT_MAX_SIDE}, got {l}")));
    }
    let n = l * l;
    // One task per choice of first site; each enumerates the rest.
    let partials: Vec<(Vec<u64>, StatsAccumulator, u64)> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut hits = vec![0u64; n + 1];
            let mut stats = StatsAccumulator::new(n);
            let mut count = 0u64;
            let mut rest: Vec<usize> = (0..n).filter(|&s| s != first).collect();
            for_each_permutation(&mut rest, |perm| {
                let mut order = Vec::with_capacity(n);
                order.push(first);
                order.extend_from_slice(perm);
                let schedule = AttemptSchedule::from_order(order).expect("permutation");
                let rec = naive_run(params, &schedule).expect("size checked");
                if let Some(i) = rec.first_wrap {
                    hits[i] += 1;
                }
                stats.push(&rec);
                count += 1;
            });
            (hits, stats, count)
        })
        .collect();
    let mut hits = vec![0u64; n + 1];
    let mut stats = StatsAccumulator::new(n);
    let mut runs = 0;
    for (h, s, c) in &partials {
        hits.iter_mut().zip(h).for_each(|(a, b)| *a += b);
        stats = stats.merge(s)?;
        runs += c;
    }
    let cumulative: Vec<u64> = hits
        .iter()
        .scan(0, |acc, h| {
            *acc += h;
            Some(*acc)
        })
        .collect();
    let qcurve = QCurve::from_cumulative(params, 0, runs, &cumulative)?;
    Ok(ExactEnsemble { qcurve, stats })
}

/// Heap's algorithm, non-recursive.
fn for_each_permutation(items: &mut [usize], mut visit: impl FnMut(&[usize])) {
    let k = items.len();
    let mut c = vec![0usize; k];
    visit(items);
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// A point where an observed Q-curve leaves the confidence band around the
/// exact one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QMismatch {
    pub index: usize,
    pub exact: f64,
    pub observed: f64,
    pub sigma: f64,
}

impl std::fmt::Display for QMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Q_{} = {} but exact value is {} (binomial sigma {:.3e})",
            self.index, self.observed, self.exact, self.sigma
        )
    }
}

/// Compares `observed` against `exact` point by point with a band of
/// `k_sigma` binomial standard errors for `observed.runs()` samples.
///
/// Where the exact probability is 0 or 1 the observation must match exactly.
pub fn compare_to_exact(exact: &QCurve, observed: &QCurve, k_sigma: f64) -> Result<Vec<QMismatch>> {
    if exact.sites() != observed.sites() {
        return Err(Error::invalid("Q-curves of different lattice sizes"));
    }
    let runs = observed.runs() as f64;
    let out = exact
        .values()
        .into_iter()
        .zip(observed.values())
        .enumerate()
        .filter_map(|(index, (p, q))| {
            let sigma = (p * (1.0 - p) / runs).sqrt();
            let bad = (q - p).abs() > k_sigma * sigma + 1e-12;
            bad.then_some(QMismatch { index, exact: p, observed: q, sigma })
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Engine;

    #[test]
    fn heap_visits_every_permutation_once() {
        let mut items = vec![0, 1, 2, 3];
        let mut seen = std::collections::HashSet::new();
        for_each_permutation(&mut items, |p| {
            assert!(seen.insert(p.to_vec()));
        });
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn full_occupation_at_zero_constraint() {
        let p = ModelParams::new(3, 0);
        let sched = AttemptSchedule::for_run(9, 1, 0);
        let rec = naive_run(&p, &sched).unwrap();
        assert_eq!(rec.opens, 9);
        assert!(rec.first_wrap.unwrap() >= 3);
    }

    #[test]
    fn size_guard() {
        let p = ModelParams::new(65, 0);
        let sched = AttemptSchedule::for_run(65 * 65, 1, 0);
        assert!(naive_run(&p, &sched).is_err());
        assert!(exact_qcurve(&ModelParams::new(4, 0)).is_err());
    }

    #[test]
    fn exact_side_two_zero_constraint() {
        // Adjacent sites of a 2x2 torus share two bonds, so an adjacent
        // second site closes a wrapping loop; a diagonal one does not.
        let e = exact_qcurve(&ModelParams::new(2, 0)).unwrap();
        assert_eq!(e.qcurve.runs(), 24);
        assert_eq!(e.qcurve.cumulative(), vec![0, 0, 16, 24, 24]);
    }

    #[test]
    fn engine_matches_on_a_few_seeds() {
        for r in [0, 1, 2, 5] {
            let p = ModelParams::new(8, r).with_seed(42);
            let mut engine = Engine::new(p);
            for run in 0..10 {
                let sched = AttemptSchedule::for_run(64, p.seed, run);
                assert_eq!(engine.run(&sched), naive_run(&p, &sched).unwrap(), "r={r} run={run}");
            }
        }
    }

    #[test]
    fn band_comparison_locates_mismatch() {
        let p = ModelParams::new(2, 0);
        let exact = exact_qcurve(&p).unwrap().qcurve;
        assert!(compare_to_exact(&exact, &exact, 4.0).unwrap().is_empty());
        let bad = QCurve::from_cumulative(&p, 0, 24, &[0, 2, 16, 24, 24]).unwrap();
        let mism = compare_to_exact(&exact, &bad, 4.0).unwrap();
        assert_eq!(mism.len(), 1);
        assert_eq!(mism[0].index, 1);
    }
}
