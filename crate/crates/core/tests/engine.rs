//! The incremental engine against the brute-force reference.

use std::collections::VecDeque;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use volperc::dynamics::{run_rng, Attempt, AttemptSchedule, Engine, Mode, ModelParams};
use volperc::lattice::{ClusterForest, LatticeGeometry};
use volperc::oracle::{naive_run, naive_trace};
use volperc::{adjacent_top2, attempt_open};

fn schedule_with_prefix(n: usize, prefix: &[usize]) -> AttemptSchedule {
    let mut order = prefix.to_vec();
    order.extend((0..n).filter(|s| !prefix.contains(s)));
    AttemptSchedule::from_order(order).unwrap()
}

/// Two arms of 12 and 9 sites plus a third arm of 9, all touching `s` from
/// different sides and not touching each other.
fn three_arms(g: &LatticeGeometry) -> (Vec<usize>, usize) {
    let l = g.side();
    let mut sites = Vec::new();
    sites.extend((9..21).map(|x| g.site_at(x, 8)));
    sites.extend((9..18).map(|y| g.site_at(8, y)));
    sites.extend((0..9).map(|k| g.site_at(8, (7 + l - k) % l)));
    (sites, g.site_at(8, 8))
}

#[test]
fn gap_of_three_opens_at_r3_and_blocks_at_r4() {
    let g = LatticeGeometry::new(32);
    let (arms, s) = three_arms(&g);
    assert_eq!(arms.len(), 30);

    let mut forest = ClusterForest::new(g);
    let fill = ModelParams::new(32, 0);
    for &a in &arms {
        assert!(matches!(attempt_open(&mut forest, a, &fill), Attempt::Opened { .. }));
    }
    assert_eq!(forest.cluster_volumes().count(), 3);
    assert_eq!(adjacent_top2(&mut forest, s), (12, 9));

    for (r, expect_open) in [(3, true), (4, false)] {
        let params = ModelParams::new(32, r);
        let mut f = forest.clone();
        let got = attempt_open(&mut f, s, &params);
        assert_eq!(matches!(got, Attempt::Opened { .. }), expect_open, "r={r}");
        if expect_open {
            let (root, _) = f.find(s);
            assert_eq!(f.root_volume(root), 31);
        }

        let sched = schedule_with_prefix(g.sites(), &[arms.as_slice(), &[s]].concat());
        let (rec, trace) = naive_trace(&params, &sched).unwrap();
        assert!(trace[..30].iter().all(|&o| o));
        assert_eq!(trace[30], expect_open, "reference, r={r}");
        assert_eq!(Engine::new(params).run(&sched), rec);
    }
}

#[test]
fn hundred_seeds_on_every_small_size() {
    for l in [2, 3, 8, 16] {
        for r in [0, 1, 2, 5] {
            for mode in [Mode::Standard, Mode::Opposite] {
                let params = ModelParams::new(l, r).with_mode(mode).with_seed(20);
                let mut engine = Engine::new(params);
                for k in 0..100 {
                    let sched = AttemptSchedule::for_run(l * l, params.seed, k);
                    assert_eq!(engine.run(&sched), naive_run(&params, &sched).unwrap(), "L={l} r={r} {mode} run {k}");
                }
            }
        }
    }
}

#[test]
fn r0_opens_everything_in_order() {
    for l in [2, 3, 5, 8] {
        for k in 0..10 {
            let params = ModelParams::new(l, 0);
            let sched = AttemptSchedule::for_run(l * l, 3, k);
            let (rec, trace) = naive_trace(&params, &sched).unwrap();
            assert!(trace.iter().all(|&o| o));
            assert_eq!(rec.opens, l * l);
            assert_eq!(rec.final_stats.largest_volume, l * l);
            assert_eq!(Engine::new(params).run(&sched), rec);
            let w = rec.first_wrap.unwrap();
            assert!(w >= l && w <= l * l);
        }
    }
}

#[test]
fn only_relative_order_of_times_matters() {
    let params = ModelParams::new(12, 2);
    let mut rng = run_rng(99, 0);
    for _ in 0..20 {
        let times: Vec<f64> = (0..144).map(|_| rng.random::<f64>()).collect();
        let squashed: Vec<f64> = times.iter().map(|t| t * t * 0.5 + 0.25).collect();
        let a = AttemptSchedule::from_times(&times);
        let b = AttemptSchedule::from_times(&squashed);
        assert_eq!(a, b);
        let mut e = Engine::new(params);
        assert_eq!(e.run(&a), e.run(&b));
    }
}

fn bfs_top2(g: &LatticeGeometry, open: &[bool], s: usize) -> (usize, usize) {
    let mut label = vec![usize::MAX; g.sites()];
    let mut vols = Vec::new();
    for start in 0..g.sites() {
        if !open[start] || label[start] != usize::MAX {
            continue;
        }
        let id = vols.len();
        let mut size = 0;
        let mut q = VecDeque::from([start]);
        label[start] = id;
        while let Some(u) = q.pop_front() {
            size += 1;
            for nb in g.neighbors(u) {
                if open[nb.site] && label[nb.site] == usize::MAX {
                    label[nb.site] = id;
                    q.push_back(nb.site);
                }
            }
        }
        vols.push(size);
    }
    let mut ids: Vec<usize> = g.neighbors(s).iter().filter(|n| open[n.site]).map(|n| label[n.site]).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut v: Vec<usize> = ids.into_iter().map(|i| vols[i]).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    (v.first().copied().unwrap_or(0), v.get(1).copied().unwrap_or(0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_reference(
        l in prop::sample::select(vec![2usize, 3, 4, 5, 8, 16]),
        r in 0u32..8,
        opposite in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mode = if opposite { Mode::Opposite } else { Mode::Standard };
        let params = ModelParams::new(l, r).with_mode(mode).with_seed(seed);
        let sched = AttemptSchedule::for_run(l * l, seed, 0);
        let (rec, trace) = naive_trace(&params, &sched).unwrap();
        prop_assert_eq!(rec.opens, trace.iter().filter(|&&o| o).count());
        prop_assert_eq!(Engine::new(params).run(&sched), rec);
    }

    #[test]
    fn top2_matches_bfs(l in 2usize..12, seed in any::<u64>(), fill in 0.0f64..0.9) {
        let g = LatticeGeometry::new(l);
        let mut order: Vec<usize> = (0..g.sites()).collect();
        order.shuffle(&mut run_rng(seed, 1));
        let k = (g.sites() as f64 * fill) as usize;
        let mut forest = ClusterForest::new(g);
        let mut open = vec![false; g.sites()];
        let fill_params = ModelParams::new(l, 0);
        for &s in &order[..k] {
            attempt_open(&mut forest, s, &fill_params);
            open[s] = true;
        }
        for &s in &order[k..] {
            prop_assert_eq!(adjacent_top2(&mut forest, s), bfs_top2(&g, &open, s), "site {}", s);
        }
    }

    #[test]
    fn blocked_sites_never_open(l in 3usize..10, r in 1u32..6, seed in any::<u64>()) {
        let params = ModelParams::new(l, r);
        let sched = AttemptSchedule::for_run(l * l, seed, 0);
        let mut engine = Engine::new(params);
        let rec = engine.run(&sched);
        let (_, trace) = naive_trace(&params, &sched).unwrap();
        for (k, s) in sched.iter().enumerate() {
            prop_assert_eq!(engine.forest().is_open(s), trace[k]);
        }
        prop_assert_eq!(rec.opens, engine.forest().open_sites());
    }
}
