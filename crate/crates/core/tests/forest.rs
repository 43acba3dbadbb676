//! Union-find offsets, volumes and wrap flags checked against an explicit
//! breadth-first embedding of the open subgraph.

use std::collections::{HashMap, VecDeque};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use volperc::dynamics::run_rng;
use volperc::lattice::{ClusterForest, Displacement, LatticeGeometry, UnionOutcome};

const STEPS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

fn wrap_site(l: usize, x: i32, y: i32) -> usize {
    let l = l as i32;
    (y.rem_euclid(l) * l + x.rem_euclid(l)) as usize
}

/// Cover positions from a BFS started at `root`, plus the wrap flags of the
/// cluster (a bond whose embedded length is not one step).
fn embed(l: usize, open: &[bool], root: usize) -> (HashMap<usize, (i32, i32)>, (bool, bool)) {
    let mut pos = HashMap::new();
    let mut q = VecDeque::new();
    pos.insert(root, (0, 0));
    q.push_back(root);
    let (mut wx, mut wy) = (false, false);
    while let Some(u) = q.pop_front() {
        let (ux, uy) = pos[&u];
        let (x, y) = ((u % l) as i32, (u / l) as i32);
        for (dx, dy) in STEPS {
            let v = wrap_site(l, x + dx, y + dy);
            if !open[v] {
                continue;
            }
            let want = (ux + dx, uy + dy);
            match pos.get(&v) {
                None => {
                    pos.insert(v, want);
                    q.push_back(v);
                }
                Some(&have) => {
                    wx |= have.0 != want.0;
                    wy |= have.1 != want.1;
                }
            }
        }
    }
    (pos, (wx, wy))
}

/// Opens `sites` in order, joining each to its open neighbours, and checks
/// every invariant after every step.
fn grow_and_check(l: usize, sites: &[usize]) {
    let g = LatticeGeometry::new(l);
    let mut forest = ClusterForest::new(g);
    let mut open = vec![false; g.sites()];
    let mut seen_wrap = (false, false);
    for &s in sites {
        forest.open(s);
        open[s] = true;
        for nb in g.neighbors(s) {
            if !open[nb.site] {
                continue;
            }
            if let UnionOutcome::AlreadySame { winding } = forest.union(s, nb.site, nb.step) {
                seen_wrap.0 |= winding.horizontal;
                seen_wrap.1 |= winding.vertical;
            }
        }

        let mut expect_wrap = (false, false);
        let mut total = 0;
        let mut done = vec![false; g.sites()];
        for u in 0..g.sites() {
            if !open[u] || done[u] {
                continue;
            }
            let (root, _) = forest.find(u);
            let (pos, (wx, wy)) = embed(l, &open, root);
            expect_wrap.0 |= wx;
            expect_wrap.1 |= wy;
            assert_eq!(forest.root_volume(root), pos.len(), "volume at root {root}");
            total += pos.len();
            for (&v, &(px, py)) in &pos {
                done[v] = true;
                let (rv, off) = forest.find(v);
                assert_eq!(rv, root, "site {v} in cluster of {root}");
                // find is a pure observation after compression.
                assert_eq!(forest.find(v), (rv, off));
                let bfs = Displacement::new(-px, -py);
                assert_eq!(off.reduced(l), bfs.reduced(l), "offset of {v}");
                if !(wx || wy) {
                    assert_eq!(off, bfs, "unreduced offset of {v} in a non-wrapping cluster");
                }
            }
        }
        assert_eq!(total, forest.open_sites());
        assert_eq!(forest.cluster_volumes().sum::<usize>(), forest.open_sites());
        assert_eq!(seen_wrap, expect_wrap, "wrap flags after opening {s}");
    }
}

#[test]
fn chain_of_five_unions_matches_bfs() {
    let l = 8;
    let g = LatticeGeometry::new(l);
    // An L-shaped path of six sites.
    let path = [(2, 2), (3, 2), (4, 2), (4, 3), (4, 4), (5, 4)].map(|(x, y)| g.site_at(x, y));
    let mut forest = ClusterForest::new(g);
    for &s in &path {
        forest.open(s);
    }
    for w in path.windows(2) {
        let step = g.neighbors(w[0]).into_iter().find(|n| n.site == w[1]).unwrap().step;
        assert!(matches!(forest.union(w[0], w[1], step), UnionOutcome::Merged { .. }));
    }
    let mut open = vec![false; g.sites()];
    path.iter().for_each(|&s| open[s] = true);
    let (root, _) = forest.find(path[0]);
    let (pos, wraps) = embed(l, &open, root);
    assert_eq!(wraps, (false, false));
    for &s in &path {
        let (r, off) = forest.find(s);
        assert_eq!(r, root);
        assert_eq!(off, Displacement::new(-pos[&s].0, -pos[&s].1));
    }
    assert_eq!(forest.root_volume(root), 6);
}

#[test]
fn column_wraps_vertically() {
    let l = 5;
    let g = LatticeGeometry::new(l);
    let col: Vec<usize> = (0..l).map(|y| g.site_at(3, y)).collect();
    grow_and_check(l, &col);
}

#[test]
fn degenerate_lattices_grow_consistently() {
    for l in [2, 3] {
        let g = LatticeGeometry::new(l);
        for seed in 0..30 {
            let mut order: Vec<usize> = (0..g.sites()).collect();
            order.shuffle(&mut run_rng(seed, l as u64));
            grow_and_check(l, &order);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_growth_keeps_invariants(l in 4usize..11, seed in any::<u64>(), fill in 0.2f64..1.0) {
        let g = LatticeGeometry::new(l);
        let mut order: Vec<usize> = (0..g.sites()).collect();
        order.shuffle(&mut run_rng(seed, 0));
        let k = ((g.sites() as f64) * fill).ceil() as usize;
        grow_and_check(l, &order[..k]);
    }
}
