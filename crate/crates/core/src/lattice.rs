//! Periodic square-lattice geometry and the cluster forest.
//!
//! Sites are numbered row-major, `s = y * L + x`. The forest is a weighted
//! union-find that also stores, for every open site, the lattice displacement
//! to its parent measured in the universal cover of the torus. Two sites of
//! the same cluster joined by a bond whose displacement disagrees with the
//! displacement recorded through the tree close a loop that winds around the
//! torus, which is how wrapping clusters are detected.

use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Integer displacement in lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Displacement {
    pub x: i32,
    pub y: i32,
}

impl Displacement {
    pub const ZERO: Displacement = Displacement { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Displacement { x, y }
    }

    /// Each coordinate reduced modulo `l` into `(-l/2, l/2]`.
    pub fn reduced(self, l: usize) -> Self {
        let l = l as i32;
        let red = |v: i32| {
            let m = v.rem_euclid(l);
            if 2 * m > l {
                m - l
            } else {
                m
            }
        };
        Displacement::new(red(self.x), red(self.y))
    }
}

impl Add for Displacement {
    type Output = Displacement;
    fn add(self, rhs: Self) -> Self {
        Displacement::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Displacement {
    type Output = Displacement;
    fn sub(self, rhs: Self) -> Self {
        Displacement::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Displacement {
    type Output = Displacement;
    fn neg(self) -> Self {
        Displacement::new(-self.x, -self.y)
    }
}

/// Wrapping direction of a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Horizontal, Direction::Vertical];

    pub fn index(self) -> usize {
        match self {
            Direction::Horizontal => 0,
            Direction::Vertical => 1,
        }
    }
}

/// Set of directions in which a loop winds around the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Winding {
    pub horizontal: bool,
    pub vertical: bool,
}

impl Winding {
    pub fn of(mismatch: Displacement) -> Self {
        Winding {
            horizontal: mismatch.x != 0,
            vertical: mismatch.y != 0,
        }
    }

    pub fn any(self) -> bool {
        self.horizontal || self.vertical
    }

    pub fn contains(self, dir: Direction) -> bool {
        match dir {
            Direction::Horizontal => self.horizontal,
            Direction::Vertical => self.vertical,
        }
    }
}

/// First appearance of a wrapping cluster in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WrapEvent {
    pub direction: Direction,
    /// 1-based position in the attempt schedule.
    pub attempt_index: usize,
}

/// An `L x L` square lattice with periodic boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    side: usize,
}

/// One of the four bonds leaving a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub site: usize,
    /// Displacement from the origin site to `site` in the universal cover.
    pub step: Displacement,
}

/// Largest side accepted; keeps site ids inside `u32`.
pub const MAX_SIDE: usize = 1 << 15;

impl LatticeGeometry {
    /// Panics if `side < 2` or `side > MAX_SIDE`.
    pub fn new(side: usize) -> Self {
        assert!(
            (2..=MAX_SIDE).contains(&side),
            "lattice side must lie in 2..={MAX_SIDE}, got {side}"
        );
        LatticeGeometry { side }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn sites(&self) -> usize {
        self.side * self.side
    }

    pub fn coords(&self, s: usize) -> (usize, usize) {
        (s % self.side, s / self.side)
    }

    pub fn site_at(&self, x: usize, y: usize) -> usize {
        y * self.side + x
    }

    /// The four bonds of `s` in the order `+x, -x, +y, -y`.
    ///
    /// On `L = 2` the `+x`/`-x` (and `+y`/`-y`) partners coincide; the bonds
    /// are still reported separately.
    #[inline]
    pub fn neighbors(&self, s: usize) -> [Neighbor; 4] {
        let n = self.sites();
        assert!(s < n, "site {s} out of range for {n} sites");
        let l = self.side;
        let x = s % l;
        let row = s - x;
        let right = if x + 1 == l { row } else { s + 1 };
        let left = if x == 0 { s + l - 1 } else { s - 1 };
        let up = if s + l >= n { s + l - n } else { s + l };
        let down = if s < l { s + n - l } else { s - l };
        [
            Neighbor { site: right, step: Displacement::new(1, 0) },
            Neighbor { site: left, step: Displacement::new(-1, 0) },
            Neighbor { site: up, step: Displacement::new(0, 1) },
            Neighbor { site: down, step: Displacement::new(0, -1) },
        ]
    }
}

/// Lifecycle of a site: every site is attempted at most once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteState {
    Untried,
    Open,
    Blocked,
}

/// Result of joining two open neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionOutcome {
    Merged { root: usize, volume: usize },
    /// Both ends were already in one cluster; `winding` flags the directions
    /// in which the closing bond wraps around the torus.
    AlreadySame { winding: Winding },
}

// Parent sentinels for the two closed states.
const UNTRIED: u32 = u32::MAX;
const BLOCKED: u32 = u32::MAX - 1;

#[derive(Debug, Clone, Copy)]
struct Node {
    // Parent site, or one of the closed-state sentinels.
    parent: u32,
    // Only meaningful at roots.
    volume: u32,
    // Displacement from the site to its parent. Offsets always follow tree
    // paths of at most N - 1 unit steps, so they fit in `i32`.
    offset: Displacement,
}

/// Union-find over lattice sites with cluster volumes and cover offsets.
#[derive(Debug, Clone)]
pub struct ClusterForest {
    geometry: LatticeGeometry,
    nodes: Vec<Node>,
    open_sites: usize,
    path: Vec<u32>,
}

impl ClusterForest {
    pub fn new(geometry: LatticeGeometry) -> Self {
        let n = geometry.sites();
        ClusterForest {
            geometry,
            nodes: vec![Node { parent: UNTRIED, volume: 0, offset: Displacement::ZERO }; n],
            open_sites: 0,
            path: Vec::with_capacity(32),
        }
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    /// Returns every site to the untried state, keeping allocations.
    pub fn reset(&mut self) {
        self.nodes.fill(Node { parent: UNTRIED, volume: 0, offset: Displacement::ZERO });
        self.open_sites = 0;
    }

    pub fn state(&self, s: usize) -> SiteState {
        match self.nodes[s].parent {
            UNTRIED => SiteState::Untried,
            BLOCKED => SiteState::Blocked,
            _ => SiteState::Open,
        }
    }

    #[inline]
    pub fn is_open(&self, s: usize) -> bool {
        self.nodes[s].parent < BLOCKED
    }

    pub fn open_sites(&self) -> usize {
        self.open_sites
    }

    /// Opens `s` as a singleton cluster.
    pub fn open(&mut self, s: usize) {
        assert_eq!(self.nodes[s].parent, UNTRIED, "site {s} was already attempted");
        self.nodes[s] = Node { parent: s as u32, volume: 1, offset: Displacement::ZERO };
        self.open_sites += 1;
    }

    /// Marks `s` as permanently closed after a failed attempt.
    pub fn block(&mut self, s: usize) {
        assert_eq!(self.nodes[s].parent, UNTRIED, "site {s} was already attempted");
        self.nodes[s].parent = BLOCKED;
    }

    /// Root of `s` and the displacement from `s` to that root.
    ///
    /// Compresses the path; every visited site ends up pointing at the root
    /// with its offset equal to the composed offsets along the old path.
    #[inline]
    pub fn find(&mut self, s: usize) -> (usize, Displacement) {
        assert!(self.is_open(s), "find on closed site {s}");
        let node = self.nodes[s];
        let p = node.parent as usize;
        if p == s {
            return (s, Displacement::ZERO);
        }
        let up = self.nodes[p];
        if up.parent as usize == p {
            return (p, node.offset);
        }
        self.find_slow(s)
    }

    fn find_slow(&mut self, s: usize) -> (usize, Displacement) {
        let mut cur = s as u32;
        self.path.clear();
        while self.nodes[cur as usize].parent != cur {
            self.path.push(cur);
            cur = self.nodes[cur as usize].parent;
        }
        let root = cur;
        // The last pushed site already points at the root.
        for k in (0..self.path.len().saturating_sub(1)).rev() {
            let node = self.path[k] as usize;
            let up = self.nodes[node].parent as usize;
            let above = self.nodes[up].offset;
            let n = &mut self.nodes[node];
            n.offset = n.offset + above;
            n.parent = root;
        }
        (root as usize, self.nodes[s].offset)
    }

    /// Volume of the cluster rooted at `root`.
    pub fn root_volume(&self, root: usize) -> usize {
        debug_assert_eq!(self.nodes[root].parent as usize, root);
        self.nodes[root].volume as usize
    }

    /// Joins open sites `a` and `b`, where `step` is the displacement from
    /// `a` to `b` across their shared bond.
    ///
    /// The smaller cluster is attached below the larger one; equal volumes
    /// keep the lower root id as the new root.
    pub fn union(&mut self, a: usize, b: usize, step: Displacement) -> UnionOutcome {
        let (ra, oa) = self.find(a);
        let (rb, ob) = self.find(b);
        // pos(ra) - pos(rb) along the tree paths and the new bond.
        let link = oa - ob - step;
        if ra == rb {
            return UnionOutcome::AlreadySame { winding: Winding::of(link) };
        }
        let (va, vb) = (self.nodes[ra].volume, self.nodes[rb].volume);
        let a_wins = va > vb || (va == vb && ra < rb);
        let (big, small, off) = if a_wins { (ra, rb, link) } else { (rb, ra, -link) };
        self.nodes[small].parent = big as u32;
        self.nodes[small].offset = off;
        self.nodes[big].volume = va + vb;
        UnionOutcome::Merged { root: big, volume: (va + vb) as usize }
    }

    /// Volumes of all clusters, one entry per root, in site order.
    pub fn cluster_volumes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().enumerate().filter_map(move |(s, node)| {
            (node.parent as usize == s).then_some(node.volume as usize)
        })
    }
}
