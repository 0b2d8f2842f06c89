//! Sparse symmetric pheromone trails over cell pairs.
//!
//! Every edge that was never touched reads as the initial intensity `tau0`,
//! which is also the fixed point of the evaporation rule, so only edges that
//! diverged from `tau0` need storage.

use std::collections::{BTreeSet, HashMap};
use std::hash::{BuildHasherDefault, Hasher};

use crate::scenario::CellIndex;

/// Unordered cell pair, normalized so (a, b) and (b, a) share one trail.
pub type EdgeKey = (CellIndex, CellIndex);

pub fn edge_key(a: CellIndex, b: CellIndex) -> EdgeKey {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn pack(key: &EdgeKey) -> u64 {
    ((key.0.row as u64) << 48)
        | ((key.0.col as u64) << 32)
        | ((key.1.row as u64) << 16)
        | key.1.col as u64
}

/// FNV-1a over the packed edge key; trail lookups sit on the solver's hot
/// path and the default SipHash costs more than the arithmetic around it.
#[derive(Default)]
struct EdgeHasher(u64);

impl Hasher for EdgeHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        let mut h = 0xcbf29ce484222325u64;
        for &b in bytes {
            h = (h ^ b as u64).wrapping_mul(0x100000001b3);
        }
        self.0 = h;
    }
    fn write_u64(&mut self, v: u64) {
        let mut h = 0xcbf29ce484222325u64 ^ v;
        h = h.wrapping_mul(0x100000001b3);
        self.0 = h ^ (h >> 29);
    }
}

/// Collect the unordered edges of a set of waypoint cell sequences, skipping
/// zero-length hops.
pub fn path_edges<'a, I>(paths: I) -> BTreeSet<EdgeKey>
where
    I: IntoIterator<Item = &'a [CellIndex]>,
{
    let mut edges = BTreeSet::new();
    for path in paths {
        for w in path.windows(2) {
            if w[0] != w[1] {
                edges.insert(edge_key(w[0], w[1]));
            }
        }
    }
    edges
}

#[derive(Debug, Clone)]
pub struct PheromoneMatrix {
    trails: HashMap<u64, f64, BuildHasherDefault<EdgeHasher>>,
    tau0: f64,
}

impl PheromoneMatrix {
    pub fn new(tau0: f64) -> Self {
        assert!(tau0 > 0.0, "tau0 must be positive");
        PheromoneMatrix { trails: HashMap::default(), tau0 }
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn get(&self, a: CellIndex, b: CellIndex) -> f64 {
        *self.trails.get(&pack(&edge_key(a, b))).unwrap_or(&self.tau0)
    }

    pub fn set(&mut self, a: CellIndex, b: CellIndex, value: f64) {
        self.trails.insert(pack(&edge_key(a, b)), value.max(0.0));
    }

    /// Number of edges holding a value different from `tau0`.
    pub fn stored_edges(&self) -> usize {
        self.trails.len()
    }

    /// Evaporation step: every stored edge not on the found paths decays
    /// toward `tau0` by `tau <- (1 - rho) * tau + rho * tau0`. Edges already
    /// at `tau0` are dropped from storage (the update is their fixed point).
    pub fn evaporate(&mut self, used_edges: &BTreeSet<EdgeKey>, rho: f64) {
        let tau0 = self.tau0;
        let mut used: Vec<u64> = used_edges.iter().map(pack).collect();
        used.sort_unstable();
        self.trails.retain(|key, tau| {
            if used.binary_search(key).is_ok() {
                return true;
            }
            *tau = (1.0 - rho) * *tau + rho * tau0;
            (*tau - tau0).abs() > 1e-12 * tau0
        });
    }

    /// Reinforcement step: every edge on the found paths receives
    /// `tau <- (1 - rho) * tau + rho * (q1 / max_len + q2 / nc)`.
    /// With no station deployed the station term is zero.
    pub fn reinforce(
        &mut self,
        used_edges: &BTreeSet<EdgeKey>,
        rho: f64,
        q1: f64,
        q2: f64,
        max_len_m: f64,
        nc: usize,
    ) {
        let mut deposit = 0.0;
        if max_len_m > 0.0 {
            deposit += q1 / max_len_m;
        }
        if nc > 0 {
            deposit += q2 / nc as f64;
        }
        for key in used_edges {
            let packed = pack(key);
            let tau = self.trails.get(&packed).copied().unwrap_or(self.tau0);
            self.trails.insert(packed, (1.0 - rho) * tau + rho * deposit);
        }
    }
}
