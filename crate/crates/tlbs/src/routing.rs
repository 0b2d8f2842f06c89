//! Deterministic greedy station placement along a fixed ROI visit order.
//!
//! Given an order, the planner walks the straight legs between cell centers
//! and, whenever the next target is out of safe reach, inserts a battery swap
//! at the farthest useful cell toward the target. Existing (shared) station
//! cells are preferred so re-planning a path does not inflate the global
//! station count.

use std::collections::BTreeSet;

use crate::energy::{Solution, Waypoint};
use crate::error::{Error, Result};
use crate::hull::HullFilter;
use crate::scenario::{CellIndex, Scenario};

/// Arrival margin of the planner, in meters of range. Kept tiny: like the
/// farthest-point rule it imitates, the planner may run the battery down to
/// (just above) empty, because a swap in the current cell is always possible.
pub const PLAN_MARGIN_M: f64 = 1e-3;

/// Safety margin and reuse preference for the planner.
#[derive(Debug, Clone, Copy)]
pub struct PlanConfig {
    /// Minimum residual energy required after a ROI leg.
    pub e_threshold: f64,
    /// Score multiplier that biases swap placement toward existing stations.
    pub reuse_bonus: f64,
}

impl PlanConfig {
    pub fn for_scenario(scenario: &Scenario) -> Self {
        PlanConfig {
            e_threshold: scenario.uav.fly_cost_per_m * PLAN_MARGIN_M,
            reuse_bonus: 1.5,
        }
    }
}

/// A re-planned single-UAV path: waypoints (without the leading START),
/// its polyline length, and the stations it relies on.
#[derive(Debug, Clone)]
pub struct PlannedRoute {
    pub waypoints: Vec<Waypoint>,
    pub len_m: f64,
    /// Stations this route uses that already existed.
    pub reused_stations: BTreeSet<CellIndex>,
    /// Stations this route had to add.
    pub new_stations: BTreeSet<CellIndex>,
}

const MAX_SWAPS_PER_LEG: usize = 10_000;

/// Plan the legs for visiting `order` from `start`, inserting swaps as
/// needed. `fixed_stations` are cells that already host a station (from other
/// UAVs or previous plans); reusing them is free.
pub fn plan_route(
    scenario: &Scenario,
    cfg: &PlanConfig,
    start: CellIndex,
    order: &[CellIndex],
    fixed_stations: &BTreeSet<CellIndex>,
    hull: Option<&HullFilter>,
) -> Result<PlannedRoute> {
    let grid = &scenario.grid;
    let gamma = scenario.uav.fly_cost_per_m;
    let e_max = scenario.uav.e_max();

    let mut waypoints = Vec::with_capacity(order.len());
    let mut len_m = 0.0;
    let mut reused = BTreeSet::new();
    let mut new_stations = BTreeSet::new();
    let mut cur = start;
    let mut energy = e_max;

    for &target in order {
        let mut swaps_this_leg = 0;
        loop {
            let d = grid.center(cur).dist(grid.center(target));
            let drain = gamma * d;
            if drain <= energy - cfg.e_threshold && drain < energy {
                energy -= drain;
                len_m += d;
                cur = target;
                waypoints.push(Waypoint::roi(target));
                break;
            }

            swaps_this_leg += 1;
            if swaps_this_leg > MAX_SWAPS_PER_LEG {
                return Err(Error::ConstructionStalled(swaps_this_leg));
            }

            let station = pick_station_cell(
                scenario,
                cfg,
                cur,
                target,
                energy,
                fixed_stations,
                &new_stations,
                hull,
            )?;
            let hop = grid.center(cur).dist(grid.center(station));
            len_m += hop;
            cur = station;
            waypoints.push(Waypoint::recharge(station));
            if fixed_stations.contains(&station) {
                reused.insert(station);
            } else {
                new_stations.insert(station);
            }
            energy = e_max;
        }
    }

    Ok(PlannedRoute { waypoints, len_m, reused_stations: reused, new_stations })
}

/// Choose the swap cell while en route to `target`: the reachable cell that
/// makes the most progress toward the target, biased toward existing
/// stations. Falls back to swapping in place when nothing else is reachable.
#[allow(clippy::too_many_arguments)]
fn pick_station_cell(
    scenario: &Scenario,
    cfg: &PlanConfig,
    cur: CellIndex,
    target: CellIndex,
    energy: f64,
    fixed_stations: &BTreeSet<CellIndex>,
    new_stations: &BTreeSet<CellIndex>,
    hull: Option<&HullFilter>,
) -> Result<CellIndex> {
    let grid = &scenario.grid;
    let gamma = scenario.uav.fly_cost_per_m;
    let cur_pt = grid.center(cur);
    let target_pt = grid.center(target);
    let d_target = cur_pt.dist(target_pt);

    let reachable = |cell: CellIndex| gamma * cur_pt.dist(grid.center(cell)) <= energy;
    let progress = |cell: CellIndex| d_target - grid.center(cell).dist(target_pt);
    let in_hull = |cell: CellIndex| hull.map_or(true, |h| h.contains_cell(cell));

    let mut best: Option<(f64, CellIndex)> = None;
    let consider = |best: &mut Option<(f64, CellIndex)>, cell: CellIndex, bonus: f64| {
        if !reachable(cell) || !in_hull(cell) {
            return;
        }
        let p = progress(cell);
        if p <= 0.0 {
            return;
        }
        let score = p * bonus;
        if best.map_or(true, |(s, c)| score > s || (score == s && cell < c)) {
            *best = Some((score, cell));
        }
    };

    for &s in fixed_stations.iter().chain(new_stations.iter()) {
        consider(&mut best, s, cfg.reuse_bonus);
    }
    // Farthest point of the range disk toward the target; the max-progress
    // cell sits within a couple of cells of it, so a small box scan finds it
    // without touching the whole grid.
    let reach = cur_pt.along(target_pt, (energy / gamma).min(d_target) * (1.0 - 1e-12));
    let anchor = grid.cell_at(reach);
    let margin = 2;
    let r0 = anchor.row.saturating_sub(margin);
    let c0 = anchor.col.saturating_sub(margin);
    for r in r0..=(anchor.row + margin).min(grid.rows - 1) {
        for c in c0..=(anchor.col + margin).min(grid.cols - 1) {
            consider(&mut best, CellIndex::new(r, c), 1.0);
        }
    }
    if best.is_none() {
        // Rare: the box missed (hull boundary effects); scan everything.
        let cells: Vec<CellIndex> = match hull {
            Some(h) => h.member_cells().to_vec(),
            None => grid.iter_cells().collect(),
        };
        for cell in cells {
            consider(&mut best, cell, 1.0);
        }
    }
    if let Some((_, cell)) = best {
        return Ok(cell);
    }

    // No forward progress possible: swap in place unless the battery is
    // already full, which would mean the instance itself is infeasible.
    if energy < scenario.uav.e_max() {
        Ok(cur)
    } else {
        Err(Error::NoReachableCell { from: cur, residual_m: energy / gamma })
    }
}

/// Which objective the exact swap-chain search minimizes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainObjective {
    /// Lexicographic (length, new stations, swaps).
    LengthFirst,
    /// Lexicographic (new stations, length, swaps).
    StationsFirst,
}

/// Exact station re-placement for a fixed visit order.
///
/// Dynamic program over states (swap cell, index of the next target), each
/// reached fully charged: one transition flies a run of consecutive targets
/// on a single tank and lands on the next swap cell. Solved as a
/// lexicographic Dijkstra under the chosen objective, which couples the
/// placement across legs (a leg may end short or long to set up the next
/// tank) and is optimal for the order up to self-reuse of this route's own
/// stations.
pub fn optimize_stations(
    scenario: &Scenario,
    cfg: &PlanConfig,
    start: CellIndex,
    order: &[CellIndex],
    fixed_stations: &BTreeSet<CellIndex>,
    hull: Option<&HullFilter>,
    objective: ChainObjective,
) -> Result<PlannedRoute> {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    let grid = &scenario.grid;
    let gamma = scenario.uav.fly_cost_per_m;
    let e_max = scenario.uav.e_max();
    let m = order.len();
    if m == 0 {
        return Ok(PlannedRoute {
            waypoints: Vec::new(),
            len_m: 0.0,
            reused_stations: BTreeSet::new(),
            new_stations: BTreeSet::new(),
        });
    }
    let targets: Vec<crate::geom::Point> = order.iter().map(|&c| grid.center(c)).collect();
    let ns = grid.num_cells();
    let cell_of = |i: usize| CellIndex::new(i as u32 / grid.cols, i as u32 % grid.cols);
    let id_of = |c: CellIndex, k: usize| k * ns + (c.row * grid.cols + c.col) as usize;

    let placeable = |c: CellIndex| {
        hull.map_or(true, |h| h.contains_cell(c)) || fixed_stations.contains(&c) || c == start
    };
    let station_cost = |c: CellIndex| usize::from(!fixed_stations.contains(&c));

    let key = move |len: f64, new: usize, swaps: usize| -> (f64, f64, f64) {
        match objective {
            ChainObjective::LengthFirst => (len, new as f64, swaps as f64),
            ChainObjective::StationsFirst => (new as f64, len, swaps as f64),
        }
    };

    #[derive(PartialEq)]
    struct Entry {
        key: (f64, f64, f64),
        len: f64,
        new: usize,
        swaps: usize,
        node: usize,
    }
    impl Eq for Entry {}
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> Ordering {
            other
                .key
                .partial_cmp(&self.key)
                .expect("finite")
                .then(other.node.cmp(&self.node))
        }
    }
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    let inf = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    // States: k * ns + cell for k in 0..m, plus the terminal pseudo-state.
    let terminal = m * ns;
    let mut dist: Vec<(f64, f64, f64)> = vec![inf; terminal + 1];
    // prev encodes (state id, targets covered by the incoming transition).
    let mut prev: Vec<(usize, usize)> = vec![(usize::MAX, 0); terminal + 1];
    let mut heap: BinaryHeap<Entry> = BinaryHeap::new();

    // Expand one state: from point `p` (fully charged, or the start tank),
    // next target index `k`, fly through targets k..j and land on a swap
    // cell, or finish the order outright.
    let expand = |from_id: usize,
                      p: crate::geom::Point,
                      k: usize,
                      len: f64,
                      new: usize,
                      swaps: usize,
                      dist: &mut Vec<(f64, f64, f64)>,
                      prev: &mut Vec<(usize, usize)>,
                      heap: &mut BinaryHeap<Entry>| {
        let mut arc = 0.0;
        let mut at = p;
        for j in k..=m {
            if j > k {
                arc += at.dist(targets[j - 1]);
                at = targets[j - 1];
            }
            if gamma * arc > e_max && j > k {
                break;
            }
            if j == m {
                // Finish the remaining run on this tank.
                if gamma * arc <= e_max - cfg.e_threshold && gamma * arc < e_max {
                    let cost = key(len + arc, new, swaps);
                    if cost < dist[terminal] {
                        dist[terminal] = cost;
                        prev[terminal] = (from_id, m - k);
                        heap.push(Entry {
                            key: cost,
                            len: len + arc,
                            new,
                            swaps,
                            node: terminal,
                        });
                    }
                }
                continue;
            }
            // Land on a swap cell within the remaining tank.
            let budget = e_max / gamma - arc;
            if budget < 0.0 {
                break;
            }
            let anchor = grid.cell_at(at);
            let radius = (budget / grid.cell_size_m).ceil() as u32 + 1;
            let r0 = anchor.row.saturating_sub(radius);
            let r1 = (anchor.row + radius).min(grid.rows - 1);
            let c0 = anchor.col.saturating_sub(radius);
            let c1 = (anchor.col + radius).min(grid.cols - 1);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    let cell = CellIndex::new(r, c);
                    if !placeable(cell) {
                        continue;
                    }
                    let hop = at.dist(grid.center(cell));
                    if hop > budget {
                        continue;
                    }
                    let nlen = len + arc + hop;
                    let nnew = new + station_cost(cell);
                    let nswaps = swaps + 1;
                    let cost = key(nlen, nnew, nswaps);
                    let id = id_of(cell, j);
                    if cost < dist[id] {
                        dist[id] = cost;
                        prev[id] = (from_id, j - k);
                        heap.push(Entry { key: cost, len: nlen, new: nnew, swaps: nswaps, node: id });
                    }
                }
            }
        }
    };

    // Virtual origin: usize::MAX marks "no predecessor".
    expand(usize::MAX, grid.center(start), 0, 0.0, 0, 0, &mut dist, &mut prev, &mut heap);

    while let Some(Entry { key: k, len, new, swaps, node }) = heap.pop() {
        if k > dist[node] {
            continue;
        }
        if node == terminal {
            break;
        }
        let cell = cell_of(node % ns);
        let next_k = node / ns;
        expand(node, grid.center(cell), next_k, len, new, swaps, &mut dist, &mut prev, &mut heap);
    }

    if dist[terminal] == inf {
        return Err(Error::NoReachableCell { from: start, residual_m: e_max / gamma });
    }

    // Reconstruct: walk the predecessor chain back to the origin.
    let mut stops: Vec<(usize, usize)> = Vec::new(); // (state, covered)
    let mut node = terminal;
    while node != usize::MAX {
        let (p, covered) = prev[node];
        stops.push((node, covered));
        node = p;
    }
    stops.reverse();

    let mut waypoints = Vec::new();
    let mut len_m = 0.0;
    let mut reused = BTreeSet::new();
    let mut new_stations = BTreeSet::new();
    let mut at = grid.center(start);
    let mut k = 0usize;
    for (state, covered) in stops {
        for _ in 0..covered {
            len_m += at.dist(targets[k]);
            at = targets[k];
            waypoints.push(Waypoint::roi(order[k]));
            k += 1;
        }
        if state == terminal {
            break;
        }
        let cell = cell_of(state % ns);
        len_m += at.dist(grid.center(cell));
        at = grid.center(cell);
        waypoints.push(Waypoint::recharge(cell));
        if fixed_stations.contains(&cell) {
            reused.insert(cell);
        } else {
            new_stations.insert(cell);
        }
    }

    Ok(PlannedRoute { waypoints, len_m, reused_stations: reused, new_stations })
}

/// Assemble a multi-UAV [`Solution`] from per-UAV planned routes.
pub fn assemble_solution(scenario: &Scenario, routes: Vec<PlannedRoute>) -> Solution {
    let mut stations = BTreeSet::new();
    let mut paths = Vec::with_capacity(routes.len());
    let mut max_len = 0.0f64;
    for (u, route) in routes.into_iter().enumerate() {
        stations.extend(route.reused_stations.iter().copied());
        stations.extend(route.new_stations.iter().copied());
        let mut path = vec![Waypoint::start(scenario.start_of(u))];
        path.extend(route.waypoints);
        paths.push(path);
        max_len = max_len.max(route.len_m);
    }
    let nc = stations.len();
    Solution { paths, stations, max_path_len_m: max_len, nc }
}
