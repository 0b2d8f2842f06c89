//! Constrained 2-OPT path correction.
//!
//! Per UAV, pairs of edges of the ROI visit order are uncrossed by segment
//! reversal. Each candidate order is re-planned with the greedy station
//! placer before it is judged, and a move is accepted only when that UAV's
//! path becomes strictly shorter, no other UAV is touched, and the global
//! station count does not grow.

use std::collections::BTreeSet;

use crate::energy::{Solution, Waypoint, WaypointKind};
use crate::error::Result;
use crate::hull::HullFilter;
use crate::routing::{optimize_stations, plan_route, ChainObjective, PlanConfig};
use crate::scenario::{CellIndex, Scenario};

/// ROI visit order of one path, excluding the leading start.
fn visit_order(path: &[Waypoint]) -> Vec<CellIndex> {
    path.iter().filter(|wp| wp.kind == WaypointKind::RoiVisit).map(|wp| wp.cell).collect()
}

fn path_len(scenario: &Scenario, path: &[Waypoint]) -> f64 {
    path.windows(2)
        .map(|w| scenario.grid.center(w[0].cell).dist(scenario.grid.center(w[1].cell)))
        .sum()
}

fn recharge_cells(path: &[Waypoint]) -> BTreeSet<CellIndex> {
    path.iter().filter(|wp| wp.kind == WaypointKind::Recharge).map(|wp| wp.cell).collect()
}

/// Apply constrained 2-OPT to every UAV path in turn, first-improvement in
/// lexicographic edge order, until no move is accepted. Returns the input
/// unchanged when nothing improves.
pub fn two_opt(
    scenario: &Scenario,
    solution: &Solution,
    plan_cfg: &PlanConfig,
    hull: Option<&HullFilter>,
) -> Result<Solution> {
    let mut paths = solution.paths.clone();
    let mut lengths: Vec<f64> = paths.iter().map(|p| path_len(scenario, p)).collect();
    let mut nc_total = solution.stations.len();

    for u in 0..paths.len() {
        let start = scenario.start_of(u);
        let mut order = visit_order(&paths[u]);
        // With a forced return the trailing start visit stays pinned.
        let movable = order.len().saturating_sub(scenario.return_to_start as usize);
        if movable < 2 {
            continue;
        }

        // Stations the other UAVs rely on; this UAV's own stops are re-derived.
        let fixed: BTreeSet<CellIndex> = paths
            .iter()
            .enumerate()
            .filter(|(v, _)| *v != u)
            .flat_map(|(_, p)| recharge_cells(p))
            .collect();

        let point_of = |c: CellIndex| scenario.grid.center(c);
        let mut improved = true;
        while improved {
            improved = false;
            // Raw visit-order length, for the sound lower-bound prune below.
            let mut order_len = point_of(start).dist(point_of(order[0]));
            order_len += order.windows(2).map(|w| point_of(w[0]).dist(point_of(w[1]))).sum::<f64>();

            'scan: for i in 0..movable - 1 {
                for j in i + 1..movable {
                    // O(1) length delta of reversing order[i..=j].
                    let prev = if i == 0 { start } else { order[i - 1] };
                    let mut delta = point_of(prev).dist(point_of(order[j]))
                        - point_of(prev).dist(point_of(order[i]));
                    if j + 1 < order.len() {
                        delta += point_of(order[i]).dist(point_of(order[j + 1]))
                            - point_of(order[j]).dist(point_of(order[j + 1]));
                    }
                    // A replanned path is never shorter than its raw order
                    // (detours only add length), so this candidate cannot win.
                    if order_len + delta >= lengths[u] - 1e-9 {
                        continue;
                    }

                    let mut candidate = order.clone();
                    candidate[i..=j].reverse();
                    let route = plan_route(scenario, plan_cfg, start, &candidate, &fixed, hull)?;
                    let nc_after = fixed.union(&route.new_stations).count();
                    if route.len_m < lengths[u] - 1e-9 && nc_after <= nc_total {
                        let mut path = vec![Waypoint::start(start)];
                        path.extend(route.waypoints);
                        paths[u] = path;
                        lengths[u] = route.len_m;
                        nc_total = nc_after;
                        order = candidate;
                        improved = true;
                        break 'scan;
                    }
                }
            }
        }
    }

    let stations: BTreeSet<CellIndex> = paths.iter().flat_map(|p| recharge_cells(p)).collect();
    let max_len = lengths.iter().copied().fold(0.0f64, f64::max);
    let nc = stations.len();
    Ok(Solution { paths, stations, max_path_len_m: max_len, nc })
}

/// Re-derive every UAV's swap stops with the exact per-leg placement,
/// keeping the visit orders. Accepted per UAV only when its length does not
/// grow and the global station count does not grow, so the result never
/// ranks worse than the input.
pub fn reoptimize_stations(
    scenario: &Scenario,
    solution: &Solution,
    plan_cfg: &PlanConfig,
    hull: Option<&HullFilter>,
) -> Result<Solution> {
    let mut paths = solution.paths.clone();
    let mut lengths: Vec<f64> = paths.iter().map(|p| path_len(scenario, p)).collect();
    let mut nc_total = solution.stations.len();

    for u in 0..paths.len() {
        let order = visit_order(&paths[u]);
        if order.is_empty() {
            continue;
        }
        let start = scenario.start_of(u);
        let fixed: BTreeSet<CellIndex> = paths
            .iter()
            .enumerate()
            .filter(|(v, _)| *v != u)
            .flat_map(|(_, p)| recharge_cells(p))
            .collect();
        // Fewest stations wins when it costs no length; otherwise settle for
        // the shortest chain that does not add stations.
        for objective in [ChainObjective::StationsFirst, ChainObjective::LengthFirst] {
            let route = optimize_stations(scenario, plan_cfg, start, &order, &fixed, hull, objective)?;
            let nc_after = fixed.union(&route.new_stations).count();
            if route.len_m <= lengths[u] + 1e-9 && nc_after <= nc_total {
                let mut path = vec![Waypoint::start(start)];
                path.extend(route.waypoints);
                paths[u] = path;
                lengths[u] = route.len_m;
                nc_total = nc_after;
                break;
            }
        }
    }

    let stations: BTreeSet<CellIndex> = paths.iter().flat_map(|p| recharge_cells(p)).collect();
    let max_len = lengths.iter().copied().fold(0.0f64, f64::max);
    let nc = stations.len();
    Ok(Solution { paths, stations, max_path_len_m: max_len, nc })
}
