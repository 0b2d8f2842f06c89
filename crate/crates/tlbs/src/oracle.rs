//! Exact ground truth for decomposable instances: permutation TSP over the
//! ROIs of each region plus linear-time greedy station placement along the
//! optimal polyline.
//!
//! Oracle stations live at continuous points on the path, so the result is a
//! lower bound on any grid-snapped solution; the comparison slightly favors
//! the oracle by construction.

use serde::{Deserialize, Serialize};

use crate::energy::Solution;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::routing::{assemble_solution, plan_route, PlanConfig};
use crate::scenario::{CellIndex, Grid, Region, Scenario};

pub const DEFAULT_TSP_CAP: usize = 12;

/// Exact solution of a (possibly multi-region) instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    /// Optimal ROI visit order per region, starting at the region start.
    pub visit_order: Vec<Vec<CellIndex>>,
    /// Continuous station points on the optimal polylines, region by region.
    pub station_points: Vec<Point>,
    /// Longest per-region path length (the makespan proxy).
    pub path_len_m: f64,
    /// Total stations over all regions (regions are disjoint; no sharing).
    pub nc: usize,
}

/// Exact minimum-length open path visiting all `rois` from `start`, found by
/// depth-first enumeration of the `(n-1)!` permutations in lexicographic
/// order (with safe partial-length pruning), ties resolved by the first
/// lexicographic minimum.
pub fn tsp_brute_force(
    grid: &Grid,
    rois: &[CellIndex],
    start: CellIndex,
) -> Result<(Vec<CellIndex>, f64)> {
    tsp_brute_force_with_cap(grid, rois, start, DEFAULT_TSP_CAP, false)
}

pub fn tsp_brute_force_with_cap(
    grid: &Grid,
    rois: &[CellIndex],
    start: CellIndex,
    cap: usize,
    closed_tour: bool,
) -> Result<(Vec<CellIndex>, f64)> {
    if rois.len() > cap {
        return Err(Error::TspTooLarge { n: rois.len(), cap });
    }
    if !rois.contains(&start) {
        return Err(Error::InvalidParam("start must be one of the ROIs".into()));
    }
    let rest: Vec<CellIndex> = rois.iter().copied().filter(|&r| r != start).collect();
    let pts: Vec<Point> = rest.iter().map(|&c| grid.center(c)).collect();
    let start_pt = grid.center(start);

    let n = rest.len();
    let mut best_len = f64::INFINITY;
    let mut best_order: Vec<usize> = (0..n).collect();
    let mut current: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];

    // Lexicographic DFS; a partial path at least as long as the incumbent
    // cannot improve, so the subtree is skipped without affecting which
    // permutation wins ties (strict improvement keeps the first minimum).
    fn dfs(
        pts: &[Point],
        start_pt: Point,
        closed: bool,
        current: &mut Vec<usize>,
        used: &mut [bool],
        partial: f64,
        last: Point,
        best_len: &mut f64,
        best_order: &mut Vec<usize>,
    ) {
        if partial >= *best_len {
            return;
        }
        if current.len() == pts.len() {
            let total = if closed { partial + last.dist(start_pt) } else { partial };
            if total < *best_len {
                *best_len = total;
                best_order.clone_from(current);
            }
            return;
        }
        for i in 0..pts.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            current.push(i);
            dfs(
                pts,
                start_pt,
                closed,
                current,
                used,
                partial + last.dist(pts[i]),
                pts[i],
                best_len,
                best_order,
            );
            current.pop();
            used[i] = false;
        }
    }
    dfs(
        &pts,
        start_pt,
        closed_tour,
        &mut current,
        &mut used,
        0.0,
        start_pt,
        &mut best_len,
        &mut best_order,
    );

    let mut order = vec![start];
    order.extend(best_order.iter().map(|&i| rest[i]));
    Ok((order, best_len))
}

/// Walk the polyline with a full battery and drop a station at the farthest
/// point reachable each time the range runs out. Linear in the polyline.
/// Returns the continuous station points in path order.
pub fn greedy_station_placement(polyline: &[Point], range_m: f64) -> Vec<Point> {
    assert!(range_m > 0.0, "range must be positive");
    let mut stations = Vec::new();
    let mut residual = range_m;
    for seg in polyline.windows(2) {
        let (mut from, to) = (seg[0], seg[1]);
        let mut seg_rem = from.dist(to);
        while seg_rem > residual {
            let station = from.along(to, residual);
            stations.push(station);
            from = station;
            seg_rem -= residual;
            residual = range_m;
        }
        residual -= seg_rem;
    }
    stations
}

fn regions_of(scenario: &Scenario) -> Result<Vec<Region>> {
    match &scenario.regions {
        Some(regions) => Ok(regions.clone()),
        None if scenario.num_uavs == 1 => {
            Ok(vec![Region { rois: scenario.rois.clone(), start: scenario.start }])
        }
        None => Err(Error::OracleRefused(format!(
            "{}-UAV scenario without region decomposition; exact search over joint \
             assignments is out of reach",
            scenario.num_uavs
        ))),
    }
}

/// Exact solve of a single-UAV or semi-random instance: per region one
/// brute-force TSP plus greedy station placement; the reported length is the
/// regional maximum and the station count the regional sum.
pub fn oracle_solve(scenario: &Scenario) -> Result<OracleSolution> {
    oracle_solve_with(scenario, DEFAULT_TSP_CAP, scenario.return_to_start)
}

pub fn oracle_solve_with(
    scenario: &Scenario,
    cap: usize,
    closed_tour: bool,
) -> Result<OracleSolution> {
    let regions = regions_of(scenario)?;
    let mut visit_order = Vec::with_capacity(regions.len());
    let mut station_points = Vec::new();
    let mut max_len = 0.0f64;
    let mut nc = 0;
    for region in &regions {
        let (order, len) =
            tsp_brute_force_with_cap(&scenario.grid, &region.rois, region.start, cap, closed_tour)?;
        let mut pts: Vec<Point> = order.iter().map(|&c| scenario.grid.center(c)).collect();
        if closed_tour {
            pts.push(scenario.grid.center(region.start));
        }
        let stations = greedy_station_placement(&pts, scenario.uav.range_m);
        nc += stations.len();
        station_points.extend(stations);
        max_len = max_len.max(len);
        visit_order.push(order);
    }
    Ok(OracleSolution { visit_order, station_points, path_len_m: max_len, nc })
}

impl OracleSolution {
    /// Project the oracle onto the grid model: follow each region's optimal
    /// order and let the greedy cell planner insert swap stops. The result is
    /// a feasible [`Solution`] (stations snapped to cells), useful for
    /// cross-checking with the validator.
    pub fn to_cell_solution(&self, scenario: &Scenario) -> Result<Solution> {
        let cfg = PlanConfig::for_scenario(scenario);
        let mut routes = Vec::with_capacity(self.visit_order.len());
        for (u, order) in self.visit_order.iter().enumerate() {
            let start = scenario.start_of(u);
            let mut targets: Vec<CellIndex> = order.iter().copied().filter(|&c| c != start).collect();
            if scenario.return_to_start {
                targets.push(start);
            }
            let route =
                plan_route(scenario, &cfg, start, &targets, &std::collections::BTreeSet::new(), None)?;
            routes.push(route);
        }
        Ok(assemble_solution(scenario, routes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::simulate;
    use crate::geom::polyline_len;
    use crate::scenario::{generate_random, generate_semi_random, Grid};

    fn km_grid() -> Grid {
        Grid::new(20, 20, 1000.0).unwrap()
    }

    #[test]
    fn two_rois_have_one_order() {
        let g = km_grid();
        let a = CellIndex::new(0, 0);
        let b = CellIndex::new(3, 4);
        let (order, len) = tsp_brute_force(&g, &[a, b], a).unwrap();
        assert_eq!(order, vec![a, b]);
        assert!((len - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn collinear_rois_sweep_monotonically() {
        let g = km_grid();
        let rois: Vec<CellIndex> = [0u32, 5, 9, 14].iter().map(|&c| CellIndex::new(2, c)).collect();
        let (order, len) = tsp_brute_force(&g, &rois, rois[0]).unwrap();
        assert_eq!(order, rois);
        assert!((len - 14_000.0).abs() < 1e-9);
    }

    /// Second, independently coded enumerator: iterative lexicographic
    /// next-permutation over index arrays, no pruning.
    fn full_enumeration(grid: &Grid, rois: &[CellIndex], start: CellIndex) -> (Vec<CellIndex>, f64) {
        let rest: Vec<CellIndex> = rois.iter().copied().filter(|&r| r != start).collect();
        let mut idx: Vec<usize> = (0..rest.len()).collect();
        let len_of = |idx: &[usize]| {
            let mut pts = vec![grid.center(start)];
            pts.extend(idx.iter().map(|&i| grid.center(rest[i])));
            polyline_len(&pts)
        };
        let mut best = idx.clone();
        let mut best_len = len_of(&idx);
        loop {
            // next_permutation in lexicographic order
            let n = idx.len();
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| idx[i] < idx[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| idx[j] > idx[i]).unwrap();
            idx.swap(i, j);
            idx[i + 1..].reverse();
            let len = len_of(&idx);
            if len < best_len {
                best_len = len;
                best = idx.clone();
            }
        }
        let mut order = vec![start];
        order.extend(best.iter().map(|&i| rest[i]));
        (order, best_len)
    }

    #[test]
    fn matches_independent_enumerator_on_random_instances() {
        for seed in 0..5u64 {
            let s = generate_random(seed, km_grid(), 8).unwrap();
            let (order, len) = tsp_brute_force(&s.grid, &s.rois, s.start).unwrap();
            let (ref_order, ref_len) = full_enumeration(&s.grid, &s.rois, s.start);
            assert!((len - ref_len).abs() < 1e-9, "seed {seed}");
            assert_eq!(order, ref_order, "seed {seed}");
        }
    }

    #[test]
    fn refuses_oversized_instances() {
        let s = generate_random(0, km_grid(), 13).unwrap();
        assert!(matches!(
            tsp_brute_force(&s.grid, &s.rois, s.start),
            Err(Error::TspTooLarge { n: 13, cap: 12 })
        ));
    }

    #[test]
    fn optimal_length_lower_bounds_random_orders() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let s = generate_random(4, km_grid(), 9).unwrap();
        let (_, opt) = tsp_brute_force(&s.grid, &s.rois, s.start).unwrap();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(99);
        let mut rest: Vec<CellIndex> = s.rois[1..].to_vec();
        for _ in 0..1000 {
            rest.shuffle(&mut rng);
            let mut pts = vec![s.grid.center(s.start)];
            pts.extend(rest.iter().map(|&c| s.grid.center(c)));
            assert!(polyline_len(&pts) >= opt - 1e-9);
        }
    }

    #[test]
    fn no_station_needed_within_range() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(3000.0, 0.0)];
        assert!(greedy_station_placement(&pts, 5000.0).is_empty());
    }

    #[test]
    fn straight_12km_needs_two_stations() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(12_000.0, 0.0)];
        let stations = greedy_station_placement(&pts, 5000.0);
        assert_eq!(stations.len(), 2);
        assert!((stations[0].x - 5000.0).abs() < 1e-9);
        assert!((stations[1].x - 10_000.0).abs() < 1e-9);
    }

    /// Discrete-walk oracle: march the polyline in small steps, dropping a
    /// station whenever the next step would exceed the residual range.
    fn station_count_by_walk(polyline: &[Point], range: f64, step: f64) -> usize {
        let mut count = 0;
        let mut residual = range;
        for seg in polyline.windows(2) {
            let d = seg[0].dist(seg[1]);
            let mut walked = 0.0;
            while walked < d {
                let s = step.min(d - walked);
                if s > residual {
                    count += 1;
                    residual = range;
                }
                residual -= s;
                walked += s;
            }
        }
        count
    }

    #[test]
    fn station_count_matches_discrete_walk() {
        for seed in 0..5u64 {
            let s = generate_random(seed, km_grid(), 10).unwrap();
            let (order, _) = tsp_brute_force(&s.grid, &s.rois, s.start).unwrap();
            let pts: Vec<Point> = order.iter().map(|&c| s.grid.center(c)).collect();
            let exact = greedy_station_placement(&pts, 5000.0).len();
            let walked = station_count_by_walk(&pts, 5000.0, 0.25);
            assert_eq!(exact, walked, "seed {seed}");
        }
    }

    #[test]
    fn greedy_arcs_are_exactly_range_except_last() {
        let s = generate_random(11, km_grid(), 10).unwrap();
        let (order, len) = tsp_brute_force(&s.grid, &s.rois, s.start).unwrap();
        let pts: Vec<Point> = order.iter().map(|&c| s.grid.center(c)).collect();
        let stations = greedy_station_placement(&pts, 5000.0);
        // Walking the polyline, consecutive swap points are exactly one full
        // range apart along the arc; only the final leg may be shorter.
        assert_eq!(stations.len(), (len / 5000.0).floor() as usize);
    }

    #[test]
    fn oracle_solve_single_uav_composes() {
        let s = generate_random(2, km_grid(), 10).unwrap();
        let sol = oracle_solve(&s).unwrap();
        assert_eq!(sol.visit_order.len(), 1);
        let (order, len) = tsp_brute_force(&s.grid, &s.rois, s.start).unwrap();
        assert_eq!(sol.visit_order[0], order);
        assert!((sol.path_len_m - len).abs() < 1e-9);
    }

    #[test]
    fn oracle_solve_semi_random_decomposes() {
        let s = generate_semi_random(21, km_grid(), 2).unwrap();
        let sol = oracle_solve(&s).unwrap();
        assert_eq!(sol.visit_order.len(), 2);
        let regions = s.regions.as_ref().unwrap();
        let mut max_len = 0.0f64;
        let mut nc = 0;
        for (i, region) in regions.iter().enumerate() {
            let (order, len) =
                tsp_brute_force(&s.grid, &region.rois, region.start).unwrap();
            assert_eq!(sol.visit_order[i], order);
            max_len = max_len.max(len);
            let pts: Vec<Point> = order.iter().map(|&c| s.grid.center(c)).collect();
            nc += greedy_station_placement(&pts, s.uav.range_m).len();
        }
        assert!((sol.path_len_m - max_len).abs() < 1e-9);
        assert_eq!(sol.nc, nc);

        let four = generate_semi_random(22, km_grid(), 4).unwrap();
        let sol4 = oracle_solve(&four).unwrap();
        assert_eq!(sol4.visit_order.len(), 4);
    }

    #[test]
    fn oracle_refuses_non_decomposable_fleets() {
        let mut s = generate_random(2, km_grid(), 10).unwrap();
        s.num_uavs = 2;
        assert!(matches!(oracle_solve(&s), Err(Error::OracleRefused(_))));
    }

    #[test]
    fn cell_projection_is_feasible() {
        for seed in 0..10u64 {
            let s = generate_random(seed, km_grid(), 10).unwrap();
            let oracle = oracle_solve(&s).unwrap();
            let sol = oracle.to_cell_solution(&s).unwrap();
            let report = simulate(&s, &sol).unwrap();
            assert!(report.passed, "seed {seed}: {:?}", report.violations);
            // Snapping can only lengthen the path.
            assert!(sol.max_path_len_m >= oracle.path_len_m - 1e-9);
        }
    }
}
