//! The ACO construction loop: probabilistic path selection over unvisited
//! ROIs, charging-mode cell selection that prefers long hops, round-robin
//! multi-UAV construction, and the solve loop combining evaporation,
//! min-max/station-count reinforcement, optional hull reduction and optional
//! 2-OPT path correction.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{Solution, Waypoint};
use crate::error::{Error, Result};
use crate::hull::HullFilter;
use crate::pheromone::{path_edges, PheromoneMatrix};
use crate::routing::PlanConfig;
use crate::scenario::{CellIndex, Scenario};
use crate::two_opt::two_opt;

/// Solver knobs. Every field has a default so partial config files work;
/// `q1`/`q2` left unset are filled by the iterative tuner before the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Pheromone influence exponent.
    pub alpha: f64,
    /// Distance-heuristic influence exponent.
    pub beta: f64,
    /// Trail update rate in (0, 1).
    pub rho: f64,
    /// Initial pheromone intensity.
    pub tau0: f64,
    /// Reinforcement weight on 1/max-path-length; `None` requests tuning.
    pub q1: Option<f64>,
    /// Reinforcement weight on 1/NC; `None` requests tuning.
    pub q2: Option<f64>,
    pub max_iterations: usize,
    pub seed: u64,
    /// Residual-energy safety margin required after a ROI leg; `None` derives
    /// one cell size of range.
    pub e_threshold: Option<f64>,
    pub use_hull_reduction: bool,
    pub use_two_opt: bool,
    /// Sample ROI targets from the selection distribution instead of taking
    /// the argmax (ablation knob; the default follows the highest probability).
    pub roulette_rois: bool,
    /// Sample the charging cell from the selection weights instead of taking
    /// the argmax. Sampling is the default: a frozen argmax can ping-pong
    /// between two rim cells forever within one iteration.
    pub charging_roulette: bool,
    /// Score multiplier for charging candidates that already host a station.
    pub station_reuse_bonus: f64,
    /// Iterations per tuning round when `q1`/`q2` are unset.
    pub tuning_warmup_iters: usize,
    /// Tuning rounds when `q1`/`q2` are unset.
    pub tuning_rounds: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            alpha: 2.0,
            beta: 2.0,
            rho: 0.3,
            tau0: 1.0,
            q1: None,
            q2: None,
            max_iterations: 30_000,
            seed: 0,
            e_threshold: None,
            use_hull_reduction: true,
            use_two_opt: true,
            roulette_rois: false,
            charging_roulette: true,
            station_reuse_bonus: 1.5,
            tuning_warmup_iters: 1_000,
            tuning_rounds: 2,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !(self.beta > 0.0) {
            return Err(Error::InvalidParam("alpha and beta must be > 0".into()));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidParam("rho must lie in (0, 1)".into()));
        }
        if !(self.tau0 > 0.0) {
            return Err(Error::InvalidParam("tau0 must be > 0".into()));
        }
        if let Some(q1) = self.q1 {
            if !(q1 > 0.0) {
                return Err(Error::InvalidParam("q1 must be > 0".into()));
            }
        }
        if let Some(q2) = self.q2 {
            if !(q2 >= 0.0) {
                return Err(Error::InvalidParam("q2 must be >= 0".into()));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParam("max_iterations must be >= 1".into()));
        }
        if let Some(e) = self.e_threshold {
            if !(e >= 0.0) {
                return Err(Error::InvalidParam("e_threshold must be >= 0".into()));
            }
        }
        if !(self.station_reuse_bonus > 0.0) {
            return Err(Error::InvalidParam("station_reuse_bonus must be > 0".into()));
        }
        if self.tuning_warmup_iters == 0 || self.tuning_rounds == 0 {
            return Err(Error::InvalidParam("tuning warmup and rounds must be >= 1".into()));
        }
        Ok(())
    }

    /// Energy margin kept in reserve on ROI legs: one cell of range unless
    /// overridden. A UAV arriving with this margin can always reach a
    /// neighbouring cell (or swap in place), so it never strands at zero.
    pub fn e_threshold_for(&self, scenario: &Scenario) -> f64 {
        self.e_threshold.unwrap_or(scenario.uav.fly_cost_per_m * scenario.grid.cell_size_m)
    }

    /// Planner setup for 2-OPT re-placement and return legs. The planner
    /// imitates the farthest-point rule, so it keeps only a hair-trigger
    /// arrival margin instead of the construction threshold.
    pub fn plan_config(&self, scenario: &Scenario) -> PlanConfig {
        PlanConfig {
            e_threshold: scenario.uav.fly_cost_per_m * crate::routing::PLAN_MARGIN_M,
            reuse_bonus: self.station_reuse_bonus,
        }
    }
}

fn powf_fast(x: f64, e: f64) -> f64 {
    if e == 2.0 {
        x * x
    } else if e == 1.0 {
        x
    } else {
        x.powf(e)
    }
}

/// Selection probability of one unvisited ROI from the current cell:
/// `tau^alpha * eta^beta` normalized over the unvisited set, with `eta` the
/// inverse center distance. Candidates outside the unvisited set score 0.
pub fn roi_selection_prob(
    scenario: &Scenario,
    current: CellIndex,
    candidate: CellIndex,
    r_visit: &[CellIndex],
    tau: &PheromoneMatrix,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if r_visit.is_empty() {
        return Err(Error::InvalidParam("r_visit is empty".into()));
    }
    if !r_visit.contains(&candidate) {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut cand_score = 0.0;
    for &r in r_visit {
        let d = crate::scenario::dist(&scenario.grid, current, r)?;
        if d == 0.0 {
            return Err(Error::InvalidParam(
                "current cell is itself an unvisited ROI; visit it before selecting".into(),
            ));
        }
        let score = powf_fast(tau.get(current, r), alpha) * powf_fast(1.0 / d, beta);
        total += score;
        if r == candidate {
            cand_score = score;
        }
    }
    Ok(cand_score / total)
}

/// Pick the next ROI: the highest-probability candidate, ties broken by ROI
/// insertion order. With `roulette_rois` the candidate is sampled instead.
pub fn select_next_roi(
    scenario: &Scenario,
    current: CellIndex,
    r_visit: &[CellIndex],
    tau: &PheromoneMatrix,
    params: &SolverParams,
    rng: &mut ChaCha20Rng,
) -> Result<CellIndex> {
    if r_visit.is_empty() {
        return Err(Error::InvalidParam("r_visit is empty".into()));
    }
    let mut scores = Vec::with_capacity(r_visit.len());
    for &r in r_visit {
        let d = crate::scenario::dist(&scenario.grid, current, r)?;
        if d == 0.0 {
            return Err(Error::InvalidParam("zero-distance ROI must be visited in place".into()));
        }
        scores.push(powf_fast(tau.get(current, r), params.alpha) * powf_fast(1.0 / d, params.beta));
    }
    if params.roulette_rois {
        let total: f64 = scores.iter().sum();
        if total > 0.0 {
            let mut pick = rng.gen::<f64>() * total;
            for (i, s) in scores.iter().enumerate() {
                pick -= s;
                if pick <= 0.0 {
                    return Ok(r_visit[i]);
                }
            }
        }
        return Ok(*r_visit.last().expect("non-empty"));
    }
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    Ok(r_visit[best])
}

/// Cells reachable with the residual energy: `gamma * dist <= residual`,
/// optionally restricted to the hull member cells, always keeping existing
/// stations in range and the current cell.
pub fn reachable_cells(
    scenario: &Scenario,
    current: CellIndex,
    residual: f64,
    hull: Option<&HullFilter>,
    stations: &BTreeSet<CellIndex>,
) -> Result<Vec<CellIndex>> {
    if !(residual > 0.0) {
        return Err(Error::InvalidParam("residual energy must be > 0".into()));
    }
    let grid = &scenario.grid;
    let gamma = scenario.uav.fly_cost_per_m;
    let cur_pt = grid.center(current);
    let within = |cell: CellIndex| gamma * cur_pt.dist(grid.center(cell)) <= residual;

    let mut cells: Vec<CellIndex> = match hull {
        Some(h) => h.member_cells().iter().copied().filter(|&c| within(c)).collect(),
        None => grid.iter_cells().filter(|&c| within(c)).collect(),
    };
    for &s in stations {
        if within(s) && hull.map_or(false, |h| !h.contains_cell(s)) {
            cells.push(s);
        }
    }
    if !cells.contains(&current) {
        cells.push(current);
    }
    cells.sort();
    cells.dedup();
    if cells.is_empty() {
        return Err(Error::NoReachableCell { from: current, residual_m: residual / gamma });
    }
    Ok(cells)
}

fn charging_score(
    scenario: &Scenario,
    current: CellIndex,
    cell: CellIndex,
    tau: &PheromoneMatrix,
    params: &SolverParams,
    stations: &BTreeSet<CellIndex>,
) -> f64 {
    let d = scenario.grid.center(current).dist(scenario.grid.center(cell));
    let bonus = if stations.contains(&cell) { params.station_reuse_bonus } else { 1.0 };
    powf_fast(tau.get(current, cell), params.alpha) * powf_fast(d, params.beta) * bonus
}

/// Deterministic charging-cell choice: argmax of `tau^alpha * dist^beta`
/// (long hops preferred), existing stations boosted by the reuse bonus, ties
/// broken row-major. `candidates` must be non-empty.
pub fn select_charging_cell(
    scenario: &Scenario,
    current: CellIndex,
    candidates: &[CellIndex],
    tau: &PheromoneMatrix,
    params: &SolverParams,
    stations: &BTreeSet<CellIndex>,
) -> Result<CellIndex> {
    if candidates.is_empty() {
        return Err(Error::InvalidParam("no charging candidates".into()));
    }
    let mut best = candidates[0];
    let mut best_score = charging_score(scenario, current, best, tau, params, stations);
    for &cell in &candidates[1..] {
        let score = charging_score(scenario, current, cell, tau, params, stations);
        if score > best_score {
            best = cell;
            best_score = score;
        }
    }
    Ok(best)
}

/// Fused charging-candidate scan: enumerate the bounding box of the residual
/// range disk, apply the hull mask, and collect `(cell, weight)` per
/// candidate.
fn scan_charging_candidates(
    scenario: &Scenario,
    current: CellIndex,
    residual: f64,
    tau: &PheromoneMatrix,
    params: &SolverParams,
    stations: &BTreeSet<CellIndex>,
    hull: Option<&HullFilter>,
    buf: &mut Vec<(CellIndex, f64)>,
) {
    buf.clear();
    let grid = &scenario.grid;
    let gamma = scenario.uav.fly_cost_per_m;
    let cur_pt = grid.center(current);
    let radius_cells = (residual / (gamma * grid.cell_size_m)).ceil() as u32 + 1;
    let r0 = current.row.saturating_sub(radius_cells);
    let r1 = (current.row + radius_cells).min(grid.rows - 1);
    let c0 = current.col.saturating_sub(radius_cells);
    let c1 = (current.col + radius_cells).min(grid.cols - 1);

    for r in r0..=r1 {
        for c in c0..=c1 {
            let cell = CellIndex::new(r, c);
            let is_station = stations.contains(&cell);
            if let Some(h) = hull {
                if !h.contains_cell(cell) && !is_station && cell != current {
                    continue;
                }
            }
            let drain = gamma * cur_pt.dist(grid.center(cell));
            if drain > residual {
                continue;
            }
            // Arrival at a swap cell with an exactly empty battery is fine:
            // the landing slot records the fresh battery.
            let w = charging_score(scenario, current, cell, tau, params, stations);
            buf.push((cell, w));
        }
    }
}

fn sample_from_candidates(
    candidates: &[(CellIndex, f64)],
    current: CellIndex,
    rng: &mut ChaCha20Rng,
) -> CellIndex {
    let total: f64 = candidates.iter().map(|(_, w)| w).sum();
    if total > 0.0 {
        let mut pick = rng.gen::<f64>() * total;
        for (cell, w) in candidates {
            pick -= w;
            if pick <= 0.0 && *w > 0.0 {
                return *cell;
            }
        }
        if let Some((cell, _)) = candidates.iter().rev().find(|(_, w)| *w > 0.0) {
            return *cell;
        }
    }
    current
}

/// Mutable colony snapshot produced by one construction pass.
#[derive(Debug, Clone)]
pub struct ColonyState {
    /// ROIs still unvisited (empty after a completed construction).
    pub r_visit: Vec<CellIndex>,
    pub uav_cells: Vec<CellIndex>,
    pub uav_energy: Vec<f64>,
    pub stations: BTreeSet<CellIndex>,
    pub nc: usize,
}

const CONSTRUCTION_STEP_CAP: usize = 100_000;

/// One full Algorithm-style construction pass: UAVs take turns picking a ROI
/// target; a target in safe reach is visited, otherwise the UAV detours to a
/// charging cell, swaps its battery and retries on its next turn.
pub fn construct_iteration(
    scenario: &Scenario,
    tau: &PheromoneMatrix,
    params: &SolverParams,
    rng: &mut ChaCha20Rng,
) -> Result<(Solution, ColonyState)> {
    let hull = if params.use_hull_reduction { Some(HullFilter::from_rois(scenario)?) } else { None };
    construct_with(scenario, tau, params, rng, hull.as_ref())
}

pub(crate) fn construct_with(
    scenario: &Scenario,
    tau: &PheromoneMatrix,
    params: &SolverParams,
    rng: &mut ChaCha20Rng,
    hull: Option<&HullFilter>,
) -> Result<(Solution, ColonyState)> {
    let grid = &scenario.grid;
    let gamma = scenario.uav.fly_cost_per_m;
    let e_max = scenario.uav.e_max();
    let eth = params.e_threshold_for(scenario);
    let n_uavs = scenario.num_uavs as usize;

    let starts: Vec<CellIndex> = (0..n_uavs).map(|u| scenario.start_of(u)).collect();
    let mut cur = starts.clone();
    let mut energy = vec![e_max; n_uavs];
    let mut paths: Vec<Vec<Waypoint>> =
        starts.iter().map(|&s| vec![Waypoint::start(s)]).collect();

    // The cell a UAV starts on is covered from slot zero.
    let mut visited = vec![false; scenario.rois.len()];
    for (i, roi) in scenario.rois.iter().enumerate() {
        if starts.contains(roi) {
            visited[i] = true;
        }
    }
    let mut remaining = visited.iter().filter(|v| !**v).count();

    let mut stations: BTreeSet<CellIndex> = BTreeSet::new();
    let mut steps = 0usize;
    let mut cand_buf: Vec<(CellIndex, f64)> = Vec::new();
    // Set when a whole pass yielded: the next pass must act to guarantee
    // progress.
    let mut force_pass = false;

    while remaining > 0 {
        let mut moved = false;
        for u in 0..n_uavs {
            if remaining == 0 {
                break;
            }
            steps += 1;
            if steps > CONSTRUCTION_STEP_CAP {
                return Err(Error::ConstructionStalled(steps));
            }

            // Standing on an unvisited ROI covers it outright.
            if let Some(i) = scenario.rois.iter().position(|&r| r == cur[u]) {
                if !visited[i] {
                    visited[i] = true;
                    remaining -= 1;
                    paths[u].push(Waypoint::roi(cur[u]));
                    moved = true;
                    continue;
                }
            }

            let r_visit: Vec<CellIndex> = scenario
                .rois
                .iter()
                .zip(&visited)
                .filter(|(_, v)| !**v)
                .map(|(r, _)| *r)
                .collect();
            let target = select_next_roi(scenario, cur[u], &r_visit, tau, params, rng)?;
            let d = grid.center(cur[u]).dist(grid.center(target));
            let drain = gamma * d;

            if drain <= energy[u] - eth && drain < energy[u] {
                energy[u] -= drain;
                cur[u] = target;
                paths[u].push(Waypoint::roi(target));
                let i = scenario.rois.iter().position(|&r| r == target).expect("target is a ROI");
                visited[i] = true;
                remaining -= 1;
                moved = true;
            } else {
                // Starting a charging detour toward a ROI some other UAV can
                // finish more cheaply just burns stations on a lost race;
                // yield the turn unless the previous pass stalled entirely.
                if !force_pass {
                    let closer_peer = (0..n_uavs).any(|w| {
                        w != u && grid.center(cur[w]).dist(grid.center(target)) < d - 1e-9
                    });
                    if closer_peer {
                        continue;
                    }
                }
                scan_charging_candidates(
                    scenario, cur[u], energy[u], tau, params, &stations, hull, &mut cand_buf,
                );
                let cell = if cand_buf.is_empty() {
                    return Err(Error::NoReachableCell {
                        from: cur[u],
                        residual_m: energy[u] / gamma,
                    });
                } else if params.charging_roulette {
                    sample_from_candidates(&cand_buf, cur[u], rng)
                } else {
                    let cells: Vec<CellIndex> = cand_buf.iter().map(|(c, _)| *c).collect();
                    select_charging_cell(scenario, cur[u], &cells, tau, params, &stations)?
                };
                cur[u] = cell;
                paths[u].push(Waypoint::recharge(cell));
                stations.insert(cell);
                energy[u] = e_max;
                moved = true;
            }
        }
        force_pass = remaining > 0 && !moved;
    }

    if scenario.return_to_start {
        let plan_cfg = params.plan_config(scenario);
        for u in 0..n_uavs {
            if cur[u] == starts[u] {
                continue;
            }
            let route = crate::routing::plan_route(
                scenario,
                &plan_cfg,
                cur[u],
                &[starts[u]],
                &stations,
                hull,
            )?;
            for wp in route.waypoints {
                paths[u].push(wp);
            }
            stations.extend(route.new_stations);
            cur[u] = starts[u];
        }
    }

    let mut max_len = 0.0f64;
    for path in &paths {
        let len: f64 = path
            .windows(2)
            .map(|w| grid.center(w[0].cell).dist(grid.center(w[1].cell)))
            .sum();
        max_len = max_len.max(len);
    }

    let nc = stations.len();
    let solution =
        Solution { paths, stations: stations.clone(), max_path_len_m: max_len, nc };
    let state = ColonyState { r_visit: Vec::new(), uav_cells: cur, uav_energy: energy, stations, nc };
    Ok((solution, state))
}

/// Lexicographic ranking used to track the best solution across iterations:
/// primary max path length, secondary station count.
pub fn better_solution(candidate: &Solution, incumbent: &Solution) -> bool {
    (candidate.max_path_len_m, candidate.nc) < (incumbent.max_path_len_m, incumbent.nc)
}

/// Run the full solver. `q1`/`q2` left unset are filled by the iterative
/// tuner first. Deterministic for a fixed seed.
pub fn solve(scenario: &Scenario, params: &SolverParams) -> Result<Solution> {
    solve_observed(scenario, params, |_, _, _| {})
}

/// As [`solve`], invoking `observer(iteration, current, best)` after every
/// iteration (iteration is 1-based).
pub fn solve_observed(
    scenario: &Scenario,
    params: &SolverParams,
    mut observer: impl FnMut(usize, &Solution, &Solution),
) -> Result<Solution> {
    scenario.validate()?;
    params.validate()?;

    let params = if params.q1.is_none() || params.q2.is_none() {
        let (q1, q2) = crate::tuning::tune_parameters(
            scenario,
            params,
            params.q1.unwrap_or(1.0),
            params.q2.unwrap_or(1.0),
            params.tuning_warmup_iters,
            params.tuning_rounds,
        )?;
        SolverParams { q1: Some(q1), q2: Some(q2), ..*params }
    } else {
        *params
    };
    let q1 = params.q1.expect("resolved");
    let q2 = params.q2.expect("resolved");

    let hull = if params.use_hull_reduction { Some(HullFilter::from_rois(scenario)?) } else { None };
    let plan_cfg = params.plan_config(scenario);
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    let mut tau = PheromoneMatrix::new(params.tau0);
    let mut best: Option<Solution> = None;

    for iteration in 1..=params.max_iterations {
        let (mut solution, _) = construct_with(scenario, &tau, &params, &mut rng, hull.as_ref())?;
        if params.use_two_opt {
            solution = two_opt(scenario, &solution, &plan_cfg, hull.as_ref())?;
        }

        let cell_paths: Vec<Vec<CellIndex>> = solution
            .paths
            .iter()
            .map(|p| p.iter().map(|wp| wp.cell).collect())
            .collect();
        let used = path_edges(cell_paths.iter().map(|p| p.as_slice()));
        tau.evaporate(&used, params.rho);
        tau.reinforce(&used, params.rho, q1, q2, solution.max_path_len_m, solution.nc);

        let is_better = best.as_ref().map_or(true, |b| better_solution(&solution, b));
        if is_better {
            // Keep the incumbent with the best station placement its visit
            // orders admit; the exact placer never ranks a solution worse.
            let polished =
                crate::two_opt::reoptimize_stations(scenario, &solution, &plan_cfg, hull.as_ref())?;
            best = Some(polished);
        }
        observer(iteration, &solution, best.as_ref().expect("set above"));
    }

    Ok(best.expect("max_iterations >= 1"))
}
