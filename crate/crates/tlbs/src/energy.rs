//! Discrete-time energy bookkeeping and full constraint validation of a
//! candidate solution.
//!
//! The validator flies each path at `v_max` along straight segments between
//! waypoint cell centers, swaps the battery in exactly one time slot at every
//! recharge stop, and checks:
//!
//! - C3: each UAV occupies exactly one grid cell at every slot boundary
//! - C4: every ROI is covered by some UAV by the time the mission ends
//! - C5: residual energy stays in (0, E_MAX] at all times
//! - C6: no UAV moves more than `slot_len * v_max` within one slot
//! - C7: a UAV lands only on cells that host a charging station
//! - C8: the solution's own bookkeeping (start cells, declared length and
//!   station count, waypoint kinds) matches what the model recomputes

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::scenario::{CellIndex, Scenario, UavConfig};

/// What a UAV does at a waypoint cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WaypointKind {
    Start,
    RoiVisit,
    Recharge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Waypoint {
    pub cell: CellIndex,
    pub kind: WaypointKind,
}

impl Waypoint {
    pub fn start(cell: CellIndex) -> Self {
        Waypoint { cell, kind: WaypointKind::Start }
    }
    pub fn roi(cell: CellIndex) -> Self {
        Waypoint { cell, kind: WaypointKind::RoiVisit }
    }
    pub fn recharge(cell: CellIndex) -> Self {
        Waypoint { cell, kind: WaypointKind::Recharge }
    }
}

/// A candidate answer to an instance: one waypoint path per UAV plus the set
/// of cells hosting charging stations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub paths: Vec<Vec<Waypoint>>,
    pub stations: BTreeSet<CellIndex>,
    pub max_path_len_m: f64,
    pub nc: usize,
}

impl Solution {
    /// Recompute the per-UAV polyline lengths from the waypoints.
    pub fn path_lengths(&self, scenario: &Scenario) -> Vec<f64> {
        self.paths
            .iter()
            .map(|path| {
                path.windows(2)
                    .map(|w| scenario.grid.center(w[0].cell).dist(scenario.grid.center(w[1].cell)))
                    .sum()
            })
            .collect()
    }
}

/// Flight mode of a UAV within one time slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UavMode {
    Flying,
    Recharging,
}

/// Continuous state of one UAV during simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavState {
    pub position_m: Point,
    pub energy: f64,
    pub mode: UavMode,
}

/// Constraint identifiers used in validation reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintId {
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: ConstraintId,
    /// Offending UAV, or `None` for fleet-level violations (coverage,
    /// solution metadata).
    pub uav: Option<usize>,
    pub slot: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
    pub t_finish_slots: u64,
}

/// Validator knobs that are not part of the formal model.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    /// Extra drain applied to every started flying slot, for sensitivity
    /// studies of hover cost. The default of 0 matches the
    /// distance-denominated energy model.
    pub hover_drain_per_slot: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { hover_drain_per_slot: 0.0 }
    }
}

/// One slot transition of the energy model: flying drains proportionally to
/// the distance covered, a landed UAV gets a fresh battery within the slot.
pub fn step_energy(prev_energy: f64, flying: bool, dist_this_slot_m: f64, cfg: &UavConfig) -> Result<f64> {
    if !flying {
        return Ok(cfg.e_max());
    }
    let next = prev_energy - cfg.fly_cost_per_m * dist_this_slot_m;
    if next <= 0.0 {
        return Err(Error::EnergyDepleted {
            residual_m: prev_energy / cfg.fly_cost_per_m,
            drain_m: dist_this_slot_m,
        });
    }
    Ok(next.min(cfg.e_max()))
}

struct UavSim<'a> {
    scenario: &'a Scenario,
    opts: SimOptions,
    uav: usize,
    violations: Vec<Violation>,
    /// Absolute mission time in seconds.
    time_s: f64,
    energy: f64,
    pos: Point,
    /// Distance flown inside the slot currently being filled.
    dist_in_slot: f64,
    slot: u64,
    depleted: bool,
}

impl<'a> UavSim<'a> {
    fn new(scenario: &'a Scenario, opts: SimOptions, uav: usize, start: Point) -> Self {
        UavSim {
            scenario,
            opts,
            uav,
            violations: Vec::new(),
            time_s: 0.0,
            energy: scenario.uav.e_max(),
            pos: start,
            dist_in_slot: 0.0,
            slot: 0,
            depleted: false,
        }
    }

    fn violate(&mut self, constraint: ConstraintId, message: String) {
        self.violations.push(Violation { constraint, uav: Some(self.uav), slot: self.slot, message });
    }

    fn slot_dist(&self) -> f64 {
        self.scenario.uav.slot_len_s * self.scenario.uav.v_max_mps
    }

    /// Energy right now, including the drain pending in the open slot.
    fn effective_energy(&self) -> f64 {
        self.energy - self.scenario.uav.fly_cost_per_m * self.dist_in_slot
    }

    /// Close the slot currently being filled and apply the energy step. A
    /// slot that ends with the UAV landing on a station may run the battery
    /// down to exactly zero: the swap happens within that slot, so the slot
    /// value recorded by the energy recurrence is already the fresh battery.
    fn commit_flying_slot(&mut self, landing: bool) {
        let dist = self.dist_in_slot;
        if dist > self.slot_dist() * (1.0 + 1e-9) {
            self.violate(ConstraintId::C6, format!("moved {dist:.3} m in one slot"));
        }
        if !self.scenario.grid.contains(self.scenario.grid.cell_at(self.pos)) {
            // cell_at clamps, so this can only trip on NaN positions.
            self.violate(ConstraintId::C3, "position is not inside exactly one cell".into());
        }
        if !self.depleted {
            let drained = self.scenario.uav.fly_cost_per_m * dist + self.opts.hover_drain_per_slot;
            let next = self.energy - drained;
            let floor = if landing { -1e-9 * self.scenario.uav.e_max() } else { 0.0 };
            if next > floor {
                self.energy = next.max(0.0);
            } else {
                self.violate(
                    ConstraintId::C5,
                    format!("energy depleted mid-flight ({:.1} m short)", drained - self.energy),
                );
                self.depleted = true;
            }
        }
        self.dist_in_slot = 0.0;
        self.slot += 1;
    }

    /// Fly `d` meters at v_max, spreading the distance over time slots.
    fn fly(&mut self, to: Point, d: f64) {
        let from = self.pos;
        let mut remaining = d;
        while remaining > 0.0 {
            let cap = self.slot_dist() - self.dist_in_slot;
            let step = remaining.min(cap);
            self.dist_in_slot += step;
            remaining -= step;
            self.time_s += step / self.scenario.uav.v_max_mps;
            if self.dist_in_slot >= self.slot_dist() - 1e-9 {
                // Position at the slot boundary, for the C3 cell attribution.
                self.pos = from.along(to, d - remaining);
                self.commit_flying_slot(false);
            }
        }
        self.pos = to;
    }

    /// Battery swap: exactly one slot on the ground.
    fn swap(&mut self) {
        if self.dist_in_slot > 0.0 {
            self.commit_flying_slot(true);
        }
        self.time_s += self.scenario.uav.slot_len_s;
        self.energy = step_energy(self.energy.max(f64::MIN_POSITIVE), false, 0.0, &self.scenario.uav)
            .expect("landed step");
        self.depleted = false;
        self.slot += 1;
    }

    /// Slot index attributed to the instant `time_s` (slot containing it).
    fn current_slot_mark(&self) -> u64 {
        (self.time_s / self.scenario.uav.slot_len_s).ceil() as u64
    }

    fn finish(&mut self) {
        if self.dist_in_slot > 0.0 {
            self.commit_flying_slot(false);
        }
    }
}

/// Validate a solution against an instance. Returns `Err` only for malformed
/// input (wrong path count, out-of-grid waypoints); every model violation is
/// reported in the `ValidationReport`.
pub fn simulate(scenario: &Scenario, solution: &Solution) -> Result<ValidationReport> {
    simulate_with(scenario, solution, SimOptions::default())
}

pub fn simulate_with(
    scenario: &Scenario,
    solution: &Solution,
    opts: SimOptions,
) -> Result<ValidationReport> {
    if solution.paths.len() != scenario.num_uavs as usize {
        return Err(Error::MalformedSolution(format!(
            "{} paths for {} UAVs",
            solution.paths.len(),
            scenario.num_uavs
        )));
    }
    for path in &solution.paths {
        for wp in path {
            if !scenario.grid.contains(wp.cell) {
                return Err(Error::OutOfGrid(
                    wp.cell.row,
                    wp.cell.col,
                    scenario.grid.rows,
                    scenario.grid.cols,
                ));
            }
        }
    }

    let mut violations = Vec::new();
    let roi_set: BTreeSet<CellIndex> = scenario.rois.iter().copied().collect();
    // First slot at which each ROI is covered by any UAV.
    let mut covered: BTreeMap<CellIndex, u64> = BTreeMap::new();
    let mut max_len = 0.0f64;

    for (u, path) in solution.paths.iter().enumerate() {
        let start_cell = scenario.start_of(u);
        covered.entry(start_cell).or_insert(0);

        let mut sim = UavSim::new(scenario, opts, u, scenario.grid.center(start_cell));

        let mut wps = path.as_slice();
        match wps.first() {
            Some(wp) if wp.kind == WaypointKind::Start => {
                if wp.cell != start_cell {
                    sim.violate(
                        ConstraintId::C8,
                        format!("path starts at ({}, {}), not the UAV start cell", wp.cell.row, wp.cell.col),
                    );
                }
                wps = &wps[1..];
            }
            _ => {}
        }

        let mut len = 0.0;
        for wp in wps {
            let target = scenario.grid.center(wp.cell);
            let d = sim.pos.dist(target);
            // Drain is linear in distance, so the energy minimum along a
            // straight leg is at arrival; checking waypoints checks the leg.
            sim.fly(target, d);
            len += d;
            // A swap stop may be reached with the battery exactly empty (the
            // landing slot already records the fresh battery); anywhere else
            // the residual must stay strictly positive.
            if !sim.depleted
                && wp.kind != WaypointKind::Recharge
                && sim.effective_energy() <= 0.0
            {
                sim.violate(ConstraintId::C5, "energy reached zero at waypoint".into());
                sim.depleted = true;
            }
            match wp.kind {
                WaypointKind::Start => {
                    sim.violate(ConstraintId::C8, "START waypoint after the first position".into());
                }
                WaypointKind::RoiVisit => {
                    if roi_set.contains(&wp.cell) {
                        let at = sim.current_slot_mark();
                        covered.entry(wp.cell).and_modify(|s| *s = (*s).min(at)).or_insert(at);
                    } else {
                        sim.violate(
                            ConstraintId::C8,
                            format!("ROI_VISIT at ({}, {}) which is not a ROI", wp.cell.row, wp.cell.col),
                        );
                    }
                }
                WaypointKind::Recharge => {
                    if !solution.stations.contains(&wp.cell) {
                        sim.violate(
                            ConstraintId::C7,
                            format!("landed on ({}, {}) without a charging station", wp.cell.row, wp.cell.col),
                        );
                    }
                    sim.swap();
                }
            }
        }
        sim.finish();
        violations.append(&mut sim.violations);
        max_len = max_len.max(len);
    }

    for roi in &roi_set {
        if !covered.contains_key(roi) {
            violations.push(Violation {
                constraint: ConstraintId::C4,
                uav: None,
                slot: 0,
                message: format!("ROI ({}, {}) never covered", roi.row, roi.col),
            });
        }
    }
    let t_finish_slots = roi_set.iter().filter_map(|r| covered.get(r)).copied().max().unwrap_or(0);

    // C8 bookkeeping of the solution's own metadata.
    if (solution.max_path_len_m - max_len).abs() > 1e-6 * max_len.max(1.0) {
        violations.push(Violation {
            constraint: ConstraintId::C8,
            uav: None,
            slot: 0,
            message: format!(
                "declared max_path_len_m {} but recomputed {}",
                solution.max_path_len_m, max_len
            ),
        });
    }
    if solution.nc != solution.stations.len() {
        violations.push(Violation {
            constraint: ConstraintId::C8,
            uav: None,
            slot: 0,
            message: format!("declared nc {} but {} station cells", solution.nc, solution.stations.len()),
        });
    }

    Ok(ValidationReport { passed: violations.is_empty(), violations, t_finish_slots })
}
