//! Problem-instance model: grid geometry, ROIs, UAV configuration and the
//! seeded random / semi-random instance generators.
//!
//! All distances are meters. Energy is denominated in meters of remaining
//! flight range scaled by `fly_cost_per_m`, so with the default cost of
//! 1 energy/m the residual energy of a UAV equals its residual range.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

/// Row/column address of one square cell of the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct CellIndex {
    pub row: u32,
    pub col: u32,
}

impl CellIndex {
    pub fn new(row: u32, col: u32) -> Self {
        CellIndex { row, col }
    }
}

impl From<(u32, u32)> for CellIndex {
    fn from((row, col): (u32, u32)) -> Self {
        CellIndex { row, col }
    }
}

impl From<CellIndex> for (u32, u32) {
    fn from(c: CellIndex) -> Self {
        (c.row, c.col)
    }
}

/// The discretized field: `rows` x `cols` square cells of `cell_size_m` side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub rows: u32,
    pub cols: u32,
    pub cell_size_m: f64,
}

impl Grid {
    pub fn new(rows: u32, cols: u32, cell_size_m: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidScenario("grid must have rows > 0 and cols > 0".into()));
        }
        if !(cell_size_m > 0.0) {
            return Err(Error::InvalidScenario("cell_size_m must be > 0".into()));
        }
        Ok(Grid { rows, cols, cell_size_m })
    }

    /// Number of cells in the field.
    pub fn num_cells(&self) -> usize {
        self.rows as usize * self.cols as usize
    }

    pub fn contains(&self, c: CellIndex) -> bool {
        c.row < self.rows && c.col < self.cols
    }

    /// Center of a cell in field coordinates (x east along columns, y south
    /// along rows).
    pub fn center(&self, c: CellIndex) -> Point {
        Point::new(
            (c.col as f64 + 0.5) * self.cell_size_m,
            (c.row as f64 + 0.5) * self.cell_size_m,
        )
    }

    /// Cell containing an arbitrary field point, clamped to the grid edge.
    pub fn cell_at(&self, p: Point) -> CellIndex {
        let col = (p.x / self.cell_size_m).floor().clamp(0.0, (self.cols - 1) as f64);
        let row = (p.y / self.cell_size_m).floor().clamp(0.0, (self.rows - 1) as f64);
        CellIndex::new(row as u32, col as u32)
    }

    /// Cells in row-major order.
    pub fn iter_cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| CellIndex::new(r, c)))
    }

    pub fn cell_diagonal_m(&self) -> f64 {
        self.cell_size_m * std::f64::consts::SQRT_2
    }
}

/// Euclidean distance between two cell centers.
pub fn dist(grid: &Grid, a: CellIndex, b: CellIndex) -> Result<f64> {
    for c in [a, b] {
        if !grid.contains(c) {
            return Err(Error::OutOfGrid(c.row, c.col, grid.rows, grid.cols));
        }
    }
    Ok(grid.center(a).dist(grid.center(b)))
}

/// Homogeneous fleet configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UavConfig {
    /// Distance flyable on a full battery (the distance-denominated battery capacity).
    pub range_m: f64,
    pub v_max_mps: f64,
    pub slot_len_s: f64,
    pub altitude_m: f64,
    pub cone_angle_rad: f64,
    /// Energy drained per meter flown. 1.0 makes energy read as meters of range.
    pub fly_cost_per_m: f64,
}

impl Default for UavConfig {
    fn default() -> Self {
        UavConfig {
            range_m: 5_000.0,
            v_max_mps: 15.0,
            slot_len_s: 60.0,
            altitude_m: 500.0,
            cone_angle_rad: 2.0,
            fly_cost_per_m: 1.0,
        }
    }
}

impl UavConfig {
    /// Full-battery energy, i.e. the drain of flying `range_m`.
    pub fn e_max(&self) -> f64 {
        self.range_m * self.fly_cost_per_m
    }

    /// Radius of the ground disk covered by the sensing cone.
    pub fn sensing_radius_m(&self) -> f64 {
        self.altitude_m * (self.cone_angle_rad / 2.0).tan()
    }

    fn validate(&self) -> Result<()> {
        if !(self.range_m > 0.0) {
            return Err(Error::InvalidParam("range_m must be > 0".into()));
        }
        if !(self.v_max_mps > 0.0) {
            return Err(Error::InvalidParam("v_max_mps must be > 0".into()));
        }
        if !(self.slot_len_s > 0.0) {
            return Err(Error::InvalidParam("slot_len_s must be > 0".into()));
        }
        if !(self.altitude_m >= 0.0) {
            return Err(Error::InvalidParam("altitude_m must be >= 0".into()));
        }
        if !(self.cone_angle_rad > 0.0 && self.cone_angle_rad < std::f64::consts::PI) {
            return Err(Error::InvalidParam("cone_angle_rad must lie in (0, pi)".into()));
        }
        if !(self.fly_cost_per_m > 0.0) {
            return Err(Error::InvalidParam("fly_cost_per_m must be > 0".into()));
        }
        Ok(())
    }
}

/// Ground coverage area of the sensing cone from altitude `H`:
/// `pi * (H * tan(theta/2))^2`.
pub fn sensing_coverage(cfg: &UavConfig) -> Result<f64> {
    if !(cfg.cone_angle_rad > 0.0 && cfg.cone_angle_rad < std::f64::consts::PI) {
        return Err(Error::InvalidParam(format!(
            "cone angle {} rad outside (0, pi)",
            cfg.cone_angle_rad
        )));
    }
    let r = cfg.sensing_radius_m();
    Ok(std::f64::consts::PI * r * r)
}

/// One decomposable region of a semi-random instance: its ROIs and the ROI
/// the region's UAV starts from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub rois: Vec<CellIndex>,
    pub start: CellIndex,
}

/// A full problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub grid: Grid,
    pub rois: Vec<CellIndex>,
    pub start: CellIndex,
    pub num_uavs: u32,
    pub uav: UavConfig,
    /// Present only on semi-random instances; one region per UAV, in UAV
    /// order. The solver uses only the per-region starts, never the ROI
    /// split; the exact oracle needs the split to stay tractable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<Vec<Region>>,
    /// When set, every UAV must end its mission back on its start cell.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub return_to_start: bool,
}

impl Scenario {
    pub fn new(
        grid: Grid,
        rois: Vec<CellIndex>,
        start: CellIndex,
        num_uavs: u32,
        uav: UavConfig,
    ) -> Result<Self> {
        let s = Scenario { grid, rois, start, num_uavs, uav, regions: None, return_to_start: false };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.uav.validate()?;
        if self.num_uavs == 0 {
            return Err(Error::InvalidScenario("num_uavs must be >= 1".into()));
        }
        if self.rois.is_empty() {
            return Err(Error::InvalidScenario("at least one ROI is required".into()));
        }
        for &r in &self.rois {
            if !self.grid.contains(r) {
                return Err(Error::OutOfGrid(r.row, r.col, self.grid.rows, self.grid.cols));
            }
        }
        let mut sorted = self.rois.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.rois.len() {
            return Err(Error::InvalidScenario("ROIs must be distinct".into()));
        }
        if !self.rois.contains(&self.start) {
            return Err(Error::InvalidScenario("start cell must be one of the ROIs".into()));
        }
        // A battery must at least bridge two diagonal neighbours, otherwise no
        // chain of swap stations can connect distant ROIs.
        if self.uav.range_m <= self.grid.cell_diagonal_m() {
            return Err(Error::InvalidScenario(format!(
                "range_m {} must exceed the cell diagonal {:.1}",
                self.uav.range_m,
                self.grid.cell_diagonal_m()
            )));
        }
        if self.uav.sensing_radius_m() < self.grid.cell_size_m * std::f64::consts::SQRT_2 / 2.0 {
            return Err(Error::InvalidScenario(
                "sensing cone too narrow to cover a whole cell from altitude".into(),
            ));
        }
        if let Some(regions) = &self.regions {
            if regions.len() != self.num_uavs as usize {
                return Err(Error::InvalidScenario("one region per UAV is required".into()));
            }
            let mut all: Vec<CellIndex> = regions.iter().flat_map(|r| r.rois.clone()).collect();
            all.sort();
            let mut expect = self.rois.clone();
            expect.sort();
            if all != expect {
                return Err(Error::InvalidScenario("regions must partition the ROI set".into()));
            }
            for region in regions {
                if !region.rois.contains(&region.start) {
                    return Err(Error::InvalidScenario(
                        "each region start must be one of its ROIs".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Start cell of a given UAV: its region start on semi-random instances,
    /// the shared scenario start otherwise.
    pub fn start_of(&self, uav: usize) -> CellIndex {
        match &self.regions {
            Some(regions) if uav < regions.len() => regions[uav].start,
            _ => self.start,
        }
    }

    pub fn roi_points(&self) -> Vec<Point> {
        self.rois.iter().map(|&r| self.grid.center(r)).collect()
    }
}

fn sample_cells(rng: &mut ChaCha20Rng, cells: &[CellIndex], n: usize) -> Vec<CellIndex> {
    sample(rng, cells.len(), n).into_iter().map(|i| cells[i]).collect()
}

/// Uniform random instance: `nr` distinct ROIs, single UAV, start at the
/// first sampled ROI. Pure function of `(seed, grid, nr)`.
pub fn generate_random(seed: u64, grid: Grid, nr: usize) -> Result<Scenario> {
    if nr == 0 {
        return Err(Error::InvalidScenario("nr must be >= 1".into()));
    }
    if nr > grid.num_cells() {
        return Err(Error::InvalidScenario(format!(
            "cannot place {nr} ROIs on a grid of {} cells",
            grid.num_cells()
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let cells: Vec<CellIndex> = grid.iter_cells().collect();
    let rois = sample_cells(&mut rng, &cells, nr);
    Scenario::new(grid, rois.clone(), rois[0], 1, UavConfig::default())
}

/// Semi-random multi-UAV instance whose regions decompose into independent
/// single-UAV problems: for 2 UAVs five ROIs in the top half of the field and
/// five in the bottom half; for 4 UAVs ten ROIs spread over the four
/// quadrants (each non-empty). Every UAV starts on the first ROI sampled in
/// its own region.
///
/// Instances are constructed *such that* covering each region with its own
/// UAV is a true min-max optimum: candidate draws where reassigning ROIs
/// across regions would shorten the longest path are rejected and redrawn,
/// so the per-region exact solution is a genuine lower bound for any solver.
pub fn generate_semi_random(seed: u64, grid: Grid, num_uavs: u32) -> Result<Scenario> {
    if num_uavs != 2 && num_uavs != 4 {
        return Err(Error::InvalidScenario(format!(
            "semi-random scenarios support 2 or 4 UAVs, got {num_uavs}"
        )));
    }
    if grid.rows < 2 || grid.cols < 2 {
        return Err(Error::InvalidScenario("grid too small to split into regions".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let half_row = grid.rows / 2;
    let half_col = grid.cols / 2;

    let region_cells: Vec<Vec<CellIndex>> = if num_uavs == 2 {
        let top = grid.iter_cells().filter(|c| c.row < half_row).collect();
        let bottom = grid.iter_cells().filter(|c| c.row >= half_row).collect();
        vec![top, bottom]
    } else {
        // NW, NE, SW, SE.
        let quad = |c: &CellIndex| match (c.row < half_row, c.col < half_col) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        (0..4)
            .map(|q| grid.iter_cells().filter(|c| quad(c) == q).collect())
            .collect()
    };

    const MAX_ATTEMPTS: usize = 10_000;
    for _ in 0..MAX_ATTEMPTS {
        let counts: Vec<usize> = if num_uavs == 2 {
            vec![5, 5]
        } else {
            // Spread 10 ROIs over the quadrants, redrawing when a quadrant
            // comes up empty so each UAV has work of its own.
            loop {
                let mut counts = vec![0usize; 4];
                for _ in 0..10 {
                    counts[rand::Rng::gen_range(&mut rng, 0..4usize)] += 1;
                }
                if counts.iter().all(|&c| c > 0) {
                    break counts;
                }
            }
        };

        let mut regions = Vec::new();
        let mut rois = Vec::new();
        for (cells, &n) in region_cells.iter().zip(&counts) {
            let picked = sample_cells(&mut rng, cells, n);
            regions.push(Region { rois: picked.clone(), start: picked[0] });
            rois.extend(picked);
        }

        if !regional_split_is_optimal(&grid, &regions) {
            continue;
        }

        let mut scenario =
            Scenario::new(grid, rois, regions[0].start, num_uavs, UavConfig::default())?;
        scenario.regions = Some(regions);
        scenario.validate()?;
        return Ok(scenario);
    }
    Err(Error::InvalidScenario(
        "no decomposable semi-random instance found; grid or ROI counts too constrained".into(),
    ))
}

/// Exact open-path TSP length over `points` starting at index 0, by pruned
/// depth-first enumeration. Small inputs only (the verifier's regions).
fn dfs_tsp_len(points: &[Point]) -> f64 {
    fn dfs(
        pts: &[Point],
        used: &mut [bool],
        last: Point,
        partial: f64,
        left: usize,
        best: &mut f64,
    ) {
        if partial >= *best {
            return;
        }
        if left == 0 {
            *best = partial;
            return;
        }
        for i in 1..pts.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            dfs(pts, used, pts[i], partial + last.dist(pts[i]), left - 1, best);
            used[i] = false;
        }
    }
    if points.len() <= 1 {
        return 0.0;
    }
    let mut used = vec![false; points.len()];
    used[0] = true;
    let mut best = f64::INFINITY;
    dfs(points, &mut used, points[0], 0.0, points.len() - 1, &mut best);
    best
}

/// True when no reassignment of non-start ROIs across UAVs beats the
/// regional split's longest path: the regional solution is the min-max
/// optimum over every assignment, so the per-region oracle is a valid lower
/// bound. Verified by enumerating all assignments with per-(UAV, subset)
/// memoized exact TSPs.
fn regional_split_is_optimal(grid: &Grid, regions: &[Region]) -> bool {
    let n_uavs = regions.len();
    let starts: Vec<Point> = regions.iter().map(|r| grid.center(r.start)).collect();
    let free: Vec<Point> = regions
        .iter()
        .flat_map(|r| r.rois.iter().filter(|&&c| c != r.start))
        .map(|&c| grid.center(c))
        .collect();
    let n_free = free.len();
    debug_assert!(n_free <= 16, "verifier is exponential in the free ROI count");

    // Regional assignment mask, in the same flat order as `free`.
    let mut regional_mask = vec![0usize; n_free];
    let mut at = 0;
    for (u, region) in regions.iter().enumerate() {
        for _ in 0..region.rois.len() - 1 {
            regional_mask[at] = u;
            at += 1;
        }
    }

    let mut memo: Vec<Vec<f64>> = vec![vec![f64::NAN; 1 << n_free]; n_uavs];
    let mut tsp_of = |u: usize, subset: usize, memo: &mut Vec<Vec<f64>>| -> f64 {
        let cached = memo[u][subset];
        if !cached.is_nan() {
            return cached;
        }
        let mut pts = vec![starts[u]];
        for (i, p) in free.iter().enumerate() {
            if subset & (1 << i) != 0 {
                pts.push(*p);
            }
        }
        let len = dfs_tsp_len(&pts);
        memo[u][subset] = len;
        len
    };

    let regional_max = {
        let mut max = 0.0f64;
        for u in 0..n_uavs {
            let mut subset = 0usize;
            for (i, &owner) in regional_mask.iter().enumerate() {
                if owner == u {
                    subset |= 1 << i;
                }
            }
            max = max.max(tsp_of(u, subset, &mut memo));
        }
        max
    };

    // Enumerate every assignment of free ROIs to UAVs; prune as soon as one
    // UAV's subset alone exceeds the regional maximum.
    fn assign(
        i: usize,
        n_free: usize,
        n_uavs: usize,
        subsets: &mut [usize],
        regional_max: f64,
        memo: &mut Vec<Vec<f64>>,
        tsp_of: &mut impl FnMut(usize, usize, &mut Vec<Vec<f64>>) -> f64,
    ) -> bool {
        if i == n_free {
            let mut max = 0.0f64;
            for (u, &s) in subsets.iter().enumerate() {
                max = max.max(tsp_of(u, s, memo));
            }
            return max < regional_max - 1e-6;
        }
        for u in 0..n_uavs {
            subsets[u] |= 1 << i;
            let ok = tsp_of(u, subsets[u], memo) < regional_max - 1e-6;
            if ok
                && assign(i + 1, n_free, n_uavs, subsets, regional_max, memo, tsp_of)
            {
                subsets[u] &= !(1 << i);
                return true;
            }
            subsets[u] &= !(1 << i);
        }
        false
    }

    let mut subsets = vec![0usize; n_uavs];
    let beatable = assign(
        0,
        n_free,
        n_uavs,
        &mut subsets,
        regional_max,
        &mut memo,
        &mut tsp_of,
    );
    !beatable
}
