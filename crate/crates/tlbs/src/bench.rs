//! Experiment harness: gap statistics against the exact oracle, iteration
//! sweeps of the best-so-far curve, timing distributions with and without
//! hull reduction, and ablation toggles.
//!
//! Seeds run in parallel; results are keyed and sorted by seed so the
//! aggregate output is bit-identical regardless of worker count. The
//! `TLBS_THREADS` environment variable caps the worker pool.

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aco::{solve, solve_observed, SolverParams};
use crate::error::{Error, Result};
use crate::oracle::oracle_solve;
use crate::scenario::{generate_random, generate_semi_random, Grid, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    #[serde(rename = "RANDOM_1UAV")]
    Random1Uav,
    #[serde(rename = "SEMI_2UAV")]
    Semi2Uav,
    #[serde(rename = "SEMI_4UAV")]
    Semi4Uav,
}

impl ScenarioKind {
    pub fn generate(self, seed: u64) -> Result<Scenario> {
        let grid = Grid::new(20, 20, 1000.0)?;
        match self {
            ScenarioKind::Random1Uav => generate_random(seed, grid, 10),
            ScenarioKind::Semi2Uav => generate_semi_random(seed, grid, 2),
            ScenarioKind::Semi4Uav => generate_semi_random(seed, grid, 4),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Random1Uav => "RANDOM_1UAV",
            ScenarioKind::Semi2Uav => "SEMI_2UAV",
            ScenarioKind::Semi4Uav => "SEMI_4UAV",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random1" | "RANDOM_1UAV" => Ok(ScenarioKind::Random1Uav),
            "semi2" | "SEMI_2UAV" => Ok(ScenarioKind::Semi2Uav),
            "semi4" | "SEMI_4UAV" => Ok(ScenarioKind::Semi4Uav),
            other => Err(Error::InvalidParam(format!(
                "unknown scenario kind '{other}' (expected random1, semi2 or semi4)"
            ))),
        }
    }
}

/// Enhancement toggles for ablation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AblationFlags {
    pub hull: bool,
    pub tuning: bool,
    pub two_opt: bool,
}

impl Default for AblationFlags {
    fn default() -> Self {
        AblationFlags { hull: true, tuning: true, two_opt: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario_kind: ScenarioKind,
    pub num_seeds: usize,
    pub params: SolverParams,
    pub ablations: AblationFlags,
}

/// One seed's gap measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub seed: u64,
    pub scenario_kind: ScenarioKind,
    pub ubat_len_m: f64,
    pub oracle_len_m: f64,
    pub len_gap_pct: f64,
    pub ubat_nc: usize,
    pub oracle_nc: usize,
    /// Percentage station gap; absent when the oracle needed no stations.
    pub nc_gap_pct: Option<f64>,
    pub iters: usize,
    pub wall_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    pub mean_len_gap_pct: f64,
    pub stdev_len_gap_pct: f64,
    pub mean_nc_gap_pct: f64,
    pub stdev_nc_gap_pct: f64,
    pub mean_extra_len_m: f64,
    pub mean_extra_nc: f64,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn stdev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Worker pool honoring the `TLBS_THREADS` cap.
pub fn worker_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("TLBS_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                builder = builder.num_threads(n);
            }
        }
    }
    builder.build().expect("worker pool")
}

/// Apply ablation flags to the per-seed solver parameters.
fn seeded_params(config: &ExperimentConfig, seed: u64) -> SolverParams {
    let mut p = config.params;
    p.seed = seed;
    p.use_hull_reduction = config.ablations.hull;
    p.use_two_opt = config.ablations.two_opt;
    if !config.ablations.tuning {
        // Fixed arbitrary baseline weights instead of the iterative tuner.
        p.q1 = Some(p.q1.unwrap_or(1.0));
        p.q2 = Some(p.q2.unwrap_or(1.0));
    } else {
        p.q1 = None;
        p.q2 = None;
    }
    p
}

pub fn gap_row(
    seed: u64,
    kind: ScenarioKind,
    ubat_len_m: f64,
    ubat_nc: usize,
    oracle_len_m: f64,
    oracle_nc: usize,
    iters: usize,
    wall_s: f64,
) -> GapRow {
    let len_gap_pct = (ubat_len_m - oracle_len_m) / oracle_len_m * 100.0;
    let nc_gap_pct = (oracle_nc > 0)
        .then(|| (ubat_nc as f64 - oracle_nc as f64) / oracle_nc as f64 * 100.0);
    GapRow {
        seed,
        scenario_kind: kind,
        ubat_len_m,
        oracle_len_m,
        len_gap_pct,
        ubat_nc,
        oracle_nc,
        nc_gap_pct,
        iters,
        wall_s,
    }
}

pub fn aggregate(rows: &[GapRow]) -> GapStats {
    let len_gaps: Vec<f64> = rows.iter().map(|r| r.len_gap_pct).collect();
    let nc_gaps: Vec<f64> = rows.iter().filter_map(|r| r.nc_gap_pct).collect();
    let extra_len: Vec<f64> = rows.iter().map(|r| r.ubat_len_m - r.oracle_len_m).collect();
    let extra_nc: Vec<f64> =
        rows.iter().map(|r| r.ubat_nc as f64 - r.oracle_nc as f64).collect();
    GapStats {
        mean_len_gap_pct: mean(&len_gaps),
        stdev_len_gap_pct: stdev(&len_gaps),
        mean_nc_gap_pct: mean(&nc_gaps),
        stdev_nc_gap_pct: stdev(&nc_gaps),
        mean_extra_len_m: mean(&extra_len),
        mean_extra_nc: mean(&extra_nc),
    }
}

/// Solve `num_seeds` generated instances, compare each against the exact
/// oracle and aggregate the gap statistics. Seeds are `params.seed + i`.
pub fn run_gap_experiment(config: &ExperimentConfig) -> Result<(GapStats, Vec<GapRow>)> {
    let seeds: Vec<u64> = (0..config.num_seeds as u64).map(|i| config.params.seed + i).collect();
    let pool = worker_pool();
    let mut rows = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| -> Result<GapRow> {
                let scenario = config.scenario_kind.generate(seed)?;
                let oracle = oracle_solve(&scenario)?;
                let params = seeded_params(config, seed);
                let t0 = Instant::now();
                let sol = solve(&scenario, &params)?;
                let wall_s = t0.elapsed().as_secs_f64();
                Ok(gap_row(
                    seed,
                    config.scenario_kind,
                    sol.max_path_len_m,
                    sol.nc,
                    oracle.path_len_m,
                    oracle.nc,
                    params.max_iterations,
                    wall_s,
                ))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by_key(|r| r.seed);
    Ok((aggregate(&rows), rows))
}

pub const CSV_HEADER: &str =
    "seed,scenario_kind,ubat_len_m,oracle_len_m,len_gap_pct,ubat_nc,oracle_nc,nc_gap_pct,iters,wall_s";

pub fn rows_to_csv(rows: &[GapRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let nc_gap = r.nc_gap_pct.map_or(String::new(), |v| format!("{v}"));
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.seed,
            r.scenario_kind.as_str(),
            r.ubat_len_m,
            r.oracle_len_m,
            r.len_gap_pct,
            r.ubat_nc,
            r.oracle_nc,
            nc_gap,
            r.iters,
            r.wall_s
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub iteration: usize,
    pub best_len_m: f64,
    pub best_nc: usize,
}

/// Record the best-so-far metrics at each checkpoint iteration. Runs the
/// solver up to the last checkpoint.
pub fn run_iteration_sweep(
    scenario: &Scenario,
    params: &SolverParams,
    checkpoints: &[usize],
) -> Result<Vec<SweepPoint>> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParam("checkpoints must be sorted ascending".into()));
    }
    if checkpoints[0] == 0 {
        return Err(Error::InvalidParam("checkpoints start at iteration 1".into()));
    }
    let mut run = *params;
    run.max_iterations = *checkpoints.last().expect("non-empty");
    let mut points = Vec::with_capacity(checkpoints.len());
    solve_observed(scenario, &run, |iteration, _, best| {
        if checkpoints.contains(&iteration) {
            points.push(SweepPoint {
                iteration,
                best_len_m: best.max_path_len_m,
                best_nc: best.nc,
            });
        }
    })?;
    Ok(points)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingCdf {
    /// Per-iteration wall times in seconds, sorted ascending (the CDF grid).
    pub samples_s: Vec<f64>,
    pub mean_s: f64,
}

const TIMING_WARMUP_ITERS: usize = 5;

/// Measure per-iteration wall time over `iters` iterations (after a short
/// discarded warmup) with hull reduction forced on or off.
pub fn run_timing_cdf(
    scenario: &Scenario,
    params: &SolverParams,
    iters: usize,
    hull_on: bool,
) -> Result<TimingCdf> {
    if iters < 30 {
        return Err(Error::InvalidParam("timing runs need at least 30 iterations".into()));
    }
    let mut run = *params;
    run.use_hull_reduction = hull_on;
    run.max_iterations = iters + TIMING_WARMUP_ITERS;
    // Tuning inside the timed run would pollute the samples.
    run.q1 = Some(run.q1.unwrap_or(30_000.0));
    run.q2 = Some(run.q2.unwrap_or(4.0));

    let mut marks = Vec::with_capacity(iters + TIMING_WARMUP_ITERS + 1);
    marks.push(Instant::now());
    solve_observed(scenario, &run, |_, _, _| marks.push(Instant::now()))?;
    let mut samples_s: Vec<f64> = marks
        .windows(2)
        .skip(TIMING_WARMUP_ITERS)
        .map(|w| w[1].duration_since(w[0]).as_secs_f64())
        .collect();
    samples_s.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mean_s = mean(&samples_s);
    Ok(TimingCdf { samples_s, mean_s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_comparison_has_zero_gap() {
        let row = gap_row(7, ScenarioKind::Random1Uav, 31_500.0, 4, 31_500.0, 4, 100, 0.1);
        assert_eq!(row.len_gap_pct, 0.0);
        assert_eq!(row.nc_gap_pct, Some(0.0));
        let stats = aggregate(&[row]);
        assert_eq!(stats.mean_len_gap_pct, 0.0);
        assert_eq!(stats.mean_extra_nc, 0.0);
    }

    #[test]
    fn zero_oracle_stations_are_excluded_from_pct() {
        let rows = vec![
            gap_row(0, ScenarioKind::Random1Uav, 11_000.0, 1, 10_000.0, 0, 10, 0.0),
            gap_row(1, ScenarioKind::Random1Uav, 12_000.0, 3, 10_000.0, 2, 10, 0.0),
        ];
        assert_eq!(rows[0].nc_gap_pct, None);
        let stats = aggregate(&rows);
        assert_eq!(stats.mean_nc_gap_pct, 50.0);
        assert!((stats.mean_extra_nc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_has_expected_columns_and_rows() {
        let rows = vec![
            gap_row(0, ScenarioKind::Semi2Uav, 20_000.0, 2, 19_000.0, 2, 10, 0.5),
            gap_row(1, ScenarioKind::Semi2Uav, 21_000.0, 1, 20_000.0, 0, 10, 0.5),
        ];
        let csv = rows_to_csv(&rows);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("0,SEMI_2UAV,"));
        // Empty nc_gap_pct field when the oracle needed no stations.
        assert_eq!(lines[2].split(',').nth(7), Some(""));
    }

    #[test]
    fn gap_experiment_smoke_runs_and_sorts_rows() {
        let config = ExperimentConfig {
            scenario_kind: ScenarioKind::Random1Uav,
            num_seeds: 3,
            params: SolverParams {
                max_iterations: 60,
                tuning_warmup_iters: 30,
                tuning_rounds: 1,
                ..SolverParams::default()
            },
            ablations: AblationFlags::default(),
        };
        let (stats, rows) = run_gap_experiment(&config).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.windows(2).all(|w| w[0].seed < w[1].seed));
        // The oracle is a lower bound.
        assert!(stats.mean_len_gap_pct > -1.0);
        for row in &rows {
            assert!(row.ubat_len_m >= row.oracle_len_m - 1e-6, "seed {}", row.seed);
        }
    }

    #[test]
    fn sweep_is_monotone_and_checkpoint_aligned() {
        let scenario = ScenarioKind::Semi2Uav.generate(3).unwrap();
        let params = SolverParams {
            q1: Some(30_000.0),
            q2: Some(2.0),
            ..SolverParams::default()
        };
        let points = run_iteration_sweep(&scenario, &params, &[1, 10, 50]).unwrap();
        assert_eq!(points.len(), 3);
        assert_eq!(points[0].iteration, 1);
        assert!(points.windows(2).all(|w| w[1].best_len_m <= w[0].best_len_m + 1e-9));
    }

    #[test]
    fn timing_returns_exactly_the_requested_samples() {
        let scenario = ScenarioKind::Semi2Uav.generate(4).unwrap();
        let params = SolverParams::default();
        let cdf = run_timing_cdf(&scenario, &params, 30, true).unwrap();
        assert_eq!(cdf.samples_s.len(), 30);
        assert!(cdf.mean_s > 0.0);
        assert!(run_timing_cdf(&scenario, &params, 10, true).is_err());
    }

    #[test]
    fn rerun_reproduces_rows_bitwise() {
        let config = ExperimentConfig {
            scenario_kind: ScenarioKind::Semi2Uav,
            num_seeds: 2,
            params: SolverParams {
                max_iterations: 40,
                tuning_warmup_iters: 20,
                tuning_rounds: 1,
                ..SolverParams::default()
            },
            ablations: AblationFlags::default(),
        };
        let (_, a) = run_gap_experiment(&config).unwrap();
        let (_, b) = run_gap_experiment(&config).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.ubat_len_m, y.ubat_len_m);
            assert_eq!(x.ubat_nc, y.ubat_nc);
            assert_eq!(x.oracle_len_m, y.oracle_len_m);
        }
    }
}
