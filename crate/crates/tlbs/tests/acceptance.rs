//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `--nocapture` to see them).
//!
//! By default the suite runs a reduced smoke profile sized for CI; set
//! `TLBS_FULL=1` for the full-scale profile (30,000-iteration runs).

use std::collections::BTreeSet;

use rayon::prelude::*;

use tlbs::bench::{
    run_gap_experiment, run_iteration_sweep, run_timing_cdf, AblationFlags, ExperimentConfig,
    GapRow, ScenarioKind,
};
use tlbs::energy::simulate;
use tlbs::oracle::{greedy_station_placement, oracle_solve, tsp_brute_force};
use tlbs::pheromone::PheromoneMatrix;
use tlbs::routing::PlanConfig;
use tlbs::scenario::{generate_random, generate_semi_random, CellIndex, Grid, Scenario, UavConfig};
use tlbs::two_opt::two_opt;
use tlbs::{solve, solve_observed, SolverParams};

const NUM_SEEDS: usize = 20;

fn full_profile() -> bool {
    std::env::var("TLBS_FULL").map_or(false, |v| v == "1")
}

fn pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().build().unwrap()
}

fn gap_config(kind: ScenarioKind, iters: usize, seeds: usize) -> ExperimentConfig {
    ExperimentConfig {
        scenario_kind: kind,
        num_seeds: seeds,
        params: SolverParams { max_iterations: iters, ..SolverParams::default() },
        ablations: AblationFlags::default(),
    }
}

fn check_lower_bound(rows: &[GapRow], tolerance_m: f64) {
    for row in rows {
        assert!(
            row.ubat_len_m >= row.oracle_len_m - tolerance_m,
            "seed {}: solver length {} below oracle lower bound {}",
            row.seed,
            row.ubat_len_m,
            row.oracle_len_m
        );
    }
}

#[test]
fn criterion_1_single_uav_gap() {
    let (iters, gap_bound) = if full_profile() { (30_000, 10.0) } else { (3_000, 15.0) };
    let config = gap_config(ScenarioKind::Random1Uav, iters, NUM_SEEDS);
    let (stats, rows) = run_gap_experiment(&config).unwrap();
    check_lower_bound(&rows, 1_000.0 * std::f64::consts::SQRT_2);
    assert!(
        stats.mean_len_gap_pct <= gap_bound,
        "mean length gap {:.2}% exceeds {gap_bound}%",
        stats.mean_len_gap_pct
    );
    assert!(
        stats.mean_extra_nc <= 1.0,
        "mean extra stations {:.2} exceeds 1.0",
        stats.mean_extra_nc
    );
    println!(
        "[PASS] criterion 1: single-UAV mean gap {:.2}% (sd {:.2}) <= {gap_bound}%, extra stations {:.2} <= 1.0 ({} seeds, {} iters)",
        stats.mean_len_gap_pct, stats.stdev_len_gap_pct, stats.mean_extra_nc, NUM_SEEDS, iters
    );
}

#[test]
fn criterion_2_two_uav_gap() {
    let iters = if full_profile() { 30_000 } else { 4_000 };
    let config = gap_config(ScenarioKind::Semi2Uav, iters, NUM_SEEDS);
    let (stats, rows) = run_gap_experiment(&config).unwrap();
    check_lower_bound(&rows, 1_000.0 * std::f64::consts::SQRT_2);
    assert!(
        stats.mean_len_gap_pct <= 5.0,
        "mean length gap {:.2}% exceeds 5%",
        stats.mean_len_gap_pct
    );
    assert!(
        stats.mean_extra_nc <= 1.2,
        "mean extra stations {:.2} exceeds 1.2",
        stats.mean_extra_nc
    );
    println!(
        "[PASS] criterion 2: 2-UAV mean gap {:.2}% (sd {:.2}) <= 5%, extra stations {:.2} <= 1.2 ({} seeds, {} iters)",
        stats.mean_len_gap_pct, stats.stdev_len_gap_pct, stats.mean_extra_nc, NUM_SEEDS, iters
    );
}

#[test]
fn criterion_3_four_uav_gap() {
    let iters = if full_profile() { 30_000 } else { 10_000 };
    let config = gap_config(ScenarioKind::Semi4Uav, iters, NUM_SEEDS);
    let (stats, rows) = run_gap_experiment(&config).unwrap();
    check_lower_bound(&rows, 1_000.0 * std::f64::consts::SQRT_2);
    assert!(
        stats.mean_len_gap_pct <= 12.0,
        "mean length gap {:.2}% exceeds 12%",
        stats.mean_len_gap_pct
    );
    assert!(
        stats.mean_extra_nc <= 1.2,
        "mean extra stations {:.2} exceeds 1.2",
        stats.mean_extra_nc
    );
    println!(
        "[PASS] criterion 3: 4-UAV mean gap {:.2}% (sd {:.2}) <= 12%, extra stations {:.2} <= 1.2 ({} seeds, {} iters)",
        stats.mean_len_gap_pct, stats.stdev_len_gap_pct, stats.mean_extra_nc, NUM_SEEDS, iters
    );
}

#[test]
fn criterion_4_convergence_profile() {
    let seeds: Vec<u64> = if full_profile() { vec![1, 2, 3] } else { vec![1, 2] };
    let results: Vec<(u64, f64, f64, f64)> = pool().install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let scenario = generate_semi_random(seed, Grid::new(20, 20, 1000.0).unwrap(), 2)
                    .unwrap();
                let params = SolverParams { seed, ..SolverParams::default() };
                let points =
                    run_iteration_sweep(&scenario, &params, &[1, 1_000, 100_000]).unwrap();
                (seed, points[0].best_len_m, points[1].best_len_m, points[2].best_len_m)
            })
            .collect()
    });
    for &(seed, at1, at1k, at100k) in &results {
        let total = at1 - at100k;
        let early = at1 - at1k;
        if total > 1e-9 {
            assert!(
                early >= 0.9 * total,
                "seed {seed}: only {:.1}% of the improvement landed in the first 1000 iterations",
                early / total * 100.0
            );
        }
        let late_pct = (at1k - at100k) / at1k * 100.0;
        assert!(
            late_pct <= 2.0,
            "seed {seed}: {late_pct:.2}% improvement after iteration 1000 exceeds 2%"
        );
    }
    let worst_late = results
        .iter()
        .map(|&(_, _, a, b)| (a - b) / a * 100.0)
        .fold(0.0f64, f64::max);
    println!(
        "[PASS] criterion 4: >=90% of best-length improvement within 1000 iterations on {} 2-UAV seeds; 1k->100k improvement <= {:.2}% (bound 2%)",
        results.len(),
        worst_late
    );
}

#[test]
fn criterion_5_hull_timing() {
    let scenario = generate_semi_random(1, Grid::new(20, 20, 1000.0).unwrap(), 2).unwrap();
    let params = SolverParams { seed: 1, ..SolverParams::default() };
    let iters = 200;
    // Min of repeated means: robust against CI load spikes.
    let mut on_best = f64::INFINITY;
    let mut off_best = f64::INFINITY;
    for _ in 0..3 {
        on_best = on_best.min(run_timing_cdf(&scenario, &params, iters, true).unwrap().mean_s);
        off_best = off_best.min(run_timing_cdf(&scenario, &params, iters, false).unwrap().mean_s);
    }
    assert!(
        on_best < off_best,
        "hull reduction is not faster: {on_best:.6}s vs {off_best:.6}s per iteration"
    );
    let reduction_pct = (off_best - on_best) / off_best * 100.0;
    let soft = if reduction_pct >= 15.0 { "meets" } else { "misses" };
    println!(
        "[PASS] criterion 5: hull-on {:.0} us < hull-off {:.0} us per iteration; {reduction_pct:.1}% reduction {soft} the 15% soft target",
        on_best * 1e6,
        off_best * 1e6
    );
}

#[test]
fn criterion_6_parameter_tuning() {
    let iters = if full_profile() { 5_000 } else { 2_000 };
    let seeds = 10;
    // The 2-OPT correction polishes either arm to near-optimal and masks the
    // colony-level effect, so the comparison isolates tuning with it off.
    let base = AblationFlags { two_opt: false, ..AblationFlags::default() };
    let tuned_cfg = ExperimentConfig {
        scenario_kind: ScenarioKind::Semi2Uav,
        num_seeds: seeds,
        params: SolverParams { max_iterations: iters, ..SolverParams::default() },
        ablations: base,
    };
    let fixed_cfg = ExperimentConfig {
        ablations: AblationFlags { tuning: false, ..base },
        ..tuned_cfg.clone()
    };
    let (_, tuned) = run_gap_experiment(&tuned_cfg).unwrap();
    let (_, fixed) = run_gap_experiment(&fixed_cfg).unwrap();
    let mean = |rows: &[GapRow], f: &dyn Fn(&GapRow) -> f64| {
        rows.iter().map(f).sum::<f64>() / rows.len() as f64
    };
    let len_gain =
        (mean(&fixed, &|r| r.ubat_len_m) - mean(&tuned, &|r| r.ubat_len_m))
            / mean(&fixed, &|r| r.ubat_len_m)
            * 100.0;
    let nc_gain = (mean(&fixed, &|r| r.ubat_nc as f64) - mean(&tuned, &|r| r.ubat_nc as f64))
        / mean(&fixed, &|r| r.ubat_nc as f64)
        * 100.0;
    assert!(len_gain >= 5.0, "tuning improves mean length by {len_gain:.2}% < 5%");
    assert!(nc_gain >= 3.0, "tuning improves mean stations by {nc_gain:.2}% < 3%");

    // A second tuning round changes the outcome by at most 1%.
    let diffs: Vec<f64> = pool().install(|| {
        (0..seeds as u64)
            .into_par_iter()
            .map(|seed| {
                let scenario =
                    generate_semi_random(seed, Grid::new(20, 20, 1000.0).unwrap(), 2).unwrap();
                let solve_rounds = |rounds: usize| {
                    let params = SolverParams {
                        seed,
                        max_iterations: iters,
                        tuning_rounds: rounds,
                        use_two_opt: false,
                        ..SolverParams::default()
                    };
                    solve(&scenario, &params).unwrap().max_path_len_m
                };
                let one = solve_rounds(1);
                let two = solve_rounds(2);
                (two - one).abs() / one * 100.0
            })
            .collect()
    });
    let mean_round_diff = diffs.iter().sum::<f64>() / diffs.len() as f64;
    assert!(
        mean_round_diff <= 1.0,
        "second tuning round changes results by {mean_round_diff:.2}% > 1%"
    );
    println!(
        "[PASS] criterion 6: tuning improves mean length {len_gain:.2}% (>=5%) and stations {nc_gain:.2}% (>=3%); second round changes results {mean_round_diff:.2}% (<=1%)"
    );
}

#[test]
fn criterion_7_two_opt_effect() {
    let iters = if full_profile() { 5_000 } else { 2_000 };
    let seeds = 10;
    let on_cfg = ExperimentConfig {
        scenario_kind: ScenarioKind::Semi2Uav,
        num_seeds: seeds,
        params: SolverParams { max_iterations: iters, ..SolverParams::default() },
        ablations: AblationFlags::default(),
    };
    let off_cfg = ExperimentConfig {
        ablations: AblationFlags { two_opt: false, ..AblationFlags::default() },
        ..on_cfg.clone()
    };
    let (_, on) = run_gap_experiment(&on_cfg).unwrap();
    let (_, off) = run_gap_experiment(&off_cfg).unwrap();
    let mean_on = on.iter().map(|r| r.ubat_len_m).sum::<f64>() / on.len() as f64;
    let mean_off = off.iter().map(|r| r.ubat_len_m).sum::<f64>() / off.len() as f64;
    let gain = (mean_off - mean_on) / mean_off * 100.0;
    assert!(gain >= 1.0, "2-OPT improves mean length by {gain:.2}% < 1%");

    // Hard invariant: the correction never adds stations (applied to the
    // best solution of every two_opt-less run).
    for row in &off {
        let scenario = ScenarioKind::Semi2Uav.generate(row.seed).unwrap();
        let params = SolverParams {
            seed: row.seed,
            max_iterations: iters,
            use_two_opt: false,
            ..SolverParams::default()
        };
        let solution = solve(&scenario, &params).unwrap();
        let cfg = params.plan_config(&scenario);
        let corrected = two_opt(&scenario, &solution, &cfg, None).unwrap();
        assert!(
            corrected.nc <= solution.nc,
            "seed {}: 2-OPT raised the station count {} -> {}",
            row.seed,
            solution.nc,
            corrected.nc
        );
        assert!(corrected.max_path_len_m <= solution.max_path_len_m + 1e-9);
    }
    println!(
        "[PASS] criterion 7: 2-OPT improves mean length by {gain:.2}% (>=1%); station count never increased on any seed"
    );
}

#[test]
fn criterion_8_oracle_performance() {
    // 10-ROI permutation TSP within the 10 s budget, single core.
    let scenario = generate_random(123, Grid::new(20, 20, 1000.0).unwrap(), 10).unwrap();
    let t0 = std::time::Instant::now();
    let (_, len) = tsp_brute_force(&scenario.grid, &scenario.rois, scenario.start).unwrap();
    let tsp_s = t0.elapsed().as_secs_f64();
    assert!(len > 0.0);
    assert!(tsp_s <= 10.0, "10-ROI TSP took {tsp_s:.2}s > 10s");

    // Greedy placement is linear: concatenating a polyline with itself takes
    // at most twice as long (min over repetitions to shed scheduler noise).
    let base: Vec<tlbs::geom::Point> = (0..200_000)
        .map(|i| {
            let t = i as f64;
            tlbs::geom::Point::new(t * 7.3, (t * 0.37).sin() * 2_000.0)
        })
        .collect();
    let mut doubled = base.clone();
    doubled.extend(base.iter().map(|p| tlbs::geom::Point::new(p.x + 1.5e6, p.y)));
    let time_min = |pts: &[tlbs::geom::Point]| {
        (0..15)
            .map(|_| {
                let t = std::time::Instant::now();
                std::hint::black_box(greedy_station_placement(std::hint::black_box(pts), 5_000.0));
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let t_base = time_min(&base);
    let t_double = time_min(&doubled);
    let ratio = t_double / t_base;
    assert!(ratio <= 2.0 + 0.2, "placement time scaled x{ratio:.2} when the polyline doubled");
    println!(
        "[PASS] criterion 8: 10-ROI exact TSP in {:.3}s (<=10s); doubling the polyline scales placement time x{ratio:.2} (linear)",
        tsp_s
    );
}

#[test]
fn criterion_9_property_suites() {
    let grid = Grid::new(20, 20, 1000.0).unwrap();

    // Selection probabilities normalize to 1 within 1e-12.
    for seed in 0..50u64 {
        let s = generate_random(seed, grid, 10).unwrap();
        let tau = PheromoneMatrix::new(1.0);
        let r_visit: Vec<CellIndex> = s.rois[1..].to_vec();
        let total: f64 = r_visit
            .iter()
            .map(|&cand| {
                tlbs::aco::roi_selection_prob(&s, s.start, cand, &r_visit, &tau, 2.0, 2.0).unwrap()
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-12, "seed {seed}: probability sum {total}");
    }

    // Evaporation fixed point at tau0.
    let mut tau = PheromoneMatrix::new(1.0);
    tau.set(CellIndex::new(0, 0), CellIndex::new(1, 1), 1.0);
    tau.evaporate(&BTreeSet::new(), 0.3);
    assert_eq!(tau.get(CellIndex::new(0, 0), CellIndex::new(1, 1)), 1.0);

    // Every solver output passes the constraint validator: 100 fuzzed
    // scenarios over grid sizes, ROI counts, ranges and fleet kinds.
    let fuzz: Vec<u64> = (0..100).collect();
    pool().install(|| {
        fuzz.par_iter().for_each(|&seed| {
            let scenario = fuzzed_scenario(seed);
            let params = SolverParams {
                seed,
                max_iterations: 40,
                tuning_warmup_iters: 20,
                tuning_rounds: 1,
                ..SolverParams::default()
            };
            let solution = solve(&scenario, &params).unwrap();
            let report = simulate(&scenario, &solution).unwrap();
            assert!(
                report.passed,
                "fuzz seed {seed}: solver output violates the model: {:?}",
                report.violations
            );
        });
    });

    // Oracle lower bound on every compared seed, all kinds (short runs: the
    // bound must hold at any iteration budget).
    for kind in [ScenarioKind::Random1Uav, ScenarioKind::Semi2Uav, ScenarioKind::Semi4Uav] {
        let config = ExperimentConfig {
            scenario_kind: kind,
            num_seeds: 12,
            params: SolverParams {
                max_iterations: 300,
                tuning_warmup_iters: 100,
                ..SolverParams::default()
            },
            ablations: AblationFlags::default(),
        };
        let (_, rows) = run_gap_experiment(&config).unwrap();
        check_lower_bound(&rows, 1_000.0 * std::f64::consts::SQRT_2);
    }

    // 2-OPT monotone improvement on random tours.
    for seed in 0..10u64 {
        let s = generate_random(seed, grid, 10).unwrap();
        let cfg = PlanConfig::for_scenario(&s);
        let order: Vec<CellIndex> = s.rois[1..].to_vec();
        let route =
            tlbs::routing::plan_route(&s, &cfg, s.start, &order, &BTreeSet::new(), None).unwrap();
        let sol = tlbs::routing::assemble_solution(&s, vec![route]);
        let out = two_opt(&s, &sol, &cfg, None).unwrap();
        assert!(out.max_path_len_m <= sol.max_path_len_m + 1e-9);
        assert!(out.nc <= sol.nc);
    }

    // Bitwise reproducibility for fixed seeds.
    for kind in [ScenarioKind::Random1Uav, ScenarioKind::Semi4Uav] {
        let scenario = kind.generate(77).unwrap();
        let params = SolverParams {
            seed: 77,
            max_iterations: 150,
            tuning_warmup_iters: 50,
            ..SolverParams::default()
        };
        let a = solve(&scenario, &params).unwrap();
        let b = solve(&scenario, &params).unwrap();
        assert_eq!(a, b, "solve is not reproducible for {kind:?}");
    }

    println!(
        "[PASS] criterion 9: probability normalization (1e-12), evaporation fixed point, 100-scenario feasibility fuzz, oracle lower bound on every compared seed, 2-OPT monotonicity, bitwise reproducibility"
    );
}

/// Random but always-solvable scenario for the feasibility fuzz.
fn fuzzed_scenario(seed: u64) -> Scenario {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed ^ 0x5eed);
    match seed % 4 {
        0 | 1 => {
            let rows = rng.gen_range(8..=25);
            let cols = rng.gen_range(8..=25);
            let cell = rng.gen_range(500.0..2_000.0);
            let grid = Grid::new(rows, cols, cell).unwrap();
            let nr = rng.gen_range(3..=12).min(grid.num_cells());
            let mut s = generate_random(seed, grid, nr).unwrap();
            let min_range = grid.cell_diagonal_m() * 2.0;
            let uav = UavConfig {
                range_m: rng.gen_range(min_range..min_range * 6.0),
                ..UavConfig::default()
            };
            s.uav = uav;
            s.validate().unwrap();
            s
        }
        2 => generate_semi_random(seed, Grid::new(20, 20, 1000.0).unwrap(), 2).unwrap(),
        _ => generate_semi_random(seed, Grid::new(20, 20, 1000.0).unwrap(), 4).unwrap(),
    }
}
