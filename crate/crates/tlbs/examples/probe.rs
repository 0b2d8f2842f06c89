//! Scratch harness for eyeballing gap statistics at different iteration
//! budgets: `cargo run --release -p tlbs --example probe -- <kind> <iters> <seeds>`

use tlbs::bench::{run_gap_experiment, AblationFlags, ExperimentConfig, ScenarioKind};
use tlbs::SolverParams;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let kind: ScenarioKind = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(ScenarioKind::Random1Uav);
    let iters: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(3000);
    let seeds: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(10);

    let config = ExperimentConfig {
        scenario_kind: kind,
        num_seeds: seeds,
        params: SolverParams { max_iterations: iters, ..SolverParams::default() },
        ablations: AblationFlags::default(),
    };
    let t0 = std::time::Instant::now();
    let (stats, rows) = run_gap_experiment(&config).unwrap();
    let wall = t0.elapsed().as_secs_f64();
    for r in &rows {
        println!(
            "seed {:3}  ubat {:8.0} oracle {:8.0} gap {:6.2}%  nc {} vs {}  wall {:.2}s",
            r.seed, r.ubat_len_m, r.oracle_len_m, r.len_gap_pct, r.ubat_nc, r.oracle_nc, r.wall_s
        );
    }
    println!(
        "kind {:?} iters {} seeds {}: mean len gap {:.2}% (sd {:.2}), mean nc gap {:.2}% (sd {:.2}), extra len {:.0} m, extra nc {:.2}; total {:.1}s",
        kind, iters, seeds,
        stats.mean_len_gap_pct, stats.stdev_len_gap_pct,
        stats.mean_nc_gap_pct, stats.stdev_nc_gap_pct,
        stats.mean_extra_len_m, stats.mean_extra_nc, wall
    );
}
