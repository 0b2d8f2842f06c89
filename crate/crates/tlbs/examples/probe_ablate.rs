//! Ablation deltas: tuning on/off and 2-OPT on/off over identical seeds.

use tlbs::bench::{run_gap_experiment, AblationFlags, ExperimentConfig, ScenarioKind};
use tlbs::SolverParams;

fn run(kind: ScenarioKind, seeds: usize, iters: usize, ab: AblationFlags) -> (f64, f64) {
    let config = ExperimentConfig {
        scenario_kind: kind,
        num_seeds: seeds,
        params: SolverParams { max_iterations: iters, ..SolverParams::default() },
        ablations: ab,
    };
    let (_, rows) = run_gap_experiment(&config).unwrap();
    let mean_len = rows.iter().map(|r| r.ubat_len_m).sum::<f64>() / rows.len() as f64;
    let mean_nc = rows.iter().map(|r| r.ubat_nc as f64).sum::<f64>() / rows.len() as f64;
    (mean_len, mean_nc)
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let what = args.get(1).cloned().unwrap_or_else(|| "tuning".into());
    let iters: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(2000);
    let seeds: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(10);
    let kind = ScenarioKind::Semi2Uav;

    match what.as_str() {
        "tuning" => {
            let base = AblationFlags { two_opt: false, ..Default::default() };
            let on = run(kind, seeds, iters, base);
            let off = run(kind, seeds, iters, AblationFlags { tuning: false, ..base });
            println!(
                "tuning: len {:.0} vs {:.0} ({:+.2}%), nc {:.2} vs {:.2} ({:+.2}%)",
                on.0, off.0, (off.0 - on.0) / off.0 * 100.0,
                on.1, off.1, (off.1 - on.1) / off.1 * 100.0
            );
        }
        "twoopt" => {
            let on = run(kind, seeds, iters, AblationFlags::default());
            let off = run(kind, seeds, iters, AblationFlags { two_opt: false, ..Default::default() });
            println!(
                "two_opt: len {:.0} vs {:.0} ({:+.2}%), nc {:.2} vs {:.2}",
                on.0, off.0, (off.0 - on.0) / off.0 * 100.0, on.1, off.1
            );
        }
        other => panic!("unknown probe {other}"),
    }
}
