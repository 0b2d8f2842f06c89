//! Track best-so-far convergence for one scenario seed.

use tlbs::bench::{run_iteration_sweep, ScenarioKind};
use tlbs::SolverParams;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let kind: ScenarioKind = args.get(1).map(|s| s.parse().unwrap()).unwrap();
    let seed: u64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(5);
    let iters: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(30_000);
    let roulette: bool = args.get(4).map(|s| s == "roulette").unwrap_or(false);

    let scenario = kind.generate(seed).unwrap();
    let params = SolverParams { seed, roulette_rois: roulette, ..SolverParams::default() };
    let checkpoints: Vec<usize> =
        [1, 100, 500, 1000, 3000, 10_000, 30_000, 100_000].iter().copied().filter(|&c| c <= iters).collect();
    let points = run_iteration_sweep(&scenario, &params, &checkpoints).unwrap();
    for p in points {
        println!("iter {:7}: best len {:9.0} nc {}", p.iteration, p.best_len_m, p.best_nc);
    }
    let oracle = tlbs::oracle_solve(&scenario).unwrap();
    println!("oracle: len {:9.0} nc {}", oracle.path_len_m, oracle.nc);
}
