//! Per-iteration timing breakdown: hull on/off x two-opt on/off.

use tlbs::bench::run_timing_cdf;
use tlbs::scenario::{generate_semi_random, Grid};
use tlbs::SolverParams;

fn main() {
    let grid = Grid::new(20, 20, 1000.0).unwrap();
    let scenario = generate_semi_random(1, grid, 2).unwrap();
    for two_opt in [false, true] {
        for hull in [false, true] {
            let params = SolverParams {
                use_two_opt: two_opt,
                q1: Some(25_000.0),
                q2: Some(3.0),
                ..SolverParams::default()
            };
            let cdf = run_timing_cdf(&scenario, &params, 200, hull).unwrap();
            println!(
                "two_opt={two_opt:5} hull={hull:5}: mean {:9.1} us, p50 {:9.1} us, p95 {:9.1} us",
                cdf.mean_s * 1e6,
                cdf.samples_s[cdf.samples_s.len() / 2] * 1e6,
                cdf.samples_s[cdf.samples_s.len() * 95 / 100] * 1e6
            );
        }
    }
}
