//! Iterative tuning of the reinforcement weights.
//!
//! The deposit `q1/maxL + q2/NC` should sit near `tau0`, otherwise trails
//! either saturate (deposits far above `tau0` freeze the search on the first
//! acceptable path) or wash out (deposits far below `tau0` never let a good
//! path accumulate credit). Each round runs a short warmup with the current
//! weights and replaces them with the intermediate best metrics themselves,
//! which lands the deposit at `O(tau0)` for solutions of that quality.

use crate::aco::{solve, SolverParams};
use crate::error::Result;
use crate::scenario::Scenario;

/// Run `rounds` tuning rounds of `warmup_iters` iterations each, starting
/// from arbitrary weights, and return the tuned `(q1, q2)`. A warmup that
/// deploys no stations sets `q2` to zero (no station pressure needed).
pub fn tune_parameters(
    scenario: &Scenario,
    base: &SolverParams,
    initial_q1: f64,
    initial_q2: f64,
    warmup_iters: usize,
    rounds: usize,
) -> Result<(f64, f64)> {
    let mut q1 = initial_q1;
    let mut q2 = initial_q2;
    for round in 0..rounds {
        let warmup = SolverParams {
            q1: Some(q1),
            q2: Some(q2),
            max_iterations: warmup_iters,
            use_two_opt: false,
            // Decorrelate rounds while staying deterministic overall.
            seed: base.seed.wrapping_add(round as u64),
            ..*base
        };
        let best = solve(scenario, &warmup)?;
        if best.max_path_len_m > 0.0 {
            q1 = best.max_path_len_m;
        }
        q2 = best.nc as f64;
    }
    Ok((q1, q2))
}
