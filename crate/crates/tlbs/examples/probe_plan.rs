//! Isolate the station overhead of grid snapping: run the cell planner on
//! the oracle's optimal visit order and compare with the continuous optimum.

use std::collections::BTreeSet;

use tlbs::oracle::oracle_solve;
use tlbs::routing::{optimize_stations, plan_route, ChainObjective, PlanConfig};
use tlbs::scenario::generate_random;
use tlbs::Grid;

fn main() {
    let grid = Grid::new(20, 20, 1000.0).unwrap();
    let mut extra_nc = 0.0;
    let mut extra_len = 0.0;
    let n = 20;
    for seed in 0..n {
        let s = generate_random(seed, grid, 10).unwrap();
        let oracle = oracle_solve(&s).unwrap();
        let cfg = PlanConfig::for_scenario(&s);
        let order: Vec<_> =
            oracle.visit_order[0].iter().copied().filter(|&c| c != s.start).collect();
        let route = plan_route(&s, &cfg, s.start, &order, &BTreeSet::new(), None).unwrap();
        let exact =
            optimize_stations(&s, &cfg, s.start, &order, &BTreeSet::new(), None, ChainObjective::LengthFirst)
                .unwrap();
        let exact_nc =
            optimize_stations(&s, &cfg, s.start, &order, &BTreeSet::new(), None, ChainObjective::StationsFirst)
                .unwrap();
        println!(
            "seed {seed:2}: oracle len {:8.0} nc {:2} | greedy {:8.0}/{:2} | len-first {:8.0}/{:2} | nc-first {:8.0}/{:2}",
            oracle.path_len_m,
            oracle.nc,
            route.len_m,
            route.new_stations.len(),
            exact.len_m,
            exact.new_stations.len(),
            exact_nc.len_m,
            exact_nc.new_stations.len()
        );
        extra_nc += exact_nc.new_stations.len() as f64 - oracle.nc as f64;
        extra_len += exact_nc.len_m - oracle.path_len_m;
    }
    println!(
        "mean extra from snapping alone: {:+.2} stations, {:+.0} m",
        extra_nc / n as f64,
        extra_len / n as f64
    );
}
