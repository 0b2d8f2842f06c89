//! Joint optimization of multi-UAV coverage trajectories and battery-swap
//! station placement on a discretized field.
//!
//! The solver builds per-UAV waypoint paths over a set of regions of
//! interest with an ant-colony construction: targets are chosen by pheromone
//! and inverse distance, a UAV short on battery detours to a charging cell
//! chosen by pheromone and (direct) distance, and trails are updated by
//! evaporation plus a reinforcement that rewards short makespans and few
//! stations. Three enhancements sharpen it: convex-hull reduction of the
//! charging search space, iterative tuning of the reinforcement weights, and
//! a constrained 2-OPT correction of each constructed path.
//!
//! A brute-force permutation oracle provides exact ground truth on
//! decomposable instances, an energy-model validator checks any candidate
//! solution against the formal constraints, and a benchmark harness measures
//! optimality gaps, convergence and timing.

pub mod aco;
pub mod bench;
pub mod energy;
pub mod error;
pub mod geom;
pub mod hull;
pub mod oracle;
pub mod pheromone;
pub mod routing;
pub mod scenario;
pub mod tuning;
pub mod two_opt;

pub use aco::{solve, solve_observed, SolverParams};
pub use energy::{simulate, Solution, ValidationReport, Waypoint, WaypointKind};
pub use error::{Error, Result};
pub use oracle::{oracle_solve, OracleSolution};
pub use scenario::{generate_random, generate_semi_random, CellIndex, Grid, Scenario, UavConfig};
