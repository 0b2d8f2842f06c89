use crate::scenario::CellIndex;

/// Errors produced by scenario construction, the solver, the validator and
/// the exact oracle.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cell ({0}, {1}) outside {2}x{3} grid")]
    OutOfGrid(u32, u32, u32, u32),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("energy depleted: drain {drain_m} m exceeds residual {residual_m} m")]
    EnergyDepleted { residual_m: f64, drain_m: f64 },

    #[error("no reachable cell from ({}, {}) with residual {residual_m} m", .from.row, .from.col)]
    NoReachableCell { from: CellIndex, residual_m: f64 },

    #[error("construction stalled after {0} steps; instance looks infeasible")]
    ConstructionStalled(usize),

    #[error("malformed solution: {0}")]
    MalformedSolution(String),

    #[error("TSP instance with {n} ROIs exceeds brute-force cap {cap}")]
    TspTooLarge { n: usize, cap: usize },

    #[error("oracle refused: {0}")]
    OracleRefused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
