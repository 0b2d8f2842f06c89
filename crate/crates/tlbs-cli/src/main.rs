//! `tlbs` command line: generate scenarios, run the solver, compute exact
//! baselines, validate solutions and reproduce the benchmark experiments.
//!
//! Exit codes: 0 success, 1 I/O or infeasibility, 2 usage, 3 oracle refusal.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use render::{render_svg, RenderSpec};
use tlbs::bench::{
    run_gap_experiment, run_iteration_sweep, run_timing_cdf, rows_to_csv, AblationFlags,
    ExperimentConfig, ScenarioKind,
};
use tlbs::energy::simulate;
use tlbs::oracle::{oracle_solve_with, DEFAULT_TSP_CAP};
use tlbs::scenario::{generate_random, generate_semi_random};
use tlbs::{solve, Grid, Scenario, Solution, SolverParams};

#[derive(Parser)]
#[command(
    name = "tlbs",
    about = "Joint optimization of multi-UAV coverage trajectories and battery swap stations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    /// 10 uniformly random ROIs, one UAV.
    Random1,
    /// 5 + 5 ROIs in the field halves, two UAVs.
    Semi2,
    /// 10 ROIs over the four quadrants, four UAVs.
    Semi4,
}

impl From<KindArg> for ScenarioKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Random1 => ScenarioKind::Random1Uav,
            KindArg::Semi2 => ScenarioKind::Semi2Uav,
            KindArg::Semi4 => ScenarioKind::Semi4Uav,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario JSON file.
    Gen(GenArgs),
    /// Solve a scenario and write the solution JSON (optionally an SVG).
    Solve(SolveArgs),
    /// Compute the exact baseline for a decomposable scenario.
    Oracle(OracleArgs),
    /// Validate a solution against the energy and coverage constraints.
    Validate(ValidateArgs),
    /// Run benchmark experiments (gap statistics, sweeps, timing).
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Scenario family to draw from.
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the scenario JSON.
    #[arg(long)]
    out: PathBuf,
    /// Grid rows.
    #[arg(long, default_value_t = 20)]
    rows: u32,
    /// Grid columns.
    #[arg(long, default_value_t = 20)]
    cols: u32,
    /// Cell side length in meters.
    #[arg(long, default_value_t = 1000.0)]
    cell_size_m: f64,
    /// ROI count (random1 only).
    #[arg(long, default_value_t = 10)]
    rois: usize,
}

#[derive(Args)]
struct SolveArgs {
    /// Scenario JSON produced by `gen` (or hand-written to the same schema).
    #[arg(long)]
    scenario: PathBuf,
    /// Solver parameter JSON; missing fields take the documented defaults.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Output path for the solution JSON.
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG rendering of the result.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Override the iteration budget.
    #[arg(long)]
    iterations: Option<usize>,
    /// Override the solver seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Output path for the oracle solution JSON.
    #[arg(long)]
    out: PathBuf,
    /// Close each tour back to its start.
    #[arg(long)]
    closed_tour: bool,
    /// Brute-force size cap (ROIs per region).
    #[arg(long, default_value_t = DEFAULT_TSP_CAP)]
    cap: usize,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    solution: PathBuf,
    /// Also write the report JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchMode {
    /// Gap statistics against the exact oracle (CSV + stats JSON).
    Gap,
    /// Best-so-far metrics at iteration checkpoints.
    Sweep,
    /// Per-iteration wall-time CDF, hull reduction on vs off.
    Timing,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "gap")]
    mode: BenchMode,
    /// Scenario family (gap mode).
    #[arg(long, value_enum, default_value = "semi2")]
    kind: KindArg,
    /// Number of seeds (gap mode).
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    /// Iteration budget per solve.
    #[arg(long)]
    iterations: Option<usize>,
    /// First seed / solver seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output (gap mode).
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Stats/curve/CDF JSON output.
    #[arg(long)]
    out_stats: Option<PathBuf>,
    /// Scenario JSON for sweep/timing modes (generated when omitted).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Sweep checkpoints, comma separated.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<usize>>,
    /// Timing sample count.
    #[arg(long, default_value_t = 100)]
    timing_iters: usize,
    /// Disable the convex-hull search-space reduction.
    #[arg(long)]
    no_hull: bool,
    /// Disable the 2-OPT path correction.
    #[arg(long)]
    no_two_opt: bool,
    /// Disable parameter tuning (fixed Q1 = Q2 = 1).
    #[arg(long)]
    no_tuning: bool,
}

fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating directory {}", dir.display()))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default(),
        std::process::id()
    ));
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let raw =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&raw).with_context(|| format!("parsing {what} from {}", path.display()))
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<()> {
    let grid = Grid::new(args.rows, args.cols, args.cell_size_m)?;
    let scenario = match args.kind {
        KindArg::Random1 => generate_random(args.seed, grid, args.rois)?,
        KindArg::Semi2 => generate_semi_random(args.seed, grid, 2)?,
        KindArg::Semi4 => generate_semi_random(args.seed, grid, 4)?,
    };
    write_atomic(&args.out, &serde_json::to_string_pretty(&scenario)?)?;
    println!("wrote {} ({} ROIs, {} UAVs)", args.out.display(), scenario.rois.len(), scenario.num_uavs);
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> anyhow::Result<()> {
    let scenario: Scenario = read_json(&args.scenario, "scenario")?;
    scenario.validate()?;
    let mut params: SolverParams = match &args.params {
        Some(p) => read_json(p, "solver parameters")?,
        None => SolverParams::default(),
    };
    if let Some(iters) = args.iterations {
        params.max_iterations = iters;
    }
    if let Some(seed) = args.seed {
        params.seed = seed;
    }
    let solution = solve(&scenario, &params)?;
    write_atomic(&args.out, &serde_json::to_string_pretty(&solution)?)?;
    if let Some(svg_path) = &args.svg {
        let spec = RenderSpec { show_hull: params.use_hull_reduction, ..RenderSpec::default() };
        write_atomic(svg_path, &render_svg(&scenario, Some(&solution), &spec))?;
    }
    println!(
        "max_len_m={:.1} nc={} iters={}",
        solution.max_path_len_m, solution.nc, params.max_iterations
    );
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> anyhow::Result<()> {
    let scenario: Scenario = read_json(&args.scenario, "scenario")?;
    scenario.validate()?;
    let oracle = oracle_solve_with(&scenario, args.cap, args.closed_tour)?;
    write_atomic(&args.out, &serde_json::to_string_pretty(&oracle)?)?;
    println!("path_len_m={:.1} nc={}", oracle.path_len_m, oracle.nc);
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> anyhow::Result<bool> {
    let scenario: Scenario = read_json(&args.scenario, "scenario")?;
    scenario.validate()?;
    let solution: Solution = read_json(&args.solution, "solution")?;
    let report = simulate(&scenario, &solution)?;
    let rendered = serde_json::to_string_pretty(&report)?;
    println!("{rendered}");
    if let Some(out) = &args.out {
        write_atomic(out, &rendered)?;
    }
    Ok(report.passed)
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    let mut params = SolverParams { seed: args.seed, ..SolverParams::default() };
    if let Some(iters) = args.iterations {
        params.max_iterations = iters;
    }
    match args.mode {
        BenchMode::Gap => {
            let config = ExperimentConfig {
                scenario_kind: ScenarioKind::from(args.kind),
                num_seeds: args.seeds,
                params,
                ablations: AblationFlags {
                    hull: !args.no_hull,
                    tuning: !args.no_tuning,
                    two_opt: !args.no_two_opt,
                },
            };
            let (stats, rows) = run_gap_experiment(&config)?;
            if let Some(csv) = &args.out_csv {
                write_atomic(csv, &rows_to_csv(&rows))?;
            }
            let stats_json = serde_json::to_string_pretty(&stats)?;
            if let Some(out) = &args.out_stats {
                write_atomic(out, &stats_json)?;
            }
            println!("{stats_json}");
        }
        BenchMode::Sweep => {
            let scenario = load_or_generate(args)?;
            let checkpoints = args
                .checkpoints
                .clone()
                .unwrap_or_else(|| vec![1, 100, 750, 1000, 3000, 10_000, 30_000]);
            let points = run_iteration_sweep(&scenario, &params, &checkpoints)?;
            let json = serde_json::to_string_pretty(&points)?;
            if let Some(out) = &args.out_stats {
                write_atomic(out, &json)?;
            }
            println!("{json}");
        }
        BenchMode::Timing => {
            let scenario = load_or_generate(args)?;
            let on = run_timing_cdf(&scenario, &params, args.timing_iters, true)?;
            let off = run_timing_cdf(&scenario, &params, args.timing_iters, false)?;
            let json = serde_json::json!({
                "hull_on": on,
                "hull_off": off,
                "speedup_pct": (off.mean_s - on.mean_s) / off.mean_s * 100.0,
            });
            let rendered = serde_json::to_string_pretty(&json)?;
            if let Some(out) = &args.out_stats {
                write_atomic(out, &rendered)?;
            }
            println!("{rendered}");
        }
    }
    Ok(())
}

fn load_or_generate(args: &BenchArgs) -> anyhow::Result<Scenario> {
    match &args.scenario {
        Some(path) => {
            let s: Scenario = read_json(path, "scenario")?;
            s.validate()?;
            Ok(s)
        }
        None => Ok(ScenarioKind::from(args.kind).generate(args.seed)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Validate(args) => match cmd_validate(args) {
            Ok(true) => Ok(()),
            Ok(false) => {
                eprintln!("validation failed");
                return ExitCode::from(1);
            }
            Err(e) => Err(e),
        },
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(tlbs::Error::OracleRefused(_)) = e.downcast_ref::<tlbs::Error>() {
                eprintln!("error: {e:#}");
                return ExitCode::from(3);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
