//! `bswet`: runs the energy-beamforming experiments from a scenario file and
//! writes CSV/JSON artifacts plus a `manifest.json`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver did not converge,
//! 4 Monte Carlo validation failed.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bswet_core::allocator::{antenna_sweep, solve_pfe, solve_single_er, solve_wse, BcdOptions};
use bswet_core::config::{load_scenario, Grid};
use bswet_core::experiments::{check_oracle, distance_sweep, oracle_points, OraclePoint};
use bswet_core::montecarlo::{simulate_sweep, McConfig};
use bswet_core::report;
use bswet_core::{Allocation, PathLossModel, Scenario, WetError};

use manifest::Manifest;

#[derive(Parser)]
#[command(name = "bswet", version, about = "Energy beamforming with estimated backscatter channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulated and closed-form energy over a training-energy grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Beam weights, comma separated; uniform when omitted.
        #[arg(long, value_delimiter = ',')]
        xi: Option<Vec<f64>>,
    },
    /// Optimal training energy for a single ER.
    OptimizeSingle(Common),
    /// Weighted-sum-energy allocation.
    OptimizeWse(Common),
    /// Proportional-fair allocation by block coordinate descent.
    OptimizePfe(Common),
    /// Proportional-fair optimum as the last ER moves away, with simulation check.
    Table1 {
        #[command(flatten)]
        common: Common,
        /// Distances (m) for the last ER.
        #[arg(long, value_delimiter = ',', default_value = "4,5,6,7,8")]
        distances: Vec<f64>,
    },
    /// Weighted-sum and proportional-fair energies against the antenna count.
    AntennaSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8")]
        antennas: Vec<usize>,
    },
    /// Monte Carlo against the closed form at the built-in oracle points
    /// (plus the scenario, if given); fails on any 3-sigma violation.
    ValidateMc(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo runs per point.
    #[arg(long, default_value_t = 100_000)]
    runs: usize,
    /// Training-energy grid `start:stop:step` in joules.
    #[arg(long)]
    q_grid: Option<Grid>,
    /// BCD stopping threshold on the objective change.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    /// BCD iteration cap.
    #[arg(long, default_value_t = 1000)]
    max_iterations: usize,
}

enum Failure {
    Config(anyhow::Error),
    NonConvergence(anyhow::Error),
    Validation(anyhow::Error),
    Other(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::NonConvergence(_) => 3,
            Failure::Validation(_) => 4,
            Failure::Other(_) => 1,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::NonConvergence(e) | Failure::Validation(e) | Failure::Other(e) => e,
        }
    }
}

impl From<WetError> for Failure {
    fn from(e: WetError) -> Self {
        match e {
            WetError::InvalidField { .. }
            | WetError::Parse(_)
            | WetError::TrainingEnergy { .. }
            | WetError::InfeasibleWeights(_)
            | WetError::Unsupported(_) => Failure::Config(e.into()),
            _ => Failure::Other(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}

fn scenario_of(common: &Common) -> Result<Scenario, Failure> {
    let path = common
        .scenario
        .as_ref()
        .ok_or_else(|| Failure::Config(anyhow!("--scenario is required for this command")))?;
    Ok(load_scenario(path)?)
}

fn bcd_options(common: &Common) -> BcdOptions {
    BcdOptions {
        epsilon: common.epsilon,
        max_iterations: common.max_iterations,
        ..Default::default()
    }
}

fn mc_config(common: &Common) -> McConfig {
    McConfig {
        runs: common.runs,
        seed: common.seed,
        pilot_repetitions: 1,
    }
}

struct Output<'a> {
    dir: &'a Path,
    manifest: Manifest,
}

impl<'a> Output<'a> {
    fn new(command: &str, common: &'a Common) -> Result<Self, Failure> {
        fs::create_dir_all(&common.out)
            .with_context(|| format!("creating {}", common.out.display()))?;
        let manifest = Manifest::new(command, common.scenario.as_deref(), common.seed, common.runs, common.epsilon, common.q_grid)
            .map_err(Failure::Config)?;
        Ok(Self {
            dir: &common.out,
            manifest,
        })
    }

    fn write(&mut self, name: &str, body: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let body = report::to_json(value)?;
        self.write(name, &body)
    }

    fn finish(self) -> Outcome {
        let path = self.dir.join("manifest.json");
        fs::write(&path, report::to_json(&self.manifest)?).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Sweep { common, xi } => {
            let s = scenario_of(&common)?;
            let grid = common
                .q_grid
                .ok_or_else(|| Failure::Config(anyhow!("sweep needs --q-grid start:stop:step")))?;
            let xi = match xi {
                Some(xi) => xi,
                None => vec![1.0 / s.num_ers() as f64; s.num_ers()],
            };
            let rows = simulate_sweep(&s, &grid.points(), &xi, &mc_config(&common))?;
            let mut out = Output::new("sweep", &common)?;
            out.write("sweep.csv", &report::sweep_csv(&rows)?)?;
            out.finish()
        }
        Command::OptimizeSingle(common) => {
            let s = scenario_of(&common)?;
            let r = solve_single_er(&s)?;
            print_allocation(&r.allocation, &r.per_er_energy);
            let mut out = Output::new("optimize-single", &common)?;
            out.json("result.json", &r)?;
            out.finish()
        }
        Command::OptimizeWse(common) => {
            let s = scenario_of(&common)?;
            let r = solve_wse(&s)?;
            print_allocation(&r.allocation, &r.per_er_energy);
            let mut out = Output::new("optimize-wse", &common)?;
            out.json("result.json", &r)?;
            out.finish()
        }
        Command::OptimizePfe(common) => {
            let s = scenario_of(&common)?;
            let (r, trace) = solve_pfe(&s, &bcd_options(&common))?;
            print_allocation(&r.allocation, &r.per_er_energy);
            let mut out = Output::new("optimize-pfe", &common)?;
            #[derive(Serialize)]
            struct PfeOutput<'a> {
                result: &'a bswet_core::allocator::SolveResult,
                trace: &'a bswet_core::allocator::BcdTrace,
            }
            out.json("result.json", &PfeOutput { result: &r, trace: &trace })?;
            out.finish()?;
            if !r.converged {
                return Err(Failure::NonConvergence(anyhow!(
                    "BCD stopped after {} iterations without converging; trace in result.json",
                    r.iterations
                )));
            }
            Ok(())
        }
        Command::Table1 { common, distances } => {
            let s = scenario_of(&common)?;
            let mc = (common.runs > 0).then(|| mc_config(&common));
            let rows = distance_sweep(&s, &PathLossModel::default(), &distances, &bcd_options(&common), mc.as_ref())?;
            let mut out = Output::new("table1", &common)?;
            out.write("table1.csv", &report::distance_csv(&rows)?)?;
            out.json("table1.json", &rows)?;
            if let Some(bad) = rows.iter().find(|r| !r.converged) {
                let traces: Vec<_> = rows.iter().map(|r| (r.d2, &r.trace)).collect();
                out.json("traces.json", &traces)?;
                out.finish()?;
                return Err(Failure::NonConvergence(anyhow!("BCD did not converge at d2 = {} m", bad.d2)));
            }
            out.finish()
        }
        Command::AntennaSweep { common, antennas } => {
            let s = scenario_of(&common)?;
            let points = antenna_sweep(&s, &antennas, &bcd_options(&common))?;
            let mut out = Output::new("antenna-sweep", &common)?;
            out.write("antenna_sweep.csv", &report::antenna_csv(&points)?)?;
            out.json("antenna_sweep.json", &points)?;
            out.finish()?;
            if let Some(p) = points.iter().find(|p| !p.pfe.converged) {
                return Err(Failure::NonConvergence(anyhow!("BCD did not converge at M = {}", p.antennas)));
            }
            Ok(())
        }
        Command::ValidateMc(common) => {
            let mut points = oracle_points();
            if common.scenario.is_some() {
                let s = scenario_of(&common)?;
                for frac in [0.01, 0.05, 0.2] {
                    let q = frac * s.frame_energy();
                    points.push(OraclePoint {
                        label: format!("scenario q={q}"),
                        allocation: Allocation::uniform(&s, q)?,
                        scenario: s.clone(),
                    });
                }
            }
            let checks = check_oracle(&points, &mc_config(&common), 3.0)?;
            let mut out = Output::new("validate-mc", &common)?;
            out.write("oracle.csv", &report::oracle_csv(&checks)?)?;
            out.finish()?;
            let failed = checks.iter().filter(|c| !c.pass).count();
            println!("{} comparisons, {} outside 3 standard errors", checks.len(), failed);
            if failed > 0 {
                return Err(Failure::Validation(anyhow!("{failed} Monte Carlo checks failed; see oracle.csv")));
            }
            Ok(())
        }
    }
}

fn print_allocation(a: &Allocation, energy: &[f64]) {
    let xi: Vec<String> = a.xi.iter().map(|x| format!("{x:.4}")).collect();
    let e: Vec<String> = energy.iter().map(|e| format!("{e:.4e}")).collect();
    println!("q = {:.4} J, xi = [{}], energy = [{}] J", a.q, xi.join(", "), e.join(", "));
}
