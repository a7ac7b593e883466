//! Command-line front end: runs Pareto sweeps from a config file, exports
//! the gradient validation table, and dumps meshes and element stresses for
//! the built-in presets.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shapeopt::config::RunConfig;
use shapeopt::driver::{run_case_study, write_outputs, write_validation};
use shapeopt::error::Error;
use shapeopt::fem::solve_state;
use shapeopt::optim::RunStatus;
use shapeopt::presets::{CaseStudyPreset, PresetName};
use shapeopt::report::stress_dump;

#[derive(Parser)]
#[command(
    name = "shapeopt",
    about = "Biobjective shape optimization of 2D ceramic components: \
             failure probability versus material volume",
    version
)]
struct Cli {
    /// Overrides the output directory from the config file.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the configured optimization sweeps and writes front.csv plus one
    /// history CSV per run.
    Run {
        /// Path to a key = value config file.
        #[arg(long)]
        config: PathBuf,
    },
    /// Compares adjoint gradients against central finite differences over
    /// six probe widths and writes validation.csv.
    ValidateGradients {
        #[arg(long)]
        config: PathBuf,
    },
    /// Prints the mesh of a preset's starting shape to stdout.
    DumpMesh {
        /// Preset name: straight_joint or s_joint.
        #[arg(long)]
        preset: String,
    },
    /// Solves the preset's starting shape and prints per-element stresses
    /// (element_index sigma11 sigma12 sigma22 area) to stdout.
    DumpStress {
        #[arg(long)]
        preset: String,
    },
}

fn load_config(path: &Path, output_dir: Option<PathBuf>) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::from_file(path)?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    Ok(cfg)
}

fn start_mesh(preset: &str) -> Result<(CaseStudyPreset, shapeopt::geometry::Mesh), Error> {
    let preset = CaseStudyPreset::new(PresetName::parse(preset)?);
    let problem = preset.problem(shapeopt::objectives::N_PHI_DEFAULT)?;
    let gamma = preset.start_gamma()?;
    let (_, mesh) = problem.shape(&gamma)?;
    Ok((preset, mesh))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config } => {
            let cfg = load_config(&config, cli.output_dir)?;
            let out = run_case_study(&cfg)?;
            write_outputs(&cfg, &out, &cfg.output_dir)?;
            let converged = out
                .outcomes
                .iter()
                .filter(|p| p.status == RunStatus::Converged)
                .count();
            println!(
                "{} runs ({} converged), {} front points -> {}",
                out.outcomes.len(),
                converged,
                out.front.len(),
                cfg.output_dir.display()
            );
            Ok(())
        }
        Command::ValidateGradients { config } => {
            let cfg = load_config(&config, cli.output_dir)?;
            write_validation(&cfg, &cfg.output_dir)?;
            println!("validation.csv -> {}", cfg.output_dir.display());
            Ok(())
        }
        Command::DumpMesh { preset } => {
            let (_, mesh) = start_mesh(&preset)?;
            print!("{}", mesh.dump());
            Ok(())
        }
        Command::DumpStress { preset } => {
            let (preset, mesh) = start_mesh(&preset)?;
            let problem = preset.problem(shapeopt::objectives::N_PHI_DEFAULT)?;
            let state = solve_state(&mesh, &problem.material, &problem.bc)?;
            print!("{}", stress_dump(&state));
            Ok(())
        }
    }
}

/// Exit codes: 0 on success, 2 for configuration problems (parse or
/// validation), 1 for runtime failures.
fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (Error::Parse { .. } | Error::Validation { .. })) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
