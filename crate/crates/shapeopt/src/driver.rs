//! Turns a [`RunConfig`] into finished artifacts: builds the problem, runs
//! the configured sweeps serially, filters the front, and writes the CSV
//! outputs and dumps.

use std::path::Path;

use crate::bspline::{gamma_to_rho_with, BSplineCoeffs};
use crate::config::{RunConfig, SweepMode};
use crate::error::{Error, Result};
use crate::fem::Material;
use crate::optim::{
    pareto_filter, run_biobjective_descent, run_weighted_sum, step_bound, Method, OptimConfig,
    ParetoPoint, RunHistory,
};
use crate::presets::CaseStudyPreset;
use crate::problem::ShapeProblem;
use crate::report::{
    front_csv, history_csv, history_filename, validation_csv, ValidationRow,
};

/// Everything a sweep produced, before and after dominance filtering.
pub struct SweepOutput {
    /// One point per run, in execution order.
    pub outcomes: Vec<ParetoPoint>,
    /// The nondominated subset, f1-ascending.
    pub front: Vec<ParetoPoint>,
    pub histories: Vec<(Method, f64, RunHistory)>,
}

/// Builds the shape problem a configuration describes.
pub fn build_problem(cfg: &RunConfig) -> Result<ShapeProblem> {
    let preset = preset_of(cfg);
    let material = Material::new(cfg.e, cfg.nu, cfg.m, cfg.sigma0, cfg.uts)?;
    let bc = crate::fem::BoundaryConditions {
        body_force: [0.0, 0.0],
        traction: cfg.gtilde,
    };
    let rule = crate::objectives::AngularRule::new(cfg.n_phi)?;
    Ok(ShapeProblem::new(preset.grid(), preset.basis(), material, bc, rule)?
        .with_xi(cfg.xi)
        .with_gradient_mode(cfg.gradient_mode)
        .with_solver_tol(cfg.solver_tol))
}

fn preset_of(cfg: &RunConfig) -> CaseStudyPreset {
    CaseStudyPreset {
        name: cfg.preset,
        n_x: cfg.n_x,
        n_y: cfg.n_y,
        n_basis: cfg.n_basis,
    }
}

/// Starting design and the step bound frozen from its first-column thickness.
pub fn start_design(cfg: &RunConfig, problem: &ShapeProblem) -> Result<(Vec<f64>, f64)> {
    let gamma0 = preset_of(cfg).start_gamma()?;
    let rho0 = gamma_to_rho_with(&BSplineCoeffs::from_flat(&gamma0), problem.bmat())?;
    let delta_max = step_bound(rho0.th[0], cfg.n_y, 0.8);
    Ok((gamma0, delta_max))
}

fn optim_config(cfg: &RunConfig, delta_max: f64) -> OptimConfig {
    OptimConfig {
        beta: cfg.beta,
        eps: cfg.eps,
        max_iter: cfg.max_iter,
        delta_max: Some(delta_max),
        weights: cfg.omegas.clone(),
        scalings: cfg.omega_bars.clone(),
        ..OptimConfig::default()
    }
}

/// Runs the configured sweeps serially and filters the front.
pub fn run_case_study(cfg: &RunConfig) -> Result<SweepOutput> {
    let problem = build_problem(cfg)?;
    let (gamma0, delta_max) = start_design(cfg, &problem)?;
    let ocfg = optim_config(cfg, delta_max);

    let mut outcomes = Vec::new();
    let mut histories = Vec::new();

    if matches!(cfg.mode, SweepMode::Wsm | SweepMode::Both) {
        for &omega in &ocfg.weights {
            log::info!("weighted-sum run, omega = {omega}");
            let history = run_weighted_sum(&problem, &gamma0, omega, &ocfg)?;
            outcomes.push(ParetoPoint::from_history(&history, Method::WeightedSum, omega));
            histories.push((Method::WeightedSum, omega, history));
        }
    }
    if matches!(cfg.mode, SweepMode::Moda | SweepMode::Both) {
        for &omega_bar in &ocfg.scalings {
            log::info!("biobjective-descent run, omega_bar = {omega_bar}");
            let history = run_biobjective_descent(&problem, &gamma0, omega_bar, &ocfg)?;
            outcomes.push(ParetoPoint::from_history(
                &history,
                Method::BiobjectiveDescent,
                omega_bar,
            ));
            histories.push((Method::BiobjectiveDescent, omega_bar, history));
        }
    }

    let front = pareto_filter(&outcomes);
    Ok(SweepOutput { outcomes, front, histories })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Validation {
        key: "output_dir".into(),
        message: format!("cannot write {}: {e}", path.display()),
    })
}

/// Writes `front.csv`, one history CSV per run, and the resolved
/// configuration into `dir`, creating it if needed.
pub fn write_outputs(cfg: &RunConfig, out: &SweepOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Validation {
        key: "output_dir".into(),
        message: format!("cannot create {}: {e}", dir.display()),
    })?;
    write_text(&dir.join("front.csv"), &front_csv(&out.front, 2 * cfg.n_basis))?;
    for (method, param, history) in &out.histories {
        write_text(&dir.join(history_filename(*method, *param)), &history_csv(history))?;
    }
    write_text(&dir.join("config.txt"), &cfg.to_file_string())?;
    Ok(())
}

/// The finite-difference widths probed by the gradient validation.
pub const VALIDATION_EPS: [f64; 6] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7];

fn component_name(objective: usize, j: usize, n_basis: usize) -> String {
    let (curve, idx) = if j < n_basis { ("ml", j) } else { ("th", j - n_basis) };
    format!("f{objective}_{curve}_{idx}")
}

/// Compares unadapted adjoint gradients against central finite differences
/// of both objectives over every coefficient and probe width.
pub fn validation_rows(cfg: &RunConfig) -> Result<Vec<ValidationRow>> {
    let problem = build_problem(cfg)?;
    let (gamma0, _) = start_design(cfg, &problem)?;
    let adjoint = problem.raw_gradients(&gamma0)?;
    let mut rows = Vec::new();
    for &eps in &VALIDATION_EPS {
        let fd = problem.fd_gradients(&gamma0, eps)?;
        for j in 0..gamma0.len() {
            rows.push(ValidationRow {
                component: component_name(1, j, cfg.n_basis),
                eps,
                abs_error: (adjoint.g1[j] - fd.g1[j]).abs(),
            });
            rows.push(ValidationRow {
                component: component_name(2, j, cfg.n_basis),
                eps,
                abs_error: (adjoint.g2[j] - fd.g2[j]).abs(),
            });
        }
    }
    Ok(rows)
}

/// Runs the gradient validation and writes `validation.csv` into `dir`.
pub fn write_validation(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let rows = validation_rows(cfg)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::Validation {
        key: "output_dir".into(),
        message: format!("cannot create {}: {e}", dir.display()),
    })?;
    write_text(&dir.join("validation.csv"), &validation_csv(&rows))
}
