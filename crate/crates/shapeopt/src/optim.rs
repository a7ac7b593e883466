//! Pareto-front drivers: weighted-sum gradient descent and biobjective
//! steepest descent with closed-form quadratic-program search directions,
//! backtracking line searches, step clamping, and dominance filtering.

use crate::error::{Error, Result};
use crate::gradients::GradientPair;
use crate::objectives::ObjectivePair;

/// Anything the drivers can optimize: objective values and (possibly
/// metric-adapted) gradients as functions of a flat design vector.
pub trait BiobjectiveProblem {
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Result<ObjectivePair>;
    fn gradients(&self, x: &[f64]) -> Result<GradientPair>;
}

/// Algorithmic knobs shared by both drivers.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimConfig {
    /// Armijo sufficient-decrease constant, in (0, 1).
    pub beta: f64,
    /// Stopping tolerance on the Euclidean norm of the accepted update t*d.
    pub eps: f64,
    pub max_iter: usize,
    /// Cap on step halvings per line search.
    pub max_armijo: u32,
    /// Fraction of the initial first-column thickness per grid row allowed
    /// as the largest single-coefficient step.
    pub delta_factor: f64,
    /// Upper bound on |d|_inf per iteration; None disables clamping.
    pub delta_max: Option<f64>,
    /// Weighted-sum weights omega, each in (0, 1).
    pub weights: Vec<f64>,
    /// Biobjective-descent scalings omega_bar, each > 0.
    pub scalings: Vec<f64>,
    /// Weighted-sum normalization constants; None means 1/f_j at the start.
    pub c1: Option<f64>,
    pub c2: Option<f64>,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            beta: 1e-4,
            eps: 1e-4,
            max_iter: 600,
            max_armijo: 30,
            delta_factor: 0.8,
            delta_max: None,
            weights: (4..=18).map(|i| i as f64 / 20.0).collect(),
            scalings: (5..=20).map(|i| i as f64 / 10.0).collect(),
            c1: None,
            c2: None,
        }
    }
}

/// One accepted iterate of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub f1: f64,
    pub f2: f64,
    /// Accepted step length t_k (0 for the starting record).
    pub step: f64,
    /// Euclidean norm of the clamped direction.
    pub dir_norm: f64,
    /// Max norm of the clamped direction; bounded by delta_max when clamping.
    pub dir_inf: f64,
    pub armijo_halvings: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIter,
    StepFailure,
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RunStatus::Converged => "Converged",
            RunStatus::MaxIter => "MaxIter",
            RunStatus::StepFailure => "StepFailure",
        };
        f.write_str(s)
    }
}

/// Full trace of one optimization run.
#[derive(Debug, Clone)]
pub struct RunHistory {
    pub records: Vec<IterationRecord>,
    pub final_gamma: Vec<f64>,
    pub status: RunStatus,
}

impl RunHistory {
    #[must_use]
    pub fn final_objectives(&self) -> ObjectivePair {
        let last = self.records.last().expect("runs record at least the start");
        ObjectivePair { f1: last.f1, f2: last.f2 }
    }
}

/// Which driver produced a front point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    WeightedSum,
    BiobjectiveDescent,
}

impl Method {
    #[must_use]
    pub fn tag(&self) -> &'static str {
        match self {
            Method::WeightedSum => "wsm",
            Method::BiobjectiveDescent => "moda",
        }
    }
}

/// Outcome of one run in objective space, with its design and provenance.
#[derive(Debug, Clone)]
pub struct ParetoPoint {
    pub f1: f64,
    pub f2: f64,
    pub gamma: Vec<f64>,
    pub method: Method,
    /// The run parameter: omega for the weighted sum, omega_bar otherwise.
    pub param: f64,
    pub converged: bool,
    /// Accepted steps taken by the producing run.
    pub iterations: usize,
    pub status: RunStatus,
}

impl ParetoPoint {
    /// Labels a finished run with its provenance.
    #[must_use]
    pub fn from_history(history: &RunHistory, method: Method, param: f64) -> Self {
        let f = history.final_objectives();
        ParetoPoint {
            f1: f.f1,
            f2: f.f2,
            gamma: history.final_gamma.clone(),
            method,
            param,
            converged: history.status == RunStatus::Converged,
            iterations: history.records.last().map_or(0, |r| r.k),
            status: history.status,
        }
    }
}

/// Exact minimizer of `min_d rho + ||d||^2 / 2` subject to `g_j^T d <= rho`,
/// via the one-dimensional dual: `lambda* = clamp((g2-g1)^T g2 / ||g1-g2||^2)`
/// and `d = -(lambda* g1 + (1-lambda*) g2)`. Returns `(d, rho)` with
/// `rho = max_j g_j^T d`; `rho < 0` iff `d != 0` (Pareto criticality test).
#[must_use]
pub fn steepest_direction_qp(g1: &[f64], g2: &[f64]) -> (Vec<f64>, f64) {
    assert_eq!(g1.len(), g2.len(), "gradient dimension mismatch");
    let diff_sq: f64 = g1.iter().zip(g2).map(|(a, b)| (a - b) * (a - b)).sum();
    let lambda = if diff_sq == 0.0 {
        0.5
    } else {
        let num: f64 = g1.iter().zip(g2).map(|(a, b)| (b - a) * b).sum();
        (num / diff_sq).clamp(0.0, 1.0)
    };
    let d: Vec<f64> = g1
        .iter()
        .zip(g2)
        .map(|(a, b)| -(lambda * a + (1.0 - lambda) * b))
        .collect();
    let dot = |g: &[f64]| g.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
    let rho = dot(g1).max(dot(g2));
    (d, rho)
}

/// Step bound `delta_max = delta_factor * th_first / n_y`, from the initial
/// shape's first thickness value; frozen for the whole run.
#[must_use]
pub fn step_bound(rho_th_initial_first: f64, n_y: usize, delta_factor: f64) -> f64 {
    delta_factor * rho_th_initial_first / n_y as f64
}

/// Rescales `d` so its max norm does not exceed `delta_max`.
#[must_use]
pub fn clamp_direction(d: &[f64], delta_max: f64) -> Vec<f64> {
    let max = d.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    if max > delta_max {
        let s = delta_max / max;
        d.iter().map(|v| v * s).collect()
    } else {
        d.to_vec()
    }
}

/// Scaling `s = omega_bar * r_max` with `r_max` the largest componentwise
/// gradient ratio `|g1_i| / |g2_i|` over entries where `|g2_i| > 1e-14`.
/// The biobjective descent then runs on the pair `(g1, s * g2)`.
pub fn scaling_parameter(g1_start: &[f64], g2_start: &[f64], omega_bar: f64) -> Result<f64> {
    let mut r_max: Option<f64> = None;
    for (a, b) in g1_start.iter().zip(g2_start) {
        if b.abs() > 1e-14 {
            let r = a.abs() / b.abs();
            r_max = Some(r_max.map_or(r, |cur: f64| cur.max(r)));
        }
    }
    let r_max = r_max.ok_or(Error::AllRatiosUndefined)?;
    if r_max == 0.0 {
        log::warn!("start is critical for the first objective; scaling degenerates to 0");
    }
    Ok(omega_bar * r_max)
}

/// An accepted backtracking step.
#[derive(Debug, Clone)]
pub struct AcceptedStep {
    pub t: f64,
    pub halvings: u32,
    pub x: Vec<f64>,
    pub f: ObjectivePair,
}

/// Backtracking line search accepting the largest `t` in `{1, 1/2, 1/4, ...}`
/// with `f_j(x + t d) <= f_j(x) + beta t slope_j` for BOTH objectives, where
/// `slope_j = g_j^T d < 0`. Candidates with infeasible shapes count as failed
/// checks. Errors with `StepFailure` after `max_armijo` halvings.
#[allow(clippy::too_many_arguments)]
pub fn armijo_biobjective<P: BiobjectiveProblem>(
    problem: &P,
    x: &[f64],
    f_current: ObjectivePair,
    slope1: f64,
    slope2: f64,
    d: &[f64],
    beta: f64,
    max_armijo: u32,
) -> Result<AcceptedStep> {
    debug_assert!(slope1 < 0.0 && slope2 < 0.0, "d must be a common descent direction");
    let mut t = 1.0;
    for halvings in 0..=max_armijo {
        let candidate: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + t * di).collect();
        match problem.evaluate(&candidate) {
            Ok(f) => {
                let ok1 = f.f1 <= f_current.f1 + beta * t * slope1;
                let ok2 = f.f2 <= f_current.f2 + beta * t * slope2;
                if ok1 && ok2 {
                    return Ok(AcceptedStep { t, halvings, x: candidate, f });
                }
            }
            Err(e) if e.is_infeasible_shape() => {}
            Err(e) => return Err(e),
        }
        t /= 2.0;
    }
    Err(Error::StepFailure { max_halvings: max_armijo })
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

fn start_record(f: ObjectivePair) -> IterationRecord {
    IterationRecord { k: 0, f1: f.f1, f2: f.f2, step: 0.0, dir_norm: 0.0, dir_inf: 0.0, armijo_halvings: 0 }
}

/// Weighted-sum gradient descent: minimizes the normalized blend
/// `F = (omega c1 f1 + (1-omega) c2 f2) / F(start)` by steepest descent with
/// clamped directions and a scalar backtracking search. One objective may
/// temporarily deteriorate as long as the blend decreases.
pub fn run_weighted_sum<P: BiobjectiveProblem>(
    problem: &P,
    x0: &[f64],
    omega: f64,
    cfg: &OptimConfig,
) -> Result<RunHistory> {
    assert!(omega > 0.0 && omega < 1.0, "omega must lie in (0, 1)");
    let f0 = problem.evaluate(x0)?;
    let c1 = cfg.c1.unwrap_or_else(|| if f0.f1 > 0.0 { 1.0 / f0.f1 } else { 1.0 });
    let c2 = cfg.c2.unwrap_or_else(|| if f0.f2 > 0.0 { 1.0 / f0.f2 } else { 1.0 });
    let blend0 = omega * c1 * f0.f1 + (1.0 - omega) * c2 * f0.f2;
    // Normalizing by the start value makes iterates invariant to a common
    // rescaling of (c1, c2); the blend of the start is then exactly 1.
    let blend = move |f: &ObjectivePair| (omega * c1 * f.f1 + (1.0 - omega) * c2 * f.f2) / blend0;

    let mut x = x0.to_vec();
    let mut f = f0;
    let mut records = vec![start_record(f)];
    let mut status = RunStatus::MaxIter;

    for k in 1..=cfg.max_iter {
        let g = problem.gradients(&x)?;
        let g_blend: Vec<f64> = g
            .g1
            .iter()
            .zip(&g.g2)
            .map(|(a, b)| (omega * c1 * a + (1.0 - omega) * c2 * b) / blend0)
            .collect();
        if norm_inf(&g_blend) == 0.0 {
            status = RunStatus::Converged;
            break;
        }
        let raw: Vec<f64> = g_blend.iter().map(|v| -v).collect();
        let d = match cfg.delta_max {
            Some(dm) => clamp_direction(&raw, dm),
            None => raw,
        };
        let slope: f64 = g_blend.iter().zip(&d).map(|(a, b)| a * b).sum();

        let f_cur_blend = blend(&f);
        let mut t = 1.0;
        let mut accepted = None;
        for halvings in 0..=cfg.max_armijo {
            let candidate: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect();
            match problem.evaluate(&candidate) {
                Ok(fc) => {
                    if blend(&fc) <= f_cur_blend + cfg.beta * t * slope {
                        accepted = Some(AcceptedStep { t, halvings, x: candidate, f: fc });
                        break;
                    }
                }
                Err(e) if e.is_infeasible_shape() => {}
                Err(e) => return Err(e),
            }
            t /= 2.0;
        }
        let Some(step) = accepted else {
            status = RunStatus::StepFailure;
            break;
        };
        x = step.x;
        f = step.f;
        records.push(IterationRecord {
            k,
            f1: f.f1,
            f2: f.f2,
            step: step.t,
            dir_norm: norm2(&d),
            dir_inf: norm_inf(&d),
            armijo_halvings: step.halvings,
        });
        if step.t * norm2(&d) <= cfg.eps {
            status = RunStatus::Converged;
            break;
        }
    }

    Ok(RunHistory { records, final_gamma: x, status })
}

/// Biobjective steepest descent: common descent directions from
/// [`steepest_direction_qp`] on the pair `(g1, s g2)` with `s` frozen at the
/// start, clamped steps, and the two-objective backtracking search. Every
/// accepted iterate strictly decreases both objectives.
pub fn run_biobjective_descent<P: BiobjectiveProblem>(
    problem: &P,
    x0: &[f64],
    omega_bar: f64,
    cfg: &OptimConfig,
) -> Result<RunHistory> {
    assert!(omega_bar > 0.0, "omega_bar must be positive");
    let f0 = problem.evaluate(x0)?;
    let g0 = problem.gradients(x0)?;
    let s = scaling_parameter(&g0.g1, &g0.g2, omega_bar)?;

    let mut x = x0.to_vec();
    let mut f = f0;
    let mut g = g0;
    let mut records = vec![start_record(f)];
    let mut status = RunStatus::MaxIter;

    for k in 1..=cfg.max_iter {
        let g2_scaled: Vec<f64> = g.g2.iter().map(|v| s * v).collect();
        let (raw, rho) = steepest_direction_qp(&g.g1, &g2_scaled);
        if rho >= 0.0 || norm_inf(&raw) == 0.0 {
            status = RunStatus::Converged;
            break;
        }
        let d = match cfg.delta_max {
            Some(dm) => clamp_direction(&raw, dm),
            None => raw,
        };
        // Sufficient decrease is checked on the unscaled objectives; the
        // condition for s*f2 divides through by s > 0.
        let slope1: f64 = g.g1.iter().zip(&d).map(|(a, b)| a * b).sum();
        let slope2: f64 = g.g2.iter().zip(&d).map(|(a, b)| a * b).sum();
        match armijo_biobjective(problem, &x, f, slope1, slope2, &d, cfg.beta, cfg.max_armijo) {
            Ok(step) => {
                x = step.x;
                f = step.f;
                records.push(IterationRecord {
                    k,
                    f1: f.f1,
                    f2: f.f2,
                    step: step.t,
                    dir_norm: norm2(&d),
                    dir_inf: norm_inf(&d),
                    armijo_halvings: step.halvings,
                });
                if step.t * norm2(&d) <= cfg.eps {
                    status = RunStatus::Converged;
                    break;
                }
            }
            Err(Error::StepFailure { .. }) => {
                status = RunStatus::StepFailure;
                break;
            }
            Err(e) => return Err(e),
        }
        g = problem.gradients(&x)?;
    }

    Ok(RunHistory { records, final_gamma: x, status })
}

/// Keeps exactly the nondominated points (componentwise <= with at least one
/// strict <), ordered by f1 ascending; exact duplicate objective pairs keep
/// the first occurrence. Sort-and-scan, O(n log n).
#[must_use]
pub fn pareto_filter(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .f1
            .total_cmp(&points[b].f1)
            .then(points[a].f2.total_cmp(&points[b].f2))
            .then(a.cmp(&b))
    });
    let mut survivors = Vec::new();
    let mut best_f2 = f64::INFINITY;
    let mut i = 0;
    while i < order.len() {
        // Group of equal f1; its head (minimal f2, then minimal index)
        // dominates or duplicates the rest of the group.
        let f1 = points[order[i]].f1;
        let head = order[i];
        while i < order.len() && points[order[i]].f1 == f1 {
            i += 1;
        }
        if points[head].f2 < best_f2 {
            survivors.push(points[head].clone());
            best_f2 = points[head].f2;
        }
    }
    survivors
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    /// Two shifted paraboloids on R^2; gradients are exact.
    struct ToyQuadratics {
        center1: [f64; 2],
        center2: [f64; 2],
    }

    impl BiobjectiveProblem for ToyQuadratics {
        fn dim(&self) -> usize {
            2
        }
        fn evaluate(&self, x: &[f64]) -> Result<ObjectivePair> {
            let sq = |c: &[f64; 2]| (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
            Ok(ObjectivePair { f1: sq(&self.center1), f2: sq(&self.center2) })
        }
        fn gradients(&self, x: &[f64]) -> Result<GradientPair> {
            let g = |c: &[f64; 2]| vec![2.0 * (x[0] - c[0]), 2.0 * (x[1] - c[1])];
            Ok(GradientPair { g1: g(&self.center1), g2: g(&self.center2) })
        }
    }

    #[test]
    fn qp_identical_gradients() {
        let g = vec![2.0, 1.0];
        let (d, rho) = steepest_direction_qp(&g, &g);
        assert_eq!(d, vec![-2.0, -1.0]);
        assert_relative_eq!(rho, -5.0, max_relative = 1e-15);
    }

    #[test]
    fn qp_orthogonal_gradients() {
        let (d, rho) = steepest_direction_qp(&[1.0, 0.0], &[0.0, 1.0]);
        assert_relative_eq!(d[0], -0.5, max_relative = 1e-15);
        assert_relative_eq!(d[1], -0.5, max_relative = 1e-15);
        assert_relative_eq!(rho, -0.5, max_relative = 1e-15);
    }

    #[test]
    fn qp_opposing_gradients_is_critical() {
        let (d, rho) = steepest_direction_qp(&[1.0, 0.0], &[-1.0, 0.0]);
        assert_eq!(norm_inf(&d), 0.0);
        assert!(rho >= 0.0 && rho == 0.0);
    }

    #[test]
    fn qp_satisfies_kkt_on_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let g1: Vec<f64> = (0..10).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let g2: Vec<f64> = (0..10).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let (d, rho) = steepest_direction_qp(&g1, &g2);
            let dot = |g: &[f64]| g.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
            // Primal feasibility by construction; criticality certificate:
            let d_zero = norm_inf(&d) == 0.0;
            assert_eq!(rho < 0.0, !d_zero);
            assert!(dot(&g1) <= rho + 1e-12);
            assert!(dot(&g2) <= rho + 1e-12);
            // Dual optimality: no convex combination of the gradients is
            // shorter than the negated direction.
            let d_sq: f64 = d.iter().map(|v| v * v).sum();
            for i in 0..=100 {
                let lam = i as f64 / 100.0;
                let comb_sq: f64 = g1
                    .iter()
                    .zip(&g2)
                    .map(|(a, b)| (lam * a + (1.0 - lam) * b).powi(2))
                    .sum();
                assert!(d_sq <= comb_sq + 1e-12);
            }
        }
    }

    #[test]
    fn armijo_quadratic_halves_once() {
        // f1 = f2 = |x|^2 at x = (1, 0), d = -grad, beta = 0.1: t = 1 fails
        // (1 > 0.6), t = 1/2 lands at the origin (0 <= 0.8).
        let toy = ToyQuadratics { center1: [0.0, 0.0], center2: [0.0, 0.0] };
        let x = [1.0, 0.0];
        let f = toy.evaluate(&x).unwrap();
        let g = toy.gradients(&x).unwrap();
        let d = vec![-2.0, 0.0];
        let slope: f64 = g.g1.iter().zip(&d).map(|(a, b)| a * b).sum();
        let step = armijo_biobjective(&toy, &x, f, slope, slope, &d, 0.1, 30).unwrap();
        assert_eq!(step.t, 0.5);
        assert_eq!(step.halvings, 1);
        assert_eq!(step.x, vec![0.0, 0.0]);
    }

    #[test]
    fn armijo_accepts_full_step_on_linear_objectives() {
        struct Linear;
        impl BiobjectiveProblem for Linear {
            fn dim(&self) -> usize {
                2
            }
            fn evaluate(&self, x: &[f64]) -> Result<ObjectivePair> {
                Ok(ObjectivePair { f1: x[0] + 2.0 * x[1], f2: 3.0 * x[0] - x[1] })
            }
            fn gradients(&self, _x: &[f64]) -> Result<GradientPair> {
                Ok(GradientPair { g1: vec![1.0, 2.0], g2: vec![3.0, -1.0] })
            }
        }
        let x = [0.3, -0.2];
        let f = Linear.evaluate(&x).unwrap();
        let d = vec![-1.0, -0.25];
        let slope1 = 1.0 * d[0] + 2.0 * d[1];
        let slope2 = 3.0 * d[0] - 1.0 * d[1];
        assert!(slope1 < 0.0 && slope2 < 0.0);
        let step = armijo_biobjective(&Linear, &x, f, slope1, slope2, &d, 0.5, 30).unwrap();
        assert_eq!(step.t, 1.0);
        assert_eq!(step.halvings, 0);
    }

    #[test]
    fn step_bound_frozen_formula() {
        let dm = step_bound(0.2, 7, 0.8);
        assert_relative_eq!(dm, 0.8 * 0.2 / 7.0, max_relative = 1e-15);
        assert!((dm - 0.022857142857142857).abs() < 1e-15);
    }

    #[test]
    fn clamp_leaves_small_directions_alone() {
        let d = vec![0.01, -0.005];
        assert_eq!(clamp_direction(&d, 0.02285), d);
    }

    #[test]
    fn clamp_rescales_to_the_bound_exactly() {
        let d = vec![0.1, -0.04];
        let out = clamp_direction(&d, 0.02);
        assert_relative_eq!(norm_inf(&out), 0.02, max_relative = 1e-15);
        // Direction preserved.
        assert_relative_eq!(out[1] / out[0], -0.4, max_relative = 1e-12);
    }

    #[test]
    fn scaling_parameter_examples() {
        let s = scaling_parameter(&[2.0, 4.0], &[1.0, 1.0], 1.0).unwrap();
        assert_eq!(s, 4.0);
        let s2 = scaling_parameter(&[2.0, 4.0], &[1.0, 1.0], 2.0).unwrap();
        assert_eq!(s2, 8.0);
        assert!(matches!(
            scaling_parameter(&[1.0, 1.0], &[0.0, 1e-15], 1.0),
            Err(Error::AllRatiosUndefined)
        ));
        let s0 = scaling_parameter(&[0.0, 0.0], &[1.0, 2.0], 1.0).unwrap();
        assert_eq!(s0, 0.0);
    }

    #[test]
    fn weighted_sum_converges_at_critical_start() {
        let toy = ToyQuadratics { center1: [0.0, 0.0], center2: [0.0, 0.0] };
        let cfg = OptimConfig::default();
        let history = run_weighted_sum(&toy, &[0.0, 0.0], 0.5, &cfg).unwrap();
        assert_eq!(history.status, RunStatus::Converged);
        assert_eq!(history.records.len(), 1);
    }

    #[test]
    fn weighted_sum_may_increase_one_objective_while_blend_falls() {
        // Start just left of the f2 vertex: a heavily f1-weighted blend pulls
        // the iterate rightward past it, so f2 rises while the blend falls.
        let toy = ToyQuadratics { center1: [1.0, 0.0], center2: [-1.0, 0.0] };
        let cfg = OptimConfig { c1: Some(1.0), c2: Some(1.0), eps: 1e-10, ..OptimConfig::default() };
        let history = run_weighted_sum(&toy, &[-1.2, 0.0], 0.9, &cfg).unwrap();
        assert!(history.records.len() > 1, "must take at least one step");
        let first = history.records[1];
        let start = history.records[0];
        assert!(first.f2 > start.f2, "f2 must rise on the first step");
        let blend = |r: &IterationRecord| 0.9 * r.f1 + 0.1 * r.f2;
        assert!(blend(&first) < blend(&start), "the blend must fall");
    }

    #[test]
    fn weighted_sum_iterates_invariant_under_common_rescaling() {
        // Powers of two rescale every intermediate exactly, so the whole
        // trajectory must be reproduced bit for bit.
        let toy = ToyQuadratics { center1: [0.7, 0.2], center2: [-0.5, -0.1] };
        let base = OptimConfig { c1: Some(1.25), c2: Some(0.5), ..OptimConfig::default() };
        let scaled = OptimConfig { c1: Some(4.0 * 1.25), c2: Some(4.0 * 0.5), ..base.clone() };
        let h1 = run_weighted_sum(&toy, &[2.0, 1.5], 0.35, &base).unwrap();
        let h2 = run_weighted_sum(&toy, &[2.0, 1.5], 0.35, &scaled).unwrap();
        assert_eq!(h1.records.len(), h2.records.len());
        assert_eq!(h1.final_gamma, h2.final_gamma);
        for (a, b) in h1.records.iter().zip(&h2.records) {
            assert_eq!(a.f1, b.f1);
            assert_eq!(a.f2, b.f2);
            assert_eq!(a.step, b.step);
        }
    }

    #[test]
    fn biobjective_descent_is_monotone_in_both_objectives() {
        let toy = ToyQuadratics { center1: [1.0, 0.3], center2: [-1.0, -0.2] };
        let cfg = OptimConfig::default();
        let history = run_biobjective_descent(&toy, &[3.0, 2.0], 1.0, &cfg).unwrap();
        assert!(history.records.len() > 1);
        // Ties are possible only once the sufficient-decrease margin drops
        // below one ulp of the objective, i.e. at machine-precision steps.
        for w in history.records.windows(2) {
            assert!(w[1].f1 <= w[0].f1, "f1 increased");
            assert!(w[1].f2 <= w[0].f2, "f2 increased");
        }
        let first = &history.records[1];
        let start = &history.records[0];
        assert!(first.f1 < start.f1, "macroscopic step must strictly decrease f1");
        assert!(first.f2 < start.f2, "macroscopic step must strictly decrease f2");
    }

    #[test]
    fn biobjective_descent_stops_at_pareto_critical_start() {
        // Opposite gradients at the midpoint: no common descent direction.
        let toy = ToyQuadratics { center1: [1.0, 0.0], center2: [-1.0, 0.0] };
        let cfg = OptimConfig::default();
        let history = run_biobjective_descent(&toy, &[0.0, 0.0], 1.0, &cfg).unwrap();
        assert_eq!(history.status, RunStatus::Converged);
        assert_eq!(history.records.len(), 1);
    }

    fn point(f1: f64, f2: f64) -> ParetoPoint {
        ParetoPoint {
            f1,
            f2,
            gamma: vec![],
            method: Method::WeightedSum,
            param: 0.5,
            converged: true,
            iterations: 1,
            status: RunStatus::Converged,
        }
    }

    #[test]
    fn filter_drops_dominated_point() {
        let pts = vec![point(1.0, 2.0), point(2.0, 1.0), point(2.0, 2.0)];
        let kept = pareto_filter(&pts);
        let pairs: Vec<(f64, f64)> = kept.iter().map(|p| (p.f1, p.f2)).collect();
        assert_eq!(pairs, vec![(1.0, 2.0), (2.0, 1.0)]);
    }

    #[test]
    fn filter_keeps_single_duplicate() {
        let pts = vec![point(1.0, 1.0), point(1.0, 1.0), point(1.0, 1.0)];
        let kept = pareto_filter(&pts);
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn filter_matches_brute_force_on_random_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<ParetoPoint> = (0..300)
            .map(|_| point(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
            .collect();
        let kept = pareto_filter(&pts);
        let brute = brute_force_filter(&pts);
        let a: Vec<(f64, f64)> = kept.iter().map(|p| (p.f1, p.f2)).collect();
        let b: Vec<(f64, f64)> = brute.iter().map(|p| (p.f1, p.f2)).collect();
        assert_eq!(a, b);
    }

    /// O(n^2) dominance check: the oracle the fast filter must match.
    pub(crate) fn brute_force_filter(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
        let dominates = |a: &ParetoPoint, b: &ParetoPoint| {
            a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2)
        };
        let mut kept: Vec<ParetoPoint> = Vec::new();
        for (i, p) in points.iter().enumerate() {
            let mut drop = false;
            for (j, q) in points.iter().enumerate() {
                if dominates(q, p) || (q.f1 == p.f1 && q.f2 == p.f2 && j < i) {
                    drop = true;
                    break;
                }
            }
            if !drop {
                kept.push(p.clone());
            }
        }
        kept.sort_by(|a, b| a.f1.total_cmp(&b.f1));
        kept
    }
}
