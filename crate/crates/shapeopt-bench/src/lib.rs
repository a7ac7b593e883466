//! Shared fixtures for the pipeline benchmarks: the reference case study at
//! production resolution, ready to solve.

use shapeopt::objectives::AngularRule;
use shapeopt::presets::{CaseStudyPreset, PresetName};
use shapeopt::problem::ShapeProblem;

/// Angular quadrature resolution used by every benchmark.
pub const BENCH_N_PHI: usize = 256;

/// The straight-joint case study at the production 41×7 grid with the
/// default five-function spline basis.
#[must_use]
pub fn bench_preset() -> CaseStudyPreset {
    CaseStudyPreset::new(PresetName::StraightJoint)
}

/// Problem plus its fitted starting design.
pub fn bench_problem() -> (ShapeProblem, Vec<f64>) {
    let preset = bench_preset();
    let problem = preset.problem(BENCH_N_PHI).expect("preset problem is valid");
    let gamma0 = preset.start_gamma().expect("preset start is fittable");
    (problem, gamma0)
}

/// An angular rule matching [`BENCH_N_PHI`], for benchmarks that only need
/// the quadrature.
#[must_use]
pub fn bench_rule() -> AngularRule {
    AngularRule::new(BENCH_N_PHI).expect("positive direction count")
}
