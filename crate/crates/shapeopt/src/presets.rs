//! Ready-made case studies: a sine-bump joint and an S-shaped joint in a
//! beryllium-oxide-like ceramic strip under uniaxial tension, on the default
//! discretization used throughout the test suite and the CLI.

use crate::bspline::{fit_gamma, BSplineBasis};
use crate::error::{Error, Result};
use crate::fem::{BoundaryConditions, Material};
use crate::geometry::{GridSpec, ShapeParams};
use crate::objectives::AngularRule;
use crate::problem::ShapeProblem;

/// Strip length; both presets live on `[0, LENGTH]`.
pub const LENGTH: f64 = 1.0;
/// Starting thickness, constant along the strip.
pub const THICKNESS_START: f64 = 0.2;
pub const GRID_NX_DEFAULT: usize = 41;
pub const GRID_NY_DEFAULT: usize = 7;
pub const N_BASIS_DEFAULT: usize = 5;
pub const SPLINE_DEGREE: usize = 3;
/// Tensile surface load on the right edge, in Pa.
pub const TRACTION_DEFAULT: [f64; 2] = [1e7, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    /// Straight strip with a sine midline bump.
    StraightJoint,
    /// Strip whose midline descends along a smoothstep.
    SJoint,
}

impl PresetName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "straight_joint" => Ok(PresetName::StraightJoint),
            "s_joint" => Ok(PresetName::SJoint),
            other => Err(Error::Validation {
                key: "preset".into(),
                message: format!("unknown preset '{other}'; expected straight_joint or s_joint"),
            }),
        }
    }

    #[must_use]
    pub fn tag(&self) -> &'static str {
        match self {
            PresetName::StraightJoint => "straight_joint",
            PresetName::SJoint => "s_joint",
        }
    }

    /// Starting midline at position `x` in `[0, LENGTH]`.
    #[must_use]
    pub fn start_midline(&self, x: f64) -> f64 {
        match self {
            PresetName::StraightJoint => 0.15 * (std::f64::consts::PI * x / LENGTH).sin(),
            PresetName::SJoint => {
                let t = x / LENGTH;
                -0.27 * (3.0 * t * t - 2.0 * t * t * t)
            }
        }
    }
}

/// Beryllium-oxide-like ceramic: E = 320 GPa, nu = 0.25, Weibull module 5,
/// reference stress 24 MPa, ultimate tensile strength 140 MPa.
#[must_use]
pub fn beo_material() -> Material {
    Material::new(320e9, 0.25, 5.0, 2.4e7, 140e6).expect("reference material is valid")
}

/// No body force; uniaxial tension on the right edge.
#[must_use]
pub fn default_bc() -> BoundaryConditions {
    BoundaryConditions { body_force: [0.0, 0.0], traction: TRACTION_DEFAULT }
}

/// A named case study plus its discretization sizes.
#[derive(Debug, Clone, Copy)]
pub struct CaseStudyPreset {
    pub name: PresetName,
    pub n_x: usize,
    pub n_y: usize,
    pub n_basis: usize,
}

impl CaseStudyPreset {
    #[must_use]
    pub fn new(name: PresetName) -> Self {
        CaseStudyPreset {
            name,
            n_x: GRID_NX_DEFAULT,
            n_y: GRID_NY_DEFAULT,
            n_basis: N_BASIS_DEFAULT,
        }
    }

    #[must_use]
    pub fn grid(&self) -> GridSpec {
        GridSpec::equidistant(self.n_x, self.n_y, 0.0, LENGTH)
    }

    #[must_use]
    pub fn basis(&self) -> BSplineBasis {
        BSplineBasis::clamped_uniform(self.n_basis, SPLINE_DEGREE, 0.0, LENGTH)
    }

    /// Starting shape sampled on the grid columns.
    #[must_use]
    pub fn start_shape(&self) -> ShapeParams {
        let grid = self.grid();
        let ml = grid.x_coords.iter().map(|&x| self.name.start_midline(x)).collect();
        let th = vec![THICKNESS_START; self.n_x];
        ShapeParams { ml, th }
    }

    /// Starting design: least-squares spline fit of the starting shape,
    /// flattened to `[gamma_ml.., gamma_th..]`. The constant thickness is
    /// reproduced exactly; the midline is fit in the coefficient space.
    pub fn start_gamma(&self) -> Result<Vec<f64>> {
        let grid = self.grid();
        let gamma = fit_gamma(&self.start_shape(), &self.basis(), &grid.x_coords)?;
        Ok(gamma.to_flat())
    }

    /// Assembles the full problem with the reference material, uniaxial
    /// tension, and an angular rule of `n_phi` directions.
    pub fn problem(&self, n_phi: usize) -> Result<ShapeProblem> {
        ShapeProblem::new(
            self.grid(),
            self.basis(),
            beo_material(),
            default_bc(),
            AngularRule::new(n_phi)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspline::{gamma_to_rho_with, BSplineCoeffs};
    use crate::objectives::volume;
    use crate::optim::BiobjectiveProblem;
    use approx::assert_relative_eq;

    #[test]
    fn straight_joint_midline_bump() {
        let p = PresetName::StraightJoint;
        assert_eq!(p.start_midline(0.0), 0.0);
        assert_relative_eq!(p.start_midline(0.5), 0.15, max_relative = 1e-15);
        assert!(p.start_midline(1.0).abs() < 1e-15);
    }

    #[test]
    fn s_joint_midline_descends() {
        let p = PresetName::SJoint;
        assert_eq!(p.start_midline(0.0), 0.0);
        assert_relative_eq!(p.start_midline(1.0), -0.27, max_relative = 1e-15);
        assert_relative_eq!(p.start_midline(0.5), -0.27 * 0.5, max_relative = 1e-15);
        let mut prev = 0.0;
        for i in 1..=10 {
            let v = p.start_midline(i as f64 / 10.0);
            assert!(v < prev, "midline must strictly descend");
            prev = v;
        }
    }

    #[test]
    fn preset_names_round_trip() {
        for name in [PresetName::StraightJoint, PresetName::SJoint] {
            assert_eq!(PresetName::parse(name.tag()).unwrap(), name);
        }
        assert!(PresetName::parse("bogus").is_err());
    }

    #[test]
    fn start_volume_is_exact() {
        for name in [PresetName::StraightJoint, PresetName::SJoint] {
            let preset = CaseStudyPreset::new(name);
            let problem = preset.problem(64).unwrap();
            let gamma = preset.start_gamma().unwrap();
            let coeffs = BSplineCoeffs::from_flat(&gamma);
            let rho = gamma_to_rho_with(&coeffs, problem.bmat()).unwrap();
            let mesh = crate::geometry::build_grid(&rho, &problem.spec).unwrap();
            // Constant thickness is inside the spline space, so the fitted
            // start has area = thickness * length up to roundoff.
            assert_relative_eq!(volume(&mesh), THICKNESS_START * LENGTH, epsilon = 1e-12);
        }
    }

    #[test]
    fn start_designs_are_feasible_and_stressed() {
        for name in [PresetName::StraightJoint, PresetName::SJoint] {
            let preset = CaseStudyPreset::new(name);
            let problem = preset.problem(64).unwrap();
            let gamma = preset.start_gamma().unwrap();
            let pair = problem.evaluate(&gamma).unwrap();
            assert!(pair.f1.is_finite() && pair.f1 > 0.0, "{name:?}: f1 = {}", pair.f1);
            assert!(pair.f2 > 0.0);
        }
    }

    #[test]
    fn fitted_midline_tracks_the_analytic_curve() {
        let preset = CaseStudyPreset::new(PresetName::StraightJoint);
        let problem = preset.problem(4).unwrap();
        let gamma = preset.start_gamma().unwrap();
        let coeffs = BSplineCoeffs::from_flat(&gamma);
        let rho = gamma_to_rho_with(&coeffs, problem.bmat()).unwrap();
        let grid = preset.grid();
        for (i, &x) in grid.x_coords.iter().enumerate() {
            let err = (rho.ml[i] - preset.name.start_midline(x)).abs();
            assert!(err < 5e-3, "column {i}: fit error {err}");
        }
    }

    #[test]
    fn reference_material_lame_constants() {
        let mat = beo_material();
        assert_relative_eq!(mat.lambda, 128e9, max_relative = 1e-12);
        assert_relative_eq!(mat.mu, 128e9, max_relative = 1e-12);
    }
}
