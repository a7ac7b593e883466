//! The two objective functionals: Weibull-type failure intensity and volume.
//!
//! The intensity measure integrates the clipped normal stress over all surface
//! normal directions and the domain:
//!   f1 = 1/(2 pi) int_Omega int_{S^1} (sigma_n / sigma_0)^m dn dx.
//! With constant stress per P1 element the spatial integral is exact; the
//! angular integral uses a uniform midpoint rule, which is shift invariant and
//! converges rapidly for the smooth-except-kink integrand.

use crate::error::{Error, Result};
use crate::fem::{Material, StateSolution};
use crate::geometry::Mesh;
use nalgebra::Matrix2;

/// Objective values: `f1` failure intensity (dimensionless), `f2` volume (m^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectivePair {
    pub f1: f64,
    pub f2: f64,
}

/// Uniform midpoint quadrature on the unit circle with `n_phi` angles
/// `phi_k = 2 pi (k - 1/2) / n_phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularRule {
    pub n_phi: usize,
}

pub const N_PHI_DEFAULT: usize = 256;

impl AngularRule {
    pub fn new(n_phi: usize) -> Result<Self> {
        if n_phi < 4 || !n_phi.is_multiple_of(2) {
            return Err(Error::Validation {
                key: "n_phi".into(),
                message: format!("angular rule needs an even count >= 4, got {n_phi}"),
            });
        }
        Ok(AngularRule { n_phi })
    }

    /// Per-angle coefficients (cos^2, sin^2, 2 sin cos) such that the dot
    /// product with Voigt stress (s_xx, s_yy, s_xy) equals n^T sigma n.
    #[must_use]
    pub fn voigt_directions(&self) -> Vec<[f64; 3]> {
        (1..=self.n_phi)
            .map(|k| {
                let phi = 2.0 * std::f64::consts::PI * (k as f64 - 0.5) / self.n_phi as f64;
                let (s, c) = phi.sin_cos();
                [c * c, s * s, 2.0 * s * c]
            })
            .collect()
    }
}

/// Clipped normal stress `max(n^T sigma n, 0)` for a unit direction `n`.
#[must_use]
pub fn sigma_n(sigma: &Matrix2<f64>, n: [f64; 2]) -> f64 {
    debug_assert!(((n[0] * n[0] + n[1] * n[1]).sqrt() - 1.0).abs() < 1e-12, "n must be unit");
    let v = sigma[(0, 0)] * n[0] * n[0]
        + 2.0 * sigma[(0, 1)] * n[0] * n[1]
        + sigma[(1, 1)] * n[1] * n[1];
    v.max(0.0)
}

/// `(x)^m` with an exact-exponent fast path for integer Weibull modules.
#[inline]
pub(crate) fn pow_m(x: f64, m: f64) -> f64 {
    if m.fract() == 0.0 && (1.0..=64.0).contains(&m) {
        x.powi(m as i32)
    } else {
        x.powf(m)
    }
}

/// Failure intensity of a solved state:
/// `sum_e area_e / n_phi * sum_k (sigma_n(sigma_e, phi_k) / sigma_0)^m`.
#[must_use]
pub fn intensity_measure(state: &StateSolution, mat: &Material, rule: &AngularRule) -> f64 {
    let dirs = rule.voigt_directions();
    let inv_sigma0 = 1.0 / mat.sigma0;
    let mut total = 0.0;
    for (stress, &area) in state.element_stress.iter().zip(&state.element_area) {
        let mut angular = 0.0;
        for v in &dirs {
            let sn = stress[0] * v[0] + stress[1] * v[1] + stress[2] * v[2];
            if sn > 0.0 {
                angular += pow_m(sn * inv_sigma0, mat.m);
            }
        }
        total += area * angular / rule.n_phi as f64;
    }
    total
}

/// Closed-form intensity of a uniformly uniaxially stressed region:
/// `area * (s / sigma_0)^m * (2m-1)!! / (2m)!!`, from
/// `int_0^{2pi} cos^{2m} = 2 pi (2m-1)!!/(2m)!!`. Oracle for straight rods.
pub fn analytic_rod_intensity(s: f64, mat: &Material, area: f64) -> Result<f64> {
    if mat.m.fract() != 0.0 || mat.m < 1.0 {
        return Err(Error::NonIntegerM { m: mat.m });
    }
    let m = mat.m as u32;
    let mut ratio = 1.0;
    for i in 1..=m {
        ratio *= (2.0 * i as f64 - 1.0) / (2.0 * i as f64);
    }
    Ok(area * pow_m(s / mat.sigma0, mat.m) * ratio)
}

/// Volume (area in 2D) of the component: sum of triangle areas.
#[must_use]
pub fn volume(mesh: &Mesh) -> f64 {
    (0..mesh.elements.len()).map(|e| mesh.element_area(e)).sum()
}
