//! Curvature-weighted gradient transformation.
//!
//! The shape gradient is rescaled in upper/lower boundary coordinates by
//! 1/(1 + xi kappa^2) per boundary point, damping updates where the boundary
//! is already strongly curved. In meanline/thickness coordinates this is the
//! conjugated map Dbar = M^-1 D M with M the (ml, th) -> (u, l) change of
//! basis; for xi = 0 the map is the identity.

use crate::error::{Error, Result};
use crate::geometry::{ml_th_to_ul, GridSpec, ShapeParams};
use crate::gradients::RhoGradient;

pub const XI_DEFAULT: f64 = 1e-4;

/// Per-column curvature estimates of both designable boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    pub kappa_upper: Vec<f64>,
    pub kappa_lower: Vec<f64>,
    pub xi: f64,
}

/// Discrete curvature of an open polyline: for interior point i,
/// kappa_i = 2 ||n_{i-1} - n_i|| / (l_{i-1} + l_i) over the two adjacent
/// facets (unit normals n, lengths l); endpoints copy the nearest interior
/// value. A regular polygon sampling of a circle of radius r gives 1/r.
pub fn discrete_curvature(points: &[[f64; 2]]) -> Result<Vec<f64>> {
    let n = points.len();
    assert!(n >= 3, "curvature needs at least 3 points");
    let mut normals = Vec::with_capacity(n - 1);
    let mut lengths = Vec::with_capacity(n - 1);
    for (k, w) in points.windows(2).enumerate() {
        let dx = w[1][0] - w[0][0];
        let dy = w[1][1] - w[0][1];
        let len = (dx * dx + dy * dy).sqrt();
        if len < 1e-14 {
            return Err(Error::DegenerateFacet { facet: k, length: len });
        }
        normals.push([-dy / len, dx / len]);
        lengths.push(len);
    }
    let mut kappa = vec![0.0; n];
    for i in 1..n - 1 {
        let dn = [
            normals[i - 1][0] - normals[i][0],
            normals[i - 1][1] - normals[i][1],
        ];
        kappa[i] = 2.0 * (dn[0] * dn[0] + dn[1] * dn[1]).sqrt() / (lengths[i - 1] + lengths[i]);
    }
    kappa[0] = kappa[1];
    kappa[n - 1] = kappa[n - 2];
    Ok(kappa)
}

/// Curvatures of the upper and lower boundary polylines of a shape.
pub fn curvature_field(rho: &ShapeParams, spec: &GridSpec, xi: f64) -> Result<CurvatureField> {
    let (upper, lower) = ml_th_to_ul(rho);
    let poly = |heights: &[f64]| -> Vec<[f64; 2]> {
        spec.x_coords.iter().zip(heights).map(|(&x, &y)| [x, y]).collect()
    };
    Ok(CurvatureField {
        kappa_upper: discrete_curvature(&poly(&upper))?,
        kappa_lower: discrete_curvature(&poly(&lower))?,
        xi,
    })
}

/// One column of the conjugated scaling: with weights du, dl on the upper and
/// lower boundary, the (ml, th) gradient entries transform by
/// M^-1 diag(du, dl) M = [[(du+dl)/2, (du-dl)/4], [du-dl, (du+dl)/2]].
#[must_use]
pub fn adapt_column(du: f64, dl: f64, g_ml: f64, g_th: f64) -> (f64, f64) {
    let avg = (du + dl) / 2.0;
    let diff = du - dl;
    (avg * g_ml + diff / 4.0 * g_th, diff * g_ml + avg * g_th)
}

/// Applies the curvature-weighted transformation to a shape-parameter
/// gradient. `xi = 0` returns the input unchanged (exact identity).
pub fn curvature_adapt(
    rho_grad: &RhoGradient,
    rho: &ShapeParams,
    spec: &GridSpec,
    xi: f64,
) -> Result<RhoGradient> {
    assert!(xi >= 0.0, "regularization parameter must be nonnegative");
    if xi == 0.0 {
        return Ok(rho_grad.clone());
    }
    let field = curvature_field(rho, spec, xi)?;
    let mut out = RhoGradient { ml: vec![0.0; spec.n_x], th: vec![0.0; spec.n_x] };
    for i in 0..spec.n_x {
        let du = 1.0 / (1.0 + xi * field.kappa_upper[i] * field.kappa_upper[i]);
        let dl = 1.0 / (1.0 + xi * field.kappa_lower[i] * field.kappa_lower[i]);
        let (gm, gt) = adapt_column(du, dl, rho_grad.ml[i], rho_grad.th[i]);
        out.ml[i] = gm;
        out.th[i] = gt;
    }
    Ok(out)
}
