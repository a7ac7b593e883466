//! B-spline parametrization of the meanline and thickness profiles.
//!
//! Both profiles are curves x -> sum_j gamma_j theta_j(x) over one clamped
//! B-spline basis. The map from coefficients gamma to grid samples rho is
//! linear with the constant Jacobian blockdiag(B, B), B_ij = theta_j(x_i).

use crate::error::{Error, Result};
use crate::geometry::ShapeParams;
use crate::TH_MIN;
use nalgebra::{Cholesky, DMatrix, DVector};

/// Clamped B-spline basis over a fixed knot vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineBasis {
    pub n_basis: usize,
    pub degree: usize,
    pub knots: Vec<f64>,
}

impl BSplineBasis {
    /// Clamped basis with uniformly spaced interior knots over `[x_start, x_end]`.
    #[must_use]
    pub fn clamped_uniform(n_basis: usize, degree: usize, x_start: f64, x_end: f64) -> Self {
        assert!(n_basis > degree, "need n_basis > degree for a clamped basis");
        assert!(x_end > x_start, "empty knot domain");
        let n_spans = n_basis - degree;
        let mut knots = Vec::with_capacity(n_basis + degree + 1);
        knots.extend(std::iter::repeat_n(x_start, degree + 1));
        for i in 1..n_spans {
            knots.push(x_start + (x_end - x_start) * i as f64 / n_spans as f64);
        }
        knots.extend(std::iter::repeat_n(x_end, degree + 1));
        BSplineBasis { n_basis, degree, knots }
    }

    fn domain(&self) -> (f64, f64) {
        (self.knots[self.degree], self.knots[self.n_basis])
    }

    /// Index k of the knot span containing x, with the last span closed on
    /// the right so the clamped endpoint evaluates to the last basis function.
    fn find_span(&self, x: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        let tol = 1e-12 * (hi - lo).abs().max(1.0);
        if x < lo - tol || x > hi + tol {
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        let x = x.clamp(lo, hi);
        if x >= hi {
            return Ok(self.n_basis - 1);
        }
        let mut span = self.degree;
        while self.knots[span + 1] <= x {
            span += 1;
        }
        Ok(span)
    }

    /// Values of all `n_basis` functions at x (Cox-de Boor recursion; only the
    /// `degree + 1` functions supported on the containing span are nonzero).
    pub fn eval(&self, x: f64) -> Result<Vec<f64>> {
        let span = self.find_span(x)?;
        let (lo, hi) = self.domain();
        let x = x.clamp(lo, hi);
        let p = self.degree;
        let mut vals = vec![0.0; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        vals[0] = 1.0;
        for j in 1..=p {
            left[j] = x - self.knots[span + 1 - j];
            right[j] = self.knots[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = vals[r] / (right[r + 1] + left[j - r]);
                vals[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            vals[j] = saved;
        }
        let mut row = vec![0.0; self.n_basis];
        row[span - p..=span].copy_from_slice(&vals);
        Ok(row)
    }
}

/// B-spline coefficients of the meanline and thickness curves; the design
/// vector of the optimization, flat layout `[ml..., th...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineCoeffs {
    pub ml: Vec<f64>,
    pub th: Vec<f64>,
}

impl BSplineCoeffs {
    #[must_use]
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = self.ml.clone();
        flat.extend_from_slice(&self.th);
        flat
    }

    #[must_use]
    pub fn from_flat(flat: &[f64]) -> Self {
        assert!(flat.len().is_multiple_of(2), "flat coefficient vector must split in half");
        let n = flat.len() / 2;
        BSplineCoeffs { ml: flat[..n].to_vec(), th: flat[n..].to_vec() }
    }
}

/// Collocation matrix `B` with `B_ij = theta_j(x_i)`; rows sum to 1.
pub fn basis_matrix(basis: &BSplineBasis, x_coords: &[f64]) -> Result<DMatrix<f64>> {
    let mut b = DMatrix::zeros(x_coords.len(), basis.n_basis);
    for (i, &x) in x_coords.iter().enumerate() {
        let row = basis.eval(x)?;
        for (j, v) in row.into_iter().enumerate() {
            b[(i, j)] = v;
        }
    }
    Ok(b)
}

/// Samples the coefficient curves at the grid x-positions:
/// `rho_ml = B gamma_ml`, `rho_th = B gamma_th`.
pub fn gamma_to_rho(
    gamma: &BSplineCoeffs,
    basis: &BSplineBasis,
    x_coords: &[f64],
) -> Result<ShapeParams> {
    let b = basis_matrix(basis, x_coords)?;
    gamma_to_rho_with(gamma, &b)
}

/// Same as [`gamma_to_rho`] with a precomputed collocation matrix.
pub fn gamma_to_rho_with(gamma: &BSplineCoeffs, b: &DMatrix<f64>) -> Result<ShapeParams> {
    assert_eq!(gamma.ml.len(), b.ncols(), "coefficient count mismatch");
    assert_eq!(gamma.th.len(), b.ncols(), "coefficient count mismatch");
    let ml = b * DVector::from_column_slice(&gamma.ml);
    let th = b * DVector::from_column_slice(&gamma.th);
    for (i, &t) in th.iter().enumerate() {
        if t <= TH_MIN {
            return Err(Error::NonPositiveThickness { index: i, value: t, min: TH_MIN });
        }
    }
    Ok(ShapeParams { ml: ml.as_slice().to_vec(), th: th.as_slice().to_vec() })
}

/// Constant Jacobian d(rho)/d(gamma) = blockdiag(B, B), shape 2n_x by 2n_basis.
pub fn rho_jacobian(basis: &BSplineBasis, x_coords: &[f64]) -> Result<DMatrix<f64>> {
    let b = basis_matrix(basis, x_coords)?;
    let (n_x, n_b) = (b.nrows(), b.ncols());
    let mut jac = DMatrix::zeros(2 * n_x, 2 * n_b);
    jac.view_mut((0, 0), (n_x, n_b)).copy_from(&b);
    jac.view_mut((n_x, n_b), (n_x, n_b)).copy_from(&b);
    Ok(jac)
}

/// Least-squares fit of coefficients to grid samples: minimizes
/// `||B gamma_q - rho_q||` for q in {ml, th} via the normal equations.
pub fn fit_gamma(
    rho: &ShapeParams,
    basis: &BSplineBasis,
    x_coords: &[f64],
) -> Result<BSplineCoeffs> {
    let b = basis_matrix(basis, x_coords)?;
    let btb = b.transpose() * &b;
    let chol = Cholesky::new(btb).ok_or_else(|| Error::RankDeficient {
        detail: format!("normal equations singular for {} basis functions on {} samples",
            basis.n_basis, x_coords.len()),
    })?;
    let solve = |samples: &[f64]| {
        let rhs = b.transpose() * DVector::from_column_slice(samples);
        chol.solve(&rhs).as_slice().to_vec()
    };
    Ok(BSplineCoeffs { ml: solve(&rho.ml), th: solve(&rho.th) })
}
