//! The concrete design-to-objectives pipeline: B-spline coefficients to
//! shape, shape to mesh, mesh to elastic state, state to objective values and
//! gradients. Implements [`BiobjectiveProblem`] for the optimization drivers.

use nalgebra::DMatrix;

use crate::bspline::{basis_matrix, gamma_to_rho_with, BSplineBasis, BSplineCoeffs};
use crate::error::{Error, Result};
use crate::fem::{
    solve_state_with, BoundaryConditions, DirichletSolver, Material, StateSolution,
    SOLVER_TOL_DEFAULT,
};
use crate::geometry::{build_grid, GridSpec, Mesh, ShapeParams};
use crate::gradients::{
    chain_to_rho, grad_f1_nodes, grad_f2_nodes, rho_gradient_to_gamma, GradientPair,
};
use crate::metric::{curvature_adapt, XI_DEFAULT};
use crate::objectives::{intensity_measure, volume, AngularRule, ObjectivePair};
use crate::optim::BiobjectiveProblem;

/// How [`ShapeProblem::gradients`] obtains the design derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    /// Discrete adjoint, then curvature-metric adaptation (the default).
    Adjoint,
    /// Central finite differences on the objectives, unadapted; a slow
    /// reference mode for cross-checks.
    Fd,
}

/// Default probe width for the finite-difference gradient mode.
pub const FD_EPS_DEFAULT: f64 = 1e-6;

/// Everything fixed over one optimization run: discretization, spline basis,
/// material, loads, quadrature, and gradient policy. Design vectors are flat
/// `[gamma_ml.., gamma_th..]` slices of length `2 * n_basis`.
pub struct ShapeProblem {
    pub spec: GridSpec,
    pub basis: BSplineBasis,
    pub material: Material,
    pub bc: BoundaryConditions,
    pub rule: AngularRule,
    /// Curvature-metric regularization weight; 0 disables adaptation.
    pub xi: f64,
    pub gradient_mode: GradientMode,
    /// Relative residual bound for the elastic solve.
    pub solver_tol: f64,
    /// Probe width used when `gradient_mode` is [`GradientMode::Fd`].
    pub fd_eps: f64,
    /// Keep the clamped and loaded end columns geometry-fixed (the default).
    /// Every admissible shape shares the left (clamped) and right (loaded)
    /// boundary columns, so the end coefficients are not design variables:
    /// the clamped basis interpolates them, and [`ShapeProblem::gradients`]
    /// zeroes their components so descent directions never move them.
    pub fixed_ends: bool,
    bmat: DMatrix<f64>,
}

/// One solved design: shape samples, mesh, elastic state, and the reusable
/// stiffness factorization.
pub struct SolvedShape {
    pub rho: ShapeParams,
    pub mesh: Mesh,
    pub state: StateSolution,
    pub solver: DirichletSolver,
}

impl ShapeProblem {
    pub fn new(
        spec: GridSpec,
        basis: BSplineBasis,
        material: Material,
        bc: BoundaryConditions,
        rule: AngularRule,
    ) -> Result<Self> {
        if basis.n_basis > spec.n_x {
            return Err(Error::Validation {
                key: "n_B".into(),
                message: format!(
                    "{} spline coefficients cannot be collocated on {} grid columns",
                    basis.n_basis, spec.n_x
                ),
            });
        }
        let bmat = basis_matrix(&basis, &spec.x_coords)?;
        Ok(ShapeProblem {
            spec,
            basis,
            material,
            bc,
            rule,
            xi: XI_DEFAULT,
            gradient_mode: GradientMode::Adjoint,
            solver_tol: SOLVER_TOL_DEFAULT,
            fd_eps: FD_EPS_DEFAULT,
            fixed_ends: true,
            bmat,
        })
    }

    #[must_use]
    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    #[must_use]
    pub fn with_gradient_mode(mut self, mode: GradientMode) -> Self {
        self.gradient_mode = mode;
        self
    }

    #[must_use]
    pub fn with_solver_tol(mut self, tol: f64) -> Self {
        self.solver_tol = tol;
        self
    }

    #[must_use]
    pub fn with_fd_eps(mut self, eps: f64) -> Self {
        self.fd_eps = eps;
        self
    }

    #[must_use]
    pub fn with_fixed_ends(mut self, fixed: bool) -> Self {
        self.fixed_ends = fixed;
        self
    }

    /// Collocation matrix sampling the spline basis at the grid columns.
    #[must_use]
    pub fn bmat(&self) -> &DMatrix<f64> {
        &self.bmat
    }

    /// Shape samples and mesh for a design vector; errors on designs that
    /// leave the feasible set (non-positive thickness, degenerate cells).
    pub fn shape(&self, x: &[f64]) -> Result<(ShapeParams, Mesh)> {
        assert_eq!(x.len(), self.dim(), "design vector length mismatch");
        let gamma = BSplineCoeffs::from_flat(x);
        let rho = gamma_to_rho_with(&gamma, &self.bmat)?;
        let mesh = build_grid(&rho, &self.spec)?;
        Ok((rho, mesh))
    }

    /// Full elastic solve for a design vector.
    pub fn solve(&self, x: &[f64]) -> Result<SolvedShape> {
        let (rho, mesh) = self.shape(x)?;
        let (state, solver) = solve_state_with(&mesh, &self.material, &self.bc, self.solver_tol)?;
        Ok(SolvedShape { rho, mesh, state, solver })
    }

    /// Adjoint design gradients of both objectives; `adapt` applies the
    /// curvature-metric transformation before mapping to coefficient space.
    pub fn adjoint_gradients(&self, x: &[f64], adapt: bool) -> Result<GradientPair> {
        let solved = self.solve(x)?;
        let g1_nodes = grad_f1_nodes(
            &solved.mesh,
            &self.material,
            &self.bc,
            &self.rule,
            &solved.state,
            &solved.solver,
        )?;
        let g2_nodes = grad_f2_nodes(&solved.mesh);
        let g1 = self.nodes_to_gamma(&g1_nodes, &solved.rho, adapt)?;
        let g2 = self.nodes_to_gamma(&g2_nodes, &solved.rho, adapt)?;
        Ok(GradientPair { g1, g2 })
    }

    /// Unadapted adjoint gradients, the quantity a finite-difference probe of
    /// the objectives must reproduce.
    pub fn raw_gradients(&self, x: &[f64]) -> Result<GradientPair> {
        self.adjoint_gradients(x, false)
    }

    /// Central finite differences of both objectives over every coefficient.
    pub fn fd_gradients(&self, x: &[f64], eps: f64) -> Result<GradientPair> {
        let n = x.len();
        let mut g1 = Vec::with_capacity(n);
        let mut g2 = Vec::with_capacity(n);
        let mut probe = x.to_vec();
        for j in 0..n {
            probe[j] = x[j] + eps;
            let plus = self.evaluate(&probe)?;
            probe[j] = x[j] - eps;
            let minus = self.evaluate(&probe)?;
            probe[j] = x[j];
            g1.push((plus.f1 - minus.f1) / (2.0 * eps));
            g2.push((plus.f2 - minus.f2) / (2.0 * eps));
        }
        Ok(GradientPair { g1, g2 })
    }

    fn nodes_to_gamma(
        &self,
        grad_nodes: &[[f64; 2]],
        rho: &ShapeParams,
        adapt: bool,
    ) -> Result<Vec<f64>> {
        let rho_grad = chain_to_rho(grad_nodes, self.spec.n_x, self.spec.n_y);
        let rho_grad = if adapt {
            curvature_adapt(&rho_grad, rho, &self.spec, self.xi)?
        } else {
            rho_grad
        };
        Ok(rho_gradient_to_gamma(&rho_grad, &self.bmat))
    }

    /// Zero the derivative components of the first and last coefficient of
    /// both curves, so the end columns stay where the starting shape put them.
    fn zero_end_components(&self, g: &mut [f64]) {
        let n = self.basis.n_basis;
        g[0] = 0.0;
        g[n - 1] = 0.0;
        g[n] = 0.0;
        g[2 * n - 1] = 0.0;
    }
}

impl BiobjectiveProblem for ShapeProblem {
    fn dim(&self) -> usize {
        2 * self.basis.n_basis
    }

    fn evaluate(&self, x: &[f64]) -> Result<ObjectivePair> {
        let solved = self.solve(x)?;
        let f1 = intensity_measure(&solved.state, &self.material, &self.rule);
        let f2 = volume(&solved.mesh);
        Ok(ObjectivePair { f1, f2 })
    }

    fn gradients(&self, x: &[f64]) -> Result<GradientPair> {
        let mut pair = match self.gradient_mode {
            GradientMode::Adjoint => self.adjoint_gradients(x, true),
            GradientMode::Fd => self.fd_gradients(x, self.fd_eps),
        }?;
        if self.fixed_ends {
            self.zero_end_components(&mut pair.g1);
            self.zero_end_components(&mut pair.g2);
        }
        Ok(pair)
    }
}
