//! Plane linear elasticity on P1 triangles: assembly, direct solve, and
//! constant per-element stress recovery.
//!
//! The constitutive law is sigma = lambda tr(eps) I + 2 mu eps with the Lame
//! constants taken directly from (E, nu); out-of-plane effects are neglected.
//! Voigt convention: strain (e_xx, e_yy, gamma_xy), stress (s_xx, s_yy, s_xy).

use crate::error::{Error, Result};
use crate::geometry::{signed_area, Mesh};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, Matrix2};

/// Relative residual bound the state solve must meet.
pub const SOLVER_TOL_DEFAULT: f64 = 1e-10;

/// Linear elastic material plus the Weibull parameters of the failure model.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub e: f64,
    pub nu: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Weibull module: exponent of the stress ratio in the intensity measure.
    pub m: f64,
    /// Weibull scale stress sigma_0 (Pa).
    pub sigma0: f64,
    /// Ultimate tensile strength (Pa); informational only.
    pub uts: f64,
}

impl Material {
    pub fn new(e: f64, nu: f64, m: f64, sigma0: f64, uts: f64) -> Result<Self> {
        let check = |ok: bool, key: &str, message: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Validation { key: key.into(), message: message.into() })
            }
        };
        check(e > 0.0, "E", "Young's modulus must be positive")?;
        check(nu > 0.0 && nu < 0.5, "nu", "Poisson ratio must lie in (0, 0.5)")?;
        check(m >= 1.0, "m", "Weibull module must be >= 1")?;
        check(sigma0 > 0.0, "sigma0", "Weibull scale stress must be positive")?;
        let lambda = nu * e / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mu = e / (2.0 * (1.0 + nu));
        Ok(Material { e, nu, lambda, mu, m, sigma0, uts })
    }
}

/// Constant body force (N/m^3) and constant traction (Pa) on the loaded
/// right-hand column. The designable upper/lower boundaries are traction free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    pub body_force: [f64; 2],
    pub traction: [f64; 2],
}

/// Displacement solution with per-element stress in Voigt order
/// (s_xx, s_yy, s_xy) and per-element area.
#[derive(Debug, Clone)]
pub struct StateSolution {
    pub u: DVector<f64>,
    pub element_stress: Vec<[f64; 3]>,
    pub element_area: Vec<f64>,
}

impl StateSolution {
    /// Stress of element `e` as a symmetric 2x2 tensor.
    #[must_use]
    pub fn stress_tensor(&self, e: usize) -> Matrix2<f64> {
        let [sxx, syy, sxy] = self.element_stress[e];
        Matrix2::new(sxx, sxy, sxy, syy)
    }
}

/// Full (no boundary conditions applied) stiffness matrix and load vector;
/// dof `2n` is the x-displacement of node `n`, dof `2n + 1` its y-displacement.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub k: DMatrix<f64>,
    pub b: DVector<f64>,
}

/// Per-element shape-function geometry: `b[i] = y_j - y_k`, `c[i] = x_k - x_j`
/// for cyclic (i, j, k), plus the positive area.
pub(crate) fn tri_geometry(p: [[f64; 2]; 3]) -> ([f64; 3], [f64; 3], f64) {
    let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
    let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
    let area = signed_area(p[0], p[1], p[2]);
    (b, c, area)
}

/// Applies `2A * B` (the strain-displacement matrix scaled by twice the area)
/// to a local displacement 6-vector, yielding `2A * (e_xx, e_yy, gamma_xy)`.
pub(crate) fn bnum_apply(b: &[f64; 3], c: &[f64; 3], v: &[f64; 6]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[0] += b[i] * v[2 * i];
        out[1] += c[i] * v[2 * i + 1];
        out[2] += c[i] * v[2 * i] + b[i] * v[2 * i + 1];
    }
    out
}

/// Constitutive map in Voigt form: strain (e_xx, e_yy, gamma_xy) to stress.
pub(crate) fn cmat_apply(lambda: f64, mu: f64, e: &[f64; 3]) -> [f64; 3] {
    [
        (lambda + 2.0 * mu) * e[0] + lambda * e[1],
        lambda * e[0] + (lambda + 2.0 * mu) * e[1],
        mu * e[2],
    ]
}

pub(crate) fn element_points(mesh: &Mesh, e: usize) -> [[f64; 2]; 3] {
    let [a, b, c] = mesh.elements[e];
    [mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]]
}

/// Assembles the full stiffness matrix and load vector. Body forces enter as
/// `f * A / 3` per element node; the traction acts on the loaded-column edges
/// as `g * L / 2` per edge node; no boundary conditions are applied here.
pub fn assemble(mesh: &Mesh, mat: &Material, bc: &BoundaryConditions) -> Result<LinearSystem> {
    let n_dofs = 2 * mesh.nodes.len();
    let mut k = DMatrix::zeros(n_dofs, n_dofs);
    let mut b_vec = DVector::zeros(n_dofs);

    for (e, tri) in mesh.elements.iter().enumerate() {
        let pts = element_points(mesh, e);
        let (bg, cg, area) = tri_geometry(pts);
        if area <= 0.0 {
            return Err(Error::DegenerateCell { element: e, area });
        }
        // K_e = (1/4A) Bnum^T C Bnum. Each unordered dof pair is computed
        // once and mirrored, so the assembled matrix is symmetric exactly.
        let mut strains = [[0.0; 3]; 6];
        let mut stresses = [[0.0; 3]; 6];
        for col in 0..6 {
            let mut unit = [0.0; 6];
            unit[col] = 1.0;
            strains[col] = bnum_apply(&bg, &cg, &unit);
            stresses[col] = cmat_apply(mat.lambda, mat.mu, &strains[col]);
        }
        for row in 0..6 {
            let grow = 2 * tri[row / 2] + row % 2;
            for col in row..6 {
                let gcol = 2 * tri[col / 2] + col % 2;
                let v = (strains[row][0] * stresses[col][0]
                    + strains[row][1] * stresses[col][1]
                    + strains[row][2] * stresses[col][2])
                    / (4.0 * area);
                k[(grow, gcol)] += v;
                if grow != gcol {
                    k[(gcol, grow)] += v;
                }
            }
        }
        for &n in tri {
            b_vec[2 * n] += bc.body_force[0] * area / 3.0;
            b_vec[2 * n + 1] += bc.body_force[1] * area / 3.0;
        }
    }

    for edge in &mesh.neumann_fixed_edges {
        let (p, q) = (mesh.nodes[edge[0]], mesh.nodes[edge[1]]);
        let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
        for &n in edge {
            b_vec[2 * n] += bc.traction[0] * len / 2.0;
            b_vec[2 * n + 1] += bc.traction[1] * len / 2.0;
        }
    }

    Ok(LinearSystem { k, b: b_vec })
}

/// `Bnum^T` applied to a Voigt stress 3-vector.
pub(crate) fn bnum_transpose_apply(b: &[f64; 3], c: &[f64; 3], s: &[f64; 3]) -> [f64; 6] {
    let mut out = [0.0; 6];
    for i in 0..3 {
        out[2 * i] = b[i] * s[0] + c[i] * s[2];
        out[2 * i + 1] = c[i] * s[1] + b[i] * s[2];
    }
    out
}

/// Cholesky factorization of the stiffness matrix restricted to the free
/// (non-clamped) dofs. Solutions are scattered back with zeros at clamped dofs.
/// Shared between the state solve and the adjoint solve at a fixed shape.
pub struct DirichletSolver {
    free: Vec<usize>,
    n_dofs: usize,
    chol: Cholesky<f64, Dyn>,
    /// Reduced stiffness kept for iterative refinement of the solution.
    reduced: DMatrix<f64>,
}

impl DirichletSolver {
    pub fn new(system: &LinearSystem, dirichlet_nodes: &[usize]) -> Result<Self> {
        let n_dofs = system.k.nrows();
        let mut fixed = vec![false; n_dofs];
        for &n in dirichlet_nodes {
            fixed[2 * n] = true;
            fixed[2 * n + 1] = true;
        }
        let free: Vec<usize> = (0..n_dofs).filter(|&d| !fixed[d]).collect();
        let reduced =
            DMatrix::from_fn(free.len(), free.len(), |i, j| system.k[(free[i], free[j])]);
        let chol = Cholesky::new(reduced.clone()).ok_or_else(|| Error::SolveFailure {
            detail: "reduced stiffness matrix is not positive definite".into(),
        })?;
        Ok(DirichletSolver { free, n_dofs, chol, reduced })
    }

    /// Solves `K u = rhs` on the free dofs; clamped dofs of `u` are zero.
    /// Iterative refinement runs until the residual stops improving or falls
    /// well under the default tolerance, so badly conditioned shapes still
    /// get the most accurate solution the factorization can deliver.
    #[must_use]
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let reduced_rhs = DVector::from_fn(self.free.len(), |i, _| rhs[self.free[i]]);
        let rhs_norm = reduced_rhs.norm();
        let mut sol = self.chol.solve(&reduced_rhs);
        if rhs_norm > 0.0 {
            let mut best = f64::INFINITY;
            for _ in 0..8 {
                let r = &reduced_rhs - &self.reduced * &sol;
                let rel = r.norm() / rhs_norm;
                if rel <= 0.01 * SOLVER_TOL_DEFAULT || rel >= 0.5 * best {
                    break;
                }
                best = rel;
                sol += self.chol.solve(&r);
            }
        }
        let mut full = DVector::zeros(self.n_dofs);
        for (i, &d) in self.free.iter().enumerate() {
            full[d] = sol[i];
        }
        full
    }

    /// Normwise backward error of `u` on the free dofs:
    /// `|K u - b| / (|K| |u| + |b|)`. This is the solver-quality measure
    /// that a stable factorization can keep near machine precision even on
    /// badly conditioned shapes, where the plain `|r|/|b|` ratio is bounded
    /// below by conditioning rather than by solution quality.
    #[must_use]
    pub fn residual(&self, system: &LinearSystem, u: &DVector<f64>) -> f64 {
        let r = &system.k * u - &system.b;
        let rn: f64 = self.free.iter().map(|&d| r[d] * r[d]).sum::<f64>().sqrt();
        let bn: f64 = self.free.iter().map(|&d| system.b[d] * system.b[d]).sum::<f64>().sqrt();
        let un: f64 = self.free.iter().map(|&d| u[d] * u[d]).sum::<f64>().sqrt();
        let kn = self.reduced.norm(); // Frobenius
        let denom = kn * un + bn;
        if denom == 0.0 {
            rn
        } else {
            rn / denom
        }
    }
}

/// Constant stress of element `e` recovered from nodal displacements.
#[must_use]
pub fn element_stress(mesh: &Mesh, mat: &Material, u: &DVector<f64>, e: usize) -> Matrix2<f64> {
    let tri = mesh.elements[e];
    let (bg, cg, area) = tri_geometry(element_points(mesh, e));
    let mut local = [0.0; 6];
    for i in 0..3 {
        local[2 * i] = u[2 * tri[i]];
        local[2 * i + 1] = u[2 * tri[i] + 1];
    }
    let strain2a = bnum_apply(&bg, &cg, &local);
    let strain = [strain2a[0] / (2.0 * area), strain2a[1] / (2.0 * area), strain2a[2] / (2.0 * area)];
    let s = cmat_apply(mat.lambda, mat.mu, &strain);
    Matrix2::new(s[0], s[2], s[2], s[1])
}

/// Assembles, factors, solves, verifies the residual, and recovers stresses.
pub fn solve_state(mesh: &Mesh, mat: &Material, bc: &BoundaryConditions) -> Result<StateSolution> {
    solve_state_with(mesh, mat, bc, SOLVER_TOL_DEFAULT).map(|(state, _)| state)
}

/// [`solve_state`] variant returning the factorization for reuse (adjoint
/// solves at the same shape) and taking the residual tolerance explicitly.
pub fn solve_state_with(
    mesh: &Mesh,
    mat: &Material,
    bc: &BoundaryConditions,
    tol: f64,
) -> Result<(StateSolution, DirichletSolver)> {
    let system = assemble(mesh, mat, bc)?;
    let solver = DirichletSolver::new(&system, &mesh.dirichlet_nodes)?;
    let u = solver.solve(&system.b);
    let res = solver.residual(&system, &u);
    if !res.is_finite() || res > tol {
        return Err(Error::SolveFailure {
            detail: format!("relative residual {res:.3e} exceeds tolerance {tol:.1e}"),
        });
    }
    let mut element_stress_v = Vec::with_capacity(mesh.elements.len());
    let mut element_area = Vec::with_capacity(mesh.elements.len());
    for e in 0..mesh.elements.len() {
        let s = element_stress(mesh, mat, &u, e);
        element_stress_v.push([s[(0, 0)], s[(1, 1)], s[(0, 1)]]);
        element_area.push(mesh.element_area(e));
    }
    Ok((StateSolution { u, element_stress: element_stress_v, element_area }, solver))
}
