//! Shape gradients of both objectives: a discrete adjoint for the failure
//! intensity, the exact area derivative for the volume, and the chain through
//! grid and spline parametrizations. Central finite differences serve as the
//! validation oracle and as a fallback gradient mode.
//!
//! For J(X, u) the discretized intensity with K(X) u = b(X), the adjoint solve
//! K psi = dJ/du (K symmetric, psi clamped like u) yields
//!   dJ/dX = pJ/pX + psi^T (pb/pX - (pK/pX) u),
//! assembled element by element from the analytic derivatives of triangle
//! area, strain-displacement matrix, stiffness, loads, and stress recovery.

use crate::bspline::{BSplineCoeffs, gamma_to_rho_with};
use crate::error::Result;
use crate::fem::{
    bnum_apply, cmat_apply, element_points, tri_geometry, BoundaryConditions, DirichletSolver,
    Material, StateSolution,
};
use crate::geometry::Mesh;
use crate::objectives::{pow_m, AngularRule};
use nalgebra::{DMatrix, DVector};

/// Gradients of both objectives with respect to the spline coefficients,
/// flat layout `[ml..., th...]` of length `2 n_basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
}

/// Gradient with respect to the per-column shape parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoGradient {
    pub ml: Vec<f64>,
    pub th: Vec<f64>,
}

/// Per-element quantities reused across the six coordinate derivatives.
struct ElementData {
    b: [f64; 3],
    c: [f64; 3],
    area: f64,
    u_local: [f64; 6],
    stress2a: [f64; 3],
    g_value: f64,
    dg_dsigma: [f64; 3],
}

/// Derivative of the triangle area with respect to coordinate `axis` of local
/// node `l`: dA/dx_l = b_l / 2, dA/dy_l = c_l / 2.
#[inline]
fn d_area(b: &[f64; 3], c: &[f64; 3], l: usize, axis: usize) -> f64 {
    if axis == 0 {
        b[l] / 2.0
    } else {
        c[l] / 2.0
    }
}

/// Derivative patterns of the b/c geometry vectors with respect to coordinate
/// `axis` of local node `l`; entries are 0 or +-1.
#[inline]
fn d_geometry(l: usize, axis: usize) -> ([f64; 3], [f64; 3]) {
    let mut db = [0.0; 3];
    let mut dc = [0.0; 3];
    for i in 0..3 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        if axis == 1 {
            // b_i = y_j - y_k
            if l == j {
                db[i] = 1.0;
            } else if l == k {
                db[i] = -1.0;
            }
        } else {
            // c_i = x_k - x_j
            if l == k {
                dc[i] = 1.0;
            } else if l == j {
                dc[i] = -1.0;
            }
        }
    }
    (db, dc)
}

fn element_data(
    mesh: &Mesh,
    mat: &Material,
    rule_dirs: &[[f64; 3]],
    u: &DVector<f64>,
    e: usize,
) -> ElementData {
    let tri = mesh.elements[e];
    let (b, c, area) = tri_geometry(element_points(mesh, e));
    let mut u_local = [0.0; 6];
    for i in 0..3 {
        u_local[2 * i] = u[2 * tri[i]];
        u_local[2 * i + 1] = u[2 * tri[i] + 1];
    }
    let strain2a = bnum_apply(&b, &c, &u_local);
    let stress2a = cmat_apply(mat.lambda, mat.mu, &strain2a);
    let inv2a = 1.0 / (2.0 * area);
    let sigma = [stress2a[0] * inv2a, stress2a[1] * inv2a, stress2a[2] * inv2a];

    // Angular quadrature value and its Voigt-stress derivative:
    // G = (1/n_phi) sum_k (sn_k/s0)^m, dG/dsigma = (m/(s0 n_phi)) sum (sn/s0)^(m-1) v.
    let inv_s0 = 1.0 / mat.sigma0;
    let mut g_value = 0.0;
    let mut dg = [0.0; 3];
    for v in rule_dirs {
        let sn = sigma[0] * v[0] + sigma[1] * v[1] + sigma[2] * v[2];
        if sn > 0.0 {
            g_value += pow_m(sn * inv_s0, mat.m);
            let w = mat.m * inv_s0 * pow_m(sn * inv_s0, mat.m - 1.0);
            dg[0] += w * v[0];
            dg[1] += w * v[1];
            dg[2] += w * v[2];
        }
    }
    let inv_nphi = 1.0 / rule_dirs.len() as f64;
    g_value *= inv_nphi;
    for d in &mut dg {
        *d *= inv_nphi;
    }

    ElementData { b, c, area, u_local, stress2a, g_value, dg_dsigma: dg }
}

/// Gradient of the discretized intensity measure with respect to all node
/// coordinates, via the discrete adjoint. The adjoint field is clamped (zero)
/// at Dirichlet dofs; geometric contributions are accumulated at every node,
/// including boundary ones, so the chained gradient matches finite
/// differences in the design parameters.
// The `l` (local vertex) and `axis` loops index several parallel per-element
// arrays at once; positional loops keep the stencil algebra legible.
#[allow(clippy::needless_range_loop)]
pub fn grad_f1_nodes(
    mesh: &Mesh,
    mat: &Material,
    bc: &BoundaryConditions,
    rule: &AngularRule,
    state: &StateSolution,
    solver: &DirichletSolver,
) -> Result<Vec<[f64; 2]>> {
    let dirs = rule.voigt_directions();
    let n_elems = mesh.elements.len();
    let mut elems = Vec::with_capacity(n_elems);
    let mut dj_du = DVector::zeros(2 * mesh.nodes.len());

    for e in 0..n_elems {
        let data = element_data(mesh, mat, &dirs, &state.u, e);
        // dJ/du_e = A (C Bnum / 2A)^T dG = Bnum^T C dG / 2.
        let cg = cmat_apply(mat.lambda, mat.mu, &data.dg_dsigma);
        let contrib = crate::fem::bnum_transpose_apply(&data.b, &data.c, &cg);
        let tri = mesh.elements[e];
        for i in 0..3 {
            dj_du[2 * tri[i]] += contrib[2 * i] / 2.0;
            dj_du[2 * tri[i] + 1] += contrib[2 * i + 1] / 2.0;
        }
        elems.push(data);
    }

    let psi = solver.solve(&dj_du);

    let mut grad = vec![[0.0; 2]; mesh.nodes.len()];
    for (e, data) in elems.iter().enumerate() {
        let tri = mesh.elements[e];
        let mut psi_local = [0.0; 6];
        for i in 0..3 {
            psi_local[2 * i] = psi[2 * tri[i]];
            psi_local[2 * i + 1] = psi[2 * tri[i] + 1];
        }
        let epsi2a = bnum_apply(&data.b, &data.c, &psi_local);
        // psi^T K_e u = epsi . C eu / 4A (both strain vectors carry the 2A factor).
        let c_eu = &data.stress2a;
        let psi_k_u = dot3(&epsi2a, c_eu) / (4.0 * data.area);
        let body_dot = bc.body_force[0]
            * (psi_local[0] + psi_local[2] + psi_local[4])
            + bc.body_force[1] * (psi_local[1] + psi_local[3] + psi_local[5]);
        let inv2a = 1.0 / (2.0 * data.area);
        let sigma = [c_eu[0] * inv2a, c_eu[1] * inv2a, c_eu[2] * inv2a];

        for l in 0..3 {
            for axis in 0..2 {
                let da = d_area(&data.b, &data.c, l, axis);
                let (db, dc) = d_geometry(l, axis);
                let deu = bnum_apply(&db, &dc, &data.u_local);
                let depsi = bnum_apply(&db, &dc, &psi_local);
                let c_deu = cmat_apply(mat.lambda, mat.mu, &deu);
                // dsigma = C dBnum u / 2A - (dA/A) sigma.
                let dsigma = [
                    c_deu[0] * inv2a - da / data.area * sigma[0],
                    c_deu[1] * inv2a - da / data.area * sigma[1],
                    c_deu[2] * inv2a - da / data.area * sigma[2],
                ];
                let explicit = da * data.g_value + data.area * dot3(&data.dg_dsigma, &dsigma);
                let psi_dk_u = (dot3(&depsi, c_eu) + dot3(&epsi2a, &c_deu)) / (4.0 * data.area)
                    - da / data.area * psi_k_u;
                let psi_db = da / 3.0 * body_dot;
                grad[tri[l]][axis] += explicit + psi_db - psi_dk_u;
            }
        }
    }

    // Traction edges: the load g L/2 per edge node varies with the edge length.
    for edge in &mesh.neumann_fixed_edges {
        let (p, q) = (mesh.nodes[edge[0]], mesh.nodes[edge[1]]);
        let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
        let psi_sum = [
            psi[2 * edge[0]] + psi[2 * edge[1]],
            psi[2 * edge[0] + 1] + psi[2 * edge[1] + 1],
        ];
        let coeff = (psi_sum[0] * bc.traction[0] + psi_sum[1] * bc.traction[1]) / 2.0;
        for axis in 0..2 {
            let dl_dp = (p[axis] - q[axis]) / len;
            grad[edge[0]][axis] += coeff * dl_dp;
            grad[edge[1]][axis] -= coeff * dl_dp;
        }
    }

    Ok(grad)
}

#[inline]
fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Exact derivative of the total area with respect to every node coordinate.
#[must_use]
pub fn grad_f2_nodes(mesh: &Mesh) -> Vec<[f64; 2]> {
    let mut grad = vec![[0.0; 2]; mesh.nodes.len()];
    for (e, tri) in mesh.elements.iter().enumerate() {
        let (b, c, _area) = tri_geometry(element_points(mesh, e));
        for l in 0..3 {
            grad[tri[l]][0] += b[l] / 2.0;
            grad[tri[l]][1] += c[l] / 2.0;
        }
    }
    grad
}

/// Chains a node-coordinate gradient to the shape parameters. Only
/// y-components propagate (x-positions are fixed):
/// d/d(ml_i) = sum_j dJ/dy_ij, d/d(th_i) = sum_j dJ/dy_ij * (j+1 - (n_y+1)/2)/(n_y-1).
#[must_use]
pub fn chain_to_rho(grad_nodes: &[[f64; 2]], n_x: usize, n_y: usize) -> RhoGradient {
    let mut ml = vec![0.0; n_x];
    let mut th = vec![0.0; n_x];
    let center = (n_y + 1) as f64 / 2.0;
    let denom = (n_y - 1) as f64;
    for i in 0..n_x {
        for j in 0..n_y {
            let gy = grad_nodes[i * n_y + j][1];
            ml[i] += gy;
            th[i] += gy * ((j + 1) as f64 - center) / denom;
        }
    }
    RhoGradient { ml, th }
}

/// Chains a shape-parameter gradient to the spline coefficients via the
/// transposed collocation matrix, flat output `[B^T ml..., B^T th...]`.
#[must_use]
pub fn rho_gradient_to_gamma(rho_grad: &RhoGradient, bmat: &DMatrix<f64>) -> Vec<f64> {
    let gml = bmat.transpose() * DVector::from_column_slice(&rho_grad.ml);
    let gth = bmat.transpose() * DVector::from_column_slice(&rho_grad.th);
    let mut flat = gml.as_slice().to_vec();
    flat.extend_from_slice(gth.as_slice());
    flat
}

/// Full chain from node gradient to spline-coefficient gradient.
#[must_use]
pub fn chain_to_gamma(
    grad_nodes: &[[f64; 2]],
    n_x: usize,
    n_y: usize,
    bmat: &DMatrix<f64>,
) -> Vec<f64> {
    rho_gradient_to_gamma(&chain_to_rho(grad_nodes, n_x, n_y), bmat)
}

/// Central finite differences `(f(x + eps e_j) - f(x - eps e_j)) / (2 eps)`
/// per coordinate; validation oracle and fallback gradient mode.
pub fn fd_gradient<F>(mut f: F, x: &[f64], eps: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    assert!(eps > 0.0, "finite-difference increment must be positive");
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for j in 0..x.len() {
        probe[j] = x[j] + eps;
        let plus = f(&probe)?;
        probe[j] = x[j] - eps;
        let minus = f(&probe)?;
        probe[j] = x[j];
        grad.push((plus - minus) / (2.0 * eps));
    }
    Ok(grad)
}

/// Evaluates an objective as a function of the flat coefficient vector; used
/// by the finite-difference mode and the validation export.
pub fn eval_on_gamma<F>(
    flat: &[f64],
    bmat: &DMatrix<f64>,
    eval_shape: F,
) -> Result<f64>
where
    F: FnOnce(&crate::geometry::ShapeParams) -> Result<f64>,
{
    let gamma = BSplineCoeffs::from_flat(flat);
    let rho = gamma_to_rho_with(&gamma, bmat)?;
    eval_shape(&rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{solve_state_with, BoundaryConditions, Material, SOLVER_TOL_DEFAULT};
    use crate::geometry::{build_grid, GridSpec, ShapeParams};
    use crate::objectives::{intensity_measure, volume, AngularRule};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn beo() -> Material {
        Material::new(320e9, 0.25, 5.0, 2.4e7, 140e6).unwrap()
    }

    fn test_mesh(n_x: usize, n_y: usize) -> crate::geometry::Mesh {
        let spec = GridSpec::equidistant(n_x, n_y, 0.0, 1.0);
        let ml: Vec<f64> = (0..n_x)
            .map(|i| 0.05 * (std::f64::consts::PI * i as f64 / (n_x - 1) as f64).sin())
            .collect();
        let rho = ShapeParams { ml, th: vec![0.2; n_x] };
        build_grid(&rho, &spec).unwrap()
    }

    #[test]
    fn volume_gradient_is_translation_invariant() {
        let mesh = test_mesh(9, 5);
        let grad = grad_f2_nodes(&mesh);
        let sum_x: f64 = grad.iter().map(|g| g[0]).sum();
        let sum_y: f64 = grad.iter().map(|g| g[1]).sum();
        assert!(sum_x.abs() < 1e-13);
        assert!(sum_y.abs() < 1e-13);
    }

    #[test]
    fn unit_square_corner_gradient_is_half() {
        let spec = GridSpec::equidistant(2, 2, 0.0, 1.0);
        let rho = ShapeParams { ml: vec![0.5; 2], th: vec![1.0; 2] };
        let mesh = build_grid(&rho, &spec).unwrap();
        let grad = grad_f2_nodes(&mesh);
        // Top-right corner is node (1,1) at flat index 3.
        assert_relative_eq!(grad[3][1], 0.5, max_relative = 1e-14);
    }

    #[test]
    fn volume_gradient_matches_finite_differences() {
        let mesh = test_mesh(6, 4);
        let grad = grad_f2_nodes(&mesh);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let h = 1e-6;
        for _ in 0..10 {
            let n = rng.gen_range(0..mesh.nodes.len());
            let axis = rng.gen_range(0..2);
            let mut plus = mesh.clone();
            plus.nodes[n][axis] += h;
            let mut minus = mesh.clone();
            minus.nodes[n][axis] -= h;
            let fd = (volume(&plus) - volume(&minus)) / (2.0 * h);
            assert!((fd - grad[n][axis]).abs() < 1e-9, "node {} axis {}", n, axis);
        }
    }

    #[test]
    fn intensity_gradient_zero_without_load() {
        let mesh = test_mesh(5, 3);
        let mat = beo();
        let bc = BoundaryConditions { body_force: [0.0, 0.0], traction: [0.0, 0.0] };
        let rule = AngularRule::new(64).unwrap();
        let (state, solver) = solve_state_with(&mesh, &mat, &bc, SOLVER_TOL_DEFAULT).unwrap();
        let grad = grad_f1_nodes(&mesh, &mat, &bc, &rule, &state, &solver).unwrap();
        for g in grad {
            assert_eq!(g, [0.0, 0.0]);
        }
    }

    #[test]
    fn intensity_gradient_matches_directional_finite_differences() {
        let mesh = test_mesh(9, 4);
        let mat = beo();
        let bc = BoundaryConditions { body_force: [0.0, 0.0], traction: [1e7, 0.0] };
        let rule = AngularRule::new(64).unwrap();
        let (state, solver) = solve_state_with(&mesh, &mat, &bc, SOLVER_TOL_DEFAULT).unwrap();
        let grad = grad_f1_nodes(&mesh, &mat, &bc, &rule, &state, &solver).unwrap();

        let eval = |m: &crate::geometry::Mesh| -> f64 {
            let st = crate::fem::solve_state(m, &mat, &bc).unwrap();
            intensity_measure(&st, &mat, &rule)
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let eps = 1e-6;
        for trial in 0..20 {
            let dir: Vec<[f64; 2]> = (0..mesh.nodes.len())
                .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
                .collect();
            let mut plus = mesh.clone();
            let mut minus = mesh.clone();
            for (n, d) in dir.iter().enumerate() {
                for (a, &da) in d.iter().enumerate() {
                    plus.nodes[n][a] += eps * da;
                    minus.nodes[n][a] -= eps * da;
                }
            }
            let fd = (eval(&plus) - eval(&minus)) / (2.0 * eps);
            let analytic: f64 = dir
                .iter()
                .enumerate()
                .map(|(n, d)| grad[n][0] * d[0] + grad[n][1] * d[1])
                .sum();
            let rel = (fd - analytic).abs() / fd.abs().max(1e-300);
            assert!(rel <= 1e-5, "trial {}: fd {} vs adjoint {} rel {}", trial, fd, analytic, rel);
        }
    }

    #[test]
    fn chain_to_rho_weights_match_grid_formula() {
        // A gradient of 1 on every y-component chains to n_y per meanline entry
        // and 0 per thickness entry (the column offsets are symmetric).
        let grad = vec![[0.0, 1.0]; 3 * 5];
        let rho_grad = chain_to_rho(&grad, 3, 5);
        for i in 0..3 {
            assert_relative_eq!(rho_grad.ml[i], 5.0, max_relative = 1e-14);
            assert!(rho_grad.th[i].abs() < 1e-14);
        }
        // x-components never propagate.
        let grad_x = vec![[3.0, 0.0]; 3 * 5];
        let rho_grad_x = chain_to_rho(&grad_x, 3, 5);
        assert!(rho_grad_x.ml.iter().all(|&v| v == 0.0));
        assert!(rho_grad_x.th.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fd_gradient_exact_for_linear_functional() {
        let c = vec![1.5, -2.0, 0.25];
        let f = |x: &[f64]| Ok(x.iter().zip(&c).map(|(a, b)| a * b).sum());
        let g = fd_gradient(f, &[0.3, 0.1, -0.7], 1e-6).unwrap();
        for (gi, ci) in g.iter().zip(&c) {
            assert_relative_eq!(gi, ci, max_relative = 1e-9);
        }
    }

    #[test]
    fn fd_gradient_quadratic() {
        let f = |x: &[f64]| Ok(x.iter().map(|v| v * v).sum());
        let x0 = vec![1.0, -0.5, 2.0];
        let g = fd_gradient(f, &x0, 1e-6).unwrap();
        for (gi, xi) in g.iter().zip(&x0) {
            assert!((gi - 2.0 * xi).abs() < 1e-9);
        }
    }

    #[test]
    fn fd_error_decreases_with_eps_until_roundoff() {
        // f(x) = sin(x0): truncation error is eps^2/6 cos; shrinking eps from
        // 1e-2 to 1e-5 must shrink the error monotonically.
        let f = |x: &[f64]| Ok(x[0].sin());
        let x0 = vec![0.9];
        let exact = 0.9f64.cos();
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
            let g = fd_gradient(f, &x0, eps).unwrap();
            let err = (g[0] - exact).abs();
            assert!(err < last, "eps {}: {} !< {}", eps, err, last);
            last = err;
        }
    }
}
