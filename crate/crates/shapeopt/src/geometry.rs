//! Structured triangle meshes built from meanline/thickness shape parameters.

use crate::error::{Error, Result};

/// Fixed x-discretization of the component: `n_x` vertical grid lines, each
/// carrying `n_y` nodes. The x-positions are equidistant and never optimized.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n_x: usize,
    pub n_y: usize,
    pub x_coords: Vec<f64>,
}

impl GridSpec {
    /// Equidistant grid over `[x_start, x_end]`.
    #[must_use]
    pub fn equidistant(n_x: usize, n_y: usize, x_start: f64, x_end: f64) -> Self {
        assert!(n_x >= 2 && n_y >= 2, "grid needs at least 2x2 lines");
        assert!(x_end > x_start, "empty x-range");
        let h = (x_end - x_start) / (n_x - 1) as f64;
        let x_coords = (0..n_x).map(|i| x_start + h * i as f64).collect();
        GridSpec { n_x, n_y, x_coords }
    }
}

/// Shape parameters: per grid line, the meanline height `ml` and the vertical
/// thickness `th` (both meters). A valid shape has `th > 0` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeParams {
    pub ml: Vec<f64>,
    pub th: Vec<f64>,
}

/// A structured triangulation of the component. Node `(i, j)` has flat index
/// `i * n_y + j`, with `j = 0` the lower boundary and `j = n_y - 1` the upper.
/// All triangles are counterclockwise. Boundary roles: the left column is
/// clamped (Dirichlet), the right column carries the surface load, and the
/// upper/lower polylines are traction free and shape-designable.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub n_x: usize,
    pub n_y: usize,
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 3]>,
    pub dirichlet_nodes: Vec<usize>,
    pub neumann_fixed_edges: Vec<[usize; 2]>,
    pub free_edges_upper: Vec<[usize; 2]>,
    pub free_edges_lower: Vec<[usize; 2]>,
}

/// Signed area of triangle `(a, b, c)`; positive for counterclockwise order.
#[must_use]
pub fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Builds the structured mesh for shape `rho` on grid `spec`.
///
/// Node `(i, j)` sits at `(x_i, ml_i + th_i * (j + 1 - (n_y + 1)/2) / (n_y - 1))`
/// so each column spans `[ml_i - th_i/2, ml_i + th_i/2]`. Every grid cell is
/// split along its lower-left to upper-right diagonal.
pub fn build_grid(rho: &ShapeParams, spec: &GridSpec) -> Result<Mesh> {
    let (n_x, n_y) = (spec.n_x, spec.n_y);
    assert_eq!(rho.ml.len(), n_x, "meanline length mismatch");
    assert_eq!(rho.th.len(), n_x, "thickness length mismatch");

    for (i, &t) in rho.th.iter().enumerate() {
        if t <= 0.0 {
            return Err(Error::NonPositiveThickness { index: i, value: t, min: 0.0 });
        }
    }

    let mut nodes = Vec::with_capacity(n_x * n_y);
    let denom = (n_y - 1) as f64;
    let center = (n_y + 1) as f64 / 2.0;
    for i in 0..n_x {
        for j in 0..n_y {
            let frac = ((j + 1) as f64 - center) / denom;
            nodes.push([spec.x_coords[i], rho.ml[i] + rho.th[i] * frac]);
        }
    }

    let node = |i: usize, j: usize| i * n_y + j;
    let mut elements = Vec::with_capacity(2 * (n_x - 1) * (n_y - 1));
    for i in 0..n_x - 1 {
        for j in 0..n_y - 1 {
            let (ll, lr) = (node(i, j), node(i + 1, j));
            let (ul, ur) = (node(i, j + 1), node(i + 1, j + 1));
            elements.push([ll, lr, ur]);
            elements.push([ll, ur, ul]);
        }
    }
    for (e, tri) in elements.iter().enumerate() {
        let area = signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
        if area <= 0.0 {
            return Err(Error::DegenerateCell { element: e, area });
        }
    }

    let dirichlet_nodes = (0..n_y).map(|j| node(0, j)).collect();
    let neumann_fixed_edges = (0..n_y - 1)
        .map(|j| [node(n_x - 1, j), node(n_x - 1, j + 1)])
        .collect();
    let free_edges_lower = (0..n_x - 1).map(|i| [node(i, 0), node(i + 1, 0)]).collect();
    let free_edges_upper = (0..n_x - 1)
        .map(|i| [node(i, n_y - 1), node(i + 1, n_y - 1)])
        .collect();

    Ok(Mesh {
        n_x,
        n_y,
        nodes,
        elements,
        dirichlet_nodes,
        neumann_fixed_edges,
        free_edges_upper,
        free_edges_lower,
    })
}

impl Mesh {
    /// Positive area of element `e`.
    #[must_use]
    pub fn element_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.elements[e];
        signed_area(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    /// Plain-text dump: header `nodes <count> elements <count>`, one node per
    /// line as `i j x y` (grid indices), one element per line as `a b c`
    /// (0-based node indices).
    #[must_use]
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("nodes {} elements {}\n", self.nodes.len(), self.elements.len()));
        for (idx, p) in self.nodes.iter().enumerate() {
            let (i, j) = (idx / self.n_y, idx % self.n_y);
            out.push_str(&format!("{} {} {} {}\n", i, j, p[0], p[1]));
        }
        for tri in &self.elements {
            out.push_str(&format!("{} {} {}\n", tri[0], tri[1], tri[2]));
        }
        out
    }
}

/// Converts meanline/thickness to the upper/lower boundary heights:
/// `upper = ml + th/2`, `lower = ml - th/2`.
#[must_use]
pub fn ml_th_to_ul(rho: &ShapeParams) -> (Vec<f64>, Vec<f64>) {
    let upper = rho.ml.iter().zip(&rho.th).map(|(m, t)| m + t / 2.0).collect();
    let lower = rho.ml.iter().zip(&rho.th).map(|(m, t)| m - t / 2.0).collect();
    (upper, lower)
}

/// Inverse of [`ml_th_to_ul`]: `ml = (upper + lower)/2`, `th = upper - lower`.
pub fn ul_to_ml_th(upper: &[f64], lower: &[f64]) -> Result<ShapeParams> {
    assert_eq!(upper.len(), lower.len(), "boundary length mismatch");
    let mut ml = Vec::with_capacity(upper.len());
    let mut th = Vec::with_capacity(upper.len());
    for (i, (&u, &l)) in upper.iter().zip(lower).enumerate() {
        if u <= l {
            return Err(Error::NonPositiveThickness { index: i, value: u - l, min: 0.0 });
        }
        ml.push((u + l) / 2.0);
        th.push(u - l);
    }
    Ok(ShapeParams { ml, th })
}
