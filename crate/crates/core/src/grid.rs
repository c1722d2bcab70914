//! Uniform node-centred grid on the unit square and the discrete calculus
//! built on it.
//!
//! Nodes are stored row-major by `(j, i)`: node `k = j * n + i` sits at
//! `(i * h, j * h)`. The gradient uses second-order central differences in
//! the interior and second-order one-sided differences on the boundary. The
//! divergence is *defined* as the negative adjoint of that gradient under the
//! trapezoidal inner product, so discrete integration by parts holds to
//! round-off and `divergence ∘ gradient` is a symmetric Neumann Laplacian.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes per side, got {n}"
            )));
        }
        Ok(Grid {
            n,
            h: 1.0 / (n - 1) as f64,
        })
    }

    /// Nodes per side.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Node spacing.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Total node count `n²`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.n, k / self.n)
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.ij(k);
        (i as f64 * self.h, j as f64 * self.h)
    }

    /// 1-D trapezoid factor: ½ at the two ends, 1 elsewhere.
    #[inline]
    pub fn edge_factor(&self, i: usize) -> f64 {
        if i == 0 || i == self.n - 1 {
            0.5
        } else {
            1.0
        }
    }

    /// Dimensionless trapezoid factor of node `k` (1, ½ on edges, ¼ at corners).
    #[inline]
    pub fn trapezoid_factor(&self, k: usize) -> f64 {
        let (i, j) = self.ij(k);
        self.edge_factor(i) * self.edge_factor(j)
    }

    /// Area quadrature weight of node `k`.
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        self.trapezoid_factor(k) * self.h * self.h
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.weight(k)).collect()
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        self.boundary_directions(k) > 0
    }

    /// Number of boundary sides node `k` lies on (0, 1, or 2 at corners).
    pub fn boundary_directions(&self, k: usize) -> usize {
        let (i, j) = self.ij(k);
        let last = self.n - 1;
        usize::from(i == 0) + usize::from(i == last) + usize::from(j == 0) + usize::from(j == last)
    }

    /// Trapezoidal weight of node `k` for integrals over ∂Ω (zero in the interior).
    pub fn boundary_weight(&self, k: usize) -> f64 {
        let (i, j) = self.ij(k);
        let last = self.n - 1;
        let mut w = 0.0;
        if i == 0 || i == last {
            w += self.h * self.edge_factor(j);
        }
        if j == 0 || j == last {
            w += self.h * self.edge_factor(i);
        }
        w
    }

    pub fn boundary_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.boundary_weight(k)).collect()
    }

    /// Distance of node `k` to the boundary, in nodes.
    pub fn depth(&self, k: usize) -> usize {
        let (i, j) = self.ij(k);
        let last = self.n - 1;
        i.min(j).min(last - i).min(last - j)
    }

    /// `true` for nodes strictly inside the collar of width `margin` nodes.
    pub fn interior_mask(&self, margin: usize) -> Vec<bool> {
        (0..self.len()).map(|k| self.depth(k) >= margin).collect()
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

/// Builds a grid with `n` nodes per side.
pub fn make_grid(n: usize) -> Result<Grid> {
    Grid::new(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at node {k}")));
        }
        Ok(ScalarField { grid, values })
    }

    /// Unchecked constructor for values produced by finite arithmetic.
    pub(crate) fn from_vec(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        ScalarField::from_vec(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: Grid) -> Self {
        ScalarField::constant(grid, 0.0)
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.coords(k);
                f(x, y)
            })
            .collect();
        ScalarField::from_vec(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField::from_vec(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        ScalarField::from_vec(self.grid, values)
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a + s * b)
    }

    /// Zeroes every node where `mask` is false.
    pub fn masked(&self, mask: &[bool]) -> Self {
        let values = self
            .values
            .iter()
            .zip(mask)
            .map(|(&v, &keep)| if keep { v } else { 0.0 })
            .collect();
        ScalarField::from_vec(self.grid, values)
    }

    /// Weighted mean `∫f / |Ω|`; the domain has unit area.
    pub fn mean(&self) -> f64 {
        let g = &self.grid;
        let s: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| g.trapezoid_factor(k) * v)
            .sum();
        s * g.h() * g.h()
    }

    pub fn centered(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField::from_vec(
            self.grid,
            self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn norm_l2(&self) -> f64 {
        inner_l2(self, self).map(f64::sqrt).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at node {k}")));
        }
        Ok(ComplexField { grid, values })
    }

    pub(crate) fn from_vec(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ComplexField { grid, values }
    }

    pub fn constant(grid: Grid, c: Complex64) -> Self {
        ComplexField::from_vec(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: Grid) -> Self {
        ComplexField::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.coords(k);
                f(x, y)
            })
            .collect();
        ComplexField::from_vec(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn sub(&self, other: &ComplexField) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        ComplexField::from_vec(self.grid, values)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexField::from_vec(self.grid, self.values.iter().map(|v| s * v).collect())
    }

    /// Pointwise `|u|²`.
    pub fn abs2(&self) -> ScalarField {
        ScalarField::from_vec(self.grid, self.values.iter().map(|v| v.norm_sqr()).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn norm_l2(&self) -> f64 {
        inner_l2_complex(self, self)
            .map(|z| z.re.max(0.0).sqrt())
            .unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    vx: Vec<f64>,
    vy: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: Grid, vx: Vec<f64>, vy: Vec<f64>) -> Result<Self> {
        if vx.len() != grid.len() || vy.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "vector components must have {} values",
                grid.len()
            )));
        }
        if vx.iter().chain(&vy).any(|v| !v.is_finite()) {
            return Err(Error::InvalidField("non-finite vector component".into()));
        }
        Ok(VectorField { grid, vx, vy })
    }

    pub(crate) fn from_vecs(grid: Grid, vx: Vec<f64>, vy: Vec<f64>) -> Self {
        VectorField { grid, vx, vy }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let (vx, vy) = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.coords(k);
                f(x, y)
            })
            .unzip();
        VectorField { grid, vx, vy }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn vx(&self) -> &[f64] {
        &self.vx
    }

    pub fn vy(&self) -> &[f64] {
        &self.vy
    }

    /// Pointwise product with a scalar field.
    pub fn scaled_by(&self, s: &ScalarField) -> Self {
        let vx = self.vx.iter().zip(s.values()).map(|(a, b)| a * b).collect();
        let vy = self.vy.iter().zip(s.values()).map(|(a, b)| a * b).collect();
        VectorField::from_vecs(self.grid, vx, vy)
    }

    pub fn add(&self, other: &VectorField) -> Self {
        let vx = self.vx.iter().zip(&other.vx).map(|(a, b)| a + b).collect();
        let vy = self.vy.iter().zip(&other.vy).map(|(a, b)| a + b).collect();
        VectorField::from_vecs(self.grid, vx, vy)
    }

    /// Pointwise dot product.
    pub fn dot(&self, other: &VectorField) -> ScalarField {
        let values = (0..self.grid.len())
            .map(|k| self.vx[k] * other.vx[k] + self.vy[k] * other.vy[k])
            .collect();
        ScalarField::from_vec(self.grid, values)
    }

    pub fn max_norm(&self) -> f64 {
        self.vx
            .iter()
            .zip(&self.vy)
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }
}

// One-dimensional first-derivative stencil: row r of D as (column, coefficient·2h).
pub(crate) fn d1_row(n: usize, r: usize) -> [(usize, f64); 3] {
    if r == 0 {
        [(0, -3.0), (1, 4.0), (2, -1.0)]
    } else if r == n - 1 {
        [(n - 3, 1.0), (n - 2, -4.0), (n - 1, 3.0)]
    } else {
        [(r - 1, -1.0), (r + 1, 1.0), (r, 0.0)]
    }
}

fn d1_apply(n: usize, h: f64, line: impl Fn(usize) -> f64, mut out: impl FnMut(usize, f64)) {
    let s = 0.5 / h;
    for r in 0..n {
        let v: f64 = d1_row(n, r).iter().map(|&(c, a)| a * line(c)).sum();
        out(r, s * v);
    }
}

// Applies A⁻¹ Dᵀ A along one line, where A holds the 1-D trapezoid factors.
fn d1_adjoint_apply(
    grid: &Grid,
    line: impl Fn(usize) -> f64,
    mut out: impl FnMut(usize, f64),
) {
    let n = grid.n();
    let s = 0.5 / grid.h();
    let mut acc = vec![0.0; n];
    for r in 0..n {
        let ar = grid.edge_factor(r) * line(r);
        for (c, a) in d1_row(n, r) {
            acc[c] += a * ar;
        }
    }
    for (c, v) in acc.into_iter().enumerate() {
        out(c, s * v / grid.edge_factor(c));
    }
}

/// Discrete gradient.
pub fn gradient(f: &ScalarField) -> VectorField {
    let g = *f.grid();
    let n = g.n();
    let h = g.h();
    let v = f.values();
    let mut vx = vec![0.0; g.len()];
    let mut vy = vec![0.0; g.len()];
    for j in 0..n {
        d1_apply(n, h, |i| v[j * n + i], |i, d| vx[j * n + i] = d);
    }
    for i in 0..n {
        d1_apply(n, h, |j| v[j * n + i], |j, d| vy[j * n + i] = d);
    }
    VectorField::from_vecs(g, vx, vy)
}

/// Discrete divergence, the exact negative adjoint of [`gradient`].
///
/// Away from the boundary (three or more nodes in) this is the central
/// difference divergence; the outer rows form the boundary closure and are
/// not pointwise consistent on their own.
pub fn divergence(field: &VectorField) -> ScalarField {
    let g = *field.grid();
    let n = g.n();
    let (vx, vy) = (field.vx(), field.vy());
    let mut out = vec![0.0; g.len()];
    for j in 0..n {
        d1_adjoint_apply(&g, |i| vx[j * n + i], |i, d| out[j * n + i] -= d);
    }
    for i in 0..n {
        d1_adjoint_apply(&g, |j| vy[j * n + i], |j, d| out[j * n + i] -= d);
    }
    ScalarField::from_vec(g, out)
}

/// Trapezoidal `∫ f g dx`.
pub fn inner_l2(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    f.grid().check_same(g.grid())?;
    let grid = f.grid();
    let s: f64 = f
        .values()
        .iter()
        .zip(g.values())
        .enumerate()
        .map(|(k, (a, b))| grid.trapezoid_factor(k) * a * b)
        .sum();
    Ok(s * grid.h() * grid.h())
}

/// Trapezoidal `∫ f ḡ dx`, conjugate-linear in the second argument.
pub fn inner_l2_complex(f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
    f.grid().check_same(g.grid())?;
    let grid = f.grid();
    let s: Complex64 = f
        .values()
        .iter()
        .zip(g.values())
        .enumerate()
        .map(|(k, (a, b))| grid.trapezoid_factor(k) * a * b.conj())
        .sum();
    Ok(s * grid.h() * grid.h())
}

/// Trapezoidal `∫ V·U dx` for vector fields.
pub fn inner_l2_vector(a: &VectorField, b: &VectorField) -> Result<f64> {
    a.grid().check_same(b.grid())?;
    let grid = a.grid();
    let s: f64 = (0..grid.len())
        .map(|k| grid.trapezoid_factor(k) * (a.vx[k] * b.vx[k] + a.vy[k] * b.vy[k]))
        .sum();
    Ok(s * grid.h() * grid.h())
}

/// Discrete H¹ norm `sqrt(‖f‖² + ‖∇f‖²)`.
pub fn norm_h1(f: &ScalarField) -> f64 {
    let g = gradient(f);
    let l2 = inner_l2(f, f).unwrap_or(0.0);
    let grad = inner_l2_vector(&g, &g).unwrap_or(0.0);
    (l2 + grad).sqrt()
}
