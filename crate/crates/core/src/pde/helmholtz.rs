//! Robin Helmholtz problem `Δu + ω²q u = s`, `∂u/∂ν − iωu = g` on the unit square.
//!
//! Boundary nodes use ghost-node elimination of the Robin condition, which
//! keeps the scheme second order. Each row is multiplied by minus the node's
//! trapezoid factor, so the assembled matrix is complex-symmetric. At ω = 0
//! the operator is the singular Neumann Laplacian and the system is bordered
//! by one row fixing the boundary integral of the solution.

use num_complex::Complex64;

use super::linear::{Factorized, LinearSolveReport, SolverOptions, SparseSystem};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid, ScalarField};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn validate(grid: &Grid, q: &ScalarField, omega: f64) -> Result<()> {
    grid.check_same(q.grid())?;
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "frequency must be finite and non-negative, got {omega}"
        )));
    }
    if let Some(k) = q.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Assembly(format!(
            "permittivity must be positive, node {k} has {}",
            q.values()[k]
        )));
    }
    Ok(())
}

/// Assembles the (possibly bordered) Helmholtz matrix for `q` at `omega`.
pub fn assemble_helmholtz(grid: &Grid, q: &ScalarField, omega: f64) -> Result<SparseSystem<Complex64>> {
    validate(grid, q, omega)?;
    let n = grid.n();
    let h = grid.h();
    let len = grid.len();
    let inv_h2 = 1.0 / (h * h);
    let bordered = omega == 0.0;
    let mut t = Vec::with_capacity(5 * len + 8 * n);
    for k in 0..len {
        let (i, j) = grid.ij(k);
        let fac = grid.trapezoid_factor(k);
        for (pos, stride) in [(i, 1), (j, n)] {
            if pos == 0 {
                t.push((k, k + stride, c(-2.0 * fac * inv_h2)));
            } else if pos == n - 1 {
                t.push((k, k - stride, c(-2.0 * fac * inv_h2)));
            } else {
                t.push((k, k - stride, c(-fac * inv_h2)));
                t.push((k, k + stride, c(-fac * inv_h2)));
            }
        }
        let b = grid.boundary_directions(k) as f64;
        let diag = c(fac * (4.0 * inv_h2 - omega * omega * q.values()[k]))
            - I * (fac * 2.0 / h * b * omega);
        t.push((k, k, diag));
        if bordered {
            let cw = grid.boundary_weight(k) / h;
            if cw > 0.0 {
                t.push((k, len, c(cw)));
                t.push((len, k, c(cw)));
            }
        }
    }
    SparseSystem::from_triplets(len + usize::from(bordered), t, usize::from(bordered))
}

/// A factored Helmholtz operator for one `(q, ω)` pair, reusable across right-hand sides.
pub struct HelmholtzOperator {
    grid: Grid,
    q: ScalarField,
    omega: f64,
    factor: Factorized<Complex64>,
}

impl HelmholtzOperator {
    pub fn new(q: &ScalarField, omega: f64, options: &SolverOptions) -> Result<Self> {
        let grid = *q.grid();
        let system = assemble_helmholtz(&grid, q, omega)?;
        Ok(HelmholtzOperator {
            grid,
            q: q.clone(),
            omega,
            factor: Factorized::new(system, options)?,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn q(&self) -> &ScalarField {
        &self.q
    }

    pub fn system(&self) -> &SparseSystem<Complex64> {
        self.factor.system()
    }

    /// Solves the assembled system for a raw right-hand side (length = system dimension).
    pub fn solve_system(&self, rhs: &[Complex64]) -> Result<(Vec<Complex64>, LinearSolveReport)> {
        self.factor.solve(rhs)
    }

    /// Right-hand side of the assembled system for volume source `s`, boundary
    /// flux `g` and (at ω = 0) the prescribed boundary integral.
    pub fn load_vector(&self, source: &[Complex64], flux: &[Complex64], constraint: Complex64) -> Vec<Complex64> {
        let g = &self.grid;
        let h = g.h();
        let mut b: Vec<Complex64> = (0..g.len())
            .map(|k| {
                let nb = g.boundary_directions(k) as f64;
                let mut s = source[k];
                if nb > 0.0 {
                    s -= flux[k] * (2.0 / h * nb);
                }
                -s * g.trapezoid_factor(k)
            })
            .collect();
        if self.omega == 0.0 {
            b.push(constraint / h);
        }
        b
    }

    /// Solves `Δw + ω²q w = source`, `∂w/∂ν − iωw = flux`, plus `∫_∂Ω w = constraint` when ω = 0.
    pub fn solve_robin(
        &self,
        source: &[Complex64],
        flux: &[Complex64],
        constraint: Complex64,
    ) -> Result<(ComplexField, LinearSolveReport)> {
        let len = self.grid.len();
        if source.len() != len || flux.len() != len {
            return Err(Error::InvalidArgument("source/flux length mismatch".into()));
        }
        let (mut x, report) = self.solve_system(&self.load_vector(source, flux, constraint))?;
        x.truncate(len);
        Ok((ComplexField::from_vec(self.grid, x), report))
    }

    /// Field `u` with `Δu + ω²qu = ωf` and `∂u/∂ν − iωu = −iωφ`.
    pub fn solve(&self, phi: &ComplexField, f: &ComplexField) -> Result<(ComplexField, LinearSolveReport)> {
        self.grid.check_same(phi.grid())?;
        self.grid.check_same(f.grid())?;
        let w = self.omega;
        let source: Vec<Complex64> = f.values().iter().map(|v| v * w).collect();
        let flux: Vec<Complex64> = phi.values().iter().map(|p| -I * w * p).collect();
        let constraint = boundary_integral(phi) - I * integral(f);
        self.solve_robin(&source, &flux, constraint)
    }

    /// Frequency derivative of the solution `u` returned by [`HelmholtzOperator::solve`] with `f = 0`.
    pub fn solve_domega(&self, phi: &ComplexField, u: &ComplexField) -> Result<(ComplexField, LinearSolveReport)> {
        self.grid.check_same(phi.grid())?;
        self.grid.check_same(u.grid())?;
        let w = self.omega;
        let q = self.q.values();
        let source: Vec<Complex64> = u.values().iter().zip(q).map(|(uk, qk)| -2.0 * w * qk * uk).collect();
        let flux: Vec<Complex64> = u.values().iter().zip(phi.values()).map(|(uk, pk)| I * (uk - pk)).collect();
        let qu = ComplexField::from_vec(self.grid, u.values().iter().zip(q).map(|(uk, qk)| uk * qk).collect());
        self.solve_robin(&source, &flux, I * integral(&qu))
    }
}

/// Trapezoidal `∫_Ω f dx`.
pub fn integral(f: &ComplexField) -> Complex64 {
    let g = f.grid();
    f.values().iter().enumerate().map(|(k, v)| v * g.weight(k)).sum()
}

/// Trapezoidal `∫_∂Ω f dσ`; interior values are ignored.
pub fn boundary_integral(f: &ComplexField) -> Complex64 {
    let g = f.grid();
    f.values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * g.boundary_weight(k))
        .sum()
}

/// Solves `Δu + ω²qu = ωf`, `∂u/∂ν − iωu = −iωφ` (bordered by `∫_∂Ω u = ∫_∂Ω φ − i∫_Ω f` at ω = 0).
pub fn solve_helmholtz(
    q: &ScalarField,
    omega: f64,
    phi: &ComplexField,
    f: &ComplexField,
    options: &SolverOptions,
) -> Result<(ComplexField, LinearSolveReport)> {
    HelmholtzOperator::new(q, omega, options)?.solve(phi, f)
}

/// `∂_ω u_ω` for the field `u` produced by [`solve_helmholtz`] with zero source.
pub fn solve_domega(
    q: &ScalarField,
    omega: f64,
    phi: &ComplexField,
    u: &ComplexField,
    options: &SolverOptions,
) -> Result<(ComplexField, LinearSolveReport)> {
    HelmholtzOperator::new(q, omega, options)?.solve_domega(phi, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn one(g: Grid) -> ComplexField {
        ComplexField::constant(g, c(1.0))
    }

    #[test]
    fn zero_frequency_constant_solution() {
        let g = make_grid(21).unwrap();
        let q = ScalarField::from_fn(g, |x, y| 1.0 + 0.5 * (3.0 * x).sin() * y);
        let (u, rep) =
            solve_helmholtz(&q, 0.0, &one(g), &ComplexField::zeros(g), &SolverOptions::default()).unwrap();
        assert!(rep.relative_residual <= 1e-10);
        assert!(u.values().iter().all(|v| (v - c(1.0)).norm() < 1e-10));
    }

    #[test]
    fn interior_stencil() {
        let g = make_grid(7).unwrap();
        let omega = 2.5;
        let s = assemble_helmholtz(&g, &ScalarField::constant(g, 1.0), omega).unwrap();
        assert_eq!(s.constraint_rows(), 0);
        let k = g.index(3, 3);
        let h2 = g.h() * g.h();
        // assembled rows carry a minus sign relative to the equation
        assert!((s.get(k, k) - c(4.0 / h2 - omega * omega)).norm() < 1e-9);
        for nb in [k - 1, k + 1, k - 7, k + 7] {
            assert!((s.get(k, nb) - c(-1.0 / h2)).norm() < 1e-12);
        }
        let b = assemble_helmholtz(&g, &ScalarField::constant(g, 1.0), 0.0).unwrap();
        assert_eq!(b.constraint_rows(), 1);
        assert_eq!(b.dimension(), g.len() + 1);
    }

    #[test]
    fn complex_symmetric() {
        let g = make_grid(5).unwrap();
        let q = ScalarField::from_fn(g, |x, y| 1.0 + x * y);
        for omega in [0.0, 4.0] {
            let s = assemble_helmholtz(&g, &q, omega).unwrap();
            assert_eq!(s.asymmetry(), 0.0);
        }
        // complex-symmetric, not Hermitian
        let s = assemble_helmholtz(&g, &q, 4.0).unwrap();
        assert!(s.get(0, 0).im != 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let g = make_grid(5).unwrap();
        let mut v = vec![1.0; 25];
        v[7] = 0.0;
        let q = ScalarField::new(g, v).unwrap();
        assert!(matches!(assemble_helmholtz(&g, &q, 1.0), Err(Error::Assembly(_))));
        let q = ScalarField::constant(g, 1.0);
        assert!(matches!(
            assemble_helmholtz(&g, &q, -1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    // u* = exp(iωx)(1+y²)/2 with f and φ chosen so that u* solves the problem.
    pub(crate) fn mms_error(n: usize, omega: f64) -> f64 {
        let g = make_grid(n).unwrap();
        let q = ScalarField::from_fn(g, |x, y| 1.0 + 0.3 * x * y);
        let exact = |x: f64, y: f64| (I * omega * x).exp() * (1.0 + y * y) * 0.5;
        let f = ComplexField::from_fn(g, |x, y| {
            let u = exact(x, y);
            let lap = -omega * omega * u + (I * omega * x).exp();
            (lap + omega * omega * (1.0 + 0.3 * x * y) * u) / omega
        });
        let last = n - 1;
        let phi = ComplexField::new(
            g,
            (0..g.len())
                .map(|k| {
                    let (x, y) = g.coords(k);
                    let (i, j) = g.ij(k);
                    let u = exact(x, y);
                    let ux = I * omega * u;
                    let uy = (I * omega * x).exp() * y;
                    let mut dn = Vec::new();
                    if i == 0 {
                        dn.push(-ux);
                    }
                    if i == last {
                        dn.push(ux);
                    }
                    if j == 0 {
                        dn.push(-uy);
                    }
                    if j == last {
                        dn.push(uy);
                    }
                    if dn.is_empty() {
                        return u;
                    }
                    let avg: Complex64 = dn.iter().sum::<Complex64>() / dn.len() as f64;
                    u - avg / (I * omega)
                })
                .collect(),
        )
        .unwrap();
        let (u, _) = solve_helmholtz(&q, omega, &phi, &f, &SolverOptions::default()).unwrap();
        (0..g.len())
            .map(|k| {
                let (x, y) = g.coords(k);
                (u.values()[k] - exact(x, y)).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn manufactured_solution_second_order() {
        let ratio = mms_error(26, 3.0) / mms_error(51, 3.0);
        let order = ratio.ln() / (50.0f64 / 25.0).ln();
        assert!((order - 2.0).abs() <= 0.2, "order {order}");
    }

    #[test]
    fn domega_at_zero_frequency() {
        let g = make_grid(15).unwrap();
        let q = ScalarField::constant(g, 1.0);
        let opts = SolverOptions::default();
        let (u, _) = solve_helmholtz(&q, 0.0, &one(g), &ComplexField::zeros(g), &opts).unwrap();
        let (w, _) = solve_domega(&q, 0.0, &one(g), &u, &opts).unwrap();
        assert!(w.values().iter().all(|v| (v - I * 0.25).norm() < 1e-10));
    }

    #[test]
    fn domega_matches_central_difference() {
        let g = make_grid(21).unwrap();
        let q = ScalarField::from_fn(g, |x, y| 1.0 + 0.5 * (-(x - 0.5).powi(2) * 20.0 - (y - 0.5).powi(2) * 20.0).exp());
        let opts = SolverOptions::default();
        let phi = one(g);
        let zero = ComplexField::zeros(g);
        let omega = 3.0;
        let (u, _) = solve_helmholtz(&q, omega, &phi, &zero, &opts).unwrap();
        let (w, _) = solve_domega(&q, omega, &phi, &u, &opts).unwrap();
        let err = |eps: f64| {
            let (up, _) = solve_helmholtz(&q, omega + eps, &phi, &zero, &opts).unwrap();
            let (um, _) = solve_helmholtz(&q, omega - eps, &phi, &zero, &opts).unwrap();
            up.sub(&um).scale(c(0.5 / eps)).sub(&w).max_abs()
        };
        let ratio = err(2e-2) / err(1e-2);
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn iterative_backend_agrees() {
        let g = make_grid(17).unwrap();
        let q = ScalarField::from_fn(g, |x, _| 1.0 + x);
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(x, y));
        let (a, _) = solve_helmholtz(&q, 2.0, &one(g), &f, &SolverOptions::default()).unwrap();
        let opts = SolverOptions {
            method: super::super::SolverMethod::Iterative,
            ..SolverOptions::default()
        };
        let (b, rep) = solve_helmholtz(&q, 2.0, &one(g), &f, &opts).unwrap();
        assert_eq!(rep.solver_kind, super::super::SolverKind::Iterative);
        assert!(a.sub(&b).max_abs() < 1e-6);
    }
}
