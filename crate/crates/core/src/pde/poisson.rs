//! Mean-zero Neumann Poisson problem `Δψ = r`, `∂ψ/∂ν = 0`, `∫ψ = 0`.
//!
//! The discrete Laplacian is `divergence ∘ gradient`, i.e. `−W⁻¹GᵀWG` with
//! `W` the trapezoid weights, so the assembled matrix `GᵀWG` is symmetric and
//! `divergence(gradient(g))` is inverted exactly. The constant null space is
//! removed by pinning node 0 and recentring afterwards; a mean-zero border
//! row would be dense and wreck the fill-reducing ordering.

use super::linear::{Factorized, LinearSolveReport, SolverOptions, SparseSystem};
use crate::error::Result;
use crate::grid::{d1_row, Grid, ScalarField};

const PINNED: usize = 0;

pub struct NeumannPoisson {
    grid: Grid,
    factor: Factorized<f64>,
}

fn assemble(grid: &Grid) -> Result<SparseSystem<f64>> {
    let n = grid.n();
    let len = grid.len();
    let s = 0.5 / grid.h();
    let mut t = Vec::with_capacity(2 * 9 * len + 1);
    for k in 0..len {
        let (i, j) = grid.ij(k);
        let w = grid.weight(k);
        let rows: [Vec<(usize, f64)>; 2] = [
            d1_row(n, i)
                .iter()
                .filter(|e| e.1 != 0.0)
                .map(|&(c, a)| (grid.index(c, j), s * a))
                .collect(),
            d1_row(n, j)
                .iter()
                .filter(|e| e.1 != 0.0)
                .map(|&(c, a)| (grid.index(i, c), s * a))
                .collect(),
        ];
        for row in &rows {
            for &(a, ca) in row {
                for &(b, cb) in row {
                    if a != PINNED && b != PINNED {
                        t.push((a, b, w * ca * cb));
                    }
                }
            }
        }
    }
    t.push((PINNED, PINNED, 1.0));
    SparseSystem::from_triplets(len, t, 0)
}

impl NeumannPoisson {
    pub fn new(grid: Grid, options: &SolverOptions) -> Result<Self> {
        Ok(NeumannPoisson {
            grid,
            factor: Factorized::new(assemble(&grid)?, options)?,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Solves for the mean-zero `ψ`; `rhs` is centred first.
    pub fn solve(&self, rhs: &ScalarField) -> Result<(ScalarField, LinearSolveReport)> {
        self.grid.check_same(rhs.grid())?;
        let r = rhs.centered();
        let mut b: Vec<f64> = r
            .values()
            .iter()
            .enumerate()
            .map(|(k, v)| -self.grid.weight(k) * v)
            .collect();
        // compatible because `r` has zero weighted mean, so the dropped row holds
        b[PINNED] = 0.0;
        let (x, report) = self.factor.solve(&b)?;
        Ok((ScalarField::from_vec(self.grid, x).centered(), report))
    }
}

/// One-shot Neumann Poisson solve with default solver options.
pub fn solve_neumann_poisson(rhs: &ScalarField) -> Result<ScalarField> {
    let p = NeumannPoisson::new(*rhs.grid(), &SolverOptions::default())?;
    Ok(p.solve(rhs)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{divergence, gradient, make_grid};
    use std::f64::consts::PI;

    #[test]
    fn zero_rhs() {
        let g = make_grid(9).unwrap();
        let psi = solve_neumann_poisson(&ScalarField::zeros(g)).unwrap();
        assert!(psi.max_abs() < 1e-14);
    }

    #[test]
    fn inverts_div_grad_exactly() {
        let g = make_grid(31).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (PI * x).cos() * (2.0 * PI * y).cos() + x * y);
        let psi = solve_neumann_poisson(&divergence(&gradient(&f))).unwrap();
        let target = f.centered();
        let err = psi.sub(&target).norm_l2() / target.norm_l2();
        assert!(err < 1e-10, "{err}");
        assert!(psi.mean().abs() < 1e-13);
    }

    fn mms_error(n: usize) -> f64 {
        let g = make_grid(n).unwrap();
        let exact = ScalarField::from_fn(g, |x, y| (PI * x).cos() * (2.0 * PI * y).cos());
        let rhs = exact.scale(-5.0 * PI * PI);
        let psi = solve_neumann_poisson(&rhs).unwrap();
        psi.sub(&exact).max_abs()
    }

    #[test]
    fn manufactured_solution_second_order() {
        let order = (mms_error(26) / mms_error(51)).ln() / 2.0f64.ln();
        assert!((order - 2.0).abs() <= 0.2, "order {order}");
    }

    #[test]
    fn matrix_is_symmetric() {
        let g = make_grid(6).unwrap();
        assert!(assemble(&g).unwrap().asymmetry() < 1e-12);
    }
}
