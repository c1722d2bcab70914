//! Discrete PDE solves: Robin Helmholtz (with the bordered ω = 0 case),
//! its frequency derivative, and the mean-zero Neumann Poisson problem.

mod helmholtz;
mod linear;
mod poisson;

pub use helmholtz::{
    assemble_helmholtz, boundary_integral, integral, solve_domega, solve_helmholtz, HelmholtzOperator,
};
pub use linear::{
    Factorized, LinearSolveReport, Scalar, SolverKind, SolverMethod, SolverOptions, SparseSystem,
};
pub use poisson::{solve_neumann_poisson, NeumannPoisson};
