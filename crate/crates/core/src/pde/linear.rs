//! Sparse systems and the solvers behind them.
//!
//! The direct path is a sparse LU with partial pivoting (faer). The iterative
//! path is restarted GMRES with a Jacobi preconditioner. Both are checked
//! against the same relative-residual contract.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::time::{Duration, Instant};

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Field scalars the solvers operate on (`f64` and `Complex64`).
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Sum
    + faer::traits::ComplexField
    + 'static
{
    fn from_real(r: f64) -> Self;
    fn conjugate(self) -> Self;
    fn modulus(self) -> f64;
    fn modulus_sqr(self) -> f64;
    fn finite(self) -> bool;

    fn zero() -> Self {
        Self::from_real(0.0)
    }
}

impl Scalar for f64 {
    fn from_real(r: f64) -> Self {
        r
    }
    fn conjugate(self) -> Self {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn modulus_sqr(self) -> f64 {
        self * self
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    fn conjugate(self) -> Self {
        self.conj()
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

fn norm2<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.modulus_sqr()).sum::<f64>().sqrt()
}

/// Assembled sparse system in coordinate form, duplicates merged and rows sorted.
#[derive(Debug, Clone)]
pub struct SparseSystem<T> {
    dimension: usize,
    entries: Vec<(usize, usize, T)>,
    constraint_rows: usize,
    row_ptr: Vec<usize>,
}

impl<T: Scalar> SparseSystem<T> {
    pub fn from_triplets(
        dimension: usize,
        mut triplets: Vec<(usize, usize, T)>,
        constraint_rows: usize,
    ) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets
            .iter()
            .find(|(r, c, _)| *r >= dimension || *c >= dimension)
        {
            return Err(Error::Assembly(format!(
                "entry ({r}, {c}) outside a {dimension}x{dimension} system"
            )));
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(usize, usize, T)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        let mut row_ptr = vec![0; dimension + 1];
        for &(r, _, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for r in 0..dimension {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(SparseSystem {
            dimension,
            entries,
            constraint_rows,
            row_ptr,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    /// Number of appended Lagrange rows (0 or 1).
    pub fn constraint_rows(&self) -> usize {
        self.constraint_rows
    }

    pub fn row(&self, r: usize) -> &[(usize, usize, T)] {
        &self.entries[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.row(r)
            .binary_search_by_key(&c, |e| e.1)
            .map(|p| self.row(r)[p].2)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.dimension)
            .map(|r| self.row(r).iter().map(|&(_, c, v)| v * x[c]).sum())
            .collect()
    }

    /// Largest `|a_rc - a_cr|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| (v - self.get(c, r)).modulus())
            .fold(0.0, f64::max)
    }

    fn diagonal(&self) -> Vec<T> {
        (0..self.dimension).map(|r| self.get(r, r)).collect()
    }

    pub fn relative_residual(&self, x: &[T], b: &[T]) -> f64 {
        let ax = self.matvec(x);
        let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
        let nb = norm2(b);
        let nr = norm2(&r);
        if nb == 0.0 {
            nr
        } else {
            nr / nb
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Direct,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    Direct,
    Iterative,
    /// Direct up to [`SolverOptions::direct_limit`] unknowns, iterative beyond.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub method: SolverMethod,
    pub restart: usize,
    pub max_iterations: usize,
    pub direct_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-10,
            method: SolverMethod::Direct,
            restart: 60,
            max_iterations: 50_000,
            direct_limit: 400_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolveReport {
    pub relative_residual: f64,
    pub solver_kind: SolverKind,
    pub iterations: usize,
    pub elapsed: Duration,
}

enum Backend<T: Scalar> {
    Lu(faer::sparse::linalg::solvers::Lu<usize, T>),
    Krylov { inv_diag: Vec<T> },
}

/// A system prepared for repeated solves.
pub struct Factorized<T: Scalar> {
    system: SparseSystem<T>,
    backend: Backend<T>,
    options: SolverOptions,
}

impl<T: Scalar> Factorized<T> {
    pub fn new(system: SparseSystem<T>, options: &SolverOptions) -> Result<Self> {
        let kind = match options.method {
            SolverMethod::Direct => SolverKind::Direct,
            SolverMethod::Iterative => SolverKind::Iterative,
            SolverMethod::Auto if system.dimension() <= options.direct_limit => SolverKind::Direct,
            SolverMethod::Auto => SolverKind::Iterative,
        };
        let backend = match kind {
            SolverKind::Direct => {
                let triplets: Vec<_> = system
                    .entries()
                    .iter()
                    .map(|&(r, c, v)| Triplet::new(r, c, v))
                    .collect();
                let n = system.dimension();
                let mat = SparseColMat::<usize, T>::try_new_from_triplets(n, n, &triplets)
                    .map_err(|e| Error::Assembly(format!("sparse matrix: {e:?}")))?;
                let lu = mat.sp_lu().map_err(|e| Error::LinearSolve {
                    message: format!("LU factorization failed: {e:?}"),
                    report: LinearSolveReport {
                        relative_residual: f64::INFINITY,
                        solver_kind: SolverKind::Direct,
                        iterations: 0,
                        elapsed: Duration::ZERO,
                    },
                })?;
                Backend::Lu(lu)
            }
            SolverKind::Iterative => {
                let inv_diag = system
                    .diagonal()
                    .into_iter()
                    .map(|d| {
                        if d.modulus() > 0.0 {
                            T::from_real(1.0) / d
                        } else {
                            T::from_real(1.0)
                        }
                    })
                    .collect();
                Backend::Krylov { inv_diag }
            }
        };
        Ok(Factorized {
            system,
            backend,
            options: *options,
        })
    }

    pub fn system(&self) -> &SparseSystem<T> {
        &self.system
    }

    pub fn kind(&self) -> SolverKind {
        match self.backend {
            Backend::Lu(_) => SolverKind::Direct,
            Backend::Krylov { .. } => SolverKind::Iterative,
        }
    }

    /// Solves `A x = b`, failing if the residual contract is not met.
    pub fn solve(&self, b: &[T]) -> Result<(Vec<T>, LinearSolveReport)> {
        let start = Instant::now();
        let n = self.system.dimension();
        if b.len() != n {
            return Err(Error::InvalidArgument(format!(
                "right-hand side has {} entries, system has {n}",
                b.len()
            )));
        }
        let tol = self.options.tolerance;
        let (x, iterations) = match &self.backend {
            Backend::Lu(lu) => {
                let mut x = lu_solve(lu, b);
                // one round of refinement if the first pass is loose
                if self.system.relative_residual(&x, b) > 0.1 * tol {
                    let ax = self.system.matvec(&x);
                    let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
                    let dx = lu_solve(lu, &r);
                    for (xi, di) in x.iter_mut().zip(dx) {
                        *xi += di;
                    }
                }
                (x, 0)
            }
            Backend::Krylov { inv_diag } => gmres(
                &self.system,
                b,
                inv_diag,
                tol,
                self.options.restart,
                self.options.max_iterations,
            ),
        };
        let report = LinearSolveReport {
            relative_residual: self.system.relative_residual(&x, b),
            solver_kind: self.kind(),
            iterations,
            elapsed: start.elapsed(),
        };
        if !(report.relative_residual <= tol) || x.iter().any(|v| !v.finite()) {
            return Err(Error::LinearSolve {
                message: "residual above tolerance".into(),
                report,
            });
        }
        Ok((x, report))
    }
}

fn lu_solve<T: Scalar>(lu: &faer::sparse::linalg::solvers::Lu<usize, T>, b: &[T]) -> Vec<T> {
    let rhs = Mat::<T>::from_fn(b.len(), 1, |i, _| b[i]);
    let x = lu.solve(&rhs);
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}

// Restarted GMRES, right-preconditioned by the inverse diagonal.
fn gmres<T: Scalar>(
    a: &SparseSystem<T>,
    b: &[T],
    inv_diag: &[T],
    tol: f64,
    restart: usize,
    max_iterations: usize,
) -> (Vec<T>, usize) {
    let n = b.len();
    let nb = norm2(b);
    let mut x = vec![T::zero(); n];
    if nb == 0.0 {
        return (x, 0);
    }
    let m = restart.max(1);
    let mut total = 0;
    let dot = |u: &[T], v: &[T]| -> T { u.iter().zip(v).map(|(&p, &q)| p.conjugate() * q).sum() };
    loop {
        let ax = a.matvec(&x);
        let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
        let beta = norm2(&r);
        if beta / nb <= 0.5 * tol || total >= max_iterations {
            return (x, total);
        }
        let mut basis: Vec<Vec<T>> = vec![r.iter().map(|&v| v / T::from_real(beta)).collect()];
        let mut hess: Vec<Vec<T>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<T> = Vec::with_capacity(m);
        let mut g = vec![T::zero(); m + 1];
        g[0] = T::from_real(beta);
        let mut k = 0;
        while k < m && total < max_iterations {
            let z: Vec<T> = basis[k].iter().zip(inv_diag).map(|(&v, &d)| v * d).collect();
            let mut w = a.matvec(&z);
            let mut col = vec![T::zero(); k + 2];
            for (i, vi) in basis.iter().enumerate() {
                let hij = dot(vi, &w);
                col[i] = hij;
                for (wj, &vj) in w.iter_mut().zip(vi) {
                    *wj -= hij * vj;
                }
            }
            let hnext = norm2(&w);
            col[k + 1] = T::from_real(hnext);
            for i in 0..k {
                let t = T::from_real(cs[i]) * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -(sn[i].conjugate()) * col[i] + T::from_real(cs[i]) * col[i + 1];
                col[i] = t;
            }
            let (c, s, rho) = givens(col[k], col[k + 1]);
            col[k] = rho;
            col[k + 1] = T::zero();
            cs.push(c);
            sn.push(s);
            g[k + 1] = -(s.conjugate()) * g[k];
            g[k] = T::from_real(c) * g[k];
            hess.push(col);
            total += 1;
            k += 1;
            if hnext > 0.0 {
                basis.push(w.iter().map(|&v| v / T::from_real(hnext)).collect());
            }
            if g[k].modulus() / nb <= 0.5 * tol || hnext == 0.0 {
                break;
            }
        }
        // back substitution on the k×k triangle
        let mut y = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= hess[j][i] * y[j];
            }
            y[i] = s / hess[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, (&vj, &d)) in x.iter_mut().zip(basis[j].iter().zip(inv_diag)) {
                *xi += *yj * vj * d;
            }
        }
    }
}

fn givens<T: Scalar>(a: T, b: T) -> (f64, T, T) {
    let na = a.modulus();
    let nb = b.modulus();
    if nb == 0.0 {
        return (1.0, T::zero(), a);
    }
    if na == 0.0 {
        return (0.0, T::from_real(1.0), b);
    }
    let rho = na.hypot(nb);
    let phase = a / T::from_real(na);
    let c = na / rho;
    let s = phase * b.conjugate() / T::from_real(rho);
    (c, s, phase * T::from_real(rho))
}
