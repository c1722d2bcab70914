//! Fréchet derivative of `q ↦ ψ_ω`, its discrete adjoint, and consistency checks.
//!
//! The derivative in direction `ρ` is `ξ = Π div(|u|²∇ρ + 2 Re(ū v)∇q)` where
//! `Π` is the mean-zero Poisson solve and `v` solves the Helmholtz problem
//! with source `−ω²ρu` and homogeneous Robin data. The adjoint is the exact
//! transpose of that discrete chain under the trapezoidal inner product.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::{divergence, gradient, inner_l2, ComplexField, Grid, ScalarField, VectorField};
use crate::internal_data::{ForwardModel, Permittivity};
use crate::pde::{Factorized, HelmholtzOperator, SolverOptions, SparseSystem};

/// Forward state at `(q, ω)` cached for repeated derivative applications.
pub struct DerivativeWorkspace {
    model: ForwardModel,
    q: Permittivity,
    omega: f64,
    helmholtz: HelmholtzOperator,
    u: ComplexField,
    u_abs2: ScalarField,
    grad_q: VectorField,
    psi: ScalarField,
    mask: Vec<bool>,
}

impl DerivativeWorkspace {
    pub fn new(model: &ForwardModel, q: &Permittivity, omega: f64) -> Result<Self> {
        model.grid().check_same(q.grid())?;
        let helmholtz = HelmholtzOperator::new(q.field(), omega, model.solver())?;
        let (u, _) = helmholtz.solve(model.phi(), &ComplexField::zeros(*model.grid()))?;
        let psi = model.datum(&u, q.field())?;
        Ok(DerivativeWorkspace {
            model: model.clone(),
            q: q.clone(),
            omega,
            u_abs2: u.abs2(),
            grad_q: gradient(q.field()),
            helmholtz,
            u,
            psi,
            mask: q.interior_mask(),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn q(&self) -> &Permittivity {
        &self.q
    }

    pub fn grid(&self) -> &Grid {
        self.q.grid()
    }

    /// Cached Helmholtz field `u_ω`.
    pub fn u(&self) -> &ComplexField {
        &self.u
    }

    /// Forward datum `ψ_ω(q)`.
    pub fn psi(&self) -> &ScalarField {
        &self.psi
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    fn check_direction(&self, rho: &ScalarField) -> Result<()> {
        self.grid().check_same(rho.grid())?;
        if let Some(k) = (0..rho.values().len()).find(|&k| !self.mask[k] && rho.values()[k] != 0.0) {
            return Err(Error::InvalidArgument(format!(
                "perturbation must vanish on the collar, node {k} has {}",
                rho.values()[k]
            )));
        }
        Ok(())
    }
}

/// `v_ω(ρ)`: `Δv + ω²qv = −ω²ρu`, `∂v/∂ν − iωv = 0` (and `∫_∂Ω v = 0` at ω = 0).
pub fn solve_v(ws: &DerivativeWorkspace, rho: &ScalarField) -> Result<ComplexField> {
    ws.check_direction(rho)?;
    let len = ws.grid().len();
    let w2 = ws.omega * ws.omega;
    let source: Vec<Complex64> = rho
        .values()
        .iter()
        .zip(ws.u.values())
        .map(|(r, u)| -w2 * r * u)
        .collect();
    let zero = vec![Complex64::new(0.0, 0.0); len];
    Ok(ws.helmholtz.solve_robin(&source, &zero, zero[0])?.0)
}

/// `ξ_ω(ρ) = DF_ω[q](ρ)`.
pub fn apply_df(ws: &DerivativeWorkspace, rho: &ScalarField) -> Result<ScalarField> {
    let v = solve_v(ws, rho)?;
    let coupling = ScalarField::from_vec(
        *ws.grid(),
        ws.u.values()
            .iter()
            .zip(v.values())
            .map(|(u, v)| 2.0 * (u.conj() * v).re)
            .collect(),
    );
    let field = gradient(rho)
        .scaled_by(&ws.u_abs2)
        .add(&ws.grad_q.scaled_by(&coupling));
    Ok(ws.model.poisson().solve(&divergence(&field))?.0)
}

/// L²-adjoint of [`apply_df`]; vanishes on the collar.
pub fn apply_df_adjoint(ws: &DerivativeWorkspace, residual: &ScalarField) -> Result<ScalarField> {
    let grid = *ws.grid();
    grid.check_same(residual.grid())?;
    let t = ws.model.poisson().solve(residual)?.0;
    let grad_t = gradient(&t);
    let mut out = divergence(&grad_t.scaled_by(&ws.u_abs2)).into_values();
    if ws.omega != 0.0 {
        let z = ws.grad_q.dot(&grad_t);
        let mut rhs: Vec<Complex64> = (0..grid.len())
            .map(|k| -grid.weight(k) * z.values()[k] * ws.u.values()[k].conj())
            .collect();
        rhs.resize(ws.helmholtz.system().dimension(), Complex64::new(0.0, 0.0));
        let (mu, _) = ws.helmholtz.solve_system(&rhs)?;
        let scale = 2.0 * ws.omega * ws.omega / (grid.h() * grid.h());
        for (k, o) in out.iter_mut().enumerate() {
            *o += scale * (mu[k] * ws.u.values()[k]).re;
        }
    }
    Ok(ScalarField::from_vec(grid, out).masked(&ws.mask))
}

/// Parameter-space inner product used for gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pairing {
    L2,
    /// `⟨a, b⟩ = ⟨(I − αΔ)a, b⟩` on interior-supported fields.
    Sobolev { alpha: f64 },
}

impl Pairing {
    pub fn name(&self) -> String {
        match self {
            Pairing::L2 => "l2".into(),
            Pairing::Sobolev { alpha } => format!("sobolev({alpha})"),
        }
    }
}

/// `I − αΔ` on the interior nodes, with zero values outside them.
pub struct SobolevSmoother {
    grid: Grid,
    alpha: f64,
    nodes: Vec<usize>,
    local: Vec<Option<usize>>,
    factor: Factorized<f64>,
}

impl SobolevSmoother {
    pub fn new(grid: Grid, mask: &[bool], alpha: f64, options: &SolverOptions) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("sobolev alpha must be positive, got {alpha}")));
        }
        let nodes: Vec<usize> = (0..grid.len()).filter(|&k| mask[k]).collect();
        let mut local = vec![None; grid.len()];
        for (l, &k) in nodes.iter().enumerate() {
            local[k] = Some(l);
        }
        let s = alpha / (grid.h() * grid.h());
        let mut t = Vec::with_capacity(5 * nodes.len());
        for (l, &k) in nodes.iter().enumerate() {
            t.push((l, l, 1.0 + 4.0 * s));
            for nb in neighbours(&grid, k).into_iter().flatten() {
                if let Some(m) = local[nb] {
                    t.push((l, m, -s));
                }
            }
        }
        let system = SparseSystem::from_triplets(nodes.len(), t, 0)?;
        Ok(SobolevSmoother {
            grid,
            alpha,
            nodes,
            local,
            factor: Factorized::new(system, options)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(I − αΔ)x`, restricted to the interior.
    pub fn apply(&self, x: &ScalarField) -> ScalarField {
        let s = self.alpha / (self.grid.h() * self.grid.h());
        let v = x.values();
        let mut out = vec![0.0; self.grid.len()];
        for &k in &self.nodes {
            let mut acc = (1.0 + 4.0 * s) * v[k];
            for nb in neighbours(&self.grid, k).into_iter().flatten() {
                if self.local[nb].is_some() {
                    acc -= s * v[nb];
                }
            }
            out[k] = acc;
        }
        ScalarField::from_vec(self.grid, out)
    }

    /// `(I − αΔ)⁻¹g`, restricted to the interior.
    pub fn solve(&self, g: &ScalarField) -> Result<ScalarField> {
        let b: Vec<f64> = self.nodes.iter().map(|&k| g.values()[k]).collect();
        let (x, _) = self.factor.solve(&b)?;
        let mut out = vec![0.0; self.grid.len()];
        for (&k, v) in self.nodes.iter().zip(x) {
            out[k] = v;
        }
        Ok(ScalarField::from_vec(self.grid, out))
    }

    /// The pairing `⟨(I − αΔ)a, b⟩`.
    pub fn inner(&self, a: &ScalarField, b: &ScalarField) -> Result<f64> {
        inner_l2(&self.apply(a), b)
    }
}

fn neighbours(grid: &Grid, k: usize) -> [Option<usize>; 4] {
    let (i, j) = grid.ij(k);
    let n = grid.n();
    [
        (i > 0).then(|| k - 1),
        (i + 1 < n).then(|| k + 1),
        (j > 0).then(|| k - n),
        (j + 1 < n).then(|| k + n),
    ]
}

/// Riesz map of the pairing: identity for L², one smoothing solve for Sobolev.
pub enum RieszMap {
    L2,
    Sobolev(SobolevSmoother),
}

impl RieszMap {
    pub fn new(pairing: Pairing, grid: Grid, mask: &[bool], options: &SolverOptions) -> Result<Self> {
        Ok(match pairing {
            Pairing::L2 => RieszMap::L2,
            Pairing::Sobolev { alpha } => RieszMap::Sobolev(SobolevSmoother::new(grid, mask, alpha, options)?),
        })
    }

    /// Converts an L² gradient into the gradient for this pairing.
    pub fn gradient(&self, g: ScalarField) -> Result<ScalarField> {
        match self {
            RieszMap::L2 => Ok(g),
            RieszMap::Sobolev(s) => s.solve(&g),
        }
    }

    pub fn inner(&self, a: &ScalarField, b: &ScalarField) -> Result<f64> {
        match self {
            RieszMap::L2 => inner_l2(a, b),
            RieszMap::Sobolev(s) => s.inner(a, b),
        }
    }
}

/// Seeded random interior direction (standard normal on the mask).
pub fn random_direction(grid: Grid, mask: &[bool], rng: &mut ChaCha8Rng) -> ScalarField {
    let v = mask
        .iter()
        .map(|&m| {
            let x: f64 = rng.sample(StandardNormal);
            if m {
                x
            } else {
                0.0
            }
        })
        .collect();
    ScalarField::from_vec(grid, v)
}

/// Seeded random zero-mean data-space field.
pub fn random_datum(grid: Grid, rng: &mut ChaCha8Rng) -> ScalarField {
    ScalarField::from_vec(grid, (0..grid.len()).map(|_| rng.sample(StandardNormal)).collect()).centered()
}

/// Worst relative dot-test discrepancy over `trials` seeded `(ρ, s)` pairs.
pub fn adjoint_dot_test(
    model: &ForwardModel,
    q: &Permittivity,
    omega: f64,
    pairing: Pairing,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    adjoint_dot_test_with_fault(model, q, omega, pairing, trials, seed, 0.0)
}

/// As [`adjoint_dot_test`], with the adjoint deliberately corrupted so that
/// each trial's discrepancy moves by `fault`. Used to check the check.
pub fn adjoint_dot_test_with_fault(
    model: &ForwardModel,
    q: &Permittivity,
    omega: f64,
    pairing: Pairing,
    trials: usize,
    seed: u64,
    fault: f64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("dot test needs at least one trial".into()));
    }
    let ws = DerivativeWorkspace::new(model, q, omega)?;
    let grid = *q.grid();
    let riesz = RieszMap::new(pairing, grid, ws.mask(), model.solver())?;
    let ids: Vec<u64> = (0..trials as u64).collect();
    let worst = model.execution().try_map(&ids, |&t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let rho = random_direction(grid, ws.mask(), &mut rng);
        let s = random_datum(grid, &mut rng);
        let a_rho = apply_df(&ws, &rho)?;
        let mut a_s = riesz.gradient(apply_df_adjoint(&ws, &s)?)?;
        let denom = a_rho.norm_l2() * s.norm_l2();
        if fault != 0.0 {
            let rr = riesz.inner(&rho, &rho)?;
            a_s = a_s.axpy(fault * denom / rr, &rho);
        }
        let lhs = inner_l2(&a_rho, &s)?;
        let rhs = riesz.inner(&rho, &a_s)?;
        Ok::<_, Error>(if denom > 0.0 {
            (lhs - rhs).abs() / denom
        } else {
            (lhs - rhs).abs()
        })
    })?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// Taylor remainder ratio `‖F(q+ερ) − F(q) − εξ(ρ)‖ / ‖εξ(ρ)‖`.
pub fn taylor_ratio(ws: &DerivativeWorkspace, rho: &ScalarField, eps: f64) -> Result<f64> {
    let xi = apply_df(ws, rho)?;
    let shifted = ws.q.field().axpy(eps, rho);
    let psi = ws.model.synthesize_field(&shifted, ws.omega)?;
    let remainder = psi.sub(&ws.psi).axpy(-eps, &xi);
    Ok(remainder.norm_l2() / (eps * xi.norm_l2()))
}
