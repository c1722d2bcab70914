//! Permittivities, the forward map `q ↦ ψ_ω`, and measured internal data.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{divergence, gradient, norm_h1, ComplexField, Grid, ScalarField};
use crate::pde::{HelmholtzOperator, LinearSolveReport, NeumannPoisson, SolverOptions};

/// Admissible permittivity: `Λ⁻¹ ≤ q ≤ Λ`, and `q = 1` on a collar of `margin` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Permittivity {
    field: ScalarField,
    lambda_bound: f64,
    margin: usize,
}

impl Permittivity {
    pub fn new(field: ScalarField, lambda_bound: f64, margin: usize) -> Result<Self> {
        let grid = *field.grid();
        check_bounds(&grid, lambda_bound, margin)?;
        let lo = 1.0 / lambda_bound;
        if let Some(k) = field
            .values()
            .iter()
            .position(|&v| !(lo..=lambda_bound).contains(&v))
        {
            return Err(Error::InvalidField(format!(
                "permittivity {} at node {k} outside [{lo}, {lambda_bound}]",
                field.values()[k]
            )));
        }
        if let Some(k) = (0..grid.len()).find(|&k| grid.depth(k) < margin && field.values()[k] != 1.0) {
            return Err(Error::InvalidField(format!(
                "permittivity must equal 1 on the collar, node {k} has {}",
                field.values()[k]
            )));
        }
        Ok(Permittivity {
            field,
            lambda_bound,
            margin,
        })
    }

    #[cfg(test)]
    pub(crate) fn unchecked(field: ScalarField, lambda_bound: f64, margin: usize) -> Self {
        Permittivity {
            field,
            lambda_bound,
            margin,
        }
    }

    /// The background `q ≡ 1`.
    pub fn unit(grid: Grid, lambda_bound: f64, margin: usize) -> Result<Self> {
        Permittivity::new(ScalarField::constant(grid, 1.0), lambda_bound, margin)
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn lambda_bound(&self) -> f64 {
        self.lambda_bound
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    /// Nodes outside the collar, where perturbations may live.
    pub fn interior_mask(&self) -> Vec<bool> {
        self.grid().interior_mask(self.margin)
    }

    pub fn h1_norm(&self) -> f64 {
        norm_h1(&self.field)
    }
}

pub(crate) fn check_bounds(grid: &Grid, lambda_bound: f64, margin: usize) -> Result<()> {
    if !(lambda_bound.is_finite() && lambda_bound > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda bound must exceed 1, got {lambda_bound}"
        )));
    }
    if margin < 1 || 2 * margin >= grid.n() - 1 {
        return Err(Error::InvalidArgument(format!(
            "margin {margin} must be at least 1 and leave interior nodes on a {}-node grid",
            grid.n()
        )));
    }
    Ok(())
}

/// Forward-model context shared by all solves: grid, illumination `φ`,
/// solver settings, execution mode, and the factored Poisson operator.
#[derive(Clone)]
pub struct ForwardModel {
    grid: Grid,
    phi: ComplexField,
    solver: SolverOptions,
    execution: Execution,
    poisson: Arc<NeumannPoisson>,
}

impl ForwardModel {
    pub fn new(grid: Grid, phi: ComplexField, solver: SolverOptions) -> Result<Self> {
        grid.check_same(phi.grid())?;
        Ok(ForwardModel {
            grid,
            phi,
            solver,
            execution: Execution::default(),
            poisson: Arc::new(NeumannPoisson::new(grid, &solver)?),
        })
    }

    /// Model with constant illumination `φ ≡ 1`.
    pub fn unit_illumination(grid: Grid) -> Result<Self> {
        ForwardModel::new(
            grid,
            ComplexField::constant(grid, Complex64::new(1.0, 0.0)),
            SolverOptions::default(),
        )
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn phi(&self) -> &ComplexField {
        &self.phi
    }

    pub fn solver(&self) -> &SolverOptions {
        &self.solver
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    pub fn poisson(&self) -> &NeumannPoisson {
        &self.poisson
    }

    /// Helmholtz field `u_ω` for `q` with zero volume source.
    pub fn field(&self, q: &ScalarField, omega: f64) -> Result<(ComplexField, LinearSolveReport)> {
        HelmholtzOperator::new(q, omega, &self.solver)?.solve(&self.phi, &ComplexField::zeros(self.grid))
    }

    /// `ψ` solving `Δψ = div(|u|²∇q)` with zero mean.
    pub fn datum(&self, u: &ComplexField, q: &ScalarField) -> Result<ScalarField> {
        let v = gradient(q).scaled_by(&u.abs2());
        Ok(self.poisson.solve(&divergence(&v))?.0)
    }

    /// `ψ_ω` for an arbitrary positive `q` (not checked for admissibility).
    pub fn synthesize_field(&self, q: &ScalarField, omega: f64) -> Result<ScalarField> {
        let (u, _) = self.field(q, omega)?;
        self.datum(&u, q)
    }

    pub fn synthesize(&self, q: &Permittivity, omega: f64) -> Result<ScalarField> {
        self.synthesize_field(q.field(), omega)
    }
}

/// Internal datum `ψ_ω` for `q` at `omega` under illumination `phi`.
pub fn synthesize_psi(q: &Permittivity, omega: f64, phi: &ComplexField) -> Result<ScalarField> {
    ForwardModel::new(*q.grid(), phi.clone(), SolverOptions::default())?.synthesize(q, omega)
}

/// Adds seeded relative noise: `ψ + level·‖ψ‖·η/‖η‖`, re-centred.
pub fn add_noise(psi: &ScalarField, level: f64, seed: u64) -> Result<ScalarField> {
    add_noise_stream(psi, level, seed, 0)
}

/// As [`add_noise`], drawing from an independent stream of the seeded generator.
pub fn add_noise_stream(psi: &ScalarField, level: f64, seed: u64, stream: u64) -> Result<ScalarField> {
    if !(level.is_finite() && level >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise level must be non-negative, got {level}")));
    }
    let norm = psi.norm_l2();
    if level == 0.0 || norm == 0.0 {
        return Ok(psi.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let eta = ScalarField::from_vec(
        *psi.grid(),
        (0..psi.grid().len()).map(|_| rng.sample(StandardNormal)).collect(),
    )
    .centered();
    let s = level * norm / eta.norm_l2();
    Ok(psi.axpy(s, &eta).centered())
}

/// Measured data `{(ω, ψ*_ω)}` with strictly increasing frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct InternalData {
    entries: Vec<(f64, ScalarField)>,
    noise_level: f64,
    seed: u64,
}

impl InternalData {
    pub fn new(entries: Vec<(f64, ScalarField)>, noise_level: f64, seed: u64) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::InvalidArgument("internal data needs at least one frequency".into()));
        };
        let grid = *first.1.grid();
        for w in entries.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidArgument(format!(
                    "frequencies must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for (omega, psi) in &entries {
            grid.check_same(psi.grid())?;
            if !(omega.is_finite() && *omega >= 0.0) {
                return Err(Error::InvalidArgument(format!("invalid frequency {omega}")));
            }
            if psi.mean().abs() > 1e-8 * psi.max_abs().max(1.0) {
                return Err(Error::InvalidField(format!(
                    "datum at frequency {omega} does not have zero mean"
                )));
            }
        }
        Ok(InternalData {
            entries,
            noise_level,
            seed,
        })
    }

    /// Synthesizes data for `q` at every frequency, adding noise per frequency stream.
    pub fn synthesize(
        model: &ForwardModel,
        q: &Permittivity,
        frequencies: &[f64],
        noise_level: f64,
        seed: u64,
    ) -> Result<Self> {
        let indexed: Vec<(usize, f64)> = frequencies.iter().copied().enumerate().collect();
        let entries = model.execution().try_map(&indexed, |&(i, omega)| {
            let psi = model.synthesize(q, omega)?;
            Ok::<_, Error>((omega, add_noise_stream(&psi, noise_level, seed, i as u64)?))
        })?;
        InternalData::new(entries, noise_level, seed)
    }

    pub fn entries(&self) -> &[(f64, ScalarField)] {
        &self.entries
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn grid(&self) -> &Grid {
        self.entries[0].1.grid()
    }

    pub fn noise_level(&self) -> f64 {
        self.noise_level
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}
