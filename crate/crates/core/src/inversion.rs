//! Discrepancy functional, projection onto the admissible set, and the
//! projected multi-frequency Landweber iteration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{inner_l2, norm_h1, Grid, ScalarField};
use crate::internal_data::{check_bounds, ForwardModel, InternalData, Permittivity};
use crate::linearization::{apply_df, apply_df_adjoint, random_direction, DerivativeWorkspace, Pairing, RieszMap};

/// Strictly increasing, non-empty set of non-negative frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySet {
    omegas: Vec<f64>,
}

impl FrequencySet {
    pub fn new(omegas: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidArgument("frequency set is empty".into()));
        }
        if let Some(w) = omegas.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidArgument(format!("invalid frequency {w}")));
        }
        if omegas.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::InvalidArgument("frequencies must be strictly increasing".into()));
        }
        Ok(FrequencySet { omegas })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

/// `m` equispaced frequencies from `k_min` to `k_max` inclusive; `m = 1` gives `{k_min}`.
pub fn frequency_grid(k_min: f64, k_max: f64, m: usize) -> Result<FrequencySet> {
    if m < 1 {
        return Err(Error::InvalidArgument("need at least one frequency".into()));
    }
    if !(k_min >= 0.0 && k_min <= k_max && k_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= k_min <= k_max, got [{k_min}, {k_max}]"
        )));
    }
    if m == 1 {
        return FrequencySet::new(vec![k_min]);
    }
    let span = k_max - k_min;
    FrequencySet::new(
        (0..m)
            .map(|i| k_min + i as f64 / (m - 1) as f64 * span)
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `1/σ_max`, with `σ_max` from a power iteration at the starting point.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandweberConfig {
    pub step: StepSize,
    pub max_iterations: usize,
    pub lambda_bound: f64,
    pub margin: usize,
    pub pairing: Pairing,
    pub stop_tolerance: f64,
    pub line_search: bool,
    pub power_iterations: usize,
    pub seed: u64,
}

impl Default for LandweberConfig {
    fn default() -> Self {
        LandweberConfig {
            step: StepSize::Auto,
            max_iterations: 100,
            lambda_bound: 4.0,
            margin: 5,
            pairing: Pairing::L2,
            stop_tolerance: 1e-10,
            line_search: true,
            power_iterations: 10,
            seed: 0,
        }
    }
}

impl LandweberConfig {
    pub fn validate(&self) -> Result<()> {
        if let StepSize::Fixed(h) = self.step {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
            }
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if !(self.stop_tolerance >= 0.0) {
            return Err(Error::InvalidArgument("stop tolerance must be non-negative".into()));
        }
        if self.power_iterations < 1 {
            return Err(Error::InvalidArgument("power iterations must be at least 1".into()));
        }
        if let Pairing::Sobolev { alpha } = self.pairing {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::InvalidArgument(format!("sobolev alpha must be positive, got {alpha}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub j: f64,
    pub rel_err_l2: Option<f64>,
    pub rel_err_h1: Option<f64>,
    pub step_accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `J` vanished exactly.
    Converged,
    Stagnated,
    MaxIterations,
    /// The line search could not decrease `J`.
    StepRejected,
}

/// Iteration history plus the final iterate. Row 0 is the starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionTrace {
    pub records: Vec<IterationRecord>,
    pub final_q: Permittivity,
    pub step: f64,
    pub stop_reason: StopReason,
    /// `‖q‖_{H¹}` of the final iterate; the admissible set asks for `≤ Λ`.
    pub final_h1_norm: f64,
}

impl ReconstructionTrace {
    pub fn h1_within_bound(&self) -> bool {
        self.final_h1_norm <= self.final_q.lambda_bound()
    }
}

/// Pointwise clamp to `[Λ⁻¹, Λ]` followed by resetting the collar to 1.
pub fn project_q(p: &ScalarField, lambda_bound: f64, margin: usize) -> Result<Permittivity> {
    let grid = *p.grid();
    check_bounds(&grid, lambda_bound, margin)?;
    if p.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidField("cannot project a non-finite field".into()));
    }
    let lo = 1.0 / lambda_bound;
    let values = p
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if grid.depth(k) < margin {
                1.0
            } else {
                v.clamp(lo, lambda_bound)
            }
        })
        .collect();
    Permittivity::new(ScalarField::new(grid, values)?, lambda_bound, margin)
}

/// Forward state at one iterate: `J`, residuals `F_ω`, and derivative workspaces.
pub struct Evaluation {
    pub j: f64,
    pub workspaces: Vec<DerivativeWorkspace>,
    pub residuals: Vec<ScalarField>,
}

pub fn evaluate(model: &ForwardModel, q: &Permittivity, data: &InternalData) -> Result<Evaluation> {
    model.grid().check_same(data.grid())?;
    let parts = model.execution().try_map(data.entries(), |(omega, psi_star)| {
        let ws = DerivativeWorkspace::new(model, q, *omega)?;
        let r = ws.psi().sub(psi_star);
        Ok::<_, Error>((ws, r))
    })?;
    let mut j = 0.0;
    let mut workspaces = Vec::with_capacity(parts.len());
    let mut residuals = Vec::with_capacity(parts.len());
    for (ws, r) in parts {
        j += 0.5 * inner_l2(&r, &r)?;
        workspaces.push(ws);
        residuals.push(r);
    }
    Ok(Evaluation {
        j,
        workspaces,
        residuals,
    })
}

impl Evaluation {
    /// `Σ_ω DF_ω*(F_ω)` in the L² pairing, summed in frequency order.
    pub fn l2_gradient(&self, model: &ForwardModel) -> Result<ScalarField> {
        let pairs: Vec<usize> = (0..self.workspaces.len()).collect();
        let parts = model
            .execution()
            .try_map(&pairs, |&i| apply_df_adjoint(&self.workspaces[i], &self.residuals[i]))?;
        sum_fields(*model.grid(), parts)
    }

    /// `x ↦ Σ_ω DF_ω* DF_ω x` (L² pairing).
    pub fn normal_operator(&self, model: &ForwardModel, x: &ScalarField) -> Result<ScalarField> {
        let parts = model
            .execution()
            .try_map(&self.workspaces, |ws| apply_df_adjoint(ws, &apply_df(ws, x)?))?;
        sum_fields(*model.grid(), parts)
    }
}

fn sum_fields(grid: Grid, parts: Vec<ScalarField>) -> Result<ScalarField> {
    let mut acc = ScalarField::zeros(grid);
    for p in &parts {
        acc = acc.add(p);
    }
    Ok(acc)
}

/// `J(q) = ½ Σ_ω ‖ψ_ω(q) − ψ*_ω‖²`.
pub fn discrepancy(model: &ForwardModel, q: &Permittivity, data: &InternalData) -> Result<f64> {
    Ok(evaluate(model, q, data)?.j)
}

/// Gradient of `J` in the chosen pairing; zero on the collar.
pub fn gradient_j(model: &ForwardModel, q: &Permittivity, data: &InternalData, pairing: Pairing) -> Result<ScalarField> {
    let g = evaluate(model, q, data)?.l2_gradient(model)?;
    RieszMap::new(pairing, *q.grid(), &q.interior_mask(), model.solver())?.gradient(g)
}

/// Largest singular value of the stacked derivative at `q`, by power iteration
/// on the normal operator in the given pairing.
pub fn estimate_sigma_max(
    model: &ForwardModel,
    eval: &Evaluation,
    riesz: &RieszMap,
    q: &Permittivity,
    iterations: usize,
    seed: u64,
) -> Result<f64> {
    let grid = *q.grid();
    let mask = q.interior_mask();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = random_direction(grid, &mask, &mut rng);
    let mut lambda = 0.0;
    for _ in 0..iterations.max(1) {
        let norm = riesz.inner(&x, &x)?.sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        x = x.scale(1.0 / norm);
        let y = riesz.gradient(eval.normal_operator(model, &x)?)?;
        lambda = riesz.inner(&x, &y)?;
        x = y;
    }
    Ok(lambda.max(0.0).sqrt())
}

fn relative_errors(q: &Permittivity, truth: Option<&Permittivity>) -> (Option<f64>, Option<f64>) {
    match truth {
        None => (None, None),
        Some(t) => {
            let d = q.field().sub(t.field());
            (
                Some(d.norm_l2() / t.field().norm_l2()),
                Some(norm_h1(&d) / norm_h1(t.field())),
            )
        }
    }
}

/// One projected step `T(q − h·g)` from a precomputed evaluation.
pub fn landweber_step(
    model: &ForwardModel,
    q: &Permittivity,
    eval: &Evaluation,
    riesz: &RieszMap,
    step: f64,
) -> Result<Permittivity> {
    let g = riesz.gradient(eval.l2_gradient(model)?)?;
    project_q(&q.field().axpy(-step, &g), q.lambda_bound(), q.margin())
}

/// Projected Landweber iteration from `q₀ ≡ 1`.
pub fn landweber_run(
    model: &ForwardModel,
    data: &InternalData,
    config: &LandweberConfig,
    truth: Option<&Permittivity>,
) -> Result<ReconstructionTrace> {
    let q0 = Permittivity::unit(*data.grid(), config.lambda_bound, config.margin)?;
    landweber_run_from(model, data, config, q0, truth)
}

const MAX_HALVINGS: usize = 40;

/// Projected Landweber iteration from a given admissible starting point.
pub fn landweber_run_from(
    model: &ForwardModel,
    data: &InternalData,
    config: &LandweberConfig,
    q0: Permittivity,
    truth: Option<&Permittivity>,
) -> Result<ReconstructionTrace> {
    config.validate()?;
    let q0 = project_q(q0.field(), config.lambda_bound, config.margin)?;
    let riesz = RieszMap::new(config.pairing, *q0.grid(), &q0.interior_mask(), model.solver())?;
    let mut q = q0;
    let mut eval = evaluate(model, &q, data)?;
    let (e2, e1) = relative_errors(&q, truth);
    let mut records = vec![IterationRecord {
        iteration: 0,
        j: eval.j,
        rel_err_l2: e2,
        rel_err_h1: e1,
        step_accepted: true,
    }];
    let finish = |records: Vec<IterationRecord>, q: Permittivity, step: f64, reason: StopReason| ReconstructionTrace {
        final_h1_norm: q.h1_norm(),
        records,
        final_q: q,
        step,
        stop_reason: reason,
    };
    if !eval.j.is_finite() {
        return Err(Error::NonFinite {
            iteration: 0,
            trace: Box::new(finish(records, q, 0.0, StopReason::StepRejected)),
        });
    }
    if eval.j == 0.0 {
        return Ok(finish(records, q, 0.0, StopReason::Converged));
    }
    let step = match config.step {
        StepSize::Fixed(h) => h,
        StepSize::Auto => {
            let sigma = estimate_sigma_max(model, &eval, &riesz, &q, config.power_iterations, config.seed)?;
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "cannot derive a step size from sigma_max = {sigma}"
                )));
            }
            1.0 / sigma
        }
    };
    let mut reason = StopReason::MaxIterations;
    for iteration in 1..=config.max_iterations {
        let g = riesz.gradient(eval.l2_gradient(model)?)?;
        let mut h = step;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = project_q(&q.field().axpy(-h, &g), config.lambda_bound, config.margin)?;
            let trial_eval = evaluate(model, &trial, data)?;
            if !trial_eval.j.is_finite() {
                records.push(IterationRecord {
                    iteration,
                    j: trial_eval.j,
                    rel_err_l2: None,
                    rel_err_h1: None,
                    step_accepted: false,
                });
                return Err(Error::NonFinite {
                    iteration,
                    trace: Box::new(finish(records, q, step, StopReason::StepRejected)),
                });
            }
            if !config.line_search || trial_eval.j <= eval.j {
                accepted = Some((trial, trial_eval));
                break;
            }
            h *= 0.5;
        }
        let Some((next, next_eval)) = accepted else {
            let (e2, e1) = relative_errors(&q, truth);
            records.push(IterationRecord {
                iteration,
                j: eval.j,
                rel_err_l2: e2,
                rel_err_h1: e1,
                step_accepted: false,
            });
            reason = StopReason::StepRejected;
            break;
        };
        let decrease = (eval.j - next_eval.j).abs() / eval.j;
        q = next;
        eval = next_eval;
        let (e2, e1) = relative_errors(&q, truth);
        records.push(IterationRecord {
            iteration,
            j: eval.j,
            rel_err_l2: e2,
            rel_err_h1: e1,
            step_accepted: true,
        });
        if eval.j == 0.0 {
            reason = StopReason::Converged;
            break;
        }
        if decrease < config.stop_tolerance {
            reason = StopReason::Stagnated;
            break;
        }
    }
    Ok(finish(records, q, step, reason))
}

/// Estimate of the smallest singular value of `ρ ↦ (DF_ω ρ)_ω` over
/// interior-supported `ρ`: Lanczos with full reorthogonalisation on the
/// normal operator, smallest Ritz value of the resulting tridiagonal matrix.
pub fn coercivity_probe(
    model: &ForwardModel,
    q: &Permittivity,
    freqs: &FrequencySet,
    iterations: usize,
    seed: u64,
) -> Result<f64> {
    if iterations < 1 {
        return Err(Error::InvalidArgument("probe needs at least one iteration".into()));
    }
    let entries: Vec<(f64, ScalarField)> = freqs
        .omegas()
        .iter()
        .map(|&w| (w, ScalarField::zeros(*q.grid())))
        .collect();
    let data = InternalData::new(entries, 0.0, seed)?;
    let eval = evaluate(model, q, &data)?;
    let mask = q.interior_mask();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = random_direction(*q.grid(), &mask, &mut rng);
    let mut basis: Vec<ScalarField> = vec![start.scale(1.0 / start.norm_l2())];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let scale_tol = 1e-10;
    for k in 0..iterations {
        let mut w = eval.normal_operator(model, &basis[k])?;
        let a = inner_l2(&w, &basis[k])?;
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = inner_l2(&w, b)?;
                w = w.axpy(-c, b);
            }
        }
        let nb = w.norm_l2();
        if k + 1 == iterations || nb <= scale_tol * a.abs().max(alpha[0].abs()) {
            break;
        }
        beta.push(nb);
        basis.push(w.scale(1.0 / nb));
    }
    let m = alpha.len();
    let t = faer::Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let eig = t
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::InvalidArgument(format!("tridiagonal eigenvalue solve failed: {e:?}")))?;
    let lambda_min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(lambda_min.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn bump_q(g: Grid, margin: usize, amp: f64) -> Permittivity {
        let mask = g.interior_mask(margin);
        let v = (0..g.len())
            .map(|k| {
                let (x, y) = g.coords(k);
                if mask[k] {
                    1.0 + amp * (-((x - 0.45).powi(2) + (y - 0.55).powi(2)) / 0.02).exp()
                } else {
                    1.0
                }
            })
            .collect();
        Permittivity::new(ScalarField::new(g, v).unwrap(), 4.0, margin).unwrap()
    }

    #[test]
    fn frequency_grids() {
        assert_eq!(frequency_grid(10.0, 20.0, 3).unwrap().omegas(), &[10.0, 15.0, 20.0]);
        assert_eq!(frequency_grid(2.0, 7.5, 2).unwrap().omegas(), &[2.0, 7.5]);
        assert_eq!(frequency_grid(3.0, 3.0, 1).unwrap().omegas(), &[3.0]);
        assert!(frequency_grid(3.0, 2.0, 2).is_err());
        assert!(frequency_grid(1.0, 2.0, 0).is_err());
        assert!(frequency_grid(3.0, 3.0, 2).is_err());
    }

    #[test]
    fn projection() {
        let g = make_grid(11).unwrap();
        let q = bump_q(g, 2, 0.5);
        assert_eq!(project_q(q.field(), 4.0, 2).unwrap(), q);
        let mut v = q.field().values().to_vec();
        v[g.index(5, 5)] = 40.0;
        v[g.index(4, 5)] = -3.0;
        v[g.index(0, 3)] = 0.9;
        v[g.index(1, 1)] = 0.9;
        let p = project_q(&ScalarField::new(g, v).unwrap(), 4.0, 2).unwrap();
        assert_eq!(p.field().values()[g.index(5, 5)], 4.0);
        assert_eq!(p.field().values()[g.index(4, 5)], 0.25);
        assert_eq!(p.field().values()[g.index(0, 3)], 1.0);
        assert_eq!(p.field().values()[g.index(1, 1)], 1.0);
    }

    #[test]
    fn discrepancy_vanishes_at_truth() {
        let g = make_grid(21).unwrap();
        let m = ForwardModel::unit_illumination(g).unwrap();
        let q = bump_q(g, 3, 0.6);
        let data = InternalData::synthesize(&m, &q, &[3.0], 0.0, 0).unwrap();
        assert_eq!(discrepancy(&m, &q, &data).unwrap(), 0.0);
        assert_eq!(gradient_j(&m, &q, &data, Pairing::L2).unwrap().max_abs(), 0.0);
        let one = Permittivity::unit(g, 4.0, 3).unwrap();
        assert!(discrepancy(&m, &one, &data).unwrap() > 0.0);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let g = make_grid(21).unwrap();
        let m = ForwardModel::unit_illumination(g).unwrap();
        let truth = bump_q(g, 3, 0.6);
        let data = InternalData::synthesize(&m, &truth, &[2.0, 4.0], 0.0, 0).unwrap();
        let q = bump_q(g, 3, 0.3);
        let grad = gradient_j(&m, &q, &data, Pairing::L2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_direction(g, &q.interior_mask(), &mut rng).scale(0.05);
        let dir = inner_l2(&grad, &rho).unwrap();
        let fd = |eps: f64| {
            let plus = Permittivity::new(q.field().axpy(eps, &rho), 4.0, 3).unwrap();
            let minus = Permittivity::new(q.field().axpy(-eps, &rho), 4.0, 3).unwrap();
            (discrepancy(&m, &plus, &data).unwrap() - discrepancy(&m, &minus, &data).unwrap()) / (2.0 * eps)
        };
        let e1 = (fd(1e-1) - dir).abs();
        let e2 = (fd(5e-2) - dir).abs();
        assert!(e2 < 1e-3 * dir.abs(), "{e2} vs {dir}");
        assert!(e1 / e2 > 3.0, "{e1} {e2}");
    }

    #[test]
    fn gradient_additive_across_frequencies() {
        let g = make_grid(21).unwrap();
        let m = ForwardModel::unit_illumination(g).unwrap();
        let truth = bump_q(g, 3, 0.6);
        let q = bump_q(g, 3, 0.2);
        let freqs = [2.0, 3.0, 5.0];
        let data = InternalData::synthesize(&m, &truth, &freqs, 0.0, 0).unwrap();
        let total = gradient_j(&m, &q, &data, Pairing::L2).unwrap();
        let mut sum = ScalarField::zeros(g);
        for (w, psi) in data.entries() {
            let single = InternalData::new(vec![(*w, psi.clone())], 0.0, 0).unwrap();
            sum = sum.add(&gradient_j(&m, &q, &single, Pairing::L2).unwrap());
        }
        assert!(total.sub(&sum).max_abs() <= 1e-12 * total.max_abs());
    }

    #[test]
    fn fixed_point_and_background() {
        let g = make_grid(21).unwrap();
        let m = ForwardModel::unit_illumination(g).unwrap();
        let one = Permittivity::unit(g, 4.0, 3).unwrap();
        let data = InternalData::synthesize(&m, &one, &[3.0], 0.0, 0).unwrap();
        let cfg = LandweberConfig {
            margin: 3,
            ..LandweberConfig::default()
        };
        let trace = landweber_run(&m, &data, &cfg, None).unwrap();
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.records[0].j, 0.0);
        assert_eq!(trace.stop_reason, StopReason::Converged);
    }

    #[test]
    fn line_search_keeps_j_monotone_and_iterates_admissible() {
        let g = make_grid(25).unwrap();
        let m = ForwardModel::unit_illumination(g).unwrap();
        let truth = bump_q(g, 3, 0.8);
        let data = InternalData::synthesize(&m, &truth, &[3.0], 0.0, 0).unwrap();
        let cfg = LandweberConfig {
            margin: 3,
            max_iterations: 8,
            ..LandweberConfig::default()
        };
        let trace = landweber_run(&m, &data, &cfg, Some(&truth)).unwrap();
        assert_eq!(trace.records[0].iteration, 0);
        for w in trace.records.windows(2) {
            assert_eq!(w[1].iteration, w[0].iteration + 1);
            assert!(w[1].j <= w[0].j);
        }
        let last = trace.records.last().unwrap();
        assert!(last.rel_err_l2.unwrap() < trace.records[0].rel_err_l2.unwrap());
        let q = trace.final_q.field();
        assert!(q.min() >= 0.25 && q.max() <= 4.0);
        let seq = landweber_run(
            &m.clone().with_execution(crate::exec::Execution::Sequential),
            &data,
            &cfg,
            Some(&truth),
        )
        .unwrap();
        assert_eq!(seq, trace);
    }

    #[test]
    fn coercivity_of_zero_frequency_background() {
        let g = make_grid(21).unwrap();
        let m = ForwardModel::unit_illumination(g).unwrap();
        let q = Permittivity::unit(g, 4.0, 3).unwrap();
        let f = FrequencySet::new(vec![0.0]).unwrap();
        let s = coercivity_probe(&m, &q, &f, 10, 1).unwrap();
        // ρ ↦ ρ − mean(ρ) on interior fields: the constant interior field is
        // shrunk by the fraction of area it does not cover.
        let mask = q.interior_mask();
        let area: f64 = (0..g.len()).filter(|&k| mask[k]).map(|k| g.weight(k)).sum();
        assert!((s - (1.0 - area).sqrt()).abs() < 1e-8, "{s}");
        assert_eq!(s, coercivity_probe(&m, &q, &f, 10, 1).unwrap());
    }
}
