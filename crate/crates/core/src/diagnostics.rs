//! Numerical self-checks run by `aetomo diagnose`: discretisation order,
//! zero-frequency identities, the `ω`-derivative, adjoint and Taylor tests,
//! the cross-correlation identity and the coercivity probe.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{make_grid, ComplexField, ScalarField};
use crate::internal_data::{ForwardModel, Permittivity};
use crate::inversion::{coercivity_probe, FrequencySet};
use crate::linearization::{adjoint_dot_test, random_direction, taylor_ratio, DerivativeWorkspace, Pairing};
use crate::pde::{solve_domega, solve_helmholtz, NeumannPoisson, SolverOptions};
use crate::physics::{cross_correlation_check, Displacement};

pub const MMS_SIZES: [usize; 3] = [26, 51, 101];
pub const DOMEGA_OMEGAS: [f64; 2] = [0.5, 3.0];
pub const DOMEGA_STEPS: (f64, f64) = (2e-2, 1e-2);
pub const TAYLOR_STEPS: (f64, f64) = (1e-2, 1e-3);
pub const TAYLOR_DIRECTIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub label: String,
    pub sizes: Vec<usize>,
    pub errors: Vec<f64>,
}

impl ConvergenceStudy {
    /// Observed orders between consecutive grids.
    pub fn orders(&self) -> Vec<f64> {
        self.sizes
            .windows(2)
            .zip(self.errors.windows(2))
            .map(|(n, e)| (e[0] / e[1]).ln() / ((n[1] - 1) as f64 / (n[0] - 1) as f64).ln())
            .collect()
    }
}

/// Max-norm error of the Helmholtz solver against
/// `u = ½ e^{iωx}(1 + y²)` with `q = 1 + 0.3xy` and matching Robin data.
pub fn helmholtz_mms_error(n: usize, omega: f64, options: &SolverOptions) -> Result<f64> {
    let g = make_grid(n)?;
    let i = Complex64::i();
    let q = ScalarField::from_fn(g, |x, y| 1.0 + 0.3 * x * y);
    let exact = move |x: f64, y: f64| (i * omega * x).exp() * (1.0 + y * y) * 0.5;
    let f = ComplexField::from_fn(g, |x, y| {
        let u = exact(x, y);
        let lap = -omega * omega * u + (i * omega * x).exp();
        (lap + omega * omega * (1.0 + 0.3 * x * y) * u) / omega
    });
    let last = n - 1;
    // corners use the mean of the two one-sided normal derivatives
    let phi = ComplexField::new(
        g,
        (0..g.len())
            .map(|k| {
                let (x, y) = g.coords(k);
                let (ix, jy) = g.ij(k);
                let u = exact(x, y);
                let ux = i * omega * u;
                let uy = (i * omega * x).exp() * y;
                let mut dn = Vec::new();
                if ix == 0 {
                    dn.push(-ux);
                }
                if ix == last {
                    dn.push(ux);
                }
                if jy == 0 {
                    dn.push(-uy);
                }
                if jy == last {
                    dn.push(uy);
                }
                if dn.is_empty() {
                    return u;
                }
                let avg: Complex64 = dn.iter().sum::<Complex64>() / dn.len() as f64;
                u - avg / (i * omega)
            })
            .collect(),
    )?;
    let (u, _) = solve_helmholtz(&q, omega, &phi, &f, options)?;
    Ok((0..g.len())
        .map(|k| {
            let (x, y) = g.coords(k);
            (u.values()[k] - exact(x, y)).norm()
        })
        .fold(0.0, f64::max))
}

/// Max-norm error of the Neumann Poisson solver against `cos(πx)cos(2πy)`.
pub fn poisson_mms_error(n: usize, options: &SolverOptions) -> Result<f64> {
    let g = make_grid(n)?;
    let exact = ScalarField::from_fn(g, |x, y| (PI * x).cos() * (2.0 * PI * y).cos());
    let (psi, _) = NeumannPoisson::new(g, options)?.solve(&exact.scale(-5.0 * PI * PI))?;
    Ok(psi.sub(&exact).max_abs())
}

pub fn helmholtz_study(omega: f64, sizes: &[usize], options: &SolverOptions) -> Result<ConvergenceStudy> {
    Ok(ConvergenceStudy {
        label: format!("helmholtz omega={omega}"),
        sizes: sizes.to_vec(),
        errors: sizes
            .iter()
            .map(|&n| helmholtz_mms_error(n, omega, options))
            .collect::<Result<_>>()?,
    })
}

pub fn poisson_study(sizes: &[usize], options: &SolverOptions) -> Result<ConvergenceStudy> {
    Ok(ConvergenceStudy {
        label: "poisson".into(),
        sizes: sizes.to_vec(),
        errors: sizes
            .iter()
            .map(|&n| poisson_mms_error(n, options))
            .collect::<Result<_>>()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroFrequency {
    /// `max |u₀ − 1|`.
    pub u_deviation: f64,
    /// `‖ψ₀ − (q − mean q)‖ / ‖q − mean q‖`, zero when `q` is constant.
    pub psi_relative: f64,
}

/// At `ω = 0` with `φ ≡ 1` the field is `u₀ ≡ 1` and `ψ₀ = q − mean(q)`.
pub fn zero_frequency_check(model: &ForwardModel, q: &Permittivity) -> Result<ZeroFrequency> {
    let (u, _) = model.field(q.field(), 0.0)?;
    let u_deviation = u
        .values()
        .iter()
        .map(|v| (v - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    let psi = model.datum(&u, q.field())?;
    let target = q.field().centered();
    let diff = psi.sub(&target).norm_l2();
    let scale = target.norm_l2();
    Ok(ZeroFrequency {
        u_deviation,
        psi_relative: if scale > 0.0 { diff / scale } else { diff },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomegaCheck {
    pub omega: f64,
    pub errors: (f64, f64),
}

impl DomegaCheck {
    pub fn ratio(&self) -> f64 {
        self.errors.0 / self.errors.1
    }
}

/// Compares `∂u/∂ω` with central differences of the forward field at two steps.
pub fn domega_check(model: &ForwardModel, q: &Permittivity, omega: f64, steps: (f64, f64)) -> Result<DomegaCheck> {
    let phi = model.phi();
    let opts = model.solver();
    let zero = ComplexField::zeros(*q.grid());
    let (u, _) = solve_helmholtz(q.field(), omega, phi, &zero, opts)?;
    let (w, _) = solve_domega(q.field(), omega, phi, &u, opts)?;
    let err = |eps: f64| -> Result<f64> {
        let (up, _) = solve_helmholtz(q.field(), omega + eps, phi, &zero, opts)?;
        let (um, _) = solve_helmholtz(q.field(), omega - eps, phi, &zero, opts)?;
        Ok(up.sub(&um).scale(Complex64::new(0.5 / eps, 0.0)).sub(&w).max_abs())
    };
    Ok(DomegaCheck {
        omega,
        errors: (err(steps.0)?, err(steps.1)?),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DotCheck {
    pub omega: f64,
    pub pairing: String,
    pub worst: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorCheck {
    pub direction: usize,
    pub ratios: (f64, f64),
}

impl TaylorCheck {
    /// Factor by which the remainder ratio drops between the two steps.
    pub fn decrease(&self) -> f64 {
        self.ratios.0 / self.ratios.1
    }
}

pub fn taylor_check(
    model: &ForwardModel,
    q: &Permittivity,
    omega: f64,
    directions: usize,
    steps: (f64, f64),
    seed: u64,
) -> Result<Vec<TaylorCheck>> {
    let ws = DerivativeWorkspace::new(model, q, omega)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..directions)
        .map(|d| {
            let rho = random_direction(*q.grid(), ws.mask(), &mut rng);
            let rho = rho.scale(1.0 / rho.max_abs());
            Ok(TaylorCheck {
                direction: d,
                ratios: (taylor_ratio(&ws, &rho, steps.0)?, taylor_ratio(&ws, &rho, steps.1)?),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub omega: f64,
    pub amplitude: f64,
    /// `|lhs − rhs_exact| / |rhs_exact|` at the full amplitude.
    pub identity_error: f64,
    /// `|rhs_exact − rhs_approx|` at the full and the halved amplitude.
    pub gaps: (f64, f64),
}

impl CrossCheck {
    pub fn gap_ratio(&self) -> f64 {
        self.gaps.0 / self.gaps.1
    }
}

/// Radial displacement centred in the domain reaching the collar edge.
pub fn default_displacement(q: &Permittivity, amplitude: f64) -> Result<Displacement> {
    let g = *q.grid();
    let radius = 0.5 - (q.margin() as f64 + 1.0) * g.h();
    Displacement::radial(g, (0.5, 0.5), radius, amplitude)
}

pub fn cross_check(model: &ForwardModel, q: &Permittivity, omega: f64, amplitude: f64) -> Result<CrossCheck> {
    let full = cross_correlation_check(model, q, omega, &default_displacement(q, amplitude)?)?;
    let half = cross_correlation_check(model, q, omega, &default_displacement(q, 0.5 * amplitude)?)?;
    let gap = |c: &crate::physics::CrossCorrelation| (c.rhs_exact - Complex64::new(c.rhs_approx, 0.0)).norm();
    Ok(CrossCheck {
        omega,
        amplitude,
        identity_error: (full.lhs - full.rhs_exact).norm() / full.rhs_exact.norm(),
        gaps: (gap(&full), gap(&half)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityEntry {
    pub frequencies: Vec<f64>,
    pub sigma_min: f64,
}

/// Probe each single frequency and, when there are several, their union.
pub fn coercivity_table(
    model: &ForwardModel,
    q: &Permittivity,
    freqs: &FrequencySet,
    iterations: usize,
    seed: u64,
) -> Result<Vec<CoercivityEntry>> {
    let mut sets: Vec<Vec<f64>> = freqs.omegas().iter().map(|&w| vec![w]).collect();
    if freqs.len() > 1 {
        sets.push(freqs.omegas().to_vec());
    }
    sets.into_iter()
        .map(|set| {
            let fs = FrequencySet::new(set.clone())?;
            Ok(CoercivityEntry {
                sigma_min: coercivity_probe(model, q, &fs, iterations, seed)?,
                frequencies: set,
            })
        })
        .collect()
}

/// Settings for a diagnostics run.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticPlan {
    pub mms_sizes: Vec<usize>,
    pub mms_omegas: Vec<f64>,
    pub dot_omegas: Vec<f64>,
    pub dot_trials: usize,
    pub sobolev_alpha: f64,
    pub taylor_omega: f64,
    pub cross_omega: f64,
    pub cross_amplitude: f64,
    pub frequencies: FrequencySet,
    pub probe_iterations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    pub convergence: Vec<ConvergenceStudy>,
    pub zero_frequency: ZeroFrequency,
    pub domega: Vec<DomegaCheck>,
    pub dot: Vec<DotCheck>,
    pub taylor_omega: f64,
    pub taylor: Vec<TaylorCheck>,
    pub cross: CrossCheck,
    pub coercivity: Vec<CoercivityEntry>,
}

pub fn run_diagnostics(model: &ForwardModel, q: &Permittivity, plan: &DiagnosticPlan) -> Result<DiagnosticReport> {
    let opts = model.solver();
    let mut convergence = plan
        .mms_omegas
        .iter()
        .map(|&w| helmholtz_study(w, &plan.mms_sizes, opts))
        .collect::<Result<Vec<_>>>()?;
    convergence.push(poisson_study(&plan.mms_sizes, opts)?);
    let domega = DOMEGA_OMEGAS
        .iter()
        .map(|&w| domega_check(model, q, w, DOMEGA_STEPS))
        .collect::<Result<Vec<_>>>()?;
    let mut dot = Vec::new();
    for &w in &plan.dot_omegas {
        for pairing in [Pairing::L2, Pairing::Sobolev { alpha: plan.sobolev_alpha }] {
            dot.push(DotCheck {
                omega: w,
                pairing: pairing.name(),
                worst: adjoint_dot_test(model, q, w, pairing, plan.dot_trials, plan.seed)?,
            });
        }
    }
    Ok(DiagnosticReport {
        convergence,
        zero_frequency: zero_frequency_check(model, q)?,
        domega,
        dot,
        taylor_omega: plan.taylor_omega,
        taylor: taylor_check(model, q, plan.taylor_omega, TAYLOR_DIRECTIONS, TAYLOR_STEPS, plan.seed)?,
        cross: cross_check(model, q, plan.cross_omega, plan.cross_amplitude)?,
        coercivity: coercivity_table(model, q, &plan.frequencies, plan.probe_iterations, plan.seed)?,
    })
}

fn e(v: f64) -> String {
    format!("{v:.6e}")
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl DiagnosticReport {
    /// Plain-text report, one record per line, no timings.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# aetomo diagnostics\n");
        for s in &self.convergence {
            for (n, err) in s.sizes.iter().zip(&s.errors) {
                out.push_str(&format!("mms {} n={n} max_err={}\n", s.label, e(*err)));
            }
            let orders: Vec<String> = s.orders().iter().map(|o| format!("{o:.3}")).collect();
            out.push_str(&format!("mms {} orders={}\n", s.label, orders.join(",")));
        }
        let z = &self.zero_frequency;
        out.push_str(&format!(
            "zero_frequency u_dev={} psi_rel={}\n",
            e(z.u_deviation),
            e(z.psi_relative)
        ));
        for d in &self.domega {
            out.push_str(&format!(
                "domega omega={} err_coarse={} err_fine={} ratio={:.3}\n",
                d.omega,
                e(d.errors.0),
                e(d.errors.1),
                d.ratio()
            ));
        }
        for d in &self.dot {
            out.push_str(&format!("dot omega={} pairing={} worst={}\n", d.omega, d.pairing, e(d.worst)));
        }
        for t in &self.taylor {
            out.push_str(&format!(
                "taylor omega={} direction={} ratio_coarse={} ratio_fine={} decrease={:.3}\n",
                self.taylor_omega,
                t.direction,
                e(t.ratios.0),
                e(t.ratios.1),
                t.decrease()
            ));
        }
        let c = &self.cross;
        out.push_str(&format!(
            "cross omega={} amplitude={} identity_err={} gap={} gap_half={} gap_ratio={:.3}\n",
            c.omega,
            c.amplitude,
            e(c.identity_error),
            e(c.gaps.0),
            e(c.gaps.1),
            c.gap_ratio()
        ));
        for entry in &self.coercivity {
            out.push_str(&format!(
                "coercivity K={{{}}} sigma_min={}\n",
                list(&entry.frequencies),
                e(entry.sigma_min)
            ));
        }
        out
    }
}
