//! Checks of the physical model: transported permittivity `q_v` and the
//! cross-correlation identity between boundary data and the volume integral
//! `ω² ∫ (q_v − q) u ū^v`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{gradient, inner_l2, ComplexField, Grid, ScalarField, VectorField};
use crate::internal_data::{ForwardModel, Permittivity};

/// Displacement field `amplitude · shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct Displacement {
    shape: VectorField,
    amplitude: f64,
}

impl Displacement {
    pub fn new(shape: VectorField, amplitude: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::InvalidArgument("displacement amplitude must be finite".into()));
        }
        Ok(Displacement { shape, amplitude })
    }

    pub fn zero(grid: Grid) -> Self {
        Displacement {
            shape: VectorField::from_fn(grid, |_, _| (0.0, 0.0)),
            amplitude: 0.0,
        }
    }

    /// Radial bump `a·sin²(π r/R)·(x − c)/r` for `r < R`, zero elsewhere; `max |v| = a`.
    pub fn radial(grid: Grid, center: (f64, f64), radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        let shape = VectorField::from_fn(grid, |x, y| {
            let (dx, dy) = (x - center.0, y - center.1);
            let r = dx.hypot(dy);
            if r == 0.0 || r >= radius {
                return (0.0, 0.0);
            }
            let chi = (std::f64::consts::PI * r / radius).sin().powi(2);
            (chi * dx / r, chi * dy / r)
        });
        Displacement::new(shape, amplitude)
    }

    pub fn grid(&self) -> &Grid {
        self.shape.grid()
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Displacement at node `k`.
    pub fn at(&self, k: usize) -> (f64, f64) {
        (
            self.amplitude * self.shape.vx()[k],
            self.amplitude * self.shape.vy()[k],
        )
    }

    pub fn vector(&self) -> VectorField {
        self.shape.scaled_by(&ScalarField::constant(*self.grid(), self.amplitude))
    }

    /// Checks `v = 0` on the collar and `max |v| <` collar width.
    pub fn check(&self, margin: usize) -> Result<()> {
        let g = self.grid();
        let width = margin as f64 * g.h();
        for k in 0..g.len() {
            let (vx, vy) = self.at(k);
            let norm = vx.hypot(vy);
            if g.depth(k) < margin && norm != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "displacement must vanish on the collar (node {k})"
                )));
            }
            if norm >= width {
                return Err(Error::InvalidArgument(format!(
                    "displacement {norm} at node {k} exceeds the collar width {width}"
                )));
            }
        }
        Ok(())
    }
}

fn catmull_rom(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

// Node value with linear extrapolation one node past each edge.
fn sample(values: &[f64], n: usize, i: isize, j: isize) -> f64 {
    let last = n as isize - 1;
    if i < 0 {
        return 2.0 * sample(values, n, 0, j) - sample(values, n, 1, j);
    }
    if i > last {
        return 2.0 * sample(values, n, last, j) - sample(values, n, last - 1, j);
    }
    if j < 0 {
        return 2.0 * sample(values, n, i, 0) - sample(values, n, i, 1);
    }
    if j > last {
        return 2.0 * sample(values, n, i, last) - sample(values, n, i, last - 1);
    }
    values[j as usize * n + i as usize]
}

/// Bicubic (Catmull-Rom) interpolation of a node field at `(x, y)` in the unit square.
pub fn interpolate(f: &ScalarField, x: f64, y: f64) -> f64 {
    let g = f.grid();
    let n = g.n();
    let locate = |p: f64| {
        let s = p / g.h();
        let i = (s.floor() as isize).clamp(0, n as isize - 2);
        (i, s - i as f64)
    };
    let (i, tx) = locate(x);
    let (j, ty) = locate(y);
    let wx = catmull_rom(tx);
    let wy = catmull_rom(ty);
    let mut acc = 0.0;
    for (b, wyb) in wy.iter().enumerate() {
        let mut row = 0.0;
        for (a, wxa) in wx.iter().enumerate() {
            row += wxa * sample(f.values(), n, i - 1 + a as isize, j - 1 + b as isize);
        }
        acc += wyb * row;
    }
    acc
}

/// `q_v(y) ≈ q(y − v(y))`, the first-order inverse of the transport `q_v(x + v(x)) = q(x)`.
pub fn perturbed_permittivity(q: &Permittivity, v: &Displacement) -> Result<ScalarField> {
    let g = *q.grid();
    g.check_same(v.grid())?;
    let values = (0..g.len())
        .map(|k| {
            let (vx, vy) = v.at(k);
            if vx == 0.0 && vy == 0.0 {
                return Ok(q.field().values()[k]);
            }
            let (x, y) = g.coords(k);
            let (px, py) = (x - vx, y - vy);
            if !((0.0..=1.0).contains(&px) && (0.0..=1.0).contains(&py)) {
                return Err(Error::InvalidArgument(format!(
                    "displaced point ({px}, {py}) from node {k} leaves the domain"
                )));
            }
            Ok(interpolate(q.field(), px, py))
        })
        .collect::<Result<Vec<f64>>>()?;
    ScalarField::new(g, values)
}

/// Outward normal derivative along each side and the trapezoid boundary form
/// `∫_∂Ω (∂a/∂n · b̄ − ∂b̄/∂n · a) dσ`.
pub fn boundary_form(a: &ComplexField, b: &ComplexField) -> Result<Complex64> {
    a.grid().check_same(b.grid())?;
    let g = a.grid();
    let n = g.n();
    let h = g.h();
    let (av, bv) = (a.values(), b.values());
    let mut total = Complex64::new(0.0, 0.0);
    // (node at the wall, step inward)
    let sides: [Box<dyn Fn(usize) -> (usize, isize)>; 4] = [
        Box::new(|t| (g.index(0, t), 1)),
        Box::new(|t| (g.index(n - 1, t), -1)),
        Box::new(|t| (g.index(t, 0), n as isize)),
        Box::new(|t| (g.index(t, n - 1), -(n as isize))),
    ];
    for side in &sides {
        for t in 0..n {
            let (k, step) = side(t);
            let k1 = (k as isize + step) as usize;
            let k2 = (k as isize + 2 * step) as usize;
            let dn = |v: &[Complex64]| -(-3.0 * v[k] + 4.0 * v[k1] - v[k2]) / (2.0 * h);
            let term = dn(av) * bv[k].conj() - dn(bv).conj() * av[k];
            total += term * (h * g.edge_factor(t));
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCorrelation {
    /// Boundary cross-correlation of `u` and `u^v` (self-term removed).
    pub lhs: Complex64,
    /// `ω² ∫ (q_v − q) u ū^v dx`.
    pub rhs_exact: Complex64,
    /// `−ω² ∫ |u|² ∇q·v dx`.
    pub rhs_approx: f64,
}

/// Evaluates both sides of the cross-correlation identity for displacement `v`.
///
/// The discrete boundary form of `u` with itself vanishes only to `O(h²)`,
/// so it is subtracted from the boundary side; in the continuum it is zero.
pub fn cross_correlation_check(
    model: &ForwardModel,
    q: &Permittivity,
    omega: f64,
    v: &Displacement,
) -> Result<CrossCorrelation> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("frequency must be positive, got {omega}")));
    }
    v.check(q.margin())?;
    let qv = perturbed_permittivity(q, v)?;
    let (u, _) = model.field(q.field(), omega)?;
    let uv = if qv == *q.field() {
        u.clone()
    } else {
        model.field(&qv, omega)?.0
    };
    let lhs = boundary_form(&u, &uv)? - boundary_form(&u, &u)?;
    let g = *q.grid();
    let w2 = omega * omega;
    let dq = qv.sub(q.field());
    let rhs_exact: Complex64 = (0..g.len())
        .map(|k| g.weight(k) * dq.values()[k] * u.values()[k] * uv.values()[k].conj())
        .sum::<Complex64>()
        * w2;
    let drift = gradient(q.field()).dot(&v.vector());
    let rhs_approx = -w2 * inner_l2(&u.abs2(), &drift)?;
    Ok(CrossCorrelation {
        lhs,
        rhs_exact,
        rhs_approx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn bump(g: Grid, margin: usize) -> Permittivity {
        let mask = g.interior_mask(margin);
        let v = (0..g.len())
            .map(|k| {
                let (x, y) = g.coords(k);
                if mask[k] {
                    1.0 + 0.6 * (-((x - 0.45).powi(2) + (y - 0.55).powi(2)) / 0.02).exp()
                } else {
                    1.0
                }
            })
            .collect();
        Permittivity::new(ScalarField::new(g, v).unwrap(), 4.0, margin).unwrap()
    }

    #[test]
    fn zero_displacement_is_identity() {
        let g = make_grid(21).unwrap();
        let q = bump(g, 3);
        assert_eq!(perturbed_permittivity(&q, &Displacement::zero(g)).unwrap(), *q.field());
        let m = ForwardModel::unit_illumination(g).unwrap();
        let c = cross_correlation_check(&m, &q, 3.0, &Displacement::zero(g)).unwrap();
        assert_eq!(c.lhs, Complex64::new(0.0, 0.0));
        assert_eq!(c.rhs_exact, Complex64::new(0.0, 0.0));
        assert_eq!(c.rhs_approx, 0.0);
    }

    #[test]
    fn constant_q_is_transport_invariant() {
        let g = make_grid(21).unwrap();
        let q = Permittivity::unit(g, 4.0, 3).unwrap();
        let v = Displacement::radial(g, (0.5, 0.5), 0.3, 0.01).unwrap();
        let qv = perturbed_permittivity(&q, &v).unwrap();
        assert!(qv.values().iter().all(|&x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn linear_field_shifts_exactly() {
        let g = make_grid(21).unwrap();
        let lin = ScalarField::from_fn(g, |x, y| 1.5 + 0.4 * x - 0.3 * y);
        let s = (0.013, -0.007);
        let shape = VectorField::from_fn(g, |x, y| {
            if (0.2..=0.8).contains(&x) && (0.2..=0.8).contains(&y) {
                s
            } else {
                (0.0, 0.0)
            }
        });
        let v = Displacement::new(shape, 1.0).unwrap();
        // the transport itself does not need an admissible q
        let q = Permittivity::unchecked(lin.clone(), 4.0, 3);
        let qv = perturbed_permittivity(&q, &v).unwrap();
        for k in 0..g.len() {
            let (x, y) = g.coords(k);
            let (vx, vy) = v.at(k);
            let want = 1.5 + 0.4 * (x - vx) - 0.3 * (y - vy);
            assert!((qv.values()[k] - want).abs() < 1e-13, "node {k}");
        }
    }

    #[test]
    fn displacement_checks() {
        let g = make_grid(21).unwrap();
        let q = bump(g, 3);
        let big = Displacement::radial(g, (0.5, 0.5), 0.3, 0.5).unwrap();
        assert!(big.check(3).is_err());
        let touching = Displacement::radial(g, (0.1, 0.5), 0.3, 0.01).unwrap();
        assert!(touching.check(3).is_err());
        let m = ForwardModel::unit_illumination(g).unwrap();
        assert!(cross_correlation_check(&m, &q, 3.0, &big).is_err());
        assert!(cross_correlation_check(&m, &q, 0.0, &Displacement::zero(g)).is_err());
        let shape = VectorField::from_fn(g, |_, _| (0.2, 0.0));
        let out = Displacement::new(shape, 1.0).unwrap();
        assert!(perturbed_permittivity(&q, &out).is_err());
    }

    #[test]
    fn boundary_form_antisymmetry() {
        let g = make_grid(15).unwrap();
        let a = ComplexField::from_fn(g, |x, y| Complex64::new(x * y, x - y));
        let b = ComplexField::from_fn(g, |x, y| Complex64::new(y.sin(), x * x));
        let ab = boundary_form(&a, &b).unwrap();
        let ba = boundary_form(&b, &a).unwrap();
        assert!((ab + ba.conj()).norm() < 1e-12);
    }

    #[test]
    fn identity_holds_on_moderate_grid() {
        let g = make_grid(51).unwrap();
        let q = bump(g, 5);
        let m = ForwardModel::unit_illumination(g).unwrap();
        let v = Displacement::radial(g, (0.5, 0.5), 0.35, 1e-3).unwrap();
        let c = cross_correlation_check(&m, &q, 3.0, &v).unwrap();
        let rel = (c.lhs - c.rhs_exact).norm() / c.rhs_exact.norm();
        assert!(rel < 5e-3, "{rel}");
        assert!((c.rhs_exact.re - c.rhs_approx).abs() < 0.05 * c.rhs_approx.abs());
    }
}
