//! Raster phantoms: piecewise-constant inclusions over background 1, blurred
//! with a normalised Gaussian, collar reset and clamped into the admissible box.

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::internal_data::{check_bounds, Permittivity};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Disk { cx: f64, cy: f64, r: f64 },
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
}

impl Shape {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Disk { cx, cy, r } => (x - cx).powi(2) + (y - cy).powi(2) <= r * r,
            Shape::Rect { x0, y0, x1, y1 } => (x0..=x1).contains(&x) && (y0..=y1).contains(&y),
        }
    }

    /// Bounding box `(x0, y0, x1, y1)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match *self {
            Shape::Disk { cx, cy, r } => (cx - r, cy - r, cx + r, cy + r),
            Shape::Rect { x0, y0, x1, y1 } => (x0, y0, x1, y1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inclusion {
    pub shape: Shape,
    pub contrast: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomKind {
    Disks,
    Rectangles,
    Composite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub inclusions: Vec<Inclusion>,
    /// Gaussian standard deviation in nodes; 0 disables blurring.
    pub blur_radius: f64,
    pub margin: usize,
    pub lambda_bound: f64,
}

impl PhantomSpec {
    /// Two disks (contrasts 1.5 and 2.0), blur 2 nodes, margin 5, Λ = 4.
    pub fn default_phantom() -> Self {
        PhantomSpec {
            inclusions: vec![
                Inclusion {
                    shape: Shape::Disk { cx: 0.35, cy: 0.6, r: 0.15 },
                    contrast: 1.5,
                },
                Inclusion {
                    shape: Shape::Disk { cx: 0.65, cy: 0.35, r: 0.12 },
                    contrast: 2.0,
                },
            ],
            blur_radius: 2.0,
            margin: 5,
            lambda_bound: 4.0,
        }
    }

    pub fn empty(margin: usize, lambda_bound: f64) -> Self {
        PhantomSpec {
            inclusions: Vec::new(),
            blur_radius: 0.0,
            margin,
            lambda_bound,
        }
    }

    pub fn kind(&self) -> PhantomKind {
        let disks = self.inclusions.iter().all(|i| matches!(i.shape, Shape::Disk { .. }));
        let rects = self.inclusions.iter().all(|i| matches!(i.shape, Shape::Rect { .. }));
        match (disks, rects) {
            (true, _) => PhantomKind::Disks,
            (_, true) => PhantomKind::Rectangles,
            _ => PhantomKind::Composite,
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        check_bounds(grid, self.lambda_bound, self.margin)?;
        if !(self.blur_radius.is_finite() && self.blur_radius >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "blur radius must be non-negative, got {}",
                self.blur_radius
            )));
        }
        let lo_edge = self.margin as f64 * grid.h();
        let hi_edge = 1.0 - lo_edge;
        for (idx, inc) in self.inclusions.iter().enumerate() {
            let lo = 1.0 / self.lambda_bound;
            if !(lo..=self.lambda_bound).contains(&inc.contrast) {
                return Err(Error::InvalidArgument(format!(
                    "inclusion {idx}: contrast {} outside [{lo}, {}]",
                    inc.contrast, self.lambda_bound
                )));
            }
            let (x0, y0, x1, y1) = inc.shape.bounds();
            let valid_shape = match inc.shape {
                Shape::Disk { r, .. } => r > 0.0,
                Shape::Rect { .. } => x1 > x0 && y1 > y0,
            };
            if !valid_shape {
                return Err(Error::InvalidArgument(format!("inclusion {idx}: degenerate shape")));
            }
            if !(x0 > lo_edge && y0 > lo_edge && x1 < hi_edge && y1 < hi_edge) {
                return Err(Error::InvalidArgument(format!(
                    "inclusion {idx} touches the collar of width {lo_edge}"
                )));
            }
        }
        Ok(())
    }
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let half = (3.0 * sigma).ceil() as isize;
    let raw: Vec<f64> = (-half..=half)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

// Separable convolution with zero padding outside the grid.
fn blur(values: &[f64], n: usize, sigma: f64) -> Vec<f64> {
    let kernel = gaussian_kernel(sigma);
    let half = (kernel.len() / 2) as isize;
    let pass = |src: &[f64], along_x: bool| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let mut acc = 0.0;
                for (t, w) in kernel.iter().enumerate() {
                    let d = t as isize - half;
                    let (ii, jj) = if along_x {
                        (i as isize + d, j as isize)
                    } else {
                        (i as isize, j as isize + d)
                    };
                    if (0..n as isize).contains(&ii) && (0..n as isize).contains(&jj) {
                        acc += w * src[jj as usize * n + ii as usize];
                    }
                }
                out[j * n + i] = acc;
            }
        }
        out
    };
    pass(&pass(values, true), false)
}

/// Rasterises `spec` on `grid`. Later inclusions overwrite earlier ones.
pub fn make_phantom(spec: &PhantomSpec, grid: Grid) -> Result<Permittivity> {
    spec.validate(&grid)?;
    let mut contrast = vec![0.0; grid.len()];
    for k in 0..grid.len() {
        let (x, y) = grid.coords(k);
        for inc in &spec.inclusions {
            if inc.shape.contains(x, y) {
                contrast[k] = inc.contrast - 1.0;
            }
        }
    }
    if spec.blur_radius > 0.0 {
        contrast = blur(&contrast, grid.n(), spec.blur_radius);
    }
    let lo = 1.0 / spec.lambda_bound;
    let values = contrast
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if grid.depth(k) < spec.margin {
                1.0
            } else {
                (1.0 + c).clamp(lo, spec.lambda_bound)
            }
        })
        .collect();
    Permittivity::new(ScalarField::new(grid, values)?, spec.lambda_bound, spec.margin)
}
