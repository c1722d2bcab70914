//! ASCII greyscale images (PGM "P2", maxval 255). The top image row is `y = 1`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::ScalarField;

pub fn pgm_to_string(f: &ScalarField, range: Option<(f64, f64)>) -> Result<String> {
    let (lo, hi) = match range {
        Some((lo, hi)) => {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::InvalidArgument(format!("invalid range [{lo}, {hi}]")));
            }
            (lo, hi)
        }
        None => (f.min(), f.max()),
    };
    let constant = f.min() == f.max();
    if lo == hi && !constant {
        return Err(Error::InvalidArgument(format!(
            "empty range [{lo}, {hi}] for a non-constant field"
        )));
    }
    let n = f.grid().n();
    let mut out = format!("P2\n{n} {n}\n255\n");
    for j in (0..n).rev() {
        let row: Vec<String> = (0..n)
            .map(|i| {
                let v = f.values()[j * n + i];
                let level = if lo == hi {
                    128.0
                } else {
                    (255.0 * (v - lo) / (hi - lo)).round().clamp(0.0, 255.0)
                };
                (level as u8).to_string()
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn render_pgm(f: &ScalarField, path: &Path, range: Option<(f64, f64)>) -> Result<()> {
    fs::write(path, pgm_to_string(f, range)?).map_err(|e| Error::io(path, e))
}
