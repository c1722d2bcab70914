//! Text field format.
//!
//! ```text
//! AETF 1
//! n <nodes per side>
//! kind real|complex
//! <one line per node, row-major, 17 significant digits; "re im" for complex>
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{make_grid, ComplexField, ScalarField};

pub const FIELD_MAGIC: &str = "AETF 1";

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Real(ScalarField),
    Complex(ComplexField),
}

impl FieldData {
    pub fn into_real(self, path: &Path) -> Result<ScalarField> {
        match self {
            FieldData::Real(f) => Ok(f),
            FieldData::Complex(_) => Err(Error::Parse {
                path: path.into(),
                line: 3,
                message: "expected a real field".into(),
            }),
        }
    }
}

impl From<ScalarField> for FieldData {
    fn from(f: ScalarField) -> Self {
        FieldData::Real(f)
    }
}

impl From<ComplexField> for FieldData {
    fn from(f: ComplexField) -> Self {
        FieldData::Complex(f)
    }
}

/// Formats a value with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn field_to_string(field: &FieldData) -> String {
    let mut out = String::new();
    let (n, kind) = match field {
        FieldData::Real(f) => (f.grid().n(), "real"),
        FieldData::Complex(f) => (f.grid().n(), "complex"),
    };
    out.push_str(&format!("{FIELD_MAGIC}\nn {n}\nkind {kind}\n"));
    match field {
        FieldData::Real(f) => {
            for &v in f.values() {
                out.push_str(&fmt17(v));
                out.push('\n');
            }
        }
        FieldData::Complex(f) => {
            for v in f.values() {
                out.push_str(&format!("{} {}\n", fmt17(v.re), fmt17(v.im)));
            }
        }
    }
    out
}

pub fn write_field(field: impl Into<FieldData>, path: &Path) -> Result<()> {
    fs::write(path, field_to_string(&field.into())).map_err(|e| Error::io(path, e))
}

pub fn read_field(path: &Path) -> Result<FieldData> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_field(&text, path)
}

pub fn read_scalar_field(path: &Path) -> Result<ScalarField> {
    read_field(path)?.into_real(path)
}

fn parse_number(tok: &str, path: &Path, line: usize) -> Result<f64> {
    let err = |message: String| Error::Parse {
        path: path.into(),
        line,
        message,
    };
    let v: f64 = tok.parse().map_err(|_| err(format!("invalid number `{tok}`")))?;
    if !v.is_finite() {
        return Err(err(format!("non-finite value `{tok}`")));
    }
    Ok(v)
}

pub fn parse_field(text: &str, path: &Path) -> Result<FieldData> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.into(),
        line,
        message,
    };
    let lines: Vec<&str> = text.lines().collect();
    let line_at = |i: usize| lines.get(i).map(|l| l.trim()).ok_or_else(|| err(i + 1, "unexpected end of file".into()));
    if line_at(0)? != FIELD_MAGIC {
        return Err(err(1, format!("expected `{FIELD_MAGIC}`")));
    }
    let n: usize = line_at(1)?
        .strip_prefix("n ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| err(2, "expected `n <int>`".into()))?;
    let grid = make_grid(n).map_err(|e| err(2, e.to_string()))?;
    let complex = match line_at(2)? {
        "kind real" => false,
        "kind complex" => true,
        _ => return Err(err(3, "expected `kind real` or `kind complex`".into())),
    };
    let count = grid.len();
    let mut re = Vec::with_capacity(count);
    let mut im = Vec::with_capacity(if complex { count } else { 0 });
    for idx in 0..count {
        let line = idx + 4;
        let toks: Vec<&str> = line_at(idx + 3)?.split_whitespace().collect();
        let want = if complex { 2 } else { 1 };
        if toks.len() != want {
            return Err(err(line, format!("expected {want} value(s), found {}", toks.len())));
        }
        re.push(parse_number(toks[0], path, line)?);
        if complex {
            im.push(parse_number(toks[1], path, line)?);
        }
    }
    if let Some(extra) = lines[count + 3..].iter().position(|l| !l.trim().is_empty()) {
        return Err(err(count + 4 + extra, "unexpected trailing data".into()));
    }
    Ok(if complex {
        let values = re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect();
        FieldData::Complex(ComplexField::new(grid, values)?)
    } else {
        FieldData::Real(ScalarField::new(grid, re)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let g = make_grid(3).unwrap();
        let s = field_to_string(&ScalarField::constant(g, 0.1).into());
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(&lines[..3], &["AETF 1", "n 3", "kind real"]);
        assert_eq!(lines.len(), 12);
        assert_eq!(lines[3], "1.0000000000000001e-1");
    }

    #[test]
    fn truncated_file_names_missing_line() {
        let g = make_grid(3).unwrap();
        let s = field_to_string(&ScalarField::constant(g, 2.0).into());
        let cut: String = s.lines().take(7).map(|l| format!("{l}\n")).collect();
        match parse_field(&cut, Path::new("f.aetf")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn complex_token_count_checked() {
        let text = "AETF 1\nn 3\nkind complex\n".to_string() + &"1 2\n".repeat(4) + "1 2 3\n" + &"1 2\n".repeat(4);
        match parse_field(&text, Path::new("c.aetf")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_header_and_values() {
        let p = Path::new("x");
        assert!(matches!(parse_field("AETF 2\n", p), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_field("AETF 1\nn two\n", p), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_field("AETF 1\nn 3\nkind int\n", p), Err(Error::Parse { line: 3, .. })));
        let text = "AETF 1\nn 3\nkind real\n".to_string() + &"1\n".repeat(8) + "nan\n";
        assert!(matches!(parse_field(&text, p), Err(Error::Parse { line: 12, .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip_is_exact(
            n in 3usize..8,
            vals in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 2 * 64),
        ) {
            let g = make_grid(n).unwrap();
            let len = g.len();
            let real = ScalarField::new(g, vals[..len].to_vec()).unwrap();
            let back = parse_field(&field_to_string(&real.clone().into()), Path::new("r")).unwrap();
            prop_assert_eq!(back, FieldData::Real(real));
            let cvals = (0..len).map(|k| Complex64::new(vals[k], vals[len + k])).collect();
            let cplx = ComplexField::new(g, cvals).unwrap();
            let back = parse_field(&field_to_string(&cplx.clone().into()), Path::new("c")).unwrap();
            prop_assert_eq!(back, FieldData::Complex(cplx));
        }
    }
}
