//! Run configuration: line-based `key = value`, `#` comments, unknown keys rejected.
//!
//! `inclusion` may repeat: `inclusion = disk cx cy r contrast` or
//! `inclusion = rect x0 y0 x1 y1 contrast`.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::phantom::{Inclusion, PhantomSpec, Shape};
use crate::error::{Error, Result};
use crate::inversion::{frequency_grid, FrequencySet, LandweberConfig, StepSize};
use crate::linearization::Pairing;
use crate::pde::{SolverMethod, SolverOptions};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomChoice {
    Default,
    None,
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub phantom: PhantomChoice,
    pub inclusions: Vec<Inclusion>,
    pub phantom_blur: f64,
    pub frequencies: Option<Vec<f64>>,
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub m: Option<usize>,
    pub phi: Complex64,
    pub noise_level: f64,
    pub noise_seed: u64,
    pub step_h: StepSize,
    pub max_iterations: usize,
    pub lambda_bound: f64,
    pub margin: usize,
    pub gradient_pairing: String,
    pub sobolev_alpha: f64,
    pub stop_tolerance: f64,
    pub line_search: bool,
    pub power_iterations: usize,
    pub output_dir: Option<PathBuf>,
    pub format_version: u32,
    pub seed: u64,
    pub dot_trials: usize,
    pub dot_omegas: Vec<f64>,
    pub probe_iterations: usize,
    pub linear_tolerance: f64,
    pub solver: SolverMethod,
    pub mms_omegas: Vec<f64>,
    pub taylor_omega: f64,
    pub cross_omega: f64,
    pub cross_amplitude: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 101,
            phantom: PhantomChoice::Default,
            inclusions: Vec::new(),
            phantom_blur: 2.0,
            frequencies: None,
            k_min: None,
            k_max: None,
            m: None,
            phi: Complex64::new(1.0, 0.0),
            noise_level: 0.0,
            noise_seed: 0,
            step_h: StepSize::Auto,
            max_iterations: 100,
            lambda_bound: 4.0,
            margin: 5,
            gradient_pairing: "l2".into(),
            sobolev_alpha: 1e-3,
            stop_tolerance: 1e-10,
            line_search: true,
            power_iterations: 10,
            output_dir: None,
            format_version: FORMAT_VERSION,
            seed: 0,
            dot_trials: 10,
            dot_omegas: vec![0.0, 3.0, 10.0, 20.0],
            probe_iterations: 30,
            linear_tolerance: 1e-10,
            solver: SolverMethod::Direct,
            mms_omegas: vec![3.0, 10.0],
            taylor_omega: 3.0,
            cross_omega: 3.0,
            cross_amplitude: 1e-3,
        }
    }
}

fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("invalid number `{v}`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("non-finite number `{v}`"))
    }
}

fn parse_int<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("invalid integer `{v}`"))
}

fn parse_list(v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_f64)
        .collect()
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        _ => Err(format!("invalid boolean `{v}`")),
    }
}

fn parse_inclusion(v: &str) -> std::result::Result<Inclusion, String> {
    let toks: Vec<&str> = v.split_whitespace().collect();
    let nums = |t: &[&str]| t.iter().map(|s| parse_f64(s)).collect::<std::result::Result<Vec<f64>, String>>();
    match toks.first() {
        Some(&"disk") if toks.len() == 5 => {
            let p = nums(&toks[1..])?;
            Ok(Inclusion {
                shape: Shape::Disk { cx: p[0], cy: p[1], r: p[2] },
                contrast: p[3],
            })
        }
        Some(&"rect") if toks.len() == 6 => {
            let p = nums(&toks[1..])?;
            Ok(Inclusion {
                shape: Shape::Rect { x0: p[0], y0: p[1], x1: p[2], y1: p[3] },
                contrast: p[4],
            })
        }
        _ => Err(format!(
            "invalid inclusion `{v}` (expected `disk cx cy r c` or `rect x0 y0 x1 y1 c`)"
        )),
    }
}

fn list_text(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key.trim() {
            "n" => self.n = parse_int(v)?,
            "phantom" => {
                self.phantom = match v {
                    "default" => PhantomChoice::Default,
                    "none" => PhantomChoice::None,
                    "custom" => PhantomChoice::Custom,
                    _ => return Err(format!("invalid phantom `{v}` (default|none|custom)")),
                }
            }
            "inclusion" => self.inclusions.push(parse_inclusion(v)?),
            "phantom_blur" => self.phantom_blur = parse_f64(v)?,
            "frequencies" => self.frequencies = Some(parse_list(v)?),
            "k_min" => self.k_min = Some(parse_f64(v)?),
            "k_max" => self.k_max = Some(parse_f64(v)?),
            "m" => self.m = Some(parse_int(v)?),
            "phi" => {
                let p = parse_list(v)?;
                self.phi = match p.as_slice() {
                    [re] => Complex64::new(*re, 0.0),
                    [re, im] => Complex64::new(*re, *im),
                    _ => return Err(format!("invalid phi `{v}` (expected `re` or `re im`)")),
                }
            }
            "noise_level" => self.noise_level = parse_f64(v)?,
            "noise_seed" => self.noise_seed = parse_int(v)?,
            "step_h" => {
                self.step_h = if v == "auto" {
                    StepSize::Auto
                } else {
                    StepSize::Fixed(parse_f64(v)?)
                }
            }
            "max_iterations" => self.max_iterations = parse_int(v)?,
            "lambda_bound" => self.lambda_bound = parse_f64(v)?,
            "margin" => self.margin = parse_int(v)?,
            "gradient_pairing" => match v {
                "l2" | "sobolev" => self.gradient_pairing = v.into(),
                _ => return Err(format!("invalid gradient_pairing `{v}` (l2|sobolev)")),
            },
            "sobolev_alpha" => self.sobolev_alpha = parse_f64(v)?,
            "stop_tolerance" => self.stop_tolerance = parse_f64(v)?,
            "line_search" => self.line_search = parse_bool(v)?,
            "power_iterations" => self.power_iterations = parse_int(v)?,
            "output_dir" => self.output_dir = Some(PathBuf::from(v)),
            "format_version" => self.format_version = parse_int(v)?,
            "seed" => self.seed = parse_int(v)?,
            "dot_trials" => self.dot_trials = parse_int(v)?,
            "dot_omegas" => self.dot_omegas = parse_list(v)?,
            "probe_iterations" => self.probe_iterations = parse_int(v)?,
            "linear_tolerance" => self.linear_tolerance = parse_f64(v)?,
            "solver" => {
                self.solver = match v {
                    "direct" => SolverMethod::Direct,
                    "iterative" => SolverMethod::Iterative,
                    "auto" => SolverMethod::Auto,
                    _ => return Err(format!("invalid solver `{v}` (direct|iterative|auto)")),
                }
            }
            "mms_omegas" => self.mms_omegas = parse_list(v)?,
            "taylor_omega" => self.taylor_omega = parse_f64(v)?,
            "cross_omega" => self.cross_omega = parse_f64(v)?,
            "cross_amplitude" => self.cross_amplitude = parse_f64(v)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: path.into(),
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            cfg.set(key, value).map_err(err)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text, path)
    }

    pub fn frequency_set(&self) -> Result<FrequencySet> {
        let grid_keys = [self.k_min.is_some(), self.k_max.is_some(), self.m.is_some()];
        match (&self.frequencies, grid_keys) {
            (Some(_), g) if g.iter().any(|&b| b) => Err(Error::Config(
                "give either `frequencies` or `k_min`/`k_max`/`m`, not both".into(),
            )),
            (Some(list), _) => FrequencySet::new(list.clone()),
            (None, [true, true, true]) => frequency_grid(
                self.k_min.unwrap_or_default(),
                self.k_max.unwrap_or_default(),
                self.m.unwrap_or_default(),
            ),
            (None, [false, false, false]) => FrequencySet::new(vec![3.0]),
            (None, _) => Err(Error::Config("`k_min`, `k_max` and `m` must be given together".into())),
        }
    }

    pub fn pairing(&self) -> Pairing {
        if self.gradient_pairing == "sobolev" {
            Pairing::Sobolev {
                alpha: self.sobolev_alpha,
            }
        } else {
            Pairing::L2
        }
    }

    pub fn landweber(&self) -> LandweberConfig {
        LandweberConfig {
            step: self.step_h,
            max_iterations: self.max_iterations,
            lambda_bound: self.lambda_bound,
            margin: self.margin,
            pairing: self.pairing(),
            stop_tolerance: self.stop_tolerance,
            line_search: self.line_search,
            power_iterations: self.power_iterations,
            seed: self.seed,
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tolerance: self.linear_tolerance,
            method: self.solver,
            ..SolverOptions::default()
        }
    }

    pub fn phantom_spec(&self) -> PhantomSpec {
        let inclusions = match self.phantom {
            PhantomChoice::Default => PhantomSpec::default_phantom().inclusions,
            PhantomChoice::None => Vec::new(),
            PhantomChoice::Custom => self.inclusions.clone(),
        };
        PhantomSpec {
            inclusions,
            blur_radius: self.phantom_blur,
            margin: self.margin,
            lambda_bound: self.lambda_bound,
        }
    }

    /// Cross-field checks that single assignments cannot catch.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.format_version != FORMAT_VERSION {
            return bad(format!("unsupported format_version {}", self.format_version));
        }
        if self.n < 3 {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        if self.phantom == PhantomChoice::Custom && self.inclusions.is_empty() {
            return bad("phantom = custom needs at least one `inclusion`".into());
        }
        if self.phantom != PhantomChoice::Custom && !self.inclusions.is_empty() {
            return bad("`inclusion` lines require phantom = custom".into());
        }
        if !(self.noise_level >= 0.0) {
            return bad(format!("noise_level must be non-negative, got {}", self.noise_level));
        }
        if !(self.linear_tolerance > 0.0) {
            return bad("linear_tolerance must be positive".into());
        }
        if self.dot_trials < 1 || self.probe_iterations < 1 {
            return bad("dot_trials and probe_iterations must be at least 1".into());
        }
        if !(self.cross_omega > 0.0) || self.mms_omegas.iter().any(|w| !(*w > 0.0)) {
            return bad("cross_omega and mms_omegas must be positive".into());
        }
        self.frequency_set()?;
        self.landweber().validate()
    }

    /// Canonical `key = value` echo (everything except `output_dir`).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        kv("format_version", self.format_version.to_string());
        kv("n", self.n.to_string());
        kv(
            "phantom",
            match self.phantom {
                PhantomChoice::Default => "default",
                PhantomChoice::None => "none",
                PhantomChoice::Custom => "custom",
            }
            .into(),
        );
        for inc in &self.inclusions {
            let v = match inc.shape {
                Shape::Disk { cx, cy, r } => format!("disk {cx} {cy} {r} {}", inc.contrast),
                Shape::Rect { x0, y0, x1, y1 } => format!("rect {x0} {y0} {x1} {y1} {}", inc.contrast),
            };
            kv("inclusion", v);
        }
        kv("phantom_blur", self.phantom_blur.to_string());
        match self.frequency_set() {
            Ok(f) => kv("frequencies", list_text(f.omegas())),
            Err(_) => kv("frequencies", "invalid".into()),
        }
        kv("phi", format!("{} {}", self.phi.re, self.phi.im));
        kv("noise_level", self.noise_level.to_string());
        kv("noise_seed", self.noise_seed.to_string());
        kv(
            "step_h",
            match self.step_h {
                StepSize::Auto => "auto".into(),
                StepSize::Fixed(h) => h.to_string(),
            },
        );
        kv("max_iterations", self.max_iterations.to_string());
        kv("lambda_bound", self.lambda_bound.to_string());
        kv("margin", self.margin.to_string());
        kv("gradient_pairing", self.gradient_pairing.clone());
        kv("sobolev_alpha", self.sobolev_alpha.to_string());
        kv("stop_tolerance", self.stop_tolerance.to_string());
        kv("line_search", self.line_search.to_string());
        kv("power_iterations", self.power_iterations.to_string());
        kv("seed", self.seed.to_string());
        kv("dot_trials", self.dot_trials.to_string());
        kv("dot_omegas", list_text(&self.dot_omegas));
        kv("probe_iterations", self.probe_iterations.to_string());
        kv("linear_tolerance", self.linear_tolerance.to_string());
        kv(
            "solver",
            match self.solver {
                SolverMethod::Direct => "direct",
                SolverMethod::Iterative => "iterative",
                SolverMethod::Auto => "auto",
            }
            .into(),
        );
        kv("mms_omegas", list_text(&self.mms_omegas));
        kv("taylor_omega", self.taylor_omega.to_string());
        kv("cross_omega", self.cross_omega.to_string());
        kv("cross_amplitude", self.cross_amplitude.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_inclusions() {
        let text = "# experiment\nn = 51\nk_min = 10  # low\nk_max = 20\nm = 3\nphantom = custom\n\
                    inclusion = disk 0.5 0.5 0.1 1.5\ninclusion = rect 0.2 0.2 0.3 0.4 0.8\n\
                    step_h = 0.5\nline_search = off\ngradient_pairing = sobolev\n";
        let cfg = RunConfig::parse(text, Path::new("c.conf")).unwrap();
        assert_eq!(cfg.n, 51);
        assert_eq!(cfg.frequency_set().unwrap().omegas(), &[10.0, 15.0, 20.0]);
        assert_eq!(cfg.inclusions.len(), 2);
        assert_eq!(cfg.step_h, StepSize::Fixed(0.5));
        assert!(!cfg.line_search);
        assert_eq!(cfg.pairing(), Pairing::Sobolev { alpha: 1e-3 });
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        match RunConfig::parse("n = 11\nbogus = 1\n", Path::new("c.conf")) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::parse("n 11\n", Path::new("c")).is_err());
    }

    #[test]
    fn frequency_conflicts() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.frequency_set().unwrap().omegas(), &[3.0]);
        cfg.set("frequencies", "10, 15 20").unwrap();
        assert_eq!(cfg.frequency_set().unwrap().omegas(), &[10.0, 15.0, 20.0]);
        cfg.set("k_min", "1").unwrap();
        assert!(cfg.frequency_set().is_err());
    }

    #[test]
    fn canonical_text_reparses() {
        let mut cfg = RunConfig::default();
        cfg.set("phantom", "custom").unwrap();
        cfg.set("inclusion", "disk 0.4 0.5 0.1 2").unwrap();
        cfg.set("phi", "1 0.5").unwrap();
        cfg.set("frequencies", "3 4").unwrap();
        let back = RunConfig::parse(&cfg.to_text(), Path::new("echo")).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        cfg.set("inclusion", "disk 0.4 0.5 0.1 2").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.set("format_version", "2").unwrap();
        assert!(cfg.validate().is_err());
        assert!(RunConfig::default().set("solver", "magic").is_err());
        assert!(RunConfig::default().set("inclusion", "disk 1 2").is_err());
    }
}
