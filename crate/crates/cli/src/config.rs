//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! potential.kind   = sech2
//! potential.params = 2, 1
//! grid.x_min = -30
//! grid.x_max = 30
//! grid.n     = 1500
//! xi.max = 16
//! xi.n   = 512
//! multiplier.kind   = tent
//! multiplier.center = 2
//! multiplier.radius = 1
//! function.kind   = gaussian
//! function.params = 0.3, 1
//! ```
//!
//! `potential.kind = sampled` takes `potential.params = x_min, x_max, v_0, ...`.
//! `multiplier.kind = sampled` takes `multiplier.lambdas` and `multiplier.values`.
//! `function.kind = sampled` reads `function.file`, a CSV with header
//! `x,re_f,im_f` and one row per grid node (relative paths resolve against the
//! config file's directory).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use distorted_fourier::{GridSpec, Multiplier, Potential};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("key `{key}`: {msg}")]
    Value { key: String, msg: String },
}

type Result<T> = std::result::Result<T, ConfigError>;

const KNOWN_KEYS: &[&str] = &[
    "potential.kind",
    "potential.params",
    "grid.x_min",
    "grid.x_max",
    "grid.n",
    "xi.max",
    "xi.n",
    "multiplier.kind",
    "multiplier.center",
    "multiplier.radius",
    "multiplier.lambdas",
    "multiplier.values",
    "function.kind",
    "function.params",
    "function.file",
];

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Gaussian { center: f64, width: f64 },
    Bump { center: f64, radius: f64 },
    Sampled { file: PathBuf },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub potential: Potential,
    pub grid: GridSpec,
    pub xi_max: f64,
    pub n_xi: usize,
    pub multiplier: Multiplier,
    pub function: FunctionSpec,
}

fn value_err(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        msg: msg.into(),
    }
}

struct Entries {
    map: BTreeMap<String, String>,
}

impl Entries {
    fn get(&self, key: &'static str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn require(&self, key: &'static str) -> Result<&str> {
        self.get(key).ok_or(ConfigError::Missing(key))
    }

    fn real(&self, key: &'static str) -> Result<Option<f64>> {
        self.get(key).map(|s| parse_real(key, s)).transpose()
    }

    fn list(&self, key: &'static str) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(s) if s.trim().is_empty() => Ok(Vec::new()),
            Some(s) => s.split(',').map(|t| parse_real(key, t)).collect(),
        }
    }
}

fn parse_real(key: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| value_err(key, format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(value_err(key, "must be finite"));
    }
    Ok(v)
}

fn parse_count(key: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| value_err(key, format!("`{}` is not a positive integer", s.trim())))
}

fn tokenize(text: &str) -> Result<Entries> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: k + 1,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::Syntax {
                line: k + 1,
                msg: format!("unknown key `{key}`"),
            });
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(ConfigError::Syntax {
                line: k + 1,
                msg: format!("duplicate key `{key}`"),
            });
        }
    }
    Ok(Entries { map })
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses config text; `base` resolves relative file paths.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let e = tokenize(text)?;

        let kind = e.require("potential.kind")?;
        let potential = Potential::preset(kind, &e.list("potential.params")?)
            .map_err(|err| value_err("potential", err.to_string()))?;

        let x_min = e.real("grid.x_min")?.ok_or(ConfigError::Missing("grid.x_min"))?;
        let x_max = e.real("grid.x_max")?.ok_or(ConfigError::Missing("grid.x_max"))?;
        let n = parse_count("grid.n", e.require("grid.n")?)?;
        let grid = GridSpec::new(x_min, x_max, n).map_err(|err| value_err("grid", err.to_string()))?;

        let xi_max = e.real("xi.max")?.unwrap_or(8.0);
        if xi_max <= 0.0 {
            return Err(value_err("xi.max", "must be positive"));
        }
        let n_xi = match e.get("xi.n") {
            Some(s) => parse_count("xi.n", s)?,
            None => 256,
        };
        if n_xi < 2 || n_xi % 2 != 0 {
            return Err(value_err("xi.n", "must be even and at least 2"));
        }

        let multiplier = match e.get("multiplier.kind").unwrap_or("tent") {
            "sampled" => Multiplier::sampled(&e.list("multiplier.lambdas")?, &e.list("multiplier.values")?),
            kind => Multiplier::preset(
                kind,
                e.real("multiplier.center")?.unwrap_or(2.0),
                e.real("multiplier.radius")?.unwrap_or(1.0),
            ),
        }
        .map_err(|err| value_err("multiplier", err.to_string()))?;

        let params = e.list("function.params")?;
        let pair = |key: &'static str, default: (f64, f64)| -> Result<(f64, f64)> {
            match params.as_slice() {
                [] => Ok(default),
                [a, b] if *b > 0.0 => Ok((*a, *b)),
                _ => Err(value_err(key, "expects `center, scale` with scale > 0")),
            }
        };
        let function = match e.get("function.kind").unwrap_or("gaussian") {
            "gaussian" => {
                let (center, width) = pair("function.params", (0.0, 1.0))?;
                FunctionSpec::Gaussian { center, width }
            }
            "bump" => {
                let (center, radius) = pair("function.params", (0.0, 2.0))?;
                FunctionSpec::Bump { center, radius }
            }
            "sampled" => FunctionSpec::Sampled {
                file: base.join(e.require("function.file")?),
            },
            other => return Err(value_err("function.kind", format!("unknown kind `{other}`"))),
        };

        Ok(Self {
            potential,
            grid,
            xi_max,
            n_xi,
            multiplier,
            function,
        })
    }

    /// Samples the configured input function on the grid.
    pub fn sample_function(&self) -> Result<Vec<Complex64>> {
        let xs = self.grid.nodes();
        match &self.function {
            FunctionSpec::Gaussian { center, width } => Ok(xs
                .iter()
                .map(|x| Complex64::new((-(x - center).powi(2) / (2.0 * width * width)).exp(), 0.0))
                .collect()),
            FunctionSpec::Bump { center, radius } => Ok(xs
                .iter()
                .map(|x| {
                    let t = (x - center) / radius;
                    let v = if t.abs() < 1.0 { (1.0 - 1.0 / (1.0 - t * t)).exp() } else { 0.0 };
                    Complex64::new(v, 0.0)
                })
                .collect()),
            FunctionSpec::Sampled { file } => read_function(file, self.grid.len()),
        }
    }
}

fn read_function(path: &Path, n: usize) -> Result<Vec<Complex64>> {
    let key = "function.file";
    let mut reader = csv::Reader::from_path(path).map_err(|err| value_err(key, err.to_string()))?;
    let mut out = Vec::with_capacity(n);
    for row in reader.records() {
        let row = row.map_err(|err| value_err(key, err.to_string()))?;
        if row.len() != 3 {
            return Err(value_err(key, "rows must be `x,re_f,im_f`"));
        }
        out.push(Complex64::new(parse_real(key, &row[1])?, parse_real(key, &row[2])?));
    }
    if out.len() != n {
        return Err(value_err(key, format!("{} rows for a {n}-point grid", out.len())));
    }
    Ok(out)
}
