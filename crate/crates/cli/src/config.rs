//! Run configuration: command-line flags over a flat `key = value` file over defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use halfspace_casimir::{CouplingMode, QuadratureSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Constant,
    Sqrt,
}

impl From<ModeArg> for CouplingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Constant => CouplingMode::Constant,
            ModeArg::Sqrt => CouplingMode::SqrtMomentum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Coupling, or its amplitude lambda0 in sqrt mode.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GammaGridArgs {
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub gamma_points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct LGridArgs {
    #[arg(long)]
    pub l_min: Option<f64>,
    #[arg(long)]
    pub l_max: Option<f64>,
    #[arg(long)]
    pub l_points: Option<usize>,
}

/// Keys read from a config file.
#[derive(Debug, Default)]
pub struct FileConfig(BTreeMap<String, String>);

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "lambda",
    "mass",
    "magnitude",
    "mu",
    "rel-tol",
    "abs-tol",
    "format",
    "out",
    "gamma-min",
    "gamma-max",
    "gamma-points",
    "l-min",
    "l-max",
    "l-points",
    "mc-samples",
    "seed",
];

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", i + 1)));
            }
            map.insert(key, v.trim().to_owned());
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.0
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Config(format!("config value `{v}` is not valid for `{key}`")))
            })
            .transpose()
    }

    fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.0
            .get(key)
            .map(|v| T::from_str(v, true).map_err(|_| CliError::Config(format!("config value `{v}` is not valid for `{key}`"))))
            .transpose()
    }

    fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.0
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse()
                            .map_err(|_| CliError::Config(format!("config value `{s}` is not valid for `{key}`")))
                    })
                    .collect()
            })
            .transpose()
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Log-spaced grid `min .. max` with `points` entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl LogGrid {
    fn validated(self, name: &str) -> Result<Self, CliError> {
        let ok = self.min.is_finite() && self.max.is_finite() && self.min > 0.0 && self.points >= 1;
        if !ok {
            return Err(CliError::Config(format!("{name} grid needs finite positive bounds and at least one point")));
        }
        let increasing = if self.points == 1 { self.min <= self.max } else { self.min < self.max };
        if !increasing {
            return Err(CliError::Config(format!("{name} grid needs min < max")));
        }
        Ok(self)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let (a, b) = (self.min.log10(), self.max.log10());
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| match i {
                0 => self.min,
                i if i == self.points - 1 => self.max,
                i => 10f64.powf(a + (b - a) * i as f64 / n),
            })
            .collect()
    }
}

impl fmt::Display for LogGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} .. {} ({} log-spaced points)", self.min, self.max, self.points)
    }
}

#[derive(Debug, Clone)]
pub struct Common {
    pub mode: CouplingMode,
    pub lambda: f64,
    pub spec: QuadratureSpec<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Common {
    fn resolve(args: &CommonArgs, file: &FileConfig, default_mode: ModeArg) -> Result<Self, CliError> {
        let defaults = QuadratureSpec::<f64>::default();
        let mode = pick(args.mode, file.get_enum("mode")?, default_mode);
        let lambda = pick(args.lambda, file.get("lambda")?, 1.0);
        if !lambda.is_finite() {
            return Err(CliError::Config(format!("lambda must be finite, got {lambda}")));
        }
        let rel = pick(args.rel_tol, file.get("rel-tol")?, defaults.rel_tol);
        let abs = pick(args.abs_tol, file.get("abs-tol")?, defaults.abs_tol);
        let spec = QuadratureSpec::new(rel, abs, defaults.max_subdivisions).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self {
            mode: mode.into(),
            lambda,
            spec,
            format: pick(args.format, file.get_enum("format")?, Format::Csv),
            out: args.out.clone().or(file.get::<PathBuf>("out")?),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ReflectionConfig {
    pub common: Common,
    pub mass: f64,
    pub gamma: LogGrid,
    /// Emit `|N|` and its components instead of signed values.
    pub magnitude: bool,
}

pub const DEFAULT_GAMMA: LogGrid = LogGrid { min: 1e-2, max: 1e2, points: 81 };
pub const DEFAULT_L: LogGrid = LogGrid { min: 0.1, max: 100.0, points: 31 };
pub const DEFAULT_MU: [f64; 4] = [0.001, 0.01, 0.5, 1.0];

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ReflectionConfig {
    pub fn resolve(
        common: &CommonArgs,
        mass: Option<f64>,
        magnitude: bool,
        grid: &GammaGridArgs,
    ) -> Result<Self, CliError> {
        let file = FileConfig::load(common.config.as_deref())?;
        let gamma = LogGrid {
            min: pick(grid.gamma_min, file.get("gamma-min")?, DEFAULT_GAMMA.min),
            max: pick(grid.gamma_max, file.get("gamma-max")?, DEFAULT_GAMMA.max),
            points: pick(grid.gamma_points, file.get("gamma-points")?, DEFAULT_GAMMA.points),
        }
        .validated("gamma")?;
        Ok(Self {
            common: Common::resolve(common, &file, ModeArg::Constant)?,
            mass: positive("mass", pick(mass, file.get("mass")?, 1.0))?,
            gamma,
            magnitude: pick(magnitude.then_some(true), file.get("magnitude")?, false),
        })
    }
}

#[derive(Debug, Clone)]
pub struct EnergyConfig {
    pub common: Common,
    pub mus: Vec<f64>,
    pub l: LogGrid,
}

impl EnergyConfig {
    pub fn resolve(common: &CommonArgs, mu: Option<Vec<f64>>, grid: &LGridArgs) -> Result<Self, CliError> {
        let file = FileConfig::load(common.config.as_deref())?;
        let l = LogGrid {
            min: pick(grid.l_min, file.get("l-min")?, DEFAULT_L.min),
            max: pick(grid.l_max, file.get("l-max")?, DEFAULT_L.max),
            points: pick(grid.l_points, file.get("l-points")?, DEFAULT_L.points),
        }
        .validated("L")?;
        let mus = pick(mu, file.get_list("mu")?, DEFAULT_MU.to_vec());
        if mus.is_empty() {
            return Err(CliError::Config("at least one mu is required".into()));
        }
        for &m in &mus {
            positive("mu", m)?;
        }
        Ok(Self {
            common: Common::resolve(common, &file, ModeArg::Sqrt)?,
            mus,
            l,
        })
    }
}

#[derive(Debug, Clone)]
pub struct VerifyRunConfig {
    pub common: Common,
    pub mc_samples: usize,
    pub seed: u64,
}

impl VerifyRunConfig {
    pub fn resolve(common: &CommonArgs, mc_samples: Option<usize>, seed: Option<u64>) -> Result<Self, CliError> {
        let file = FileConfig::load(common.config.as_deref())?;
        let defaults = halfspace_casimir::verify::VerifyConfig::default();
        let mc_samples = pick(mc_samples, file.get("mc-samples")?, defaults.mc_samples);
        if mc_samples < 2 {
            return Err(CliError::Config("mc-samples must be at least 2".into()));
        }
        Ok(Self {
            common: Common::resolve(common, &file, ModeArg::Constant)?,
            mc_samples,
            seed: pick(seed, file.get("seed")?, defaults.seed),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_gamma_grid_has_exact_ends() {
        let v = DEFAULT_GAMMA.values();
        assert_eq!(v.len(), 81);
        assert_eq!(v[0], 1e-2);
        assert_eq!(v[80], 1e2);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(v[40], 1.0);
        assert_eq!(DEFAULT_L.values()[20], 10.0);
    }

    #[test]
    fn file_parsing() {
        let f = FileConfig::parse("# comment\nmode = sqrt\nrel_tol = 1e-6\nmu = 0.1, 0.2\n").unwrap();
        assert_eq!(f.get_enum::<ModeArg>("mode").unwrap(), Some(ModeArg::Sqrt));
        assert_eq!(f.get::<f64>("rel-tol").unwrap(), Some(1e-6));
        assert_eq!(f.get_list("mu").unwrap(), Some(vec![0.1, 0.2]));
        assert!(FileConfig::parse("colour = red").is_err());
        assert!(FileConfig::parse("just words").is_err());
        assert!(FileConfig::parse("lambda = x").unwrap().get::<f64>("lambda").is_err());
    }

    #[test]
    fn grid_validation() {
        let bad = LogGrid { min: 2.0, max: 1.0, points: 5 };
        assert!(bad.validated("x").is_err());
        let zero = LogGrid { min: 0.0, max: 1.0, points: 5 };
        assert!(zero.validated("x").is_err());
        let single = LogGrid { min: 3.0, max: 3.0, points: 1 };
        assert_eq!(single.validated("x").unwrap().values(), vec![3.0]);
    }
}
