//! Experiment configuration: built-in defaults, an optional flat TOML file,
//! and command-line overrides, applied in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mrviol_core::lg::{uniform_grid, DEFAULT_GRID_POINTS};
use mrviol_core::sim::{GateDurations, NoiseModel, ReadoutConfusion};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    LgScan,
    QndmRun,
    Compare,
}

impl Mode {
    pub fn runs_lg(self) -> bool {
        matches!(self, Mode::LgScan | Mode::Compare)
    }

    pub fn runs_qndm(self) -> bool {
        matches!(self, Mode::QndmRun | Mode::Compare)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::LgScan => "lg-scan",
            Mode::QndmRun => "qndm-run",
            Mode::Compare => "compare",
        })
    }
}

/// A single ωτ value or `start:stop:n`, `n` points on `[start, stop)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OmegaTau {
    Single(f64),
    Grid { start: f64, stop: f64, n: usize },
}

impl OmegaTau {
    pub const DEFAULT_SINGLE: f64 = 1.5;

    pub fn default_grid() -> Self {
        OmegaTau::Grid {
            start: 0.0,
            stop: std::f64::consts::TAU,
            n: DEFAULT_GRID_POINTS,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            OmegaTau::Single(v) => vec![v],
            OmegaTau::Grid { start, stop, n } if start == 0.0 && stop == std::f64::consts::TAU => uniform_grid(n),
            OmegaTau::Grid { start, stop, n } => (0..n).map(|k| start + (stop - start) * k as f64 / n as f64).collect(),
        }
    }
}

impl FromStr for OmegaTau {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| HarnessError::Config(format!("omega_tau {s:?}: {why}"));
        let num = |t: &str| -> Result<f64> {
            let v: f64 = t.trim().parse().map_err(|_| bad("not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad("must be finite"))
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(OmegaTau::Single(num(v)?)),
            [a, b, n] => {
                let (start, stop) = (num(a)?, num(b)?);
                let n: usize = n.trim().parse().map_err(|_| bad("point count must be an integer"))?;
                if n == 0 {
                    return Err(bad("point count must be at least 1"));
                }
                if !(stop > start) {
                    return Err(bad("stop must exceed start"));
                }
                Ok(OmegaTau::Grid { start, stop, n })
            }
            _ => Err(bad("expected a value or start:stop:n")),
        }
    }
}

impl fmt::Display for OmegaTau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaTau::Single(v) => write!(f, "{v}"),
            OmegaTau::Grid { start, stop, n } => write!(f, "{start}:{stop}:{n}"),
        }
    }
}

impl Serialize for OmegaTau {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NoiseSpec {
    None,
    NisqDefault,
    File(PathBuf),
}

impl FromStr for NoiseSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => NoiseSpec::None,
            "nisq-default" => NoiseSpec::NisqDefault,
            "" => return Err(HarnessError::Config("empty noise specification".into())),
            path => NoiseSpec::File(PathBuf::from(path)),
        })
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::None => f.write_str("none"),
            NoiseSpec::NisqDefault => f.write_str("nisq-default"),
            NoiseSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl Serialize for NoiseSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Noise parameter file; keys left out take their nisq-default values.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseFile {
    p1: Option<f64>,
    p2: Option<f64>,
    t1: Option<f64>,
    t2: Option<f64>,
    single_qubit_gate_time: Option<f64>,
    two_qubit_gate_time: Option<f64>,
    /// symmetric flip probability applied to every qubit
    readout_error: Option<f64>,
}

impl NoiseSpec {
    pub fn resolve(&self) -> Result<Option<NoiseModel>> {
        let model = match self {
            NoiseSpec::None => return Ok(None),
            NoiseSpec::NisqDefault => NoiseModel::nisq_default(),
            NoiseSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| HarnessError::Config(format!("noise file {}: {e}", path.display())))?;
                let f: NoiseFile = toml::from_str(&text)
                    .map_err(|e| HarnessError::Config(format!("noise file {}: {e}", path.display())))?;
                let d = NoiseModel::nisq_default();
                NoiseModel {
                    p1: f.p1.unwrap_or(d.p1),
                    p2: f.p2.unwrap_or(d.p2),
                    t1: f.t1.unwrap_or(d.t1),
                    t2: f.t2.unwrap_or(d.t2),
                    durations: GateDurations {
                        single: f.single_qubit_gate_time.unwrap_or(d.durations.single),
                        two: f.two_qubit_gate_time.unwrap_or(d.durations.two),
                    },
                    readout: match f.readout_error {
                        Some(e) => vec![ReadoutConfusion::symmetric(e); d.readout.len()],
                        None => d.readout,
                    },
                }
            }
        };
        model.validate()?;
        Ok(Some(model))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub omega_tau: OmegaTau,
    pub shots: u64,
    pub n_reps: usize,
    pub delta_lambda: f64,
    pub lambda_max: f64,
    pub n_sigma_lg: f64,
    pub n_sigma_qpd: f64,
    pub noise: NoiseSpec,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn defaults(mode: Mode) -> Self {
        Self {
            mode,
            omega_tau: match mode {
                Mode::QndmRun => OmegaTau::Single(OmegaTau::DEFAULT_SINGLE),
                _ => OmegaTau::default_grid(),
            },
            shots: 1000,
            n_reps: 100,
            delta_lambda: 0.1,
            lambda_max: 100.0,
            n_sigma_lg: 1.0,
            n_sigma_qpd: 3.0,
            noise: NoiseSpec::None,
            seed: 0,
            out_dir: PathBuf::from("out"),
        }
    }

    /// Grid scanned by the Leggett-Garg part.
    pub fn lg_grid(&self) -> Vec<f64> {
        self.omega_tau.values()
    }

    /// ωτ of the detector run. In compare mode a grid leaves it at the default.
    pub fn qndm_omega_tau(&self) -> Result<f64> {
        match (self.omega_tau, self.mode) {
            (OmegaTau::Single(v), _) => Ok(v),
            (OmegaTau::Grid { .. }, Mode::Compare) => Ok(OmegaTau::DEFAULT_SINGLE),
            (OmegaTau::Grid { .. }, _) => Err(HarnessError::Config(
                "qndm-run needs a single omega_tau value, not a grid".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(HarnessError::Config(m));
        if self.shots == 0 {
            return err("shots must be at least 1".into());
        }
        if self.mode.runs_lg() && self.n_reps < 2 {
            return err(format!("n_reps = {} must be at least 2", self.n_reps));
        }
        if self.mode.runs_qndm() {
            if !(self.lambda_max > 0.0) || !self.lambda_max.is_finite() {
                return err(format!("lambda_max = {} must be positive", self.lambda_max));
            }
            if !(self.delta_lambda > 0.0) || self.delta_lambda > self.lambda_max {
                return err(format!("delta_lambda = {} must lie in (0, lambda_max]", self.delta_lambda));
            }
            if !(self.n_sigma_qpd > 0.0) || !self.n_sigma_qpd.is_finite() {
                return err(format!("n_sigma_qpd = {} must be positive", self.n_sigma_qpd));
            }
            self.qndm_omega_tau()?;
        }
        if self.mode.runs_lg() && (!(self.n_sigma_lg >= 0.0) || !self.n_sigma_lg.is_finite()) {
            return err(format!("n_sigma_lg = {} must be non-negative", self.n_sigma_lg));
        }
        if self.out_dir.as_os_str().is_empty() {
            return err("out_dir must not be empty".into());
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NumberOrText {
    Int(i64),
    Float(f64),
    Text(String),
}

/// Flat key-value configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    omega_tau: Option<NumberOrText>,
    shots: Option<u64>,
    n_reps: Option<usize>,
    delta_lambda: Option<f64>,
    lambda_max: Option<f64>,
    n_sigma_lg: Option<f64>,
    n_sigma_qpd: Option<f64>,
    noise: Option<String>,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Command-line values; `None` leaves the file or default value in place.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub omega_tau: Option<String>,
    pub shots: Option<u64>,
    pub n_reps: Option<usize>,
    pub delta_lambda: Option<f64>,
    pub lambda_max: Option<f64>,
    pub n_sigma_lg: Option<f64>,
    pub n_sigma_qpd: Option<f64>,
    pub noise: Option<String>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Defaults for `mode`, then `file`, then `cli`.
pub fn resolve(mode: Mode, file: Option<FileConfig>, cli: Overrides) -> Result<ExperimentConfig> {
    let file = file.unwrap_or_default();
    let mut c = ExperimentConfig::defaults(mode);

    if let Some(v) = file.omega_tau {
        c.omega_tau = match v {
            NumberOrText::Int(i) => OmegaTau::Single(i as f64),
            NumberOrText::Float(x) => OmegaTau::Single(x),
            NumberOrText::Text(t) => t.parse()?,
        };
    }
    macro_rules! layer {
        ($src:expr, $($field:ident => $dst:ident),*) => {
            $(if let Some(v) = $src.$field { c.$dst = v; })*
        };
    }
    layer!(file, shots => shots, n_reps => n_reps, delta_lambda => delta_lambda, lambda_max => lambda_max,
        n_sigma_lg => n_sigma_lg, n_sigma_qpd => n_sigma_qpd, seed => seed, out_dir => out_dir);
    if let Some(n) = file.noise {
        c.noise = n.parse()?;
    }

    if let Some(v) = cli.omega_tau {
        c.omega_tau = v.parse()?;
    }
    layer!(cli, shots => shots, n_reps => n_reps, delta_lambda => delta_lambda, lambda_max => lambda_max,
        n_sigma_lg => n_sigma_lg, n_sigma_qpd => n_sigma_qpd, seed => seed, out_dir => out_dir);
    if let Some(n) = cli.noise {
        c.noise = n.parse()?;
    }
    c.validate()?;
    Ok(c)
}
