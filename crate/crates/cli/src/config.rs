use std::path::Path;

use jjbath::chain::ChainSpec;
use jjbath::gksl::{OscillatorParams, DEFAULT_THRESHOLD};
use jjbath::junction::{JunctionParams, DEFAULT_N_MAX};
use jjbath::scenarios::{DisorderChainParams, FabricationConstants, LorentzianChainParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_TIME_POINTS: usize = 2001;
pub const DEFAULT_FREQ_POINTS: usize = 401;

/// Bath or junction a command runs on.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Junction(JunctionParams),
    Lorentzian(LorentzianChainParams),
    Disorder(DisorderChainParams),
    Chain { spec: ChainSpec },
}

impl Scenario {
    pub fn named(name: &str, seed: u64) -> Option<Self> {
        Some(match name {
            "junction" => Scenario::Junction(JunctionParams::new(1.0, 0.01).ok()?),
            "lorentzian" => Scenario::Lorentzian(LorentzianChainParams::narrow()),
            "lorentzian-broad" => Scenario::Lorentzian(LorentzianChainParams::broad()),
            "disorder" => Scenario::Disorder(DisorderChainParams {
                fab: FabricationConstants::sweep(0.1),
                n_j: 10_000,
                seed,
            }),
            _ => return None,
        })
    }

    /// A preset name, or a path to a JSON scenario document.
    pub fn resolve(arg: &str, seed: u64) -> Result<Self, CliError> {
        if let Some(s) = Self::named(arg, seed) {
            return Ok(s);
        }
        let path = Path::new(arg);
        if !path.exists() {
            return Err(CliError::Validation(format!(
                "scenario: `{arg}` is neither a preset (junction, lorentzian, lorentzian-broad, disorder) nor a file"
            )));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("scenario: {e}")))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("scenario: {e}")))
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub n_t: Option<usize>,
    pub n_e: Option<usize>,
}

/// Contents of `--config`. Every field is optional; flags win over the file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub scenario: Option<Scenario>,
    pub output_path: Option<String>,
    pub grid: Option<GridSpec>,
    pub seed: Option<u64>,
    pub oscillator: Option<OscillatorParams>,
    pub beta: Option<f64>,
    pub n_max: Option<usize>,
    pub threshold: Option<f64>,
    pub n_fock: Option<usize>,
    pub n0: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }
}

/// Fully resolved settings for one run; echoed into every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub command: String,
    pub scenario: Scenario,
    pub grid: GridSpec,
    pub seed: u64,
    pub oscillator: OscillatorParams,
    /// `None` is zero temperature.
    pub beta: Option<f64>,
    pub n_max: usize,
    pub threshold: f64,
    pub n_fock: usize,
    pub n0: usize,
}

impl Settings {
    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(f64::INFINITY)
    }

    pub fn n_t(&self) -> usize {
        self.grid.n_t.unwrap_or(DEFAULT_TIME_POINTS)
    }

    pub fn n_e(&self) -> usize {
        self.grid.n_e.unwrap_or(DEFAULT_FREQ_POINTS)
    }

    /// Time grid over `[t_min, t_max]`, `t_max` defaulting to `default_end`.
    pub fn times(&self, default_end: f64) -> Result<Vec<f64>, CliError> {
        let a = self.grid.t_min.unwrap_or(0.0);
        let b = self.grid.t_max.unwrap_or(default_end);
        let n = self.n_t();
        if !(b > a) || !a.is_finite() || !b.is_finite() || n < 2 {
            return Err(CliError::Validation(format!(
                "grid: need t_min < t_max and n_t >= 2 (got [{a}, {b}], n_t = {n})"
            )));
        }
        Ok(jjbath::series::linspace(a, b, n))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.oscillator.validate()?;
        if let Some(b) = self.beta {
            if !(b > 0.0) {
                return Err(CliError::Validation(format!("beta: must be positive, got {b}")));
            }
        }
        if !(self.threshold > 0.0) {
            return Err(CliError::Validation("threshold: must be positive".into()));
        }
        if self.grid.n_e.is_some_and(|n| n < 2) {
            return Err(CliError::Validation("grid.n_e: must be at least 2".into()));
        }
        if self.n0 > self.n_fock {
            return Err(CliError::Validation(format!("n0: {} exceeds n_fock = {}", self.n0, self.n_fock)));
        }
        Ok(())
    }
}

pub struct Overrides<'a> {
    pub command: &'a str,
    pub default_scenario: &'a str,
    pub scenario: Option<&'a str>,
    pub seed: Option<u64>,
    pub omega0: Option<f64>,
    pub beta: Option<f64>,
}

pub fn resolve(cfg: RunConfig, o: Overrides) -> Result<Settings, CliError> {
    if let Some(c) = &cfg.command {
        if c != o.command {
            return Err(CliError::Validation(format!(
                "command: config says `{c}` but `{}` was invoked",
                o.command
            )));
        }
    }
    let seed = o.seed.or(cfg.seed).unwrap_or(0);
    let mut scenario = match (o.scenario, cfg.scenario) {
        (Some(arg), _) => Scenario::resolve(arg, seed)?,
        (None, Some(s)) => s,
        (None, None) => Scenario::resolve(o.default_scenario, seed)?,
    };
    if let (Scenario::Disorder(p), Some(s)) = (&mut scenario, o.seed) {
        p.seed = s;
    }
    let mut oscillator = cfg.oscillator.unwrap_or(OscillatorParams {
        omega0: 1.0,
        e_q: 100.0,
        eps_i: 0.01,
    });
    if let Some(w) = o.omega0 {
        oscillator.omega0 = w;
    }
    let s = Settings {
        command: o.command.to_string(),
        scenario,
        grid: cfg.grid.unwrap_or_default(),
        seed,
        oscillator,
        beta: o.beta.or(cfg.beta),
        n_max: cfg.n_max.unwrap_or(DEFAULT_N_MAX),
        threshold: cfg.threshold.unwrap_or(DEFAULT_THRESHOLD),
        n_fock: cfg.n_fock.unwrap_or(10),
        n0: cfg.n0.unwrap_or(3),
    };
    s.validate()?;
    Ok(s)
}
