use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::gates::EulerAngles;
use crate::hilbert::C64;
use crate::protocol::{BellClass, BellInput, GeneralInput, ProtocolError, Sign};
use crate::zeno::{Absorber, CctInput, CycleConfig, ModelRegistry, Polarization, ZenoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    General,
    Bell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Cct,
    Qz,
    Cqz,
}

/// Everything a command needs; echoed verbatim into every report.
///
/// Amplitudes are `[re, im]` pairs and angles are in radians. General mode
/// reads `alpha..delta`; Bell mode reads `class`, `sign`, `c0`, `c1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
    pub class: BellClass,
    pub sign: Sign,
    pub c0: C64,
    pub c1: C64,
    pub angles: EulerAngles,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "K")]
    pub k: u32,
    pub trials: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub experiment: Experiment,
    pub model: String,
    pub absorber: Absorber,
    pub polarization: Polarization,
}

impl Default for RunConfig {
    fn default() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            mode: Mode::General,
            alpha: h,
            beta: h,
            gamma: h,
            delta: h,
            class: BellClass::One,
            sign: Sign::Plus,
            c0: h,
            c1: h,
            angles: EulerAngles::default(),
            m: 25,
            n: 25,
            k: 25,
            trials: 100_000,
            seed: 0,
            output: None,
            format: Format::Json,
            experiment: Experiment::Cct,
            model: "per-cycle-born".into(),
            absorber: Absorber::balanced(),
            polarization: Polarization::H,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigError {}

impl From<ProtocolError> for ConfigError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::InvalidInput { field, reason } => ConfigError::new(field, reason),
            other => ConfigError::new("input", other.to_string()),
        }
    }
}

impl From<ZenoError> for ConfigError {
    fn from(e: ZenoError) -> Self {
        let field = match &e {
            ZenoError::ZeroCycles { name } => (*name).to_string(),
            ZenoError::ProbabilityOutOfRange { name, .. } => (*name).to_string(),
            ZenoError::UnnormalizedAbsorber(_) => "absorber".into(),
            ZenoError::NoTrials => "trials".into(),
            ZenoError::UnknownModel(_) => "model".into(),
        };
        ConfigError::new(field, e.to_string())
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        // serde's message carries the line and column
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::new("document", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Revalidates every input the configured mode and experiment will use.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.cycles()?;
        match self.mode {
            Mode::General => self.general().validate()?,
            Mode::Bell => self.bell().validate()?,
        }
        Absorber::new(self.absorber.presence, self.absorber.absence)?;
        ModelRegistry::default().get(&self.model)?;
        Ok(())
    }

    pub fn cycles(&self) -> Result<CycleConfig, ConfigError> {
        Ok(CycleConfig::new(self.m, self.n, self.k)?)
    }

    pub fn general(&self) -> GeneralInput {
        GeneralInput {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            angles: self.angles,
        }
    }

    pub fn bell(&self) -> BellInput {
        BellInput {
            class: self.class,
            sign: self.sign,
            c0: self.c0,
            c1: self.c1,
            angles: self.angles,
        }
    }

    pub fn input(&self) -> CctInput {
        match self.mode {
            Mode::General => CctInput::General(self.general()),
            Mode::Bell => CctInput::Bell(self.bell()),
        }
    }
}
