//! TOML run configuration.
//!
//! ```toml
//! schema_version = 1
//!
//! [model]
//! dim = 2
//! base_radius = 1.0
//! ball_radius = 0.6
//! gas_mass = 1.0
//! ball_mass = 0.27
//! gravity = 1.0
//! energy = 2.0
//! n_particles = 200
//!
//! [run]
//! seed = 7
//! mode = "lambertian"
//! duration = 4000.0
//! ```
//!
//! Every section except `model` is optional; `model` is only needed by
//! `solve`, `sample` and `simulate`.

use crate::CliError;
use gasball::{McmcConfig, ModelParams, ReflectionMode};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub model: Option<ModelSection>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub mcmc: McmcSection,
    #[serde(default)]
    pub validate: ValidateSection,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub dim: usize,
    pub base_radius: f64,
    pub ball_radius: f64,
    pub gas_mass: f64,
    pub ball_mass: f64,
    pub gravity: f64,
    pub energy: f64,
    pub n_particles: usize,
}

/// How `simulate` builds its initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    /// One thinned state from the microcanonical chain.
    #[default]
    Microcanonical,
    /// Ball on the bottom, gas in a thin layer.
    Resting,
    /// Ball at `start_height`, gas in a layer below it.
    High,
    /// Ball at `start_height`, particles on vertical lines outside its column.
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub mode: String,
    pub duration: Option<f64>,
    /// Snapshot interval; defaults to `duration / 10^4`.
    pub observation_dt: Option<f64>,
    /// Start of the averaging window; defaults to `duration / 10`.
    pub t_start: Option<f64>,
    /// States written by `sample`.
    pub samples: usize,
    pub start: Start,
    /// Initial ball height for the `high` and `vertical` starts; defaults
    /// to the floating height.
    pub start_height: Option<f64>,
    pub out_dir: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seed: None,
            mode: "lambertian".into(),
            duration: None,
            observation_dt: None,
            t_start: None,
            samples: 1000,
            start: Start::default(),
            start_height: None,
            out_dir: PathBuf::from("gasball-out"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McmcSection {
    pub burn_in: usize,
    pub thinning: usize,
    pub scale: f64,
    pub adapt_window: usize,
    pub ball_move_prob: f64,
}

impl Default for McmcSection {
    fn default() -> Self {
        let d = McmcConfig::default();
        McmcSection {
            burn_in: d.burn_in,
            thinning: d.thinning,
            scale: d.scale,
            adapt_window: d.adapt_window,
            ball_move_prob: d.ball_move_prob,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSection {
    /// Multiplies every acceptance tolerance.
    pub tolerance_scale: f64,
    /// Criteria to run; empty means all.
    pub criteria: Vec<u32>,
    /// Worker threads; `0` means one per available core.
    pub workers: usize,
}

impl Default for ValidateSection {
    fn default() -> Self {
        ValidateSection { tolerance_scale: 1.0, criteria: Vec::new(), workers: 0 }
    }
}

/// Pass/fail thresholds for the `simulate` report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub ball_height: f64,
    pub gas_ks: f64,
    pub kinetic_energy: f64,
    pub energy_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { ball_height: 0.05, gas_ks: 0.05, kinetic_energy: 0.05, energy_drift: 1e-9 }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub mode: Option<String>,
    pub duration: Option<f64>,
    pub n: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.apply(overrides);
        cfg.check()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.run.seed = Some(s);
        }
        if let Some(d) = &o.out_dir {
            self.run.out_dir = d.clone();
        }
        if let Some(m) = &o.mode {
            self.run.mode = m.clone();
        }
        if let Some(d) = o.duration {
            self.run.duration = Some(d);
        }
        if let (Some(n), Some(m)) = (o.n, self.model.as_mut()) {
            m.n_particles = n;
        }
    }

    /// Checks everything that does not depend on the subcommand.
    fn check(&self) -> Result<(), CliError> {
        self.mode()?;
        if let Some(m) = &self.model {
            m.params().map_err(|e| CliError::Config(e.to_string()))?;
        }
        self.mcmc_config(0).validate().map_err(|e| CliError::Config(e.to_string()))?;
        for (name, v) in [("duration", self.run.duration), ("observation_dt", self.run.observation_dt)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let Some(t) = self.run.t_start {
            if !(t >= 0.0) {
                return Err(CliError::Config(format!("t_start must be non-negative, got {t}")));
            }
        }
        if !(self.validate.tolerance_scale > 0.0) {
            return Err(CliError::Config("tolerance_scale must be positive".into()));
        }
        if let Some(&id) = self.validate.criteria.iter().find(|&&id| !(1..=13).contains(&id)) {
            return Err(CliError::Config(format!("no acceptance criterion {id}")));
        }
        Ok(())
    }

    pub fn mode(&self) -> Result<ReflectionMode, CliError> {
        self.run.mode.parse().map_err(|e: gasball::Error| CliError::Config(e.to_string()))
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        let m = self.model.as_ref().ok_or_else(|| CliError::Config("missing [model] section".into()))?;
        m.params().map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.run.seed.ok_or_else(|| CliError::Config("a seed is required (run.seed or --seed)".into()))
    }

    pub fn duration(&self) -> Result<f64, CliError> {
        self.run.duration.ok_or_else(|| CliError::Config("a duration is required (run.duration or --duration)".into()))
    }

    pub fn mcmc_config(&self, seed: u64) -> McmcConfig {
        McmcConfig {
            burn_in: self.mcmc.burn_in,
            thinning: self.mcmc.thinning,
            scale: self.mcmc.scale,
            adapt_window: self.mcmc.adapt_window,
            ball_move_prob: self.mcmc.ball_move_prob,
            seed,
        }
    }

    /// SHA-256 of the resolved configuration, output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run.out_dir = PathBuf::new();
        let text = toml::to_string(&c).expect("config serialises");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

impl ModelSection {
    pub fn params(&self) -> gasball::Result<ModelParams> {
        ModelParams::new(
            self.dim,
            self.base_radius,
            self.ball_radius,
            self.gas_mass,
            self.ball_mass,
            self.gravity,
            self.energy,
            self.n_particles,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "schema_version = 1\n[model]\ndim = 2\nbase_radius = 1.0\nball_radius = 0.3\ngas_mass = 1.0\nball_mass = 0.05\ngravity = 1.0\nenergy = 3.0\nn_particles = 10\n";

    #[test]
    fn overrides_change_the_hash_but_out_dir_does_not() {
        let base = RunConfig::parse(MINIMAL).unwrap();
        let mut a = base.clone();
        a.apply(&Overrides { out_dir: Some("elsewhere".into()), ..Default::default() });
        assert_eq!(a.hash(), base.hash());
        a.apply(&Overrides { n: Some(20), seed: Some(3), ..Default::default() });
        assert_ne!(a.hash(), base.hash());
        assert_eq!(a.params().unwrap().n_particles, 20);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(RunConfig::parse(&MINIMAL.replace("= 1\n", "= 2\n")).is_err());
        assert!(RunConfig::parse(&format!("{MINIMAL}colour = 3\n")).is_err());
        let mut c = RunConfig::parse(MINIMAL).unwrap();
        c.run.mode = "sticky".into();
        assert!(c.check().is_err());
        let mut c = RunConfig::parse(MINIMAL).unwrap();
        c.validate.criteria = vec![14];
        assert!(c.check().is_err());
        assert!(RunConfig::parse(MINIMAL).unwrap().seed().is_err());
    }
}
