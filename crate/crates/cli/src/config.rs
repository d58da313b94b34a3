//! Run configuration files.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wavedesal_core::econ::SwroOptions;
use wavedesal_core::hydro::IrfMethod;
use wavedesal_core::optimizer::GaConfig;
use wavedesal_core::pipeline::{EvaluationContext, HydroSource};
use wavedesal_core::seastates::{reference_centers, ClusterSet, SeaStateCenter};
use wavedesal_core::waves::SpectrumMode;
use wavedesal_core::{DesignVector, ParameterSet, SeaState};

pub const RUN_SCHEMA: &str = "wavedesal.run/1";

/// Problems with the user's inputs, reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeaStateSpec {
    pub hs: f64,
    pub tp: f64,
}

/// Genetic-algorithm budget; unset fields follow the desk defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaSpec {
    pub population_size: usize,
    pub max_generations: usize,
    #[serde(default)]
    pub immigrant_count: Option<usize>,
    #[serde(default)]
    pub immigration_interval: Option<usize>,
    #[serde(default)]
    pub mutation_rate: Option<f64>,
    #[serde(default)]
    pub crossover_rate: Option<f64>,
}

impl Default for GaSpec {
    fn default() -> Self {
        GaSpec {
            population_size: 48,
            max_generations: 120,
            immigrant_count: None,
            immigration_interval: None,
            mutation_rate: None,
            crossover_rate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    /// Seeds the wave phases and the optimizer; required.
    pub seed: u64,
    /// Parameter file, or `default` for the built-in set.
    #[serde(default = "default_parameters")]
    pub parameters: String,
    /// Defaults to the sea state of the parameter set.
    #[serde(default)]
    pub sea_state: Option<SeaStateSpec>,
    /// Sea-state set file for sensitivity runs, or `reference` for the bundled set.
    #[serde(default)]
    pub sea_states: Option<String>,
    /// Design to evaluate; defaults to the literature nominal.
    #[serde(default)]
    pub design: Option<DesignVector>,
    #[serde(default)]
    pub ga: GaSpec,
    #[serde(default = "default_output")]
    pub output_dir: String,
    #[serde(default)]
    pub spectrum: SpectrumMode,
    #[serde(default = "default_hydro")]
    pub hydro: HydroSource,
    #[serde(default)]
    pub irf: IrfMethod,
    #[serde(default)]
    pub swro: SwroOptions,
}

fn default_parameters() -> String {
    "default".into()
}

fn default_output() -> String {
    "out".into()
}

fn default_hydro() -> HydroSource {
    HydroSource::Surrogate
}

/// A loaded configuration with its inputs resolved.
pub struct Run {
    pub config: RunConfig,
    pub base_dir: PathBuf,
    pub params: ParameterSet,
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| config_error(format!("run config: {e}")))?;
        if cfg.schema != RUN_SCHEMA {
            return Err(config_error(format!("run config schema `{}`, expected `{RUN_SCHEMA}`", cfg.schema)));
        }
        Ok(cfg)
    }
}

impl Run {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        let config = RunConfig::parse(&text)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let params = if config.parameters == "default" {
            ParameterSet::default()
        } else {
            let p = base_dir.join(&config.parameters);
            let text = std::fs::read_to_string(&p)
                .map_err(|e| config_error(format!("cannot read parameters {}: {e}", p.display())))?;
            ParameterSet::from_json(&text).map_err(|e| config_error(format!("{}: {e}", p.display())))?
        };
        if let HydroSource::Directory { dir } = &config.hydro {
            let dir = base_dir.join(dir);
            if !dir.is_dir() {
                return Err(config_error(format!("coefficient directory {} does not exist", dir.display())));
            }
        }
        let run = Run { config, base_dir, params };
        run.ga_config()?;
        run.design()?;
        run.sea_state()?;
        Ok(run)
    }

    pub fn resolve(&self, p: &str) -> PathBuf {
        self.base_dir.join(p)
    }

    pub fn output_dir(&self, overridden: Option<&Path>) -> PathBuf {
        overridden.map_or_else(|| self.resolve(&self.config.output_dir), Path::to_path_buf)
    }

    pub fn design(&self) -> anyhow::Result<DesignVector> {
        let d = self.config.design.unwrap_or_else(DesignVector::literature_nominal);
        d.check_bounds().map_err(|e| config_error(e.to_string()))?;
        Ok(d)
    }

    pub fn sea_state(&self) -> anyhow::Result<SeaState> {
        let g = &self.params.general;
        let s = self.config.sea_state.unwrap_or(SeaStateSpec { hs: g.significant_wave_height, tp: g.peak_period });
        SeaState::new(s.hs, s.tp).map_err(|e| config_error(e.to_string()))
    }

    pub fn ga_config(&self) -> anyhow::Result<GaConfig> {
        let s = &self.config.ga;
        let mut c = GaConfig::desk(s.population_size, s.max_generations, self.config.seed);
        if let Some(v) = s.immigrant_count {
            c.immigrant_count = v;
        }
        if let Some(v) = s.immigration_interval {
            c.immigration_interval = v;
        }
        if let Some(v) = s.mutation_rate {
            c.mutation_rate = v;
        }
        if let Some(v) = s.crossover_rate {
            c.crossover_rate = v;
        }
        c.validate().map_err(|e| config_error(e.to_string()))?;
        Ok(c)
    }

    pub fn context(&self, sea_state: SeaState) -> anyhow::Result<EvaluationContext> {
        let mut ctx = EvaluationContext::with_spectrum(self.params, sea_state, self.config.seed, self.config.spectrum)
            .map_err(|e| config_error(e.to_string()))?;
        ctx.hydro = match &self.config.hydro {
            HydroSource::Directory { dir } => HydroSource::Directory { dir: self.resolve(&dir.to_string_lossy()) },
            other => other.clone(),
        };
        ctx.irf = self.config.irf;
        ctx.swro = self.config.swro;
        Ok(ctx)
    }

    /// Sea states for a sensitivity run.
    pub fn sea_state_set(&self) -> anyhow::Result<Vec<SeaStateCenter>> {
        match self.config.sea_states.as_deref() {
            None => Err(config_error("sensitivity needs `sea_states` (a file or `reference`)")),
            Some("reference") => Ok(reference_centers()),
            Some(file) => {
                let p = self.resolve(file);
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| config_error(format!("cannot read sea states {}: {e}", p.display())))?;
                let set = ClusterSet::from_json(&text).map_err(|e| config_error(format!("{}: {e}", p.display())))?;
                if set.centers.is_empty() {
                    return Err(config_error(format!("{} holds no sea states", p.display())));
                }
                Ok(set.centers)
            }
        }
    }
}
