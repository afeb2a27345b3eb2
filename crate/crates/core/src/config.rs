//! Run configuration: built-in defaults, overridden by a TOML file,
//! overridden by command-line flags.
//!
//! ```toml
//! seed = 1511776711
//!
//! [pipeline]
//! ppd = 32.0
//! smoothing_sigma = 0.03
//! fusion_weights = [1.0, 1.0, 1.0]
//!
//! [pipeline.gain]
//! gain_l = 0.6
//! gain_m = 0.6
//! gain_s = 0.6
//!
//! [evaluation]
//! metrics = ["auc_judd", "nss", "cc"]
//! n_splits = 100
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::EvalOptions;
use crate::metrics::{MetricKind, DEFAULT_AUC_SEED, DEFAULT_EPSILON};
use crate::pipeline::PipelineParams;

pub const ECHO_FILE: &str = "effective_config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub metrics: Vec<MetricKind>,
    pub n_splits: usize,
    pub step: f64,
    pub epsilon: f64,
    /// Blur for densities synthesized from points, in stimulus pixels.
    /// Defaults to `pipeline.ppd`, one degree of visual angle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_sigma_px: Option<f64>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            metrics: MetricKind::ALL.to_vec(),
            n_splits: 100,
            step: 0.1,
            epsilon: DEFAULT_EPSILON,
            density_sigma_px: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seed of the sampled AUC variants.
    pub seed: u64,
    pub pipeline: PipelineParams,
    pub evaluation: EvaluationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_AUC_SEED,
            pipeline: PipelineParams::default(),
            evaluation: EvaluationConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        self.eval_options(false).validate()
    }

    pub fn eval_options(&self, curves: bool) -> EvalOptions {
        let e = &self.evaluation;
        EvalOptions {
            metrics: e.metrics.clone(),
            seed: self.seed,
            n_splits: e.n_splits,
            step: e.step,
            epsilon: e.epsilon,
            density_sigma_px: e.density_sigma_px.unwrap_or(self.pipeline.ppd),
            curves,
        }
    }

    /// Writes the configuration into `dir` so the run can be repeated.
    pub fn echo(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(ECHO_FILE);
        std::fs::write(&path, self.to_toml()).map_err(|e| Error::io(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Levels;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig {
            seed: 7,
            ..Default::default()
        };
        c.pipeline.levels = Levels::Fixed(3);
        c.pipeline.fusion_weights = [1.0, 0.5, 0.25];
        c.evaluation.metrics = vec![MetricKind::Nss, MetricKind::Sauc];
        c.evaluation.density_sigma_px = Some(12.0);
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_file_overrides_only_named_fields() {
        let c = RunConfig::from_toml("seed = 3\n[pipeline]\nppd = 20.0\nlevels = \"auto\"\n").unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.pipeline.ppd, 20.0);
        assert_eq!(c.pipeline.smoothing_sigma, PipelineParams::default().smoothing_sigma);
        assert_eq!(c.eval_options(false).density_sigma_px, 20.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("sead = 3").is_err());
        assert!(RunConfig::from_toml("[pipeline]\nppdd = 3.0").is_err());
    }
}
