use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FlockParams;
use crate::sim::ImpulseConfig;
use crate::wavefield::WaveConfig;

/// Everything a subcommand needs. Every field has a default, so an empty
/// file is a valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub params: ParamsConfig,
    pub stability: StabilityOptions,
    pub spectrum: SpectrumOptions,
    pub simulate: SimulateOptions,
    pub wave: WaveOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: PathBuf::from("out"),
            params: ParamsConfig::default(),
            stability: StabilityOptions::default(),
            spectrum: SpectrumOptions::default(),
            simulate: SimulateOptions::default(),
            wave: WaveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub n: usize,
    pub g_x: f64,
    pub g_v: f64,
    /// Only needed with list weights; defaults to `[-1, 0, 1]`.
    pub offsets: Vec<i64>,
    pub rho_x: Weights,
    pub rho_v: Weights,
}

/// Coupling weights, either as `rho_x.m1`, `rho_x.0`, `rho_x.p1` keys or as
/// a list aligned with `offsets`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weights {
    List(Vec<f64>),
    Nearest(NearestWeights),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NearestWeights {
    pub m1: f64,
    #[serde(rename = "0")]
    pub center: f64,
    pub p1: f64,
}

impl Weights {
    pub const fn nearest(m1: f64, center: f64, p1: f64) -> Self {
        Weights::Nearest(NearestWeights { m1, center, p1 })
    }

    fn values(&self, offsets: &[i64]) -> Result<Vec<f64>> {
        match self {
            Weights::List(v) => Ok(v.clone()),
            Weights::Nearest(w) if offsets == [-1, 0, 1] => Ok(vec![w.m1, w.center, w.p1]),
            Weights::Nearest(_) => Err(Error::InvalidArgument(
                "m1/0/p1 weights need offsets [-1, 0, 1]; give a list for other offsets".into(),
            )),
        }
    }
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            n: 200,
            g_x: -2.0,
            g_v: -2.0,
            offsets: vec![-1, 0, 1],
            rho_x: Weights::nearest(-0.5, 1.0, -0.5),
            rho_v: Weights::nearest(-0.5, 1.0, -0.5),
        }
    }
}

impl ParamsConfig {
    pub fn build(&self) -> Result<FlockParams> {
        let rho_x = self.rho_x.values(&self.offsets)?;
        let rho_v = self.rho_v.values(&self.offsets)?;
        let p = FlockParams::with_offsets(self.n, self.g_x, self.g_v, &self.offsets, &rho_x, &rho_v)?;
        Ok(p.validate()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityOptions {
    pub n_max: usize,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self { n_max: 4096 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumOptions {
    pub n_phi: usize,
    pub hausdorff_ns: Vec<usize>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { n_phi: 10_000, hausdorff_ns: vec![100, 300, 1000] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateOptions {
    pub t_end: f64,
    pub dt: f64,
    pub v_impulse: f64,
    pub threshold_fraction: f64,
    pub exclude: usize,
    pub delta: f64,
    pub v_nominal: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        let d = ImpulseConfig::default();
        Self {
            t_end: d.t_end,
            dt: d.dt,
            v_impulse: d.v_impulse,
            threshold_fraction: d.threshold_fraction,
            exclude: d.exclude,
            delta: 1.0,
            v_nominal: 1.0,
            stride: d.stride,
        }
    }
}

impl SimulateOptions {
    pub fn impulse(&self) -> ImpulseConfig {
        ImpulseConfig {
            v_impulse: self.v_impulse,
            t_end: self.t_end,
            dt: self.dt,
            threshold_fraction: self.threshold_fraction,
            exclude: self.exclude,
            stride: self.stride,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveOptions {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
    pub p: f64,
    pub ns: Vec<usize>,
    pub samples: usize,
    pub amplitude: f64,
}

impl Default for WaveOptions {
    fn default() -> Self {
        let d = WaveConfig::default();
        Self { alpha: d.alpha, beta: d.beta, k: d.k, p: d.p, ns: vec![256, 512, 1024], samples: 8, amplitude: 1.0 }
    }
}

impl WaveOptions {
    pub fn config(&self) -> WaveConfig {
        WaveConfig { alpha: self.alpha, beta: self.beta, k: self.k, p: self.p }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
}

impl RunConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> std::result::Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        Self::from_toml(&text).map_err(|source| ConfigError::Parse { path: path.to_owned(), source })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
