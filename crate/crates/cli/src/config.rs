//! Run configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! output_dir = "out"
//!
//! [symbols]
//! f = "arc(-0.5, 0.5)"
//! one = "1"
//!
//! [[tasks]]
//! kind = "product"
//! id = "pair-b"
//! f = "f"
//! g = "one"
//! expect = "noncompact"
//! net = { angles = 16, to = 10 }
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hardylab::diagnostics::{dyadic_radii, DEFAULT_ANGLES, DEFAULT_DEPTH, DEFAULT_KERNEL_EPS, DEFAULT_OUT_FACTOR};
use hardylab::symbol::{DEFAULT_BAND, DEFAULT_GRID};
use hardylab::{LoweringOptions, RadialNet, Symbol, Thresholds, VerdictOutcome};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Seeds every random instance; identical seeds give identical numbers.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default)]
    pub lowering: LoweringConfig,
    /// Defaults for every task; a task's own `thresholds` table replaces them.
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub symbols: BTreeMap<String, String>,
    #[serde(default)]
    pub tasks: Vec<TaskConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    PaperSuite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoweringConfig {
    pub band: u64,
    pub grid: usize,
}

impl Default for LoweringConfig {
    fn default() -> Self {
        Self { band: DEFAULT_BAND, grid: DEFAULT_GRID }
    }
}

impl LoweringConfig {
    pub fn options(&self) -> LoweringOptions {
        LoweringOptions { band_request: self.band, grid_size: self.grid }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TaskConfig {
    Identities(IdentitiesTask),
    Hartman(HartmanTask),
    Zheng(PairTask),
    Product(PairTask),
    SumProduct(SumProductTask),
    Dilation(DilationTask),
}

impl TaskConfig {
    pub fn id(&self) -> &str {
        match self {
            TaskConfig::Identities(t) => &t.id,
            TaskConfig::Hartman(t) => &t.id,
            TaskConfig::Zheng(t) | TaskConfig::Product(t) => &t.id,
            TaskConfig::SumProduct(t) => &t.id,
            TaskConfig::Dilation(t) => &t.id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TaskConfig::Identities(_) => "identities",
            TaskConfig::Hartman(_) => "hartman",
            TaskConfig::Zheng(_) => "zheng",
            TaskConfig::Product(_) => "product",
            TaskConfig::SumProduct(_) => "sum_product",
            TaskConfig::Dilation(_) => "dilation",
        }
    }

    /// Symbol names the task refers to, in field order.
    pub fn symbol_refs(&self) -> Vec<&str> {
        match self {
            TaskConfig::Identities(t) => t.f.iter().chain(&t.g).map(String::as_str).collect(),
            TaskConfig::Hartman(t) => vec![&t.symbol],
            TaskConfig::Zheng(t) | TaskConfig::Product(t) => vec![&t.f, &t.g],
            TaskConfig::SumProduct(t) => vec![&t.f1, &t.g1, &t.f2, &t.g2],
            TaskConfig::Dilation(t) => t.pairs.iter().flat_map(|[f, g]| [f.as_str(), g.as_str()]).collect(),
        }
    }

    pub fn thresholds(&self) -> Option<&Thresholds> {
        match self {
            TaskConfig::Identities(_) | TaskConfig::Dilation(_) => None,
            TaskConfig::Hartman(t) => t.thresholds.as_ref(),
            TaskConfig::Zheng(t) | TaskConfig::Product(t) => t.thresholds.as_ref(),
            TaskConfig::SumProduct(t) => t.thresholds.as_ref(),
        }
    }
}

fn default_instances() -> usize {
    100
}
fn default_window() -> usize {
    64
}
fn default_max_degree() -> u32 {
    8
}
fn default_max_radius() -> f64 {
    0.3
}
fn default_tolerance() -> f64 {
    1e-12
}

/// Operator identities on seeded random trigonometric polynomials.
/// `f`, `g` and `z` pin the corresponding part of every instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesTask {
    pub id: String,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_max_degree")]
    pub max_degree: u32,
    /// Random points are drawn from `|z| ≤ max_radius`, small enough for the kernels to fit the window.
    #[serde(default = "default_max_radius")]
    pub max_radius: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<[f64; 2]>,
}

impl IdentitiesTask {
    pub fn new(id: &str) -> Self {
        Self {
            id: id.into(),
            instances: default_instances(),
            window: default_window(),
            max_degree: default_max_degree(),
            max_radius: default_max_radius(),
            tolerance: default_tolerance(),
            f: None,
            g: None,
            z: None,
        }
    }
}

fn default_sizes() -> Vec<usize> {
    vec![256, 512, 1024]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HartmanTask {
    pub id: String,
    pub symbol: String,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<VerdictOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
}

/// Radial net description; jump points of the task's symbols are added when `jumps` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetConfig {
    /// Uniformly spaced boundary angles.
    pub angles: usize,
    /// Further angles, in radians.
    pub extra: Vec<f64>,
    pub jumps: bool,
    /// Radii `1 - 2^{-j}` for `j = from..=to`.
    pub from: u32,
    pub to: u32,
    pub kernel_eps: f64,
    pub out_factor: usize,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self {
            angles: DEFAULT_ANGLES,
            extra: Vec::new(),
            jumps: true,
            from: 1,
            to: DEFAULT_DEPTH,
            kernel_eps: DEFAULT_KERNEL_EPS,
            out_factor: DEFAULT_OUT_FACTOR,
        }
    }
}

impl NetConfig {
    pub fn build(&self, symbols: &[&Symbol]) -> Result<RadialNet, CliError> {
        if self.from > self.to || self.to > 40 {
            return Err(CliError::config(format!("net depth {}..{} must satisfy from ≤ to ≤ 40", self.from, self.to)));
        }
        let mut net = RadialNet::uniform(self.angles, dyadic_radii(self.from, self.to));
        net.add_angles(&self.extra);
        if self.jumps {
            net = net.with_jumps(symbols);
        }
        net.kernel_eps = self.kernel_eps;
        net.out_factor = self.out_factor;
        net.validate().map_err(|e| CliError::config(format!("net: {e}")))?;
        Ok(net)
    }
}

/// `zheng` and `product` tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairTask {
    pub id: String,
    pub f: String,
    pub g: String,
    #[serde(default)]
    pub net: NetConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<VerdictOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumProductTask {
    pub id: String,
    pub f1: String,
    pub g1: String,
    pub f2: String,
    pub g2: String,
    #[serde(default)]
    pub net: NetConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<VerdictOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
}

fn default_dilation_angles() -> Vec<f64> {
    vec![0.0]
}
fn default_dilation_from() -> u32 {
    4
}
fn default_dilation_to() -> u32 {
    10
}
fn default_kernel_eps() -> f64 {
    DEFAULT_KERNEL_EPS
}
fn default_out_factor() -> usize {
    DEFAULT_OUT_FACTOR
}

/// `‖K*K - T*_φ K*K T_φ‖` along rays, `K = Σ H_{f_i} T_{g_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilationTask {
    pub id: String,
    /// `[f_i, g_i]` symbol names.
    pub pairs: Vec<[String; 2]>,
    #[serde(default = "default_dilation_angles")]
    pub angles: Vec<f64>,
    #[serde(default = "default_dilation_from")]
    pub from: u32,
    #[serde(default = "default_dilation_to")]
    pub to: u32,
    #[serde(default = "default_kernel_eps")]
    pub kernel_eps: f64,
    #[serde(default = "default_out_factor")]
    pub out_factor: usize,
    /// Pass only if each value is at most this factor times the previous one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decreasing: Option<f64>,
    /// Pass only if every value is at least this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_least: Option<f64>,
}

impl DilationTask {
    pub fn net(&self) -> Result<RadialNet, CliError> {
        NetConfig {
            angles: 0,
            extra: self.angles.clone(),
            jumps: false,
            from: self.from,
            to: self.to,
            kernel_eps: self.kernel_eps,
            out_factor: self.out_factor,
        }
        .build(&[])
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config: {}", e.to_string().trim_end())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }
}
