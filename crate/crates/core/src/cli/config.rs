use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};

pub const DEFAULT_N: usize = 512;
pub const DEFAULT_R: f64 = 2.0;
pub const DEFAULT_DELTA: f64 = 1e-6;
pub const DEFAULT_LEVELS: [usize; 4] = [128, 256, 512, 1024];

/// Tolerance names accepted under `tolerances`, with their defaults.
pub const TOLERANCES: [(&str, f64); 8] = [
    ("sc_residual", 1e-4),
    ("g0_defect", 1e-3),
    ("route_gap", 5e-5),
    ("residual_first_kind", 5e-3),
    ("residual_second_kind", 1e-10),
    ("sc_residual_of_u", 5e-3),
    ("max_err", 1e-3),
    ("order", 0.8),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    VerifyPair,
    ComputeG,
    Solve,
    Discover,
    Converge,
    Stability,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::VerifyPair,
        Command::ComputeG,
        Command::Solve,
        Command::Discover,
        Command::Converge,
        Command::Stability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::VerifyPair => "verify-pair",
            Command::ComputeG => "compute-g",
            Command::Solve => "solve",
            Command::Discover => "discover",
            Command::Converge => "converge",
            Command::Stability => "stability",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| config_error("command", format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(config_error("output.format", format!("expected csv or json, got `{s}`"))),
        }
    }
}

/// Kernel descriptor: the classical pair, or the variable-exponent kernel
/// with the affine profile `α(t) = a0 + a1·t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelConfig {
    Classical { alpha: f64, b: f64 },
    Variable { a0: f64, a1: f64, b: f64 },
}

impl KernelConfig {
    pub fn horizon(&self) -> f64 {
        match *self {
            KernelConfig::Classical { b, .. } | KernelConfig::Variable { b, .. } => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub command: Option<Command>,
    pub kernel: KernelConfig,
    pub n: usize,
    pub r: f64,
    /// Polynomial coefficients of `f`, lowest degree first.
    pub rhs: Vec<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tolerances: BTreeMap<String, f64>,
    pub delta: f64,
    pub levels: Vec<usize>,
}

impl JobConfig {
    /// The named tolerance, or its default.
    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| {
            TOLERANCES
                .iter()
                .find(|(n, _)| *n == name)
                .map(|&(_, v)| v)
                .expect("known tolerance name")
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<String>,
    kernel: RawKernel,
    #[serde(default)]
    mesh: RawMesh,
    rhs: Option<RawRhs>,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    delta: Option<f64>,
    levels: Option<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    kind: String,
    alpha: Option<f64>,
    profile: Option<RawProfile>,
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    a0: f64,
    a1: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    #[serde(rename = "N")]
    n: Option<usize>,
    r: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRhs {
    coefficients: Vec<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<String>,
}

fn config_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn open_unit(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(config_error(field, format!("{v} must lie in (0, 1)")))
    }
}

/// Parses and validates a JSON job document; unset fields take their defaults.
pub fn parse_config(text: &str) -> Result<JobConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        config_error("document", format!("line {} column {}: {e}", e.line(), e.column()))
    })?;
    let command = raw.command.as_deref().map(str::parse).transpose()?;

    let b = raw.kernel.b;
    if !(b.is_finite() && b > 0.0) {
        return Err(config_error("kernel.b", format!("{b} must be positive and finite")));
    }
    let kernel = match raw.kernel.kind.as_str() {
        "classical" => {
            let alpha = raw
                .kernel
                .alpha
                .ok_or_else(|| config_error("alpha", "required for kind `classical`"))?;
            open_unit("alpha", alpha)?;
            KernelConfig::Classical { alpha, b }
        }
        "variable" => {
            let p = raw
                .kernel
                .profile
                .ok_or_else(|| config_error("profile", "required for kind `variable`"))?;
            open_unit("profile.a0", p.a0)?;
            open_unit("profile.a0 + profile.a1*b", p.a0 + p.a1 * b)?;
            KernelConfig::Variable { a0: p.a0, a1: p.a1, b }
        }
        other => {
            return Err(config_error(
                "kernel.kind",
                format!("expected classical or variable, got `{other}`"),
            ))
        }
    };

    let n = raw.mesh.n.unwrap_or(DEFAULT_N);
    if n < 8 {
        return Err(config_error("mesh.N", format!("{n} panels; need at least 8")));
    }
    let r = raw.mesh.r.unwrap_or(DEFAULT_R);
    if !(1.0..=8.0).contains(&r) {
        return Err(config_error("mesh.r", format!("{r} must lie in [1, 8]")));
    }

    let rhs = raw.rhs.map(|r| r.coefficients).unwrap_or_else(|| vec![0.0, 1.0]);
    if rhs.is_empty() || rhs.iter().any(|c| !c.is_finite()) {
        return Err(config_error("rhs.coefficients", "must be a non-empty list of finite numbers"));
    }

    let format = raw.output.format.as_deref().map(str::parse).transpose()?.unwrap_or_default();

    for (name, &v) in &raw.tolerances {
        if !TOLERANCES.iter().any(|(n, _)| n == name) {
            return Err(config_error(&format!("tolerances.{name}"), "unknown tolerance"));
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(config_error(&format!("tolerances.{name}"), format!("{v} must be positive")));
        }
    }

    let delta = raw.delta.unwrap_or(DEFAULT_DELTA);
    if !(delta.is_finite() && delta > 0.0) {
        return Err(config_error("delta", format!("{delta} must be positive")));
    }

    let levels = raw.levels.unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    if levels.len() < 2 || levels.iter().any(|&l| l < 8) || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config_error("levels", "need >= 2 increasing panel counts, each >= 8"));
    }

    Ok(JobConfig {
        command,
        kernel,
        n,
        r,
        rhs,
        out: raw.output.path,
        format,
        tolerances: raw.tolerances,
        delta,
        levels,
    })
}
