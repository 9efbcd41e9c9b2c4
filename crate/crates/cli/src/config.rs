use std::path::{Path, PathBuf};

use clap::Args;
use rademacher_clt::bounds::{MomentBackend, DEFAULT_SAMPLES};
use rademacher_clt::{Error, Result};
use serde::{Deserialize, Serialize};

/// Flags shared by every subcommand. Each may also be set in the config
/// file; flags win.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Size parameter: `16`, `16,32,64` or `16..128` (doubling).
    #[arg(long)]
    pub n: Option<String>,
    /// Edge or cell probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Mean degree for the degree model, p = θ/(n−1).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Lattice dimension for the cubical models.
    #[arg(long)]
    pub dim: Option<usize>,
    /// subgraph | degree | voxel | plaquette.
    #[arg(long)]
    pub model: Option<String>,
    /// Comma-separated pattern names or edge-list files.
    #[arg(long)]
    pub patterns: Option<String>,
    /// Comma-separated degrees.
    #[arg(long)]
    pub degrees: Option<String>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// exact | mc | auto.
    #[arg(long)]
    pub backend: Option<String>,
    /// Output prefix; writes `<out>.csv` and `<out>.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with `[model]` and `[run]` sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Plaquette target: stated | signed.
    #[arg(long)]
    pub sign: Option<String>,
    /// Random instances for `verify`.
    #[arg(long)]
    pub instances: Option<usize>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    run: RunSection,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    kind: Option<String>,
    n: Option<toml::Value>,
    p: Option<f64>,
    theta: Option<f64>,
    dim: Option<usize>,
    patterns: Option<String>,
    degrees: Option<String>,
    sign: Option<String>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct RunSection {
    samples: Option<u64>,
    seed: Option<u64>,
    backend: Option<String>,
    out: Option<PathBuf>,
    instances: Option<usize>,
}

/// Fully resolved settings, echoed into the JSON summary.
#[derive(Serialize, Debug, Clone)]
pub struct Settings {
    pub n: Vec<usize>,
    pub p: Option<f64>,
    pub theta: Option<f64>,
    pub dim: Option<usize>,
    pub model: Option<String>,
    pub patterns: Vec<String>,
    pub degrees: Vec<usize>,
    pub samples: u64,
    pub seed: u64,
    pub backend: String,
    pub out: PathBuf,
    pub sign: String,
    pub instances: usize,
}

impl Settings {
    pub fn resolve(flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let n_text = match (&flags.n, &file.model.n) {
            (Some(s), _) => Some(s.clone()),
            (None, Some(toml::Value::Integer(i))) => Some(i.to_string()),
            (None, Some(toml::Value::String(s))) => Some(s.clone()),
            (None, Some(other)) => {
                return Err(Error::Validation(format!("config key n has unsupported value {other}")))
            }
            (None, None) => None,
        };
        let n = match n_text {
            Some(t) => parse_range(&t)?,
            None => Vec::new(),
        };
        let patterns = flags
            .patterns
            .clone()
            .or(file.model.patterns)
            .map(|s| split_list(&s))
            .unwrap_or_default();
        let degrees = match flags.degrees.clone().or(file.model.degrees) {
            Some(s) => split_list(&s)
                .iter()
                .map(|d| d.parse().map_err(|_| Error::Validation(format!("bad degree {d:?}"))))
                .collect::<Result<Vec<usize>>>()?,
            None => Vec::new(),
        };
        let samples = flags.samples.or(file.run.samples).unwrap_or(DEFAULT_SAMPLES);
        let backend = flags.backend.clone().or(file.run.backend).unwrap_or_else(|| "auto".into());
        if !matches!(backend.as_str(), "exact" | "mc" | "auto") {
            return Err(Error::Validation(format!("unknown backend {backend:?}; use exact, mc or auto")));
        }
        if backend != "exact" && samples < 100 {
            return Err(Error::Validation(format!("{samples} samples; Monte Carlo needs at least 100")));
        }
        let sign = flags.sign.clone().or(file.model.sign).unwrap_or_else(|| "stated".into());
        if !matches!(sign.as_str(), "stated" | "signed") {
            return Err(Error::Validation(format!("unknown sign convention {sign:?}")));
        }
        Ok(Self {
            n,
            p: flags.p.or(file.model.p),
            theta: flags.theta.or(file.model.theta),
            dim: flags.dim.or(file.model.dim),
            model: flags.model.clone().or(file.model.kind),
            patterns,
            degrees,
            samples,
            seed: flags.seed.or(file.run.seed).unwrap_or(0),
            backend,
            out: flags.out.clone().or(file.run.out).unwrap_or_else(|| PathBuf::from("rclt")),
            sign,
            instances: flags.instances.or(file.run.instances).unwrap_or(200),
        })
    }

    pub fn moment_backend(&self) -> MomentBackend {
        match self.backend.as_str() {
            "exact" => MomentBackend::Exact,
            "mc" => MomentBackend::monte_carlo(self.samples, self.seed),
            _ => MomentBackend::auto(self.samples, self.seed),
        }
    }

    pub fn require_n(&self) -> Result<&[usize]> {
        if self.n.is_empty() {
            return Err(Error::Validation("--n is required".into()));
        }
        Ok(&self.n)
    }

    pub fn require_p(&self) -> Result<f64> {
        self.p.ok_or_else(|| Error::Validation("--p is required".into()))
    }
}

fn read_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

/// `lo..hi` doubles from `lo` while staying at most `hi`; `a,b,c` and a
/// single value are taken as given.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Validation(format!("bad n specification {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let out = if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi)?);
        if lo == 0 || lo > hi {
            return Err(bad());
        }
        std::iter::successors(Some(lo), |&x| x.checked_mul(2))
            .take_while(|&x| x <= hi)
            .collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}
