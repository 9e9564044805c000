use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use adapt_qsci::chem::HamiltonianFormat;

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hamiltonian: HamiltonianSection,
    #[serde(default)]
    pub qsci: QsciSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub exact: ExactSection,
    #[serde(default)]
    pub estimate: EstimateSection,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSection {
    pub path: PathBuf,
    /// `fcidump` or `qubit-json`; inferred from the extension when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QsciSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default = "default_floor")]
    pub freq_floor: f64,
}

impl Default for QsciSection {
    fn default() -> Self {
        Self {
            r_max: None,
            delta: None,
            freq_floor: default_floor(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_conv_tol")]
    pub conv_tol: f64,
    #[serde(default = "default_stagnation_tol")]
    pub stagnation_tol: f64,
    #[serde(default = "default_window")]
    pub window: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            shots: default_shots(),
            seeds: default_seeds(),
            max_iters: default_max_iters(),
            conv_tol: default_conv_tol(),
            stagnation_tol: default_stagnation_tol(),
            window: default_window(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub p_2q: f64,
    pub p_m: f64,
    #[serde(default)]
    pub mitigate: bool,
    /// Fold factor for unmitigated runs.
    #[serde(default = "default_fold")]
    pub fold: u32,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: default_out() }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExactSection {
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
}

impl Default for ExactSection {
    fn default() -> Self {
        Self { deltas: default_deltas() }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EstimateSection {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_vqe_iterations")]
    pub vqe_iterations: u64,
}

impl Default for EstimateSection {
    fn default() -> Self {
        Self {
            epsilon: default_epsilon(),
            vqe_iterations: default_vqe_iterations(),
        }
    }
}

fn default_floor() -> f64 {
    adapt_qsci::qsci::DEFAULT_FREQ_FLOOR
}
fn default_shots() -> u64 {
    100_000
}
fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}
fn default_max_iters() -> usize {
    60
}
fn default_conv_tol() -> f64 {
    1e-5
}
fn default_stagnation_tol() -> f64 {
    1e-8
}
fn default_window() -> usize {
    1
}
fn default_fold() -> u32 {
    1
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_deltas() -> Vec<f64> {
    vec![1e-4]
}
fn default_epsilon() -> f64 {
    1e-3
}
fn default_vqe_iterations() -> u64 {
    11
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub noise: Option<(f64, f64)>,
    pub mitigate: bool,
    pub fold: Option<u32>,
}

impl RunConfig {
    /// Reads a TOML file; relative paths inside it resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.hamiltonian.path.is_relative() {
            cfg.hamiltonian.path = base.join(&cfg.hamiltonian.path);
        }
        if cfg.output.dir.is_relative() {
            cfg.output.dir = base.join(&cfg.output.dir);
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            self.run.seeds = vec![seed];
        }
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
        if let Some((p_2q, p_m)) = o.noise {
            let fold = self.noise.as_ref().map_or(1, |n| n.fold);
            let mitigate = self.noise.as_ref().is_some_and(|n| n.mitigate);
            self.noise = Some(NoiseSection { p_2q, p_m, mitigate, fold });
        }
        if o.mitigate || o.fold.is_some() {
            let Some(noise) = self.noise.as_mut() else {
                bail!("--mitigate and --fold need a noise model (config [noise] or --noise)");
            };
            noise.mitigate |= o.mitigate;
            if let Some(f) = o.fold {
                noise.fold = f;
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        match (self.qsci.r_max, self.qsci.delta) {
            (Some(_), Some(_)) => bail!("set exactly one of qsci.r_max and qsci.delta"),
            (None, None) => bail!("one of qsci.r_max or qsci.delta is required"),
            (Some(0), _) => bail!("qsci.r_max must be positive"),
            (_, Some(d)) if !(d > 0.0 && d <= 1.0) => bail!("qsci.delta must lie in (0, 1]"),
            _ => {}
        }
        if self.run.seeds.is_empty() {
            bail!("run.seeds must not be empty");
        }
        if self.run.shots == 0 {
            bail!("run.shots must be positive");
        }
        if self.run.window == 0 {
            bail!("run.window must be at least 1");
        }
        if let Some(n) = &self.noise {
            if !(0.0..=1.0).contains(&n.p_2q) || !(0.0..=1.0).contains(&n.p_m) {
                bail!("noise probabilities must lie in [0, 1]");
            }
            if n.fold != 1 && n.fold != 3 {
                bail!("noise.fold must be 1 or 3");
            }
        }
        if self.estimate.epsilon.is_nan() || self.estimate.epsilon <= 0.0 {
            bail!("estimate.epsilon must be positive");
        }
        if self.exact.deltas.iter().any(|d| !(*d > 0.0 && *d <= 1.0)) {
            bail!("exact.deltas must lie in (0, 1]");
        }
        self.format()?;
        Ok(())
    }

    pub fn format(&self) -> Result<HamiltonianFormat> {
        Ok(match self.hamiltonian.format.as_deref() {
            None => HamiltonianFormat::infer(&self.hamiltonian.path),
            Some("fcidump") => HamiltonianFormat::Fcidump,
            Some("qubit-json") => HamiltonianFormat::QubitJson,
            Some(other) => bail!("unknown hamiltonian.format '{other}' (fcidump | qubit-json)"),
        })
    }

    /// SHA-256 prefix of the effective configuration in canonical JSON,
    /// output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        let canonical = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))[..16].to_string()
    }
}

/// Parses `P` (both rates) or `P2Q,PM`.
pub fn parse_noise(s: &str) -> std::result::Result<(f64, f64), String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad probability '{t}': {e}"));
    match s.split_once(',') {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let p = parse(s)?;
            Ok((p, p))
        }
    }
}
