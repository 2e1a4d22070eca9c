//! Experiment configuration (TOML, `schema_version = 1`).
//!
//! ```toml
//! schema_version = 1
//! tasks = ["tyreworld", "blocksworld"]
//! variants = ["STD", "OURS"]
//! max_steps = 30
//! parallelism = 4
//! out_dir = "runs/demo"
//!
//! [instances]            # optional; a task without an entry runs every bundled instance
//! tyreworld = ["t1"]
//!
//! [backend]
//! kind = "replay"        # or "http"
//! script_dir = "scripts" # {task}-{instance}-{VARIANT}.txt per trial
//! synthesize = true      # missing scripts follow the bundled reference plan
//! ```
//!
//! Relative paths resolve against the config file's directory.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use chunkwm_core::agent::{AgentConfig, TrialSpec, Variant};
use chunkwm_core::backend::HttpConfig;
use chunkwm_core::domains::DomainKind;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::Spanned;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayConfig {
    pub script_dir: PathBuf,
    /// Follow the bundled reference plan when a trial has no script file.
    #[serde(default)]
    pub synthesize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackendConfig {
    Replay(ReplayConfig),
    Http(HttpConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub tasks: Vec<Spanned<String>>,
    pub variants: Vec<Spanned<String>>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_chunks: Option<usize>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub instances: BTreeMap<String, Vec<Spanned<String>>>,
    pub backend: BackendConfig,
}

fn default_max_steps() -> usize {
    AgentConfig::DEFAULT_MAX_STEPS
}

fn default_parallelism() -> usize {
    4
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

/// A config problem with the 1-based line it was found on, if known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{l}: {}", self.path.display(), self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

/// Validated, resolved experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub specs: Vec<TrialSpec>,
    pub agent: AgentConfig,
    pub base_dir: PathBuf,
    /// sha256 of the canonical serialization.
    pub config_hash: String,
}

impl Experiment {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

fn line_of(src: &str, span: Range<usize>) -> usize {
    src[..span.start.min(src.len())].matches('\n').count() + 1
}

impl ExperimentConfig {
    pub fn parse(src: &str) -> Result<Self, (Option<usize>, String)> {
        toml::from_str(src).map_err(|e| (e.span().map(|s| line_of(src, s)), e.message().to_string()))
    }

    /// Canonical TOML text; parsing it again yields the same config.
    pub fn to_canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical().as_bytes()))
    }
}

pub fn load(path: &Path) -> Result<Experiment, ConfigError> {
    let err = |line: Option<usize>, message: String| ConfigError {
        path: path.to_path_buf(),
        line,
        message,
    };
    let src = std::fs::read_to_string(path).map_err(|e| err(None, format!("cannot read config: {e}")))?;
    let config = ExperimentConfig::parse(&src).map_err(|(l, m)| err(l, m))?;
    let at = |s: &Spanned<String>| Some(line_of(&src, s.span()));

    if config.schema_version != CONFIG_SCHEMA_VERSION {
        return Err(err(
            None,
            format!("unsupported schema_version {} (expected {CONFIG_SCHEMA_VERSION})", config.schema_version),
        ));
    }
    if config.tasks.is_empty() {
        return Err(err(None, "`tasks` must list at least one task".into()));
    }
    if config.variants.is_empty() {
        return Err(err(None, "`variants` must list at least one variant".into()));
    }
    if config.max_steps == 0 {
        return Err(err(None, "`max_steps` must be at least 1".into()));
    }
    if config.parallelism == 0 {
        return Err(err(None, "`parallelism` must be at least 1".into()));
    }
    if config.seeds.is_empty() {
        return Err(err(None, "`seeds` must not be empty".into()));
    }
    let mut tasks = Vec::new();
    for t in &config.tasks {
        let kind: DomainKind = t.get_ref().parse().map_err(|e| err(at(t), format!("{e}")))?;
        tasks.push(kind);
    }
    let mut variants = Vec::new();
    for v in &config.variants {
        variants.push(v.get_ref().parse::<Variant>().map_err(|e| err(at(v), e))?);
    }
    for (task, ids) in &config.instances {
        let kind: DomainKind = task.parse().map_err(|e| err(None, format!("[instances]: {e}")))?;
        if !tasks.contains(&kind) {
            return Err(err(None, format!("[instances] names task '{task}' that is not in `tasks`")));
        }
        for id in ids {
            if !kind.instances().contains(&id.get_ref().as_str()) {
                return Err(err(
                    at(id),
                    format!(
                        "unknown {kind} instance '{}' (bundled: {})",
                        id.get_ref(),
                        kind.instances().join(", ")
                    ),
                ));
            }
        }
    }

    let mut specs = Vec::new();
    for &kind in &tasks {
        let ids: Vec<String> = match config.instances.get(kind.name()) {
            Some(ids) => ids.iter().map(|s| s.get_ref().clone()).collect(),
            None => kind.instances().into_iter().map(String::from).collect(),
        };
        for id in &ids {
            for &variant in &variants {
                for &seed in &config.seeds {
                    specs.push(TrialSpec {
                        task: kind,
                        instance: id.clone(),
                        variant,
                        seed,
                    });
                }
            }
        }
    }
    specs.sort();
    specs.dedup();

    let agent = AgentConfig {
        variant: variants[0],
        max_steps: config.max_steps,
        max_chunks: config.max_chunks,
        seed: 0,
    };
    let base_dir = path
        .parent()
        .map(Path::to_path_buf)
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| PathBuf::from("."));
    let config_hash = config.hash();
    Ok(Experiment {
        config,
        specs,
        agent,
        base_dir,
        config_hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SRC: &str = r#"schema_version = 1
tasks = ["tyreworld"]
variants = ["STD", "OURS"]
out_dir = "out"

[backend]
kind = "replay"
script_dir = "scripts"
"#;

    #[test]
    fn canonical_round_trip() {
        let c = ExperimentConfig::parse(SRC).unwrap();
        let once = c.to_canonical();
        let twice = ExperimentConfig::parse(&once).unwrap().to_canonical();
        assert_eq!(once, twice);
        assert_eq!(c.max_steps, 30);
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::parse(SRC).unwrap();
        let b = ExperimentConfig::parse(&format!("# comment\n{SRC}")).unwrap();
        let c = ExperimentConfig::parse(&SRC.replace("\"out\"", "\"out2\"")).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let (line, _) = ExperimentConfig::parse("schema_version = 1\ntasks = [\n").unwrap_err();
        assert!(line.is_some());
    }
}
