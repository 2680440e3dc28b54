//! Service configuration, shared by the HTTP service and the CLI.
//!
//! ```toml
//! listen = "127.0.0.1:8080"
//! graph = "demo.json"
//! static_dir = "web/dist"
//!
//! [llm]
//! mode = "mock"                 # or "live"
//! fixtures = "fixtures/mock"
//!
//! [linker]
//! threshold = 0.55
//!
//! [limits]
//! max_subgraph_nodes = 2000
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cypher::{ExecOptions, DEFAULT_MAX_BINDINGS};
use crate::linker::LinkerConfig;
use crate::nl::{HttpBackend, Limited, LlmBackend, MockLlm, PipelineConfig, PromptTemplates, DEFAULT_ROW_BUDGET};
use crate::par::Parallelism;

pub const DEFAULT_MAX_SUBGRAPH_NODES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_listen")]
    pub listen: String,
    pub graph: PathBuf,
    #[serde(default)]
    pub static_dir: Option<PathBuf>,
    pub llm: LlmSettings,
    #[serde(default)]
    pub linker: LinkerConfig,
    #[serde(default)]
    pub limits: Limits,
}

fn default_listen() -> String {
    "127.0.0.1:8080".into()
}

/// Exactly one backend mode is configured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum LlmSettings {
    Mock {
        fixtures: PathBuf,
        #[serde(default)]
        prompts_dir: Option<PathBuf>,
    },
    Live {
        url: String,
        model: String,
        /// Name of the environment variable holding the API key.
        #[serde(default)]
        api_key_env: Option<String>,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
        #[serde(default = "default_concurrency")]
        max_concurrent: usize,
        #[serde(default)]
        prompts_dir: Option<PathBuf>,
    },
}

fn default_timeout() -> u64 {
    30
}

fn default_concurrency() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub max_bindings: usize,
    pub max_subgraph_nodes: usize,
    pub summary_rows: usize,
    pub summarize: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_bindings: DEFAULT_MAX_BINDINGS,
            max_subgraph_nodes: DEFAULT_MAX_SUBGRAPH_NODES,
            summary_rows: DEFAULT_ROW_BUDGET,
            summarize: true,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("{0}")]
    Backend(String),
}

impl ServiceConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        let mut config = Self::from_toml_str(&text)?;
        config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(config)
    }

    /// Makes relative paths relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.graph);
        if let Some(dir) = &mut self.static_dir {
            fix(dir);
        }
        match &mut self.llm {
            LlmSettings::Mock { fixtures, prompts_dir } => {
                fix(fixtures);
                if let Some(dir) = prompts_dir {
                    fix(dir);
                }
            }
            LlmSettings::Live { prompts_dir: Some(dir), .. } => fix(dir),
            LlmSettings::Live { .. } => {}
        }
    }

    pub fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            linker: self.linker.clone(),
            exec: ExecOptions { max_bindings: self.limits.max_bindings, parallelism: Parallelism::default() },
            summary_row_budget: self.limits.summary_rows,
            summarize: self.limits.summarize,
            ..PipelineConfig::default()
        }
    }
}

impl LlmSettings {
    pub fn templates(&self) -> Result<PromptTemplates, ConfigError> {
        let dir = match self {
            LlmSettings::Mock { prompts_dir, .. } | LlmSettings::Live { prompts_dir, .. } => prompts_dir,
        };
        match dir {
            Some(d) => PromptTemplates::from_dir(d).map_err(|e| ConfigError::Backend(format!("prompt templates: {e}"))),
            None => Ok(PromptTemplates::default()),
        }
    }

    pub fn build_backend(&self) -> Result<Arc<dyn LlmBackend>, ConfigError> {
        match self {
            LlmSettings::Mock { fixtures, .. } => {
                Ok(Arc::new(MockLlm::from_dir(fixtures).map_err(ConfigError::Backend)?))
            }
            LlmSettings::Live { url, model, api_key_env, timeout_secs, max_concurrent, .. } => {
                let key = match api_key_env {
                    Some(var) => Some(
                        std::env::var(var)
                            .map_err(|_| ConfigError::Backend(format!("environment variable {var} is not set")))?,
                    ),
                    None => None,
                };
                let http = HttpBackend::new(url, model, key, Duration::from_secs(*timeout_secs))
                    .map_err(|e| ConfigError::Backend(e.to_string()))?;
                Ok(Arc::new(Limited::new(http, *max_concurrent)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_one_mode() {
        let ok = "graph = 'g.json'\n[llm]\nmode = 'mock'\nfixtures = 'f'\n";
        let cfg = ServiceConfig::from_toml_str(ok).unwrap();
        assert!(matches!(cfg.llm, LlmSettings::Mock { .. }));
        assert_eq!(cfg.limits.max_subgraph_nodes, 2000);
        let mixed = "graph = 'g.json'\n[llm]\nmode = 'mock'\nfixtures = 'f'\nurl = 'http://x'\n";
        assert!(ServiceConfig::from_toml_str(mixed).is_err());
        let none = "graph = 'g.json'\n[llm]\nfixtures = 'f'\n";
        assert!(ServiceConfig::from_toml_str(none).is_err());
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let mut cfg = ServiceConfig::from_toml_str("graph = 'g.json'\n[llm]\nmode = 'mock'\nfixtures = 'f'\n").unwrap();
        cfg.resolve_paths(Path::new("/etc/relgraph"));
        assert_eq!(cfg.graph, PathBuf::from("/etc/relgraph/g.json"));
    }
}
