//! Optional TOML configuration. Relative paths are resolved against the
//! directory holding the file; command-line flags take precedence.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::args::GlobalOpts;
use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub decisions: Option<PathBuf>,
    pub curator: Option<String>,
    /// Preset name used when no query is given.
    pub preset: Option<String>,
    /// Custom search string used when no query or preset is given.
    pub query: Option<String>,
    /// Key of the library of accepted records.
    pub relevant: Option<String>,
    /// Key of the library of rejected records.
    pub irrelevant: Option<String>,
    /// Key of the monthly staging library.
    pub staging: Option<String>,
    #[serde(default)]
    pub remote: RemoteSection,
    #[serde(default)]
    pub service: ServiceSection,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RemoteSection {
    pub base_url: Option<String>,
    pub page_size: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ServiceSection {
    pub addr: Option<SocketAddr>,
    pub dev_origin: Option<String>,
}

/// Settings after merging the file with flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub corpus: Option<PathBuf>,
    pub catalog: PathBuf,
    pub decisions: PathBuf,
    pub curator: String,
    pub file: FileConfig,
}

pub const DEFAULT_CATALOG: &str = "catalog.json";
pub const DEFAULT_DECISIONS: &str = "decisions.jsonl";
pub const DEFAULT_CURATOR: &str = "curator";

impl FileConfig {
    pub fn parse(text: &str) -> Result<FileConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::user(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::env(format!("config {}: {e}", path.display())))?;
        let mut config = FileConfig::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut config.corpus,
            &mut config.catalog,
            &mut config.decisions,
        ] {
            if let Some(rel) = p.as_mut().filter(|p| p.is_relative()) {
                *rel = base.join(&*rel);
            }
        }
        Ok(config)
    }
}

impl Settings {
    pub fn resolve(global: &GlobalOpts) -> Result<Settings, CliError> {
        let file = match &global.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Ok(Settings::merge(global, file))
    }

    pub fn merge(global: &GlobalOpts, file: FileConfig) -> Settings {
        let catalog = global
            .catalog
            .clone()
            .or_else(|| file.catalog.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CATALOG));
        // the log lives next to the catalog unless placed explicitly
        let decisions = global
            .decisions
            .clone()
            .or_else(|| file.decisions.clone())
            .unwrap_or_else(|| catalog.with_file_name(DEFAULT_DECISIONS));
        Settings {
            corpus: global.corpus.clone().or_else(|| file.corpus.clone()),
            decisions,
            catalog,
            curator: global
                .curator
                .clone()
                .or_else(|| file.curator.clone())
                .unwrap_or_else(|| DEFAULT_CURATOR.to_string()),
            file,
        }
    }
}
