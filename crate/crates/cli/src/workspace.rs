//! Loading and saving the on-disk state a command works on.

use std::path::Path;
use std::sync::Arc;

use livebib::corpus::load_corpus_file;
use livebib::curation::DecisionLog;
use livebib::library::Catalog;
use livebib::presets::Preset;
use livebib::{parse, Corpus, Curation, CurationLibraries, QueryNode};

use crate::args::QueryOpts;
use crate::config::Settings;
use crate::error::CliError;

pub fn corpus(settings: &Settings) -> Result<Corpus, CliError> {
    let path = settings
        .corpus
        .as_ref()
        .ok_or_else(|| CliError::user("no corpus: pass --corpus or set `corpus` in the config"))?;
    load_file(path)
}

pub fn load_file(path: &Path) -> Result<Corpus, CliError> {
    let corpus = load_corpus_file(path).map_err(|e| match CliError::from(e) {
        CliError::Env(m) => CliError::env(format!("{}: {m}", path.display())),
        CliError::User(m) => CliError::user(format!("{}: {m}", path.display())),
    })?;
    for w in corpus.warnings() {
        log::warn!("{w}");
    }
    Ok(corpus)
}

/// The saved catalog, or an empty one when the file does not exist yet.
/// Once both curation libraries exist they are kept mutually exclusive.
pub fn catalog(settings: &Settings) -> Result<Catalog, CliError> {
    let mut catalog = if settings.catalog.exists() {
        Catalog::restore(&settings.catalog)?
    } else {
        Catalog::new()
    };
    catalog.set_actor(settings.curator.clone());
    let libs = curation_libraries(settings, None)?;
    let (a, b) = (&libs.relevant, &libs.irrelevant);
    if catalog.get(a).is_some() && catalog.get(b).is_some() && !catalog.is_exclusive(a, b) {
        if let Err(e) = catalog.set_exclusive(a, b) {
            log::warn!("{e}");
        }
    }
    Ok(catalog)
}

pub fn save(settings: &Settings, catalog: &Catalog) -> Result<(), CliError> {
    Ok(catalog.snapshot(&settings.catalog)?)
}

/// The query selected by flags, then the config file, then the strict preset.
pub struct Selected {
    pub query: QueryNode,
    pub preset: Option<Preset>,
}

pub fn query(opts: &QueryOpts, settings: &Settings) -> Result<Selected, CliError> {
    let preset_named = |name: &str| {
        Preset::from_name(name)
            .ok_or_else(|| CliError::user(format!("unknown preset `{name}` (strict or broad)")))
    };
    let (mut query, preset) = if let Some(text) = &opts.query {
        (parse(text)?, None)
    } else if let Some(name) = &opts.preset {
        let p = preset_named(name)?;
        (p.query()?, Some(p))
    } else if let Some(text) = &settings.file.query {
        (parse(text)?, None)
    } else {
        let p = preset_named(settings.file.preset.as_deref().unwrap_or("strict"))?;
        (p.query()?, Some(p))
    };
    if let Some(year) = opts.year {
        query = query.restrict_years(year, year);
    }
    Ok(Selected { query, preset })
}

pub fn curation_libraries(
    settings: &Settings,
    preset: Option<Preset>,
) -> Result<CurationLibraries, CliError> {
    let (relevant, irrelevant) = preset.unwrap_or(Preset::Strict).curation_keys();
    let libs = CurationLibraries {
        relevant: settings
            .file
            .relevant
            .clone()
            .unwrap_or_else(|| relevant.to_string()),
        irrelevant: settings
            .file
            .irrelevant
            .clone()
            .unwrap_or_else(|| irrelevant.to_string()),
        staging: settings.file.staging.clone(),
    };
    if libs.relevant == libs.irrelevant {
        return Err(CliError::user(
            "relevant and irrelevant libraries must differ",
        ));
    }
    Ok(libs)
}

/// Creates any missing curation library under its configured key.
pub fn ensure_libraries(catalog: &mut Catalog, libs: &CurationLibraries) -> Result<(), CliError> {
    let wanted = [
        (Some(&libs.relevant), "SETI"),
        (Some(&libs.irrelevant), "Not SETI"),
        (libs.staging.as_ref(), "Staging"),
    ];
    for (key, name) in wanted {
        if let Some(key) = key {
            if catalog.get(key).is_none() {
                log::debug!("creating library `{name}` ({key})");
                catalog.create_library_with_key(key, name, "")?;
            }
        }
    }
    Ok(())
}

pub fn curation(settings: &Settings, libs: CurationLibraries) -> Result<Curation, CliError> {
    let mut catalog = catalog(settings)?;
    ensure_libraries(&mut catalog, &libs)?;
    let log = DecisionLog::open(&settings.decisions)?;
    Ok(Curation::new(catalog, log, libs, &settings.curator)?)
}

pub fn index(corpus: Corpus) -> Arc<livebib::Index> {
    Arc::new(livebib::build_index(corpus))
}

/// Bibcodes from arguments and, optionally, a file with one per line.
pub fn bibcodes(args: &[String], file: Option<&Path>) -> Result<Vec<String>, CliError> {
    let mut out: Vec<String> = args.to_vec();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::env(format!("{}: {e}", path.display())))?;
        out.extend(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from),
        );
    }
    if out.is_empty() {
        return Err(CliError::user("no bibcodes given"));
    }
    Ok(out)
}
