//! One function per subcommand. Results go to `out`; progress and warnings
//! go to the log on standard error.

use std::collections::BTreeSet;
use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::time::Duration;

use livebib::curation::BatchDecisions;
use livebib::library::SetOp;
use livebib::metrics::{render_histogram, render_report, ReportFormat};
use livebib::remote::{HttpTransport, RemoteClient, RemoteConfig};
use livebib::{citation_table, evaluate, year_histogram};
use livebib_service::{Session, DEFAULT_DEV_ORIGIN};

use crate::args::{
    Command, CorpusCmd, LibCmd, QueryOpts, RemoteOpts, SyncCmd, TriageCmd, UpdateCmd,
};
use crate::config::Settings;
use crate::error::CliError;
use crate::workspace;

/// Default listen address of `triage serve`.
pub const DEFAULT_PORT: u16 = 8787;

pub fn run(command: Command, settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Corpus(CorpusCmd::Load { file }) => corpus_load(file.as_deref(), settings, out),
        Command::Search {
            query,
            explain,
            json,
        } => search(&query, explain, json, settings, out),
        Command::Lib(cmd) => lib(cmd, settings, out),
        Command::Update(UpdateCmd::Run { query, batch }) => {
            update_run(&query, batch.as_deref(), settings, out)
        }
        Command::Triage(TriageCmd::Serve {
            query,
            addr,
            dev_origin,
        }) => triage_serve(&query, addr, dev_origin, settings),
        Command::Stats {
            library,
            format,
            histogram,
        } => stats(&library, &format, histogram, settings, out),
        Command::Digest {
            month,
            out: file,
            stage,
        } => digest(&month, file.as_deref(), stage, settings, out),
        Command::Sync(cmd) => sync(cmd, settings, out),
    }
}

fn corpus_load(
    file: Option<&std::path::Path>,
    settings: &Settings,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let corpus = match file {
        Some(path) => workspace::load_file(path)?,
        None => workspace::corpus(settings)?,
    };
    let records = corpus.records();
    let refereed = records.iter().filter(|r| r.refereed).count();
    writeln!(out, "records: {}", records.len())?;
    writeln!(out, "refereed: {refereed}")?;
    if let (Some(min), Some(max)) = (
        records.iter().map(|r| r.year).min(),
        records.iter().map(|r| r.year).max(),
    ) {
        writeln!(out, "years: {min}-{max}")?;
    }
    writeln!(out, "warnings: {}", corpus.warnings().len())?;
    Ok(())
}

fn search(
    opts: &QueryOpts,
    explain: bool,
    json: bool,
    settings: &Settings,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let selected = workspace::query(opts, settings)?;
    let index = workspace::index(workspace::corpus(settings)?);
    let mut catalog = workspace::catalog(settings)?;
    // curation libraries not created yet are empty, not an error; the
    // catalog is not saved
    workspace::ensure_libraries(
        &mut catalog,
        &workspace::curation_libraries(settings, selected.preset)?,
    )?;
    let result = if explain {
        livebib::corpus::evaluate_explained(&selected.query, &index, &catalog)?
    } else {
        evaluate(&selected.query, &index, &catalog)?
    };
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&result).expect("search results serialize")
        )?;
        return Ok(());
    }
    let explanations = result.explanations.unwrap_or_default();
    for hit in &result.hits {
        match explanations.get(hit) {
            Some(why) => {
                let terms: Vec<String> = why
                    .iter()
                    .map(|m| format!("{}:{}@{}", m.field.as_str(), m.term, m.position))
                    .collect();
                writeln!(out, "{hit}\t{}", terms.join(" "))?;
            }
            None => writeln!(out, "{hit}")?,
        }
    }
    log::info!("{} hits", result.total);
    Ok(())
}

fn lib(cmd: LibCmd, settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let mut catalog = workspace::catalog(settings)?;
    match cmd {
        LibCmd::Create {
            name,
            key,
            description,
        } => {
            let key = match key {
                Some(k) => {
                    catalog.create_library_with_key(&k, &name, &description)?;
                    k
                }
                None => catalog.create_library(&name, &description)?,
            };
            workspace::save(settings, &catalog)?;
            writeln!(out, "{key}")?;
        }
        LibCmd::Add {
            library,
            bibcodes,
            file,
        } => {
            let key = catalog.resolve(&library)?.key.clone();
            let n = catalog.add_members(&key, workspace::bibcodes(&bibcodes, file.as_deref())?)?;
            workspace::save(settings, &catalog)?;
            writeln!(out, "added {n}")?;
        }
        LibCmd::Remove {
            library,
            bibcodes,
            file,
        } => {
            let key = catalog.resolve(&library)?.key.clone();
            let n =
                catalog.remove_members(&key, workspace::bibcodes(&bibcodes, file.as_deref())?)?;
            workspace::save(settings, &catalog)?;
            writeln!(out, "removed {n}")?;
        }
        LibCmd::Op { op, a, b, into } => {
            let op = SetOp::parse(&op).ok_or_else(|| {
                CliError::user(format!(
                    "unknown operation `{op}` (union, intersection, difference)"
                ))
            })?;
            let a = catalog.resolve(&a)?.key.clone();
            let b = catalog.resolve(&b)?.key.clone();
            let members = catalog.set_op(op, &a, &b)?;
            match into {
                Some(name) => {
                    let key = catalog.materialize(&name, "", members)?;
                    workspace::save(settings, &catalog)?;
                    writeln!(out, "{key}")?;
                }
                None => {
                    for m in members {
                        writeln!(out, "{m}")?;
                    }
                }
            }
        }
        LibCmd::List => {
            for l in catalog.libraries() {
                writeln!(out, "{}\t{}\t{}", l.key, l.members.len(), l.name)?;
            }
        }
        LibCmd::Show { library } => {
            for m in &catalog.resolve(&library)?.members {
                writeln!(out, "{m}")?;
            }
        }
    }
    Ok(())
}

fn update_run(
    opts: &QueryOpts,
    batch: Option<&std::path::Path>,
    settings: &Settings,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let selected = workspace::query(opts, settings)?;
    let index = workspace::index(workspace::corpus(settings)?);
    let libs = workspace::curation_libraries(settings, selected.preset)?;
    let mut curation = workspace::curation(settings, libs)?;
    curation.check_exclusions(&selected.query)?;
    let Some(batch) = batch else {
        let pending = curation.residual(&selected.query, &index)?;
        writeln!(out, "pending: {}", pending.len())?;
        for b in pending {
            writeln!(out, "{b}")?;
        }
        return Ok(());
    };
    let mut source = BatchDecisions::load(batch)?;
    let result = curation.run_update_cycle(&selected.query, &index, &mut source);
    // decisions made before a failure are already in the log; keep the
    // catalog in step with them
    workspace::save(settings, curation.catalog())?;
    let report = result?;
    write!(out, "{report}")?;
    Ok(())
}

fn triage_serve(
    opts: &QueryOpts,
    addr: Option<SocketAddr>,
    dev_origin: Option<String>,
    settings: &Settings,
) -> Result<(), CliError> {
    let selected = workspace::query(opts, settings)?;
    let index = workspace::index(workspace::corpus(settings)?);
    let libs = workspace::curation_libraries(settings, selected.preset)?;
    let curation = workspace::curation(settings, libs)?;
    workspace::save(settings, curation.catalog())?;
    let session = Session::new(curation, index, selected.query)
        .map_err(|e| CliError::user(e.to_string()))?
        .with_catalog_path(settings.catalog.clone());
    let addr = addr
        .or(settings.file.service.addr)
        .unwrap_or(SocketAddr::from((Ipv4Addr::LOCALHOST, DEFAULT_PORT)));
    let origin = dev_origin
        .or_else(|| settings.file.service.dev_origin.clone())
        .unwrap_or_else(|| DEFAULT_DEV_ORIGIN.to_string());
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(livebib_service::serve(session, addr, &origin))?;
    Ok(())
}

fn stats(
    library: &str,
    format: &str,
    histogram: bool,
    settings: &Settings,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let format = ReportFormat::parse(format).ok_or_else(|| {
        CliError::user(format!("unknown format `{format}` (markdown, csv, json)"))
    })?;
    let corpus = workspace::corpus(settings)?;
    let catalog = workspace::catalog(settings)?;
    let members = &catalog.resolve(library)?.members;
    let report = citation_table(members, &corpus);
    write!(out, "{}", render_report(&report, format))?;
    if histogram {
        writeln!(out)?;
        write!(
            out,
            "{}",
            render_histogram(&year_histogram(members, &corpus))
        )?;
    }
    Ok(())
}

fn digest(
    month: &str,
    file: Option<&std::path::Path>,
    stage: bool,
    settings: &Settings,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let corpus = workspace::corpus(settings)?;
    let libs = workspace::curation_libraries(settings, None)?;
    if stage && libs.staging.is_none() {
        return Err(CliError::user(
            "--stage needs a `staging` library key in the config",
        ));
    }
    let mut curation = workspace::curation(settings, libs)?;
    let digest = curation.render_digest(month, &corpus)?;
    for w in &digest.warnings {
        log::warn!("{w}");
    }
    if stage {
        let added = curation.stage_month(month)?;
        workspace::save(settings, curation.catalog())?;
        log::info!("staged {added} new records");
    }
    let markdown = digest.to_markdown();
    match file {
        Some(path) => std::fs::write(path, markdown)
            .map_err(|e| CliError::env(format!("{}: {e}", path.display())))?,
        None => write!(out, "{markdown}")?,
    }
    Ok(())
}

fn client(opts: &RemoteOpts, settings: &Settings) -> Result<RemoteClient<HttpTransport>, CliError> {
    let mut config = RemoteConfig::from_env();
    if config.auth_token.is_none() {
        return Err(CliError::env(format!(
            "set {} to use the remote service",
            livebib::remote::TOKEN_ENV
        )));
    }
    if let Some(url) = opts
        .remote_url
        .clone()
        .or_else(|| settings.file.remote.base_url.clone())
    {
        config.base_url = url;
    }
    if let Some(n) = settings.file.remote.page_size {
        config.page_size = n;
    }
    let transport = HttpTransport::new(&config.base_url, Duration::from_secs(60));
    Ok(RemoteClient::new(transport, config)?)
}

fn sync(cmd: SyncCmd, settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        SyncCmd::Pull { library, remote } => {
            let client = client(&remote, settings)?;
            let mut catalog = workspace::catalog(settings)?;
            let key = match catalog.resolve(&library) {
                Ok(l) => l.key.clone(),
                Err(_) => {
                    catalog.create_library_with_key(&library, &library, "pulled from remote")?;
                    library.clone()
                }
            };
            let remote_members = client.pull_library(&key)?.payload;
            let local = catalog.members(&key)?.clone();
            let removed =
                catalog.remove_members(&key, local.difference(&remote_members).cloned())?;
            let added = catalog.add_members(&key, remote_members.difference(&local).cloned())?;
            workspace::save(settings, &catalog)?;
            writeln!(
                out,
                "pulled {}: added {added}, removed {removed}",
                remote_members.len()
            )?;
        }
        SyncCmd::Push { library, remote } => {
            let client = client(&remote, settings)?;
            let catalog = workspace::catalog(settings)?;
            let l = catalog.resolve(&library)?;
            let remote_members = client.pull_library(&l.key)?.payload;
            let added = client
                .push_add(&l.key, l.members.difference(&remote_members).cloned())?
                .payload;
            let removed = client
                .push_remove(&l.key, remote_members.difference(&l.members).cloned())?
                .payload;
            writeln!(
                out,
                "pushed {}: added {added}, removed {removed}",
                l.members.len()
            )?;
        }
        SyncCmd::Verify { remote } => {
            let client = client(&remote, settings)?;
            let libs = workspace::curation_libraries(settings, None)?;
            let catalog = workspace::catalog(settings)?;
            let overlap = client
                .verify_remote_disjoint(&libs.relevant, &libs.irrelevant)?
                .payload;
            let mut problems = Vec::new();
            if !overlap.is_empty() {
                problems.push(format!(
                    "{} bibcodes in both remote libraries",
                    overlap.len()
                ));
                for b in &overlap {
                    writeln!(out, "overlap\t{b}")?;
                }
            }
            for key in [&libs.relevant, &libs.irrelevant] {
                let remote_members = client.pull_library(key)?.payload;
                let local = catalog
                    .members(key)
                    .cloned()
                    .unwrap_or_else(|_| BTreeSet::new());
                let (only_local, only_remote) = (
                    local.difference(&remote_members).count(),
                    remote_members.difference(&local).count(),
                );
                writeln!(out, "{key}\tlocal {}\tremote {}\tonly-local {only_local}\tonly-remote {only_remote}", local.len(), remote_members.len())?;
                if only_local + only_remote > 0 {
                    problems.push(format!("{key} differs between local and remote"));
                }
            }
            if !problems.is_empty() {
                return Err(CliError::user(problems.join("; ")));
            }
            writeln!(out, "ok")?;
        }
        SyncCmd::Search { query, remote } => {
            let client = client(&remote, settings)?;
            let selected = workspace::query(&query, settings)?;
            for b in client.remote_search(&selected.query, None)?.payload {
                writeln!(out, "{b}")?;
            }
        }
    }
    Ok(())
}
