//! Command-line grammar.

use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "livebib",
    version,
    about = "Curate a living bibliography from a local corpus"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Corpus file (JSON lines).
    #[arg(long, global = true, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Catalog snapshot; created on first write.
    #[arg(long, global = true, value_name = "FILE")]
    pub catalog: Option<PathBuf>,
    /// Append-only decision log.
    #[arg(long, global = true, value_name = "FILE")]
    pub decisions: Option<PathBuf>,
    /// Name recorded with decisions and catalog changes.
    #[arg(long, global = true)]
    pub curator: Option<String>,
    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct QueryOpts {
    /// A stored search string: strict or broad.
    #[arg(long, conflicts_with = "query")]
    pub preset: Option<String>,
    /// A search string in the query language.
    #[arg(long)]
    pub query: Option<String>,
    /// Restrict to one publication year.
    #[arg(long)]
    pub year: Option<u16>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corpus inspection.
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Evaluate a query against the corpus and print matching bibcodes.
    Search {
        #[command(flatten)]
        query: QueryOpts,
        /// Print the matched terms for each hit.
        #[arg(long)]
        explain: bool,
        /// Print the result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Library management.
    #[command(subcommand)]
    Lib(LibCmd),
    /// The fixpoint update workflow.
    #[command(subcommand)]
    Update(UpdateCmd),
    /// Interactive triage through the local HTTP API.
    #[command(subcommand)]
    Triage(TriageCmd),
    /// Citation statistics for a library.
    Stats {
        /// Library key or name.
        #[arg(long)]
        library: String,
        /// markdown, csv or json.
        #[arg(long, default_value = "markdown")]
        format: String,
        /// Also print the publication-year histogram.
        #[arg(long)]
        histogram: bool,
    },
    /// Monthly digest of relevant decisions.
    Digest {
        /// Month as YYYY-MM.
        #[arg(long)]
        month: String,
        /// Write the markdown here instead of standard output.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Also replace the staging library with the month's records.
        #[arg(long)]
        stage: bool,
    },
    /// Exchange libraries with the remote service.
    #[command(subcommand)]
    Sync(SyncCmd),
}

#[derive(Debug, Subcommand)]
pub enum CorpusCmd {
    /// Validate a corpus file and summarize it.
    Load {
        /// Defaults to the configured corpus.
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum LibCmd {
    /// Create an empty library and print its key.
    Create {
        name: String,
        /// Use this key instead of a random one.
        #[arg(long)]
        key: Option<String>,
        #[arg(long, default_value = "")]
        description: String,
    },
    /// Add bibcodes to a library.
    Add {
        library: String,
        bibcodes: Vec<String>,
        /// Read bibcodes from a file, one per line.
        #[arg(long, value_name = "FILE")]
        file: Option<PathBuf>,
    },
    /// Remove bibcodes from a library.
    Remove {
        library: String,
        bibcodes: Vec<String>,
        #[arg(long, value_name = "FILE")]
        file: Option<PathBuf>,
    },
    /// Union, intersection or difference of two libraries.
    Op {
        op: String,
        a: String,
        b: String,
        /// Store the result as a new library with this name.
        #[arg(long, value_name = "NAME")]
        into: Option<String>,
    },
    /// List libraries.
    List,
    /// Print a library's members.
    Show { library: String },
}

#[derive(Debug, Subcommand)]
pub enum UpdateCmd {
    /// Run the search, classify new hits from a batch file and repeat until
    /// nothing new appears. Without --batch, only lists what needs review.
    Run {
        #[command(flatten)]
        query: QueryOpts,
        /// Decisions as tab-separated lines: bibcode, verdict, tags, note.
        #[arg(long, value_name = "FILE")]
        batch: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum TriageCmd {
    /// Serve the triage API until interrupted.
    Serve {
        #[command(flatten)]
        query: QueryOpts,
        #[arg(long)]
        addr: Option<SocketAddr>,
        /// Browser origin allowed to call the API.
        #[arg(long)]
        dev_origin: Option<String>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct RemoteOpts {
    /// Remote API base URL.
    #[arg(long)]
    pub remote_url: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum SyncCmd {
    /// Replace a local library's members with the remote library's.
    Pull {
        library: String,
        #[command(flatten)]
        remote: RemoteOpts,
    },
    /// Make the remote library equal to the local one.
    Push {
        library: String,
        #[command(flatten)]
        remote: RemoteOpts,
    },
    /// Check the curation libraries remotely: disjoint, and equal to local.
    Verify {
        #[command(flatten)]
        remote: RemoteOpts,
    },
    /// Run a query on the remote service.
    Search {
        #[command(flatten)]
        query: QueryOpts,
        #[command(flatten)]
        remote: RemoteOpts,
    },
}
