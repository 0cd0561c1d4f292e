//! Analysis toolkit for threaded-forum corpora.
//!
//! The pipeline goes: ingest a JSONL corpus ([`corpus`]), build one directed
//! reply graph per discussion thread ([`reply_graph`]), run an exact census of
//! connected 3-node motifs with canonical ids ([`motif`]), score motif counts
//! against degree-preserving randomized ensembles ([`null_model`]), and compute
//! per-user activity and social attributes with a five-way user taxonomy
//! ([`user_metrics`]). [`report`] turns all of it into CSV, and [`cli`] wires
//! the subcommands of the `threadnet` binary.

pub mod cli;
pub mod corpus;
pub mod motif;
pub mod null_model;
pub mod reply_graph;
pub mod report;
pub mod rng;
pub mod user_metrics;

use std::path::PathBuf;

pub use corpus::{Corpus, CorpusStats, IngestMode, IngestOutcome, Post, Thread, ValidationReport};
pub use motif::{CanonicalTable, MotifCensus, TriadClass};
pub use null_model::{ClassStats, NullEnsembleStats, RandomizationConfig};
pub use reply_graph::ReplyDigraph;
pub use user_metrics::{UserActivity, UserCategory};

/// Errors produced by every layer of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("validation: {0}")]
    Validation(corpus::ValidationEvent),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("unknown thread `{0}`")]
    UnknownThread(String),
    #[error("unknown user `{0}`")]
    UnknownUser(String),
    #[error("user `{user}` has no post in thread `{thread}`")]
    UserNotInThread { user: String, thread: String },
    #[error("canonical table self-check failed: {0}")]
    CanonicalTable(String),
    #[error("triad is disconnected")]
    DisconnectedTriad,
    #[error("not a valid 3-node adjacency code: {0}")]
    InvalidTriadCode(u16),
    #[error("graph has {n} nodes, brute-force census is limited to {max}")]
    BruteForceGuard { n: usize, max: usize },
    #[error("census has no connected triads")]
    EmptyCensus,
    #[error("invalid randomization config: {0}")]
    InvalidConfig(String),
    #[error("{0} precondition violated: {1}")]
    Precondition(&'static str, String),
    #[error("invalid bin edges: {0}")]
    InvalidBins(String),
    #[error("no qualifying thread")]
    NoQualifyingThread,
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("output failed: {0}")]
    OutputIo(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 0 success, 1 validation failure,
    /// 2 usage error, 3 empty-result error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::MalformedLine { .. }
            | Error::Validation(_)
            | Error::Csv(_)
            | Error::OutputIo(_) => 1,
            Error::EmptyCorpus | Error::EmptyCensus | Error::NoQualifyingThread => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
