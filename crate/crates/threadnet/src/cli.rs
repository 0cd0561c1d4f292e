//! The `threadnet` command line: validate, stats, users, motifs, nullmodel,
//! profile.
//!
//! Every command is a deterministic function of the input bytes, the flags,
//! and the seed; outputs are CSV files in `--out` (plus a plain-text
//! validation report on standard error). Exit codes: 0 success, 1 validation
//! failure, 2 usage error, 3 empty-result error.
//!
//! Commands that randomize more than one thread derive a per-thread
//! sub-master seed from `--seed` and the thread id (see [`crate::rng`]), so
//! `nullmodel --thread X` agrees with the per-thread scores behind `profile`
//! for the same seed.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::corpus::{ingest_corpus, Corpus, IngestMode, ValidationReport};
use crate::null_model::{significance, significance_pooled, RandomizationConfig};
use crate::reply_graph::build_reply_graph;
use crate::report::{
    motif_profile, write_canonical_table_csv, write_census_csv, write_edge_list,
    write_profile_csv, write_significance_csv, write_table1_csv, write_table2_csv, BinSpec,
};
use crate::rng::thread_seed;
use crate::user_metrics::{category_report, compute_user_activities, PercentageMode};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "threadnet",
    version,
    about = "Reply-graph motif and user-activity analytics for threaded-forum corpora"
)]
pub struct Cli {
    /// JSONL corpus file (one post object per line).
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Directory for CSV outputs; created if missing.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Abort on the first invariant violation instead of repairing.
    #[arg(long, global = true)]
    strict: bool,

    /// Master seed for randomized ensembles.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    seed: u64,

    /// Replicas per randomized ensemble.
    #[arg(long, global = true, default_value_t = 100, value_name = "N")]
    replicas: u32,

    /// Attempted arc swaps per arc when randomizing.
    #[arg(long, global = true, default_value_t = 10, value_name = "N")]
    swaps_per_edge: u32,

    /// Allow swaps that change the number of mutual pairs.
    #[arg(long, global = true)]
    no_preserve_reciprocal: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check corpus invariants; report to standard error.
    Validate,
    /// Print corpus cardinalities.
    Stats,
    /// Write per-category user tables: table1.csv and table2.csv.
    Users {
        /// Aggregate percentage columns as medians of per-user fractions.
        #[arg(long, conflicts_with = "pooled")]
        median_percentages: bool,
        /// Aggregate percentage columns pooled over users (the default).
        #[arg(long)]
        pooled: bool,
    },
    /// Write per-thread motif censuses: census.csv.
    Motifs {
        /// Also dump the 54-row canonical code table: canonical_table.csv.
        #[arg(long)]
        dump_canonical_table: bool,
        /// Also export one thread's reply graph as a tab-separated edge list.
        #[arg(long, value_name = "THREAD_ID")]
        export_graph: Option<String>,
    },
    /// Write motif significance against randomized ensembles:
    /// significance.csv.
    Nullmodel {
        /// Score a single thread.
        #[arg(
            long,
            value_name = "THREAD_ID",
            conflicts_with = "aggregate",
            required_unless_present = "aggregate"
        )]
        thread: Option<String>,
        /// Pool per-thread censuses over the whole corpus.
        #[arg(long)]
        aggregate: bool,
    },
    /// Write the thread-length motif profile: profile.csv.
    Profile {
        /// Comma-separated ascending bin edges, starting at 1.
        #[arg(long, default_value = "1,2,4,8,16,32,64,128,256,512", value_name = "EDGES")]
        bins: String,
    },
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let mode = if cli.strict {
        IngestMode::Strict
    } else {
        IngestMode::Lenient
    };
    let config = RandomizationConfig {
        replicas: cli.replicas,
        swap_attempts_per_edge: cli.swaps_per_edge,
        preserve_reciprocal: !cli.no_preserve_reciprocal,
        master_seed: cli.seed,
    };

    match &cli.command {
        Command::Validate => {
            let outcome = ingest_corpus(required_input(&cli)?, mode)?;
            println!("{}", outcome.corpus.stats());
            eprint!("{}", outcome.report);
            Ok(if outcome.report.is_clean() { 0 } else { 1 })
        }
        Command::Stats => {
            let (corpus, report) = load(&cli, mode)?;
            warn_report(&report);
            println!("{}", corpus.stats());
            Ok(0)
        }
        Command::Users {
            median_percentages, ..
        } => {
            let (corpus, report) = load(&cli, mode)?;
            warn_report(&report);
            let out_dir = required_out(&cli)?;
            let pct_mode = if *median_percentages {
                PercentageMode::MedianOfUsers
            } else {
                PercentageMode::Pooled
            };
            let activities = compute_user_activities(&corpus);
            let rows = category_report(&activities, pct_mode)?;
            write_file(&out_dir, "table1.csv", |w| write_table1_csv(w, &rows))?;
            write_file(&out_dir, "table2.csv", |w| write_table2_csv(w, &rows))?;
            Ok(0)
        }
        Command::Motifs {
            dump_canonical_table,
            export_graph,
        } => {
            let (corpus, report) = load(&cli, mode)?;
            warn_report(&report);
            let out_dir = required_out(&cli)?;
            write_file(&out_dir, "census.csv", |w| write_census_csv(w, &corpus))?;
            if *dump_canonical_table {
                write_file(&out_dir, "canonical_table.csv", |w| {
                    write_canonical_table_csv(w)
                })?;
            }
            if let Some(thread_id) = export_graph {
                let thread = corpus
                    .thread(thread_id)
                    .ok_or_else(|| Error::UnknownThread(thread_id.clone()))?;
                let graph = build_reply_graph(thread);
                let name = format!("graph-{}.tsv", sanitize(thread_id));
                write_file(&out_dir, &name, |w| write_edge_list(w, &graph))?;
            }
            Ok(0)
        }
        Command::Nullmodel { thread, aggregate } => {
            let (corpus, report) = load(&cli, mode)?;
            warn_report(&report);
            let out_dir = required_out(&cli)?;
            let (label, stats) = if *aggregate {
                let graphs: Vec<_> = corpus.threads().map(build_reply_graph).collect();
                let seeds: Vec<u64> = corpus
                    .threads()
                    .map(|t| thread_seed(config.master_seed, t.thread_id()))
                    .collect();
                (
                    "aggregate".to_string(),
                    significance_pooled(&graphs, &config, &seeds)?,
                )
            } else {
                let thread_id = thread.as_deref().expect("clap enforces thread|aggregate");
                let t = corpus
                    .thread(thread_id)
                    .ok_or_else(|| Error::UnknownThread(thread_id.to_string()))?;
                let graph = build_reply_graph(t);
                (
                    thread_id.to_string(),
                    significance(&graph, &config.for_thread(thread_id))?,
                )
            };
            write_file(&out_dir, "significance.csv", |w| {
                write_significance_csv(w, &label, &stats, &config)
            })?;
            Ok(0)
        }
        Command::Profile { bins } => {
            let (corpus, report) = load(&cli, mode)?;
            warn_report(&report);
            let out_dir = required_out(&cli)?;
            let bins = BinSpec::parse(bins)?;
            let cells = motif_profile(&corpus, &bins, &config)?;
            write_file(&out_dir, "profile.csv", |w| write_profile_csv(w, &cells))?;
            Ok(0)
        }
    }
}

fn required_input(cli: &Cli) -> Result<&Path> {
    cli.input
        .as_deref()
        .ok_or_else(|| Error::Precondition("cli", "--input is required".to_string()))
}

fn required_out(cli: &Cli) -> Result<PathBuf> {
    let dir = cli
        .out
        .as_deref()
        .ok_or_else(|| Error::Precondition("cli", "--out is required".to_string()))?;
    fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}

fn load(cli: &Cli, mode: IngestMode) -> Result<(Corpus, ValidationReport)> {
    let outcome = ingest_corpus(required_input(cli)?, mode)?;
    Ok((outcome.corpus, outcome.report))
}

fn warn_report(report: &ValidationReport) {
    if !report.is_clean() {
        eprint!("{report}");
    }
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    body(&mut w)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn sanitize(thread_id: &str) -> String {
    thread_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}
