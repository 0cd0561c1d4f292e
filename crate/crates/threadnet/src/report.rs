//! Thread-length motif profiles and CSV emission.
//!
//! All outputs are RFC 4180 CSV with `\n` terminators and a fixed row order
//! (thread id ascending, class id ascending, bins ascending), so repeated
//! runs over the same input are byte-identical. Floating-point columns print
//! the shortest round-trip decimal; hour columns are fixed to 2 decimals and
//! percentage columns to 1 decimal where the table formats say so.

use std::io::Write;

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::motif::{census_esu, CanonicalTable, MotifCensus, TriadClass};
use crate::null_model::{significance, NullEnsembleStats, RandomizationConfig};
use crate::reply_graph::{build_reply_graph, ReplyDigraph};
use crate::user_metrics::CategoryRow;
use crate::{Error, Result};

/// Thread-length bin edges: ascending, starting at 1, covering `[1, inf)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinSpec {
    edges: Vec<u64>,
}

impl BinSpec {
    /// The default bins: `[1,2), [2,4), ..., [256,512), [512,inf)`.
    pub fn powers_of_two() -> BinSpec {
        BinSpec {
            edges: vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512],
        }
    }

    pub fn new(edges: Vec<u64>) -> Result<BinSpec> {
        if edges.is_empty() {
            return Err(Error::InvalidBins("no edges given".to_string()));
        }
        if edges[0] != 1 {
            return Err(Error::InvalidBins(format!(
                "first edge must be 1 to cover all thread lengths, got {}",
                edges[0]
            )));
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBins(
                "edges must be strictly ascending".to_string(),
            ));
        }
        Ok(BinSpec { edges })
    }

    /// Parses a comma-separated ascending edge list, e.g. `1,2,4,8`.
    pub fn parse(s: &str) -> Result<BinSpec> {
        let edges = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::InvalidBins(format!("`{part}`: {e}")))
            })
            .collect::<Result<Vec<u64>>>()?;
        BinSpec::new(edges)
    }

    pub fn bin_count(&self) -> usize {
        self.edges.len()
    }

    /// `(lower, upper)` of bin `i`; `None` upper means unbounded.
    pub fn bounds(&self, i: usize) -> (u64, Option<u64>) {
        (self.edges[i], self.edges.get(i + 1).copied())
    }

    /// Index of the bin containing a thread of `len` posts.
    pub fn index_of(&self, len: u64) -> usize {
        debug_assert!(len >= 1);
        self.edges.partition_point(|&e| e <= len) - 1
    }
}

/// One `(length bin, triad class)` cell of the motif profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCell {
    pub bin_lower: u64,
    pub bin_upper: Option<u64>,
    /// Qualifying threads in the bin.
    pub threads: u64,
    pub class: TriadClass,
    /// Pooled count over the bin's threads.
    pub count: u64,
    /// Share of the bin's pooled census.
    pub concentration: f64,
    /// Mean z over member threads where z is defined.
    pub mean_z: Option<f64>,
    /// Member threads whose z is undefined for this class.
    pub z_excluded: u64,
}

struct BinAcc {
    threads: u64,
    census: MotifCensus,
    z_sum: [f64; 13],
    z_count: [u64; 13],
}

/// Per-bin pooled concentrations and mean z-scores across a corpus.
///
/// A thread qualifies when its reply graph contains at least one connected
/// triad; each qualifying thread is scored against its own randomized
/// ensemble, seeded per thread from the master seed. Cells cover every
/// populated bin crossed with all 13 classes.
pub fn motif_profile(
    corpus: &Corpus,
    bins: &BinSpec,
    config: &RandomizationConfig,
) -> Result<Vec<ProfileCell>> {
    config.validate()?;
    let threads: Vec<&crate::corpus::Thread> = corpus.threads().collect();
    // Indexed parallel map so the collected order is the thread-id order;
    // the float accumulation below then never depends on scheduling.
    let scored: Vec<(usize, NullEnsembleStats)> = threads
        .par_iter()
        .map(|t| {
            let g = build_reply_graph(t);
            match significance(&g, &config.for_thread(t.thread_id())) {
                Ok(stats) => Some((bins.index_of(t.len() as u64), stats)),
                Err(Error::EmptyCensus) => None,
                Err(e) => unreachable!("validated config cannot fail: {e}"),
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    if scored.is_empty() {
        return Err(Error::NoQualifyingThread);
    }

    let mut acc: Vec<BinAcc> = (0..bins.bin_count())
        .map(|_| BinAcc {
            threads: 0,
            census: MotifCensus::default(),
            z_sum: [0.0; 13],
            z_count: [0u64; 13],
        })
        .collect();
    // Accumulated in thread-id order so float sums never depend on
    // scheduling.
    for (bin, stats) in &scored {
        let slot = &mut acc[*bin];
        slot.threads += 1;
        for cs in &stats.per_class {
            let idx = cs.class.index();
            slot.census.add_many(cs.class, cs.observed);
            if let Some(z) = cs.z {
                slot.z_sum[idx] += z;
                slot.z_count[idx] += 1;
            }
        }
    }

    let mut cells = Vec::new();
    for (i, slot) in acc.iter().enumerate() {
        if slot.threads == 0 {
            continue;
        }
        let (lower, upper) = bins.bounds(i);
        let total = slot.census.total_connected_triads() as f64;
        for (class, count) in slot.census.iter() {
            let idx = class.index();
            cells.push(ProfileCell {
                bin_lower: lower,
                bin_upper: upper,
                threads: slot.threads,
                class,
                count,
                concentration: count as f64 / total,
                mean_z: (slot.z_count[idx] > 0)
                    .then(|| slot.z_sum[idx] / slot.z_count[idx] as f64),
                z_excluded: slot.threads - slot.z_count[idx],
            });
        }
    }
    Ok(cells)
}

fn float_field(x: f64) -> String {
    format!("{x}")
}

fn hours_field(x: f64) -> String {
    format!("{x:.2}")
}

fn percent_field(fraction: f64) -> String {
    format!("{:.1}", fraction * 100.0)
}

/// Census CSV: `thread_id,class_id,count,concentration`, 13 rows per
/// qualifying thread, thread ids ascending.
pub fn write_census_csv<W: Write>(w: W, corpus: &Corpus) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["thread_id", "class_id", "count", "concentration"])?;
    for thread in corpus.threads() {
        let census = census_esu(&build_reply_graph(thread));
        if census.is_empty() {
            continue;
        }
        let total = census.total_connected_triads() as f64;
        for (class, count) in census.iter() {
            out.write_record([
                thread.thread_id(),
                &class.to_string(),
                &count.to_string(),
                &float_field(count as f64 / total),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Debug dump of the canonical table: `code,class_id`, 54 rows.
pub fn write_canonical_table_csv<W: Write>(w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["code", "class_id"])?;
    for (code, id) in CanonicalTable::shared().rows() {
        out.write_record([&code.to_string(), &id.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Tab-separated edge list: `u\tv\tmultiplicity` per arc (author ids),
/// then isolated nodes as bare `u` lines.
pub fn write_edge_list<W: Write>(mut w: W, g: &ReplyDigraph) -> Result<()> {
    let ids = g.node_ids();
    for (u, v, m) in g.arcs() {
        writeln!(w, "{}\t{}\t{}", ids[u as usize], ids[v as usize], m)?;
    }
    for (i, id) in ids.iter().enumerate() {
        if g.undirected_neighbors(i as u32).is_empty() {
            writeln!(w, "{id}")?;
        }
    }
    Ok(())
}

/// Significance CSV for one graph (or a pooled aggregate): 13 rows.
pub fn write_significance_csv<W: Write>(
    w: W,
    label: &str,
    stats: &NullEnsembleStats,
    config: &RandomizationConfig,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "thread_id",
        "class_id",
        "observed",
        "mean_random",
        "std_random",
        "raw_diff",
        "z",
        "replicas",
        "swaps_per_edge",
        "seed",
    ])?;
    for cs in &stats.per_class {
        out.write_record([
            label,
            &cs.class.to_string(),
            &cs.observed.to_string(),
            &float_field(cs.mean_random),
            &float_field(cs.std_random),
            &float_field(cs.raw_diff),
            &cs.z.map(float_field).unwrap_or_default(),
            &config.replicas.to_string(),
            &config.swap_attempts_per_edge.to_string(),
            &config.master_seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Profile CSV: one row per populated bin and class.
pub fn write_profile_csv<W: Write>(w: W, cells: &[ProfileCell]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "bin_lower",
        "bin_upper",
        "threads",
        "class_id",
        "count",
        "concentration",
        "mean_z",
        "z_excluded",
    ])?;
    for cell in cells {
        out.write_record([
            &cell.bin_lower.to_string(),
            &cell.bin_upper.map(|u| u.to_string()).unwrap_or_default(),
            &cell.threads.to_string(),
            &cell.class.to_string(),
            &cell.count.to_string(),
            &float_field(cell.concentration),
            &cell.mean_z.map(float_field).unwrap_or_default(),
            &cell.z_excluded.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Activity table: population share and activity attributes per category.
pub fn write_table1_csv<W: Write>(w: W, rows: &[CategoryRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "category",
        "pct_users",
        "films",
        "threads",
        "posts",
        "thread_size",
        "posts_per_thread",
        "words_per_post",
        "life_per_thread",
        "birth_per_thread",
    ])?;
    for row in rows {
        out.write_record([
            row.category.label(),
            &percent_field(row.pct_users),
            &row.films.to_string(),
            &row.threads.to_string(),
            &row.posts.to_string(),
            &row.thread_size.to_string(),
            &row.posts_per_thread.to_string(),
            &row.words_per_post.to_string(),
            &hours_field(row.life_per_thread),
            &hours_field(row.birth_per_thread),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Social table: degrees, in/out ratio, and ignorance rates per category.
pub fn write_table2_csv<W: Write>(w: W, rows: &[CategoryRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "category",
        "in_per_thread",
        "out_per_thread",
        "in_out_per_thread",
        "pct_threads_initiated",
        "pct_ignored_initiating",
        "pct_ignored_noninitiating",
    ])?;
    for row in rows {
        out.write_record([
            row.category.label(),
            &row.in_per_thread.to_string(),
            &row.out_per_thread.to_string(),
            &float_field(row.in_out_per_thread),
            &percent_field(row.pct_threads_initiated),
            &row.pct_ignored_initiating.map(percent_field).unwrap_or_default(),
            &row
                .pct_ignored_noninitiating
                .map(percent_field)
                .unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
