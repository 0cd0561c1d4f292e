//! C ABI for the threadnet library.
//!
//! The surface follows the usual opaque-handle pattern: [`tn_corpus_open`]
//! yields a `*mut TnCorpus` that every query borrows and
//! [`tn_corpus_free`] releases. All functions return a [`TnStatus`] code and
//! write results through out-pointers; panics are caught at the boundary and
//! reported as `TN_STATUS_PANIC`. Strings returned by this library must be
//! released with [`tn_string_free`].
//!
//! The generated header lives at `include/threadnet.h`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use threadnet::corpus::{ingest_corpus, Corpus, IngestMode};
use threadnet::motif::{census_esu, CanonicalTable, TRIAD_CLASS_IDS};
use threadnet::null_model::{
    significance, significance_pooled, NullEnsembleStats, RandomizationConfig,
};
use threadnet::reply_graph::build_reply_graph;
use threadnet::report::{
    motif_profile, write_profile_csv, write_table1_csv, write_table2_csv, BinSpec,
};
use threadnet::rng::thread_seed;
use threadnet::user_metrics::{category_report, compute_user_activities, PercentageMode};
use threadnet::Error;

/// Number of connected 3-node motif classes.
pub const TN_TRIAD_CLASS_COUNT: usize = 13;

/// Result codes returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TnStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input file could not be read or an output could not be written.
    Io = 3,
    /// A corpus line could not be parsed.
    Parse = 4,
    /// A corpus invariant was violated in strict mode.
    Validation = 5,
    /// The requested thread or user does not exist.
    NotFound = 6,
    /// The corpus or census has nothing to analyze.
    Empty = 7,
    /// An argument was out of range or otherwise invalid.
    InvalidArgument = 8,
    /// An internal invariant failed.
    Internal = 9,
    /// A panic was caught at the ABI boundary.
    Panic = 10,
}

fn status_of(err: &Error) -> TnStatus {
    match err {
        Error::Io { .. } | Error::Csv(_) | Error::OutputIo(_) => TnStatus::Io,
        Error::MalformedLine { .. } => TnStatus::Parse,
        Error::Validation(_) => TnStatus::Validation,
        Error::UnknownThread(_) | Error::UnknownUser(_) | Error::UserNotInThread { .. } => {
            TnStatus::NotFound
        }
        Error::EmptyCorpus | Error::EmptyCensus | Error::NoQualifyingThread => TnStatus::Empty,
        Error::DisconnectedTriad
        | Error::InvalidTriadCode(_)
        | Error::BruteForceGuard { .. }
        | Error::InvalidConfig(_)
        | Error::Precondition(_, _)
        | Error::InvalidBins(_) => TnStatus::InvalidArgument,
        Error::CanonicalTable(_) => TnStatus::Internal,
    }
}

/// Short static description of a status code.
#[no_mangle]
pub extern "C" fn tn_status_name(status: TnStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        TnStatus::Ok => b"ok\0",
        TnStatus::NullPointer => b"null pointer\0",
        TnStatus::InvalidUtf8 => b"invalid utf-8\0",
        TnStatus::Io => b"io error\0",
        TnStatus::Parse => b"parse error\0",
        TnStatus::Validation => b"validation error\0",
        TnStatus::NotFound => b"not found\0",
        TnStatus::Empty => b"empty result\0",
        TnStatus::InvalidArgument => b"invalid argument\0",
        TnStatus::Internal => b"internal error\0",
        TnStatus::Panic => b"panic\0",
    };
    name.as_ptr().cast()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// An ingested corpus. Opaque; create with `tn_corpus_open`, release with
/// `tn_corpus_free`.
pub struct TnCorpus {
    inner: Corpus,
}

/// Corpus cardinalities.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TnCorpusStats {
    pub films: u64,
    pub threads: u64,
    pub posts: u64,
    pub users: u64,
}

/// Null-model parameters; mirrors the CLI flags.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TnNullConfig {
    pub replicas: u32,
    pub swaps_per_edge: u32,
    pub preserve_reciprocal: bool,
    pub seed: u64,
}

/// Per-class significance row.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TnClassStats {
    pub class_id: u16,
    pub observed: u64,
    pub mean_random: f64,
    pub std_random: f64,
    pub raw_diff: f64,
    /// Meaningful only when `z_defined` is true.
    pub z: f64,
    pub z_defined: bool,
}

fn guarded(body: impl FnOnce() -> TnStatus) -> TnStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => TnStatus::Panic,
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, TnStatus> {
    if ptr.is_null() {
        return Err(TnStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| TnStatus::InvalidUtf8)
}

/// Ingests a JSONL corpus file.
///
/// With `strict` set, the first invariant violation aborts with
/// `TN_STATUS_VALIDATION`; otherwise violations are repaired and listed in
/// the plain-text validation report. When `out_report` is non-null it
/// receives that report as a string to be released with
/// [`tn_string_free`]. On success `*out` owns the corpus.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer;
/// `out_report` may be null.
#[no_mangle]
pub unsafe extern "C" fn tn_corpus_open(
    path: *const c_char,
    strict: bool,
    out: *mut *mut TnCorpus,
    out_report: *mut *mut c_char,
) -> TnStatus {
    guarded(|| {
        if out.is_null() {
            return TnStatus::NullPointer;
        }
        let path = match cstr_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let mode = if strict {
            IngestMode::Strict
        } else {
            IngestMode::Lenient
        };
        match ingest_corpus(Path::new(path), mode) {
            Ok(outcome) => {
                if !out_report.is_null() {
                    match CString::new(outcome.report.to_string()) {
                        Ok(s) => out_report.write(s.into_raw()),
                        Err(_) => return TnStatus::Internal,
                    }
                }
                out.write(Box::into_raw(Box::new(TnCorpus {
                    inner: outcome.corpus,
                })));
                TnStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a corpus handle. A null handle is a no-op.
///
/// # Safety
/// `corpus` must be null or a pointer returned by [`tn_corpus_open`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn tn_corpus_free(corpus: *mut TnCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Exact corpus cardinalities.
///
/// # Safety
/// `corpus` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tn_corpus_stats(
    corpus: *const TnCorpus,
    out: *mut TnCorpusStats,
) -> TnStatus {
    guarded(|| {
        if corpus.is_null() || out.is_null() {
            return TnStatus::NullPointer;
        }
        let stats = (*corpus).inner.stats();
        out.write(TnCorpusStats {
            films: stats.n_films,
            threads: stats.n_threads,
            posts: stats.n_posts,
            users: stats.n_users,
        });
        TnStatus::Ok
    })
}

/// Writes the 13 canonical class ids, ascending, into `out_ids`.
///
/// # Safety
/// `out_ids` must point to at least [`TN_TRIAD_CLASS_COUNT`] writable `u16`s.
#[no_mangle]
pub unsafe extern "C" fn tn_triad_class_ids(out_ids: *mut u16) -> TnStatus {
    guarded(|| {
        if out_ids.is_null() {
            return TnStatus::NullPointer;
        }
        for (i, id) in TRIAD_CLASS_IDS.iter().enumerate() {
            out_ids.add(i).write(*id);
        }
        TnStatus::Ok
    })
}

/// Classifies a 9-bit row-major adjacency code of a connected 3-node
/// digraph. Disconnected or diagonal-bearing codes yield
/// `TN_STATUS_INVALID_ARGUMENT`.
///
/// # Safety
/// `out_class` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tn_classify_code(code: u16, out_class: *mut u16) -> TnStatus {
    guarded(|| {
        if out_class.is_null() {
            return TnStatus::NullPointer;
        }
        match CanonicalTable::shared().classify_code(code) {
            Ok(class) => {
                out_class.write(class.id());
                TnStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Exact motif census of one thread's reply graph. `out_counts` receives the
/// 13 per-class counts in ascending class-id order; `out_total` (optional,
/// may be null) receives the total number of connected triads.
///
/// # Safety
/// `corpus` must be a live handle, `thread_id` a valid NUL-terminated string,
/// and `out_counts` must point to [`TN_TRIAD_CLASS_COUNT`] writable `u64`s.
#[no_mangle]
pub unsafe extern "C" fn tn_thread_census(
    corpus: *const TnCorpus,
    thread_id: *const c_char,
    out_counts: *mut u64,
    out_total: *mut u64,
) -> TnStatus {
    guarded(|| {
        if corpus.is_null() || out_counts.is_null() {
            return TnStatus::NullPointer;
        }
        let thread_id = match cstr_arg(thread_id) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let Some(thread) = (*corpus).inner.thread(thread_id) else {
            return TnStatus::NotFound;
        };
        let census = census_esu(&build_reply_graph(thread));
        for (i, (_, count)) in census.iter().enumerate() {
            out_counts.add(i).write(count);
        }
        if !out_total.is_null() {
            out_total.write(census.total_connected_triads());
        }
        TnStatus::Ok
    })
}

fn config_of(config: &TnNullConfig) -> RandomizationConfig {
    RandomizationConfig {
        replicas: config.replicas,
        swap_attempts_per_edge: config.swaps_per_edge,
        preserve_reciprocal: config.preserve_reciprocal,
        master_seed: config.seed,
    }
}

unsafe fn write_class_stats(stats: &NullEnsembleStats, out: *mut TnClassStats) {
    for (i, cs) in stats.per_class.iter().enumerate() {
        out.add(i).write(TnClassStats {
            class_id: cs.class.id(),
            observed: cs.observed,
            mean_random: cs.mean_random,
            std_random: cs.std_random,
            raw_diff: cs.raw_diff,
            z: cs.z.unwrap_or(0.0),
            z_defined: cs.z.is_some(),
        });
    }
}

/// Motif significance of one thread against its randomized ensemble.
/// The thread's replica stream is derived from `config.seed` and the thread
/// id, matching the CLI. `out` receives 13 rows in ascending class order.
/// Threads without connected triads yield `TN_STATUS_EMPTY`.
///
/// # Safety
/// `corpus` must be a live handle, `thread_id` a valid NUL-terminated string,
/// `config` a valid pointer, and `out` must point to
/// [`TN_TRIAD_CLASS_COUNT`] writable [`TnClassStats`].
#[no_mangle]
pub unsafe extern "C" fn tn_thread_significance(
    corpus: *const TnCorpus,
    thread_id: *const c_char,
    config: *const TnNullConfig,
    out: *mut TnClassStats,
) -> TnStatus {
    guarded(|| {
        if corpus.is_null() || config.is_null() || out.is_null() {
            return TnStatus::NullPointer;
        }
        let thread_id = match cstr_arg(thread_id) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let Some(thread) = (*corpus).inner.thread(thread_id) else {
            return TnStatus::NotFound;
        };
        let cfg = config_of(&*config);
        let graph = build_reply_graph(thread);
        match significance(&graph, &cfg.for_thread(thread_id)) {
            Ok(stats) => {
                write_class_stats(&stats, out);
                TnStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Pooled motif significance over every thread of the corpus: observed
/// censuses are summed and each thread is randomized with its own derived
/// seed, matching `threadnet nullmodel --aggregate`.
///
/// # Safety
/// `corpus` must be a live handle, `config` a valid pointer, and `out` must
/// point to [`TN_TRIAD_CLASS_COUNT`] writable [`TnClassStats`].
#[no_mangle]
pub unsafe extern "C" fn tn_aggregate_significance(
    corpus: *const TnCorpus,
    config: *const TnNullConfig,
    out: *mut TnClassStats,
) -> TnStatus {
    guarded(|| {
        if corpus.is_null() || config.is_null() || out.is_null() {
            return TnStatus::NullPointer;
        }
        let cfg = config_of(&*config);
        let corpus = &(*corpus).inner;
        let graphs: Vec<_> = corpus.threads().map(build_reply_graph).collect();
        let seeds: Vec<u64> = corpus
            .threads()
            .map(|t| thread_seed(cfg.master_seed, t.thread_id()))
            .collect();
        match significance_pooled(&graphs, &cfg, &seeds) {
            Ok(stats) => {
                write_class_stats(&stats, out);
                TnStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

unsafe fn write_csv_string(
    out: *mut *mut c_char,
    render: impl FnOnce(&mut Vec<u8>) -> threadnet::Result<()>,
) -> TnStatus {
    let mut buf = Vec::new();
    if let Err(e) = render(&mut buf) {
        return status_of(&e);
    }
    match CString::new(buf) {
        Ok(s) => {
            out.write(s.into_raw());
            TnStatus::Ok
        }
        Err(_) => TnStatus::Internal,
    }
}

/// Renders the per-category user tables as two CSV strings (activity and
/// social attributes). With `median_percentages` set, percentage columns are
/// medians of per-user fractions instead of pooled rates. Both strings must
/// be released with [`tn_string_free`]. An empty corpus yields
/// `TN_STATUS_EMPTY`.
///
/// # Safety
/// `corpus` must be a live handle; `out_table1` and `out_table2` must be
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tn_user_tables_csv(
    corpus: *const TnCorpus,
    median_percentages: bool,
    out_table1: *mut *mut c_char,
    out_table2: *mut *mut c_char,
) -> TnStatus {
    guarded(|| {
        if corpus.is_null() || out_table1.is_null() || out_table2.is_null() {
            return TnStatus::NullPointer;
        }
        let mode = if median_percentages {
            PercentageMode::MedianOfUsers
        } else {
            PercentageMode::Pooled
        };
        let activities = compute_user_activities(&(*corpus).inner);
        let rows = match category_report(&activities, mode) {
            Ok(rows) => rows,
            Err(e) => return status_of(&e),
        };
        let status = write_csv_string(out_table1, |w| write_table1_csv(w, &rows));
        if status != TnStatus::Ok {
            return status;
        }
        let status = write_csv_string(out_table2, |w| write_table2_csv(w, &rows));
        if status != TnStatus::Ok {
            // Do not leak the first string on a second-stage failure.
            tn_string_free(*out_table1);
            out_table1.write(std::ptr::null_mut());
            return status;
        }
        TnStatus::Ok
    })
}

/// Renders the thread-length motif profile as CSV. `bins` is a
/// comma-separated ascending edge list starting at 1, or null for the
/// default powers-of-two bins. The string must be released with
/// [`tn_string_free`]. A corpus with no connected triads yields
/// `TN_STATUS_EMPTY`.
///
/// # Safety
/// `corpus` must be a live handle, `config` a valid pointer, `out_csv` a
/// valid pointer; `bins` may be null or a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tn_profile_csv(
    corpus: *const TnCorpus,
    bins: *const c_char,
    config: *const TnNullConfig,
    out_csv: *mut *mut c_char,
) -> TnStatus {
    guarded(|| {
        if corpus.is_null() || config.is_null() || out_csv.is_null() {
            return TnStatus::NullPointer;
        }
        let bins = if bins.is_null() {
            BinSpec::powers_of_two()
        } else {
            let spec = match cstr_arg(bins) {
                Ok(s) => s,
                Err(status) => return status,
            };
            match BinSpec::parse(spec) {
                Ok(b) => b,
                Err(e) => return status_of(&e),
            }
        };
        let cells = match motif_profile(&(*corpus).inner, &bins, &config_of(&*config)) {
            Ok(cells) => cells,
            Err(e) => return status_of(&e),
        };
        write_csv_string(out_csv, |w| write_profile_csv(w, &cells))
    })
}

/// Releases a string returned by this library. A null pointer is a no-op.
///
/// # Safety
/// `s` must be null or a pointer returned by a `tn_*` function that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn tn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
