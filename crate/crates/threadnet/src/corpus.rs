//! Forum data model: posts, threads, corpus indices, and JSONL ingestion.
//!
//! Input is line-delimited JSON, one post per line, with required keys
//! `post_id`, `thread_id`, `film_id`, `author_id`, `timestamp` (RFC 3339 UTC,
//! second resolution) and optional `parent_post_id` and `text`. Unknown keys
//! are ignored, whitespace-only lines are skipped.
//!
//! Within a thread, posts are kept in canonical order: ascending timestamp,
//! ties broken by post id. The root of a thread is the first post in that
//! order. Strict ingestion aborts on the first invariant violation; lenient
//! ingestion repairs and records every violation in a [`ValidationReport`]:
//! malformed lines, duplicate ids (first occurrence kept), self-parent and
//! time-inverted posts are dropped, unresolvable parent references are
//! cleared so the post becomes a root, and extra parentless posts are kept as
//! secondary roots.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use time::format_description::well_known::Rfc3339;

use crate::{Error, Result};

/// Abort on the first violation, or repair and report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IngestMode {
    Strict,
    #[default]
    Lenient,
}

/// One forum post. Timestamps are seconds since the Unix epoch, UTC; all
/// hour-valued metrics downstream stay real-valued until report emission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Post {
    pub post_id: String,
    pub thread_id: String,
    pub author_id: String,
    pub timestamp: i64,
    pub parent_post_id: Option<String>,
    pub text: String,
}

/// The JSONL wire form. `film_id` lives on the record and on [`Thread`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawRecord {
    post_id: String,
    thread_id: String,
    film_id: String,
    author_id: String,
    timestamp: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    parent_post_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    text: Option<String>,
}

fn parse_timestamp(s: &str) -> std::result::Result<i64, String> {
    time::OffsetDateTime::parse(s, &Rfc3339)
        .map(|dt| dt.unix_timestamp())
        .map_err(|e| format!("bad timestamp `{s}`: {e}"))
}

/// RFC 3339 with a literal `Z`, second resolution.
pub fn format_timestamp(ts: i64) -> String {
    let dt = time::OffsetDateTime::from_unix_timestamp(ts).expect("timestamp in range");
    format!(
        "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z",
        dt.year(),
        u8::from(dt.month()),
        dt.day(),
        dt.hour(),
        dt.minute(),
        dt.second()
    )
}

/// A discussion thread: non-empty, posts in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thread {
    thread_id: String,
    film_id: String,
    posts: Vec<Post>,
    by_id: BTreeMap<String, usize>,
}

impl Thread {
    fn new(thread_id: String, film_id: String, posts: Vec<Post>) -> Thread {
        debug_assert!(!posts.is_empty());
        let by_id = posts
            .iter()
            .enumerate()
            .map(|(i, p)| (p.post_id.clone(), i))
            .collect();
        Thread {
            thread_id,
            film_id,
            posts,
            by_id,
        }
    }

    pub fn thread_id(&self) -> &str {
        &self.thread_id
    }

    pub fn film_id(&self) -> &str {
        &self.film_id
    }

    /// Posts in canonical order (timestamp, then post id).
    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    /// Thread length: the number of posts.
    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// The thread-initiating post: first in canonical order.
    pub fn root(&self) -> &Post {
        &self.posts[0]
    }

    pub fn post_by_id(&self, post_id: &str) -> Option<&Post> {
        self.by_id.get(post_id).map(|&i| &self.posts[i])
    }
}

/// Exact corpus cardinalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CorpusStats {
    pub n_films: u64,
    pub n_threads: u64,
    pub n_posts: u64,
    pub n_users: u64,
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} films / {} threads / {} posts / {} users",
            self.n_films, self.n_threads, self.n_posts, self.n_users
        )
    }
}

/// user -> thread id -> ascending indices of the user's posts.
type UserIndex = BTreeMap<String, BTreeMap<String, Vec<usize>>>;
/// film -> thread ids.
type FilmIndex = BTreeMap<String, BTreeSet<String>>;

/// An immutable, indexed collection of threads.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    threads: BTreeMap<String, Thread>,
    user_index: UserIndex,
    film_index: FilmIndex,
}

impl Corpus {
    fn from_threads(threads: BTreeMap<String, Thread>) -> Corpus {
        let (user_index, film_index) = derive_indices(&threads);
        Corpus {
            threads,
            user_index,
            film_index,
        }
    }

    /// Threads in ascending thread-id order.
    pub fn threads(&self) -> impl Iterator<Item = &Thread> {
        self.threads.values()
    }

    pub fn thread(&self, thread_id: &str) -> Option<&Thread> {
        self.threads.get(thread_id)
    }

    /// Users in ascending id order.
    pub fn users(&self) -> impl Iterator<Item = &String> {
        self.user_index.keys()
    }

    /// Per-user activity index: thread id -> indices of the user's posts.
    pub fn posts_by_user(&self, user: &str) -> Option<&BTreeMap<String, Vec<usize>>> {
        self.user_index.get(user)
    }

    pub fn films(&self) -> impl Iterator<Item = &String> {
        self.film_index.keys()
    }

    pub fn stats(&self) -> CorpusStats {
        CorpusStats {
            n_films: self.film_index.len() as u64,
            n_threads: self.threads.len() as u64,
            n_posts: self.threads.values().map(|t| t.len() as u64).sum(),
            n_users: self.user_index.len() as u64,
        }
    }

    /// Re-derives both indices from the threads and compares.
    pub fn verify_indices(&self) -> bool {
        let (user_index, film_index) = derive_indices(&self.threads);
        user_index == self.user_index && film_index == self.film_index
    }

    /// Serializes the corpus back to JSONL: threads in id order, posts in
    /// canonical order. Re-ingesting the output yields an equal corpus.
    pub fn write_jsonl<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for thread in self.threads.values() {
            for post in thread.posts() {
                let record = RawRecord {
                    post_id: post.post_id.clone(),
                    thread_id: post.thread_id.clone(),
                    film_id: thread.film_id.clone(),
                    author_id: post.author_id.clone(),
                    timestamp: format_timestamp(post.timestamp),
                    parent_post_id: post.parent_post_id.clone(),
                    text: if post.text.is_empty() {
                        None
                    } else {
                        Some(post.text.clone())
                    },
                };
                serde_json::to_writer(&mut *w, &record)?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }
}

fn derive_indices(threads: &BTreeMap<String, Thread>) -> (UserIndex, FilmIndex) {
    let mut user_index: UserIndex = BTreeMap::new();
    let mut film_index: FilmIndex = BTreeMap::new();
    for thread in threads.values() {
        film_index
            .entry(thread.film_id.clone())
            .or_default()
            .insert(thread.thread_id.clone());
        for (i, post) in thread.posts.iter().enumerate() {
            user_index
                .entry(post.author_id.clone())
                .or_default()
                .entry(thread.thread_id.clone())
                .or_default()
                .push(i);
        }
    }
    (user_index, film_index)
}

/// One violation found during ingestion, with the lenient-mode disposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationEvent {
    MalformedLine {
        line: usize,
        message: String,
    },
    DuplicatePostId {
        line: usize,
        post_id: String,
    },
    SelfParent {
        thread_id: String,
        post_id: String,
    },
    LateParent {
        thread_id: String,
        post_id: String,
        parent_post_id: String,
    },
    OrphanParent {
        thread_id: String,
        post_id: String,
        parent_post_id: String,
    },
    ParentCycle {
        thread_id: String,
        post_id: String,
    },
    FirstPostHasParent {
        thread_id: String,
        post_id: String,
    },
    SecondaryRoot {
        thread_id: String,
        post_id: String,
    },
    FilmMismatch {
        thread_id: String,
        post_id: String,
        kept: String,
        seen: String,
    },
}

impl ValidationEvent {
    /// What lenient mode did about it.
    pub fn disposition(&self) -> &'static str {
        match self {
            ValidationEvent::MalformedLine { .. } => "line dropped",
            ValidationEvent::DuplicatePostId { .. } => "kept first occurrence",
            ValidationEvent::SelfParent { .. } => "post dropped",
            ValidationEvent::LateParent { .. } => "post dropped",
            ValidationEvent::OrphanParent { .. } => "parent cleared, post kept as root",
            ValidationEvent::ParentCycle { .. } => "parent cleared, post kept as root",
            ValidationEvent::FirstPostHasParent { .. } => "parent cleared",
            ValidationEvent::SecondaryRoot { .. } => "kept as secondary root",
            ValidationEvent::FilmMismatch { .. } => "film of first post kept",
        }
    }
}

impl fmt::Display for ValidationEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationEvent::MalformedLine { line, message } => {
                write!(f, "line {line}: {message}")
            }
            ValidationEvent::DuplicatePostId { line, post_id } => {
                write!(f, "line {line}: duplicate post_id `{post_id}`")
            }
            ValidationEvent::SelfParent { thread_id, post_id } => {
                write!(f, "thread `{thread_id}`: post `{post_id}` lists itself as parent")
            }
            ValidationEvent::LateParent {
                thread_id,
                post_id,
                parent_post_id,
            } => write!(
                f,
                "thread `{thread_id}`: post `{post_id}` is timestamped before its parent `{parent_post_id}`"
            ),
            ValidationEvent::OrphanParent {
                thread_id,
                post_id,
                parent_post_id,
            } => write!(
                f,
                "thread `{thread_id}`: post `{post_id}` references parent `{parent_post_id}` not present in the thread"
            ),
            ValidationEvent::ParentCycle { thread_id, post_id } => write!(
                f,
                "thread `{thread_id}`: parent chain through post `{post_id}` closes a cycle"
            ),
            ValidationEvent::FirstPostHasParent { thread_id, post_id } => {
                write!(f, "thread `{thread_id}`: first post `{post_id}` has a parent")
            }
            ValidationEvent::SecondaryRoot { thread_id, post_id } => write!(
                f,
                "thread `{thread_id}`: post `{post_id}` is parentless but not the thread root"
            ),
            ValidationEvent::FilmMismatch {
                thread_id,
                post_id,
                kept,
                seen,
            } => write!(
                f,
                "thread `{thread_id}`: post `{post_id}` lists film `{seen}` but thread is bound to film `{kept}`"
            ),
        }
    }
}

/// Everything lenient ingestion repaired, in detection order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    events: Vec<ValidationEvent>,
}

impl ValidationReport {
    pub fn events(&self) -> &[ValidationEvent] {
        &self.events
    }

    pub fn is_clean(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    fn push(&mut self, event: ValidationEvent) {
        self.events.push(event);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.events.is_empty() {
            return writeln!(f, "validation: clean");
        }
        writeln!(f, "validation: {} event(s)", self.events.len())?;
        for e in &self.events {
            writeln!(f, "  {e}; {}", e.disposition())?;
        }
        Ok(())
    }
}

/// A corpus plus the report of everything repaired while building it.
/// Strict-mode outcomes always carry a clean report.
#[derive(Debug, Clone)]
pub struct IngestOutcome {
    pub corpus: Corpus,
    pub report: ValidationReport,
}

/// Ingests a JSONL corpus file.
pub fn ingest_corpus(path: impl AsRef<Path>, mode: IngestMode) -> Result<IngestOutcome> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ingest_reader(BufReader::new(file), mode)
}

/// Ingests JSONL from a string.
pub fn ingest_str(data: &str, mode: IngestMode) -> Result<IngestOutcome> {
    ingest_reader(data.as_bytes(), mode)
}

struct PendingPost {
    line: usize,
    film_id: String,
    post: Post,
}

/// Records a violation (lenient) or aborts on it (strict).
fn note(report: &mut ValidationReport, mode: IngestMode, event: ValidationEvent) -> Result<()> {
    match mode {
        IngestMode::Strict => Err(Error::Validation(event)),
        IngestMode::Lenient => {
            report.push(event);
            Ok(())
        }
    }
}

/// Ingests JSONL from any buffered reader.
pub fn ingest_reader<R: BufRead>(reader: R, mode: IngestMode) -> Result<IngestOutcome> {
    let mut report = ValidationReport::default();
    let mut pending: Vec<PendingPost> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                let event = ValidationEvent::MalformedLine {
                    line: lineno,
                    message: "invalid UTF-8".to_string(),
                };
                match mode {
                    IngestMode::Strict => {
                        return Err(Error::MalformedLine {
                            line: lineno,
                            message: "invalid UTF-8".to_string(),
                        })
                    }
                    IngestMode::Lenient => {
                        report.push(event);
                        continue;
                    }
                }
            }
            Err(e) => {
                return Err(Error::Io {
                    path: "<input>".into(),
                    source: e,
                })
            }
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let record: RawRecord = match serde_json::from_str(trimmed) {
            Ok(r) => r,
            Err(e) => {
                match mode {
                    IngestMode::Strict => {
                        return Err(Error::MalformedLine {
                            line: lineno,
                            message: e.to_string(),
                        })
                    }
                    IngestMode::Lenient => report.push(ValidationEvent::MalformedLine {
                        line: lineno,
                        message: e.to_string(),
                    }),
                }
                continue;
            }
        };
        let timestamp = match parse_timestamp(&record.timestamp) {
            Ok(ts) => ts,
            Err(msg) => {
                match mode {
                    IngestMode::Strict => {
                        return Err(Error::MalformedLine {
                            line: lineno,
                            message: msg,
                        })
                    }
                    IngestMode::Lenient => report.push(ValidationEvent::MalformedLine {
                        line: lineno,
                        message: msg,
                    }),
                }
                continue;
            }
        };
        pending.push(PendingPost {
            line: lineno,
            film_id: record.film_id,
            post: Post {
                post_id: record.post_id,
                thread_id: record.thread_id,
                author_id: record.author_id,
                timestamp,
                parent_post_id: record.parent_post_id,
                text: record.text.unwrap_or_default(),
            },
        });
    }

    // Corpus-wide post id uniqueness, first occurrence wins.
    let mut seen_ids: BTreeSet<String> = BTreeSet::new();
    let mut unique: Vec<PendingPost> = Vec::with_capacity(pending.len());
    for p in pending {
        if seen_ids.contains(&p.post.post_id) {
            note(
                &mut report,
                mode,
                ValidationEvent::DuplicatePostId {
                    line: p.line,
                    post_id: p.post.post_id.clone(),
                },
            )?;
            continue;
        }
        seen_ids.insert(p.post.post_id.clone());
        unique.push(p);
    }

    // Group by thread and repair each.
    let mut by_thread: BTreeMap<String, Vec<PendingPost>> = BTreeMap::new();
    for p in unique {
        by_thread.entry(p.post.thread_id.clone()).or_default().push(p);
    }

    let mut threads: BTreeMap<String, Thread> = BTreeMap::new();
    for (thread_id, group) in by_thread {
        if let Some(thread) = repair_thread(&thread_id, group, mode, &mut report)? {
            threads.insert(thread_id, thread);
        }
    }

    Ok(IngestOutcome {
        corpus: Corpus::from_threads(threads),
        report,
    })
}

/// Validates and (in lenient mode) repairs one thread. Returns `None` when
/// every post of the thread was dropped.
fn repair_thread(
    thread_id: &str,
    mut group: Vec<PendingPost>,
    mode: IngestMode,
    report: &mut ValidationReport,
) -> Result<Option<Thread>> {
    group.sort_by(|a, b| {
        (a.post.timestamp, &a.post.post_id).cmp(&(b.post.timestamp, &b.post.post_id))
    });

    let stamps: BTreeMap<String, i64> = group
        .iter()
        .map(|p| (p.post.post_id.clone(), p.post.timestamp))
        .collect();

    // Drop pass: self-parents and posts timestamped before their parent.
    // Dropping never removes a post that was already kept; dangling children
    // of a dropped parent are repaired by the clear pass below.
    let mut alive: BTreeSet<String> = stamps.keys().cloned().collect();
    let mut kept: Vec<PendingPost> = Vec::with_capacity(group.len());
    for p in group {
        if let Some(parent) = &p.post.parent_post_id {
            if *parent == p.post.post_id {
                note(
                    report,
                    mode,
                    ValidationEvent::SelfParent {
                        thread_id: thread_id.to_string(),
                        post_id: p.post.post_id.clone(),
                    },
                )?;
                alive.remove(&p.post.post_id);
                continue;
            }
            if let Some(&parent_ts) = stamps.get(parent) {
                if alive.contains(parent) && parent_ts > p.post.timestamp {
                    note(
                        report,
                        mode,
                        ValidationEvent::LateParent {
                            thread_id: thread_id.to_string(),
                            post_id: p.post.post_id.clone(),
                            parent_post_id: parent.clone(),
                        },
                    )?;
                    alive.remove(&p.post.post_id);
                    continue;
                }
            }
        }
        kept.push(p);
    }

    // Clear pass: parents that do not resolve inside the thread become roots.
    // A repaired post is a sanctioned root, not a secondary-root violation.
    let mut repaired: BTreeSet<String> = BTreeSet::new();
    for p in &mut kept {
        if let Some(parent) = p.post.parent_post_id.clone() {
            if !alive.contains(&parent) {
                note(
                    report,
                    mode,
                    ValidationEvent::OrphanParent {
                        thread_id: thread_id.to_string(),
                        post_id: p.post.post_id.clone(),
                        parent_post_id: parent,
                    },
                )?;
                p.post.parent_post_id = None;
                repaired.insert(p.post.post_id.clone());
            }
        }
    }

    if kept.is_empty() {
        return Ok(None);
    }

    // Cycle break: parents resolve in-thread and never postdate their child,
    // so a parent cycle can only tie equal-timestamp posts. Each node has at
    // most one parent, so cycles are disjoint; break each at its
    // canonically-first member.
    let to_clear: Vec<usize> = {
        let order: BTreeMap<&str, usize> = kept
            .iter()
            .enumerate()
            .map(|(i, p)| (p.post.post_id.as_str(), i))
            .collect();
        let parent_of: Vec<Option<usize>> = kept
            .iter()
            .map(|p| p.post.parent_post_id.as_deref().map(|q| order[q]))
            .collect();
        let mut state = vec![0u8; kept.len()]; // 0 new, 1 on current walk, 2 done
        let mut found = Vec::new();
        for start in 0..kept.len() {
            if state[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut cur = start;
            loop {
                if state[cur] == 1 {
                    let entry = path.iter().position(|&x| x == cur).unwrap();
                    found.push(*path[entry..].iter().min().unwrap());
                    break;
                }
                if state[cur] == 2 {
                    break;
                }
                state[cur] = 1;
                path.push(cur);
                match parent_of[cur] {
                    Some(p) => cur = p,
                    None => break,
                }
            }
            for &i in &path {
                state[i] = 2;
            }
        }
        found
    };
    for i in to_clear {
        note(
            report,
            mode,
            ValidationEvent::ParentCycle {
                thread_id: thread_id.to_string(),
                post_id: kept[i].post.post_id.clone(),
            },
        )?;
        kept[i].post.parent_post_id = None;
        repaired.insert(kept[i].post.post_id.clone());
    }

    // Root checks on the canonical ordering.
    if kept[0].post.parent_post_id.is_some() {
        note(
            report,
            mode,
            ValidationEvent::FirstPostHasParent {
                thread_id: thread_id.to_string(),
                post_id: kept[0].post.post_id.clone(),
            },
        )?;
        kept[0].post.parent_post_id = None;
    }
    for p in kept.iter().skip(1) {
        if p.post.parent_post_id.is_none() && !repaired.contains(&p.post.post_id) {
            note(
                report,
                mode,
                ValidationEvent::SecondaryRoot {
                    thread_id: thread_id.to_string(),
                    post_id: p.post.post_id.clone(),
                },
            )?;
        }
    }

    // Film binding: the first post decides, the rest must agree.
    let film = kept[0].film_id.clone();
    for p in kept.iter().skip(1) {
        if p.film_id != film {
            note(
                report,
                mode,
                ValidationEvent::FilmMismatch {
                    thread_id: thread_id.to_string(),
                    post_id: p.post.post_id.clone(),
                    kept: film.clone(),
                    seen: p.film_id.clone(),
                },
            )?;
        }
    }

    let posts = kept.into_iter().map(|p| p.post).collect();
    Ok(Some(Thread::new(thread_id.to_string(), film, posts)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(
        post: &str,
        thread: &str,
        film: &str,
        author: &str,
        ts: &str,
        parent: Option<&str>,
    ) -> String {
        let parent = parent
            .map(|p| format!(",\"parent_post_id\":\"{p}\""))
            .unwrap_or_default();
        format!(
            "{{\"post_id\":\"{post}\",\"thread_id\":\"{thread}\",\"film_id\":\"{film}\",\"author_id\":\"{author}\",\"timestamp\":\"{ts}\"{parent}}}"
        )
    }

    #[test]
    fn empty_file_yields_empty_corpus() {
        let out = ingest_str("", IngestMode::Strict).unwrap();
        assert_eq!(out.corpus.stats(), CorpusStats::default());
        assert!(out.report.is_clean());
    }

    #[test]
    fn single_root_post_is_a_thread_of_one() {
        let data = line("p1", "t1", "f1", "alice", "2012-09-14T08:30:00Z", None);
        let out = ingest_str(&data, IngestMode::Strict).unwrap();
        assert_eq!(
            out.corpus.stats(),
            CorpusStats {
                n_films: 1,
                n_threads: 1,
                n_posts: 1,
                n_users: 1
            }
        );
        let t = out.corpus.thread("t1").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.root().post_id, "p1");
    }

    #[test]
    fn orphan_parent_is_kept_as_root_in_lenient_mode() {
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:30:00Z", None),
            line(
                "p2",
                "t1",
                "f1",
                "bob",
                "2012-09-14T09:00:00Z",
                Some("missing"),
            ),
        ]
        .join("\n");
        let out = ingest_str(&data, IngestMode::Lenient).unwrap();
        assert_eq!(out.report.len(), 1);
        assert!(matches!(
            out.report.events()[0],
            ValidationEvent::OrphanParent { .. }
        ));
        let t = out.corpus.thread("t1").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.post_by_id("p2").unwrap().parent_post_id, None);

        let err = ingest_str(&data, IngestMode::Strict).unwrap_err();
        assert!(matches!(
            err,
            Error::Validation(ValidationEvent::OrphanParent { .. })
        ));
    }

    #[test]
    fn cross_thread_parent_is_treated_as_orphan() {
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:00:00Z", None),
            line("q1", "t2", "f1", "bob", "2012-09-14T08:00:00Z", None),
            // q2 lives in t2 but points at t1's root.
            line("q2", "t2", "f1", "carol", "2012-09-14T09:00:00Z", Some("p1")),
        ]
        .join("\n");
        assert!(ingest_str(&data, IngestMode::Strict).is_err());
        let out = ingest_str(&data, IngestMode::Lenient).unwrap();
        assert_eq!(
            out.corpus.thread("t2").unwrap().post_by_id("q2").unwrap().parent_post_id,
            None
        );
        assert!(matches!(
            out.report.events()[0],
            ValidationEvent::OrphanParent { .. }
        ));
    }

    #[test]
    fn duplicate_post_id_keeps_first() {
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:30:00Z", None),
            line("p1", "t1", "f1", "carol", "2012-09-14T09:30:00Z", None),
        ]
        .join("\n");
        let out = ingest_str(&data, IngestMode::Lenient).unwrap();
        assert_eq!(out.report.len(), 1);
        assert_eq!(out.corpus.thread("t1").unwrap().root().author_id, "alice");
        assert!(ingest_str(&data, IngestMode::Strict).is_err());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let data = format!(
            "{}\nnot json\n",
            line("p1", "t1", "f1", "alice", "2012-09-14T08:30:00Z", None)
        );
        let err = ingest_str(&data, IngestMode::Strict).unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let out = ingest_str(&data, IngestMode::Lenient).unwrap();
        assert_eq!(out.report.len(), 1);
        assert_eq!(out.corpus.stats().n_posts, 1);
    }

    #[test]
    fn self_parent_post_is_dropped_and_children_become_roots() {
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:00:00Z", None),
            line("p2", "t1", "f1", "bob", "2012-09-14T09:00:00Z", Some("p2")),
            line("p3", "t1", "f1", "carol", "2012-09-14T10:00:00Z", Some("p2")),
        ]
        .join("\n");
        let out = ingest_str(&data, IngestMode::Lenient).unwrap();
        let t = out.corpus.thread("t1").unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.post_by_id("p2").is_none());
        assert_eq!(t.post_by_id("p3").unwrap().parent_post_id, None);
        // self-parent drop, then orphan clear for its child
        assert_eq!(out.report.len(), 2);
    }

    #[test]
    fn late_parent_post_is_dropped() {
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:00:00Z", None),
            line("p2", "t1", "f1", "bob", "2012-09-14T07:00:00Z", Some("p1")),
        ]
        .join("\n");
        let out = ingest_str(&data, IngestMode::Lenient).unwrap();
        let t = out.corpus.thread("t1").unwrap();
        assert_eq!(t.len(), 1);
        assert!(matches!(
            out.report.events()[0],
            ValidationEvent::LateParent { .. }
        ));
    }

    #[test]
    fn equal_timestamp_parent_is_legal() {
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:00:00Z", None),
            line("p2", "t1", "f1", "bob", "2012-09-14T08:00:00Z", Some("p1")),
        ]
        .join("\n");
        let out = ingest_str(&data, IngestMode::Strict).unwrap();
        assert_eq!(out.corpus.thread("t1").unwrap().len(), 2);
    }

    #[test]
    fn tie_breaking_is_by_post_id() {
        let data = [
            line("b", "t1", "f1", "alice", "2012-09-14T08:00:00Z", None),
            line("a", "t1", "f1", "bob", "2012-09-14T08:00:00Z", Some("b")),
        ]
        .join("\n");
        // Post `a` sorts first but has a parent: strict refuses, lenient
        // clears the parent and reports the demoted root.
        assert!(ingest_str(&data, IngestMode::Strict).is_err());
        let out = ingest_str(&data, IngestMode::Lenient).unwrap();
        let t = out.corpus.thread("t1").unwrap();
        assert_eq!(t.root().post_id, "a");
        assert_eq!(t.root().parent_post_id, None);
        assert!(out
            .report
            .events()
            .iter()
            .any(|e| matches!(e, ValidationEvent::FirstPostHasParent { .. })));
    }

    #[test]
    fn film_mismatch_keeps_first_posts_film() {
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:00:00Z", None),
            line("p2", "t1", "f2", "bob", "2012-09-14T09:00:00Z", Some("p1")),
        ]
        .join("\n");
        let out = ingest_str(&data, IngestMode::Lenient).unwrap();
        assert_eq!(out.corpus.thread("t1").unwrap().film_id(), "f1");
        assert!(matches!(
            out.report.events()[0],
            ValidationEvent::FilmMismatch { .. }
        ));
        assert!(ingest_str(&data, IngestMode::Strict).is_err());
    }

    #[test]
    fn stats_count_distinct_entities() {
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:00:00Z", None),
            line("p2", "t1", "f1", "bob", "2012-09-14T09:00:00Z", Some("p1")),
            line("p3", "t1", "f1", "alice", "2012-09-14T10:00:00Z", Some("p2")),
        ]
        .join("\n");
        let out = ingest_str(&data, IngestMode::Strict).unwrap();
        assert_eq!(
            out.corpus.stats(),
            CorpusStats {
                n_films: 1,
                n_threads: 1,
                n_posts: 3,
                n_users: 2
            }
        );
        assert!(out.corpus.verify_indices());
    }

    #[test]
    fn round_trip_preserves_the_corpus() {
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:00:00Z", None),
            line("p2", "t1", "f1", "bob", "2012-09-14T09:00:00Z", Some("p1")),
            line("q1", "t2", "f2", "carol", "2013-01-01T00:00:00Z", None),
            "{\"post_id\":\"q2\",\"thread_id\":\"t2\",\"film_id\":\"f2\",\"author_id\":\"dan\",\"timestamp\":\"2013-01-01T01:00:00Z\",\"parent_post_id\":\"q1\",\"text\":\"two words\"}".to_string(),
        ]
        .join("\n");
        let out = ingest_str(&data, IngestMode::Strict).unwrap();
        let mut buf = Vec::new();
        out.corpus.write_jsonl(&mut buf).unwrap();
        let again = ingest_str(std::str::from_utf8(&buf).unwrap(), IngestMode::Strict).unwrap();
        assert_eq!(out.corpus, again.corpus);
    }

    #[test]
    fn parent_cycles_are_broken_at_the_first_member() {
        // p2 and p3 share a timestamp and parent each other.
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:00:00Z", None),
            line("p2", "t1", "f1", "bob", "2012-09-14T09:00:00Z", Some("p3")),
            line("p3", "t1", "f1", "carol", "2012-09-14T09:00:00Z", Some("p2")),
        ]
        .join("\n");
        assert!(matches!(
            ingest_str(&data, IngestMode::Strict),
            Err(Error::Validation(ValidationEvent::ParentCycle { .. }))
        ));
        let out = ingest_str(&data, IngestMode::Lenient).unwrap();
        let t = out.corpus.thread("t1").unwrap();
        assert_eq!(t.len(), 3);
        // The canonically-first cycle member (p2) becomes a root.
        assert_eq!(t.post_by_id("p2").unwrap().parent_post_id, None);
        assert_eq!(
            t.post_by_id("p3").unwrap().parent_post_id,
            Some("p2".to_string())
        );
        assert_eq!(out.report.len(), 1);
    }

    #[test]
    fn two_post_cycle_heads_the_thread() {
        let data = [
            line("a", "t1", "f1", "x", "2012-09-14T08:00:00Z", Some("b")),
            line("b", "t1", "f1", "y", "2012-09-14T08:00:00Z", Some("a")),
        ]
        .join("\n");
        let out = ingest_str(&data, IngestMode::Lenient).unwrap();
        let t = out.corpus.thread("t1").unwrap();
        assert_eq!(t.root().post_id, "a");
        assert_eq!(t.root().parent_post_id, None);
        assert_eq!(t.post_by_id("b").unwrap().parent_post_id, Some("a".to_string()));
        assert_eq!(out.report.len(), 1);
    }

    #[test]
    fn thread_length_counts_posts() {
        let mut lines = vec![line("r", "t1", "f1", "op", "2012-09-14T08:00:00Z", None)];
        for i in 0..30 {
            lines.push(line(
                &format!("c{i:02}"),
                "t1",
                "f1",
                &format!("u{i}"),
                "2012-09-14T09:00:00Z",
                Some("r"),
            ));
        }
        let out = ingest_str(&lines.join("\n"), IngestMode::Strict).unwrap();
        assert_eq!(out.corpus.thread("t1").unwrap().len(), 31);
    }

    #[test]
    fn stats_display_format() {
        let stats = CorpusStats {
            n_films: 706,
            n_threads: 102_000,
            n_posts: 1_115_616,
            n_users: 117_000,
        };
        assert_eq!(
            stats.to_string(),
            "706 films / 102000 threads / 1115616 posts / 117000 users"
        );
    }

    #[test]
    fn repaired_corpus_round_trips_under_lenient_reingest() {
        // Orphan repair leaves a secondary root; the serialized form must
        // re-ingest (leniently) to the identical corpus.
        let data = [
            line("p1", "t1", "f1", "alice", "2012-09-14T08:00:00Z", None),
            line("p2", "t1", "f1", "bob", "2012-09-14T09:00:00Z", Some("gone")),
            line("p3", "t1", "f1", "carol", "2012-09-14T10:00:00Z", Some("p2")),
        ]
        .join("\n");
        let first = ingest_str(&data, IngestMode::Lenient).unwrap();
        assert!(!first.report.is_clean());
        let mut buf = Vec::new();
        first.corpus.write_jsonl(&mut buf).unwrap();
        let second =
            ingest_str(std::str::from_utf8(&buf).unwrap(), IngestMode::Lenient).unwrap();
        assert_eq!(first.corpus, second.corpus);
    }

    #[test]
    fn timestamp_formatting_is_canonical() {
        assert_eq!(format_timestamp(0), "1970-01-01T00:00:00Z");
        let ts = parse_timestamp("2012-09-14T08:30:00Z").unwrap();
        assert_eq!(format_timestamp(ts), "2012-09-14T08:30:00Z");
        // Offset forms normalize to UTC.
        let ts = parse_timestamp("2012-09-14T10:30:00+02:00").unwrap();
        assert_eq!(format_timestamp(ts), "2012-09-14T08:30:00Z");
    }

    #[test]
    fn unknown_keys_are_ignored() {
        let data = "{\"post_id\":\"p1\",\"thread_id\":\"t1\",\"film_id\":\"f1\",\"author_id\":\"a\",\"timestamp\":\"2012-09-14T08:30:00Z\",\"score\":42}";
        let out = ingest_str(data, IngestMode::Strict).unwrap();
        assert_eq!(out.corpus.stats().n_posts, 1);
    }
}
