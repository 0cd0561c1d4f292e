//! Shared fixture builders for integration tests.
#![allow(dead_code)]

use threadnet::corpus::{format_timestamp, ingest_str, Corpus, IngestMode};
use threadnet::reply_graph::ReplyDigraph;
use threadnet::rng::SplitMix64;

pub const EPOCH: i64 = 1_347_580_800; // 2012-09-14T00:00:00Z

/// One JSONL post line.
pub fn post_line(
    post: &str,
    thread: &str,
    film: &str,
    author: &str,
    seconds: i64,
    parent: Option<&str>,
    text: &str,
) -> String {
    let parent = parent
        .map(|p| format!(",\"parent_post_id\":\"{p}\""))
        .unwrap_or_default();
    let text = if text.is_empty() {
        String::new()
    } else {
        format!(",\"text\":\"{text}\"")
    };
    format!(
        "{{\"post_id\":\"{post}\",\"thread_id\":\"{thread}\",\"film_id\":\"{film}\",\"author_id\":\"{author}\",\"timestamp\":\"{}\"{text}{parent}}}",
        format_timestamp(EPOCH + seconds)
    )
}

pub fn corpus_from(lines: &[String]) -> Corpus {
    ingest_str(&lines.join("\n"), IngestMode::Strict)
        .unwrap()
        .corpus
}

/// `threads` in-star threads: one root, `repliers` distinct users replying
/// to it. Thread length is `repliers + 1`.
pub fn star_corpus_lines(threads: usize, repliers: usize) -> Vec<String> {
    let mut lines = Vec::new();
    for t in 0..threads {
        let root = format!("s{t}r");
        lines.push(post_line(
            &root,
            &format!("s{t}"),
            "f",
            &format!("root{t}"),
            0,
            None,
            "",
        ));
        for k in 0..repliers {
            lines.push(post_line(
                &format!("s{t}p{k}"),
                &format!("s{t}"),
                "f",
                &format!("u{t}x{k}"),
                60 * (k as i64 + 1),
                Some(&root),
                "",
            ));
        }
    }
    lines
}

/// `threads` cascade threads: each post answers the previous one, all
/// authors distinct. Thread length is `length`.
pub fn cascade_corpus_lines(threads: usize, length: usize) -> Vec<String> {
    let mut lines = Vec::new();
    for t in 0..threads {
        for k in 0..length {
            let parent = (k > 0).then(|| format!("c{t}p{}", k - 1));
            lines.push(post_line(
                &format!("c{t}p{k}"),
                &format!("c{t}"),
                "f",
                &format!("v{t}x{k}"),
                60 * k as i64,
                parent.as_deref(),
                "",
            ));
        }
    }
    lines
}

/// Seeded random simple digraph on `n` nodes with arc probability `p`;
/// when `force_reciprocal` is set, roughly one in four generated arcs also
/// gets its reverse.
pub fn random_digraph(seed: u64, n: u32, p: f64, force_reciprocal: bool) -> ReplyDigraph {
    let mut rng = SplitMix64::new(seed);
    let names: Vec<String> = (0..n).map(|i| format!("u{i:03}")).collect();
    let threshold = (p * (u64::MAX as f64)) as u64;
    let mut arcs: Vec<(u32, u32)> = Vec::new();
    let mut present = std::collections::BTreeSet::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.next_u64() < threshold && present.insert((u, v)) {
                arcs.push((u, v));
            }
        }
    }
    if force_reciprocal {
        let base = arcs.clone();
        for &(u, v) in &base {
            if rng.next_below(4) == 0 && present.insert((v, u)) {
                arcs.push((v, u));
            }
        }
    }
    ReplyDigraph::from_parts(
        "rand",
        names.iter().cloned(),
        arcs.into_iter()
            .map(|(u, v)| (names[u as usize].clone(), names[v as usize].clone(), 1)),
    )
    .unwrap()
}

/// Thread lengths that repeat every ten threads and sum to 100 posts, mixing
/// single posts with a long tail.
pub const LENGTH_CYCLE: [usize; 10] = [1, 1, 2, 2, 3, 4, 6, 9, 14, 58];

/// Deterministic synthetic corpus: `threads` threads whose lengths follow
/// `cycle`, random authors from a shared pool, each reply targeting a random
/// earlier post of its thread.
pub fn synthetic_corpus_jsonl(seed: u64, threads: usize, cycle: &[usize]) -> String {
    let mut rng = SplitMix64::new(seed);
    let user_pool = ((threads * 10) / 5).max(50) as u64;
    let mut lines = Vec::new();
    for t in 0..threads {
        let len = cycle[t % cycle.len()];
        let thread_id = format!("t{t:05}");
        let film = format!("f{:03}", rng.next_below(500));
        let mut ids: Vec<String> = Vec::with_capacity(len);
        for k in 0..len {
            let post_id = format!("{thread_id}p{k:04}");
            let author = format!("a{:05}", rng.next_below(user_pool));
            let parent = if k == 0 {
                None
            } else {
                // Reply to a uniformly random earlier post.
                Some(ids[rng.next_below(k as u64) as usize].clone())
            };
            lines.push(post_line(
                &post_id,
                &thread_id,
                &film,
                &author,
                (t as i64) * 86_400 + (k as i64) * 37,
                parent.as_deref(),
                "a few words of text",
            ));
            ids.push(post_id);
        }
    }
    lines.join("\n")
}
