//! Per-user activity and social attributes, and the five-way user taxonomy.
//!
//! Users are split by gross activity: `one-poster` wrote exactly one post,
//! `one-threader` wrote several posts but in a single thread, `regular`
//! contributed to 2..=10 threads, `pro` to 11..=100, `super-active` to more
//! than 100. Per-thread attributes ("per thread" medians) are computed for
//! every thread a user posted in and then reduced by the lower median, which
//! keeps every reported value in the observed set. Percentage fields are
//! fractions in [0, 1]; report emission scales them.
//!
//! Social attributes read the thread's reply graph: `in` is replies received
//! (multiplicity-weighted in-degree), `out` replies given. The in/out ratio
//! of a thread where the user replied to nobody is pinned to 10^6 so that
//! zero out-degrees stay representable in medians.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::corpus::{Corpus, Thread};
use crate::reply_graph::build_reply_graph;
use crate::{Error, Result};

/// Ratio assigned when the out-degree is zero.
pub const IN_OUT_UNDEFINED: f64 = 1_000_000.0;

/// The five activity categories; they partition users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UserCategory {
    OnePoster,
    OneThreader,
    Regular,
    Pro,
    SuperActive,
}

impl UserCategory {
    pub const ALL: [UserCategory; 5] = [
        UserCategory::OnePoster,
        UserCategory::OneThreader,
        UserCategory::Regular,
        UserCategory::Pro,
        UserCategory::SuperActive,
    ];

    pub fn label(self) -> &'static str {
        match self {
            UserCategory::OnePoster => "one-poster",
            UserCategory::OneThreader => "one-threader",
            UserCategory::Regular => "regular",
            UserCategory::Pro => "pro",
            UserCategory::SuperActive => "super-active",
        }
    }
}

impl fmt::Display for UserCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Category from total posts and distinct threads.
pub fn categorize(n_posts: u64, n_threads: u64) -> Result<UserCategory> {
    if n_posts < 1 || n_threads < 1 || n_threads > n_posts {
        return Err(Error::Precondition(
            "categorize",
            format!("need 1 <= n_threads <= n_posts, got n_posts={n_posts}, n_threads={n_threads}"),
        ));
    }
    Ok(if n_posts == 1 {
        UserCategory::OnePoster
    } else if n_threads == 1 {
        UserCategory::OneThreader
    } else if n_threads <= 10 {
        UserCategory::Regular
    } else if n_threads <= 100 {
        UserCategory::Pro
    } else {
        UserCategory::SuperActive
    })
}

const SECONDS_PER_HOUR: f64 = 3600.0;

/// Hours between the user's first and last post in the thread.
pub fn life_in_thread(thread: &Thread, user: &str) -> Result<f64> {
    let (first, last) = user_span(thread, user)?;
    Ok((last - first) as f64 / SECONDS_PER_HOUR)
}

/// Hours between thread creation and the user's first post; 0 for the
/// thread initiator.
pub fn birth_in_thread(thread: &Thread, user: &str) -> Result<f64> {
    let (first, _) = user_span(thread, user)?;
    Ok((first - thread.root().timestamp) as f64 / SECONDS_PER_HOUR)
}

fn user_span(thread: &Thread, user: &str) -> Result<(i64, i64)> {
    let mut span: Option<(i64, i64)> = None;
    for post in thread.posts() {
        if post.author_id == user {
            span = Some(match span {
                None => (post.timestamp, post.timestamp),
                Some((lo, hi)) => (lo.min(post.timestamp), hi.max(post.timestamp)),
            });
        }
    }
    span.ok_or_else(|| Error::UserNotInThread {
        user: user.to_string(),
        thread: thread.thread_id().to_string(),
    })
}

/// Replies-received over replies-given, with the zero-out convention.
pub fn in_out_ratio(in_degree: u64, out_degree: u64) -> f64 {
    if out_degree == 0 {
        IN_OUT_UNDEFINED
    } else {
        in_degree as f64 / out_degree as f64
    }
}

/// Whether a post initiates its thread and whether it was ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PostFlags {
    pub initiating: bool,
    pub ignored: bool,
}

/// A post is ignored iff no post by another author has it as parent;
/// initiating iff it is the thread root. Self-replies do not rescue a post.
pub fn ignorance_flags(thread: &Thread) -> BTreeMap<String, PostFlags> {
    let mut answered: BTreeSet<&str> = BTreeSet::new();
    for post in thread.posts() {
        if let Some(parent_id) = &post.parent_post_id {
            let parent = thread
                .post_by_id(parent_id)
                .expect("ingestion guarantees parents resolve within the thread");
            if parent.author_id != post.author_id {
                answered.insert(parent_id);
            }
        }
    }
    let root_id = &thread.root().post_id;
    thread
        .posts()
        .iter()
        .map(|post| {
            (
                post.post_id.clone(),
                PostFlags {
                    initiating: &post.post_id == root_id,
                    ignored: !answered.contains(post.post_id.as_str()),
                },
            )
        })
        .collect()
}

/// Lower median: element at index (n-1)/2 of the sorted sample.
fn lower_median_u64(values: &mut [u64]) -> u64 {
    assert!(!values.is_empty());
    values.sort_unstable();
    values[(values.len() - 1) / 2]
}

fn lower_median_f64(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_unstable_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

/// Everything measured about one user, plus the pooled tallies that
/// category aggregation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct UserActivity {
    pub user_id: String,
    pub category: UserCategory,
    pub n_films: u64,
    pub n_threads: u64,
    pub n_posts: u64,
    pub med_thread_size: u64,
    pub posts_per_thread: u64,
    pub words_per_post: u64,
    pub life_per_thread: f64,
    pub birth_per_thread: f64,
    pub in_per_thread: u64,
    pub out_per_thread: u64,
    pub in_out_ratio_per_thread: f64,
    /// Fraction of the user's threads they initiated.
    pub pct_threads_initiated: f64,
    /// Fraction of the user's initiating posts that were ignored; `None`
    /// when the user never initiated a thread.
    pub pct_ignored_initiating: Option<f64>,
    /// Same for non-initiating posts.
    pub pct_ignored_noninitiating: Option<f64>,
    pub threads_initiated: u64,
    pub initiating_posts: u64,
    pub ignored_initiating_posts: u64,
    pub noninitiating_posts: u64,
    pub ignored_noninitiating_posts: u64,
}

#[derive(Default)]
struct UserAcc {
    films: BTreeSet<String>,
    n_posts: u64,
    thread_sizes: Vec<u64>,
    posts_in_thread: Vec<u64>,
    words: Vec<u64>,
    lives: Vec<f64>,
    births: Vec<f64>,
    ins: Vec<u64>,
    outs: Vec<u64>,
    ratios: Vec<f64>,
    threads_initiated: u64,
    initiating_posts: u64,
    ignored_initiating_posts: u64,
    noninitiating_posts: u64,
    ignored_noninitiating_posts: u64,
}

/// Computes the full attribute vector for every user, ascending by user id.
pub fn compute_user_activities(corpus: &Corpus) -> Vec<UserActivity> {
    let mut accs: BTreeMap<String, UserAcc> = BTreeMap::new();
    for thread in corpus.threads() {
        let graph = build_reply_graph(thread);
        let flags = ignorance_flags(thread);
        let root_author = &thread.root().author_id;

        let mut by_author: BTreeMap<&str, Vec<&crate::corpus::Post>> = BTreeMap::new();
        for post in thread.posts() {
            by_author.entry(&post.author_id).or_default().push(post);
        }

        for (author, posts) in by_author {
            let acc = accs.entry(author.to_string()).or_default();
            acc.films.insert(thread.film_id().to_string());
            acc.n_posts += posts.len() as u64;
            acc.thread_sizes.push(thread.len() as u64);
            acc.posts_in_thread.push(posts.len() as u64);

            let mut first = i64::MAX;
            let mut last = i64::MIN;
            for post in &posts {
                acc.words
                    .push(post.text.split_whitespace().count() as u64);
                first = first.min(post.timestamp);
                last = last.max(post.timestamp);
                let f = flags[&post.post_id];
                if f.initiating {
                    acc.initiating_posts += 1;
                    acc.ignored_initiating_posts += u64::from(f.ignored);
                } else {
                    acc.noninitiating_posts += 1;
                    acc.ignored_noninitiating_posts += u64::from(f.ignored);
                }
            }
            acc.lives.push((last - first) as f64 / SECONDS_PER_HOUR);
            acc.births
                .push((first - thread.root().timestamp) as f64 / SECONDS_PER_HOUR);

            let (din, dout) = graph
                .degree_profile(author)
                .expect("every author is a node of the thread graph");
            acc.ins.push(din);
            acc.outs.push(dout);
            acc.ratios.push(in_out_ratio(din, dout));
            acc.threads_initiated += u64::from(root_author == author);
        }
    }

    accs.into_iter()
        .map(|(user_id, mut acc)| {
            let n_threads = acc.thread_sizes.len() as u64;
            let category = categorize(acc.n_posts, n_threads)
                .expect("corpus construction satisfies categorize preconditions");
            UserActivity {
                category,
                n_films: acc.films.len() as u64,
                n_threads,
                n_posts: acc.n_posts,
                med_thread_size: lower_median_u64(&mut acc.thread_sizes),
                posts_per_thread: lower_median_u64(&mut acc.posts_in_thread),
                words_per_post: lower_median_u64(&mut acc.words),
                life_per_thread: lower_median_f64(&mut acc.lives),
                birth_per_thread: lower_median_f64(&mut acc.births),
                in_per_thread: lower_median_u64(&mut acc.ins),
                out_per_thread: lower_median_u64(&mut acc.outs),
                in_out_ratio_per_thread: lower_median_f64(&mut acc.ratios),
                pct_threads_initiated: acc.threads_initiated as f64 / n_threads as f64,
                pct_ignored_initiating: (acc.initiating_posts > 0)
                    .then(|| acc.ignored_initiating_posts as f64 / acc.initiating_posts as f64),
                pct_ignored_noninitiating: (acc.noninitiating_posts > 0).then(|| {
                    acc.ignored_noninitiating_posts as f64 / acc.noninitiating_posts as f64
                }),
                threads_initiated: acc.threads_initiated,
                initiating_posts: acc.initiating_posts,
                ignored_initiating_posts: acc.ignored_initiating_posts,
                noninitiating_posts: acc.noninitiating_posts,
                ignored_noninitiating_posts: acc.ignored_noninitiating_posts,
                user_id,
            }
        })
        .collect()
}

/// How category percentage columns are aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PercentageMode {
    /// Events divided by opportunities pooled across the category's users.
    #[default]
    Pooled,
    /// Lower median of the per-user fractions (undefined users excluded).
    MedianOfUsers,
}

/// One aggregate row per populated category.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryRow {
    pub category: UserCategory,
    pub users: u64,
    /// Fraction of all users in this category.
    pub pct_users: f64,
    pub films: u64,
    pub threads: u64,
    pub posts: u64,
    pub thread_size: u64,
    pub posts_per_thread: u64,
    pub words_per_post: u64,
    pub life_per_thread: f64,
    pub birth_per_thread: f64,
    pub in_per_thread: u64,
    pub out_per_thread: u64,
    pub in_out_per_thread: f64,
    pub pct_threads_initiated: f64,
    pub pct_ignored_initiating: Option<f64>,
    pub pct_ignored_noninitiating: Option<f64>,
}

/// Aggregates user activities into one row per populated category, in
/// category order. Numeric columns are lower medians over the category's
/// users; percentage columns follow `mode`.
pub fn category_report(
    activities: &[UserActivity],
    mode: PercentageMode,
) -> Result<Vec<CategoryRow>> {
    if activities.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let total_users = activities.len() as u64;
    let mut rows = Vec::new();
    for category in UserCategory::ALL {
        let members: Vec<&UserActivity> =
            activities.iter().filter(|a| a.category == category).collect();
        if members.is_empty() {
            continue;
        }
        let med = |f: &dyn Fn(&UserActivity) -> u64| {
            let mut v: Vec<u64> = members.iter().map(|a| f(a)).collect();
            lower_median_u64(&mut v)
        };
        let medf = |f: &dyn Fn(&UserActivity) -> f64| {
            let mut v: Vec<f64> = members.iter().map(|a| f(a)).collect();
            lower_median_f64(&mut v)
        };

        let pct_threads_initiated = match mode {
            PercentageMode::Pooled => {
                let initiated: u64 = members.iter().map(|a| a.threads_initiated).sum();
                let threads: u64 = members.iter().map(|a| a.n_threads).sum();
                initiated as f64 / threads as f64
            }
            PercentageMode::MedianOfUsers => medf(&|a| a.pct_threads_initiated),
        };
        let pct_ignored_initiating = ignored_pct(
            &members,
            mode,
            |a| (a.ignored_initiating_posts, a.initiating_posts),
            |a| a.pct_ignored_initiating,
        );
        let pct_ignored_noninitiating = ignored_pct(
            &members,
            mode,
            |a| (a.ignored_noninitiating_posts, a.noninitiating_posts),
            |a| a.pct_ignored_noninitiating,
        );

        rows.push(CategoryRow {
            category,
            users: members.len() as u64,
            pct_users: members.len() as f64 / total_users as f64,
            films: med(&|a| a.n_films),
            threads: med(&|a| a.n_threads),
            posts: med(&|a| a.n_posts),
            thread_size: med(&|a| a.med_thread_size),
            posts_per_thread: med(&|a| a.posts_per_thread),
            words_per_post: med(&|a| a.words_per_post),
            life_per_thread: medf(&|a| a.life_per_thread),
            birth_per_thread: medf(&|a| a.birth_per_thread),
            in_per_thread: med(&|a| a.in_per_thread),
            out_per_thread: med(&|a| a.out_per_thread),
            in_out_per_thread: medf(&|a| a.in_out_ratio_per_thread),
            pct_threads_initiated,
            pct_ignored_initiating,
            pct_ignored_noninitiating,
        });
    }
    Ok(rows)
}

fn ignored_pct(
    members: &[&UserActivity],
    mode: PercentageMode,
    tally: impl Fn(&UserActivity) -> (u64, u64),
    per_user: impl Fn(&UserActivity) -> Option<f64>,
) -> Option<f64> {
    match mode {
        PercentageMode::Pooled => {
            let (events, opportunities) = members
                .iter()
                .map(|a| tally(a))
                .fold((0u64, 0u64), |(e, o), (de, doo)| (e + de, o + doo));
            (opportunities > 0).then(|| events as f64 / opportunities as f64)
        }
        PercentageMode::MedianOfUsers => {
            let mut defined: Vec<f64> = members.iter().filter_map(|a| per_user(a)).collect();
            (!defined.is_empty()).then(|| lower_median_f64(&mut defined))
        }
    }
}
