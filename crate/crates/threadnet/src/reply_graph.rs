//! Per-thread directed reply graphs over users.
//!
//! Arc direction is replier -> replied-to: `u -> v` records that `u` authored
//! a post whose parent was authored by `v`. Flipping this convention would
//! permute motif classes (36 and 6 trade places), so it is fixed here and
//! everything downstream assumes it. The arc set is a simple digraph with no
//! self-loops; repeated replies between the same ordered pair are tracked as
//! a multiplicity next to the arc (degree metrics use multiplicities, the
//! motif census uses the collapsed simple graph). Self-replies contribute the
//! author as a node but never an arc.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::Thread;
use crate::{Error, Result};

/// Simple digraph of who replied to whom inside a single thread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplyDigraph {
    thread_id: String,
    nodes: Vec<String>,
    index: BTreeMap<String, u32>,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    und_adj: Vec<Vec<u32>>,
    multiplicity: BTreeMap<(u32, u32), u64>,
}

impl ReplyDigraph {
    /// Assembles a graph from explicit parts. Node ids are sorted internally;
    /// arcs are `(from, to, multiplicity)` over node ids. Rejects self-loops,
    /// unknown endpoints, duplicate arcs, and zero multiplicities.
    pub fn from_parts(
        thread_id: &str,
        nodes: impl IntoIterator<Item = String>,
        arcs: impl IntoIterator<Item = (String, String, u64)>,
    ) -> Result<ReplyDigraph> {
        let node_set: BTreeSet<String> = nodes.into_iter().collect();
        let nodes: Vec<String> = node_set.into_iter().collect();
        let index: BTreeMap<String, u32> = nodes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let mut multiplicity = BTreeMap::new();
        for (from, to, count) in arcs {
            let (Some(&u), Some(&v)) = (index.get(&from), index.get(&to)) else {
                return Err(Error::Precondition(
                    "ReplyDigraph::from_parts",
                    format!("arc ({from}, {to}) references an unknown node"),
                ));
            };
            if u == v {
                return Err(Error::Precondition(
                    "ReplyDigraph::from_parts",
                    format!("self-loop on `{from}`"),
                ));
            }
            if count == 0 {
                return Err(Error::Precondition(
                    "ReplyDigraph::from_parts",
                    format!("arc ({from}, {to}) has zero multiplicity"),
                ));
            }
            if multiplicity.insert((u, v), count).is_some() {
                return Err(Error::Precondition(
                    "ReplyDigraph::from_parts",
                    format!("duplicate arc ({from}, {to})"),
                ));
            }
        }
        Ok(Self::assemble(thread_id.to_string(), nodes, index, multiplicity))
    }

    fn assemble(
        thread_id: String,
        nodes: Vec<String>,
        index: BTreeMap<String, u32>,
        multiplicity: BTreeMap<(u32, u32), u64>,
    ) -> ReplyDigraph {
        let n = nodes.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut und: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        for &(u, v) in multiplicity.keys() {
            out_adj[u as usize].push(v);
            in_adj[v as usize].push(u);
            und[u as usize].insert(v);
            und[v as usize].insert(u);
        }
        for adj in &mut out_adj {
            adj.sort_unstable();
        }
        for adj in &mut in_adj {
            adj.sort_unstable();
        }
        let und_adj = und.into_iter().map(|s| s.into_iter().collect()).collect();
        ReplyDigraph {
            thread_id,
            nodes,
            index,
            out_adj,
            in_adj,
            und_adj,
            multiplicity,
        }
    }

    pub fn thread_id(&self) -> &str {
        &self.thread_id
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Author ids, ascending; the node index is the position here.
    pub fn node_ids(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, author: &str) -> Option<u32> {
        self.index.get(author).copied()
    }

    /// Number of distinct arcs in the simple digraph.
    pub fn arc_count(&self) -> usize {
        self.multiplicity.len()
    }

    /// Arcs `(from, to, multiplicity)`, ascending by `(from, to)`.
    pub fn arcs(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.multiplicity.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    pub fn has_arc(&self, u: u32, v: u32) -> bool {
        self.out_adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn und_adjacent(&self, u: u32, v: u32) -> bool {
        self.und_adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn undirected_neighbors(&self, u: u32) -> &[u32] {
        &self.und_adj[u as usize]
    }

    pub fn out_neighbors(&self, u: u32) -> &[u32] {
        &self.out_adj[u as usize]
    }

    pub fn in_neighbors(&self, u: u32) -> &[u32] {
        &self.in_adj[u as usize]
    }

    /// Count of node pairs connected by arcs in both directions.
    pub fn mutual_pair_count(&self) -> u64 {
        self.multiplicity
            .keys()
            .filter(|&&(u, v)| u < v && self.has_arc(v, u))
            .count() as u64
    }

    /// Multiplicity-weighted (replies received, replies given) for a user.
    pub fn degree_profile(&self, user: &str) -> Result<(u64, u64)> {
        let Some(u) = self.node_index(user) else {
            return Err(Error::UnknownUser(user.to_string()));
        };
        let received = self.in_adj[u as usize]
            .iter()
            .map(|&v| self.multiplicity[&(v, u)])
            .sum();
        let given = self.out_adj[u as usize]
            .iter()
            .map(|&v| self.multiplicity[&(u, v)])
            .sum();
        Ok((received, given))
    }

    /// Per-node (in, out) arc counts on the simple digraph, by node index.
    pub fn simple_degrees(&self) -> Vec<(u32, u32)> {
        (0..self.nodes.len())
            .map(|i| (self.in_adj[i].len() as u32, self.out_adj[i].len() as u32))
            .collect()
    }

    /// Same node set, new arc set with unit multiplicities. Used by the
    /// null model; arcs must already be loop-free and duplicate-free.
    pub(crate) fn with_arcs(&self, arcs: impl IntoIterator<Item = (u32, u32)>) -> ReplyDigraph {
        let mut count = 0usize;
        let multiplicity: BTreeMap<(u32, u32), u64> = arcs
            .into_iter()
            .inspect(|&(u, v)| {
                assert_ne!(u, v, "replica arc set contains a self-loop");
                count += 1;
            })
            .map(|(u, v)| ((u, v), 1))
            .collect();
        assert_eq!(multiplicity.len(), count, "replica arc set contains duplicates");
        Self::assemble(
            self.thread_id.clone(),
            self.nodes.clone(),
            self.index.clone(),
            multiplicity,
        )
    }
}

/// Builds the reply graph of a thread: one node per author, and for every
/// post replying to a different author, an arc replier -> replied-to.
pub fn build_reply_graph(thread: &Thread) -> ReplyDigraph {
    let node_set: BTreeSet<String> = thread
        .posts()
        .iter()
        .map(|p| p.author_id.clone())
        .collect();
    let nodes: Vec<String> = node_set.into_iter().collect();
    let index: BTreeMap<String, u32> = nodes
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as u32))
        .collect();
    let mut multiplicity: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for post in thread.posts() {
        let Some(parent_id) = &post.parent_post_id else {
            continue;
        };
        let parent = thread
            .post_by_id(parent_id)
            .expect("ingestion guarantees parents resolve within the thread");
        if parent.author_id == post.author_id {
            continue;
        }
        let u = index[&post.author_id];
        let v = index[&parent.author_id];
        *multiplicity.entry((u, v)).or_insert(0) += 1;
    }
    ReplyDigraph::assemble(thread.thread_id().to_string(), nodes, index, multiplicity)
}
