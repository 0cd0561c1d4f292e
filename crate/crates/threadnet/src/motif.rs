//! Exact census of connected 3-node motifs in a simple digraph.
//!
//! A triad (induced 3-vertex subgraph) is encoded as the 9-bit row-major
//! integer of its 3x3 adjacency matrix: entry `(i, j)` (1-indexed) carries
//! bit weight `2^(9 - (3(i-1) + j))`, the diagonal is always zero. "Connected"
//! always means connected once arc directions are ignored. There are 54
//! connected loop-free codes and they fall into 13 isomorphism classes; each
//! class is named by the canonical code listed in [`TriadClass::ALL`]. The
//! canonical codes follow the numbering used by the standard motif-detection
//! tools, so ids like 36 (two sources pointing at one sink) and 12 (a directed
//! chain) can be compared across tools directly.
//!
//! [`census_esu`] enumerates every connected induced triad exactly once by
//! growing subgraphs from ordered roots with an exclusive extension set.
//! [`census_bruteforce`] scans all vertex triples and is kept as the
//! independent oracle for the enumerator.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::reply_graph::ReplyDigraph;
use crate::{Error, Result};

/// The 13 canonical class ids, ascending.
pub const TRIAD_CLASS_IDS: [u16; 13] = [6, 12, 14, 36, 38, 46, 78, 102, 140, 164, 166, 174, 238];

/// Node cap for the brute-force census.
pub const BRUTE_FORCE_MAX_NODES: usize = 200;

/// One of the 13 connected directed triad classes, named by canonical code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriadClass(u16);

impl TriadClass {
    pub const ALL: [TriadClass; 13] = {
        let mut all = [TriadClass(0); 13];
        let mut i = 0;
        while i < 13 {
            all[i] = TriadClass(TRIAD_CLASS_IDS[i]);
            i += 1;
        }
        all
    };

    /// Wraps a canonical id; `None` if `id` is not one of the 13.
    pub fn from_id(id: u16) -> Option<TriadClass> {
        TRIAD_CLASS_IDS
            .binary_search(&id)
            .ok()
            .map(|_| TriadClass(id))
    }

    pub fn id(self) -> u16 {
        self.0
    }

    /// Position of this class in [`TriadClass::ALL`].
    pub fn index(self) -> usize {
        TRIAD_CLASS_IDS
            .binary_search(&self.0)
            .expect("TriadClass always holds a canonical id")
    }
}

impl std::fmt::Display for TriadClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bit weight of adjacency entry `(i, j)`, 0-indexed.
#[inline]
fn bit(i: usize, j: usize) -> u16 {
    debug_assert!(i < 3 && j < 3 && i != j);
    1 << (8 - (3 * i + j))
}

/// Decodes a 9-bit code into its arc list.
fn decode_arcs(code: u16) -> Vec<(usize, usize)> {
    let mut arcs = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j && code & bit(i, j) != 0 {
                arcs.push((i, j));
            }
        }
    }
    arcs
}

/// True when the code's diagonal bits are clear.
fn diagonal_free(code: u16) -> bool {
    code < 512 && code & (bit_diag(0) | bit_diag(1) | bit_diag(2)) == 0
}

#[inline]
fn bit_diag(i: usize) -> u16 {
    1 << (8 - (3 * i + i))
}

/// Weak connectivity of a loop-free 3-node code: with three vertices, the
/// direction-ignored graph is connected iff at least two of the three vertex
/// pairs are adjacent.
fn is_connected_code(code: u16) -> bool {
    let arcs = decode_arcs(code);
    let mut pair = [false; 3]; // pairs (0,1), (0,2), (1,2)
    for (u, v) in arcs {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let idx = match (a, b) {
            (0, 1) => 0,
            (0, 2) => 1,
            _ => 2,
        };
        pair[idx] = true;
    }
    pair.iter().filter(|p| **p).count() >= 2
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Re-encodes `code` with vertex `v` renamed to `perm[v]`.
fn permute_code(code: u16, perm: &[usize; 3]) -> u16 {
    let mut out = 0;
    for (i, j) in decode_arcs(code) {
        out |= bit(perm[i], perm[j]);
    }
    out
}

/// Total map from connected loop-free 3-node codes to their canonical class.
///
/// Built by decoding each of the 13 canonical ids into a representative arc
/// set and closing over all 6 vertex relabelings. Construction self-checks
/// totality (all 54 connected codes covered, no others), permutation closure,
/// and that each canonical id maps to itself.
pub struct CanonicalTable {
    class_of: [u16; 512],
}

/// Builds and self-checks the canonical class table.
pub fn build_canonical_table() -> Result<CanonicalTable> {
    let mut class_of = [0u16; 512];
    for &id in &TRIAD_CLASS_IDS {
        for perm in &PERMUTATIONS {
            let code = permute_code(id, perm);
            let slot = &mut class_of[code as usize];
            if *slot != 0 && *slot != id {
                return Err(Error::CanonicalTable(format!(
                    "code {code} claimed by classes {} and {id}",
                    *slot
                )));
            }
            *slot = id;
        }
    }

    let table = CanonicalTable { class_of };

    // Totality and exclusion: presence in the table must coincide with weak
    // connectivity over all 64 loop-free codes.
    let mut covered = 0usize;
    for code in 0u16..512 {
        if !diagonal_free(code) {
            if table.class_of[code as usize] != 0 {
                return Err(Error::CanonicalTable(format!(
                    "code {code} has diagonal bits but is mapped"
                )));
            }
            continue;
        }
        let mapped = table.class_of[code as usize] != 0;
        if mapped != is_connected_code(code) {
            return Err(Error::CanonicalTable(format!(
                "code {code}: connectivity {} but mapped {}",
                is_connected_code(code),
                mapped
            )));
        }
        if mapped {
            covered += 1;
        }
    }
    if covered != 54 {
        return Err(Error::CanonicalTable(format!(
            "expected 54 connected codes, found {covered}"
        )));
    }

    // Permutation closure and fixed points.
    for code in 0u16..512 {
        let id = table.class_of[code as usize];
        if id == 0 {
            continue;
        }
        for perm in &PERMUTATIONS {
            let image = permute_code(code, perm);
            if table.class_of[image as usize] != id {
                return Err(Error::CanonicalTable(format!(
                    "codes {code} and {image} are relabelings but map to different classes"
                )));
            }
        }
    }
    for &id in &TRIAD_CLASS_IDS {
        if table.class_of[id as usize] != id {
            return Err(Error::CanonicalTable(format!(
                "canonical id {id} does not map to itself"
            )));
        }
    }

    Ok(table)
}

impl CanonicalTable {
    /// The process-wide table. Construction failure is unrecoverable.
    pub fn shared() -> &'static CanonicalTable {
        static TABLE: OnceLock<CanonicalTable> = OnceLock::new();
        TABLE.get_or_init(|| build_canonical_table().expect("canonical table self-check"))
    }

    /// Classifies a connected loop-free adjacency code.
    pub fn classify_code(&self, code: u16) -> Result<TriadClass> {
        if !diagonal_free(code) {
            return Err(Error::InvalidTriadCode(code));
        }
        match self.class_of[code as usize] {
            0 => Err(Error::DisconnectedTriad),
            id => Ok(TriadClass(id)),
        }
    }

    /// Classifies a 3x3 adjacency matrix (zero diagonal, connected).
    pub fn classify_matrix(&self, adjacency: &[[bool; 3]; 3]) -> Result<TriadClass> {
        let mut code = 0u16;
        for (i, row) in adjacency.iter().enumerate() {
            for (j, &arc) in row.iter().enumerate() {
                if arc {
                    if i == j {
                        return Err(Error::InvalidTriadCode(1 << (8 - (3 * i + j))));
                    }
                    code |= bit(i, j);
                }
            }
        }
        self.classify_code(code)
    }

    /// All `(code, class id)` rows, ascending by code. 54 rows.
    pub fn rows(&self) -> Vec<(u16, u16)> {
        (0u16..512)
            .filter(|&c| self.class_of[c as usize] != 0)
            .map(|c| (c, self.class_of[c as usize]))
            .collect()
    }
}

/// Exact counts of connected induced triads, by class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MotifCensus {
    counts: [u64; 13],
    total: u64,
}

impl MotifCensus {
    pub fn count(&self, class: TriadClass) -> u64 {
        self.counts[class.index()]
    }

    pub fn total_connected_triads(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn add(&mut self, class: TriadClass) {
        self.add_many(class, 1);
    }

    pub fn add_many(&mut self, class: TriadClass, count: u64) {
        self.counts[class.index()] += count;
        self.total += count;
    }

    /// Pointwise sum; used to pool per-thread censuses.
    pub fn merge(&mut self, other: &MotifCensus) {
        for i in 0..13 {
            self.counts[i] += other.counts[i];
        }
        self.total += other.total;
    }

    /// `(class, count)` pairs in ascending class order, all 13 classes.
    pub fn iter(&self) -> impl Iterator<Item = (TriadClass, u64)> + '_ {
        TriadClass::ALL.iter().map(|&c| (c, self.counts[c.index()]))
    }

    /// Per-class share of all connected triads; all 13 classes are present in
    /// the result (absent classes at 0.0). Errors when the census is empty.
    pub fn concentration(&self) -> Result<BTreeMap<TriadClass, f64>> {
        if self.total == 0 {
            return Err(Error::EmptyCensus);
        }
        let total = self.total as f64;
        Ok(self
            .iter()
            .map(|(class, count)| (class, count as f64 / total))
            .collect())
    }
}

/// Adjacency code of the triple `(a, b, c)` taken as matrix rows 1..3.
fn triple_code(g: &ReplyDigraph, a: u32, b: u32, c: u32) -> u16 {
    let v = [a, b, c];
    let mut code = 0u16;
    for i in 0..3 {
        for j in 0..3 {
            if i != j && g.has_arc(v[i], v[j]) {
                code |= bit(i, j);
            }
        }
    }
    code
}

/// Enumerates every connected induced `k`-vertex subgraph exactly once,
/// calling `visit` with the vertex subset (root first, discovery order).
///
/// Subgraphs grow from an ordered root over direction-ignored neighbors with
/// id greater than the root, and a candidate joins the extension set only
/// when it is not adjacent to the subgraph built so far (the exclusive
/// neighborhood rule), which is what guarantees each subset appears once.
/// The scheme works for any `k`; motif classification is defined for `k = 3`
/// only.
pub fn enumerate_connected_subsets(g: &ReplyDigraph, k: usize, mut visit: impl FnMut(&[u32])) {
    if k == 0 {
        return;
    }
    let n = g.node_count() as u32;
    let mut sub = Vec::with_capacity(k);
    for root in 0..n {
        sub.push(root);
        if k == 1 {
            visit(&sub);
        } else {
            let ext: Vec<u32> = g
                .undirected_neighbors(root)
                .iter()
                .copied()
                .filter(|&u| u > root)
                .collect();
            extend_subset(g, k, root, &mut sub, ext, &mut visit);
        }
        sub.pop();
    }
}

fn extend_subset(
    g: &ReplyDigraph,
    k: usize,
    root: u32,
    sub: &mut Vec<u32>,
    mut ext: Vec<u32>,
    visit: &mut impl FnMut(&[u32]),
) {
    while let Some(w) = ext.pop() {
        sub.push(w);
        if sub.len() == k {
            visit(sub);
        } else {
            // Candidates exclusive to w: neighbors beyond the root that are
            // not adjacent to the subgraph as it stood before w joined.
            let before_w = sub.len() - 1;
            let mut ext2 = ext.clone();
            for &u in g.undirected_neighbors(w) {
                if u > root
                    && !sub[..before_w]
                        .iter()
                        .any(|&s| s == u || g.und_adjacent(s, u))
                {
                    ext2.push(u);
                }
            }
            extend_subset(g, k, root, sub, ext2, visit);
        }
        sub.pop();
    }
}

/// Exact census of all connected induced 3-node subgraphs.
pub fn census_esu(g: &ReplyDigraph) -> MotifCensus {
    let table = CanonicalTable::shared();
    let mut census = MotifCensus::default();
    enumerate_connected_subsets(g, 3, |sub| {
        let class = table
            .classify_code(triple_code(g, sub[0], sub[1], sub[2]))
            .expect("enumerated triads are connected");
        census.add(class);
    });
    census
}

/// Exhaustive-subset census, the independent oracle for [`census_esu`].
///
/// Scans all `C(n, 3)` vertex triples; disconnected triples are skipped.
/// Guarded to [`BRUTE_FORCE_MAX_NODES`] nodes.
pub fn census_bruteforce(g: &ReplyDigraph) -> Result<MotifCensus> {
    let n = g.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::BruteForceGuard {
            n,
            max: BRUTE_FORCE_MAX_NODES,
        });
    }
    let table = CanonicalTable::shared();
    let mut census = MotifCensus::default();
    let n = n as u32;
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                match table.classify_code(triple_code(g, a, b, c)) {
                    Ok(class) => census.add(class),
                    Err(Error::DisconnectedTriad) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reply_graph::ReplyDigraph;

    fn graph(nodes: &[&str], arcs: &[(&str, &str)]) -> ReplyDigraph {
        ReplyDigraph::from_parts(
            "t",
            nodes.iter().map(|s| s.to_string()),
            arcs.iter().map(|&(u, v)| (u.to_string(), v.to_string(), 1)),
        )
        .unwrap()
    }

    #[test]
    fn representative_arc_sets_decode_from_ids() {
        // Each canonical id decodes to its representative arc set (1-indexed
        // vertices in the expectation, 0-indexed in decode_arcs).
        let expect: &[(u16, &[(usize, usize)])] = &[
            (6, &[(3, 1), (3, 2)]),
            (12, &[(2, 3), (3, 1)]),
            (14, &[(2, 3), (3, 1), (3, 2)]),
            (36, &[(2, 1), (3, 1)]),
            (38, &[(2, 1), (3, 1), (3, 2)]),
            (46, &[(2, 1), (2, 3), (3, 1), (3, 2)]),
            (78, &[(1, 3), (2, 3), (3, 1), (3, 2)]),
            (102, &[(1, 3), (2, 1), (3, 1), (3, 2)]),
            (140, &[(1, 2), (2, 3), (3, 1)]),
            (164, &[(1, 2), (2, 1), (3, 1)]),
            (166, &[(1, 2), (2, 1), (3, 1), (3, 2)]),
            (174, &[(1, 2), (2, 1), (2, 3), (3, 1), (3, 2)]),
            (
                238,
                &[(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)],
            ),
        ];
        for (id, arcs) in expect {
            let mut want: Vec<(usize, usize)> =
                arcs.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
            want.sort_unstable();
            let mut got = decode_arcs(*id);
            got.sort_unstable();
            assert_eq!(got, want, "decode of id {id}");
        }
    }

    #[test]
    fn table_partitions_54_codes_into_13_classes() {
        let table = build_canonical_table().unwrap();
        let rows = table.rows();
        assert_eq!(rows.len(), 54);
        let mut seen: std::collections::BTreeSet<u16> = Default::default();
        for (_, id) in &rows {
            seen.insert(*id);
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), TRIAD_CLASS_IDS);
    }

    #[test]
    fn orbits_match_hand_enumeration() {
        let table = CanonicalTable::shared();
        // In-star: the three codes of class 36.
        for code in [36u16, 72, 130] {
            assert_eq!(table.classify_code(code).unwrap().id(), 36);
        }
        // Mutual dyad plus one incoming arc: the six codes of class 164.
        for code in [164u16, 162, 138, 100, 76, 74] {
            assert_eq!(table.classify_code(code).unwrap().id(), 164);
        }
        // Directed 3-cycle: two orientations only.
        assert_eq!(table.classify_code(140).unwrap().id(), 140);
        assert_eq!(table.classify_code(98).unwrap().id(), 140);
        let cycle_codes: Vec<u16> = table
            .rows()
            .into_iter()
            .filter(|(_, id)| *id == 140)
            .map(|(c, _)| c)
            .collect();
        assert_eq!(cycle_codes, vec![98, 140]);
        // The complete triad is alone in its class.
        let full: Vec<u16> = table
            .rows()
            .into_iter()
            .filter(|(_, id)| *id == 238)
            .map(|(c, _)| c)
            .collect();
        assert_eq!(full, vec![238]);
    }

    #[test]
    fn classify_matrix_matches_code_path() {
        let table = CanonicalTable::shared();
        // Chain A->B, B->C as rows (A,B,C): arcs (1,2) and (2,3).
        let m = [
            [false, true, false],
            [false, false, true],
            [false, false, false],
        ];
        assert_eq!(table.classify_matrix(&m).unwrap().id(), 12);
    }

    #[test]
    fn disconnected_codes_are_rejected() {
        let table = CanonicalTable::shared();
        assert!(matches!(
            table.classify_code(0),
            Err(Error::DisconnectedTriad)
        ));
        // Single arc 1->2 leaves vertex 3 isolated.
        assert!(matches!(
            table.classify_code(128),
            Err(Error::DisconnectedTriad)
        ));
        // Diagonal bit set.
        assert!(matches!(
            table.classify_code(256),
            Err(Error::InvalidTriadCode(256))
        ));
    }

    #[test]
    fn in_star_census_counts_leaf_pairs() {
        // Four users each replying once to one author: C(4,2) = 6 triads, all 36.
        let g = graph(
            &["a", "b", "c", "d", "e"],
            &[("b", "a"), ("c", "a"), ("d", "a"), ("e", "a")],
        );
        let census = census_esu(&g);
        assert_eq!(census.total_connected_triads(), 6);
        assert_eq!(census.count(TriadClass::from_id(36).unwrap()), 6);
        assert_eq!(census, census_bruteforce(&g).unwrap());
    }

    #[test]
    fn two_node_graph_has_empty_census() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        let census = census_esu(&g);
        assert!(census.is_empty());
        assert_eq!(census, census_bruteforce(&g).unwrap());
    }

    #[test]
    fn mutual_triangle_is_class_238() {
        let g = graph(
            &["a", "b", "c"],
            &[
                ("a", "b"),
                ("b", "a"),
                ("b", "c"),
                ("c", "b"),
                ("a", "c"),
                ("c", "a"),
            ],
        );
        let census = census_esu(&g);
        assert_eq!(census.total_connected_triads(), 1);
        assert_eq!(census.count(TriadClass::from_id(238).unwrap()), 1);
    }

    #[test]
    fn directed_path_counts_chains() {
        // a->b->c->d: connected triples are consecutive only, both class 12.
        let g = graph(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")]);
        let census = census_esu(&g);
        assert_eq!(census.total_connected_triads(), 2);
        assert_eq!(census.count(TriadClass::from_id(12).unwrap()), 2);
        assert_eq!(census, census_bruteforce(&g).unwrap());
    }

    #[test]
    fn brute_force_guard_trips() {
        let nodes: Vec<String> = (0..201).map(|i| format!("u{i:03}")).collect();
        let g = ReplyDigraph::from_parts(
            "t",
            nodes.iter().cloned(),
            (1..201).map(|i| (nodes[i].clone(), nodes[0].clone(), 1)),
        )
        .unwrap();
        assert!(matches!(
            census_bruteforce(&g),
            Err(Error::BruteForceGuard { n: 201, .. })
        ));
        // The enumerator itself has no guard.
        assert_eq!(census_esu(&g).total_connected_triads(), 200 * 199 / 2);
    }

    #[test]
    fn concentration_normalizes_and_rejects_empty() {
        let g = graph(&["a", "b", "c", "d"], &[("b", "a"), ("c", "a"), ("d", "c")]);
        let census = census_esu(&g);
        // Triples: {a,b,c} in-star 36; {a,c,d} chain 12; {b,c,d}, {a,b,d} disconnected.
        assert_eq!(census.count(TriadClass::from_id(36).unwrap()), 1);
        assert_eq!(census.count(TriadClass::from_id(12).unwrap()), 1);
        let conc = census.concentration().unwrap();
        assert_eq!(conc[&TriadClass::from_id(36).unwrap()], 0.5);
        assert_eq!(conc[&TriadClass::from_id(12).unwrap()], 0.5);
        assert_eq!(conc.values().sum::<f64>(), 1.0);

        let empty = MotifCensus::default();
        assert!(matches!(empty.concentration(), Err(Error::EmptyCensus)));
    }

    /// Bitmask-and-BFS oracle: how many k-vertex subsets induce a connected
    /// subgraph when arc directions are ignored.
    fn connected_subset_count(g: &ReplyDigraph, k: usize) -> usize {
        let n = g.node_count();
        assert!(n <= 16);
        let mut count = 0;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let members: Vec<u32> = (0..n as u32).filter(|&v| mask & (1 << v) != 0).collect();
            let mut seen = vec![false; n];
            let mut queue = vec![members[0]];
            seen[members[0] as usize] = true;
            let mut reached = 1;
            while let Some(v) = queue.pop() {
                for &u in g.undirected_neighbors(v) {
                    if mask & (1 << u) != 0 && !seen[u as usize] {
                        seen[u as usize] = true;
                        reached += 1;
                        queue.push(u);
                    }
                }
            }
            if reached == k {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn generic_enumeration_visits_each_connected_subset_once() {
        let complete = {
            let names: Vec<String> = (0..6).map(|i| format!("k{i}")).collect();
            let mut arcs = Vec::new();
            for i in 0..6u32 {
                for j in 0..6u32 {
                    if i != j {
                        arcs.push((names[i as usize].clone(), names[j as usize].clone(), 1));
                    }
                }
            }
            ReplyDigraph::from_parts("k6", names.iter().cloned(), arcs).unwrap()
        };
        let path = graph(
            &["a", "b", "c", "d", "e", "f", "g"],
            &[
                ("a", "b"),
                ("b", "c"),
                ("c", "d"),
                ("d", "e"),
                ("e", "f"),
                ("f", "g"),
            ],
        );
        let star = graph(
            &["hub", "l1", "l2", "l3", "l4", "l5"],
            &[
                ("l1", "hub"),
                ("l2", "hub"),
                ("l3", "hub"),
                ("l4", "hub"),
                ("l5", "hub"),
            ],
        );
        for g in [&complete, &path, &star] {
            for k in 1..=4 {
                let mut seen: std::collections::BTreeSet<Vec<u32>> = Default::default();
                let mut visits = 0usize;
                enumerate_connected_subsets(g, k, |sub| {
                    let mut s = sub.to_vec();
                    s.sort_unstable();
                    assert_eq!(s.len(), k);
                    assert!(seen.insert(s), "subset visited twice: {sub:?}");
                    visits += 1;
                });
                assert_eq!(visits, connected_subset_count(g, k), "k={k}");
            }
        }
    }

    #[test]
    fn census_is_independent_of_node_insertion_order() {
        let forward = graph(&["a", "b", "c", "d"], &[("b", "a"), ("c", "a"), ("d", "b")]);
        let reversed = graph(&["d", "c", "b", "a"], &[("d", "b"), ("c", "a"), ("b", "a")]);
        assert_eq!(census_esu(&forward), census_esu(&reversed));
    }
}
