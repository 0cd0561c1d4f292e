//! Degree-preserving randomization and motif significance.
//!
//! Replicas are produced by the switching method: repeated attempts to swap
//! two directed arcs `(a->b, c->d)` into `(a->d, c->b)`. An attempt is
//! rejected when it would be a no-op, create a self-loop, duplicate an
//! existing arc, or (with `preserve_reciprocal` on) change the number of
//! mutual pairs. Attempts, not successes, are budgeted, so termination is
//! unconditional. Every node keeps its exact in- and out-degree.
//!
//! Randomization consumes and produces the collapsed simple digraph: replica
//! arcs carry multiplicity 1. Graphs with fewer than two arcs are returned
//! unchanged.
//!
//! The significance of an observed motif count is reported two ways: the raw
//! difference from the ensemble mean, and the z-score (raw difference divided
//! by the sample standard deviation, divisor N-1). A zero-spread ensemble
//! leaves z undefined rather than infinite.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::motif::{census_esu, MotifCensus, TriadClass};
use crate::reply_graph::ReplyDigraph;
use crate::rng::{replica_seed, thread_seed, SplitMix64};
use crate::{Error, Result};

/// Ensemble parameters. Replica `i` is fully determined by
/// `(master_seed, i)`; see [`crate::rng`] for the stream derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomizationConfig {
    pub replicas: u32,
    pub swap_attempts_per_edge: u32,
    pub preserve_reciprocal: bool,
    pub master_seed: u64,
}

impl Default for RandomizationConfig {
    fn default() -> Self {
        RandomizationConfig {
            replicas: 100,
            swap_attempts_per_edge: 10,
            preserve_reciprocal: true,
            master_seed: 0,
        }
    }
}

impl RandomizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            return Err(Error::InvalidConfig("replicas must be >= 1".to_string()));
        }
        Ok(())
    }

    /// The same config with a per-thread sub-master seed, so commands that
    /// randomize many threads do not reuse one replica stream across
    /// isomorphic graphs.
    pub fn for_thread(&self, thread_id: &str) -> RandomizationConfig {
        RandomizationConfig {
            master_seed: thread_seed(self.master_seed, thread_id),
            ..*self
        }
    }
}

/// One degree-preserving replica of `g`, deterministic in
/// `(config.master_seed, replica_index)`.
pub fn randomize(
    g: &ReplyDigraph,
    config: &RandomizationConfig,
    replica_index: u64,
) -> ReplyDigraph {
    let mut arcs: Vec<(u32, u32)> = g.arcs().map(|(u, v, _)| (u, v)).collect();
    if arcs.len() < 2 {
        return g.clone();
    }
    let mut present: HashSet<(u32, u32)> = arcs.iter().copied().collect();
    let mut rng = SplitMix64::new(replica_seed(config.master_seed, replica_index));
    let m = arcs.len() as u64;
    let attempts = m.saturating_mul(u64::from(config.swap_attempts_per_edge));
    for _ in 0..attempts {
        let i = rng.next_below(m) as usize;
        let j = rng.next_below(m) as usize;
        if i == j {
            continue;
        }
        let (a, b) = arcs[i];
        let (c, d) = arcs[j];
        // Shared endpoints: either a no-op rewiring or a would-be self-loop.
        if a == c || b == d || a == d || c == b {
            continue;
        }
        if present.contains(&(a, d)) || present.contains(&(c, b)) {
            continue;
        }
        if config.preserve_reciprocal {
            let gained = u32::from(present.contains(&(d, a))) + u32::from(present.contains(&(b, c)));
            let lost = u32::from(present.contains(&(b, a))) + u32::from(present.contains(&(d, c)));
            if gained != lost {
                continue;
            }
        }
        present.remove(&(a, b));
        present.remove(&(c, d));
        present.insert((a, d));
        present.insert((c, b));
        arcs[i] = (a, d);
        arcs[j] = (c, b);
    }
    g.with_arcs(arcs)
}

/// Significance of one class: observed count against its ensemble counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassStats {
    pub class: TriadClass,
    pub observed: u64,
    pub mean_random: f64,
    pub std_random: f64,
    pub raw_diff: f64,
    /// `raw_diff / std_random`; `None` when the ensemble spread is zero.
    pub z: Option<f64>,
}

/// Per-class significance over a whole ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct NullEnsembleStats {
    pub replicas: u32,
    /// All 13 classes, ascending id.
    pub per_class: Vec<ClassStats>,
}

impl NullEnsembleStats {
    pub fn class(&self, class: TriadClass) -> &ClassStats {
        &self.per_class[class.index()]
    }
}

/// Aggregates one class. Sample standard deviation with divisor N-1; a
/// single-replica ensemble has zero spread by convention.
pub fn ensemble_stats(class: TriadClass, observed: u64, replica_counts: &[u64]) -> ClassStats {
    assert!(!replica_counts.is_empty(), "ensemble needs >= 1 replica");
    let n = replica_counts.len() as f64;
    let mean = replica_counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let std = if replica_counts.len() >= 2 {
        let ss: f64 = replica_counts
            .iter()
            .map(|&c| {
                let d = c as f64 - mean;
                d * d
            })
            .sum();
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let raw_diff = observed as f64 - mean;
    let z = if std > 0.0 { Some(raw_diff / std) } else { None };
    ClassStats {
        class,
        observed,
        mean_random: mean,
        std_random: std,
        raw_diff,
        z,
    }
}

fn stats_from_censuses(observed: &MotifCensus, replicas: &[MotifCensus]) -> NullEnsembleStats {
    let per_class = TriadClass::ALL
        .iter()
        .map(|&class| {
            let counts: Vec<u64> = replicas.iter().map(|c| c.count(class)).collect();
            ensemble_stats(class, observed.count(class), &counts)
        })
        .collect();
    NullEnsembleStats {
        replicas: replicas.len() as u32,
        per_class,
    }
}

/// Census of `g` against `config.replicas` randomized replicas.
///
/// Replicas are generated independently (and possibly in parallel) and then
/// aggregated in replica order, so results do not depend on worker count.
/// Errors when the observed census is empty.
pub fn significance(g: &ReplyDigraph, config: &RandomizationConfig) -> Result<NullEnsembleStats> {
    config.validate()?;
    let observed = census_esu(g);
    if observed.is_empty() {
        return Err(Error::EmptyCensus);
    }
    let replicas: Vec<MotifCensus> = (0..u64::from(config.replicas))
        .into_par_iter()
        .map(|i| census_esu(&randomize(g, config, i)))
        .collect();
    Ok(stats_from_censuses(&observed, &replicas))
}

/// Pooled significance across several graphs: observed censuses are summed,
/// and pooled replica `i` sums each graph's replica `i`, with graph `t`
/// seeded by `seeds[t]`. Count accumulation is exact integer addition, so the
/// parallel reduction is order-insensitive.
pub fn significance_pooled(
    graphs: &[ReplyDigraph],
    config: &RandomizationConfig,
    seeds: &[u64],
) -> Result<NullEnsembleStats> {
    config.validate()?;
    assert_eq!(graphs.len(), seeds.len(), "one seed per graph");
    let mut observed = MotifCensus::default();
    for g in graphs {
        observed.merge(&census_esu(g));
    }
    if observed.is_empty() {
        return Err(Error::EmptyCensus);
    }
    let r = config.replicas as usize;
    let pooled: Vec<MotifCensus> = graphs
        .par_iter()
        .zip(seeds.par_iter())
        .map(|(g, &seed)| {
            let cfg = RandomizationConfig {
                master_seed: seed,
                ..*config
            };
            (0..r as u64)
                .map(|i| census_esu(&randomize(g, &cfg, i)))
                .collect::<Vec<_>>()
        })
        .reduce(
            || vec![MotifCensus::default(); r],
            |mut acc, item| {
                for (a, b) in acc.iter_mut().zip(item.iter()) {
                    a.merge(b);
                }
                acc
            },
        );
    Ok(stats_from_censuses(&observed, &pooled))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: u32, arcs: &[(u32, u32)]) -> ReplyDigraph {
        let names: Vec<String> = (0..n).map(|i| format!("u{i:02}")).collect();
        ReplyDigraph::from_parts(
            "t",
            names.iter().cloned(),
            arcs.iter()
                .map(|&(u, v)| (names[u as usize].clone(), names[v as usize].clone(), 1)),
        )
        .unwrap()
    }

    #[test]
    fn zero_swaps_returns_the_input() {
        let g = graph(4, &[(1, 0), (2, 0), (3, 2), (0, 3)]);
        let cfg = RandomizationConfig {
            swap_attempts_per_edge: 0,
            ..Default::default()
        };
        for i in 0..5 {
            assert_eq!(randomize(&g, &cfg, i), g);
        }
    }

    #[test]
    fn in_star_admits_no_swap() {
        // Every arc shares the target, so every attempt is rejected.
        let g = graph(5, &[(1, 0), (2, 0), (3, 0), (4, 0)]);
        let cfg = RandomizationConfig::default();
        for i in 0..20 {
            assert_eq!(randomize(&g, &cfg, i), g);
        }
    }

    #[test]
    fn single_arc_graph_is_copied_unchanged() {
        let g = graph(2, &[(0, 1)]);
        let cfg = RandomizationConfig::default();
        assert_eq!(randomize(&g, &cfg, 0), g);
    }

    #[test]
    fn degrees_and_simplicity_are_preserved() {
        let g = graph(
            8,
            &[
                (0, 1),
                (1, 0),
                (2, 0),
                (3, 0),
                (3, 4),
                (4, 5),
                (5, 3),
                (6, 5),
                (7, 6),
                (2, 7),
            ],
        );
        let cfg = RandomizationConfig {
            master_seed: 99,
            ..Default::default()
        };
        let before = g.simple_degrees();
        let mut saw_change = false;
        for i in 0..50 {
            let r = randomize(&g, &cfg, i);
            assert_eq!(r.simple_degrees(), before, "replica {i}");
            assert_eq!(r.arc_count(), g.arc_count());
            saw_change |= r != g;
        }
        assert!(saw_change, "ensemble never moved; swap machinery inert");
    }

    #[test]
    fn reciprocal_pairs_are_preserved_when_flagged() {
        let g = graph(
            8,
            &[
                (0, 1),
                (1, 0),
                (2, 3),
                (3, 2),
                (4, 0),
                (5, 2),
                (4, 6),
                (6, 7),
                (7, 4),
                (5, 7),
            ],
        );
        assert_eq!(g.mutual_pair_count(), 2);
        let preserve = RandomizationConfig {
            master_seed: 7,
            ..Default::default()
        };
        for i in 0..100 {
            assert_eq!(randomize(&g, &preserve, i).mutual_pair_count(), 2);
        }
        let destroy = RandomizationConfig {
            preserve_reciprocal: false,
            master_seed: 7,
            ..Default::default()
        };
        let changed = (0..100).any(|i| randomize(&g, &destroy, i).mutual_pair_count() != 2);
        assert!(changed, "without the flag some replica should alter reciprocity");
    }

    #[test]
    fn replicas_are_deterministic_and_order_independent() {
        let g = graph(6, &[(1, 0), (2, 0), (3, 1), (4, 2), (5, 4), (0, 5)]);
        let cfg = RandomizationConfig {
            master_seed: 1234,
            ..Default::default()
        };
        let r3 = randomize(&g, &cfg, 3);
        let _ = randomize(&g, &cfg, 0);
        assert_eq!(r3, randomize(&g, &cfg, 3));
        assert_ne!(randomize(&g, &cfg, 0), randomize(&g, &cfg, 1));
    }

    #[test]
    fn hand_computed_two_replica_ensemble() {
        let class = TriadClass::from_id(36).unwrap();
        let stats = ensemble_stats(class, 5, &[3, 5]);
        assert_eq!(stats.mean_random, 4.0);
        assert!((stats.std_random - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(stats.raw_diff, 1.0);
        let z = stats.z.unwrap();
        assert!((z - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_replica_has_undefined_z() {
        let class = TriadClass::from_id(12).unwrap();
        let stats = ensemble_stats(class, 2, &[2]);
        assert_eq!(stats.std_random, 0.0);
        assert_eq!(stats.z, None);
        assert_eq!(stats.raw_diff, 0.0);
    }

    #[test]
    fn zero_swap_significance_is_selfsame() {
        let g = graph(4, &[(1, 0), (2, 0), (3, 0)]);
        let cfg = RandomizationConfig {
            swap_attempts_per_edge: 0,
            replicas: 10,
            ..Default::default()
        };
        let stats = significance(&g, &cfg).unwrap();
        for cs in &stats.per_class {
            assert_eq!(cs.raw_diff, 0.0);
            assert_eq!(cs.std_random, 0.0);
            assert_eq!(cs.z, None);
            assert_eq!(cs.mean_random, cs.observed as f64);
        }
    }

    #[test]
    fn empty_census_is_rejected() {
        let g = graph(2, &[(0, 1)]);
        assert!(matches!(
            significance(&g, &RandomizationConfig::default()),
            Err(Error::EmptyCensus)
        ));
    }

    #[test]
    fn invalid_config_is_rejected() {
        let g = graph(4, &[(1, 0), (2, 0), (3, 0)]);
        let cfg = RandomizationConfig {
            replicas: 0,
            ..Default::default()
        };
        assert!(matches!(
            significance(&g, &cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn pooled_significance_sums_observed_counts() {
        let a = graph(4, &[(1, 0), (2, 0), (3, 0)]); // three in-star triads
        let b = graph(3, &[(1, 0), (2, 0)]); // one
        let cfg = RandomizationConfig {
            replicas: 4,
            swap_attempts_per_edge: 0,
            ..Default::default()
        };
        let stats = significance_pooled(&[a, b], &cfg, &[11, 22]).unwrap();
        let c36 = stats.class(TriadClass::from_id(36).unwrap());
        assert_eq!(c36.observed, 4);
        assert_eq!(c36.mean_random, 4.0);
        assert_eq!(c36.raw_diff, 0.0);
    }
}
