//! Brute-force exact solver for the maximum acyclic subgraph on small graphs.
//!
//! Uses the correspondence between acyclic spanning subgraphs and vertex
//! orderings: `a(G)` equals the maximum forward-arc count over all orderings,
//! computed by a subset dynamic program with `f(S) = max over v in S of
//! f(S∖{v}) + |arcs from S∖{v} into v|`. Serves as the independent oracle the
//! rest of the crate is tested against.

use crate::bounds::WitnessOrdering;
use crate::graph::OrientedGraph;
use thiserror::Error;

pub const DEFAULT_ORACLE_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {n} vertices, above the oracle cap of {cap}")]
    TooLarge { n: usize, cap: usize },
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub a: usize,
    pub witness: WitnessOrdering,
}

pub fn oracle_max_acyclic(g: &OrientedGraph) -> Result<OracleResult, OracleError> {
    oracle_max_acyclic_capped(g, DEFAULT_ORACLE_CAP)
}

pub fn oracle_max_acyclic_capped(
    g: &OrientedGraph,
    cap: usize,
) -> Result<OracleResult, OracleError> {
    let n = g.n();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    if n == 0 {
        return Ok(OracleResult {
            a: 0,
            witness: WitnessOrdering {
                order: Vec::new(),
                forward_arcs: 0,
            },
        });
    }
    let in_mask: Vec<u64> = (0..n)
        .map(|v| {
            g.in_neighbors(v)
                .iter()
                .fold(0u64, |acc, &u| acc | (1u64 << u))
        })
        .collect();
    let full: usize = if n == 64 { usize::MAX } else { (1 << n) - 1 };
    let mut f = vec![0u32; full + 1];
    let mut last = vec![0u8; full + 1];
    for s in 1..=full {
        let mut best = 0u32;
        let mut best_v = usize::MAX;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let prev = s & !(1 << v);
            let cand = f[prev] + (in_mask[v] & prev as u64).count_ones();
            // Ascending v with strict improvement keeps the smallest vertex
            // on ties, so witnesses are deterministic.
            if best_v == usize::MAX || cand > best {
                best = cand;
                best_v = v;
            }
        }
        f[s] = best;
        last[s] = best_v as u8;
    }
    let a = f[full] as usize;
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    let witness = WitnessOrdering::from_order(g, order).expect("oracle order is a permutation");
    debug_assert_eq!(witness.forward_arcs, a);
    Ok(OracleResult { a, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{count_forward, gamma, ScoreQ};
    use crate::gen::{gen_connected_oriented, gen_ht, SplitMix64};
    use crate::graph::OrientedGraph;
    use proptest::prelude::*;

    #[test]
    fn tight_family() {
        for t in 1..=3usize {
            let h = gen_ht(t);
            let r = oracle_max_acyclic(&h).unwrap();
            assert_eq!(r.a, 2 * t);
            assert_eq!(ScoreQ::from_arcs(r.a), gamma(&h));
        }
    }

    #[test]
    fn transitive_tournament_keeps_all_arcs() {
        let mut arcs = Vec::new();
        for u in 0..4 {
            for v in (u + 1)..4 {
                arcs.push((u, v));
            }
        }
        let g = OrientedGraph::build(4, &arcs).unwrap();
        assert_eq!(oracle_max_acyclic(&g).unwrap().a, 6);
    }

    // Disconnected graphs are fine for the oracle; the generalized bound
    // with the component count is tight on two disjoint 3-cycles.
    #[test]
    fn disconnected_two_cycles() {
        let g = OrientedGraph::build(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let r = oracle_max_acyclic(&g).unwrap();
        assert_eq!(r.a, 4);
        assert_eq!(ScoreQ::from_arcs(r.a), gamma(&g));
    }

    #[test]
    fn cap_enforced() {
        let g = OrientedGraph::build(21, &[]).unwrap();
        assert_eq!(
            oracle_max_acyclic(&g).unwrap_err(),
            OracleError::TooLarge { n: 21, cap: 20 }
        );
        assert!(oracle_max_acyclic_capped(&g, 21).is_ok());
    }

    #[test]
    fn witness_matches_reported_value() {
        for seed in 0..50u64 {
            let g = gen_connected_oriented(8, 0.4, seed);
            let r = oracle_max_acyclic(&g).unwrap();
            assert_eq!(count_forward(&g, &r.witness.order).unwrap(), r.a);
        }
    }

    proptest! {
        // Adding an arc (keeping orientedness) never decreases the value.
        #[test]
        fn monotone_under_arc_addition(seed in 0u64..2000, n in 2usize..9) {
            let g = gen_connected_oriented(n, 0.3, seed);
            let mut rng = SplitMix64::new(seed ^ 0x9e37);
            let u = (rng.next_u64() % n as u64) as usize;
            let v = (rng.next_u64() % n as u64) as usize;
            if u == v || g.adjacent(u, v) {
                return Ok(());
            }
            let mut arcs = g.arcs().to_vec();
            arcs.push((u, v));
            let bigger = OrientedGraph::build(n, &arcs).unwrap();
            prop_assert!(
                oracle_max_acyclic(&bigger).unwrap().a >= oracle_max_acyclic(&g).unwrap().a
            );
        }

        // Half the arcs are always achievable.
        #[test]
        fn half_arcs_bound(seed in 0u64..2000, n in 1usize..9) {
            let g = gen_connected_oriented(n, 0.5, seed);
            let a = oracle_max_acyclic(&g).unwrap().a;
            prop_assert!(2 * a >= g.m());
        }
    }
}
