//! Deterministic, seeded instance generators plus small-n exhaustive
//! enumeration utilities used by the test suites.

use crate::graph::{OrientedGraph, VertexSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid forest plan: {0}")]
    InvalidPlan(String),
}

/// Seeded 64-bit generator with the splitmix recurrence, chosen so any
/// implementation can reproduce identical instances:
///
/// ```text
/// state += 0x9E3779B97F4A7C15
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// output = z ^ (z >> 31)
/// ```
///
/// Booleans are the low bit of the output; bounded draws use `output % n`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    pub fn next_bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    pub fn next_below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// The tight family: a directed path `x_1 … x_{2t+1}` plus the back arcs
/// `x_3 x_1, x_5 x_3, …`, giving `t` arc-disjoint directed 3-cycles with
/// `n = 2t+1`, `m = 3t`. Vertex `x_i` gets id `i − 1`.
pub fn gen_ht(t: usize) -> OrientedGraph {
    assert!(t >= 1, "t must be positive");
    let n = 2 * t + 1;
    let mut arcs = Vec::with_capacity(3 * t);
    for i in 0..n - 1 {
        arcs.push((i, i + 1));
    }
    for j in 1..=t {
        arcs.push((2 * j, 2 * j - 2));
    }
    OrientedGraph::build(n, &arcs).expect("tight-family construction is valid")
}

/// Tournament on `n` vertices; each pair's direction comes from one seeded bit.
pub fn gen_tournament(n: usize, seed: u64) -> OrientedGraph {
    let mut rng = SplitMix64::new(seed);
    let mut arcs = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.next_bool() {
                arcs.push((u, v));
            } else {
                arcs.push((v, u));
            }
        }
    }
    OrientedGraph::build(n, &arcs).expect("tournament construction is valid")
}

/// Connected oriented graph: a random spanning tree first, then each missing
/// pair joined with probability `density`, every edge oriented by a seeded
/// bit. `density = 0` gives an oriented tree, `density = 1` a tournament.
pub fn gen_connected_oriented(n: usize, density: f64, seed: u64) -> OrientedGraph {
    assert!(n >= 1);
    assert!((0.0..=1.0).contains(&density));
    let mut rng = SplitMix64::new(seed);
    let mut present = vec![vec![false; n]; n];
    let mut arcs = Vec::new();
    let mut push = |rng: &mut SplitMix64, present: &mut Vec<Vec<bool>>, u: usize, v: usize| {
        let arc = if rng.next_bool() { (u, v) } else { (v, u) };
        present[u][v] = true;
        present[v][u] = true;
        arcs.push(arc);
    };
    for v in 1..n {
        let parent = rng.next_below(v as u64) as usize;
        push(&mut rng, &mut present, parent, v);
    }
    let threshold = (density * u64::MAX as f64) as u64;
    for u in 0..n {
        for v in (u + 1)..n {
            if present[u][v] {
                continue;
            }
            let take = if density >= 1.0 {
                true
            } else if density <= 0.0 {
                false
            } else {
                rng.next_u64() < threshold
            };
            if take {
                push(&mut rng, &mut present, u, v);
            }
        }
    }
    OrientedGraph::build(n, &arcs).expect("generated graph is valid")
}

/// One block of a forest-of-cliques plan. `attach_to` names an earlier block
/// sharing a single cut vertex; `None` starts a new component.
#[derive(Debug, Clone)]
pub struct BlockPlan {
    pub size: usize,
    pub attach_to: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ForestPlan {
    pub blocks: Vec<BlockPlan>,
    /// Orient every 3-block as a directed 3-cycle (instead of an arbitrary
    /// seeded triangle orientation).
    pub cyclic_triangles: bool,
    /// Reject plans that put two 2-blocks into one component.
    pub single_two_block_per_component: bool,
}

/// A generated forest of cliques with its construction-time ground truth:
/// the block list plus leaf/path block counts classified directly from the
/// plan structure (independently of any graph-side block recomputation).
#[derive(Debug, Clone)]
pub struct PlannedForest {
    pub graph: OrientedGraph,
    pub blocks: Vec<VertexSet>,
    pub leaf_blocks: usize,
    pub path_blocks: usize,
}

pub fn gen_forest_of_cliques(plan: &ForestPlan, seed: u64) -> Result<PlannedForest, GenError> {
    let mut rng = SplitMix64::new(seed);
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(plan.blocks.len());
    let mut component_of: Vec<usize> = Vec::with_capacity(plan.blocks.len());
    let mut two_blocks_in_component: Vec<usize> = Vec::new();
    let mut arcs = Vec::new();
    let mut next_vertex = 0usize;

    for (i, bp) in plan.blocks.iter().enumerate() {
        if !(1..=3).contains(&bp.size) {
            return Err(GenError::InvalidPlan(format!(
                "block {i} has size {}, expected 1..=3",
                bp.size
            )));
        }
        let mut members = Vec::with_capacity(bp.size);
        let comp = match bp.attach_to {
            None => {
                two_blocks_in_component.push(0);
                two_blocks_in_component.len() - 1
            }
            Some(j) => {
                if j >= i {
                    return Err(GenError::InvalidPlan(format!(
                        "block {i} attaches to {j}, which is not an earlier block"
                    )));
                }
                if bp.size == 1 {
                    return Err(GenError::InvalidPlan(format!(
                        "block {i} has size 1 and cannot attach to another block"
                    )));
                }
                if plan.blocks[j].size == 1 {
                    return Err(GenError::InvalidPlan(format!(
                        "block {i} attaches to size-1 block {j}, which would stop being a block"
                    )));
                }
                let parent = &blocks[j];
                let cut = parent[rng.next_below(parent.len() as u64) as usize];
                members.push(cut);
                component_of[j]
            }
        };
        while members.len() < bp.size {
            members.push(next_vertex);
            next_vertex += 1;
        }
        if bp.size == 2 {
            two_blocks_in_component[comp] += 1;
            if plan.single_two_block_per_component && two_blocks_in_component[comp] > 1 {
                return Err(GenError::InvalidPlan(format!(
                    "block {i} is a second 2-block in its component"
                )));
            }
        }
        match bp.size {
            2 => {
                let (a, b) = (members[0], members[1]);
                arcs.push(if rng.next_bool() { (a, b) } else { (b, a) });
            }
            3 => {
                let (a, b, c) = (members[0], members[1], members[2]);
                if plan.cyclic_triangles {
                    if rng.next_bool() {
                        arcs.extend([(a, b), (b, c), (c, a)]);
                    } else {
                        arcs.extend([(b, a), (c, b), (a, c)]);
                    }
                } else {
                    for (u, v) in [(a, b), (b, c), (a, c)] {
                        arcs.push(if rng.next_bool() { (u, v) } else { (v, u) });
                    }
                }
            }
            _ => {}
        }
        blocks.push(members);
        component_of.push(comp);
    }

    let graph = OrientedGraph::build(next_vertex, &arcs)
        .map_err(|e| GenError::InvalidPlan(format!("plan produced an invalid graph: {e}")))?;

    // Classify leaf/path blocks from the plan's own structure.
    let mut block_count_of_vertex = vec![0usize; next_vertex];
    for b in &blocks {
        for &v in b {
            block_count_of_vertex[v] += 1;
        }
    }
    let shared =
        |b: &[usize]| -> usize { b.iter().filter(|&&v| block_count_of_vertex[v] >= 2).count() };
    let leaf: Vec<bool> = blocks.iter().map(|b| shared(b) <= 1).collect();
    let mut path_not_leaf = 0usize;
    for (i, b) in blocks.iter().enumerate() {
        if leaf[i] {
            continue;
        }
        let is_path = blocks.iter().enumerate().any(|(j, b2)| {
            if i == j {
                return false;
            }
            let common: Vec<usize> = b.iter().filter(|v| b2.contains(v)).copied().collect();
            if common.len() != 1 || block_count_of_vertex[common[0]] != 2 {
                return false;
            }
            let outside = |own: &[usize], other: &[usize]| {
                own.iter()
                    .filter(|&&v| {
                        let elsewhere =
                            block_count_of_vertex[v] - 1 - usize::from(other.contains(&v));
                        elsewhere >= 1
                    })
                    .count()
            };
            outside(b, b2) <= 1 && outside(b2, b) <= 1
        });
        if is_path {
            path_not_leaf += 1;
        }
    }

    Ok(PlannedForest {
        graph,
        blocks: blocks.into_iter().map(VertexSet::new).collect(),
        leaf_blocks: leaf.iter().filter(|&&l| l).count(),
        path_blocks: path_not_leaf,
    })
}

/// Seeded random plan: a forest of 1/2/3-blocks for property tests.
pub fn gen_random_forest_plan(max_blocks: usize, seed: u64) -> ForestPlan {
    let mut rng = SplitMix64::new(seed);
    let count = 1 + rng.next_below(max_blocks as u64) as usize;
    let mut blocks: Vec<BlockPlan> = Vec::with_capacity(count);
    for i in 0..count {
        let attachable: Vec<usize> = (0..i).filter(|&j| blocks[j].size >= 2).collect();
        let fresh = attachable.is_empty() || rng.next_below(6) == 0;
        let size = if fresh && rng.next_below(8) == 0 {
            1
        } else {
            2 + rng.next_below(2) as usize
        };
        let attach_to = if fresh {
            None
        } else {
            Some(attachable[rng.next_below(attachable.len() as u64) as usize])
        };
        blocks.push(BlockPlan { size, attach_to });
    }
    ForestPlan {
        blocks,
        cyclic_triangles: true,
        single_two_block_per_component: false,
    }
}

/// All vertex pairs of `0..n` in lexicographic order.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            pairs.push((u, v));
        }
    }
    pairs
}

/// Every oriented graph on `n` labeled vertices, by direct iteration over the
/// 3^C(n,2) per-pair states (absent / forward / backward). Desk scale only.
pub fn for_each_oriented(n: usize, mut f: impl FnMut(&OrientedGraph)) {
    let pairs = all_pairs(n);
    let mut state = vec![0u8; pairs.len()];
    loop {
        let mut arcs = Vec::new();
        for (i, &(u, v)) in pairs.iter().enumerate() {
            match state[i] {
                1 => arcs.push((u, v)),
                2 => arcs.push((v, u)),
                _ => {}
            }
        }
        let g = OrientedGraph::build(n, &arcs).expect("enumerated graph is valid");
        f(&g);
        let mut i = 0;
        loop {
            if i == state.len() {
                return;
            }
            state[i] += 1;
            if state[i] < 3 {
                break;
            }
            state[i] = 0;
            i += 1;
        }
    }
}

pub fn for_each_connected_oriented(n: usize, mut f: impl FnMut(&OrientedGraph)) {
    for_each_oriented(n, |g| {
        if g.is_connected() {
            f(g);
        }
    });
}

/// Every connected undirected edge set on `n` labeled vertices (as a list of
/// pairs), by iteration over the 2^C(n,2) subsets.
pub fn for_each_connected_edge_set(n: usize, mut f: impl FnMut(&[(usize, usize)])) {
    let pairs = all_pairs(n);
    assert!(pairs.len() < 64, "edge-set enumeration is desk scale only");
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
    for mask in 0u64..(1u64 << pairs.len()) {
        edges.clear();
        for (i, &p) in pairs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                edges.push(p);
            }
        }
        if edges_connected(n, &edges) {
            f(&edges);
        }
    }
}

fn edges_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut comps = n;
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            comps -= 1;
        }
    }
    comps == 1
}

/// Every orientation of the given edge set, as an oriented graph.
pub fn for_each_orientation(n: usize, edges: &[(usize, usize)], mut f: impl FnMut(&OrientedGraph)) {
    assert!(edges.len() < 64);
    let mut arcs = Vec::with_capacity(edges.len());
    for mask in 0u64..(1u64 << edges.len()) {
        arcs.clear();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if mask & (1 << i) != 0 {
                arcs.push((v, u));
            } else {
                arcs.push((u, v));
            }
        }
        let g = OrientedGraph::build(n, &arcs).expect("orientation is valid");
        f(&g);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_directed_3cycle;

    #[test]
    fn ht_examples() {
        let h1 = gen_ht(1);
        assert_eq!(h1.n(), 3);
        assert_eq!(h1.arcs(), &[(0, 1), (1, 2), (2, 0)]);
        assert!(is_directed_3cycle(&h1, [0, 1, 2]));

        let h2 = gen_ht(2);
        assert_eq!((h2.n(), h2.m()), (5, 6));

        let h3 = gen_ht(3);
        assert_eq!(crate::bounds::gamma(&h3).0, 24);
    }

    #[test]
    fn ht_blocks_chain() {
        let h3 = gen_ht(3);
        let bd = h3.blocks();
        assert_eq!(bd.blocks.len(), 3);
        for b in &bd.blocks {
            assert_eq!(b.len(), 3);
        }
        assert_eq!(bd.cut_vertices.as_slice(), &[2, 4]);
    }

    #[test]
    fn tournament_properties() {
        let t = gen_tournament(1, 7);
        assert_eq!((t.n(), t.m()), (1, 0));
        let t3 = gen_tournament(3, 11);
        assert_eq!(t3.m(), 3);
        assert_eq!(gen_tournament(6, 42).arcs(), gen_tournament(6, 42).arcs());
    }

    #[test]
    fn connected_oriented_properties() {
        let tree = gen_connected_oriented(8, 0.0, 3);
        assert_eq!(tree.m(), 7);
        assert!(tree.is_connected());
        let full = gen_connected_oriented(6, 1.0, 3);
        assert_eq!(full.m(), 15);
        for seed in 0..40 {
            assert!(gen_connected_oriented(9, 0.25, seed).is_connected());
        }
        assert_eq!(
            gen_connected_oriented(7, 0.5, 9).arcs(),
            gen_connected_oriented(7, 0.5, 9).arcs()
        );
    }

    #[test]
    fn forest_plan_examples() {
        let single = ForestPlan {
            blocks: vec![BlockPlan {
                size: 3,
                attach_to: None,
            }],
            cyclic_triangles: true,
            single_two_block_per_component: true,
        };
        let f = gen_forest_of_cliques(&single, 1).unwrap();
        assert!(is_directed_3cycle(&f.graph, [0, 1, 2]));
        assert_eq!((f.leaf_blocks, f.path_blocks), (1, 0));

        // Chain of three 3-blocks: two leaves and one path block.
        let chain = ForestPlan {
            blocks: vec![
                BlockPlan {
                    size: 3,
                    attach_to: None,
                },
                BlockPlan {
                    size: 3,
                    attach_to: Some(0),
                },
                BlockPlan {
                    size: 3,
                    attach_to: Some(1),
                },
            ],
            cyclic_triangles: true,
            single_two_block_per_component: true,
        };
        // Seed chosen arbitrarily; the chain classification must hold unless
        // the middle block attaches both neighbors at one vertex, so find a
        // seed giving a genuine chain.
        let mut found = false;
        for seed in 0..32 {
            let f = gen_forest_of_cliques(&chain, seed).unwrap();
            let bd = f.graph.blocks();
            assert_eq!(bd.blocks.len(), 3);
            if f.leaf_blocks == 2 && f.path_blocks == 1 {
                found = true;
                break;
            }
        }
        assert!(found);

        let two_pairs = ForestPlan {
            blocks: vec![
                BlockPlan {
                    size: 2,
                    attach_to: None,
                },
                BlockPlan {
                    size: 2,
                    attach_to: Some(0),
                },
            ],
            cyclic_triangles: true,
            single_two_block_per_component: true,
        };
        assert!(matches!(
            gen_forest_of_cliques(&two_pairs, 0),
            Err(GenError::InvalidPlan(_))
        ));
    }

    #[test]
    fn forest_truth_matches_block_recomputation() {
        for seed in 0..200u64 {
            let plan = gen_random_forest_plan(12, seed);
            let f = gen_forest_of_cliques(&plan, seed ^ 0xf00d).unwrap();
            let bd = f.graph.blocks();
            let mut truth: Vec<Vec<usize>> =
                f.blocks.iter().map(|b| b.as_slice().to_vec()).collect();
            truth.sort();
            let recomputed: Vec<Vec<usize>> =
                bd.blocks.iter().map(|b| b.as_slice().to_vec()).collect();
            assert_eq!(truth, recomputed, "seed {seed}");
        }
    }

    #[test]
    fn exhaustive_enumeration_counts() {
        let mut total = 0usize;
        for_each_oriented(3, |_| total += 1);
        assert_eq!(total, 27);
        let mut connected = 0usize;
        for_each_connected_oriented(3, |_| connected += 1);
        // K3 minus at most one edge stays connected: 2 orientations per edge
        // pattern with 2 or 3 edges present.
        assert_eq!(connected, 3 * 4 + 8);

        let mut edge_sets = 0usize;
        for_each_connected_edge_set(3, |_| edge_sets += 1);
        assert_eq!(edge_sets, 4);
    }
}
