//! Kernelization: normalize with the two-way rules, look for the two
//! yes-shortcuts on the one-way set `U`, and otherwise certify that the
//! normalized instance itself has `O(k²)` vertices and arcs.
//!
//! A *dangerous triangle* is a vertex `u ∈ U` together with a 2-vertex block
//! `{a, b}` of `G − U` such that `G[u, a, b]` is a directed 3-cycle. The
//! first shortcut fires when some `u ∈ U` has at least `4k` neighbors in
//! `G − U` outside dangerous triangles with `u`; the second when at least `k`
//! components of `G − U` see `U` only through dangerous triangles. Leaf- and
//! path-block counts bound the remainder: a forest of cliques with blocks of
//! at most three vertices has at most `8l + 2p` vertices.

use crate::bounds::{BoundsError, Instance, WitnessOrdering};
use crate::graph::{is_directed_3cycle, OrientedGraph, VertexSet};
use crate::oracle::{oracle_max_acyclic_capped, DEFAULT_ORACLE_CAP};
use crate::reduce::{
    decompose, detect_rule1, detect_rule2, lift_witness, DecomposeOutcome, DenseStep, EngineConfig,
    EngineError, ReductionTrace, Stepper,
};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("input is not a directed 3-cycle")]
    NotTriangle,
    #[error("labels must be 0 or 1")]
    BadLabel,
    #[error("graph is not a forest of cliques with blocks of at most three vertices")]
    NotForestOfCliques,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// `u ∈ U` plus a 2-vertex block of `G − U` forming a directed 3-cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DangerousTriangle {
    pub u: usize,
    pub pair: [usize; 2],
}

/// Picks two arcs of a labeled directed 3-cycle that form an acyclic
/// subgraph with no arc from a 1-labeled to a 0-labeled vertex. Such a pair
/// always exists: two vertices share a label, their joining arc is safe, and
/// the shared-label pair reaches or is reached by the third vertex.
pub fn label_and_pick(
    g: &OrientedGraph,
    triangle: [usize; 3],
    labels: [u8; 3],
) -> Result<[(usize, usize); 2], KernelError> {
    if !is_directed_3cycle(g, triangle) {
        return Err(KernelError::NotTriangle);
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(KernelError::BadLabel);
    }
    let label_of = |v: usize| labels[triangle.iter().position(|&w| w == v).unwrap()];
    let mut cycle_arcs: Vec<(usize, usize)> = g
        .arcs()
        .iter()
        .filter(|(u, v)| triangle.contains(u) && triangle.contains(v))
        .copied()
        .collect();
    cycle_arcs.sort_unstable();
    for drop in 0..3 {
        let keep: Vec<(usize, usize)> = cycle_arcs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, &a)| a)
            .collect();
        if keep
            .iter()
            .all(|&(u, v)| !(label_of(u) == 1 && label_of(v) == 0))
        {
            return Ok([keep[0], keep[1]]);
        }
    }
    unreachable!("a labeled directed 3-cycle always admits a safe pair")
}

/// The blocks of `G − U` together with the dangerous-triangle incidences.
struct RemainderView {
    /// Components of `G − U`, in original ids.
    components: Vec<VertexSet>,
    /// 2-vertex blocks of `G − U`, in original ids.
    two_blocks: Vec<[usize; 2]>,
}

fn remainder_view(g: &OrientedGraph, u_set: &VertexSet) -> RemainderView {
    let (rest, map) = g.remove_vertices(u_set);
    let bd = rest.blocks();
    let components = rest
        .components(&VertexSet::empty())
        .into_iter()
        .map(|c| c.iter().map(|v| map[v]).collect())
        .collect();
    let two_blocks = bd
        .blocks
        .iter()
        .filter(|b| b.len() == 2)
        .map(|b| [map[b.as_slice()[0]], map[b.as_slice()[1]]])
        .collect();
    RemainderView {
        components,
        two_blocks,
    }
}

/// All dangerous triangles of the instance.
pub fn dangerous_triangles(g: &OrientedGraph, u_set: &VertexSet) -> Vec<DangerousTriangle> {
    let view = remainder_view(g, u_set);
    let mut out = Vec::new();
    for u in u_set.iter() {
        for pair in &view.two_blocks {
            if is_directed_3cycle(g, [u, pair[0], pair[1]]) {
                out.push(DangerousTriangle { u, pair: *pair });
            }
        }
    }
    out
}

/// Number of neighbors of `u` in `G − U` outside dangerous triangles with
/// `u`, plus the per-component breakdown (aligned with the components of
/// `G − U` in min-id order).
pub fn t_u_count(g: &OrientedGraph, u_set: &VertexSet, u: usize) -> (usize, Vec<usize>) {
    let view = remainder_view(g, u_set);
    let dangerous_with_u: Vec<usize> = view
        .two_blocks
        .iter()
        .filter(|pair| is_directed_3cycle(g, [u, pair[0], pair[1]]))
        .flat_map(|pair| pair.iter().copied())
        .collect();
    let mut per_component = vec![0usize; view.components.len()];
    for (ci, comp) in view.components.iter().enumerate() {
        per_component[ci] = comp
            .iter()
            .filter(|&x| g.adjacent(u, x) && !dangerous_with_u.contains(&x))
            .count();
    }
    (per_component.iter().sum(), per_component)
}

/// Fires when some `u ∈ U` has `t_u ≥ 4k`; returns that vertex.
pub fn shortcut_degree_u(g: &OrientedGraph, u_set: &VertexSet, k: i64) -> Option<usize> {
    u_set
        .iter()
        .find(|&u| t_u_count(g, u_set, u).0 as i64 >= 4 * k)
}

/// Fires when at least `k` components of `G − U` touch `U` only through
/// dangerous triangles; returns the component count.
pub fn shortcut_danger(g: &OrientedGraph, u_set: &VertexSet, k: i64) -> Option<usize> {
    let view = remainder_view(g, u_set);
    let mut all_dangerous = 0usize;
    for comp in &view.components {
        let mut incidences = 0usize;
        let mut dangerous = true;
        for x in comp.iter() {
            for u in u_set.iter() {
                if !g.adjacent(u, x) {
                    continue;
                }
                incidences += 1;
                let covered = view.two_blocks.iter().any(|pair| {
                    pair.contains(&x)
                        && comp.contains(pair[0])
                        && is_directed_3cycle(g, [u, pair[0], pair[1]])
                });
                if !covered {
                    dangerous = false;
                }
            }
        }
        if incidences > 0 && dangerous {
            all_dangerous += 1;
        }
    }
    if all_dangerous as i64 >= k {
        Some(all_dangerous)
    } else {
        None
    }
}

#[derive(Debug, Clone)]
pub struct BlockClass {
    pub vertices: VertexSet,
    pub is_leaf: bool,
    pub is_path: bool,
}

/// Leaf- and path-block profile of a forest of cliques. A leaf block shares
/// at most one vertex with other blocks. A path block chains through a
/// neighbor: the two share an exclusive cut vertex and each has at most one
/// vertex in blocks beyond the pair. `path_blocks` counts path blocks that
/// are not leaves.
#[derive(Debug, Clone)]
pub struct BlockProfile {
    pub leaf_blocks: usize,
    pub path_blocks: usize,
    pub classes: Vec<BlockClass>,
}

pub fn block_profile(forest: &OrientedGraph) -> Result<BlockProfile, KernelError> {
    let bd = forest.blocks();
    if bd.blocks.iter().any(|b| b.len() > 3) {
        return Err(KernelError::NotForestOfCliques);
    }
    let in_blocks = |v: usize| bd.blocks_containing(v).len();
    let mut classes = Vec::with_capacity(bd.blocks.len());
    for (i, b) in bd.blocks.iter().enumerate() {
        let shared = b.iter().filter(|&v| in_blocks(v) >= 2).count();
        let is_leaf = shared <= 1;
        let is_path = (0..bd.blocks.len()).any(|j| {
            if i == j {
                return false;
            }
            let common: Vec<usize> = b.iter().filter(|&v| bd.blocks[j].contains(v)).collect();
            if common.len() != 1 || in_blocks(common[0]) != 2 {
                return false;
            }
            let outside = |own: usize, other: usize| {
                bd.blocks[own]
                    .iter()
                    .filter(|&v| {
                        bd.blocks_containing(v)
                            .iter()
                            .any(|&bi| bi != own && bi != other)
                    })
                    .count()
            };
            outside(i, j) <= 1 && outside(j, i) <= 1
        });
        classes.push(BlockClass {
            vertices: b.clone(),
            is_leaf,
            is_path,
        });
    }
    let leaf_blocks = classes.iter().filter(|c| c.is_leaf).count();
    let path_blocks = classes.iter().filter(|c| c.is_path && !c.is_leaf).count();
    debug_assert!(
        forest.n() <= 8 * leaf_blocks + 2 * path_blocks,
        "leaf/path bound must hold on every forest of cliques"
    );
    Ok(BlockProfile {
        leaf_blocks,
        path_blocks,
        classes,
    })
}

#[derive(Debug, Clone)]
pub struct KernelConfig {
    pub shortcuts: bool,
    pub oracle_cap: usize,
    pub engine: EngineConfig,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            shortcuts: true,
            oracle_cap: DEFAULT_ORACLE_CAP,
            engine: EngineConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum YesVia {
    KNonPositive,
    Reduction,
    DegreeShortcut { u: usize },
    DangerShortcut { components: usize },
}

#[derive(Debug, Clone)]
pub struct KernelSizeReport {
    pub n: usize,
    pub m: usize,
    pub k: i64,
    pub vertex_bound: i64,
    pub arc_bound: i64,
}

impl KernelSizeReport {
    pub fn new(n: usize, m: usize, k: i64) -> Self {
        let quad = 12 * k * k + 2 * k;
        KernelSizeReport {
            n,
            m,
            k,
            vertex_bound: 20 * quad + 3 * k,
            arc_bound: 9 * k * k + 60 * quad,
        }
    }

    pub fn within_bounds(&self) -> bool {
        (self.n as i64) <= self.vertex_bound && (self.m as i64) <= self.arc_bound
    }
}

#[derive(Debug, Clone)]
pub enum KernelOutcome {
    Yes {
        witness: Option<WitnessOrdering>,
        trace: ReductionTrace,
        via: YesVia,
    },
    Kernel {
        graph: OrientedGraph,
        k: i64,
        trace: ReductionTrace,
        report: KernelSizeReport,
    },
}

/// Normalizes with the two-way rules, then either answers yes (trivially for
/// `k ≤ 0`, through the reduction, or through a shortcut) or returns the
/// normalized instance, whose size the report bounds by `O(k²)`.
pub fn kernelize(inst: &Instance, cfg: &KernelConfig) -> Result<KernelOutcome, KernelError> {
    if inst.k() <= 0 {
        let witness = if inst.graph().n() <= cfg.oracle_cap {
            Some(
                oracle_max_acyclic_capped(inst.graph(), cfg.oracle_cap)
                    .expect("graph fits under the cap")
                    .witness,
            )
        } else {
            None
        };
        return Ok(KernelOutcome::Yes {
            witness,
            trace: ReductionTrace::empty(inst),
            via: YesVia::KNonPositive,
        });
    }

    // Two-way normalization; k is untouched.
    let mut stepper = Stepper::new(inst);
    loop {
        let g = &stepper.graph;
        if let Some((x, s)) = detect_rule1(g) {
            stepper.perform(DenseStep::R1 { x, s }, &cfg.engine)?;
        } else if let Some(tuple) = detect_rule2(g) {
            stepper.perform(DenseStep::R2 { tuple }, &cfg.engine)?;
        } else {
            break;
        }
    }
    let norm_trace = stepper.into_trace(inst);
    let normalized = Instance::new(norm_trace.final_graph.clone(), inst.k())?;

    match decompose(&normalized, &cfg.engine)? {
        DecomposeOutcome::Yes(dtrace) => {
            let full = norm_trace.concat(&dtrace);
            let witness = if full.final_graph.n() <= cfg.oracle_cap {
                let base = oracle_max_acyclic_capped(&full.final_graph, cfg.oracle_cap)
                    .expect("final graph fits under the cap")
                    .witness;
                Some(lift_witness(&full, &base)?)
            } else {
                None
            };
            Ok(KernelOutcome::Yes {
                witness,
                trace: full,
                via: YesVia::Reduction,
            })
        }
        DecomposeOutcome::Decomposition(dec) => {
            debug_assert!(dec.report.all_hold());
            let g = normalized.graph();
            if cfg.shortcuts {
                if let Some(u) = shortcut_degree_u(g, &dec.u, inst.k()) {
                    return Ok(KernelOutcome::Yes {
                        witness: None,
                        trace: norm_trace,
                        via: YesVia::DegreeShortcut { u },
                    });
                }
                if let Some(components) = shortcut_danger(g, &dec.u, inst.k()) {
                    return Ok(KernelOutcome::Yes {
                        witness: None,
                        trace: norm_trace,
                        via: YesVia::DangerShortcut { components },
                    });
                }
            }
            let report = KernelSizeReport::new(g.n(), g.m(), inst.k());
            Ok(KernelOutcome::Kernel {
                graph: g.clone(),
                k: inst.k(),
                trace: norm_trace,
                report,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{decide_threshold, verify_yes};
    use crate::gen::{
        gen_forest_of_cliques, gen_ht, gen_random_forest_plan, BlockPlan, ForestPlan,
    };
    use crate::oracle::oracle_max_acyclic;

    #[test]
    fn label_and_pick_exhaustive() {
        let cycles = [
            OrientedGraph::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap(),
            OrientedGraph::build(3, &[(1, 0), (2, 1), (0, 2)]).unwrap(),
        ];
        for g in &cycles {
            for bits in 0..8u8 {
                let labels = [bits & 1, (bits >> 1) & 1, (bits >> 2) & 1];
                let picked = label_and_pick(g, [0, 1, 2], labels).unwrap();
                assert_ne!(picked[0], picked[1]);
                for &(u, v) in &picked {
                    assert!(g.has_arc(u, v));
                    assert!(!(labels[u] == 1 && labels[v] == 0));
                }
                // Two arcs of an oriented graph cannot form a cycle.
            }
        }
        let not_cycle = OrientedGraph::build(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(
            label_and_pick(&not_cycle, [0, 1, 2], [0, 0, 0]),
            Err(KernelError::NotTriangle)
        );
    }

    // u = 0 with two once-contacted triangles, a non-dangerous pair and an
    // isolated vertex hanging off it.
    fn degree_fixture() -> (OrientedGraph, VertexSet) {
        let arcs = vec![
            // triangles {1,2,3} and {4,5,6}
            (1, 2),
            (2, 3),
            (3, 1),
            (4, 5),
            (5, 6),
            (6, 4),
            // pair {7,8}, isolated 9
            (7, 8),
            // contacts from u = 0
            (0, 1),
            (0, 4),
            (0, 7),
            (0, 9),
        ];
        (
            OrientedGraph::build(10, &arcs).unwrap(),
            VertexSet::singleton(0),
        )
    }

    #[test]
    fn t_u_examples() {
        let (g, u_set) = degree_fixture();
        let (t, per_comp) = t_u_count(&g, &u_set, 0);
        assert_eq!(t, 4);
        assert_eq!(per_comp, vec![1, 1, 1, 1]);
        assert!(dangerous_triangles(&g, &u_set).is_empty());

        // A dangerous pair contributes nothing.
        let g = OrientedGraph::build(3, &[(1, 2), (2, 0), (0, 1)]).unwrap();
        let u_set = VertexSet::singleton(0);
        assert_eq!(t_u_count(&g, &u_set, 0).0, 0);
        assert_eq!(
            dangerous_triangles(&g, &u_set),
            vec![DangerousTriangle { u: 0, pair: [1, 2] }]
        );
    }

    #[test]
    fn shortcut_degree_u_fires_and_is_sound() {
        let (g, u_set) = degree_fixture();
        assert_eq!(shortcut_degree_u(&g, &u_set, 1), Some(0));
        assert_eq!(shortcut_degree_u(&g, &u_set, 2), None);
        let a = oracle_max_acyclic(&g).unwrap().a;
        assert!(decide_threshold(&g, 1, a).unwrap());
    }

    // Two anchors and two pairs, every incidence dangerous.
    fn danger_fixture() -> (OrientedGraph, VertexSet) {
        let arcs = vec![
            (2, 3),
            (3, 0),
            (0, 2),
            (3, 1),
            (1, 2),
            (4, 5),
            (5, 0),
            (0, 4),
            (5, 1),
            (1, 4),
        ];
        (
            OrientedGraph::build(6, &arcs).unwrap(),
            VertexSet::new(vec![0, 1]),
        )
    }

    #[test]
    fn shortcut_danger_fires_and_is_sound() {
        let (g, u_set) = danger_fixture();
        assert_eq!(shortcut_danger(&g, &u_set, 2), Some(2));
        assert_eq!(shortcut_danger(&g, &u_set, 3), None);
        let a = oracle_max_acyclic(&g).unwrap().a;
        assert!(decide_threshold(&g, 2, a).unwrap());
    }

    #[test]
    fn block_profile_examples() {
        let single = gen_forest_of_cliques(
            &ForestPlan {
                blocks: vec![BlockPlan {
                    size: 3,
                    attach_to: None,
                }],
                cyclic_triangles: true,
                single_two_block_per_component: true,
            },
            1,
        )
        .unwrap();
        let p = block_profile(&single.graph).unwrap();
        assert_eq!((p.leaf_blocks, p.path_blocks), (1, 0));

        let h3 = gen_ht(3);
        let p = block_profile(&h3).unwrap();
        assert_eq!((p.leaf_blocks, p.path_blocks), (2, 1));
        assert!(h3.n() <= 8 * p.leaf_blocks + 2 * p.path_blocks);

        // Star of four triangles at one cut vertex.
        let star = gen_forest_of_cliques(
            &ForestPlan {
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
                        attach_to: Some(0),
                    },
                    BlockPlan {
                        size: 3,
                        attach_to: Some(0),
                    },
                ],
                cyclic_triangles: true,
                single_two_block_per_component: true,
            },
            7,
        )
        .unwrap();
        // Force all four to share the same vertex for a genuine star; the
        // generator may pick different cut vertices, so just check the bound
        // and that no block exceeds three vertices.
        let p = block_profile(&star.graph).unwrap();
        assert!(star.graph.n() <= 8 * p.leaf_blocks + 2 * p.path_blocks);

        let k4 =
            OrientedGraph::build(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(
            block_profile(&k4).unwrap_err(),
            KernelError::NotForestOfCliques
        );
    }

    #[test]
    fn leaf_path_bound_on_random_forests() {
        for seed in 0..500u64 {
            let plan = gen_random_forest_plan(14, seed);
            let f = gen_forest_of_cliques(&plan, seed ^ 0xbeef).unwrap();
            let p = block_profile(&f.graph).unwrap();
            assert!(
                f.graph.n() <= 8 * p.leaf_blocks + 2 * p.path_blocks,
                "seed {seed}"
            );
            assert_eq!(
                (p.leaf_blocks, p.path_blocks),
                (f.leaf_blocks, f.path_blocks)
            );
        }
    }

    #[test]
    fn kernelize_k_nonpositive() {
        let inst = Instance::new(gen_ht(1), 0).unwrap();
        match kernelize(&inst, &KernelConfig::default()).unwrap() {
            KernelOutcome::Yes { witness, via, .. } => {
                assert_eq!(via, YesVia::KNonPositive);
                assert!(verify_yes(&inst, &witness.unwrap()));
            }
            _ => panic!("k <= 0 is a trivial yes"),
        }
    }

    // Bridged triangles whose far ends close a cycle through an outside
    // vertex: the pendant-triangle rule stays silent, so normalization must
    // go through the triangle-contraction rule, and the lifted witness has
    // to survive the concatenated trace.
    fn bridged_ring() -> OrientedGraph {
        OrientedGraph::build(
            6,
            &[
                (0, 1),
                (1, 2),
                (2, 0),
                (2, 3),
                (3, 4),
                (4, 2),
                (0, 5),
                (5, 4),
            ],
        )
        .unwrap()
    }

    #[test]
    fn kernelize_lifts_witnesses_across_triangle_contraction() {
        let g = bridged_ring();
        let inst = Instance::new(g.clone(), 1).unwrap();
        match kernelize(&inst, &KernelConfig::default()).unwrap() {
            KernelOutcome::Yes {
                witness,
                trace,
                via,
            } => {
                assert_eq!(via, YesVia::Reduction);
                assert!(trace
                    .steps
                    .iter()
                    .any(|s| s.app.rule == crate::reduce::Rule::R2BridgeTriangles));
                let w = witness.expect("desk-scale yes carries a witness");
                assert!(verify_yes(&inst, &w));
            }
            _ => panic!("the ring at k = 1 reduces to yes"),
        }
        // At a larger k the same instance survives as a kernel whose trace
        // still records the contraction.
        let inst = Instance::new(g, 4).unwrap();
        match kernelize(&inst, &KernelConfig::default()).unwrap() {
            KernelOutcome::Kernel { graph, trace, .. } => {
                assert!(trace
                    .steps
                    .iter()
                    .any(|s| s.app.rule == crate::reduce::Rule::R2BridgeTriangles));
                assert_eq!(graph.n(), 4);
            }
            _ => panic!("k = 4 exceeds the instance's excess"),
        }
    }

    #[test]
    fn kernelize_h3_yields_equivalent_kernel() {
        let h3 = gen_ht(3);
        let inst = Instance::new(h3.clone(), 1).unwrap();
        match kernelize(&inst, &KernelConfig::default()).unwrap() {
            KernelOutcome::Kernel {
                graph, k, report, ..
            } => {
                assert!(report.within_bounds());
                let a_in = oracle_max_acyclic(&h3).unwrap().a;
                let a_out = oracle_max_acyclic(&graph).unwrap().a;
                assert_eq!(
                    decide_threshold(&h3, 1, a_in).unwrap(),
                    decide_threshold(&graph, k, a_out).unwrap()
                );
            }
            _ => panic!("the tight family at k = 1 is a no-instance"),
        }
    }

    // Hub vertex 0 with odd imbalance over a chain of five triangles: the
    // reduction spends one unit on the hub, the triangle chain peels for
    // free, and the hub's nine remaining neighbors trip the degree shortcut.
    fn hub_chain_fixture() -> OrientedGraph {
        let mut arcs = Vec::new();
        for i in 1..11 {
            arcs.push((i, i + 1));
        }
        for j in 1..=5 {
            arcs.push((2 * j + 1, 2 * j - 1));
        }
        for &x in &[1, 2, 4, 6, 8] {
            arcs.push((0, x));
        }
        for &x in &[5, 7, 9, 10] {
            arcs.push((x, 0));
        }
        OrientedGraph::build(12, &arcs).unwrap()
    }

    #[test]
    fn kernelize_degree_shortcut_fires() {
        let g = hub_chain_fixture();
        let inst = Instance::new(g.clone(), 2).unwrap();
        match kernelize(&inst, &KernelConfig::default()).unwrap() {
            KernelOutcome::Yes { via, witness, .. } => {
                assert_eq!(via, YesVia::DegreeShortcut { u: 0 });
                assert!(witness.is_none());
            }
            _ => panic!("expected the degree shortcut"),
        }
        // Threshold-level soundness, confirmed by the oracle.
        let a = oracle_max_acyclic(&g).unwrap().a;
        assert!(decide_threshold(&g, 2, a).unwrap());

        // With shortcuts disabled the same instance comes back as a kernel.
        let cfg = KernelConfig {
            shortcuts: false,
            ..KernelConfig::default()
        };
        match kernelize(&inst, &cfg).unwrap() {
            KernelOutcome::Kernel { graph, report, .. } => {
                assert_eq!(graph, g);
                assert!(report.within_bounds());
            }
            _ => panic!("shortcuts were disabled"),
        }
    }
}
