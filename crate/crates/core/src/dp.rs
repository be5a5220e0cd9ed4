//! The fixed-parameter dynamic program: enumerate orderings of the one-way
//! set `U` and, for each, fold the forest of cliques `G − U` block by block.
//!
//! An ordering `u_1 … u_t` of `U` splits the line into gaps 0..=t (gap `i`
//! sits between `u_i` and `u_{i+1}`). Every vertex `x` of `G − U` carries a
//! vector indexed by gaps whose entry `i` starts as the number of arcs
//! between `x` and `U` that point forward when `x` sits in gap `i`. An arc
//! `vw` inside `G − U` is satisfiable for a gap assignment iff
//! `gap(v) ≤ gap(w)`; a block of at most three vertices contributes the best
//! satisfiable-arc count over its internal orders (`block_beta`). Peeling a
//! leaf block folds its non-anchor vertices into the anchor's vector; when
//! every component is down to a single vertex, the answer for this ordering
//! is `Q + Σ max_i x_i` where `Q` counts the forward arcs inside `G[U]`.
//! The maximum over all `t!` orderings equals `a(G)` exactly.

use crate::bounds::{decide_threshold, BoundsError, Instance, WitnessOrdering};
use crate::graph::{OrientedGraph, VertexSet};
use crate::oracle::{oracle_max_acyclic_capped, DEFAULT_ORACLE_CAP};
use crate::reduce::{
    decompose, lift_witness, DecomposeOutcome, EngineConfig, EngineError, ReductionTrace,
};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpError {
    #[error("block is not a leaf of the remaining forest")]
    NotLeafBlock,
    #[error("vertex {0} is not an active dynamic-program vertex")]
    UnknownVertex(usize),
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Per-vertex gap vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapVector {
    pub owner: usize,
    pub values: Vec<usize>,
}

/// An ordering of `U` with `Q`, its internal forward-arc count.
#[derive(Debug, Clone)]
pub struct UOrdering {
    pub order: Vec<usize>,
    pub q_forward: usize,
}

impl UOrdering {
    pub fn new(g: &OrientedGraph, order: Vec<usize>) -> Self {
        let pos: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let q_forward = g
            .arcs()
            .iter()
            .filter(|(u, v)| matches!((pos.get(u), pos.get(v)), (Some(pu), Some(pv)) if pu < pv))
            .count();
        UOrdering { order, q_forward }
    }
}

/// Initial vector of `x`: entry `i` counts `u_j → x` arcs with `j ≤ i` plus
/// `x → u_j` arcs with `j > i`.
pub fn init_gap_vector(g: &OrientedGraph, u_order: &[usize], x: usize) -> GapVector {
    let t = u_order.len();
    let mut values = Vec::with_capacity(t + 1);
    let mut current = u_order.iter().filter(|&&u| g.has_arc(x, u)).count();
    values.push(current);
    for &u in u_order {
        current += usize::from(g.has_arc(u, x));
        current -= usize::from(g.has_arc(x, u));
        values.push(current);
    }
    GapVector { owner: x, values }
}

/// Best satisfiable-arc count inside a block (2 or 3 vertices) over internal
/// orders consistent with the given gaps, together with the order achieving
/// it. Consistent means vertices appear by non-decreasing gap.
pub fn block_beta(g: &OrientedGraph, block: &[usize], gaps: &[usize]) -> (usize, Vec<usize>) {
    debug_assert_eq!(block.len(), gaps.len());
    let arcs: Vec<(usize, usize)> = g
        .arcs()
        .iter()
        .filter(|(u, v)| block.contains(u) && block.contains(v))
        .copied()
        .collect();
    let gap_of = |v: usize| gaps[block.iter().position(|&w| w == v).unwrap()];
    let mut best: Option<(usize, Vec<usize>)> = None;
    for perm in permutations(block) {
        if perm.windows(2).any(|w| gap_of(w[0]) > gap_of(w[1])) {
            continue;
        }
        let pos = |v: usize| perm.iter().position(|&w| w == v).unwrap();
        let forward = arcs.iter().filter(|&&(u, v)| pos(u) < pos(v)).count();
        if best.as_ref().is_none_or(|(b, _)| forward > *b) {
            best = Some((forward, perm));
        }
    }
    best.expect("blocks always admit a gap-sorted order")
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &head) in items.iter().enumerate() {
        let rest: Vec<usize> = items
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// The fixed peeling schedule for `G − U`: blocks in post-order of the
/// block-cut forest, each anchored at the vertex through which it hangs, and
/// one representative vertex per component. The schedule does not depend on
/// the ordering of `U`, so it is computed once per instance.
#[derive(Debug, Clone)]
pub struct PeelPlan {
    pub rest: Vec<usize>,
    pub steps: Vec<PeelStep>,
    pub representatives: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PeelStep {
    pub block: Vec<usize>,
    pub anchor: usize,
}

impl PeelPlan {
    pub fn build(g: &OrientedGraph, u: &VertexSet) -> PeelPlan {
        let rest: Vec<usize> = (0..g.n()).filter(|&v| !u.contains(v)).collect();
        let (sub, map) = g.induced(&rest.clone().into());
        let bd = sub.blocks();
        let mut visited_vertex = vec![false; sub.n()];
        let mut visited_block = vec![false; bd.blocks.len()];
        let mut steps = Vec::new();
        let mut representatives = Vec::new();

        enum Task {
            Vertex(usize),
            Emit { block: usize, anchor: usize },
        }
        for comp in sub.components(&VertexSet::empty()) {
            let root = comp.as_slice()[0];
            representatives.push(map[root]);
            let mut stack = vec![Task::Vertex(root)];
            while let Some(task) = stack.pop() {
                match task {
                    Task::Vertex(v) => {
                        if visited_vertex[v] {
                            continue;
                        }
                        visited_vertex[v] = true;
                        for &bi in bd.blocks_containing(v) {
                            if visited_block[bi] {
                                continue;
                            }
                            visited_block[bi] = true;
                            stack.push(Task::Emit {
                                block: bi,
                                anchor: v,
                            });
                            for w in bd.blocks[bi].iter() {
                                if w != v {
                                    stack.push(Task::Vertex(w));
                                }
                            }
                        }
                    }
                    Task::Emit { block, anchor } => {
                        if bd.blocks[block].len() >= 2 {
                            steps.push(PeelStep {
                                block: bd.blocks[block].iter().map(|w| map[w]).collect(),
                                anchor: map[anchor],
                            });
                        }
                    }
                }
            }
        }
        PeelPlan {
            rest,
            steps,
            representatives,
        }
    }
}

/// One dynamic-program pass for a fixed ordering of `U`.
pub struct DpRun<'g> {
    g: &'g OrientedGraph,
    u_ordering: UOrdering,
    values: HashMap<usize, Vec<usize>>,
    /// Blocks not yet peeled, grouped per vertex for leaf checks.
    remaining_blocks: Vec<Vec<usize>>,
    remaining_of_vertex: HashMap<usize, Vec<usize>>,
    record: bool,
    choices: Vec<RecordedPeel>,
}

/// Gap choices for a block's non-anchor vertices plus the internal order
/// achieving its contribution.
type PeelChoice = (Vec<(usize, usize)>, Vec<usize>);

struct RecordedPeel {
    anchor: usize,
    /// One choice per anchor gap.
    per_gap: Vec<PeelChoice>,
}

impl<'g> DpRun<'g> {
    pub fn new(
        g: &'g OrientedGraph,
        u_order: Vec<usize>,
        plan: &PeelPlan,
        record: bool,
    ) -> DpRun<'g> {
        let u_ordering = UOrdering::new(g, u_order);
        let mut values = HashMap::with_capacity(plan.rest.len());
        for &x in &plan.rest {
            values.insert(x, init_gap_vector(g, &u_ordering.order, x).values);
        }
        let remaining_blocks: Vec<Vec<usize>> =
            plan.steps.iter().map(|s| s.block.clone()).collect();
        let mut remaining_of_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, b) in remaining_blocks.iter().enumerate() {
            for &v in b {
                remaining_of_vertex.entry(v).or_default().push(i);
            }
        }
        DpRun {
            g,
            u_ordering,
            values,
            remaining_blocks,
            remaining_of_vertex,
            record,
            choices: Vec::new(),
        }
    }

    pub fn vector(&self, x: usize) -> Option<&Vec<usize>> {
        self.values.get(&x)
    }

    /// Folds a leaf block into its anchor: for every anchor gap `i`, the
    /// anchor's entry becomes the best total over the other vertices' gaps
    /// and the block's internal order. Non-anchor vertices leave the program.
    pub fn peel_block(&mut self, block: &[usize], anchor: usize) -> Result<(), DpError> {
        let idx = self
            .remaining_blocks
            .iter()
            .position(|b| b.len() == block.len() && b.iter().all(|v| block.contains(v)))
            .ok_or(DpError::NotLeafBlock)?;
        if !block.contains(&anchor) {
            return Err(DpError::UnknownVertex(anchor));
        }
        // Leaf check: every non-anchor vertex belongs to no other remaining
        // block.
        for &v in block {
            if v == anchor {
                continue;
            }
            let elsewhere = self.remaining_of_vertex[&v]
                .iter()
                .any(|&bi| bi != idx && !self.remaining_blocks[bi].is_empty());
            if elsewhere {
                return Err(DpError::NotLeafBlock);
            }
        }
        let others: Vec<usize> = block.iter().copied().filter(|&v| v != anchor).collect();
        let t1 = self.u_ordering.order.len() + 1;
        let anchor_vec = self
            .values
            .get(&anchor)
            .ok_or(DpError::UnknownVertex(anchor))?
            .clone();
        let other_vecs: Vec<Vec<usize>> = others
            .iter()
            .map(|v| {
                self.values
                    .get(v)
                    .cloned()
                    .ok_or(DpError::UnknownVertex(*v))
            })
            .collect::<Result<_, _>>()?;
        let mut alpha = vec![0usize; t1];
        let mut recorded = Vec::with_capacity(if self.record { t1 } else { 0 });
        let mut gaps = vec![0usize; others.len()];
        let mut ordered_block = vec![anchor];
        ordered_block.extend(others.iter().copied());
        for (i, slot) in alpha.iter_mut().enumerate() {
            let mut best = 0usize;
            let mut best_choice: Option<PeelChoice> = None;
            // Enumerate the other vertices' gaps.
            let combos = t1.pow(others.len() as u32);
            for combo in 0..combos {
                let mut rem = combo;
                for slot_gap in gaps.iter_mut() {
                    *slot_gap = rem % t1;
                    rem /= t1;
                }
                let mut gap_args = Vec::with_capacity(ordered_block.len());
                gap_args.push(i);
                gap_args.extend(gaps.iter().copied());
                let (beta, internal) = block_beta(self.g, &ordered_block, &gap_args);
                let total = anchor_vec[i]
                    + others
                        .iter()
                        .zip(gaps.iter())
                        .map(|(v, &gv)| other_vecs[others.iter().position(|w| w == v).unwrap()][gv])
                        .sum::<usize>()
                    + beta;
                if best_choice.is_none() || total > best {
                    best = total;
                    if self.record {
                        best_choice = Some((
                            others.iter().copied().zip(gaps.iter().copied()).collect(),
                            internal,
                        ));
                    } else {
                        best_choice = Some((Vec::new(), Vec::new()));
                    }
                }
            }
            *slot = best;
            if self.record {
                recorded.push(best_choice.expect("at least one combo exists"));
            }
        }
        self.values.insert(anchor, alpha);
        for v in &others {
            self.values.remove(v);
        }
        self.remaining_blocks[idx].clear();
        if self.record {
            self.choices.push(RecordedPeel {
                anchor,
                per_gap: recorded,
            });
        }
        Ok(())
    }

    /// Total for this ordering: `Q` plus the best entry of every surviving
    /// component representative.
    pub fn finish_value(&self, representatives: &[usize]) -> usize {
        self.u_ordering.q_forward
            + representatives
                .iter()
                .map(|r| *self.values[r].iter().max().unwrap())
                .sum::<usize>()
    }

    /// Reconstructs a full vertex ordering achieving exactly the program's
    /// value: each `G − U` vertex goes to its chosen gap, ordered inside the
    /// gap consistently with every block's internal order.
    pub fn into_witness_order(self, representatives: &[usize]) -> Vec<usize> {
        assert!(self.record, "witness extraction needs a recording run");
        let t = self.u_ordering.order.len();
        let mut gap_of: HashMap<usize, usize> = HashMap::new();
        for &r in representatives {
            let vec = &self.values[&r];
            let best = vec
                .iter()
                .enumerate()
                .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
                .map(|(i, _)| i)
                .unwrap();
            gap_of.insert(r, best);
        }
        let mut chains: Vec<Vec<usize>> = Vec::with_capacity(self.choices.len());
        for peel in self.choices.iter().rev() {
            let anchor_gap = gap_of[&peel.anchor];
            let (assignments, internal) = &peel.per_gap[anchor_gap];
            for &(v, gv) in assignments {
                gap_of.insert(v, gv);
            }
            chains.push(internal.clone());
        }
        // Per gap, topologically order by the chains' same-gap successor
        // constraints (block chains never conflict across a block forest).
        let mut by_gap: Vec<Vec<usize>> = vec![Vec::new(); t + 1];
        for (&v, &gv) in &gap_of {
            by_gap[gv].push(v);
        }
        let mut order = Vec::with_capacity(self.g.n());
        for (gap, members) in by_gap.iter().enumerate() {
            let mut members = members.clone();
            members.sort_unstable();
            let mut succs: HashMap<usize, Vec<usize>> = HashMap::new();
            let mut indeg: HashMap<usize, usize> = members.iter().map(|&v| (v, 0)).collect();
            for chain in &chains {
                let in_gap: Vec<usize> = chain
                    .iter()
                    .copied()
                    .filter(|v| gap_of.get(v) == Some(&gap))
                    .collect();
                for w in in_gap.windows(2) {
                    succs.entry(w[0]).or_default().push(w[1]);
                    *indeg.get_mut(&w[1]).unwrap() += 1;
                }
            }
            let mut ready: Vec<usize> = members.iter().copied().filter(|v| indeg[v] == 0).collect();
            ready.sort_unstable_by(|a, b| b.cmp(a));
            let mut emitted = 0usize;
            while let Some(v) = ready.pop() {
                order.push(v);
                emitted += 1;
                for &w in succs.get(&v).map(|s| s.as_slice()).unwrap_or(&[]) {
                    let d = indeg.get_mut(&w).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.push(w);
                        ready.sort_unstable_by(|a, b| b.cmp(a));
                    }
                }
            }
            debug_assert_eq!(emitted, members.len(), "gap constraints must be acyclic");
            if gap < t {
                order.push(self.u_ordering.order[gap]);
            }
        }
        order
    }
}

/// Value of one `U` ordering, driving the peel plan to completion.
pub fn solve_for_ordering(g: &OrientedGraph, u_order: Vec<usize>, plan: &PeelPlan) -> usize {
    let mut run = DpRun::new(g, u_order, plan, false);
    for step in &plan.steps {
        run.peel_block(&step.block, step.anchor)
            .expect("plan steps peel leaves in order");
    }
    run.finish_value(&plan.representatives)
}

fn ordering_value_and_witness(
    g: &OrientedGraph,
    u_order: Vec<usize>,
    plan: &PeelPlan,
) -> (usize, Vec<usize>) {
    let mut run = DpRun::new(g, u_order, plan, true);
    for step in &plan.steps {
        run.peel_block(&step.block, step.anchor)
            .expect("plan steps peel leaves in order");
    }
    let value = run.finish_value(&plan.representatives);
    let order = run.into_witness_order(&plan.representatives);
    (value, order)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn factorial(n: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 2..=n as u128 {
        acc = acc.checked_mul(i)?;
    }
    Some(acc)
}

fn kth_permutation(sorted: &[usize], mut k: u128) -> Vec<usize> {
    let mut pool = sorted.to_vec();
    let mut out = Vec::with_capacity(pool.len());
    for i in (0..pool.len()).rev() {
        let f = factorial(i).expect("index fits when total fits");
        let idx = (k / f) as usize;
        k %= f;
        out.push(pool.remove(idx));
    }
    out
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub oracle_cap: usize,
    /// Worker threads for the ordering enumeration; results are identical
    /// for any value.
    pub jobs: usize,
    pub engine: EngineConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            oracle_cap: DEFAULT_ORACLE_CAP,
            jobs: 1,
            engine: EngineConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    /// The reduction drove `k` to zero; yes by the rules' accounting.
    ReducedYes,
    /// Full ordering enumeration over `U` computed `a(G)` exactly.
    DynamicProgram,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub decision: bool,
    /// Present whenever a constructive ordering is available; yes-decisions
    /// without one are flagged `guaranteed_by_bound`.
    pub witness: Option<WitnessOrdering>,
    /// `a(G)`, exact, when the dynamic program ran.
    pub exact_value: Option<usize>,
    pub guaranteed_by_bound: bool,
    pub path: SolvePath,
    pub trace: ReductionTrace,
    pub u: Vec<usize>,
}

/// Decides the instance: reduce, then either certify yes with a lifted
/// witness, or enumerate the orderings of `U` and compare `a(G)` against the
/// threshold.
pub fn solve(inst: &Instance, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    match decompose(inst, &cfg.engine)? {
        DecomposeOutcome::Yes(trace) => {
            let witness = if trace.final_graph.n() <= cfg.oracle_cap {
                let base = oracle_max_acyclic_capped(&trace.final_graph, cfg.oracle_cap)
                    .expect("final graph fits under the cap")
                    .witness;
                let lifted = lift_witness(&trace, &base)?;
                debug_assert!(crate::bounds::verify_yes(inst, &lifted));
                Some(lifted)
            } else {
                None
            };
            Ok(SolveResult {
                decision: true,
                guaranteed_by_bound: witness.is_none(),
                witness,
                exact_value: None,
                path: SolvePath::ReducedYes,
                trace,
                u: Vec::new(),
            })
        }
        DecomposeOutcome::Decomposition(dec) => {
            let g = inst.graph();
            let plan = PeelPlan::build(g, &dec.u);
            let u_sorted: Vec<usize> = dec.u.as_slice().to_vec();
            let (_, best_order) = best_ordering(g, &u_sorted, &plan, cfg.jobs);
            let (value, full_order) = ordering_value_and_witness(g, best_order, &plan);
            let witness = WitnessOrdering::from_order(g, full_order)
                .expect("reconstructed order is a permutation");
            debug_assert_eq!(witness.forward_arcs, value);
            let decision = decide_threshold(g, inst.k(), value)?;
            Ok(SolveResult {
                decision,
                witness: Some(witness),
                exact_value: Some(value),
                guaranteed_by_bound: false,
                path: SolvePath::DynamicProgram,
                trace: dec.trace,
                u: u_sorted,
            })
        }
    }
}

/// Maximum ordering value and the first ordering (in lexicographic order)
/// achieving it.
fn best_ordering(
    g: &OrientedGraph,
    u_sorted: &[usize],
    plan: &PeelPlan,
    jobs: usize,
) -> (usize, Vec<usize>) {
    let total = factorial(u_sorted.len());
    let parallel = jobs > 1 && total.map(|t| t >= 10_000).unwrap_or(true);
    if !parallel {
        let mut perm = u_sorted.to_vec();
        let mut best_value = 0usize;
        let mut best: Option<Vec<usize>> = None;
        loop {
            let value = solve_for_ordering(g, perm.clone(), plan);
            if best.is_none() || value > best_value {
                best_value = value;
                best = Some(perm.clone());
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        return (best_value, best.expect("at least one ordering"));
    }
    let total = total.expect("parallel enumeration needs a rankable space");
    let jobs = jobs
        .min(usize::try_from(total).unwrap_or(usize::MAX))
        .max(1);
    let chunk = total / jobs as u128;
    let mut results: Vec<(usize, u128)> = Vec::with_capacity(jobs);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(jobs);
        for w in 0..jobs {
            let lo = w as u128 * chunk;
            let hi = if w + 1 == jobs {
                total
            } else {
                (w as u128 + 1) * chunk
            };
            handles.push(scope.spawn(move || {
                let mut perm = kth_permutation(u_sorted, lo);
                let mut best_value = 0usize;
                let mut best_idx = u128::MAX;
                let mut idx = lo;
                while idx < hi {
                    let value = solve_for_ordering(g, perm.clone(), plan);
                    if best_idx == u128::MAX || value > best_value {
                        best_value = value;
                        best_idx = idx;
                    }
                    next_permutation(&mut perm);
                    idx += 1;
                }
                (best_value, best_idx)
            }));
        }
        for h in handles {
            results.push(h.join().expect("worker panicked"));
        }
    });
    let (value, idx) = results
        .into_iter()
        .min_by(|(va, ia), (vb, ib)| vb.cmp(va).then(ia.cmp(ib)))
        .expect("at least one worker");
    (value, kth_permutation(u_sorted, idx))
}
