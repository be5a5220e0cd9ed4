//! Reduction rules, trace recording with exact `k`-accounting, witness
//! lifting and the structural decomposition into a one-way set `U` plus a
//! forest-of-cliques remainder.
//!
//! Two-way rules keep the instance equivalent at the same `k`:
//!   R1 removes a pendant directed triangle (two vertices whose only outside
//!      contact is the triangle apex); `a(G)` drops by exactly 2.
//!   R2 contracts two directed triangles bridged at a shared vertex, with
//!      outside contacts only at the two far ends, into one directed triangle.
//!
//! One-way rules trade vertices against `k` (reduced yes implies original
//! yes):
//!   R3 removes a non-cut vertex with `d⁺ ≠ d⁻`, paying `2|d⁺−d⁻| − 1`.
//!   R4 removes a tournament `S` (`|S| ≥ 4`, `G−S` connected), paying
//!      `2|S|−4` for even `|S|` and `2|S|−7` for odd.
//!   R5 removes a triple inducing an underlying path, paying 1.
//!
//! Every application is recorded with the graph snapshot before it, so a
//! witness ordering on the reduced graph lifts back to the original graph by
//! re-inserting removed vertices with the extension combiner: the removed set
//! goes entirely before or after the rest, whichever direction carries more
//! cut arcs.

use crate::bounds::{Instance, WitnessOrdering};
use crate::graph::{is_directed_3cycle, GraphError, OrientedGraph, VertexSet};
use crate::tournament::tournament_ordering;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("rule {rule} precondition violated: {reason}")]
    PreconditionViolated { rule: &'static str, reason: String },
    #[error("no reduction rule applies, which contradicts rule totality")]
    NoRuleApplies,
    #[error("trace mismatch: {0}")]
    TraceMismatch(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    R1SmallClique,
    R2BridgeTriangles,
    R3Degree,
    R4BigClique,
    R5Triplet,
}

impl Rule {
    pub fn token(self) -> &'static str {
        match self {
            Rule::R1SmallClique => "R1",
            Rule::R2BridgeTriangles => "R2",
            Rule::R3Degree => "R3",
            Rule::R4BigClique => "R4",
            Rule::R5Triplet => "R5",
        }
    }

    pub fn from_token(s: &str) -> Option<Rule> {
        match s {
            "R1" => Some(Rule::R1SmallClique),
            "R2" => Some(Rule::R2BridgeTriangles),
            "R3" => Some(Rule::R3Degree),
            "R4" => Some(Rule::R4BigClique),
            "R5" => Some(Rule::R5Triplet),
            _ => None,
        }
    }
}

/// Rule-specific payload used to rebuild orderings when lifting a witness.
/// All ids are entity ids (original vertex ids, plus synthetic ids for
/// vertices created by R2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftData {
    /// Directed cycle `contact → first → second → contact`.
    SmallClique {
        contact: usize,
        first: usize,
        second: usize,
    },
    /// The far ends kept by R2 and the vertex it created.
    BridgeTriangles {
        outer_a: usize,
        outer_e: usize,
        new_vertex: usize,
    },
    Degree {
        vertex: usize,
        imbalance: i64,
    },
    /// Tournament ordering of the removed set.
    BigClique {
        order: Vec<usize>,
    },
    /// Ordering of the removed path triple realizing both arcs.
    Triplet {
        order: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct RuleApplication {
    pub rule: Rule,
    /// Entity ids removed by the step, sorted.
    pub removed: Vec<usize>,
    /// Entity ids created by the step (only R2 creates one).
    pub added: Vec<usize>,
    pub k_delta: i64,
    pub lift: LiftData,
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub app: RuleApplication,
    /// Graph before this step, with its dense-id → entity-id map.
    pub pre_graph: OrientedGraph,
    pub pre_entities: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub initial_graph: OrientedGraph,
    pub initial_k: i64,
    pub steps: Vec<TraceStep>,
    pub final_graph: OrientedGraph,
    pub final_entities: Vec<usize>,
    pub final_k: i64,
}

impl ReductionTrace {
    pub fn empty(initial: &Instance) -> Self {
        ReductionTrace {
            initial_graph: initial.graph().clone(),
            initial_k: initial.k(),
            steps: Vec::new(),
            final_graph: initial.graph().clone(),
            final_entities: (0..initial.graph().n()).collect(),
            final_k: initial.k(),
        }
    }

    /// Entities removed by one-way rules (R3/R4/R5), sorted.
    pub fn one_way_removed(&self) -> Vec<usize> {
        let mut u: Vec<usize> = self
            .steps
            .iter()
            .filter(|s| {
                matches!(
                    s.app.rule,
                    Rule::R3Degree | Rule::R4BigClique | Rule::R5Triplet
                )
            })
            .flat_map(|s| s.app.removed.iter().copied())
            .collect();
        u.sort_unstable();
        u
    }

    /// One line per step: `RULE removed=<ids> added=<ids> kdelta=<int>`.
    pub fn serialize_steps(&self) -> String {
        self.steps
            .iter()
            .map(|s| format_step(&s.app))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Chains `self` with a trace that continued from `self`'s final graph.
    /// The continuation's entity ids are dense ids of `self.final_graph` and
    /// get relabeled into `self`'s entity space.
    pub fn concat(&self, cont: &ReductionTrace) -> ReductionTrace {
        assert_eq!(self.final_graph, cont.initial_graph, "traces do not chain");
        // Entities the continuation may have synthesized start above its own
        // initial n; map those into fresh entities of the combined space.
        let base_n = self.initial_graph.n();
        let synth_base: usize =
            base_n + self.steps.iter().map(|s| s.app.added.len()).sum::<usize>();
        let relabel = |ent: usize, final_entities: &[usize]| -> usize {
            if ent < cont.initial_graph.n() {
                final_entities[ent]
            } else {
                synth_base + (ent - cont.initial_graph.n())
            }
        };
        let mut steps = self.steps.clone();
        for s in &cont.steps {
            let map_ids = |ids: &[usize]| -> Vec<usize> {
                ids.iter()
                    .map(|&e| relabel(e, &self.final_entities))
                    .collect()
            };
            let lift = match &s.app.lift {
                LiftData::SmallClique {
                    contact,
                    first,
                    second,
                } => LiftData::SmallClique {
                    contact: relabel(*contact, &self.final_entities),
                    first: relabel(*first, &self.final_entities),
                    second: relabel(*second, &self.final_entities),
                },
                LiftData::BridgeTriangles {
                    outer_a,
                    outer_e,
                    new_vertex,
                } => LiftData::BridgeTriangles {
                    outer_a: relabel(*outer_a, &self.final_entities),
                    outer_e: relabel(*outer_e, &self.final_entities),
                    new_vertex: relabel(*new_vertex, &self.final_entities),
                },
                LiftData::Degree { vertex, imbalance } => LiftData::Degree {
                    vertex: relabel(*vertex, &self.final_entities),
                    imbalance: *imbalance,
                },
                LiftData::BigClique { order } => LiftData::BigClique {
                    order: order
                        .iter()
                        .map(|&e| relabel(e, &self.final_entities))
                        .collect(),
                },
                LiftData::Triplet { order } => LiftData::Triplet {
                    order: order
                        .iter()
                        .map(|&e| relabel(e, &self.final_entities))
                        .collect(),
                },
            };
            steps.push(TraceStep {
                app: RuleApplication {
                    rule: s.app.rule,
                    removed: map_ids(&s.app.removed),
                    added: map_ids(&s.app.added),
                    k_delta: s.app.k_delta,
                    lift,
                },
                pre_graph: s.pre_graph.clone(),
                pre_entities: s
                    .pre_entities
                    .iter()
                    .map(|&e| relabel(e, &self.final_entities))
                    .collect(),
            });
        }
        ReductionTrace {
            initial_graph: self.initial_graph.clone(),
            initial_k: self.initial_k,
            steps,
            final_graph: cont.final_graph.clone(),
            final_entities: cont
                .final_entities
                .iter()
                .map(|&e| relabel(e, &self.final_entities))
                .collect(),
            final_k: cont.final_k,
        }
    }
}

fn step_line(rule: Rule, removed: &[usize], added: &[usize], k_delta: i64) -> String {
    let csv = |ids: &[usize]| {
        ids.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!(
        "{} removed={} added={} kdelta={}",
        rule.token(),
        csv(removed),
        csv(added),
        k_delta
    )
}

pub fn format_step(app: &RuleApplication) -> String {
    step_line(app.rule, &app.removed, &app.added, app.k_delta)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedStep {
    pub rule: Rule,
    pub removed: Vec<usize>,
    pub added: Vec<usize>,
    pub k_delta: i64,
}

impl ParsedStep {
    pub fn to_line(&self) -> String {
        step_line(self.rule, &self.removed, &self.added, self.k_delta)
    }
}

pub fn parse_step_line(line: &str) -> Result<ParsedStep, EngineError> {
    let bad = |msg: &str| EngineError::TraceMismatch(format!("bad trace line {line:?}: {msg}"));
    let mut parts = line.split_whitespace();
    let rule = parts
        .next()
        .and_then(Rule::from_token)
        .ok_or_else(|| bad("unknown rule"))?;
    let mut removed = None;
    let mut added = None;
    let mut k_delta = None;
    for part in parts {
        let (key, value) = part.split_once('=').ok_or_else(|| bad("missing '='"))?;
        let ids = || -> Result<Vec<usize>, EngineError> {
            if value.is_empty() {
                return Ok(Vec::new());
            }
            value
                .split(',')
                .map(|t| t.parse::<usize>().map_err(|_| bad("bad id")))
                .collect()
        };
        match key {
            "removed" => removed = Some(ids()?),
            "added" => added = Some(ids()?),
            "kdelta" => k_delta = Some(value.parse::<i64>().map_err(|_| bad("bad kdelta"))?),
            _ => return Err(bad("unknown field")),
        }
    }
    Ok(ParsedStep {
        rule,
        removed: removed.ok_or_else(|| bad("missing removed"))?,
        added: added.ok_or_else(|| bad("missing added"))?,
        k_delta: k_delta.ok_or_else(|| bad("missing kdelta"))?,
    })
}

/// Result of applying one rule: the reduced graph, the id remap
/// (new dense id → old dense id, `None` for a created vertex) and the amount
/// `k` is reduced by.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub graph: OrientedGraph,
    pub old_of_new: Vec<Option<usize>>,
    pub k_delta: i64,
}

fn precondition(rule: &'static str, reason: impl Into<String>) -> EngineError {
    EngineError::PreconditionViolated {
        rule,
        reason: reason.into(),
    }
}

// ---------------------------------------------------------------------------
// Rule 1: pendant directed triangle.

/// Smallest `(x, S)` such that `G[S]` is a 2-vertex component of `G − x` and
/// `G[S ∪ {x}]` is a directed 3-cycle.
pub fn detect_rule1(g: &OrientedGraph) -> Option<(usize, [usize; 2])> {
    for x in 0..g.n() {
        for comp in g.components(&VertexSet::singleton(x)) {
            if comp.len() == 2 {
                let (a, b) = (comp.as_slice()[0], comp.as_slice()[1]);
                if is_directed_3cycle(g, [x, a, b]) {
                    return Some((x, [a, b]));
                }
            }
        }
    }
    None
}

pub fn apply_rule1(g: &OrientedGraph, x: usize, s: [usize; 2]) -> Result<Reduced, EngineError> {
    let [a, b] = s;
    if x >= g.n() || a >= g.n() || b >= g.n() || x == a || x == b || a == b {
        return Err(precondition("R1", "vertices must be three distinct ids"));
    }
    for &v in &s {
        let other = if v == a { b } else { a };
        if g.neighbors(v).iter().any(|&w| w != other && w != x) {
            return Err(precondition(
                "R1",
                format!("{v} has neighbors outside the triangle"),
            ));
        }
    }
    if !is_directed_3cycle(g, [x, a, b]) {
        return Err(precondition("R1", "triple is not a directed 3-cycle"));
    }
    let (graph, kept) = g.remove_vertices(&VertexSet::new(s.to_vec()));
    Ok(Reduced {
        graph,
        old_of_new: kept.into_iter().map(Some).collect(),
        k_delta: 0,
    })
}

// ---------------------------------------------------------------------------
// Rule 2: bridged directed triangles.

/// Qualifying `(a, b, c, d, e)`: `G[a,b,c]` and `G[c,d,e]` are directed
/// 3-cycles, the five vertices induce exactly those six arcs, and only `a`
/// and `e` may touch the rest of the graph.
pub fn detect_rule2(g: &OrientedGraph) -> Option<[usize; 5]> {
    let n = g.n();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if !g.adjacent(i, j) {
                continue;
            }
            for k in (j + 1)..n {
                if g.adjacent(j, k) && g.adjacent(i, k) && is_directed_3cycle(g, [i, j, k]) {
                    triangles.push([i, j, k]);
                }
            }
        }
    }
    for (ti, t1) in triangles.iter().enumerate() {
        for t2 in triangles.iter().skip(ti + 1) {
            let shared: Vec<usize> = t1.iter().filter(|v| t2.contains(v)).copied().collect();
            if shared.len() != 1 {
                continue;
            }
            let c = shared[0];
            let five: Vec<usize> = t1.iter().chain(t2.iter()).copied().collect();
            let arcs_within = g
                .arcs()
                .iter()
                .filter(|(u, v)| five.contains(u) && five.contains(v))
                .count();
            if arcs_within != 6 {
                continue;
            }
            let has_outside = |v: usize| g.neighbors(v).iter().any(|w| !five.contains(w));
            let pick_ends = |t: &[usize; 3]| -> Option<(usize, usize)> {
                let rest: Vec<usize> = t.iter().filter(|&&v| v != c).copied().collect();
                let (u, v) = (rest[0], rest[1]);
                match (has_outside(u), has_outside(v)) {
                    (true, true) => None,
                    (false, true) => Some((v, u)),
                    _ => Some((u, v)),
                }
            };
            if has_outside(c) {
                continue;
            }
            let (Some((a, b)), Some((e, d))) = (pick_ends(t1), pick_ends(t2)) else {
                continue;
            };
            return Some([a, b, c, d, e]);
        }
    }
    None
}

/// Replaces the bridged triangles by a single directed 3-cycle
/// `a → x → e → a` on a fresh vertex `x` (appended as the last id).
pub fn apply_rule2(g: &OrientedGraph, tuple: [usize; 5]) -> Result<Reduced, EngineError> {
    let [a, b, c, d, e] = tuple;
    let five = tuple.to_vec();
    {
        let mut sorted = five.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != 5 || sorted.iter().any(|&v| v >= g.n()) {
            return Err(precondition("R2", "need five distinct in-range vertices"));
        }
    }
    if !is_directed_3cycle(g, [a, b, c]) || !is_directed_3cycle(g, [c, d, e]) {
        return Err(precondition("R2", "triples are not directed 3-cycles"));
    }
    let arcs_within = g
        .arcs()
        .iter()
        .filter(|(u, v)| five.contains(u) && five.contains(v))
        .count();
    if arcs_within != 6 {
        return Err(precondition("R2", "five vertices induce extra arcs"));
    }
    for &v in &[b, c, d] {
        if g.neighbors(v).iter().any(|w| !five.contains(w)) {
            return Err(precondition(
                "R2",
                format!("{v} has neighbors outside the five"),
            ));
        }
    }
    let removed = VertexSet::new(vec![b, c, d]);
    let keep: Vec<usize> = (0..g.n()).filter(|v| !removed.contains(*v)).collect();
    let mut new_id = vec![usize::MAX; g.n()];
    for (i, &old) in keep.iter().enumerate() {
        new_id[old] = i;
    }
    let x = keep.len();
    let mut arcs: Vec<(usize, usize)> = g
        .arcs()
        .iter()
        .filter(|&&(u, v)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
        .map(|&(u, v)| (new_id[u], new_id[v]))
        .collect();
    arcs.push((new_id[a], x));
    arcs.push((x, new_id[e]));
    arcs.push((new_id[e], new_id[a]));
    let graph = OrientedGraph::build(keep.len() + 1, &arcs)
        .map_err(|err| precondition("R2", format!("replacement graph invalid: {err}")))?;
    let mut old_of_new: Vec<Option<usize>> = keep.into_iter().map(Some).collect();
    old_of_new.push(None);
    Ok(Reduced {
        graph,
        old_of_new,
        k_delta: 0,
    })
}

// ---------------------------------------------------------------------------
// Rule 3: unbalanced non-cut vertex.

/// Smallest non-cut vertex with `d⁺ ≠ d⁻`.
pub fn detect_rule3(g: &OrientedGraph) -> Option<usize> {
    if g.n() < 2 || !g.is_connected() {
        return None;
    }
    let cut = g.blocks().cut_vertices;
    (0..g.n()).find(|&x| {
        let (out, inn) = g.degrees(x);
        out != inn && !cut.contains(x)
    })
}

pub fn apply_rule3(g: &OrientedGraph, x: usize) -> Result<Reduced, EngineError> {
    if x >= g.n() {
        return Err(precondition("R3", "vertex out of range"));
    }
    let (out, inn) = g.degrees(x);
    if out == inn {
        return Err(precondition("R3", format!("vertex {x} is balanced")));
    }
    if g.components(&VertexSet::singleton(x)).len() != 1 {
        return Err(precondition("R3", format!("removing {x} disconnects")));
    }
    let (graph, kept) = g.remove_vertices(&VertexSet::singleton(x));
    let delta = (out as i64 - inn as i64).abs();
    Ok(Reduced {
        graph,
        old_of_new: kept.into_iter().map(Some).collect(),
        k_delta: 2 * delta - 1,
    })
}

// ---------------------------------------------------------------------------
// Rule 4: removable tournament.

fn induces_tournament(g: &OrientedGraph, set: &[usize]) -> bool {
    set.iter()
        .enumerate()
        .all(|(i, &u)| set.iter().skip(i + 1).all(|&v| g.adjacent(u, v)))
}

/// A set `S` with `G[S]` a tournament, `|S| ≥ 4` and `G − S` connected.
/// Candidates come from tournament components of `G − v` (optionally extended
/// by `v`) and, for nonadjacent pairs `{x, y}`, tournament components of
/// `G − {x, y}` extended by one of the pair.
pub fn detect_rule4(g: &OrientedGraph) -> Option<VertexSet> {
    let n = g.n();
    let qualifies = |s: &VertexSet| -> bool {
        s.len() >= 4 && induces_tournament(g, s.as_slice()) && g.components(s).len() == 1
    };
    for v in 0..n {
        for comp in g.components(&VertexSet::singleton(v)) {
            if !induces_tournament(g, comp.as_slice()) {
                continue;
            }
            if comp.len() >= 4 && qualifies(&comp) {
                return Some(comp);
            }
            if comp.len() >= 3 {
                let mut with_v = comp.as_slice().to_vec();
                with_v.push(v);
                let with_v = VertexSet::new(with_v);
                if qualifies(&with_v) {
                    return Some(with_v);
                }
            }
        }
    }
    for x in 0..n {
        for y in (x + 1)..n {
            if g.adjacent(x, y) {
                continue;
            }
            let pair = VertexSet::new(vec![x, y]);
            for comp in g.components(&pair) {
                if comp.len() < 3 || !induces_tournament(g, comp.as_slice()) {
                    continue;
                }
                for ext in [x, y] {
                    let mut s = comp.as_slice().to_vec();
                    s.push(ext);
                    let s = VertexSet::new(s);
                    if qualifies(&s) {
                        return Some(s);
                    }
                }
            }
        }
    }
    None
}

pub fn apply_rule4(g: &OrientedGraph, s: &VertexSet) -> Result<Reduced, EngineError> {
    if s.len() < 4 {
        return Err(precondition("R4", "set has fewer than four vertices"));
    }
    if s.iter().any(|v| v >= g.n()) {
        return Err(precondition("R4", "vertex out of range"));
    }
    if !induces_tournament(g, s.as_slice()) {
        return Err(precondition("R4", "set does not induce a tournament"));
    }
    if g.components(s).len() != 1 {
        return Err(precondition("R4", "removal disconnects or empties"));
    }
    let (graph, kept) = g.remove_vertices(s);
    let size = s.len() as i64;
    let k_delta = if size % 2 == 0 {
        2 * size - 4
    } else {
        2 * size - 7
    };
    Ok(Reduced {
        graph,
        old_of_new: kept.into_iter().map(Some).collect(),
        k_delta,
    })
}

// ---------------------------------------------------------------------------
// Rule 5: removable underlying path on three vertices.

fn is_underlying_p3(g: &OrientedGraph, s: [usize; 3]) -> bool {
    let [a, b, c] = s;
    let edges = usize::from(g.adjacent(a, b))
        + usize::from(g.adjacent(b, c))
        + usize::from(g.adjacent(a, c));
    edges == 2
}

pub fn detect_rule5(g: &OrientedGraph) -> Option<[usize; 3]> {
    detect_rule5_with(g, false)
}

/// Lexicographically first triple whose underlying induced graph is a path
/// and whose removal leaves a connected remainder. `allow_empty_remainder`
/// additionally accepts triples whose removal empties the graph.
pub fn detect_rule5_with(g: &OrientedGraph, allow_empty_remainder: bool) -> Option<[usize; 3]> {
    let n = g.n();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if !is_underlying_p3(g, [i, j, k]) {
                    continue;
                }
                let comps = g.components(&VertexSet::new(vec![i, j, k])).len();
                if comps == 1 || (allow_empty_remainder && comps == 0) {
                    return Some([i, j, k]);
                }
            }
        }
    }
    None
}

pub fn apply_rule5(g: &OrientedGraph, s: [usize; 3]) -> Result<Reduced, EngineError> {
    apply_rule5_with(g, s, false)
}

pub fn apply_rule5_with(
    g: &OrientedGraph,
    s: [usize; 3],
    allow_empty_remainder: bool,
) -> Result<Reduced, EngineError> {
    if s.iter().any(|&v| v >= g.n()) {
        return Err(precondition("R5", "vertex out of range"));
    }
    if !is_underlying_p3(g, s) {
        return Err(precondition(
            "R5",
            "triple does not induce an underlying path",
        ));
    }
    let set = VertexSet::new(s.to_vec());
    if set.len() != 3 {
        return Err(precondition("R5", "vertices must be distinct"));
    }
    let comps = g.components(&set).len();
    if !(comps == 1 || (allow_empty_remainder && comps == 0)) {
        return Err(precondition("R5", "removal disconnects the remainder"));
    }
    let (graph, kept) = g.remove_vertices(&set);
    Ok(Reduced {
        graph,
        old_of_new: kept.into_iter().map(Some).collect(),
        k_delta: 1,
    })
}

/// Ordering of a 2-arc triple realizing both arcs (the induced digraph is
/// acyclic, so a topological order exists); deterministic first hit.
fn p3_forward_order(g: &OrientedGraph, s: [usize; 3]) -> Vec<usize> {
    let arcs: Vec<(usize, usize)> = g
        .arcs()
        .iter()
        .filter(|(u, v)| s.contains(u) && s.contains(v))
        .copied()
        .collect();
    for perm in permutations(&s) {
        let pos = |v: usize| perm.iter().position(|&w| w == v).unwrap();
        if arcs.iter().all(|&(u, v)| pos(u) < pos(v)) {
            return perm;
        }
    }
    unreachable!("two arcs without a 2-cycle are always acyclic")
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

// ---------------------------------------------------------------------------
// Extension combiner.

/// Concatenates the two orderings so every cut arc in the majority direction
/// becomes forward: `S` first when `d⁺(S) ≥ d⁻(S)`, last otherwise. The
/// result realizes exactly `forward(order_s) + forward(order_rest) +
/// max(d⁺(S), d⁻(S))` arcs.
pub fn combine(
    g: &OrientedGraph,
    s: &VertexSet,
    order_s: &[usize],
    order_rest: &[usize],
) -> Vec<usize> {
    let (leaving, entering) = g
        .cut_degrees(s)
        .expect("combine needs a nonempty proper subset");
    let mut order = Vec::with_capacity(order_s.len() + order_rest.len());
    if leaving >= entering {
        order.extend_from_slice(order_s);
        order.extend_from_slice(order_rest);
    } else {
        order.extend_from_slice(order_rest);
        order.extend_from_slice(order_s);
    }
    order
}

// ---------------------------------------------------------------------------
// The decomposition engine.

#[derive(Debug, Clone, Default)]
pub struct EngineConfig {
    /// Accept a rule-5 triple whose removal empties the graph. Off by
    /// default: the empty remainder is treated as disconnected.
    pub rule5_allow_empty_remainder: bool,
}

/// Mutable reduction state shared by the decomposition loop and the
/// kernelizer's normalization pass.
pub(crate) struct Stepper {
    pub graph: OrientedGraph,
    pub entities: Vec<usize>,
    pub next_entity: usize,
    pub steps: Vec<TraceStep>,
    pub k: i64,
}

pub(crate) enum DenseStep {
    R1 { x: usize, s: [usize; 2] },
    R2 { tuple: [usize; 5] },
    R3 { x: usize },
    R4 { s: VertexSet },
    R5 { s: [usize; 3] },
}

impl Stepper {
    pub fn new(inst: &Instance) -> Self {
        Stepper {
            graph: inst.graph().clone(),
            entities: (0..inst.graph().n()).collect(),
            next_entity: inst.graph().n(),
            steps: Vec::new(),
            k: inst.k(),
        }
    }

    pub fn perform(&mut self, step: DenseStep, cfg: &EngineConfig) -> Result<(), EngineError> {
        let g = &self.graph;
        let ent = |v: usize| self.entities[v];
        let (rule, removed_dense, reduced, lift) = match step {
            DenseStep::R1 { x, s } => {
                let reduced = apply_rule1(g, x, s)?;
                // Cycle direction from the contact vertex.
                let first = if g.has_arc(x, s[0]) { s[0] } else { s[1] };
                let second = if first == s[0] { s[1] } else { s[0] };
                (
                    Rule::R1SmallClique,
                    s.to_vec(),
                    reduced,
                    LiftData::SmallClique {
                        contact: ent(x),
                        first: ent(first),
                        second: ent(second),
                    },
                )
            }
            DenseStep::R2 { tuple } => {
                let reduced = apply_rule2(g, tuple)?;
                let [a, b, c, d, e] = tuple;
                (
                    Rule::R2BridgeTriangles,
                    vec![b, c, d],
                    reduced,
                    LiftData::BridgeTriangles {
                        outer_a: ent(a),
                        outer_e: ent(e),
                        new_vertex: self.next_entity,
                    },
                )
            }
            DenseStep::R3 { x } => {
                let reduced = apply_rule3(g, x)?;
                let (out, inn) = g.degrees(x);
                (
                    Rule::R3Degree,
                    vec![x],
                    reduced,
                    LiftData::Degree {
                        vertex: ent(x),
                        imbalance: out as i64 - inn as i64,
                    },
                )
            }
            DenseStep::R4 { s } => {
                let reduced = apply_rule4(g, &s)?;
                let (sub, map) = g.induced(&s);
                let w = tournament_ordering(&sub)
                    .map_err(|_| precondition("R4", "set does not induce a tournament"))?;
                let order: Vec<usize> = w.order.iter().map(|&i| ent(map[i])).collect();
                (
                    Rule::R4BigClique,
                    s.as_slice().to_vec(),
                    reduced,
                    LiftData::BigClique { order },
                )
            }
            DenseStep::R5 { s } => {
                let reduced = apply_rule5_with(g, s, cfg.rule5_allow_empty_remainder)?;
                let order: Vec<usize> = p3_forward_order(g, s).into_iter().map(ent).collect();
                (
                    Rule::R5Triplet,
                    s.to_vec(),
                    reduced,
                    LiftData::Triplet { order },
                )
            }
        };
        let mut removed: Vec<usize> = removed_dense.iter().map(|&v| self.entities[v]).collect();
        removed.sort_unstable();
        let mut added = Vec::new();
        let mut new_entities = Vec::with_capacity(reduced.old_of_new.len());
        for slot in &reduced.old_of_new {
            match slot {
                Some(old) => new_entities.push(self.entities[*old]),
                None => {
                    added.push(self.next_entity);
                    new_entities.push(self.next_entity);
                    self.next_entity += 1;
                }
            }
        }
        let app = RuleApplication {
            rule,
            removed,
            added,
            k_delta: reduced.k_delta,
            lift,
        };
        let pre_graph = std::mem::replace(&mut self.graph, reduced.graph);
        let pre_entities = std::mem::replace(&mut self.entities, new_entities);
        self.steps.push(TraceStep {
            app,
            pre_graph,
            pre_entities,
        });
        self.k -= reduced.k_delta;
        Ok(())
    }

    pub fn into_trace(self, initial: &Instance) -> ReductionTrace {
        ReductionTrace {
            initial_graph: initial.graph().clone(),
            initial_k: initial.k(),
            steps: self.steps,
            final_graph: self.graph,
            final_entities: self.entities,
            final_k: self.k,
        }
    }
}

#[derive(Debug, Clone)]
pub enum DecomposeOutcome {
    /// `k` reached zero mid-reduction; the trace certifies a yes-instance.
    Yes(ReductionTrace),
    Decomposition(Decomposition),
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub trace: ReductionTrace,
    /// Vertices removed by one-way rules, in initial-graph ids.
    pub u: VertexSet,
    pub report: StructureReport,
}

/// Programmatic check of the forest-of-cliques guarantees for `G − U`.
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub u_size: usize,
    /// Three vertices per unit of `k` spent.
    pub u_budget: usize,
    pub blocks_at_most_three: bool,
    pub three_blocks_are_directed_cycles: bool,
    pub at_most_one_two_block_per_component: bool,
    pub at_most_one_isolated_vertex: bool,
}

impl StructureReport {
    pub fn all_hold(&self) -> bool {
        self.u_size <= self.u_budget
            && self.blocks_at_most_three
            && self.three_blocks_are_directed_cycles
            && self.at_most_one_two_block_per_component
            && self.at_most_one_isolated_vertex
    }
}

pub fn structure_report(g: &OrientedGraph, u: &VertexSet, spent_k: i64) -> StructureReport {
    let (rest, map) = g.remove_vertices(u);
    let bd = rest.blocks();
    let blocks_at_most_three = bd.blocks.iter().all(|b| b.len() <= 3);
    let three_blocks_are_directed_cycles = bd.blocks.iter().all(|b| {
        b.len() != 3 || {
            let s = b.as_slice();
            is_directed_3cycle(&rest, [s[0], s[1], s[2]])
        }
    });
    let comps = rest.components(&VertexSet::empty());
    let comp_of = {
        let mut c = vec![usize::MAX; rest.n()];
        for (i, comp) in comps.iter().enumerate() {
            for v in comp.iter() {
                c[v] = i;
            }
        }
        c
    };
    let mut two_blocks_per_comp = vec![0usize; comps.len()];
    for b in &bd.blocks {
        if b.len() == 2 {
            two_blocks_per_comp[comp_of[b.as_slice()[0]]] += 1;
        }
    }
    let isolated = (0..rest.n()).filter(|&v| rest.degree(v) == 0).count();
    let _ = map;
    StructureReport {
        u_size: u.len(),
        u_budget: (3 * spent_k.max(0)) as usize,
        blocks_at_most_three,
        three_blocks_are_directed_cycles,
        at_most_one_two_block_per_component: two_blocks_per_comp.iter().all(|&c| c <= 1),
        at_most_one_isolated_vertex: isolated <= 1,
    }
}

/// Applies rules R3, R1, R4, R5 (in that priority) until the graph has no
/// arcs. Returns a yes-certificate as soon as `k` drops to zero or below;
/// otherwise the one-way set `U` with the verified structure report for
/// `G − U`.
pub fn decompose(inst: &Instance, cfg: &EngineConfig) -> Result<DecomposeOutcome, EngineError> {
    let mut stepper = Stepper::new(inst);
    if stepper.k <= 0 {
        return Ok(DecomposeOutcome::Yes(stepper.into_trace(inst)));
    }
    while stepper.graph.m() > 0 {
        let g = &stepper.graph;
        let step = if let Some(x) = detect_rule3(g) {
            DenseStep::R3 { x }
        } else if let Some((x, s)) = detect_rule1(g) {
            DenseStep::R1 { x, s }
        } else if let Some(s) = detect_rule4(g) {
            DenseStep::R4 { s }
        } else if let Some(s) = detect_rule5_with(g, cfg.rule5_allow_empty_remainder) {
            DenseStep::R5 { s }
        } else {
            return Err(EngineError::NoRuleApplies);
        };
        stepper.perform(step, cfg)?;
        if stepper.k <= 0 {
            return Ok(DecomposeOutcome::Yes(stepper.into_trace(inst)));
        }
    }
    let spent = inst.k() - stepper.k;
    let trace = stepper.into_trace(inst);
    let u = VertexSet::new(trace.one_way_removed());
    let report = structure_report(inst.graph(), &u, spent);
    Ok(DecomposeOutcome::Decomposition(Decomposition {
        trace,
        u,
        report,
    }))
}

// ---------------------------------------------------------------------------
// Witness lifting.

/// Replays the trace backwards, inserting every removed set with the
/// extension combiner (or the rule-specific placement for R1/R2), and
/// recounts the final ordering on the initial graph.
pub fn lift_witness(
    trace: &ReductionTrace,
    base: &WitnessOrdering,
) -> Result<WitnessOrdering, EngineError> {
    if base.order.len() != trace.final_graph.n() {
        return Err(EngineError::TraceMismatch(
            "base ordering does not match the final graph".into(),
        ));
    }
    // Work in entity space.
    let mut order: Vec<usize> = base
        .order
        .iter()
        .map(|&i| {
            trace
                .final_entities
                .get(i)
                .copied()
                .ok_or_else(|| EngineError::TraceMismatch("base vertex out of range".into()))
        })
        .collect::<Result<_, _>>()?;
    for step in trace.steps.iter().rev() {
        let dense_of: HashMap<usize, usize> = step
            .pre_entities
            .iter()
            .enumerate()
            .map(|(dense, &ent)| (ent, dense))
            .collect();
        let g = &step.pre_graph;
        match &step.app.lift {
            LiftData::Degree { vertex, .. } => {
                let dense = dense_of[vertex];
                let (out, inn) = g.degrees(dense);
                if out >= inn {
                    order.insert(0, *vertex);
                } else {
                    order.push(*vertex);
                }
            }
            LiftData::BigClique { order: s_order } | LiftData::Triplet { order: s_order } => {
                let dense_set: VertexSet = s_order.iter().map(|e| dense_of[e]).collect();
                let (leaving, entering) = g
                    .cut_degrees(&dense_set)
                    .map_err(|e| EngineError::TraceMismatch(e.to_string()))?;
                if leaving >= entering {
                    let mut new_order = s_order.clone();
                    new_order.extend(order);
                    order = new_order;
                } else {
                    order.extend(s_order.iter().copied());
                }
            }
            LiftData::SmallClique {
                contact,
                first,
                second,
            } => {
                let pos = order.iter().position(|e| e == contact).ok_or_else(|| {
                    EngineError::TraceMismatch("contact vertex missing from ordering".into())
                })?;
                order.insert(pos + 1, *second);
                order.insert(pos + 1, *first);
            }
            LiftData::BridgeTriangles {
                outer_a,
                outer_e,
                new_vertex,
            } => {
                let pos = order.iter().position(|e| e == new_vertex).ok_or_else(|| {
                    EngineError::TraceMismatch("created vertex missing from ordering".into())
                })?;
                order.remove(pos);
                let middles: Vec<usize> = step.app.removed.clone();
                place_bridge_middles(g, &dense_of, &mut order, *outer_a, *outer_e, &middles)?;
            }
        }
    }
    // All surviving entities are initial-graph ids.
    if order.len() != trace.initial_graph.n() {
        return Err(EngineError::TraceMismatch(
            "lifted ordering has the wrong length".into(),
        ));
    }
    WitnessOrdering::from_order(&trace.initial_graph, order)
        .map_err(|e| EngineError::TraceMismatch(e.to_string()))
}

/// Chooses the placement of the three middle vertices of a bridged-triangle
/// pair that realizes the most of its six arcs (always four), keeping the far
/// ends where the ordering already has them.
fn place_bridge_middles(
    g: &OrientedGraph,
    dense_of: &HashMap<usize, usize>,
    order: &mut Vec<usize>,
    outer_a: usize,
    outer_e: usize,
    middles: &[usize],
) -> Result<(), EngineError> {
    let five: Vec<usize> = [outer_a, outer_e]
        .iter()
        .chain(middles.iter())
        .copied()
        .collect();
    let gadget_arcs: Vec<(usize, usize)> = {
        let dense_five: Vec<usize> = five.iter().map(|e| dense_of[e]).collect();
        let ent_of_dense: HashMap<usize, usize> = five.iter().map(|&e| (dense_of[&e], e)).collect();
        g.arcs()
            .iter()
            .filter(|(u, v)| dense_five.contains(u) && dense_five.contains(v))
            .map(|&(u, v)| (ent_of_dense[&u], ent_of_dense[&v]))
            .collect()
    };
    let pos_a = order
        .iter()
        .position(|e| *e == outer_a)
        .ok_or_else(|| EngineError::TraceMismatch("bridge end missing from ordering".into()))?;
    let pos_e = order
        .iter()
        .position(|e| *e == outer_e)
        .ok_or_else(|| EngineError::TraceMismatch("bridge end missing from ordering".into()))?;
    let (first_end, second_end) = if pos_a < pos_e {
        (outer_a, outer_e)
    } else {
        (outer_e, outer_a)
    };
    let mut best: Option<(usize, Vec<usize>)> = None;
    for perm in permutations(&five) {
        let p = |v: usize| perm.iter().position(|&w| w == v).unwrap();
        if p(first_end) > p(second_end) {
            continue;
        }
        let forward = gadget_arcs.iter().filter(|&&(u, v)| p(u) < p(v)).count();
        if best.as_ref().is_none_or(|(b, _)| forward > *b) {
            best = Some((forward, perm));
        }
    }
    let (_, perm) = best.expect("five-vertex placement always exists");
    // Slot each middle vertex into the segment its relative position demands.
    let seg = |v: usize| -> u8 {
        let p = perm.iter().position(|&w| w == v).unwrap();
        let pf = perm.iter().position(|&w| w == first_end).unwrap();
        let ps = perm.iter().position(|&w| w == second_end).unwrap();
        if p < pf {
            0
        } else if p < ps {
            1
        } else {
            2
        }
    };
    let in_segment = |target: u8| -> Vec<usize> {
        perm.iter()
            .copied()
            .filter(|v| middles.contains(v) && seg(*v) == target)
            .collect()
    };
    let first_pos = order.iter().position(|e| *e == first_end).unwrap();
    for (offset, v) in in_segment(0).into_iter().enumerate() {
        order.insert(first_pos + offset, v);
    }
    let first_pos = order.iter().position(|e| *e == first_end).unwrap();
    for (offset, v) in in_segment(1).into_iter().enumerate() {
        order.insert(first_pos + 1 + offset, v);
    }
    let second_pos = order.iter().position(|e| *e == second_end).unwrap();
    for (offset, v) in in_segment(2).into_iter().enumerate() {
        order.insert(second_pos + 1 + offset, v);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Trace replay (consumed by external verification).

/// Replays serialized steps against an instance graph, re-validating every
/// rule precondition and `k` delta.
pub struct Replayer {
    pub graph: OrientedGraph,
    pub entities: Vec<usize>,
    pub next_entity: usize,
    pub k: i64,
}

impl Replayer {
    pub fn new(initial: &OrientedGraph, k: i64) -> Self {
        Replayer {
            graph: initial.clone(),
            entities: (0..initial.n()).collect(),
            next_entity: initial.n(),
            k,
        }
    }

    pub fn apply(&mut self, step: &ParsedStep) -> Result<(), EngineError> {
        let dense_of: HashMap<usize, usize> = self
            .entities
            .iter()
            .enumerate()
            .map(|(dense, &ent)| (ent, dense))
            .collect();
        let dense: Vec<usize> = step
            .removed
            .iter()
            .map(|e| {
                dense_of.get(e).copied().ok_or_else(|| {
                    EngineError::TraceMismatch(format!("removed vertex {e} not present"))
                })
            })
            .collect::<Result<_, _>>()?;
        let g = &self.graph;
        let reduced = match step.rule {
            Rule::R1SmallClique => {
                if dense.len() != 2 {
                    return Err(EngineError::TraceMismatch("R1 removes two vertices".into()));
                }
                let (a, b) = (dense[0], dense[1]);
                let outside: Vec<usize> = g
                    .neighbors(a)
                    .into_iter()
                    .chain(g.neighbors(b))
                    .filter(|&w| w != a && w != b)
                    .collect();
                let x = *outside
                    .first()
                    .ok_or_else(|| EngineError::TraceMismatch("R1 pair has no contact".into()))?;
                if outside.iter().any(|&w| w != x) {
                    return Err(EngineError::TraceMismatch(
                        "R1 pair touches more than one outside vertex".into(),
                    ));
                }
                apply_rule1(g, x, [a, b])?
            }
            Rule::R2BridgeTriangles => {
                if dense.len() != 3 || step.added.len() != 1 {
                    return Err(EngineError::TraceMismatch(
                        "R2 removes three vertices and adds one".into(),
                    ));
                }
                if dense_of.contains_key(&step.added[0]) {
                    return Err(EngineError::TraceMismatch(
                        "R2 added vertex already present".into(),
                    ));
                }
                let tuple = identify_bridge_tuple(g, &dense)?;
                apply_rule2(g, tuple)?
            }
            Rule::R3Degree => {
                if dense.len() != 1 {
                    return Err(EngineError::TraceMismatch("R3 removes one vertex".into()));
                }
                apply_rule3(g, dense[0])?
            }
            Rule::R4BigClique => apply_rule4(g, &VertexSet::new(dense))?,
            Rule::R5Triplet => {
                if dense.len() != 3 {
                    return Err(EngineError::TraceMismatch(
                        "R5 removes three vertices".into(),
                    ));
                }
                apply_rule5(g, [dense[0], dense[1], dense[2]])?
            }
        };
        if reduced.k_delta != step.k_delta {
            return Err(EngineError::TraceMismatch(format!(
                "step claims kdelta {} but the rule pays {}",
                step.k_delta, reduced.k_delta
            )));
        }
        let mut added_iter = step.added.iter();
        let mut new_entities = Vec::with_capacity(reduced.old_of_new.len());
        for slot in &reduced.old_of_new {
            match slot {
                Some(old) => new_entities.push(self.entities[*old]),
                None => {
                    let ent = *added_iter.next().ok_or_else(|| {
                        EngineError::TraceMismatch("step is missing an added id".into())
                    })?;
                    new_entities.push(ent);
                    self.next_entity = self.next_entity.max(ent + 1);
                }
            }
        }
        self.graph = reduced.graph;
        self.entities = new_entities;
        self.k -= reduced.k_delta;
        Ok(())
    }
}

/// Reconstructs the `(a, b, c, d, e)` labeling of a bridged-triangle pair
/// from its removed middles `{b, c, d}` (dense ids).
fn identify_bridge_tuple(g: &OrientedGraph, middles: &[usize]) -> Result<[usize; 5], EngineError> {
    let outside: Vec<usize> = middles
        .iter()
        .flat_map(|&v| g.neighbors(v))
        .filter(|w| !middles.contains(w))
        .collect();
    let mut ends = outside.clone();
    ends.sort_unstable();
    ends.dedup();
    if ends.len() != 2 {
        return Err(EngineError::TraceMismatch(
            "R2 middles must touch exactly two outside vertices".into(),
        ));
    }
    // c is the middle adjacent to both others; b pairs with a, d with e.
    let c = *middles
        .iter()
        .find(|&&v| middles.iter().all(|&w| w == v || g.adjacent(v, w)))
        .ok_or_else(|| EngineError::TraceMismatch("R2 middles lack a shared vertex".into()))?;
    for &a in &ends {
        let e = if a == ends[0] { ends[1] } else { ends[0] };
        let b = middles
            .iter()
            .copied()
            .find(|&v| v != c && g.adjacent(v, a));
        let d = middles
            .iter()
            .copied()
            .find(|&v| v != c && g.adjacent(v, e));
        if let (Some(b), Some(d)) = (b, d) {
            if b != d && is_directed_3cycle(g, [a, b, c]) && is_directed_3cycle(g, [c, d, e]) {
                return Ok([a, b, c, d, e]);
            }
        }
    }
    Err(EngineError::TraceMismatch(
        "R2 middles do not form bridged triangles".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{count_forward, gamma, verify_yes};
    use crate::gen::{gen_connected_oriented, gen_ht, SplitMix64};
    use crate::oracle::oracle_max_acyclic;

    fn oracle_a(g: &OrientedGraph) -> usize {
        oracle_max_acyclic(g).unwrap().a
    }

    fn excess_q(g: &OrientedGraph) -> i64 {
        4 * oracle_a(g) as i64 - gamma(g).0
    }

    // Triangle {0,1,2} with apex 0 carrying a pendant arc 0 -> 3.
    fn triangle_with_pendant() -> OrientedGraph {
        OrientedGraph::build(4, &[(0, 1), (1, 2), (2, 0), (0, 3)]).unwrap()
    }

    #[test]
    fn rule1_detect_and_apply() {
        let g = triangle_with_pendant();
        let (x, s) = detect_rule1(&g).unwrap();
        assert_eq!((x, s), (0, [1, 2]));
        let r = apply_rule1(&g, x, s).unwrap();
        assert_eq!(r.graph.n(), 2);
        assert_eq!(oracle_a(&g), 3);
        assert_eq!(oracle_a(&r.graph), 1);

        // A lone directed 3-cycle also qualifies.
        let c = gen_ht(1);
        let (x, s) = detect_rule1(&c).unwrap();
        assert_eq!((x, s), (0, [1, 2]));
        assert_eq!(apply_rule1(&c, x, s).unwrap().graph.n(), 1);

        let arc = OrientedGraph::build(2, &[(0, 1)]).unwrap();
        assert_eq!(detect_rule1(&arc), None);

        // H2 with contact x3 and the far triangle removed.
        let h2 = gen_ht(2);
        let r = apply_rule1(&h2, 2, [3, 4]).unwrap();
        assert_eq!(r.graph, gen_ht(1));
    }

    #[test]
    fn rule2_detect_and_apply() {
        // Double triangle sharing vertex 2, outside arcs only at 0 and 4.
        let g = OrientedGraph::build(
            7,
            &[
                (0, 1),
                (1, 2),
                (2, 0),
                (2, 3),
                (3, 4),
                (4, 2),
                (0, 5),
                (4, 6),
                (5, 6),
            ],
        )
        .unwrap();
        let tuple = detect_rule2(&g).unwrap();
        assert_eq!(tuple, [0, 1, 2, 3, 4]);
        let r = apply_rule2(&g, tuple).unwrap();
        assert_eq!(r.graph.n(), g.n() - 2);
        assert_eq!(r.graph.m(), g.m() - 3);
        assert_eq!(oracle_a(&g) - oracle_a(&r.graph), 2);

        // Standalone double triangle: detection still reports the tuple.
        let h2 = gen_ht(2);
        let tuple = detect_rule2(&h2).unwrap();
        let r = apply_rule2(&h2, tuple).unwrap();
        assert_eq!((r.graph.n(), r.graph.m()), (3, 3));
        assert_eq!(oracle_a(&h2), 4);
        assert_eq!(oracle_a(&r.graph), 2);

        // An extra outside contact at a middle vertex blocks the rule.
        let blocked = OrientedGraph::build(
            6,
            &[
                (0, 1),
                (1, 2),
                (2, 0),
                (2, 3),
                (3, 4),
                (4, 2),
                (1, 5),
                (0, 5),
            ],
        )
        .unwrap();
        assert_eq!(detect_rule2(&blocked), None);
    }

    #[test]
    fn rule3_detect_and_apply() {
        let path = OrientedGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(detect_rule3(&path), Some(0));
        let r = apply_rule3(&path, 0).unwrap();
        assert_eq!(r.k_delta, 1);
        assert_eq!(r.graph.m(), 1);

        assert_eq!(detect_rule3(&gen_ht(1)), None);
        assert_eq!(detect_rule3(&gen_ht(2)), None);

        // Transitive tournament source: imbalance 2, pays 3.
        let t = OrientedGraph::build(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let r = apply_rule3(&t, 0).unwrap();
        assert_eq!(r.k_delta, 3);
    }

    #[test]
    fn rule4_detect_and_apply() {
        // K4 tournament hanging off a path by one arc.
        let mut arcs = vec![(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 3)];
        arcs.push((0, 4));
        arcs.push((4, 5));
        let g = OrientedGraph::build(6, &arcs).unwrap();
        let s = detect_rule4(&g).unwrap();
        assert_eq!(s.as_slice(), &[0, 1, 2, 3]);
        let r = apply_rule4(&g, &s).unwrap();
        assert_eq!(r.k_delta, 4);
        assert!(r.graph.is_connected());

        assert_eq!(detect_rule4(&gen_ht(1)), None);

        // Whole transitive 5-tournament: S is everything except vertex 0.
        let mut arcs = Vec::new();
        for u in 0..5 {
            for v in (u + 1)..5 {
                arcs.push((u, v));
            }
        }
        let t5 = OrientedGraph::build(5, &arcs).unwrap();
        let s = detect_rule4(&t5).unwrap();
        assert_eq!(s.as_slice(), &[1, 2, 3, 4]);

        // Parity of the payment.
        let r = apply_rule4(&t5, &s).unwrap();
        assert_eq!(r.k_delta, 4); // |S| = 4
        let k5: VertexSet = (1..6).collect();
        let mut arcs = Vec::new();
        for u in 0..6 {
            for v in (u + 1)..6 {
                arcs.push((u, v));
            }
        }
        let t6 = OrientedGraph::build(6, &arcs).unwrap();
        assert_eq!(apply_rule4(&t6, &k5).unwrap().k_delta, 3); // |S| = 5
    }

    #[test]
    fn rule5_detect_and_apply() {
        let path = OrientedGraph::build(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = detect_rule5(&path).unwrap();
        assert_eq!(s, [0, 1, 2]);
        let r = apply_rule5(&path, s).unwrap();
        assert_eq!(r.k_delta, 1);
        assert_eq!(r.graph.n(), 1);

        assert_eq!(detect_rule5(&gen_ht(1)), None);

        // Standalone double triangle: no triple qualifies.
        assert_eq!(detect_rule5(&gen_ht(2)), None);
        // Unless the empty remainder is allowed; still none here since every
        // removal leaves two vertices.
        assert_eq!(detect_rule5_with(&gen_ht(2), true), None);

        // Orderings realizing both arcs of the path triple.
        let join = OrientedGraph::build(3, &[(0, 1), (2, 1)]).unwrap();
        assert_eq!(p3_forward_order(&join, [0, 1, 2]), vec![0, 2, 1]);
        let fork = OrientedGraph::build(3, &[(1, 0), (1, 2)]).unwrap();
        assert_eq!(p3_forward_order(&fork, [0, 1, 2]), vec![1, 0, 2]);
    }

    #[test]
    fn combine_examples() {
        // Two 3-cycles joined by one arc leaving S.
        let g = OrientedGraph::build(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)])
            .unwrap();
        let s: VertexSet = vec![0, 1, 2].into();
        let order = combine(&g, &s, &[0, 1, 2], &[3, 4, 5]);
        assert_eq!(count_forward(&g, &order).unwrap(), 5);
        assert_eq!(oracle_a(&g), 5);

        // A source singleton gains all its out-arcs.
        let star = OrientedGraph::build(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]).unwrap();
        let order = combine(&star, &VertexSet::singleton(0), &[0], &[1, 2, 3]);
        assert_eq!(order[0], 0);
        assert_eq!(count_forward(&star, &order).unwrap(), 5);
    }

    // Concatenation keeps every part-internal forward arc and turns the
    // whole majority direction of the cut forward, so the total is exact.
    #[test]
    fn combine_realizes_parts_plus_majority_cut() {
        let mut checked = 0;
        for seed in 0..80u64 {
            let g = gen_connected_oriented(8, 0.35, seed);
            let mut r = SplitMix64::new(seed ^ 0xcc);
            let s: VertexSet = (0..8).filter(|_| r.next_bool()).collect();
            if s.is_empty() || s.len() == 8 {
                continue;
            }
            let (sub_s, map_s) = g.induced(&s);
            let rest: VertexSet = (0..8).filter(|v| !s.contains(*v)).collect();
            let (sub_r, map_r) = g.induced(&rest);
            let ws = oracle_max_acyclic(&sub_s).unwrap().witness;
            let wr = oracle_max_acyclic(&sub_r).unwrap().witness;
            let order_s: Vec<usize> = ws.order.iter().map(|&i| map_s[i]).collect();
            let order_r: Vec<usize> = wr.order.iter().map(|&i| map_r[i]).collect();
            let combined = combine(&g, &s, &order_s, &order_r);
            let (leaving, entering) = g.cut_degrees(&s).unwrap();
            assert_eq!(
                count_forward(&g, &combined).unwrap(),
                ws.forward_arcs + wr.forward_arcs + leaving.max(entering),
                "seed {seed}"
            );
            checked += 1;
        }
        assert!(checked > 60);
    }

    #[test]
    fn two_way_rules_preserve_value_exactly() {
        for seed in 0..60u64 {
            let core = gen_connected_oriented(5, 0.4, seed);
            // Attach a pendant triangle at vertex 0.
            let n = core.n();
            let mut arcs = core.arcs().to_vec();
            arcs.extend([(0, n), (n, n + 1), (n + 1, 0)]);
            let g = OrientedGraph::build(n + 2, &arcs).unwrap();
            let (x, s) = detect_rule1(&g).expect("construction admits the rule");
            let r = apply_rule1(&g, x, s).unwrap();
            assert_eq!(oracle_a(&g), oracle_a(&r.graph) + 2, "seed {seed}");
        }
    }

    #[test]
    fn one_way_rules_never_lose_excess() {
        let mut checked = 0;
        for seed in 0..80u64 {
            let g = gen_connected_oriented(7, 0.35, seed);
            if let Some(x) = detect_rule3(&g) {
                let r = apply_rule3(&g, x).unwrap();
                assert!(
                    excess_q(&g) >= excess_q(&r.graph) + r.k_delta,
                    "R3 seed {seed}"
                );
                checked += 1;
            }
            if let Some(s) = detect_rule5(&g) {
                let r = apply_rule5(&g, s).unwrap();
                assert!(
                    excess_q(&g) >= excess_q(&r.graph) + r.k_delta,
                    "R5 seed {seed}"
                );
                checked += 1;
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn decompose_examples() {
        let cfg = EngineConfig::default();

        // Lone 3-cycle at k = 1: rule 1 fires, no k spent, DP stage needed.
        let inst = Instance::new(gen_ht(1), 1).unwrap();
        match decompose(&inst, &cfg).unwrap() {
            DecomposeOutcome::Decomposition(d) => {
                assert!(d.u.is_empty());
                assert!(d.report.all_hold());
                assert_eq!(d.trace.final_k, 1);
            }
            DecomposeOutcome::Yes(_) => panic!("lone cycle at k=1 is not an early yes"),
        }

        // Path at k = 1: the endpoint pays 1 and certifies yes.
        let path = OrientedGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = Instance::new(path.clone(), 1).unwrap();
        match decompose(&inst, &cfg).unwrap() {
            DecomposeOutcome::Yes(trace) => {
                assert_eq!(trace.final_k, 0);
                let base = oracle_max_acyclic(&trace.final_graph).unwrap().witness;
                let lifted = lift_witness(&trace, &base).unwrap();
                assert!(verify_yes(&inst, &lifted));
            }
            _ => panic!("expected an early yes"),
        }

        // Transitive 5-tournament at k = 3 certifies yes.
        let mut arcs = Vec::new();
        for u in 0..5 {
            for v in (u + 1)..5 {
                arcs.push((u, v));
            }
        }
        let t5 = OrientedGraph::build(5, &arcs).unwrap();
        let inst = Instance::new(t5, 3).unwrap();
        assert!(matches!(
            decompose(&inst, &cfg).unwrap(),
            DecomposeOutcome::Yes(_)
        ));
    }

    #[test]
    fn lift_witness_examples() {
        // Empty trace is the identity.
        let inst = Instance::new(gen_ht(1), 0).unwrap();
        let trace = ReductionTrace::empty(&inst);
        let base = oracle_max_acyclic(inst.graph()).unwrap().witness;
        let lifted = lift_witness(&trace, &base).unwrap();
        assert_eq!(lifted, base);

        // Single R3 step on a path.
        let path = OrientedGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = Instance::new(path, 1).unwrap();
        let DecomposeOutcome::Yes(trace) = decompose(&inst, &EngineConfig::default()).unwrap()
        else {
            panic!()
        };
        let base = oracle_max_acyclic(&trace.final_graph).unwrap().witness;
        let lifted = lift_witness(&trace, &base).unwrap();
        assert_eq!(lifted.forward_arcs, 2);

        // R1 on the lone 3-cycle from a single-vertex base.
        let inst = Instance::new(gen_ht(1), 5).unwrap();
        let mut stepper = Stepper::new(&inst);
        let (x, s) = detect_rule1(&stepper.graph).unwrap();
        stepper
            .perform(DenseStep::R1 { x, s }, &EngineConfig::default())
            .unwrap();
        let trace = stepper.into_trace(&inst);
        let base = WitnessOrdering::from_order(&trace.final_graph, vec![0]).unwrap();
        let lifted = lift_witness(&trace, &base).unwrap();
        assert_eq!(lifted.forward_arcs, 2);
    }

    #[test]
    fn lift_across_rule2_gains_two() {
        // Double triangle bridged into a core, then lifted back.
        for seed in 0..40u64 {
            let core = gen_connected_oriented(4, 0.5, seed);
            let n = core.n();
            // a = n, b = n+1, c = n+2, d = n+3, e = n+4; attach a and e.
            let mut arcs = core.arcs().to_vec();
            arcs.extend([
                (n, n + 1),
                (n + 1, n + 2),
                (n + 2, n),
                (n + 2, n + 3),
                (n + 3, n + 4),
                (n + 4, n + 2),
                (0, n),
                (n + 4, 1),
            ]);
            let g = OrientedGraph::build(n + 5, &arcs).unwrap();
            let inst = Instance::new(g.clone(), 0).unwrap();
            let Some(tuple) = detect_rule2(&g) else {
                panic!("construction admits the rule (seed {seed})");
            };
            let mut stepper = Stepper::new(&Instance::new(g.clone(), 5).unwrap());
            stepper
                .perform(DenseStep::R2 { tuple }, &EngineConfig::default())
                .unwrap();
            let trace = stepper.into_trace(&Instance::new(g.clone(), 5).unwrap());
            let base = oracle_max_acyclic(&trace.final_graph).unwrap().witness;
            let lifted = lift_witness(&trace, &base).unwrap();
            assert_eq!(lifted.forward_arcs, base.forward_arcs + 2, "seed {seed}");
            let _ = inst;
        }
    }

    #[test]
    fn trace_serialization_round_trips_through_replay() {
        for seed in 0..30u64 {
            let g = gen_connected_oriented(9, 0.3, seed);
            let inst = Instance::new(g.clone(), 2).unwrap();
            let trace = match decompose(&inst, &EngineConfig::default()).unwrap() {
                DecomposeOutcome::Yes(t) => t,
                DecomposeOutcome::Decomposition(d) => d.trace,
            };
            let text = trace.serialize_steps();
            let mut replayer = Replayer::new(&g, inst.k());
            for line in text.lines().filter(|l| !l.is_empty()) {
                let parsed = parse_step_line(line).unwrap();
                replayer.apply(&parsed).unwrap();
            }
            assert_eq!(replayer.graph, trace.final_graph, "seed {seed}");
            assert_eq!(replayer.k, trace.final_k, "seed {seed}");
        }
    }

    #[test]
    fn replay_rejects_tampered_kdelta() {
        let path = OrientedGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = Instance::new(path.clone(), 1).unwrap();
        let DecomposeOutcome::Yes(trace) = decompose(&inst, &EngineConfig::default()).unwrap()
        else {
            panic!()
        };
        let line = trace.serialize_steps();
        let mut parsed = parse_step_line(line.lines().next().unwrap()).unwrap();
        parsed.k_delta += 1;
        let mut replayer = Replayer::new(&path, 1);
        assert!(matches!(
            replayer.apply(&parsed),
            Err(EngineError::TraceMismatch(_))
        ));
    }
}
