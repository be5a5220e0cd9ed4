//! Exact bound arithmetic in quarter-arc units.
//!
//! Every score is stored as four times its value (`ScoreQ`), so comparisons
//! against `γ(G) = m/2 + (n − c)/4` and the `k/4` parameter are exact integer
//! comparisons. Floating point never touches the decision path.

use crate::graph::{GraphError, OrientedGraph};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("graph is not connected ({components} components)")]
    NotConnected { components: usize },
    #[error("ordering is not a permutation of the vertex set")]
    NotPermutation,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A score value of `q/4` arcs, stored as the integer `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScoreQ(pub i64);

impl ScoreQ {
    pub fn from_arcs(a: usize) -> ScoreQ {
        ScoreQ(4 * a as i64)
    }

    pub fn quarter_units(self) -> i64 {
        self.0
    }
}

/// `γ(G) = m/2 + (n − c)/4` in quarter units: `q = 2m + (n − c)`.
pub fn gamma(g: &OrientedGraph) -> ScoreQ {
    let c = g.component_count();
    ScoreQ(2 * g.m() as i64 + (g.n() as i64 - c as i64))
}

/// The decision threshold `m/2 + (n−1)/4 + k/4` in quarter units,
/// `2m + (n−1) + k`. Only meaningful for connected graphs.
pub fn threshold_q(g: &OrientedGraph, k: i64) -> i64 {
    2 * g.m() as i64 + (g.n() as i64 - 1) + k
}

/// True iff an acyclic subgraph of `a_value` arcs meets the threshold:
/// `4·a ≥ 2m + (n−1) + k`. Errors on disconnected input.
pub fn decide_threshold(g: &OrientedGraph, k: i64, a_value: usize) -> Result<bool, BoundsError> {
    let c = g.component_count();
    if c != 1 {
        return Err(BoundsError::NotConnected { components: c });
    }
    Ok(ScoreQ::from_arcs(a_value).0 >= threshold_q(g, k))
}

/// Number of arcs `(u, v)` with `u` before `v` in `order`.
pub fn count_forward(g: &OrientedGraph, order: &[usize]) -> Result<usize, BoundsError> {
    if order.len() != g.n() {
        return Err(BoundsError::NotPermutation);
    }
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in order.iter().enumerate() {
        if v >= g.n() || pos[v] != usize::MAX {
            return Err(BoundsError::NotPermutation);
        }
        pos[v] = i;
    }
    Ok(g.arcs().iter().filter(|&&(u, v)| pos[u] < pos[v]).count())
}

/// A vertex ordering together with its forward-arc count; the ordering is the
/// standard witness for an acyclic subgraph of that size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessOrdering {
    pub order: Vec<usize>,
    pub forward_arcs: usize,
}

impl WitnessOrdering {
    pub fn from_order(g: &OrientedGraph, order: Vec<usize>) -> Result<Self, BoundsError> {
        let forward_arcs = count_forward(g, &order)?;
        Ok(WitnessOrdering {
            order,
            forward_arcs,
        })
    }
}

/// A connected instance of the decision problem.
#[derive(Debug, Clone)]
pub struct Instance {
    graph: OrientedGraph,
    k: i64,
}

impl Instance {
    pub fn new(graph: OrientedGraph, k: i64) -> Result<Self, BoundsError> {
        let c = graph.component_count();
        if c != 1 {
            return Err(BoundsError::NotConnected { components: c });
        }
        Ok(Instance { graph, k })
    }

    pub fn graph(&self) -> &OrientedGraph {
        &self.graph
    }

    pub fn k(&self) -> i64 {
        self.k
    }
}

/// Recounts the witness and checks the threshold; false on any mismatch.
pub fn verify_yes(instance: &Instance, witness: &WitnessOrdering) -> bool {
    match count_forward(instance.graph(), &witness.order) {
        Ok(f) if f == witness.forward_arcs => {
            decide_threshold(instance.graph(), instance.k(), f).unwrap_or(false)
        }
        _ => false,
    }
}
