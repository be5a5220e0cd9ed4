//! Oriented-graph representation and the structural queries the solver needs:
//! degrees, cut degrees, connected components, biconnected blocks, induced
//! subgraphs.
//!
//! An oriented graph is a simple digraph with no directed 2-cycles: for every
//! arc `(u, v)` the reverse arc `(v, u)` is absent. Graphs are immutable after
//! construction; deletions produce new graphs together with an id remap so
//! traces can be replayed on original ids.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc ({0}, {0}) is a self-loop")]
    SelfLoop(usize),
    #[error("arcs ({0}, {1}) and ({1}, {0}) form a directed 2-cycle")]
    TwoCycle(usize, usize),
    #[error("arc ({0}, {1}) appears more than once")]
    DuplicateArc(usize, usize),
    #[error("arc ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex set covers all vertices")]
    FullSet,
}

/// A sorted, duplicate-free set of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(vec![v])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(ids: Vec<usize>) -> Self {
        VertexSet::new(ids)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

/// Biconnected blocks of the underlying graph. The one-vertex graph counts as
/// 2-connected, so isolated vertices appear as singleton blocks.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    /// Maximal 2-connected induced subgraphs, each as a sorted vertex set,
    /// listed in lexicographic order.
    pub blocks: Vec<VertexSet>,
    pub cut_vertices: VertexSet,
    /// For every vertex, the indices of the blocks containing it (the
    /// block-cut incidence; cut vertices are exactly those in two or more).
    pub vertex_blocks: Vec<Vec<usize>>,
}

impl BlockDecomposition {
    pub fn blocks_containing(&self, v: usize) -> &[usize] {
        &self.vertex_blocks[v]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedGraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl OrientedGraph {
    /// Validates and builds a graph. Rejects self-loops, directed 2-cycles,
    /// duplicate arcs and out-of-range endpoints, naming the offending arc.
    pub fn build(n: usize, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut seen = std::collections::HashSet::with_capacity(arcs.len());
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateArc(u, v));
            }
            if seen.contains(&(v, u)) {
                return Err(GraphError::TwoCycle(u, v));
            }
        }
        let mut sorted: Vec<(usize, usize)> = arcs.to_vec();
        sorted.sort_unstable();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &sorted {
            out_adj[u].push(v);
        }
        for &(u, v) in &sorted {
            in_adj[v].push(u);
        }
        for l in in_adj.iter_mut() {
            l.sort_unstable();
        }
        Ok(OrientedGraph {
            n,
            arcs: sorted,
            out_adj,
            in_adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    /// Arc list, sorted lexicographically.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn out_neighbors(&self, x: usize) -> &[usize] {
        &self.out_adj[x]
    }

    pub fn in_neighbors(&self, x: usize) -> &[usize] {
        &self.in_adj[x]
    }

    /// `(d⁺(x), d⁻(x))`.
    pub fn degrees(&self, x: usize) -> (usize, usize) {
        (self.out_adj[x].len(), self.in_adj[x].len())
    }

    pub fn degree(&self, x: usize) -> usize {
        self.out_adj[x].len() + self.in_adj[x].len()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out_adj[u].binary_search(&v).is_ok()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_arc(u, v) || self.has_arc(v, u)
    }

    /// Neighbors in the underlying graph, sorted.
    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        let mut ns: Vec<usize> = self.out_adj[x]
            .iter()
            .chain(self.in_adj[x].iter())
            .copied()
            .collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    /// `(d⁺(S), d⁻(S))`: arcs leaving and entering `S`. Their sum is
    /// `|E(S, V∖S)|`.
    pub fn cut_degrees(&self, s: &VertexSet) -> Result<(usize, usize), GraphError> {
        if s.is_empty() {
            return Err(GraphError::EmptySet);
        }
        if s.len() >= self.n {
            return Err(GraphError::FullSet);
        }
        let mut leaving = 0;
        let mut entering = 0;
        for &(u, v) in &self.arcs {
            match (s.contains(u), s.contains(v)) {
                (true, false) => leaving += 1,
                (false, true) => entering += 1,
                _ => {}
            }
        }
        Ok((leaving, entering))
    }

    /// Weakly-connected components of `G − removed`, ordered by minimum
    /// vertex id, each listed as a sorted set.
    pub fn components(&self, removed: &VertexSet) -> Vec<VertexSet> {
        let mut visited = vec![false; self.n];
        for v in removed.iter() {
            visited[v] = true;
        }
        let mut comps = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        for seed in 0..self.n {
            if visited[seed] {
                continue;
            }
            visited[seed] = true;
            queue.push_back(seed);
            let mut members = vec![seed];
            while let Some(u) = queue.pop_front() {
                for w in self.out_adj[u].iter().chain(self.in_adj[u].iter()) {
                    if !visited[*w] {
                        visited[*w] = true;
                        members.push(*w);
                        queue.push_back(*w);
                    }
                }
            }
            members.sort_unstable();
            comps.push(VertexSet(members));
        }
        comps
    }

    pub fn component_count(&self) -> usize {
        self.components(&VertexSet::empty()).len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// True when `G − removed` has exactly one (nonempty) component.
    pub fn connected_after_removing(&self, removed: &VertexSet) -> bool {
        self.components(removed).len() == 1
    }

    /// Biconnected blocks of the underlying graph.
    pub fn blocks(&self) -> BlockDecomposition {
        let n = self.n;
        let adj: Vec<Vec<usize>> = (0..n).map(|v| self.neighbors(v)).collect();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut is_cut = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut edge_stack: Vec<(usize, usize)> = Vec::new();
        let mut timer = 0usize;

        // Iterative DFS; each frame is (vertex, parent, next neighbor index).
        let mut stack: Vec<(usize, usize, usize)> = Vec::new();
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            if adj[root].is_empty() {
                disc[root] = timer;
                timer += 1;
                blocks.push(vec![root]);
                continue;
            }
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut root_children = 0usize;
            stack.push((root, usize::MAX, 0));
            while let Some(&mut (u, parent, ref mut idx)) = stack.last_mut() {
                if *idx < adj[u].len() {
                    let v = adj[u][*idx];
                    *idx += 1;
                    if v == parent {
                        continue;
                    }
                    if disc[v] == usize::MAX {
                        disc[v] = timer;
                        low[v] = timer;
                        timer += 1;
                        if u == root {
                            root_children += 1;
                        }
                        edge_stack.push((u, v));
                        stack.push((v, u, 0));
                    } else if disc[v] < disc[u] {
                        edge_stack.push((u, v));
                        low[u] = low[u].min(disc[v]);
                    }
                } else {
                    stack.pop();
                    if let Some(&mut (p, _, _)) = stack.last_mut() {
                        low[p] = low[p].min(low[u]);
                        if low[u] >= disc[p] {
                            if p != root || root_children > 1 {
                                is_cut[p] = true;
                            }
                            let mut members = Vec::new();
                            while let Some(&(a, b)) = edge_stack.last() {
                                edge_stack.pop();
                                members.push(a);
                                members.push(b);
                                if (a, b) == (p, u) {
                                    break;
                                }
                            }
                            members.sort_unstable();
                            members.dedup();
                            blocks.push(members);
                        }
                    }
                }
            }
        }

        blocks.sort();
        let mut vertex_blocks = vec![Vec::new(); n];
        for (i, b) in blocks.iter().enumerate() {
            for &v in b {
                vertex_blocks[v].push(i);
            }
        }
        let cut_vertices = (0..n).filter(|&v| is_cut[v]).collect();
        BlockDecomposition {
            blocks: blocks.into_iter().map(VertexSet).collect(),
            cut_vertices,
            vertex_blocks,
        }
    }

    /// Induced subgraph on `S` with dense re-indexing. Returns the subgraph
    /// and the id map (new id → old id).
    pub fn induced(&self, s: &VertexSet) -> (OrientedGraph, Vec<usize>) {
        let map: Vec<usize> = s.as_slice().to_vec();
        let mut inv = vec![usize::MAX; self.n];
        for (new, &old) in map.iter().enumerate() {
            inv[old] = new;
        }
        let arcs: Vec<(usize, usize)> = self
            .arcs
            .iter()
            .filter(|&&(u, v)| inv[u] != usize::MAX && inv[v] != usize::MAX)
            .map(|&(u, v)| (inv[u], inv[v]))
            .collect();
        let g = OrientedGraph::build(map.len(), &arcs).expect("induced subgraph stays valid");
        (g, map)
    }

    /// `G − S` with dense re-indexing; survivors keep their relative order.
    pub fn remove_vertices(&self, s: &VertexSet) -> (OrientedGraph, Vec<usize>) {
        let keep: VertexSet = (0..self.n).filter(|&v| !s.contains(v)).collect();
        self.induced(&keep)
    }
}

/// True when `S` induces a directed 3-cycle in `g`.
pub fn is_directed_3cycle(g: &OrientedGraph, s: [usize; 3]) -> bool {
    let [a, b, c] = s;
    if a == b || b == c || a == c {
        return false;
    }
    let mut arcs = 0;
    for &(u, v) in &[(a, b), (b, c), (c, a), (b, a), (c, b), (a, c)] {
        if g.has_arc(u, v) {
            arcs += 1;
        }
    }
    if arcs != 3 {
        return false;
    }
    // Each vertex must have in- and out-degree 1 within the triple.
    for &v in &s {
        let internal_out = s.iter().filter(|&&w| w != v && g.has_arc(v, w)).count();
        if internal_out != 1 {
            return false;
        }
    }
    true
}
