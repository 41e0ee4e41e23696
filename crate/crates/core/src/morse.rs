//! Graph dynamics of the multivalued map: strongly connected components,
//! the Morse graph of recurrent components, join-irreducible attractors
//! and their predecessors, index pairs, and the geometric supports of
//! Morse sets.
//!
//! Cell fibers are contiguous edge-index ranges, so the digraph stores one
//! range per vertex and the SCC/reachability passes walk the ranges
//! implicitly instead of materializing edge lists.

use crate::enclosure::FiberTable;
use crate::grid::{CellComplex1D, EdgeRange};

/// Directed graph on top cells; vertex `v` maps onto the contiguous range
/// `targets[v]`.
#[derive(Clone, Debug)]
pub struct Digraph {
    targets: Vec<EdgeRange>,
}

impl Digraph {
    pub fn new(targets: Vec<EdgeRange>) -> Self {
        let n = targets.len();
        assert!(n > 0);
        for r in &targets {
            assert!(r.last < n, "target range exceeds vertex count");
        }
        Digraph { targets }
    }

    pub fn from_fibers(fibers: &FiberTable) -> Self {
        Digraph::new(fibers.target_ranges().to_vec())
    }

    pub fn num_vertices(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self, v: usize) -> EdgeRange {
        self.targets[v]
    }

    /// Image of a cell set, as a sorted merged list of ranges.
    fn image_ranges(&self, cells: &[u32]) -> Vec<EdgeRange> {
        let mut ranges: Vec<EdgeRange> = cells.iter().map(|&c| self.targets[c as usize]).collect();
        ranges.sort_by_key(|r| r.first);
        let mut merged: Vec<EdgeRange> = Vec::new();
        for r in ranges {
            match merged.last_mut() {
                Some(m) if r.first <= m.last + 1 => m.last = m.last.max(r.last),
                _ => merged.push(r),
            }
        }
        merged
    }
}

/// Strongly connected components; `comps` lists them in reverse
/// topological order of the condensation (every edge between distinct
/// components points to an earlier entry).
#[derive(Clone, Debug)]
pub struct SccResult {
    pub comp_of: Vec<u32>,
    pub comps: Vec<Vec<u32>>,
}

/// Iterative Tarjan over the implicit range adjacency.
pub fn tarjan_scc(g: &Digraph) -> SccResult {
    const UNSET: u32 = u32::MAX;
    let n = g.num_vertices();
    let mut index = vec![UNSET; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut comp_of = vec![UNSET; n];
    let mut comps: Vec<Vec<u32>> = Vec::new();
    let mut counter: u32 = 0;

    // (vertex, next target to visit)
    let mut frames: Vec<(u32, u32)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root as u32, g.targets(root).first as u32));
        index[root] = counter;
        lowlink[root] = counter;
        counter += 1;
        stack.push(root as u32);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = frames.last_mut() {
            let vu = v as usize;
            let range = g.targets(vu);
            let mut descended = false;
            while *next <= range.last as u32 {
                let w = *next as usize;
                *next += 1;
                if index[w] == UNSET {
                    index[w] = counter;
                    lowlink[w] = counter;
                    counter += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    frames.push((w as u32, g.targets(w).first as u32));
                    descended = true;
                    break;
                } else if on_stack[w] {
                    lowlink[vu] = lowlink[vu].min(index[w]);
                }
            }
            if descended {
                continue;
            }
            // v is finished.
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                let pu = parent as usize;
                lowlink[pu] = lowlink[pu].min(lowlink[vu]);
            }
            if lowlink[vu] == index[vu] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w as usize] = false;
                    comp_of[w as usize] = comps.len() as u32;
                    comp.push(w);
                    if w as usize == vu {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    SccResult { comp_of, comps }
}

/// Deduplicated condensation edges `(from component, to component)`.
/// Intended for small graphs; production code queries reachability through
/// [`forward_reach`] instead.
pub fn condensation_edges(g: &Digraph, scc: &SccResult) -> Vec<(u32, u32)> {
    let mut edges = std::collections::BTreeSet::new();
    for v in 0..g.num_vertices() {
        let cv = scc.comp_of[v];
        for w in g.targets(v).iter() {
            let cw = scc.comp_of[w];
            if cv != cw {
                edges.insert((cv, cw));
            }
        }
    }
    edges.into_iter().collect()
}

/// Forward-reachable cell set of `seeds` (inclusive), as a membership mask.
///
/// A union-find "next unvisited" pointer skips already-visited stretches
/// of each target range, so the walk is near-linear in the cell count even
/// when total range length is quadratic.
pub fn forward_reach(g: &Digraph, seeds: &[u32]) -> Vec<bool> {
    let n = g.num_vertices();
    let mut visited = vec![false; n];
    // skip[i] = candidate for the smallest unvisited index >= i
    let mut skip: Vec<u32> = (0..=n as u32).collect();

    fn find(skip: &mut [u32], i: u32) -> u32 {
        let mut root = i;
        while skip[root as usize] != root {
            root = skip[root as usize];
        }
        let mut cur = i;
        while skip[cur as usize] != root {
            let next = skip[cur as usize];
            skip[cur as usize] = root;
            cur = next;
        }
        root
    }

    let mut work: Vec<u32> = Vec::new();
    for &s in seeds {
        if !visited[s as usize] {
            visited[s as usize] = true;
            skip[s as usize] = s + 1;
            work.push(s);
        }
    }
    while let Some(v) = work.pop() {
        let r = g.targets(v as usize);
        let mut i = find(&mut skip, r.first as u32);
        while i <= r.last as u32 {
            visited[i as usize] = true;
            skip[i as usize] = i + 1;
            work.push(i);
            i = find(&mut skip, i + 1);
        }
    }
    visited
}

/// A recurrent component of the map's digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseNode {
    /// Sorted cell indices of the component.
    pub cells: Vec<u32>,
}

/// Poset of recurrent components. Nodes are sorted by leftmost cell and
/// labeled `M0, M1, ...` in that order; `below[i][j]` says node `j` is
/// strictly below node `i` (reachable from it).
#[derive(Clone, Debug)]
pub struct MorseGraph {
    pub nodes: Vec<MorseNode>,
    below: Vec<Vec<bool>>,
    reach: Vec<Vec<bool>>,
}

impl MorseGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn label(&self, i: usize) -> String {
        format!("M{i}")
    }

    /// Strict order: node `j` below node `i`.
    pub fn strictly_below(&self, i: usize, j: usize) -> bool {
        self.below[i][j]
    }

    pub fn is_minimal(&self, i: usize) -> bool {
        (0..self.len()).all(|j| !self.below[i][j])
    }

    pub fn is_maximal(&self, i: usize) -> bool {
        (0..self.len()).all(|j| !self.below[j][i])
    }

    /// `i` covers `j`: strictly above with nothing in between.
    pub fn covers(&self, i: usize, j: usize) -> bool {
        self.below[i][j]
            && !(0..self.len()).any(|k| self.below[i][k] && self.below[k][j])
    }

    /// All covering pairs `(upper, lower)`.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if self.covers(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn reach_mask(&self, i: usize) -> &[bool] {
        &self.reach[i]
    }
}

/// Morse graph: SCCs that contain at least one edge (size >= 2, or a
/// single cell with a self-loop), ordered by reachability.
pub fn morse_graph(g: &Digraph) -> MorseGraph {
    let scc = tarjan_scc(g);
    let mut nodes: Vec<MorseNode> = scc
        .comps
        .iter()
        .filter(|comp| {
            comp.len() >= 2 || g.targets(comp[0] as usize).contains(comp[0] as usize)
        })
        .map(|comp| MorseNode {
            cells: comp.clone(),
        })
        .collect();
    nodes.sort_by_key(|n| n.cells[0]);

    let reach: Vec<Vec<bool>> = nodes.iter().map(|n| forward_reach(g, &n.cells)).collect();
    let k = nodes.len();
    let mut below = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i != j && reach[i][nodes[j].cells[0] as usize] {
                below[i][j] = true;
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            assert!(
                !(below[i][j] && below[j][i]),
                "mutually reachable Morse nodes must be one component"
            );
        }
    }
    MorseGraph {
        nodes,
        below,
        reach,
    }
}

/// A forward-invariant cell set: the image of the set equals the set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attractor {
    /// Sorted cell indices.
    pub cells: Vec<u32>,
}

impl Attractor {
    pub fn empty() -> Self {
        Attractor { cells: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn contains(&self, cell: u32) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    pub fn is_subset_of(&self, other: &Attractor) -> bool {
        self.cells.iter().all(|&c| other.contains(c))
    }

    /// Sorted merged maximal runs of consecutive cells.
    pub fn runs(&self) -> Vec<EdgeRange> {
        let mut out: Vec<EdgeRange> = Vec::new();
        for &c in &self.cells {
            match out.last_mut() {
                Some(r) if c as usize == r.last + 1 => r.last += 1,
                _ => out.push(EdgeRange {
                    first: c as usize,
                    last: c as usize,
                }),
            }
        }
        out
    }

    /// Exact invariance check `F(A) = A`.
    pub fn is_invariant(&self, g: &Digraph) -> bool {
        if self.cells.is_empty() {
            return true;
        }
        g.image_ranges(&self.cells) == self.runs()
    }

    pub fn union(&self, other: &Attractor) -> Attractor {
        let mut cells = Vec::with_capacity(self.cells.len() + other.cells.len());
        let (mut i, mut j) = (0, 0);
        while i < self.cells.len() || j < other.cells.len() {
            let a = self.cells.get(i);
            let b = other.cells.get(j);
            match (a, b) {
                (Some(&x), Some(&y)) if x == y => {
                    cells.push(x);
                    i += 1;
                    j += 1;
                }
                (Some(&x), Some(&y)) if x < y => {
                    cells.push(x);
                    i += 1;
                }
                (Some(_), Some(&y)) => {
                    cells.push(y);
                    j += 1;
                }
                (Some(&x), None) => {
                    cells.push(x);
                    i += 1;
                }
                (None, Some(&y)) => {
                    cells.push(y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Attractor { cells }
    }

    pub fn intersection(&self, other: &Attractor) -> Attractor {
        Attractor {
            cells: self
                .cells
                .iter()
                .cloned()
                .filter(|&c| other.contains(c))
                .collect(),
        }
    }
}

/// Smallest attractor containing the node: its forward-reachable closure.
///
/// The closure R satisfies `F(R) = R`: it is closed under the map, and
/// every cell of R either has a predecessor on a path from the node or
/// sits in the strongly connected node itself.
pub fn nu(g: &Digraph, mg: &MorseGraph, node: usize) -> Attractor {
    let mask = mg.reach_mask(node);
    let cells: Vec<u32> = (0..g.num_vertices() as u32)
        .filter(|&c| mask[c as usize])
        .collect();
    let a = Attractor { cells };
    assert!(a.is_invariant(g), "reachable closure must be invariant");
    a
}

/// Union of the attractors of all nodes strictly below `node`; the unique
/// immediate predecessor of `nu(node)` in the attractor lattice.
pub fn pred(g: &Digraph, mg: &MorseGraph, node: usize) -> Attractor {
    let mut acc = Attractor::empty();
    for j in 0..mg.len() {
        if mg.strictly_below(node, j) {
            acc = acc.union(&nu(g, mg, j));
        }
    }
    assert!(acc.is_invariant(g));
    acc
}

/// Nested attractor pair `(A1, A0)` whose cell closures carry the index
/// computation.
#[derive(Clone, Debug)]
pub struct IndexPairCells {
    pub a1: Attractor,
    pub a0: Attractor,
}

impl IndexPairCells {
    /// Vertices of the closure of an edge set (all endpoint vertices).
    fn closure_vertices(cells: &[u32]) -> Vec<u32> {
        let mut vs: Vec<u32> = Vec::with_capacity(cells.len() * 2);
        for &c in cells {
            vs.push(c);
            vs.push(c + 1);
        }
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn closure1_vertices(&self) -> Vec<u32> {
        Self::closure_vertices(&self.a1.cells)
    }

    pub fn closure0_vertices(&self) -> Vec<u32> {
        Self::closure_vertices(&self.a0.cells)
    }
}

/// Index pair of a Morse node: `A1 = nu(node)`, `A0 = pred(node)`.
pub fn index_pair(g: &Digraph, mg: &MorseGraph, node: usize) -> IndexPairCells {
    let a1 = nu(g, mg, node);
    let a0 = pred(g, mg, node);
    debug_assert!(a0.is_subset_of(&a1));
    IndexPairCells { a1, a0 }
}

/// Geometric support of a cell set, merged into maximal closed intervals.
pub fn morse_set_intervals(complex: &CellComplex1D, cells: &[u32]) -> Vec<(f64, f64)> {
    let a = Attractor {
        cells: cells.to_vec(),
    };
    a.runs()
        .iter()
        .map(|r| (complex.vertex(r.first), complex.vertex(r.last + 1)))
        .collect()
}

/// Interval endpoints in the fixed 8-decimal report format.
pub fn format_interval(iv: (f64, f64)) -> String {
    format!("[{:.8}, {:.8}]", iv.0, iv.1)
}
