//! Relative homology of 1D cell pairs.
//!
//! For a pair of edge-set closures `(closure A1, closure A0)` the relative
//! chain complex has one boundary map, from relative edges to relative
//! vertices. Relative edges split into maximal runs of consecutive edges;
//! eliminating the interior-vertex equations leaves, per run,
//!
//! * both end vertices in the base: a relative cycle (one H1 generator,
//!   the sum of the run's edges),
//! * exactly one end in the base: an acyclic half-open strip (nothing),
//! * both ends relative: one H0 generator (the run's vertex class).
//!
//! This is the closed form of Gaussian elimination on the boundary matrix,
//! and it also yields the projections from chains to homology coordinates:
//! a relative cycle is constant on each run, so its H1 coordinate is the
//! coefficient at the run's first edge; the H0 coordinate of a vertex
//! chain is the coefficient sum inside each both-ends-relative run.

use super::field::Z5;
use crate::morse::IndexPairCells;

/// One maximal run of consecutive relative edges `first..=last`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Run {
    pub first: u32,
    pub last: u32,
    /// Left end vertex lies in the base closure (absent from the relative
    /// complex).
    pub left_in_base: bool,
    pub right_in_base: bool,
}

impl Run {
    pub fn is_cycle(&self) -> bool {
        self.left_in_base && self.right_in_base
    }

    pub fn is_component(&self) -> bool {
        !self.left_in_base && !self.right_in_base
    }
}

/// The relative pair with its run decomposition and homology bases.
#[derive(Clone, Debug)]
pub struct RelativePair {
    n_edges: usize,
    runs: Vec<Run>,
    /// Run index per edge (`u32::MAX` for edges outside the relative
    /// complex).
    run_of_edge: Vec<u32>,
    /// Membership masks for the two closures' edges.
    in_a1: Vec<bool>,
    in_a0: Vec<bool>,
    /// Indices into `runs` of the H1 generators (cycle runs).
    h1_runs: Vec<usize>,
    /// Indices into `runs` of the H0 generators (component runs).
    h0_runs: Vec<usize>,
}

impl RelativePair {
    /// Builds the decomposition; `n_edges` is the total edge count of the
    /// ambient complex.
    pub fn new(pair: &IndexPairCells, n_edges: usize) -> RelativePair {
        let mut in_a1 = vec![false; n_edges];
        for &c in &pair.a1.cells {
            in_a1[c as usize] = true;
        }
        let mut in_a0 = vec![false; n_edges];
        for &c in &pair.a0.cells {
            in_a0[c as usize] = true;
        }
        let mut runs: Vec<Run> = Vec::new();
        let mut run_of_edge = vec![u32::MAX; n_edges];
        let relative = |e: usize, in_a1: &[bool], in_a0: &[bool]| in_a1[e] && !in_a0[e];
        let mut e = 0;
        while e < n_edges {
            if !relative(e, &in_a1, &in_a0) {
                e += 1;
                continue;
            }
            let first = e;
            while e < n_edges && relative(e, &in_a1, &in_a0) {
                run_of_edge[e] = runs.len() as u32;
                e += 1;
            }
            let last = e - 1;
            // A closure vertex is in the base iff it bounds a base edge.
            let left_in_base = first > 0 && in_a0[first - 1];
            let right_in_base = last + 1 < n_edges && in_a0[last + 1];
            runs.push(Run {
                first: first as u32,
                last: last as u32,
                left_in_base,
                right_in_base,
            });
        }
        let h1_runs = runs
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_cycle())
            .map(|(i, _)| i)
            .collect();
        let h0_runs = runs
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_component())
            .map(|(i, _)| i)
            .collect();
        RelativePair {
            n_edges,
            runs,
            run_of_edge,
            in_a1,
            in_a0,
            h1_runs,
            h0_runs,
        }
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn dim_h0(&self) -> usize {
        self.h0_runs.len()
    }

    pub fn dim_h1(&self) -> usize {
        self.h1_runs.len()
    }

    /// Number of relative edges (the 1-chain basis size).
    pub fn dim_c1(&self) -> usize {
        self.runs.iter().map(|r| (r.last - r.first + 1) as usize).sum()
    }

    /// Number of relative vertices (the 0-chain basis size).
    pub fn dim_c0(&self) -> usize {
        self.runs
            .iter()
            .map(|r| {
                let interior = (r.last - r.first) as usize;
                interior
                    + usize::from(!r.left_in_base)
                    + usize::from(!r.right_in_base)
            })
            .sum()
    }

    pub fn edge_in_relative(&self, e: usize) -> bool {
        self.run_of_edge[e] != u32::MAX
    }

    pub fn edge_in_a1(&self, e: usize) -> bool {
        self.in_a1[e]
    }

    pub fn edge_in_a0(&self, e: usize) -> bool {
        self.in_a0[e]
    }

    /// Representative of the k-th H1 generator: every edge of the run with
    /// coefficient one.
    pub fn h1_representative(&self, k: usize) -> (Run, Z5) {
        (self.runs[self.h1_runs[k]], Z5::ONE)
    }

    /// Representative vertex of the k-th H0 generator (leftmost vertex of
    /// its run).
    pub fn h0_representative(&self, k: usize) -> u32 {
        self.runs[self.h0_runs[k]].first
    }

    /// H1 coordinates of a relative cycle given by a dense coefficient
    /// lookup over edges.
    pub fn project_cycle(&self, coeff: impl Fn(usize) -> Z5) -> Vec<Z5> {
        self.h1_runs
            .iter()
            .map(|&ri| coeff(self.runs[ri].first as usize))
            .collect()
    }

    /// H0 class index of a vertex, when its class is a generator.
    ///
    /// A relative vertex in a cycle run or half-open run is a boundary, so
    /// its class is zero; base vertices are zero by definition.
    pub fn vertex_class(&self, v: u32) -> Option<usize> {
        // The vertex belongs to a run when one of its incident edges does
        // and the vertex is inside the run's closed vertex range.
        let v = v as usize;
        let run_idx = if v < self.n_edges && self.run_of_edge[v] != u32::MAX {
            Some(self.run_of_edge[v] as usize)
        } else if v > 0 && self.run_of_edge[v - 1] != u32::MAX {
            Some(self.run_of_edge[v - 1] as usize)
        } else {
            None
        }?;
        let run = self.runs[run_idx];
        // Base endpoints are not relative vertices.
        if v as u32 == run.first && run.left_in_base {
            return None;
        }
        if v as u32 == run.last + 1 && run.right_in_base {
            return None;
        }
        if run.is_component() {
            self.h0_runs.iter().position(|&r| r == run_idx)
        } else {
            None
        }
    }
}
