//! Uniform 1D cell complex: `2^B` closed edges on a domain interval,
//! with the odd-edge midpoints that carry the confidence bands.

use crate::dataio::Domain;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("subdivision exponent must be in 2..=26, got {0}")]
    BadExponent(u32),
}

/// Contiguous inclusive range of edge indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRange {
    pub first: usize,
    pub last: usize,
}

impl EdgeRange {
    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.first <= i && i <= self.last
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.first..=self.last
    }
}

/// Result of covering an interval by edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocatedEdges {
    /// Edges whose closed support meets the closed interval; `None` when
    /// the interval lies entirely outside the domain.
    pub range: Option<EdgeRange>,
    /// True when the interval is not contained in the domain.
    pub clipped: bool,
}

/// Uniform subdivision of the domain into `2^B` closed edges.
#[derive(Clone, Copy, Debug)]
pub struct CellComplex1D {
    domain: Domain,
    b: u32,
    epsilon: f64,
}

impl CellComplex1D {
    /// `B >= 2` keeps the odd/even edge structure nontrivial; the upper cap
    /// guards the `usize` index arithmetic.
    pub fn new(domain: Domain, b: u32) -> Result<Self, GridError> {
        if !(2..=26).contains(&b) {
            return Err(GridError::BadExponent(b));
        }
        let epsilon = domain.width() / (1u64 << b) as f64;
        Ok(CellComplex1D { domain, b, epsilon })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn subdivision_exponent(&self) -> u32 {
        self.b
    }

    /// Edge length `(upper - lower) / 2^B`.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn num_edges(&self) -> usize {
        1usize << self.b
    }

    pub fn num_vertices(&self) -> usize {
        self.num_edges() + 1
    }

    /// Vertex `i`, with the final vertex pinned to the domain's upper end
    /// so accumulated rounding cannot push it past the boundary.
    pub fn vertex(&self, i: usize) -> f64 {
        assert!(i <= self.num_edges(), "vertex index out of range");
        if i == self.num_edges() {
            self.domain.upper
        } else {
            self.domain.lower + i as f64 * self.epsilon
        }
    }

    /// Closed support `[v_i, v_{i+1}]` of edge `i`.
    pub fn edge_support(&self, i: usize) -> (f64, f64) {
        assert!(i < self.num_edges(), "edge index out of range");
        (self.vertex(i), self.vertex(i + 1))
    }

    /// Midpoints of the odd edges, ascending; there are `2^(B-1)` of them.
    pub fn odd_midpoints(&self) -> Vec<f64> {
        (0..self.num_edges() / 2)
            .map(|i| self.domain.lower + (2 * i) as f64 * self.epsilon + 1.5 * self.epsilon)
            .collect()
    }

    /// Odd-edge index for midpoint slot `i` (the edge `2i + 1`).
    pub fn odd_edge(&self, i: usize) -> usize {
        2 * i + 1
    }

    /// Edges whose closed support intersects the closed interval
    /// `[lo, hi]`, clamped to the domain. Touching at a single shared
    /// vertex counts as intersection.
    pub fn locate_edges(&self, lo: f64, hi: f64) -> LocatedEdges {
        assert!(lo <= hi, "locate_edges needs lo <= hi");
        let clipped = lo < self.domain.lower || hi > self.domain.upper;
        if hi < self.domain.lower || lo > self.domain.upper {
            return LocatedEdges {
                range: None,
                clipped: true,
            };
        }
        let n = self.num_edges();
        // first = min i with vertex(i + 1) >= lo (monotone, binary search)
        let mut a = 0usize;
        let mut b = n - 1;
        while a < b {
            let mid = (a + b) / 2;
            if self.vertex(mid + 1) >= lo {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        let first = a;
        // last = max i with vertex(i) <= hi
        let mut a = 0usize;
        let mut b = n - 1;
        while a < b {
            let mid = (a + b).div_ceil(2);
            if self.vertex(mid) <= hi {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        let last = a;
        debug_assert!(first <= last);
        LocatedEdges {
            range: Some(EdgeRange { first, last }),
            clipped,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::Domain;
    use proptest::prelude::*;

    fn complex(lower: f64, upper: f64, b: u32) -> CellComplex1D {
        CellComplex1D::new(Domain::new(lower, upper).unwrap(), b).unwrap()
    }

    #[test]
    fn vertices_and_supports() {
        let c = complex(0.0, 1.0, 2);
        assert_eq!(c.vertex(2), 0.5);
        assert_eq!(c.edge_support(3), (0.75, 1.0));
        assert_eq!(c.vertex(4), 1.0);
    }

    #[test]
    fn epsilon_is_exact_dyadic_fraction() {
        let c = complex(-0.2, 2.3, 10);
        assert_eq!(c.epsilon(), 2.5 / 1024.0);
        assert_eq!(c.epsilon(), 0.00244140625);
    }

    #[test]
    fn odd_midpoints_small() {
        let c = complex(0.0, 1.0, 2);
        assert_eq!(c.odd_midpoints(), vec![0.375, 0.875]);
        let c = complex(0.0, 1.0, 3);
        assert_eq!(c.odd_midpoints(), vec![0.1875, 0.4375, 0.6875, 0.9375]);
    }

    #[test]
    fn odd_midpoints_match_edge_midpoints() {
        for b in 2..=15 {
            let c = complex(0.0, 1.0, b);
            let ms = c.odd_midpoints();
            assert_eq!(ms.len(), 1usize << (b - 1));
            for (i, &m) in ms.iter().enumerate() {
                let (lo, hi) = c.edge_support(c.odd_edge(i));
                assert!((m - 0.5 * (lo + hi)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn locate_edges_examples() {
        let c = complex(0.0, 1.0, 2);
        let r = c.locate_edges(0.3, 0.6);
        assert_eq!(r.range, Some(EdgeRange { first: 1, last: 2 }));
        assert!(!r.clipped);

        // a single vertex touches both incident edges
        let r = c.locate_edges(0.25, 0.25);
        assert_eq!(r.range, Some(EdgeRange { first: 0, last: 1 }));
        assert!(!r.clipped);

        let r = c.locate_edges(0.9, 1.4);
        assert_eq!(r.range, Some(EdgeRange { first: 3, last: 3 }));
        assert!(r.clipped);

        let r = c.locate_edges(1.5, 2.0);
        assert_eq!(r.range, None);
        assert!(r.clipped);
    }

    #[test]
    fn edges_tile_domain() {
        let c = complex(-1.0, 3.0, 5);
        for i in 0..c.num_edges() - 1 {
            assert_eq!(c.edge_support(i).1, c.edge_support(i + 1).0);
        }
        assert_eq!(c.edge_support(0).0, -1.0);
        assert_eq!(c.edge_support(c.num_edges() - 1).1, 3.0);
    }

    proptest! {
        #[test]
        fn locate_matches_bruteforce(lo in -0.5f64..1.5, len in 0.0f64..0.8, b in 2u32..7) {
            let c = complex(0.0, 1.0, b);
            let hi = lo + len;
            let got = c.locate_edges(lo, hi);
            let expect: Vec<usize> = (0..c.num_edges())
                .filter(|&i| {
                    let (a, z) = c.edge_support(i);
                    a <= hi && z >= lo
                })
                .collect();
            match got.range {
                None => prop_assert!(expect.is_empty()),
                Some(r) => {
                    prop_assert_eq!(r.iter().collect::<Vec<_>>(), expect);
                }
            }
            prop_assert_eq!(got.clipped, lo < 0.0 || hi > 1.0);
        }

        #[test]
        fn locate_monotone_in_interval(lo in 0.0f64..1.0, len in 0.0f64..0.5, grow in 0.0f64..0.3) {
            let c = complex(0.0, 1.0, 5);
            let hi = (lo + len).min(1.0);
            let small = c.locate_edges(lo, hi).range.unwrap();
            let big = c.locate_edges((lo - grow).max(0.0), (hi + grow).min(1.0)).range.unwrap();
            prop_assert!(big.first <= small.first && big.last >= small.last);
        }
    }
}
