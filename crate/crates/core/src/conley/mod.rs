//! Conley indices over Z5.
//!
//! For a Morse node the index pair is `(A1, A0) = (nu(node), pred(node))`;
//! the chain selector induces a map on the relative homology of the pair,
//! and the index is the similarity class of that map's invertible core,
//! summarized per dimension by a monic polynomial pair `(p0, p1)`
//! (characteristic polynomials of the cores, `0` marking a trivial
//! dimension). Nontrivial polynomials of the form `x^T +- 1` certify
//! fixed points (`T = 1`) or period-T orbits; a covering pair of nodes
//! carries a connecting orbit when the combined pair's class differs from
//! the direct sum of the two nodes' classes.

pub mod field;
pub mod homology;
pub mod matrix;
pub mod poly;
pub mod selector;

pub use field::Z5;
pub use homology::{RelativePair, Run};
pub use matrix::{invariant_factors, invertible_core, CoreInvariants, Mat};
pub use poly::Poly;
pub use selector::{
    build_selector, build_selector_with_rule, verify_selector, ChainSelector, SelectorError,
    SelectorRule,
};

use crate::morse::{index_pair, nu, pred, Digraph, IndexPairCells, MorseGraph};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConleyError {
    #[error(transparent)]
    Selector(#[from] SelectorError),
    #[error("nodes {upper} and {lower} are not a covering pair of the Morse order")]
    NotCoveringPair { upper: usize, lower: usize },
}

/// Index data in one homology dimension.
#[derive(Clone, Debug)]
pub struct DimIndex {
    /// The induced map on homology coordinates (columns are images of the
    /// basis).
    pub matrix: Mat,
    pub core: CoreInvariants,
}

impl DimIndex {
    pub fn is_trivial(&self) -> bool {
        self.core.is_trivial()
    }

    /// `p_k` in the printed convention: the core's characteristic
    /// polynomial, or `0` for a trivial dimension.
    pub fn polynomial_string(&self) -> String {
        if self.is_trivial() {
            "0".to_string()
        } else {
            self.core.char_poly.to_string()
        }
    }
}

/// The per-dimension polynomial pair and raw index maps of one node.
#[derive(Clone, Debug)]
pub struct ConleyIndex {
    pub h0: DimIndex,
    pub h1: DimIndex,
}

impl ConleyIndex {
    pub fn polynomial_pair(&self) -> (String, String) {
        (self.h0.polynomial_string(), self.h1.polynomial_string())
    }
}

/// What a polynomial pair certifies about the invariant set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Trivial,
    FixedPoint,
    Periodic(usize),
    NontrivialOther,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::Trivial => write!(f, "trivial"),
            Classification::FixedPoint => write!(f, "fixed_point"),
            Classification::Periodic(t) => write!(f, "periodic({t})"),
            Classification::NontrivialOther => write!(f, "nontrivial_other"),
        }
    }
}

/// Classifies an index: `x^T +- 1` in exactly one dimension (the other
/// trivial) certifies a fixed point (`T = 1`) or a period-T orbit; both
/// dimensions trivial is trivial; anything else is reported as nontrivial
/// with its raw matrices.
pub fn interpret(index: &ConleyIndex) -> Classification {
    match (index.h0.is_trivial(), index.h1.is_trivial()) {
        (true, true) => Classification::Trivial,
        (false, false) => Classification::NontrivialOther,
        (false, true) => classify_polynomial(&index.h0.core.char_poly),
        (true, false) => classify_polynomial(&index.h1.core.char_poly),
    }
}

fn classify_polynomial(p: &Poly) -> Classification {
    match p.as_power_form() {
        Some((1, _)) => Classification::FixedPoint,
        Some((t, _)) if t >= 2 => Classification::Periodic(t),
        _ => Classification::NontrivialOther,
    }
}

/// Induced maps on `H0` and `H1` of the relative pair.
///
/// Verifies the invariance preconditions exactly: the fiber of every `A1`
/// cell stays inside `A1`, likewise for `A0` (both are attractors, so a
/// failure is an internal error, not user error).
pub fn index_map(rel: &RelativePair, sel: &ChainSelector, g: &Digraph) -> (Mat, Mat) {
    let n = rel.n_edges();
    assert_eq!(n, g.num_vertices());

    // Invariance via prefix counts of the membership masks.
    let mut pref1 = vec![0u32; n + 1];
    let mut pref0 = vec![0u32; n + 1];
    for e in 0..n {
        pref1[e + 1] = pref1[e] + u32::from(rel.edge_in_a1(e));
        pref0[e + 1] = pref0[e] + u32::from(rel.edge_in_a0(e));
    }
    let full = |pref: &[u32], first: usize, last: usize| {
        (pref[last + 1] - pref[first]) as usize == last - first + 1
    };
    for e in 0..n {
        let r = g.targets(e);
        if rel.edge_in_a1(e) {
            assert!(
                full(&pref1, r.first, r.last),
                "fiber of cell {e} escapes the enclosing attractor"
            );
        }
        if rel.edge_in_a0(e) {
            assert!(
                full(&pref0, r.first, r.last),
                "fiber of base cell {e} escapes the base attractor"
            );
        }
    }

    // H1: push each cycle-run generator through the selector chains.
    let d1 = rel.dim_h1();
    let mut m1 = Mat::zeros(d1, d1);
    if d1 > 0 {
        // row index by the first edge of each cycle run
        let mut row_of_edge = vec![usize::MAX; n];
        for k in 0..d1 {
            let (run, _) = rel.h1_representative(k);
            row_of_edge[run.first as usize] = k;
        }
        let mut diff = vec![0i64; n + 1];
        for col in 0..d1 {
            let (run, _) = rel.h1_representative(col);
            for e in run.first..=run.last {
                let (from, to) = sel.edge_chain(e as usize);
                match from.cmp(&to) {
                    std::cmp::Ordering::Less => {
                        diff[from as usize] += 1;
                        diff[to as usize] -= 1;
                    }
                    std::cmp::Ordering::Greater => {
                        diff[to as usize] -= 1;
                        diff[from as usize] += 1;
                    }
                    std::cmp::Ordering::Equal => {}
                }
            }
            let mut acc = 0i64;
            for e in 0..n {
                acc += diff[e];
                if acc != 0 && row_of_edge[e] != usize::MAX {
                    m1.set(row_of_edge[e], col, Z5::new(acc));
                }
            }
            debug_assert_eq!(acc + diff[n], 0, "image chain must telescope out");
            diff.iter_mut().for_each(|d| *d = 0);
        }
    }

    // H0: push each component-run representative vertex through phi0.
    let d0 = rel.dim_h0();
    let mut m0 = Mat::zeros(d0, d0);
    for col in 0..d0 {
        let v = rel.h0_representative(col);
        let w = sel.vertex_image(v as usize);
        if let Some(row) = rel.vertex_class(w) {
            m0.set(row, col, Z5::ONE);
        }
    }
    (m0, m1)
}

/// Full index of a Morse node.
pub fn conley_index(
    g: &Digraph,
    mg: &MorseGraph,
    sel: &ChainSelector,
    node: usize,
) -> ConleyIndex {
    let pair = index_pair(g, mg, node);
    index_of_pair(&pair, sel, g)
}

/// Index of an explicit attractor pair.
pub fn index_of_pair(pair: &IndexPairCells, sel: &ChainSelector, g: &Digraph) -> ConleyIndex {
    let rel = RelativePair::new(pair, g.num_vertices());
    let (m0, m1) = index_map(&rel, sel, g);
    ConleyIndex {
        h0: DimIndex {
            core: invertible_core(&m0),
            matrix: m0,
        },
        h1: DimIndex {
            core: invertible_core(&m1),
            matrix: m1,
        },
    }
}

/// Outcome of the connecting-orbit comparison for a covering pair.
#[derive(Clone, Debug)]
pub struct ConnectionResult {
    pub connecting_orbit: bool,
    /// Index of the combined pair `(nu(upper), pred(lower))`.
    pub combined: ConleyIndex,
}

/// Certifies a connecting orbit from `upper` to `lower` (a covering pair):
/// true when the combined pair's similarity class differs, in either
/// dimension, from the direct sum of the two nodes' indices.
pub fn connecting_orbit(
    g: &Digraph,
    mg: &MorseGraph,
    sel: &ChainSelector,
    upper: usize,
    lower: usize,
    upper_index: &ConleyIndex,
    lower_index: &ConleyIndex,
) -> Result<ConnectionResult, ConleyError> {
    if !mg.covers(upper, lower) {
        return Err(ConleyError::NotCoveringPair { upper, lower });
    }
    let pair = IndexPairCells {
        a1: nu(g, mg, upper),
        a0: pred(g, mg, lower),
    };
    let combined = index_of_pair(&pair, sel, g);
    let sum_h0 = upper_index.h0.core.direct_sum_class(&lower_index.h0.core);
    let sum_h1 = upper_index.h1.core.direct_sum_class(&lower_index.h1.core);
    let differs = combined.h0.core.invariant_factors != sum_h0
        || combined.h1.core.invariant_factors != sum_h1;
    Ok(ConnectionResult {
        connecting_orbit: differs,
        combined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::Domain;
    use crate::enclosure::FiberTable;
    use crate::grid::{CellComplex1D, EdgeRange};
    use crate::morse::{morse_graph, Attractor, Digraph};

    fn ranges(rs: &[(usize, usize)]) -> FiberTable {
        FiberTable::from_ranges(
            rs.iter()
                .map(|&(first, last)| EdgeRange { first, last })
                .collect(),
        )
    }

    /// Two attracting intervals {2,3} and {8,9} swapped by a decreasing
    /// map; transition cells interpolate.
    fn swap_fixture() -> FiberTable {
        ranges(&[
            (9, 11),
            (9, 10),
            (8, 9),
            (8, 9),
            (7, 9),
            (5, 8),
            (3, 6),
            (2, 4),
            (2, 3),
            (2, 3),
            (1, 2),
            (0, 2),
        ])
    }

    #[test]
    fn swap_fixture_h0_permutation() {
        let fibers = swap_fixture();
        let g = Digraph::from_fibers(&fibers);
        let mg = morse_graph(&g);
        let sel = build_selector(&fibers).unwrap();
        // The swapped pair {2,3,8,9} is the minimal node.
        let node = (0..mg.len())
            .find(|&i| mg.nodes[i].cells == vec![2, 3, 8, 9])
            .expect("swap component present");
        assert!(mg.is_minimal(node));
        let idx = conley_index(&g, &mg, &sel, node);
        assert_eq!(idx.h0.matrix.lifted_rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(idx.h0.polynomial_string(), "x^2 - 1");
        assert_eq!(idx.h1.polynomial_string(), "0");
        assert_eq!(interpret(&idx), Classification::Periodic(2));
    }

    /// Expanding orientation-preserving crossing at a repelling cell,
    /// flanked by attracting ends.
    fn repelling_fixed_point_fixture() -> FiberTable {
        ranges(&[
            (0, 0),
            (0, 0),
            (0, 1),
            (1, 5),
            (6, 7),
            (7, 7),
            (7, 7),
            (7, 7),
        ])
    }

    #[test]
    fn repelling_fixed_point_h1_identity() {
        let fibers = repelling_fixed_point_fixture();
        let g = Digraph::from_fibers(&fibers);
        let mg = morse_graph(&g);
        let sel = build_selector(&fibers).unwrap();
        assert!(verify_selector(&fibers, &sel));
        let node = (0..mg.len())
            .find(|&i| mg.nodes[i].cells == vec![3])
            .expect("repelling cell is recurrent");
        let idx = conley_index(&g, &mg, &sel, node);
        assert_eq!(idx.h1.matrix.lifted_rows(), vec![vec![1]]);
        assert_eq!(idx.h0.polynomial_string(), "0");
        assert_eq!(idx.h1.polynomial_string(), "x - 1");
        assert_eq!(interpret(&idx), Classification::FixedPoint);
    }

    #[test]
    fn zero_dimensional_pair_is_trivial() {
        // A single attracting interval rel nothing below: contractible,
        // index (x - 1, 0).
        let fibers = ranges(&[(0, 1), (0, 1), (0, 2), (2, 3), (3, 3), (3, 4), (4, 5), (6, 7), (6, 7), (7, 7)]);
        let g = Digraph::from_fibers(&fibers);
        let mg = morse_graph(&g);
        let sel = build_selector(&fibers).unwrap();
        let node = (0..mg.len())
            .find(|&i| mg.nodes[i].cells.contains(&0))
            .unwrap();
        assert!(mg.is_minimal(node));
        let idx = conley_index(&g, &mg, &sel, node);
        assert_eq!(interpret(&idx), Classification::FixedPoint);
        assert_eq!(idx.h0.polynomial_string(), "x - 1");
        // H1 of a contractible pair is empty: 0x0 matrix.
        assert_eq!(idx.h1.matrix.rows(), 0);
    }

    fn logistic_fibers(r: f64, b: u32) -> (CellComplex1D, FiberTable) {
        let complex = CellComplex1D::new(Domain::new(0.0, 1.0).unwrap(), b).unwrap();
        let f = move |x: f64| r * x * (1.0 - x);
        let fibers = FiberTable::from_interval_map(&complex, move |a, c| {
            let (fa, fc) = (f(a), f(c));
            let mut lo = fa.min(fc);
            let mut hi = fa.max(fc);
            if a <= 0.5 && 0.5 <= c {
                hi = hi.max(r * 0.25);
            }
            lo = lo.max(0.0);
            (lo, hi)
        })
        .unwrap();
        (complex, fibers)
    }

    #[test]
    fn rasterized_logistic_contracting() {
        // r = 2: globally attracting fixed point at 0.5.
        let (complex, fibers) = logistic_fibers(2.0, 8);
        let g = Digraph::from_fibers(&fibers);
        let mg = morse_graph(&g);
        let sel = build_selector(&fibers).unwrap();
        // Minimal node around 0.5 classifies as a fixed point.
        let minimal: Vec<usize> = (0..mg.len()).filter(|&i| mg.is_minimal(i)).collect();
        assert_eq!(minimal.len(), 1);
        let node = minimal[0];
        let mid = complex.num_edges() as u32 / 2;
        assert!(mg.nodes[node].cells.iter().any(|&c| c.abs_diff(mid) <= 1));
        let idx = conley_index(&g, &mg, &sel, node);
        assert_eq!(interpret(&idx), Classification::FixedPoint);
        assert_eq!(idx.h0.polynomial_string(), "x - 1");
    }

    #[test]
    fn rasterized_logistic_period_four_cascade() {
        // r = 3.5: attracting period-4 orbit, unstable period-2 above it,
        // an interior repelling fixed point, and the repeller at 0.
        let (complex, fibers) = logistic_fibers(3.5, 11);
        let g = Digraph::from_fibers(&fibers);
        let mg = morse_graph(&g);
        let sel = build_selector(&fibers).unwrap();
        let eps = complex.epsilon();
        // node support comes within k*eps of x
        let near = |node: usize, x: f64, k: f64| {
            mg.nodes[node].cells.iter().any(|&c| {
                let (a, b) = complex.edge_support(c as usize);
                x >= a - k * eps && x <= b + k * eps
            })
        };

        let mut p4 = Vec::new();
        let mut p2 = Vec::new();
        let mut fp = Vec::new();
        for i in 0..mg.len() {
            let idx = conley_index(&g, &mg, &sel, i);
            match interpret(&idx) {
                Classification::Periodic(4) => p4.push(i),
                Classification::Periodic(2) => p2.push(i),
                Classification::FixedPoint => fp.push((i, idx.h1.polynomial_string())),
                _ => {}
            }
        }

        // the period-4 node is minimal and contains the exact orbit point 7/8
        let p4 = *p4
            .iter()
            .find(|&&i| mg.is_minimal(i) && near(i, 0.875, 2.0))
            .expect("minimal period-4 node at the orbit");
        // the unstable period-2 node sits above it, near 6/7
        let p2 = *p2
            .iter()
            .find(|&&i| mg.strictly_below(i, p4) && near(i, 6.0 / 7.0, 2.0))
            .expect("period-2 node above the period-4 node");
        // an interior orientation-reversing fixed point near 1 - 1/3.5
        let (fp, fp_poly) = fp
            .iter()
            .find(|&&(i, _)| near(i, 1.0 - 1.0 / 3.5, 3.0))
            .cloned()
            .expect("interior fixed point detected");
        assert_eq!(fp_poly, "x + 1");
        assert!(mg.strictly_below(fp, p2));
    }

    #[test]
    fn connecting_orbit_in_logistic_cascade() {
        let (_, fibers) = logistic_fibers(3.5, 13);
        let g = Digraph::from_fibers(&fibers);
        let mg = morse_graph(&g);
        let sel = build_selector(&fibers).unwrap();
        let indices: Vec<ConleyIndex> =
            (0..mg.len()).map(|i| conley_index(&g, &mg, &sel, i)).collect();
        let mut certified = false;
        let mut uncertified = false;
        for (upper, lower) in mg.cover_pairs() {
            let res =
                connecting_orbit(&g, &mg, &sel, upper, lower, &indices[upper], &indices[lower])
                    .unwrap();
            let up_p2 = interpret(&indices[upper]) == Classification::Periodic(2);
            let low_p4 = interpret(&indices[lower]) == Classification::Periodic(4);
            if up_p2 && low_p4 {
                // the unstable orbit genuinely connects into the attractor
                assert!(res.connecting_orbit);
                assert_eq!(res.combined.h0.polynomial_string(), "x^2 - 1");
                certified = true;
            }
            if !res.connecting_orbit {
                uncertified = true;
            }
        }
        assert!(certified, "period-2 over period-4 pair must be certified");
        assert!(uncertified, "some covering pair matches its direct sum");
    }

    #[test]
    fn non_covering_pair_is_rejected() {
        let (_, fibers) = logistic_fibers(3.5, 13);
        let g = Digraph::from_fibers(&fibers);
        let mg = morse_graph(&g);
        let sel = build_selector(&fibers).unwrap();
        let indices: Vec<ConleyIndex> =
            (0..mg.len()).map(|i| conley_index(&g, &mg, &sel, i)).collect();
        // maximal node does not cover the minimal period-4 node
        let top = (0..mg.len()).find(|&i| mg.is_maximal(i)).unwrap();
        let bottom = (0..mg.len())
            .find(|&i| interpret(&indices[i]) == Classification::Periodic(4))
            .unwrap();
        assert!(mg.strictly_below(top, bottom));
        assert!(!mg.covers(top, bottom));
        assert!(matches!(
            connecting_orbit(&g, &mg, &sel, top, bottom, &indices[top], &indices[bottom]),
            Err(ConleyError::NotCoveringPair { .. })
        ));
    }

    #[test]
    fn selector_rule_does_not_change_invariants() {
        let (_, fibers) = logistic_fibers(3.5, 9);
        let g = Digraph::from_fibers(&fibers);
        let mg = morse_graph(&g);
        let left = build_selector_with_rule(&fibers, SelectorRule::Leftmost).unwrap();
        let right = build_selector_with_rule(&fibers, SelectorRule::Rightmost).unwrap();
        for i in 0..mg.len() {
            let a = conley_index(&g, &mg, &left, i);
            let b = conley_index(&g, &mg, &right, i);
            assert_eq!(
                a.h0.core.invariant_factors, b.h0.core.invariant_factors,
                "node {i} H0"
            );
            assert_eq!(
                a.h1.core.invariant_factors, b.h1.core.invariant_factors,
                "node {i} H1"
            );
        }
    }

    #[test]
    fn attractor_pair_direct_index() {
        // index_of_pair on a hand pair: interval rel both flanking cells.
        let fibers = repelling_fixed_point_fixture();
        let g = Digraph::from_fibers(&fibers);
        let sel = build_selector(&fibers).unwrap();
        let a1 = Attractor {
            cells: vec![0, 1, 2, 3, 4, 5, 6, 7],
        };
        let a0 = Attractor {
            cells: vec![0, 7],
        };
        assert!(a1.is_invariant(&g));
        assert!(a0.is_invariant(&g));
        let idx = index_of_pair(&crate::morse::IndexPairCells { a1, a0 }, &sel, &g);
        assert_eq!(idx.h1.polynomial_string(), "x - 1");
    }
}
