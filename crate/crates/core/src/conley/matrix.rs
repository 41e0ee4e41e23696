//! Dense matrices over Z5: elimination, the invertible core of a linear
//! map (image stabilization), and invariant factors via Smith reduction of
//! the characteristic matrix.

use super::field::Z5;
use super::poly::Poly;

/// Row-major dense matrix over Z5.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Z5>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![Z5::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Z5::ONE);
        }
        m
    }

    pub fn from_lifted(rows: &[&[i64]]) -> Mat {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Mat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, Z5::new(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Z5 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Z5) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Row-major entries lifted to `{-2,...,2}` for serialization.
    pub fn lifted_rows(&self) -> Vec<Vec<i8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).lifted()).collect())
            .collect()
    }

    /// Column indices that carry pivots in the row echelon form; the
    /// corresponding original columns form a column-space basis.
    fn pivot_columns(&self) -> Vec<usize> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let piv = (row..m.rows).find(|&r| !m.get(r, col).is_zero());
            let Some(piv) = piv else { continue };
            for j in 0..m.cols {
                let tmp = m.get(row, j);
                m.set(row, j, m.get(piv, j));
                m.set(piv, j, tmp);
            }
            let inv = m.get(row, col).inv();
            for j in 0..m.cols {
                let v = m.get(row, j) * inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r != row {
                    let f = m.get(r, col);
                    if !f.is_zero() {
                        for j in 0..m.cols {
                            let v = m.get(r, j) - f * m.get(row, j);
                            m.set(r, j, v);
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.pivot_columns().len()
    }

    fn select_columns(&self, cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j));
            }
        }
        out
    }

    /// Solves `self * X = rhs` for full-column-rank `self`; panics if the
    /// system is inconsistent.
    fn solve_exact(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let r = self.cols;
        let k = rhs.cols;
        let mut aug = Mat::zeros(n, r + k);
        for i in 0..n {
            for j in 0..r {
                aug.set(i, j, self.get(i, j));
            }
            for j in 0..k {
                aug.set(i, r + j, rhs.get(i, j));
            }
        }
        let mut row = 0;
        let mut pivot_of_col = vec![usize::MAX; r];
        for col in 0..r {
            let piv = (row..n).find(|&rr| !aug.get(rr, col).is_zero());
            let Some(piv) = piv else { continue };
            for j in 0..r + k {
                let tmp = aug.get(row, j);
                aug.set(row, j, aug.get(piv, j));
                aug.set(piv, j, tmp);
            }
            let inv = aug.get(row, col).inv();
            for j in 0..r + k {
                let v = aug.get(row, j) * inv;
                aug.set(row, j, v);
            }
            for rr in 0..n {
                if rr != row {
                    let f = aug.get(rr, col);
                    if !f.is_zero() {
                        for j in 0..r + k {
                            let v = aug.get(rr, j) - f * aug.get(row, j);
                            aug.set(rr, j, v);
                        }
                    }
                }
            }
            pivot_of_col[col] = row;
            row += 1;
        }
        // Consistency: rows beyond the pivots must have zero rhs.
        for rr in row..n {
            for j in 0..k {
                assert!(
                    aug.get(rr, r + j).is_zero(),
                    "inconsistent system in solve_exact"
                );
            }
        }
        let mut x = Mat::zeros(r, k);
        for col in 0..r {
            let pr = pivot_of_col[col];
            assert!(pr != usize::MAX, "solve_exact needs full column rank");
            for j in 0..k {
                x.set(col, j, aug.get(pr, r + j));
            }
        }
        x
    }

    /// Inverse of a square invertible matrix; `None` when singular.
    pub fn inverse(&self) -> Option<Mat> {
        assert!(self.is_square());
        if self.rank() < self.rows {
            return None;
        }
        Some(self.solve_exact(&Mat::identity(self.rows)))
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for row in self.lifted_rows() {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// Similarity-class data of the nonnilpotent part of a linear map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreInvariants {
    pub core_dim: usize,
    /// Characteristic polynomial of the core (product of the invariant
    /// factors); `1` when the core is zero-dimensional.
    pub char_poly: Poly,
    /// Monic nonunit invariant factors in divisibility order; a complete
    /// similarity invariant for the core.
    pub invariant_factors: Vec<Poly>,
    /// The restricted (invertible) map in the stabilized-image basis.
    pub core_matrix: Mat,
}

impl CoreInvariants {
    pub fn trivial() -> CoreInvariants {
        CoreInvariants {
            core_dim: 0,
            char_poly: Poly::one(),
            invariant_factors: Vec::new(),
            core_matrix: Mat::zeros(0, 0),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.core_dim == 0
    }

    /// Same similarity class: the invariant-factor chains agree.
    pub fn same_class(&self, other: &CoreInvariants) -> bool {
        self.invariant_factors == other.invariant_factors
    }

    /// Similarity class of this core direct-summed with `other`, computed
    /// from the block-diagonal core matrix.
    pub fn direct_sum_class(&self, other: &CoreInvariants) -> Vec<Poly> {
        invariant_factors(&self.core_matrix.direct_sum(&other.core_matrix))
    }
}

/// Restricts a square map to the stabilized image `im(A^n)` and returns
/// the similarity invariants of that invertible restriction.
pub fn invertible_core(a: &Mat) -> CoreInvariants {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return CoreInvariants::trivial();
    }
    // A^(2^k) with 2^k >= n: the image is stabilized.
    let mut power = a.clone();
    let mut steps = 1usize;
    while steps < n {
        power = power.mul(&power);
        steps *= 2;
    }
    let basis_cols = power.pivot_columns();
    if basis_cols.is_empty() {
        return CoreInvariants::trivial();
    }
    let basis = power.select_columns(&basis_cols);
    let image = a.mul(&basis);
    // A maps im(A^n) into itself, so the coordinates exist and are unique.
    let core = basis.solve_exact(&image);
    let factors = invariant_factors(&core);
    let mut char_poly = Poly::one();
    for f in &factors {
        char_poly = char_poly.mul(f);
    }
    assert!(
        !char_poly.coeff(0).is_zero(),
        "core map must be invertible"
    );
    CoreInvariants {
        core_dim: basis_cols.len(),
        char_poly,
        invariant_factors: factors,
        core_matrix: core,
    }
}

/// Monic nonunit invariant factors of a square matrix over Z5, via Smith
/// reduction of `xI - A` over the polynomial ring.
pub fn invariant_factors(a: &Mat) -> Vec<Poly> {
    assert!(a.is_square());
    let n = a.rows();
    let mut m: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let diag = if i == j { Poly::x() } else { Poly::zero() };
                    diag.sub(&Poly::constant(a.get(i, j)))
                })
                .collect()
        })
        .collect();

    let mut factors = Vec::new();
    for t in 0..n {
        'outer: loop {
            // Minimal-degree nonzero entry of the trailing block.
            let mut best: Option<(usize, usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !m[i][j].is_zero() {
                        let d = m[i][j].degree();
                        if best.map_or(true, |(bd, _, _)| d < bd) {
                            best = Some((d, i, j));
                        }
                    }
                }
            }
            let Some((_, bi, bj)) = best else {
                // Trailing block is zero; remaining diagonal entries are 0,
                // impossible for xI - A (determinant is monic of degree n).
                unreachable!("characteristic matrix cannot lose rank");
            };
            m.swap(t, bi);
            for row in m.iter_mut() {
                row.swap(t, bj);
            }

            let mut dirty = false;
            for i in t + 1..n {
                if !m[i][t].is_zero() {
                    let (q, _r) = m[i][t].divmod(&m[t][t]);
                    for j in t..n {
                        let sub = q.mul(&m[t][j]);
                        m[i][j] = m[i][j].sub(&sub);
                    }
                    if !m[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !m[t][j].is_zero() {
                    let (q, _r) = m[t][j].divmod(&m[t][t]);
                    for i in t..n {
                        let sub = q.mul(&m[i][t]);
                        m[i][j] = m[i][j].sub(&sub);
                    }
                    if !m[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'outer;
            }
            // Pivot must divide every remaining entry.
            for i in t + 1..n {
                for j in t + 1..n {
                    if !m[t][t].divides(&m[i][j]) {
                        for jj in t..n {
                            let add = m[i][jj].clone();
                            m[t][jj] = m[t][jj].add(&add);
                        }
                        continue 'outer;
                    }
                }
            }
            break;
        }
        let d = m[t][t].make_monic();
        m[t][t] = d.clone();
        if d.degree() >= 1 {
            factors.push(d);
        }
    }
    factors
}
