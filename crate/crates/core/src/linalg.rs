//! Dense symmetric linear algebra sized for this crate: full Cholesky
//! factors for the small training correlation matrix and a pivoted,
//! truncated Cholesky factorization for posterior covariances on grids too
//! large to materialize.

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub(crate) struct Cholesky {
    n: usize,
    /// Row-major lower triangle, full n x n storage.
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors the row-major symmetric matrix `a`; `Err(k)` reports the
    /// first pivot index that was not strictly positive.
    pub fn factor(a: &[f64], n: usize) -> Result<Self, usize> {
        assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(i);
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Solves `L x = b` in place.
    pub fn solve_lower(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `L^T x = b` in place.
    pub fn solve_upper(&self, b: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `L L^T x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        self.solve_lower(b);
        self.solve_upper(b);
    }

    /// log det of the factored matrix.
    pub fn log_det(&self) -> f64 {
        (0..self.n).map(|i| self.l[i * self.n + i].ln()).sum::<f64>() * 2.0
    }

    /// Max absolute entrywise residual `|L L^T - A|`.
    #[cfg(test)]
    pub fn reconstruction_error(&self, a: &[f64]) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.l[i * n + k] * self.l[j * n + k];
                }
                worst = worst.max((s - a[i * n + j]).abs());
            }
        }
        worst
    }
}

/// Double-double scalar for the near-singular solves the likelihood
/// optimizer produces: condition numbers around 1e13 exhaust f64, while
/// the ~32 significant digits here leave the solutions exact to working
/// precision.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub fn from(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let err = b - (s - a);
        Dd { hi: s, lo: err }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        let err = a.mul_add(b, -p);
        Dd { hi: p, lo: err }
    }

    pub fn add(self, other: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        Dd::quick_two_sum(s.hi, lo)
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    pub fn mul(self, other: Dd) -> Dd {
        let p = Dd::two_prod(self.hi, other.hi);
        let lo = p.lo + self.hi * other.lo + self.lo * other.hi;
        Dd::quick_two_sum(p.hi, lo)
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from(q1)));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul(Dd::from(q2)));
        let q3 = r2.hi / other.hi;
        Dd::quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    pub fn sqrt(self) -> Option<Dd> {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            return None;
        }
        if self.hi == 0.0 {
            return Some(Dd::from(0.0));
        }
        // One dd Newton step from the f64 estimate.
        let s = Dd::from(self.hi.sqrt());
        Some(s.add(self.div(s)).mul(Dd::from(0.5)))
    }
}

/// Cholesky solve of `(A + tau I) x = b` carried out in double-double
/// arithmetic; `None` when the shifted matrix is not positive definite at
/// that precision. `tau` needs only to dominate the f64 rounding of the
/// entries (~ n * 2e-16), so it can sit far below every solver tolerance.
pub(crate) fn cholesky_solve_dd(
    a: &[f64],
    n: usize,
    b: &[f64],
    tau: f64,
) -> Option<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let mut l = vec![Dd::from(0.0); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = Dd::from(a[i * n + j]);
            if i == j {
                s = s.add(Dd::from(tau));
            }
            for k in 0..j {
                s = s.sub(l[i * n + k].mul(l[j * n + k]));
            }
            if i == j {
                if !(s.value() > 0.0) || !s.value().is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt()?;
            } else {
                l[i * n + j] = s.div(l[j * n + j]);
            }
        }
    }
    let mut x: Vec<Dd> = b.iter().map(|&v| Dd::from(v)).collect();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s = s.sub(l[i * n + k].mul(x[k]));
        }
        x[i] = s.div(l[i * n + i]);
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s = s.sub(l[k * n + i].mul(x[k]));
        }
        x[i] = s.div(l[i * n + i]);
    }
    Some(x.into_iter().map(Dd::value).collect())
}

/// Truncated factor `V` with `C ~= V V^T` produced by [`pivoted_cholesky`].
pub(crate) struct LowRankFactor {
    /// Column vectors of `V`, each of length `m`.
    pub cols: Vec<Vec<f64>>,
    /// Residual diagonal after truncation (elementwise >= -tol).
    pub residual_diag: Vec<f64>,
}

impl LowRankFactor {
    pub fn rank(&self) -> usize {
        self.cols.len()
    }
}

/// Diagonal-greedy pivoted Cholesky of an implicitly given symmetric
/// positive semidefinite matrix, for covariance sampling.
///
/// `diag` holds the diagonal of `C`; `column(j, out)` must write the full
/// j-th column of `C` into `out`. Stops when the largest residual
/// diagonal entry drops to `tol`, when `max_rank` columns have been
/// taken, or when the residual stagnates — rounding noise in the entries
/// puts a floor under the residual that carries no covariance content,
/// and pivoting through it one point at a time would cost O(m^2). Pivot
/// ties break toward the lowest index, so the factor is deterministic.
///
/// Returns `Err(j)` if the residual diagonal at pivot `j` turns
/// significantly negative (the matrix is far from positive semidefinite).
pub(crate) fn pivoted_cholesky(
    diag: &[f64],
    mut column: impl FnMut(usize, &mut [f64]),
    tol: f64,
    max_rank: usize,
) -> Result<LowRankFactor, usize> {
    let m = diag.len();
    let mut d = diag.to_vec();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut buf = vec![0.0; m];
    let initial_max = diag.iter().cloned().fold(0.0f64, f64::max);
    const STAGNATION_WINDOW: usize = 16;
    let mut window_best = f64::INFINITY;

    for step in 0..max_rank.min(m) {
        let mut piv = 0;
        let mut best = f64::NEG_INFINITY;
        for (j, &v) in d.iter().enumerate() {
            if v > best {
                best = v;
                piv = j;
            }
        }
        if best <= tol {
            if best < -tol.max(1e-300) * 1e3 {
                return Err(piv);
            }
            break;
        }
        if step % STAGNATION_WINDOW == 0 {
            // A residual that has dropped far below the diagonal scale but
            // stopped shrinking is rounding noise, not covariance.
            if best > 0.33 * window_best && best <= 1e-3 * initial_max {
                break;
            }
            window_best = best;
        }
        column(piv, &mut buf);
        for c in &cols {
            let w = c[piv];
            if w != 0.0 {
                for (b, &ci) in buf.iter_mut().zip(c.iter()) {
                    *b -= w * ci;
                }
            }
        }
        let root = best.sqrt();
        let mut new_col = vec![0.0; m];
        for i in 0..m {
            let v = buf[i] / root;
            new_col[i] = v;
            d[i] -= v * v;
        }
        // The pivot row is eliminated exactly.
        new_col[piv] = root;
        d[piv] = 0.0;
        cols.push(new_col);
    }
    Ok(LowRankFactor {
        cols,
        residual_diag: d,
    })
}
