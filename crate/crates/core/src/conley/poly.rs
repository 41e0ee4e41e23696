//! Polynomials over Z5, printed in the signed monomial style
//! (`x^2 - 1`, `x - 1`, `0` for the trivial marker).

use super::field::Z5;
use std::fmt;

/// Dense polynomial, little-endian coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Z5>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Z5::ONE)
    }

    pub fn constant(c: Z5) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// `x`
    pub fn x() -> Poly {
        Poly::from_coeffs(vec![Z5::ZERO, Z5::ONE])
    }

    /// Little-endian constructor; trailing zeros are trimmed.
    pub fn from_coeffs(mut coeffs: Vec<Z5>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// `x^t + c`
    pub fn power_plus_const(t: usize, c: Z5) -> Poly {
        let mut coeffs = vec![Z5::ZERO; t + 1];
        coeffs[0] = c;
        coeffs[t] = Z5::ONE;
        Poly::from_coeffs(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree of the zero polynomial is reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Z5 {
        self.coeffs.get(i).copied().unwrap_or(Z5::ZERO)
    }

    pub fn leading(&self) -> Z5 {
        self.coeffs.last().copied().unwrap_or(Z5::ZERO)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Z5::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, c: Z5) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Euclidean division; panics when dividing by zero.
    pub fn divmod(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        if self.degree() < divisor.degree() || self.is_zero() {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead_inv = divisor.leading().inv();
        let mut quo = vec![Z5::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let q = c * lead_inv;
            quo[i - dd] = q;
            for j in 0..=dd {
                let t = divisor.coeff(j) * q;
                rem[i - dd + j] -= t;
            }
        }
        (Poly::from_coeffs(quo), Poly::from_coeffs(rem))
    }

    pub fn divides(&self, other: &Poly) -> bool {
        if other.is_zero() {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        other.divmod(self).1.is_zero()
    }

    pub fn make_monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(self.leading().inv())
    }

    /// Matches `x^T + c` with `c = +-1`; returns `(T, lifted c)`.
    pub fn as_power_form(&self) -> Option<(usize, i8)> {
        if self.is_zero() || self.is_constant() {
            return None;
        }
        let t = self.degree();
        if self.leading() != Z5::ONE {
            return None;
        }
        let c = self.coeff(0).lifted();
        if c != 1 && c != -1 {
            return None;
        }
        for i in 1..t {
            if !self.coeff(i).is_zero() {
                return None;
            }
        }
        Some((t, c))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..=self.degree()).rev() {
            let c = self.coeff(i).lifted();
            if c == 0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (i, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "x")?,
                (1, m) => write!(f, "{m}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                (_, m) => write!(f, "{m}x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
