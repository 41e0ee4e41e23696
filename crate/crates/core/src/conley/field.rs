//! Arithmetic in the five-element field.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar mod 5, canonical representative in `0..5`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Z5(u8);

impl Z5 {
    pub const ZERO: Z5 = Z5(0);
    pub const ONE: Z5 = Z5(1);

    pub fn new(v: i64) -> Z5 {
        Z5(v.rem_euclid(5) as u8)
    }

    pub fn raw(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self) -> Z5 {
        const INV: [u8; 5] = [0, 1, 3, 2, 4];
        assert!(self.0 != 0, "division by zero in Z5");
        Z5(INV[self.0 as usize])
    }

    /// Representative lifted to `{-2,...,2}`, matching the signed notation
    /// used in printed polynomials and matrices.
    pub fn lifted(self) -> i8 {
        if self.0 <= 2 {
            self.0 as i8
        } else {
            self.0 as i8 - 5
        }
    }
}

impl Add for Z5 {
    type Output = Z5;
    fn add(self, rhs: Z5) -> Z5 {
        Z5((self.0 + rhs.0) % 5)
    }
}

impl AddAssign for Z5 {
    fn add_assign(&mut self, rhs: Z5) {
        *self = *self + rhs;
    }
}

impl Sub for Z5 {
    type Output = Z5;
    fn sub(self, rhs: Z5) -> Z5 {
        Z5((5 + self.0 - rhs.0) % 5)
    }
}

impl SubAssign for Z5 {
    fn sub_assign(&mut self, rhs: Z5) {
        *self = *self - rhs;
    }
}

impl Mul for Z5 {
    type Output = Z5;
    fn mul(self, rhs: Z5) -> Z5 {
        Z5((self.0 * rhs.0) % 5)
    }
}

impl MulAssign for Z5 {
    fn mul_assign(&mut self, rhs: Z5) {
        *self = *self * rhs;
    }
}

impl Neg for Z5 {
    type Output = Z5;
    fn neg(self) -> Z5 {
        Z5::ZERO - self
    }
}

impl fmt::Debug for Z5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lifted())
    }
}

impl fmt::Display for Z5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lifted())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> impl Iterator<Item = Z5> {
        (0..5).map(|v| Z5::new(v))
    }

    #[test]
    fn field_axioms_exhaustive() {
        for a in all() {
            assert_eq!(a + Z5::ZERO, a);
            assert_eq!(a * Z5::ONE, a);
            assert_eq!(a + (-a), Z5::ZERO);
            if !a.is_zero() {
                assert_eq!(a * a.inv(), Z5::ONE);
            }
            for b in all() {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                assert_eq!(a - b, a + (-b));
                for c in all() {
                    assert_eq!((a + b) + c, a + (b + c));
                    assert_eq!((a * b) * c, a * (b * c));
                    assert_eq!(a * (b + c), a * b + a * c);
                }
            }
        }
    }

    #[test]
    fn lifted_representatives() {
        let lifted: Vec<i8> = (0..5).map(|v| Z5::new(v).lifted()).collect();
        assert_eq!(lifted, vec![0, 1, 2, -2, -1]);
        assert_eq!(Z5::new(4), Z5::new(-1));
        assert_eq!(Z5::new(-7), Z5::new(3));
    }
}
