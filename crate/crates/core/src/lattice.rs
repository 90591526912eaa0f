//! Integer vectors in the plane lattice.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A vector in Z².
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct LatticeVector {
    pub x: i64,
    pub y: i64,
}

impl LatticeVector {
    pub const ZERO: LatticeVector = LatticeVector { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        LatticeVector { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// det(self, other).
    pub fn det(self, other: LatticeVector) -> i64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: LatticeVector) -> i64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_parallel(self, other: LatticeVector) -> bool {
        self.det(other) == 0
    }

    /// gcd(|x|, |y|); zero for the zero vector.
    pub fn content(self) -> u64 {
        self.x.unsigned_abs().gcd(&self.y.unsigned_abs())
    }

    pub fn is_primitive(self) -> bool {
        self.content() == 1
    }

    /// Splits a nonzero vector into its primitive direction and its content.
    pub fn factor(self) -> Option<(LatticeVector, u64)> {
        let c = self.content();
        if c == 0 {
            return None;
        }
        let ci = c as i64;
        Some((LatticeVector::new(self.x / ci, self.y / ci), c))
    }

    pub fn norm_inf(self) -> u64 {
        self.x.unsigned_abs().max(self.y.unsigned_abs())
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: LatticeVector) -> LatticeVector {
        LatticeVector::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: LatticeVector) -> LatticeVector {
        LatticeVector::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector::new(-self.x, -self.y)
    }
}

impl Mul<LatticeVector> for i64 {
    type Output = LatticeVector;
    fn mul(self, v: LatticeVector) -> LatticeVector {
        LatticeVector::new(self * v.x, self * v.y)
    }
}

impl std::iter::Sum for LatticeVector {
    fn sum<I: Iterator<Item = LatticeVector>>(iter: I) -> LatticeVector {
        iter.fold(LatticeVector::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// True if the vectors are not all collinear.
pub fn spans_plane(vs: &[LatticeVector]) -> bool {
    vs.iter()
        .enumerate()
        .any(|(i, a)| vs[i + 1..].iter().any(|b| a.det(*b) != 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_splits_weight() {
        let (u, w) = LatticeVector::new(2, 2).factor().unwrap();
        assert_eq!(u, LatticeVector::new(1, 1));
        assert_eq!(w, 2);
        assert!(LatticeVector::ZERO.factor().is_none());
        assert_eq!(LatticeVector::new(0, -3).factor().unwrap(), (LatticeVector::new(0, -1), 3));
    }

    #[test]
    fn span_detection() {
        let a = LatticeVector::new(1, 0);
        let b = LatticeVector::new(-2, 0);
        assert!(!spans_plane(&[a, b, a]));
        assert!(spans_plane(&[a, b, LatticeVector::new(0, 1)]));
    }
}
