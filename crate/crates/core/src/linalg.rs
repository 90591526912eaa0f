//! Exact linear algebra over Q and fraction-free elimination over Z.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<Q>], cols: usize) -> Self {
        let mut m = QMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, x) in r.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn from_int_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = QMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                m[(i, j)] = q(x);
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Reduced row echelon form in place, pivoting only in the first
    /// `pivot_cols` columns. Returns the pivot columns.
    pub fn rref_limited(&mut self, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else { continue };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let x = &self[(r, j)] * &inv;
                self[(r, j)] = x;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if self[(r, j)].is_zero() {
                        continue;
                    }
                    let x = &self[(i, j)] - &f * &self[(r, j)];
                    self[(i, j)] = x;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&mut self) -> Vec<usize> {
        let c = self.cols;
        self.rref_limited(c)
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Q::zero(); self.cols];
                v[fc] = Q::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m[(r, fc)].clone();
                }
                v
            })
            .collect()
    }

    /// Basis of the left kernel {y : yᵀ M = 0}.
    pub fn left_kernel(&self) -> Vec<Vec<Q>> {
        self.transpose().kernel()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if !other[(k, j)].is_zero() {
                        let x = &out[(i, j)] + a * &other[(k, j)];
                        out[(i, j)] = x;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(Q::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// Solves M x = b.
    pub fn solve(&self, b: &[Q]) -> LinearSolution {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref_limited(self.cols);
        if (pivots.len()..self.rows).any(|i| !aug[(i, self.cols)].is_zero()) {
            return LinearSolution::Inconsistent;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        if pivots.len() == self.cols {
            LinearSolution::Unique(x)
        } else {
            LinearSolution::Affine { particular: x, kernel: self.kernel() }
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution {
    Inconsistent,
    Unique(Vec<Q>),
    Affine { particular: Vec<Q>, kernel: Vec<Vec<Q>> },
}

/// Integer ring operations used by fraction-free elimination.
pub trait ExactInt: Clone + std::fmt::Debug {
    fn from_i64(x: i64) -> Self;
    fn is_nil(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn neg(&self) -> Self;
    /// a·b − c·d, or None on overflow.
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self>;
    /// Exact quotient, or None if it does not divide.
    fn div_exact(&self, d: &Self) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;
    /// self + a·x, or None on overflow.
    fn add_mul(&self, a: &Self, x: &Self) -> Option<Self>;
    fn as_i64(&self) -> Option<i64>;
}

impl ExactInt for i128 {
    fn from_i64(x: i64) -> Self {
        x as i128
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        a.checked_mul(*b)?.checked_sub(c.checked_mul(*d)?)
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        if let (Ok(a), Ok(b)) = (i64::try_from(*self), i64::try_from(*d)) {
            if let (Some(0), Some(q)) = (a.checked_rem(b), a.checked_div(b)) {
                return Some(q as i128);
            }
        }
        (self % d == 0).then(|| self / d)
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn add_mul(&self, a: &Self, x: &Self) -> Option<Self> {
        self.checked_add(a.checked_mul(*x)?)
    }
    fn as_i64(&self) -> Option<i64> {
        i64::try_from(*self).ok()
    }
}

impl ExactInt for BigInt {
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        Some(a * b - c * d)
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn add_mul(&self, a: &Self, x: &Self) -> Option<Self> {
        Some(self + a * x)
    }
    fn as_i64(&self) -> Option<i64> {
        ToPrimitive::to_i64(self)
    }
}

/// Result of fraction-free Gauss–Jordan elimination on `[A | B]`.
///
/// Pivot rows satisfy `det · x[pivot_col] + Σ_free a·x[free] = B-row · rhs`
/// and rows past the rank give consistency conditions `B-row · rhs = 0`.
#[derive(Clone, Debug)]
pub struct FfElimination<T> {
    pub rows: Vec<Vec<T>>,
    pub pivot_cols: Vec<usize>,
    /// Common pivot value, made positive.
    pub det: T,
    pub coef_cols: usize,
}

/// Fraction-free Gauss–Jordan on the augmented integer matrix. Pivots are
/// searched only in the first `coef_cols` columns. Returns None on overflow.
pub fn ff_gauss_jordan<T: ExactInt>(mut rows: Vec<Vec<T>>, coef_cols: usize) -> Option<FfElimination<T>> {
    let nrows = rows.len();
    let width = rows.first().map_or(0, |r| r.len());
    let mut prev = T::from_i64(1);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..coef_cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_nil()) else { continue };
        rows.swap(r, p);
        let piv = rows[r][c].clone();
        for i in 0..nrows {
            if i == r {
                continue;
            }
            let a = rows[i][c].clone();
            let a_nil = a.is_nil();
            for j in 0..width {
                if rows[i][j].is_nil() && (a_nil || rows[r][j].is_nil()) {
                    continue;
                }
                let x = T::cross(&piv, &rows[i][j], &a, &rows[r][j])?;
                rows[i][j] = x.div_exact(&prev)?;
            }
        }
        prev = piv;
        pivot_cols.push(c);
        r += 1;
    }
    // Earlier pivot rows were scaled at each later step; all pivots now equal prev.
    let mut det = prev;
    if det.is_neg() {
        for row in rows.iter_mut().take(r) {
            for x in row.iter_mut() {
                *x = x.neg();
            }
        }
        det = det.neg();
    }
    Some(FfElimination { rows, pivot_cols, det, coef_cols })
}

/// Runs [`ff_gauss_jordan`] in i128 and retries with big integers on overflow.
pub fn ff_gauss_jordan_auto(rows: &[Vec<i64>], coef_cols: usize) -> FfResult {
    let small: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    if let Some(e) = ff_gauss_jordan(small, coef_cols) {
        return FfResult::Small(e);
    }
    let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    FfResult::Big(ff_gauss_jordan(big, coef_cols).expect("big integer elimination is exact"))
}

#[derive(Clone, Debug)]
pub enum FfResult {
    Small(FfElimination<i128>),
    Big(FfElimination<BigInt>),
}

impl FfResult {
    pub fn rank(&self) -> usize {
        match self {
            FfResult::Small(e) => e.pivot_cols.len(),
            FfResult::Big(e) => e.pivot_cols.len(),
        }
    }
}

/// Rank of an integer matrix.
pub fn int_rank(rows: &[Vec<i64>], cols: usize) -> usize {
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    ff_gauss_jordan_auto(rows, cols).rank()
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
pub fn primitive_integer_vector(v: &[Q]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map_or(false, |x| x.is_negative());
    ints.into_iter()
        .map(|x| {
            let y = x / &g;
            if sign {
                -y
            } else {
                y
            }
        })
        .collect()
}

/// i64 view of a big integer, if it fits.
pub fn small(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_kernel() {
        let m = QMatrix::from_int_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]], 3);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        let z = m.mul_vec(&k[0]);
        assert!(z.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn solve_cases() {
        let m = QMatrix::from_int_rows(&[vec![1, 1], vec![1, -1]], 2);
        match m.solve(&[q(3), q(1)]) {
            LinearSolution::Unique(x) => assert_eq!(x, vec![q(2), q(1)]),
            other => panic!("{other:?}"),
        }
        let m = QMatrix::from_int_rows(&[vec![1, 1], vec![2, 2]], 2);
        assert_eq!(m.solve(&[q(1), q(3)]), LinearSolution::Inconsistent);
        assert!(matches!(m.solve(&[q(1), q(2)]), LinearSolution::Affine { .. }));
    }

    #[test]
    fn fraction_free_matches_rational() {
        let a = vec![vec![2, 1, -1, 1, 0, 0], vec![-3, -1, 2, 0, 1, 0], vec![-2, 1, 2, 0, 0, 1]];
        let FfResult::Small(e) = ff_gauss_jordan_auto(&a, 3) else { panic!() };
        assert_eq!(e.pivot_cols, vec![0, 1, 2]);
        // det of the coefficient block is −1; normalized positive.
        assert_eq!(e.det, 1);
        let inv = QMatrix::from_int_rows(&[vec![2, 1, -1], vec![-3, -1, 2], vec![-2, 1, 2]], 3);
        for (i, row) in e.rows.iter().enumerate() {
            assert_eq!(row[i], e.det);
            let x: Vec<Q> = row[3..].iter().map(|&v| Q::new(BigInt::from(v), BigInt::from(e.det))).collect();
            // Row i of the inverse satisfies inv_row · A = e_i.
            let prod = inv.transpose().mul_vec(&x);
            for (j, p) in prod.iter().enumerate() {
                assert_eq!(*p, if i == j { q(1) } else { q(0) });
            }
        }
    }

    #[test]
    fn primitive_vector_normalization() {
        let v = vec![Q::new(BigInt::from(-1), BigInt::from(2)), q(0), Q::new(BigInt::from(3), BigInt::from(4))];
        let p = primitive_integer_vector(&v);
        assert_eq!(p, vec![BigInt::from(2), BigInt::from(0), BigInt::from(-3)]);
    }
}
