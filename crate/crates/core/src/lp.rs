//! Exact two-phase simplex, used to test strict feasibility of polyhedra.

use crate::linalg::{QMatrix, Q};
use num_traits::{One, Signed, Zero};

struct Tableau {
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        &self.t[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x = &*x - &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes obj·z over allowed columns with Bland's rule. Returns
    /// false if unbounded.
    fn optimize(&mut self, obj: &[Q], allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut rc = obj[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !obj[b].is_zero() && !self.t[i][j].is_zero() {
                        rc -= &obj[b] * &self.t[i][j];
                    }
                }
                rc.is_positive()
            });
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.t.len() {
                if !self.t[i][c].is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / &self.t[i][c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, c);
        }
    }

    fn value(&self, obj: &[Q]) -> Q {
        self.basis.iter().enumerate().fold(Q::zero(), |acc, (i, &b)| acc + &obj[b] * self.rhs(i))
    }
}

/// Outcome of maximizing a bounded linear objective over {A z = b, z ≥ 0}.
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Q, z: Vec<Q> },
}

/// Maximizes c·z subject to A z = b, z ≥ 0.
pub fn simplex(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let cols = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        let mut row: Vec<Q> = a[i].iter().map(|x| if neg { -x } else { x.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
        row.push(if neg { -&b[i] } else { b[i].clone() });
        t.push(row);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), cols };
    let mut phase1 = vec![Q::zero(); cols];
    for x in phase1.iter_mut().skip(n) {
        *x = -Q::one();
    }
    tab.optimize(&phase1, &vec![true; cols]);
    if tab.value(&phase1).is_negative() {
        return LpOutcome::Infeasible;
    }
    // Drive artificials out of the basis, dropping redundant rows.
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut obj = c.to_vec();
    obj.extend((0..m).map(|_| Q::zero()));
    let allowed: Vec<bool> = (0..cols).map(|j| j < n).collect();
    if !tab.optimize(&obj, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut z = vec![Q::zero(); n];
    for (i, &bcol) in tab.basis.iter().enumerate() {
        if bcol < n {
            z[bcol] = tab.rhs(i).clone();
        }
    }
    LpOutcome::Optimal { value: tab.value(&obj), z }
}

/// Feasibility of {x : E x = e, G x ≥ 0} with its best uniform slack.
#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Empty,
    /// Feasible only with some inequality tight.
    Closed(Vec<Q>),
    /// A point with every inequality strict.
    Strict(Vec<Q>),
}

impl Feasibility {
    pub fn point(&self) -> Option<&[Q]> {
        match self {
            Feasibility::Empty => None,
            Feasibility::Closed(x) | Feasibility::Strict(x) => Some(x),
        }
    }
}

/// Maximizes s subject to E x = e, G x ≥ s, 0 ≤ s ≤ 1, x free.
pub fn polyhedron_feasibility(eq: &QMatrix, e: &[Q], ineq: &QMatrix) -> Feasibility {
    let k = eq.cols.max(ineq.cols);
    let mrows = ineq.rows;
    // Columns: x⁺ (k), x⁻ (k), s, w (mrows), r.
    let n = 2 * k + 1 + mrows + 1;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..eq.rows {
        let mut row = vec![Q::zero(); n];
        for j in 0..eq.cols {
            row[j] = eq[(i, j)].clone();
            row[k + j] = -eq[(i, j)].clone();
        }
        a.push(row);
        b.push(e[i].clone());
    }
    for i in 0..mrows {
        let mut row = vec![Q::zero(); n];
        for j in 0..ineq.cols {
            row[j] = ineq[(i, j)].clone();
            row[k + j] = -ineq[(i, j)].clone();
        }
        row[2 * k] = -Q::one();
        row[2 * k + 1 + i] = -Q::one();
        a.push(row);
        b.push(Q::zero());
    }
    let mut row = vec![Q::zero(); n];
    row[2 * k] = Q::one();
    row[n - 1] = Q::one();
    a.push(row);
    b.push(Q::one());
    let mut c = vec![Q::zero(); n];
    c[2 * k] = Q::one();
    match simplex(&a, &b, &c) {
        LpOutcome::Infeasible => Feasibility::Empty,
        LpOutcome::Unbounded => unreachable!("slack is bounded by one"),
        LpOutcome::Optimal { value, z } => {
            let x: Vec<Q> = (0..k).map(|j| &z[j] - &z[k + j]).collect();
            if value.is_positive() {
                Feasibility::Strict(x)
            } else {
                Feasibility::Closed(x)
            }
        }
    }
}

/// Convenience for integer inequality rows.
pub fn int_matrix(rows: &[Vec<i64>], cols: usize) -> QMatrix {
    QMatrix::from_int_rows(rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn simplex_small_problem() {
        // max x + y with x + 2y + s1 = 4, 3x + y + s2 = 6.
        let a = vec![
            vec![q(1), q(2), q(1), q(0)],
            vec![q(3), q(1), q(0), q(1)],
        ];
        let r = simplex(&a, &[q(4), q(6)], &[q(1), q(1), q(0), q(0)]);
        let LpOutcome::Optimal { value, .. } = r else { panic!("{r:?}") };
        assert_eq!(value, Q::new(14.into(), 5.into()));
    }

    #[test]
    fn open_interval_feasibility() {
        let none = QMatrix::zeros(0, 1);
        // x ≥ 0 and −x ≥ 0 force x = 0.
        let g = int_matrix(&[vec![1], vec![-1]], 1);
        let shifted = |c: i64| {
            // x ≥ 0 and c − x ≥ 0, with the constant carried by a pinned coordinate.
            let eq = int_matrix(&[vec![0, 1]], 2);
            let ineq = int_matrix(&[vec![1, 0], vec![-1, c]], 2);
            polyhedron_feasibility(&eq, &[q(1)], &ineq)
        };
        assert!(matches!(polyhedron_feasibility(&none, &[], &g), Feasibility::Closed(_)));
        assert!(matches!(shifted(1), Feasibility::Strict(_)));
        assert!(matches!(shifted(0), Feasibility::Closed(_)));
        assert_eq!(shifted(-1), Feasibility::Empty);
    }
}
