//! Dense exact matrices: rational Gauss elimination (rank, inverse,
//! nullspace, solve) and integer Smith normal form with transforms.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Int, Rat};

/// Row-major dense rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RatMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rat>,
}

impl RatMat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![Rat::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row.iter().cloned());
        }
        Self::new(r, c, data)
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// row_i -= c * row_j
    pub fn row_sub(&mut self, i: usize, c: &Rat, j: usize) {
        for k in 0..self.cols {
            let v = self.at(j, k).clone() * c;
            *self.at_mut(i, k) -= v;
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &Rat) {
        for k in 0..self.cols {
            *self.at_mut(i, k) *= c;
        }
    }

    /// In-place row echelon reduction; returns pivot columns.
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.at(r, c).clone().recip();
            self.scale_row(r, &inv);
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    self.row_sub(i, &f, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelon().len()
    }

    /// Basis of the right nullspace, reduced echelon convention
    /// (free variable set to one, pivot variables solved).
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.echelon();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.at(row, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One exact solution of `self * x = rhs` (free variables zero), if consistent.
    #[allow(dead_code)]
    pub fn solve(&self, rhs: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = RatMat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = rhs[i].clone();
        }
        let pivots = aug.echelon();
        if pivots.last() == Some(&self.cols) {
            return None; // pivot in the rhs column: inconsistent
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = RatMat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n + i) = Rat::one();
        }
        let pivots = aug.echelon();
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut inv = RatMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                *inv.at_mut(i, j) = aug.at(i, n + j).clone();
            }
        }
        Some(inv)
    }

    #[allow(dead_code)]
    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rat::zero();
                for k in 0..self.cols {
                    acc += self.at(i, k).clone() * other.at(k, j);
                }
                *out.at_mut(i, j) = acc;
            }
        }
        out
    }
}

/// Determinant of a square integer matrix (fraction-free Bareiss).
pub(crate) fn int_det(m: &[Vec<Int>]) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    let mut a: Vec<Vec<Int>> = m.to_vec();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Int::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Smith normal form `left * a * right = diag(divisors)` with unimodular
/// transforms; `divisors` is the full min(m,n) diagonal including zeros,
/// nonnegative, each dividing the next.
#[derive(Debug, Clone)]
pub(crate) struct Snf {
    pub divisors: Vec<Int>,
    #[allow(dead_code)]
    pub left: Vec<Vec<Int>>,
    pub right: Vec<Vec<Int>>,
}

pub(crate) fn smith_normal_form(a: &[Vec<Int>]) -> Snf {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut w: Vec<Vec<Int>> = a.to_vec();
    let mut left = int_identity(m);
    let mut right = int_identity(n);

    let steps = m.min(n);
    for t in 0..steps {
        'pivot: loop {
            // smallest nonzero entry of the trailing block to (t, t)
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !w[i][j].is_zero()
                        && best
                            .map(|(bi, bj)| w[i][j].abs() < w[bi][bj].abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break 'pivot; // trailing block zero
            };
            if bi != t {
                w.swap(bi, t);
                left.swap(bi, t);
            }
            if bj != t {
                for row in w.iter_mut() {
                    row.swap(bj, t);
                }
                col_swap(&mut right, bj, t);
            }
            let mut dirty = false;
            for i in t + 1..m {
                if !w[i][t].is_zero() {
                    let q = rounded_div(&w[i][t], &w[t][t]);
                    if !q.is_zero() {
                        for j in 0..n {
                            let sub = &q * &w[t][j];
                            w[i][j] -= sub;
                        }
                        for j in 0..m {
                            let sub = &q * &left[t][j];
                            left[i][j] -= sub;
                        }
                    }
                    if !w[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !w[t][j].is_zero() {
                    let q = rounded_div(&w[t][j], &w[t][t]);
                    if !q.is_zero() {
                        for row in w.iter_mut() {
                            let sub = &q * &row[t];
                            row[j] -= sub;
                        }
                        col_sub(&mut right, j, &q, t);
                    }
                    if !w[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }
            // divisibility fix-up for the invariant-factor chain
            let mut fixed = true;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !(&w[i][j] % &w[t][t]).is_zero() {
                        for k in 0..n {
                            let add = w[i][k].clone();
                            w[t][k] += add;
                        }
                        for k in 0..m {
                            let add = left[i][k].clone();
                            left[t][k] += add;
                        }
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break 'pivot;
            }
        }
        if w[t][t].is_negative() {
            for j in 0..n {
                w[t][j] = -w[t][j].clone();
            }
            for j in 0..m {
                left[t][j] = -left[t][j].clone();
            }
        }
    }
    let divisors = (0..steps).map(|t| w[t][t].clone()).collect();
    Snf {
        divisors,
        left,
        right,
    }
}

fn int_identity(n: usize) -> Vec<Vec<Int>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect()
}

fn col_swap(m: &mut [Vec<Int>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// col_j -= q * col_t
fn col_sub(m: &mut [Vec<Int>], j: usize, q: &Int, t: usize) {
    for row in m.iter_mut() {
        let sub = q * &row[t];
        row[j] -= sub;
    }
}

/// Division rounded to nearest (ties toward zero), so remainders shrink.
fn rounded_div(a: &Int, b: &Int) -> Int {
    let (q, r) = a.div_rem(b);
    let two_r = Int::from(2) * r.abs();
    if two_r > b.abs() {
        if (a.is_negative()) ^ (b.is_negative()) {
            q - Int::one()
        } else {
            q + Int::one()
        }
    } else {
        q
    }
}
