//! Exact linear algebra: rational Gaussian elimination and integer Hermite
//! normal form. No floating point; entries are arbitrary-precision.

use crate::rat::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major matrix over ℚ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_columns(cols: &[Vec<Rat>]) -> Self {
        let nc = cols.len();
        let nr = if nc == 0 { 0 } else { cols[0].len() };
        let mut m = QMat::zero(nr, nc);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nr);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if !other[(k, j)].is_zero() {
                        let t = &self[(i, k)] * &other[(k, j)];
                        out[(i, j)] += t;
                    }
                }
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let factor = self[(i, c)].clone();
                    for j in c..self.cols {
                        let t = &self[(r, j)] * &factor;
                        self[(i, j)] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let ai = a * self.cols + j;
            let bi = b * self.cols + j;
            self.data.swap(ai, bi);
        }
    }

    /// Exact inverse, or `None` when singular.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(k, &c)| c != k) {
            return None;
        }
        let mut inv = QMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Solves `self * x = rhs` exactly; `None` when inconsistent. When the
    /// solution space is positive-dimensional an arbitrary solution (free
    /// variables set to zero) is returned.
    pub fn solve(&self, rhs: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = QMat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = rhs[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// The result is the canonical basis: pivots positive and strictly to the
/// right going down, entries above each pivot reduced into `[0, pivot)`,
/// zero rows dropped.
pub fn row_hnf(mut rows: Vec<Vec<Int>>) -> Vec<Vec<Int>> {
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    if rows.is_empty() {
        return rows;
    }
    let ncols = rows[0].len();
    let mut top = 0;
    for col in 0..ncols {
        loop {
            let mut idx: Option<usize> = None;
            for i in top..rows.len() {
                if !rows[i][col].is_zero()
                    && idx.map_or(true, |best| rows[i][col].abs() < rows[best][col].abs())
                {
                    idx = Some(i);
                }
            }
            let Some(p) = idx else { break };
            rows.swap(top, p);
            let mut others = false;
            for i in top + 1..rows.len() {
                if !rows[i][col].is_zero() {
                    let q = rows[i][col].div_floor(&rows[top][col]);
                    if !q.is_zero() {
                        for j in 0..ncols {
                            let t = &q * &rows[top][j];
                            rows[i][j] -= t;
                        }
                    }
                    if !rows[i][col].is_zero() {
                        others = true;
                    }
                }
            }
            if !others {
                if rows[top][col].is_negative() {
                    for v in rows[top].iter_mut() {
                        *v = -v.clone();
                    }
                }
                // reduce entries above the pivot
                for i in 0..top {
                    if !rows[i][col].is_zero() {
                        let q = rows[i][col].div_floor(&rows[top][col]);
                        if !q.is_zero() {
                            for j in 0..ncols {
                                let t = &q * &rows[top][j];
                                rows[i][j] -= t;
                            }
                        }
                    }
                }
                top += 1;
                break;
            }
        }
        if top == rows.len() {
            break;
        }
    }
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    rows
}

/// Tests whether `v` lies in the ℤ-span of HNF basis rows.
pub fn hnf_contains(hnf: &[Vec<Int>], v: &[Int]) -> bool {
    let mut v = v.to_vec();
    for row in hnf {
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if !v[p].is_zero() {
            let (q, r) = v[p].div_rem(&row[p]);
            if !r.is_zero() {
                return false;
            }
            for j in 0..v.len() {
                let t = &q * &row[j];
                v[j] -= t;
            }
        }
    }
    v.iter().all(|x| x.is_zero())
}

/// Integer coordinates of `v` in the HNF basis, when it lies in the span.
pub fn hnf_coordinates(hnf: &[Vec<Int>], v: &[Int]) -> Option<Vec<Int>> {
    let mut v = v.to_vec();
    let mut coords = Vec::with_capacity(hnf.len());
    for row in hnf {
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            coords.push(Int::zero());
            continue;
        };
        if v[p].is_zero() {
            coords.push(Int::zero());
            continue;
        }
        let (q, r) = v[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        for j in 0..v.len() {
            let t = &q * &row[j];
            v[j] -= t;
        }
        coords.push(q);
    }
    if v.iter().all(|x| x.is_zero()) {
        Some(coords)
    } else {
        None
    }
}

/// Basis of the right integer kernel `{x ∈ ℤ^c : mat · x = 0}`.
pub fn integer_kernel(mat: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    // Column-reduce [mat; I] and read kernel vectors off the identity block.
    let mut a: Vec<Vec<Int>> = mat.to_vec();
    let mut u: Vec<Vec<Int>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let col_swap = |a: &mut Vec<Vec<Int>>, u: &mut Vec<Vec<Int>>, x: usize, y: usize| {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
        for row in u.iter_mut() {
            row.swap(x, y);
        }
    };
    let col_addmul = |a: &mut Vec<Vec<Int>>, u: &mut Vec<Vec<Int>>, dst: usize, src: usize, q: &Int| {
        for row in a.iter_mut() {
            let t = q * &row[src];
            row[dst] -= t;
        }
        for row in u.iter_mut() {
            let t = q * &row[src];
            row[dst] -= t;
        }
    };
    let mut lead = 0usize;
    for r in 0..rows {
        if lead == cols {
            break;
        }
        loop {
            let mut idx: Option<usize> = None;
            for j in lead..cols {
                if !a[r][j].is_zero()
                    && idx.map_or(true, |best| a[r][j].abs() < a[r][best].abs())
                {
                    idx = Some(j);
                }
            }
            let Some(p) = idx else { break };
            col_swap(&mut a, &mut u, lead, p);
            let mut nonzero_left = false;
            for j in lead + 1..cols {
                if !a[r][j].is_zero() {
                    let q = a[r][j].div_floor(&a[r][lead]);
                    if !q.is_zero() {
                        col_addmul(&mut a, &mut u, j, lead, &q);
                    }
                    if !a[r][j].is_zero() {
                        nonzero_left = true;
                    }
                }
            }
            if !nonzero_left {
                lead += 1;
                break;
            }
        }
    }
    (lead..cols)
        .map(|j| (0..cols).map(|i| u[i][j].clone()).collect())
        .filter(|col: &Vec<Int>| col.iter().any(|v| !v.is_zero()))
        .collect()
}
