//! Exact linear algebra over a [`Field`]: dense row reduction (rank, kernel,
//! solve, determinant) and a sparse rank routine for the large, very sparse
//! matrices of the box Čech engine.

use std::collections::HashMap;

use crate::field::Field;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<E>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        Matrix {
            rows: n,
            cols,
            data,
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// In-place reduced row echelon form. Returns the pivot columns.
pub fn rref<F: Field>(f: &F, m: &mut Matrix<F::Elem>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(piv) = (row..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
            continue;
        };
        if piv != row {
            for c in 0..m.cols {
                m.data.swap(piv * m.cols + c, row * m.cols + c);
            }
        }
        let inv = f.inv(m.get(row, col)).unwrap();
        for c in col..m.cols {
            let v = f.mul(m.get(row, c), &inv);
            m.set(row, c, v);
        }
        let pivot_row: Vec<F::Elem> = m.row(row)[col..].to_vec();
        for r in 0..m.rows {
            if r == row {
                continue;
            }
            let factor = m.get(r, col).clone();
            if f.is_zero(&factor) {
                continue;
            }
            for (k, pv) in pivot_row.iter().enumerate() {
                if f.is_zero(pv) {
                    continue;
                }
                let c = col + k;
                let v = f.sub(m.get(r, c), &f.mul(&factor, pv));
                m.set(r, c, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Rank by forward elimination only (cheaper than a full RREF).
pub fn rank<F: Field>(f: &F, m: &Matrix<F::Elem>) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let mut a = m.clone();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(piv) = (row..a.rows).find(|&r| !f.is_zero(a.get(r, col))) else {
            continue;
        };
        if piv != row {
            for c in 0..a.cols {
                a.data.swap(piv * a.cols + c, row * a.cols + c);
            }
        }
        let inv = f.inv(a.get(row, col)).unwrap();
        let pivot_row: Vec<F::Elem> = a.row(row)[col..].to_vec();
        for r in row + 1..a.rows {
            let lead = a.get(r, col).clone();
            if f.is_zero(&lead) {
                continue;
            }
            let factor = f.mul(&lead, &inv);
            for (k, pv) in pivot_row.iter().enumerate() {
                if f.is_zero(pv) {
                    continue;
                }
                let c = col + k;
                let v = f.sub(a.get(r, c), &f.mul(&factor, pv));
                a.set(r, c, v);
            }
        }
        row += 1;
    }
    row
}

/// Basis of the right kernel `{x : m x = 0}`.
pub fn kernel<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let mut a = m.clone();
    let pivots = rref(f, &mut a);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![f.zero(); m.cols];
        v[free] = f.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(a.get(r, free));
        }
        basis.push(v);
    }
    basis
}

/// Outcome of solving `m x = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub enum Solve<E> {
    /// A particular solution plus the dimension of the solution space.
    Solution {
        x: Vec<E>,
        nullity: usize,
    },
    Inconsistent,
}

pub fn solve<F: Field>(f: &F, m: &Matrix<F::Elem>, rhs: &[F::Elem]) -> Solve<F::Elem> {
    assert_eq!(rhs.len(), m.rows);
    let mut aug = Matrix::filled(m.rows, m.cols + 1, f.zero());
    for r in 0..m.rows {
        for c in 0..m.cols {
            aug.set(r, c, m.get(r, c).clone());
        }
        aug.set(r, m.cols, rhs[r].clone());
    }
    let pivots = rref(f, &mut aug);
    if pivots.last() == Some(&m.cols) {
        return Solve::Inconsistent;
    }
    let mut x = vec![f.zero(); m.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.get(r, m.cols).clone();
    }
    Solve::Solution {
        x,
        nullity: m.cols - pivots.len(),
    }
}

pub fn determinant<F: Field>(f: &F, m: &Matrix<F::Elem>) -> F::Elem {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    let mut a = m.clone();
    let mut det = f.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !f.is_zero(a.get(r, col))) else {
            return f.zero();
        };
        if piv != col {
            for c in 0..n {
                a.data.swap(piv * n + c, col * n + c);
            }
            det = f.neg(&det);
        }
        let p = a.get(col, col).clone();
        det = f.mul(&det, &p);
        let inv = f.inv(&p).unwrap();
        for r in col + 1..n {
            let lead = a.get(r, col).clone();
            if f.is_zero(&lead) {
                continue;
            }
            let factor = f.mul(&lead, &inv);
            for c in col..n {
                let v = f.sub(a.get(r, c), &f.mul(&factor, a.get(col, c)));
                a.set(r, c, v);
            }
        }
    }
    det
}

pub fn mat_mul<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.cols, b.rows);
    let mut out = Matrix::filled(a.rows, b.cols, f.zero());
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if f.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let v = f.mul_add(out.get(i, j), x, b.get(k, j));
                out.set(i, j, v);
            }
        }
    }
    out
}

/// Sparse row: `(column, nonzero value)` pairs sorted by column.
pub type SparseRow<E> = Vec<(u32, E)>;

/// Rank of a sparse matrix given by rows. Rows are reduced against pivots
/// keyed by their leading column, shortest rows first to limit fill-in.
pub fn sparse_rank<F: Field>(f: &F, rows: Vec<SparseRow<F::Elem>>) -> usize {
    let mut rows: Vec<SparseRow<F::Elem>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    rows.sort_by_key(|r| r.len());
    let mut pivots: HashMap<u32, SparseRow<F::Elem>> = HashMap::new();
    for mut row in rows {
        loop {
            let Some(&(lead, _)) = row.first() else { break };
            match pivots.get(&lead) {
                None => {
                    let inv = f.inv(&row[0].1).unwrap();
                    for e in row.iter_mut() {
                        e.1 = f.mul(&e.1, &inv);
                    }
                    pivots.insert(lead, row);
                    break;
                }
                Some(p) => {
                    let factor = row[0].1.clone();
                    row = axpy_sparse(f, &row, &factor, p);
                }
            }
        }
    }
    pivots.len()
}

/// `row - factor * pivot`, dropping zeros.
fn axpy_sparse<F: Field>(
    f: &F,
    row: &SparseRow<F::Elem>,
    factor: &F::Elem,
    pivot: &SparseRow<F::Elem>,
) -> SparseRow<F::Elem> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map(|e| e.0).unwrap_or(u32::MAX);
        let cj = pivot.get(j).map(|e| e.0).unwrap_or(u32::MAX);
        if ci < cj {
            out.push(row[i].clone());
            i += 1;
        } else if cj < ci {
            out.push((cj, f.neg(&f.mul(factor, &pivot[j].1))));
            j += 1;
        } else {
            let v = f.sub(&row[i].1, &f.mul(factor, &pivot[j].1));
            if !f.is_zero(&v) {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, RationalField};
    use proptest::prelude::*;

    fn m(f: &PrimeField, rows: &[&[i64]]) -> Matrix<u64> {
        let cols = rows[0].len();
        Matrix::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| f.from_i64(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_kernel_det_small() {
        let f = PrimeField::new(101).unwrap();
        let a = m(&f, &[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&f, &a), 2);
        let ker = kernel(&f, &a);
        assert_eq!(ker.len(), 1);
        for (r, _) in (0..a.rows).enumerate() {
            let s = (0..3).fold(0, |acc, c| f.mul_add(&acc, a.get(r, c), &ker[0][c]));
            assert_eq!(s, 0);
        }
        assert_eq!(determinant(&f, &a), 0);
        let b = m(&f, &[&[2, 1], &[1, 1]]);
        assert_eq!(determinant(&f, &b), 1);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let f = RationalField;
        let a = Matrix::from_rows(
            2,
            vec![
                vec![f.from_i64(1), f.from_i64(1)],
                vec![f.from_i64(2), f.from_i64(2)],
            ],
        );
        assert_eq!(
            solve(&f, &a, &[f.from_i64(1), f.from_i64(3)]),
            Solve::Inconsistent
        );
        match solve(&f, &a, &[f.from_i64(1), f.from_i64(2)]) {
            Solve::Solution { nullity, .. } => assert_eq!(nullity, 1),
            Solve::Inconsistent => panic!("consistent system rejected"),
        }
    }

    proptest! {
        #[test]
        fn sparse_and_dense_rank_agree(entries in proptest::collection::vec(0i64..4, 42)) {
            let f = PrimeField::new(5).unwrap();
            let rows: Vec<Vec<u64>> = entries.chunks(7).map(|c| c.iter().map(|&v| f.from_i64(v)).collect()).collect();
            let dense = Matrix::from_rows(7, rows.clone());
            let sparse: Vec<SparseRow<u64>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|(_, v)| **v != 0).map(|(c, v)| (c as u32, *v)).collect())
                .collect();
            prop_assert_eq!(rank(&f, &dense), sparse_rank(&f, sparse));
        }
    }
}
