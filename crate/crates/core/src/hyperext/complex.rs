//! Bounded complexes of line-bundle sums with maps given by form matrices.

use crate::chow::DivisorClass;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::monad::{form_matrix_mul, FormMatrix, Monad};
use crate::multipoly::MultiForm;

/// `columns[j]` sits in cohomological degree `start + j`; `maps[j]` goes from
/// `columns[j]` to `columns[j + 1]` (rows index the target summands).
#[derive(Clone, Debug, PartialEq)]
pub struct LbComplex<E> {
    pub start: i64,
    pub columns: Vec<Vec<DivisorClass>>,
    pub maps: Vec<FormMatrix<E>>,
}

impl<E: Clone + PartialEq> LbComplex<E> {
    pub fn line_bundle(d: DivisorClass) -> Self {
        LbComplex {
            start: 0,
            columns: vec![vec![d]],
            maps: Vec::new(),
        }
    }

    pub fn twisted(&self, d: DivisorClass) -> Self {
        LbComplex {
            start: self.start,
            columns: self
                .columns
                .iter()
                .map(|c| c.iter().map(|t| *t + d).collect())
                .collect(),
            maps: self.maps.clone(),
        }
    }

    /// `A(D) -> B(D) -> C(D)` in degrees `-1, 0, 1`.
    pub fn from_monad<F: Field<Elem = E>>(m: &Monad<F>, d: DivisorClass) -> Self {
        let [a, b, c] = m.twists();
        LbComplex {
            start: -1,
            columns: vec![a, b, c],
            maps: vec![m.alpha.clone(), m.beta.clone()],
        }
        .twisted(d)
    }

    pub fn end(&self) -> i64 {
        self.start + self.columns.len() as i64 - 1
    }

    pub fn total_rank(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Shapes, entry degrees and `d o d = 0`.
    pub fn check<F: Field<Elem = E>>(&self, f: &F) -> Result<()> {
        if self.maps.len() + 1 != self.columns.len() {
            return Err(Error::Precondition(
                "complex needs one map between consecutive columns".into(),
            ));
        }
        for (j, m) in self.maps.iter().enumerate() {
            m.check_degrees(&self.columns[j + 1], &self.columns[j])?;
        }
        for j in 0..self.maps.len().saturating_sub(1) {
            let sq = form_matrix_mul(
                f,
                &self.maps[j + 1],
                &self.maps[j],
                &self.columns[j + 2],
                &self.columns[j],
            );
            if !sq.is_zero() {
                return Err(Error::Precondition(format!("d o d != 0 at column {}", j)));
            }
        }
        Ok(())
    }

    /// Nonzero entries of `maps[j]` grouped by source summand.
    pub(crate) fn outgoing(&self, j: usize) -> Vec<Vec<(usize, &MultiForm<E>)>> {
        let m = &self.maps[j];
        (0..m.cols)
            .map(|s| {
                (0..m.rows)
                    .filter(|&r| !m.get(r, s).is_zero())
                    .map(|r| (r, m.get(r, s)))
                    .collect()
            })
            .collect()
    }
}

/// `Hom(M, M)` for a monad `M = (A -> B -> C)`: a complex in degrees `-2..2`
/// whose hypercohomology is `Ext(E, E)`. The degree-`n` term is
/// `sum_j Hom(M^j, M^(j+n))` (source column `j` descending), each block
/// ordered by (target summand, source summand), with differential
/// `d(f) = d_M f - (-1)^n f d_M`.
pub fn hom_complex<F: Field>(m: &Monad<F>) -> LbComplex<F::Elem> {
    let f = &m.field;
    let cols = m.twists();
    let lens = [cols[0].len(), cols[1].len(), cols[2].len()];
    let maps = [&m.alpha, &m.beta];
    // blocks[n + 2] = list of (source column j, target column j + n).
    let blocks: Vec<Vec<(usize, usize)>> = (-2i64..=2)
        .map(|n| {
            (0..3i64)
                .rev()
                .filter(|&j| (0..3).contains(&(j + n)))
                .map(|j| (j as usize, (j + n) as usize))
                .collect()
        })
        .collect();
    // Summand list per degree: (block index, r, s, twist).
    let summands: Vec<Vec<(usize, usize, usize)>> = blocks
        .iter()
        .map(|bl| {
            bl.iter()
                .enumerate()
                .flat_map(|(bi, &(j, t))| {
                    (0..lens[t]).flat_map(move |r| (0..lens[j]).map(move |s| (bi, r, s)))
                })
                .collect()
        })
        .collect();
    let twists: Vec<Vec<DivisorClass>> = summands
        .iter()
        .zip(&blocks)
        .map(|(ss, bl)| {
            ss.iter()
                .map(|&(bi, r, s)| cols[bl[bi].1][r] - cols[bl[bi].0][s])
                .collect()
        })
        .collect();
    let index = |deg: usize, block: (usize, usize), r: usize, s: usize| -> Option<usize> {
        let bi = blocks[deg].iter().position(|&b| b == block)?;
        summands[deg].iter().position(|&x| x == (bi, r, s))
    };
    let mut out_maps = Vec::new();
    for deg in 0..4 {
        let n = deg as i64 - 2;
        let sign_neg = n % 2 == 0; // -(-1)^n = -1 when n is even
        let mut mat = FormMatrix::zeros(&twists[deg + 1], &twists[deg]);
        for (col, &(bi, r, s)) in summands[deg].iter().enumerate() {
            let (j, t) = blocks[deg][bi];
            // d_M o f: target column t -> t + 1.
            if t < 2 {
                let dm = maps[t];
                for r2 in 0..dm.rows {
                    let e = dm.get(r2, r);
                    if e.is_zero() {
                        continue;
                    }
                    let row = index(deg + 1, (j, t + 1), r2, s).expect("block exists");
                    mat.set(row, col, e.clone());
                }
            }
            // -(-1)^n f o d_M: source column j -> j - 1.
            if j > 0 {
                let dm = maps[j - 1];
                for s2 in 0..dm.cols {
                    let e = dm.get(s, s2);
                    if e.is_zero() {
                        continue;
                    }
                    let row = index(deg + 1, (j - 1, t), r, s2).expect("block exists");
                    let v = if sign_neg { e.neg(f) } else { e.clone() };
                    let cur = mat.get(row, col).clone();
                    let sum = if cur.is_zero() {
                        v
                    } else {
                        cur.add(f, &v).expect("same degree")
                    };
                    mat.set(row, col, sum);
                }
            }
        }
        out_maps.push(mat);
    }
    LbComplex {
        start: -2,
        columns: twists,
        maps: out_maps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::CurveClass;
    use crate::field::PrimeField;
    use crate::monad::{random_monad, MonadShape, ShapeKind};

    #[test]
    fn monad_and_hom_complexes_are_complexes() {
        let f = PrimeField::default();
        let shape = MonadShape::new(ShapeKind::Kernel, CurveClass::new(1, 1, 1)).unwrap();
        let m = random_monad(shape, f, 1, 20).unwrap();
        let c = LbComplex::from_monad(&m, DivisorClass::new(1, 0, -2));
        c.check(&f).unwrap();
        let h = hom_complex(&m);
        assert_eq!(
            h.columns.iter().map(Vec::len).collect::<Vec<_>>(),
            vec![3, 6 + 18, 1 + 36 + 9, 6 + 18, 3]
        );
        h.check(&f).unwrap();
    }
}
