//! Reference engine: the full Čech total complex restricted to Laurent
//! monomials whose exponents are all `>= -N`.
//!
//! The restriction keeps whole strands (`-N <= v <= a + N` in a factor of
//! twist `a`), is preserved by the Čech differential and by multiplication
//! with forms, and contains every strand that carries cohomology once
//! `N >= max(0, -a - 1)` over all summands. So it computes the
//! hypercohomology exactly; `pad` enlarges `N` beyond that bound.

use std::collections::HashMap;

use crate::field::Field;
use crate::linalg::{sparse_rank, SparseRow};

use super::cech::{apply_t, cell_exists, delta, CellKey, MapIndex, OVERLAP};
use super::complex::LbComplex;

/// Smallest `N` for which the box contains all cohomology strands.
pub fn minimal_margin<E>(cx: &LbComplex<E>) -> i64 {
    cx.columns
        .iter()
        .flatten()
        .flat_map(|d| d.0)
        .map(|a| (-a - 1).max(0))
        .max()
        .unwrap_or(0)
}

/// Hypercohomology dimensions for degrees `cx.start ..= cx.end() + 3`.
pub fn box_cohomology<F: Field>(f: &F, cx: &LbComplex<F::Elem>, pad: i64) -> Vec<usize> {
    let n = minimal_margin(cx) + pad;
    let start = cx.start;
    let ndeg = (cx.end() + 3 - start + 1) as usize;
    let mut cells: Vec<Vec<CellKey>> = vec![Vec::new(); ndeg];
    for (col, twists) in cx.columns.iter().enumerate() {
        for (s, d) in twists.iter().enumerate() {
            let a = d.0;
            let ranges: Vec<Vec<(u8, i32)>> = (0..3)
                .map(|fct| {
                    let mut out = Vec::new();
                    for v in -n..=a[fct] + n {
                        for pos in 0..3u8 {
                            if cell_exists(pos, v, a[fct]) {
                                out.push((pos, v as i32));
                            }
                        }
                    }
                    out
                })
                .collect();
            for &(p0, v0) in &ranges[0] {
                for &(p1, v1) in &ranges[1] {
                    for &(p2, v2) in &ranges[2] {
                        let key = CellKey {
                            col: col as u16,
                            summand: s as u32,
                            pos: [p0, p1, p2],
                            v: [v0, v1, v2],
                        };
                        let deg =
                            col as i64 + key.pos.iter().filter(|&&p| p == OVERLAP).count() as i64;
                        cells[deg as usize].push(key);
                    }
                }
            }
        }
    }
    let index: Vec<HashMap<CellKey, u32>> = cells
        .iter()
        .map(|c| c.iter().enumerate().map(|(i, k)| (*k, i as u32)).collect())
        .collect();
    let idx = MapIndex::new(cx);
    let ranks: Vec<usize> = (0..ndeg.saturating_sub(1))
        .map(|j| {
            let rows: Vec<SparseRow<F::Elem>> = cells[j]
                .iter()
                .map(|key| {
                    let mut row: HashMap<u32, F::Elem> = HashMap::new();
                    let mut push = |k: CellKey, v: F::Elem| {
                        let i = *index[j + 1]
                            .get(&k)
                            .expect("box is closed under the differential");
                        let e = row.entry(i).or_insert_with(|| f.zero());
                        *e = f.add(e, &v);
                    };
                    for (k, s) in delta(key) {
                        push(k, f.from_i64(s));
                    }
                    apply_t(f, &idx, key, &f.one(), &mut push);
                    let mut r: SparseRow<F::Elem> =
                        row.into_iter().filter(|(_, v)| !f.is_zero(v)).collect();
                    r.sort_by_key(|e| e.0);
                    r
                })
                .collect();
            sparse_rank(f, rows)
        })
        .collect();
    (0..ndeg)
        .map(|j| {
            let out = if j < ranks.len() { ranks[j] } else { 0 };
            let inc = if j > 0 { ranks[j - 1] } else { 0 };
            cells[j].len() - out - inc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::DivisorClass;
    use crate::field::PrimeField;
    use crate::kunneth::h_x;

    #[test]
    fn line_bundles_match_kunneth() {
        let f = PrimeField::default();
        for a in [[0, 0, 0], [-2, 1, 0], [-3, -2, 1], [1, -1, 2]] {
            let d = DivisorClass(a);
            for pad in [0, 2] {
                let dims = box_cohomology(&f, &LbComplex::line_bundle(d), pad);
                for i in 0..4 {
                    assert_eq!(dims[i] as i64, h_x(d, i), "D = {d}, pad = {pad}");
                }
            }
        }
    }
}
