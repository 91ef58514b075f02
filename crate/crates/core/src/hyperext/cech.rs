//! Čech model shared by the engines.
//!
//! On `P1` with twist `a`, the two-chart Čech complex splits into strands
//! indexed by `v`, the exponent of `x1`. Strand `v` has a chart-0 cell when
//! `v >= 0`, a chart-1 cell when `v <= a`, and always an overlap cell, with
//! `d(chart0) = -overlap`, `d(chart1) = +overlap`. On `X` we take the tensor
//! product of the three factor complexes (27 position patterns), with the
//! Koszul sign `(-1)^(overlaps in earlier factors)`. Multiplication by a
//! monomial shifts strands and keeps positions.

use crate::chow::DivisorClass;
use crate::field::Field;
use crate::multipoly::MultiForm;

use super::complex::LbComplex;

pub const CHART0: u8 = 0;
pub const CHART1: u8 = 1;
pub const OVERLAP: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub col: u16,
    pub summand: u32,
    pub pos: [u8; 3],
    pub v: [i32; 3],
}

impl CellKey {
    pub fn cech_degree(&self) -> i64 {
        self.pos.iter().filter(|&&p| p == OVERLAP).count() as i64
    }
}

pub fn cell_exists(pos: u8, v: i64, a: i64) -> bool {
    match pos {
        CHART0 => v >= 0,
        CHART1 => v <= a,
        _ => true,
    }
}

/// Čech differential of one cell: `(target, sign)`.
pub fn delta(key: &CellKey) -> Vec<(CellKey, i64)> {
    let mut out = Vec::with_capacity(3);
    let mut overlaps_before = 0;
    for fct in 0..3 {
        let p = key.pos[fct];
        if p != OVERLAP {
            let mut t = *key;
            t.pos[fct] = OVERLAP;
            let base = if p == CHART0 { -1 } else { 1 };
            let sign = if overlaps_before % 2 == 0 {
                base
            } else {
                -base
            };
            out.push((t, sign));
        } else {
            overlaps_before += 1;
        }
    }
    out
}

/// Sparse map data of a complex: for column `j`, source summand `s`, the
/// nonzero `(target summand, form)` pairs of `maps[j]`.
pub struct MapIndex<'a, E> {
    pub outgoing: Vec<Vec<Vec<(usize, &'a MultiForm<E>)>>>,
}

impl<'a, E: Clone + PartialEq> MapIndex<'a, E> {
    pub fn new(cx: &'a LbComplex<E>) -> Self {
        MapIndex {
            outgoing: (0..cx.maps.len()).map(|j| cx.outgoing(j)).collect(),
        }
    }
}

/// The perturbation `t = (-1)^(Čech degree) phi` applied to `coeff * key`,
/// accumulated into `out`.
pub fn apply_t<F: Field>(
    f: &F,
    idx: &MapIndex<'_, F::Elem>,
    key: &CellKey,
    coeff: &F::Elem,
    out: &mut impl FnMut(CellKey, F::Elem),
) {
    let col = key.col as usize;
    if col >= idx.outgoing.len() {
        return;
    }
    let c = if key.cech_degree() % 2 == 0 {
        coeff.clone()
    } else {
        f.neg(coeff)
    };
    for (r, form) in &idx.outgoing[col][key.summand as usize] {
        for (e, fc) in form.terms() {
            let target = CellKey {
                col: key.col + 1,
                summand: *r as u32,
                pos: key.pos,
                v: [
                    key.v[0] + e[1] as i32,
                    key.v[1] + e[3] as i32,
                    key.v[2] + e[5] as i32,
                ],
            };
            out(target, f.mul(&c, fc));
        }
    }
}

pub fn twist_of<E>(cx: &LbComplex<E>, key: &CellKey) -> DivisorClass {
    cx.columns[key.col as usize][key.summand as usize]
}
