//! Cohomology of line bundles on `P1`, `P1 x P1` and `X` by Künneth.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chow::DivisorClass;
use crate::multipoly::{monomial_basis, Exponents, MultiDegree};

pub fn h_p1(a: i64, i: usize) -> i64 {
    match i {
        0 if a >= 0 => a + 1,
        1 if a <= -2 => -a - 1,
        _ => 0,
    }
}

pub fn h_x(d: DivisorClass, i: usize) -> i64 {
    let a = d.0;
    let mut total = 0;
    for p in 0..2 {
        for q in 0..2 {
            let r = i as i64 - p as i64 - q as i64;
            if !(0..2).contains(&r) {
                continue;
            }
            total += h_p1(a[0], p) * h_p1(a[1], q) * h_p1(a[2], r as usize);
        }
    }
    total
}

pub fn h_quadric(a: i64, b: i64, i: usize) -> i64 {
    (0..2)
        .filter(|&p| i >= p && i - p < 2)
        .map(|p| h_p1(a, p) * h_p1(b, i - p))
        .sum()
}

pub fn h0_basis(d: DivisorClass) -> Vec<Exponents> {
    monomial_basis(MultiDegree(d.0))
}

/// `(h0, h1, h2, h3)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CohVector(pub [i64; 4]);

impl CohVector {
    pub fn euler(&self) -> i64 {
        self.0[0] - self.0[1] + self.0[2] - self.0[3]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn of_line_bundle(d: DivisorClass) -> Self {
        CohVector([0, 1, 2, 3].map(|i| h_x(d, i)))
    }
}

impl std::ops::Add for CohVector {
    type Output = CohVector;
    fn add(self, o: Self) -> Self {
        CohVector([0, 1, 2, 3].map(|i| self.0[i] + o.0[i]))
    }
}

impl fmt::Display for CohVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

/// `O(D1)^m1 + O(D2)^m2 + ...`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBundleSum {
    pub parts: Vec<(DivisorClass, usize)>,
}

impl LineBundleSum {
    /// Drops zero multiplicities.
    pub fn new(parts: impl IntoIterator<Item = (DivisorClass, usize)>) -> Self {
        LineBundleSum {
            parts: parts.into_iter().filter(|(_, m)| *m > 0).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.parts.iter().map(|(_, m)| m).sum()
    }

    /// One twist per summand, in order.
    pub fn twists(&self) -> Vec<DivisorClass> {
        self.parts
            .iter()
            .flat_map(|(d, m)| std::iter::repeat(*d).take(*m))
            .collect()
    }

    pub fn twisted(&self, s: DivisorClass) -> Self {
        LineBundleSum {
            parts: self.parts.iter().map(|(d, m)| (*d + s, *m)).collect(),
        }
    }

    pub fn dual(&self) -> Self {
        LineBundleSum {
            parts: self.parts.iter().map(|(d, m)| (-*d, *m)).collect(),
        }
    }

    pub fn cohomology(&self) -> CohVector {
        self.parts.iter().fold(CohVector::default(), |acc, (d, m)| {
            let c = CohVector::of_line_bundle(*d);
            acc + CohVector(c.0.map(|x| x * *m as i64))
        })
    }
}

impl fmt::Display for LineBundleSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self
            .parts
            .iter()
            .map(|(d, m)| format!("O{d}^{m}"))
            .collect();
        write!(f, "{}", s.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn p1_and_x_examples() {
        assert_eq!(h_p1(0, 0), 1);
        assert_eq!((h_p1(-1, 0), h_p1(-1, 1)), (0, 0));
        assert_eq!(h_p1(-2, 1), 1);
        assert_eq!(h_x(DivisorClass::new(1, 1, 1), 0), 8);
        assert_eq!(h_x(DivisorClass::new(-2, -2, -2), 3), 1);
        assert_eq!(h_x(DivisorClass::new(-2, 0, 0), 1), 1);
        for i in 0..4 {
            assert_eq!(h_x(DivisorClass::new(-2, -1, -1), i), 0);
        }
    }

    #[test]
    fn bases_and_quadric() {
        assert_eq!(h0_basis(DivisorClass::new(1, 0, 0)).len(), 2);
        assert!(h0_basis(DivisorClass::new(-1, 5, 5)).is_empty());
        assert_eq!(h0_basis(DivisorClass::new(2, 1, 0)).len(), 6);
        assert_eq!(h_quadric(0, 0, 0), 1);
        for i in 0..3 {
            assert_eq!(h_quadric(-1, -1, i), 0);
        }
        assert_eq!(h_quadric(-2, 0, 1), 1);
    }

    #[test]
    fn sums() {
        let s = LineBundleSum::new([
            (DivisorClass::new(-1, 0, 0), 2),
            (DivisorClass::ZERO, 0),
            (DivisorClass::ZERO, 1),
        ]);
        assert_eq!(s.rank(), 3);
        assert_eq!(s.twists().len(), 3);
        assert_eq!(s.cohomology(), CohVector([1, 0, 0, 0]));
    }

    proptest! {
        #[test]
        fn line_bundle_rr(a in proptest::array::uniform3(-6i64..=6)) {
            let d = DivisorClass(a);
            let chi = (a[0] + 1) * (a[1] + 1) * (a[2] + 1);
            prop_assert_eq!(CohVector::of_line_bundle(d).euler(), chi);
        }

        #[test]
        fn serre_duality(a in proptest::array::uniform3(-6i64..=6)) {
            let d = DivisorClass(a);
            let k = DivisorClass::new(-2, -2, -2);
            for i in 0..4 {
                prop_assert_eq!(h_x(d, i), h_x(k - d, 3 - i));
            }
        }

        #[test]
        fn basis_counts_sections(a in proptest::array::uniform3(-3i64..=5)) {
            let d = DivisorClass(a);
            prop_assert_eq!(h0_basis(d).len() as i64, h_x(d, 0));
        }
    }
}
