//! The Chow ring `A(X) = Z[h1,h2,h3]/(h1^2,h2^2,h3^2)` of `X = P1 x P1 x P1`,
//! Chern classes of twists and monads, Riemann–Roch, slopes and reduced
//! Hilbert polynomials.
//!
//! Basis: `1`, `h1,h2,h3`, `e1 = h2 h3, e2 = h1 h3, e3 = h1 h2`, `pt = h1 h2 h3`.
//! So `hi * ei = pt` and `hi * ej = 0` for `i != j`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monad::{MonadShape, ShapeKind};

fn ck_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("overflow in Chow ring arithmetic")
}

fn ck_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("overflow in Chow ring arithmetic")
}

/// `a1 h1 + a2 h2 + a3 h3`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct DivisorClass(pub [i64; 3]);

impl DivisorClass {
    pub const ZERO: DivisorClass = DivisorClass([0, 0, 0]);
    /// The hyperplane class `h = h1 + h2 + h3`.
    pub const H: DivisorClass = DivisorClass([1, 1, 1]);

    pub fn new(a1: i64, a2: i64, a3: i64) -> Self {
        DivisorClass([a1, a2, a3])
    }

    pub fn basis(i: usize) -> Self {
        let mut a = [0; 3];
        a[i] = 1;
        DivisorClass(a)
    }

    /// `D . h^2 = 2 (a1 + a2 + a3)`.
    pub fn degree(&self) -> i64 {
        2 * (self.0[0] + self.0[1] + self.0[2])
    }

    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    pub fn scale(&self, s: i64) -> Self {
        DivisorClass(self.0.map(|a| ck_mul(a, s)))
    }

    pub fn to_element(self) -> ChowElement {
        ChowElement {
            div: self,
            ..ChowElement::ZERO
        }
    }
}

impl Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, o: Self) -> Self {
        DivisorClass([
            ck_add(self.0[0], o.0[0]),
            ck_add(self.0[1], o.0[1]),
            ck_add(self.0[2], o.0[2]),
        ])
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> Self {
        DivisorClass(self.0.map(|a| -a))
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// `k1 e1 + k2 e2 + k3 e3`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct CurveClass(pub [i64; 3]);

impl CurveClass {
    pub const ZERO: CurveClass = CurveClass([0, 0, 0]);

    pub fn new(k1: i64, k2: i64, k3: i64) -> Self {
        CurveClass([k1, k2, k3])
    }

    /// The charge `k1 + k2 + k3`, i.e. `c2 . h`.
    pub fn charge(&self) -> i64 {
        self.0[0] + self.0[1] + self.0[2]
    }
}

impl Add for CurveClass {
    type Output = CurveClass;
    fn add(self, o: Self) -> Self {
        CurveClass([
            ck_add(self.0[0], o.0[0]),
            ck_add(self.0[1], o.0[1]),
            ck_add(self.0[2], o.0[2]),
        ])
    }
}

impl Sub for CurveClass {
    type Output = CurveClass;
    fn sub(self, o: Self) -> Self {
        self + CurveClass(o.0.map(|k| -k))
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// A full class `c0 + D + C + pt * [pt]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChowElement {
    pub c0: i64,
    pub div: DivisorClass,
    pub curve: CurveClass,
    pub pt: i64,
}

impl ChowElement {
    pub const ZERO: ChowElement = ChowElement {
        c0: 0,
        div: DivisorClass::ZERO,
        curve: CurveClass::ZERO,
        pt: 0,
    };
    pub const ONE: ChowElement = ChowElement {
        c0: 1,
        div: DivisorClass::ZERO,
        curve: CurveClass::ZERO,
        pt: 0,
    };

    pub fn point(n: i64) -> Self {
        ChowElement {
            pt: n,
            ..Self::ZERO
        }
    }

    pub fn curve(c: CurveClass) -> Self {
        ChowElement {
            curve: c,
            ..Self::ZERO
        }
    }

    /// Dense coefficient vector in the basis `1, h1, h2, h3, e1, e2, e3, pt`.
    pub fn coefficients(&self) -> [i64; 8] {
        let d = self.div.0;
        let c = self.curve.0;
        [self.c0, d[0], d[1], d[2], c[0], c[1], c[2], self.pt]
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::ONE, |acc, _| acc * *self)
    }

    /// Inverse of a class with constant term 1, as the truncated geometric series.
    pub fn inverse_unipotent(&self) -> Option<Self> {
        if self.c0 != 1 {
            return None;
        }
        let x = *self - Self::ONE;
        let x2 = x * x;
        let x3 = x2 * x;
        Some(Self::ONE - x + x2 - x3)
    }
}

impl Add for ChowElement {
    type Output = ChowElement;
    fn add(self, o: Self) -> Self {
        ChowElement {
            c0: ck_add(self.c0, o.c0),
            div: self.div + o.div,
            curve: self.curve + o.curve,
            pt: ck_add(self.pt, o.pt),
        }
    }
}

impl Neg for ChowElement {
    type Output = ChowElement;
    fn neg(self) -> Self {
        ChowElement {
            c0: -self.c0,
            div: -self.div,
            curve: CurveClass(self.curve.0.map(|k| -k)),
            pt: -self.pt,
        }
    }
}

impl Sub for ChowElement {
    type Output = ChowElement;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for ChowElement {
    type Output = ChowElement;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.div.0, o.div.0);
        let (k, l) = (self.curve.0, o.curve.0);
        let dd = CurveClass([
            ck_add(ck_mul(a[1], b[2]), ck_mul(a[2], b[1])),
            ck_add(ck_mul(a[0], b[2]), ck_mul(a[2], b[0])),
            ck_add(ck_mul(a[0], b[1]), ck_mul(a[1], b[0])),
        ]);
        let dc = (0..3).fold(0, |acc, i| {
            ck_add(acc, ck_add(ck_mul(a[i], l[i]), ck_mul(b[i], k[i])))
        });
        ChowElement {
            c0: ck_mul(self.c0, o.c0),
            div: self.div.scale(o.c0) + o.div.scale(self.c0),
            curve: CurveClass(l.map(|x| ck_mul(x, self.c0)))
                + CurveClass(k.map(|x| ck_mul(x, o.c0)))
                + dd,
            pt: ck_add(ck_add(ck_mul(self.c0, o.pt), ck_mul(o.c0, self.pt)), dc),
        }
    }
}

pub fn chow_mul(x: ChowElement, y: ChowElement) -> ChowElement {
    x * y
}

/// `D . C` as an integer (`hi . ej = delta_ij`).
pub fn divisor_dot_curve(d: DivisorClass, c: CurveClass) -> i64 {
    (0..3).fold(0, |acc, i| ck_add(acc, ck_mul(d.0[i], c.0[i])))
}

/// Chern classes of `E(s)` for a rank-2 bundle `E` with Chern classes `(c1, c2)`.
pub fn chern_twist(
    c1: DivisorClass,
    c2: CurveClass,
    s: DivisorClass,
) -> (DivisorClass, CurveClass) {
    let new_c1 = c1 + s.scale(2);
    let new_c2 =
        c2 + (c1.to_element() * s.to_element()).curve + (s.to_element() * s.to_element()).curve;
    (new_c1, new_c2)
}

/// Riemann–Roch for a rank-2 bundle:
/// `(a1+1)(a2+1)(a3+1) + 1 - (a.k + 2k)/2`.
pub fn chi_rank2(c1: DivisorClass, c2: CurveClass) -> Result<i64> {
    let a = c1.0;
    let line = ck_mul(ck_mul(a[0] + 1, a[1] + 1), a[2] + 1);
    let half = ck_add(divisor_dot_curve(c1, c2), ck_mul(2, c2.charge()));
    if half % 2 != 0 {
        return Err(Error::NonIntegral(format!(
            "a.k + 2k = {half} is odd for c1 = {c1}, c2 = {c2}"
        )));
    }
    Ok(line + 1 - half / 2)
}

/// `chi(E(D))` for a rank-2 bundle with `c1 = 0`:
/// `(2 D^3 - 6 c2 D)/6 + h (D^2 - c2) + D h^2 + 2`.
pub fn chi_twist(c2: CurveClass, d: DivisorClass) -> Result<i64> {
    let de = d.to_element();
    let d3 = (de * de * de).pt;
    let numer = ck_add(ck_mul(2, d3), -ck_mul(6, divisor_dot_curve(d, c2)));
    if numer % 6 != 0 {
        return Err(Error::NonIntegral(format!(
            "2D^3 - 6 c2 D = {numer} not divisible by 6 for D = {d}, c2 = {c2}"
        )));
    }
    let h = DivisorClass::H.to_element();
    let d2_minus_c2 = (de * de) - ChowElement::curve(c2);
    let term = (h * d2_minus_c2).pt;
    let dh2 = (de * h * h).pt;
    Ok(numer / 6 + term + dh2 + 2)
}

/// Total Chern class of a direct sum of line bundles `O(D)^m`.
pub fn total_chern(parts: &[(DivisorClass, usize)]) -> ChowElement {
    parts.iter().fold(ChowElement::ONE, |acc, (d, m)| {
        acc * (ChowElement::ONE + d.to_element()).pow(*m as u32)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernData {
    pub c1: DivisorClass,
    pub c2: CurveClass,
    pub c3: i64,
}

/// Chern classes of the cohomology of a monad `A -> B -> C`:
/// `c(E) = c(B) / (c(A) c(C))`.
pub fn chern_of_monad(kind: ShapeKind, c2: CurveClass) -> Result<ChernData> {
    let shape = MonadShape::new(kind, c2)?;
    let [a, b, c] = shape.terms();
    let denom = total_chern(&a.parts) * total_chern(&c.parts);
    let total = total_chern(&b.parts) * denom.inverse_unipotent().expect("constant term 1");
    Ok(ChernData {
        c1: total.div,
        c2: total.curve,
        c3: total.pt,
    })
}

/// `mu = c1 . h^2 / rank`.
pub fn slope(c1: DivisorClass, rank: i64) -> Result<Ratio<i64>> {
    if rank <= 0 {
        return Err(Error::ZeroRank);
    }
    Ok(Ratio::new(c1.degree(), rank))
}

/// A polynomial in `t` with exact rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertPoly(pub Vec<Ratio<i64>>);

impl HilbertPoly {
    pub fn eval(&self, t: i64) -> Ratio<i64> {
        self.0.iter().rev().fold(Ratio::from_integer(0), |acc, c| {
            acc * Ratio::from_integer(t) + c
        })
    }

    /// Ordering of the two polynomials for `t -> +infinity`.
    pub fn cmp_asymptotic(&self, other: &HilbertPoly) -> std::cmp::Ordering {
        let n = self.0.len().max(other.0.len());
        let zero = Ratio::from_integer(0);
        for i in (0..n).rev() {
            let a = self.0.get(i).unwrap_or(&zero);
            let b = other.0.get(i).unwrap_or(&zero);
            match a.cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl Sub for &HilbertPoly {
    type Output = HilbertPoly;
    fn sub(self, o: &HilbertPoly) -> HilbertPoly {
        let n = self.0.len().max(o.0.len());
        let zero = Ratio::from_integer(0);
        HilbertPoly(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&zero) - o.0.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

/// Interpolate the cubic through `(t, values[t])` for `t = 0..4`.
fn cubic_through(values: [i64; 4]) -> Vec<Ratio<i64>> {
    // Newton forward differences, then expand the falling factorials.
    let mut diffs = values.map(Ratio::from_integer).to_vec();
    let mut newton = Vec::new();
    for _ in 0..4 {
        newton.push(diffs[0]);
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    }
    // t(t-1)...(t-j+1)/j! in monomial basis.
    let mut coeffs = vec![Ratio::from_integer(0); 4];
    let mut falling = vec![Ratio::from_integer(1)];
    let mut fact = 1i64;
    for (j, c) in newton.iter().enumerate() {
        if j > 0 {
            fact *= j as i64;
            let shift = Ratio::from_integer(-(j as i64 - 1));
            let mut next = vec![Ratio::from_integer(0); falling.len() + 1];
            for (i, f) in falling.iter().enumerate() {
                next[i + 1] += f;
                next[i] += f * shift;
            }
            falling = next;
        }
        for (i, f) in falling.iter().enumerate() {
            coeffs[i] += c * f / Ratio::from_integer(fact);
        }
    }
    coeffs
}

/// `P(t) = chi(E(t h)) / rank`. Rank 1 means the line bundle `O(c1)`.
pub fn reduced_hilbert_poly(c1: DivisorClass, c2: CurveClass, rank: i64) -> Result<HilbertPoly> {
    let mut values = [0i64; 4];
    for (t, v) in values.iter_mut().enumerate() {
        let tt = t as i64;
        *v = match rank {
            1 => {
                if c2 != CurveClass::ZERO {
                    return Err(Error::Precondition("line bundles have c2 = 0".into()));
                }
                c1.0.iter().fold(1, |acc, a| ck_mul(acc, a + tt + 1))
            }
            2 => {
                let (c1t, c2t) = chern_twist(c1, c2, DivisorClass::H.scale(tt));
                chi_rank2(c1t, c2t)?
            }
            r => return Err(Error::UnsupportedRank(r)),
        };
    }
    let coeffs = cubic_through(values);
    Ok(HilbertPoly(
        coeffs
            .into_iter()
            .map(|c| c / Ratio::from_integer(rank))
            .collect(),
    ))
}

/// Outcome of testing whether `O(-B) -> E -> O(B)`, `B = a h1 + b h2 - (a+b) h3`,
/// can be an instanton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemistableClass {
    pub admissible: bool,
    pub c2: CurveClass,
    /// `k = 2 l^2` when admissible.
    pub l: Option<i64>,
    /// 1-based index `i` with `c2 = 2 l^2 e_i` when admissible.
    pub index: Option<usize>,
}

pub fn classify_strictly_semistable(a: i64, b: i64) -> SemistableClass {
    let c2 = CurveClass([2 * b * (a + b), 2 * a * (a + b), -2 * a * b]);
    let admissible = c2.0.iter().all(|&k| k >= 0) && c2.charge() >= 2;
    if !admissible {
        return SemistableClass {
            admissible,
            c2,
            l: None,
            index: None,
        };
    }
    let k = c2.charge();
    let l = (1..).find(|l| 2 * l * l >= k).unwrap();
    assert_eq!(2 * l * l, k, "admissible charge must be twice a square");
    let index = c2.0.iter().position(|&x| x != 0).map(|i| i + 1);
    SemistableClass {
        admissible,
        c2,
        l: Some(l),
        index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(i: usize) -> ChowElement {
        DivisorClass::basis(i).to_element()
    }

    #[test]
    fn basic_products() {
        assert_eq!(h(0) * h(1), ChowElement::curve(CurveClass::new(0, 0, 1)));
        let hh = DivisorClass::H.to_element();
        assert_eq!(hh * hh * hh, ChowElement::point(6));
        let e1 = ChowElement::curve(CurveClass::new(1, 0, 0));
        assert_eq!(e1 * hh, ChowElement::point(1));
        assert_eq!(e1 * h(0), ChowElement::point(1));
        assert_eq!(e1 * h(1), ChowElement::ZERO);
        assert_eq!(h(2) * h(2), ChowElement::ZERO);
    }

    #[test]
    fn twist_examples() {
        assert_eq!(
            chern_twist(
                DivisorClass::ZERO,
                CurveClass::new(1, 1, 0),
                DivisorClass::H
            ),
            (DivisorClass::new(2, 2, 2), CurveClass::new(3, 3, 2))
        );
        let c1 = DivisorClass::new(1, -2, 0);
        let c2 = CurveClass::new(4, 1, 7);
        assert_eq!(chern_twist(c1, c2, DivisorClass::ZERO), (c1, c2));
        assert_eq!(
            chern_twist(
                DivisorClass::ZERO,
                CurveClass::ZERO,
                DivisorClass::new(1, 0, 0)
            ),
            (DivisorClass::new(2, 0, 0), CurveClass::ZERO)
        );
    }

    #[test]
    fn riemann_roch_examples() {
        assert_eq!(chi_rank2(DivisorClass::ZERO, CurveClass::ZERO).unwrap(), 2);
        assert_eq!(
            chi_rank2(DivisorClass::ZERO, CurveClass::new(1, 1, 0)).unwrap(),
            0
        );
        assert_eq!(
            chi_rank2(DivisorClass::new(2, 2, 2), CurveClass::new(3, 3, 2)).unwrap(),
            12
        );
        assert_eq!(
            chi_twist(CurveClass::new(1, 1, 0), DivisorClass::H).unwrap(),
            12
        );
        assert_eq!(
            chi_twist(CurveClass::new(1, 1, 1), DivisorClass::ZERO).unwrap(),
            -1
        );
        assert_eq!(
            chi_twist(CurveClass::new(1, 1, 0), -DivisorClass::H).unwrap(),
            0
        );
        assert_eq!(
            chi_twist(CurveClass::new(2, 1, 0), DivisorClass::ZERO).unwrap(),
            -1
        );
        assert!(matches!(
            chi_rank2(DivisorClass::new(1, 0, 0), CurveClass::new(1, 0, 0)),
            Err(Error::NonIntegral(_))
        ));
    }

    #[test]
    fn monad_chern_classes() {
        for (kind, c2) in [
            (ShapeKind::Kernel, CurveClass::new(1, 1, 0)),
            (ShapeKind::Global, CurveClass::new(1, 1, 1)),
            (ShapeKind::Kernel, CurveClass::new(0, 0, 2)),
        ] {
            let cd = chern_of_monad(kind, c2).unwrap();
            assert_eq!(
                cd,
                ChernData {
                    c1: DivisorClass::ZERO,
                    c2,
                    c3: 0
                }
            );
        }
        assert!(chern_of_monad(ShapeKind::Kernel, CurveClass::new(1, 0, 0)).is_err());
        assert!(chern_of_monad(ShapeKind::Global, CurveClass::new(-1, 2, 2)).is_err());
    }

    #[test]
    fn slopes() {
        assert_eq!(
            slope(DivisorClass::ZERO, 2).unwrap(),
            Ratio::from_integer(0)
        );
        assert_eq!(
            slope(DivisorClass::new(1, 0, 0), 1).unwrap(),
            Ratio::from_integer(2)
        );
        assert_eq!(
            slope(DivisorClass::new(1, -1, 0), 1).unwrap(),
            Ratio::from_integer(0)
        );
        assert!(slope(DivisorClass::ZERO, 0).is_err());
    }

    #[test]
    fn hilbert_polynomials() {
        let o = reduced_hilbert_poly(DivisorClass::ZERO, CurveClass::ZERO, 1).unwrap();
        // (t+1)^3
        let expected: Vec<Ratio<i64>> = [1, 3, 3, 1]
            .iter()
            .map(|&c| Ratio::from_integer(c))
            .collect();
        assert_eq!(o.0, expected);
        for (a, b) in [(1i64, 0i64), (2, -1), (-3, 1)] {
            let d = DivisorClass::new(2 * a, 2 * b, -2 * a - 2 * b);
            let p = reduced_hilbert_poly(d, CurveClass::ZERO, 1).unwrap();
            let diff = &p - &o;
            for t in [10i64, 50, 100] {
                let expected = -4 * (t + 1) * (a * a + b * b + a * b) - 8 * a * b * (a + b);
                assert_eq!(diff.eval(t), Ratio::from_integer(expected));
            }
        }
        let e = reduced_hilbert_poly(DivisorClass::ZERO, CurveClass::new(1, 1, 0), 2).unwrap();
        assert_eq!(e.eval(0), Ratio::from_integer(0));
        assert_eq!(e.0[3], Ratio::from_integer(1));
        assert!(reduced_hilbert_poly(DivisorClass::ZERO, CurveClass::ZERO, 3).is_err());
    }

    #[test]
    fn semistable_examples() {
        let c = classify_strictly_semistable(1, 0);
        assert!(c.admissible);
        assert_eq!(
            (c.c2, c.l, c.index),
            (CurveClass::new(0, 2, 0), Some(1), Some(2))
        );
        let c = classify_strictly_semistable(1, 1);
        assert!(!c.admissible);
        assert_eq!(c.c2, CurveClass::new(4, 4, -2));
        let c = classify_strictly_semistable(-2, 2);
        assert!(c.admissible);
        assert_eq!((c.c2, c.l), (CurveClass::new(0, 0, 8), Some(2)));
        assert!(!classify_strictly_semistable(0, 0).admissible);
    }
}
