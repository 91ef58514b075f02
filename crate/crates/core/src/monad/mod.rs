//! Monads `A --alpha--> B --beta--> C` of line-bundle sums on `X`.
//!
//! Two shapes are supported. The kernel shape has
//! `A = O(-h1-h2)^k3 + O(-h1-h3)^k2 + O(-h2-h3)^k1`,
//! `B = O(-h1)^(k2+k3) + O(-h2)^(k1+k3) + O(-h3)^(k1+k2)` and `C = O^(k-2)`.
//! The global shape has the same `A`, middle term `O^(3k+2)` and
//! `C = O(h1)^(k2+k3) + O(h2)^(k1+k3) + O(h3)^(k1+k2)`.

mod generate;
mod io;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chow::{CurveClass, DivisorClass};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::kunneth::LineBundleSum;
use crate::linalg::{self, Matrix};
use crate::multipoly::{evaluate, form_mul, MultiDegree, MultiForm, PointOnX};

pub use generate::{random_monad, random_monad_with_stats, GenerationStats};
pub use io::{deserialize, deserialize_any, serialize, to_json, AnyMonad, FORMAT_TAG};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Kernel,
    Global,
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapeKind::Kernel => "kernel",
            ShapeKind::Global => "global",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonadShape {
    pub kind: ShapeKind,
    pub c2: CurveClass,
}

impl MonadShape {
    pub fn new(kind: ShapeKind, c2: CurveClass) -> Result<Self> {
        if c2.0.iter().any(|&k| k < 0) {
            return Err(Error::InvalidShape(format!(
                "negative component in c2 = {c2}"
            )));
        }
        if kind == ShapeKind::Kernel && c2.charge() < 2 {
            return Err(Error::InvalidShape(format!(
                "kernel shape needs charge k >= 2 (C = O^(k-2)), got c2 = {c2}"
            )));
        }
        Ok(MonadShape { kind, c2 })
    }

    pub fn charge(&self) -> i64 {
        self.c2.charge()
    }

    /// `[A, B, C]`.
    pub fn terms(&self) -> [LineBundleSum; 3] {
        let [k1, k2, k3] = self.c2.0.map(|k| k as usize);
        let k = k1 + k2 + k3;
        let d = DivisorClass::new;
        let a = LineBundleSum::new([(d(-1, -1, 0), k3), (d(-1, 0, -1), k2), (d(0, -1, -1), k1)]);
        let mult = [k2 + k3, k1 + k3, k1 + k2];
        match self.kind {
            ShapeKind::Kernel => [
                a,
                LineBundleSum::new([
                    (d(-1, 0, 0), mult[0]),
                    (d(0, -1, 0), mult[1]),
                    (d(0, 0, -1), mult[2]),
                ]),
                LineBundleSum::new([(DivisorClass::ZERO, k - 2)]),
            ],
            ShapeKind::Global => [
                a,
                LineBundleSum::new([(DivisorClass::ZERO, 3 * k + 2)]),
                LineBundleSum::new([
                    (d(1, 0, 0), mult[0]),
                    (d(0, 1, 0), mult[1]),
                    (d(0, 0, 1), mult[2]),
                ]),
            ],
        }
    }

    pub fn ranks(&self) -> [usize; 3] {
        self.terms().map(|t| t.rank())
    }
}

/// Dense matrix of forms, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMatrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<MultiForm<E>>,
}

impl<E: Clone + PartialEq> FormMatrix<E> {
    /// Zero matrix whose entry `(r, c)` has degree `row_tw[r] - col_tw[c]`.
    pub fn zeros(row_tw: &[DivisorClass], col_tw: &[DivisorClass]) -> Self {
        let mut entries = Vec::with_capacity(row_tw.len() * col_tw.len());
        for r in row_tw {
            for c in col_tw {
                entries.push(MultiForm::zero(MultiDegree((*r - *c).0)));
            }
        }
        FormMatrix {
            rows: row_tw.len(),
            cols: col_tw.len(),
            entries,
        }
    }

    pub fn map_coeffs<G>(&self, mut g: impl FnMut(&E) -> G) -> FormMatrix<G> {
        FormMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|m| m.map_coeffs(&mut g)).collect(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &MultiForm<E> {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: MultiForm<E>) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn evaluate<F: Field<Elem = E>>(&self, f: &F, p: &PointOnX<E>) -> Matrix<E> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.entries.iter().map(|e| evaluate(f, e, p)).collect(),
        }
    }

    /// Checks that every entry has the degree prescribed by the twists and
    /// that entries of a degree with a negative component vanish.
    pub fn check_degrees(&self, row_tw: &[DivisorClass], col_tw: &[DivisorClass]) -> Result<()> {
        if self.rows != row_tw.len() || self.cols != col_tw.len() {
            return Err(Error::Precondition(format!(
                "matrix is {}x{}, twists require {}x{}",
                self.rows,
                self.cols,
                row_tw.len(),
                col_tw.len()
            )));
        }
        for (r, rt) in row_tw.iter().enumerate() {
            for (c, ct) in col_tw.iter().enumerate() {
                let e = self.get(r, c);
                let want = MultiDegree((*rt - *ct).0);
                if e.degree != want && !e.is_zero() {
                    return Err(Error::Precondition(format!(
                        "entry ({r},{c}) has tridegree {:?}, expected {:?}",
                        e.degree.0, want.0
                    )));
                }
                if !want.is_nonnegative() && !e.is_zero() {
                    return Err(Error::NegativeDegree(want.0));
                }
            }
        }
        Ok(())
    }
}

/// Product of form matrices; entry degrees are taken from `row_tw - col_tw`.
pub fn form_matrix_mul<F: Field>(
    f: &F,
    a: &FormMatrix<F::Elem>,
    b: &FormMatrix<F::Elem>,
    row_tw: &[DivisorClass],
    col_tw: &[DivisorClass],
) -> FormMatrix<F::Elem> {
    assert_eq!(a.cols, b.rows);
    let mut out = FormMatrix::zeros(row_tw, col_tw);
    for r in 0..a.rows {
        for c in 0..b.cols {
            let mut acc = out.get(r, c).clone();
            for m in 0..a.cols {
                let (x, y) = (a.get(r, m), b.get(m, c));
                if x.is_zero() || y.is_zero() {
                    continue;
                }
                let p = form_mul(f, x, y);
                acc = if acc.is_zero() {
                    p
                } else {
                    acc.add(f, &p).expect("degrees agree")
                };
            }
            out.set(r, c, acc);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monad<F: Field> {
    pub shape: MonadShape,
    pub field: F,
    pub alpha: FormMatrix<F::Elem>,
    pub beta: FormMatrix<F::Elem>,
    pub seed: Option<u64>,
}

impl<F: Field> Monad<F> {
    pub fn new(
        shape: MonadShape,
        field: F,
        alpha: FormMatrix<F::Elem>,
        beta: FormMatrix<F::Elem>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let [a, b, c] = shape.terms().map(|t| t.twists());
        alpha.check_degrees(&b, &a)?;
        beta.check_degrees(&c, &b)?;
        Ok(Monad {
            shape,
            field,
            alpha,
            beta,
            seed,
        })
    }

    /// Twist lists `[A, B, C]`, one entry per summand.
    pub fn twists(&self) -> [Vec<DivisorClass>; 3] {
        self.shape.terms().map(|t| t.twists())
    }

    /// The same monad over a larger field.
    pub fn base_change<G: Field>(&self, field: G, embed: impl Fn(&F::Elem) -> G::Elem) -> Monad<G> {
        Monad {
            shape: self.shape.clone(),
            field,
            alpha: self.alpha.map_coeffs(&embed),
            beta: self.beta.map_coeffs(&embed),
            seed: self.seed,
        }
    }

    pub fn composition(&self) -> FormMatrix<F::Elem> {
        let [a, _, c] = self.twists();
        form_matrix_mul(&self.field, &self.beta, &self.alpha, &c, &a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum FiberVerdict {
    VerifiedProbabilistically {
        points: usize,
    },
    Failed {
        point_index: usize,
        point: Vec<String>,
        rank: usize,
        expected: usize,
    },
    Skipped,
}

impl FiberVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, FiberVerdict::VerifiedProbabilistically { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadValidity {
    pub composition_zero: bool,
    pub alpha_fiberwise_injective: FiberVerdict,
    pub beta_fiberwise_surjective: FiberVerdict,
    pub points_tested: usize,
}

impl MonadValidity {
    pub fn is_valid(&self) -> bool {
        self.composition_zero
            && self.alpha_fiberwise_injective.is_ok()
            && self.beta_fiberwise_surjective.is_ok()
    }

    pub fn failure_mode(&self) -> Option<&'static str> {
        if !self.composition_zero {
            Some("beta * alpha != 0")
        } else if !self.alpha_fiberwise_injective.is_ok() {
            Some("alpha drops rank at a point")
        } else if !self.beta_fiberwise_surjective.is_ok() {
            Some("beta drops rank at a point")
        } else {
            None
        }
    }
}

/// Seed of the point sampler used by [`validate_monad`].
pub const VALIDATION_SEED: u64 = 0x7661_6c69;

/// Symbolic `beta * alpha = 0` plus fiber ranks at `n_points` random points.
pub fn validate_monad<F: Field>(m: &Monad<F>, n_points: usize) -> MonadValidity {
    validate_with_seed(m, n_points, VALIDATION_SEED)
}

pub fn validate_with_seed<F: Field>(m: &Monad<F>, n_points: usize, seed: u64) -> MonadValidity {
    let f = &m.field;
    if !m.composition().is_zero() {
        return MonadValidity {
            composition_zero: false,
            alpha_fiberwise_injective: FiberVerdict::Skipped,
            beta_fiberwise_surjective: FiberVerdict::Skipped,
            points_tested: 0,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<PointOnX<F::Elem>> = (0..n_points)
        .map(|_| PointOnX::random(f, &mut rng))
        .collect();
    let (alpha_ok, beta_ok) = fiber_verdicts(f, &m.alpha, &m.beta, &points);
    MonadValidity {
        composition_zero: true,
        alpha_fiberwise_injective: alpha_ok,
        beta_fiberwise_surjective: beta_ok,
        points_tested: n_points,
    }
}

/// Full column rank of `alpha` and full row rank of `beta` at each point.
pub(crate) fn fiber_verdicts<F: Field>(
    f: &F,
    alpha: &FormMatrix<F::Elem>,
    beta: &FormMatrix<F::Elem>,
    points: &[PointOnX<F::Elem>],
) -> (FiberVerdict, FiberVerdict) {
    let check = |mat: &FormMatrix<F::Elem>, expected: usize| {
        for (i, p) in points.iter().enumerate() {
            let r = linalg::rank(f, &mat.evaluate(f, p));
            if r < expected {
                return FiberVerdict::Failed {
                    point_index: i,
                    point: p.coords.iter().flatten().map(|c| f.render(c)).collect(),
                    rank: r,
                    expected,
                };
            }
        }
        FiberVerdict::VerifiedProbabilistically {
            points: points.len(),
        }
    };
    (check(alpha, alpha.cols), check(beta, beta.rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn shape_ranks() {
        let s = MonadShape::new(ShapeKind::Kernel, CurveClass::new(1, 1, 0)).unwrap();
        assert_eq!(s.ranks(), [2, 4, 0]);
        let s = MonadShape::new(ShapeKind::Kernel, CurveClass::new(1, 1, 1)).unwrap();
        assert_eq!(s.ranks(), [3, 6, 1]);
        let s = MonadShape::new(ShapeKind::Global, CurveClass::new(1, 1, 0)).unwrap();
        assert_eq!(s.ranks(), [2, 8, 4]);
        assert!(MonadShape::new(ShapeKind::Kernel, CurveClass::new(0, 1, 0)).is_err());
        assert!(MonadShape::new(ShapeKind::Kernel, CurveClass::new(3, -1, 0)).is_err());
    }

    #[test]
    fn zero_alpha_fails_first_point() {
        let f = PrimeField::default();
        let shape = MonadShape::new(ShapeKind::Kernel, CurveClass::new(1, 1, 0)).unwrap();
        let [a, b, c] = shape.terms().map(|t| t.twists());
        let m = Monad::new(
            shape,
            f,
            FormMatrix::zeros(&b, &a),
            FormMatrix::zeros(&c, &b),
            None,
        )
        .unwrap();
        let v = validate_monad(&m, 64);
        assert!(v.composition_zero);
        assert!(matches!(
            v.alpha_fiberwise_injective,
            FiberVerdict::Failed { point_index: 0, .. }
        ));
    }

    #[test]
    fn nonzero_composition_skips_fiber_checks() {
        let f = PrimeField::default();
        let shape = MonadShape::new(ShapeKind::Kernel, CurveClass::new(1, 1, 1)).unwrap();
        let [a, b, c] = shape.terms().map(|t| t.twists());
        let mut alpha = FormMatrix::zeros(&b, &a);
        let mut beta = FormMatrix::zeros(&c, &b);
        // alpha: O(-h1-h2) -> O(-h1) has degree h2; beta: O(-h1) -> O has degree h1.
        alpha.set(0, 0, MultiForm::var(&f, 1, 0));
        beta.set(0, 0, MultiForm::var(&f, 0, 0));
        let m = Monad::new(shape, f, alpha, beta, None).unwrap();
        let v = validate_monad(&m, 8);
        assert!(!v.composition_zero);
        assert_eq!(v.alpha_fiberwise_injective, FiberVerdict::Skipped);
        assert_eq!(v.points_tested, 0);
    }

    #[test]
    fn degree_mismatch_rejected() {
        let f = PrimeField::default();
        let shape = MonadShape::new(ShapeKind::Kernel, CurveClass::new(1, 1, 0)).unwrap();
        let [a, b, c] = shape.terms().map(|t| t.twists());
        let mut alpha = FormMatrix::zeros(&b, &a);
        alpha.set(0, 0, MultiForm::var(&f, 0, 0));
        assert!(Monad::new(shape, f, alpha, FormMatrix::zeros(&c, &b), None).is_err());
    }
}
