//! Section-vanishing stability checks, the instanton verifier and the
//! Ulrich check for charge 2.
//!
//! A rank-two bundle `E` with `c1 = 0` on `X` is `mu`-stable iff
//! `h^0(E(B)) = 0` for every `B` with `B . h^2 <= 0`, and `mu`-semistable iff
//! this holds for every `B` with `B . h^2 < 0`. Only finitely many `B` can be
//! tested, so verdicts are relative to a window `|b_i| <= W`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chow::{chern_of_monad, CurveClass, DivisorClass};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hyperext::{coh_monad_twist, EngineChoice};
use crate::kunneth::CohVector;
use crate::monad::{validate_monad, FormMatrix, Monad, MonadShape, MonadValidity, ShapeKind};
use crate::multipoly::{form_mul, MultiForm};

pub const DEFAULT_WINDOW: i64 = 3;

/// Points used by the validity gate of [`verify_instanton`].
pub const VERIFY_POINTS: usize = 64;

/// `{B : |b_i| <= w, b_1 + b_2 + b_3 <= 0}` in lexicographic order.
pub fn window_candidates(w: i64) -> Vec<DivisorClass> {
    let mut out = Vec::new();
    for a in -w..=w {
        for b in -w..=w {
            for c in -w..=w {
                if a + b + c <= 0 {
                    out.push(DivisorClass::new(a, b, c));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "level", rename_all = "kebab-case")]
pub enum StabilityLevel {
    /// No sections of `E(B)` for any candidate. Not a proof of stability.
    StableWithinWindow,
    /// `h^0(E(B)) > 0` for some `B` of degree 0 and none of negative degree.
    StrictlySemistableWitness {
        witness: DivisorClass,
        h0: usize,
    },
    /// `h^0(E(B)) > 0` for some `B` of negative degree.
    UnstableWitness {
        witness: DivisorClass,
        h0: usize,
    },
    Undetermined {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    #[serde(flatten)]
    pub level: StabilityLevel,
    pub window: i64,
    pub checked: usize,
}

impl StabilityVerdict {
    pub fn is_stable_within_window(&self) -> bool {
        self.level == StabilityLevel::StableWithinWindow
    }
}

/// Verdict from `h0(B)` over the candidates of window `w`. The witness is
/// the lexicographically least class of the worst kind.
pub fn hoppe_verdict<H>(w: i64, h0: H) -> StabilityVerdict
where
    H: Fn(DivisorClass) -> Result<usize> + Sync,
{
    let cands = window_candidates(w);
    let results: Vec<(DivisorClass, Result<usize>)> =
        cands.par_iter().map(|&b| (b, h0(b))).collect();
    let mut semistable = None;
    let mut unstable = None;
    for (b, r) in results {
        let n = match r {
            Ok(n) => n,
            Err(e) => {
                return StabilityVerdict {
                    level: StabilityLevel::Undetermined {
                        reason: format!("h^0(E({b})): {e}"),
                    },
                    window: w,
                    checked: cands.len(),
                }
            }
        };
        if n == 0 {
            continue;
        }
        let slot = if b.degree() < 0 {
            &mut unstable
        } else {
            &mut semistable
        };
        if slot.is_none() {
            *slot = Some((b, n));
        }
    }
    let level = match (unstable, semistable) {
        (Some((witness, h0)), _) => StabilityLevel::UnstableWitness { witness, h0 },
        (None, Some((witness, h0))) => StabilityLevel::StrictlySemistableWitness { witness, h0 },
        (None, None) => StabilityLevel::StableWithinWindow,
    };
    StabilityVerdict {
        level,
        window: w,
        checked: cands.len(),
    }
}

pub fn hoppe_window_check<F: Field>(
    m: &Monad<F>,
    w: i64,
    engine: EngineChoice,
) -> StabilityVerdict {
    hoppe_verdict(w, |b| Ok(coh_monad_twist(m, b, engine)?.dims.0[0] as usize))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstantonReport {
    pub validity: MonadValidity,
    pub checks: Vec<Check>,
    pub stability: Option<StabilityVerdict>,
}

impl InstantonReport {
    /// All gates passed and the window check found no section.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
            && self
                .stability
                .as_ref()
                .is_some_and(|s| s.is_stable_within_window())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn h_at<F: Field>(m: &Monad<F>, d: DivisorClass, engine: EngineChoice) -> Result<CohVector> {
    Ok(coh_monad_twist(m, d, engine)?.dims)
}

/// Validity, Chern classes, `h^0(E) = 0`, `h^1(E(-h)) = 0` (and `h^1(E) = 0`
/// for charge 2), then the window check. Later gates are skipped once the
/// validity gate fails.
pub fn verify_instanton<F: Field>(
    m: &Monad<F>,
    w: i64,
    engine: EngineChoice,
) -> Result<InstantonReport> {
    let validity = validate_monad(m, VERIFY_POINTS);
    let mut checks = vec![Check {
        name: "monad".into(),
        passed: validity.is_valid(),
        detail: validity.failure_mode().unwrap_or("valid").into(),
    }];
    if !validity.is_valid() {
        return Ok(InstantonReport {
            validity,
            checks,
            stability: None,
        });
    }
    let ch = chern_of_monad(m.shape.kind, m.shape.c2)?;
    checks.push(Check {
        name: "c1".into(),
        passed: ch.c1 == DivisorClass::ZERO,
        detail: ch.c1.to_string(),
    });
    checks.push(Check {
        name: "c2".into(),
        passed: ch.c2 == m.shape.c2,
        detail: ch.c2.to_string(),
    });
    checks.push(Check {
        name: "c3".into(),
        passed: ch.c3 == 0,
        detail: ch.c3.to_string(),
    });
    let h = DivisorClass::new(-1, -1, -1);
    let e0 = h_at(m, DivisorClass::ZERO, engine)?;
    let eh = h_at(m, h, engine)?;
    checks.push(Check {
        name: "h0(E)".into(),
        passed: e0.0[0] == 0,
        detail: e0.0[0].to_string(),
    });
    checks.push(Check {
        name: "h1(E(-h))".into(),
        passed: eh.0[1] == 0,
        detail: eh.0[1].to_string(),
    });
    if m.shape.charge() == 2 {
        checks.push(Check {
            name: "h1(E)".into(),
            passed: e0.0[1] == 0,
            detail: e0.0[1].to_string(),
        });
    }
    let stability = Some(hoppe_window_check(m, w, engine));
    Ok(InstantonReport {
        validity,
        checks,
        stability,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UlrichReport {
    pub holds: bool,
    /// `(i, t)` with `h^i(E(t h)) != 0`, first in `(t descending, i)` order.
    pub failing: Option<(usize, i64)>,
    /// `h^*(E(t h))` for `t = 0, -1, -2`.
    pub table: Vec<(i64, CohVector)>,
}

/// `E(h)` is Ulrich iff `h^i(E(t h)) = 0` for all `i` and `t = 0, -1, -2`.
pub fn ulrich_check<F: Field>(m: &Monad<F>, engine: EngineChoice) -> Result<UlrichReport> {
    if m.shape.charge() != 2 {
        return Err(Error::Precondition(format!(
            "the Ulrich check needs charge 2, got c2 = {}",
            m.shape.c2
        )));
    }
    let mut table = Vec::new();
    let mut failing = None;
    for t in [0, -1, -2] {
        let v = h_at(m, DivisorClass::new(t, t, t), engine)?;
        if failing.is_none() {
            failing = (0..4).find(|&i| v.0[i] != 0).map(|i| (i, t));
        }
        table.push((t, v));
    }
    Ok(UlrichReport {
        holds: failing.is_none(),
        failing,
        table,
    })
}

/// Explicit monads used as negative examples.
pub mod fixtures {
    use super::*;

    fn var<F: Field>(f: &F, factor: usize, j: usize) -> MultiForm<F::Elem> {
        MultiForm::var(f, factor, j)
    }

    /// `O(h1 - h2) + O(h2 - h1)` as a kernel-shape monad with `c2 = (0,0,2)`:
    /// two Euler sequences, `C = 0`. Strictly semistable, with sections of
    /// `E(h1 - h2)` and `E(h2 - h1)`.
    pub fn split_semistable<F: Field>(f: F) -> Monad<F> {
        let shape =
            MonadShape::new(ShapeKind::Kernel, CurveClass::new(0, 0, 2)).expect("admissible");
        let [a, b, c] = shape.terms().map(|t| t.twists());
        let mut alpha = FormMatrix::zeros(&b, &a);
        alpha.set(0, 0, var(&f, 1, 0));
        alpha.set(1, 0, var(&f, 1, 1));
        alpha.set(2, 1, var(&f, 0, 0));
        alpha.set(3, 1, var(&f, 0, 1));
        let beta = FormMatrix::zeros(&c, &b);
        Monad::new(shape, f, alpha, beta, None).expect("degrees match")
    }

    /// A global-shape monad with `c2 = (1,0,0)` whose cohomology is
    /// `O + K`: the first summand of `B = O^5` lies in `ker beta` and meets
    /// `im alpha` trivially, so `h^0(E) = 1`.
    pub fn global_with_section<F: Field>(f: F) -> Monad<F> {
        let shape =
            MonadShape::new(ShapeKind::Global, CurveClass::new(1, 0, 0)).expect("admissible");
        let [a, b, c] = shape.terms().map(|t| t.twists());
        let (y0, y1, z0, z1) = (var(&f, 1, 0), var(&f, 1, 1), var(&f, 2, 0), var(&f, 2, 1));
        let mut alpha = FormMatrix::zeros(&b, &a);
        alpha.set(0, 0, form_mul(&f, &y1, &z1));
        alpha.set(1, 0, form_mul(&f, &y1, &z0));
        alpha.set(2, 0, form_mul(&f, &y0, &z0).neg(&f));
        alpha.set(3, 0, form_mul(&f, &y0, &z1));
        alpha.set(4, 0, form_mul(&f, &y0, &z0).neg(&f));
        let mut beta = FormMatrix::zeros(&c, &b);
        let row_y = c
            .iter()
            .position(|d| *d == DivisorClass::new(0, 1, 0))
            .expect("summand");
        let row_z = c
            .iter()
            .position(|d| *d == DivisorClass::new(0, 0, 1))
            .expect("summand");
        beta.set(row_y, 1, y0);
        beta.set(row_y, 2, y1);
        beta.set(row_z, 3, z0);
        beta.set(row_z, 4, z1);
        Monad::new(shape, f, alpha, beta, None).expect("degrees match")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::classify_strictly_semistable;
    use crate::field::PrimeField;
    use crate::kunneth::h_x;
    use crate::monad::random_monad;

    #[test]
    fn candidate_counts() {
        for w in 0..=3i64 {
            let mut n = 0;
            for a in -w..=w {
                for b in -w..=w {
                    for c in -w..=w {
                        n += (a + b + c <= 0) as usize;
                    }
                }
            }
            assert_eq!(window_candidates(w).len(), n);
        }
        assert_eq!(window_candidates(1).len(), 17);
    }

    #[test]
    fn split_bundle_unstable_by_kunneth() {
        // O(B0) + O(-B0) with B0 = (1, 0, 0): a section of E(-B0) at degree -1.
        let b0 = DivisorClass::new(1, 0, 0);
        let v = hoppe_verdict(2, |b| Ok((h_x(b + b0, 0) + h_x(b - b0, 0)) as usize));
        assert_eq!(
            v.level,
            StabilityLevel::UnstableWitness {
                witness: DivisorClass::new(-1, 0, 0),
                h0: 1
            }
        );
    }

    #[test]
    fn semistable_fixture_has_degree_zero_witness() {
        let m = fixtures::split_semistable(PrimeField::default());
        assert!(validate_monad(&m, 32).is_valid());
        let v = hoppe_window_check(&m, 1, EngineChoice::Auto);
        let StabilityLevel::StrictlySemistableWitness { witness, h0 } = v.level else {
            panic!("{v:?}");
        };
        assert_eq!(witness.degree(), 0);
        assert_eq!(h0, 1);
        let cls = classify_strictly_semistable(1, -1);
        assert_eq!(cls.c2, m.shape.c2);
        let pattern = DivisorClass::new(1, -1, 0);
        assert!(witness == pattern || witness == -pattern, "{witness}");
        let r = verify_instanton(&m, 1, EngineChoice::Auto).unwrap();
        assert!(r.checks.iter().all(|c| c.passed), "{r:?}");
        assert!(!r.passed());
    }

    #[test]
    fn global_section_fails_h0_gate() {
        let m = fixtures::global_with_section(PrimeField::default());
        assert!(validate_monad(&m, 32).is_valid());
        let r = verify_instanton(&m, 1, EngineChoice::Auto).unwrap();
        let g = r.check("h0(E)").unwrap();
        assert!(!g.passed);
        assert_eq!(g.detail, "1");
    }

    #[test]
    fn generic_charge_two_is_instanton_and_ulrich() {
        let shape = MonadShape::new(ShapeKind::Kernel, CurveClass::new(1, 1, 0)).unwrap();
        let m = random_monad(shape, PrimeField::default(), 3, 20).unwrap();
        let r = verify_instanton(&m, 2, EngineChoice::Auto).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.check("h1(E)").unwrap().passed);
        let u = ulrich_check(&m, EngineChoice::Auto).unwrap();
        assert!(u.holds, "{u:?}");
    }

    #[test]
    fn ulrich_rejects_charge_three() {
        let shape = MonadShape::new(ShapeKind::Kernel, CurveClass::new(1, 1, 1)).unwrap();
        let m = random_monad(shape, PrimeField::default(), 3, 20).unwrap();
        assert!(matches!(
            ulrich_check(&m, EngineChoice::Auto),
            Err(Error::Precondition(_))
        ));
    }
}
