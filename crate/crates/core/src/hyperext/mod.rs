//! Cohomology `h^i(E(D))` of monad bundles and `ext^i(E, E)`.
//!
//! A monad `A -> B -> C` placed in degrees `-1, 0, 1` is quasi-isomorphic to
//! `E` in degree 0, so `h^i(E(D))` is the hypercohomology of the twisted
//! monad. When the long exact sequences of the display
//! `0 -> G -> B -> C -> 0`, `0 -> A -> G -> E -> 0` have a zero at every
//! connecting position, the dimensions follow from Künneth alone. Otherwise
//! the Čech engine computes them.

pub mod boxed;
pub mod cech;
pub mod complex;
pub mod reduced;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chow::{chi_twist, CurveClass, DivisorClass};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::kunneth::CohVector;
use crate::monad::Monad;

pub use complex::{hom_complex, LbComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "kebab-case")]
pub enum EngineTag {
    LesBookkeeping,
    CechReduced,
    CechBox { pad: i64 },
}

/// Which engine to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineChoice {
    /// LES bookkeeping when conclusive, otherwise the reduced Čech engine.
    Auto,
    Reduced,
    /// The bounded-box Čech complex at `pad`, checked against `pad + 2`.
    Box {
        pad: i64,
    },
}

impl Default for EngineChoice {
    fn default() -> Self {
        EngineChoice::Auto
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub twist: DivisorClass,
    pub dims: CohVector,
    pub engine: EngineTag,
    pub pad_used: Option<i64>,
}

/// `h^i` of the total complex for `i` in `start ..= end + 3`, by the chosen
/// Čech engine.
pub fn cech_dims<F: Field>(
    f: &F,
    cx: &LbComplex<F::Elem>,
    engine: EngineChoice,
) -> Result<(Vec<usize>, EngineTag)> {
    match engine {
        EngineChoice::Box { pad } => {
            let dims = boxed::box_cohomology(f, cx, pad);
            let next = boxed::box_cohomology(f, cx, pad + 2);
            if dims != next {
                let twist = cx
                    .columns
                    .iter()
                    .flatten()
                    .next()
                    .copied()
                    .unwrap_or_default();
                return Err(Error::PadInstability {
                    twist,
                    pad,
                    next: pad + 2,
                    dims_pad: dims,
                    dims_next: next,
                });
            }
            Ok((dims, EngineTag::CechBox { pad }))
        }
        _ => Ok((
            reduced::reduce(f, cx)?.cohomology(f),
            EngineTag::CechReduced,
        )),
    }
}

/// Splits total-complex dimensions into `h^0..h^3`, rejecting cohomology in
/// other degrees.
fn to_coh_vector(start: i64, dims: &[usize], what: &str) -> Result<CohVector> {
    let mut out = [0i64; 4];
    for (j, &d) in dims.iter().enumerate() {
        let n = start + j as i64;
        if (0..4).contains(&n) {
            out[n as usize] = d as i64;
        } else if d != 0 {
            return Err(Error::SpuriousCohomology(format!(
                "{what}: dimension {d} in degree {n}"
            )));
        }
    }
    Ok(CohVector(out))
}

/// Cohomology through the display sequences, when every connecting map is
/// forced to vanish.
pub fn les_fast_path(terms: [CohVector; 3]) -> Option<CohVector> {
    let [a, b, c] = terms.map(|t| t.0);
    let get = |v: &[i64; 4], i: i64| {
        if (0..4).contains(&i) {
            v[i as usize]
        } else {
            0
        }
    };
    if (0..4).any(|i| b[i] != 0 && c[i] != 0) {
        return None;
    }
    let g: [i64; 4] = [0, 1, 2, 3].map(|i| b[i as usize] + get(&c, i - 1));
    if (0..4).any(|i| a[i] != 0 && g[i] != 0) {
        return None;
    }
    Some(CohVector(
        [0, 1, 2, 3].map(|i| g[i as usize] + get(&a, i + 1)),
    ))
}

pub fn coh_monad_twist<F: Field>(
    m: &Monad<F>,
    d: DivisorClass,
    engine: EngineChoice,
) -> Result<CohomologyReport> {
    let expected = chi_twist(m.shape.c2, d)?;
    let (dims, tag, pad) = if engine == EngineChoice::Auto {
        let terms = m.shape.terms().map(|t| t.twisted(d).cohomology());
        match les_fast_path(terms) {
            Some(v) => (v, EngineTag::LesBookkeeping, None),
            None => cech_report(m, d, EngineChoice::Reduced)?,
        }
    } else {
        cech_report(m, d, engine)?
    };
    if dims.euler() != expected {
        return Err(Error::EulerMismatch {
            what: format!("E({d})"),
            computed: dims.euler(),
            expected,
        });
    }
    Ok(CohomologyReport {
        twist: d,
        dims,
        engine: tag,
        pad_used: pad,
    })
}

fn cech_report<F: Field>(
    m: &Monad<F>,
    d: DivisorClass,
    engine: EngineChoice,
) -> Result<(CohVector, EngineTag, Option<i64>)> {
    let cx = LbComplex::from_monad(m, d);
    let (dims, tag) = cech_dims(&m.field, &cx, engine)?;
    let v = to_coh_vector(cx.start, &dims, &format!("E({d})"))?;
    let pad = match tag {
        EngineTag::CechBox { pad } => Some(pad),
        _ => None,
    };
    Ok((v, tag, pad))
}

/// `-h, -h2-h3, -h1-h3, -h1-h2, -h3, -h2, -h1, 0`.
pub fn beilinson_twists() -> [DivisorClass; 8] {
    let d = DivisorClass::new;
    [
        d(-1, -1, -1),
        d(0, -1, -1),
        d(-1, 0, -1),
        d(-1, -1, 0),
        d(0, 0, -1),
        d(0, -1, 0),
        d(-1, 0, 0),
        d(0, 0, 0),
    ]
}

/// The table every instanton must reproduce: only `h^1` is nonzero, with
/// `h^1(E(-h_j-h_k)) = k_i`, `h^1(E(-h_i)) = k - k_i` and `h^1(E) = k - 2`.
pub fn expected_beilinson_table(c2: CurveClass) -> [CohVector; 8] {
    let [k1, k2, k3] = c2.0;
    let k = c2.charge();
    [0, k1, k2, k3, k - k3, k - k2, k - k1, k - 2].map(|h1| CohVector([0, h1, 0, 0]))
}

pub fn beilinson_table<F: Field>(
    m: &Monad<F>,
    engine: EngineChoice,
) -> Result<Vec<CohomologyReport>> {
    beilinson_twists()
        .par_iter()
        .map(|d| coh_monad_twist(m, *d, engine))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepResult {
    pub holds: bool,
    pub checked: usize,
    /// First effective `D` (in sweep order) with `h^0` or `h^1` of `E(-h-D)` nonzero.
    pub violation: Option<(DivisorClass, CohVector)>,
}

/// Checks `h^0(E(-h-D)) = h^1(E(-h-D)) = 0` for all effective `D` with
/// components at most `limit`.
pub fn vanishing_sweep<F: Field>(
    m: &Monad<F>,
    limit: i64,
    engine: EngineChoice,
) -> Result<SweepResult> {
    let mut divisors = Vec::new();
    for a in 0..=limit {
        for b in 0..=limit {
            for c in 0..=limit {
                divisors.push(DivisorClass::new(a, b, c));
            }
        }
    }
    let reports: Vec<CohomologyReport> = divisors
        .par_iter()
        .map(|d| coh_monad_twist(m, -DivisorClass::H - *d, engine))
        .collect::<Result<_>>()?;
    let violation = divisors
        .iter()
        .zip(&reports)
        .find(|(_, r)| r.dims.0[0] != 0 || r.dims.0[1] != 0)
        .map(|(d, r)| (*d, r.dims));
    Ok(SweepResult {
        holds: violation.is_none(),
        checked: divisors.len(),
        violation,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtReport {
    /// `(hom, ext1, ext2, ext3)`.
    pub dims: [i64; 4],
    pub engine: EngineTag,
}

pub const DEFAULT_EXT_CHARGE_BOUND: i64 = 4;

pub fn ext_dims<F: Field>(
    m: &Monad<F>,
    max_charge: i64,
    engine: EngineChoice,
) -> Result<ExtReport> {
    let k = m.shape.charge();
    if k > max_charge {
        return Err(Error::Precondition(format!(
            "charge {k} exceeds the Ext bound {max_charge}"
        )));
    }
    let cx = hom_complex(m);
    let engine = if engine == EngineChoice::Auto {
        EngineChoice::Reduced
    } else {
        engine
    };
    let (dims, tag) = cech_dims(&m.field, &cx, engine)?;
    let v = to_coh_vector(cx.start, &dims, "Ext(E,E)")?;
    let expected = 4 - 4 * k;
    if v.euler() != expected {
        return Err(Error::EulerMismatch {
            what: "chi(E,E)".into(),
            computed: v.euler(),
            expected,
        });
    }
    Ok(ExtReport {
        dims: v.0,
        engine: tag,
    })
}
