//! Lines of the three rulings of `X`, restriction of monads to lines,
//! splitting types and the jumping divisor.
//!
//! The lines of family `i` are `P1` in factor `i` times a point of the other
//! two factors, so each family is parametrized by `H = P1 x P1`. The pair
//! `(p, q)` holds the points of the remaining factors in increasing order.
//!
//! A restricted monad is stored on `X` with every twist concentrated in the
//! first factor: its hypercohomology is then that of the monad on the line.

use std::any::Any;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chow::DivisorClass;
use crate::error::{Error, Result};
use crate::field::{ExtensionField, Field, PrimeField};
use crate::hyperext::reduced::{reduce, Reduced};
use crate::hyperext::LbComplex;
use crate::linalg::{self, Matrix};
use crate::monad::{FormMatrix, Monad};
use crate::multipoly::{
    affine_grid, interpolate_bihomogeneous, BiForm, Exponents, MultiDegree, MultiForm,
};
use crate::univariate::{roots_mod_p, smallest_irreducible_factor};

/// Number of zero-set and generic holdout points checked by
/// [`jumping_divisor`].
pub const HOLDOUT_POINTS: usize = 20;

/// The two factors (0-based, increasing) parametrizing lines of `family`.
pub fn parameter_factors(family: usize) -> [usize; 2] {
    match family {
        1 => [1, 2],
        2 => [0, 2],
        3 => [0, 1],
        _ => panic!("line family must be 1, 2 or 3"),
    }
}

/// The line of family `index` through the points `p`, `q` of the other two
/// factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineFamily<E> {
    pub index: usize,
    pub p: [E; 2],
    pub q: [E; 2],
}

impl<E: Clone> LineFamily<E> {
    pub fn new<F: Field<Elem = E>>(f: &F, index: usize, p: [E; 2], q: [E; 2]) -> Result<Self> {
        if !(1..=3).contains(&index) {
            return Err(Error::Precondition(format!(
                "line family must be 1, 2 or 3, got {index}"
            )));
        }
        if [&p, &q]
            .iter()
            .any(|c| f.is_zero(&c[0]) && f.is_zero(&c[1]))
        {
            return Err(Error::Precondition(
                "projective coordinates all zero".into(),
            ));
        }
        Ok(LineFamily { index, p, q })
    }

    /// The line over the affine parameter point `([1:s], [1:t])`.
    pub fn affine<F: Field<Elem = E>>(f: &F, index: usize, s: E, t: E) -> Result<Self> {
        Self::new(f, index, [f.one(), s], [f.one(), t])
    }

    fn factor_point(&self, factor: usize) -> Option<&[E; 2]> {
        let [a, b] = parameter_factors(self.index);
        if factor == a {
            Some(&self.p)
        } else if factor == b {
            Some(&self.q)
        } else {
            None
        }
    }
}

/// `(d1, d2)` with `d1 >= d2`: `E|_L = O(d1) + O(d2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingType(pub i64, pub i64);

impl SplittingType {
    pub fn is_trivial(&self) -> bool {
        *self == SplittingType(0, 0)
    }
}

/// A monad restricted to a line. Twists are degrees on the line.
#[derive(Clone, Debug, PartialEq)]
pub struct LineMonad<E> {
    pub family: usize,
    pub twists: [Vec<i64>; 3],
    pub alpha: FormMatrix<E>,
    pub beta: FormMatrix<E>,
}

impl<E: Clone + PartialEq> LineMonad<E> {
    /// The restricted monad twisted by `O(t)`, as a complex in degrees
    /// `-1, 0, 1`.
    pub fn complex(&self, t: i64) -> LbComplex<E> {
        LbComplex {
            start: -1,
            columns: self
                .twists
                .iter()
                .map(|c| c.iter().map(|&a| DivisorClass::new(a + t, 0, 0)).collect())
                .collect(),
            maps: vec![self.alpha.clone(), self.beta.clone()],
        }
    }
}

fn restrict_form<F: Field>(
    f: &F,
    form: &MultiForm<F::Elem>,
    line: &LineFamily<F::Elem>,
) -> MultiForm<F::Elem> {
    let i = line.index - 1;
    let deg = MultiDegree([form.degree.0[i], 0, 0]);
    let terms = form.terms().map(|(e, c)| {
        let mut coeff = c.clone();
        for fct in 0..3 {
            if let Some(pt) = line.factor_point(fct) {
                for j in 0..2 {
                    let exp = e[2 * fct + j];
                    if exp > 0 {
                        coeff = f.mul(&coeff, &f.pow(&pt[j], exp as u64));
                    }
                }
            }
        }
        let mut out: Exponents = [0; 6];
        out[0] = e[2 * i];
        out[1] = e[2 * i + 1];
        (out, coeff)
    });
    MultiForm::from_terms(f, deg, terms).expect("restricted monomials share the degree")
}

fn restrict_matrix<F: Field>(
    f: &F,
    m: &FormMatrix<F::Elem>,
    line: &LineFamily<F::Elem>,
) -> FormMatrix<F::Elem> {
    let mut out = m.clone();
    for r in 0..m.rows {
        for c in 0..m.cols {
            out.set(r, c, restrict_form(f, m.get(r, c), line));
        }
    }
    out
}

/// Each `O_X(a)` becomes `O(a_i)`, each entry is evaluated at the fixed
/// points of the other two factors.
pub fn restrict_monad<F: Field>(m: &Monad<F>, line: &LineFamily<F::Elem>) -> LineMonad<F::Elem> {
    let i = line.index - 1;
    let twists = m.twists().map(|c| c.iter().map(|d| d.0[i]).collect());
    LineMonad {
        family: line.index,
        twists,
        alpha: restrict_matrix(&m.field, &m.alpha, line),
        beta: restrict_matrix(&m.field, &m.beta, line),
    }
}

/// Splitting data of `E` on one line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineReport {
    pub splitting: SplittingType,
    /// `alpha` or `beta` drops rank somewhere on the line, so the restriction
    /// is not a monad and `splitting` is meaningless.
    pub degenerate: bool,
}

impl LineReport {
    pub fn is_jumping(&self) -> bool {
        self.degenerate || !self.splitting.is_trivial()
    }
}

/// The square transferred differential from degree 0 to degree 1 of the
/// restricted monad twisted by `O(-1)`; its corank is `h^0(E|_L(-1))`.
fn jump_matrix<F: Field>(f: &F, lm: &LineMonad<F::Elem>) -> Result<Matrix<F::Elem>> {
    let red = reduce(f, &lm.complex(-1))?;
    let size = |n: i64| red.degree_index(n).map_or(0, |j| red.basis[j].len());
    if size(-1) != 0 || size(2) != 0 || size(0) != size(1) {
        return Err(Error::Precondition(format!(
            "restricted monad twisted by -1 has reduced sizes {:?}",
            red.basis.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let j = red.degree_index(0).expect("degree 0 present");
    if size(0) == 0 {
        return Ok(Matrix::filled(0, 0, f.zero()));
    }
    Ok(red.diffs[j].clone())
}

fn hyper<F: Field>(f: &F, lm: &LineMonad<F::Elem>, t: i64, n: i64) -> Result<usize> {
    let red: Reduced<F::Elem> = reduce(f, &lm.complex(t))?;
    let dims = red.cohomology(f);
    Ok(red.degree_index(n).map_or(0, |j| dims[j]))
}

/// A rank-two bundle with `c1 = 0` on `P1` splitting as `(r, -r)` has
/// `h^0(E(-1)) = r`, and `r` is bounded by the size of the square jump
/// matrix. Torsion in either cohomology sheaf of a degenerate restriction
/// survives every twist, which the extreme twists `-big` and `+big` detect.
pub fn line_report<F: Field>(m: &Monad<F>, line: &LineFamily<F::Elem>) -> Result<LineReport> {
    let f = &m.field;
    let lm = restrict_monad(m, line);
    let jm = jump_matrix(f, &lm)?;
    let r = (jm.rows - linalg::rank(f, &jm)) as i64;
    let big = jm.rows as i64 + 2;
    let degenerate = hyper(f, &lm, -big, 0)? > 0 || hyper(f, &lm, big, 1)? > 0;
    Ok(LineReport {
        splitting: SplittingType(r, -r),
        degenerate,
    })
}

pub fn splitting_type<F: Field>(m: &Monad<F>, line: &LineFamily<F::Elem>) -> Result<SplittingType> {
    let rep = line_report(m, line)?;
    if rep.degenerate {
        return Err(Error::Precondition(format!(
            "the monad degenerates on the family-{} line",
            line.index
        )));
    }
    Ok(rep.splitting)
}

/// `h^0(E|_L(-1)) > 0`; degenerate restrictions count as jumping.
pub fn is_jumping<F: Field>(m: &Monad<F>, line: &LineFamily<F::Elem>) -> Result<bool> {
    Ok(line_report(m, line)?.is_jumping())
}

/// Expected bidegree `(deg_p, deg_q)` of the jumping divisor of `family`:
/// `(k3, k2)`, `(k3, k1)`, `(k2, k1)`.
pub fn expected_bidegree(c2: [i64; 3], family: usize) -> (usize, usize) {
    let [k1, k2, k3] = c2.map(|k| k as usize);
    match family {
        1 => (k3, k2),
        2 => (k3, k1),
        3 => (k2, k1),
        _ => panic!("line family must be 1, 2 or 3"),
    }
}

/// Default grid side for the given expected bidegree.
pub fn default_grid(bidegree: (usize, usize)) -> usize {
    bidegree.0.max(bidegree.1) + 3
}

/// The determinant of the jump matrix at the affine parameter `(s, t)`: a
/// polynomial whose zero set is the set of jumping lines.
pub fn jump_determinant<F: Field>(
    m: &Monad<F>,
    family: usize,
    s: &F::Elem,
    t: &F::Elem,
) -> Result<F::Elem> {
    let f = &m.field;
    let line = LineFamily::affine(f, family, s.clone(), t.clone())?;
    let jm = jump_matrix(f, &restrict_monad(m, &line))?;
    Ok(linalg::determinant(f, &jm))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoldoutReport {
    /// Points of the zero set of the interpolant that were tested.
    pub zero_points: usize,
    pub zero_points_jumping: usize,
    /// Zero-set points defined only over an extension of `F_p`.
    pub extension_points: usize,
    pub generic_points: usize,
    pub generic_nonzero: usize,
    /// Generic points where the interpolant equals the sampled determinant.
    pub generic_matching: usize,
    /// Points (grid and holdout) where jumping and vanishing disagree.
    pub inconsistent: usize,
    /// Lines on which the monad degenerates.
    pub degenerate: usize,
    /// Set when the field has no root finding, so zero-set points are skipped.
    pub zero_set_skipped: bool,
}

impl HoldoutReport {
    pub fn passed(&self) -> bool {
        self.zero_points_jumping == self.zero_points
            && self.generic_nonzero == self.generic_points
            && self.generic_matching == self.generic_points
            && self.inconsistent == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpingDivisor<E> {
    pub family: usize,
    pub expected: (usize, usize),
    /// Bidegree of the exact fit on the full grid.
    pub observed: (usize, usize),
    /// The interpolant of the expected bidegree, normalized so that its first
    /// nonzero graded-lex coefficient is 1. `None` when the samples are
    /// inconsistent with the expected bidegree.
    pub polynomial: Option<BiForm<E>>,
    pub grid_size: usize,
    pub holdout: HoldoutReport,
}

impl<E: Clone> JumpingDivisor<E> {
    pub fn is_generic(&self) -> bool {
        self.polynomial.is_some() && self.observed == self.expected && self.holdout.passed()
    }

    pub fn failure(&self) -> Option<String> {
        if self.polynomial.is_none() {
            return Some(format!(
                "samples are inconsistent with bidegree {:?}; exact fit has bidegree {:?}",
                self.expected, self.observed
            ));
        }
        if self.observed != self.expected {
            return Some(format!(
                "divisor has bidegree {:?}, expected {:?}",
                self.observed, self.expected
            ));
        }
        if !self.holdout.passed() {
            return Some(format!("holdout check failed: {:?}", self.holdout));
        }
        None
    }

    /// Turns a non-generic outcome into [`Error::NonGenericDivisor`].
    pub fn into_result(self) -> Result<Self> {
        match self.failure() {
            Some(msg) => Err(Error::NonGenericDivisor(msg)),
            None => Ok(self),
        }
    }
}

/// Monomials `s^i t^j` of bidegree at most `(d, e)`, by total degree and
/// then by descending power of `s`.
pub fn graded_lex(d: usize, e: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..=d).flat_map(|i| (0..=e).map(move |j| (i, j))).collect();
    out.sort_by_key(|&(i, j)| (i + j, std::cmp::Reverse(i)));
    out
}

fn normalize<F: Field>(f: &F, p: BiForm<F::Elem>) -> BiForm<F::Elem> {
    let lead = graded_lex(p.d, p.e)
        .into_iter()
        .map(|(i, j)| p.coeff(i, j).clone())
        .find(|c| !f.is_zero(c));
    match lead.and_then(|c| f.inv(&c)) {
        Some(inv) => BiForm {
            coeffs: p.coeffs.iter().map(|c| f.mul(c, &inv)).collect(),
            ..p
        },
        None => p,
    }
}

/// Univariate polynomial in `t` obtained by fixing `s`.
fn restrict_s<F: Field>(f: &F, p: &BiForm<F::Elem>, s: &F::Elem) -> Vec<F::Elem> {
    (0..=p.e)
        .map(|j| {
            (0..=p.d)
                .rev()
                .fold(f.zero(), |acc, i| f.add(&f.mul(&acc, s), p.coeff(i, j)))
        })
        .collect()
}

/// Up to `n` points of the zero set of `p`, found by fixing one coordinate
/// at random and solving for the other. `None` if the field cannot find
/// roots.
fn zero_points<F: Field>(
    f: &F,
    p: &BiForm<F::Elem>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<(F::Elem, F::Elem)>> {
    let mut out = Vec::new();
    if p.is_zero(f) || (p.d == 0 && p.e == 0) {
        return Some(out);
    }
    let mut tries = 0;
    while out.len() < n && tries < 8 * n {
        tries += 1;
        if p.d > 0 {
            let t = f.random(rng);
            for s in f.roots(&p.restrict_t(f, &t))? {
                out.push((s, t.clone()));
            }
        } else {
            let s = f.random(rng);
            for t in f.roots(&restrict_s(f, p, &s))? {
                out.push((s.clone(), t));
            }
        }
    }
    out.truncate(n);
    Some(out)
}

/// A zero-set point over `F_p`, or over `F_p[x]/(modulus)` with the solved
/// coordinate equal to the class of `x`.
enum ZeroPoint {
    Rational(u64, u64),
    Extension {
        modulus: Vec<u64>,
        fixed: u64,
        fixed_is_t: bool,
    },
}

/// Up to `n` points of the zero set over `F_p`, falling back to a residue
/// field `F_p[x]/(h)` of a point when a fibre has no `F_p` points.
fn prime_zero_points(
    f: &PrimeField,
    p: &BiForm<u64>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<ZeroPoint> {
    let mut out = Vec::new();
    if p.is_zero(f) || (p.d == 0 && p.e == 0) {
        return out;
    }
    let mut tries = 0;
    while out.len() < n && tries < 8 * n {
        tries += 1;
        let fixed = f.random(rng);
        let fixed_is_t = p.d > 0;
        let u = if fixed_is_t {
            p.restrict_t(f, &fixed)
        } else {
            restrict_s(f, p, &fixed)
        };
        let roots = roots_mod_p(f, &u);
        if roots.is_empty() {
            if let Some(modulus) = smallest_irreducible_factor(f, &u) {
                out.push(ZeroPoint::Extension {
                    modulus,
                    fixed,
                    fixed_is_t,
                });
            }
        }
        for r in roots {
            out.push(if fixed_is_t {
                ZeroPoint::Rational(r, fixed)
            } else {
                ZeroPoint::Rational(fixed, r)
            });
        }
    }
    out.truncate(n);
    out
}

fn prime_zero_reports(
    m: &Monad<PrimeField>,
    family: usize,
    p: &BiForm<u64>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(bool, LineReport)>> {
    let f = &m.field;
    prime_zero_points(f, p, n, rng)
        .par_iter()
        .map(|pt| match pt {
            ZeroPoint::Rational(s, t) => Ok((
                false,
                line_report(m, &LineFamily::affine(f, family, *s, *t)?)?,
            )),
            ZeroPoint::Extension {
                modulus,
                fixed,
                fixed_is_t,
            } => {
                let ext = ExtensionField::new(*f, modulus.clone()).map_err(Error::FieldMismatch)?;
                let mx = m.base_change(ext.clone(), |c| ext.embed(*c));
                let (root, fixed) = (ext.generator(), ext.embed(*fixed));
                let (s, t) = if *fixed_is_t {
                    (root, fixed)
                } else {
                    (fixed, root)
                };
                Ok((
                    true,
                    line_report(&mx, &LineFamily::affine(&ext, family, s, t)?)?,
                ))
            }
        })
        .collect()
}

/// Line reports at up to `n` points of the zero set of `p`, each flagged
/// when the point needed an extension field. `None` when the field has no
/// root finding.
fn zero_set_reports<F: Field>(
    m: &Monad<F>,
    family: usize,
    p: &BiForm<F::Elem>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vec<(bool, LineReport)>>> {
    let any_m: &dyn Any = m;
    let any_p: &dyn Any = p;
    if let (Some(mp), Some(pp)) = (
        any_m.downcast_ref::<Monad<PrimeField>>(),
        any_p.downcast_ref::<BiForm<u64>>(),
    ) {
        return prime_zero_reports(mp, family, pp, n, rng).map(Some);
    }
    let f = &m.field;
    let Some(zs) = zero_points(f, p, n, rng) else {
        return Ok(None);
    };
    zs.par_iter()
        .map(|(s, t)| {
            Ok((
                false,
                line_report(m, &LineFamily::affine(f, family, s.clone(), t.clone())?)?,
            ))
        })
        .collect::<Result<_>>()
        .map(Some)
}

/// Samples the jump determinant on a `grid x grid` affine grid, fits the
/// expected bidegree, and checks the fit on fresh points.
pub fn jumping_divisor<F: Field>(
    m: &Monad<F>,
    family: usize,
    grid: Option<usize>,
    seed: u64,
) -> Result<JumpingDivisor<F::Elem>> {
    if !(1..=3).contains(&family) {
        return Err(Error::Precondition(format!(
            "line family must be 1, 2 or 3, got {family}"
        )));
    }
    let f = &m.field;
    let expected = expected_bidegree(m.shape.c2.0, family);
    let g = grid.unwrap_or_else(|| default_grid(expected));
    if g < expected.0.max(expected.1) + 2 {
        return Err(Error::Precondition(format!(
            "grid {g} is too small to test bidegree {expected:?} (need at least {})",
            expected.0.max(expected.1) + 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = affine_grid(f, g, g, &mut rng);
    let values: Vec<F::Elem> = points
        .par_iter()
        .map(|(s, t)| jump_determinant(m, family, s, t))
        .collect::<Result<_>>()?;
    let samples: Vec<(F::Elem, F::Elem, F::Elem)> = points
        .iter()
        .zip(&values)
        .map(|((s, t), v)| (s.clone(), t.clone(), v.clone()))
        .collect();
    let full = interpolate_bihomogeneous(f, &samples, g - 1, g - 1)?;
    let observed = full.support_degree(f);
    let polynomial = match interpolate_bihomogeneous(f, &samples, expected.0, expected.1) {
        Ok(p) => Some(normalize(f, p)),
        Err(Error::Interpolation(_)) => None,
        Err(e) => return Err(e),
    };
    let mut holdout = HoldoutReport::default();
    // Vanishing of the determinant and jumping must agree at grid points
    // where the determinant vanishes; elsewhere the jump matrix is
    // invertible and the line is not jumping by construction.
    let grid_zeros: Vec<&(F::Elem, F::Elem)> = points
        .iter()
        .zip(&values)
        .filter(|(_, v)| f.is_zero(v))
        .map(|(p, _)| p)
        .collect();
    for (s, t) in grid_zeros {
        let rep = line_report(m, &LineFamily::affine(f, family, s.clone(), t.clone())?)?;
        holdout.degenerate += rep.degenerate as usize;
        holdout.inconsistent += (!rep.is_jumping()) as usize;
    }
    if let Some(p) = &polynomial {
        let generic: Vec<(F::Elem, F::Elem)> = (0..HOLDOUT_POINTS)
            .map(|_| (f.random(&mut rng), f.random(&mut rng)))
            .collect();
        let checks: Vec<(bool, bool, LineReport)> = generic
            .par_iter()
            .map(|(s, t)| {
                let v = p.eval(f, s, t);
                let det = jump_determinant(m, family, s, t)?;
                // The interpolant is normalized, so compare up to the
                // common scalar fixed by the grid fit.
                let rep = line_report(m, &LineFamily::affine(f, family, s.clone(), t.clone())?)?;
                Ok((!f.is_zero(&v), proportional(f, &v, &det, p, &samples), rep))
            })
            .collect::<Result<_>>()?;
        for (nonzero, matching, rep) in checks {
            holdout.generic_points += 1;
            holdout.generic_nonzero += nonzero as usize;
            holdout.generic_matching += matching as usize;
            holdout.degenerate += rep.degenerate as usize;
            holdout.inconsistent += (rep.is_jumping() == nonzero) as usize;
        }
        match zero_set_reports(m, family, p, HOLDOUT_POINTS, &mut rng)? {
            None => holdout.zero_set_skipped = true,
            Some(reps) => {
                for (extension, rep) in reps {
                    holdout.zero_points += 1;
                    holdout.extension_points += extension as usize;
                    holdout.zero_points_jumping += rep.is_jumping() as usize;
                    holdout.degenerate += rep.degenerate as usize;
                    holdout.inconsistent += (!rep.is_jumping()) as usize;
                }
            }
        }
    }
    Ok(JumpingDivisor {
        family,
        expected,
        observed,
        polynomial,
        grid_size: g,
        holdout,
    })
}

/// `v / p(s0, t0) == det / value(s0, t0)` for the first grid sample with a
/// nonzero value, i.e. the normalized interpolant and the determinant differ
/// by the same scalar as on the grid.
fn proportional<F: Field>(
    f: &F,
    v: &F::Elem,
    det: &F::Elem,
    p: &BiForm<F::Elem>,
    samples: &[(F::Elem, F::Elem, F::Elem)],
) -> bool {
    let Some((s0, t0, d0)) = samples.iter().find(|(_, _, d)| !f.is_zero(d)) else {
        return f.is_zero(det) && f.is_zero(v);
    };
    let p0 = p.eval(f, s0, t0);
    f.mul(v, d0) == f.mul(det, &p0)
}
