//! Random monads.
//!
//! Kernel shape: start from a charge-2 monad (`C = 0`, `alpha` random) and
//! raise `c2` by one line class at a time. Each step glues the Koszul complex
//! of a random line `l` onto the current monad through a random solution of
//! the linear gluing condition (its cohomology is `ker(E -> O_l)`), then
//! replaces `alpha` by a random element of `{alpha : beta alpha = 0}` to smooth
//! the result. Global shape: convert a kernel-shape monad through the Euler
//! sequences `0 -> O(-h_i) -> O^2 -> O(h_i) -> 0`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{fiber_verdicts, validate_monad, FormMatrix, Monad, MonadShape, ShapeKind};
use crate::chow::{CurveClass, DivisorClass};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{self, Matrix, Solve};
use crate::multipoly::{monomial_basis, random_form, MultiDegree, MultiForm, PointOnX};

/// Retries of a single induction step before the attempt is abandoned.
const STEP_RETRIES: usize = 4;
/// Smoothing rounds per gluing.
const WALK_ROUNDS: usize = 3;
const CHECK_POINTS: usize = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub attempts: usize,
    /// Failure mode -> count, over all attempts and inner retries.
    pub failures: BTreeMap<String, usize>,
}

impl GenerationStats {
    fn record(&mut self, mode: &str) {
        *self.failures.entry(mode.to_string()).or_default() += 1;
    }
}

pub fn random_monad<F: Field>(
    shape: MonadShape,
    field: F,
    seed: u64,
    max_attempts: usize,
) -> Result<Monad<F>> {
    random_monad_with_stats(shape, field, seed, max_attempts).map(|(m, _)| m)
}

pub fn random_monad_with_stats<F: Field>(
    shape: MonadShape,
    field: F,
    seed: u64,
    max_attempts: usize,
) -> Result<(Monad<F>, GenerationStats)> {
    if shape.charge() < 2 {
        return Err(Error::InvalidShape(format!(
            "no instanton monads below charge 2 (c2 = {})",
            shape.c2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = GenerationStats::default();
    let mut last = String::from("no attempts made");
    for _ in 0..max_attempts {
        stats.attempts += 1;
        let built =
            kernel_monad(&field, shape.c2, &mut rng, &mut stats).and_then(|m| match shape.kind {
                ShapeKind::Kernel => Ok(m),
                ShapeKind::Global => globalize(&m, &mut rng),
            });
        let m = match built {
            Ok(m) => Monad {
                seed: Some(seed),
                ..m
            },
            Err(e) => {
                last = e.to_string();
                stats.record(&last);
                continue;
            }
        };
        let v = validate_monad(&m, CHECK_POINTS);
        match v.failure_mode() {
            None => return Ok((m, stats)),
            Some(mode) => {
                last = mode.to_string();
                stats.record(mode);
            }
        }
    }
    Err(Error::GenerationExhausted {
        attempts: max_attempts,
        last,
    })
}

/// A monad with summands in arbitrary order.
#[derive(Clone, Debug)]
struct Work<E> {
    a: Vec<DivisorClass>,
    b: Vec<DivisorClass>,
    c: Vec<DivisorClass>,
    alpha: FormMatrix<E>,
    beta: FormMatrix<E>,
}

fn kernel_monad<F: Field, R: Rng>(
    f: &F,
    c2: CurveClass,
    rng: &mut R,
    stats: &mut GenerationStats,
) -> Result<Monad<F>> {
    let (base, steps) = induction_plan(c2);
    let mut work = None;
    for _ in 0..STEP_RETRIES {
        let w = charge_two(f, base, rng)?;
        if fibers_ok(f, &w, rng) {
            work = Some(w);
            break;
        }
        stats.record("charge-2 alpha drops rank");
    }
    let mut work = work.ok_or_else(|| Error::Precondition("no valid charge-2 alpha".into()))?;
    for family in steps {
        let mut next = None;
        'retry: for _ in 0..STEP_RETRIES {
            let mut w = glue_line(f, &work, family, rng)?;
            for _ in 0..WALK_ROUNDS {
                alpha_step(f, &mut w, rng);
                if fibers_ok(f, &w, rng) {
                    next = Some(w);
                    break 'retry;
                }
                beta_step(f, &mut w, rng);
            }
            stats.record("induction step did not smooth");
        }
        work = next.ok_or_else(|| {
            Error::Precondition(format!("could not add a line of family {}", family + 1))
        })?;
    }
    canonical(f, work, c2)
}

/// Charge-2 starting class and the families (0-based) added afterwards.
fn induction_plan(c2: CurveClass) -> ([i64; 3], Vec<usize>) {
    let nonzero: Vec<usize> = (0..3).filter(|&i| c2.0[i] > 0).collect();
    let mut base = [0i64; 3];
    if nonzero.len() >= 2 {
        base[nonzero[0]] = 1;
        base[nonzero[1]] = 1;
    } else {
        base[nonzero[0]] = 2;
    }
    let mut steps = Vec::new();
    for i in 0..3 {
        for _ in base[i]..c2.0[i] {
            steps.push(i);
        }
    }
    (base, steps)
}

fn charge_two<F: Field, R: Rng>(f: &F, c2: [i64; 3], rng: &mut R) -> Result<Work<F::Elem>> {
    let shape = MonadShape::new(ShapeKind::Kernel, CurveClass(c2))?;
    let [a, b, c] = shape.terms().map(|t| t.twists());
    let mut alpha = FormMatrix::zeros(&b, &a);
    for (r, bt) in b.iter().enumerate() {
        for (col, at) in a.iter().enumerate() {
            let d = MultiDegree((*bt - *at).0);
            if d.is_nonnegative() {
                alpha.set(r, col, random_form(f, d, rng)?);
            }
        }
    }
    let beta = FormMatrix::zeros(&c, &b);
    Ok(Work {
        a,
        b,
        c,
        alpha,
        beta,
    })
}

fn fibers_ok<F: Field, R: Rng>(f: &F, w: &Work<F::Elem>, rng: &mut R) -> bool {
    let points: Vec<_> = (0..CHECK_POINTS)
        .map(|_| PointOnX::random(f, rng))
        .collect();
    let (a, b) = fiber_verdicts(f, &w.alpha, &w.beta, &points);
    a.is_ok() && b.is_ok()
}

/// Linear form in factor `i` vanishing at `[p0 : p1]`.
fn vanishing_form<F: Field>(f: &F, i: usize, p: &[F::Elem; 2]) -> MultiForm<F::Elem> {
    let x0 = MultiForm::var(f, i, 0).scale(f, &p[1]);
    let x1 = MultiForm::var(f, i, 1).scale(f, &p[0]);
    x0.add(f, &x1.neg(f)).expect("same degree")
}

fn random_p1<F: Field, R: Rng>(f: &F, rng: &mut R) -> [F::Elem; 2] {
    loop {
        let p = [f.random(rng), f.random(rng)];
        if !(f.is_zero(&p[0]) && f.is_zero(&p[1])) {
            return p;
        }
    }
}

/// One linear equation `sum_j coeff_j * x_{unknown_j} = 0` among forms, valued
/// in forms of degree `target`.
struct Equation<'a, E> {
    target: MultiDegree,
    terms: Vec<(usize, &'a MultiForm<E>)>,
}

/// A uniformly random solution of a homogeneous linear system whose unknowns
/// are forms of the given degrees.
fn random_solution<F: Field, R: Rng>(
    f: &F,
    unknowns: &[MultiDegree],
    equations: &[Equation<'_, F::Elem>],
    rng: &mut R,
) -> Vec<MultiForm<F::Elem>> {
    let bases: Vec<_> = unknowns.iter().map(|d| monomial_basis(*d)).collect();
    let mut offsets = Vec::with_capacity(bases.len());
    let mut ncols = 0;
    for b in &bases {
        offsets.push(ncols);
        ncols += b.len();
    }
    let mut rows: Vec<Vec<F::Elem>> = Vec::new();
    for eq in equations {
        let target = monomial_basis(eq.target);
        let start = rows.len();
        rows.extend((0..target.len()).map(|_| vec![f.zero(); ncols]));
        for (j, coeff) in &eq.terms {
            for (e, c) in coeff.terms() {
                for (m, mono) in bases[*j].iter().enumerate() {
                    let mut prod = *mono;
                    for (x, y) in prod.iter_mut().zip(e) {
                        *x += y;
                    }
                    let row = target
                        .binary_search(&prod)
                        .expect("product lies in target degree");
                    let cell = &mut rows[start + row][offsets[*j] + m];
                    *cell = f.add(cell, c);
                }
            }
        }
    }
    let kernel = linalg::kernel(f, &Matrix::from_rows(ncols, rows));
    let mut x = vec![f.zero(); ncols];
    for v in &kernel {
        let r = f.random(rng);
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi = f.mul_add(xi, &r, vi);
        }
    }
    bases
        .iter()
        .zip(unknowns)
        .zip(&offsets)
        .map(|((b, d), off)| {
            MultiForm::from_terms(
                f,
                *d,
                b.iter().enumerate().map(|(m, e)| (*e, x[off + m].clone())),
            )
            .expect("basis monomials have the right degree")
        })
        .collect()
}

/// Glue the Koszul complex of a random line of `family` onto `w`.
fn glue_line<F: Field, R: Rng>(
    f: &F,
    w: &Work<F::Elem>,
    family: usize,
    rng: &mut R,
) -> Result<Work<F::Elem>> {
    let others: Vec<usize> = (0..3).filter(|&i| i != family).collect();
    let (j, m) = (others[0], others[1]);
    let lj = vanishing_form(f, j, &random_p1(f, rng));
    let lm = vanishing_form(f, m, &random_p1(f, rng));
    let hj = DivisorClass::basis(j);
    let hm = DivisorClass::basis(m);
    let a_new = -hj - hm;
    let b_new = [-hj, -hm];
    let kappa2 = [lj.clone(), lm.clone()];
    let kappa1 = [lm, lj.neg(f)];

    let (na, nb) = (w.a.len(), w.b.len());
    // Unknowns: phi0[r] (B -> O), then phi1[t][c] (A -> B_new).
    let mut unknowns: Vec<MultiDegree> = w.b.iter().map(|b| MultiDegree((-*b).0)).collect();
    for bt in &b_new {
        for at in &w.a {
            unknowns.push(MultiDegree((*bt - *at).0));
        }
    }
    let equations: Vec<Equation<'_, F::Elem>> = (0..na)
        .map(|c| {
            let mut terms: Vec<(usize, &MultiForm<F::Elem>)> = (0..nb)
                .filter(|&r| !w.alpha.get(r, c).is_zero())
                .map(|r| (r, w.alpha.get(r, c)))
                .collect();
            for (t, k) in kappa2.iter().enumerate() {
                terms.push((nb + t * na + c, k));
            }
            Equation {
                target: MultiDegree((-w.a[c]).0),
                terms,
            }
        })
        .collect();
    let sol = random_solution(f, &unknowns, &equations, rng);

    let mut a = w.a.clone();
    a.push(a_new);
    let mut b = w.b.clone();
    b.extend(b_new);
    let mut c = w.c.clone();
    c.push(DivisorClass::ZERO);
    let mut alpha = FormMatrix::zeros(&b, &a);
    let mut beta = FormMatrix::zeros(&c, &b);
    for r in 0..nb {
        for col in 0..na {
            alpha.set(r, col, w.alpha.get(r, col).clone());
        }
    }
    for t in 0..2 {
        for col in 0..na {
            alpha.set(nb + t, col, sol[nb + t * na + col].clone());
        }
        alpha.set(nb + t, na, kappa1[t].clone());
    }
    for s in 0..w.c.len() {
        for r in 0..nb {
            beta.set(s, r, w.beta.get(s, r).clone());
        }
    }
    let last = w.c.len();
    for r in 0..nb {
        beta.set(last, r, sol[r].clone());
    }
    for t in 0..2 {
        beta.set(last, nb + t, kappa2[t].clone());
    }
    Ok(Work {
        a,
        b,
        c,
        alpha,
        beta,
    })
}

/// Replace each column of `alpha` by a random column killed by `beta`.
fn alpha_step<F: Field, R: Rng>(f: &F, w: &mut Work<F::Elem>, rng: &mut R) {
    for col in 0..w.a.len() {
        let unknowns: Vec<MultiDegree> =
            w.b.iter().map(|b| MultiDegree((*b - w.a[col]).0)).collect();
        let equations: Vec<_> = (0..w.c.len())
            .map(|s| Equation {
                target: MultiDegree((w.c[s] - w.a[col]).0),
                terms: (0..w.b.len())
                    .map(|r| (r, w.beta.get(s, r)))
                    .filter(|(_, e)| !e.is_zero())
                    .collect(),
            })
            .collect();
        let sol = random_solution(f, &unknowns, &equations, rng);
        for (r, x) in sol.into_iter().enumerate() {
            w.alpha.set(r, col, x);
        }
    }
}

/// Replace each row of `beta` by a random row killing `alpha`.
fn beta_step<F: Field, R: Rng>(f: &F, w: &mut Work<F::Elem>, rng: &mut R) {
    for s in 0..w.c.len() {
        let unknowns: Vec<MultiDegree> = w.b.iter().map(|b| MultiDegree((w.c[s] - *b).0)).collect();
        let equations: Vec<_> = (0..w.a.len())
            .map(|col| Equation {
                target: MultiDegree((w.c[s] - w.a[col]).0),
                terms: (0..w.b.len())
                    .map(|r| (r, w.alpha.get(r, col)))
                    .filter(|(_, e)| !e.is_zero())
                    .collect(),
            })
            .collect();
        let sol = random_solution(f, &unknowns, &equations, rng);
        for (r, x) in sol.into_iter().enumerate() {
            w.beta.set(s, r, x);
        }
    }
}

/// Sort summands into the order of [`MonadShape::terms`].
fn canonical<F: Field>(f: &F, w: Work<F::Elem>, c2: CurveClass) -> Result<Monad<F>> {
    let order = |tw: &[DivisorClass]| {
        let mut idx: Vec<usize> = (0..tw.len()).collect();
        idx.sort_by_key(|&i| tw[i]);
        idx
    };
    let pa = order(&w.a);
    let pb = order(&w.b);
    let shape = MonadShape::new(ShapeKind::Kernel, c2)?;
    let [a, b, c] = shape.terms().map(|t| t.twists());
    if pa.iter().map(|&i| w.a[i]).collect::<Vec<_>>() != a
        || pb.iter().map(|&i| w.b[i]).collect::<Vec<_>>() != b
    {
        return Err(Error::Precondition(
            "induction produced the wrong monad terms".into(),
        ));
    }
    let mut alpha = FormMatrix::zeros(&b, &a);
    for (r, &pr) in pb.iter().enumerate() {
        for (col, &pc) in pa.iter().enumerate() {
            alpha.set(r, col, w.alpha.get(pr, pc).clone());
        }
    }
    let mut beta = FormMatrix::zeros(&c, &b);
    for s in 0..c.len() {
        for (r, &pr) in pb.iter().enumerate() {
            beta.set(s, r, w.beta.get(s, pr).clone());
        }
    }
    Monad::new(shape, f.clone(), alpha, beta, None)
}

/// Global-shape monad with the same cohomology as the kernel-shape monad `m`.
///
/// With `iota = (x_{i1}, -x_{i0})^T : O(-h_i) -> O^2` and `pi = (x_{i0}, x_{i1})`,
/// `beta = M iota` for a constant `M`. The middle term is `W = ker M`, with
/// inclusion `N`; the new maps are `alpha' = N^{-1} iota alpha` and `beta' = pi N`.
fn globalize<F: Field, R: Rng>(m: &Monad<F>, rng: &mut R) -> Result<Monad<F>> {
    let f = &m.field;
    let [a_tw, b_tw, _] = m.twists();
    let (na, nb, nc) = (m.alpha.cols, m.alpha.rows, m.beta.rows);
    let factor: Vec<usize> = b_tw
        .iter()
        .map(|b| {
            b.0.iter()
                .position(|&x| x == -1)
                .expect("B summands are O(-h_i)")
        })
        .collect();

    let mut big_m = Matrix::filled(nc, 2 * nb, f.zero());
    for s in 0..nc {
        for r in 0..nb {
            let e = m.beta.get(s, r);
            let i = factor[r];
            let mut c = [f.zero(), f.zero()];
            for (exp, v) in e.terms() {
                c[exp[2 * i + 1] as usize] = v.clone();
            }
            big_m.set(s, 2 * r, c[1].clone());
            big_m.set(s, 2 * r + 1, f.neg(&c[0]));
        }
    }
    let kernel = linalg::kernel(f, &big_m);
    let nw = kernel.len();
    if nw != 2 * nb - nc {
        return Err(Error::Precondition(
            "beta is not generically surjective".into(),
        ));
    }
    // N = kernel basis times a random invertible matrix.
    let g = loop {
        let g = Matrix {
            rows: nw,
            cols: nw,
            data: (0..nw * nw).map(|_| f.random(rng)).collect(),
        };
        if !f.is_zero(&linalg::determinant(f, &g)) {
            break g;
        }
    };
    let basis = Matrix {
        rows: 2 * nb,
        cols: nw,
        data: (0..2 * nb)
            .flat_map(|row| kernel.iter().map(move |v| v[row].clone()))
            .collect(),
    };
    let n = linalg::mat_mul(f, &basis, &g);

    // Left inverse of N supported on a set of independent rows.
    let mut nt = Matrix::filled(nw, 2 * nb, f.zero());
    for r in 0..2 * nb {
        for c in 0..nw {
            nt.set(c, r, n.get(r, c).clone());
        }
    }
    let pivot_rows = linalg::rref(f, &mut nt);
    let square = Matrix {
        rows: nw,
        cols: nw,
        data: pivot_rows.iter().flat_map(|&r| n.row(r).to_vec()).collect(),
    };
    let mut inv = Matrix::filled(nw, nw, f.zero());
    for j in 0..nw {
        let mut e = vec![f.zero(); nw];
        e[j] = f.one();
        match linalg::solve(f, &square, &e) {
            Solve::Solution { x, .. } => {
                for (i, xi) in x.into_iter().enumerate() {
                    inv.set(i, j, xi);
                }
            }
            Solve::Inconsistent => unreachable!("pivot rows are independent"),
        }
    }

    let shape = MonadShape::new(ShapeKind::Global, m.shape.c2)?;
    let [ga, gb, gc] = shape.terms().map(|t| t.twists());
    debug_assert_eq!(ga, a_tw);
    let mut alpha = FormMatrix::zeros(&gb, &ga);
    for col in 0..na {
        let deg = MultiDegree((-a_tw[col]).0);
        // iota * alpha, restricted to the pivot rows.
        let lifted: Vec<MultiForm<F::Elem>> = pivot_rows
            .iter()
            .map(|&row| {
                let r = row / 2;
                let i = factor[r];
                let entry = m.alpha.get(r, col);
                if entry.is_zero() {
                    return MultiForm::zero(deg);
                }
                let x = if row % 2 == 0 {
                    MultiForm::var(f, i, 1)
                } else {
                    MultiForm::var(f, i, 0).neg(f)
                };
                crate::multipoly::form_mul(f, &x, entry)
            })
            .collect();
        for wi in 0..nw {
            let mut acc = MultiForm::zero(deg);
            for (j, l) in lifted.iter().enumerate() {
                if !l.is_zero() {
                    acc = acc.add(f, &l.scale(f, inv.get(wi, j)))?;
                }
            }
            alpha.set(wi, col, acc);
        }
    }
    let mut beta = FormMatrix::zeros(&gc, &gb);
    for r in 0..nb {
        let i = factor[r];
        for wi in 0..nw {
            let x0 = MultiForm::var(f, i, 0).scale(f, n.get(2 * r, wi));
            let x1 = MultiForm::var(f, i, 1).scale(f, n.get(2 * r + 1, wi));
            beta.set(r, wi, x0.add(f, &x1)?);
        }
    }
    Monad::new(shape, f.clone(), alpha, beta, m.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, RationalField};

    fn gen(kind: ShapeKind, c2: [i64; 3], seed: u64) -> Monad<PrimeField> {
        let shape = MonadShape::new(kind, CurveClass(c2)).unwrap();
        random_monad(shape, PrimeField::default(), seed, 20).unwrap()
    }

    #[test]
    fn plan() {
        assert_eq!(
            induction_plan(CurveClass::new(1, 1, 0)),
            ([1, 1, 0], vec![])
        );
        assert_eq!(
            induction_plan(CurveClass::new(3, 0, 0)),
            ([2, 0, 0], vec![0])
        );
        assert_eq!(
            induction_plan(CurveClass::new(0, 1, 2)),
            ([0, 1, 1], vec![2])
        );
        assert_eq!(
            induction_plan(CurveClass::new(2, 2, 1)),
            ([1, 1, 0], vec![0, 1, 2])
        );
    }

    #[test]
    fn kernel_shapes_are_valid() {
        for c2 in [
            [1, 1, 0],
            [2, 0, 0],
            [1, 1, 1],
            [2, 1, 0],
            [0, 1, 2],
            [3, 0, 0],
            [2, 2, 1],
        ] {
            let m = gen(ShapeKind::Kernel, c2, 7);
            assert_eq!(
                m.shape.ranks(),
                MonadShape::new(ShapeKind::Kernel, CurveClass(c2))
                    .unwrap()
                    .ranks()
            );
            assert!(validate_monad(&m, 64).is_valid(), "c2 = {c2:?}");
        }
    }

    #[test]
    fn global_shapes_are_valid() {
        for c2 in [[1, 1, 0], [2, 0, 0], [1, 1, 1], [2, 1, 0]] {
            let m = gen(ShapeKind::Global, c2, 3);
            let k = c2.iter().sum::<i64>() as usize;
            assert_eq!(m.alpha.rows, 3 * k + 2);
            assert!(validate_monad(&m, 64).is_valid(), "c2 = {c2:?}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(
            gen(ShapeKind::Kernel, [2, 1, 0], 11),
            gen(ShapeKind::Kernel, [2, 1, 0], 11)
        );
        assert_ne!(
            gen(ShapeKind::Kernel, [2, 1, 0], 11),
            gen(ShapeKind::Kernel, [2, 1, 0], 12)
        );
    }

    #[test]
    fn rational_generation() {
        let shape = MonadShape::new(ShapeKind::Kernel, CurveClass::new(1, 1, 1)).unwrap();
        let m = random_monad(shape, RationalField, 5, 20).unwrap();
        assert!(validate_monad(&m, 16).is_valid());
    }

    #[test]
    fn charge_below_two_rejected() {
        let shape = MonadShape::new(ShapeKind::Global, CurveClass::new(1, 0, 0)).unwrap();
        assert!(random_monad(shape, PrimeField::default(), 1, 3).is_err());
    }
}
