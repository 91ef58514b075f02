//! Multihomogeneous forms in `x_{i,0}, x_{i,1}` (`i = 1,2,3`), evaluation at
//! points of `X`, and bihomogeneous interpolation on `P1 x P1`.
//!
//! Exponent tuples are `[u1, v1, u2, v2, u3, v3]` where `u_i` is the exponent
//! of `x_{i,0}` and `v_i` that of `x_{i,1}`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{self, Matrix, Solve};

pub type Exponents = [u32; 6];

/// Tridegree `(d1, d2, d3)` of a form.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct MultiDegree(pub [i64; 3]);

impl MultiDegree {
    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&d| d >= 0)
    }

    pub fn basis_size(&self) -> usize {
        if !self.is_nonnegative() {
            return 0;
        }
        self.0.iter().map(|&d| d as usize + 1).product()
    }
}

impl std::ops::Add for MultiDegree {
    type Output = MultiDegree;
    fn add(self, o: Self) -> Self {
        MultiDegree([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

/// All exponent tuples of the given tridegree, in ascending order. Empty when
/// a component is negative.
pub fn monomial_basis(deg: MultiDegree) -> Vec<Exponents> {
    if !deg.is_nonnegative() {
        return Vec::new();
    }
    let [d1, d2, d3] = deg.0.map(|d| d as u32);
    let mut out = Vec::with_capacity(deg.basis_size());
    for u1 in 0..=d1 {
        for u2 in 0..=d2 {
            for u3 in 0..=d3 {
                out.push([u1, d1 - u1, u2, d2 - u2, u3, d3 - u3]);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn degree_of(e: &Exponents) -> MultiDegree {
    MultiDegree([
        (e[0] + e[1]) as i64,
        (e[2] + e[3]) as i64,
        (e[4] + e[5]) as i64,
    ])
}

/// A multihomogeneous form. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiForm<E> {
    pub degree: MultiDegree,
    terms: BTreeMap<Exponents, E>,
}

impl<E: Clone> MultiForm<E> {
    pub fn zero(degree: MultiDegree) -> Self {
        MultiForm {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &E)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &Exponents) -> Option<&E> {
        self.terms.get(e)
    }

    /// Coefficientwise image under an injective map (e.g. a field embedding).
    pub fn map_coeffs<G>(&self, mut g: impl FnMut(&E) -> G) -> MultiForm<G> {
        MultiForm {
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (*k, g(v))).collect(),
        }
    }
}

impl<E: Clone + PartialEq> MultiForm<E> {
    /// Builds a form from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<F: Field<Elem = E>>(
        f: &F,
        degree: MultiDegree,
        terms: impl IntoIterator<Item = (Exponents, E)>,
    ) -> Result<Self> {
        let mut out = Self::zero(degree);
        for (e, c) in terms {
            if degree_of(&e) != degree {
                return Err(Error::Precondition(format!(
                    "monomial {e:?} does not have tridegree {:?}",
                    degree.0
                )));
            }
            out.add_term(f, e, c);
        }
        Ok(out)
    }

    pub fn constant<F: Field<Elem = E>>(f: &F, c: E) -> Self {
        let mut out = Self::zero(MultiDegree::default());
        out.add_term(f, [0; 6], c);
        out
    }

    /// The variable `x_{factor, j}` (`factor` in `0..3`, `j` in `0..2`).
    pub fn var<F: Field<Elem = E>>(f: &F, factor: usize, j: usize) -> Self {
        let mut e = [0u32; 6];
        e[2 * factor + j] = 1;
        let mut out = Self::zero(degree_of(&e));
        out.add_term(f, e, f.one());
        out
    }

    fn add_term<F: Field<Elem = E>>(&mut self, f: &F, e: Exponents, c: E) {
        let entry = self.terms.entry(e).or_insert_with(|| f.zero());
        *entry = f.add(entry, &c);
        if f.is_zero(entry) {
            self.terms.remove(&e);
        }
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::Precondition(format!(
                "adding forms of tridegrees {:?} and {:?}",
                self.degree.0, other.degree.0
            )));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(f, *e, c.clone());
        }
        Ok(out)
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, s: &E) -> Self {
        if f.is_zero(s) {
            return Self::zero(self.degree);
        }
        MultiForm {
            degree: self.degree,
            terms: self.terms.iter().map(|(e, c)| (*e, f.mul(c, s))).collect(),
        }
    }

    pub fn neg<F: Field<Elem = E>>(&self, f: &F) -> Self {
        self.scale(f, &f.neg(&f.one()))
    }
}

pub fn form_mul<F: Field>(
    f: &F,
    a: &MultiForm<F::Elem>,
    b: &MultiForm<F::Elem>,
) -> MultiForm<F::Elem> {
    let mut out = MultiForm::zero(a.degree + b.degree);
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let mut e = *ea;
            for (x, y) in e.iter_mut().zip(eb) {
                *x += y;
            }
            out.add_term(f, e, f.mul(ca, cb));
        }
    }
    out
}

/// A point `([a0:a1], [b0:b1], [c0:c1])` of `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointOnX<E> {
    pub coords: [[E; 2]; 3],
}

impl<E: Clone> PointOnX<E> {
    pub fn new<F: Field<Elem = E>>(f: &F, coords: [[E; 2]; 3]) -> Result<Self> {
        if coords.iter().any(|c| f.is_zero(&c[0]) && f.is_zero(&c[1])) {
            return Err(Error::Precondition(
                "projective coordinates all zero".into(),
            ));
        }
        Ok(PointOnX { coords })
    }

    pub fn random<F: Field<Elem = E>, R: Rng + ?Sized>(f: &F, rng: &mut R) -> Self {
        let mut pair = || loop {
            let c = [f.random(rng), f.random(rng)];
            if !(f.is_zero(&c[0]) && f.is_zero(&c[1])) {
                return c;
            }
        };
        PointOnX {
            coords: [pair(), pair(), pair()],
        }
    }
}

pub fn evaluate<F: Field>(f: &F, form: &MultiForm<F::Elem>, p: &PointOnX<F::Elem>) -> F::Elem {
    let mut acc = f.zero();
    for (e, c) in &form.terms {
        let mut term = c.clone();
        for (k, &exp) in e.iter().enumerate() {
            if exp > 0 {
                term = f.mul(&term, &f.pow(&p.coords[k / 2][k % 2], exp as u64));
            }
        }
        acc = f.add(&acc, &term);
    }
    acc
}

pub fn vanishes_at<F: Field>(f: &F, form: &MultiForm<F::Elem>, p: &PointOnX<F::Elem>) -> bool {
    f.is_zero(&evaluate(f, form, p))
}

pub fn random_form<F: Field, R: Rng + ?Sized>(
    f: &F,
    deg: MultiDegree,
    rng: &mut R,
) -> Result<MultiForm<F::Elem>> {
    if !deg.is_nonnegative() {
        return Err(Error::NegativeDegree(deg.0));
    }
    let terms: Vec<_> = monomial_basis(deg)
        .into_iter()
        .map(|e| (e, f.random(rng)))
        .collect();
    MultiForm::from_terms(f, deg, terms)
}

/// `(exponents, rendered coefficient)` in ascending exponent order.
pub fn render_terms<F: Field>(f: &F, form: &MultiForm<F::Elem>) -> Vec<(Exponents, String)> {
    form.terms.iter().map(|(e, c)| (*e, f.render(c))).collect()
}

impl<E: Clone + PartialEq> MultiForm<E> {
    /// Human readable, e.g. `3*x10^2*x21 + x11*x20`.
    pub fn display<F: Field<Elem = E>>(&self, f: &F) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let names = ["x10", "x11", "x20", "x21", "x30", "x31"];
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut factors = Vec::new();
                let cs = f.render(c);
                if cs != "1" || e.iter().all(|&x| x == 0) {
                    factors.push(cs);
                }
                for (k, &exp) in e.iter().enumerate() {
                    match exp {
                        0 => {}
                        1 => factors.push(names[k].to_string()),
                        _ => factors.push(format!("{}^{}", names[k], exp)),
                    }
                }
                factors.join("*")
            })
            .collect();
        parts.join(" + ")
    }
}

/// A polynomial of bidegree `(d, e)` on `P1 x P1` in the affine chart
/// `[1:s] x [1:t]`: `coeffs[i * (e + 1) + j]` multiplies `s^i t^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiForm<E> {
    pub d: usize,
    pub e: usize,
    pub coeffs: Vec<E>,
}

impl<E: Clone> BiForm<E> {
    pub fn coeff(&self, i: usize, j: usize) -> &E {
        &self.coeffs[i * (self.e + 1) + j]
    }

    pub fn eval<F: Field<Elem = E>>(&self, f: &F, s: &E, t: &E) -> E {
        let mut acc = f.zero();
        for i in (0..=self.d).rev() {
            let mut row = f.zero();
            for j in (0..=self.e).rev() {
                row = f.add(&f.mul(&row, t), self.coeff(i, j));
            }
            acc = f.add(&f.mul(&acc, s), &row);
        }
        acc
    }

    /// Degree actually attained in `s` (resp. `t`), i.e. the bidegree of the
    /// zero locus when no component lies at infinity.
    pub fn support_degree<F: Field<Elem = E>>(&self, f: &F) -> (usize, usize) {
        let mut ds = 0;
        let mut dt = 0;
        for i in 0..=self.d {
            for j in 0..=self.e {
                if !f.is_zero(self.coeff(i, j)) {
                    ds = ds.max(i);
                    dt = dt.max(j);
                }
            }
        }
        (ds, dt)
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.coeffs.iter().all(|c| f.is_zero(c))
    }

    /// Univariate polynomial in `s` obtained by fixing `t`.
    pub fn restrict_t<F: Field<Elem = E>>(&self, f: &F, t: &E) -> Vec<E> {
        (0..=self.d)
            .map(|i| {
                (0..=self.e)
                    .rev()
                    .fold(f.zero(), |acc, j| f.add(&f.mul(&acc, t), self.coeff(i, j)))
            })
            .collect()
    }
}

/// The unique bidegree `(d, e)` polynomial through the samples `(s, t, value)`.
/// Errors when the samples do not determine it or no such polynomial exists.
pub fn interpolate_bihomogeneous<F: Field>(
    f: &F,
    samples: &[(F::Elem, F::Elem, F::Elem)],
    d: usize,
    e: usize,
) -> Result<BiForm<F::Elem>> {
    let n = (d + 1) * (e + 1);
    if samples.len() < n {
        return Err(Error::Interpolation(format!(
            "{} samples cannot determine bidegree ({d},{e}) with {n} coefficients",
            samples.len()
        )));
    }
    let mut rows = Vec::with_capacity(samples.len());
    let mut rhs = Vec::with_capacity(samples.len());
    for (s, t, v) in samples {
        let mut row = Vec::with_capacity(n);
        let mut si = f.one();
        for _ in 0..=d {
            let mut tj = si.clone();
            for _ in 0..=e {
                row.push(tj.clone());
                tj = f.mul(&tj, t);
            }
            si = f.mul(&si, s);
        }
        rows.push(row);
        rhs.push(v.clone());
    }
    let m = Matrix::from_rows(n, rows);
    match linalg::solve(f, &m, &rhs) {
        Solve::Inconsistent => Err(Error::Interpolation(format!(
            "samples are inconsistent with bidegree ({d},{e})"
        ))),
        Solve::Solution { nullity, .. } if nullity > 0 => Err(Error::Interpolation(format!(
            "sample grid is degenerate for bidegree ({d},{e}) (nullity {nullity})"
        ))),
        Solve::Solution { x, .. } => Ok(BiForm { d, e, coeffs: x }),
    }
}

/// A grid of `(rows x cols)` affine points with distinct coordinates.
pub fn affine_grid<F: Field, R: Rng + ?Sized>(
    f: &F,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Vec<(F::Elem, F::Elem)> {
    let distinct = |n: usize, rng: &mut R| {
        let mut v: Vec<F::Elem> = Vec::with_capacity(n);
        while v.len() < n {
            let x = f.random(rng);
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v
    };
    let ss = distinct(rows, rng);
    let ts = distinct(cols, rng);
    ss.iter()
        .flat_map(|s| ts.iter().map(move |t| (s.clone(), t.clone())))
        .collect()
}
