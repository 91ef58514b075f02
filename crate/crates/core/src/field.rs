//! Coefficient fields: a prime field `F_p` (the fast default), the exact
//! rationals (audit runs), and finite extensions `F_p[x]/(m)` used to reach
//! points of a curve that has none over `F_p`.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Largest prime below the Mersenne prime `2^31 - 1`.
pub const DEFAULT_PRIME: u64 = 2_147_483_629;

/// Serializable description of a coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FieldSpec {
    Prime { p: u64 },
    Rational,
    Extension { p: u64, modulus: Vec<u64> },
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime { p } => write!(f, "F_{p}"),
            FieldSpec::Rational => write!(f, "Q"),
            FieldSpec::Extension { p, modulus } => write!(f, "F_{p}^{}", modulus.len() - 1),
        }
    }
}

/// Arithmetic on field elements. Elements are plain values; the field object
/// carries whatever context (the modulus) the operations need.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync + 'static;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Uniform over `F_p`; small integers in `[-9, 9]` over `Q`.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }

    /// Canonical decimal rendering (`"num/den"` for non-integral rationals).
    fn render(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem, String>;

    /// All roots in the field of the univariate polynomial with the given
    /// coefficients (constant term first). `None` when the field has no
    /// root-finding support.
    fn roots(&self, _coeffs: &[Self::Elem]) -> Option<Vec<Self::Elem>> {
        None
    }

    fn mul_add(&self, acc: &Self::Elem, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(acc, &self.mul(a, b))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// The prime field `Z/pZ` for an odd prime `p < 2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, String> {
        if p < 3 || p >= (1 << 32) {
            return Err(format!("prime {p} outside supported range [3, 2^32)"));
        }
        if !is_prime(p) {
            return Err(format!("{p} is not prime"));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime { p: self.p }
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
    fn parse(&self, s: &str) -> Result<u64, String> {
        let v: u64 = s
            .trim()
            .parse()
            .map_err(|e| format!("bad F_p coefficient {s:?}: {e}"))?;
        if v >= self.p {
            return Err(format!("coefficient {v} not reduced modulo {}", self.p));
        }
        Ok(v)
    }
    fn mul_add(&self, acc: &u64, a: &u64, b: &u64) -> u64 {
        (acc + a * b) % self.p
    }
    fn roots(&self, coeffs: &[u64]) -> Option<Vec<u64>> {
        Some(crate::univariate::roots_mod_p(self, coeffs))
    }
}

/// The extension `F_p[x]/(m)` for a monic irreducible `m` of degree `n >= 1`.
/// Elements are coefficient vectors of length `n`, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionField {
    base: PrimeField,
    modulus: Vec<u64>,
}

impl ExtensionField {
    pub fn new(base: PrimeField, modulus: Vec<u64>) -> Result<Self, String> {
        if modulus.len() < 2 || modulus.last() != Some(&1) {
            return Err("extension modulus must be monic of degree at least 1".into());
        }
        if crate::univariate::smallest_irreducible_factor(&base, &modulus).as_ref()
            != Some(&modulus)
        {
            return Err(format!(
                "{modulus:?} is reducible over F_{}",
                base.modulus()
            ));
        }
        Ok(ExtensionField { base, modulus })
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn embed(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0; self.degree()];
        v[0] = a;
        v
    }

    /// The class of `x`, a root of the modulus.
    pub fn generator(&self) -> Vec<u64> {
        let mut v = vec![0; self.degree()];
        if self.degree() == 1 {
            v[0] = self.base.neg(&self.modulus[0]);
        } else {
            v[1] = 1;
        }
        v
    }

    fn pad(&self, mut a: Vec<u64>) -> Vec<u64> {
        a.resize(self.degree(), 0);
        a
    }
}

impl Field for ExtensionField {
    type Elem = Vec<u64>;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Extension {
            p: self.base.modulus(),
            modulus: self.modulus.clone(),
        }
    }
    fn zero(&self) -> Vec<u64> {
        vec![0; self.degree()]
    }
    fn one(&self) -> Vec<u64> {
        self.embed(1)
    }
    fn from_i64(&self, v: i64) -> Vec<u64> {
        self.embed(self.base.from_i64(v))
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        self.pad(crate::univariate::mul_mod(&self.base, a, b, &self.modulus))
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        crate::univariate::inv_mod(&self.base, a, &self.modulus).map(|v| self.pad(v))
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|x| *x == 0)
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        (0..self.degree()).map(|_| self.base.random(rng)).collect()
    }
    fn render(&self, a: &Vec<u64>) -> String {
        let parts: Vec<String> = a.iter().map(u64::to_string).collect();
        format!("[{}]", parts.join(","))
    }
    fn parse(&self, s: &str) -> Result<Vec<u64>, String> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| format!("bad extension element {s:?}"))?;
        let v = inner
            .split(',')
            .map(|c| self.base.parse(c))
            .collect::<Result<Vec<_>, _>>()?;
        if v.len() != self.degree() {
            return Err(format!(
                "extension element {s:?} needs {} coefficients",
                self.degree()
            ));
        }
        Ok(v)
    }
}

/// The rational numbers with arbitrary-precision entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-9..=9))
    }
    fn render(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse(&self, s: &str) -> Result<BigRational, String> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n: BigInt = num
            .parse()
            .map_err(|e| format!("bad rational numerator {num:?}: {e}"))?;
        let d: BigInt = den
            .parse()
            .map_err(|e| format!("bad rational denominator {den:?}: {e}"))?;
        if d.is_zero() || d.is_negative() {
            return Err(format!("rational denominator must be positive in {s:?}"));
        }
        Ok(BigRational::new(n, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_prime_is_largest_below_mersenne() {
        assert!(is_prime(DEFAULT_PRIME));
        let mersenne = (1u64 << 31) - 1;
        assert!(is_prime(mersenne));
        for n in DEFAULT_PRIME + 1..mersenne {
            assert!(!is_prime(n));
        }
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(101).unwrap();
        for a in 1..101 {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
        }
        assert!(f.inv(&0).is_none());
        assert!(PrimeField::new(100).is_err());
    }

    #[test]
    fn render_parse_round_trip() {
        let q = RationalField;
        let x = q.parse("-3/6").unwrap();
        assert_eq!(q.render(&x), "-1/2");
        assert!(q.parse("1/0").is_err());
        let f = PrimeField::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = f.random(&mut rng);
        assert_eq!(f.parse(&f.render(&a)).unwrap(), a);
        assert!(f.parse(&DEFAULT_PRIME.to_string()).is_err());
    }
}
