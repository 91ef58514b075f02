//! Dense univariate polynomials over `F_p`, just enough for root finding
//! (equal-degree splitting of `gcd(f, x^p - x)`), for finding an irreducible
//! factor of least degree, and for arithmetic in `F_p[x]/(m)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{Field, PrimeField};

type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn rem(f: &PrimeField, a: &[u64], b: &[u64]) -> Poly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = f.inv(&b[db]).expect("nonzero leading coefficient");
    while r.len() > db {
        let top = r.len() - 1;
        let c = f.mul(&r[top], &lead_inv);
        if c != 0 {
            let shift = top - db;
            for (i, bi) in b.iter().enumerate() {
                r[shift + i] = f.sub(&r[shift + i], &f.mul(&c, bi));
            }
        }
        r.pop();
        r = trim(r);
    }
    trim(r)
}

pub(crate) fn mul_mod(f: &PrimeField, a: &[u64], b: &[u64], m: &[u64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if *ai == 0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = f.mul_add(&out[i + j], ai, bj);
        }
    }
    rem(f, &trim(out), m)
}

fn pow_mod(f: &PrimeField, base: &[u64], mut e: u64, m: &[u64]) -> Poly {
    let mut acc: Poly = rem(f, &[1], m);
    let mut b = rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(f, &acc, &b, m);
        }
        b = mul_mod(f, &b, &b, m);
        e >>= 1;
    }
    acc
}

fn monic(f: &PrimeField, a: Poly) -> Poly {
    let inv = f.inv(a.last().unwrap()).unwrap();
    a.iter().map(|c| f.mul(c, &inv)).collect()
}

fn gcd(f: &PrimeField, a: &[u64], b: &[u64]) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        monic(f, a)
    }
}

fn sub_poly(f: &PrimeField, a: &[u64], b: &[u64]) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = f.sub(&x, &y);
    }
    trim(out)
}

fn split(f: &PrimeField, g: Poly, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    match g.len() {
        0 | 1 => {}
        2 => out.push(f.neg(&f.mul(&g[0], &f.inv(&g[1]).unwrap()))),
        _ => loop {
            let a = f.random(rng);
            let h = pow_mod(f, &[a, 1], (f.modulus() - 1) / 2, &g);
            let d = gcd(f, &g, &sub_poly(f, &h, &[1]));
            if d.len() > 1 && d.len() < g.len() {
                let q = div_exact(f, &g, &d);
                split(f, d, rng, out);
                split(f, q, rng, out);
                return;
            }
        },
    }
}

fn div_exact(f: &PrimeField, a: &[u64], b: &[u64]) -> Poly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = f.inv(&b[db]).unwrap();
    let mut q = vec![0u64; a.len() - db];
    for top in (db..r.len()).rev() {
        let c = f.mul(&r[top], &lead_inv);
        q[top - db] = c;
        for (i, bi) in b.iter().enumerate() {
            r[top - db + i] = f.sub(&r[top - db + i], &f.mul(&c, bi));
        }
    }
    trim(q)
}

/// Distinct roots in `F_p` of `sum coeffs[i] x^i`, sorted ascending. The zero
/// polynomial has no well-defined root set and yields an empty list.
pub fn roots_mod_p(f: &PrimeField, coeffs: &[u64]) -> Vec<u64> {
    let a = trim(coeffs.to_vec());
    if a.len() <= 1 {
        return Vec::new();
    }
    let a = monic(f, a);
    let xp = pow_mod(f, &[0, 1], f.modulus(), &a);
    let g = gcd(f, &a, &sub_poly(f, &xp, &[0, 1]));
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    split(f, g, &mut rng, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub(crate) fn inv_mod(f: &PrimeField, a: &[u64], m: &[u64]) -> Option<Poly> {
    // Invariant: r_i = s_i * a (mod m).
    let (mut r0, mut r1) = (trim(m.to_vec()), rem(f, a, m));
    let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = div_rem(f, &r0, &r1);
        let s2 = sub_poly(f, &s0, &mul_plain(f, &q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = f.inv(&r0[0])?;
    Some(rem(
        f,
        &s0.iter().map(|x| f.mul(x, &c)).collect::<Vec<_>>(),
        m,
    ))
}

fn mul_plain(f: &PrimeField, a: &[u64], b: &[u64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = f.mul_add(&out[i + j], ai, bj);
        }
    }
    trim(out)
}

fn div_rem(f: &PrimeField, a: &[u64], b: &[u64]) -> (Poly, Poly) {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lead_inv = f.inv(&b[db]).expect("nonzero leading coefficient");
    let mut q = vec![0u64; r.len() - db];
    for top in (db..r.len()).rev() {
        let c = f.mul(&r[top], &lead_inv);
        q[top - db] = c;
        for (i, bi) in b.iter().enumerate() {
            r[top - db + i] = f.sub(&r[top - db + i], &f.mul(&c, bi));
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

/// A monic irreducible factor of least degree of `sum coeffs[i] x^i`, by
/// distinct-degree factorization and equal-degree splitting. `None` for
/// constants and the zero polynomial.
pub fn smallest_irreducible_factor(f: &PrimeField, coeffs: &[u64]) -> Option<Vec<u64>> {
    let a = trim(coeffs.to_vec());
    if a.len() <= 1 {
        return None;
    }
    let a = monic(f, a);
    let deg = a.len() - 1;
    let mut xq: Poly = rem(f, &[0, 1], &a);
    for j in 1..=deg {
        xq = pow_mod(f, &xq, f.modulus(), &a);
        let g = gcd(f, &a, &sub_poly(f, &xq, &[0, 1]));
        if g.len() > 1 {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + j as u64);
            return Some(equal_degree_factor(f, g, j, &mut rng));
        }
    }
    unreachable!("a polynomial of degree {deg} has an irreducible factor of degree at most {deg}")
}

/// One irreducible factor of `g`, a product of distinct irreducibles of
/// degree `j`.
fn equal_degree_factor(f: &PrimeField, mut g: Poly, j: usize, rng: &mut ChaCha8Rng) -> Poly {
    while g.len() - 1 > j {
        let n = g.len() - 1;
        let r: Poly = trim((0..n).map(|_| f.random(rng)).collect());
        if r.len() <= 1 {
            continue;
        }
        // r^((p^j - 1) / 2) = (r * r^p * ... * r^(p^(j-1)))^((p - 1) / 2)
        let mut u = r.clone();
        let mut norm = r;
        for _ in 1..j {
            u = pow_mod(f, &u, f.modulus(), &g);
            norm = mul_mod(f, &norm, &u, &g);
        }
        let w = pow_mod(f, &norm, (f.modulus() - 1) / 2, &g);
        let d = gcd(f, &g, &sub_poly(f, &w, &[1]));
        if d.len() > 1 && d.len() < g.len() {
            let q = div_exact(f, &g, &d);
            g = if d.len() <= q.len() { d } else { monic(f, q) };
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_product_roots() {
        let f = PrimeField::default();
        // (x - 3)(x - 10)(x^2 + 1) has exactly two roots when -1 is a non-residue.
        let p = f.modulus();
        let r1 = 3u64;
        let r2 = 10u64;
        let lin = |r: u64| vec![f.neg(&r), 1];
        let prod = |a: &[u64], b: &[u64]| {
            let mut out = vec![0u64; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] = f.mul_add(&out[i + j], x, y);
                }
            }
            out
        };
        let mut poly = prod(&lin(r1), &lin(r2));
        let minus_one_is_square = f.pow(&(p - 1), (p - 1) / 2) == 1;
        poly = prod(&poly, &[1, 0, 1]);
        let roots = roots_mod_p(&f, &poly);
        if minus_one_is_square {
            assert_eq!(roots.len(), 4);
        } else {
            assert_eq!(roots, vec![3, 10]);
        }
    }

    #[test]
    fn constant_and_linear() {
        let f = PrimeField::new(101).unwrap();
        assert!(roots_mod_p(&f, &[5]).is_empty());
        assert_eq!(roots_mod_p(&f, &[f.neg(&7), 1]), vec![7]);
        assert_eq!(roots_mod_p(&f, &[0, 0, 1]), vec![0]);
    }

    #[test]
    fn smallest_factor_of_products() {
        let f = PrimeField::new(101).unwrap();
        // x^2 + 2 is irreducible mod 101 (-2 is a non-residue).
        assert_eq!(f.pow(&99, 50), 100);
        let quad = vec![2, 0, 1];
        let lin = vec![f.neg(&5), 1];
        assert_eq!(
            smallest_irreducible_factor(&f, &mul_plain(&f, &quad, &lin)),
            Some(lin.clone())
        );
        assert_eq!(smallest_irreducible_factor(&f, &quad), Some(quad.clone()));
        // Product of two irreducible quadratics: a factor of degree 2 dividing it.
        let other = vec![3, 1, 1];
        assert!(roots_mod_p(&f, &other).is_empty());
        let prod = mul_plain(&f, &quad, &other);
        let fac = smallest_irreducible_factor(&f, &prod).unwrap();
        assert!(fac == quad || fac == other, "{fac:?}");
        assert_eq!(smallest_irreducible_factor(&f, &[7]), None);
    }

    #[test]
    fn inverse_modulo() {
        let f = PrimeField::new(101).unwrap();
        let m = vec![2, 0, 1];
        let a = vec![3, 7];
        let b = inv_mod(&f, &a, &m).unwrap();
        assert_eq!(mul_mod(&f, &a, &b, &m), vec![1]);
        assert_eq!(inv_mod(&f, &[0, 0, 1], &[0, 1]), None);
    }
}
