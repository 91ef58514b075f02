use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use segre::chow::{
    chern_of_monad, chern_twist, chi_rank2, chi_twist, classify_strictly_semistable,
    reduced_hilbert_poly, ChowElement, CurveClass, DivisorClass,
};
use segre::field::{ExtensionField, Field, PrimeField};
use segre::hyperext::EngineChoice;
use segre::lines::{line_report, LineFamily};
use segre::monad::{random_monad, Monad, MonadShape, ShapeKind};
use segre::stability::verify_instanton;
use segre::univariate::smallest_irreducible_factor;

fn divisor() -> impl Strategy<Value = DivisorClass> {
    proptest::array::uniform3(-5i64..=5).prop_map(DivisorClass)
}

fn curve() -> impl Strategy<Value = CurveClass> {
    proptest::array::uniform3(-5i64..=5).prop_map(CurveClass)
}

fn element() -> impl Strategy<Value = ChowElement> {
    (divisor(), curve(), -5i64..=5).prop_map(|(d, c, n)| {
        ChowElement::ONE + d.to_element() + ChowElement::curve(c) + ChowElement::point(n)
    })
}

proptest! {
    #[test]
    fn chow_ring_is_commutative_and_truncated(x in element(), y in element(), i in 0usize..3) {
        prop_assert_eq!(x * y, y * x);
        let h = DivisorClass::basis(i).to_element();
        prop_assert_eq!(h * h, ChowElement::ZERO);
    }

    #[test]
    fn one_plus_d_times_one_minus_d(d in divisor()) {
        let e = d.to_element();
        prop_assert_eq!((ChowElement::ONE + e) * (ChowElement::ONE - e), ChowElement::ONE - e * e);
    }

    #[test]
    fn degree_of_divisors_is_even(d in divisor()) {
        let h = DivisorClass::H.to_element();
        let deg = d.to_element() * h * h;
        prop_assert_eq!(deg.coefficients()[7], 2 * d.0.iter().sum::<i64>());
    }

    #[test]
    fn chi_twist_is_chi_of_twisted_classes(c2 in curve(), d in divisor()) {
        let (c1, c2t) = chern_twist(DivisorClass::ZERO, c2, d);
        prop_assert_eq!(chi_twist(c2, d).unwrap(), chi_rank2(c1, c2t).unwrap());
    }

    #[test]
    fn slope_orders_line_bundle_hilbert_polynomials(a in divisor(), b in divisor()) {
        prop_assume!(a.degree() < b.degree());
        let pa = reduced_hilbert_poly(a, CurveClass::ZERO, 1).unwrap();
        let pb = reduced_hilbert_poly(b, CurveClass::ZERO, 1).unwrap();
        prop_assert_eq!(pa.cmp_asymptotic(&pb), std::cmp::Ordering::Less);
    }
}

#[test]
fn monad_shapes_have_vanishing_odd_chern_classes() {
    for k1 in 0..=10i64 {
        for k2 in 0..=10 - k1 {
            for k3 in 0..=10 - k1 - k2 {
                let c2 = CurveClass::new(k1, k2, k3);
                for kind in [ShapeKind::Kernel, ShapeKind::Global] {
                    if kind == ShapeKind::Kernel && c2.charge() < 2 {
                        continue;
                    }
                    let cd = chern_of_monad(kind, c2).unwrap();
                    assert_eq!(
                        (cd.c1, cd.c2, cd.c3),
                        (DivisorClass::ZERO, c2, 0),
                        "{kind} {c2}"
                    );
                }
            }
        }
    }
}

#[test]
fn strictly_semistable_classes_lie_on_three_lines() {
    for a in -10i64..=10 {
        for b in -10i64..=10 {
            let c = classify_strictly_semistable(a, b);
            let on_lines = (a == 0 || b == 0 || a == -b) && (a, b) != (0, 0);
            assert_eq!(c.admissible, on_lines, "({a}, {b})");
            if c.admissible {
                let l = c.l.unwrap();
                assert_eq!(c.c2.charge(), 2 * l * l);
                let i = c.index.unwrap() - 1;
                let mut expect = [0; 3];
                expect[i] = 2 * l * l;
                assert_eq!(c.c2.0, expect);
            }
        }
    }
}

fn monad(kind: ShapeKind, c2: [i64; 3], seed: u64) -> Monad<PrimeField> {
    let shape = MonadShape::new(kind, CurveClass(c2)).unwrap();
    random_monad(shape, PrimeField::default(), seed, 20).unwrap()
}

fn kernel_charge() -> impl Strategy<Value = [i64; 3]> {
    proptest::array::uniform3(0i64..=2)
        .prop_filter("charge 2..=3", |c| (2..=3).contains(&c.iter().sum::<i64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn kernel_monads_pass_the_vanishing_gates(c2 in kernel_charge(), seed in 0u64..10_000) {
        let m = monad(ShapeKind::Kernel, c2, seed);
        let rep = verify_instanton(&m, 1, EngineChoice::Auto).unwrap();
        prop_assert!(rep.validity.is_valid());
        for name in ["c1", "c2", "c3", "h0(E)", "h1(E(-h))"] {
            prop_assert!(rep.check(name).unwrap().passed, "{} failed: {:?}", name, rep.check(name));
        }
        if m.shape.charge() == 2 {
            prop_assert!(rep.check("h1(E)").unwrap().passed);
        }
    }

    #[test]
    fn random_lines_split_trivially(c2 in kernel_charge(), seed in 0u64..10_000) {
        let m = monad(ShapeKind::Kernel, c2, seed);
        let f = &m.field;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for family in 1..=3 {
            let mut jumping = 0;
            for _ in 0..50 {
                let line = LineFamily::affine(f, family, f.random(&mut rng), f.random(&mut rng)).unwrap();
                let rep = line_report(&m, &line).unwrap();
                let segre::lines::SplittingType(a, b) = rep.splitting;
                prop_assert_eq!(a + b, 0);
                jumping += rep.is_jumping() as usize;
            }
            prop_assert!(jumping <= 1, "family {}: {} of 50 random lines jump", family, jumping);
        }
    }

    #[test]
    fn extension_field_axioms(
        coeffs in proptest::collection::vec(0u64..101, 3..6),
        a in proptest::collection::vec(0u64..101, 5),
        b in proptest::collection::vec(0u64..101, 5),
        c in proptest::collection::vec(0u64..101, 5),
    ) {
        let base = PrimeField::new(101).unwrap();
        let Some(h) = smallest_irreducible_factor(&base, &coeffs) else { return Ok(()) };
        let ext = ExtensionField::new(base, h.clone()).unwrap();
        let n = ext.degree();
        let (a, b, c) = (a[..n].to_vec(), b[..n].to_vec(), c[..n].to_vec());
        prop_assert_eq!(ext.mul(&a, &ext.add(&b, &c)), ext.add(&ext.mul(&a, &b), &ext.mul(&a, &c)));
        prop_assert_eq!(ext.mul(&ext.mul(&a, &b), &c), ext.mul(&a, &ext.mul(&b, &c)));
        if !ext.is_zero(&a) {
            prop_assert_eq!(ext.mul(&a, &ext.inv(&a).unwrap()), ext.one());
        }
        let x = ext.generator();
        let value = h.iter().rev().fold(ext.zero(), |acc, k| ext.add(&ext.mul(&acc, &x), &ext.embed(*k)));
        prop_assert!(ext.is_zero(&value));
        prop_assert_eq!(ext.parse(&ext.render(&a)).unwrap(), a);
    }
}
