use proptest::prelude::*;
use segre::chow::{CurveClass, DivisorClass};
use segre::field::PrimeField;
use segre::hyperext::{cech_dims, coh_monad_twist, hom_complex, EngineChoice, LbComplex};
use segre::kunneth::h_x;
use segre::monad::{random_monad, Monad, MonadShape, ShapeKind};

fn monad(kind: ShapeKind, c2: [i64; 3], seed: u64) -> Monad<PrimeField> {
    let shape = MonadShape::new(kind, CurveClass(c2)).unwrap();
    random_monad(shape, PrimeField::default(), seed, 20).unwrap()
}

#[test]
fn reduced_and_box_agree_on_hom_complex() {
    let m = monad(ShapeKind::Kernel, [2, 0, 0], 9);
    let cx = hom_complex(&m);
    let f = PrimeField::default();
    let (a, _) = cech_dims(&f, &cx, EngineChoice::Reduced).unwrap();
    let (b, _) = cech_dims(&f, &cx, EngineChoice::Box { pad: 0 }).unwrap();
    assert_eq!(a, b);
}

#[test]
fn serre_duality_on_reports() {
    let m = monad(ShapeKind::Kernel, [2, 1, 0], 4);
    let k = DivisorClass::new(-2, -2, -2);
    for a in -1..=1 {
        for b in -1..=1 {
            for c in -1..=1 {
                let d = DivisorClass::new(a, b, c);
                let x = coh_monad_twist(&m, d, EngineChoice::Reduced)
                    .unwrap()
                    .dims
                    .0;
                let y = coh_monad_twist(&m, k - d, EngineChoice::Reduced)
                    .unwrap()
                    .dims
                    .0;
                assert_eq!(x, [y[3], y[2], y[1], y[0]], "D = {d}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engines_agree_on_random_twists(seed in 0u64..1000, d in proptest::array::uniform3(-3i64..=2)) {
        let m = monad(ShapeKind::Kernel, [1, 1, 1], seed % 7);
        let d = DivisorClass(d);
        let a = coh_monad_twist(&m, d, EngineChoice::Reduced).unwrap();
        let b = coh_monad_twist(&m, d, EngineChoice::Box { pad: 0 }).unwrap();
        prop_assert_eq!(a.dims, b.dims);
    }

    #[test]
    fn global_shape_engines_agree(seed in 0u64..1000, d in proptest::array::uniform3(-2i64..=1)) {
        let m = monad(ShapeKind::Global, [1, 1, 0], seed % 5);
        let d = DivisorClass(d);
        let a = coh_monad_twist(&m, d, EngineChoice::Reduced).unwrap();
        let b = coh_monad_twist(&m, d, EngineChoice::Box { pad: 0 }).unwrap();
        prop_assert_eq!(a.dims, b.dims);
    }

    #[test]
    fn cech_matches_kunneth(a in proptest::array::uniform3(-4i64..=4)) {
        let f = PrimeField::default();
        let d = DivisorClass(a);
        let (dims, _) = cech_dims(&f, &LbComplex::line_bundle(d), EngineChoice::Reduced).unwrap();
        for i in 0..4 {
            prop_assert_eq!(dims[i] as i64, h_x(d, i));
        }
    }
}
