mod common;

use proptest::prelude::*;
use rand::Rng;
use topomu::frames::random::random_frame;
use topomu::frames::FrameClass;
use topomu::topology::{
    closure_frame, closure_space, derivative_frame, derivative_space, FiniteSpace, LazyFrameSpace,
};
use topomu::WorldSet;

use common::*;

fn random_space(r: &mut rand_chacha::ChaCha8Rng, max: usize) -> FiniteSpace {
    let n = r.gen_range(1..=max);
    closure_space(&random_frame(r, FrameClass::S4, n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cantor_derivative_from_opens(seed: u64) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 6);
        let x = subset(&mut r, s.len());
        let opens = s.opens();
        let d = s.cantor_derivative(&x);
        for w in 0..s.len() {
            let mut punctured = x.clone();
            punctured.remove(w);
            let limit = opens.iter().filter(|u| u.contains(w)).all(|u| u.intersects(&punctured));
            prop_assert_eq!(d.contains(w), limit);
        }
        let mut by_points = WorldSet::empty(s.len());
        for w in &x {
            by_points.union_with(&s.cantor_derivative(&WorldSet::singleton(s.len(), w)));
        }
        prop_assert_eq!(&d, &by_points);
        prop_assert_eq!(&d, &derivative_frame(&s).derivative(&x));
        prop_assert_eq!(s.closure(&x), x.union(&d));
    }

    #[test]
    fn translations_round_trip(seed: u64) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 7);
        let back = derivative_space(&derivative_frame(&s)).unwrap();
        prop_assert_eq!(back.preorder(), s.preorder());
        let again = closure_space(&closure_frame(&s)).unwrap();
        prop_assert_eq!(again.preorder(), s.preorder());
        let n = r.gen_range(1..=7);
        let f = random_frame(&mut r, FrameClass::IrrWk4, n);
        prop_assert_eq!(&derivative_frame(&derivative_space(&f).unwrap()), &f);
        let g = random_frame(&mut r, FrameClass::S4, n);
        prop_assert_eq!(&closure_frame(&closure_space(&g).unwrap()), &g);
    }

    #[test]
    fn basic_regions_are_open(seed: u64) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let f = random_frame(&mut r, FrameClass::Wk4, n);
        let ls = LazyFrameSpace::build(&f).unwrap();
        for w in 0..n {
            for level in [0u64, 1, 2, 5] {
                let b = ls.region(w, level);
                prop_assert!(ls.is_open(&b), "B({}, {}) is not open", w, level);
            }
        }
    }
}
