mod common;

use proptest::prelude::*;
use streamsynth::profile::{word_profile, Profile};
use streamsynth::Lasso;

fn rotate(l: &Lasso<char>) -> Lasso<char> {
    let mut prefix = l.prefix().to_vec();
    prefix.push(l.period()[0]);
    let mut period = l.period().to_vec();
    period.rotate_left(1);
    Lasso::new(prefix, period).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_keeps_profiles_of_original_states(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let t = common::random_transducer(&mut r, 4);
        let n = t.normalize();
        for len in 0..=4 {
            for w in common::all_words(&['a', 'b'], len) {
                let restricted = Profile::from_triples(
                    word_profile(&n, &w).triples().iter().copied().filter(|&(p, q, _)| p < t.state_count() && q < t.state_count()),
                );
                prop_assert_eq!(restricted, common::profile_by_runs(&t, &w), "word {:?}", w);
            }
        }
    }

    #[test]
    fn projection_is_the_domain(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let t = common::random_transducer(&mut r, 3);
        let a = t.normalize().project_input();
        for _ in 0..20 {
            let input = common::random_lasso(&mut r, &['a', 'b'], 3, 3);
            let in_domain = a.accepts(&input);
            prop_assert_eq!(in_domain, t.admits_output_prefix(&input, &[], 100_000).unwrap(), "input {}", input);
            // Any small output lasso accepted with the input witnesses membership.
            for p in 0..=2 {
                for q in 1..=2 {
                    for u in common::all_words(&['x', 'y'], p) {
                        for v in common::all_words(&['x', 'y'], q) {
                            let out = Lasso::new(u.clone(), v).unwrap();
                            if t.accepts_pair(&input, &out, 100_000).unwrap() {
                                prop_assert!(in_domain, "({}, {}) accepted outside the projection", input, out);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pair_acceptance_ignores_period_rotation(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let t = common::random_transducer(&mut r, 3);
        for _ in 0..20 {
            let x = common::random_lasso(&mut r, &['a', 'b'], 3, 3);
            let y = common::random_lasso(&mut r, &['x', 'y'], 3, 3);
            let v = t.accepts_pair(&x, &y, 100_000).unwrap();
            prop_assert_eq!(v, t.accepts_pair(&rotate(&x), &y, 100_000).unwrap());
            prop_assert_eq!(v, t.accepts_pair(&x, &rotate(&y), 100_000).unwrap());
        }
    }
}
