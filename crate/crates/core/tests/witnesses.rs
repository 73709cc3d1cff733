use std::sync::Arc;

use deon_core::agents::{BadPolicy, GoodPolicy};
use deon_core::analysis::{check_trivial, check_viability, Triviality};
use deon_core::verify::verify_policy;
use deon_core::{compile, fixtures, parse_spec};
use deon_testkit::{generate, shortest_violation_depth};
use proptest::prelude::*;

#[test]
fn fixture_witnesses() {
    for (name, text) in fixtures::ALL {
        let doc = parse_spec(text).unwrap();
        let d = Arc::new(compile(&doc).unwrap());
        if check_viability(&d).is_strong() {
            let good = GoodPolicy::new(d.clone()).unwrap();
            assert!(verify_policy(&d, &good.to_transducer()).unwrap().is_verified(), "{name}");
        }
        let bad = BadPolicy::new(&d).unwrap();
        let cex = verify_policy(&d, &bad.to_transducer()).unwrap();
        let cex = cex.counterexample().unwrap_or_else(|| panic!("{name}: bad policy verified"));
        assert_eq!(cex.history, bad.target(), "{name}");
        assert_eq!(cex.action, bad.violating_action(), "{name}");
        assert_eq!(Some(cex.history.cycle_count()), shortest_violation_depth(&doc, 6), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn random_witnesses(seed in any::<u64>()) {
        let mut rng = generate::rng(seed);
        let (doc, d) = generate::deontology(&mut rng, 3, 3, 20);
        let d = Arc::new(d);
        if check_viability(&d).is_strong() {
            let good = GoodPolicy::new(d.clone()).unwrap();
            prop_assert!(verify_policy(&d, &good.to_transducer()).unwrap().is_verified(), "{}", doc.render());
        }
        if check_trivial(&d) == Triviality::NonTrivial && d.accepts_empty() {
            let bad = BadPolicy::new(&d).unwrap();
            let v = verify_policy(&d, &bad.to_transducer()).unwrap();
            let cex = v.counterexample().expect("bad policy refuted");
            prop_assert_eq!(&cex.history, &bad.target());
            let shortest = shortest_violation_depth(&doc, cex.history.cycle_count());
            prop_assert_eq!(shortest, Some(cex.history.cycle_count()), "{}", doc.render());
        }
    }
}
