use std::sync::Arc;

use deon_core::transducer::PolicyTransducer;
use deon_core::{compile, fixtures, parse_spec, Deontology, SpecDoc};
use deon_testkit::{cross_check, generate};
use proptest::prelude::*;

const DEPTH: usize = 6;

fn check_agreement(doc: &SpecDoc, d: &Deontology, t: &PolicyTransducer) -> Result<(), String> {
    cross_check(doc, d, t, DEPTH)
}

#[test]
fn fifty_random_transducers_per_fixture() {
    for (i, (name, text)) in fixtures::ALL.iter().enumerate() {
        let doc = parse_spec(text).unwrap();
        let d = compile(&doc).unwrap();
        let mut rng = generate::rng(77 + i as u64);
        for _ in 0..50 {
            let t = generate::transducer(&mut rng, &doc.alphabet, 5);
            if let Err(e) = check_agreement(&doc, &d, &t) {
                panic!("{name}: {e}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_deontologies_and_transducers(seed in any::<u64>()) {
        let mut rng = generate::rng(seed);
        let (doc, d) = generate::deontology(&mut rng, 3, 3, 20);
        let alphabet = Arc::clone(&doc.alphabet);
        for _ in 0..4 {
            let t = generate::transducer(&mut rng, &alphabet, 4);
            if let Err(e) = check_agreement(&doc, &d, &t) {
                prop_assert!(false, "{}: {}", doc.render(), e);
            }
        }
    }
}
