use deon_core::{compile, fixtures, parse_spec, Deontology, SpecDoc};
use deon_testkit::{generate, member, nerode_class_count};
use proptest::prelude::*;

fn fixture(text: &str) -> (SpecDoc, Deontology) {
    let doc = parse_spec(text).unwrap();
    let d = compile(&doc).unwrap();
    (doc, d)
}

#[test]
fn fixtures_agree_with_regex_matcher_on_random_strings() {
    for (i, (name, text)) in fixtures::ALL.iter().enumerate() {
        let (doc, d) = fixture(text);
        let mut rng = generate::rng(1000 + i as u64);
        let mut disagreements = 0;
        for _ in 0..10_000 {
            let s = generate::token_string(&mut rng, &doc.alphabet, 16);
            if d.accepts_tokens(&s) != member(&doc, &s) {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0, "{name}");
    }
}

#[test]
fn state_counts_match_nerode_partition() {
    for (text, expected) in [(fixtures::SPEC_NG, 3), (fixtures::SPEC_GUESS, 4)] {
        let (doc, d) = fixture(text);
        assert_eq!(d.state_count(), expected);
        assert_eq!(nerode_class_count(&doc, 4), expected);
    }
}

#[test]
fn fixture_state_counts_are_minimal() {
    for (name, text) in fixtures::ALL {
        let (doc, d) = fixture(text);
        assert_eq!(nerode_class_count(&doc, 4), d.state_count(), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_specs_agree_with_matcher(seed in any::<u64>()) {
        let mut rng = generate::rng(seed);
        let doc = generate::spec(&mut rng, 2, 2);
        let d = compile(&doc).unwrap();
        for _ in 0..200 {
            let s = generate::token_string(&mut rng, &doc.alphabet, 10);
            prop_assert_eq!(d.accepts_tokens(&s), member(&doc, &s), "{}", doc.render());
        }
    }

    // A minimal DFA with n states reaches every state within n - 1 symbols and
    // separates any two states within n - 2, so the bounded partition is exact.
    #[test]
    fn random_specs_are_minimal(seed in any::<u64>()) {
        let mut rng = generate::rng(seed);
        let doc = generate::spec(&mut rng, 2, 2);
        let d = compile(&doc).unwrap();
        prop_assume!(d.state_count() <= 5);
        prop_assert_eq!(nerode_class_count(&doc, 4), d.state_count(), "{}", doc.render());
    }

    #[test]
    fn dump_roundtrip_preserves_language(seed in any::<u64>()) {
        let mut rng = generate::rng(seed);
        let doc = generate::spec(&mut rng, 3, 3);
        let d = compile(&doc).unwrap();
        let back = Deontology::load(&d.dump()).unwrap();
        prop_assert_eq!(back.dump(), d.dump());
        prop_assert_eq!(back.fingerprint(), d.fingerprint());
    }
}
