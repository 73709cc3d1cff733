use std::sync::Arc;

use deon_core::analysis::check_viability;
use deon_core::governor::{GovernorConfig, GovernorSession, Mode, ProposalOutcome};
use deon_core::{Action, Percept};
use deon_testkit::{generate, matcher::member_history};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // The emitted history stays Good until the governor refuses.
    #[test]
    fn emitted_history_stays_good(
        seed in any::<u64>(),
        foresight in any::<bool>(),
        steps in prop::collection::vec((0u16..3, 0u16..3), 1..40),
    ) {
        let mut rng = generate::rng(seed);
        let (doc, d) = generate::deontology(&mut rng, 3, 3, 20);
        let d = Arc::new(d);
        let cfg = GovernorConfig::strict().with_foresight(foresight);
        let Ok(mut s) = GovernorSession::open(d.clone(), cfg) else { return Ok(()); };
        let a = d.alphabet().clone();
        for &(y, x) in &steps {
            let outcome = s.propose(Action(y % a.action_count() as u16)).unwrap();
            if matches!(outcome, ProposalOutcome::Refused(_)) {
                prop_assert!(s.is_frozen());
                break;
            }
            s.observe(Percept(x % a.percept_count() as u16)).unwrap();
            prop_assert!(member_history(&doc, s.trace().0), "{} after {}", doc.render(), s.trace().0);
        }
    }

    // Under strong viability the strict governor never refuses.
    #[test]
    fn strongly_viable_never_refuses(seed in any::<u64>(), steps in prop::collection::vec((0u16..3, 0u16..3), 1..40)) {
        let mut rng = generate::rng(seed);
        let (_, d) = generate::deontology(&mut rng, 3, 3, 20);
        prop_assume!(check_viability(&d).is_strong());
        let d = Arc::new(d);
        let a = d.alphabet().clone();
        let mut s = GovernorSession::open(d, GovernorConfig::strict()).unwrap();
        for &(y, x) in &steps {
            let outcome = s.propose(Action(y % a.action_count() as u16)).unwrap();
            prop_assert!(outcome.emitted().is_some());
            s.observe(Percept(x % a.percept_count() as u16)).unwrap();
        }
    }

    // Approvals pass the proposal through; substitutions change it.
    #[test]
    fn verdicts_are_consistent(seed in any::<u64>(), steps in prop::collection::vec((0u16..3, 0u16..3), 1..20)) {
        let mut rng = generate::rng(seed);
        let (_, d) = generate::deontology(&mut rng, 3, 3, 20);
        let d = Arc::new(d);
        let a = d.alphabet().clone();
        let cfg = GovernorConfig { mode: Mode::Permissive, ..GovernorConfig::default() };
        let mut s = GovernorSession::open(d, cfg).unwrap();
        for &(y, x) in &steps {
            let y = Action(y % a.action_count() as u16);
            let safe = s.safe_actions();
            match s.propose(y).unwrap() {
                ProposalOutcome::Approved(e) => prop_assert!(e == y && safe.contains(&y)),
                ProposalOutcome::Substituted { original, replacement } => {
                    prop_assert_eq!(original, y);
                    prop_assert!(!safe.contains(&y));
                    prop_assert!(safe.contains(&replacement));
                }
                ProposalOutcome::Refused(_) => {
                    prop_assert!(safe.is_empty());
                    break;
                }
            }
            s.observe(Percept(x % a.percept_count() as u16)).unwrap();
        }
    }
}
