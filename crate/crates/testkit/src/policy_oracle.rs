//! Policy checking by exhaustive simulation.

use deon_core::transducer::PolicyTransducer;
use deon_core::verify::{verify_policy, Verdict};
use deon_core::{Deontology, Percept, SpecDoc, Symbol};

use crate::matcher::member;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    /// No violation within the explored depth.
    NoViolation,
    /// Shortest violation: the percepts of the violating run (the last one
    /// completes the bad cycle) and the 1-based cycle.
    Violation { cycle: usize, percepts: Vec<Percept> },
}

/// Runs the policy on every percept sequence of length ≤ `max_cycles`,
/// continuing only while each prefix is Good. Returns the first violation in
/// breadth-first (shortest, then lexicographic) order.
pub fn brute_force_verify(doc: &SpecDoc, policy: &PolicyTransducer, max_cycles: usize) -> OracleVerdict {
    if !member(doc, &[]) {
        return OracleVerdict::NoViolation;
    }
    let np = doc.alphabet.percept_count();
    // frontier: Good runs of the current length
    let mut layer: Vec<Vec<Percept>> = vec![Vec::new()];
    for depth in 0..max_cycles {
        let mut next = Vec::new();
        for run in &layer {
            for x in 0..np as u16 {
                let mut ext = run.clone();
                ext.push(Percept(x));
                let ext_tokens = replay(policy, np, &ext);
                if member(doc, &ext_tokens) {
                    next.push(ext);
                } else {
                    return OracleVerdict::Violation { cycle: depth + 1, percepts: ext };
                }
            }
        }
        layer = next;
    }
    OracleVerdict::NoViolation
}

/// The token string of the history produced by feeding `percepts` to the policy.
pub fn replay(policy: &PolicyTransducer, percept_count: usize, percepts: &[Percept]) -> Vec<Symbol> {
    let mut s = policy.start();
    let mut out = Vec::with_capacity(percepts.len() * 2);
    for &x in percepts {
        // global ids: percepts first, then actions
        out.push(Symbol(percept_count as u16 + policy.emit(s).0));
        out.push(Symbol(x.0));
        s = policy.step(s, x);
    }
    out
}

/// Fewest all-Good cycles after which some action can be pushed out of `G`,
/// searching every history whose prefixes are all Good, up to `max` cycles.
pub fn shortest_violation_depth(doc: &SpecDoc, max: usize) -> Option<usize> {
    let a = &doc.alphabet;
    if !member(doc, &[]) {
        return None;
    }
    let mut layer: Vec<Vec<Symbol>> = vec![Vec::new()];
    for k in 0..=max {
        let mut next = Vec::new();
        for h in &layer {
            for y in a.all_actions() {
                for x in a.all_percepts() {
                    let mut t = h.clone();
                    t.extend([a.action_symbol(y), a.percept_symbol(x)]);
                    if member(doc, &t) {
                        next.push(t);
                    } else {
                        return Some(k);
                    }
                }
            }
        }
        layer = next;
    }
    None
}

/// Compares [`verify_policy`] with [`brute_force_verify`] to depth `depth`.
/// A counterexample must be the policy's own run, Good on every earlier
/// prefix and non-Good at exactly the reported cycle.
pub fn cross_check(doc: &SpecDoc, d: &Deontology, t: &PolicyTransducer, depth: usize) -> Result<(), String> {
    let verdict = verify_policy(d, t).map_err(|e| e.to_string())?;
    let oracle = brute_force_verify(doc, t, depth);
    match (&verdict, &oracle) {
        (Verdict::Verified, OracleVerdict::NoViolation) => Ok(()),
        (Verdict::Counterexample(c), OracleVerdict::NoViolation) if c.violation_cycle() > depth => Ok(()),
        (Verdict::Counterexample(c), OracleVerdict::Violation { cycle, .. }) if c.violation_cycle() == *cycle => {
            let tokens = replay(t, d.alphabet().percept_count(), &c.percepts());
            let history: Vec<Symbol> = c.extended().symbols().collect();
            if tokens != history {
                return Err(format!("counterexample is not the policy's run: {}", c.extended()));
            }
            if member(doc, &tokens) {
                return Err(format!("counterexample {} is Good", c.extended()));
            }
            if let Some(k) = (0..c.violation_cycle()).find(|&k| !member(doc, &tokens[..2 * k])) {
                return Err(format!("prefix of {k} cycles of {} already not Good", c.extended()));
            }
            Ok(())
        }
        _ => Err(format!("verifier {verdict:?} vs oracle {oracle:?}\n{}", t.render())),
    }
}
