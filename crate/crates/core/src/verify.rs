//! Policy verification for finite-state policies.
//!
//! Deciding whether an arbitrary policy only ever picks Good actions is
//! undecidable (it is a non-trivial semantic property of a computable
//! function). For a [`PolicyTransducer`] the reachable part of its product
//! with the deontology automaton is finite, so a breadth-first search
//! settles the question and yields a shortest counterexample.
//!
//! The search follows the policy's own runs from the empty history: it
//! explores every percept sequence while the history stays Good and
//! reports the first Good history at which the policy's action can be
//! driven out of `G` by some percept.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::alphabet::{Action, Percept};
use crate::deontology::{AlphabetMismatch, Deontology};
use crate::history::{Cycle, History};
use crate::transducer::PolicyTransducer;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Good history (with every prefix Good) reached by the policy.
    pub history: History,
    /// The policy's choice at `history`.
    pub action: Action,
    /// A percept that makes the extension non-Good.
    pub percept: Percept,
}

impl Counterexample {
    /// 1-based cycle at which the violation happens.
    pub fn violation_cycle(&self) -> usize {
        self.history.cycle_count() + 1
    }

    /// `history` extended by the violating cycle.
    pub fn extended(&self) -> History {
        let mut h = self.history.clone();
        h.push(self.action, self.percept);
        h
    }

    /// Percepts to feed the policy to replay the violation.
    pub fn percepts(&self) -> Vec<Percept> {
        self.history.cycles().iter().map(|c| c.percept).chain([self.percept]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Verified => None,
            Verdict::Counterexample(c) => Some(c),
        }
    }
}

pub fn verify_policy(d: &Deontology, policy: &PolicyTransducer) -> Result<Verdict, AlphabetMismatch> {
    d.check_alphabet(policy.alphabet())?;
    if !d.accepts_empty() {
        return Ok(Verdict::Verified);
    }
    let a = d.alphabet();
    let n_policy = policy.len();
    let index = |t: usize, q: usize| q * n_policy + t;

    // parent links: (previous node, cycle taken)
    let mut parent: Vec<Option<(usize, Cycle)>> = vec![None; n_policy * d.state_count()];
    let mut seen = vec![false; n_policy * d.state_count()];
    let mut queue = VecDeque::new();
    seen[index(policy.start(), d.start())] = true;
    queue.push_back((policy.start(), d.start()));

    while let Some((t, q)) = queue.pop_front() {
        let action = policy.emit(t);
        let mid = d.step_action(q, action);
        let mut successors = Vec::with_capacity(a.percept_count());
        for percept in a.all_percepts() {
            let r = d.step_percept(mid, percept);
            if !d.is_accepting(r) {
                let history = rebuild(d, &parent, index(t, q));
                return Ok(Verdict::Counterexample(Counterexample { history, action, percept }));
            }
            successors.push((policy.step(t, percept), r, percept));
        }
        for (t2, r, percept) in successors {
            let i = index(t2, r);
            if !seen[i] {
                seen[i] = true;
                parent[i] = Some((index(t, q), Cycle { action, percept }));
                queue.push_back((t2, r));
            }
        }
    }
    Ok(Verdict::Verified)
}

fn rebuild(d: &Deontology, parent: &[Option<(usize, Cycle)>], mut node: usize) -> History {
    let mut cycles = Vec::new();
    while let Some((prev, cycle)) = parent[node] {
        cycles.push(cycle);
        node = prev;
    }
    cycles.reverse();
    History::from_cycles(d.alphabet().clone(), cycles)
}
