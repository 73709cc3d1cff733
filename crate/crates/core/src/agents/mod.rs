//! Policies and environments for simulation.
//!
//! Each cycle the policy picks an action from the history so far, then the
//! environment picks a percept from the history plus that action.

mod environments;
mod policies;

use alloc::vec::Vec;

use thiserror::Error;

pub use environments::{AdversarialEnv, RandomEnv, ScriptedEnv};
pub use policies::{BadPolicy, GoodPolicy, NullPolicy, RandomPolicy, ScriptedPolicy, TransducerPolicy};

use crate::alphabet::{Action, AlphabetError, Percept};
use crate::analysis::Triviality;
use crate::deontology::{Deontology, StateId};
use crate::history::{Cycle, History};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("Good state {state} has no strongly safe action")]
    NotStronglyViable { state: StateId },
    #[error("deontology is trivial ({0:?})")]
    TrivialDeontology(Triviality),
    #[error("the empty history is not Good")]
    EmptyHistoryNotGood,
    #[error("script is empty")]
    EmptyScript,
    #[error("policy and deontology use different alphabets")]
    AlphabetMismatch,
    #[error(transparent)]
    UnknownSymbol(#[from] AlphabetError),
}

/// A map from histories to actions.
pub trait Policy {
    fn name(&self) -> &str;

    fn seed(&self) -> Option<u64> {
        None
    }

    fn next_action(&mut self, history: &History) -> Action;
}

/// Supplies the percept that ends each cycle.
pub trait Environment {
    fn name(&self) -> &str;

    fn seed(&self) -> Option<u64> {
        None
    }

    /// `history` does not yet contain `action`.
    fn next_percept(&mut self, history: &History, action: Action) -> Percept;
}

impl<P: Policy + ?Sized> Policy for alloc::boxed::Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn seed(&self) -> Option<u64> {
        (**self).seed()
    }
    fn next_action(&mut self, history: &History) -> Action {
        (**self).next_action(history)
    }
}

impl<E: Environment + ?Sized> Environment for alloc::boxed::Box<E> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn seed(&self) -> Option<u64> {
        (**self).seed()
    }
    fn next_percept(&mut self, history: &History, action: Action) -> Percept {
        (**self).next_percept(history, action)
    }
}

/// Incrementally tracks the automaton state for a history that usually
/// grows by one cycle per call.
#[derive(Debug, Clone, Default)]
pub(crate) struct StateTracker {
    cycles: Vec<Cycle>,
    /// `states[i]` is the state after `i` cycles.
    states: Vec<StateId>,
}

impl StateTracker {
    pub(crate) fn state(&mut self, d: &Deontology, h: &History) -> StateId {
        if self.states.is_empty() {
            self.states.push(d.start());
        }
        let common = self.cycles.iter().zip(h.cycles()).take_while(|(a, b)| a == b).count();
        self.cycles.truncate(common);
        self.states.truncate(common + 1);
        for c in &h.cycles()[common..] {
            let q = *self.states.last().unwrap();
            self.states.push(d.step_cycle(q, c.action, c.percept));
            self.cycles.push(*c);
        }
        *self.states.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{compile, fixtures, parse_spec};

    #[test]
    fn tracker_handles_rewinds() {
        let d = compile(&parse_spec(fixtures::SPEC_NG).unwrap()).unwrap();
        let mut t = StateTracker::default();
        let a = d.alphabet().clone();
        let good = History::parse("noop ok move err", a.clone()).unwrap();
        let bad = History::parse("grab ok", a.clone()).unwrap();
        assert_eq!(t.state(&d, &good), d.start());
        assert!(d.is_dead(t.state(&d, &bad)));
        assert_eq!(t.state(&d, &good.prefix(1)), d.start());
        assert_eq!(t.state(&d, &History::empty(a)), d.start());
    }
}
