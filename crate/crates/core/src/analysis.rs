//! Decidable predicates over a compiled deontology.
//!
//! All checks quantify over states reachable from the start, so they speak
//! about realizable histories only. Viability comes in two quantifier
//! orders:
//!
//! * weak: at every Good history, for every next percept some action keeps
//!   the history Good (`∀x ∃y`);
//! * strong: at every Good history one action keeps it Good whatever the
//!   next percept is (`∃y ∀x`). A governor that commits to an action before
//!   the percept arrives needs this one.
//!
//! The two coincide when the deontology is consequence-independent.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::alphabet::{Action, Percept};
use crate::deontology::{AlphabetMismatch, Deontology, Parity, StateId};
use crate::history::History;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Triviality {
    /// No history is Good.
    EmptyG,
    /// Every interleaved history is Good.
    FullG,
    NonTrivial,
}

/// Why weak viability fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakViolation {
    /// `(e, e)` is not Good.
    EmptyHistoryNotGood,
    /// At Good state `state`, no action survives `percept`.
    NoSavingAction { state: StateId, percept: Percept },
}

/// Why strong viability fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrongViolation {
    EmptyHistoryNotGood,
    /// At Good state `state`, every action fails for some percept.
    NoStronglySafeAction {
        state: StateId,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Viability {
    pub weak: Result<(), WeakViolation>,
    pub strong: Result<(), StrongViolation>,
}

impl Viability {
    pub fn is_weak(&self) -> bool {
        self.weak.is_ok()
    }

    pub fn is_strong(&self) -> bool {
        self.strong.is_ok()
    }
}

/// A mid-cycle state whose final percept decides Goodness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsequenceWitness {
    /// Boundary state before the action.
    pub state: StateId,
    pub action: Action,
    /// Percept after which the history is Good iff `good_after_first`.
    pub first: Percept,
    /// Percept with the opposite outcome.
    pub second: Percept,
    pub good_after_first: bool,
}

/// Safe actions per boundary state, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafeActionTable {
    strong: Vec<Vec<Action>>,
    weak: Vec<Vec<Vec<Action>>>,
}

impl SafeActionTable {
    pub fn new(d: &Deontology) -> Self {
        let a = d.alphabet();
        let n = d.state_count();
        let mut strong = vec![Vec::new(); n];
        let mut weak = vec![Vec::new(); n];
        for q in d.boundary_states() {
            let mut per_percept = vec![Vec::new(); a.percept_count()];
            for y in a.all_actions() {
                let m = d.step_action(q, y);
                let mut all = true;
                for x in a.all_percepts() {
                    if d.is_accepting(d.step_percept(m, x)) {
                        per_percept[x.index()].push(y);
                    } else {
                        all = false;
                    }
                }
                if all {
                    strong[q].push(y);
                }
            }
            weak[q] = per_percept;
        }
        SafeActionTable { strong, weak }
    }

    /// Actions Good for every next percept at boundary state `q`.
    pub fn strongly_safe(&self, q: StateId) -> &[Action] {
        &self.strong[q]
    }

    /// Actions Good after percept `x` at boundary state `q`.
    pub fn weakly_safe(&self, q: StateId, x: Percept) -> &[Action] {
        self.weak[q].get(x.index()).map_or(&[], Vec::as_slice)
    }
}

/// Safety-game winning region and the actions that stay inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GovernableRegion {
    members: Vec<bool>,
    preserving: Vec<Vec<Action>>,
}

impl GovernableRegion {
    pub fn contains(&self, q: StateId) -> bool {
        self.members.get(q).copied().unwrap_or(false)
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(q, _)| q)
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Actions that keep the automaton inside the region for every percept.
    /// Empty outside the region.
    pub fn preserving_actions(&self, q: StateId) -> &[Action] {
        self.preserving.get(q).map_or(&[], Vec::as_slice)
    }
}

/// Runtime classification of a history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HistoryClass {
    Good,
    /// Not Good, but some continuation is.
    Amendable,
    /// No continuation is Good.
    Dead,
}

impl HistoryClass {
    pub fn as_str(self) -> &'static str {
        match self {
            HistoryClass::Good => "GOOD",
            HistoryClass::Amendable => "AMENDABLE",
            HistoryClass::Dead => "DEAD",
        }
    }
}

impl core::fmt::Display for HistoryClass {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub triviality: Triviality,
    pub accepts_empty: bool,
    pub weak_viable: Result<(), WeakViolation>,
    pub strong_viable: Result<(), StrongViolation>,
    pub consequence_independent: Result<(), ConsequenceWitness>,
    pub governable_region_size: usize,
    pub governable_from_start: bool,
}

pub fn analyze(d: &Deontology) -> AnalysisReport {
    let viability = check_viability(d);
    let region = governable_region(d);
    AnalysisReport {
        triviality: check_trivial(d),
        accepts_empty: d.accepts_empty(),
        weak_viable: viability.weak,
        strong_viable: viability.strong,
        consequence_independent: check_consequence_independence(d),
        governable_region_size: region.len(),
        governable_from_start: region.contains(d.start()),
    }
}

/// Boundary states reachable from the start, in breadth-first order.
pub fn reachable_boundary_states(d: &Deontology) -> Vec<StateId> {
    let a = d.alphabet();
    let mut seen = vec![false; d.state_count()];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([d.start()]);
    seen[d.start()] = true;
    while let Some(q) = queue.pop_front() {
        order.push(q);
        for y in a.all_actions() {
            let m = d.step_action(q, y);
            for x in a.all_percepts() {
                let r = d.step_percept(m, x);
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
    }
    order
}

/// Accepting states some Good history leads to, in ascending order.
pub fn good_reachable_states(d: &Deontology) -> Vec<StateId> {
    let mut states: Vec<StateId> = reachable_boundary_states(d).into_iter().filter(|&q| d.is_accepting(q)).collect();
    states.sort_unstable();
    states
}

pub fn check_trivial(d: &Deontology) -> Triviality {
    let reachable = reachable_boundary_states(d);
    // every state reached after whole cycles is reached by some history in H
    if reachable.iter().all(|&q| !d.is_accepting(q)) {
        Triviality::EmptyG
    } else if reachable.iter().all(|&q| d.is_accepting(q)) {
        Triviality::FullG
    } else {
        Triviality::NonTrivial
    }
}

pub fn check_viability(d: &Deontology) -> Viability {
    if !d.accepts_empty() {
        return Viability {
            weak: Err(WeakViolation::EmptyHistoryNotGood),
            strong: Err(StrongViolation::EmptyHistoryNotGood),
        };
    }
    let table = SafeActionTable::new(d);
    let good = good_reachable_states(d);
    let weak = good
        .iter()
        .find_map(|&q| {
            d.alphabet()
                .all_percepts()
                .find(|&x| table.weakly_safe(q, x).is_empty())
                .map(|percept| WeakViolation::NoSavingAction { state: q, percept })
        })
        .map_or(Ok(()), Err);
    let strong = good
        .iter()
        .find(|&&q| table.strongly_safe(q).is_empty())
        .map_or(Ok(()), |&q| Err(StrongViolation::NoStronglySafeAction { state: q }));
    Viability { weak, strong }
}

/// Checks that the last percept never decides Goodness at any reachable
/// mid-cycle state.
pub fn check_consequence_independence(d: &Deontology) -> Result<(), ConsequenceWitness> {
    let a = d.alphabet();
    let first = Percept(0);
    for q in reachable_boundary_states(d) {
        for y in a.all_actions() {
            let m = d.step_action(q, y);
            if d.parity(m) != Parity::Mid {
                continue;
            }
            let good_after_first = d.is_accepting(d.step_percept(m, first));
            if let Some(second) =
                a.all_percepts().skip(1).find(|&x| d.is_accepting(d.step_percept(m, x)) != good_after_first)
            {
                return Err(ConsequenceWitness { state: q, action: y, first, second, good_after_first });
            }
        }
    }
    Ok(())
}

/// Greatest fixpoint of the controllable-predecessor operator, seeded with
/// the accepting states.
pub fn governable_region(d: &Deontology) -> GovernableRegion {
    let a = d.alphabet();
    let n = d.state_count();
    let mut members: Vec<bool> = (0..n).map(|q| d.is_accepting(q)).collect();
    let preserving_in = |members: &[bool], q: StateId| -> Vec<Action> {
        a.all_actions()
            .filter(|&y| {
                let m = d.step_action(q, y);
                a.all_percepts().all(|x| members[d.step_percept(m, x)])
            })
            .collect()
    };
    loop {
        let removed: Vec<StateId> = (0..n).filter(|&q| members[q] && preserving_in(&members, q).is_empty()).collect();
        if removed.is_empty() {
            break;
        }
        for q in removed {
            members[q] = false;
        }
    }
    let preserving = (0..n).map(|q| if members[q] { preserving_in(&members, q) } else { Vec::new() }).collect();
    GovernableRegion { members, preserving }
}

pub fn classify_state(d: &Deontology, q: StateId) -> HistoryClass {
    if d.is_accepting(q) {
        HistoryClass::Good
    } else if d.is_dead(q) {
        HistoryClass::Dead
    } else {
        HistoryClass::Amendable
    }
}

pub fn classify_history(d: &Deontology, h: &History) -> Result<HistoryClass, AlphabetMismatch> {
    d.run(h).map(|q| classify_state(d, q))
}
