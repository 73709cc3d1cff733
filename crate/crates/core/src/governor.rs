//! Runtime governor: sits between an agent and its actuators and only lets
//! through actions that keep the emitted history Good.
//!
//! The action is committed before the percept arrives, so an action is
//! *safe* at a boundary state when it keeps the history Good for every
//! possible next percept. With foresight the stronger requirement is that
//! the automaton stays inside the governable region, which guarantees a
//! safe action exists at every later cycle too.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::alphabet::{Action, AlphabetError, Percept};
use crate::analysis::{governable_region, SafeActionTable};
use crate::deontology::{Deontology, StateId};
use crate::history::History;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GovernorError {
    #[error("the empty history is not Good")]
    EmptyHistoryNotGood,
    #[error("the start state is outside the governable region")]
    NotGovernable,
    #[error("fallback order must be a permutation of the actions")]
    InvalidFallbackOrder,
    #[error("expected a {expected} but got a {got}")]
    ProtocolOrder { expected: Phase, got: Phase },
    #[error("session is frozen")]
    Frozen,
    #[error(transparent)]
    UnknownSymbol(#[from] AlphabetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Refuses to open unless the governor can keep its guarantee from the start.
    #[default]
    Strict,
    /// Opens regardless; may refuse later.
    Permissive,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum FallbackOrder {
    #[default]
    Declaration,
    Custom(Vec<Action>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GovernorConfig {
    pub mode: Mode,
    /// Restrict to actions that keep the automaton in the governable region.
    pub foresight: bool,
    pub fallback_order: FallbackOrder,
}

impl GovernorConfig {
    pub fn strict() -> Self {
        GovernorConfig::default()
    }

    pub fn with_foresight(mut self, foresight: bool) -> Self {
        self.foresight = foresight;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    AwaitingProposal,
    AwaitingPercept,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::AwaitingProposal => f.write_str("proposal"),
            Phase::AwaitingPercept => f.write_str("percept"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefusalReason {
    NoSafeAction,
}

impl RefusalReason {
    pub fn code(self) -> &'static str {
        match self {
            RefusalReason::NoSafeAction => "no-safe-action",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposalOutcome {
    Approved(Action),
    Substituted { original: Action, replacement: Action },
    Refused(RefusalReason),
}

impl ProposalOutcome {
    /// The action sent to the actuators, if any.
    pub fn emitted(&self) -> Option<Action> {
        match *self {
            ProposalOutcome::Approved(a) => Some(a),
            ProposalOutcome::Substituted { replacement, .. } => Some(replacement),
            ProposalOutcome::Refused(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogEntry {
    pub proposed: Action,
    pub outcome: ProposalOutcome,
}

/// One governed agent. Protocol: `propose`, `observe`, `propose`, …
#[derive(Debug, Clone)]
pub struct GovernorSession {
    deontology: Arc<Deontology>,
    config: GovernorConfig,
    fallback: Vec<Action>,
    allowed: Vec<Vec<bool>>,
    state: StateId,
    phase: Phase,
    pending: Option<Action>,
    frozen: bool,
    log: Vec<LogEntry>,
    history: History,
}

impl GovernorSession {
    pub fn open(deontology: Arc<Deontology>, config: GovernorConfig) -> Result<Self, GovernorError> {
        let a = deontology.alphabet().clone();
        let fallback: Vec<Action> = match &config.fallback_order {
            FallbackOrder::Declaration => a.all_actions().collect(),
            FallbackOrder::Custom(order) => {
                let mut sorted = order.clone();
                sorted.sort_unstable();
                if sorted != a.all_actions().collect::<Vec<_>>() {
                    return Err(GovernorError::InvalidFallbackOrder);
                }
                order.clone()
            }
        };

        let n = deontology.state_count();
        let mut allowed = alloc::vec![alloc::vec![false; a.action_count()]; n];
        let region = config.foresight.then(|| governable_region(&deontology));
        if let Some(region) = &region {
            for (q, row) in allowed.iter_mut().enumerate() {
                for &y in region.preserving_actions(q) {
                    row[y.index()] = true;
                }
            }
        } else {
            let table = SafeActionTable::new(&deontology);
            for q in deontology.boundary_states() {
                for &y in table.strongly_safe(q) {
                    allowed[q][y.index()] = true;
                }
            }
        }

        if config.mode == Mode::Strict {
            if !deontology.accepts_empty() {
                return Err(GovernorError::EmptyHistoryNotGood);
            }
            if region.as_ref().is_some_and(|r| !r.contains(deontology.start())) {
                return Err(GovernorError::NotGovernable);
            }
        }

        let start = deontology.start();
        Ok(GovernorSession {
            history: History::empty(a),
            deontology,
            config,
            fallback,
            allowed,
            state: start,
            phase: Phase::AwaitingProposal,
            pending: None,
            frozen: false,
            log: Vec::new(),
        })
    }

    pub fn deontology(&self) -> &Arc<Deontology> {
        &self.deontology
    }

    pub fn config(&self) -> &GovernorConfig {
        &self.config
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn current_state(&self) -> StateId {
        self.state
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Actions the governor would pass through right now, in declaration order.
    pub fn safe_actions(&self) -> Vec<Action> {
        self.deontology.alphabet().all_actions().filter(|y| self.is_safe(*y)).collect()
    }

    fn is_safe(&self, y: Action) -> bool {
        self.allowed[self.state][y.index()]
    }

    fn expect(&self, phase: Phase) -> Result<(), GovernorError> {
        if self.frozen {
            return Err(GovernorError::Frozen);
        }
        if self.phase != phase {
            return Err(GovernorError::ProtocolOrder { expected: self.phase, got: phase });
        }
        Ok(())
    }

    pub fn propose(&mut self, proposed: Action) -> Result<ProposalOutcome, GovernorError> {
        self.expect(Phase::AwaitingProposal)?;
        if proposed.index() >= self.deontology.alphabet().action_count() {
            return Err(AlphabetError::UnknownSymbol {
                name: alloc::format!("#{}", proposed.0),
                expected: crate::alphabet::Role::Action,
            }
            .into());
        }
        let outcome = if self.is_safe(proposed) {
            ProposalOutcome::Approved(proposed)
        } else if let Some(&replacement) = self.fallback.iter().find(|y| self.is_safe(**y)) {
            ProposalOutcome::Substituted { original: proposed, replacement }
        } else {
            ProposalOutcome::Refused(RefusalReason::NoSafeAction)
        };
        self.log.push(LogEntry { proposed, outcome });
        match outcome.emitted() {
            Some(a) => {
                self.pending = Some(a);
                self.phase = Phase::AwaitingPercept;
            }
            None => self.frozen = true,
        }
        Ok(outcome)
    }

    pub fn propose_named(&mut self, action: &str) -> Result<ProposalOutcome, GovernorError> {
        self.expect(Phase::AwaitingProposal)?;
        let a = self.deontology.alphabet().action(action)?;
        self.propose(a)
    }

    /// Records the percept that completed the cycle. Returns the number of
    /// completed cycles.
    pub fn observe(&mut self, percept: Percept) -> Result<usize, GovernorError> {
        self.expect(Phase::AwaitingPercept)?;
        if percept.index() >= self.deontology.alphabet().percept_count() {
            return Err(AlphabetError::UnknownSymbol {
                name: alloc::format!("#{}", percept.0),
                expected: crate::alphabet::Role::Percept,
            }
            .into());
        }
        let action = self.pending.take().expect("pending action in percept phase");
        self.state = self.deontology.step_cycle(self.state, action, percept);
        self.history.push(action, percept);
        self.phase = Phase::AwaitingProposal;
        Ok(self.history.cycle_count())
    }

    pub fn observe_named(&mut self, percept: &str) -> Result<usize, GovernorError> {
        self.expect(Phase::AwaitingPercept)?;
        let p = self.deontology.alphabet().percept(percept)?;
        self.observe(p)
    }

    /// Emitted history and the decision log.
    pub fn trace(&self) -> (&History, &[LogEntry]) {
        (&self.history, &self.log)
    }

    /// Freezes the session; used by front ends on protocol errors.
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    /// Renders an outcome with action names, e.g. `substituted grab noop`.
    pub fn describe(&self, outcome: &ProposalOutcome) -> String {
        let a = self.deontology.alphabet();
        match *outcome {
            ProposalOutcome::Approved(y) => alloc::format!("approved {}", a.action_name(y)),
            ProposalOutcome::Substituted { original, replacement } => {
                alloc::format!("substituted {} {}", a.action_name(original), a.action_name(replacement))
            }
            ProposalOutcome::Refused(reason) => alloc::format!("refused {}", reason.code()),
        }
    }
}
