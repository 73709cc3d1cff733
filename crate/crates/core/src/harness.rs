//! Simulation loop, post-hoc compliance checking and the homunculus demo.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use thiserror::Error;

use crate::agents::{Environment, Policy};
use crate::alphabet::{Action, Percept};
use crate::analysis::{classify_state, HistoryClass};
use crate::deontology::{compile, AlphabetMismatch, Deontology};
use crate::fixtures;
use crate::governor::{GovernorConfig, GovernorError, GovernorSession, ProposalOutcome};
use crate::history::History;
use crate::spec::parse_spec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Governor(#[from] GovernorError),
    #[error("no outer action mapped for inner action {intent} at cycle {cycle}")]
    MappingIncomplete { intent: Intent, cycle: usize },
}

/// One simulated cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleEntry {
    pub proposed: Action,
    /// Governor verdict; `None` for ungoverned runs.
    pub outcome: Option<ProposalOutcome>,
    /// The emitted action and the percept that followed, absent after a refusal.
    pub emitted: Option<(Action, Percept)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub spec_name: String,
    pub spec_hash: String,
    pub policy: String,
    pub policy_seed: Option<u64>,
    pub env: String,
    pub env_seed: Option<u64>,
    pub governed: bool,
    pub config: Option<GovernorConfig>,
    /// Cycles requested.
    pub requested_cycles: usize,
    /// Cycles completed; short of `requested_cycles` only after a refusal.
    pub cycles: usize,
    pub history: History,
    pub entries: Vec<CycleEntry>,
    /// Classification of each completed prefix, from cycle 1 on.
    pub classifications: Vec<HistoryClass>,
    /// 1-based.
    pub first_violation_cycle: Option<usize>,
}

impl RunRecord {
    pub fn refused(&self) -> bool {
        self.entries.last().is_some_and(|e| e.emitted.is_none())
    }

    pub fn count(&self, class: HistoryClass) -> usize {
        self.classifications.iter().filter(|&&c| c == class).count()
    }
}

/// Runs `cycles` cycles. With a governor config, every proposal goes through
/// a fresh strict or permissive session and the run stops at a refusal.
/// Ungoverned runs always complete, violations included.
pub fn simulate(
    d: &Arc<Deontology>,
    spec_name: &str,
    policy: &mut dyn Policy,
    env: &mut dyn Environment,
    cycles: usize,
    governor: Option<GovernorConfig>,
) -> Result<RunRecord, HarnessError> {
    let mut session = governor.clone().map(|cfg| GovernorSession::open(d.clone(), cfg)).transpose()?;
    let mut history = History::empty(d.alphabet().clone());
    let mut entries = Vec::with_capacity(cycles);
    for _ in 0..cycles {
        let proposed = policy.next_action(&history);
        let (outcome, action) = match session.as_mut() {
            Some(s) => {
                let outcome = s.propose(proposed)?;
                (Some(outcome), outcome.emitted())
            }
            None => (None, Some(proposed)),
        };
        let Some(action) = action else {
            entries.push(CycleEntry { proposed, outcome, emitted: None });
            break;
        };
        let percept = env.next_percept(&history, action);
        if let Some(s) = session.as_mut() {
            s.observe(percept)?;
        }
        history.push(action, percept);
        entries.push(CycleEntry { proposed, outcome, emitted: Some((action, percept)) });
    }
    let classifications = check_run(d, &history).expect("history built over the deontology's alphabet");
    let first_violation_cycle = first_violation(&classifications);
    Ok(RunRecord {
        spec_name: spec_name.to_string(),
        spec_hash: d.fingerprint(),
        policy: policy.name().to_string(),
        policy_seed: policy.seed(),
        env: env.name().to_string(),
        env_seed: env.seed(),
        governed: governor.is_some(),
        config: governor,
        requested_cycles: cycles,
        cycles: history.cycle_count(),
        history,
        entries,
        classifications,
        first_violation_cycle,
    })
}

/// Classifies every completed prefix in one pass over the automaton.
pub fn check_run(d: &Deontology, h: &History) -> Result<Vec<HistoryClass>, AlphabetMismatch> {
    d.check_alphabet(h.alphabet())?;
    let mut q = d.start();
    Ok(h.cycles()
        .iter()
        .map(|c| {
            q = d.step_cycle(q, c.action, c.percept);
            classify_state(d, q)
        })
        .collect())
}

fn first_violation(classes: &[HistoryClass]) -> Option<usize> {
    classes.iter().position(|&c| c != HistoryClass::Good).map(|i| i + 1)
}

/// Action of the inner agent in the homunculus demo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Intent {
    G,
    B,
}

impl core::fmt::Display for Intent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Intent::G => "G",
            Intent::B => "B",
        })
    }
}

/// Turns inner intents into outer actions. Overrides keyed by
/// `(intent, cycle)` win over the per-intent default.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OuterMapping {
    defaults: BTreeMap<Intent, Action>,
    overrides: BTreeMap<(Intent, usize), Action>,
}

impl OuterMapping {
    pub fn new() -> Self {
        Self::default()
    }

    /// Maps both intents to `action` at every cycle.
    pub fn constant(action: Action) -> Self {
        Self::new().with_default(Intent::G, action).with_default(Intent::B, action)
    }

    pub fn with_default(mut self, intent: Intent, action: Action) -> Self {
        self.defaults.insert(intent, action);
        self
    }

    pub fn with_override(mut self, intent: Intent, cycle: usize, action: Action) -> Self {
        self.overrides.insert((intent, cycle), action);
        self
    }

    /// Overrides cycle `cycle` (1-based) for both intents.
    pub fn at_cycle(self, cycle: usize, action: Action) -> Self {
        self.with_override(Intent::G, cycle, action).with_override(Intent::B, cycle, action)
    }

    pub fn lookup(&self, intent: Intent, cycle: usize) -> Result<Action, HarnessError> {
        self.overrides
            .get(&(intent, cycle))
            .or_else(|| self.defaults.get(&intent))
            .copied()
            .ok_or(HarnessError::MappingIncomplete { intent, cycle })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomunculusReport {
    pub inner_history: History,
    pub outer_history: History,
    /// Fraction of completed inner prefixes that are Good.
    pub inner_compliance: f64,
    /// 1-based cycle at which the outer history first stops being Good.
    pub outer_compliance_cycle: Option<usize>,
}

/// The inner agent always intends `G` and is checked against the homunculus
/// deontology, which it can never violate. The outer agent acts on
/// `mapping(intent, cycle)` and is checked against `outer`.
///
/// The inner agent sees the outer percept with index `p mod |inner percepts|`.
pub fn homunculus_demo(
    outer: &Deontology,
    mapping: &OuterMapping,
    env: &mut dyn Environment,
    cycles: usize,
) -> Result<HomunculusReport, HarnessError> {
    let inner = compile(&parse_spec(fixtures::SPEC_HOM).expect("fixture parses")).expect("fixture compiles");
    let inner_alphabet = inner.alphabet().clone();
    let g = inner_alphabet.action("G").expect("fixture declares G");
    let inner_percepts = inner_alphabet.percept_count() as u16;

    let mut inner_history = History::empty(inner_alphabet);
    let mut outer_history = History::empty(outer.alphabet().clone());
    for cycle in 1..=cycles {
        let action = mapping.lookup(Intent::G, cycle)?;
        let percept = env.next_percept(&outer_history, action);
        outer_history.push(action, percept);
        inner_history.push(g, Percept(percept.0 % inner_percepts));
    }

    let inner_classes = check_run(&inner, &inner_history).expect("same alphabet");
    let inner_compliance = if inner_classes.is_empty() {
        1.0
    } else {
        inner_classes.iter().filter(|&&c| c == HistoryClass::Good).count() as f64 / inner_classes.len() as f64
    };
    let outer_classes = check_run(outer, &outer_history).expect("same alphabet");
    Ok(HomunculusReport {
        inner_history,
        outer_history,
        inner_compliance,
        outer_compliance_cycle: first_violation(&outer_classes),
    })
}
