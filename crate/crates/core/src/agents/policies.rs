use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AgentError, Policy, StateTracker};
use crate::alphabet::{Action, Alphabet, Percept};
use crate::analysis::{check_trivial, good_reachable_states, SafeActionTable, Triviality};
use crate::deontology::{Deontology, StateId};
use crate::history::{Cycle, History};
use crate::transducer::PolicyTransducer;

/// Always emits the same action. An agent that does nothing is trivially Good
/// under any deontology that tolerates its no-op.
#[derive(Debug, Clone)]
pub struct NullPolicy {
    action: Action,
    name: String,
}

impl NullPolicy {
    pub fn new(alphabet: &Alphabet, noop: &str) -> Result<Self, AgentError> {
        let action = alphabet.action(noop)?;
        Ok(NullPolicy { action, name: format!("null({noop})") })
    }

    pub fn action(&self) -> Action {
        self.action
    }

    pub fn to_transducer(&self, alphabet: Arc<Alphabet>) -> PolicyTransducer {
        let np = alphabet.percept_count();
        PolicyTransducer::new(alphabet, vec!["s0".into()], 0, vec![self.action], vec![0; np])
            .expect("constant transducer is total")
    }
}

impl Policy for NullPolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn next_action(&mut self, _history: &History) -> Action {
        self.action
    }
}

/// Uniform over the declared actions, seeded.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    rng: ChaCha8Rng,
    seed: u64,
    actions: u16,
}

impl RandomPolicy {
    pub fn new(alphabet: &Alphabet, seed: u64) -> Self {
        RandomPolicy { rng: ChaCha8Rng::seed_from_u64(seed), seed, actions: alphabet.action_count() as u16 }
    }
}

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn next_action(&mut self, _history: &History) -> Action {
        Action(self.rng.random_range(0..self.actions))
    }
}

/// Plays a fixed action list by cycle index; the last entry repeats.
#[derive(Debug, Clone)]
pub struct ScriptedPolicy {
    script: Vec<Action>,
}

impl ScriptedPolicy {
    pub fn new(script: Vec<Action>) -> Result<Self, AgentError> {
        if script.is_empty() {
            return Err(AgentError::EmptyScript);
        }
        Ok(ScriptedPolicy { script })
    }
}

impl Policy for ScriptedPolicy {
    fn name(&self) -> &str {
        "scripted"
    }

    fn next_action(&mut self, history: &History) -> Action {
        let i = history.cycle_count().min(self.script.len() - 1);
        self.script[i]
    }
}

/// Runs a [`PolicyTransducer`] over the observed percepts.
#[derive(Debug, Clone)]
pub struct TransducerPolicy {
    machine: PolicyTransducer,
    seen: Vec<Percept>,
    states: Vec<usize>,
}

impl TransducerPolicy {
    pub fn new(machine: PolicyTransducer) -> Self {
        let start = machine.start();
        TransducerPolicy { machine, seen: Vec::new(), states: vec![start] }
    }

    pub fn machine(&self) -> &PolicyTransducer {
        &self.machine
    }
}

impl Policy for TransducerPolicy {
    fn name(&self) -> &str {
        "transducer"
    }

    fn next_action(&mut self, history: &History) -> Action {
        let percepts = history.cycles();
        let common = self.seen.iter().zip(percepts).take_while(|(p, c)| **p == c.percept).count();
        self.seen.truncate(common);
        self.states.truncate(common + 1);
        for c in &percepts[common..] {
            let s = *self.states.last().unwrap();
            self.states.push(self.machine.step(s, c.percept));
            self.seen.push(c.percept);
        }
        self.machine.emit(*self.states.last().unwrap())
    }
}

/// At a Good history, the first action (in declaration order) that keeps the
/// history Good for every next percept; elsewhere the first declared action.
#[derive(Debug, Clone)]
pub struct GoodPolicy {
    deontology: Arc<Deontology>,
    choice: Vec<Action>,
    tracker: StateTracker,
}

impl GoodPolicy {
    pub fn new(deontology: Arc<Deontology>) -> Result<Self, AgentError> {
        let table = SafeActionTable::new(&deontology);
        if let Some(&state) = good_reachable_states(&deontology).iter().find(|&&q| table.strongly_safe(q).is_empty()) {
            return Err(AgentError::NotStronglyViable { state });
        }
        let choice = (0..deontology.state_count())
            .map(|q| {
                if deontology.is_accepting(q) {
                    table.strongly_safe(q).first().copied().unwrap_or(Action(0))
                } else {
                    Action(0)
                }
            })
            .collect();
        Ok(GoodPolicy { deontology, choice, tracker: StateTracker::default() })
    }

    pub fn action_at(&self, q: StateId) -> Action {
        self.choice[q]
    }

    /// The induced finite-state policy: states are automaton boundary states
    /// reachable under this policy's own actions.
    pub fn to_transducer(&self) -> PolicyTransducer {
        let d = &self.deontology;
        let a = d.alphabet();
        let mut ids = vec![usize::MAX; d.state_count()];
        let mut order = vec![d.start()];
        ids[d.start()] = 0;
        let mut next = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for x in a.all_percepts() {
                let r = d.step_cycle(q, self.choice[q], x);
                if ids[r] == usize::MAX {
                    ids[r] = order.len();
                    order.push(r);
                }
                next.push(ids[r]);
            }
        }
        let names = order.iter().map(|q| format!("q{q}")).collect();
        let emit = order.iter().map(|&q| self.choice[q]).collect();
        PolicyTransducer::new(a.clone(), names, 0, emit, next).expect("induced transducer is total")
    }
}

impl Policy for GoodPolicy {
    fn name(&self) -> &str {
        "good"
    }

    fn next_action(&mut self, history: &History) -> Action {
        let q = self.tracker.state(&self.deontology, history);
        self.choice[q]
    }
}

/// Walks a shortest all-Good route to a history where some action can be
/// pushed out of `G` by a percept, then plays that action. Everywhere else
/// it plays the first declared action.
#[derive(Debug, Clone)]
pub struct BadPolicy {
    alphabet: Arc<Alphabet>,
    route: Vec<Cycle>,
    violating_action: Action,
    witness_percept: Percept,
}

impl BadPolicy {
    pub fn new(deontology: &Deontology) -> Result<Self, AgentError> {
        match check_trivial(deontology) {
            Triviality::NonTrivial => {}
            other => return Err(AgentError::TrivialDeontology(other)),
        }
        if !deontology.accepts_empty() {
            return Err(AgentError::EmptyHistoryNotGood);
        }
        let (route, violating_action, witness_percept) =
            shortest_violation(deontology).expect("a non-trivial deontology with (e, e) Good has a violation");
        Ok(BadPolicy { alphabet: deontology.alphabet().clone(), route, violating_action, witness_percept })
    }

    /// The Good history at which the policy defects.
    pub fn target(&self) -> History {
        History::from_cycles(self.alphabet.clone(), self.route.clone())
    }

    pub fn violating_action(&self) -> Action {
        self.violating_action
    }

    /// A percept that turns the defection into a non-Good history.
    pub fn witness_percept(&self) -> Percept {
        self.witness_percept
    }

    /// Route positions `r0..rn`, plus `off` for histories that left the route.
    pub fn to_transducer(&self) -> PolicyTransducer {
        let n = self.route.len();
        let off = n + 1;
        let mut names: Vec<String> = (0..=n).map(|i| format!("r{i}")).collect();
        names.push("off".to_string());
        let mut emit: Vec<Action> = self.route.iter().map(|c| c.action).collect();
        emit.push(self.violating_action);
        emit.push(Action(0));
        let mut next = Vec::new();
        for i in 0..=off {
            for x in self.alphabet.all_percepts() {
                next.push(if i < n && self.route[i].percept == x { i + 1 } else { off });
            }
        }
        PolicyTransducer::new(self.alphabet.clone(), names, 0, emit, next).expect("route transducer is total")
    }
}

impl Policy for BadPolicy {
    fn name(&self) -> &str {
        "bad"
    }

    fn next_action(&mut self, history: &History) -> Action {
        let k = history.cycle_count();
        if k <= self.route.len() && history.cycles() == &self.route[..k] {
            self.route.get(k).map_or(self.violating_action, |c| c.action)
        } else {
            Action(0)
        }
    }
}

/// Breadth-first over Good states through Good histories only. Returns the
/// route, the first action with a violating percept, and that percept.
fn shortest_violation(d: &Deontology) -> Option<(Vec<Cycle>, Action, Percept)> {
    let a = d.alphabet();
    let mut parent: Vec<Option<(StateId, Cycle)>> = vec![None; d.state_count()];
    let mut seen = vec![false; d.state_count()];
    let mut queue = VecDeque::from([d.start()]);
    seen[d.start()] = true;
    while let Some(q) = queue.pop_front() {
        for y in a.all_actions() {
            if let Some(x) = a.all_percepts().find(|&x| !d.is_accepting(d.step_cycle(q, y, x))) {
                let mut route = Vec::new();
                let mut node = q;
                while let Some((prev, cycle)) = parent[node] {
                    route.push(cycle);
                    node = prev;
                }
                route.reverse();
                return Some((route, y, x));
            }
        }
        for y in a.all_actions() {
            for x in a.all_percepts() {
                let r = d.step_cycle(q, y, x);
                if !seen[r] {
                    seen[r] = true;
                    parent[r] = Some((q, Cycle { action: y, percept: x }));
                    queue.push_back(r);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{compile, fixtures, parse_spec};

    fn build(text: &str) -> Arc<Deontology> {
        Arc::new(compile(&parse_spec(text).unwrap()).unwrap())
    }

    fn h(d: &Deontology, text: &str) -> History {
        History::parse(text, d.alphabet().clone()).unwrap()
    }

    #[test]
    fn null_policy() {
        let d = build(fixtures::SPEC_NG);
        let mut p = NullPolicy::new(d.alphabet(), "noop").unwrap();
        assert_eq!(p.next_action(&History::empty(d.alphabet().clone())), Action(0));
        let long = h(&d, "grab ok grab ok move err noop ok noop err");
        assert_eq!(p.next_action(&long), Action(0));
        assert!(NullPolicy::new(d.alphabet(), "ok").is_err());
    }

    #[test]
    fn random_policy_is_reproducible() {
        let d = build(fixtures::SPEC_NG);
        let e = History::empty(d.alphabet().clone());
        let mut a = RandomPolicy::new(d.alphabet(), 7);
        let mut b = RandomPolicy::new(d.alphabet(), 7);
        let xs: Vec<Action> = (0..100).map(|_| a.next_action(&e)).collect();
        let ys: Vec<Action> = (0..100).map(|_| b.next_action(&e)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn good_policy_choices() {
        let rs = build(fixtures::SPEC_RS);
        let mut p = GoodPolicy::new(rs.clone()).unwrap();
        assert_eq!(rs.alphabet().action_name(p.next_action(&h(&rs, "go green"))), "go");
        assert_eq!(rs.alphabet().action_name(p.next_action(&h(&rs, "go red"))), "stop");
        let ng = build(fixtures::SPEC_NG);
        let mut p = GoodPolicy::new(ng.clone()).unwrap();
        assert_eq!(p.next_action(&History::empty(ng.alphabet().clone())), Action(0));
        assert_eq!(p.next_action(&h(&ng, "grab ok")), Action(0));
        let guess = build(fixtures::SPEC_GUESS);
        assert!(matches!(GoodPolicy::new(guess), Err(AgentError::NotStronglyViable { .. })));
    }

    #[test]
    fn bad_policy_targets() {
        let ng = build(fixtures::SPEC_NG);
        let b = BadPolicy::new(&ng).unwrap();
        assert!(b.target().is_empty());
        assert_eq!(ng.alphabet().action_name(b.violating_action()), "grab");

        let rs = build(fixtures::SPEC_RS);
        let mut b = BadPolicy::new(&rs).unwrap();
        assert_eq!(b.target().render(), "go red");
        assert_eq!(rs.alphabet().action_name(b.violating_action()), "go");
        assert_eq!(b.next_action(&h(&rs, "")), Action(0));
        assert_eq!(b.next_action(&h(&rs, "go red")), Action(0));
        assert_eq!(b.next_action(&h(&rs, "go green")), Action(0));

        let full = build("percepts: ok\nactions: a\ngood: %\n");
        assert!(matches!(BadPolicy::new(&full), Err(AgentError::TrivialDeontology(Triviality::FullG))));
    }

    #[test]
    fn scripted_policy_repeats_last() {
        let ng = build(fixtures::SPEC_NG);
        let mut p = ScriptedPolicy::new(vec![Action(2), Action(1)]).unwrap();
        assert_eq!(p.next_action(&h(&ng, "")), Action(2));
        assert_eq!(p.next_action(&h(&ng, "noop ok noop ok noop ok")), Action(1));
        assert!(ScriptedPolicy::new(Vec::new()).is_err());
    }

    #[test]
    fn transducer_policy_follows_percepts() {
        let ng = build(fixtures::SPEC_NG);
        let t = PolicyTransducer::parse(
            "start: a\nemit: a noop\nemit: b move\non: a ok -> a\non: a err -> b\non: b ok -> b\non: b err -> a\n",
            ng.alphabet().clone(),
        )
        .unwrap();
        let mut p = TransducerPolicy::new(t);
        assert_eq!(p.next_action(&h(&ng, "grab err")), Action(1));
        assert_eq!(p.next_action(&h(&ng, "grab err noop err")), Action(0));
        assert_eq!(p.next_action(&h(&ng, "noop ok")), Action(0));
    }
}
