use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AgentError, Environment, StateTracker};
use crate::alphabet::{Action, Alphabet, Percept};
use crate::analysis::SafeActionTable;
use crate::deontology::Deontology;
use crate::history::History;

/// Uniform over the declared percepts, seeded. Draws from a different
/// ChaCha stream than [`RandomPolicy`](super::RandomPolicy), so equal seeds
/// do not correlate actions with percepts.
#[derive(Debug, Clone)]
pub struct RandomEnv {
    rng: ChaCha8Rng,
    seed: u64,
    percepts: u16,
}

impl RandomEnv {
    pub fn new(alphabet: &Alphabet, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        RandomEnv { rng, seed, percepts: alphabet.percept_count() as u16 }
    }
}

impl Environment for RandomEnv {
    fn name(&self) -> &str {
        "random"
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn next_percept(&mut self, _history: &History, _action: Action) -> Percept {
        Percept(self.rng.random_range(0..self.percepts))
    }
}

/// Plays a fixed percept list by cycle index; the last entry repeats.
#[derive(Debug, Clone)]
pub struct ScriptedEnv {
    script: Vec<Percept>,
}

impl ScriptedEnv {
    pub fn new(script: Vec<Percept>) -> Result<Self, AgentError> {
        if script.is_empty() {
            return Err(AgentError::EmptyScript);
        }
        Ok(ScriptedEnv { script })
    }
}

impl Environment for ScriptedEnv {
    fn name(&self) -> &str {
        "scripted"
    }

    fn next_percept(&mut self, history: &History, _action: Action) -> Percept {
        self.script[history.cycle_count().min(self.script.len() - 1)]
    }
}

/// Picks the percept that hurts the agent most: one that leaves `G` if any,
/// otherwise the one leaving the fewest strongly safe actions. Ties go to
/// declaration order.
#[derive(Debug, Clone)]
pub struct AdversarialEnv {
    deontology: Arc<Deontology>,
    table: SafeActionTable,
    tracker: StateTracker,
}

impl AdversarialEnv {
    pub fn new(deontology: Arc<Deontology>) -> Self {
        let table = SafeActionTable::new(&deontology);
        AdversarialEnv { deontology, table, tracker: StateTracker::default() }
    }
}

impl Environment for AdversarialEnv {
    fn name(&self) -> &str {
        "adversarial"
    }

    fn next_percept(&mut self, history: &History, action: Action) -> Percept {
        let d = &self.deontology;
        let q = self.tracker.state(d, history);
        let mid = d.step_action(q, action);
        d.alphabet()
            .all_percepts()
            .min_by_key(|&x| {
                let r = d.step_percept(mid, x);
                (d.is_accepting(r), self.table.strongly_safe(r).len())
            })
            .expect("alphabet has percepts")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{compile, fixtures, parse_spec};

    fn build(text: &str) -> Arc<Deontology> {
        Arc::new(compile(&parse_spec(text).unwrap()).unwrap())
    }

    #[test]
    fn adversary_choices() {
        let guess = build(fixtures::SPEC_GUESS);
        let e = History::empty(guess.alphabet().clone());
        let mut env = AdversarialEnv::new(guess.clone());
        assert_eq!(guess.alphabet().percept_name(env.next_percept(&e, Action(0))), "pb");
        assert_eq!(guess.alphabet().percept_name(env.next_percept(&e, Action(1))), "pa");

        let ng = build(fixtures::SPEC_NG);
        let mut env = AdversarialEnv::new(ng.clone());
        let e = History::empty(ng.alphabet().clone());
        assert_eq!(ng.alphabet().percept_name(env.next_percept(&e, Action(0))), "ok");
    }

    #[test]
    fn scripted_env_repeats_last() {
        let rs = build(fixtures::SPEC_RS);
        let a = rs.alphabet().clone();
        let mut env = ScriptedEnv::new(alloc::vec![a.percept("red").unwrap(), a.percept("green").unwrap()]).unwrap();
        let mut h = History::empty(a.clone());
        let mut names = Vec::new();
        for _ in 0..4 {
            let p = env.next_percept(&h, Action(0));
            names.push(a.percept_name(p).to_string());
            h.push(Action(0), p);
        }
        assert_eq!(names, ["red", "green", "green", "green"]);
    }

    #[test]
    fn random_env_frequencies_near_uniform() {
        let rs = build(fixtures::SPEC_RS);
        let e = History::empty(rs.alphabet().clone());
        let mut env = RandomEnv::new(rs.alphabet(), 3);
        let draws = 10_000;
        let reds = (0..draws).filter(|_| env.next_percept(&e, Action(0)) == Percept(1)).count();
        let expected = draws / 2;
        assert!(reds.abs_diff(expected) * 20 <= expected, "reds = {reds}");
    }
}
