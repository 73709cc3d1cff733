//! Finite-state policies: Moore machines that emit an action per state and
//! move on each observed percept.
//!
//! `.fst` format, one directive per line, `#` comments:
//!
//! ```text
//! start: s0
//! emit: s0 noop
//! on: s0 ok -> s0
//! on: s0 err -> s1
//! ```
//!
//! Every state needs an `emit` line and an `on` line for every percept.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use thiserror::Error;

use crate::alphabet::{Action, Alphabet, AlphabetError, Percept};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransducerError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: {source}")]
    UnknownSymbol { line: usize, source: AlphabetError },
    #[error("state `{state}` has no emitted action")]
    MissingEmit { state: String },
    #[error("state `{state}` has no transition on percept `{percept}`")]
    MissingTransition { state: String, percept: String },
}

impl TransducerError {
    /// Whether the machine is syntactically fine but not total.
    pub fn is_partial(&self) -> bool {
        matches!(self, TransducerError::MissingEmit { .. } | TransducerError::MissingTransition { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyTransducer {
    alphabet: Arc<Alphabet>,
    names: Vec<String>,
    start: usize,
    emit: Vec<Action>,
    next: Vec<usize>,
}

impl PolicyTransducer {
    /// Builds a transducer from tables. `next[s * |X| + x]` is the successor
    /// of state `s` on percept `x`.
    pub fn new(
        alphabet: Arc<Alphabet>,
        names: Vec<String>,
        start: usize,
        emit: Vec<Action>,
        next: Vec<usize>,
    ) -> Result<Self, TransducerError> {
        let n = names.len();
        let bad = |message: &str| TransducerError::Format { line: 0, message: message.to_string() };
        if n == 0 || start >= n {
            return Err(bad("start state out of range"));
        }
        if emit.len() != n {
            return Err(TransducerError::MissingEmit { state: names[emit.len().min(n - 1)].clone() });
        }
        if emit.iter().any(|a| a.index() >= alphabet.action_count()) {
            return Err(bad("emitted action out of range"));
        }
        let np = alphabet.percept_count();
        if next.len() != n * np {
            let idx = next.len().min(n * np - 1);
            return Err(TransducerError::MissingTransition {
                state: names[idx / np].clone(),
                percept: alphabet.percept_name(Percept((idx % np) as u16)).to_string(),
            });
        }
        if next.iter().any(|&t| t >= n) {
            return Err(bad("transition target out of range"));
        }
        Ok(PolicyTransducer { alphabet, names, start, emit, next })
    }

    pub fn parse(text: &str, alphabet: Arc<Alphabet>) -> Result<Self, TransducerError> {
        let mut names: Vec<String> = Vec::new();
        let mut intern = |name: &str| -> usize {
            match names.iter().position(|n| n == name) {
                Some(i) => i,
                None => {
                    names.push(name.to_string());
                    names.len() - 1
                }
            }
        };
        let mut start: Option<usize> = None;
        let mut emit: Vec<(usize, Action, usize)> = Vec::new();
        let mut edges: Vec<(usize, Percept, usize, usize)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let format = |message: &str| TransducerError::Format { line, message: message.to_string() };
            let symbol = |source: AlphabetError| TransducerError::UnknownSymbol { line, source };
            let (key, rest) = content.split_once(':').ok_or_else(|| format("expected `<directive>: ...`"))?;
            let words: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "start" => {
                    let [state] = words[..] else { return Err(format("expected `start: <state>`")) };
                    if start.is_some() {
                        return Err(format("duplicate `start`"));
                    }
                    start = Some(intern(state));
                }
                "emit" => {
                    let [state, action] = words[..] else { return Err(format("expected `emit: <state> <action>`")) };
                    let action = alphabet.action(action).map_err(symbol)?;
                    emit.push((intern(state), action, line));
                }
                "on" => {
                    let [state, percept, "->", target] = words[..] else {
                        return Err(format("expected `on: <state> <percept> -> <state>`"));
                    };
                    let percept = alphabet.percept(percept).map_err(symbol)?;
                    let s = intern(state);
                    edges.push((s, percept, intern(target), line));
                }
                other => return Err(format(&alloc::format!("unknown directive `{other}`"))),
            }
        }

        let start = start.ok_or(TransducerError::Format { line: 0, message: "missing `start`".into() })?;
        let n = names.len();
        let np = alphabet.percept_count();
        let mut emit_table: Vec<Option<Action>> = vec![None; n];
        for (s, a, line) in emit {
            if emit_table[s].replace(a).is_some() {
                return Err(TransducerError::Format {
                    line,
                    message: alloc::format!("duplicate emit for `{}`", names[s]),
                });
            }
        }
        let mut next: Vec<Option<usize>> = vec![None; n * np];
        for (s, p, t, line) in edges {
            if next[s * np + p.index()].replace(t).is_some() {
                return Err(TransducerError::Format { line, message: "duplicate transition".into() });
            }
        }
        let emit = emit_table
            .iter()
            .enumerate()
            .map(|(s, a)| a.ok_or_else(|| TransducerError::MissingEmit { state: names[s].clone() }))
            .collect::<Result<Vec<_>, _>>()?;
        let next = next
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.ok_or_else(|| TransducerError::MissingTransition {
                    state: names[i / np].clone(),
                    percept: alphabet.percept_name(Percept((i % np) as u16)).to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        PolicyTransducer::new(alphabet, names, start, emit, next)
    }

    /// `.fst` text accepted by [`PolicyTransducer::parse`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "start: {}", self.names[self.start]);
        for s in 0..self.len() {
            let _ = writeln!(out, "emit: {} {}", self.names[s], self.alphabet.action_name(self.emit[s]));
            for x in self.alphabet.all_percepts() {
                let _ = writeln!(
                    out,
                    "on: {} {} -> {}",
                    self.names[s],
                    self.alphabet.percept_name(x),
                    self.names[self.step(s, x)]
                );
            }
        }
        out
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn emit(&self, s: usize) -> Action {
        self.emit[s]
    }

    pub fn step(&self, s: usize, x: Percept) -> usize {
        self.next[s * self.alphabet.percept_count() + x.index()]
    }

    /// State after observing `percepts` from the start.
    pub fn run(&self, percepts: impl IntoIterator<Item = Percept>) -> usize {
        percepts.into_iter().fold(self.start, |s, x| self.step(s, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ng() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["ok", "err"], ["noop", "move", "grab"]).unwrap())
    }

    const TOGGLE: &str = "# toggles on err\nstart: s0\nemit: s0 noop\nemit: s1 move\non: s0 ok -> s0\non: s0 err -> s1\non: s1 ok -> s1\non: s1 err -> s0\n";

    #[test]
    fn parses_and_runs() {
        let t = PolicyTransducer::parse(TOGGLE, ng()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.emit(t.start()), Action(0));
        let s = t.run([Percept(1), Percept(0)]);
        assert_eq!(t.emit(s), Action(1));
        assert_eq!(PolicyTransducer::parse(&t.render(), ng()).unwrap(), t);
    }

    #[test]
    fn partial_policies() {
        let missing_edge = TOGGLE.replace("on: s1 err -> s0\n", "");
        assert!(PolicyTransducer::parse(&missing_edge, ng()).unwrap_err().is_partial());
        let missing_emit = TOGGLE.replace("emit: s1 move\n", "");
        assert!(PolicyTransducer::parse(&missing_emit, ng()).unwrap_err().is_partial());
    }

    #[test]
    fn format_errors() {
        assert!(matches!(PolicyTransducer::parse("emit: s0 noop", ng()), Err(TransducerError::Format { .. })));
        assert!(matches!(
            PolicyTransducer::parse("start: s0\nemit: s0 fly", ng()),
            Err(TransducerError::UnknownSymbol { line: 2, .. })
        ));
        assert!(matches!(
            PolicyTransducer::parse("start: s0\non: s0 ok s0", ng()),
            Err(TransducerError::Format { line: 2, .. })
        ));
        assert!(matches!(PolicyTransducer::parse("start: s0\nstart: s1", ng()), Err(TransducerError::Format { .. })));
    }
}
