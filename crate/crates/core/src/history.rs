//! Interleaved I/O histories `y1 x1 … yn xn`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::alphabet::{Action, Alphabet, AlphabetError, Percept, Symbol, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HistoryError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("token {position} (`{name}`) breaks action/percept alternation")]
    AlternationViolation { position: usize, name: String },
    #[error("history ends mid-cycle after action `{0}`")]
    IncompleteCycle(String),
}

impl HistoryError {
    /// Both ill-ordered tokens and a dangling action count as alternation
    /// violations.
    pub fn is_alternation_violation(&self) -> bool {
        matches!(self, HistoryError::AlternationViolation { .. } | HistoryError::IncompleteCycle(_))
    }
}

/// One agent cycle: the action emitted, then the percept received.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cycle {
    pub action: Action,
    pub percept: Percept,
}

/// A complete history over a shared alphabet. The empty history is `(e, e)`.
#[derive(Clone, PartialEq, Eq)]
pub struct History {
    alphabet: Arc<Alphabet>,
    cycles: Vec<Cycle>,
}

impl History {
    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        History { alphabet, cycles: Vec::new() }
    }

    pub fn from_cycles(alphabet: Arc<Alphabet>, cycles: Vec<Cycle>) -> Self {
        debug_assert!(cycles
            .iter()
            .all(|c| c.action.index() < alphabet.action_count() && c.percept.index() < alphabet.percept_count()));
        History { alphabet, cycles }
    }

    /// Parses whitespace-separated token names.
    pub fn parse(text: &str, alphabet: Arc<Alphabet>) -> Result<Self, HistoryError> {
        let mut cycles = Vec::new();
        let mut pending: Option<(Action, &str)> = None;
        for (position, name) in text.split_whitespace().enumerate() {
            let token = alphabet.lookup(name).ok_or_else(|| {
                let expected =
                    if pending.is_some() { crate::alphabet::Role::Percept } else { crate::alphabet::Role::Action };
                AlphabetError::UnknownSymbol { name: name.into(), expected }
            })?;
            match (pending.take(), token) {
                (None, Token::Action(a)) => pending = Some((a, name)),
                (Some((action, _)), Token::Percept(percept)) => cycles.push(Cycle { action, percept }),
                _ => {
                    return Err(HistoryError::AlternationViolation { position, name: name.into() });
                }
            }
        }
        if let Some((_, name)) = pending {
            return Err(HistoryError::IncompleteCycle(name.into()));
        }
        Ok(History { alphabet, cycles })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    pub fn token_len(&self) -> usize {
        self.cycles.len() * 2
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Returns a new history one cycle longer; `self` is untouched.
    pub fn append_cycle(&self, action: Action, percept: Percept) -> Result<Self, HistoryError> {
        let mut next = self.clone();
        next.push_checked(action, percept)?;
        Ok(next)
    }

    /// Name-resolving variant of [`History::append_cycle`].
    pub fn append_named(&self, action: &str, percept: &str) -> Result<Self, HistoryError> {
        let a = self.alphabet.action(action)?;
        let p = self.alphabet.percept(percept)?;
        self.append_cycle(a, p)
    }

    /// In-place append, for simulation loops.
    pub fn push(&mut self, action: Action, percept: Percept) {
        self.push_checked(action, percept).expect("cycle symbols out of range for alphabet");
    }

    fn push_checked(&mut self, action: Action, percept: Percept) -> Result<(), HistoryError> {
        if action.index() >= self.alphabet.action_count() {
            return Err(AlphabetError::UnknownSymbol {
                name: alloc::format!("#{}", action.0),
                expected: crate::alphabet::Role::Action,
            }
            .into());
        }
        if percept.index() >= self.alphabet.percept_count() {
            return Err(AlphabetError::UnknownSymbol {
                name: alloc::format!("#{}", percept.0),
                expected: crate::alphabet::Role::Percept,
            }
            .into());
        }
        self.cycles.push(Cycle { action, percept });
        Ok(())
    }

    /// The first `cycles` cycles of this history.
    pub fn prefix(&self, cycles: usize) -> History {
        History { alphabet: self.alphabet.clone(), cycles: self.cycles[..cycles].to_vec() }
    }

    /// Token sequence as global symbols, action first in every cycle.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.cycles
            .iter()
            .flat_map(move |c| [self.alphabet.action_symbol(c.action), self.alphabet.percept_symbol(c.percept)])
    }

    /// Renders as single-space separated names, no trailing whitespace.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.cycles {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(self.alphabet.action_name(c.action));
            out.push(' ');
            out.push_str(self.alphabet.percept_name(c.percept));
        }
        out
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            f.write_str("e")
        } else {
            f.write_str(&self.render())
        }
    }
}

impl fmt::Debug for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "History({:?})", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ng() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["ok", "err"], ["noop", "move", "grab"]).unwrap())
    }

    #[test]
    fn append_has_value_semantics() {
        let e = History::empty(ng());
        let one = e.append_named("noop", "ok").unwrap();
        assert_eq!(one.render(), "noop ok");
        let two = one.append_named("move", "err").unwrap();
        assert_eq!(two.render(), "noop ok move err");
        assert_eq!(one.cycle_count(), 1);
        assert_eq!(two.token_len(), one.token_len() + 2);
        assert!(e.is_empty());
        assert!(matches!(e.append_named("ok", "ok"), Err(HistoryError::Alphabet(AlphabetError::UnknownSymbol { .. }))));
    }

    #[test]
    fn parse_cases() {
        let h = History::parse("noop ok move err", ng()).unwrap();
        assert_eq!(h.cycle_count(), 2);
        assert!(History::parse("", ng()).unwrap().is_empty());
        assert!(History::parse("ok noop", ng()).unwrap_err().is_alternation_violation());
        assert!(History::parse("noop ok move", ng()).unwrap_err().is_alternation_violation());
        assert!(History::parse("noop move", ng()).unwrap_err().is_alternation_violation());
        assert!(matches!(History::parse("noop fly", ng()), Err(HistoryError::Alphabet(_))));
    }

    #[test]
    fn display_marks_empty() {
        assert_eq!(alloc::format!("{}", History::empty(ng())), "e");
    }
}
