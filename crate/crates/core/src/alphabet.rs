//! Percept and action symbol sets.
//!
//! Symbols are interned in declaration order. Percepts receive the global
//! ids `0..P` and actions `P..P+A`; the per-role indices ([`Percept`],
//! [`Action`]) follow the same declaration order and are the canonical
//! tie-break order everywhere else in the crate.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Errors raised when building an alphabet or resolving symbol names.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("alphabet needs at least one percept and one action")]
    EmptyAlphabet,
    #[error("invalid symbol name `{0}`")]
    InvalidName(String),
    #[error("unknown symbol `{name}` (expected {expected})")]
    UnknownSymbol { name: String, expected: Role },
}

/// Whether a symbol is emitted by the agent or received from the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Action,
    Percept,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Action => f.write_str("an action"),
            Role::Percept => f.write_str("a percept"),
        }
    }
}

/// Index of an action within [`Alphabet::actions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(pub u16);

/// Index of a percept within [`Alphabet::percepts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Percept(pub u16);

/// Global symbol id over `X ∪ Y`, used as the automaton input column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u16);

impl Action {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Percept {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A symbol resolved to its role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    Action(Action),
    Percept(Percept),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    percepts: Vec<String>,
    actions: Vec<String>,
}

/// Returns true for `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alphabet {
    /// Builds an alphabet, preserving declaration order.
    pub fn new<P, A>(percepts: P, actions: A) -> Result<Self, AlphabetError>
    where
        P: IntoIterator,
        P::Item: AsRef<str>,
        A: IntoIterator,
        A::Item: AsRef<str>,
    {
        let percepts: Vec<String> = percepts.into_iter().map(|s| s.as_ref().to_string()).collect();
        let actions: Vec<String> = actions.into_iter().map(|s| s.as_ref().to_string()).collect();
        if percepts.is_empty() || actions.is_empty() {
            return Err(AlphabetError::EmptyAlphabet);
        }
        let mut seen: Vec<&str> = Vec::with_capacity(percepts.len() + actions.len());
        for name in percepts.iter().chain(actions.iter()) {
            if !is_valid_name(name) {
                return Err(AlphabetError::InvalidName(name.clone()));
            }
            if seen.contains(&name.as_str()) {
                return Err(AlphabetError::DuplicateSymbol(name.clone()));
            }
            seen.push(name);
        }
        if seen.len() > u16::MAX as usize {
            return Err(AlphabetError::InvalidName("<too many symbols>".into()));
        }
        Ok(Alphabet { percepts, actions })
    }

    pub fn percepts(&self) -> &[String] {
        &self.percepts
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn percept_count(&self) -> usize {
        self.percepts.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    /// Total number of symbols, i.e. the automaton input width.
    pub fn symbol_count(&self) -> usize {
        self.percepts.len() + self.actions.len()
    }

    pub fn all_actions(&self) -> impl DoubleEndedIterator<Item = Action> + ExactSizeIterator {
        (0..self.actions.len() as u16).map(Action)
    }

    pub fn all_percepts(&self) -> impl DoubleEndedIterator<Item = Percept> + ExactSizeIterator {
        (0..self.percepts.len() as u16).map(Percept)
    }

    pub fn action_symbol(&self, a: Action) -> Symbol {
        Symbol((self.percepts.len() + a.index()) as u16)
    }

    pub fn percept_symbol(&self, p: Percept) -> Symbol {
        Symbol(p.0)
    }

    pub fn token(&self, s: Symbol) -> Token {
        let np = self.percepts.len();
        if s.index() < np {
            Token::Percept(Percept(s.0))
        } else {
            Token::Action(Action((s.index() - np) as u16))
        }
    }

    pub fn role(&self, s: Symbol) -> Role {
        match self.token(s) {
            Token::Action(_) => Role::Action,
            Token::Percept(_) => Role::Percept,
        }
    }

    pub fn action_name(&self, a: Action) -> &str {
        &self.actions[a.index()]
    }

    pub fn percept_name(&self, p: Percept) -> &str {
        &self.percepts[p.index()]
    }

    pub fn symbol_name(&self, s: Symbol) -> &str {
        match self.token(s) {
            Token::Action(a) => self.action_name(a),
            Token::Percept(p) => self.percept_name(p),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Token> {
        if let Some(i) = self.percepts.iter().position(|n| n == name) {
            return Some(Token::Percept(Percept(i as u16)));
        }
        self.actions.iter().position(|n| n == name).map(|i| Token::Action(Action(i as u16)))
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.lookup(name).map(|t| match t {
            Token::Action(a) => self.action_symbol(a),
            Token::Percept(p) => self.percept_symbol(p),
        })
    }

    pub fn action(&self, name: &str) -> Result<Action, AlphabetError> {
        match self.lookup(name) {
            Some(Token::Action(a)) => Ok(a),
            _ => Err(AlphabetError::UnknownSymbol { name: name.to_string(), expected: Role::Action }),
        }
    }

    pub fn percept(&self, name: &str) -> Result<Percept, AlphabetError> {
        match self.lookup(name) {
            Some(Token::Percept(p)) => Ok(p),
            _ => Err(AlphabetError::UnknownSymbol { name: name.to_string(), expected: Role::Percept }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_declaration_order() {
        let a = Alphabet::new(["ok", "err"], ["noop", "move", "grab"]).unwrap();
        assert_eq!(a.percept_count(), 2);
        assert_eq!(a.action_count(), 3);
        assert_eq!(a.action("move").unwrap(), Action(1));
        assert_eq!(a.percept("err").unwrap(), Percept(1));
        assert_eq!(a.action_symbol(Action(0)), Symbol(2));
        assert_eq!(a.symbol_name(Symbol(4)), "grab");
        assert_eq!(a.token(Symbol(1)), Token::Percept(Percept(1)));
    }

    #[test]
    fn rejects_overlap_and_empty() {
        assert_eq!(Alphabet::new(["ok"], ["ok"]), Err(AlphabetError::DuplicateSymbol("ok".into())));
        assert_eq!(Alphabet::new(["ok", "ok"], ["a"]), Err(AlphabetError::DuplicateSymbol("ok".into())));
        assert_eq!(Alphabet::new::<[&str; 0], _>([], ["noop"]), Err(AlphabetError::EmptyAlphabet));
        assert_eq!(Alphabet::new(["ok"], [] as [&str; 0]), Err(AlphabetError::EmptyAlphabet));
        assert!(matches!(Alphabet::new(["1x"], ["a"]), Err(AlphabetError::InvalidName(_))));
    }

    #[test]
    fn role_checked_lookup() {
        let a = Alphabet::new(["ok"], ["noop"]).unwrap();
        assert!(matches!(a.action("ok"), Err(AlphabetError::UnknownSymbol { expected: Role::Action, .. })));
        assert!(a.percept("noop").is_err());
        assert!(a.lookup("zzz").is_none());
    }
}
