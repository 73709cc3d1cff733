//! Regex membership by end-position sets.
//!
//! `ends(r, i)` is the set of positions `j` such that `tokens[i..j]` matches
//! `r`. A string matches when `len` is in `ends(r, 0)`.

use std::collections::BTreeSet;

use deon_core::alphabet::Role;
use deon_core::{Alphabet, History, Regex, SpecDoc, Symbol};

type Ends = BTreeSet<usize>;

pub fn matches(regex: &Regex, alphabet: &Alphabet, tokens: &[Symbol]) -> bool {
    ends(regex, alphabet, tokens, 0).contains(&tokens.len())
}

/// Actions and percepts strictly alternate, starting with an action, and the
/// string ends on a percept.
pub fn is_interleaved(alphabet: &Alphabet, tokens: &[Symbol]) -> bool {
    tokens.len().is_multiple_of(2)
        && tokens.iter().enumerate().all(|(i, &s)| {
            let want = if i % 2 == 0 { Role::Action } else { Role::Percept };
            alphabet.role(s) == want
        })
}

/// Membership in `L(good) ∩ I`.
pub fn member(doc: &SpecDoc, tokens: &[Symbol]) -> bool {
    is_interleaved(&doc.alphabet, tokens) && matches(&doc.good, &doc.alphabet, tokens)
}

pub fn member_history(doc: &SpecDoc, h: &History) -> bool {
    let tokens: Vec<Symbol> = h.symbols().collect();
    member(doc, &tokens)
}

fn one(tokens: &[Symbol], i: usize, ok: impl Fn(Symbol) -> bool) -> Ends {
    match tokens.get(i) {
        Some(&s) if ok(s) => BTreeSet::from([i + 1]),
        _ => BTreeSet::new(),
    }
}

fn ends(r: &Regex, a: &Alphabet, t: &[Symbol], i: usize) -> Ends {
    match r {
        Regex::Epsilon => BTreeSet::from([i]),
        Regex::Symbol(s) => one(t, i, |x| x == *s),
        Regex::Class(items) => one(t, i, |x| items.contains(&x)),
        Regex::AnyAction => one(t, i, |x| a.role(x) == Role::Action),
        Regex::AnyPercept => one(t, i, |x| a.role(x) == Role::Percept),
        Regex::AnyCycle => ends(&Regex::Concat(vec![Regex::AnyAction, Regex::AnyPercept]), a, t, i),
        Regex::AnyCycles => ends(&Regex::Star(Box::new(Regex::AnyCycle)), a, t, i),
        Regex::Concat(parts) => {
            let mut cur = BTreeSet::from([i]);
            for p in parts {
                cur = cur.iter().flat_map(|&j| ends(p, a, t, j)).collect();
                if cur.is_empty() {
                    break;
                }
            }
            cur
        }
        Regex::Alt(parts) => parts.iter().flat_map(|p| ends(p, a, t, i)).collect(),
        Regex::Star(inner) => closure(inner, a, t, BTreeSet::from([i])),
        Regex::Plus(inner) => {
            let first = ends(inner, a, t, i);
            closure(inner, a, t, first)
        }
        Regex::Optional(inner) => {
            let mut out = ends(inner, a, t, i);
            out.insert(i);
            out
        }
    }
}

fn closure(inner: &Regex, a: &Alphabet, t: &[Symbol], seed: Ends) -> Ends {
    let mut all = seed.clone();
    let mut frontier: Vec<usize> = seed.into_iter().collect();
    while let Some(j) = frontier.pop() {
        for k in ends(inner, a, t, j) {
            if all.insert(k) {
                frontier.push(k);
            }
        }
    }
    all
}
