//! Seeded random specs, deontologies and transducers.

use std::sync::Arc;

use deon_core::transducer::PolicyTransducer;
use deon_core::{compile, Action, Alphabet, Deontology, Percept, Regex, SpecDoc, Symbol};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Alphabet with `np` percepts `p0..` and `na` actions `a0..`.
pub fn alphabet(np: usize, na: usize) -> Arc<Alphabet> {
    let ps: Vec<String> = (0..np).map(|i| format!("p{i}")).collect();
    let as_: Vec<String> = (0..na).map(|i| format!("a{i}")).collect();
    Arc::new(Alphabet::new(ps, as_).expect("generated names are valid"))
}

fn action_atom<R: Rng>(rng: &mut R, a: &Alphabet) -> Regex {
    let actions: Vec<Symbol> = a.all_actions().map(|x| a.action_symbol(x)).collect();
    match rng.random_range(0..4) {
        0 => Regex::AnyAction,
        1 if actions.len() > 1 => {
            let k = rng.random_range(1..actions.len());
            Regex::Class(actions.choose_multiple(rng, k).copied().collect())
        }
        _ => Regex::Symbol(*actions.choose(rng).unwrap()),
    }
}

fn percept_atom<R: Rng>(rng: &mut R, a: &Alphabet) -> Regex {
    let percepts: Vec<Symbol> = a.all_percepts().map(|x| a.percept_symbol(x)).collect();
    match rng.random_range(0..4) {
        0 => Regex::AnyPercept,
        1 if percepts.len() > 1 => {
            let k = rng.random_range(1..percepts.len());
            Regex::Class(percepts.choose_multiple(rng, k).copied().collect())
        }
        _ => Regex::Symbol(*percepts.choose(rng).unwrap()),
    }
}

/// A regex built mostly from whole cycles, so that the interleaved language
/// is usually non-empty and non-trivial.
pub fn cycle_regex<R: Rng>(rng: &mut R, a: &Alphabet, depth: usize) -> Regex {
    if depth == 0 {
        return match rng.random_range(0..6) {
            0 => Regex::AnyCycle,
            1 => Regex::Epsilon,
            _ => Regex::Concat(vec![action_atom(rng, a), percept_atom(rng, a)]),
        };
    }
    let sub = |rng: &mut R| cycle_regex(rng, a, depth - 1);
    match rng.random_range(0..7) {
        0 | 1 => Regex::Concat(vec![sub(rng), sub(rng)]),
        2 | 3 => Regex::Alt(vec![sub(rng), sub(rng)]),
        4 => Regex::Star(Box::new(sub(rng))),
        5 => Regex::Optional(Box::new(sub(rng))),
        _ => Regex::Plus(Box::new(sub(rng))),
    }
}

/// An unstructured regex over single symbols; may ignore alternation.
pub fn raw_regex<R: Rng>(rng: &mut R, a: &Alphabet, depth: usize) -> Regex {
    if depth == 0 {
        let s = Symbol(rng.random_range(0..a.symbol_count()) as u16);
        return match rng.random_range(0..8) {
            0 => Regex::AnyAction,
            1 => Regex::AnyPercept,
            2 => Regex::AnyCycles,
            3 => Regex::Epsilon,
            _ => Regex::Symbol(s),
        };
    }
    let sub = |rng: &mut R| raw_regex(rng, a, depth - 1);
    match rng.random_range(0..6) {
        0 | 1 => Regex::Concat(vec![sub(rng), sub(rng)]),
        2 => Regex::Alt(vec![sub(rng), sub(rng)]),
        3 => Regex::Star(Box::new(sub(rng))),
        4 => Regex::Optional(Box::new(sub(rng))),
        _ => Regex::Plus(Box::new(sub(rng))),
    }
}

/// A spec over an alphabet of at most `max_np × max_na` symbols, wrapped in
/// a star most of the time so that long histories can stay Good.
pub fn spec<R: Rng>(rng: &mut R, max_np: usize, max_na: usize) -> SpecDoc {
    let a = alphabet(rng.random_range(1..=max_np), rng.random_range(1..=max_na));
    let depth = rng.random_range(1..=3);
    let body = if rng.random_bool(0.8) { cycle_regex(rng, &a, depth) } else { raw_regex(rng, &a, depth + 1) };
    let good = match rng.random_range(0..4) {
        0 => body,
        1 => Regex::Concat(vec![Regex::Star(Box::new(body)), cycle_regex(rng, &a, 1)]),
        _ => Regex::Star(Box::new(body)),
    };
    SpecDoc { alphabet: a, good }
}

/// Draws specs until one compiles to at most `max_states` states.
pub fn deontology<R: Rng>(rng: &mut R, max_np: usize, max_na: usize, max_states: usize) -> (SpecDoc, Deontology) {
    loop {
        let doc = spec(rng, max_np, max_na);
        if let Ok(d) = compile(&doc) {
            if d.state_count() <= max_states {
                return (doc, d);
            }
        }
    }
}

/// A uniformly random transducer with `1..=max_states` states.
pub fn transducer<R: Rng>(rng: &mut R, alphabet: &Arc<Alphabet>, max_states: usize) -> PolicyTransducer {
    let n = rng.random_range(1..=max_states);
    let names = (0..n).map(|i| format!("s{i}")).collect();
    let emit = (0..n).map(|_| Action(rng.random_range(0..alphabet.action_count()) as u16)).collect();
    let next = (0..n * alphabet.percept_count()).map(|_| rng.random_range(0..n)).collect();
    PolicyTransducer::new(alphabet.clone(), names, 0, emit, next).expect("tables are total")
}

/// A random token string over the whole alphabet; interleaved half the time.
pub fn token_string<R: Rng>(rng: &mut R, a: &Alphabet, max_len: usize) -> Vec<Symbol> {
    if rng.random_bool(0.5) {
        let cycles = rng.random_range(0..=max_len / 2);
        (0..cycles)
            .flat_map(|_| {
                let y = Action(rng.random_range(0..a.action_count()) as u16);
                let x = Percept(rng.random_range(0..a.percept_count()) as u16);
                [a.action_symbol(y), a.percept_symbol(x)]
            })
            .collect()
    } else {
        let len = rng.random_range(0..=max_len);
        (0..len).map(|_| Symbol(rng.random_range(0..a.symbol_count()) as u16)).collect()
    }
}
