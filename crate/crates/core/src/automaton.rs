//! Finite automata over global symbol ids.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::alphabet::{Alphabet, Role, Symbol};
use crate::spec::Regex;

/// Thompson-style automaton with epsilon moves and a single accepting state.
#[derive(Debug, Clone)]
pub struct Nfa {
    eps: Vec<Vec<usize>>,
    edges: Vec<Vec<(Symbol, usize)>>,
    start: usize,
    accept: usize,
}

impl Nfa {
    pub fn from_regex(regex: &Regex, alphabet: &Alphabet) -> Self {
        let mut nfa = Nfa { eps: Vec::new(), edges: Vec::new(), start: 0, accept: 0 };
        let (s, t) = nfa.build(regex, alphabet);
        nfa.start = s;
        nfa.accept = t;
        nfa
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    fn fresh(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.eps.len() - 1
    }

    fn fragment_symbols(&mut self, symbols: impl IntoIterator<Item = Symbol>) -> (usize, usize) {
        let s = self.fresh();
        let t = self.fresh();
        for sym in symbols {
            self.edges[s].push((sym, t));
        }
        (s, t)
    }

    fn star(&mut self, inner: (usize, usize)) -> (usize, usize) {
        let s = self.fresh();
        let t = self.fresh();
        self.eps[s].extend([inner.0, t]);
        self.eps[inner.1].extend([inner.0, t]);
        (s, t)
    }

    fn build(&mut self, regex: &Regex, alphabet: &Alphabet) -> (usize, usize) {
        let actions = || alphabet.all_actions().map(|a| alphabet.action_symbol(a));
        let percepts = || alphabet.all_percepts().map(|p| alphabet.percept_symbol(p));
        match regex {
            Regex::Epsilon => {
                let s = self.fresh();
                let t = self.fresh();
                self.eps[s].push(t);
                (s, t)
            }
            Regex::Symbol(sym) => self.fragment_symbols([*sym]),
            Regex::Class(items) => self.fragment_symbols(items.iter().copied()),
            Regex::AnyAction => self.fragment_symbols(actions()),
            Regex::AnyPercept => self.fragment_symbols(percepts()),
            Regex::AnyCycle => {
                let a = self.fragment_symbols(actions());
                let p = self.fragment_symbols(percepts());
                self.eps[a.1].push(p.0);
                (a.0, p.1)
            }
            Regex::AnyCycles => {
                let cycle = self.build(&Regex::AnyCycle, alphabet);
                self.star(cycle)
            }
            Regex::Concat(parts) => {
                let mut frags = parts.iter().map(|p| self.build(p, alphabet)).collect::<Vec<_>>().into_iter();
                let first = frags.next().expect("empty concatenation");
                let mut end = first.1;
                for f in frags {
                    self.eps[end].push(f.0);
                    end = f.1;
                }
                (first.0, end)
            }
            Regex::Alt(parts) => {
                let s = self.fresh();
                let t = self.fresh();
                for p in parts {
                    let f = self.build(p, alphabet);
                    self.eps[s].push(f.0);
                    self.eps[f.1].push(t);
                }
                (s, t)
            }
            Regex::Star(inner) => {
                let f = self.build(inner, alphabet);
                self.star(f)
            }
            Regex::Plus(inner) => {
                let f = self.build(inner, alphabet);
                let s = self.fresh();
                let t = self.fresh();
                self.eps[s].push(f.0);
                self.eps[f.1].extend([f.0, t]);
                (s, t)
            }
            Regex::Optional(inner) => {
                let f = self.build(inner, alphabet);
                let s = self.fresh();
                let t = self.fresh();
                self.eps[s].extend([f.0, t]);
                self.eps[f.1].push(t);
                (s, t)
            }
        }
    }

    /// Sorted epsilon-closure of `set`.
    fn closure(&self, set: &mut Vec<usize>, marks: &mut [bool]) {
        let mut stack: Vec<usize> = set.clone();
        for &q in set.iter() {
            marks[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &r in &self.eps[q] {
                if !marks[r] {
                    marks[r] = true;
                    set.push(r);
                    stack.push(r);
                }
            }
        }
        for &q in set.iter() {
            marks[q] = false;
        }
        set.sort_unstable();
    }

    /// Subset construction. Returns `None` when more than `cap` subsets are
    /// reachable. The empty subset is kept as an ordinary (dead) state, so the
    /// result is complete.
    pub fn determinize(&self, symbol_count: usize, cap: usize) -> Option<Dfa> {
        let mut marks = vec![false; self.len()];
        let mut start = vec![self.start];
        self.closure(&mut start, &mut marks);

        let mut ids: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
        let mut sets: Vec<Vec<usize>> = Vec::new();
        let mut trans: Vec<u32> = Vec::new();
        ids.insert(start.clone(), 0);
        sets.push(start);

        let mut next = 0;
        while next < sets.len() {
            let current = sets[next].clone();
            next += 1;
            let mut targets: Vec<Vec<usize>> = vec![Vec::new(); symbol_count];
            for &q in &current {
                for &(sym, r) in &self.edges[q] {
                    let bucket = &mut targets[sym.index()];
                    if !bucket.contains(&r) {
                        bucket.push(r);
                    }
                }
            }
            for mut target in targets {
                self.closure(&mut target, &mut marks);
                let id = match ids.get(&target) {
                    Some(&id) => id,
                    None => {
                        if sets.len() >= cap {
                            return None;
                        }
                        let id = sets.len() as u32;
                        ids.insert(target.clone(), id);
                        sets.push(target);
                        id
                    }
                };
                trans.push(id);
            }
        }
        let accept = sets.iter().map(|s| s.binary_search(&self.accept).is_ok()).collect();
        Some(Dfa { symbols: symbol_count, start: 0, accept, trans })
    }
}

/// Complete deterministic automaton with a row-major transition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub(crate) symbols: usize,
    pub(crate) start: usize,
    pub(crate) accept: Vec<bool>,
    pub(crate) trans: Vec<u32>,
}

impl Dfa {
    pub fn new(symbols: usize, start: usize, accept: Vec<bool>, trans: Vec<u32>) -> Self {
        assert_eq!(trans.len(), accept.len() * symbols);
        assert!(start < accept.len());
        assert!(trans.iter().all(|&t| (t as usize) < accept.len()));
        Dfa { symbols, start, accept, trans }
    }

    pub fn len(&self) -> usize {
        self.accept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accept.is_empty()
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accept[q]
    }

    #[inline]
    pub fn step(&self, q: usize, s: Symbol) -> usize {
        self.trans[q * self.symbols + s.index()] as usize
    }

    pub fn run(&self, from: usize, word: impl IntoIterator<Item = Symbol>) -> usize {
        word.into_iter().fold(from, |q, s| self.step(q, s))
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(q) = queue.pop_front() {
            for s in 0..self.symbols {
                let r = self.trans[q * self.symbols + s] as usize;
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        seen
    }

    /// States from which some accepting state is reachable.
    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in 0..n {
            for s in 0..self.symbols {
                preds[self.trans[q * self.symbols + s] as usize].push(q);
            }
        }
        let mut live = self.accept.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&q| live[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        live
    }

    /// Partition of the reachable states into Myhill–Nerode classes by
    /// iterated signature refinement. Returns the class of every state
    /// (`u32::MAX` for unreachable ones) and the class count.
    pub fn equivalence_classes(&self) -> (Vec<u32>, usize) {
        let reachable = self.reachable();
        let states: Vec<usize> = (0..self.len()).filter(|&q| reachable[q]).collect();
        let mut class = vec![u32::MAX; self.len()];
        let any_accept = states.iter().any(|&q| self.accept[q]);
        let any_reject = states.iter().any(|&q| !self.accept[q]);
        for &q in &states {
            class[q] = match (any_accept && any_reject, self.accept[q]) {
                (true, true) => 1,
                _ => 0,
            };
        }
        let mut count = if any_accept && any_reject { 2 } else { 1 };
        loop {
            let mut table: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
            let mut next = vec![u32::MAX; self.len()];
            for &q in &states {
                let mut sig = Vec::with_capacity(self.symbols + 1);
                sig.push(class[q]);
                for s in 0..self.symbols {
                    sig.push(class[self.trans[q * self.symbols + s] as usize]);
                }
                let fresh = table.len() as u32;
                next[q] = *table.entry(sig).or_insert(fresh);
            }
            let new_count = table.len();
            class = next;
            if new_count == count {
                return (class, count);
            }
            count = new_count;
        }
    }

    /// Minimal automaton for the same language, states numbered in
    /// breadth-first order from the start over ascending symbol ids.
    pub fn minimize(&self) -> Dfa {
        let (class, count) = self.equivalence_classes();
        let mut rep = vec![usize::MAX; count];
        for (q, &c) in class.iter().enumerate() {
            if c != u32::MAX && rep[c as usize] == usize::MAX {
                rep[c as usize] = q;
            }
        }
        let quotient = Dfa {
            symbols: self.symbols,
            start: class[self.start] as usize,
            accept: rep.iter().map(|&q| self.accept[q]).collect(),
            trans: rep
                .iter()
                .flat_map(|&q| {
                    let class = &class;
                    (0..self.symbols).map(move |s| class[self.trans[q * self.symbols + s] as usize])
                })
                .collect(),
        };
        quotient.canonical()
    }

    /// Renumbers reachable states in breadth-first order, dropping the rest.
    pub fn canonical(&self) -> Dfa {
        let mut order = vec![u32::MAX; self.len()];
        let mut states = vec![self.start];
        order[self.start] = 0;
        let mut i = 0;
        while i < states.len() {
            let q = states[i];
            i += 1;
            for s in 0..self.symbols {
                let r = self.trans[q * self.symbols + s] as usize;
                if order[r] == u32::MAX {
                    order[r] = states.len() as u32;
                    states.push(r);
                }
            }
        }
        Dfa {
            symbols: self.symbols,
            start: 0,
            accept: states.iter().map(|&q| self.accept[q]).collect(),
            trans: states
                .iter()
                .flat_map(|&q| {
                    let order = &order;
                    (0..self.symbols).map(move |s| order[self.trans[q * self.symbols + s] as usize])
                })
                .collect(),
        }
    }
}

/// Position of the interleaving automaton `(action · percept)*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Phase {
    Boundary,
    Mid,
    Broken,
}

impl Phase {
    pub(crate) fn step(self, role: Role) -> Phase {
        match (self, role) {
            (Phase::Boundary, Role::Action) => Phase::Mid,
            (Phase::Mid, Role::Percept) => Phase::Boundary,
            _ => Phase::Broken,
        }
    }
}

/// Product of a complete automaton with the interleaving automaton.
pub(crate) struct InterleavedProduct {
    pub dfa: Dfa,
    /// Source state and interleaving phase of every product state.
    pub origin: Vec<(usize, Phase)>,
    /// Whether the source automaton accepts some string outside the
    /// interleaving language.
    pub leaks: bool,
}

pub(crate) fn intersect_interleaving(dfa: &Dfa, alphabet: &Alphabet) -> InterleavedProduct {
    let roles: Vec<Role> = (0..dfa.symbols).map(|s| alphabet.role(Symbol(s as u16))).collect();
    let mut ids: BTreeMap<(usize, Phase), u32> = BTreeMap::new();
    let mut origin = vec![(dfa.start, Phase::Boundary)];
    ids.insert(origin[0], 0);
    let mut trans = Vec::new();
    let mut leaks = false;
    let mut i = 0;
    while i < origin.len() {
        let (q, phase) = origin[i];
        i += 1;
        if dfa.accept[q] && phase != Phase::Boundary {
            leaks = true;
        }
        for (s, role) in roles.iter().enumerate() {
            let key = (dfa.trans[q * dfa.symbols + s] as usize, phase.step(*role));
            let id = *ids.entry(key).or_insert_with(|| {
                origin.push(key);
                (origin.len() - 1) as u32
            });
            trans.push(id);
        }
    }
    let accept = origin.iter().map(|&(q, p)| dfa.accept[q] && p == Phase::Boundary).collect();
    InterleavedProduct { dfa: Dfa { symbols: dfa.symbols, start: 0, accept, trans }, origin, leaks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec;

    fn nfa_accepts(nfa: &Nfa, word: &[Symbol]) -> bool {
        let mut marks = vec![false; nfa.len()];
        let mut cur = vec![nfa.start];
        nfa.closure(&mut cur, &mut marks);
        for &s in word {
            let mut next = Vec::new();
            for &q in &cur {
                for &(sym, r) in &nfa.edges[q] {
                    if sym == s && !next.contains(&r) {
                        next.push(r);
                    }
                }
            }
            nfa.closure(&mut next, &mut marks);
            cur = next;
        }
        cur.contains(&nfa.accept)
    }

    #[test]
    fn determinization_preserves_language() {
        let doc = parse_spec(crate::fixtures::SPEC_RS).unwrap();
        let nfa = Nfa::from_regex(&doc.good, &doc.alphabet);
        let dfa = nfa.determinize(doc.alphabet.symbol_count(), 1000).unwrap();
        let n = doc.alphabet.symbol_count() as u16;
        // every word of length <= 5
        for len in 0..=5u32 {
            for code in 0..(n as u32).pow(len) {
                let mut c = code;
                let word: Vec<Symbol> = (0..len)
                    .map(|_| {
                        let s = Symbol((c % n as u32) as u16);
                        c /= n as u32;
                        s
                    })
                    .collect();
                let q = dfa.run(dfa.start(), word.iter().copied());
                assert_eq!(dfa.is_accepting(q), nfa_accepts(&nfa, &word), "{word:?}");
                let m = dfa.minimize();
                assert_eq!(m.is_accepting(m.run(0, word.iter().copied())), dfa.is_accepting(q));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let doc = parse_spec(crate::fixtures::SPEC_RS).unwrap();
        let nfa = Nfa::from_regex(&doc.good, &doc.alphabet);
        assert!(nfa.determinize(doc.alphabet.symbol_count(), 1).is_none());
    }

    #[test]
    fn minimize_is_idempotent() {
        let doc = parse_spec(crate::fixtures::SPEC_GUESS).unwrap();
        let nfa = Nfa::from_regex(&doc.good, &doc.alphabet);
        let m = nfa.determinize(4, 100).unwrap().minimize();
        assert_eq!(m.minimize(), m);
    }
}
