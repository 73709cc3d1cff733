//! Compiled deontologies: the minimized automaton for `L(good) ∩ (action · percept)*`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::alphabet::{Action, Alphabet, Percept, Symbol};
use crate::automaton::{intersect_interleaving, Dfa, Nfa, Phase};
use crate::history::History;
use crate::spec::SpecDoc;

pub type StateId = usize;

pub const DEFAULT_STATE_CAP: usize = 100_000;

pub const DUMP_HEADER: &str = "deon-dfa v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("determinized automaton exceeds the state cap of {cap}")]
    StateBlowup { cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("history alphabet does not match the deontology alphabet")]
pub struct AlphabetMismatch;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompileWarning {
    /// The regex matches strings that are not interleaved histories; they are
    /// silently discarded by the intersection.
    NonInterleavedMatches,
}

impl core::fmt::Display for CompileWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CompileWarning::NonInterleavedMatches => {
                f.write_str("the expression also matches non-alternating strings; they are ignored")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    pub state_cap: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { state_cap: DEFAULT_STATE_CAP }
    }
}

/// Position of a state within the agent cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// An even number of tokens has been read; the next token is an action.
    Boundary,
    /// Between an action and its percept.
    Mid,
    /// No continuation is accepted; position is irrelevant.
    Dead,
}

impl Parity {
    fn code(self) -> char {
        match self {
            Parity::Boundary => 'b',
            Parity::Mid => 'm',
            Parity::Dead => 'd',
        }
    }
}

/// A deontology `G` as a complete, minimized automaton over `X ∪ Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deontology {
    alphabet: Arc<Alphabet>,
    dfa: Dfa,
    parity: Vec<Parity>,
}

/// Output of [`compile_with`].
#[derive(Debug, Clone)]
pub struct Compiled {
    pub deontology: Deontology,
    pub warnings: Vec<CompileWarning>,
}

pub fn compile(doc: &SpecDoc) -> Result<Deontology, CompileError> {
    compile_with(doc, &CompileOptions::default()).map(|c| c.deontology)
}

/// regex → epsilon-NFA → subset construction → product with the
/// interleaving automaton → minimization.
pub fn compile_with(doc: &SpecDoc, options: &CompileOptions) -> Result<Compiled, CompileError> {
    let nfa = Nfa::from_regex(&doc.good, &doc.alphabet);
    let dfa = nfa
        .determinize(doc.alphabet.symbol_count(), options.state_cap)
        .ok_or(CompileError::StateBlowup { cap: options.state_cap })?;
    let (deontology, leaks) = Deontology::from_raw(doc.alphabet.clone(), &dfa);
    let warnings = if leaks { vec![CompileWarning::NonInterleavedMatches] } else { Vec::new() };
    Ok(Compiled { deontology, warnings })
}

impl Deontology {
    /// Intersects an arbitrary complete automaton with the interleaving
    /// language and minimizes. Also reports whether the input accepted
    /// non-interleaved strings.
    fn from_raw(alphabet: Arc<Alphabet>, dfa: &Dfa) -> (Deontology, bool) {
        let product = intersect_interleaving(dfa, &alphabet);
        let minimal = product.dfa.minimize();
        let parity = derive_parity(&minimal, &alphabet);
        (Deontology { alphabet, dfa: minimal, parity }, product.leaks)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn state_count(&self) -> usize {
        self.dfa.len()
    }

    pub fn start(&self) -> StateId {
        self.dfa.start()
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.dfa.is_accepting(q)
    }

    pub fn parity(&self, q: StateId) -> Parity {
        self.parity[q]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parity
    }

    pub fn is_dead(&self, q: StateId) -> bool {
        self.parity[q] == Parity::Dead
    }

    pub fn step(&self, q: StateId, s: Symbol) -> StateId {
        self.dfa.step(q, s)
    }

    pub fn step_action(&self, q: StateId, a: Action) -> StateId {
        self.dfa.step(q, self.alphabet.action_symbol(a))
    }

    pub fn step_percept(&self, q: StateId, p: Percept) -> StateId {
        self.dfa.step(q, self.alphabet.percept_symbol(p))
    }

    /// State after one full cycle.
    pub fn step_cycle(&self, q: StateId, a: Action, p: Percept) -> StateId {
        self.step_percept(self.step_action(q, a), p)
    }

    /// Boundary states `(q, …)` in ascending id order.
    pub fn boundary_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.state_count()).filter(|&q| self.parity[q] == Parity::Boundary)
    }

    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<(), AlphabetMismatch> {
        if *self.alphabet == *alphabet {
            Ok(())
        } else {
            Err(AlphabetMismatch)
        }
    }

    /// State reached after reading `h`.
    pub fn run(&self, h: &History) -> Result<StateId, AlphabetMismatch> {
        self.check_alphabet(h.alphabet())?;
        Ok(self.dfa.run(self.start(), h.symbols()))
    }

    /// Decides `h ∈ G`.
    pub fn membership(&self, h: &History) -> Result<bool, AlphabetMismatch> {
        self.run(h).map(|q| self.is_accepting(q))
    }

    /// Accepts an arbitrary token string, interleaved or not.
    pub fn accepts_tokens(&self, tokens: &[Symbol]) -> bool {
        self.is_accepting(self.dfa.run(self.start(), tokens.iter().copied()))
    }

    /// `(e, e) ∈ G`.
    pub fn accepts_empty(&self) -> bool {
        self.is_accepting(self.start())
    }

    /// Textual automaton dump, see [`Deontology::load`].
    pub fn dump(&self) -> String {
        let a = &self.alphabet;
        let mut out = String::new();
        let _ = writeln!(out, "{DUMP_HEADER}");
        let _ = writeln!(out, "percepts: {}", a.percepts().join(" "));
        let _ = writeln!(out, "actions: {}", a.actions().join(" "));
        let _ = writeln!(out, "states: {}", self.state_count());
        let _ = writeln!(out, "start: {}", self.start());
        let accept: Vec<String> =
            (0..self.state_count()).filter(|&q| self.is_accepting(q)).map(|q| q.to_string()).collect();
        let _ = writeln!(out, "accept: {}", accept.join(" "));
        let parity: Vec<String> = self.parity.iter().map(|p| p.code().to_string()).collect();
        let _ = writeln!(out, "parity: {}", parity.join(" "));
        for q in 0..self.state_count() {
            for s in 0..a.symbol_count() {
                let sym = Symbol(s as u16);
                let _ = writeln!(out, "{q} {} {}", a.symbol_name(sym), self.step(q, sym));
            }
        }
        out
    }

    /// Lowercase hex SHA-256 of the canonical dump; identifies the language.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.dump().as_bytes());
        let mut out = String::with_capacity(64);
        for byte in digest {
            let _ = write!(out, "{byte:02x}");
        }
        out
    }

    /// Parses a dump. The automaton is re-intersected with the interleaving
    /// language and re-minimized, so the result satisfies every invariant
    /// even if the input was hand-written.
    pub fn load(text: &str) -> Result<Deontology, FormatError> {
        load_dump(text)
    }
}

fn derive_parity(dfa: &Dfa, alphabet: &Alphabet) -> Vec<Parity> {
    let live = dfa.coreachable();
    let mut parity = vec![Parity::Dead; dfa.len()];
    let mut queue = alloc::collections::VecDeque::new();
    if live[dfa.start()] {
        parity[dfa.start()] = Parity::Boundary;
        queue.push_back(dfa.start());
    }
    while let Some(q) = queue.pop_front() {
        for s in 0..alphabet.symbol_count() {
            let r = dfa.step(q, Symbol(s as u16));
            if live[r] && parity[r] == Parity::Dead {
                parity[r] = if parity[q] == Parity::Boundary { Parity::Mid } else { Parity::Boundary };
                queue.push_back(r);
            }
        }
    }
    parity
}

fn load_dump(text: &str) -> Result<Deontology, FormatError> {
    let err = |line: usize, message: &str| FormatError { line, message: message.to_string() };
    // header is not a key/value line
    let (_, header) = text.lines().enumerate().next().ok_or_else(|| err(0, "empty input"))?;
    if header.trim_end() != DUMP_HEADER {
        return Err(err(1, "missing `deon-dfa v1` header"));
    }
    let mut lines_after = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end())).skip(1);
    let mut next_field = |name: &str| -> Result<(usize, &str), FormatError> {
        let (n, line) = lines_after.next().ok_or_else(|| err(0, &alloc::format!("truncated: missing `{name}`")))?;
        let rest = line
            .strip_prefix(name)
            .and_then(|r| r.strip_prefix(':'))
            .ok_or_else(|| err(n, &alloc::format!("expected `{name}:`")))?;
        Ok((n, rest.trim()))
    };
    let (pl, percepts) = next_field("percepts")?;
    let (_, actions) = next_field("actions")?;
    let alphabet =
        Alphabet::new(percepts.split_whitespace(), actions.split_whitespace()).map_err(|e| err(pl, &e.to_string()))?;
    let (sl, states) = next_field("states")?;
    let n: usize = states.parse().map_err(|_| err(sl, "bad state count"))?;
    if n == 0 {
        return Err(err(sl, "automaton needs at least one state"));
    }
    let parse_state = |line: usize, s: &str| -> Result<usize, FormatError> {
        let q: usize = s.parse().map_err(|_| err(line, &alloc::format!("bad state `{s}`")))?;
        if q >= n {
            return Err(err(line, &alloc::format!("state {q} out of range")));
        }
        Ok(q)
    };
    let (stl, start) = next_field("start")?;
    let start = parse_state(stl, start)?;
    let (al, accept_list) = next_field("accept")?;
    let mut accept = vec![false; n];
    for s in accept_list.split_whitespace() {
        accept[parse_state(al, s)?] = true;
    }
    let (prl, parity_list) = next_field("parity")?;
    let declared: Vec<Parity> = parity_list
        .split_whitespace()
        .map(|c| match c {
            "b" => Ok(Parity::Boundary),
            "m" => Ok(Parity::Mid),
            "d" => Ok(Parity::Dead),
            other => Err(err(prl, &alloc::format!("bad parity `{other}`"))),
        })
        .collect::<Result<_, _>>()?;
    if declared.len() != n {
        return Err(err(prl, "parity list length differs from state count"));
    }

    let k = alphabet.symbol_count();
    let mut trans: Vec<Option<u32>> = vec![None; n * k];
    let mut last_line = prl;
    for (ln, line) in lines_after {
        last_line = ln;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [from, sym, to] = parts[..] else {
            return Err(err(ln, "expected `<state> <symbol> <state>`"));
        };
        let from = parse_state(ln, from)?;
        let to = parse_state(ln, to)?;
        let sym = alphabet.symbol(sym).ok_or_else(|| err(ln, &alloc::format!("unknown symbol `{sym}`")))?;
        let slot = &mut trans[from * k + sym.index()];
        if slot.is_some() {
            return Err(err(ln, "duplicate transition"));
        }
        *slot = Some(to as u32);
    }
    if let Some(missing) = trans.iter().position(Option::is_none) {
        return Err(err(
            last_line,
            &alloc::format!(
                "truncated: no transition for state {} on `{}`",
                missing / k,
                alphabet.symbol_name(Symbol((missing % k) as u16))
            ),
        ));
    }
    let raw = Dfa::new(k, start, accept, trans.into_iter().map(Option::unwrap).collect());

    let product = intersect_interleaving(&raw, &alphabet);
    if product.leaks {
        return Err(err(al, "automaton accepts strings that are not interleaved histories"));
    }
    let live = product.dfa.coreachable();
    for (i, &(q, phase)) in product.origin.iter().enumerate() {
        if !live[i] {
            continue;
        }
        let expected = match phase {
            Phase::Boundary => Parity::Boundary,
            Phase::Mid => Parity::Mid,
            Phase::Broken => continue,
        };
        if declared[q] != expected {
            return Err(err(prl, &alloc::format!("parity of state {q} is inconsistent with its transitions")));
        }
    }
    Ok(Deontology::from_raw(Arc::new(alphabet), &raw).0)
}
