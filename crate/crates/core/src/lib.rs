//! Regular deontologies over agent I/O histories.
//!
//! An agent alternates actions and percepts, `y1 x1 y2 x2 …`. A deontology
//! designates the Good histories as a regular language over both symbol
//! sets. This crate compiles such languages to minimal automata, decides
//! their structural properties, enforces them at runtime with a governor
//! that filters proposed actions, and verifies finite-state policies.
//!
//! Verifying arbitrary policies is undecidable; [`verify::verify_policy`]
//! is restricted to finite-state [`transducer::PolicyTransducer`]s, for
//! which the product with the deontology automaton is finite.
//!
//! The crate is `no_std` with `alloc`.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod agents;
pub mod alphabet;
pub mod automaton;
pub mod deontology;
pub mod fixtures;
pub mod history;
pub mod spec;

pub use alphabet::{Action, Alphabet, AlphabetError, Percept, Role, Symbol, Token};
pub use deontology::{
    compile, compile_with, AlphabetMismatch, CompileError, CompileOptions, Deontology, Parity, StateId,
};
pub use history::{Cycle, History, HistoryError};
pub use spec::{parse_spec, Regex, SpecDoc, SpecError};
pub mod analysis;
pub mod governor;
pub mod harness;
pub mod transducer;
pub mod verify;
