//! Test oracles and generators for `deon-core`.
//!
//! Nothing here touches the automaton pipeline: membership is decided by
//! interpreting the regex AST directly, and policies are checked by
//! enumerating percept sequences.

pub mod generate;
pub mod matcher;
pub mod nerode;
pub mod policy_oracle;

pub use matcher::{is_interleaved, matches, member};
pub use nerode::nerode_class_count;
pub use policy_oracle::{brute_force_verify, cross_check, shortest_violation_depth, OracleVerdict};
