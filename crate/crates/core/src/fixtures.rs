//! Reference deontologies shipped with the toolkit.

/// Grab-free histories.
pub const SPEC_NG: &str = "percepts: ok err\nactions: noop move grab\ngood: ([noop move] _p)*\n";

/// Every `red` must be answered by `stop`.
pub const SPEC_RS: &str = "percepts: green red\nactions: go stop\ngood: (go | stop | green | (red stop))* red?\n";

/// Good only if the action guesses the following percept.
pub const SPEC_GUESS: &str = "percepts: pa pb\nactions: a b\ngood: ((a pa) | (b pb))*\n";

/// Betting is Good only when it wins.
pub const SPEC_GAMBLE: &str = "percepts: win lose\nactions: bet pass\ngood: ((pass _p) | (bet win))*\n";

/// A borrow must eventually be followed by a cycle ending in `repay` or `noop`.
pub const SPEC_DEBT: &str = "percepts: tick\nactions: borrow repay noop\ngood: eps | (% [repay noop] tick)\n";

/// The homunculus: any percepts, only `G` intentions.
pub const SPEC_HOM: &str = "percepts: ok err\nactions: G B\ngood: (G _p)*\n";

pub const ALL: &[(&str, &str)] = &[
    ("SPEC_NG", SPEC_NG),
    ("SPEC_RS", SPEC_RS),
    ("SPEC_GUESS", SPEC_GUESS),
    ("SPEC_GAMBLE", SPEC_GAMBLE),
    ("SPEC_DEBT", SPEC_DEBT),
    ("SPEC_HOM", SPEC_HOM),
];

/// Looks up a fixture by name, case-insensitively, with or without the `SPEC_` prefix.
pub fn by_name(name: &str) -> Option<&'static str> {
    let upper = name.to_ascii_uppercase();
    let key = upper.strip_prefix("SPEC_").unwrap_or(&upper);
    ALL.iter().find(|(n, _)| n.strip_prefix("SPEC_") == Some(key)).map(|(_, t)| *t)
}
