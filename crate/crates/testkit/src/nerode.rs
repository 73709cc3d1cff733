//! Brute-force Myhill–Nerode partition.
//!
//! Two prefixes are equivalent when every suffix up to the bound gives the
//! same membership answer. With prefixes and suffixes of length ≤ `half`,
//! membership is queried on strings up to `2 * half` tokens.

use std::collections::HashSet;

use deon_core::{SpecDoc, Symbol};

use crate::matcher::member;

/// All strings over `symbols` of length ≤ `max_len`, shortest first.
pub fn strings_up_to(symbols: usize, max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for k in 0..symbols {
                let mut t: Vec<Symbol> = s.clone();
                t.push(Symbol(k as u16));
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Number of distinct residual signatures among prefixes of length ≤ `half`.
pub fn nerode_class_count(doc: &SpecDoc, half: usize) -> usize {
    let words = strings_up_to(doc.alphabet.symbol_count(), half);
    let signatures: HashSet<Vec<bool>> = words
        .iter()
        .map(|u| {
            words
                .iter()
                .map(|v| {
                    let mut w = u.clone();
                    w.extend_from_slice(v);
                    member(doc, &w)
                })
                .collect()
        })
        .collect();
    signatures.len()
}
