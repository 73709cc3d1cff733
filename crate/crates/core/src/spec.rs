//! The `.deon` specification language.
//!
//! ```text
//! percepts: ok err
//! actions:  noop move grab
//! good:     ([noop move] _p)*
//! ```
//!
//! `good` is a regular expression over the declared symbols. Juxtaposition
//! concatenates; `|` alternates; `*`, `+`, `?` are postfix; `[a b]` is a
//! symbol class. Wildcards: `_a` any action, `_p` any percept, `_c` one
//! cycle (`_a _p`), `%` any number of cycles, `eps` the empty string.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Write as _;

use thiserror::Error;

use crate::alphabet::{is_valid_name, Alphabet, AlphabetError, Symbol};

/// Reserved words that cannot be declared as symbols.
pub const RESERVED: &[&str] = &["eps"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: undeclared symbol `{name}`")]
    UndeclaredSymbol { line: usize, column: usize, name: String },
    #[error("{line}: duplicate `{section}` section")]
    DuplicateSection { line: usize, section: String },
    #[error("{line}: {source}")]
    Alphabet { line: usize, source: AlphabetError },
}

/// Regular expression over alphabet symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regex {
    /// `eps`
    Epsilon,
    Symbol(Symbol),
    /// `[a b c]`
    Class(Vec<Symbol>),
    /// `_a`
    AnyAction,
    /// `_p`
    AnyPercept,
    /// `_c`
    AnyCycle,
    /// `%`
    AnyCycles,
    Concat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Optional(Box<Regex>),
}

impl Regex {
    /// Renders back into the surface syntax, fully parenthesized where needed.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        self.write(alphabet, &mut out, 0);
        out
    }

    // precedence: 0 = alt, 1 = concat, 2 = postfix operand
    fn write(&self, alphabet: &Alphabet, out: &mut String, prec: u8) {
        match self {
            Regex::Epsilon => out.push_str("eps"),
            Regex::Symbol(s) => out.push_str(alphabet.symbol_name(*s)),
            Regex::Class(items) => {
                out.push('[');
                for (i, s) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push_str(alphabet.symbol_name(*s));
                }
                out.push(']');
            }
            Regex::AnyAction => out.push_str("_a"),
            Regex::AnyPercept => out.push_str("_p"),
            Regex::AnyCycle => out.push_str("_c"),
            Regex::AnyCycles => out.push('%'),
            Regex::Concat(parts) => {
                let wrap = prec > 1;
                if wrap {
                    out.push('(');
                }
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    p.write(alphabet, out, 2);
                }
                if wrap {
                    out.push(')');
                }
            }
            Regex::Alt(parts) => {
                let wrap = prec > 0;
                if wrap {
                    out.push('(');
                }
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    p.write(alphabet, out, 1);
                }
                if wrap {
                    out.push(')');
                }
            }
            Regex::Star(inner) | Regex::Plus(inner) | Regex::Optional(inner) => {
                // nested postfix operators are not in the grammar; parenthesize
                let needs_paren = matches!(
                    **inner,
                    Regex::Concat(_) | Regex::Alt(_) | Regex::Star(_) | Regex::Plus(_) | Regex::Optional(_)
                );
                if needs_paren {
                    out.push('(');
                    inner.write(alphabet, out, 0);
                    out.push(')');
                } else {
                    inner.write(alphabet, out, 2);
                }
                out.push(match self {
                    Regex::Star(_) => '*',
                    Regex::Plus(_) => '+',
                    _ => '?',
                });
            }
        }
    }
}

/// A parsed specification document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecDoc {
    pub alphabet: Arc<Alphabet>,
    pub good: Regex,
}

impl SpecDoc {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        parse_spec(text)
    }

    /// Canonical `.deon` text for this document.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "percepts: {}", self.alphabet.percepts().join(" "));
        let _ = writeln!(out, "actions: {}", self.alphabet.actions().join(" "));
        let _ = writeln!(out, "good: {}", self.good.render(&self.alphabet));
        out
    }
}

struct Section<'a> {
    line: usize,
    /// 1-based column of the first byte of `body`.
    column: usize,
    body: &'a str,
}

/// Parses a `.deon` document.
pub fn parse_spec(text: &str) -> Result<SpecDoc, SpecError> {
    let mut percepts: Option<Section> = None;
    let mut actions: Option<Section> = None;
    let mut good: Option<Section> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let Some(colon) = content.find(':') else {
            let column = content.len() - content.trim_start().len() + 1;
            return Err(SpecError::Syntax { line, column, message: "expected `<section>: ...`".into() });
        };
        let key = content[..colon].trim();
        let slot = match key {
            "percepts" => &mut percepts,
            "actions" => &mut actions,
            "good" => &mut good,
            _ => {
                let column = content.len() - content.trim_start().len() + 1;
                return Err(SpecError::Syntax { line, column, message: alloc::format!("unknown section `{key}`") });
            }
        };
        if slot.is_some() {
            return Err(SpecError::DuplicateSection { line, section: key.into() });
        }
        *slot = Some(Section { line, column: colon + 2, body: &content[colon + 1..] });
    }

    let missing = |name: &str| SpecError::Syntax {
        line: text.lines().count().max(1),
        column: 1,
        message: alloc::format!("missing `{name}` section"),
    };
    let percepts = percepts.ok_or_else(|| missing("percepts"))?;
    let actions = actions.ok_or_else(|| missing("actions"))?;
    let good = good.ok_or_else(|| missing("good"))?;

    let p_names = declared_names(&percepts)?;
    let a_names = declared_names(&actions)?;
    let alphabet = Alphabet::new(&p_names, &a_names).map_err(|source| {
        let line = match &source {
            AlphabetError::EmptyAlphabet if !p_names.is_empty() => actions.line,
            AlphabetError::DuplicateSymbol(n) if a_names.contains(n) => actions.line,
            _ => percepts.line,
        };
        SpecError::Alphabet { line, source }
    })?;

    let tokens = lex(&good)?;
    let mut parser =
        Parser { tokens, pos: 0, alphabet: &alphabet, line: good.line, end_column: good.column + good.body.len() };
    let regex = parser.parse_expr()?;
    if let Some(tok) = parser.peek() {
        let message = match tok.kind {
            Tok::RParen => "unbalanced parenthesis: unexpected `)`".to_string(),
            _ => "unexpected token".to_string(),
        };
        return Err(SpecError::Syntax { line: good.line, column: tok.column, message });
    }
    Ok(SpecDoc { alphabet: Arc::new(alphabet), good: regex })
}

fn declared_names(section: &Section) -> Result<Vec<String>, SpecError> {
    let mut names = Vec::new();
    let mut offset = 0;
    for word in section.body.split_whitespace() {
        let at = section.body[offset..].find(word).unwrap() + offset;
        offset = at + word.len();
        let column = section.column + at;
        if !is_valid_name(word) || RESERVED.contains(&word) {
            return Err(SpecError::Syntax {
                line: section.line,
                column,
                message: alloc::format!("`{word}` is not a valid symbol name"),
            });
        }
        names.push(word.to_string());
    }
    Ok(names)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Name(&'a str),
    Eps,
    AnyAction,
    AnyPercept,
    AnyCycle,
    AnyCycles,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Bar,
    Star,
    Plus,
    Question,
}

#[derive(Debug, Clone)]
struct Lexed<'a> {
    kind: Tok<'a>,
    column: usize,
}

fn lex<'a>(section: &Section<'a>) -> Result<Vec<Lexed<'a>>, SpecError> {
    let body = section.body;
    let bytes = body.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let column = section.column + i;
        let single = match c {
            b' ' | b'\t' | b'\r' => {
                i += 1;
                continue;
            }
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'|' => Some(Tok::Bar),
            b'*' => Some(Tok::Star),
            b'+' => Some(Tok::Plus),
            b'?' => Some(Tok::Question),
            b'%' => Some(Tok::AnyCycles),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Lexed { kind, column });
            i += 1;
            continue;
        }
        if c == b'_' {
            let kind = match bytes.get(i + 1) {
                Some(b'a') => Tok::AnyAction,
                Some(b'p') => Tok::AnyPercept,
                Some(b'c') => Tok::AnyCycle,
                _ => {
                    return Err(SpecError::Syntax {
                        line: section.line,
                        column,
                        message: "unknown wildcard (expected `_a`, `_p` or `_c`)".into(),
                    })
                }
            };
            let next = bytes.get(i + 2);
            if next.is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') {
                return Err(SpecError::Syntax { line: section.line, column, message: "unknown wildcard".into() });
            }
            out.push(Lexed { kind, column });
            i += 2;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &body[start..i];
            let kind = if word == "eps" { Tok::Eps } else { Tok::Name(word) };
            out.push(Lexed { kind, column });
            continue;
        }
        let ch = body[i..].chars().next().unwrap_or('?');
        return Err(SpecError::Syntax {
            line: section.line,
            column,
            message: alloc::format!("unexpected character `{ch}`"),
        });
    }
    Ok(out)
}

struct Parser<'a, 'b> {
    tokens: Vec<Lexed<'a>>,
    pos: usize,
    alphabet: &'b Alphabet,
    line: usize,
    end_column: usize,
}

impl<'a> Parser<'a, '_> {
    fn peek(&self) -> Option<&Lexed<'a>> {
        self.tokens.get(self.pos)
    }

    fn column(&self) -> usize {
        self.peek().map_or(self.end_column, |t| t.column)
    }

    fn syntax(&self, message: impl Into<String>) -> SpecError {
        SpecError::Syntax { line: self.line, column: self.column(), message: message.into() }
    }

    fn parse_expr(&mut self) -> Result<Regex, SpecError> {
        let mut alts = alloc::vec![self.parse_cat()?];
        while matches!(self.peek().map(|t| &t.kind), Some(Tok::Bar)) {
            self.pos += 1;
            alts.push(self.parse_cat()?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { Regex::Alt(alts) })
    }

    fn parse_cat(&mut self) -> Result<Regex, SpecError> {
        let mut parts = Vec::new();
        while let Some(tok) = self.peek() {
            if matches!(tok.kind, Tok::Bar | Tok::RParen) {
                break;
            }
            parts.push(self.parse_rep()?);
        }
        match parts.len() {
            0 => Err(self.syntax("expected an expression")),
            1 => Ok(parts.pop().unwrap()),
            _ => Ok(Regex::Concat(parts)),
        }
    }

    fn parse_rep(&mut self) -> Result<Regex, SpecError> {
        let atom = self.parse_atom()?;
        let wrapped = match self.peek().map(|t| &t.kind) {
            Some(Tok::Star) => Regex::Star(Box::new(atom)),
            Some(Tok::Plus) => Regex::Plus(Box::new(atom)),
            Some(Tok::Question) => Regex::Optional(Box::new(atom)),
            _ => return Ok(atom),
        };
        self.pos += 1;
        if matches!(self.peek().map(|t| &t.kind), Some(Tok::Star | Tok::Plus | Tok::Question)) {
            return Err(self.syntax("repeated postfix operator; parenthesize the operand"));
        }
        Ok(wrapped)
    }

    fn resolve(&self, name: &str, column: usize) -> Result<Symbol, SpecError> {
        self.alphabet.symbol(name).ok_or_else(|| SpecError::UndeclaredSymbol {
            line: self.line,
            column,
            name: name.to_string(),
        })
    }

    fn parse_atom(&mut self) -> Result<Regex, SpecError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.syntax("unexpected end of expression"));
        };
        self.pos += 1;
        match tok.kind {
            Tok::Name(name) => Ok(Regex::Symbol(self.resolve(name, tok.column)?)),
            Tok::Eps => Ok(Regex::Epsilon),
            Tok::AnyAction => Ok(Regex::AnyAction),
            Tok::AnyPercept => Ok(Regex::AnyPercept),
            Tok::AnyCycle => Ok(Regex::AnyCycle),
            Tok::AnyCycles => Ok(Regex::AnyCycles),
            Tok::LBracket => {
                let mut items = Vec::new();
                loop {
                    match self.peek().cloned() {
                        Some(Lexed { kind: Tok::Name(name), column }) => {
                            self.pos += 1;
                            let s = self.resolve(name, column)?;
                            if !items.contains(&s) {
                                items.push(s);
                            }
                        }
                        Some(Lexed { kind: Tok::RBracket, .. }) if !items.is_empty() => {
                            self.pos += 1;
                            break;
                        }
                        Some(Lexed { kind: Tok::RBracket, .. }) => return Err(self.syntax("empty symbol class")),
                        None => {
                            return Err(SpecError::Syntax {
                                line: self.line,
                                column: tok.column,
                                message: "unbalanced bracket: missing `]`".into(),
                            })
                        }
                        Some(_) => return Err(self.syntax("symbol classes may only contain names")),
                    }
                }
                Ok(Regex::Class(items))
            }
            Tok::LParen => {
                let inner = self.parse_expr()?;
                match self.peek() {
                    Some(Lexed { kind: Tok::RParen, .. }) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    None => Err(SpecError::Syntax {
                        line: self.line,
                        column: tok.column,
                        message: "unbalanced parenthesis: missing `)`".into(),
                    }),
                    Some(_) => Err(self.syntax("expected `)`")),
                }
            }
            Tok::RBracket => Err(SpecError::Syntax {
                line: self.line,
                column: tok.column,
                message: "unbalanced bracket: unexpected `]`".into(),
            }),
            Tok::RParen | Tok::Bar | Tok::Star | Tok::Plus | Tok::Question => {
                self.pos -= 1;
                Err(self.syntax("expected an expression"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn with_ng_alphabet(good: &str) -> alloc::string::String {
        alloc::format!("percepts: ok err\nactions: noop move grab\ngood: {good}\n")
    }

    #[test]
    fn parses_fixture() {
        let doc = parse_spec(fixtures::SPEC_NG).unwrap();
        assert_eq!(doc.alphabet.percept_count(), 2);
        assert_eq!(doc.alphabet.action_count(), 3);
        assert!(matches!(doc.good, Regex::Star(_)));
    }

    #[test]
    fn all_fixtures_parse_and_render_stably() {
        for (_, text) in fixtures::ALL {
            let doc = parse_spec(text).unwrap();
            let again = parse_spec(&doc.render()).unwrap();
            assert_eq!(doc, again);
        }
    }

    #[test]
    fn unbalanced_parenthesis() {
        let err = parse_spec(&with_ng_alphabet("(noop ok")).unwrap_err();
        match err {
            SpecError::Syntax { line, column, message } => {
                assert_eq!(line, 3);
                assert_eq!(column, 7);
                assert!(message.contains("unbalanced parenthesis"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_spec(&with_ng_alphabet("noop ok)")), Err(SpecError::Syntax { .. })));
        assert!(matches!(parse_spec(&with_ng_alphabet("[noop ok")), Err(SpecError::Syntax { .. })));
    }

    #[test]
    fn undeclared_symbol() {
        let err = parse_spec(&with_ng_alphabet("fly")).unwrap_err();
        assert_eq!(err, SpecError::UndeclaredSymbol { line: 3, column: 7, name: "fly".into() });
    }

    #[test]
    fn duplicate_section() {
        let text = "percepts: a\nactions: b\ngood: eps\ngood: b a\n";
        assert_eq!(parse_spec(text).unwrap_err(), SpecError::DuplicateSection { line: 4, section: "good".into() });
    }

    #[test]
    fn alphabet_errors_surface() {
        assert!(matches!(
            parse_spec("percepts: ok\nactions: ok\ngood: eps"),
            Err(SpecError::Alphabet { source: AlphabetError::DuplicateSymbol(_), .. })
        ));
        assert!(matches!(
            parse_spec("percepts:\nactions: a\ngood: eps"),
            Err(SpecError::Alphabet { source: AlphabetError::EmptyAlphabet, .. })
        ));
        assert!(matches!(parse_spec("percepts: eps\nactions: a\ngood: eps"), Err(SpecError::Syntax { .. })));
    }

    #[test]
    fn comments_and_missing_sections() {
        let doc = parse_spec("# header\npercepts: ok # trailing\n\nactions: noop\ngood: (noop ok)* # c\n").unwrap();
        assert_eq!(doc.alphabet.action_count(), 1);
        assert!(matches!(parse_spec("percepts: ok\nactions: noop\n"), Err(SpecError::Syntax { .. })));
        assert!(matches!(parse_spec("percepts: ok\nactions: noop\nbad: x\n"), Err(SpecError::Syntax { .. })));
    }

    #[test]
    fn rejects_malformed_expressions() {
        for bad in ["", "noop |", "| noop", "()", "[]", "noop**", "_x", "_ab", "noop $", "[_a]"] {
            assert!(parse_spec(&with_ng_alphabet(bad)).is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn precedence() {
        let doc = parse_spec(&with_ng_alphabet("noop ok | move err*")).unwrap();
        let Regex::Alt(alts) = &doc.good else { panic!("{:?}", doc.good) };
        assert_eq!(alts.len(), 2);
        let Regex::Concat(second) = &alts[1] else { panic!() };
        assert!(matches!(second[1], Regex::Star(_)));
    }
}
