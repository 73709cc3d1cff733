//! Line-protocol front end for [`GovernorSession`].
//!
//! ```text
//! > load <fingerprint>          < loaded <fingerprint>
//! > load inline                 (spec lines, then `end`)
//! > propose grab                < verdict substituted grab noop
//! > percept ok                  < ack 1
//! > propose ok                  < error unknown-symbol ...
//! ```
//!
//! A protocol error answers `error <code> <message>` and freezes the session
//! until the next `load`.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use deon_core::governor::{GovernorConfig, GovernorError, GovernorSession};
use deon_core::{CompileOptions, Deontology};

use crate::input::compile_text;

/// Per-connection protocol state.
#[derive(Debug)]
pub struct Connection {
    base: Arc<Deontology>,
    config: GovernorConfig,
    session: Option<GovernorSession>,
    inline: Option<Vec<String>>,
}

impl Connection {
    pub fn new(base: Arc<Deontology>, config: GovernorConfig) -> Self {
        Connection { base, config, session: None, inline: None }
    }

    pub fn session(&self) -> Option<&GovernorSession> {
        self.session.as_ref()
    }

    /// Handles one client line. Returns the reply, or `None` while an inline
    /// spec is being read or for blank lines.
    pub fn handle_line(&mut self, line: &str) -> Option<String> {
        let line = line.trim_end_matches(['\r', '\n']);
        if let Some(buf) = self.inline.as_mut() {
            if line.trim() != "end" {
                buf.push(line.to_string());
                return None;
            }
            let text = self.inline.take().unwrap().join("\n");
            return Some(match compile_text(&text, &CompileOptions::default()) {
                Ok((d, _)) => self.open(Arc::new(d)),
                Err(e) => error_line("bad-spec", &e),
            });
        }
        let mut words = line.split_whitespace();
        let command = words.next()?;
        let args: Vec<&str> = words.collect();
        Some(match (command, args.as_slice()) {
            ("load", ["inline"]) => {
                self.inline = Some(Vec::new());
                return None;
            }
            ("load", [hash]) => {
                if *hash == self.base.fingerprint() || *hash == "default" {
                    self.open(self.base.clone())
                } else {
                    self.fail("unknown-spec", &format!("no deontology with fingerprint {hash}"))
                }
            }
            ("propose", [action]) => match self.session.as_mut() {
                None => error_line("no-session", "no session"),
                Some(s) => match s.propose_named(action) {
                    Ok(outcome) => format!("verdict {}", s.describe(&outcome)),
                    Err(e) => self.governor_error(e),
                },
            },
            ("percept", [percept]) => match self.session.as_mut() {
                None => error_line("no-session", "no session"),
                Some(s) => match s.observe_named(percept) {
                    Ok(n) => format!("ack {n}"),
                    Err(e) => self.governor_error(e),
                },
            },
            ("load" | "propose" | "percept", _) => {
                self.fail("bad-arguments", &format!("wrong arguments for `{command}`"))
            }
            _ => self.fail("unknown-command", &format!("unknown command `{command}`")),
        })
    }

    fn open(&mut self, d: Arc<Deontology>) -> String {
        let fingerprint = d.fingerprint();
        match GovernorSession::open(d, self.config.clone()) {
            Ok(s) => {
                self.session = Some(s);
                format!("loaded {fingerprint}")
            }
            Err(e) => {
                self.session = None;
                error_line("not-governable", &e.to_string())
            }
        }
    }

    fn fail(&mut self, code: &str, message: &str) -> String {
        if let Some(s) = self.session.as_mut() {
            s.freeze();
        }
        error_line(code, message)
    }

    fn governor_error(&mut self, e: GovernorError) -> String {
        let code = match e {
            GovernorError::ProtocolOrder { .. } => "protocol-order",
            GovernorError::Frozen => "frozen",
            GovernorError::UnknownSymbol(_) => "unknown-symbol",
            _ => "governor",
        };
        self.fail(code, &e.to_string())
    }
}

fn error_line(code: &str, message: &str) -> String {
    format!("error {code} {message}")
}

/// Serves one connection until end of input.
pub fn serve<R: BufRead, W: Write>(conn: &mut Connection, input: R, mut output: W) -> io::Result<()> {
    for line in input.lines() {
        if let Some(reply) = conn.handle_line(&line?) {
            writeln!(output, "{reply}")?;
            output.flush()?;
        }
    }
    Ok(())
}

/// Accepts connections forever, one thread and one session per connection.
pub fn serve_tcp(listener: TcpListener, base: Arc<Deontology>, config: GovernorConfig) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let base = base.clone();
        let config = config.clone();
        thread::spawn(move || {
            let _ = serve_stream(stream, base, config);
        });
    }
    Ok(())
}

fn serve_stream(stream: TcpStream, base: Arc<Deontology>, config: GovernorConfig) -> io::Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    let mut conn = Connection::new(base, config);
    serve(&mut conn, reader, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use deon_core::{compile, fixtures, parse_spec};

    fn ng() -> Arc<Deontology> {
        Arc::new(compile(&parse_spec(fixtures::SPEC_NG).unwrap()).unwrap())
    }

    #[test]
    fn basic_exchange() {
        let d = ng();
        let mut c = Connection::new(d.clone(), GovernorConfig::strict());
        assert_eq!(c.handle_line("propose grab").unwrap(), "error no-session no session");
        assert_eq!(c.handle_line(&format!("load {}", d.fingerprint())).unwrap(), format!("loaded {}", d.fingerprint()));
        assert_eq!(c.handle_line("propose grab").unwrap(), "verdict substituted grab noop");
        assert_eq!(c.handle_line("percept ok").unwrap(), "ack 1");
        assert!(c.handle_line("percept ok").unwrap().starts_with("error protocol-order"));
        assert!(c.handle_line("propose noop").unwrap().starts_with("error frozen"));
    }

    #[test]
    fn inline_load() {
        let mut c = Connection::new(ng(), GovernorConfig::strict());
        assert_eq!(c.handle_line("load inline"), None);
        for line in fixtures::SPEC_RS.lines() {
            assert_eq!(c.handle_line(line), None);
        }
        assert!(c.handle_line("end").unwrap().starts_with("loaded "));
        assert_eq!(c.handle_line("propose go").unwrap(), "verdict approved go");
        assert_eq!(c.handle_line("load inline"), None);
        assert_eq!(c.handle_line("percepts: ok"), None);
        assert!(c.handle_line("end").unwrap().starts_with("error bad-spec"));
    }

    #[test]
    fn unknown_symbol_freezes() {
        let mut c = Connection::new(ng(), GovernorConfig::strict());
        c.handle_line("load default");
        assert!(c.handle_line("propose ok").unwrap().starts_with("error unknown-symbol"));
        assert!(c.handle_line("propose noop").unwrap().starts_with("error frozen"));
        assert!(c.handle_line("load default").unwrap().starts_with("loaded"));
        assert_eq!(c.handle_line("propose noop").unwrap(), "verdict approved noop");
    }
}
