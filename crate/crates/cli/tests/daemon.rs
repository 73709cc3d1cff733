use std::io::{BufRead, BufReader, Cursor, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::Arc;
use std::thread;

use deon::daemon::{serve, serve_tcp, Connection};
use deon_core::governor::{GovernorConfig, GovernorSession, ProposalOutcome};
use deon_core::{compile, fixtures, parse_spec, Deontology};

fn ng() -> Arc<Deontology> {
    Arc::new(compile(&parse_spec(fixtures::SPEC_NG).unwrap()).unwrap())
}

struct Transcript {
    client: Vec<String>,
    server: Vec<String>,
}

fn golden(name: &str) -> Transcript {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let text = std::fs::read_to_string(path).unwrap();
    let mut t = Transcript { client: Vec::new(), server: Vec::new() };
    for line in text.lines() {
        match line.split_at(2) {
            ("> ", rest) => t.client.push(rest.to_string()),
            ("< ", rest) => t.server.push(rest.to_string()),
            _ => panic!("bad golden line {line:?}"),
        }
    }
    t
}

fn run_daemon(d: Arc<Deontology>, client: &[String]) -> Vec<String> {
    let mut conn = Connection::new(d, GovernorConfig::strict());
    let mut out = Vec::new();
    serve(&mut conn, Cursor::new(client.join("\n")), &mut out).unwrap();
    String::from_utf8(out).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn golden_transcripts_replay() {
    for name in ["ng_session.txt", "rs_session.txt"] {
        let t = golden(name);
        assert_eq!(run_daemon(ng(), &t.client), t.server, "{name}");
    }
}

fn outcome_line(d: &Deontology, o: &ProposalOutcome) -> String {
    let a = d.alphabet();
    match *o {
        ProposalOutcome::Approved(y) => format!("verdict approved {}", a.action_name(y)),
        ProposalOutcome::Substituted { original, replacement } => {
            format!("verdict substituted {} {}", a.action_name(original), a.action_name(replacement))
        }
        ProposalOutcome::Refused(r) => format!("verdict refused {}", r.code()),
    }
}

// Drives a GovernorSession directly with the golden client stream and checks
// every verdict and ack the daemon sent.
#[test]
fn wire_verdicts_equal_in_process_verdicts() {
    let d = ng();
    let t = golden("ng_session.txt");
    let mut session: Option<GovernorSession> = None;
    let mut expected = Vec::new();
    for line in &t.client {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["load", _] => session = Some(GovernorSession::open(d.clone(), GovernorConfig::strict()).unwrap()),
            ["propose", y] => {
                if let Some(s) = session.as_mut() {
                    if let Ok(o) = s.propose_named(y) {
                        expected.push(outcome_line(&d, &o));
                    } else {
                        s.freeze();
                    }
                }
            }
            ["percept", x] => {
                if let Some(s) = session.as_mut() {
                    if let Ok(n) = s.observe_named(x) {
                        expected.push(format!("ack {n}"));
                    } else {
                        s.freeze();
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    let wire: Vec<String> =
        t.server.iter().filter(|l| l.starts_with("verdict ") || l.starts_with("ack ")).cloned().collect();
    let messages = t.client.iter().filter(|l| l.starts_with("propose ") || l.starts_with("percept ")).count();
    assert!(messages >= 20);
    assert_eq!(wire, expected);
}

#[test]
fn stdio_binary_matches_golden() {
    let t = golden("ng_session.txt");
    let mut child = Command::new(env!("CARGO_BIN_EXE_deon"))
        .args(["govern", "ng", "--stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    let input = t.client.join("\n") + "\n";
    let writer = thread::spawn(move || stdin.write_all(input.as_bytes()));
    let output = child.wait_with_output().unwrap();
    writer.join().unwrap().unwrap();
    assert!(output.status.success());
    let lines: Vec<String> = String::from_utf8(output.stdout).unwrap().lines().map(str::to_string).collect();
    assert_eq!(lines, t.server);
}

struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Client {
    fn connect(addr: std::net::SocketAddr) -> Self {
        let s = TcpStream::connect(addr).unwrap();
        Client { reader: BufReader::new(s.try_clone().unwrap()), writer: s }
    }

    fn ask(&mut self, line: &str) -> String {
        writeln!(self.writer, "{line}").unwrap();
        let mut reply = String::new();
        self.reader.read_line(&mut reply).unwrap();
        reply.trim_end().to_string()
    }
}

#[test]
fn interleaved_tcp_sessions_stay_independent() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let d = ng();
    thread::spawn(move || serve_tcp(listener, d, GovernorConfig::strict()));

    let a_script = ["load default", "propose grab", "percept ok", "propose move", "percept err", "propose noop"];
    let b_script =
        ["load default", "propose move", "percept ok", "percept ok", "propose noop", "load default", "propose grab"];
    let solo = |script: &[&str]| run_daemon(ng(), &script.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    let (a_expected, b_expected) = (solo(&a_script), solo(&b_script));

    let mut a = Client::connect(addr);
    let mut b = Client::connect(addr);
    let (mut a_got, mut b_got) = (Vec::new(), Vec::new());
    for i in 0..a_script.len().max(b_script.len()) {
        if let Some(line) = b_script.get(i) {
            b_got.push(b.ask(line));
        }
        if let Some(line) = a_script.get(i) {
            a_got.push(a.ask(line));
        }
    }
    assert_eq!(a_got, a_expected);
    assert_eq!(b_got, b_expected);
    // b froze itself on a protocol error; a is unaffected
    assert!(b_got[3].starts_with("error protocol-order"));
    assert_eq!(a_got[3], "verdict approved move");
    assert_eq!(a.ask("percept ok"), "ack 3");
}
