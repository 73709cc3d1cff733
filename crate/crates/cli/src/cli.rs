//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::net::TcpListener;

use clap::{Args, Parser, Subcommand};
use deon_core::agents::{
    AdversarialEnv, BadPolicy, Environment, GoodPolicy, NullPolicy, Policy, RandomEnv, RandomPolicy, ScriptedEnv,
    ScriptedPolicy, TransducerPolicy,
};
use deon_core::analysis::{analyze, classify_history, HistoryClass};
use deon_core::governor::{GovernorConfig, Mode};
use deon_core::harness::{homunculus_demo, simulate, OuterMapping};
use deon_core::verify::{verify_policy, Verdict};
use deon_core::{CompileOptions, History};

use crate::daemon::{serve, serve_tcp, Connection};
use crate::input::{load_spec, load_transducer, InputError, Loaded};
use crate::report;

pub const EXIT_OK: u8 = 0;
pub const EXIT_COUNTEREXAMPLE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_AMENDABLE: u8 = 3;
pub const EXIT_DEAD: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "deon", version, about = "Compile, analyze, verify and enforce regular deontologies")]
struct Cli {
    /// Cap on determinized automaton states.
    #[arg(long, global = true, default_value_t = deon_core::deontology::DEFAULT_STATE_CAP)]
    state_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze a spec: triviality, viability, consequence independence, governable region.
    Check {
        spec: String,
        #[arg(long)]
        json: bool,
    },
    /// Classify a history as GOOD (exit 0), AMENDABLE (3) or DEAD (4).
    Member { spec: String, history: String },
    /// Check a finite-state policy; exit 1 with a counterexample if it can leave G.
    Verify { spec: String, fst: String },
    /// Run a policy against an environment and print the run record.
    Simulate(SimulateArgs),
    /// Serve governor sessions over the line protocol.
    Govern(GovernArgs),
    /// Show that verified intentions say nothing about outer behavior.
    DemoHomunculus(HomunculusArgs),
    /// Print the compiled automaton in dump format.
    Dump { spec: String },
}

#[derive(Debug, Args)]
struct GovernorFlags {
    /// Substitute and refuse without requiring the empty history to be Good.
    #[arg(long)]
    permissive: bool,
    /// Only allow actions that keep the session in the governable region.
    #[arg(long)]
    foresight: bool,
}

impl GovernorFlags {
    fn config(&self) -> GovernorConfig {
        let mode = if self.permissive { Mode::Permissive } else { Mode::Strict };
        GovernorConfig { mode, ..GovernorConfig::strict() }.with_foresight(self.foresight)
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    spec: String,
    /// random, good, bad, null[:ACTION], scripted:A,B,..., or a .fst file.
    #[arg(long, default_value = "random")]
    policy: String,
    /// random, adversarial, or scripted:P,Q,...
    #[arg(long, default_value = "random")]
    env: String,
    #[arg(long, default_value_t = 100)]
    cycles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to --seed.
    #[arg(long)]
    env_seed: Option<u64>,
    /// Filter every proposal through a governor.
    #[arg(long)]
    govern: bool,
    #[command(flatten)]
    governor: GovernorFlags,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
#[group(id = "transport", required = true, multiple = false)]
struct GovernArgs {
    spec: String,
    #[arg(long, group = "transport")]
    stdio: bool,
    #[arg(long, group = "transport", value_name = "ADDR")]
    listen: Option<String>,
    #[command(flatten)]
    governor: GovernorFlags,
}

#[derive(Debug, Args)]
struct HomunculusArgs {
    /// Outer deontology; defaults to SPEC_NG.
    #[arg(long, default_value = "ng")]
    outer: String,
    /// Cycle at which the outer agent defects; 0 for never.
    #[arg(long, default_value_t = 3)]
    violate_at: usize,
    #[arg(long, default_value_t = 10)]
    cycles: usize,
    /// Outer action for ordinary cycles; defaults to the first declared action.
    #[arg(long)]
    default_action: Option<String>,
    /// Outer action at the defection cycle; defaults to the last declared action.
    #[arg(long)]
    violation_action: Option<String>,
    /// Seed of the outer environment.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Input(String),
    Io(std::io::Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    let options = CompileOptions { state_cap: cli.state_cap };
    match dispatch(cli.command, &options, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn load(spec: &str, options: &CompileOptions, stderr: &mut dyn Write) -> Result<Loaded, Failure> {
    let loaded = load_spec(spec, options)?;
    for w in &loaded.warnings {
        writeln!(stderr, "warning: {spec}: {w}")?;
    }
    Ok(loaded)
}

fn dispatch(
    command: Command,
    options: &CompileOptions,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<u8, Failure> {
    match command {
        Command::Check { spec, json } => {
            let l = load(&spec, options, stderr)?;
            let r = analyze(&l.deontology);
            if json {
                writeln!(stdout, "{}", report::analysis_json(&l.deontology, &r))?;
            } else {
                write!(stdout, "{}", report::analysis_text(&l.deontology, &r))?;
            }
            Ok(EXIT_OK)
        }
        Command::Member { spec, history } => {
            let l = load(&spec, options, stderr)?;
            let h = History::parse(&history, l.deontology.alphabet().clone()).map_err(input_err)?;
            let class = classify_history(&l.deontology, &h).map_err(input_err)?;
            writeln!(stdout, "{class}")?;
            Ok(match class {
                HistoryClass::Good => EXIT_OK,
                HistoryClass::Amendable => EXIT_AMENDABLE,
                HistoryClass::Dead => EXIT_DEAD,
            })
        }
        Command::Verify { spec, fst } => {
            let l = load(&spec, options, stderr)?;
            let t = load_transducer(&fst, l.deontology.alphabet().clone())?;
            let v = verify_policy(&l.deontology, &t).map_err(input_err)?;
            write!(stdout, "{}", report::verdict_text(&l.deontology, &v))?;
            Ok(match v {
                Verdict::Verified => EXIT_OK,
                Verdict::Counterexample(_) => EXIT_COUNTEREXAMPLE,
            })
        }
        Command::Simulate(args) => simulate_cmd(args, options, stdout, stderr),
        Command::Govern(args) => {
            let l = load(&args.spec, options, stderr)?;
            let config = args.governor.config();
            writeln!(stderr, "deontology {} {}", l.name, l.deontology.fingerprint())?;
            if let Some(addr) = args.listen {
                let listener = TcpListener::bind(&addr)?;
                writeln!(stderr, "listening on {}", listener.local_addr()?)?;
                serve_tcp(listener, l.deontology, config)?;
            } else {
                let mut conn = Connection::new(l.deontology, config);
                serve(&mut conn, stdin, stdout)?;
            }
            Ok(EXIT_OK)
        }
        Command::DemoHomunculus(args) => homunculus_cmd(args, options, stdout, stderr),
        Command::Dump { spec } => {
            let l = load(&spec, options, stderr)?;
            write!(stdout, "{}", l.deontology.dump())?;
            Ok(EXIT_OK)
        }
    }
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()
}

fn make_policy(name: &str, l: &Loaded, seed: u64) -> Result<Box<dyn Policy>, Failure> {
    let d = &l.deontology;
    let a = d.alphabet();
    Ok(match name.split_once(':') {
        None if name == "random" => Box::new(RandomPolicy::new(a, seed)),
        None if name == "good" => Box::new(GoodPolicy::new(d.clone()).map_err(input_err)?),
        None if name == "bad" => Box::new(BadPolicy::new(d).map_err(input_err)?),
        None if name == "null" => Box::new(NullPolicy::new(a, &a.actions()[0]).map_err(input_err)?),
        Some(("null", action)) => Box::new(NullPolicy::new(a, action).map_err(input_err)?),
        Some(("scripted", list)) => {
            let script = split_list(list).into_iter().map(|n| a.action(n)).collect::<Result<Vec<_>, _>>();
            Box::new(ScriptedPolicy::new(script.map_err(input_err)?).map_err(input_err)?)
        }
        Some(("fst", path)) => Box::new(TransducerPolicy::new(load_transducer(path, a.clone())?)),
        None if name.ends_with(".fst") => Box::new(TransducerPolicy::new(load_transducer(name, a.clone())?)),
        _ => return Err(Failure::Input(format!("unknown policy `{name}`"))),
    })
}

fn make_env(name: &str, l: &Loaded, seed: u64) -> Result<Box<dyn Environment>, Failure> {
    let d = &l.deontology;
    let a = d.alphabet();
    Ok(match name.split_once(':') {
        None if name == "random" => Box::new(RandomEnv::new(a, seed)),
        None if name == "adversarial" => Box::new(AdversarialEnv::new(d.clone())),
        Some(("scripted", list)) => {
            let script = split_list(list).into_iter().map(|n| a.percept(n)).collect::<Result<Vec<_>, _>>();
            Box::new(ScriptedEnv::new(script.map_err(input_err)?).map_err(input_err)?)
        }
        _ => return Err(Failure::Input(format!("unknown environment `{name}`"))),
    })
}

fn simulate_cmd(
    args: SimulateArgs,
    options: &CompileOptions,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<u8, Failure> {
    let l = load(&args.spec, options, stderr)?;
    let mut policy = make_policy(&args.policy, &l, args.seed)?;
    let mut env = make_env(&args.env, &l, args.env_seed.unwrap_or(args.seed))?;
    let governor = args.govern.then(|| args.governor.config());
    let record = simulate(&l.deontology, &l.name, &mut policy, &mut env, args.cycles, governor).map_err(input_err)?;
    if args.json {
        writeln!(stdout, "{}", report::run_json(&record))?;
    } else {
        write!(stdout, "{}", report::run_text(&record))?;
    }
    Ok(EXIT_OK)
}

fn homunculus_cmd(
    args: HomunculusArgs,
    options: &CompileOptions,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<u8, Failure> {
    let l = load(&args.outer, options, stderr)?;
    let a = l.deontology.alphabet();
    let pick = |name: &Option<String>, fallback: usize| match name {
        Some(n) => a.action(n).map_err(input_err),
        None => Ok(a.all_actions().nth(fallback).expect("alphabet has actions")),
    };
    let default = pick(&args.default_action, 0)?;
    let violation = pick(&args.violation_action, a.action_count() - 1)?;
    let mut mapping = OuterMapping::constant(default);
    if args.violate_at > 0 {
        mapping = mapping.at_cycle(args.violate_at, violation);
    }
    let mut env = RandomEnv::new(a, args.seed);
    let r = homunculus_demo(&l.deontology, &mapping, &mut env, args.cycles).map_err(input_err)?;
    if args.json {
        writeln!(stdout, "{}", report::homunculus_json(&r))?;
    } else {
        write!(stdout, "{}", report::homunculus_text(&r))?;
    }
    Ok(EXIT_OK)
}
