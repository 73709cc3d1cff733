//! Text and JSON renderings of analysis reports and run records.

use std::fmt::Write as _;

use deon_core::analysis::{AnalysisReport, StrongViolation, Triviality, WeakViolation};
use deon_core::governor::{GovernorConfig, Mode, ProposalOutcome};
use deon_core::harness::{HomunculusReport, RunRecord};
use deon_core::verify::Verdict;
use deon_core::{Alphabet, Deontology};
use serde_json::{json, Value};

pub fn triviality_str(t: Triviality) -> &'static str {
    match t {
        Triviality::EmptyG => "empty",
        Triviality::FullG => "full",
        Triviality::NonTrivial => "non-trivial",
    }
}

fn weak_json(a: &Alphabet, r: &Result<(), WeakViolation>) -> Value {
    match r {
        Ok(()) => json!({ "holds": true, "witness": null }),
        Err(WeakViolation::EmptyHistoryNotGood) => json!({ "holds": false, "witness": "empty-history-not-good" }),
        Err(WeakViolation::NoSavingAction { state, percept }) => {
            json!({ "holds": false, "witness": { "state": state, "percept": a.percept_name(*percept) } })
        }
    }
}

fn strong_json(r: &Result<(), StrongViolation>) -> Value {
    match r {
        Ok(()) => json!({ "holds": true, "witness": null }),
        Err(StrongViolation::EmptyHistoryNotGood) => json!({ "holds": false, "witness": "empty-history-not-good" }),
        Err(StrongViolation::NoStronglySafeAction { state }) => {
            json!({ "holds": false, "witness": { "state": state } })
        }
    }
}

pub fn analysis_json(d: &Deontology, r: &AnalysisReport) -> Value {
    let a = d.alphabet();
    let ci = match &r.consequence_independent {
        Ok(()) => json!({ "holds": true, "witness": null }),
        Err(w) => json!({
            "holds": false,
            "witness": {
                "state": w.state,
                "action": a.action_name(w.action),
                "first": a.percept_name(w.first),
                "second": a.percept_name(w.second),
                "good_after_first": w.good_after_first,
            }
        }),
    };
    json!({
        "states": d.state_count(),
        "fingerprint": d.fingerprint(),
        "triviality": triviality_str(r.triviality),
        "accepts_empty": r.accepts_empty,
        "weak_viable": weak_json(a, &r.weak_viable),
        "strong_viable": strong_json(&r.strong_viable),
        "consequence_independent": ci,
        "governable_region_size": r.governable_region_size,
        "governable_from_start": r.governable_from_start,
    })
}

pub fn analysis_text(d: &Deontology, r: &AnalysisReport) -> String {
    let a = d.alphabet();
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let weak = match &r.weak_viable {
        Ok(()) => "yes".to_string(),
        Err(WeakViolation::EmptyHistoryNotGood) => "no (empty history is not Good)".to_string(),
        Err(WeakViolation::NoSavingAction { state, percept }) => {
            format!("no (state {state}: no action survives {})", a.percept_name(*percept))
        }
    };
    let strong = match &r.strong_viable {
        Ok(()) => "yes".to_string(),
        Err(StrongViolation::EmptyHistoryNotGood) => "no (empty history is not Good)".to_string(),
        Err(StrongViolation::NoStronglySafeAction { state }) => format!("no (state {state}: no strongly safe action)"),
    };
    let ci = match &r.consequence_independent {
        Ok(()) => "yes".to_string(),
        Err(w) => {
            let (good, bad) = if w.good_after_first { (w.first, w.second) } else { (w.second, w.first) };
            format!(
                "no (state {}, action {}: Good after {} but not after {})",
                w.state,
                a.action_name(w.action),
                a.percept_name(good),
                a.percept_name(bad)
            )
        }
    };
    let mut out = String::new();
    let _ = writeln!(out, "states: {}", d.state_count());
    let _ = writeln!(out, "fingerprint: {}", d.fingerprint());
    let _ = writeln!(out, "triviality: {}", triviality_str(r.triviality));
    let _ = writeln!(out, "accepts_empty: {}", yes_no(r.accepts_empty));
    let _ = writeln!(out, "weak_viable: {weak}");
    let _ = writeln!(out, "strong_viable: {strong}");
    let _ = writeln!(out, "consequence_independent: {ci}");
    let _ = writeln!(out, "governable_region_size: {}", r.governable_region_size);
    let _ = writeln!(out, "governable_from_start: {}", yes_no(r.governable_from_start));
    out
}

pub fn verdict_text(d: &Deontology, v: &Verdict) -> String {
    match v {
        Verdict::Verified => "Verified\n".to_string(),
        Verdict::Counterexample(c) => {
            let a = d.alphabet();
            let percepts: Vec<&str> = c.percepts().iter().map(|&p| a.percept_name(p)).collect();
            format!(
                "counterexample at cycle {}\nhistory: {}\naction: {}\npercept: {}\nreplay percepts: {}\n",
                c.violation_cycle(),
                c.history,
                a.action_name(c.action),
                a.percept_name(c.percept),
                percepts.join(" "),
            )
        }
    }
}

fn outcome_text(a: &Alphabet, o: &ProposalOutcome) -> String {
    match *o {
        ProposalOutcome::Approved(y) => format!("approved {}", a.action_name(y)),
        ProposalOutcome::Substituted { original, replacement } => {
            format!("substituted {} {}", a.action_name(original), a.action_name(replacement))
        }
        ProposalOutcome::Refused(r) => format!("refused {}", r.code()),
    }
}

fn config_text(cfg: &Option<GovernorConfig>) -> String {
    match cfg {
        None => "no".to_string(),
        Some(c) => {
            let mode = match c.mode {
                Mode::Strict => "strict",
                Mode::Permissive => "permissive",
            };
            if c.foresight {
                format!("{mode} foresight")
            } else {
                mode.to_string()
            }
        }
    }
}

fn seed_text(seed: Option<u64>) -> String {
    seed.map_or("-".to_string(), |s| s.to_string())
}

pub fn run_text(r: &RunRecord) -> String {
    let a = r.history.alphabet();
    let mut out = String::new();
    let _ = writeln!(out, "spec: {} {}", r.spec_name, r.spec_hash);
    let _ = writeln!(out, "policy: {} seed {}", r.policy, seed_text(r.policy_seed));
    let _ = writeln!(out, "env: {} seed {}", r.env, seed_text(r.env_seed));
    let _ = writeln!(out, "governed: {}", config_text(&r.config));
    let _ = writeln!(out, "cycles: {}/{}", r.cycles, r.requested_cycles);
    let first = r.first_violation_cycle.map_or("none".to_string(), |c| c.to_string());
    let _ = writeln!(out, "first_violation_cycle: {first}");
    let count = |c| r.classifications.iter().filter(|&&x| x == c).count();
    use deon_core::analysis::HistoryClass::*;
    let _ = writeln!(out, "GOOD {} AMENDABLE {} DEAD {}", count(Good), count(Amendable), count(Dead));
    for (i, e) in r.entries.iter().enumerate() {
        let _ = write!(out, "{:>5}", i + 1);
        match e.emitted {
            Some((y, x)) => {
                let _ = write!(out, " {} {} {}", a.action_name(y), a.percept_name(x), r.classifications[i]);
            }
            None => out.push_str(" -"),
        }
        if let Some(o) = &e.outcome {
            let _ = write!(out, " [{}]", outcome_text(a, o));
        }
        out.push('\n');
    }
    out
}

pub fn run_json(r: &RunRecord) -> Value {
    let a = r.history.alphabet();
    let entries: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            json!({
                "proposed": a.action_name(e.proposed),
                "outcome": e.outcome.as_ref().map(|o| outcome_text(a, o)),
                "action": e.emitted.map(|(y, _)| a.action_name(y)),
                "percept": e.emitted.map(|(_, x)| a.percept_name(x)),
            })
        })
        .collect();
    json!({
        "spec_name": r.spec_name,
        "spec_hash": r.spec_hash,
        "policy": r.policy,
        "policy_seed": r.policy_seed,
        "env": r.env,
        "env_seed": r.env_seed,
        "governed": r.governed,
        "config": config_text(&r.config),
        "requested_cycles": r.requested_cycles,
        "cycles": r.cycles,
        "history": r.history.render(),
        "entries": entries,
        "classifications": r.classifications.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
        "first_violation_cycle": r.first_violation_cycle,
    })
}

pub fn homunculus_text(r: &HomunculusReport) -> String {
    let first = r.outer_compliance_cycle.map_or("none".to_string(), |c| c.to_string());
    format!(
        "inner_history: {}\nouter_history: {}\ninner_compliance: {:.3}\nouter_compliance_cycle: {first}\n",
        r.inner_history, r.outer_history, r.inner_compliance
    )
}

pub fn homunculus_json(r: &HomunculusReport) -> Value {
    json!({
        "inner_history": r.inner_history.render(),
        "outer_history": r.outer_history.render(),
        "inner_compliance": r.inner_compliance,
        "outer_compliance_cycle": r.outer_compliance_cycle,
    })
}
