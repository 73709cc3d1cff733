//! Loading specs, automaton dumps and transducers from disk.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use deon_core::deontology::{CompileWarning, DUMP_HEADER};
use deon_core::transducer::PolicyTransducer;
use deon_core::{compile_with, fixtures, parse_spec, Alphabet, CompileOptions, Deontology};

/// A compiled deontology with the name it was loaded under.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub name: String,
    pub deontology: Arc<Deontology>,
    pub warnings: Vec<CompileWarning>,
}

/// Anything that maps to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

/// Compiles spec text, or loads it directly when it is an automaton dump.
pub fn compile_text(text: &str, options: &CompileOptions) -> Result<(Deontology, Vec<CompileWarning>), String> {
    if text.trim_start().starts_with(DUMP_HEADER) {
        return Deontology::load(text).map(|d| (d, Vec::new())).map_err(|e| e.to_string());
    }
    let doc = parse_spec(text).map_err(|e| e.to_string())?;
    let compiled = compile_with(&doc, options).map_err(|e| e.to_string())?;
    Ok((compiled.deontology, compiled.warnings))
}

/// Reads `arg` as a file; if no such file exists, as a built-in fixture name
/// such as `ng` or `SPEC_GUESS`.
pub fn load_spec(arg: &str, options: &CompileOptions) -> Result<Loaded, InputError> {
    let path = Path::new(arg);
    let (name, text) = if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| InputError(format!("{arg}: {e}")))?;
        let stem = path.file_stem().map_or(arg.to_string(), |s| s.to_string_lossy().into_owned());
        (stem, text)
    } else if let Some(text) = fixtures::by_name(arg) {
        let upper = arg.to_ascii_uppercase();
        let name = if upper.starts_with("SPEC_") { upper } else { format!("SPEC_{upper}") };
        (name, text.to_string())
    } else {
        return Err(InputError(format!("{arg}: no such file or built-in spec")));
    };
    let (deontology, warnings) = compile_text(&text, options).map_err(|e| InputError(format!("{arg}: {e}")))?;
    Ok(Loaded { name, deontology: Arc::new(deontology), warnings })
}

pub fn load_transducer(path: &str, alphabet: Arc<Alphabet>) -> Result<PolicyTransducer, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))?;
    PolicyTransducer::parse(&text, alphabet).map_err(|e| InputError(format!("{path}: {e}")))
}
