use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut stdout = io::stdout();
    let mut stderr = io::stderr();
    let code = deon::run(std::env::args_os(), &mut input, &mut stdout, &mut stderr);
    let _ = stdout.flush();
    ExitCode::from(code)
}
