use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<_> = std::env::args_os().collect();
    let out = std::panic::catch_unwind(|| couplings_cli::run(args, &mut io::stdin().lock()))
        .unwrap_or_else(|_| couplings_cli::Execution {
            code: couplings_cli::EXIT_ERROR,
            stdout: String::new(),
            stderr: "error: internal failure\n".into(),
        });
    // Broken pipes are not worth a second error.
    let _ = io::stdout().write_all(out.stdout.as_bytes());
    let _ = io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
