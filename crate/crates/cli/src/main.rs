use clap::Parser;
use std::io::Write;

fn main() {
    let out = frontal_cli::run(frontal_cli::Cli::parse());
    if !out.stdout.is_empty() {
        // A closed pipe (`frontals catalog | head`) is not an error worth a panic.
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(out.stdout.as_bytes());
        if !out.stdout.ends_with('\n') {
            let _ = stdout.write_all(b"\n");
        }
        let _ = stdout.flush();
    }
    if let Some(e) = out.stderr {
        let _ = writeln!(std::io::stderr(), "{e}");
    }
    std::process::exit(out.code);
}
