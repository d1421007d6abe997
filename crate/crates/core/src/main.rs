use std::io::Write;

use centroid_lab::cli::{run, CAP_ENV};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let env_cap = std::env::var(CAP_ENV).ok();
    let result = run(&argv, &mut std::io::stdin().lock(), env_cap.as_deref());
    std::io::stdout().write_all(result.stdout.as_bytes()).ok();
    std::io::stderr().write_all(result.stderr.as_bytes()).ok();
    std::process::exit(result.exit_code);
}
