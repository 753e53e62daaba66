//! Rewrites problem documents in canonical form.
//!
//! ```text
//! cargo run -p pivotal-core --example canonicalize -- fixtures/*.dproblem.json
//! ```

use std::{env, fs, process::ExitCode};

fn main() -> ExitCode {
    let mut status = ExitCode::SUCCESS;
    for path in env::args().skip(1) {
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{path}: {e}");
                status = ExitCode::FAILURE;
                continue;
            }
        };
        match pivotal_core::parse_problem(&text) {
            Ok(problem) => {
                if let Err(e) = fs::write(&path, pivotal_core::serialize_problem(&problem)) {
                    eprintln!("{path}: {e}");
                    status = ExitCode::FAILURE;
                }
            }
            Err(e) => {
                eprintln!("{path}: skipped ({e})");
            }
        }
    }
    status
}
