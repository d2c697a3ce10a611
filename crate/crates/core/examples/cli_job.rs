//! Drives the job runner from code, the same way the `heat-rkhs` binary does
//! from a `--config` file.
//!
//!     cargo run --example cli_job

use heat_rkhs::cli::{run, Command, JobConfig};
use heat_rkhs::KernelKind;

fn main() {
    let cfg = JobConfig {
        command: Some(Command::KernelEval),
        kind: KernelKind::Plus,
        points: 4,
        seed: 7,
        ..JobConfig::default()
    };
    println!("{}", serde_json::to_string(&cfg).expect("serializable"));
    match run(&cfg, &mut std::io::stdout()) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
