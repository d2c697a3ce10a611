//! Runs the self-check suite and prints one row per check.
//!
//!     cargo run --release --example verify_suite -- 2.0

use heat_rkhs::verify::{run_suite, VerifyOptions};
use heat_rkhs::TimeParam;

fn main() -> heat_rkhs::Result<()> {
    let t: f64 = std::env::args().nth(1).map_or(Ok(1.0), |a| a.parse()).unwrap_or(1.0);
    let opts = VerifyOptions { t: TimeParam::new(t)?, ..Default::default() };
    for row in run_suite(&opts) {
        let verdict = if row.passed { "pass" } else { "FAIL" };
        println!("{:<30} {:>11.3e} ≤ {:<9.1e} {verdict}", row.name, row.defect, row.tolerance);
    }
    Ok(())
}
