//! Final state of the rod driven from both ends, from the kernel integral
//! representation and from an independent Crank–Nicolson solve.
//!
//!     cargo run --release --example forward_solve

use std::f64::consts::PI;

use heat_rkhs::control::{apply_operator, fd_oracle, ControlSignal, Scenario};
use heat_rkhs::{Complex64, Result, TimeParam};

fn main() -> Result<()> {
    let t = TimeParam::new(1.0)?;
    let left = ControlSignal::from_real_fn(t, 4096, |s| (PI * s).sin())?;
    let right = ControlSignal::from_real_fn(t, 4096, |s| s * (1.0 - s))?;
    let xs: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let pts: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(x, 0.0)).collect();

    let kernel = apply_operator(Scenario::Both, &left, Some(&right), &pts)?;
    let fd = fd_oracle(&left, &right, 400, 8000, &xs)?;
    println!("{:>5} {:>16} {:>16} {:>10}", "x", "kernel", "crank-nicolson", "diff");
    for ((x, k), f) in xs.iter().zip(&kernel.values).zip(&fd.values) {
        let (a, b) = (k.re, f.re);
        println!("{x:>5} {a:>16.10} {b:>16.10} {:>10.2e}", (a - b).abs());
    }

    // the state extends analytically into the square Q
    let z = Complex64::new(0.4, 0.2);
    let w = apply_operator(Scenario::Both, &left, Some(&right), &[z])?;
    println!("\nw({z}, T) = {:.10}", w.values[0]);
    Ok(())
}
