//! `∂ₓθ` and `∂ₓθ̃` with certified truncation: the window half-width the
//! tail bound asks for, and the functional equations the series satisfies.
//!
//!     cargo run --example theta_series

use heat_rkhs::heat::required_half_width;
use heat_rkhs::{certified_tail_bound, eval_dxtheta, Complex64, Period, Result, TimeParam, TruncationPolicy};

fn main() -> Result<()> {
    let policy = TruncationPolicy::default();
    println!("{:>8} {:>12} {:>14}", "t", "half-width", "tail bound");
    for t in [0.01, 0.1, 1.0, 10.0, 100.0] {
        let t = TimeParam::new(t)?;
        let n = required_half_width(t, Period::Two, &policy)?;
        println!("{:>8} {:>12} {:>14.3e}", t.get(), n, certified_tail_bound(t, Period::Two, n));
    }

    let t = TimeParam::new(0.7)?;
    let z = Complex64::new(0.3, 0.2);
    let base = eval_dxtheta(z, t, Period::Two, &policy)?;
    println!("\n∂ₓθ(z)      = {base:.15}");
    println!("∂ₓθ(z + 2)  = {:.15}", eval_dxtheta(z + 2.0, t, Period::Two, &policy)?);
    println!("-∂ₓθ(-z)    = {:.15}", -eval_dxtheta(-z, t, Period::Two, &policy)?);
    println!("∂ₓθ(1)      = {:.3e}", eval_dxtheta(Complex64::new(1.0, 0.0), t, Period::Two, &policy)?.norm());
    println!("∂ₓθ̃(1/2)    = {:.3e}", eval_dxtheta(Complex64::new(0.5, 0.0), t, Period::One, &policy)?.norm());
    Ok(())
}
