//! Round trip: a state produced by a known control is handed to the
//! minimal-norm synthesis, whose control reaches the same state with no more
//! energy.
//!
//!     cargo run --release --example min_norm_synthesis

use heat_rkhs::control::{apply_operator, min_norm_control, ControlSignal, Lambda, Scenario};
use heat_rkhs::{Complex64, Result, TimeParam};

fn main() -> Result<()> {
    let t = TimeParam::new(1.0)?;
    let m = 16_384;
    let u_star = ControlSignal::from_real_fn(t, m, |s| s * s * (1.0 - s))?;
    let pts: Vec<Complex64> = (0..12).map(|i| Complex64::new(0.05 + 0.9 * i as f64 / 11.0, 0.0)).collect();
    let target = apply_operator(Scenario::LeftOnly, &u_star, None, &pts)?;

    let r = min_norm_control(Scenario::LeftOnly, &target, Lambda::Auto, m)?;
    println!("lambda               {:.3e}", r.lambda);
    println!("relative residual    {:.3e}", r.residual / target.max_abs());
    println!("‖u*‖                 {:.10}", u_star.l2_norm());
    println!("‖u_rec‖              {:.10}", r.control_norm);
    println!("RKHS norm of target  {:.10}", r.norm_estimate);
    for k in (0..m).step_by(m / 8) {
        println!("  u_rec({:.4}) = {:>12.6}   u*(t) = {:>10.6}", r.control.grid()[k], r.control.samples[k].re, u_star.samples[k].re);
    }
    Ok(())
}
