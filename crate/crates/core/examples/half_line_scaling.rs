//! Time scaling on the half line. The kernel obeys
//! `K^q(z,w;T) = T⁻¹ K^q(z/√T, w/√T; 1)`, and the state reached at horizon
//! `T` from `u(t)` equals the state at horizon 1, at `z/√T`, from `u(T t)`.
//!
//!     cargo run --release --example half_line_scaling

use heat_rkhs::control::{apply_operator, ControlSignal, Scenario};
use heat_rkhs::{Complex64, KernelKind, KernelSpec, Result, TimeParam};

fn main() -> Result<()> {
    let one = KernelSpec::with_default_truncation(KernelKind::HalfLineQ, TimeParam::new(1.0)?);
    let (z, w) = (Complex64::new(0.9, 0.3), Complex64::new(1.4, -0.2));
    println!("{:>5} {:>24} {:>24} {:>24}", "T", "K(z,w;T)", "K(ψz,ψw;1)/T", "T·K(ψz,ψw;1)");
    for t in [0.3, 2.0, 7.0] {
        let spec = KernelSpec::with_default_truncation(KernelKind::HalfLineQ, TimeParam::new(t)?);
        let r = t.sqrt();
        let base = one.eval(z / r, w / r)?;
        println!("{t:>5} {:>24.12} {:>24.12} {:>24.12}", spec.eval(z, w)?, base / t, base * t);
    }

    let profile = |s: f64| Complex64::new((3.0 * s).sin(), s);
    let t = 2.5;
    let u_t = ControlSignal::from_fn(TimeParam::new(t)?, 512, |s| profile(s / t))?;
    let u_1 = ControlSignal::from_fn(TimeParam::new(1.0)?, 512, profile)?;
    let pts = [Complex64::new(0.5, 0.1), Complex64::new(1.5, 0.0)];
    let scaled: Vec<Complex64> = pts.iter().map(|p| p / t.sqrt()).collect();
    let a = apply_operator(Scenario::HalfLine, &u_t, None, &pts)?;
    let b = apply_operator(Scenario::HalfLine, &u_1, None, &scaled)?;
    println!("\nstate deviation after rescaling: {:.2e}", a.max_deviation(&b));
    Ok(())
}
