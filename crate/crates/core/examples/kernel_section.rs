//! Reproducing property: the synthesized norm of the kernel section
//! `K_ℓ(·, y₀)` approaches `K_ℓ(y₀, y₀)`, and kernel interpolation of the
//! section predicts it at unseen points, unlike a function with a pole near
//! the square.
//!
//!     cargo run --release --example kernel_section

use heat_rkhs::control::{membership_residual, min_norm_control, Lambda, Scenario, StateField};
use heat_rkhs::{Complex64, KernelKind, KernelSpec, Result, TimeParam};

fn grid(n: usize, a: f64, b: f64) -> Vec<Complex64> {
    (0..n).map(|i| Complex64::new(a + (b - a) * i as f64 / (n - 1) as f64, 0.0)).collect()
}

fn main() -> Result<()> {
    let t = TimeParam::new(1.0)?;
    let spec = KernelSpec::with_default_truncation(KernelKind::Left, t);
    let y0 = Complex64::new(0.6, 0.0);
    let diag = spec.eval(y0, y0)?.re;
    let section = |pts: &[Complex64]| -> Result<StateField> {
        let vals = pts.iter().map(|&p| spec.eval(p, y0)).collect::<Result<_>>()?;
        StateField::new(pts.to_vec(), vals, t)
    };

    println!("K(y0, y0) = {diag:.12}");
    for n in [8, 12, 16, 20, 24] {
        let r = min_norm_control(Scenario::LeftOnly, &section(&grid(n, 0.05, 0.95))?, Lambda::Auto, 512)?;
        println!("n = {n:>2}: ‖f‖² = {:.12}  rel. error {:.2e}", r.norm_estimate.powi(2), r.norm_estimate.powi(2) / diag - 1.0);
    }

    let fit = grid(10, 0.1, 0.9);
    let probes: Vec<Complex64> = grid(9, 0.15, 0.85);
    let kernel_case = membership_residual(Scenario::LeftOnly, &section(&fit)?, &section(&probes)?, Lambda::Auto)?;
    let pole = Complex64::new(-0.05, 0.0);
    let f = |pts: &[Complex64]| StateField::new(pts.to_vec(), pts.iter().map(|p| 1.0 / (p - pole)).collect(), t);
    let pole_case = membership_residual(Scenario::LeftOnly, &f(&fit)?, &f(&probes)?, Lambda::Auto)?;
    println!("\nprobe misfit, kernel section   {kernel_case:.3e}");
    println!("probe misfit, 1/(z + 0.05)     {pole_case:.3e}");
    Ok(())
}
