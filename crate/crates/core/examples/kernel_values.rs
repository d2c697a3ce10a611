//! Evaluates every kernel at a few admissible points and checks the sector
//! kernel against quadrature of its defining time integral.
//!
//!     cargo run --example kernel_values

use heat_rkhs::quadrature::{integrate, QuadratureOptions};
use heat_rkhs::{sample_points, Complex64, KernelKind, KernelSpec, Result, TimeParam};

fn main() -> Result<()> {
    let t = TimeParam::new(1.0)?;
    for kind in KernelKind::ALL {
        let spec = KernelSpec::with_default_truncation(kind, t);
        let pts = sample_points(kind.domain(), 2, 0.1, 3)?;
        let k = spec.eval(pts[0], pts[1])?;
        let n = spec.half_width()?.map_or("closed form".to_string(), |n| format!("half-width {n}"));
        println!("{:<18} K({:.3}, {:.3}) = {:.12}  [{n}]", kind.name(), pts[0], pts[1], k);
    }

    // K₀(z,w;T) = (z w̄ / 16π) ∫₀ᵀ s⁻³ exp(-(z² + w̄²)/4s) ds
    let (z, w) = (Complex64::new(0.8, 0.3), Complex64::new(1.1, -0.4));
    let a = z * z + w.conj() * w.conj();
    let opts = QuadratureOptions { abs_tol: 0.0, ..Default::default() };
    let integral = integrate(|s| if s > 0.0 { (-a / (4.0 * s)).exp() / s.powi(3) } else { 0.0.into() }, 0.0, 1.0, &opts)?;
    let by_quadrature = z * w.conj() / (16.0 * std::f64::consts::PI) * integral;
    let closed = KernelSpec::with_default_truncation(KernelKind::K0, t).eval(z, w)?;
    println!("\nK0 closed form  {closed:.15}\nK0 quadrature   {by_quadrature:.15}");
    Ok(())
}
