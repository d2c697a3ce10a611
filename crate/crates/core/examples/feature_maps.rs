//! Feature maps `h_z` of each control scenario, and the identity
//! `K(z,w) = ⟨h_w, h_z⟩` checked with the midpoint rule.
//!
//!     cargo run --release --example feature_maps

use heat_rkhs::control::{feature, feature_inner_product, Scenario};
use heat_rkhs::{sample_points, KernelSpec, Result, TimeParam};

fn main() -> Result<()> {
    let t = TimeParam::new(1.0)?;
    for s in Scenario::ALL {
        let pts = sample_points(s.domain(), 2, 0.1, 5)?;
        let (z, w) = (pts[0], pts[1]);
        let k = KernelSpec::with_default_truncation(s.kernel_kind(), t).eval(z, w)?;
        let q = feature_inner_product(s, z, w, t, 4096)?;
        let h = feature(s, z, t, 0.9)?;
        println!(
            "{:<10} h_z(0.9) = {:.6}   K = {:.10}   ⟨h_w,h_z⟩ = {:.10}   |diff| = {:.1e}",
            s.name(),
            h.first,
            k,
            q,
            (k - q).norm()
        );
    }
    Ok(())
}
