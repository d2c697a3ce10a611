//! Gram matrices of the reachable-space kernels on random points, with their
//! smallest eigenvalue relative to the trace.
//!
//!     cargo run --example gram_psd

use heat_rkhs::{gram, psd_check, sample_points, KernelKind, KernelSpec, Result, TimeParam};

fn main() -> Result<()> {
    let kinds = [
        KernelKind::Left,
        KernelKind::Right,
        KernelKind::Plus,
        KernelKind::Minus,
        KernelKind::Full,
        KernelKind::HalfLineQ,
    ];
    println!("{:<10} {:>6} {:>14} {:>14}  psd", "kind", "T", "λ_min", "trace");
    for kind in kinds {
        let pts = sample_points(kind.domain(), 15, 0.05, 11)?;
        for t in [0.25, 1.0, 4.0] {
            let g = gram(&KernelSpec::with_default_truncation(kind, TimeParam::new(t)?), &pts)?;
            let r = psd_check(&g, 1e-10);
            println!("{:<10} {:>6} {:>14.3e} {:>14.6} {}", kind.name(), t, r.min_eigenvalue, r.trace, r.passes);
        }
    }
    Ok(())
}
