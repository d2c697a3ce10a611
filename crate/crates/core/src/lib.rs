//! Reproducing kernels of the reachable spaces of the boundary-controlled
//! heat equation on the unit rod and on the half line, the control-to-state
//! integral operators, and minimal-norm boundary control synthesis.
//!
//! The rod problem is
//!
//! ```text
//! ∂ₜw = ∂ₓₓw on (0,1) x (0,T),   w(0,t) = u_ℓ(t),   w(1,t) = u_r(t),   w(x,0) = 0,
//! ```
//!
//! whose final state is
//! `w(x,T) = -2 ∫ ∂ₓθ(x,T-τ) u_ℓ(τ) dτ + 2 ∫ ∂ₓθ(x-1,T-τ) u_r(τ) dτ`.
//! The set of reachable states extends analytically to the square `D` (one
//! control) or `Q` (two controls) and is a reproducing kernel Hilbert space
//! whose kernel is available in [`kernels`].
//!
//! Module map:
//!
//! - [`geometry`]: the planar domains and seeded point sampling
//! - [`heat`]: `∂ₓK`, `∂ₓθ`, `∂ₓθ̃` with certified truncation
//! - [`kernels`], [`gram`]: kernel evaluation, Gram matrices, PSD checks
//! - [`control`]: feature maps, forward operator, Crank–Nicolson oracle,
//!   representer synthesis
//! - [`cli`]: the job runner behind the `heat-rkhs` binary
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod control;
pub mod error;
pub mod geometry;
pub mod gram;
pub mod heat;
pub mod kernels;
pub mod quadrature;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{contains, sample_points, Region};
pub use gram::{gram, psd_check, GramMatrix, PsdReport};
pub use heat::{certified_tail_bound, eval_dxk, eval_dxtheta, Period, TimeParam, TruncationPolicy};
pub use kernels::{eval_k0, eval_kernel, KernelKind, KernelSpec};
pub use num_complex::Complex64;
