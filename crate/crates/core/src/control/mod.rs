//! Boundary controls, the control-to-state operators and their kernels.
//!
//! Every scenario writes the final state as `w(z,T) = ⟨u, h_z⟩ / s` for a
//! feature map `h_z ∈ L²(0,T)` (or `L²(0,T)²` when both ends are driven) and a
//! sign factor `s`. The Gram matrix of the features is the reproducing kernel
//! of the scenario, which is what makes representer synthesis possible.

mod fd;
mod feature;
mod operator;
mod signal;
mod synthesis;

pub use fd::{fd_oracle, CN_STARTUP_STEPS};
pub use feature::{feature, feature_inner_product, Feature, Scenario};
pub use operator::{apply_operator, collocation_matrix, OperatorOptions};
pub use signal::{ControlSignal, StateField};
pub use synthesis::{membership_residual, min_norm_control, Lambda, SynthesisResult};
