use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{contains, Region};
use crate::heat::{eval_dxk, eval_dxtheta, Period, TimeParam, TruncationPolicy};
use crate::kernels::{KernelKind, ADMISSIBLE_MARGIN};
use crate::sum::CompensatedSum;

/// Which ends of the rod are driven, and how.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// `u_r = 0`
    #[serde(rename = "left")]
    LeftOnly,
    /// `u_ℓ = 0`
    #[serde(rename = "right")]
    RightOnly,
    /// `u_r = -u_ℓ`
    AntiSym,
    /// `u_r = u_ℓ`
    Sym,
    /// independent `u_ℓ`, `u_r`
    Both,
    /// half line `x > 0` driven at `x = 0`
    HalfLine,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::LeftOnly,
        Scenario::RightOnly,
        Scenario::AntiSym,
        Scenario::Sym,
        Scenario::Both,
        Scenario::HalfLine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::LeftOnly => "left",
            Scenario::RightOnly => "right",
            Scenario::AntiSym => "anti-sym",
            Scenario::Sym => "sym",
            Scenario::Both => "both",
            Scenario::HalfLine => "half-line",
        }
    }

    /// Reproducing kernel of the scenario's reachable space.
    pub fn kernel_kind(self) -> KernelKind {
        match self {
            Scenario::LeftOnly => KernelKind::Left,
            Scenario::RightOnly => KernelKind::Right,
            Scenario::AntiSym => KernelKind::Plus,
            Scenario::Sym => KernelKind::Minus,
            Scenario::Both => KernelKind::Full,
            Scenario::HalfLine => KernelKind::HalfLineQ,
        }
    }

    pub fn domain(self) -> Region {
        self.kernel_kind().domain()
    }

    /// `s` in `⟨u, h_z⟩ = s · w(z,T)`.
    pub fn operator_sign(self) -> f64 {
        match self {
            Scenario::RightOnly => 0.5,
            _ => -0.5,
        }
    }

    /// Number of independent controls.
    pub fn channels(self) -> usize {
        match self {
            Scenario::Both => 2,
            _ => 1,
        }
    }

    pub(crate) fn check_point(self, z: Complex64) -> Result<()> {
        let domain = self.domain();
        if contains(domain, z, ADMISSIBLE_MARGIN) {
            Ok(())
        } else {
            Err(Error::Domain { point: z, domain: domain.name() })
        }
    }

    /// Kernel factor `κ(z,s)`, i.e. the conjugate of the feature at time
    /// `T - s`: the state is `(1/sign) Σ_c ∫ u_c(τ) κ_c(z, T-τ) dτ`.
    pub(crate) fn kernel_factor(self, z: Complex64, s: f64, policy: &TruncationPolicy) -> Result<Feature> {
        let t = TimeParam::new(s)?;
        let theta = |p: Complex64| eval_dxtheta(p, t, Period::Two, policy);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Ok(match self {
            Scenario::LeftOnly => Feature::single(theta(z)?),
            Scenario::RightOnly => Feature::single(theta(z + one)?),
            Scenario::AntiSym => Feature::single(eval_dxtheta(z, t, Period::One, policy)?),
            Scenario::Sym => Feature::single(theta(z)? - theta(z + one)?),
            Scenario::Both => Feature { first: theta(z)?, second: zero - theta(z + one)? },
            Scenario::HalfLine => Feature::single(eval_dxk(z, t)),
        })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scenario `{s}`")))
    }
}

/// Feature value per control channel. Single-control scenarios use `first`
/// only and keep `second` at zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Feature {
    pub first: Complex64,
    pub second: Complex64,
}

impl Feature {
    pub fn single(v: Complex64) -> Self {
        Self { first: v, second: Complex64::new(0.0, 0.0) }
    }

    pub fn conj(self) -> Self {
        Self { first: self.first.conj(), second: self.second.conj() }
    }

    /// `Σ_c self_c · conj(other_c)`
    pub fn dot(self, other: Feature) -> Complex64 {
        self.first * other.first.conj() + self.second * other.second.conj()
    }
}

/// Feature map `h_z(t)` of `scenario` at horizon `horizon`, `0 < t < T`.
///
/// | scenario   | `h_z(t)`                                        |
/// |------------|-------------------------------------------------|
/// | `left`     | `conj ∂ₓθ(z, T-t)`                              |
/// | `right`    | `conj ∂ₓθ(z+1, T-t)`                            |
/// | `anti-sym` | `conj ∂ₓθ̃(z, T-t)`                              |
/// | `sym`      | `conj ∂ₓθ(z, T-t) - conj ∂ₓθ(z+1, T-t)`         |
/// | `both`     | `(conj ∂ₓθ(z, T-t), -conj ∂ₓθ(z+1, T-t))`       |
/// | `half-line`| `conj ∂ₓK(z, T-t)`                              |
pub fn feature(scenario: Scenario, z: Complex64, horizon: TimeParam, t: f64) -> Result<Feature> {
    feature_with_policy(scenario, z, horizon, t, &TruncationPolicy::default())
}

pub(crate) fn feature_with_policy(
    scenario: Scenario,
    z: Complex64,
    horizon: TimeParam,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<Feature> {
    if !(t > 0.0 && t < horizon.get()) {
        return Err(Error::InvalidParameter(format!(
            "feature time {t} must lie strictly inside (0, {})",
            horizon.get()
        )));
    }
    scenario.check_point(z)?;
    Ok(scenario.kernel_factor(z, horizon.get() - t, policy)?.conj())
}

/// `⟨h_w, h_z⟩` by the `m`-point midpoint rule on `(0,T)`.
pub fn feature_inner_product(
    scenario: Scenario,
    z: Complex64,
    w: Complex64,
    horizon: TimeParam,
    m: usize,
) -> Result<Complex64> {
    let h = horizon.get() / m as f64;
    let mut acc = CompensatedSum::new();
    for k in 0..m {
        let t = (k as f64 + 0.5) * h;
        let hz = feature(scenario, z, horizon, t)?;
        let hw = feature(scenario, w, horizon, t)?;
        acc.add(hw.dot(hz));
    }
    Ok(acc.value() * h)
}
