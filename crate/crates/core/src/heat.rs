//! Heat-kernel derivative `∂ₓK(z,t) = -z / (4√π t^{3/2}) · exp(-z²/4t)` and its
//! periodizations
//!
//! ```text
//! ∂ₓθ(z,t) = Σₙ ∂ₓK(z + 2n, t)      (period 2, odd, fundamental cell D)
//! ∂ₓθ̃(z,t) = Σₙ ∂ₓK(z + n, t)       (period 1, odd, fundamental cell Q)
//! ```
//!
//! Both series are summed over the window `n ∈ [-N-1, N]`, which is symmetric
//! about the centre `P/2` of the fundamental cell. For `z` in the closed cell
//! every omitted term satisfies
//!
//! ```text
//! |∂ₓK(z + P n, t)| ≤ P (j+1) / (4√π t^{3/2}) · exp(-P² j² / 4t),   j ≥ N + 1,
//! ```
//!
//! where `j` is the distance of `n` from the window centre. Summing the
//! majorant with a geometric bound gives [`certified_tail_bound`], and the
//! half-width is the smallest `N ≥ 3` whose bound is below the requested
//! tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::reduce_to_cell;
use crate::sum::CompensatedSum;

/// Below `exp(-EXP_UNDERFLOW)` an `f64` is zero.
pub(crate) const EXP_UNDERFLOW: f64 = 745.2;

/// Strictly positive, finite diffusive time.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TimeParam(f64);

impl TimeParam {
    pub fn new(t: f64) -> Result<Self> {
        if t > 0.0 && t.is_finite() {
            Ok(Self(t))
        } else {
            Err(Error::InvalidParameter(format!("time must be positive and finite, got {t}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TimeParam {
    type Error = Error;
    fn try_from(t: f64) -> Result<Self> {
        TimeParam::new(t)
    }
}

impl From<TimeParam> for f64 {
    fn from(t: TimeParam) -> f64 {
        t.0
    }
}

/// Absolute tail budget and hard cap on the series half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub tol: f64,
    pub max_half_width: usize,
}

impl TruncationPolicy {
    pub const MIN_TOL: f64 = 1e-15;
    pub const MAX_HALF_WIDTH: usize = 10_000;

    pub fn new(tol: f64, max_half_width: usize) -> Result<Self> {
        if !(tol >= Self::MIN_TOL) || !tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "truncation tolerance must be finite and at least {:e}, got {tol}",
                Self::MIN_TOL
            )));
        }
        if !(3..=Self::MAX_HALF_WIDTH).contains(&max_half_width) {
            return Err(Error::InvalidParameter(format!(
                "max_half_width must lie in [3, {}], got {max_half_width}",
                Self::MAX_HALF_WIDTH
            )));
        }
        Ok(Self { tol, max_half_width })
    }

    pub fn with_tol(tol: f64) -> Result<Self> {
        Self::new(tol, Self::MAX_HALF_WIDTH)
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { tol: 1e-12, max_half_width: Self::MAX_HALF_WIDTH }
    }
}

/// Period of the theta-type series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Period {
    /// `∂ₓθ`, shifts `2n`, fundamental cell `D`.
    Two,
    /// `∂ₓθ̃`, shifts `n`, fundamental cell `Q`.
    One,
}

impl Period {
    #[inline]
    pub fn length(self) -> f64 {
        match self {
            Period::Two => 2.0,
            Period::One => 1.0,
        }
    }
}

/// `exp(-z² / 4t)` with the modulus and phase split so that no intermediate
/// overflows; returns zero once the modulus is below the `f64` range.
#[inline]
pub(crate) fn gaussian(z: Complex64, t: f64) -> Complex64 {
    let z2 = z * z;
    let log_mod = -z2.re / (4.0 * t);
    if log_mod < -EXP_UNDERFLOW {
        return Complex64::new(0.0, 0.0);
    }
    let (s, c) = (-z2.im / (4.0 * t)).sin_cos();
    log_mod.exp() * Complex64::new(c, s)
}

/// Analytic continuation of `∂ₓK(x,t)` to complex `z`. Entire in `z`.
#[inline]
pub fn eval_dxk(z: Complex64, t: TimeParam) -> Complex64 {
    dxk(z, t.get())
}

#[inline]
pub(crate) fn dxk(z: Complex64, t: f64) -> Complex64 {
    let g = gaussian(z, t);
    if g.re == 0.0 && g.im == 0.0 {
        return g;
    }
    -z * g / (4.0 * PI.sqrt() * t * t.sqrt())
}

/// Upper bound on `Σ_{j ≥ first} (j+1) exp(-alpha j²)` from
/// `j² ≥ first² + 2·first·(j - first)`.
pub(crate) fn gaussian_tail_majorant(alpha: f64, first: usize) -> f64 {
    let j = first as f64;
    let lead = (-alpha * j * j).exp();
    if lead == 0.0 {
        return 0.0;
    }
    let q = (-2.0 * alpha * j).exp();
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let one_minus_q = 1.0 - q;
    lead * ((j + 1.0) / one_minus_q + q / (one_minus_q * one_minus_q))
}

/// Upper bound, uniform over the closed fundamental cell, on the modulus of
/// the terms of `∂ₓθ` (or `∂ₓθ̃`) left out by the window of half-width
/// `half_width`.
///
/// Never smaller than the smallest positive normal `f64`, so that it stays a
/// valid bound when the majorant itself underflows.
pub fn certified_tail_bound(t: TimeParam, period: Period, half_width: usize) -> f64 {
    let t = t.get();
    let p = period.length();
    let alpha = p * p / (4.0 * t);
    let prefactor = 2.0 * p / (4.0 * PI.sqrt() * t * t.sqrt());
    let bound = prefactor * gaussian_tail_majorant(alpha, half_width + 1);
    bound.max(f64::MIN_POSITIVE)
}

/// Finds the smallest `N ≥ 3` with `bound(N) < tol`, starting the search from
/// `initial` and moving in whichever direction is needed.
pub(crate) fn smallest_certified_width(
    initial: usize,
    cap: usize,
    tol: f64,
    bound: impl Fn(usize) -> f64,
) -> Result<usize> {
    let mut n = initial.max(3);
    if bound(n) < tol {
        while n > 3 && bound(n - 1) < tol {
            n -= 1;
        }
        if n > cap {
            return Err(Error::TruncationFailure { required: n, cap });
        }
        return Ok(n);
    }
    while bound(n) >= tol {
        n += 1;
        if n > cap {
            // report how far the bound would have to go
            let mut required = n;
            while required < 64 * cap && bound(required) >= tol {
                required *= 2;
            }
            return Err(Error::TruncationFailure { required, cap });
        }
    }
    Ok(n)
}

/// Initial half-width guess `max(3, ⌈√(4t ln(C/tol))⌉ + 2)` with `C` the
/// majorant constant `1 / (√π t^{3/2})`.
fn initial_half_width(t: f64, tol: f64) -> usize {
    let c = 1.0 / (PI.sqrt() * t * t.sqrt());
    let log_ratio = (c / tol).ln();
    if log_ratio <= 0.0 {
        return 3;
    }
    let guess = (4.0 * t * log_ratio).sqrt().ceil() + 2.0;
    if guess > TruncationPolicy::MAX_HALF_WIDTH as f64 {
        TruncationPolicy::MAX_HALF_WIDTH
    } else {
        (guess as usize).max(3)
    }
}

/// Half-width whose certified tail is below `policy.tol`.
pub fn required_half_width(t: TimeParam, period: Period, policy: &TruncationPolicy) -> Result<usize> {
    smallest_certified_width(initial_half_width(t.get(), policy.tol), policy.max_half_width, policy.tol, |n| {
        certified_tail_bound(t, period, n)
    })
}

/// Translates `z` into the closed fundamental cell of `period`, or fails if it
/// is not in the closure of the periodized domain.
fn reduce_for_series(z: Complex64, period: Period, domain: &'static str) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain { point: z, domain });
    }
    let p = period.length();
    let r = reduce_to_cell(z, p);
    let slack = 1e-12 * p;
    if r.im.abs() <= r.re.min(p - r.re) + slack {
        Ok(r)
    } else {
        Err(Error::Domain { point: z, domain })
    }
}

/// `∂ₓθ` or `∂ₓθ̃` summed over a window of the given half-width.
pub fn eval_dxtheta_with_half_width(
    z: Complex64,
    t: TimeParam,
    period: Period,
    half_width: usize,
) -> Result<Complex64> {
    let domain = match period {
        Period::Two => "closure of the periodized square D",
        Period::One => "closure of the periodized square Q",
    };
    let r = reduce_for_series(z, period, domain)?;
    Ok(dxtheta_reduced(r, t.get(), period.length(), half_width))
}

/// Sum over `n ∈ [-N-1, N]` of `∂ₓK(r + P n, t)`, smallest terms first.
#[inline]
pub(crate) fn dxtheta_reduced(r: Complex64, t: f64, p: f64, half_width: usize) -> Complex64 {
    let mut acc = CompensatedSum::new();
    for j in (0..=half_width).rev() {
        let up = j as f64;
        let down = -(j as f64) - 1.0;
        acc.add(dxk(r + p * up, t));
        acc.add(dxk(r + p * down, t));
    }
    acc.value()
}

/// Certified evaluation of `∂ₓθ` (period two) or `∂ₓθ̃` (period one).
///
/// Points outside the fundamental cell are first translated into it. The
/// result differs from the full series by less than `policy.tol`.
pub fn eval_dxtheta(z: Complex64, t: TimeParam, period: Period, policy: &TruncationPolicy) -> Result<Complex64> {
    let n = required_half_width(t, period, policy)?;
    eval_dxtheta_with_half_width(z, t, period, n)
}

/// Evaluator with the half-width resolved once, for repeated use at fixed
/// `(t, period, policy)`.
#[derive(Debug, Clone, Copy)]
pub struct ThetaSeries {
    t: f64,
    period: Period,
    half_width: usize,
}

impl ThetaSeries {
    pub fn new(t: TimeParam, period: Period, policy: &TruncationPolicy) -> Result<Self> {
        Ok(Self { t: t.get(), period, half_width: required_half_width(t, period, policy)? })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let r = reduce_for_series(z, self.period, "closure of the periodized fundamental cell")?;
        Ok(dxtheta_reduced(r, self.t, self.period.length(), self.half_width))
    }
}
