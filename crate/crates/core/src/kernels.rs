//! Reproducing kernels of the reachable spaces.
//!
//! The building block is the sector kernel
//!
//! ```text
//! K₀(z,w;T) = (z w̄ / π) exp(-(z² + w̄²)/4T) [ 1/(z² + w̄²)² + 1/(4T (z² + w̄²)) ]
//! ```
//!
//! which equals `∫₀ᵀ ∂ₓK(z,s) conj(∂ₓK(w,s)) ds`. Periodizing it in both
//! arguments gives the kernels of the one- and two-control problems on the rod:
//!
//! | kind      | definition                                              | domain   |
//! |-----------|---------------------------------------------------------|----------|
//! | `Left`    | `Σ K₀(z+2n, w+2m)`                                      | `D`      |
//! | `Right`   | `Σ K₀(z+2n+1, w+2m+1)`                                  | `-1 + D` |
//! | `Plus`    | `Σ K₀(z+n, w+m)`                                        | `Q`      |
//! | `Minus`   | `Left(z,w) + Left(z+1,w+1) - Left(z+1,w) - Left(z,w+1)` | `Q`      |
//! | `Full`    | `Left(z,w) + Left(z+1,w+1)`                             | `Q`      |
//!
//! The double series are summed over the square window `n, m ∈ [-N-1, N]` in
//! shells of decreasing distance from the cell centre with compensated
//! accumulation. The half-width comes from a bound on the omitted shells that
//! uses `|z² + w̄²| ≥ Re z² + Re w²`, see [`series_tail_bound`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{contains, Region};
use crate::heat::{gaussian, gaussian_tail_majorant, smallest_certified_width, TimeParam, TruncationPolicy};
use crate::sum::CompensatedSum;

/// Points closer than this to the boundary of the admissible domain are rejected.
pub const ADMISSIBLE_MARGIN: f64 = 1e-6;

/// Moduli of `z² + w̄²` (or `z + w̄`) below this are treated as a pole.
pub const POLE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    #[serde(rename = "k0")]
    K0,
    #[serde(rename = "left")]
    Left,
    #[serde(rename = "right")]
    Right,
    #[serde(rename = "plus")]
    Plus,
    #[serde(rename = "minus")]
    Minus,
    #[serde(rename = "full")]
    Full,
    #[serde(rename = "half-line")]
    HalfLineQ,
    #[serde(rename = "bergman-sector")]
    BergmanSector,
    #[serde(rename = "hardy-pullback")]
    HardyPullback,
    #[serde(rename = "bergman-halfplane")]
    BergmanHalfPlane,
}

impl KernelKind {
    pub const ALL: [KernelKind; 10] = [
        KernelKind::K0,
        KernelKind::Left,
        KernelKind::Right,
        KernelKind::Plus,
        KernelKind::Minus,
        KernelKind::Full,
        KernelKind::HalfLineQ,
        KernelKind::BergmanSector,
        KernelKind::HardyPullback,
        KernelKind::BergmanHalfPlane,
    ];

    pub const SERIES: [KernelKind; 5] =
        [KernelKind::Left, KernelKind::Right, KernelKind::Plus, KernelKind::Minus, KernelKind::Full];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::K0 => "k0",
            KernelKind::Left => "left",
            KernelKind::Right => "right",
            KernelKind::Plus => "plus",
            KernelKind::Minus => "minus",
            KernelKind::Full => "full",
            KernelKind::HalfLineQ => "half-line",
            KernelKind::BergmanSector => "bergman-sector",
            KernelKind::HardyPullback => "hardy-pullback",
            KernelKind::BergmanHalfPlane => "bergman-halfplane",
        }
    }

    /// Open set on which the kernel is evaluated.
    pub fn domain(self) -> Region {
        match self {
            KernelKind::K0 | KernelKind::HalfLineQ | KernelKind::BergmanSector | KernelKind::HardyPullback => {
                Region::SectorDelta
            }
            KernelKind::Left => Region::SquareD,
            KernelKind::Right => Region::ShiftedD,
            KernelKind::Plus | KernelKind::Minus | KernelKind::Full => Region::SquareQ,
            KernelKind::BergmanHalfPlane => Region::HalfPlanePlus,
        }
    }

    pub fn is_series(self) -> bool {
        KernelKind::SERIES.contains(&self)
    }

    /// Number of `Left`-type double series a kind is assembled from.
    fn components(self) -> usize {
        match self {
            KernelKind::Minus => 4,
            KernelKind::Full => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown kernel kind `{s}`")))
    }
}

/// Which kernel, at which horizon, truncated how.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub t: TimeParam,
    pub truncation: TruncationPolicy,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, t: TimeParam, truncation: TruncationPolicy) -> Self {
        Self { kind, t, truncation }
    }

    pub fn with_default_truncation(kind: KernelKind, t: TimeParam) -> Self {
        Self::new(kind, t, TruncationPolicy::default())
    }

    /// Half-width used for every double series this kind is made of, chosen
    /// so that the total omitted tail is below `truncation.tol`. `None` for
    /// closed-form kinds.
    pub fn half_width(&self) -> Result<Option<usize>> {
        if !self.kind.is_series() {
            return Ok(None);
        }
        let period = if self.kind == KernelKind::Plus { 1.0 } else { 2.0 };
        let budget = self.truncation.tol / self.kind.components() as f64;
        let t = self.t;
        smallest_certified_width(3, self.truncation.max_half_width, budget, |n| series_tail_bound(t, period, n))
            .map(Some)
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let n = self.half_width()?;
        self.eval_checked(z, w, n)
    }

    /// Evaluates a series kind with an explicit half-width (ignored by the
    /// closed-form kinds).
    pub fn eval_with_half_width(&self, z: Complex64, w: Complex64, half_width: usize) -> Result<Complex64> {
        self.eval_checked(z, w, Some(half_width))
    }

    fn eval_checked(&self, z: Complex64, w: Complex64, half_width: Option<usize>) -> Result<Complex64> {
        let domain = self.kind.domain();
        for p in [z, w] {
            if !contains(domain, p, ADMISSIBLE_MARGIN) {
                return Err(Error::Domain { point: p, domain: domain.name() });
            }
        }
        let t = self.t.get();
        let one = Complex64::new(1.0, 0.0);
        let left = |a: Complex64, b: Complex64| double_series(a, b, t, 2.0, half_width.unwrap_or(3), false);
        Ok(match self.kind {
            KernelKind::K0 | KernelKind::HalfLineQ => {
                let s = checked_sum_of_squares(z, w)?;
                if self.kind == KernelKind::K0 {
                    k0_from_sum(z, w, s, t)
                } else {
                    half_line_closed_form(z, w, s, t)
                }
            }
            KernelKind::Left => left(z, w),
            KernelKind::Right => left(z + one, w + one),
            KernelKind::Plus => double_series(z, w, t, 1.0, half_width.unwrap_or(3), false),
            KernelKind::Minus => left(z, w) + left(z + one, w + one) - left(z + one, w) - left(z, w + one),
            KernelKind::Full => left(z, w) + left(z + one, w + one),
            KernelKind::BergmanSector => {
                let s = checked_sum_of_squares(z, w)?;
                4.0 * z * w.conj() / (s * s)
            }
            KernelKind::HardyPullback => 1.0 / checked_sum_of_squares(z, w)?,
            KernelKind::BergmanHalfPlane => {
                let s = z + w.conj();
                if s.norm() < POLE_GUARD {
                    return Err(Error::PoleProximity { modulus: s.norm() });
                }
                1.0 / (s * s)
            }
        })
    }
}

/// `eval_kernel(spec, z, w)`; same as [`KernelSpec::eval`].
pub fn eval_kernel(spec: &KernelSpec, z: Complex64, w: Complex64) -> Result<Complex64> {
    spec.eval(z, w)
}

fn checked_sum_of_squares(z: Complex64, w: Complex64) -> Result<Complex64> {
    let s = z * z + w.conj() * w.conj();
    if s.norm() < POLE_GUARD {
        return Err(Error::PoleProximity { modulus: s.norm() });
    }
    Ok(s)
}

#[inline]
fn k0_from_sum(z: Complex64, w: Complex64, s: Complex64, t: f64) -> Complex64 {
    let e = gaussian(z, t) * gaussian(w, t).conj();
    z * w.conj() / PI * e * (1.0 / (s * s) + 1.0 / (4.0 * t * s))
}

/// `(1/4π) e^{-z²/4T} e^{-w̄²/4T} [4 z w̄ / (z²+w̄²)² + z w̄ / (T (z²+w̄²))]`
fn half_line_closed_form(z: Complex64, w: Complex64, s: Complex64, t: f64) -> Complex64 {
    let zw = z * w.conj();
    let e = gaussian(z, t) * gaussian(w, t).conj();
    e / (4.0 * PI) * (4.0 * zw / (s * s) + zw / (t * s))
}

/// Closed-form `K₀(z,w;T)` on the sector.
pub fn eval_k0(z: Complex64, w: Complex64, t: TimeParam) -> Result<Complex64> {
    KernelSpec::with_default_truncation(KernelKind::K0, t).eval(z, w)
}

/// Upper bound on the double-series terms with `max(j_z, j_w) > half_width`,
/// uniform over both arguments in the closed fundamental cell of width
/// `period`.
///
/// With `j` the distance of a shift from the window centre, the shifted point
/// `a` satisfies `|a| ≤ P (j+1)` and `Re a² ≥ P² j²`; together with
/// `|a² + b̄²| ≥ Re a² + Re b² ≥ P² J²` on the omitted shells this bounds every
/// omitted term by a product of one-dimensional Gaussian majorants.
pub fn series_tail_bound(t: TimeParam, period: f64, half_width: usize) -> f64 {
    let t = t.get();
    let first = half_width + 1;
    let alpha = period * period / (4.0 * t);
    let tail = gaussian_tail_majorant(alpha, first);
    if tail == 0.0 {
        return f64::MIN_POSITIVE;
    }
    let head: f64 = (0..first).map(|j| (j as f64 + 1.0) * (-alpha * (j * j) as f64).exp()).sum();
    let d = period * period * (first * first) as f64;
    let rational = 1.0 / (d * d) + 1.0 / (4.0 * t * d);
    // 4 sign patterns of (n, m) per (j_z, j_w); 2 for the choice of the far index
    let bound = 4.0 * period * period / PI * rational * 2.0 * tail * (head + tail);
    bound.max(f64::MIN_POSITIVE)
}

/// `Σ_{n,m ∈ [-N-1, N]} (±1)^{n+m} K₀(z + P n, w + P m; T)` with `z`, `w` in the
/// closed cell of width `P`.
pub(crate) fn double_series(
    z: Complex64,
    w: Complex64,
    t: f64,
    period: f64,
    half_width: usize,
    alternating: bool,
) -> Complex64 {
    // index 2j is the shift n = j, index 2j + 1 is n = -j - 1
    let len = 2 * (half_width + 1);
    let shifts: Vec<f64> = (0..len)
        .map(|i| if i % 2 == 0 { (i / 2) as f64 } else { -((i / 2) as f64) - 1.0 })
        .collect();
    let prep = |p: Complex64, conjugate: bool| -> Vec<(Complex64, Complex64, Complex64)> {
        shifts
            .iter()
            .map(|&n| {
                let a = p + period * n;
                let (a, g) = if conjugate { (a.conj(), gaussian(a, t).conj()) } else { (a, gaussian(a, t)) };
                (a, a * a, g)
            })
            .collect()
    };
    let zs = prep(z, false);
    let ws = prep(w, true);
    let sign = |i: usize| -> f64 {
        if alternating && shifts[i].rem_euclid(2.0) == 1.0 {
            -1.0
        } else {
            1.0
        }
    };

    let term = |i: usize, k: usize| -> Complex64 {
        let (a, a2, ga) = zs[i];
        let (b, b2, gb) = ws[k];
        let e = ga * gb;
        if e.re == 0.0 && e.im == 0.0 {
            return e;
        }
        let s = a2 + b2;
        sign(i) * sign(k) * a * b / PI * e * (1.0 / (s * s) + 1.0 / (4.0 * t * s))
    };

    let mut acc = CompensatedSum::new();
    for level in (0..=half_width).rev() {
        let outer = [2 * level, 2 * level + 1];
        for &i in &outer {
            for k in 0..2 * (level + 1) {
                acc.add(term(i, k));
            }
        }
        for &k in &outer {
            for i in 0..2 * level {
                acc.add(term(i, k));
            }
        }
    }
    acc.value()
}

/// `K₋` summed directly as `Σ (-1)^{n+m} K₀(z+n, w+m)` over unit shifts,
/// independent of the four-term `Left` combination used by [`KernelSpec::eval`].
pub fn eval_minus_direct(z: Complex64, w: Complex64, t: TimeParam, policy: &TruncationPolicy) -> Result<Complex64> {
    for p in [z, w] {
        if !contains(Region::SquareQ, p, ADMISSIBLE_MARGIN) {
            return Err(Error::Domain { point: p, domain: Region::SquareQ.name() });
        }
    }
    let n = smallest_certified_width(3, policy.max_half_width, policy.tol, |n| series_tail_bound(t, 1.0, n))?;
    Ok(double_series(z, w, t.get(), 1.0, n, true))
}

/// `K₊` assembled from four shifted `Left` kernels,
/// `Left(z,w) + Left(z+1,w+1) + Left(z+1,w) + Left(z,w+1)`.
pub fn eval_plus_four_term(z: Complex64, w: Complex64, t: TimeParam, policy: &TruncationPolicy) -> Result<Complex64> {
    for p in [z, w] {
        if !contains(Region::SquareQ, p, ADMISSIBLE_MARGIN) {
            return Err(Error::Domain { point: p, domain: Region::SquareQ.name() });
        }
    }
    let n = smallest_certified_width(3, policy.max_half_width, policy.tol / 4.0, |n| series_tail_bound(t, 2.0, n))?;
    let one = Complex64::new(1.0, 0.0);
    let left = |a, b| double_series(a, b, t.get(), 2.0, n, false);
    Ok(left(z, w) + left(z + one, w + one) + left(z + one, w) + left(z, w + one))
}
