//! Planar domains: the squares `D` and `Q`, the sector `Δ = {|arg z| < π/4}`,
//! the right half-plane, and the periodized unions of `D` and `Q`.
//!
//! Every region is open. A positive `margin` shrinks the region by that
//! Euclidean distance from its boundary, which for the polygonal pieces
//! amounts to offsetting each defining inequality `|y| < x`, `|y| < c - x`
//! by `margin * √2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Rejection-sampling attempts allowed per requested point.
const MAX_ATTEMPTS_PER_POINT: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// `D = {|y| < x, |y| < 2 - x}`
    SquareD,
    /// `Q = {|y| < x, |y| < 1 - x}`
    SquareQ,
    /// `Δ = {|arg z| < π/4}`
    #[serde(rename = "sector")]
    SectorDelta,
    /// `{Re z > 0}`
    #[serde(rename = "half-plane")]
    HalfPlanePlus,
    /// `⋃ (2n + D)`
    PeriodizedD,
    /// `⋃ (n + Q)`
    PeriodizedQ,
    /// `-1 + D`
    ShiftedD,
}

impl Region {
    pub const ALL: [Region; 7] = [
        Region::SquareD,
        Region::SquareQ,
        Region::SectorDelta,
        Region::HalfPlanePlus,
        Region::PeriodizedD,
        Region::PeriodizedQ,
        Region::ShiftedD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::SquareD => "square-d",
            Region::SquareQ => "square-q",
            Region::SectorDelta => "sector",
            Region::HalfPlanePlus => "half-plane",
            Region::PeriodizedD => "periodized-d",
            Region::PeriodizedQ => "periodized-q",
            Region::ShiftedD => "shifted-d",
        }
    }

    /// Box `[x0, x1] x [y0, y1]` used for rejection sampling. Unbounded regions
    /// are sampled inside a fixed window; periodized ones inside their
    /// fundamental cell.
    pub fn sampling_window(self) -> (f64, f64, f64, f64) {
        match self {
            Region::SquareD | Region::PeriodizedD => (0.0, 2.0, -1.0, 1.0),
            Region::SquareQ | Region::PeriodizedQ => (0.0, 1.0, -0.5, 0.5),
            Region::ShiftedD => (-1.0, 1.0, -1.0, 1.0),
            Region::SectorDelta | Region::HalfPlanePlus => (0.0, 2.0, -2.0, 2.0),
        }
    }

    /// Supremum of the margins for which the shrunk region meets the sampling
    /// window.
    fn max_margin(self) -> f64 {
        match self {
            Region::SquareD | Region::PeriodizedD | Region::ShiftedD => SQRT_2 / 2.0,
            Region::SquareQ | Region::PeriodizedQ => SQRT_2 / 4.0,
            Region::SectorDelta => SQRT_2,
            Region::HalfPlanePlus => 2.0,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Region::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown region `{s}`")))
    }
}

/// Returns `re - period * floor(re / period)`, i.e. the translate of `p` whose
/// real part lies in `[0, period)`.
pub fn reduce_to_cell(p: Complex64, period: f64) -> Complex64 {
    let shift = (p.re / period).floor();
    Complex64::new(p.re - period * shift, p.im)
}

/// Open square `{|y| < x, |y| < width - x}` shrunk by `margin`.
fn in_square(p: Complex64, width: f64, margin: f64) -> bool {
    let offset = margin * SQRT_2;
    let ay = p.im.abs();
    p.re - ay > offset && width - p.re - ay > offset
}

/// Membership of `p` in `region` shrunk by the Euclidean distance `margin`.
///
/// Non-finite points are never contained.
pub fn contains(region: Region, p: Complex64, margin: f64) -> bool {
    debug_assert!(margin >= 0.0);
    if !p.re.is_finite() || !p.im.is_finite() {
        return false;
    }
    match region {
        Region::SquareD => in_square(p, 2.0, margin),
        Region::SquareQ => in_square(p, 1.0, margin),
        Region::SectorDelta => p.re - p.im.abs() > margin * SQRT_2,
        Region::HalfPlanePlus => p.re > margin,
        Region::PeriodizedD => in_square(reduce_to_cell(p, 2.0), 2.0, margin),
        Region::PeriodizedQ => in_square(reduce_to_cell(p, 1.0), 1.0, margin),
        Region::ShiftedD => in_square(p + 1.0, 2.0, margin),
    }
}

/// Seeded rejection sampling of `count` distinct points of `region` shrunk by
/// `margin`.
pub fn sample_points(region: Region, count: usize, margin: f64, seed: u64) -> Result<Vec<Complex64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if !(margin > 0.0) || !margin.is_finite() {
        return Err(Error::InvalidParameter(format!("sampling margin must be positive, got {margin}")));
    }
    if margin >= region.max_margin() {
        return Err(Error::Sampling(format!(
            "{region} shrunk by {margin} is empty (largest admissible margin {:.6})",
            region.max_margin()
        )));
    }

    let (x0, x1, y0, y1) = region.sampling_window();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Complex64> = Vec::with_capacity(count);
    let cap = MAX_ATTEMPTS_PER_POINT.saturating_mul(count);
    let mut attempts = 0usize;
    while points.len() < count {
        if attempts >= cap {
            return Err(Error::Sampling(format!(
                "rejection sampling in {region} gave up after {attempts} attempts"
            )));
        }
        attempts += 1;
        let p = Complex64::new(rng.gen_range(x0..x1), rng.gen_range(y0..y1));
        if contains(region, p, margin) && !points.contains(&p) {
            points.push(p);
        }
    }
    Ok(points)
}
