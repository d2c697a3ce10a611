//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex-valued
//! integrands on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Kronrod-15 application: `(estimate, |K15 - G7|)`.
pub fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += pair * WGK[k];
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections below the initial interval.
    pub max_levels: usize,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-12, max_levels: 40, max_intervals: 20_000 }
    }
}

struct Piece {
    a: f64,
    b: f64,
    level: usize,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Bisects the interval with the largest error estimate until the summed
/// estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, opts: &QuadratureOptions) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, level: 0, value, error });
    let mut total = value;
    let mut total_err = error;

    loop {
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::QuadratureFailure { a, b, levels: 0 });
        }
        if total_err <= opts.abs_tol.max(opts.rel_tol * total.norm()) {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.level >= opts.max_levels || heap.len() + 2 > opts.max_intervals {
            return Err(Error::QuadratureFailure { a, b, levels: worst.level });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        heap.push(Piece { a: worst.a, b: mid, level: worst.level + 1, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, level: worst.level + 1, value: v2, error: e2 });
        if worst.error >= 0.5 * total_err {
            // the retired piece dominated the running sums; recompute them
            // rather than trust a difference of nearly equal numbers
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        } else {
            total += v1 + v2 - worst.value;
            total_err += e1 + e2 - worst.error;
        }
    }
    // re-sum to shed the drift of the running updates
    Ok(heap.iter().map(|p| p.value).sum())
}
