use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::feature::{Feature, Scenario};
use super::signal::{ControlSignal, StateField};
use crate::error::{Error, Result};
use crate::heat::{TimeParam, TruncationPolicy};
use crate::quadrature::{integrate, QuadratureOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorOptions {
    pub truncation: TruncationPolicy,
    /// Per-cell integration of the kernel factor.
    pub quadrature: QuadratureOptions,
}

impl Default for OperatorOptions {
    fn default() -> Self {
        Self {
            truncation: TruncationPolicy::default(),
            quadrature: QuadratureOptions { abs_tol: 1e-14, rel_tol: 1e-11, max_levels: 30, max_intervals: 2_000 },
        }
    }
}

/// `∫_cell κ(z, T-τ) dτ` for every cell of an `m`-point grid on `(0,T)`.
///
/// The control is piecewise constant, so these weights are exact up to the
/// quadrature tolerance; the steep layer of `κ` as `τ → T` is resolved by
/// the adaptive integrator rather than by the control grid.
fn cell_weights(scenario: Scenario, z: Complex64, t: TimeParam, m: usize, opts: &OperatorOptions) -> Result<Vec<Feature>> {
    scenario.check_point(z)?;
    let horizon = t.get();
    let h = horizon / m as f64;
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        // integrate in s = T - τ over [T-(k+1)h, T-kh]; the upper end of the
        // last cell must stay strictly positive
        let hi = horizon - k as f64 * h;
        let lo = (horizon - (k + 1) as f64 * h).max(0.0);
        let mut failure = None;
        let mut channel = |pick: fn(Feature) -> Complex64| {
            integrate(
                |s| {
                    if s <= 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    match scenario.kernel_factor(z, s, &opts.truncation) {
                        Ok(f) => pick(f),
                        Err(e) => {
                            failure.get_or_insert(e);
                            Complex64::new(0.0, 0.0)
                        }
                    }
                },
                lo,
                hi,
                &opts.quadrature,
            )
        };
        let first = channel(|f| f.first)?;
        let second = if scenario.channels() == 2 { channel(|f| f.second)? } else { Complex64::new(0.0, 0.0) };
        if let Some(e) = failure {
            return Err(e);
        }
        out.push(Feature { first, second });
    }
    Ok(out)
}

/// Final state `w(z,T)` driven by piecewise-constant boundary controls.
///
/// Only [`Scenario::Both`] reads `secondary` (missing means zero); every other
/// scenario derives the right control from the left one.
pub fn apply_operator(
    scenario: Scenario,
    primary: &ControlSignal,
    secondary: Option<&ControlSignal>,
    points: &[Complex64],
) -> Result<StateField> {
    apply_operator_with(scenario, primary, secondary, points, &OperatorOptions::default())
}

pub fn apply_operator_with(
    scenario: Scenario,
    primary: &ControlSignal,
    secondary: Option<&ControlSignal>,
    points: &[Complex64],
    opts: &OperatorOptions,
) -> Result<StateField> {
    let secondary = match (scenario, secondary) {
        (Scenario::Both, Some(s)) => {
            primary.check_compatible(s)?;
            Some(s)
        }
        _ => None,
    };
    let inv_sign = 1.0 / scenario.operator_sign();
    let values = points
        .par_iter()
        .map(|&z| {
            let weights = cell_weights(scenario, z, primary.t, primary.len(), opts)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, w) in weights.iter().enumerate() {
                acc += w.first * primary.samples[k];
                if let Some(s) = secondary {
                    acc += w.second * s.samples[k];
                }
            }
            Ok(acc * inv_sign)
        })
        .collect::<Result<Vec<_>>>()?;
    StateField::new(points.to_vec(), values, primary.t)
}

/// Matrix `A` with `w(z_i,T) = Σ_k A[i][k] u_k`. For [`Scenario::Both`] the
/// columns are the `m` left samples followed by the `m` right samples.
pub fn collocation_matrix(scenario: Scenario, points: &[Complex64], t: TimeParam, m: usize) -> Result<DMatrix<Complex64>> {
    if m < ControlSignal::MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!("grid of {m} cells is too coarse")));
    }
    let opts = OperatorOptions::default();
    let inv_sign = 1.0 / scenario.operator_sign();
    let rows = points
        .par_iter()
        .map(|&z| cell_weights(scenario, z, t, m, &opts))
        .collect::<Result<Vec<_>>>()?;
    let cols = m * scenario.channels();
    Ok(DMatrix::from_fn(points.len(), cols, |i, c| {
        let w = rows[i][c % m];
        inv_sign * if c < m { w.first } else { w.second }
    }))
}
