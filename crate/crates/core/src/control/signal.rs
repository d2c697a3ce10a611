use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heat::TimeParam;

/// Boundary control sampled on the midpoint grid `t_k = (k + 1/2) T / M` and
/// read as piecewise constant on the cells `[kT/M, (k+1)T/M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSignal {
    pub t: TimeParam,
    pub samples: Vec<Complex64>,
}

impl ControlSignal {
    pub const MIN_SAMPLES: usize = 8;

    pub fn new(t: TimeParam, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < Self::MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "a control needs at least {} samples, got {}",
                Self::MIN_SAMPLES,
                samples.len()
            )));
        }
        if samples.iter().any(|u| !u.re.is_finite() || !u.im.is_finite()) {
            return Err(Error::InvalidParameter("control samples must be finite".into()));
        }
        Ok(Self { t, samples })
    }

    pub fn zeros(t: TimeParam, m: usize) -> Result<Self> {
        Self::new(t, vec![Complex64::new(0.0, 0.0); m])
    }

    /// Samples `f` at the midpoints.
    pub fn from_fn(t: TimeParam, m: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let h = t.get() / m as f64;
        Self::new(t, (0..m).map(|k| f((k as f64 + 0.5) * h)).collect())
    }

    pub fn from_real_fn(t: TimeParam, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(t, m, |s| Complex64::new(f(s), 0.0))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.t.get() / self.len() as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.len()).map(|k| (k as f64 + 0.5) * h).collect()
    }

    /// `√(T/M Σ |u_k|²)`
    pub fn l2_norm(&self) -> f64 {
        (self.step() * self.samples.iter().map(|u| u.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Piecewise-linear interpolation through the midpoint samples, extended
    /// linearly over the two end half-cells.
    pub fn value_at(&self, time: f64) -> Complex64 {
        let h = self.step();
        let m = self.len();
        let x = time / h - 0.5;
        let k = (x.floor().max(0.0) as usize).min(m - 2);
        let frac = x - k as f64;
        self.samples[k] * (1.0 - frac) + self.samples[k + 1] * frac
    }

    pub fn scaled(&self, factor: Complex64) -> ControlSignal {
        ControlSignal { t: self.t, samples: self.samples.iter().map(|u| u * factor).collect() }
    }

    /// Pointwise sum; both signals must share horizon and grid.
    pub fn try_add(&self, other: &ControlSignal) -> Result<ControlSignal> {
        self.check_compatible(other)?;
        Ok(ControlSignal {
            t: self.t,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
        })
    }

    pub(crate) fn check_compatible(&self, other: &ControlSignal) -> Result<()> {
        if self.t != other.t || self.len() != other.len() {
            return Err(Error::InvalidParameter(format!(
                "controls differ in horizon or grid: (T={}, M={}) vs (T={}, M={})",
                self.t.get(),
                self.len(),
                other.t.get(),
                other.len()
            )));
        }
        Ok(())
    }
}

/// Values of a state `w(·,T)` at a list of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateField {
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub t: TimeParam,
}

impl StateField {
    pub fn new(points: Vec<Complex64>, values: Vec<Complex64>, t: TimeParam) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        Ok(Self { points, values, t })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max_i |self_i - other_i|` over matching entries.
    pub fn max_deviation(&self, other: &StateField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(t: f64) -> TimeParam {
        TimeParam::new(t).unwrap()
    }

    #[test]
    fn grid_and_norm() {
        let u = ControlSignal::from_real_fn(tp(2.0), 8, |_| 3.0).unwrap();
        assert_eq!(u.grid()[0], 0.125);
        assert_eq!(u.grid()[7], 1.875);
        assert!((u.l2_norm() - 3.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_short_or_nonfinite() {
        assert!(ControlSignal::zeros(tp(1.0), 7).is_err());
        let mut s = vec![Complex64::new(0.0, 0.0); 8];
        s[3] = Complex64::new(f64::NAN, 0.0);
        assert!(ControlSignal::new(tp(1.0), s).is_err());
    }

    #[test]
    fn interpolation_reproduces_lines() {
        let u = ControlSignal::from_real_fn(tp(1.0), 10, |t| 2.0 * t - 1.0).unwrap();
        for t in [0.0, 0.03, 0.5, 0.97, 1.0] {
            assert!((u.value_at(t).re - (2.0 * t - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn incompatible_signals() {
        let a = ControlSignal::zeros(tp(1.0), 8).unwrap();
        let b = ControlSignal::zeros(tp(1.0), 9).unwrap();
        let c = ControlSignal::zeros(tp(2.0), 8).unwrap();
        assert!(a.try_add(&b).is_err());
        assert!(a.try_add(&c).is_err());
        assert!(a.try_add(&a).is_ok());
    }

    #[test]
    fn state_field_lengths() {
        assert!(StateField::new(vec![Complex64::new(0.5, 0.0)], vec![], tp(1.0)).is_err());
    }
}
