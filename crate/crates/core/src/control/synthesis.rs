use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::feature::{feature, Scenario};
use super::operator::apply_operator;
use super::signal::{ControlSignal, StateField};
use crate::error::{Error, Result};
use crate::gram::gram;
use crate::kernels::KernelSpec;

/// Tikhonov parameter for `(G + λI) c = s·f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lambda {
    /// `1e-10 · trace(G) / n`, raised tenfold (at most six times) until the
    /// Cholesky factorization succeeds.
    Auto,
    Fixed(f64),
    /// Largest `λ` whose collocation misfit `max |λ (G+λI)⁻¹ f|` stays at
    /// the given noise level.
    Discrepancy { noise: f64 },
}

impl Lambda {
    const ESCALATIONS: usize = 6;
    const AUTO_SCALE: f64 = 1e-10;
}

impl std::str::FromStr for Lambda {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Lambda::Auto);
        }
        if let Some(noise) = s.strip_prefix("discrepancy:") {
            let noise: f64 = noise
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad noise level in `{s}`")))?;
            return Ok(Lambda::Discrepancy { noise });
        }
        s.parse::<f64>()
            .map(Lambda::Fixed)
            .map_err(|_| Error::InvalidParameter(format!("lambda must be `auto`, `discrepancy:<noise>` or a number, got `{s}`")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisResult {
    /// Representer weights `c_j`.
    pub coefficients: Vec<Complex64>,
    /// Left control (the only one unless the scenario is [`Scenario::Both`]).
    pub control: ControlSignal,
    pub control_right: Option<ControlSignal>,
    /// `max_i |w(z_i,T) - f_i|` with `w` re-solved from the sampled control.
    pub residual: f64,
    /// `√(f* (G+λI)⁻¹ f)`, the kernel-space norm of the target.
    pub norm_estimate: f64,
    /// `L²` norm of the sampled control(s).
    pub control_norm: f64,
    pub lambda: f64,
}

struct Factored {
    chol: Cholesky<Complex64, Dyn>,
    lambda: f64,
}

fn shifted(g: &DMatrix<Complex64>, lambda: f64) -> DMatrix<Complex64> {
    let mut a = g.clone();
    for i in 0..a.nrows() {
        a[(i, i)] += Complex64::new(lambda, 0.0);
    }
    a
}

fn factor_escalating(g: &DMatrix<Complex64>, start: f64, floor: f64) -> Result<Factored> {
    let mut lambda = start;
    for attempt in 0..=Lambda::ESCALATIONS {
        if let Some(chol) = Cholesky::new(shifted(g, lambda)) {
            return Ok(Factored { chol, lambda });
        }
        if attempt < Lambda::ESCALATIONS {
            lambda = (lambda * 10.0).max(floor);
        }
    }
    Err(Error::IllConditioned { lambda })
}

fn misfit(f: &Factored, rhs: &DVector<Complex64>) -> f64 {
    (f.chol.solve(rhs) * Complex64::new(f.lambda, 0.0)).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn factor(g: &DMatrix<Complex64>, lambda: Lambda, rhs: &DVector<Complex64>) -> Result<Factored> {
    let n = g.nrows().max(1) as f64;
    let trace: f64 = g.diagonal().iter().map(|d| d.re).sum();
    let auto = (Lambda::AUTO_SCALE * trace / n).max(f64::MIN_POSITIVE);
    match lambda {
        Lambda::Auto => factor_escalating(g, auto, auto),
        Lambda::Fixed(l) if l >= 0.0 && l.is_finite() => factor_escalating(g, l, auto),
        Lambda::Fixed(l) => Err(Error::InvalidParameter(format!("lambda = {l} must be finite and ≥ 0"))),
        Lambda::Discrepancy { noise } if noise > 0.0 && noise.is_finite() => {
            let lo = factor_escalating(g, auto, auto)?;
            if misfit(&lo, rhs) >= noise {
                return Ok(lo);
            }
            let hi_lambda = 1e3 * trace.max(f64::MIN_POSITIVE);
            let hi = factor_escalating(g, hi_lambda, auto)?;
            if misfit(&hi, rhs) <= noise {
                return Ok(hi);
            }
            // misfit grows monotonically with λ; bisect on log λ
            let (mut a, mut b) = (lo.lambda.ln(), hi.lambda.ln());
            let mut best = lo;
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                let trial = factor_escalating(g, mid.exp(), auto)?;
                if misfit(&trial, rhs) <= noise {
                    a = trial.lambda.ln().max(mid);
                    best = trial;
                } else {
                    b = mid;
                }
                if b - a < 1e-6 {
                    break;
                }
            }
            Ok(best)
        }
        Lambda::Discrepancy { noise } => {
            Err(Error::InvalidParameter(format!("noise level {noise} must be finite and > 0")))
        }
    }
}

fn check_distinct(points: &[Complex64]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if points[..i].contains(p) {
            return Err(Error::InvalidParameter(format!("collocation point {p} appears twice")));
        }
    }
    Ok(())
}

/// Minimal-norm control reaching `target` at its points, via the representer
/// `u = Σ_j c_j h_{z_j}` sampled on an `m`-cell midpoint grid.
pub fn min_norm_control(scenario: Scenario, target: &StateField, lambda: Lambda, m: usize) -> Result<SynthesisResult> {
    if target.is_empty() {
        return Err(Error::InvalidParameter("target has no points".into()));
    }
    check_distinct(&target.points)?;
    let t = target.t;
    let sign = scenario.operator_sign();
    let spec = KernelSpec::with_default_truncation(scenario.kernel_kind(), t);
    let g = gram(&spec, &target.points)?;
    let f = DVector::from_column_slice(&target.values);
    let fac = factor(&g.entries, lambda, &f)?;
    let c = fac.chol.solve(&(&f * Complex64::new(sign, 0.0)));

    let zero = ControlSignal::zeros(t, m)?;
    let grid = zero.grid();
    let mut left = Vec::with_capacity(m);
    let mut right = Vec::with_capacity(m);
    for &s in &grid {
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for (j, &z) in target.points.iter().enumerate() {
            let h = feature(scenario, z, t, s)?;
            a += c[j] * h.first;
            b += c[j] * h.second;
        }
        left.push(a);
        right.push(b);
    }
    let control = ControlSignal::new(t, left)?;
    let control_right = (scenario.channels() == 2).then(|| ControlSignal::new(t, right)).transpose()?;

    let reached = apply_operator(scenario, &control, control_right.as_ref(), &target.points)?;
    let residual = reached.max_deviation(target);
    let quad: Complex64 = f.iter().zip(c.iter()).map(|(fi, ci)| fi.conj() * ci).sum::<Complex64>() / sign;
    let norm_estimate = quad.re.max(0.0).sqrt();
    let control_norm = control.l2_norm().hypot(control_right.as_ref().map_or(0.0, |u| u.l2_norm()));

    Ok(SynthesisResult {
        coefficients: c.iter().copied().collect(),
        control,
        control_right,
        residual,
        norm_estimate,
        control_norm,
        lambda: fac.lambda,
    })
}

/// Fits the kernel interpolant `Σ_j c_j K(·, z_j)` to `fit` and returns its
/// largest deviation from the values supplied in `probes`.
pub fn membership_residual(scenario: Scenario, fit: &StateField, probes: &StateField, lambda: Lambda) -> Result<f64> {
    if fit.is_empty() {
        return Err(Error::InvalidParameter("no fit points".into()));
    }
    if fit.t != probes.t {
        return Err(Error::InvalidParameter("fit and probe fields have different horizons".into()));
    }
    check_distinct(&fit.points)?;
    if let Some(p) = probes.points.iter().find(|p| fit.points.contains(p)) {
        return Err(Error::InvalidParameter(format!("probe point {p} is also a fit point")));
    }
    let spec = KernelSpec::with_default_truncation(scenario.kernel_kind(), fit.t);
    let g = gram(&spec, &fit.points)?;
    let f = DVector::from_column_slice(&fit.values);
    let fac = factor(&g.entries, lambda, &f)?;
    let c = fac.chol.solve(&f);
    let mut worst: f64 = 0.0;
    for (p, v) in probes.points.iter().zip(&probes.values) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &z) in fit.points.iter().enumerate() {
            acc += c[j] * spec.eval(*p, z)?;
        }
        worst = worst.max((acc - v).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::TimeParam;

    fn tp(t: f64) -> TimeParam {
        TimeParam::new(t).unwrap()
    }

    fn reals(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn zero_target() {
        let pts = reals(&[0.2, 0.5, 0.8]);
        let target = StateField::new(pts, vec![Complex64::new(0.0, 0.0); 3], tp(1.0)).unwrap();
        let r = min_norm_control(Scenario::LeftOnly, &target, Lambda::Auto, 64).unwrap();
        assert!(r.coefficients.iter().all(|c| c.norm() == 0.0));
        assert_eq!(r.control.l2_norm(), 0.0);
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.norm_estimate, 0.0);
    }

    #[test]
    fn rejects_duplicates_and_bad_lambda() {
        let pts = reals(&[0.2, 0.2]);
        let target = StateField::new(pts, vec![Complex64::new(1.0, 0.0); 2], tp(1.0)).unwrap();
        assert!(min_norm_control(Scenario::LeftOnly, &target, Lambda::Auto, 64).is_err());
        let target = StateField::new(reals(&[0.3]), vec![Complex64::new(1.0, 0.0)], tp(1.0)).unwrap();
        assert!(min_norm_control(Scenario::LeftOnly, &target, Lambda::Fixed(-1.0), 64).is_err());
    }

    #[test]
    fn single_point_reaches_target() {
        let target = StateField::new(reals(&[0.3]), vec![Complex64::new(0.7, 0.0)], tp(1.0)).unwrap();
        for s in [Scenario::LeftOnly, Scenario::RightOnly, Scenario::Sym, Scenario::Both] {
            let r = min_norm_control(s, &target, Lambda::Auto, 8192).unwrap();
            assert!(r.residual < 1e-5, "{s}: {}", r.residual);
            // single constraint: ‖u‖ = |s|·‖f‖_K
            assert!((r.control_norm - 0.5 * r.norm_estimate).abs() < 1e-4 * r.control_norm, "{s}");
        }
    }

    #[test]
    fn lambda_parsing() {
        assert_eq!("auto".parse::<Lambda>().unwrap(), Lambda::Auto);
        assert_eq!("1e-8".parse::<Lambda>().unwrap(), Lambda::Fixed(1e-8));
        assert_eq!("discrepancy:0.01".parse::<Lambda>().unwrap(), Lambda::Discrepancy { noise: 0.01 });
        assert!("often".parse::<Lambda>().is_err());
    }

    #[test]
    fn discrepancy_matches_noise_level() {
        let pts = reals(&[0.2, 0.4, 0.6, 0.8]);
        let vals = pts.iter().map(|x| Complex64::new((3.0 * x.re).sin(), 0.0)).collect();
        let target = StateField::new(pts, vals, tp(1.0)).unwrap();
        let spec = KernelSpec::with_default_truncation(Scenario::LeftOnly.kernel_kind(), tp(1.0));
        let g = gram(&spec, &target.points).unwrap();
        let f = DVector::from_column_slice(&target.values);
        let fac = factor(&g.entries, Lambda::Discrepancy { noise: 1e-3 }, &f).unwrap();
        let m = misfit(&fac, &f);
        assert!(m <= 1e-3 && m > 0.9e-3, "{m}");
    }
}
