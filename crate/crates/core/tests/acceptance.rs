//! The twelve acceptance criteria, one line each. Runs without the libtest
//! harness so that passing lines are printed too; the process fails if any
//! criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::{c, k0_by_quadrature, k0_double_window, rel, theta_window};
use heat_rkhs::control::{
    apply_operator, fd_oracle, feature, min_norm_control, ControlSignal, Lambda, Scenario, StateField,
};
use heat_rkhs::kernels::{eval_minus_direct, eval_plus_four_term};
use heat_rkhs::{
    eval_dxtheta, eval_k0, eval_kernel, sample_points, Complex64, KernelKind, KernelSpec, Period, Region, TimeParam,
    TruncationPolicy,
};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Outcome;

struct Outcome {
    measured: f64,
    tolerance: f64,
    note: String,
}

impl Outcome {
    fn at_most(measured: f64, tolerance: f64) -> Self {
        Self { measured, tolerance, note: String::new() }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.note = s.into();
        self
    }

    fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

fn tp(t: f64) -> TimeParam {
    TimeParam::new(t).unwrap()
}

fn spec(kind: KernelKind, t: f64) -> KernelSpec {
    KernelSpec::with_default_truncation(kind, tp(t))
}

fn pairs(region: Region, count: usize, margin: f64, seed: u64) -> Vec<(Complex64, Complex64)> {
    let zs = sample_points(region, count, margin, seed).unwrap();
    let ws = sample_points(region, count, margin, seed + 1000).unwrap();
    zs.into_iter().zip(ws).collect()
}

fn k0_integral_identity() -> Outcome {
    let mut worst = 0.0f64;
    for (i, t) in [0.25, 1.0, 4.0].into_iter().enumerate() {
        for (z, w) in pairs(Region::SectorDelta, 50, 0.05, 11 + i as u64) {
            let closed = eval_k0(z, w, tp(t)).unwrap();
            worst = worst.max(rel(closed, k0_by_quadrature(z, w, t)));
        }
    }
    Outcome::at_most(worst, 1e-8).note("150 pairs, max relative error")
}

fn half_line_equals_k0() -> Outcome {
    let mut worst = 0.0f64;
    for t in [0.25, 1.0, 4.0] {
        for (z, w) in pairs(Region::SectorDelta, 50, 0.05, 21) {
            let q = eval_kernel(&spec(KernelKind::HalfLineQ, t), z, w).unwrap();
            worst = worst.max(rel(q, eval_k0(z, w, tp(t)).unwrap()));
        }
    }
    Outcome::at_most(worst, 1e-12).note("50 pairs x 3 horizons")
}

fn half_line_scaling_law() -> Outcome {
    let mut worst = 0.0f64;
    for t in [0.3, 2.0, 7.0] {
        let root = f64::sqrt(t);
        for (z, w) in pairs(Region::SectorDelta, 20, 0.05, 31) {
            let lhs = eval_kernel(&spec(KernelKind::HalfLineQ, t), z, w).unwrap();
            let scaled = eval_kernel(&spec(KernelKind::HalfLineQ, 1.0), z / root, w / root).unwrap();
            worst = worst.max(rel(t * scaled, lhs));
        }
    }
    Outcome::at_most(worst, 1e-12).note("K^q(z,w;T) vs T*K^q(z/sqrt T, w/sqrt T; 1)")
}

fn bergman_pullback() -> Outcome {
    let mut worst = 0.0f64;
    for (z, w) in pairs(Region::SectorDelta, 50, 0.05, 41) {
        let sector = eval_kernel(&spec(KernelKind::BergmanSector, 1.0), z, w).unwrap();
        let plane = eval_kernel(&spec(KernelKind::BergmanHalfPlane, 1.0), z * z, w * w).unwrap();
        worst = worst.max(rel(plane * (2.0 * z) * (2.0 * w).conj(), sector));
    }
    Outcome::at_most(worst, 1e-14).note("50 pairs, relative")
}

fn functional_equations() -> Outcome {
    let tol = 1e-12;
    let policy = TruncationPolicy::with_tol(tol).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let zs = sample_points(Region::SquareD, 30, 0.02, 51).unwrap();
    let mut worst_ratio = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for z in zs {
        let t = rng.gen_range(0.05..4.0);
        let f = |p| eval_dxtheta(p, tp(t), Period::Two, &policy).unwrap();
        let fz = f(z);
        worst_ratio = worst_ratio.max((f(z + 2.0) - fz).norm() / (2.0 * tol));
        worst_ratio = worst_ratio.max((fz + f(-z)).norm() / (2.0 * tol));
        worst_oracle = worst_oracle.max((fz - theta_window(z, t, 2.0, 60)).norm());
    }
    for t in [0.1, 0.5, 1.0, 2.0] {
        let one = eval_dxtheta(c(1.0, 0.0), tp(t), Period::Two, &policy).unwrap();
        let half = eval_dxtheta(c(0.5, 0.0), tp(t), Period::One, &policy).unwrap();
        worst_ratio = worst_ratio.max(one.norm() / tol).max(half.norm() / tol);
    }
    Outcome::at_most(worst_ratio, 1.0)
        .note(format!("defect/allowance over 30 (z,t) and the zeros; wide-window oracle diff {worst_oracle:.1e}"))
}

fn four_term_identities() -> Outcome {
    let policy = TruncationPolicy::default();
    let mut worst = 0.0f64;
    for t in [0.25, 1.0, 4.0] {
        let time = tp(t);
        for (z, w) in pairs(Region::SquareQ, 20, 0.05, 61) {
            let one = c(1.0, 0.0);
            let plus_series = eval_kernel(&spec(KernelKind::Plus, t), z, w).unwrap();
            let plus_four = eval_plus_four_term(z, w, time, &policy).unwrap();
            let minus_four = eval_kernel(&spec(KernelKind::Minus, t), z, w).unwrap();
            let minus_series = eval_minus_direct(z, w, time, &policy).unwrap();
            let left = spec(KernelKind::Left, t);
            let full = left.eval(z, w).unwrap() + left.eval(z + one, w + one).unwrap();
            // straight from the closed form, well past the truncation point
            let plus_ref = k0_double_window(z, w, t, 1.0, 40, false);
            let minus_ref = k0_double_window(z, w, t, 1.0, 40, true);
            for d in [
                plus_series - plus_four,
                minus_series - minus_four,
                plus_series + minus_series - 2.0 * full,
                plus_series - plus_ref,
                minus_four - minus_ref,
            ] {
                worst = worst.max(d.norm());
            }
        }
    }
    Outcome::at_most(worst, 1e-9).note("20 pairs in Q x 3 horizons, absolute")
}

fn gram_psd() -> Outcome {
    let kinds = [
        KernelKind::Left,
        KernelKind::Right,
        KernelKind::Plus,
        KernelKind::Minus,
        KernelKind::Full,
        KernelKind::HalfLineQ,
    ];
    let mut worst = f64::NEG_INFINITY;
    for kind in kinds {
        for t in [0.25, 1.0, 4.0] {
            let pts = sample_points(kind.domain(), 15, 0.05, 71).unwrap();
            let s = spec(kind, t);
            let g = DMatrix::from_fn(15, 15, |i, j| s.eval(pts[i], pts[j]).unwrap());
            let trace: f64 = (0..15).map(|i| g[(i, i)].re).sum();
            let min = SymmetricEigen::new(g).eigenvalues.min();
            // report -λ_min / trace, which must not exceed 1e-10
            worst = worst.max(-min / trace);
        }
    }
    Outcome::at_most(worst, 1e-10).note("max of -lambda_min/trace over 6 kinds x 3 horizons")
}

fn feature_kernel_consistency() -> Outcome {
    let t = tp(1.0);
    let m = 4096;
    let h = 1.0 / m as f64;
    let mut worst = 0.0f64;
    for scenario in Scenario::ALL {
        let pts = sample_points(scenario.domain(), 8, 0.1, 81).unwrap();
        let feats: Vec<Vec<_>> = pts
            .iter()
            .map(|&z| (0..m).map(|k| feature(scenario, z, t, (k as f64 + 0.5) * h).unwrap()).collect())
            .collect();
        let s = spec(scenario.kernel_kind(), 1.0);
        for (i, &z) in pts.iter().enumerate() {
            for (j, &w) in pts.iter().enumerate() {
                let inner: Complex64 = (0..m).map(|k| feats[j][k].dot(feats[i][k])).sum::<Complex64>() * h;
                worst = worst.max((inner - s.eval(z, w).unwrap()).norm());
            }
        }
    }
    Outcome::at_most(worst, 1e-6).note("8 points, all six scenarios, M = 4096")
}

fn solver_cross_validation() -> Outcome {
    let t = tp(1.0);
    let m = 4096;
    let left = ControlSignal::from_real_fn(t, m, |s| (PI * s).sin()).unwrap();
    let right = ControlSignal::from_real_fn(t, m, |s| s * (1.0 - s)).unwrap();
    let xs: Vec<f64> = (1..=20).map(|i| i as f64 / 21.0).collect();
    let pts: Vec<Complex64> = xs.iter().map(|&x| c(x, 0.0)).collect();
    let op = apply_operator(Scenario::Both, &left, Some(&right), &pts).unwrap();
    let fd = fd_oracle(&left, &right, 400, 8000, &xs).unwrap();
    Outcome::at_most(op.max_deviation(&fd), 1e-4).note("20 points, CN dx = 1/400, dt = 1/8000")
}

fn synthesis_round_trip() -> Outcome {
    let t = tp(1.0);
    let m = 16384;
    let truth = ControlSignal::from_real_fn(t, m, |s| s * s * (1.0 - s)).unwrap();
    let pts: Vec<Complex64> = (0..12).map(|i| c(0.05 + 0.9 * i as f64 / 11.0, 0.0)).collect();
    let target = apply_operator(Scenario::LeftOnly, &truth, None, &pts).unwrap();
    let fit = min_norm_control(Scenario::LeftOnly, &target, Lambda::Auto, m).unwrap();
    let resolved = apply_operator(Scenario::LeftOnly, &fit.control, None, &pts).unwrap();
    let residual = resolved.max_deviation(&target) / target.max_abs();
    let norm_ratio = fit.control.l2_norm() / truth.l2_norm();
    // both conditions folded into one number that must stay ≤ 1
    let score = (residual / 1e-3).max(norm_ratio / 1.01);
    Outcome::at_most(score, 1.0).note(format!("relative residual {residual:.2e}, norm ratio {norm_ratio:.6}, M = {m}"))
}

fn kernel_section_norm() -> Outcome {
    let y0 = c(0.6, 0.0);
    let left = spec(KernelKind::Left, 1.0);
    let diag = left.eval(y0, y0).unwrap().re;
    let mut worst = 0.0f64;
    for n in (8..=24).step_by(4) {
        let pts: Vec<Complex64> = (0..n).map(|i| c(0.05 + 0.9 * i as f64 / (n - 1) as f64, 0.0)).collect();
        let values = pts.iter().map(|&z| left.eval(z, y0).unwrap()).collect();
        let target = StateField::new(pts, values, tp(1.0)).unwrap();
        let fit = min_norm_control(Scenario::LeftOnly, &target, Lambda::Auto, 1024).unwrap();
        worst = worst.max((fit.norm_estimate.powi(2) / diag - 1.0).abs());
    }
    Outcome::at_most(worst, 0.05).note("n = 8, 12, ..., 24; relative gap of norm^2 to K(y0,y0)")
}

fn truncation_certification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(121);
    let policy = TruncationPolicy::default();
    let mut worst = 0.0f64;
    for kind in KernelKind::SERIES {
        let zs = sample_points(kind.domain(), 50, 0.02, 122).unwrap();
        let ws = sample_points(kind.domain(), 50, 0.02, 123).unwrap();
        for (z, w) in zs.into_iter().zip(ws) {
            let s = spec(kind, f64::exp(rng.gen_range(f64::ln(0.05)..f64::ln(10.0))));
            let n = s.half_width().unwrap().unwrap();
            let d = (s.eval_with_half_width(z, w, n).unwrap() - s.eval_with_half_width(z, w, 2 * n).unwrap()).norm();
            worst = worst.max(d / policy.tol);
        }
    }
    for period in [Period::Two, Period::One] {
        let region = if period == Period::Two { Region::SquareD } else { Region::SquareQ };
        for z in sample_points(region, 50, 0.02, 124).unwrap() {
            let t = tp(f64::exp(rng.gen_range(f64::ln(0.05)..f64::ln(10.0))));
            let n = heat_rkhs::heat::required_half_width(t, period, &policy).unwrap();
            let a = heat_rkhs::heat::eval_dxtheta_with_half_width(z, t, period, n).unwrap();
            let b = heat_rkhs::heat::eval_dxtheta_with_half_width(z, t, period, 2 * n).unwrap();
            worst = worst.max((a - b).norm() / policy.tol);
        }
    }
    Outcome::at_most(worst, 1.0).note("change/tol over 50 inputs per series (5 kernels, 2 theta series)")
}

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("K0 integral identity", k0_integral_identity),
        ("half-line kernel equals K0", half_line_equals_k0),
        ("half-line scaling law", half_line_scaling_law),
        ("Bergman pullback", bergman_pullback),
        ("theta functional equations", functional_equations),
        ("four-term identities", four_term_identities),
        ("Gram positive semidefiniteness", gram_psd),
        ("feature/kernel consistency", feature_kernel_consistency),
        ("operator vs Crank-Nicolson", solver_cross_validation),
        ("synthesis round trip", synthesis_round_trip),
        ("kernel-section norm", kernel_section_norm),
        ("truncation certification", truncation_certification),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let verdict = if out.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict} {name}: measured {:.3e} <= {:.1e}? ({}; {:.1}s)",
            i + 1,
            out.measured,
            out.tolerance,
            out.note,
            start.elapsed().as_secs_f64()
        );
        if !out.passed() {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
