mod common;

use common::c;
use heat_rkhs::control::{
    apply_operator, fd_oracle, feature, membership_residual, min_norm_control, ControlSignal, Lambda, Scenario,
    StateField,
};
use heat_rkhs::{sample_points, Complex64, KernelKind, KernelSpec, Region, TimeParam};
use proptest::prelude::*;

fn tp(t: f64) -> TimeParam {
    TimeParam::new(t).unwrap()
}

fn reals(xs: &[f64]) -> Vec<Complex64> {
    xs.iter().map(|&x| c(x, 0.0)).collect()
}

#[test]
fn constant_left_control_matches_crank_nicolson() {
    let u = ControlSignal::from_real_fn(tp(1.0), 1024, |_| 1.0).unwrap();
    let zero = ControlSignal::zeros(tp(1.0), 1024).unwrap();
    let op = apply_operator(Scenario::LeftOnly, &u, None, &reals(&[0.5])).unwrap();
    let fd = fd_oracle(&u, &zero, 400, 8000, &[0.5]).unwrap();
    assert!(op.max_deviation(&fd) < 1e-4, "{:?} vs {:?}", op.values, fd.values);
}

#[test]
fn sine_left_control_matches_crank_nicolson() {
    let t = tp(1.0);
    let u = ControlSignal::from_real_fn(t, 2048, |s| (std::f64::consts::PI * s).sin()).unwrap();
    let zero = ControlSignal::zeros(t, 2048).unwrap();
    let xs = [0.1, 0.3, 0.5, 0.7, 0.9];
    let op = apply_operator(Scenario::Both, &u, Some(&zero), &reals(&xs)).unwrap();
    let fd = fd_oracle(&u, &zero, 400, 8000, &xs).unwrap();
    assert!(op.max_deviation(&fd) < 1e-4);
}

#[test]
fn symmetric_scenarios_are_special_cases_of_both() {
    let t = tp(1.0);
    let u = ControlSignal::from_fn(t, 128, |s| c(s.cos(), s * s)).unwrap();
    let pts = sample_points(Region::SquareQ, 10, 0.05, 3).unwrap();
    let anti = apply_operator(Scenario::AntiSym, &u, None, &pts).unwrap();
    let both_anti = apply_operator(Scenario::Both, &u, Some(&u.scaled(c(-1.0, 0.0))), &pts).unwrap();
    assert!(anti.max_deviation(&both_anti) < 1e-10);
    let sym = apply_operator(Scenario::Sym, &u, None, &pts).unwrap();
    let both_sym = apply_operator(Scenario::Both, &u, Some(&u), &pts).unwrap();
    assert!(sym.max_deviation(&both_sym) < 1e-10);
}

#[test]
fn half_line_state_scales_with_the_horizon() {
    let t = 2.5;
    let profile = |s: f64| c(s.sin(), 1.0 - s);
    let u_t = ControlSignal::from_fn(tp(t), 128, |s| profile(s / t)).unwrap();
    let u_1 = ControlSignal::from_fn(tp(1.0), 128, profile).unwrap();
    let pts = sample_points(Region::SectorDelta, 6, 0.1, 4).unwrap();
    let scaled: Vec<Complex64> = pts.iter().map(|z| z / t.sqrt()).collect();
    let a = apply_operator(Scenario::HalfLine, &u_t, None, &pts).unwrap();
    let b = apply_operator(Scenario::HalfLine, &u_1, None, &scaled).unwrap();
    assert!(a.max_deviation(&b) < 1e-8);
}

#[test]
fn left_feature_vanishes_at_the_centre() {
    for t in [0.01, 0.3, 0.9] {
        assert!(feature(Scenario::LeftOnly, c(1.0, 0.0), tp(1.0), t).unwrap().first.norm() < 1e-12);
    }
}

#[test]
fn real_points_give_real_features() {
    for scenario in Scenario::ALL {
        let z = match scenario {
            Scenario::LeftOnly | Scenario::HalfLine => c(1.3, 0.0),
            _ => c(0.35, 0.0),
        };
        let f = feature(scenario, z, tp(1.0), 0.4).unwrap();
        assert_eq!(f.first.im, 0.0, "{scenario}");
        assert_eq!(f.second.im, 0.0, "{scenario}");
    }
}

#[test]
fn zero_target_gives_zero_control() {
    let pts = reals(&[0.2, 0.4, 0.6]);
    let target = StateField::new(pts, vec![c(0.0, 0.0); 3], tp(1.0)).unwrap();
    let r = min_norm_control(Scenario::LeftOnly, &target, Lambda::Auto, 64).unwrap();
    assert!(r.coefficients.iter().all(|c| c.norm() == 0.0));
    assert_eq!(r.control.l2_norm(), 0.0);
    assert_eq!(r.residual, 0.0);
}

#[test]
fn both_scenario_returns_two_controls() {
    let t = tp(1.0);
    let m = 2048;
    let l = ControlSignal::from_real_fn(t, m, |s| s).unwrap();
    let r = ControlSignal::from_real_fn(t, m, |s| 1.0 - s).unwrap();
    let pts = sample_points(Region::SquareQ, 6, 0.1, 6).unwrap();
    let target = apply_operator(Scenario::Both, &l, Some(&r), &pts).unwrap();
    let fit = min_norm_control(Scenario::Both, &target, Lambda::Auto, m).unwrap();
    let right = fit.control_right.as_ref().unwrap();
    let again = apply_operator(Scenario::Both, &fit.control, Some(right), &pts).unwrap();
    assert!(again.max_deviation(&target) <= 1e-3 * target.max_abs());
    let truth = (l.l2_norm().powi(2) + r.l2_norm().powi(2)).sqrt();
    assert!(fit.control_norm <= 1.01 * truth);
}

fn grid(n: usize, a: f64, b: f64) -> Vec<Complex64> {
    (0..n).map(|i| c(a + (b - a) * i as f64 / (n - 1) as f64, 0.0)).collect()
}

fn section(pts: &[Complex64]) -> StateField {
    let spec = KernelSpec::with_default_truncation(KernelKind::Left, tp(1.0));
    let y0 = c(0.6, 0.0);
    StateField::new(pts.to_vec(), pts.iter().map(|&p| spec.eval(p, y0).unwrap()).collect(), tp(1.0)).unwrap()
}

fn pole(pts: &[Complex64]) -> StateField {
    StateField::new(pts.to_vec(), pts.iter().map(|p| 1.0 / (p + 0.05)).collect(), tp(1.0)).unwrap()
}

#[test]
fn kernel_sections_are_members() {
    let (fit, probes) = (grid(10, 0.1, 0.9), grid(9, 0.15, 0.85));
    let kernel_case = membership_residual(Scenario::LeftOnly, &section(&fit), &section(&probes), Lambda::Auto).unwrap();
    let pole_case = membership_residual(Scenario::LeftOnly, &pole(&fit), &pole(&probes), Lambda::Auto).unwrap();
    assert!(kernel_case <= 1e-6, "{kernel_case}");
    assert!(pole_case >= 10.0 * kernel_case, "{pole_case} vs {kernel_case}");
}

#[test]
fn membership_residual_grows_with_lambda() {
    let (fit, probes) = (grid(10, 0.1, 0.9), grid(9, 0.15, 0.85));
    let mut last = 0.0;
    for lambda in [1e-10, 1e-8, 1e-6, 1e-4, 1e-2] {
        let r = membership_residual(Scenario::LeftOnly, &section(&fit), &section(&probes), Lambda::Fixed(lambda)).unwrap();
        assert!(r >= last * (1.0 - 1e-9), "lambda {lambda}: {r} < {last}");
        last = r;
    }
}

fn signal(coeffs: (f64, f64, f64)) -> ControlSignal {
    ControlSignal::from_fn(tp(1.0), 16, |s| c(coeffs.0 + coeffs.1 * s, coeffs.2 * s * s)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn operator_is_linear(
        a in (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
        b in (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
        alpha in (-3.0..3.0f64, -3.0..3.0f64),
        beta in (-3.0..3.0f64, -3.0..3.0f64),
        seed in 0u64..1000,
    ) {
        let (alpha, beta) = (c(alpha.0, alpha.1), c(beta.0, beta.1));
        let (u1, u2) = (signal(a), signal(b));
        let mix = u1.scaled(alpha).try_add(&u2.scaled(beta)).unwrap();
        for scenario in [Scenario::LeftOnly, Scenario::AntiSym, Scenario::HalfLine] {
            let pts = sample_points(scenario.domain(), 3, 0.1, seed).unwrap();
            let w1 = apply_operator(scenario, &u1, None, &pts).unwrap();
            let w2 = apply_operator(scenario, &u2, None, &pts).unwrap();
            let w = apply_operator(scenario, &mix, None, &pts).unwrap();
            for i in 0..3 {
                let expect = alpha * w1.values[i] + beta * w2.values[i];
                prop_assert!((w.values[i] - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
            }
        }
    }

    #[test]
    fn right_scenario_mirrors_left(x in 0.05..0.95f64, k in 0.5..4.0f64) {
        let u = ControlSignal::from_real_fn(tp(1.0), 16, |s| (k * s).cos()).unwrap();
        let l = apply_operator(Scenario::LeftOnly, &u, None, &[c(x, 0.0)]).unwrap();
        let r = apply_operator(Scenario::RightOnly, &u, None, &[c(1.0 - x, 0.0)]).unwrap();
        prop_assert!(l.max_deviation(&r) < 1e-11);
    }
}
