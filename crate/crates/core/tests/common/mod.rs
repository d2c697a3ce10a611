//! Reference computations written independently of the library internals.
#![allow(dead_code)]

use std::f64::consts::PI;

use heat_rkhs::Complex64;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Neumaier-compensated complex accumulator.
#[derive(Default)]
pub struct Acc {
    sum: Complex64,
    comp: Complex64,
}

impl Acc {
    pub fn add(&mut self, x: Complex64) {
        fn two(s: f64, c: &mut f64, x: f64) -> f64 {
            let t = s + x;
            *c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
            t
        }
        self.sum.re = two(self.sum.re, &mut self.comp.re, x.re);
        self.sum.im = two(self.sum.im, &mut self.comp.im, x.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// `(z w̄ / 16π) ∫₀ᵀ s⁻³ e^{-(z²+w̄²)/4s} ds`, integrated numerically in
/// `v = 1/s` over `[1/T, ∞)` with panels short enough to resolve the
/// oscillation of `e^{-a v/4}`.
pub fn k0_by_quadrature(z: Complex64, w: Complex64, t: f64) -> Complex64 {
    let a = z * z + w.conj() * w.conj();
    let decay = a.re / 4.0;
    assert!(decay > 0.0);
    let rate = a.im.abs() / 4.0 + decay;
    let v0 = 1.0 / t;
    // e^{-decay (v - v0)} < e^{-60} beyond this
    let v1 = v0 + 60.0 / decay;
    let panels = ((v1 - v0) * rate / 2.0).ceil().max(8.0) as usize;
    let width = (v1 - v0) / panels as f64;
    let rule = gauss_legendre(20);
    let mut acc = Acc::default();
    for p in 0..panels {
        let mid = v0 + (p as f64 + 0.5) * width;
        for &(x, wt) in &rule {
            let v = mid + 0.5 * width * x;
            // e^{-a v/4}, with the phase taken from the exact product
            let arg = -a * (v / 4.0);
            let val = v * arg.re.exp() * Complex64::new(arg.im.cos(), arg.im.sin());
            acc.add(val * (0.5 * width * wt));
        }
    }
    z * w.conj() / (16.0 * PI) * acc.value()
}

/// `∂ₓK(z,t) = -z / (4 √π t^{3/2}) e^{-z²/4t}`.
pub fn dxk(z: Complex64, t: f64) -> Complex64 {
    -z / (4.0 * PI.sqrt() * t.powf(1.5)) * (-z * z / (4.0 * t)).exp()
}

/// `Σ_{|n| ≤ width} ∂ₓK(z + p n, t)` summed outside-in.
pub fn theta_window(z: Complex64, t: f64, p: f64, width: i64) -> Complex64 {
    let mut acc = Acc::default();
    for j in (0..=width).rev() {
        acc.add(dxk(z + p * j as f64, t));
        if j > 0 {
            acc.add(dxk(z - p * j as f64, t));
        }
    }
    acc.value()
}

/// `Σ_{|n|,|m| ≤ width} s(n,m) K₀(z + p n, w + p m; T)` straight from the
/// closed form, with `s = (-1)^{n+m}` when `alternate`.
pub fn k0_double_window(z: Complex64, w: Complex64, t: f64, p: f64, width: i64, alternate: bool) -> Complex64 {
    let mut acc = Acc::default();
    for n in -width..=width {
        for m in -width..=width {
            let a = z + p * n as f64;
            let b = w + p * m as f64;
            let sign = if alternate && (n + m).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            acc.add(k0(a, b, t) * sign);
        }
    }
    acc.value()
}

/// `K₀(z,w;T) = (z w̄/π) e^{-(z²+w̄²)/4T} [1/(z²+w̄²)² + 1/(4T(z²+w̄²))]`.
pub fn k0(z: Complex64, w: Complex64, t: f64) -> Complex64 {
    let s = z * z + w.conj() * w.conj();
    z * w.conj() / PI * (-s / (4.0 * t)).exp() * (1.0 / (s * s) + 1.0 / (4.0 * t * s))
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
