use num_complex::Complex64;

use super::signal::{ControlSignal, StateField};
use crate::error::{Error, Result};

/// Number of leading Crank–Nicolson steps replaced by two backward-Euler
/// half-steps each, which damps the start-up oscillation caused by boundary
/// data that does not vanish at `t = 0`.
pub const CN_STARTUP_STEPS: usize = 2;

/// Crank–Nicolson solution of `∂ₜw = ∂ₓₓw` on `(0,1)` with `w(0,t) = u_ℓ(t)`,
/// `w(1,t) = u_r(t)`, `w(x,0) = 0`, on `nx` space cells and `nt` time steps,
/// read off at `points` by linear interpolation.
///
/// Boundary data are taken from [`ControlSignal::value_at`], i.e. linear
/// between the midpoint samples.
pub fn fd_oracle(
    u_left: &ControlSignal,
    u_right: &ControlSignal,
    nx: usize,
    nt: usize,
    points: &[f64],
) -> Result<StateField> {
    u_left.check_compatible(u_right)?;
    if nx < 100 {
        return Err(Error::InvalidParameter(format!("nx = {nx} must be at least 100")));
    }
    if nt < 10 * nx {
        return Err(Error::InvalidParameter(format!("nt = {nt} must be at least 10·nx = {}", 10 * nx)));
    }
    if let Some(x) = points.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::InvalidParameter(format!("oracle point {x} is not inside (0,1)")));
    }

    let horizon = u_left.t.get();
    let dx = 1.0 / nx as f64;
    let dt = horizon / nt as f64;
    let boundary = |t: f64| (u_left.value_at(t), u_right.value_at(t));

    // interior unknowns w_1..w_{nx-1}
    let mut w = vec![Complex64::new(0.0, 0.0); nx - 1];
    let mut solver = Tridiagonal::new(nx - 1);
    let mut time = 0.0;
    let mut g_old = boundary(0.0);
    let startup = CN_STARTUP_STEPS.min(nt);
    for _ in 0..2 * startup {
        let g_new = boundary(time + 0.5 * dt);
        theta_step(&mut w, &mut solver, 1.0, 0.5 * dt / (dx * dx), g_old, g_new);
        time += 0.5 * dt;
        g_old = g_new;
    }
    for n in startup..nt {
        let t_new = (n + 1) as f64 * dt;
        let g_new = boundary(t_new);
        theta_step(&mut w, &mut solver, 0.5, dt / (dx * dx), g_old, g_new);
        g_old = g_new;
    }

    let (left, right) = g_old;
    let node = |i: usize| {
        if i == 0 {
            left
        } else if i == nx {
            right
        } else {
            w[i - 1]
        }
    };
    let values = points
        .iter()
        .map(|&x| {
            let s = x * nx as f64;
            let i = (s.floor() as usize).min(nx - 1);
            let frac = s - i as f64;
            node(i) * (1.0 - frac) + node(i + 1) * frac
        })
        .collect();
    StateField::new(points.iter().map(|&x| Complex64::new(x, 0.0)).collect(), values, u_left.t)
}

/// One θ-scheme step with mesh ratio `r = Δt/Δx²`; `g` are the Dirichlet
/// values `(left, right)` at the old and new time levels.
fn theta_step(
    w: &mut [Complex64],
    solver: &mut Tridiagonal,
    theta: f64,
    r: f64,
    g_old: (Complex64, Complex64),
    g_new: (Complex64, Complex64),
) {
    let n = w.len();
    let explicit = (1.0 - theta) * r;
    let rhs = &mut solver.rhs;
    for i in 0..n {
        let lo = if i == 0 { g_old.0 } else { w[i - 1] };
        let hi = if i + 1 == n { g_old.1 } else { w[i + 1] };
        rhs[i] = w[i] + (lo - w[i] * 2.0 + hi) * explicit;
    }
    rhs[0] += g_new.0 * (theta * r);
    rhs[n - 1] += g_new.1 * (theta * r);
    solver.solve(-theta * r, 1.0 + 2.0 * theta * r, w);
}

/// Thomas algorithm for the constant-coefficient system `(off, diag, off)`.
struct Tridiagonal {
    rhs: Vec<Complex64>,
    scratch: Vec<f64>,
}

impl Tridiagonal {
    fn new(n: usize) -> Self {
        Self { rhs: vec![Complex64::new(0.0, 0.0); n], scratch: vec![0.0; n] }
    }

    fn solve(&mut self, off: f64, diag: f64, out: &mut [Complex64]) {
        let n = out.len();
        let c = &mut self.scratch;
        let d = &mut self.rhs;
        c[0] = off / diag;
        d[0] /= diag;
        for i in 1..n {
            let m = diag - off * c[i - 1];
            c[i] = off / m;
            d[i] = (d[i] - d[i - 1] * off) / m;
        }
        out[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            out[i] = d[i] - out[i + 1] * c[i];
        }
    }
}
