//! Test-only oracles: adaptive Gauss–Kronrod quadrature of the defining
//! integrals and the printed small-case closed forms.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use libm::{erf, lgamma};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = h * XGK[k];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// ∫ₐᵇ f with absolute tolerance `tol`, by recursive bisection.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn go(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth >= 40 || (b - a).abs() < 1e-14 * a.abs().max(b.abs()).max(1.0) {
            return v;
        }
        let m = 0.5 * (a + b);
        go(f, a, m, 0.5 * tol, depth + 1) + go(f, m, b, 0.5 * tol, depth + 1)
    }
    go(f, a, b, tol, 0)
}

/// ∫_{−∞}^{x} f via t = x − tan θ.
pub fn integrate_from_neg_inf(f: &dyn Fn(f64) -> f64, x: f64, tol: f64) -> f64 {
    let g = |th: f64| {
        let c = th.cos();
        f(x - th.tan()) / (c * c)
    };
    integrate(&g, 0.0, FRAC_PI_2, tol)
}

pub const QUAD_TOL: f64 = 1e-13;

/// P(a, x) = (1/Γ(a)) ∫₀^{√x} 2u^{2a−1} e^{−u²} du.
pub fn oracle_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let lg = lgamma(a);
    let f = |u: f64| if u <= 0.0 { if a == 0.5 { 2.0 / PI.sqrt() } else { 0.0 } } else { 2.0 * ((2.0 * a - 1.0) * u.ln() - u * u - lg).exp() };
    integrate(&f, 0.0, x.sqrt(), QUAD_TOL).min(1.0)
}

/// I(a, b; x) = (1/Γ(a)) ∫₀ˣ t^{a−1} e^{−t} P(b, t) dt with P itself by
/// quadrature.
pub fn oracle_kernel_i(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let lg = lgamma(a);
    let f = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let t = u * u;
        2.0 * ((2.0 * a - 1.0) * u.ln() - t - lg).exp() * oracle_p(b, t)
    };
    integrate(&f, 0.0, x.sqrt(), QUAD_TOL)
}

/// ψ(j, x) = (1/Γ(j/2)) ∫_{−∞}^{x} t^{j−1} e^{−t²/2} dt.
pub fn oracle_psi(j: u32, x: f64) -> f64 {
    let lg = lgamma(0.5 * j as f64);
    let f = |t: f64| t.powi(j as i32 - 1) * (-0.5 * t * t - lg).exp();
    integrate_from_neg_inf(&f, x, QUAD_TOL)
}

/// I_G(i, j; x) = (1/Γ(i/2)) ∫_{−∞}^{x} t^{i−1} e^{−t²/2} ψ(j, t) dt.
pub fn oracle_ig(i: u32, j: u32, x: f64) -> f64 {
    let lg = lgamma(0.5 * i as f64);
    let f = |t: f64| t.powi(i as i32 - 1) * (-0.5 * t * t - lg).exp() * oracle_psi(j, t);
    integrate_from_neg_inf(&f, x, 1e-12)
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / 2f64.sqrt()))
}

fn erf_half(x: f64) -> f64 {
    erf((0.5 * x).sqrt())
}

/// The (2, 2) expression as printed; it tends to −1.
pub fn printed_2x2(x: f64) -> f64 {
    (x * PI / 2.0).sqrt() * (-x / 2.0).exp() * erf_half(x) + (-x).exp() - 1.0
}

/// The (2, 5) expression as printed; it tends to −1.
pub fn printed_2x5(x: f64) -> f64 {
    (-x).exp() * (2.0 * (x / 2.0).exp() * x * x + x * x + 6.0 * x + 6.0) / 6.0 - 1.0
}

/// (2, 2) real Wishart with the sign fixed by F(0) = 0, F(∞) = 1.
pub fn closed_2x2(x: f64) -> f64 {
    -printed_2x2(x)
}

pub fn closed_2x5(x: f64) -> f64 {
    -printed_2x5(x)
}

pub fn closed_3x3(x: f64) -> f64 {
    (-1.5 * x).exp()
        * ((x / 2.0).exp() * (x.exp() - x - 1.0) * erf_half(x)
            - (2.0 * x / PI).sqrt() * (x.exp() * (x - 1.0) + 1.0))
}

pub fn closed_4x4(x: f64) -> f64 {
    (-2.0 * x).exp() / 32f64.sqrt()
        * (2f64.sqrt() * (4.0 * (2.0 * x).exp() - x.exp() * (x.powi(3) + 2.0 * x * x + 2.0 * x + 8.0) + 2.0 * (x + 2.0))
            - (PI * x).sqrt() * (x / 2.0).exp() * (x.exp() * (x * x - 4.0 * x + 6.0) - 2.0 * (x + 3.0)) * erf_half(x))
}

pub fn grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start + (stop - start) * k as f64 / (count - 1) as f64).collect()
}

/// Bisection root of a nondecreasing function.
pub fn bisect(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
