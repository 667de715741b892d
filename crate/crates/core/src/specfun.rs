//! Scalar special functions in double precision.
//!
//! Besides the log-gamma function and the regularized incomplete gamma
//! function this module holds the two integral kernels consumed by the exact
//! largest-eigenvalue formulas:
//!
//! * `I(a, b; x) = 1/Γ(a) ∫₀ˣ t^{a-1} e^{-t} P(b, t) dt`
//! * `I_G(i, j; x) = 1/Γ(i/2) ∫_{-∞}^x t^{i-1} e^{-t²/2} ψ(j, t) dt`
//!
//! Both are evaluated through closed recursions on the shape parameters, never
//! by numerical integration.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_2: f64 = std::f64::consts::LN_2;

/// ζ(k) − 1 for k = 2, 3, ..., 40.
const ZETA_MINUS_ONE: [f64; 39] = [
    0.644_934_066_848_226_436_47,
    0.202_056_903_159_594_285_4,
    0.082_323_233_711_138_191_516,
    0.036_927_755_143_369_926_331,
    0.017_343_061_984_449_139_715,
    0.008_349_277_381_922_826_839_8,
    0.004_077_356_197_944_339_378_7,
    0.002_008_392_826_082_214_417_9,
    0.000_994_575_127_818_085_337_15,
    0.000_494_188_604_119_464_558_7,
    0.000_246_086_553_308_048_298_64,
    0.000_122_713_347_578_489_146_75,
    0.000_061_248_135_058_704_829_259,
    0.000_030_588_236_307_020_493_552,
    0.000_015_282_259_408_651_871_733,
    7.637_197_637_899_762_273_6e-6,
    3.817_293_264_999_839_856_5e-6,
    1.908_212_716_553_938_925_7e-6,
    9.539_620_338_727_961_131_5e-7,
    4.769_329_867_878_064_631_2e-7,
    2.384_505_027_277_329_9e-7,
    1.192_199_259_653_110_730_7e-7,
    5.960_818_905_125_947_961_2e-8,
    2.980_350_351_465_228_018_6e-8,
    1.490_155_482_836_504_123_5e-8,
    7.450_711_789_835_429_492e-9,
    3.725_334_024_788_457_054_8e-9,
    1.862_659_723_513_049_006_4e-9,
    9.313_274_324_196_681_828_7e-10,
    4.656_629_065_033_784_073e-10,
    2.328_311_833_676_505_492e-10,
    1.164_155_017_270_051_977_6e-10,
    5.820_772_087_902_700_889_2e-11,
    2.910_385_044_497_099_686_9e-11,
    1.455_192_189_104_198_423_6e-11,
    7.275_959_835_057_481_014_5e-12,
    3.637_979_547_378_651_190_2e-12,
    1.818_989_650_307_065_947_6e-12,
    9.094_947_840_263_889_282_5e-13,
];

/// ln Γ(a) for a > 0.
pub fn log_gamma(a: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::domain(format!("log_gamma requires a > 0, got {a}")));
    }
    Ok(ln_gamma(a))
}

/// Unchecked ln Γ(a), a > 0.
pub(crate) fn ln_gamma(a: f64) -> f64 {
    if a.is_infinite() {
        return f64::INFINITY;
    }
    if a < 0.5 {
        return ln_gamma(a + 1.0) - a.ln();
    }
    if a < 1.5 {
        let z = a - 1.0;
        return ln_gamma_two_plus(z) - z.ln_1p();
    }
    if a < 2.5 {
        return ln_gamma_two_plus(a - 2.0);
    }
    if a < 10.0 {
        let mut z = a;
        let mut prod = 1.0;
        while z >= 2.5 {
            z -= 1.0;
            prod *= z;
        }
        return prod.ln() + ln_gamma_two_plus(z - 2.0);
    }
    (a - 0.5) * a.ln() - a + LN_SQRT_2PI + stirling_correction(a)
}

/// ln Γ(2 + z) for |z| ≤ 1/2 from the Taylor series with ζ(k) − 1 weights.
fn ln_gamma_two_plus(z: f64) -> f64 {
    let mut acc = 0.0;
    for (idx, c) in ZETA_MINUS_ONE.iter().enumerate().rev() {
        let k = (idx + 2) as f64;
        acc = c / k - z * acc;
    }
    z * (1.0 - EULER_GAMMA) + z * z * acc
}

/// ln Γ(a) − [(a − ½) ln a − a + ½ ln 2π], valid for a ≥ 10.
fn stirling_correction(a: f64) -> f64 {
    const COEF: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / a;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in COEF.iter().rev() {
        acc = c + inv2 * acc;
    }
    acc * inv
}

/// ln(1 + d) − d without cancellation for small d.
fn log1pmx(d: f64) -> f64 {
    if d.abs() > 0.3 {
        return d.ln_1p() - d;
    }
    // -d²/2 + d³/3 - d⁴/4 + ...
    let mut acc = 0.0;
    for k in (2..=48).rev() {
        acc = 1.0 / k as f64 - d * acc;
    }
    -d * d * acc
}

/// ln(x^a e^{-x} / Γ(a)), the common prefactor of P(a, x) and Q(a, x).
pub(crate) fn ln_gamma_prefactor(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if a >= 10.0 {
        let d = (x - a) / a;
        a * log1pmx(d) + 0.5 * (a / (2.0 * std::f64::consts::PI)).ln() - stirling_correction(a)
    } else {
        a * x.ln() - x - ln_gamma(a)
    }
}

fn check_gamma_args(a: f64, x: f64) -> Result<()> {
    if a.is_nan() || a < 0.0 || a.is_infinite() {
        return Err(Error::domain(format!("incomplete gamma requires finite a ≥ 0, got {a}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("incomplete gamma requires x ≥ 0, got {x}")));
    }
    Ok(())
}

/// Regularized lower incomplete gamma function P(a, x) = γ(a, x)/Γ(a).
///
/// P(0, x) is defined as 1, the base of the upward recursion in the shape.
pub fn reg_gamma_p(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    Ok(p_unchecked(a, x))
}

pub(crate) fn p_unchecked(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        return 1.0;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x).clamp(0.0, 1.0)
    } else {
        (1.0 - gamma_continued_fraction(a, x)).clamp(0.0, 1.0)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x).
pub(crate) fn q_unchecked(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < a + 1.0 {
        (1.0 - gamma_series(a, x)).clamp(0.0, 1.0)
    } else {
        gamma_continued_fraction(a, x).clamp(0.0, 1.0)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut n = 1.0;
    while n < 100_000.0 {
        term *= x / (a + n);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
        n += 1.0;
    }
    sum * ln_gamma_prefactor(a, x).exp()
}

/// Modified Lentz evaluation of the continued fraction for Q(a, x).
fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..100_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * ln_gamma_prefactor(a, x).exp()
}

/// P(a + n, x) from P(a, x) by the downward recursion
/// `P(a+n, x) = P(a, x) − e^{-x} Σ_{k<n} x^{a+k}/Γ(a+k+1)`.
///
/// Each term is formed in the log domain and the sum is accumulated with
/// Neumaier compensation.
pub fn reg_gamma_shift(a: f64, n: u32, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    let top = a + n as f64;
    if x == 0.0 {
        return Ok(if top > 0.0 { 0.0 } else { 1.0 });
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let ln_x = x.ln();
    let mut sum = p_unchecked(a, x);
    let mut comp = 0.0;
    for k in 0..n {
        let shape = a + k as f64;
        let term = -(ln_gamma_prefactor(shape + 1.0, x) - ln_x).exp();
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok((sum + comp).clamp(0.0, 1.0))
}

fn is_integer(v: f64) -> bool {
    v.fract() == 0.0
}

/// 2^{-(a+b)} Γ(a+b) / (Γ(a) Γ(b+1)), the step coefficient of the kernel
/// recursion in its second argument.
pub(crate) fn kernel_step_coef(a: f64, b: f64) -> f64 {
    (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b + 1.0) - (a + b) * LN_2).exp()
}

/// Which of the three incomplete-gamma integrals a kernel evaluation refers to.
#[derive(Clone, Copy)]
enum Tail {
    /// ∫₀ʸ with P(b, t): the kernel I.
    Lower,
    /// ∫_y^∞ with Q(b, t).
    Upper,
}

struct KernelEval {
    tail: Tail,
    y: f64,
}

impl KernelEval {
    fn g(&self, a: f64, z: f64) -> f64 {
        match self.tail {
            Tail::Lower => p_unchecked(a, z),
            Tail::Upper => q_unchecked(a, z),
        }
    }

    fn sign(&self) -> f64 {
        match self.tail {
            Tail::Lower => -1.0,
            Tail::Upper => 1.0,
        }
    }

    /// Kernel(a, a + m) ascending from the diagonal base g(a)²/2.
    fn ascend_from_diagonal(&self, a: f64, m: u32) -> f64 {
        let ga = self.g(a, self.y);
        let mut v = 0.5 * ga * ga;
        for k in 0..m {
            let b = a + k as f64;
            v += self.sign() * kernel_step_coef(a, b) * self.g(a + b, 2.0 * self.y);
        }
        v
    }

    /// Kernel(a, m) ascending from the b = 0 base (P(a) for the lower tail,
    /// 0 for the upper tail).
    fn ascend_from_zero(&self, a: f64, m: u32) -> f64 {
        let mut v = match self.tail {
            Tail::Lower => p_unchecked(a, self.y),
            Tail::Upper => 0.0,
        };
        for k in 0..m {
            let b = k as f64;
            v += self.sign() * kernel_step_coef(a, b) * self.g(a + b, 2.0 * self.y);
        }
        v
    }

    fn eval(&self, a: f64, b: f64) -> Result<f64> {
        let reflect = |inner: f64| self.g(a, self.y) * self.g(b, self.y) - inner;
        let d = b - a;
        if is_integer(d) {
            if d >= 0.0 {
                Ok(self.ascend_from_diagonal(a, d as u32))
            } else {
                Ok(reflect(self.ascend_from_diagonal(b, (-d) as u32)))
            }
        } else if is_integer(b) {
            Ok(self.ascend_from_zero(a, b as u32))
        } else if is_integer(a) {
            Ok(reflect(self.ascend_from_zero(b, a as u32)))
        } else {
            Err(Error::Unreachable { a, b })
        }
    }
}

fn check_kernel_args(a: f64, b: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || a.is_infinite() {
        return Err(Error::domain(format!("kernel requires a > 0, got {a}")));
    }
    if b.is_nan() || b < 0.0 || b.is_infinite() {
        return Err(Error::domain(format!("kernel requires b ≥ 0, got {b}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("kernel requires x ≥ 0, got {x}")));
    }
    Ok(())
}

/// `I(a, b; x) = 1/Γ(a) ∫₀ˣ t^{a-1} e^{-t} P(b, t) dt`.
///
/// Reached from `I(a, a; x) = P(a, x)²/2` or `I(a, 0; x) = P(a, x)` by the
/// step `I(a, b+1) = I(a, b) − 2^{-(a+b)} Γ(a+b)/(Γ(a)Γ(b+1)) P(a+b, 2x)` and
/// the reflection `I(b, a) = P(a)P(b) − I(a, b)`. The pair must satisfy one of
/// b − a ∈ ℤ, b ∈ ℕ or a ∈ ℕ. `x = +∞` is accepted.
pub fn kernel_i(a: f64, b: f64, x: f64) -> Result<f64> {
    check_kernel_args(a, b, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    KernelEval { tail: Tail::Lower, y: x }.eval(a, b)
}

/// `1/Γ(a) ∫_y^∞ t^{a-1} e^{-t} Q(b, t) dt`, the complementary kernel. Every
/// recursion step adds a positive term, so it keeps full relative accuracy
/// deep in the tail where `I(a, b; ∞) − I(a, b; y)` would cancel.
pub(crate) fn kernel_i_upper(a: f64, b: f64, y: f64) -> Result<f64> {
    check_kernel_args(a, b, y)?;
    if y.is_infinite() {
        return Ok(0.0);
    }
    KernelEval { tail: Tail::Upper, y }.eval(a, b)
}

fn parity_sign(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `ψ(j, x) = 1/Γ(j/2) ∫_{-∞}^x t^{j-1} e^{-t²/2} dt
///          = 2^{j/2-1} (sgn(x)^j P(j/2, x²/2) − (−1)^j)`, with sgn(0) = 0.
pub fn psi(j: u32, x: f64) -> Result<f64> {
    if j < 1 {
        return Err(Error::domain("psi requires j ≥ 1"));
    }
    if x.is_nan() {
        return Err(Error::domain("psi requires a real x"));
    }
    Ok(psi_unchecked(j, x))
}

pub(crate) fn psi_unchecked(j: u32, x: f64) -> f64 {
    let h = 0.5 * j as f64;
    let scale = (h - 1.0).exp2();
    let y = 0.5 * x * x;
    let core = if x < 0.0 {
        // (−1)^j P − (−1)^j = (−1)^{j+1} Q
        parity_sign(j + 1) * q_unchecked(h, y)
    } else if x == 0.0 {
        -parity_sign(j)
    } else if j % 2 == 0 {
        -q_unchecked(h, y)
    } else {
        1.0 + p_unchecked(h, y)
    };
    scale * core
}

/// `∫_{-∞}^x t^m e^{-t²} dt / (Γ(i/2) Γ(j/2))` for x ≥ 0.
fn gauss_moment_ratio(m: u32, i: u32, j: u32, x: f64) -> f64 {
    let h = 0.5 * (m + 1) as f64;
    let bracket = if m % 2 == 0 {
        1.0 + p_unchecked(h, x * x)
    } else {
        -q_unchecked(h, x * x)
    };
    let ln_coef = ln_gamma(h) - ln_gamma(0.5 * i as f64) - ln_gamma(0.5 * j as f64);
    0.5 * ln_coef.exp() * bracket
}

/// `I_G(i, j; x) = 1/Γ(i/2) ∫_{-∞}^x t^{i-1} e^{-t²/2} ψ(j, t) dt`.
///
/// For x ≥ 0 the reduction order is: diagonal base `ψ(i,x)²/2`, reflection
/// `I_G(j,i) = ψ(i)ψ(j) − I_G(i,j)` when j < i, the two-step descent
/// `I_G(i,j) = 2 I_G(i,j−2) − ∫ t^{i+j−3} e^{-t²} / (Γ(i/2)Γ(j/2))` when
/// j ≥ i + 2, and the half-line identity through `I(i/2, j/2; ·)` for
/// j = i + 1. For x < 0 the substitution u = t²/2 maps the integral onto the
/// complementary kernel, which avoids cancellation in the left tail.
pub fn kernel_ig(i: u32, j: u32, x: f64) -> Result<f64> {
    if i < 1 || j < 1 {
        return Err(Error::domain("kernel_ig requires i, j ≥ 1"));
    }
    if x.is_nan() {
        return Err(Error::domain("kernel_ig requires a real x"));
    }
    if x < 0.0 {
        if x.is_infinite() {
            return Ok(0.0);
        }
        let scale = (0.5 * (i + j) as f64 - 2.0).exp2() * parity_sign(i + j);
        return Ok(scale * kernel_i_upper(0.5 * i as f64, 0.5 * j as f64, 0.5 * x * x)?);
    }
    if j < i {
        return Ok(psi_unchecked(i, x) * psi_unchecked(j, x) - kernel_ig(j, i, x)?);
    }
    let mut jj = if (j - i) % 2 == 0 { i } else { i + 1 };
    let mut v = if jj == i {
        let p = psi_unchecked(i, x);
        0.5 * p * p
    } else {
        half_line_ig(i, jj, x)?
    };
    while jj < j {
        jj += 2;
        v = 2.0 * v - gauss_moment_ratio(i + jj - 3, i, jj, x);
    }
    Ok(v)
}

/// `I_G(i,j;x) = ψ(j,0)ψ(i,x) + 2^{(i+j)/2-2} [(−1)^{i+j+1} I(i/2,j/2;∞) + I(i/2,j/2;x²/2)]`
/// for x ≥ 0.
fn half_line_ig(i: u32, j: u32, x: f64) -> Result<f64> {
    let (a, b) = (0.5 * i as f64, 0.5 * j as f64);
    let at_inf = kernel_i(a, b, f64::INFINITY)?;
    let at_x = kernel_i(a, b, 0.5 * x * x)?;
    let scale = (0.5 * (i + j) as f64 - 2.0).exp2();
    Ok(psi_unchecked(j, 0.0) * psi_unchecked(i, x)
        + scale * (parity_sign(i + j + 1) * at_inf + at_x))
}
