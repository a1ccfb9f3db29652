//! Complex Gamma, digamma, polygamma and harmonic numbers.
//!
//! Gamma uses the Lanczos approximation (g = 7, nine terms) with reflection
//! below `Re z = 1/2`. The psi family shifts the argument upward with the
//! recurrence until the asymptotic Bernoulli series is accurate, which keeps
//! full accuracy right next to the poles at nonpositive integers.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::Complex;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;
/// Apéry's constant ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_285_4;

/// The three constants every closed form leans on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub euler_gamma: f64,
    pub zeta3: f64,
    pub pi: f64,
}

pub const fn constants() -> Constants {
    Constants {
        euler_gamma: EULER_GAMMA,
        zeta3: ZETA3,
        pi: PI,
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
];

/// Returns `Some(n)` when `z == -n` for a nonnegative integer `n`.
pub fn nonpositive_integer(z: Complex) -> Option<u32> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() && z.re > -(u32::MAX as f64) {
        Some((-z.re) as u32)
    } else {
        None
    }
}

pub fn gamma(z: Complex) -> Result<Complex> {
    if nonpositive_integer(z).is_some() {
        return Err(Error::Pole(z.re));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex) -> Complex {
    if z.re < 0.5 && z.re > -40.0 {
        // Γ(z) = Γ(z + n)/[z(z+1)…(z+n−1)]; near −k the factor z + k is formed exactly
        let mut denom = Complex::new(1.0, 0.0);
        let mut w = z;
        while w.re < 0.5 {
            denom *= w;
            w += 1.0;
        }
        return gamma_unchecked(w) / denom;
    }
    if z.re < 0.5 {
        // Γ(z) Γ(1 − z) = π / sin(πz)
        let s = (z * PI).sin();
        return Complex::new(PI, 0.0) / (s * gamma_unchecked(Complex::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut acc = Complex::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += *c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    acc * (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp()
}

pub fn digamma(z: Complex) -> Result<Complex> {
    polygamma(0, z)
}

/// ψ⁽ⁿ⁾(z), the n-th derivative of the digamma function.
pub fn polygamma(n: u32, z: Complex) -> Result<Complex> {
    if nonpositive_integer(z).is_some() {
        return Err(Error::Pole(z.re));
    }
    let nf = n as f64;
    let n_fact = factorial(n);
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let threshold = 25.0 + 2.0 * nf;

    let mut z = z;
    let mut shift = Complex::new(0.0, 0.0);
    while z.re < threshold {
        shift += z.powi(-(n as i32) - 1);
        z += 1.0;
    }
    // ψ⁽ⁿ⁾(z) = ψ⁽ⁿ⁾(z + N) − (−1)ⁿ n! Σ 1/(z + k)^{n+1}
    let shifted = -shift * (sign * n_fact);

    let inv = z.inv();
    let inv2 = inv * inv;
    let asym = if n == 0 {
        let mut s = z.ln() - inv * 0.5;
        let mut p = inv2;
        for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
            s -= p * (*b / (2.0 * (k as f64 + 1.0)));
            p *= inv2;
        }
        s
    } else {
        // (−1)^{n+1} [ (n−1)!/zⁿ + n!/(2z^{n+1}) + Σ B_{2k} (2k+n−1)!/(2k)! / z^{2k+n} ]
        let zn = inv.powi(n as i32);
        let mut s = zn * factorial(n - 1) + zn * inv * (n_fact * 0.5);
        let mut p = zn * inv2;
        for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
            let two_k = 2 * (k as u32 + 1);
            s += p * (*b * falling_ratio(two_k + n - 1, two_k));
            p *= inv2;
        }
        s * (-sign)
    };
    Ok(asym + shifted)
}

/// Generalized harmonic number H_z = γ + ψ(z + 1).
pub fn harmonic(z: Complex) -> Result<Complex> {
    Ok(digamma(z + 1.0)? + EULER_GAMMA)
}

/// ζ(k) for integer k ≥ 2, via ψ⁽ᵏ⁻¹⁾(1) = (−1)ᵏ (k−1)! ζ(k).
pub fn zeta_int(k: u32) -> f64 {
    assert!(k >= 2, "zeta_int needs k >= 2");
    let psi = polygamma(k - 1, Complex::new(1.0, 0.0)).expect("1 is not a pole");
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * psi.re / factorial(k - 1)
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// hi! / lo! for hi ≥ lo.
fn falling_ratio(hi: u32, lo: u32) -> f64 {
    ((lo + 1)..=hi).fold(1.0, |acc, k| acc * k as f64)
}
