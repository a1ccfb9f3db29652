//! Quadrature references for the closed forms in [`crate::loops`].
//!
//! None of these routines call the Lanczos Γ or the harmonic numbers: the
//! angular measure uses a Γ computed by quadrature and every integral is
//! evaluated directly after Wick rotation or in Feynman parameters.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};
use crate::Complex;

const I: Complex = Complex::new(0.0, 1.0);

fn cfg() -> QuadConfig {
    QuadConfig::default().with_rel_tol(1e-11)
}

/// ∫₀^upper x^α g(x) dx for α > −1 via t = x^{α+1}.
fn power_weighted<G>(alpha: f64, upper: f64, g: G) -> Result<Complex>
where
    G: Fn(f64) -> Complex,
{
    let k = alpha + 1.0;
    let r = quad::integrate(|t| g(t.powf(1.0 / k)), 0.0, upper.powf(k), &cfg())?;
    Ok(r.value / k)
}

/// sin(θ)/θ, equal to 1 at θ = 0.
fn sinc(theta: f64) -> f64 {
    if theta.abs() < 1e-6 {
        1.0 - theta * theta / 6.0
    } else {
        theta.sin() / theta
    }
}

/// Γ(s) for real s > 0 from ∫₀^∞ t^{s−1} e^{−t} dt.
pub fn gamma_quadrature(s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter("gamma_quadrature needs s > 0"));
    }
    let head = power_weighted(s - 1.0, 1.0, |t| Complex::new((-t).exp(), 0.0))?;
    let tail = quad::integrate_to_infinity(
        |t| Complex::new(t.powf(s - 1.0) * (-t).exp(), 0.0),
        1.0,
        &cfg(),
    )?;
    Ok(head.re + tail.value.re)
}

/// Ω_d/(2π)^d with Ω_d = 2π^{d/2}/Γ(d/2).
fn angular_measure(d: f64) -> Result<f64> {
    Ok(2.0 * PI.powf(0.5 * d) / gamma_quadrature(0.5 * d)? / (2.0 * PI).powf(d))
}

fn check_radial(j: u32, m2: f64, d: f64) -> Result<()> {
    if !(m2 > 0.0 && m2.is_finite()) {
        return Err(Error::InvalidParameter("m^2 must be positive and finite"));
    }
    if !(d > 0.0 && d < 2.0 * (j as f64 + 1.0)) {
        return Err(Error::NonConvergent("radial integral needs 0 < d < 2(j+1)"));
    }
    Ok(())
}

/// ∫₀^{π/2} sin^a θ cos^c θ w(θ, π/2 − θ) dθ, split at π/4 with the singular power absorbed.
fn angular<W>(a: f64, c: f64, w: W) -> Result<Complex>
where
    W: Fn(f64, f64) -> Complex,
{
    let quarter = 0.25 * PI;
    let lower = power_weighted(a, quarter, |th| {
        w(th, 0.5 * PI - th) * sinc(th).powf(a) * th.cos().powf(c)
    })?;
    let upper = power_weighted(c, quarter, |phi| {
        w(0.5 * PI - phi, phi) * sinc(phi).powf(c) * phi.cos().powf(a)
    })?;
    Ok(lower + upper)
}

/// Δ_j from the Wick-rotated radial integral with p = m·tan θ.
pub fn oracle_delta_radial(j: u32, m2: f64, d: f64) -> Result<Complex> {
    check_radial(j, m2, d)?;
    let c = 2.0 * j as f64 + 1.0 - d;
    let angular = angular(d - 1.0, c, |_, _| Complex::new(1.0, 0.0))?;
    let sign = if j.is_multiple_of(2) { -1.0 } else { 1.0 };
    let scale = angular_measure(d)? * m2.powf(0.5 * d - j as f64 - 1.0);
    Ok(I * sign * scale * angular)
}

/// χ_j from the Wick-rotated momentum integral with ln(p² − m²) = ln(p_E² + m²) + iπ.
pub fn oracle_chi_momentum(j: u32, m2: f64, d: f64) -> Result<Complex> {
    check_radial(j, m2, d)?;
    let c = 2.0 * j as f64 + 1.0 - d;
    let log_m2 = Complex::new(m2.ln(), PI);
    // ln(p_E² + m²) = ln m² − 2 ln cos θ; near θ = π/2 the cosine is evaluated as sin φ
    let weighted = angular(d - 1.0, c, |th, phi| {
        let ln_cos = if th < 0.25 * PI {
            th.cos().ln()
        } else {
            phi.ln() + sinc(phi).ln()
        };
        log_m2 - 2.0 * ln_cos
    })?;
    let sign = if j.is_multiple_of(2) { -1.0 } else { 1.0 };
    let scale = angular_measure(d)? * m2.powf(0.5 * d - j as f64 - 1.0);
    Ok(I * sign * scale * weighted)
}

/// χ_j from the Feynman-parameter integral with x = m²/(p_E² + m²).
pub fn oracle_chi_x(j: u32, m2: f64, d: f64) -> Result<Complex> {
    check_radial(j, m2, d)?;
    let a = j as f64 + 1.0 - 0.5 * d;
    let b = 0.5 * d;
    let ln_arg = |x: f64| Complex::new(m2.ln() - x.ln(), PI);
    let near_zero = power_weighted(a - 1.0, 0.5, |x| ln_arg(x) * (1.0 - x).powf(b - 1.0))?;
    let near_one = power_weighted(b - 1.0, 0.5, |y| {
        let x = 1.0 - y;
        ln_arg(x) * x.powf(a - 1.0)
    })?;
    let sign = if j.is_multiple_of(2) { -1.0 } else { 1.0 };
    let pref = sign * m2.powf(0.5 * d - j as f64 - 1.0)
        / ((4.0 * PI).powf(0.5 * d) * gamma_quadrature(0.5 * d)?);
    Ok(I * pref * (near_zero + near_one))
}
