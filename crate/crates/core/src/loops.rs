//! One-loop integral families in dimensional regularization.
//!
//! `Δ_j = ∫ dᵈp/(2π)ᵈ (p² − m²)^{−(j+1)}` and
//! `χ_j = ∫ dᵈp/(2π)ᵈ ln(p² − m²)(p² − m²)^{−(j+1)}` in Minkowski signature,
//! plus the bubble `η(r)`. Each family has an exact-dimension closed form and
//! an ε-series around d = 4 with ε = d − 4. Logarithms of negative arguments
//! take the `+iπ` branch.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};
use crate::series::{gamma_series, harmonic_series, power_series, EpsSeries};
use crate::specialfns::{self, gamma, harmonic};
use crate::Complex;

const I: Complex = Complex::new(0.0, 1.0);

/// Evaluation context shared by every regularized quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    m0: f64,
    mu: f64,
    lambda0: f64,
    st_vol: f64,
    order: i32,
}

impl SchemeParams {
    pub const DEFAULT_ORDER: i32 = 2;

    /// `st_vol` is the spacetime volume 2TV.
    pub fn new(m0: f64, mu: f64, lambda0: f64, st_vol: f64) -> Result<Self> {
        Self::with_order(m0, mu, lambda0, st_vol, Self::DEFAULT_ORDER)
    }

    pub fn with_order(m0: f64, mu: f64, lambda0: f64, st_vol: f64, order: i32) -> Result<Self> {
        if !(m0 > 0.0 && m0.is_finite()) {
            return Err(Error::InvalidParameter("m0 must be positive and finite"));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter("mu must be positive and finite"));
        }
        if !lambda0.is_finite() {
            return Err(Error::InvalidParameter("lambda0 must be finite"));
        }
        if !(st_vol > 0.0 && st_vol.is_finite()) {
            return Err(Error::InvalidParameter("2TV must be positive and finite"));
        }
        if !(0..=8).contains(&order) {
            return Err(Error::InvalidParameter("order must lie in 0..=8"));
        }
        Ok(Self {
            m0,
            mu,
            lambda0,
            st_vol,
            order,
        })
    }

    /// Same scheme with TV given instead of 2TV.
    pub fn from_tv(m0: f64, mu: f64, lambda0: f64, tv: f64) -> Result<Self> {
        Self::new(m0, mu, lambda0, 2.0 * tv)
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }
    pub fn m2(&self) -> f64 {
        self.m0 * self.m0
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }
    /// The spacetime volume 2TV.
    pub fn st_vol(&self) -> f64 {
        self.st_vol
    }
    pub fn tv(&self) -> f64 {
        0.5 * self.st_vol
    }
    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn set_m0(self, m0: f64) -> Result<Self> {
        Self::with_order(m0, self.mu, self.lambda0, self.st_vol, self.order)
    }
    pub fn set_mu(self, mu: f64) -> Result<Self> {
        Self::with_order(self.m0, mu, self.lambda0, self.st_vol, self.order)
    }
    pub fn set_lambda0(self, lambda0: f64) -> Result<Self> {
        Self::with_order(self.m0, self.mu, lambda0, self.st_vol, self.order)
    }
    pub fn set_tv(self, tv: f64) -> Result<Self> {
        Self::with_order(self.m0, self.mu, self.lambda0, 2.0 * tv, self.order)
    }
    pub fn set_order(self, order: i32) -> Result<Self> {
        Self::with_order(self.m0, self.mu, self.lambda0, self.st_vol, order)
    }
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            m0: 1.0,
            mu: 1.0,
            lambda0: 1.0,
            st_vol: 2.0,
            order: Self::DEFAULT_ORDER,
        }
    }
}

/// A loop integral at a concrete dimension, as an ε-series, or both.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopValue {
    pub exact_d: Option<(f64, Complex)>,
    pub series: Option<EpsSeries>,
}

impl LoopValue {
    pub fn exact(d: f64, value: Complex) -> Self {
        Self {
            exact_d: Some((d, value)),
            series: None,
        }
    }

    pub fn series(series: EpsSeries) -> Self {
        Self {
            exact_d: None,
            series: Some(series),
        }
    }

    /// Distance between the series at ε = d − 4 and the exact value.
    pub fn mismatch(&self) -> Option<f64> {
        match (&self.exact_d, &self.series) {
            (Some((d, v)), Some(s)) => Some((s.eval(d - 4.0) - v).norm()),
            _ => None,
        }
    }
}

/// Which closed form of χ_j to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChiForm {
    /// Beta-function evaluation of the Feynman-parameter integral.
    #[default]
    FeynmanParameter,
    /// The harmonic-number form carrying an extra (−1)^j.
    PrintedHarmonic,
}

impl ChiForm {
    fn sign(self, j: u32) -> f64 {
        match self {
            Self::FeynmanParameter => 1.0,
            Self::PrintedHarmonic => parity(j),
        }
    }
}

fn parity(j: u32) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn check_mass(m2: f64) -> Result<()> {
    if m2 > 0.0 && m2.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter("m^2 must be positive and finite"))
    }
}

/// ln(−m²) on the +iπ branch.
pub fn ln_minus(m2: f64) -> Complex {
    Complex::new(m2.ln(), PI)
}

/// Δ_j at dimension d: i(−1)^{j+1} m^{d−2(j+1)} (4π)^{−d/2} Γ(j+1−d/2)/Γ(j+1).
pub fn delta_closed(j: u32, m2: f64, d: f64) -> Result<Complex> {
    check_mass(m2)?;
    let jf = j as f64;
    let g = gamma(Complex::new(jf + 1.0 - 0.5 * d, 0.0))?;
    let pref = -parity(j) * m2.powf(0.5 * d - jf - 1.0) * (4.0 * PI).powf(-0.5 * d)
        / specialfns::factorial(j);
    Ok(I * g * pref)
}

/// ε-expansion of Δ_j(m²) around d = 4 to order `order`.
pub fn delta_series_at(j: u32, m2: f64, order: i32) -> Result<EpsSeries> {
    check_mass(m2)?;
    let inner = order + 1;
    let jf = j as f64;
    let gamma_part = gamma_series(Complex::new(jf - 1.0, 0.0), Complex::new(-0.5, 0.0), inner)?;
    let mass_part = power_series(Complex::new(m2, 0.0), Complex::new(0.5, 0.0), inner)?;
    let fourpi = power_series(Complex::new(4.0 * PI, 0.0), Complex::new(-0.5, 0.0), inner)?;
    let pref = -parity(j) * m2.powf(1.0 - jf) / (16.0 * PI * PI) / specialfns::factorial(j);
    Ok(gamma_part
        .checked_mul(&mass_part)?
        .checked_mul(&fourpi)?
        .scale(I * pref)
        .truncate(order))
}

pub fn delta_series(j: u32, params: &SchemeParams) -> Result<EpsSeries> {
    delta_series_at(j, params.m2(), params.order())
}

/// χ_j at dimension d: Δ_j·[H_j − H_{j−d/2} + ln(−m²)], times (−1)^j in the printed form.
pub fn chi_closed(j: u32, m2: f64, d: f64, form: ChiForm) -> Result<Complex> {
    let delta = delta_closed(j, m2, d)?;
    let hj = harmonic(Complex::new(j as f64, 0.0))?;
    let hjd = harmonic(Complex::new(j as f64 - 0.5 * d, 0.0))?;
    Ok(delta * (hj - hjd + ln_minus(m2)) * form.sign(j))
}

/// ε-expansion of χ_j(m²) around d = 4.
pub fn chi_series_at(j: u32, m2: f64, order: i32, form: ChiForm) -> Result<EpsSeries> {
    let inner = order + 2;
    let delta = delta_series_at(j, m2, inner)?;
    let hj = harmonic(Complex::new(j as f64, 0.0))?;
    // H_{j−d/2} = H_{j−2−ε/2}
    let hjd = harmonic_series(
        Complex::new(j as f64 - 2.0, 0.0),
        Complex::new(-0.5, 0.0),
        inner,
    )?;
    let bracket = &EpsSeries::constant(hj + ln_minus(m2), inner) - &hjd;
    Ok(delta
        .checked_mul(&bracket)?
        .scale(Complex::new(form.sign(j), 0.0))
        .truncate(order))
}

pub fn chi_series(j: u32, params: &SchemeParams, form: ChiForm) -> Result<EpsSeries> {
    chi_series_at(j, params.m2(), params.order(), form)
}

/// Bubble η(r) at dimension d from its Feynman-parameter integral.
///
/// `r2` is the Euclidean squared momentum.
pub fn eta(r2: f64, m2: f64, d: f64) -> Result<Complex> {
    check_mass(m2)?;
    if !(r2 >= 0.0 && r2.is_finite()) {
        return Err(Error::InvalidParameter(
            "r^2 must be nonnegative and finite",
        ));
    }
    let pref = -I * gamma(Complex::new(3.0 - 0.5 * d, 0.0))? * (4.0 * PI).powf(-0.5 * d);
    let p = 0.5 * d - 3.0;
    let cfg = QuadConfig::default().with_rel_tol(1e-13);
    let integral = quad::integrate_real(
        |x| (1.0 - x) * (r2 * x * (1.0 - x) + m2).powf(p),
        0.0,
        1.0,
        &cfg,
    )?;
    Ok(pref * integral)
}

/// artanh(q)/q with the q → 0 limit.
fn artanh_over(q: f64) -> f64 {
    if q.abs() < 1e-4 {
        let q2 = q * q;
        1.0 + q2 / 3.0 + q2 * q2 / 5.0
    } else {
        q.atanh() / q
    }
}

/// η(r) at d = 4 in closed form: −i·artanh(r/R)/(8π² r R) with R = √(4m² + r²).
pub fn eta_d4_closed(r2: f64, m2: f64) -> Result<Complex> {
    check_mass(m2)?;
    if !(r2 >= 0.0 && r2.is_finite()) {
        return Err(Error::InvalidParameter(
            "r^2 must be nonnegative and finite",
        ));
    }
    let big_r2 = 4.0 * m2 + r2;
    let q = (r2 / big_r2).sqrt();
    Ok(-I * artanh_over(q) / (8.0 * PI * PI * big_r2))
}

/// The arctan expression −i·arctan(r/√(−m²−r²))/(8π² r √(−m²−r²)) evaluated literally.
///
/// It differs from [`eta_d4_closed`] in sign and in having m² where 4m² belongs.
pub fn eta_arctan_printed(r2: f64, m2: f64) -> Result<Complex> {
    check_mass(m2)?;
    if !(r2 >= 0.0 && r2.is_finite()) {
        return Err(Error::InvalidParameter(
            "r^2 must be nonnegative and finite",
        ));
    }
    let s = Complex::new(-m2 - r2, 0.0).sqrt();
    let r = r2.sqrt();
    let ratio = if r == 0.0 {
        Complex::new(1.0, 0.0) / s
    } else {
        (Complex::new(r, 0.0) / s).atan() / r
    };
    Ok(-I * ratio / (8.0 * PI * PI * s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex, b: Complex, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    #[test]
    fn params_are_validated() {
        assert!(SchemeParams::new(0.0, 1.0, 1.0, 2.0).is_err());
        assert!(SchemeParams::new(1.0, -1.0, 1.0, 2.0).is_err());
        assert!(SchemeParams::new(1.0, 1.0, f64::NAN, 2.0).is_err());
        assert!(SchemeParams::new(1.0, 1.0, 1.0, 0.0).is_err());
        let p = SchemeParams::from_tv(2.0, 1.0, 0.5, 3.0).unwrap();
        assert_eq!((p.st_vol(), p.tv(), p.m2()), (6.0, 3.0, 4.0));
    }

    #[test]
    fn delta_known_values() {
        assert!(close(
            delta_closed(1, 1.0, 2.0).unwrap(),
            I / (4.0 * PI),
            1e-14
        ));
        let want = -I / (32.0 * PI * PI);
        assert!(close(delta_closed(2, 1.0, 4.0).unwrap(), want, 1e-14));
        assert!(close(delta_closed(2, 4.0, 4.0).unwrap(), want / 4.0, 1e-14));
        assert!(matches!(delta_closed(0, 1.0, 4.0), Err(Error::Pole(_))));
        assert!(matches!(delta_closed(1, 1.0, 4.0), Err(Error::Pole(_))));
    }

    #[test]
    fn delta_series_pole_structure() {
        // Δ₀ = −i m²/(16π²)·Γ(−1 − ε/2)·… and Γ(−1 − ε/2) = 2/ε + …
        let s = delta_series_at(0, 3.0, 2).unwrap();
        assert!(close(s.coeff(-1, 0), -I * 6.0 / (16.0 * PI * PI), 1e-14));
        // Δ₁ = i/(16π²)·Γ(−ε/2)·… and Γ(−ε/2) = −2/ε + …
        let s1 = delta_series_at(1, 1.0, 2).unwrap();
        assert!(close(s1.coeff(-1, 0), -I * 2.0 / (16.0 * PI * PI), 1e-14));
        let s3 = delta_series_at(3, 1.0, 2).unwrap();
        assert_eq!(s3.leading_power(), Some(0));
        assert!(close(
            s3.finite_part(),
            delta_closed(3, 1.0, 4.0).unwrap(),
            1e-14
        ));
        assert!(close(s3.finite_part(), I / (96.0 * PI * PI), 1e-14));
    }

    #[test]
    fn delta_series_matches_closed_at_small_eps() {
        for j in 0..4 {
            for &m2 in &[0.5, 1.0, 3.0] {
                let s = delta_series_at(j, m2, 2).unwrap();
                for &eps in &[1e-3, -1e-3] {
                    let exact = delta_closed(j, m2, 4.0 + eps).unwrap();
                    let err = (s.eval(eps) - exact).norm() / exact.norm();
                    assert!(err < 1e-8, "j = {j}, m2 = {m2}, err = {err}");
                }
            }
        }
    }

    #[test]
    fn chi_known_values() {
        let v = chi_closed(1, 1.0, 2.0, ChiForm::FeynmanParameter).unwrap();
        assert!(close(v, Complex::new(-PI, 1.0) / (4.0 * PI), 1e-14));
        let printed = chi_closed(1, 1.0, 2.0, ChiForm::PrintedHarmonic).unwrap();
        assert!(close(printed, -v, 1e-15));
        let even = chi_closed(2, 2.0, 2.5, ChiForm::PrintedHarmonic).unwrap();
        assert_eq!(
            even,
            chi_closed(2, 2.0, 2.5, ChiForm::FeynmanParameter).unwrap()
        );
        // at m² = 1 the logarithm is the branch term alone
        assert_eq!(ln_minus(1.0), Complex::new(0.0, PI));
    }

    #[test]
    fn chi_series_matches_closed_at_small_eps() {
        for j in 0..4 {
            let s = chi_series_at(j, 1.7, 2, ChiForm::FeynmanParameter).unwrap();
            for &eps in &[2e-3, -2e-3] {
                let exact = chi_closed(j, 1.7, 4.0 + eps, ChiForm::FeynmanParameter).unwrap();
                let err = (s.eval(eps) - exact).norm() / exact.norm();
                assert!(err < 1e-7, "j = {j}, err = {err}");
            }
        }
    }

    #[test]
    fn chi0_double_pole() {
        // χ₀ = Δ₀·(−2/ε + …) so the ε⁻² coefficient is −2·Res Δ₀ = i·4m²/(16π²)
        let s = chi_series_at(0, 2.0, 1, ChiForm::FeynmanParameter).unwrap();
        assert!(close(s.coeff(-2, 0), I * 8.0 / (16.0 * PI * PI), 1e-14));
    }

    #[test]
    fn eta_limits() {
        let want = -I / (32.0 * PI * PI);
        assert!(close(eta(0.0, 1.0, 4.0).unwrap(), want, 1e-14));
        assert!(close(eta_d4_closed(0.0, 1.0).unwrap(), want, 1e-14));
        for &(r2, m2) in &[(1.0, 1.0), (0.3, 2.0), (25.0, 0.5), (1e-9, 1.0)] {
            let closed = eta_d4_closed(r2, m2).unwrap();
            let feynman = eta(r2, m2, 4.0).unwrap();
            assert!(close(closed, feynman, 1e-10), "r2 = {r2}");
        }
    }

    #[test]
    fn printed_arctan_form_is_a_different_function() {
        // literal evaluation equals +i·artanh(r/R)/(8π² r R) with R = √(m² + r²)
        let (r2, m2) = (1.0, 1.0);
        let big_r = (m2 + r2).sqrt();
        let r = r2.sqrt();
        let want = I * (r / big_r).atanh() / (8.0 * PI * PI * r * big_r);
        let printed = eta_arctan_printed(r2, m2).unwrap();
        assert!(close(printed, want, 1e-13));
        // the substitution m² → m²/4 and a sign flip recover the bubble
        let fixed = -eta_arctan_printed(r2, 4.0 * m2).unwrap();
        assert!(close(fixed, eta_d4_closed(r2, m2).unwrap(), 1e-13));
    }

    #[test]
    fn loop_value_mismatch() {
        let s = delta_series_at(2, 1.0, 2).unwrap();
        let v = LoopValue {
            exact_d: Some((4.01, delta_closed(2, 1.0, 4.01).unwrap())),
            series: Some(s),
        };
        assert!(v.mismatch().unwrap() < 1e-8);
        assert_eq!(LoopValue::series(EpsSeries::zero(0)).mismatch(), None);
    }
}
