//! Contour coefficients of the bubble trace along s = −it, t ∈ [0, 1).
//!
//! On that segment arctan(−it) = −i·artanh(t), so the coefficient `b` is a
//! real integral whose integrand grows like 1/(1 − t)² at the endpoint. Both
//! coefficients are therefore reported together with the cutoff δ at which
//! the segment was truncated.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};
use crate::specialfns::{EULER_GAMMA, ZETA3};
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourConfig {
    endpoint_cut: f64,
    tol: f64,
    max_evals: usize,
}

impl ContourConfig {
    pub fn new(endpoint_cut: f64, tol: f64, max_evals: usize) -> Result<Self> {
        if !(endpoint_cut > 0.0 && endpoint_cut < 1.0) {
            return Err(Error::InvalidParameter("endpoint cut must lie in (0, 1)"));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParameter("tolerance must lie in (0, 1)"));
        }
        if max_evals < 15 {
            return Err(Error::InvalidParameter("max_evals must allow one rule"));
        }
        Ok(Self {
            endpoint_cut,
            tol,
            max_evals,
        })
    }

    pub fn with_cut(endpoint_cut: f64) -> Result<Self> {
        let d = Self::default();
        Self::new(endpoint_cut, d.tol, d.max_evals)
    }

    pub fn endpoint_cut(&self) -> f64 {
        self.endpoint_cut
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_evals(&self) -> usize {
        self.max_evals
    }

    fn quad(&self) -> QuadConfig {
        QuadConfig {
            rel_tol: self.tol,
            abs_tol: 1e-300,
            max_evals: self.max_evals,
        }
    }
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self {
            endpoint_cut: 0.05,
            tol: 1e-9,
            max_evals: 1_000_000,
        }
    }
}

/// A cutoff-dependent value; `delta` is `None` when the integral converged without one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regulated {
    pub value: Complex,
    pub delta: Option<f64>,
}

/// How the finite part of the contour ratio is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatioMode {
    /// Replace a/b by the closed-form constant τ.
    #[default]
    Tau,
    /// Use the regulated quadrature values of a and b.
    Quadrature,
}

/// Integrand pieces at t = 1 − u, keeping precision as u → 0.
#[derive(Clone, Copy)]
struct Point {
    t: f64,
    /// 1 − t²
    one_minus_t2: f64,
    artanh: f64,
}

impl Point {
    fn from_t(t: f64) -> Self {
        Self {
            t,
            one_minus_t2: 1.0 - t * t,
            artanh: t.atanh(),
        }
    }

    fn from_u(u: f64) -> Self {
        Self {
            t: 1.0 - u,
            one_minus_t2: u * (2.0 - u),
            artanh: 0.5 * ((2.0 - u) / u).ln(),
        }
    }

    /// artanh(t)/t with the t → 0 limit.
    fn artanh_over_t(&self) -> f64 {
        if self.t.abs() < 1e-4 {
            let t2 = self.t * self.t;
            1.0 + t2 / 3.0 + t2 * t2 / 5.0
        } else {
            self.artanh / self.t
        }
    }
}

/// ∫₀^{1−δ} f(point) dt, switching to u = 1 − t on the upper half.
fn segment<F>(f: F, delta: f64, cfg: &QuadConfig) -> Result<Complex>
where
    F: Fn(Point) -> Complex,
{
    if delta >= 0.5 {
        return Ok(quad::integrate(|t| f(Point::from_t(t)), 0.0, 1.0 - delta, cfg)?.value);
    }
    let lower = quad::integrate(|t| f(Point::from_t(t)), 0.0, 0.5, cfg)?;
    let upper = quad::integrate(|u| f(Point::from_u(u)), delta, 0.5, cfg)?;
    Ok(lower.value + upper.value)
}

fn b_integrand(p: Point) -> f64 {
    p.t * p.t * p.artanh / (p.one_minus_t2 * p.one_minus_t2)
}

/// b = (1/8π²)∫₀^{1−δ} t² artanh(t)/(1 − t²)² dt.
pub fn coeff_b(cfg: &ContourConfig) -> Result<Regulated> {
    let v = segment(
        |p| Complex::new(b_integrand(p), 0.0),
        cfg.endpoint_cut,
        &cfg.quad(),
    )?;
    Ok(Regulated {
        value: v / (8.0 * PI * PI),
        delta: Some(cfg.endpoint_cut),
    })
}

/// a: the b integrand weighted by ln[(1 − t²)artanh(t)/(8π² t)] + iπ/2.
pub fn coeff_a(cfg: &ContourConfig) -> Result<Regulated> {
    let v = segment(
        |p| {
            let log = (p.one_minus_t2 * p.artanh_over_t() / (8.0 * PI * PI)).ln();
            Complex::new(log, 0.5 * PI) * b_integrand(p)
        },
        cfg.endpoint_cut,
        &cfg.quad(),
    )?;
    Ok(Regulated {
        value: v / (8.0 * PI * PI),
        delta: Some(cfg.endpoint_cut),
    })
}

/// τ = ¼[−2γ − ln 4 + 12 + 3ζ(3)].
pub fn tau() -> f64 {
    0.25 * (-2.0 * EULER_GAMMA - 4.0f64.ln() + 12.0 + 3.0 * ZETA3)
}

/// A/B = a/b + ln(m₀²).
pub fn ratio_ab(m0: f64, cfg: &ContourConfig, mode: RatioMode) -> Result<Regulated> {
    if !(m0 > 0.0 && m0.is_finite()) {
        return Err(Error::InvalidParameter("m0 must be positive and finite"));
    }
    let log_m2 = Complex::new(2.0 * m0.ln(), 0.0);
    match mode {
        RatioMode::Tau => Ok(Regulated {
            value: Complex::new(tau(), 0.0) + log_m2,
            delta: None,
        }),
        RatioMode::Quadrature => {
            let a = coeff_a(cfg)?;
            let b = coeff_b(cfg)?;
            Ok(Regulated {
                value: a.value / b.value + log_m2,
                delta: Some(cfg.endpoint_cut),
            })
        }
    }
}

/// ∫₀^{1−δ} t^{3−n} artanhⁿ(t) (1 − t²)^{n−3} dt; for n ≥ 3 the cut is dropped.
pub fn power_moment(n: u32, cfg: &ContourConfig) -> Result<Regulated> {
    if n < 2 {
        return Err(Error::InvalidParameter("power moment needs n >= 2"));
    }
    let nf = n as i32;
    let f = |p: Point| {
        let v = p.artanh_over_t().powi(nf) * p.t.powi(3) * p.one_minus_t2.powi(nf - 3);
        Complex::new(v, 0.0)
    };
    if n == 2 {
        let v = segment(f, cfg.endpoint_cut, &cfg.quad())?;
        return Ok(Regulated {
            value: v,
            delta: Some(cfg.endpoint_cut),
        });
    }
    let q = cfg.quad();
    let lower = quad::integrate(|t| f(Point::from_t(t)), 0.0, 0.5, &q)?;
    let upper = quad::integrate(|u| f(Point::from_u(u)), 0.0, 0.5, &q)?;
    Ok(Regulated {
        value: lower.value + upper.value,
        delta: None,
    })
}
