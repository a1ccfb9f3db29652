//! Regularized entropies of the two-point, four-point and vacuum states.
//!
//! Functions named after a quantity return its closed ε-expansion. The
//! `*_derived` variants rebuild the same quantity from the Δ/χ series, which
//! keeps every intermediate imaginary part visible.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::contour::{self, ContourConfig, RatioMode, Regulated};
use crate::error::{Error, Result};
use crate::loops::{
    chi_closed, chi_series_at, delta_closed, delta_series_at, eta_d4_closed, ChiForm, SchemeParams,
};
use crate::quad::{self, QuadConfig};
use crate::series::{branch_ln, gamma_series, power_series, EpsSeries, PoleParts};
use crate::specialfns::{gamma, EULER_GAMMA};
use crate::Complex;

const I: Complex = Complex::new(0.0, 1.0);

fn re(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

/// An entropy split into the parts every report shows.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyBreakdown {
    pub name: &'static str,
    pub series: EpsSeries,
    /// Re of the ε⁰ coefficient.
    pub finite: f64,
    /// Largest |Im| over all coefficients.
    pub residual_im: f64,
    pub pole2: Complex,
    pub pole1: Complex,
    pub logeps: Complex,
    /// Set when `residual_im` exceeds the tolerance.
    pub non_real: bool,
}

impl EntropyBreakdown {
    pub const IM_TOLERANCE: f64 = 1e-9;

    pub fn new(name: &'static str, series: EpsSeries) -> Self {
        Self::with_tolerance(name, series, Self::IM_TOLERANCE)
    }

    pub fn with_tolerance(name: &'static str, series: EpsSeries, tol: f64) -> Self {
        let PoleParts {
            pole2,
            pole1,
            logeps,
        } = series.pole_parts();
        let residual_im = series
            .terms()
            .map(|(_, _, c)| c.im.abs())
            .fold(0.0, f64::max);
        Self {
            name,
            finite: series.finite_part().re,
            residual_im,
            pole2,
            pole1,
            logeps,
            non_real: residual_im > tol,
            series,
        }
    }
}

fn printed(name: &'static str, terms: &[(i32, u32, f64)]) -> EntropyBreakdown {
    let series = EpsSeries::from_terms(terms.iter().map(|&(k, l, c)| (k, l, re(c))), 0)
        .expect("printed expansions stay inside the series capacity");
    EntropyBreakdown::new(name, series)
}

/// ln(m₀⁴TV/(4π²)).
fn log_mass_volume(m0: f64, tv: f64) -> f64 {
    (m0.powi(4) * tv / (4.0 * PI * PI)).ln()
}

/// (1/16π²)(2γ − 1 + ln(m₀⁴/(16π²μ⁴))).
fn order1_finite_bracket(params: &SchemeParams) -> f64 {
    let log = (params.m0().powi(4) / (16.0 * PI * PI * params.mu().powi(4))).ln();
    (2.0 * EULER_GAMMA - 1.0 + log) / (16.0 * PI * PI)
}

/// External entropy of the free two-point state: −2/ε − 1 + ln(m₀⁴TV/(4π²ε)).
pub fn s_ext_2_order0(params: &SchemeParams) -> EntropyBreakdown {
    let l = log_mass_volume(params.m0(), params.tv());
    printed(
        "s_ext_2_order0",
        &[(-1, 0, -2.0), (0, 0, -1.0 + l), (0, 1, -1.0)],
    )
}

/// Order-λ₀ correction (λ₀/2)[1/(4π²ε) + (1/16π²)(2γ − 1 + ln(m₀⁴/(16π²μ⁴)))].
pub fn s_ext_2_order1(params: &SchemeParams) -> EntropyBreakdown {
    let lam = params.lambda0();
    printed(
        "s_ext_2_order1",
        &[
            (-1, 0, lam / (8.0 * PI * PI)),
            (0, 0, 0.5 * lam * order1_finite_bracket(params)),
        ],
    )
}

/// Combined external entropy through order λ₀, with its finite constant −1/2.
pub fn s_ext_2_total(params: &SchemeParams) -> EntropyBreakdown {
    let lam = params.lambda0();
    let l = log_mass_volume(params.m0(), params.tv());
    printed(
        "s_ext_2_total",
        &[
            (-1, 0, lam / (8.0 * PI * PI) - 1.0),
            (0, 0, -0.5 + l + 0.5 * lam * order1_finite_bracket(params)),
            (0, 1, -1.0),
        ],
    )
}

/// The sum of the order-0 and order-λ₀ expansions term by term.
pub fn s_ext_2_total_composed(params: &SchemeParams) -> EntropyBreakdown {
    let series = &s_ext_2_order0(params).series + &s_ext_2_order1(params).series;
    EntropyBreakdown::new("s_ext_2_total_composed", series)
}

/// External entropy of the normalized first-order state: −4/ε + 2 + ln(m₀⁴TV/(4π²ε)).
pub fn s_ext_21(params: &SchemeParams) -> EntropyBreakdown {
    let l = log_mass_volume(params.m0(), params.tv());
    printed("s_ext_21", &[(-1, 0, -4.0), (0, 0, 2.0 + l), (0, 1, -1.0)])
}

/// Internal entropy of the normalized first-order state: −2/ε − 1 + ln(m₀⁴TV/(4π²ε)).
pub fn s_int_21(params: &SchemeParams) -> EntropyBreakdown {
    let l = log_mass_volume(params.m0(), params.tv());
    printed("s_int_21", &[(-1, 0, -2.0), (0, 0, -1.0 + l), (0, 1, -1.0)])
}

/// Which powers of m₀ enter the total first-order entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassReading {
    /// ln(m₀⁴TV/(32π⁴ε²)) already contains the ln m₀² of the contour ratio.
    #[default]
    Printed,
    /// Adds the contour ratio's ln m₀² on top of the printed m₀⁴.
    ExtraRatioLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TotalOptions {
    pub ratio: RatioMode,
    pub reading: MassReading,
    pub contour: ContourConfig,
}

/// Total entropy of the first-order state: τ + ln(m₀⁴TV/(32π⁴ε²)).
pub fn s_total_21(params: &SchemeParams) -> EntropyBreakdown {
    s_total_21_with(params, &TotalOptions::default()).expect("closed-form mode cannot fail")
}

/// [`s_total_21`] with the ratio taken from quadrature or the extra mass log.
pub fn s_total_21_with(params: &SchemeParams, opts: &TotalOptions) -> Result<EntropyBreakdown> {
    let ratio = match opts.ratio {
        RatioMode::Tau => re(contour::tau()),
        RatioMode::Quadrature => {
            let a = contour::coeff_a(&opts.contour)?.value;
            let b = contour::coeff_b(&opts.contour)?.value;
            a / b
        }
    };
    let extra = match opts.reading {
        MassReading::Printed => 0.0,
        MassReading::ExtraRatioLog => params.m2().ln(),
    };
    let log = (params.m0().powi(4) * params.tv() / (32.0 * PI.powi(4))).ln();
    let series = EpsSeries::zero(0)
        .with_term(0, 0, ratio + log + extra)
        .with_term(0, 1, re(-2.0));
    Ok(EntropyBreakdown::new("s_total_21", series))
}

/// Mutual information both as ext + int − total and in its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct MutualInformation {
    pub compositional: EntropyBreakdown,
    pub printed: EntropyBreakdown,
}

impl MutualInformation {
    pub fn max_coeff_diff(&self) -> f64 {
        self.compositional
            .series
            .max_coeff_diff(&self.printed.series)
    }
}

/// I = S_ext + S_int − S_total; closed form −6/ε + 1 − τ + ln(2m₀⁴TV).
pub fn mutual_information_21(params: &SchemeParams) -> MutualInformation {
    let composed =
        &(&s_ext_21(params).series + &s_int_21(params).series) - &s_total_21(params).series;
    let closed = 1.0 - contour::tau() + (2.0 * params.m0().powi(4) * params.tv()).ln();
    MutualInformation {
        compositional: EntropyBreakdown::new("mutual21", composed),
        printed: printed("mutual21_closed", &[(-1, 0, -6.0), (0, 0, closed)]),
    }
}

/// (S(ext|int), S(int|ext)) = (S_total − S_int, S_total − S_ext).
pub fn conditional_entropies_21(params: &SchemeParams) -> (EntropyBreakdown, EntropyBreakdown) {
    let total = s_total_21(params).series;
    (
        EntropyBreakdown::new("cond_ext_int", &total - &s_int_21(params).series),
        EntropyBreakdown::new("cond_int_ext", &total - &s_ext_21(params).series),
    )
}

/// ln β⁰ − t₀₀/β⁰ − g·W₁/(W₀(β⁰)²)·[β¹t₀₀ − β⁰t₁₀] with g the coupling of the first-order term.
#[allow(clippy::too_many_arguments)]
pub fn entropy_order1_generic(
    beta0: &EpsSeries,
    beta1: &EpsSeries,
    t00: &EpsSeries,
    t10: &EpsSeries,
    w0: f64,
    w1: f64,
    coupling: Complex,
) -> Result<EpsSeries> {
    if w0 == 0.0 {
        return Err(Error::InvalidParameter("W0 must be nonzero"));
    }
    let inv_beta0 = beta0.inv()?;
    let zeroth = &beta0.ln()? - &t00.checked_mul(&inv_beta0)?;
    if coupling == re(0.0) || w1 == 0.0 {
        return Ok(zeroth);
    }
    let bracket = &beta1.checked_mul(t00)? - &beta0.checked_mul(t10)?;
    let first = bracket
        .checked_mul(&inv_beta0.checked_mul(&inv_beta0)?)?
        .scale(coupling * (w1 / w0));
    Ok(&zeroth - &first)
}

/// Series inputs of the generic formula for the two-point state.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericInputs {
    pub beta0: EpsSeries,
    pub beta1: EpsSeries,
    pub t00: EpsSeries,
    pub t10: EpsSeries,
    pub w0: f64,
    pub w1: f64,
    /// −iλ₀
    pub coupling: Complex,
}

/// β⁰ = i2TVΔ₀, t₀₀ = −2TV(π/2·Δ₀ + iχ₀), β¹ = −i2TVΔ₀Δ₁, t₁₀ = −i2TVΔ₀(iπ/2·Δ₁ − χ₁).
pub fn two_point_inputs(params: &SchemeParams) -> Result<GenericInputs> {
    let order = params.order() + 2;
    let m2 = params.m2();
    let v = params.st_vol();
    let d0 = delta_series_at(0, m2, order)?;
    let d1 = delta_series_at(1, m2, order)?;
    let c0 = chi_series_at(0, m2, order, ChiForm::FeynmanParameter)?;
    let c1 = chi_series_at(1, m2, order, ChiForm::FeynmanParameter)?;
    let half_pi = 0.5 * PI;
    Ok(GenericInputs {
        beta0: d0.scale(I * v),
        beta1: d0.checked_mul(&d1)?.scale(-I * v),
        t00: (&d0.scale(re(half_pi)) + &c0.scale(I)).scale(re(-v)),
        t10: d0
            .checked_mul(&(&d1.scale(I * half_pi) - &c1))?
            .scale(-I * v),
        w0: 1.0,
        w1: 0.5,
        coupling: -I * params.lambda0(),
    })
}

impl GenericInputs {
    pub fn evaluate(&self) -> Result<EpsSeries> {
        entropy_order1_generic(
            &self.beta0,
            &self.beta1,
            &self.t00,
            &self.t10,
            self.w0,
            self.w1,
            self.coupling,
        )
    }
}

struct LoopSeries {
    d0: EpsSeries,
    d1: EpsSeries,
    c0: EpsSeries,
    c1: EpsSeries,
}

fn loop_series(m2: f64, order: i32) -> Result<LoopSeries> {
    let inner = order + 2;
    Ok(LoopSeries {
        d0: delta_series_at(0, m2, inner)?,
        d1: delta_series_at(1, m2, inner)?,
        c0: chi_series_at(0, m2, inner, ChiForm::FeynmanParameter)?,
        c1: chi_series_at(1, m2, inner, ChiForm::FeynmanParameter)?,
    })
}

/// ln(2TV·Δ₀(m²)) + χ₀(m²)/Δ₀(m²) to order `order`.
fn tadpole_entropy(m2: f64, st_vol: f64, order: i32) -> Result<EpsSeries> {
    let l = loop_series(m2, order)?;
    let log = l.d0.scale(re(st_vol)).ln()?;
    Ok((&log + &l.c0.checked_div(&l.d0)?).truncate(order))
}

/// ln(2TVΔ₀) + χ₀/Δ₀ from the loop series.
pub fn s_ext_2_order0_derived(params: &SchemeParams) -> Result<EntropyBreakdown> {
    let s = tadpole_entropy(params.m2(), params.st_vol(), params.order())?;
    Ok(EntropyBreakdown::new("s_ext_2_order0_derived", s))
}

/// −i(λ₀/2)(χ₁ − χ₀Δ₁/Δ₀)·μ^{−ε} from the loop series.
pub fn s_ext_2_order1_derived(params: &SchemeParams) -> Result<EntropyBreakdown> {
    let order = params.order();
    let l = loop_series(params.m2(), order)?;
    let mixed = &l.c1 - &l.c0.checked_mul(&l.d1)?.checked_div(&l.d0)?;
    let mu = power_series(re(params.mu()), re(-1.0), order + 3)?;
    let s = mixed
        .checked_mul(&mu)?
        .scale(-I * 0.5 * params.lambda0())
        .truncate(order);
    Ok(EntropyBreakdown::new("s_ext_2_order1_derived", s))
}

/// 2χ₁/Δ₁ + ln(2TVΔ₁) from the loop series.
pub fn s_ext_21_derived(params: &SchemeParams) -> Result<EntropyBreakdown> {
    let order = params.order();
    let l = loop_series(params.m2(), order)?;
    let ratio = l.c1.checked_div(&l.d1)?.scale(re(2.0));
    let log = l.d1.scale(re(params.st_vol())).ln()?;
    Ok(EntropyBreakdown::new(
        "s_ext_21_derived",
        (&ratio + &log).truncate(order),
    ))
}

/// τ + ln m₀² + ln(2TVΔ₀Δ₁) from the loop series.
pub fn s_total_21_derived(params: &SchemeParams) -> Result<EntropyBreakdown> {
    let order = params.order();
    let l = loop_series(params.m2(), order)?;
    let log = l.d0.checked_mul(&l.d1)?.scale(re(params.st_vol())).ln()?;
    let shift = EpsSeries::real(contour::tau() + params.m2().ln(), order);
    Ok(EntropyBreakdown::new(
        "s_total_21_derived",
        (&log + &shift).truncate(order),
    ))
}

/// ∫ d⁴r/(2π)⁴ ηⁿ(r) through t = r/√(4m₀² + r²).
///
/// Finite for n ≥ 3; for n = 2 the value depends on the cut δ and carries it.
pub fn renyi_trace_n(n: u32, params: &SchemeParams, cfg: &ContourConfig) -> Result<Regulated> {
    if n < 2 {
        return Err(Error::InvalidParameter("renyi_trace_n needs n >= 2"));
    }
    let m2 = params.m2();
    let moment = contour::power_moment(n, cfg)?;
    let pref = 2.0 * m2 * m2 / (PI * PI) * (-I / (32.0 * PI * PI * m2)).powu(n);
    Ok(Regulated {
        value: pref * moment.value,
        delta: moment.delta,
    })
}

/// (1/8π²)∫₀^∞ r³ ηⁿ(r) dr by direct radial quadrature of the d = 4 bubble.
pub fn renyi_trace_radial(n: u32, params: &SchemeParams) -> Result<Complex> {
    if n < 3 {
        return Err(Error::NonConvergent("radial trace diverges for n < 3"));
    }
    let m2 = params.m2();
    let r = quad::integrate_to_infinity(
        |r| {
            let e = eta_d4_closed(r * r, m2).expect("mass validated by SchemeParams");
            e.powu(n) * r.powi(3)
        },
        0.0,
        &QuadConfig::default(),
    )?;
    Ok(r.value / (8.0 * PI * PI))
}

/// vacA = 96π²[1 − γ + ln(4πμ²)].
pub fn vac_a(mu: f64) -> f64 {
    96.0 * PI * PI * (1.0 - EULER_GAMMA + (4.0 * PI * mu * mu).ln())
}

/// vacB = 18 + 12(γ − 2)γ + π² + 12 ln(4πμ)[ln(4πμ) + 2 − 2γ].
pub fn vac_b(mu: f64) -> f64 {
    let l = (4.0 * PI * mu).ln();
    18.0 + 12.0 * (EULER_GAMMA - 2.0) * EULER_GAMMA
        + PI * PI
        + 12.0 * l * (l + 2.0 - 2.0 * EULER_GAMMA)
}

/// vacF(m₀²) = 48m₀⁴ ln m₀ [−1 + γ + ln(m₀/(4πμ))].
pub fn vac_f(m0: f64, mu: f64) -> f64 {
    48.0 * m0.powi(4) * m0.ln() * (-1.0 + EULER_GAMMA + (m0 / (4.0 * PI * mu)).ln())
}

/// Source of the bracket multiplying −(λ₀/4)TV in the vacuum entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VacuumForm {
    /// The published coefficients with vacA, vacB, vacF and the −8π² pole term.
    Printed,
    /// X² − X/m₀² with X = m₀²(m₀²/(4πμ))^{ε/2}Γ(−1 − ε/2)/(16π²).
    #[default]
    Derived,
}

/// The bracket of the vacuum entropy as an ε-series.
pub fn vacuum_bracket(params: &SchemeParams, form: VacuumForm) -> Result<EpsSeries> {
    let m0 = params.m0();
    let m2 = params.m2();
    let mu = params.mu();
    match form {
        VacuumForm::Printed => {
            let lead = m2 * m2 / (64.0 * PI.powi(4));
            let pole1 = lead * (EULER_GAMMA - 1.0 - (4.0 * PI * mu / m2).ln()) - 8.0 * PI * PI;
            let finite = (vac_a(mu) + vac_b(mu) * m2 * m2 + vac_f(m0, mu)) / (1536.0 * PI.powi(4));
            EpsSeries::from_terms(
                [(-2, 0, re(lead)), (-1, 0, re(pole1)), (0, 0, re(finite))],
                0,
            )
        }
        VacuumForm::Derived => {
            let order = params.order();
            let g = gamma_series(re(-1.0), re(-0.5), order + 3)?;
            let scale = power_series(re(m2 / (4.0 * PI * mu)), re(0.5), order + 3)?;
            let x = g.checked_mul(&scale)?.scale(re(m2 / (16.0 * PI * PI)));
            let bracket = &x.checked_mul(&x)? - &x.scale(re(1.0 / m2));
            Ok(bracket.truncate(order))
        }
    }
}

/// S⁽⁰⁾/ln(2TV) = 1 − (λ₀/4)TV·bracket.
pub fn s_vacuum_order1(params: &SchemeParams, form: VacuumForm) -> Result<EntropyBreakdown> {
    let bracket = vacuum_bracket(params, form)?;
    let one = EpsSeries::real(1.0, bracket.kmax());
    let s = &one - &bracket.scale(re(0.25 * params.lambda0() * params.tv()));
    Ok(EntropyBreakdown::new("s_vacuum_order1", s))
}

/// The ε⁰ coefficient of the vacuum bracket, the quantity plotted against m₀.
pub fn vacuum_finite_coefficient(params: &SchemeParams, form: VacuumForm) -> Result<f64> {
    Ok(vacuum_bracket(params, form)?.finite_part().re)
}

/// One-particle pole plus optional multiparticle samples of σ(M²).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    z: f64,
    m_phys: f64,
    multiparticle: Vec<(f64, f64)>,
}

impl SpectralDensity {
    /// `multiparticle` holds `(M², weight)` pairs; a weight is the sampled σ times its bin width.
    pub fn new(z: f64, m_phys: f64, multiparticle: Vec<(f64, f64)>) -> Result<Self> {
        if !(z > 0.0 && z <= 1.0) {
            return Err(Error::InvalidParameter("Z must lie in (0, 1]"));
        }
        if !(m_phys > 0.0 && m_phys.is_finite()) {
            return Err(Error::InvalidParameter("physical mass must be positive"));
        }
        for &(m2, w) in &multiparticle {
            if !(m2 > 0.0 && m2.is_finite()) {
                return Err(Error::InvalidParameter("sample M^2 must be positive"));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter("sample weight must be nonnegative"));
            }
        }
        Ok(Self {
            z,
            m_phys,
            multiparticle,
        })
    }

    pub fn one_particle(z: f64, m_phys: f64) -> Result<Self> {
        Self::new(z, m_phys, Vec::new())
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn m_phys(&self) -> f64 {
        self.m_phys
    }

    pub fn multiparticle(&self) -> &[(f64, f64)] {
        &self.multiparticle
    }

    /// `(M², c)` with ρ(p) = i Σ c/(p² − M²); the pole contributes c = Z.
    pub fn components(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.multiparticle.len() + 1);
        out.push((self.m_phys * self.m_phys, self.z));
        out.extend(
            self.multiparticle
                .iter()
                .filter(|&&(_, w)| w > 0.0)
                .map(|&(m2, w)| (m2, w / (2.0 * PI))),
        );
        out
    }
}

/// Per-component data of the decomposition ∫ρ_k ln ρ.
struct Component {
    m2: f64,
    c: f64,
    /// Σ_j c_j (M_j² − M_k²)/C
    shift: f64,
}

fn decompose(comps: &[(f64, f64)]) -> (f64, Vec<Component>) {
    let total: f64 = comps.iter().map(|&(_, c)| c).sum();
    let parts = comps
        .iter()
        .map(|&(mk2, ck)| Component {
            m2: mk2,
            c: ck,
            shift: comps.iter().map(|&(mj2, cj)| cj * (mj2 - mk2)).sum::<f64>() / total,
        })
        .collect();
    (total, parts)
}

/// Ω_d/(2π)^d.
fn radial_measure(d: f64) -> Result<f64> {
    let g = gamma(re(0.5 * d))?.re;
    Ok(2.0 * PI.powf(0.5 * d) / g / (2.0 * PI).powf(d))
}

/// ∫ dᵈp/(2π)ᵈ (p² − M_k²)⁻¹[ln(1 + u_k) − a_k/(p² − M_k²)], convergent for d < 6.
fn remainder(k: &Component, comps: &[(f64, f64)], total: f64, d: f64) -> Result<Complex> {
    let measure = radial_measure(d)?;
    let r = quad::integrate_to_infinity(
        |p| {
            let p2 = p * p;
            let u: f64 = comps
                .iter()
                .map(|&(mj2, cj)| cj * (k.m2 - mj2) / (total * (p2 + mj2)))
                .sum();
            let v = -p.powf(d - 1.0) / (p2 + k.m2) * (u.ln_1p() + k.shift / (p2 + k.m2));
            re(v)
        },
        0.0,
        &QuadConfig::default().with_rel_tol(1e-11),
    )?;
    Ok(I * measure * r.value)
}

/// Entropy of the spectral two-point state.
///
/// With the pole alone this is the free external entropy with m₀ → m, for
/// every Z. Multiparticle samples enter through the decomposition
/// `∫ρ_k ln ρ = ic_k[ln(iC)Δ₀ − χ₀ + a_kΔ₁ + R_k]` with a convergent remainder R_k.
pub fn s_nonperturbative(sd: &SpectralDensity, params: &SchemeParams) -> Result<EntropyBreakdown> {
    if sd.multiparticle().iter().all(|&(_, w)| w == 0.0) {
        let p = params.set_m0(sd.m_phys())?;
        let mut b = s_ext_2_order0(&p);
        b.name = "s_nonperturbative";
        return Ok(b);
    }
    let s = spectral_series(sd, params.st_vol(), params.order())?;
    Ok(EntropyBreakdown::new("s_nonperturbative", s))
}

/// The decomposition route as an ε-series, also for a pole-only density.
pub fn spectral_series(sd: &SpectralDensity, st_vol: f64, order: i32) -> Result<EpsSeries> {
    let comps = sd.components();
    let (total, parts) = decompose(&comps);
    let inner = order + 2;
    let ln_ic = branch_ln(I * total);
    let mut gamma_sum = EpsSeries::zero(inner);
    let mut trace = EpsSeries::zero(inner);
    for k in &parts {
        let d0 = delta_series_at(0, k.m2, inner)?;
        let d1 = delta_series_at(1, k.m2, inner)?;
        let c0 = chi_series_at(0, k.m2, inner, ChiForm::FeynmanParameter)?;
        let rem = EpsSeries::constant(remainder(k, &comps, total, 4.0)?, 0);
        let body = &(&(&d0.scale(ln_ic) - &c0) + &d1.scale(re(k.shift))) + &rem;
        gamma_sum = &gamma_sum + &d0.scale(re(k.c));
        trace = &trace + &body.scale(I * k.c);
    }
    // S = ln(i·2TV·γ) + (i/γ)·Σ_k ∫ρ_k ln ρ
    let log = gamma_sum.scale(I * st_vol).ln()?;
    let ratio = trace.checked_div(&gamma_sum)?.scale(I);
    Ok((&log + &ratio).truncate(order))
}

/// The decomposition route at a concrete dimension 0 < d < 6.
pub fn spectral_entropy_at(sd: &SpectralDensity, st_vol: f64, d: f64) -> Result<Complex> {
    let comps = sd.components();
    let (total, parts) = decompose(&comps);
    let ln_ic = branch_ln(I * total);
    let mut gamma_sum = re(0.0);
    let mut trace = re(0.0);
    for k in &parts {
        let d0 = delta_closed(0, k.m2, d)?;
        let d1 = delta_closed(1, k.m2, d)?;
        let c0 = chi_closed(0, k.m2, d, ChiForm::FeynmanParameter)?;
        let body = ln_ic * d0 - c0 + k.shift * d1 + remainder(k, &comps, total, d)?;
        gamma_sum += k.c * d0;
        trace += I * k.c * body;
    }
    Ok(branch_ln(I * st_vol * gamma_sum) + I * trace / gamma_sum)
}

/// Tr(ρ⁽²⁾O) for plane waves, 1/(2TV).
pub fn plane_wave_trace(params: &SchemeParams) -> f64 {
    1.0 / params.st_vol()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_delta_radial;

    const TAU: f64 = 3.266_361_254_638_956_6;

    fn params(m0: f64, tv: f64) -> SchemeParams {
        SchemeParams::from_tv(m0, 1.0, 1.0, tv).unwrap()
    }

    fn same_real(a: &EpsSeries, b: &EpsSeries, tol: f64) {
        let diff = a.truncate(0).re().max_coeff_diff(&b.truncate(0));
        assert!(diff < tol, "{a} vs {b}: {diff}");
    }

    #[test]
    fn free_external_entropy() {
        let b = s_ext_2_order0(&params(1.0, 1.0));
        assert_eq!(b.pole1, re(-2.0));
        assert_eq!(b.logeps, re(-1.0));
        assert!((b.finite - (-1.0 - (4.0 * PI * PI).ln())).abs() < 1e-15);
        assert!(!b.non_real);
        assert_eq!(
            s_int_21(&params(2.0, 3.0)).series,
            s_ext_2_order0(&params(2.0, 3.0)).series
        );
    }

    #[test]
    fn closed_total_is_not_the_sum_of_its_parts() {
        // the closed total has pole −1 and constant −1/2 where the parts give −2 and −1
        for &m0 in &[0.5, 1.0, 3.0] {
            let p = SchemeParams::from_tv(m0, 0.7, 2.5, 4.0).unwrap();
            let gap = &s_ext_2_total(&p).series - &s_ext_2_total_composed(&p).series;
            assert!((gap.coeff(0, 0) - re(0.5)).norm() < 1e-13);
            assert!((gap.coeff(-1, 0) - re(1.0)).norm() < 1e-14);
            assert!(gap.coeff(0, 1).norm() < 1e-15);
        }
    }

    #[test]
    fn mutual_information_identity() {
        for &(m0, tv) in &[(0.5, 1.0), (2.0, 10.0), (7.3, 1.0)] {
            let mi = mutual_information_21(&params(m0, tv));
            assert!(mi.max_coeff_diff() < 1e-12);
            assert_eq!(mi.printed.pole1, re(-6.0));
            assert_eq!(mi.compositional.logeps, re(0.0));
        }
    }

    #[test]
    fn conditional_constants() {
        let c1 = TAU + 1.0 - (8.0 * PI * PI).ln();
        for &m0 in &[0.5, 1.7, 10.0] {
            let (ei, ie) = conditional_entropies_21(&params(m0, 3.0));
            assert!((ei.finite - c1).abs() < 1e-12);
            assert!((ie.finite - (c1 - 3.0)).abs() < 1e-12);
            assert_eq!(ei.pole1, re(2.0));
            assert_eq!(ie.pole1, re(4.0));
            assert_eq!(ei.logeps, re(-1.0));
        }
        assert!((c1 + 0.102_5).abs() < 1e-4);
    }

    #[test]
    fn mass_reading_and_quadrature_ratio() {
        let p = params(2.0, 1.0);
        let base = s_total_21(&p);
        let extra = s_total_21_with(
            &p,
            &TotalOptions {
                reading: MassReading::ExtraRatioLog,
                ..TotalOptions::default()
            },
        )
        .unwrap();
        assert!((extra.finite - base.finite - 4.0f64.ln()).abs() < 1e-14);
        let quad = s_total_21_with(
            &p,
            &TotalOptions {
                ratio: RatioMode::Quadrature,
                ..TotalOptions::default()
            },
        )
        .unwrap();
        assert!((quad.series.coeff(0, 0).im - 0.5 * PI).abs() < 1e-9);
        assert!(quad.non_real);
    }

    #[test]
    fn derived_routes_match_in_real_part() {
        for &(m0, tv) in &[(0.6, 1.0), (1.0, 2.0), (3.5, 10.0)] {
            let p = params(m0, tv);
            let z = s_ext_2_order0_derived(&p).unwrap();
            same_real(&z.series, &s_ext_2_order0(&p).series, 1e-11);
            assert!((z.residual_im - 0.5 * PI).abs() < 1e-11);

            let e = s_ext_21_derived(&p).unwrap();
            same_real(&e.series, &s_ext_21(&p).series, 1e-11);
            assert!((e.residual_im - 1.5 * PI).abs() < 1e-11);

            let t = s_total_21_derived(&p).unwrap();
            same_real(&t.series, &s_total_21(&p).series, 1e-11);
            assert!((t.residual_im - PI).abs() < 1e-11);
        }
    }

    #[test]
    fn generic_formula_reproduces_derived_two_point() {
        let p = SchemeParams::from_tv(1.3, 1.0, 0.8, 2.0).unwrap();
        let generic = two_point_inputs(&p).unwrap().evaluate().unwrap();
        let sum = &s_ext_2_order0_derived(&p).unwrap().series
            + &s_ext_2_order1_derived(&p).unwrap().series;
        assert!(generic.truncate(p.order()).max_coeff_diff(&sum) < 1e-10);
        // switching the coupling off leaves the free entropy
        let mut inputs = two_point_inputs(&p).unwrap();
        inputs.coupling = re(0.0);
        let free = inputs.evaluate().unwrap().truncate(p.order());
        assert!(free.max_coeff_diff(&s_ext_2_order0_derived(&p).unwrap().series) < 1e-10);
    }

    #[test]
    fn renyi_traces() {
        let cfg = ContourConfig::default();
        for &m0 in &[0.7, 1.0, 2.5] {
            let p = params(m0, 1.0);
            let closed = renyi_trace_n(3, &p, &cfg).unwrap();
            assert!(closed.delta.is_none());
            let radial = renyi_trace_radial(3, &p).unwrap();
            assert!(
                (closed.value - radial).norm() < 1e-9 * radial.norm(),
                "m0 = {m0}"
            );
            let four = renyi_trace_n(4, &p, &cfg).unwrap().value;
            assert!((four - renyi_trace_radial(4, &p).unwrap()).norm() < 1e-9 * four.norm());
        }
        let p = params(1.0, 1.0);
        assert_eq!(renyi_trace_n(2, &p, &cfg).unwrap().delta, Some(0.05));
        let n3 = renyi_trace_n(3, &p, &cfg).unwrap().value.norm();
        let n4 = renyi_trace_n(4, &p, &cfg).unwrap().value.norm();
        let n5 = renyi_trace_n(5, &p, &cfg).unwrap().value.norm();
        assert!(n3 > n4 && n4 > n5);
        assert!(renyi_trace_n(1, &p, &cfg).is_err());
    }

    fn exact_bracket(m2: f64, mu: f64, eps: f64) -> f64 {
        let g = gamma(re(-1.0 - 0.5 * eps)).unwrap().re;
        let x = m2 / (16.0 * PI * PI) * (m2 / (4.0 * PI * mu)).powf(0.5 * eps) * g;
        x * x - x / m2
    }

    #[test]
    fn vacuum_bracket_against_exact_gamma() {
        for &(m0, mu) in &[(0.8, 0.5), (1.5, 1.0), (2.4, 2.0)] {
            let p = SchemeParams::from_tv(m0, mu, 1.0, 1.0)
                .unwrap()
                .set_order(3)
                .unwrap();
            let series = vacuum_bracket(&p, VacuumForm::Derived).unwrap();
            for &eps in &[1e-2, -2e-2] {
                let exact = exact_bracket(m0 * m0, mu, eps);
                let approx = series.eval(eps).re;
                assert!(
                    (approx - exact).abs() < 1e-6 * exact.abs(),
                    "m0 = {m0}, eps = {eps}"
                );
            }
        }
    }

    #[test]
    fn vacuum_printed_against_derived() {
        let p = SchemeParams::from_tv(1.7, 0.9, 1.0, 1.0).unwrap();
        let pr = vacuum_bracket(&p, VacuumForm::Printed).unwrap();
        let de = vacuum_bracket(&p, VacuumForm::Derived).unwrap();
        assert!((pr.coeff(-2, 0) - de.coeff(-2, 0)).norm() < 1e-15);
        // the ε⁻¹ terms agree once −8π² is read as −1/(8π²)
        let gap = pr.coeff(-1, 0) - de.coeff(-1, 0);
        assert!((gap.re + 8.0 * PI * PI - 1.0 / (8.0 * PI * PI)).abs() < 1e-12);
        let s = s_vacuum_order1(&p, VacuumForm::Printed).unwrap();
        assert!((s.series.coeff(0, 0).re - (1.0 - 0.25 * pr.coeff(0, 0).re)).abs() < 1e-14);
    }

    #[test]
    fn vacuum_minimum_moves_down_with_mu() {
        let mut argmins = Vec::new();
        for &mu in &[0.5, 1.0, 2.0] {
            let grid: Vec<(f64, f64)> = (0..=400)
                .map(|i| {
                    let m0 = 0.5 + 5.5 * i as f64 / 400.0;
                    let p = SchemeParams::from_tv(m0, mu, 1.0, 1.0).unwrap();
                    (
                        m0,
                        vacuum_finite_coefficient(&p, VacuumForm::Derived).unwrap(),
                    )
                })
                .collect();
            let interior: Vec<usize> = (1..grid.len() - 1)
                .filter(|&i| grid[i].1 < grid[i - 1].1 && grid[i].1 < grid[i + 1].1)
                .collect();
            assert_eq!(interior.len(), 1, "mu = {mu}");
            argmins.push(grid[interior[0]].0);
        }
        assert!(
            argmins[0] > argmins[1] && argmins[1] > argmins[2],
            "{argmins:?}"
        );
    }

    #[test]
    fn spectral_density_validation() {
        assert!(SpectralDensity::one_particle(0.0, 1.0).is_err());
        assert!(SpectralDensity::one_particle(1.2, 1.0).is_err());
        assert!(SpectralDensity::one_particle(0.5, -1.0).is_err());
        assert!(SpectralDensity::new(0.5, 1.0, alloc::vec![(4.0, -0.1)]).is_err());
        let sd = SpectralDensity::new(0.5, 1.0, alloc::vec![(4.0, 0.0), (9.0, 2.0 * PI)]).unwrap();
        assert_eq!(sd.components(), alloc::vec![(1.0, 0.5), (9.0, 1.0)]);
    }

    #[test]
    fn pole_only_density_reduces_to_free_entropy() {
        let p = params(1.0, 2.0);
        for &z in &[1.0, 0.6] {
            let sd = SpectralDensity::one_particle(z, 1.8).unwrap();
            let free = s_ext_2_order0(&p.set_m0(1.8).unwrap());
            let np = s_nonperturbative(&sd, &p).unwrap();
            assert_eq!(np.series, free.series);
            let route = spectral_series(&sd, p.st_vol(), p.order()).unwrap();
            same_real(&route, &free.series, 1e-12);
        }
    }

    #[test]
    fn spectral_decomposition_against_direct_quadrature() {
        let d = 1.5;
        let st_vol = 3.0;
        let sd = SpectralDensity::new(0.7, 1.1, alloc::vec![(4.0, 0.9), (6.5, 1.3), (11.0, 0.4)])
            .unwrap();
        let comps = sd.components();
        let route = spectral_entropy_at(&sd, st_vol, d).unwrap();

        let gamma_sum: Complex = comps
            .iter()
            .map(|&(m2, c)| c * oracle_delta_radial(0, m2, d).unwrap())
            .sum();
        let measure = crate::oracle::gamma_quadrature(0.5 * d).unwrap();
        let measure = 2.0 * PI.powf(0.5 * d) / measure / (2.0 * PI).powf(d);
        // p^{d−1}ρ_E ln ρ_E with ρ_E = −i s(p) and ln ρ_E = ln s − iπ/2
        let f = |p: f64| {
            let s: f64 = comps.iter().map(|&(m2, c)| c / (p * p + m2)).sum();
            -I * s * Complex::new(s.ln(), -0.5 * PI) * p.powf(d - 1.0)
        };
        let cfg = QuadConfig::default().with_rel_tol(1e-12);
        // p = v² below 1 and p = 1/u² above it keep both ends smooth
        let head = quad::integrate(|v| f(v * v) * 2.0 * v, 0.0, 1.0, &cfg)
            .unwrap()
            .value;
        let tail = quad::integrate(
            |u| {
                if u == 0.0 {
                    re(0.0)
                } else {
                    f(1.0 / (u * u)) * 2.0 / u.powi(3)
                }
            },
            0.0,
            1.0,
            &cfg,
        )
        .unwrap()
        .value;
        let radial = head + tail;
        let trace = I * measure * radial;
        let direct = branch_ln(I * st_vol * gamma_sum) + I * trace / gamma_sum;
        assert!(
            (route - direct).norm() < 1e-8 * direct.norm(),
            "{route} vs {direct}"
        );
    }

    #[test]
    fn multiparticle_series_is_finite_and_tracks_exact_d() {
        let p = params(1.0, 1.0).set_order(3).unwrap();
        let sd = SpectralDensity::new(0.8, 1.0, alloc::vec![(5.0, 0.6)]).unwrap();
        let s = s_nonperturbative(&sd, &p).unwrap();
        assert!(s.finite.is_finite());
        // Expanding around d = 4 must reproduce the exact-d route a little below 4
        let eps = 0.01;
        let exact = spectral_entropy_at(&sd, p.st_vol(), 4.0 + eps).unwrap();
        let approx = s.series.eval(eps);
        assert!(
            (exact - approx).norm() < 1e-6 * exact.norm(),
            "{exact} vs {approx}"
        );
    }

    #[test]
    fn plane_waves() {
        assert_eq!(plane_wave_trace(&params(1.0, 1.0)), 0.5);
    }
}
