//! Total-trace relations among the vacuum, two-point and four-point states.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::loops::{delta_series_at, SchemeParams};
use crate::series::EpsSeries;
use crate::Complex;

const I: Complex = Complex::new(0.0, 1.0);

fn re(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

/// Traces Tr(ρ⁽ⁿ⁾) of a φ^r theory for n = r, r−2, …, 2.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSet {
    r: u32,
    traces: BTreeMap<u32, EpsSeries>,
    delta0: EpsSeries,
    lambda0: f64,
}

impl TraceSet {
    pub fn new(
        r: u32,
        traces: BTreeMap<u32, EpsSeries>,
        delta0: EpsSeries,
        lambda0: f64,
    ) -> Result<Self> {
        if r < 4 || !r.is_multiple_of(2) {
            return Err(Error::InvalidTraceSet("r must be even and at least 4"));
        }
        if !lambda0.is_finite() {
            return Err(Error::InvalidParameter("lambda0 must be finite"));
        }
        let expected = (0..r / 2).map(|j| r - 2 * j);
        if traces.len() != (r / 2) as usize || expected.clone().any(|n| !traces.contains_key(&n)) {
            return Err(Error::InvalidTraceSet(
                "trace keys must be exactly r, r-2, ..., 2",
            ));
        }
        Ok(Self {
            r,
            traces,
            delta0,
            lambda0,
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn trace(&self, n: u32) -> Option<&EpsSeries> {
        self.traces.get(&n)
    }

    pub fn delta0(&self) -> &EpsSeries {
        &self.delta0
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    fn get(&self, n: u32) -> &EpsSeries {
        &self.traces[&n]
    }

    /// Δ₀^j for j ≥ 1 by repeated multiplication, so Δ₀² matches Δ₀·Δ₀ bit for bit.
    fn delta_power(&self, j: u32) -> Result<EpsSeries> {
        let mut acc = self.delta0.clone();
        for _ in 1..j {
            acc = acc.checked_mul(&self.delta0)?;
        }
        Ok(acc)
    }
}

/// 1 − iλ₀·bracket
fn close(bracket: &EpsSeries, lambda0: f64) -> EpsSeries {
    let one = EpsSeries::real(1.0, bracket.kmax());
    &one - &bracket.scale(I * lambda0)
}

/// Tr ρ⁽⁰⁾ = 1 − iλ₀[Tr ρ⁽⁴⁾ + Δ₀Tr ρ⁽²⁾ − Δ₀²].
pub fn vacuum_trace_phi4(ts: &TraceSet) -> Result<EpsSeries> {
    if ts.r != 4 {
        return Err(Error::InvalidTraceSet("vacuum_trace_phi4 needs r = 4"));
    }
    let d = &ts.delta0;
    let sum = ts.get(4) + &d.checked_mul(ts.get(2))?;
    let bracket = &sum - &d.checked_mul(d)?;
    Ok(close(&bracket, ts.lambda0))
}

/// Tr ρ⁽⁰⁾ = 1 − iλ₀[Σ_j Δ₀^j Tr ρ^{(r−2j)} − (r/2 − 1)Δ₀^{r/2}].
///
/// The operations run in the same order as [`vacuum_trace_phi4`], so r = 4 agrees bitwise.
pub fn vacuum_trace_phir(ts: &TraceSet) -> Result<EpsSeries> {
    let half = ts.r / 2;
    let mut sum = ts.get(ts.r).clone();
    for j in 1..half {
        let term = ts.delta_power(j)?.checked_mul(ts.get(ts.r - 2 * j))?;
        sum = &sum + &term;
    }
    let top = ts.delta_power(half)?;
    let top = if half == 2 {
        top
    } else {
        top.scale(re((half - 1) as f64))
    };
    Ok(close(&(&sum - &top), ts.lambda0))
}

/// The overlap factor Tr ρ⁽⁰⁾ = |⟨Ω₀|Ω⟩|² e^{−iE₀·2T}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumOverlap {
    pub overlap_sq: f64,
    pub e0: f64,
    /// Half the time extent, so the phase is E₀·2T.
    pub t: f64,
}

impl VacuumOverlap {
    pub fn trivial() -> Self {
        Self {
            overlap_sq: 1.0,
            e0: 0.0,
            t: 0.0,
        }
    }

    pub fn factor(&self) -> Complex {
        self.overlap_sq * Complex::from_polar(1.0, -2.0 * self.e0 * self.t)
    }
}

/// Tr ρ⁽²⁾ = 2TV·Z·Δ₀(m²) for a spectral two-point state with pole residue Z.
pub fn consistent_tr_rho2(z: f64, m_phys: f64, params: &SchemeParams) -> Result<EpsSeries> {
    if !(m_phys > 0.0 && m_phys.is_finite()) {
        return Err(Error::InvalidParameter("physical mass must be positive"));
    }
    let d = delta_series_at(0, m_phys * m_phys, params.order())?;
    Ok(d.scale(re(params.st_vol() * z)))
}

/// Tr ρ⁽⁴⁾ = (i/λ₀)[F − 1] + Δ₀(m₀²)[Δ₀(m₀²) − 2TV·Z·Δ₀(m²)] with F the overlap factor.
pub fn tr_rho4_inferred(
    z: f64,
    m_phys: f64,
    overlap: &VacuumOverlap,
    params: &SchemeParams,
) -> Result<EpsSeries> {
    let lam = params.lambda0();
    if lam == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let d0 = delta_series_at(0, params.m2(), params.order())?;
    let t2 = consistent_tr_rho2(z, m_phys, params)?;
    let head = EpsSeries::constant((I / lam) * (overlap.factor() - 1.0), params.order());
    Ok(&head + &d0.checked_mul(&(&d0 - &t2))?)
}

/// The φ⁴ trace set that the inferred Tr ρ⁽⁴⁾ belongs to.
pub fn consistent_trace_set(
    z: f64,
    m_phys: f64,
    overlap: &VacuumOverlap,
    params: &SchemeParams,
) -> Result<TraceSet> {
    let mut traces = BTreeMap::new();
    traces.insert(4, tr_rho4_inferred(z, m_phys, overlap, params)?);
    traces.insert(2, consistent_tr_rho2(z, m_phys, params)?);
    let d0 = delta_series_at(0, params.m2(), params.order())?;
    TraceSet::new(4, traces, d0, params.lambda0())
}

/// One proportionality between a vacuum contribution and a state trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCheck {
    pub name: &'static str,
    pub numerator: EpsSeries,
    pub denominator: EpsSeries,
    pub ratio: EpsSeries,
    pub expected: EpsSeries,
    /// ratio / expected; the constant series 1 when the relation is exact.
    pub normalization: EpsSeries,
    pub note: &'static str,
}

impl RatioCheck {
    fn build(
        name: &'static str,
        numerator: EpsSeries,
        denominator: EpsSeries,
        expected: EpsSeries,
        note: &'static str,
    ) -> Result<Self> {
        let ratio = numerator.checked_div(&denominator)?;
        let normalization = ratio.checked_div(&expected)?;
        Ok(Self {
            name,
            numerator,
            denominator,
            ratio,
            expected,
            normalization,
            note,
        })
    }

    /// Largest deviation of the normalization from the constant 1.
    pub fn deviation_from_unity(&self) -> f64 {
        let one = EpsSeries::real(1.0, self.normalization.kmax());
        self.normalization.max_coeff_diff(&one)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub checks: Vec<RatioCheck>,
}

/// Both sides of the vacuum-to-trace proportionalities, evaluated as series.
///
/// The position-space bubble ∫Δ²(z)d⁴z is −Δ₁. The sunset integral ∫Δ⁴(z)d⁴z is
/// common to both sides of the four-point relation and is left as a unit factor.
pub fn ratio_checks(params: &SchemeParams) -> Result<RatioReport> {
    let lam = params.lambda0();
    if lam == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let order = params.order();
    let inner = order + 2;
    let v = params.st_vol();
    let d0 = delta_series_at(0, params.m2(), inner)?;
    let d1 = delta_series_at(1, params.m2(), inner)?;
    let bubble = d1.scale(re(-v));

    // Tr ρ^{(2,1)} = −iλ₀Δ₀·2TV∫Δ², Tr ρ₁^{(0,2)} = −λ₀²Δ₀²·2TV∫Δ²
    let two_point = d0.checked_mul(&bubble)?.scale(-I * lam);
    let vac1 = d0
        .checked_mul(&d0)?
        .checked_mul(&bubble)?
        .scale(re(-lam * lam));
    let bubble_check = RatioCheck::build(
        "vacuum_bubble_over_two_point",
        vac1.truncate(order),
        two_point.truncate(order),
        d0.scale(-I * lam).truncate(order),
        "expected -i*lambda0*Delta0; weight factors equal",
    )?;

    let sunset = EpsSeries::real(1.0, inner);
    let four_point = sunset.scale(-I * lam);
    let vac2 = sunset.scale(re(-lam * lam));
    let sunset_check = RatioCheck::build(
        "vacuum_sunset_over_four_point",
        vac2,
        four_point.clone(),
        EpsSeries::constant(-I * lam, inner),
        "expected -i*lambda0; prefactor -lambda0^2; common sunset integral cancels",
    )?;

    let vac2_literal = d0.checked_mul(&d0)?.checked_mul(&sunset)?.scale(re(-1.0));
    let literal_check = RatioCheck::build(
        "vacuum_sunset_over_four_point_literal",
        vac2_literal.truncate(order),
        four_point.truncate(order),
        EpsSeries::constant(-I * lam, order),
        "prefactor read as -Delta0^2; normalization is Delta0^2/lambda0^2",
    )?;

    Ok(RatioReport {
        checks: alloc::vec![bubble_check, sunset_check, literal_check],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(
        r: u32,
        traces: &[(u32, EpsSeries)],
        delta0: EpsSeries,
        lambda0: f64,
    ) -> Result<TraceSet> {
        TraceSet::new(r, traces.iter().cloned().collect(), delta0, lambda0)
    }

    fn d0(m2: f64) -> EpsSeries {
        delta_series_at(0, m2, 2).unwrap()
    }

    #[test]
    fn validation() {
        let z = EpsSeries::zero(0);
        assert!(set(3, &[(3, z.clone()), (1, z.clone())], z.clone(), 1.0).is_err());
        assert!(set(4, &[(4, z.clone())], z.clone(), 1.0).is_err());
        assert!(set(
            4,
            &[(4, z.clone()), (2, z.clone()), (0, z.clone())],
            z.clone(),
            1.0
        )
        .is_err());
        assert!(set(4, &[(4, z.clone()), (3, z.clone())], z.clone(), 1.0).is_err());
        assert!(set(
            6,
            &[(6, z.clone()), (4, z.clone()), (2, z.clone())],
            z.clone(),
            1.0
        )
        .is_ok());
        let six = set(6, &[(6, z.clone()), (4, z.clone()), (2, z.clone())], z, 1.0).unwrap();
        assert!(matches!(
            vacuum_trace_phi4(&six),
            Err(Error::InvalidTraceSet(_))
        ));
    }

    #[test]
    fn trivial_values() {
        let d = d0(1.0);
        let zero = EpsSeries::zero(2);
        let free = set(
            4,
            &[(4, d.checked_mul(&d).unwrap()), (2, zero.clone())],
            d.clone(),
            0.7,
        )
        .unwrap();
        let one = EpsSeries::real(1.0, 2);
        assert!(vacuum_trace_phi4(&free).unwrap().max_coeff_diff(&one) < 1e-15);
        let off = set(4, &[(4, d.clone()), (2, d.clone())], d.clone(), 0.0).unwrap();
        assert_eq!(vacuum_trace_phi4(&off).unwrap().max_coeff_diff(&one), 0.0);
        // r = 6 with vanishing traces leaves 1 + 2iλ₀Δ₀³
        let six = set(
            6,
            &[(6, zero.clone()), (4, zero.clone()), (2, zero)],
            d.clone(),
            0.3,
        )
        .unwrap();
        let expected = &one + &d.powi(3).unwrap().scale(I * 0.6);
        assert!(vacuum_trace_phir(&six).unwrap().max_coeff_diff(&expected) < 1e-15);
    }

    #[test]
    fn inferred_four_point_values() {
        let p = SchemeParams::from_tv(1.3, 1.0, 0.9, 0.5).unwrap();
        let t4 = tr_rho4_inferred(1.0, 1.3, &VacuumOverlap::trivial(), &p).unwrap();
        assert!(t4.max_coeff_diff(&EpsSeries::zero(p.order())) < 1e-15);
        let p = p.set_lambda0(0.0).unwrap();
        assert!(matches!(
            tr_rho4_inferred(1.0, 1.3, &VacuumOverlap::trivial(), &p),
            Err(Error::ZeroCoupling)
        ));
    }

    #[test]
    fn round_trip_returns_overlap() {
        let overlap = VacuumOverlap {
            overlap_sq: 0.83,
            e0: 0.4,
            t: 1.7,
        };
        for &(m0, tv, z, m) in &[
            (1.0, 1.0, 0.9, 1.2),
            (3.0, 7.0, 0.5, 2.5),
            (0.6, 0.2, 1.0, 0.6),
        ] {
            let p = SchemeParams::from_tv(m0, 1.0, 1.4, tv).unwrap();
            let ts = consistent_trace_set(z, m, &overlap, &p).unwrap();
            let back = vacuum_trace_phi4(&ts).unwrap();
            let expected = EpsSeries::constant(overlap.factor(), p.order());
            assert!(back.max_coeff_diff(&expected) < 1e-10);
        }
    }

    #[test]
    fn ratio_report() {
        let p = SchemeParams::from_tv(1.5, 1.0, 0.8, 2.0).unwrap();
        let report = ratio_checks(&p).unwrap();
        assert!(report.checks[0].deviation_from_unity() < 1e-12);
        assert!(report.checks[1].deviation_from_unity() < 1e-15);
        assert!(report.checks[2].deviation_from_unity() > 1.0);
        let doubled = ratio_checks(&p.set_lambda0(1.6).unwrap()).unwrap();
        for (a, b) in report.checks[..2].iter().zip(&doubled.checks[..2]) {
            assert!(b.ratio.max_coeff_diff(&a.ratio.scale(re(2.0))) < 1e-12);
        }
    }

    fn coeffs(lead: i32) -> impl Strategy<Value = EpsSeries> {
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), (2 - lead) as usize).prop_map(
            move |c| {
                let mut s = EpsSeries::zero(1);
                for (i, (a, b)) in c.into_iter().enumerate() {
                    s = s.with_term(lead + i as i32, 0, Complex::new(a, b));
                }
                s
            },
        )
    }

    fn series_strategy() -> impl Strategy<Value = EpsSeries> {
        coeffs(-2)
    }

    // Δ₀ carries a simple pole; Δ₀³ must stay inside the series capacity
    fn delta_strategy() -> impl Strategy<Value = EpsSeries> {
        coeffs(-1)
    }

    proptest! {
        #[test]
        fn phir_reduces_to_phi4(
            t4 in series_strategy(),
            t2 in series_strategy(),
            d in delta_strategy(),
            lam in -5.0f64..5.0,
        ) {
            let ts = set(4, &[(4, t4), (2, t2)], d, lam).unwrap();
            prop_assert_eq!(vacuum_trace_phir(&ts).unwrap(), vacuum_trace_phi4(&ts).unwrap());
        }

        #[test]
        fn linear_in_coupling(
            t6 in series_strategy(),
            t4 in series_strategy(),
            t2 in series_strategy(),
            d in delta_strategy(),
            lam in 0.1f64..5.0,
        ) {
            let a = set(6, &[(6, t6.clone()), (4, t4.clone()), (2, t2.clone())], d.clone(), lam).unwrap();
            let b = set(6, &[(6, t6), (4, t4), (2, t2)], d, 2.0 * lam).unwrap();
            let one = EpsSeries::real(1.0, 1);
            let da = &vacuum_trace_phir(&a).unwrap() - &one;
            let db = &vacuum_trace_phir(&b).unwrap() - &one;
            let scale = da.terms().map(|(_, _, c)| c.norm()).fold(1.0, f64::max);
            prop_assert!(db.max_coeff_diff(&da.scale(re(2.0))) <= 1e-12 * scale);
        }
    }
}
