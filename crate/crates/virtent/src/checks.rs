//! The invariant suite behind `virtent check`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use virtent_core::contour::{self, ContourConfig};
use virtent_core::entropy::{
    conditional_entropies_21, mutual_information_21, plane_wave_trace, renyi_trace_n,
    renyi_trace_radial, s_ext_2_order0, s_ext_2_total, s_nonperturbative, two_point_inputs,
    vacuum_finite_coefficient, SpectralDensity, VacuumForm,
};
use virtent_core::loops::{
    self, chi_closed, chi_series_at, delta_series_at, eta, ChiForm, SchemeParams,
};
use virtent_core::oracle::{oracle_chi_momentum, oracle_chi_x, oracle_delta_radial};
use virtent_core::series::EpsSeries;
use virtent_core::trace::{
    consistent_trace_set, vacuum_trace_phi4, vacuum_trace_phir, TraceSet, VacuumOverlap,
};
use virtent_core::Complex;

pub type DeltaFn = fn(u32, f64, f64) -> virtent_core::Result<Complex>;

/// Injection points for the suite; the default wires in the library.
#[derive(Debug, Clone, Copy)]
pub struct CheckContext {
    pub delta_closed: DeltaFn,
    pub seed: u64,
}

impl Default for CheckContext {
    fn default() -> Self {
        Self {
            delta_closed: loops::delta_closed,
            seed: 20_240_601,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A documented discrepancy that is reported, never failed.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl CheckOutcome {
    fn gate(name: &'static str, ok: bool, detail: String) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Self {
            name,
            status,
            detail,
        }
    }

    fn info(name: &'static str, detail: String) -> Self {
        Self {
            name,
            status: Status::Info,
            detail,
        }
    }
}

fn rel(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / b.norm()
}

/// Runs a fallible check, turning errors into failures.
fn guarded<F>(name: &'static str, f: F) -> CheckOutcome
where
    F: FnOnce() -> virtent_core::Result<CheckOutcome>,
{
    f().unwrap_or_else(|e| CheckOutcome::gate(name, false, format!("error: {e}")))
}

fn delta_oracle(ctx: &CheckContext, rng: &mut StdRng) -> CheckOutcome {
    guarded("delta_closed_vs_radial_quadrature", || {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let j = rng.random_range(0..=4u32);
            let d = rng.random_range(1.0..(2.0 * j as f64 + 1.8));
            let m2 = rng.random_range(0.25..9.0);
            worst = worst.max(rel(
                (ctx.delta_closed)(j, m2, d)?,
                oracle_delta_radial(j, m2, d)?,
            ));
        }
        Ok(CheckOutcome::gate(
            "delta_closed_vs_radial_quadrature",
            worst <= 1e-6,
            format!("max relative error {worst:.3e} over 20 points (tolerance 1e-6)"),
        ))
    })
}

fn chi_oracle(rng: &mut StdRng) -> CheckOutcome {
    guarded("chi_closed_vs_quadrature", || {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let j = rng.random_range(0..=4u32);
            let d = rng.random_range(1.0..(2.0 * j as f64 + 1.8));
            let m2 = rng.random_range(0.25..9.0);
            let p = oracle_chi_momentum(j, m2, d)?;
            worst = worst
                .max(rel(oracle_chi_x(j, m2, d)?, p))
                .max(rel(chi_closed(j, m2, d, ChiForm::FeynmanParameter)?, p));
        }
        Ok(CheckOutcome::gate(
            "chi_closed_vs_quadrature",
            worst <= 1e-6,
            format!("max relative error {worst:.3e} over 20 points (tolerance 1e-6)"),
        ))
    })
}

fn chi_sign_finding() -> CheckOutcome {
    guarded("chi_printed_harmonic_sign", || {
        let printed = chi_closed(1, 1.0, 2.0, ChiForm::PrintedHarmonic)?;
        let oracle = oracle_chi_momentum(1, 1.0, 2.0)?;
        Ok(CheckOutcome::info(
            "chi_printed_harmonic_sign",
            format!(
                "harmonic form with the extra (-1)^j gives {printed:.6} at j=1, d=2; momentum quadrature gives {oracle:.6} (relative gap of the negated form {:.1e})",
                rel(-printed, oracle)
            ),
        ))
    })
}

fn eta_zero(ctx: &CheckContext, rng: &mut StdRng) -> CheckOutcome {
    guarded("bubble_at_zero_momentum", || {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let m2 = rng.random_range(0.25..9.0);
            let d = rng.random_range(1.0..5.8);
            worst = worst.max(rel(eta(0.0, m2, d)?, (ctx.delta_closed)(2, m2, d)?));
        }
        Ok(CheckOutcome::gate(
            "bubble_at_zero_momentum",
            worst <= 1e-10,
            format!("max relative error {worst:.3e} over 20 points (tolerance 1e-10)"),
        ))
    })
}

fn series_exponents(ctx: &CheckContext) -> CheckOutcome {
    guarded("series_convergence_order", || {
        let eps = 2f64.powi(-6);
        let mut worst = 0.0f64;
        for order in 0..=2 {
            for j in 0..=2u32 {
                let m2 = 1.7;
                let ds = delta_series_at(j, m2, order)?;
                let cs = chi_series_at(j, m2, order, ChiForm::FeynmanParameter)?;
                let de = |e: f64| {
                    Ok::<_, virtent_core::Error>(
                        ((ctx.delta_closed)(j, m2, 4.0 + e)? - ds.eval(e)).norm(),
                    )
                };
                let ce = |e: f64| {
                    Ok::<_, virtent_core::Error>(
                        (chi_closed(j, m2, 4.0 + e, ChiForm::FeynmanParameter)? - cs.eval(e))
                            .norm(),
                    )
                };
                let want = (order + 1) as f64;
                let pd = (de(eps)? / de(0.5 * eps)?).log2();
                let pc = (ce(eps)? / ce(0.5 * eps)?).log2();
                let dev = (pd - want).abs().max((pc - want).abs());
                worst = if dev.is_nan() {
                    f64::INFINITY
                } else {
                    worst.max(dev)
                };
            }
        }
        Ok(CheckOutcome::gate(
            "series_convergence_order",
            worst <= 0.3,
            format!("max |observed - expected| exponent {worst:.3} at eps = 2^-6 (tolerance 0.3)"),
        ))
    })
}

fn entropy_identities() -> Vec<CheckOutcome> {
    let mut mi = 0.0f64;
    let mut cond = 0.0f64;
    let c = contour::tau() + 1.0 - (8.0 * PI * PI).ln();
    for i in 0..50 {
        let m0 = 0.5 + 9.5 * i as f64 / 49.0;
        for &tv in &[1.0, 10.0] {
            let p = SchemeParams::from_tv(m0, 1.0, 1.0, tv).expect("grid masses are valid");
            mi = mi.max(mutual_information_21(&p).max_coeff_diff());
            let (ei, ie) = conditional_entropies_21(&p);
            cond = cond
                .max((ei.finite - c).abs())
                .max((ie.finite - c + 3.0).abs());
        }
    }
    vec![
        CheckOutcome::gate(
            "mutual_information_identity",
            mi <= 1e-10,
            format!("max coefficient difference {mi:.3e} (tolerance 1e-10)"),
        ),
        CheckOutcome::gate(
            "conditional_entropy_constants",
            cond <= 1e-9,
            format!(
                "finite parts {c:.6} and {:.6}, max drift {cond:.3e}",
                c - 3.0
            ),
        ),
    ]
}

fn informational_entropy() -> Vec<CheckOutcome> {
    let p = SchemeParams::from_tv(1.0, 1.0, 1.0, 1.0).expect("unit parameters are valid");
    let mut out = Vec::new();
    let total = s_ext_2_total(&p);
    let parts = &s_ext_2_order0(&p).series + &virtent_core::entropy::s_ext_2_order1(&p).series;
    let gap = &total.series - &parts;
    out.push(CheckOutcome::info(
        "ext2_total_vs_sum_of_parts",
        format!(
            "closed total minus parts: 1/eps coefficient {:.6}, constant {:.6}",
            gap.coeff(-1, 0).re,
            gap.coeff(0, 0).re
        ),
    ));
    out.push(guarded("generic_formula_vs_closed_total", || {
        let g = two_point_inputs(&p)?.evaluate()?.truncate(0);
        Ok(CheckOutcome::info(
            "generic_formula_vs_closed_total",
            format!(
                "generic order-1 formula: 1/eps {:.6}, constant {:.6}; closed total: {:.6}, {:.6}",
                g.coeff(-1, 0).re,
                g.coeff(0, 0).re,
                total.pole1.re,
                total.finite
            ),
        ))
    }));
    out.push(guarded("vacuum_printed_form_minimum", || {
        let mut values = Vec::new();
        for i in 0..=200 {
            let m0 = 0.5 + 5.5 * i as f64 / 200.0;
            let q = SchemeParams::from_tv(m0, 1.0, 1.0, 1.0)?;
            values.push(vacuum_finite_coefficient(&q, VacuumForm::Printed)?);
        }
        let minima = (1..values.len() - 1)
            .filter(|&i| values[i] < values[i - 1] && values[i] < values[i + 1])
            .count();
        Ok(CheckOutcome::info(
            "vacuum_printed_form_minimum",
            format!(
                "printed vacuum coefficient at mu = 1 has {minima} interior minima on [0.5, 6]"
            ),
        ))
    }));
    out
}

fn renyi() -> CheckOutcome {
    guarded("renyi_trace_radial", || {
        let p = SchemeParams::from_tv(1.3, 1.0, 1.0, 1.0)?;
        let closed = renyi_trace_n(3, &p, &ContourConfig::default())?.value;
        let radial = renyi_trace_radial(3, &p)?;
        let r = rel(closed, radial);
        Ok(CheckOutcome::gate(
            "renyi_trace_radial",
            r <= 1e-9,
            format!("n = 3 contour form vs radial quadrature, relative {r:.3e}"),
        ))
    })
}

fn spectral() -> CheckOutcome {
    guarded("spectral_pole_only", || {
        let p = SchemeParams::from_tv(1.0, 1.0, 1.0, 2.0)?;
        let sd = SpectralDensity::one_particle(0.7, 1.6)?;
        let got = s_nonperturbative(&sd, &p)?.series;
        let want = s_ext_2_order0(&p.set_m0(1.6)?).series;
        let d = got.max_coeff_diff(&want);
        Ok(CheckOutcome::gate(
            "spectral_pole_only",
            d == 0.0,
            format!("pole-only density vs free entropy at m_phys, difference {d:.3e}"),
        ))
    })
}

fn random_series(rng: &mut StdRng, lead: i32) -> EpsSeries {
    let mut s = EpsSeries::zero(1);
    for k in lead..=1 {
        s = s.with_term(
            k,
            0,
            Complex::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
        );
    }
    s
}

fn traces(rng: &mut StdRng) -> Vec<CheckOutcome> {
    let phir = guarded("trace_phir_reduces_to_phi4", || {
        let mut mismatches = 0;
        for _ in 0..100 {
            let mut t = BTreeMap::new();
            t.insert(4, random_series(rng, -2));
            t.insert(2, random_series(rng, -2));
            let ts = TraceSet::new(4, t, random_series(rng, -1), rng.random_range(-5.0..5.0))?;
            if vacuum_trace_phir(&ts)? != vacuum_trace_phi4(&ts)? {
                mismatches += 1;
            }
        }
        Ok(CheckOutcome::gate(
            "trace_phir_reduces_to_phi4",
            mismatches == 0,
            format!("{mismatches} of 100 random trace sets differ"),
        ))
    });
    let round = guarded("trace_round_trip", || {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let p = SchemeParams::from_tv(
                rng.random_range(0.5..5.0),
                1.0,
                rng.random_range(0.1..4.0),
                rng.random_range(0.1..10.0),
            )?;
            let overlap = VacuumOverlap {
                overlap_sq: rng.random_range(0.1..1.0),
                e0: rng.random_range(-2.0..2.0),
                t: 0.8,
            };
            let ts = consistent_trace_set(
                rng.random_range(0.1..1.0),
                rng.random_range(0.5..5.0),
                &overlap,
                &p,
            )?;
            let back = vacuum_trace_phi4(&ts)?;
            worst =
                worst.max(back.max_coeff_diff(&EpsSeries::constant(overlap.factor(), p.order())));
        }
        Ok(CheckOutcome::gate(
            "trace_round_trip",
            worst <= 1e-10,
            format!("max coefficient difference {worst:.3e} (tolerance 1e-10)"),
        ))
    });
    vec![phir, round]
}

fn constants() -> Vec<CheckOutcome> {
    let p = SchemeParams::from_tv(1.0, 1.0, 1.0, 1.0).expect("unit parameters are valid");
    vec![
        CheckOutcome::gate(
            "plane_wave_trace",
            plane_wave_trace(&p) == 0.5,
            format!("1/(2TV) at TV = 1 gives {}", plane_wave_trace(&p)),
        ),
        CheckOutcome::info(
            "tau_value",
            format!("closed-form contour constant {:.15}", contour::tau()),
        ),
    ]
}

pub fn run_checks(ctx: &CheckContext) -> Vec<CheckOutcome> {
    let mut rng = StdRng::seed_from_u64(ctx.seed);
    let mut out = vec![
        delta_oracle(ctx, &mut rng),
        chi_oracle(&mut rng),
        chi_sign_finding(),
        eta_zero(ctx, &mut rng),
        series_exponents(ctx),
    ];
    out.extend(entropy_identities());
    out.push(renyi());
    out.push(spectral());
    out.extend(traces(&mut rng));
    out.extend(constants());
    out.extend(informational_entropy());
    out
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.status != Status::Fail)
}
