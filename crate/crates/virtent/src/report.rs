//! Serializable views of library results.

use serde::{Deserialize, Serialize};
use virtent_core::entropy::EntropyBreakdown;
use virtent_core::loops::SchemeParams;
use virtent_core::series::EpsSeries;
use virtent_core::trace::{RatioCheck, RatioReport};
use virtent_core::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexDto {
    pub re: f64,
    pub im: f64,
}

impl From<Complex> for ComplexDto {
    fn from(c: Complex) -> Self {
        Self { re: c.re, im: c.im }
    }
}

/// The coefficient of ε^k ln^l ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDto {
    pub k: i32,
    pub l: u32,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDto {
    pub terms: Vec<TermDto>,
    pub kmax: i32,
}

impl From<&EpsSeries> for SeriesDto {
    fn from(s: &EpsSeries) -> Self {
        Self {
            terms: s
                .terms()
                .map(|(k, l, c)| TermDto {
                    k,
                    l,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
            kmax: s.kmax(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownReport {
    pub name: String,
    pub m0: f64,
    pub mu: f64,
    pub lambda0: f64,
    pub tv: f64,
    pub pole2: ComplexDto,
    pub pole1: ComplexDto,
    pub logeps: ComplexDto,
    pub finite: f64,
    pub residual_im: f64,
    pub non_real: bool,
    pub series: SeriesDto,
}

impl BreakdownReport {
    pub fn new(b: &EntropyBreakdown, p: &SchemeParams) -> Self {
        Self {
            name: b.name.to_string(),
            m0: p.m0(),
            mu: p.mu(),
            lambda0: p.lambda0(),
            tv: p.tv(),
            pole2: b.pole2.into(),
            pole1: b.pole1.into(),
            logeps: b.logeps.into(),
            finite: b.finite,
            residual_im: b.residual_im,
            non_real: b.non_real,
            series: (&b.series).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioCheckDto {
    pub name: String,
    pub ratio: SeriesDto,
    pub expected: SeriesDto,
    pub normalization: SeriesDto,
    pub deviation_from_unity: f64,
    pub note: String,
}

impl From<&RatioCheck> for RatioCheckDto {
    fn from(c: &RatioCheck) -> Self {
        Self {
            name: c.name.to_string(),
            ratio: (&c.ratio).into(),
            expected: (&c.expected).into(),
            normalization: (&c.normalization).into(),
            deviation_from_unity: c.deviation_from_unity(),
            note: c.note.to_string(),
        }
    }
}

pub fn ratio_report(r: &RatioReport) -> Vec<RatioCheckDto> {
    r.checks.iter().map(Into::into).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use virtent_core::entropy::s_ext_2_order0;

    #[test]
    fn breakdown_round_trips_through_json() {
        let p = SchemeParams::from_tv(1.0, 1.0, 1.0, 1.0).unwrap();
        let r = BreakdownReport::new(&s_ext_2_order0(&p), &p);
        let text = serde_json::to_string(&r).unwrap();
        let back: BreakdownReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.pole1, ComplexDto { re: -2.0, im: 0.0 });
        assert_eq!(back.series.terms.len(), 3);
    }
}
