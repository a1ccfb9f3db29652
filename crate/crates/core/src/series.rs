//! Truncated Laurent series in ε = d − 4 with powers of ln ε.
//!
//! An [`EpsSeries`] stores `Σ c_{k,ℓ} ε^k ln^ℓ ε` together with the order
//! `kmax` up to which its coefficients are trustworthy. Every operation
//! propagates `kmax` the way an `O(ε^{kmax+1})` remainder would, so a result
//! never reports coefficients it cannot vouch for.

use alloc::collections::BTreeMap;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::specialfns::{self, EULER_GAMMA};
use crate::Complex;

/// Deepest pole a series may carry.
pub const KMIN: i32 = -4;
/// Default maximal power of ln ε.
pub const DEFAULT_LOGCAP: u32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct EpsSeries {
    terms: BTreeMap<(i32, u32), Complex>,
    kmax: i32,
    logcap: u32,
}

/// The coefficients reported for every regularized quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleParts {
    /// Coefficient of ε⁻².
    pub pole2: Complex,
    /// Coefficient of ε⁻¹.
    pub pole1: Complex,
    /// Coefficient of ln ε.
    pub logeps: Complex,
}

/// ln with the branch policy ln(−x) = ln x + iπ for x > 0.
pub fn branch_ln(z: Complex) -> Complex {
    let z = if z.im == 0.0 {
        Complex::new(z.re, 0.0)
    } else {
        z
    };
    z.ln()
}

impl EpsSeries {
    pub fn zero(kmax: i32) -> Self {
        Self {
            terms: BTreeMap::new(),
            kmax,
            logcap: DEFAULT_LOGCAP,
        }
    }

    pub fn constant(c: Complex, kmax: i32) -> Self {
        Self::zero(kmax).with_term(0, 0, c)
    }

    pub fn real(c: f64, kmax: i32) -> Self {
        Self::constant(Complex::new(c, 0.0), kmax)
    }

    /// Builds a series from `(k, ℓ, c)` triples. Terms above `kmax` are dropped.
    pub fn from_terms<I>(terms: I, kmax: i32) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, u32, Complex)>,
    {
        let mut s = Self::zero(kmax);
        for (k, l, c) in terms {
            s.check_key(k, l)?;
            s.push(k, l, c);
        }
        Ok(s)
    }

    /// Adds `c ε^k ln^ℓ ε`; panics if the key is outside capacity.
    pub fn with_term(mut self, k: i32, l: u32, c: Complex) -> Self {
        self.check_key(k, l).expect("term outside series capacity");
        self.push(k, l, c);
        self
    }

    pub fn with_logcap(mut self, logcap: u32) -> Self {
        assert!(
            self.terms.keys().all(|&(_, l)| l <= logcap),
            "existing terms exceed the new logcap"
        );
        self.logcap = logcap;
        self
    }

    fn check_key(&self, k: i32, l: u32) -> Result<()> {
        if k < KMIN {
            return Err(Error::TruncationUnderflow {
                power: k,
                min: KMIN,
            });
        }
        if l > self.logcap {
            return Err(Error::LogOverflow {
                degree: l,
                cap: self.logcap,
            });
        }
        Ok(())
    }

    fn push(&mut self, k: i32, l: u32, c: Complex) {
        if k > self.kmax || c == Complex::new(0.0, 0.0) {
            return;
        }
        let slot = self.terms.entry((k, l)).or_insert(Complex::new(0.0, 0.0));
        *slot += c;
        if *slot == Complex::new(0.0, 0.0) {
            self.terms.remove(&(k, l));
        }
    }

    pub fn kmax(&self) -> i32 {
        self.kmax
    }

    pub fn logcap(&self) -> u32 {
        self.logcap
    }

    pub fn coeff(&self, k: i32, l: u32) -> Complex {
        self.terms.get(&(k, l)).copied().unwrap_or_default()
    }

    /// Nonzero terms in increasing `(k, ℓ)` order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, u32, Complex)> + '_ {
        self.terms.iter().map(|(&(k, l), &c)| (k, l, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest power with a nonzero coefficient.
    pub fn leading_power(&self) -> Option<i32> {
        self.terms.keys().next().map(|&(k, _)| k)
    }

    fn lead_or_unknown(&self) -> i32 {
        self.leading_power().unwrap_or(self.kmax + 1)
    }

    /// Lowers the valid order to `kmax` (no-op if already lower).
    pub fn truncate(&self, kmax: i32) -> Self {
        let kmax = kmax.min(self.kmax);
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(&(k, _), _)| k <= kmax)
                .map(|(&key, &c)| (key, c))
                .collect(),
            kmax,
            logcap: self.logcap,
        }
    }

    /// Multiplies by ε^p.
    pub fn shift(&self, p: i32) -> Result<Self> {
        let mut out = Self::zero(self.kmax + p).with_logcap(self.logcap);
        for (k, l, c) in self.terms() {
            out.check_key(k + p, l)?;
            out.push(k + p, l, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex) -> Self {
        let mut out = self.clone();
        if c == Complex::new(0.0, 0.0) {
            out.terms.clear();
            return out;
        }
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    /// Drops coefficients with modulus below `tol`.
    pub fn chop(&self, tol: f64) -> Self {
        let mut out = self.clone();
        out.terms.retain(|_, c| c.norm() >= tol);
        out
    }

    /// Real parts of every coefficient.
    pub fn re(&self) -> Self {
        let mut out = Self::zero(self.kmax).with_logcap(self.logcap);
        for (k, l, c) in self.terms() {
            out.push(k, l, Complex::new(c.re, 0.0));
        }
        out
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let kmax = (self.kmax + other.lead_or_unknown()).min(other.kmax + self.lead_or_unknown());
        let mut out = Self::zero(kmax).with_logcap(self.logcap.min(other.logcap));
        for (ka, la, ca) in self.terms() {
            for (kb, lb, cb) in other.terms() {
                let k = ka + kb;
                if k > kmax {
                    continue;
                }
                out.check_key(k, la + lb)?;
                out.push(k, la + lb, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn powi(&self, n: u32) -> Result<Self> {
        let mut acc = Self::real(1.0, i32::MAX / 4).with_logcap(self.logcap);
        for _ in 0..n {
            acc = acc.checked_mul(self)?;
        }
        if n == 0 {
            acc = acc.truncate(self.kmax.max(0));
        }
        Ok(acc)
    }

    /// Splits `self = c ε^lead (1 + u)`; `u` starts at ε¹.
    fn factor_leading(&self) -> Result<(i32, Complex, Self)> {
        let lead = self.leading_power().ok_or(Error::NonInvertible)?;
        let c = self.coeff(lead, 0);
        let log_at_lead = self.terms().any(|(k, l, _)| k == lead && l > 0);
        if c == Complex::new(0.0, 0.0) || log_at_lead {
            return Err(Error::NonInvertible);
        }
        let mut u = Self::zero(self.kmax - lead).with_logcap(self.logcap);
        for (k, l, v) in self.terms() {
            if (k, l) != (lead, 0) {
                u.push(k - lead, l, v / c);
            }
        }
        Ok((lead, c, u))
    }

    /// Σ_{n=0}^{N} coeff(n) uⁿ for a series `u` that starts at ε¹.
    fn compose(u: &Self, coeff: impl Fn(u32) -> Complex) -> Result<Self> {
        let kmax = u.kmax;
        let mut out = Self::constant(coeff(0), kmax).with_logcap(u.logcap);
        let mut power = Self::real(1.0, kmax).with_logcap(u.logcap);
        for n in 1..=kmax.max(0) as u32 {
            power = power.checked_mul(u)?.truncate(kmax);
            if power.is_zero() {
                break;
            }
            out = &out + &power.scale(coeff(n));
        }
        Ok(out.truncate(kmax))
    }

    pub fn inv(&self) -> Result<Self> {
        let (lead, c, u) = self.factor_leading()?;
        let geometric = Self::compose(&u, |n| {
            Complex::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        })?;
        // valid order of 1/b is kmax_b − 2·lead_b
        geometric.scale(c.inv()).shift(-lead)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    /// ln of the series: ln c + lead·ln ε + ln(1 + u).
    pub fn ln(&self) -> Result<Self> {
        let (lead, c, u) = self.factor_leading()?;
        let mercator = Self::compose(&u, |n| {
            if n == 0 {
                Complex::new(0.0, 0.0)
            } else {
                let s = if n % 2 == 1 { 1.0 } else { -1.0 };
                Complex::new(s / n as f64, 0.0)
            }
        })?;
        let mut out = mercator;
        out.check_key(0, 0)?;
        out.push(0, 0, branch_ln(c));
        if lead != 0 {
            out.check_key(0, 1)?;
            out.push(0, 1, Complex::new(lead as f64, 0.0));
        }
        Ok(out)
    }

    /// exp of a series with no poles and no ln ε at order zero.
    pub fn exp(&self) -> Result<Self> {
        if self.kmax < 0 {
            return Err(Error::InvalidParameter("exp needs a known constant term"));
        }
        if self.terms().any(|(k, l, _)| k < 0 || (k == 0 && l > 0)) {
            return Err(Error::NonInvertible);
        }
        let a0 = self.coeff(0, 0);
        let mut u = self.clone();
        u.terms.remove(&(0, 0));
        let series = Self::compose(&u, |n| Complex::new(1.0 / specialfns::factorial(n), 0.0))?;
        Ok(series.scale(a0.exp()))
    }

    /// Value of the truncated sum at a numeric ε (ln ε = ln|ε| + iπ for ε < 0).
    pub fn eval(&self, eps: f64) -> Complex {
        let ln_eps = branch_ln(Complex::new(eps, 0.0));
        self.terms()
            .map(|(k, l, c)| c * eps.powi(k) * ln_eps.powu(l))
            .fold(Complex::new(0.0, 0.0), |a, b| a + b)
    }

    pub fn finite_part(&self) -> Complex {
        self.coeff(0, 0)
    }

    pub fn pole_parts(&self) -> PoleParts {
        PoleParts {
            pole2: self.coeff(-2, 0),
            pole1: self.coeff(-1, 0),
            logeps: self.coeff(0, 1),
        }
    }

    /// Largest coefficient difference over the common valid range.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let kmax = self.kmax.min(other.kmax);
        let diff = &self.truncate(kmax) - &other.truncate(kmax);
        diff.terms().map(|(_, _, c)| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for &EpsSeries {
    type Output = EpsSeries;

    fn add(self, rhs: &EpsSeries) -> EpsSeries {
        let kmax = self.kmax.min(rhs.kmax);
        let mut out = EpsSeries::zero(kmax).with_logcap(self.logcap.min(rhs.logcap));
        for (k, l, c) in self.terms().chain(rhs.terms()) {
            assert!(
                l <= out.logcap,
                "ln(eps) degree {l} above the common logcap"
            );
            out.push(k, l, c);
        }
        out
    }
}

impl Sub for &EpsSeries {
    type Output = EpsSeries;

    fn sub(self, rhs: &EpsSeries) -> EpsSeries {
        self + &(-rhs)
    }
}

impl Neg for &EpsSeries {
    type Output = EpsSeries;

    fn neg(self) -> EpsSeries {
        self.scale(Complex::new(-1.0, 0.0))
    }
}

impl Add for EpsSeries {
    type Output = EpsSeries;
    fn add(self, rhs: EpsSeries) -> EpsSeries {
        &self + &rhs
    }
}

impl Sub for EpsSeries {
    type Output = EpsSeries;
    fn sub(self, rhs: EpsSeries) -> EpsSeries {
        &self - &rhs
    }
}

impl Neg for EpsSeries {
    type Output = EpsSeries;
    fn neg(self) -> EpsSeries {
        -&self
    }
}

impl Mul<Complex> for &EpsSeries {
    type Output = EpsSeries;
    fn mul(self, rhs: Complex) -> EpsSeries {
        self.scale(rhs)
    }
}

impl Mul<f64> for &EpsSeries {
    type Output = EpsSeries;
    fn mul(self, rhs: f64) -> EpsSeries {
        self.scale(Complex::new(rhs, 0.0))
    }
}

impl fmt::Display for EpsSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")?;
        }
        for (i, (k, l, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if k != 0 {
                write!(f, "·ε^{k}")?;
            }
            if l != 0 {
                write!(f, "·ln^{l}ε")?;
            }
        }
        write!(f, " + O(ε^{})", self.kmax + 1)
    }
}

/// Series of Γ(c0 + slope·ε) to order `order`.
///
/// At a nonpositive integer `c0 = −n` the expansion starts with the simple
/// pole `(−1)ⁿ/(n!·slope)·ε⁻¹`.
pub fn gamma_series(c0: Complex, slope: Complex, order: i32) -> Result<EpsSeries> {
    match specialfns::nonpositive_integer(c0) {
        None => {
            // ln Γ(c0 + x) − ln Γ(c0) = Σ_{m≥1} ψ⁽ᵐ⁻¹⁾(c0) xᵐ/m!
            let mut log = EpsSeries::zero(order);
            let mut sm = Complex::new(1.0, 0.0);
            for m in 1..=order.max(0) as u32 {
                sm *= slope;
                let psi = specialfns::polygamma(m - 1, c0)?;
                log.push(m as i32, 0, psi * sm / specialfns::factorial(m));
            }
            Ok(log.exp()?.scale(specialfns::gamma(c0)?))
        }
        Some(n) => {
            if slope == Complex::new(0.0, 0.0) {
                return Err(Error::Pole(c0.re));
            }
            // Γ(−n + x) = Γ(1 + x) / x · Π_{k=1}^{n} 1/(x − k)
            let inner = order + 1;
            let mut acc = gamma_series(Complex::new(1.0, 0.0), slope, inner)?;
            for k in 1..=n {
                let kf = k as f64;
                let mut factor = EpsSeries::zero(inner);
                let mut sm = Complex::new(1.0, 0.0);
                for m in 0..=inner {
                    factor.push(m, 0, -sm / kf.powi(m + 1));
                    sm *= slope;
                }
                acc = acc.checked_mul(&factor)?;
            }
            acc.scale(slope.inv()).shift(-1).map(|s| s.truncate(order))
        }
    }
}

/// Series of ψ(c0 + slope·ε) to order `order`; simple pole at nonpositive integers.
pub fn digamma_series(c0: Complex, slope: Complex, order: i32) -> Result<EpsSeries> {
    let mut out = EpsSeries::zero(order);
    match specialfns::nonpositive_integer(c0) {
        None => {
            let mut sm = Complex::new(1.0, 0.0);
            for m in 0..=order.max(0) as u32 {
                let psi = specialfns::polygamma(m, c0)?;
                out.push(m as i32, 0, psi * sm / specialfns::factorial(m));
                sm *= slope;
            }
        }
        Some(n) => {
            if slope == Complex::new(0.0, 0.0) {
                return Err(Error::Pole(c0.re));
            }
            // ψ(−n + x) = ψ(1 + x) − 1/x + Σ_{k=1}^{n} Σ_m x^m / k^{m+1}
            out = digamma_series(Complex::new(1.0, 0.0), slope, order)?;
            out.check_key(-1, 0)?;
            out.push(-1, 0, -slope.inv());
            let mut sm = Complex::new(1.0, 0.0);
            for m in 0..=order.max(0) {
                let tail: f64 = (1..=n).map(|k| (k as f64).powi(-(m + 1))).sum();
                out.push(m, 0, sm * tail);
                sm *= slope;
            }
        }
    }
    Ok(out)
}

/// Series of the harmonic number H_{c0 + slope·ε} = γ + ψ(c0 + 1 + slope·ε).
pub fn harmonic_series(c0: Complex, slope: Complex, order: i32) -> Result<EpsSeries> {
    let psi = digamma_series(c0 + 1.0, slope, order)?;
    Ok(&psi + &EpsSeries::real(EULER_GAMMA, order))
}

/// Series of base^{slope·ε} = exp(slope·ε·ln base).
pub fn power_series(base: Complex, slope: Complex, order: i32) -> Result<EpsSeries> {
    if base == Complex::new(0.0, 0.0) {
        return Err(Error::InvalidParameter("power_series base must be nonzero"));
    }
    let a = slope * branch_ln(base);
    let mut out = EpsSeries::zero(order);
    let mut am = Complex::new(1.0, 0.0);
    for m in 0..=order.max(0) as u32 {
        out.push(m as i32, 0, am / specialfns::factorial(m));
        am *= a;
    }
    Ok(out)
}
