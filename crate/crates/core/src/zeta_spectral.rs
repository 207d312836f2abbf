//! Equivariant Ruelle zeta function and equivariant analytic torsion of a
//! suspension, evaluated from the cohomology spectrum.
//!
//! Two routes are provided for each quantity: the truncated Lefschetz series
//! (with a rigorous truncation bound) and the finite product form obtained by
//! summing the logarithm series in closed form. Complex powers are principal:
//! `b^e = exp(e * Log b)` with `Log` cut along the non-positive reals.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::ComplexScalar;
use crate::spectra::{
    lefschetz_of_lifted, lift, non_acyclic_locations, superdeterminant_of_lifted, GradedSpectrum, LiftedPair,
    OperatorSide, DEFAULT_ACYCLICITY_TOLERANCE,
};

/// How a [`ZetaValue`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// Series summed over `0 < |n| <= N`.
    Terms(u32),
    ClosedForm,
}

/// An evaluated zeta or torsion value with its truncation depth and an
/// analytic bound on `|true - value|` coming from the omitted tail.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaValue<S = Complex64> {
    pub value: S,
    pub truncation: Truncation,
    pub tail_bound: f64,
}

impl<S: ComplexScalar> ZetaValue<S> {
    pub fn closed_form(value: S) -> Self {
        ZetaValue {
            value,
            truncation: Truncation::ClosedForm,
            tail_bound: 0.0,
        }
    }

    pub fn to_c64(&self) -> ZetaValue<Complex64> {
        ZetaValue {
            value: self.value.to_c64(),
            truncation: self.truncation,
            tail_bound: self.tail_bound,
        }
    }
}

/// Bound on `sum_{|n| > N} e^{-a|n|} M / |n|` for `a > 0`.
pub fn log_series_tail(m: f64, a: f64, n_max: u32) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    let next = n_max as f64 + 1.0;
    2.0 * m * (-a * next).exp() / (next * -(-a).exp_m1())
}

/// Carries a bound `r` on the omitted part of a logarithm through `exp`:
/// `|e^{s+b} - e^s| <= |e^s| (e^{|b|} - 1)`.
pub fn exp_tail(value_norm: f64, log_tail: f64) -> f64 {
    value_norm * log_tail.exp_m1()
}

/// `M` and `log(rho)` with `|L(n)| <= M rho^{|n|}`.
fn lefschetz_growth(spec: &GradedSpectrum) -> (f64, f64) {
    let mut m = 0.0;
    let mut log_rho: f64 = 0.0;
    for (_, p) in spec.pairs() {
        m += p.multiplicity as f64 * p.mu_g.norm();
        log_rho = log_rho.max(p.mu_t.norm().ln().abs());
    }
    (m, log_rho)
}

fn require_terms(n_max: u32) -> Result<()> {
    if n_max == 0 {
        return Err(Error::Precondition("series truncation N must be positive".into()));
    }
    Ok(())
}

/// `sum_{n=1}^{N} x^n / n * (L(n) + L(-n))`, i.e. the symmetric log-series with weight `x^{|n|}`.
fn symmetric_log_series<S: ComplexScalar>(pairs: &[LiftedPair<S>], x: &S, n_max: u32) -> S {
    let weights: Vec<S> = pairs.iter().map(LiftedPair::weight).collect();
    let mut forward: Vec<S> = pairs.iter().map(|p| p.mu_t.clone()).collect();
    let mut backward: Vec<S> = pairs.iter().map(|p| p.mu_t_inv.clone()).collect();
    let mut x_pow = x.clone();
    let mut total = S::zero();
    for n in 1..=n_max {
        let mut lefschetz_pair = S::zero();
        for ((w, f), b) in weights.iter().zip(&forward).zip(&backward) {
            lefschetz_pair = lefschetz_pair + w.clone() * (f.clone() + b.clone());
        }
        total = total + x_pow.clone() * lefschetz_pair / S::from_f64(n as f64);
        if n < n_max {
            x_pow = x_pow * x.clone();
            for (i, p) in pairs.iter().enumerate() {
                forward[i] = forward[i].clone() * p.mu_t.clone();
                backward[i] = backward[i].clone() * p.mu_t_inv.clone();
            }
        }
    }
    total
}

/// `Log[(1 - x mu)(1 - x / mu)]` for every pair, checking for zeros and the cut.
fn log_bases<S: ComplexScalar>(pairs: &[LiftedPair<S>], x: &S) -> Result<Vec<S>> {
    pairs
        .iter()
        .map(|p| {
            let base = (S::one() - x.clone() * p.mu_t.clone()) * (S::one() - x.clone() * p.mu_t_inv.clone());
            if base.is_zero() {
                Err(Error::Pole { location: p.location })
            } else if base.on_cut() {
                Err(Error::Branch {
                    location: p.location,
                    base: base.to_c64(),
                })
            } else {
                Ok(base.ln())
            }
        })
        .collect()
}

/// Truncated series `exp(sum_{0<|n|<=N} e^{-|n| sigma} / |n| * L(n))`.
pub fn ruelle_series(spec: &GradedSpectrum, sigma: Complex64, n_max: u32) -> Result<ZetaValue> {
    ruelle_series_in(spec, sigma, n_max)
}

pub fn ruelle_series_in<S: ComplexScalar>(spec: &GradedSpectrum, sigma: S, n_max: u32) -> Result<ZetaValue<S>> {
    require_terms(n_max)?;
    let s = sigma.to_c64();
    if !(s.re > 0.0) {
        return Err(Error::Domain {
            sigma: s,
            requirement: "series mode needs Re(sigma) > 0".into(),
        });
    }
    let (m, log_rho) = lefschetz_growth(spec);
    let rate = s.re - log_rho;
    if m > 0.0 && rate <= 0.0 {
        return Err(Error::Domain {
            sigma: s,
            requirement: format!("series mode needs Re(sigma) > {log_rho:e}"),
        });
    }
    let pairs = lift::<S>(spec);
    let x = (-sigma).exp();
    let value = symmetric_log_series(&pairs, &x, n_max).exp();
    let tail_bound = exp_tail(value.norm(), log_series_tail(m, rate, n_max));
    Ok(ZetaValue {
        value,
        truncation: Truncation::Terms(n_max),
        tail_bound,
    })
}

/// `prod_{q,j} [(1 - e^{-sigma} mu_T)(1 - e^{-sigma} mu_T^{-1})]^{-(-1)^q mu_g}`.
pub fn ruelle_closed_form(spec: &GradedSpectrum, sigma: Complex64) -> Result<Complex64> {
    ruelle_closed_form_in(spec, sigma)
}

pub fn ruelle_closed_form_in<S: ComplexScalar>(spec: &GradedSpectrum, sigma: S) -> Result<S> {
    let pairs = lift::<S>(spec);
    let x = (-sigma).exp();
    let logs = log_bases(&pairs, &x)?;
    let total = pairs
        .iter()
        .zip(logs)
        .fold(S::zero(), |acc, (p, l)| acc - p.weight() * l);
    Ok(total.exp())
}

/// `[Sdet(1 - e^{-sigma} T*) Sdet(1 - e^{-sigma} (T^-1)*)]^{-1}`; only meaningful when `g = e`.
pub fn sdet_ruelle_identity(spec: &GradedSpectrum, sigma: Complex64) -> Result<Complex64> {
    sdet_ruelle_identity_in(spec, sigma)
}

pub fn sdet_ruelle_identity_in<S: ComplexScalar>(spec: &GradedSpectrum, sigma: S) -> Result<S> {
    if !spec.is_identity_element() {
        return Err(Error::Precondition(
            "superdeterminant form requires every mu_g = 1".into(),
        ));
    }
    let pairs = lift::<S>(spec);
    let x = (-sigma).exp();
    let forward = superdeterminant_of_lifted(&pairs, OperatorSide::TForward, &x)?;
    let inverse = superdeterminant_of_lifted(&pairs, OperatorSide::TInverse, &x)?;
    let product = forward * inverse;
    if product.is_zero() {
        // an even-degree factor vanished; report the first one
        let location = pairs
            .iter()
            .find(|p| {
                (S::one() - x.clone() * p.mu_t.clone()).is_zero()
                    || (S::one() - x.clone() * p.mu_t_inv.clone()).is_zero()
            })
            .map(|p| p.location)
            .unwrap_or((0, 0));
        return Err(Error::Pole { location });
    }
    Ok(product.recip())
}

/// Principal `sqrt(sigma)`, rejecting `sigma` on `(-inf, 0]` where `Re sqrt(sigma) = 0`.
fn series_sqrt<S: ComplexScalar>(sigma: &S) -> Result<S> {
    let root = sigma.sqrt();
    if !(root.to_c64().re > 0.0) {
        return Err(Error::BranchValue {
            what: "sigma".into(),
            value: sigma.to_c64(),
        });
    }
    Ok(root)
}

/// Truncated torsion series
/// `exp(-chi0 sqrt(sigma)/2) exp(sum_{0<|n|<=N} e^{-|n| sqrt(sigma)} L(n) / (2|n|))`.
pub fn torsion_series(spec: &GradedSpectrum, sigma: Complex64, n_max: u32) -> Result<ZetaValue> {
    torsion_series_in(spec, sigma, n_max)
}

pub fn torsion_series_in<S: ComplexScalar>(spec: &GradedSpectrum, sigma: S, n_max: u32) -> Result<ZetaValue<S>> {
    require_terms(n_max)?;
    let root = series_sqrt(&sigma)?;
    let (m, log_rho) = lefschetz_growth(spec);
    let rate = root.to_c64().re - log_rho;
    if m > 0.0 && rate <= 0.0 {
        return Err(Error::Domain {
            sigma: sigma.to_c64(),
            requirement: format!("series mode needs Re(sqrt(sigma)) > {log_rho:e}"),
        });
    }
    let pairs = lift::<S>(spec);
    let chi0 = lefschetz_of_lifted(&pairs, 0);
    let x = (-root.clone()).exp();
    let half = S::from_f64(0.5);
    let log = -(chi0 * root * half.clone()) + symmetric_log_series(&pairs, &x, n_max) * half;
    let value = log.exp();
    let tail_bound = exp_tail(value.norm(), 0.5 * log_series_tail(m, rate, n_max));
    Ok(ZetaValue {
        value,
        truncation: Truncation::Terms(n_max),
        tail_bound,
    })
}

/// `exp(-chi0 sqrt(sigma)/2) prod_{q,j} [(1 - e^{-sqrt sigma} mu_T)(1 - e^{-sqrt sigma} mu_T^{-1})]^{-(-1)^q mu_g / 2}`.
pub fn torsion_closed_form(spec: &GradedSpectrum, sigma: Complex64) -> Result<Complex64> {
    torsion_closed_form_in(spec, sigma)
}

pub fn torsion_closed_form_in<S: ComplexScalar>(spec: &GradedSpectrum, sigma: S) -> Result<S> {
    let pairs = lift::<S>(spec);
    let root = sigma.sqrt();
    let chi0 = lefschetz_of_lifted(&pairs, 0);
    let x = (-root.clone()).exp();
    let logs = log_bases(&pairs, &x)?;
    let half = S::from_f64(0.5);
    let products = pairs
        .iter()
        .zip(logs)
        .fold(S::zero(), |acc, (p, l)| acc - p.weight() * l);
    Ok((-(chi0 * root) * half.clone() + products * half).exp())
}

/// `T_g(nabla^E) = prod_q (prod_j |1 - mu_T|^{-mu_g})^{(-1)^q}` for acyclic spectra.
pub fn torsion_at_zero(spec: &GradedSpectrum) -> Result<Complex64> {
    torsion_at_zero_in(spec)
}

pub fn torsion_at_zero_in<S: ComplexScalar>(spec: &GradedSpectrum) -> Result<S> {
    let offenders = non_acyclic_locations(spec, DEFAULT_ACYCLICITY_TOLERANCE);
    if !offenders.is_empty() {
        return Err(Error::NotAcyclic { offenders });
    }
    let pairs = lift::<S>(spec);
    let total = pairs.iter().fold(S::zero(), |acc, p| {
        let distance = (S::one() - p.mu_t.clone()).abs();
        acc - p.weight() * distance.ln()
    });
    Ok(total.exp())
}

/// `R(sigma) - exp(sigma chi0) T(sigma^2)^2` from the two product forms.
///
/// Vanishes identically for `Re(sigma) > 0`; for `Re(sigma) < 0` the principal
/// `sqrt(sigma^2)` is `-sigma` and the two sides are different continuations.
pub fn fried_residual(spec: &GradedSpectrum, sigma: Complex64) -> Result<Complex64> {
    fried_residual_in(spec, sigma)
}

pub fn fried_residual_in<S: ComplexScalar>(spec: &GradedSpectrum, sigma: S) -> Result<S> {
    let ruelle = ruelle_closed_form_in(spec, sigma.clone())?;
    let torsion = torsion_closed_form_in(spec, sigma.clone() * sigma.clone())?;
    let chi0 = crate::spectra::lefschetz_number_in::<S>(spec, 0);
    Ok(ruelle - (sigma * chi0).exp() * torsion.clone() * torsion)
}

/// `|R(10^{-k}) - T(0)^2|` for each `k`, the approach to the Fried value along positive reals.
pub fn abel_defects(spec: &GradedSpectrum, exponents: &[i32]) -> Result<Vec<f64>> {
    let at_zero = torsion_at_zero(spec)?;
    let target = at_zero * at_zero;
    exponents
        .iter()
        .map(|&k| {
            let sigma = Complex64::new(10f64.powi(-k), 0.0);
            Ok((ruelle_closed_form(spec, sigma)? - target).norm())
        })
        .collect()
}
