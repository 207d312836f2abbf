//! Torsion of a suspension assembled from Euler characteristics and circle
//! factors, plus the product, quotient and fibration combinators.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::dynamics::{euler_from_fixed_points, psi_sup, CutoffProfile, Scenario};
use crate::error::{Error, Result};
use crate::scalar::ComplexScalar;
use crate::spectra::{lefschetz_number, GradedSpectrum};
use crate::zeta_spectral::{exp_tail, log_series_tail, torsion_closed_form, Truncation, ZetaValue};

fn off_cut(what: &str, sigma: Complex64) -> Result<()> {
    if sigma.re < 0.0 && sigma.im == 0.0 {
        return Err(Error::BranchValue {
            what: what.to_string(),
            value: sigma,
        });
    }
    Ok(())
}

/// `T_n(d, sigma)`: the torsion of the line with `Z` acting by translation, at `n`.
///
/// `T_0 = exp(-sqrt(sigma)/2)` and `T_n = exp(e^{-|n| sqrt(sigma)} / (2|n|))`.
pub fn circle_factor_torsion(n: i64, sigma: Complex64) -> Result<Complex64> {
    off_cut("sigma", sigma)?;
    let root = sigma.sqrt();
    if n == 0 {
        return Ok((-root / 2.0).exp());
    }
    let k = n.unsigned_abs() as f64;
    Ok(((-k * root).exp() / (2.0 * k)).exp())
}

/// `chi_{(g,n)}` for `|n|` up to some window, with `|chi(n)| <= bound_m * e^{growth_exponent |n|}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerSequence {
    chi: BTreeMap<i64, Complex64>,
    bound_m: f64,
    growth_exponent: f64,
}

impl EulerSequence {
    pub fn new(chi: BTreeMap<i64, Complex64>, bound_m: f64) -> Result<Self> {
        Self::with_growth(chi, bound_m, 0.0)
    }

    pub fn with_growth(chi: BTreeMap<i64, Complex64>, bound_m: f64, growth_exponent: f64) -> Result<Self> {
        if !(bound_m >= 0.0) || !(growth_exponent >= 0.0) {
            return Err(Error::Precondition("Euler bound constants must be non-negative".into()));
        }
        for (&n, v) in &chi {
            let limit = bound_m * (growth_exponent * n.unsigned_abs() as f64).exp();
            if v.norm() > limit * (1.0 + 1e-12) {
                return Err(Error::Precondition(format!("|chi({n})| = {} exceeds the bound {limit}", v.norm())));
            }
        }
        Ok(EulerSequence {
            chi,
            bound_m,
            growth_exponent,
        })
    }

    /// `chi(n)` for `|n| <= n_max` from a function.
    pub fn from_fn(n_max: u32, bound_m: f64, f: impl Fn(i64) -> Complex64) -> Result<Self> {
        let n_max = n_max as i64;
        Self::new((-n_max..=n_max).map(|n| (n, f(n))).collect(), bound_m)
    }

    /// `chi(n) = L(n)`, the spectral side.
    pub fn from_spectrum(spec: &GradedSpectrum, n_max: u32) -> Self {
        let mut bound = 0.0;
        let mut log_rho: f64 = 0.0;
        for (_, p) in spec.pairs() {
            bound += p.multiplicity as f64 * p.mu_g.norm();
            log_rho = log_rho.max(p.mu_t.norm().ln().abs());
        }
        let n_max = n_max as i64;
        let chi = (-n_max..=n_max).map(|n| (n, lefschetz_number(spec, n))).collect();
        // bound holds by the triangle inequality; the slack absorbs rounding
        Self::with_growth(chi, bound * (1.0 + 1e-10), log_rho).expect("Lefschetz numbers respect their bound")
    }

    /// `chi(n)` from fixed points of `g^-1 T^n`, bounded through the declared growth.
    pub fn from_scenario(scenario: &Scenario, cutoffs: &CutoffProfile, n_max: u32) -> Result<Self> {
        let n_max = n_max as i64;
        let mut chi = BTreeMap::new();
        for n in -n_max..=n_max {
            chi.insert(n, euler_from_fixed_points(scenario, cutoffs, n)?);
        }
        let mut bound = scenario.growth.prefactor * scenario.rank as f64 * psi_sup(scenario, cutoffs);
        // chi(0) may come from a whole fixed manifold rather than isolated points
        bound = bound.max(chi[&0].norm());
        Self::with_growth(chi, bound, scenario.growth.exponent)
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        self.chi.get(&n).copied()
    }

    pub fn values(&self) -> &BTreeMap<i64, Complex64> {
        &self.chi
    }

    pub fn bound_m(&self) -> f64 {
        self.bound_m
    }

    pub fn growth_exponent(&self) -> f64 {
        self.growth_exponent
    }

    fn require(&self, n: i64) -> Result<Complex64> {
        self.get(n)
            .ok_or_else(|| Error::Precondition(format!("Euler sequence has no value at n = {n}")))
    }
}

/// Where a [`TorsionProfile`] may be evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TorsionDomain {
    /// `sigma` anywhere off `(-inf, 0)`.
    OffNegativeAxis,
    /// `Re(sqrt(sigma)) > bound`.
    SqrtRealAbove(f64),
    /// `Re(sigma) > bound`.
    RealAbove(f64),
}

impl TorsionDomain {
    fn check(&self, sigma: Complex64) -> Result<()> {
        let (ok, requirement) = match *self {
            TorsionDomain::OffNegativeAxis => (!(sigma.re < 0.0 && sigma.im == 0.0), "sigma off (-inf, 0)".to_string()),
            TorsionDomain::SqrtRealAbove(b) => (sigma.sqrt().re > b, format!("Re(sqrt(sigma)) > {b}")),
            TorsionDomain::RealAbove(b) => (sigma.re > b, format!("Re(sigma) > {b}")),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain { sigma, requirement })
        }
    }
}

/// Analytic hypotheses behind a profile, carried along but not checked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProfileFlags {
    pub novikov_shubin_positive: bool,
    pub svarc_milnor: bool,
}

type TorsionFn = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// `sigma -> T(sigma)` together with the region where it is defined.
#[derive(Clone)]
pub struct TorsionProfile {
    f: Arc<TorsionFn>,
    pub domain: TorsionDomain,
    pub flags: ProfileFlags,
}

impl fmt::Debug for TorsionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorsionProfile")
            .field("domain", &self.domain)
            .field("flags", &self.flags)
            .finish_non_exhaustive()
    }
}

impl TorsionProfile {
    pub fn new(domain: TorsionDomain, f: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static) -> Self {
        TorsionProfile {
            f: Arc::new(f),
            domain,
            flags: ProfileFlags::default(),
        }
    }

    pub fn constant(value: Complex64) -> Self {
        Self::new(TorsionDomain::OffNegativeAxis, move |_| Ok(value))
    }

    pub fn circle_factor(n: i64) -> Self {
        Self::new(TorsionDomain::OffNegativeAxis, move |s| circle_factor_torsion(n, s))
    }

    /// Closed-form torsion of a graded spectrum.
    pub fn spectral(spec: GradedSpectrum) -> Self {
        Self::new(TorsionDomain::SqrtRealAbove(0.0), move |s| torsion_closed_form(&spec, s))
    }

    pub fn with_flags(mut self, flags: ProfileFlags) -> Self {
        self.flags = flags;
        self
    }

    /// `sigma -> T(sigma)^exponent`, principal branch.
    pub fn powered(&self, exponent: Complex64) -> Self {
        let inner = self.clone();
        TorsionProfile {
            f: Arc::new(move |s| principal_power(inner.eval(s)?, exponent)),
            domain: self.domain,
            flags: self.flags,
        }
    }

    pub fn eval(&self, sigma: Complex64) -> Result<Complex64> {
        self.domain.check(sigma)?;
        (self.f)(sigma)
    }
}

/// `base^exponent`. Integer exponents use repeated multiplication; other
/// exponents use `exp(exponent * Log base)` and refuse bases on the cut.
fn principal_power(base: Complex64, exponent: Complex64) -> Result<Complex64> {
    if exponent == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let integral = exponent.im == 0.0 && exponent.re.fract() == 0.0 && exponent.re.abs() < 2f64.powi(31);
    if integral && (base != Complex64::new(0.0, 0.0) || exponent.re > 0.0) {
        return Ok(ComplexScalar::powi(&base, exponent.re as i64));
    }
    if base.on_cut() {
        return Err(Error::BranchValue {
            what: "torsion base".into(),
            value: base,
        });
    }
    Ok(ComplexScalar::powc(&base, &exponent))
}

/// `exp(-chi(0) sqrt(sigma)/2) exp(sum_{0<|n|<=N} e^{-|n| sqrt(sigma)} chi(n) / (2|n|))`.
pub fn suspension_torsion(chi: &EulerSequence, sigma: Complex64, n_max: u32) -> Result<ZetaValue> {
    if n_max == 0 {
        return Err(Error::Precondition("truncation N must be positive".into()));
    }
    off_cut("sigma", sigma)?;
    let root = sigma.sqrt();
    let a = root.re - chi.growth_exponent();
    if !(a > 0.0) {
        return Err(Error::Domain {
            sigma,
            requirement: format!("Re(sqrt(sigma)) > {}", chi.growth_exponent()),
        });
    }
    let mut log = -chi.require(0)? * root / 2.0;
    for k in 1..=n_max as i64 {
        let weight = (-(k as f64) * root).exp() / (2.0 * k as f64);
        log += (chi.require(k)? + chi.require(-k)?) * weight;
    }
    let value = log.exp();
    Ok(ZetaValue {
        value,
        truncation: Truncation::Terms(n_max),
        tail_bound: exp_tail(value.norm(), log_series_tail(chi.bound_m() / 2.0, a, n_max)),
    })
}

/// The suspension torsion with `chi` read off the fixed points of `g^-1 T^n`.
pub fn torsion_fixed_point_form(
    scenario: &Scenario,
    cutoffs: &CutoffProfile,
    sigma: Complex64,
    n_max: u32,
) -> Result<ZetaValue> {
    let chi = EulerSequence::from_scenario(scenario, cutoffs, n_max)?;
    suspension_torsion(&chi, sigma, n_max)
}

/// `t1(sigma)^chi2 * t2(sigma)^chi1`. A factor whose exponent vanishes is not evaluated.
pub fn product_torsion(
    t1: &TorsionProfile,
    chi1: Complex64,
    t2: &TorsionProfile,
    chi2: Complex64,
    sigma: Complex64,
) -> Result<Complex64> {
    let factor = |t: &TorsionProfile, e: Complex64| -> Result<Complex64> {
        if e == Complex64::new(0.0, 0.0) {
            Ok(Complex64::new(1.0, 0.0))
        } else {
            principal_power(t.eval(sigma)?, e)
        }
    };
    Ok(factor(t1, chi2)? * factor(t2, chi1)?)
}

/// Product of the factors indexed by `|n| <= N`.
pub fn quotient_torsion(factors: &BTreeMap<i64, TorsionProfile>, sigma: Complex64, n_max: u32) -> Result<Complex64> {
    factors
        .range(-(n_max as i64)..=n_max as i64)
        .try_fold(Complex64::new(1.0, 0.0), |acc, (_, t)| Ok(acc * t.eval(sigma)?))
}

/// `prod_{|n|<=N} t_e1(n)(sigma)^{chi_e2(n)} * t_e2(n)(sigma)^{chi_e1(n)}`.
pub fn fibration_torsion(
    chi_e1: &EulerSequence,
    chi_e2: impl Fn(i64) -> Complex64,
    t_e1: impl Fn(i64) -> TorsionProfile,
    t_e2: impl Fn(i64) -> TorsionProfile,
    sigma: Complex64,
    n_max: u32,
) -> Result<Complex64> {
    let n_max = n_max as i64;
    let mut acc = Complex64::new(1.0, 0.0);
    for n in -n_max..=n_max {
        acc *= product_torsion(&t_e1(n), chi_e1.require(n)?, &t_e2(n), chi_e2(n), sigma)?;
    }
    Ok(acc)
}
