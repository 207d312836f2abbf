//! Torsion from a heat trace by numerical Mellin transform.
//!
//! `T(sigma) = exp(-F'(0)/2)` with
//! `F(s) = (1/Gamma(s)) int_0^inf t^{s-1} e^{-sigma t} Tr(t) dt`.
//! The integral is split at `t = 1`, both halves are computed by
//! Gauss-Legendre quadrature in `v = ln t`, and `F'(0)` by a central difference.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Accuracy demanded of every quadrature before [`mellin_torsion`] returns.
pub const QUADRATURE_LIMIT: f64 = 1e-6;

/// Taylor coefficients of `1/Gamma(s)` at 0, starting with `s^1`.
const RGAMMA_TAYLOR: [f64; 6] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
];

/// `1/Gamma(s)` for `|s|` small.
pub fn reciprocal_gamma_near_zero(s: f64) -> f64 {
    RGAMMA_TAYLOR.iter().rev().fold(0.0, |acc, c| acc * s + c) * s
}

fn require_positive(what: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainValue {
            what: what.to_string(),
            value,
            requirement: format!("{what} > 0"),
        })
    }
}

/// `Tr_n(e^{-t Delta})` on the line with `Z` acting by translation: `e^{-n^2/4t} / sqrt(4 pi t)`.
pub fn heat_trace_line(n: i64, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("the line heat trace is taken at n != 0".into()));
    }
    require_positive("t", t)?;
    let n = n as f64;
    Ok((-n * n / (4.0 * t)).exp() / (4.0 * PI * t).sqrt())
}

/// `sum_k (-1)^k k Tr_n(e^{-t Delta_k})` on the line: only 1-forms carry
/// weight, so this is `-heat_trace_line(n, t)`.
pub fn alternating_heat_trace_line(n: i64, t: f64) -> Result<f64> {
    Ok(-heat_trace_line(n, t)?)
}

type TraceFn = dyn Fn(f64) -> f64 + Send + Sync;

/// An alternating heat trace `t -> Tr(t)` with the decay data the quadrature relies on.
#[derive(Clone)]
pub struct HeatTraceModel {
    trace: Arc<TraceFn>,
    /// `r` with `Tr(t) = O(e^{-r/t})` as `t -> 0`.
    pub small_t_rate: f64,
    /// `(C, p)` with `|Tr(t)| <= C t^p` for `t >= 1`.
    pub large_t_bound: (f64, f64),
}

impl fmt::Debug for HeatTraceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeatTraceModel")
            .field("small_t_rate", &self.small_t_rate)
            .field("large_t_bound", &self.large_t_bound)
            .finish_non_exhaustive()
    }
}

impl HeatTraceModel {
    pub fn new(
        small_t_rate: f64,
        large_t_bound: (f64, f64),
        trace: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        HeatTraceModel {
            trace: Arc::new(trace),
            small_t_rate,
            large_t_bound,
        }
    }

    /// The alternating trace of the line at `n`.
    pub fn line(n: i64) -> Result<Self> {
        heat_trace_line(n, 1.0)?;
        let k = n as f64;
        Ok(Self::new(k * k / 4.0, (1.0 / (4.0 * PI).sqrt(), -0.5), move |t| {
            -(-k * k / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
        }))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.trace)(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MellinConfig {
    pub lower_nodes: usize,
    pub upper_nodes: usize,
    /// Finite-difference step in `s`.
    pub step: f64,
    /// Upper limit of the `[1, inf)` integral.
    pub t_max: f64,
}

impl Default for MellinConfig {
    fn default() -> Self {
        MellinConfig {
            lower_nodes: 128,
            upper_nodes: 256,
            step: 1e-3,
            t_max: 400.0,
        }
    }
}

impl MellinConfig {
    /// The integral split point.
    pub const SPLIT: f64 = 1.0;

    pub fn validate(&self) -> Result<()> {
        if !(1e-5..=1e-2).contains(&self.step) {
            return Err(Error::Precondition(format!("step {} outside [1e-5, 1e-2]", self.step)));
        }
        if self.lower_nodes < 64 || self.upper_nodes < 64 {
            return Err(Error::Precondition("quadrature needs at least 64 nodes per half".into()));
        }
        if !(self.t_max > Self::SPLIT) {
            return Err(Error::Precondition(format!("t_max {} must exceed the split point", self.t_max)));
        }
        Ok(())
    }
}

/// A Mellin torsion value with its diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MellinEstimate {
    pub torsion: f64,
    /// `F'(0)`.
    pub derivative: f64,
    /// Node-halving differences plus the bound on the discarded `t > t_max` part.
    pub quadrature_error: f64,
    pub truncation_tail: f64,
}

/// `int_a^b f` with `n` and `n/2` nodes: returns the finer value and the difference.
fn gauss_pair(n: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let build = |deg: usize| {
        GaussLegendre::new(deg).map_err(|e| Error::Precondition(format!("Gauss-Legendre rule of degree {deg}: {e}")))
    };
    let fine = build(n)?.integrate(a, b, &f);
    let coarse = build(n / 2)?.integrate(a, b, &f);
    Ok((fine, (fine - coarse).abs()))
}

/// Evaluates the Mellin pipeline without enforcing [`QUADRATURE_LIMIT`].
pub fn mellin_estimate(model: &HeatTraceModel, sigma: f64, config: &MellinConfig) -> Result<MellinEstimate> {
    require_positive("sigma", sigma)?;
    config.validate()?;
    if !(model.small_t_rate > 0.0) {
        return Err(Error::Precondition(
            "the Mellin integral needs a heat trace vanishing like e^{-r/t} at small t".into(),
        ));
    }
    // below t_min the trace is under e^{-700} and contributes nothing representable
    let v_min = (model.small_t_rate / 700.0).ln().min(-1.0);
    let v_max = config.t_max.ln();
    let (c_large, p_large) = model.large_t_bound;

    let mut error: f64 = 0.0;
    let mut tail: f64 = 0.0;
    let mut mellin = |s: f64| -> Result<f64> {
        let integrand = |v: f64| {
            let t = v.exp();
            (s * v - sigma * t).exp() * model.eval(t)
        };
        let (lower, e_lower) = gauss_pair(config.lower_nodes, v_min, 0.0, integrand)?;
        let (upper, e_upper) = gauss_pair(config.upper_nodes, 0.0, v_max, integrand)?;
        // int_{t_max}^inf t^{s-1+p} e^{-sigma t} dt <= t_max^{s-1+p} e^{-sigma t_max} / sigma when s - 1 + p <= 0
        let exponent = s - 1.0 + p_large;
        let t_max = config.t_max;
        let tail_s = if exponent <= 0.0 {
            c_large * t_max.powf(exponent) * (-sigma * t_max).exp() / sigma
        } else {
            f64::INFINITY
        };
        error = error.max(e_lower + e_upper);
        tail = tail.max(tail_s);
        Ok(reciprocal_gamma_near_zero(s) * (lower + upper))
    };
    let h = config.step;
    let derivative = (mellin(h)? - mellin(-h)?) / (2.0 * h);
    Ok(MellinEstimate {
        torsion: (-derivative / 2.0).exp(),
        derivative,
        quadrature_error: error + tail,
        truncation_tail: tail,
    })
}

/// `exp(-F'(0)/2)` for the given heat trace, refusing results whose
/// quadrature error estimate exceeds [`QUADRATURE_LIMIT`].
pub fn mellin_torsion(model: &HeatTraceModel, sigma: f64, config: &MellinConfig) -> Result<f64> {
    let estimate = mellin_estimate(model, sigma, config)?;
    if !(estimate.quadrature_error <= QUADRATURE_LIMIT) {
        return Err(Error::Accuracy {
            estimate: estimate.quadrature_error,
            limit: QUADRATURE_LIMIT,
            detail: format!(
                "sigma = {sigma}, nodes = ({}, {}), t_max = {}, truncation tail {:e}",
                config.lower_nodes, config.upper_nodes, config.t_max, estimate.truncation_tail
            ),
        });
    }
    Ok(estimate.torsion)
}
