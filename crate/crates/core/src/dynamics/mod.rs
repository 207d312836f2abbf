//! Suspension flows of `T` on `Y`: fixed points of `g^-1 T^n`, the dynamical
//! Ruelle zeta function, and the fixed-point side of the Euler characteristics.

mod cutoff;
mod scenario;

use std::collections::BTreeSet;

use num_complex::Complex64;

pub use cutoff::{psi_r, CutoffProfile};
pub use scenario::{
    AssumptionFlags, BaseModel, GrowthBound, IdentityProductModel, Model, PermutationModel, RotationModel, Scenario,
    WeylLabel, WeylModel, WeylPoint, ANGLE_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::spectra::{lefschetz_number, GradedSpectrum};
use crate::zeta_spectral::{exp_tail, log_series_tail, Truncation, ZetaValue};
use cutoff::psi_r_mass;
use scenario::angle_defect;

/// One isolated fixed point of `g^-1 T^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointDatum {
    pub point_id: String,
    /// `sgn det(1 - D_y(g^-1 T^n))`; `+1` on zero-dimensional `Y`.
    pub sign: i8,
    /// `tr(g T_E^{-n})` on the fiber over the point.
    pub fiber_trace: Complex64,
    pub primitive_period: u64,
    /// `(1/p(y)) int_0^{p(y)} psi_M[y, s] ds`, averaged over `G/Z`.
    pub cutoff_weight: f64,
}

#[derive(Clone, Debug)]
enum Weights {
    /// `t_orbit[k] = T^k y` for `0 <= k < p(y)`; `g_orbit` is the orbit of `y` under `<g>`.
    Orbits { t_orbit: Vec<String>, g_orbit: Vec<String> },
    Explicit { psi_g: f64, averaged: f64 },
}

#[derive(Clone, Debug)]
struct RawPoint {
    id: String,
    sign: i8,
    fiber_trace: Complex64,
    primitive_period: u64,
    weights: Weights,
}

#[derive(Clone, Debug)]
enum FixedSet {
    Points(Vec<RawPoint>),
    /// `g^-1 T^n` is the identity of a positive-dimensional `Y` (on every copy, for `Gamma x X`).
    Whole { euler_characteristic: i64, fiber_trace: Complex64 },
}

type Psi = Box<dyn Fn(&str) -> f64>;

fn permutation_fixed_set(m: &PermutationModel, rank: usize, n: i64) -> Vec<RawPoint> {
    let d = n - m.g_power;
    let mut out = Vec::new();
    for cycle in m.cycles() {
        let p = cycle.len() as i64;
        if d % p != 0 {
            continue;
        }
        let winding = d / p;
        let trace: Complex64 = m.holonomy(&cycle, rank).iter().map(|h| h.powi(-winding as i32)).sum();
        let labels: Vec<String> = cycle.iter().map(|&y| m.label(y)).collect();
        for pos in 0..cycle.len() {
            let t_orbit = (0..cycle.len()).map(|k| labels[(pos + k) % cycle.len()].clone()).collect();
            let g_positions: BTreeSet<usize> = (0..p)
                .map(|j| (pos as i64 + j * m.g_power).rem_euclid(p) as usize)
                .collect();
            let g_orbit = g_positions.into_iter().map(|q| labels[q].clone()).collect();
            out.push(RawPoint {
                id: labels[pos].clone(),
                sign: 1,
                fiber_trace: trace,
                primitive_period: p as u64,
                weights: Weights::Orbits { t_orbit, g_orbit },
            });
        }
    }
    out
}

fn rotation_fixed_set(m: &RotationModel, dim: usize, rank: usize, n: i64) -> FixedSet {
    let trace: Complex64 = m
        .g_fiber(rank)
        .iter()
        .zip(m.t_fiber(rank))
        .map(|(v, u)| v * u.powi(-n as i32))
        .sum();
    let theta = m.angle(n);
    if angle_defect(theta) <= ANGLE_TOLERANCE {
        return FixedSet::Whole {
            euler_characteristic: if dim == 2 { 2 } else { 0 },
            fiber_trace: trace,
        };
    }
    if dim == 1 {
        return FixedSet::Points(Vec::new());
    }
    // det(1 - R(theta)) on the tangent plane at either pole
    let sign = (2.0 - 2.0 * theta.cos()).signum() as i8;
    let poles = ["north", "south"]
        .into_iter()
        .map(|id| RawPoint {
            id: id.to_string(),
            sign,
            fiber_trace: trace,
            primitive_period: 1,
            weights: Weights::Orbits {
                t_orbit: vec![id.to_string()],
                g_orbit: vec![id.to_string()],
            },
        })
        .collect();
    FixedSet::Points(poles)
}

fn base_fixed_set(base: &BaseModel, rank: usize, n: i64) -> FixedSet {
    match base {
        BaseModel::FinitePermutation(m) => FixedSet::Points(permutation_fixed_set(m, rank, n)),
        BaseModel::CircleRotation(m) => rotation_fixed_set(m, 1, rank, n),
        BaseModel::SphereRotation(m) => rotation_fixed_set(m, 2, rank, n),
    }
}

fn copy_id(copy: i64, id: &str) -> String {
    format!("{copy}:{id}")
}

fn split_copy(id: &str) -> Option<(i64, &str)> {
    let (copy, rest) = id.split_once(':')?;
    Some((copy.parse().ok()?, rest))
}

fn fixed_set(scenario: &Scenario, n: i64) -> Result<FixedSet> {
    let rank = scenario.rank;
    Ok(match &scenario.model {
        Model::FinitePermutation(m) => FixedSet::Points(permutation_fixed_set(m, rank, n)),
        Model::CircleRotation(m) => rotation_fixed_set(m, 1, rank, n),
        Model::SphereRotation(m) => rotation_fixed_set(m, 2, rank, n),
        Model::WeylProduct(m) => {
            if n == 0 {
                return Err(Error::Precondition(
                    "Weyl-indexed fixed sets describe n != 0 only; supply chi_zero".into(),
                ));
            }
            let mut out = Vec::new();
            for label in &m.labels {
                for (k, point) in label.points.iter().enumerate() {
                    out.push(RawPoint {
                        id: format!("{}:{k}", label.name),
                        sign: point.sign,
                        fiber_trace: point.fiber_eigenvalues.iter().map(|l| l.powi(-n as i32)).sum(),
                        primitive_period: point.primitive_period,
                        weights: Weights::Explicit {
                            psi_g: point.psi_g,
                            averaged: point.averaged_cutoff,
                        },
                    });
                }
            }
            FixedSet::Points(out)
        }
        Model::DiscreteIdentityProduct(m) => match base_fixed_set(&m.base, rank, n) {
            FixedSet::Points(points) => {
                let w = m.window as i64;
                let mut out = Vec::with_capacity(points.len() * (2 * w as usize + 1));
                for copy in -w..=w {
                    for p in &points {
                        let weights = match &p.weights {
                            Weights::Orbits { t_orbit, g_orbit } => Weights::Orbits {
                                t_orbit: t_orbit.iter().map(|id| copy_id(copy, id)).collect(),
                                g_orbit: g_orbit.iter().map(|id| copy_id(copy, id)).collect(),
                            },
                            explicit => explicit.clone(),
                        };
                        out.push(RawPoint {
                            id: copy_id(copy, &p.id),
                            weights,
                            ..p.clone()
                        });
                    }
                }
                FixedSet::Points(out)
            }
            whole => whole,
        },
    })
}

fn point_ids(scenario: &Scenario) -> Option<Vec<String>> {
    match &scenario.model {
        Model::FinitePermutation(m) => Some((0..m.len()).map(|y| m.label(y)).collect()),
        Model::DiscreteIdentityProduct(IdentityProductModel { base, window }) => match base.as_ref() {
            BaseModel::FinitePermutation(m) => {
                let w = *window as i64;
                Some(
                    (-w..=w)
                        .flat_map(|c| (0..m.len()).map(move |y| copy_id(c, &m.label(y))))
                        .collect(),
                )
            }
            _ => None,
        },
        _ => None,
    }
}

/// Resolves a profile into `psi_Y` on point ids.
fn psi_y(scenario: &Scenario, cutoffs: &CutoffProfile) -> Result<Psi> {
    let unsupported = |what: &str| Err(Error::UnsupportedCutoff(format!("{what} on {}", scenario.kind_name())));
    match (&scenario.model, cutoffs) {
        (Model::DiscreteIdentityProduct(_), CutoffProfile::Canonical | CutoffProfile::IdentityCopy) => {
            Ok(Box::new(|id: &str| match split_copy(id) {
                Some((0, _)) => 1.0,
                _ => 0.0,
            }))
        }
        (Model::WeylProduct(_), CutoffProfile::Canonical) => Ok(Box::new(|_: &str| 1.0)),
        (Model::WeylProduct(_), _) => unsupported("a non-canonical profile"),
        (_, CutoffProfile::Canonical) => Ok(Box::new(|_: &str| 1.0)),
        (_, CutoffProfile::IdentityCopy) => unsupported("identity_copy"),
        (_, CutoffProfile::Points(weights)) => {
            let Some(ids) = point_ids(scenario) else {
                return unsupported("pointwise weights");
            };
            for (id, &w) in weights {
                if !ids.contains(id) {
                    return Err(Error::UnknownPoint(id.clone()));
                }
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(Error::UnsupportedCutoff(format!("weight {w} at {id} is not a finite non-negative number")));
                }
            }
            let weights = weights.clone();
            Ok(Box::new(move |id: &str| weights.get(id).copied().unwrap_or(0.0)))
        }
    }
}

/// Upper bound for every cutoff weight a scenario can report.
pub(crate) fn psi_sup(scenario: &Scenario, cutoffs: &CutoffProfile) -> f64 {
    match (&scenario.model, cutoffs) {
        (Model::WeylProduct(m), _) => m
            .labels
            .iter()
            .flat_map(|l| &l.points)
            .map(|p| p.averaged_cutoff.max(p.psi_g))
            .fold(0.0, f64::max),
        (_, CutoffProfile::Points(w)) => w.values().copied().fold(0.0, f64::max),
        _ => 1.0,
    }
}

/// `sum_gamma int_Y psi_Y` over one copy of a positive-dimensional fixed manifold.
fn whole_weight(scenario: &Scenario, cutoffs: &CutoffProfile) -> Result<f64> {
    match cutoffs {
        CutoffProfile::Canonical => Ok(1.0),
        CutoffProfile::IdentityCopy if matches!(scenario.model, Model::DiscreteIdentityProduct(_)) => Ok(1.0),
        _ => Err(Error::UnsupportedCutoff(format!(
            "only the canonical cutoff integrates over a fixed manifold of {}",
            scenario.kind_name()
        ))),
    }
}

/// Returns `(psi^g(y), averaged psi_M integral)`.
fn resolve_weights(point: &RawPoint, psi: &Psi) -> (f64, f64) {
    match &point.weights {
        Weights::Explicit { psi_g, averaged } => (*psi_g, *averaged),
        Weights::Orbits { t_orbit, g_orbit } => {
            let psi_g = g_orbit.iter().map(|id| psi(id)).sum::<f64>() / g_orbit.len() as f64;
            let p = point.primitive_period;
            let integral: f64 = t_orbit
                .iter()
                .enumerate()
                .map(|(k, id)| psi(id) * psi_r_mass(k as i64, p))
                .sum();
            (psi_g, integral / p as f64)
        }
    }
}

fn isolated(scenario: &Scenario, n: i64) -> Result<Vec<RawPoint>> {
    match fixed_set(scenario, n)? {
        FixedSet::Points(points) => Ok(points),
        FixedSet::Whole { .. } => Err(Error::Degenerate {
            n,
            detail: format!("g^-1 T^{n} is the identity on the {}", scenario.kind_name()),
        }),
    }
}

/// `n` with `0 < |n| <= N` for which `g^-1 T^n` has a fixed point.
pub fn length_spectrum(scenario: &Scenario, n_max: u32) -> Vec<i64> {
    let n_max = n_max as i64;
    (-n_max..=n_max)
        .filter(|&n| n != 0)
        .filter(|&n| match fixed_set(scenario, n) {
            Ok(FixedSet::Points(p)) => !p.is_empty(),
            Ok(FixedSet::Whole { .. }) => true,
            Err(_) => false,
        })
        .collect()
}

/// Range of `|n|` over which a declared growth bound is checked.
pub const GROWTH_CHECK_RANGE: i64 = 50;

/// Checks `#Fix(g^-1 T^n) <= C e^{c|n|}` for `0 < |n| <= 50`.
///
/// Identity maps (whole fixed sets) are skipped; the series never uses them.
pub fn check_growth_bound(scenario: &Scenario) -> Result<()> {
    for n in (-GROWTH_CHECK_RANGE..=GROWTH_CHECK_RANGE).filter(|&n| n != 0) {
        if let FixedSet::Points(points) = fixed_set(scenario, n)? {
            let bound = scenario.growth.at(n);
            if points.len() as f64 > bound * (1.0 + 1e-12) {
                return Err(Error::InvalidScenario {
                    field: "growth".into(),
                    reason: format!("{} fixed points at n = {n} exceed the declared bound {bound}", points.len()),
                });
            }
        }
    }
    Ok(())
}

/// Fixed points of `g^-1 T^n` weighted by the canonical cutoff.
pub fn fixed_point_report(scenario: &Scenario, n: i64) -> Result<Vec<FixedPointDatum>> {
    fixed_point_report_with(scenario, &CutoffProfile::Canonical, n)
}

pub fn fixed_point_report_with(scenario: &Scenario, cutoffs: &CutoffProfile, n: i64) -> Result<Vec<FixedPointDatum>> {
    if n == 0 {
        return Err(Error::Precondition("fixed point reports need n != 0".into()));
    }
    let psi = psi_y(scenario, cutoffs)?;
    Ok(isolated(scenario, n)?
        .into_iter()
        .map(|p| {
            let (_, averaged) = resolve_weights(&p, &psi);
            FixedPointDatum {
                point_id: p.id,
                sign: p.sign,
                fiber_trace: p.fiber_trace,
                primitive_period: p.primitive_period,
                cutoff_weight: averaged,
            }
        })
        .collect())
}

/// Minimal `k >= 1` with `T^k y = y`.
///
/// Rotation models name their poles `north`/`south`; any other id is read as
/// the angle of a point on the equator (or circle).
pub fn primitive_period(scenario: &Scenario, point_id: &str) -> Result<u64> {
    let unknown = || Error::UnknownPoint(point_id.to_string());
    match &scenario.model {
        Model::FinitePermutation(m) => permutation_period(m, point_id),
        Model::CircleRotation(m) => rotation_period(m, 1, point_id),
        Model::SphereRotation(m) => rotation_period(m, 2, point_id),
        Model::WeylProduct(m) => {
            let (name, k) = point_id.rsplit_once(':').ok_or_else(unknown)?;
            let k: usize = k.parse().map_err(|_| unknown())?;
            m.labels
                .iter()
                .find(|l| l.name == name)
                .and_then(|l| l.points.get(k))
                .map(|p| p.primitive_period)
                .ok_or_else(unknown)
        }
        Model::DiscreteIdentityProduct(m) => {
            let (copy, rest) = split_copy(point_id).ok_or_else(unknown)?;
            if copy.unsigned_abs() > m.window as u64 {
                return Err(unknown());
            }
            match m.base.as_ref() {
                BaseModel::FinitePermutation(b) => permutation_period(b, rest),
                BaseModel::CircleRotation(b) => rotation_period(b, 1, rest),
                BaseModel::SphereRotation(b) => rotation_period(b, 2, rest),
            }
        }
    }
}

fn permutation_period(m: &PermutationModel, point_id: &str) -> Result<u64> {
    let y = m.index_of(point_id).ok_or_else(|| Error::UnknownPoint(point_id.to_string()))?;
    let mut k = 1;
    let mut z = m.t_map[y];
    while z != y {
        z = m.t_map[z];
        k += 1;
    }
    Ok(k)
}

fn rotation_period(m: &RotationModel, dim: usize, point_id: &str) -> Result<u64> {
    if dim == 2 && (point_id == "north" || point_id == "south") {
        return Ok(1);
    }
    point_id
        .parse::<f64>()
        .map_err(|_| Error::UnknownPoint(point_id.to_string()))?;
    if angle_defect(m.t_angle) <= ANGLE_TOLERANCE {
        return Ok(1);
    }
    m.rotation_order.ok_or_else(|| Error::Aperiodic {
        point: point_id.to_string(),
    })
}

/// `sum_y sign * fiber_trace * weight` for one `n`, the coefficient of
/// `e^{-|n| sigma} / |n|` in the dynamical log series.
fn dynamical_coefficient(scenario: &Scenario, psi: &Psi, n: i64) -> Result<Complex64> {
    Ok(isolated(scenario, n)?
        .iter()
        .map(|p| {
            let (_, averaged) = resolve_weights(p, psi);
            p.fiber_trace * (p.sign as f64 * averaged)
        })
        .sum())
}

/// Dynamical Ruelle zeta function truncated to `0 < |n| <= N`.
pub fn ruelle_dynamical(
    scenario: &Scenario,
    cutoffs: &CutoffProfile,
    sigma: Complex64,
    n_max: u32,
) -> Result<ZetaValue> {
    if n_max == 0 {
        return Err(Error::Precondition("truncation N must be positive".into()));
    }
    let c = scenario.growth.exponent;
    let a = sigma.re - c;
    if !(a > 0.0) {
        return Err(Error::Domain {
            sigma,
            requirement: format!("Re(sigma) > c = {c}"),
        });
    }
    let psi = psi_y(scenario, cutoffs)?;
    let mut log = Complex64::new(0.0, 0.0);
    for k in 1..=n_max as i64 {
        for n in [k, -k] {
            let coefficient = dynamical_coefficient(scenario, &psi, n)?;
            if coefficient != Complex64::new(0.0, 0.0) {
                log += coefficient * (-(k as f64) * sigma).exp() / k as f64;
            }
        }
    }
    let value = log.exp();
    let m = scenario.growth.prefactor * scenario.rank as f64 * psi_sup(scenario, cutoffs);
    Ok(ZetaValue {
        value,
        truncation: Truncation::Terms(n_max),
        tail_bound: exp_tail(value.norm(), log_series_tail(m, a, n_max)),
    })
}

/// Ruelle zeta function of `Gamma x X` with the identity-copy cutoff.
pub fn ruelle_identity_discrete(scenario: &Scenario, sigma: Complex64, n_max: u32) -> Result<ZetaValue> {
    if !matches!(scenario.model, Model::DiscreteIdentityProduct(_)) {
        return Err(Error::WrongKind {
            kind: scenario.kind_name(),
            operation: "ruelle_identity_discrete",
        });
    }
    ruelle_dynamical(scenario, &CutoffProfile::IdentityCopy, sigma, n_max)
}

/// `sum_y sign * fiber_trace - L(-n)` for a compact-type scenario.
pub fn atiyah_bott_residual(scenario: &Scenario, spec: &GradedSpectrum, n: i64) -> Result<Complex64> {
    if !scenario.is_compact_type() {
        return Err(Error::WrongKind {
            kind: scenario.kind_name(),
            operation: "atiyah_bott_residual",
        });
    }
    let fixed: Complex64 = match fixed_set(scenario, n)? {
        FixedSet::Points(points) => points.iter().map(|p| p.fiber_trace * p.sign as f64).sum(),
        FixedSet::Whole {
            euler_characteristic,
            fiber_trace,
        } if n == 0 => fiber_trace * euler_characteristic as f64,
        FixedSet::Whole { .. } => return Err(isolated(scenario, n).unwrap_err()),
    };
    Ok(fixed - lefschetz_number(spec, -n))
}

/// `chi_{(g,n)} = sum_y psi^g(y) sign fiber_trace`.
///
/// When `g^-1 T^n` is the identity of `Y` the fixed manifold is all of `Y`
/// and the value is `chi(Y)` times the fiber trace.
pub fn euler_from_fixed_points(scenario: &Scenario, cutoffs: &CutoffProfile, n: i64) -> Result<Complex64> {
    if let (Model::WeylProduct(m), 0) = (&scenario.model, n) {
        return m.chi_zero.ok_or_else(|| {
            Error::Precondition("weyl_product scenario has no chi_zero for n = 0".into())
        });
    }
    let psi = psi_y(scenario, cutoffs)?;
    match fixed_set(scenario, n)? {
        FixedSet::Points(points) => Ok(points
            .iter()
            .map(|p| {
                let (psi_g, _) = resolve_weights(p, &psi);
                p.fiber_trace * (p.sign as f64 * psi_g)
            })
            .sum()),
        FixedSet::Whole {
            euler_characteristic,
            fiber_trace,
        } => Ok(fiber_trace * euler_characteristic as f64 * whole_weight(scenario, cutoffs)?),
    }
}

/// Range of `|n|` that reaches every point that is ever fixed.
fn compatibility_window(scenario: &Scenario) -> i64 {
    let permutation_window = |m: &PermutationModel| {
        m.cycles().iter().map(Vec::len).max().unwrap_or(1) as i64 + m.g_power.abs()
    };
    match &scenario.model {
        Model::FinitePermutation(m) => permutation_window(m),
        Model::DiscreteIdentityProduct(IdentityProductModel { base, .. }) => match base.as_ref() {
            BaseModel::FinitePermutation(m) => permutation_window(m),
            _ => 2,
        },
        _ => 2,
    }
}

/// `max_y |psi^g(y) - (1/p(y)) int psi_M|` over fixed points reported for
/// some `n != 0`. Values of `n` where the fixed set is degenerate are skipped.
pub fn cutoff_compatibility_residual(scenario: &Scenario, cutoffs: &CutoffProfile) -> Result<f64> {
    let psi = psi_y(scenario, cutoffs)?;
    let window = compatibility_window(scenario);
    let mut worst: f64 = 0.0;
    for n in (-window..=window).filter(|&n| n != 0) {
        if let FixedSet::Points(points) = fixed_set(scenario, n)? {
            for p in &points {
                let (psi_g, averaged) = resolve_weights(p, &psi);
                worst = worst.max((psi_g - averaged).abs());
            }
        }
    }
    Ok(worst)
}

/// `max |sum over the orbit of psi_Y - 1|`, the cutoff property on finite scenarios.
///
/// For a compact acting group the orbit sum is the normalized average over
/// the `<g>`-orbit; for `Gamma x X` it is the sum over the enumerated copies.
pub fn cutoff_property_defect(scenario: &Scenario, cutoffs: &CutoffProfile) -> Result<f64> {
    let psi = psi_y(scenario, cutoffs)?;
    match &scenario.model {
        Model::FinitePermutation(m) => {
            let mut worst: f64 = 0.0;
            for cycle in m.cycles() {
                let p = cycle.len() as i64;
                for pos in 0..cycle.len() {
                    let orbit: BTreeSet<usize> = (0..p)
                        .map(|j| (pos as i64 + j * m.g_power).rem_euclid(p) as usize)
                        .collect();
                    let avg = orbit.iter().map(|&q| psi(&m.label(cycle[q]))).sum::<f64>() / orbit.len() as f64;
                    worst = worst.max((avg - 1.0).abs());
                }
            }
            Ok(worst)
        }
        Model::DiscreteIdentityProduct(IdentityProductModel { base, window }) => match base.as_ref() {
            BaseModel::FinitePermutation(m) => {
                let w = *window as i64;
                Ok((0..m.len())
                    .map(|y| {
                        let total: f64 = (-w..=w).map(|c| psi(&copy_id(c, &m.label(y)))).sum();
                        (total - 1.0).abs()
                    })
                    .fold(0.0, f64::max))
            }
            _ => Ok(0.0),
        },
        _ => Err(Error::WrongKind {
            kind: scenario.kind_name(),
            operation: "cutoff_property_defect",
        }),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{E, PI, TAU};

    use super::*;
    use crate::spectra::GradedSpectrum;
    use crate::zeta_spectral::ruelle_series;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn irrational_angle() -> f64 {
        TAU * (2f64.sqrt() - 1.0)
    }

    #[test]
    fn length_spectra() {
        assert_eq!(length_spectrum(&Scenario::cyclic(3), 10), vec![-9, -6, -3, 3, 6, 9]);
        assert!(length_spectrum(&Scenario::circle(irrational_angle()), 10).is_empty());
        let sphere = length_spectrum(&Scenario::sphere(irrational_angle()), 5);
        assert_eq!(sphere, vec![-5, -4, -3, -2, -1, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn reports() {
        let data = fixed_point_report(&Scenario::cyclic(3), 3).unwrap();
        assert_eq!(data.len(), 3);
        for d in &data {
            assert_eq!((d.sign, d.fiber_trace, d.primitive_period, d.cutoff_weight), (1, c(1.0), 3, 1.0));
        }
        let poles = fixed_point_report(&Scenario::sphere(irrational_angle()), 1).unwrap();
        assert_eq!(poles.len(), 2);
        assert!(poles.iter().all(|d| d.sign == 1 && d.fiber_trace == c(1.0) && d.primitive_period == 1));
    }

    #[test]
    fn degenerate_rotation_is_rejected() {
        let s = Scenario::sphere(PI / 2.0);
        assert!(fixed_point_report(&s, 3).is_ok());
        assert!(matches!(fixed_point_report(&s, 4), Err(Error::Degenerate { n: 4, .. })));
        assert!(matches!(
            ruelle_dynamical(&s, &CutoffProfile::Canonical, c(1.0), 10),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn weyl_report_is_disjoint_union() {
        let point = |lambda: f64| WeylPoint {
            sign: 1,
            fiber_eigenvalues: vec![Complex64::from_polar(1.0, lambda)],
            primitive_period: 1,
            psi_g: 1.0,
            averaged_cutoff: 1.0,
        };
        let labels = (0..3)
            .map(|w| WeylLabel {
                name: format!("w{w}"),
                points: vec![point(0.1), point(0.2)],
            })
            .collect();
        let s = Scenario::new(
            Model::WeylProduct(WeylModel { labels, chi_zero: None }),
            1,
            GrowthBound::constant(6.0),
        )
        .unwrap();
        assert_eq!(fixed_point_report(&s, 5).unwrap().len(), 6);
        assert_eq!(primitive_period(&s, "w2:1").unwrap(), 1);
        assert!(euler_from_fixed_points(&s, &CutoffProfile::Canonical, 0).is_err());
    }

    #[test]
    fn periods() {
        let s = Scenario::cyclic(3);
        assert_eq!(primitive_period(&s, "1").unwrap(), 3);
        let id = Scenario::new(
            Model::FinitePermutation(PermutationModel {
                t_map: vec![0, 1, 2],
                labels: None,
                fiber_phases: None,
                g_power: 0,
            }),
            1,
            GrowthBound::constant(3.0),
        )
        .unwrap();
        assert_eq!(primitive_period(&id, "2").unwrap(), 1);
        let mixed = Scenario::new(
            Model::FinitePermutation(PermutationModel {
                t_map: vec![1, 0, 3, 4, 2],
                labels: None,
                fiber_phases: None,
                g_power: 0,
            }),
            1,
            GrowthBound::constant(5.0),
        )
        .unwrap();
        assert_eq!(primitive_period(&mixed, "0").unwrap(), 2);
        assert_eq!(primitive_period(&mixed, "4").unwrap(), 3);
        assert!(matches!(primitive_period(&mixed, "9"), Err(Error::UnknownPoint(_))));

        let circle = Scenario::circle(irrational_angle());
        assert!(matches!(primitive_period(&circle, "0.5"), Err(Error::Aperiodic { .. })));
        assert_eq!(primitive_period(&Scenario::sphere(1.0), "north").unwrap(), 1);
    }

    #[test]
    fn ruelle_examples() {
        let r = ruelle_dynamical(&Scenario::cyclic(3), &CutoffProfile::Canonical, c(1.0), 300).unwrap();
        let expected = (1.0 - (-3f64).exp()).powi(-2);
        assert!((r.value - expected).norm() <= r.tail_bound + 1e-13);

        let empty = ruelle_dynamical(&Scenario::circle(irrational_angle()), &CutoffProfile::Canonical, c(1.0), 50).unwrap();
        assert_eq!((empty.value, empty.tail_bound), (c(1.0), 0.0));

        let sphere = ruelle_dynamical(&Scenario::sphere(irrational_angle()), &CutoffProfile::Canonical, c(1.0), 300).unwrap();
        let expected = (1.0 - 1.0 / E).powi(-4);
        assert!((sphere.value - expected).norm() <= sphere.tail_bound + 1e-12);
    }

    #[test]
    fn domain_error_names_c() {
        let mut s = Scenario::cyclic(3);
        s.growth.exponent = 0.5;
        let err = ruelle_dynamical(&s, &CutoffProfile::Canonical, c(0.5), 10).unwrap_err();
        assert!(err.to_string().contains("c = 0.5"), "{err}");
    }

    #[test]
    fn identity_product_localizes() {
        let s = Scenario::identity_product(BaseModel::FinitePermutation(PermutationModel::cyclic(3)), 1, 4, 3.0).unwrap();
        let compact = ruelle_dynamical(&Scenario::cyclic(3), &CutoffProfile::Canonical, c(1.0), 300).unwrap();
        let local = ruelle_identity_discrete(&s, c(1.0), 300).unwrap();
        assert!((local.value - compact.value).norm() < 1e-12);

        let sphere = Scenario::identity_product(
            BaseModel::SphereRotation(RotationModel::new(irrational_angle())),
            1,
            3,
            2.0,
        )
        .unwrap();
        let value = ruelle_identity_discrete(&sphere, c(1.0), 300).unwrap();
        assert!((value.value - (1.0 - 1.0 / E).powi(-4)).norm() <= value.tail_bound + 1e-12);

        assert!(matches!(
            ruelle_identity_discrete(&Scenario::cyclic(3), c(1.0), 10),
            Err(Error::WrongKind { .. })
        ));
    }

    #[test]
    fn atiyah_bott_examples() {
        let s = Scenario::cyclic(3);
        let spec = GradedSpectrum::cyclic_permutation(3);
        for n in [1, 3, -2, 6] {
            assert!(atiyah_bott_residual(&s, &spec, n).unwrap().norm() < 1e-12);
        }
        let sphere = Scenario::sphere(irrational_angle());
        for n in 1..20 {
            assert!(atiyah_bott_residual(&sphere, &GradedSpectrum::sphere(), n).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn euler_examples() {
        let canonical = CutoffProfile::Canonical;
        assert_eq!(euler_from_fixed_points(&Scenario::cyclic(3), &canonical, 3).unwrap(), c(3.0));
        assert_eq!(euler_from_fixed_points(&Scenario::cyclic(3), &canonical, 1).unwrap(), c(0.0));
        let sphere = Scenario::sphere(irrational_angle());
        for n in -3..=3 {
            assert_eq!(euler_from_fixed_points(&sphere, &canonical, n).unwrap(), c(2.0));
        }
        assert_eq!(euler_from_fixed_points(&Scenario::circle(1.0), &canonical, 0).unwrap(), c(0.0));
    }

    #[test]
    fn cutoff_residuals() {
        let s = Scenario::cyclic(3);
        assert_eq!(cutoff_compatibility_residual(&s, &CutoffProfile::Canonical).unwrap(), 0.0);
        let skew = CutoffProfile::points([("0", 2.0)]);
        let r = cutoff_compatibility_residual(&s, &skew).unwrap();
        assert!((r - 4.0 / 3.0).abs() < 1e-15, "{r}");
        assert!(cutoff_property_defect(&s, &skew).unwrap() > 0.0);
        assert_eq!(cutoff_property_defect(&s, &CutoffProfile::Canonical).unwrap(), 0.0);

        let product = Scenario::identity_product(BaseModel::FinitePermutation(PermutationModel::cyclic(3)), 1, 2, 3.0).unwrap();
        assert_eq!(cutoff_compatibility_residual(&product, &CutoffProfile::IdentityCopy).unwrap(), 0.0);
        assert_eq!(cutoff_property_defect(&product, &CutoffProfile::IdentityCopy).unwrap(), 0.0);
        assert!(matches!(
            cutoff_compatibility_residual(&s, &CutoffProfile::points([("7", 1.0)])),
            Err(Error::UnknownPoint(_))
        ));
    }

    #[test]
    fn g_power_spreads_the_cutoff() {
        // g = T on a 3-cycle: psi^g averages over the whole cycle, matching the time average
        let mut m = PermutationModel::cyclic(3);
        m.g_power = 1;
        let s = Scenario::new(Model::FinitePermutation(m), 1, GrowthBound::constant(3.0)).unwrap();
        let skew = CutoffProfile::points([("0", 3.0)]);
        assert_eq!(cutoff_property_defect(&s, &skew).unwrap(), 0.0);
        assert!(cutoff_compatibility_residual(&s, &skew).unwrap() < 1e-15);
    }

    fn twisted_scenarios() -> Vec<Scenario> {
        let mut out = Vec::new();
        let phase = |t: f64| Complex64::from_polar(1.0, t);
        for g_power in [0, 1, 2] {
            out.push(
                Scenario::new(
                    Model::FinitePermutation(PermutationModel {
                        t_map: vec![1, 0, 3, 4, 2, 5],
                        labels: None,
                        fiber_phases: Some(
                            (0..6).map(|y| vec![phase(0.3 * y as f64), phase(-1.1 + y as f64)]).collect(),
                        ),
                        g_power,
                    }),
                    2,
                    GrowthBound::constant(6.0),
                )
                .unwrap(),
            );
        }
        let mut rotation = RotationModel::new(irrational_angle());
        rotation.g_angle = 0.7;
        rotation.t_fiber = Some(vec![phase(0.4)]);
        rotation.g_fiber = Some(vec![phase(-0.9)]);
        out.push(Scenario::new(Model::SphereRotation(rotation.clone()), 1, GrowthBound::constant(2.0)).unwrap());
        out.push(Scenario::new(Model::CircleRotation(rotation), 1, GrowthBound::constant(0.0)).unwrap());
        out
    }

    #[test]
    fn dynamical_matches_spectral() {
        for s in twisted_scenarios() {
            let spec = s.cohomology_spectrum().unwrap();
            for n in -12..=12 {
                if n != 0 {
                    assert!(atiyah_bott_residual(&s, &spec, n).unwrap().norm() < 1e-12, "{s:?} n={n}");
                }
            }
            for sigma in [c(0.5), Complex64::new(1.0, 0.3), c(2.0)] {
                let dynamical = ruelle_dynamical(&s, &CutoffProfile::Canonical, sigma, 40).unwrap();
                let spectral = ruelle_series(&spec, sigma, 40).unwrap();
                assert!((dynamical.value - spectral.value).norm() < 1e-12 * spectral.value.norm().max(1.0));
            }
        }
    }

    #[test]
    fn understated_growth_is_rejected() {
        let mut s = Scenario::cyclic(3);
        assert!(check_growth_bound(&s).is_ok());
        s.growth.prefactor = 2.0;
        let err = check_growth_bound(&s).unwrap_err();
        assert!(err.to_string().contains("n = -50") || err.to_string().contains("exceed"), "{err}");
    }

    #[test]
    fn data_invariants() {
        for s in twisted_scenarios() {
            for n in -50i64..=50 {
                if n == 0 {
                    continue;
                }
                let data = fixed_point_report(&s, n).unwrap();
                assert!(data.len() as f64 <= s.growth.at(n));
                for d in &data {
                    assert!(d.fiber_trace.norm() <= s.rank as f64 + 1e-12);
                    assert_eq!(d.primitive_period, primitive_period(&s, &d.point_id).unwrap());
                }
                // sign stability along T-orbits
                if let Model::FinitePermutation(m) = &s.model {
                    for d in &data {
                        let y = m.index_of(&d.point_id).unwrap();
                        let image = m.label(m.t_map[y]);
                        let other = data.iter().find(|e| e.point_id == image).unwrap();
                        assert_eq!((d.sign, d.primitive_period), (other.sign, other.primitive_period));
                        assert!((d.fiber_trace - other.fiber_trace).norm() < 1e-15);
                    }
                }
            }
        }
    }
}
