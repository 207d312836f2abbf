//! Graded eigenvalue data of the commuting isometries `g*`, `T*` acting on
//! `H^q(Y, E1)`, with Lefschetz numbers and superdeterminants built from it.
//!
//! Eigenvalues are supplied, never computed: a spectrum is a list of joint
//! eigenpairs `(mu_g, mu_T)` per degree, each with an explicit multiplicity.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, PairLocation, Result};
use crate::scalar::ComplexScalar;

/// Allowed deviation of `|mu|` from 1 on input.
pub const UNIT_MODULUS_TOLERANCE: f64 = 1e-12;

/// Default distance from 1 below which `mu_T` counts as a fixed direction.
pub const DEFAULT_ACYCLICITY_TOLERANCE: f64 = 1e-9;

fn one_multiplicity() -> u32 {
    1
}

/// Joint eigenvalue of `g*` and `T*` on one eigenvector, with multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub mu_g: Complex64,
    pub mu_t: Complex64,
    #[serde(default = "one_multiplicity")]
    pub multiplicity: u32,
}

impl EigenPair {
    pub fn new(mu_g: Complex64, mu_t: Complex64) -> Self {
        EigenPair {
            mu_g,
            mu_t,
            multiplicity: 1,
        }
    }

    pub fn with_multiplicity(mut self, multiplicity: u32) -> Self {
        self.multiplicity = multiplicity;
        self
    }
}

/// Which of `T*` or `(T^-1)*` a superdeterminant is taken of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorSide {
    TForward,
    TInverse,
}

/// Per-degree eigenpair lists for `H^•(Y, E1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum", into = "RawSpectrum")]
pub struct GradedSpectrum {
    top_degree: usize,
    degrees: BTreeMap<usize, Vec<EigenPair>>,
    dims: Option<BTreeMap<usize, u64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    top_degree: usize,
    #[serde(default)]
    degrees: BTreeMap<usize, Vec<EigenPair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dims: Option<BTreeMap<usize, u64>>,
}

impl TryFrom<RawSpectrum> for GradedSpectrum {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        let spec = GradedSpectrum {
            top_degree: raw.top_degree,
            degrees: raw.degrees,
            dims: raw.dims,
        };
        spec.check_structure()?;
        Ok(spec)
    }
}

impl From<GradedSpectrum> for RawSpectrum {
    fn from(spec: GradedSpectrum) -> Self {
        RawSpectrum {
            top_degree: spec.top_degree,
            degrees: spec.degrees,
            dims: spec.dims,
        }
    }
}

fn invalid(field: String, reason: impl Into<String>) -> Error {
    Error::InvalidSpectrum {
        field,
        reason: reason.into(),
    }
}

impl GradedSpectrum {
    pub fn new(top_degree: usize, degrees: BTreeMap<usize, Vec<EigenPair>>) -> Result<Self> {
        RawSpectrum {
            top_degree,
            degrees,
            dims: None,
        }
        .try_into()
    }

    /// Spectrum with no eigenpairs (acyclic coefficients on a `top_degree`-dimensional `Y`).
    pub fn empty(top_degree: usize) -> Self {
        GradedSpectrum {
            top_degree,
            degrees: BTreeMap::new(),
            dims: None,
        }
    }

    /// Builds a spectrum from `(degree, mu_g, mu_T)` triples, each of multiplicity one.
    pub fn from_triples(top_degree: usize, triples: &[(usize, Complex64, Complex64)]) -> Result<Self> {
        let mut degrees: BTreeMap<usize, Vec<EigenPair>> = BTreeMap::new();
        for &(q, mu_g, mu_t) in triples {
            degrees.entry(q).or_default().push(EigenPair::new(mu_g, mu_t));
        }
        Self::new(top_degree, degrees)
    }

    /// Declares `dim H^q` for each listed degree; eigencounts must match.
    pub fn with_dims(mut self, dims: BTreeMap<usize, u64>) -> Result<Self> {
        self.dims = Some(dims);
        self.check_structure()?;
        Ok(self)
    }

    /// `H^0` of `p` points cyclically permuted, with `g` trivial: eigenpairs `(1, w^j)`, `w = e^{2 pi i/p}`.
    pub fn cyclic_permutation(p: u32) -> Self {
        let pairs = (0..p)
            .map(|j| EigenPair::new(Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, TAU * j as f64 / p as f64)))
            .collect();
        GradedSpectrum {
            top_degree: 0,
            degrees: BTreeMap::from([(0, pairs)]),
            dims: None,
        }
    }

    /// De Rham cohomology of `S^2` with rotations acting trivially.
    pub fn sphere() -> Self {
        let one = Complex64::new(1.0, 0.0);
        GradedSpectrum {
            top_degree: 2,
            degrees: BTreeMap::from([(0, vec![EigenPair::new(one, one)]), (2, vec![EigenPair::new(one, one)])]),
            dims: None,
        }
    }

    pub fn top_degree(&self) -> usize {
        self.top_degree
    }

    pub fn degrees(&self) -> &BTreeMap<usize, Vec<EigenPair>> {
        &self.degrees
    }

    pub fn dims(&self) -> Option<&BTreeMap<usize, u64>> {
        self.dims.as_ref()
    }

    /// All eigenpairs with their location, in degree order.
    pub fn pairs(&self) -> impl Iterator<Item = (PairLocation, &EigenPair)> + '_ {
        self.degrees
            .iter()
            .flat_map(|(&q, list)| list.iter().enumerate().map(move |(j, p)| ((q, j), p)))
    }

    pub fn is_empty(&self) -> bool {
        self.pairs().next().is_none()
    }

    /// Sum of multiplicities over all degrees.
    pub fn total_multiplicity(&self) -> u64 {
        self.pairs().map(|(_, p)| p.multiplicity as u64).sum()
    }

    /// `sum_q (-1)^q dim H^q` counted from the eigenpairs.
    pub fn euler_characteristic(&self) -> i64 {
        self.pairs()
            .map(|((q, _), p)| parity(q) * p.multiplicity as i64)
            .sum()
    }

    /// True when every `mu_g` equals 1 within the unit-modulus tolerance.
    pub fn is_identity_element(&self) -> bool {
        self.pairs()
            .all(|(_, p)| (p.mu_g - 1.0).norm() <= UNIT_MODULUS_TOLERANCE)
    }

    /// Concatenates degree lists; the top degree is the larger of the two.
    pub fn disjoint_union(&self, other: &GradedSpectrum) -> GradedSpectrum {
        let mut degrees = self.degrees.clone();
        for (&q, list) in &other.degrees {
            degrees.entry(q).or_default().extend(list.iter().copied());
        }
        GradedSpectrum {
            top_degree: self.top_degree.max(other.top_degree),
            degrees,
            dims: None,
        }
    }

    /// Applies `f` to every eigenpair, keeping degrees.
    pub fn map_pairs(&self, f: impl Fn(&EigenPair) -> EigenPair) -> Result<GradedSpectrum> {
        let degrees = self
            .degrees
            .iter()
            .map(|(&q, list)| (q, list.iter().map(&f).collect()))
            .collect();
        GradedSpectrum::new(self.top_degree, degrees)
    }

    /// Same spectrum with every multiplicity multiplied by `factor`.
    pub fn scaled_multiplicity(&self, factor: u32) -> GradedSpectrum {
        let degrees = self
            .degrees
            .iter()
            .map(|(&q, list)| {
                (
                    q,
                    list.iter()
                        .map(|p| p.with_multiplicity(p.multiplicity * factor))
                        .collect(),
                )
            })
            .collect();
        GradedSpectrum {
            top_degree: self.top_degree,
            degrees,
            dims: None,
        }
    }

    fn check_structure(&self) -> Result<()> {
        for (&q, list) in &self.degrees {
            if q > self.top_degree {
                return Err(invalid(
                    format!("degrees.{q}"),
                    format!("degree exceeds top_degree {}", self.top_degree),
                ));
            }
            for (j, pair) in list.iter().enumerate() {
                for (name, mu) in [("mu_g", pair.mu_g), ("mu_t", pair.mu_t)] {
                    if !mu.re.is_finite() || !mu.im.is_finite() {
                        return Err(invalid(format!("degrees.{q}[{j}].{name}"), "not finite"));
                    }
                    let dev = (mu.norm() - 1.0).abs();
                    if dev > UNIT_MODULUS_TOLERANCE {
                        return Err(invalid(
                            format!("degrees.{q}[{j}].{name}"),
                            format!("|{name}| = {} is not 1 (deviation {dev:e})", mu.norm()),
                        ));
                    }
                }
                if pair.multiplicity == 0 {
                    return Err(invalid(format!("degrees.{q}[{j}].multiplicity"), "must be at least 1"));
                }
            }
        }
        if let Some(dims) = &self.dims {
            for (&q, &dim) in dims {
                if q > self.top_degree {
                    return Err(invalid(format!("dims.{q}"), "degree exceeds top_degree"));
                }
                let count: u64 = self
                    .degrees
                    .get(&q)
                    .map(|l| l.iter().map(|p| p.multiplicity as u64).sum())
                    .unwrap_or(0);
                if count != dim {
                    return Err(invalid(
                        format!("dims.{q}"),
                        format!("declared dimension {dim} but eigenpairs account for {count}"),
                    ));
                }
            }
            for &q in self.degrees.keys() {
                let listed = self.degrees[&q].iter().map(|p| p.multiplicity as u64).sum::<u64>();
                if listed > 0 && !dims.contains_key(&q) {
                    return Err(invalid(format!("dims.{q}"), "missing declared dimension"));
                }
            }
        }
        Ok(())
    }
}

/// `(-1)^q`.
pub(crate) fn parity(q: usize) -> i64 {
    if q.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Outcome of the acyclicity test: `acyclic` iff no `mu_T` is within tolerance of 1.
#[derive(Clone, Debug, PartialEq)]
pub struct AcyclicityCertificate {
    pub acyclic: bool,
    pub offending_pairs: Vec<(usize, EigenPair)>,
}

pub fn validate_spectrum(spec: &GradedSpectrum, tol: f64) -> Result<AcyclicityCertificate> {
    if !(tol > 0.0) {
        return Err(invalid("tol".into(), "tolerance must be positive"));
    }
    spec.check_structure()?;
    let offending_pairs: Vec<_> = spec
        .pairs()
        .filter(|(_, p)| (p.mu_t - 1.0).norm() < tol)
        .map(|((q, _), p)| (q, *p))
        .collect();
    Ok(AcyclicityCertificate {
        acyclic: offending_pairs.is_empty(),
        offending_pairs,
    })
}

/// Locations of eigenpairs with `mu_T` within `tol` of 1.
pub(crate) fn non_acyclic_locations(spec: &GradedSpectrum, tol: f64) -> Vec<PairLocation> {
    spec.pairs()
        .filter(|(_, p)| (p.mu_t - 1.0).norm() < tol)
        .map(|(loc, _)| loc)
        .collect()
}

/// An eigenpair converted into a working scalar type.
#[derive(Clone, Debug)]
pub(crate) struct LiftedPair<S> {
    pub location: PairLocation,
    /// `(-1)^q * multiplicity`.
    pub signed_multiplicity: i64,
    pub mu_g: S,
    pub mu_t: S,
    pub mu_t_inv: S,
}

impl<S: ComplexScalar> LiftedPair<S> {
    /// `(-1)^q * multiplicity * mu_g`.
    pub fn weight(&self) -> S {
        self.mu_g.clone() * S::from_f64(self.signed_multiplicity as f64)
    }
}

pub(crate) fn lift<S: ComplexScalar>(spec: &GradedSpectrum) -> Vec<LiftedPair<S>> {
    spec.pairs()
        .map(|((q, j), p)| {
            let mu_t = S::from_c64(p.mu_t);
            LiftedPair {
                location: (q, j),
                signed_multiplicity: parity(q) * p.multiplicity as i64,
                mu_g: S::from_c64(p.mu_g),
                mu_t_inv: mu_t.recip(),
                mu_t,
            }
        })
        .collect()
}

/// `Tr((-1)^F g* (T*)^n)` on `H^•(Y, E1)`.
pub fn lefschetz_number(spec: &GradedSpectrum, n: i64) -> Complex64 {
    lefschetz_number_in::<Complex64>(spec, n)
}

pub fn lefschetz_number_in<S: ComplexScalar>(spec: &GradedSpectrum, n: i64) -> S {
    lefschetz_of_lifted(&lift::<S>(spec), n)
}

pub(crate) fn lefschetz_of_lifted<S: ComplexScalar>(pairs: &[LiftedPair<S>], n: i64) -> S {
    pairs.iter().fold(S::zero(), |acc, p| {
        let power = if n >= 0 {
            p.mu_t.powi(n)
        } else {
            p.mu_t_inv.powi(-n)
        };
        acc + p.weight() * power
    })
}

/// `Sdet(1 - scale * A) = prod_q det(1 - scale * A|_{H^q})^{(-1)^q}` with `A = T*` or `(T^-1)*`.
pub fn superdeterminant(spec: &GradedSpectrum, side: OperatorSide, scale: Complex64) -> Result<Complex64> {
    superdeterminant_in(spec, side, scale)
}

pub fn superdeterminant_in<S: ComplexScalar>(spec: &GradedSpectrum, side: OperatorSide, scale: S) -> Result<S> {
    superdeterminant_of_lifted(&lift::<S>(spec), side, &scale)
}

pub(crate) fn superdeterminant_of_lifted<S: ComplexScalar>(
    pairs: &[LiftedPair<S>],
    side: OperatorSide,
    scale: &S,
) -> Result<S> {
    let mut acc = S::one();
    for p in pairs {
        let mu = match side {
            OperatorSide::TForward => p.mu_t.clone(),
            OperatorSide::TInverse => p.mu_t_inv.clone(),
        };
        let factor = S::one() - scale.clone() * mu;
        if p.signed_multiplicity < 0 && factor.is_zero() {
            return Err(Error::Pole { location: p.location });
        }
        acc = acc * factor.powi(p.signed_multiplicity);
    }
    Ok(acc)
}

/// Shape of the random spectra used by the seeded property suites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpectrumShape {
    /// Degrees `0..max_degrees` may be populated.
    pub max_degrees: usize,
    pub max_pairs_per_degree: usize,
    /// Minimum `|mu_T - 1|`.
    pub min_distance_from_one: f64,
    /// When false every `mu_g` is 1.
    pub random_mu_g: bool,
}

impl Default for RandomSpectrumShape {
    fn default() -> Self {
        RandomSpectrumShape {
            max_degrees: 4,
            max_pairs_per_degree: 5,
            min_distance_from_one: 0.1,
            random_mu_g: true,
        }
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// Draws an acyclic spectrum: at least one eigenpair, unit-modulus entries,
/// every `mu_T` at distance at least `min_distance_from_one` from 1.
pub fn random_acyclic_spectrum<R: Rng + ?Sized>(rng: &mut R, shape: &RandomSpectrumShape) -> GradedSpectrum {
    assert!(shape.min_distance_from_one < 2.0, "no unit complex number is that far from 1");
    loop {
        let top_degree = rng.gen_range(0..shape.max_degrees.max(1));
        let mut degrees = BTreeMap::new();
        for q in 0..=top_degree {
            let count = rng.gen_range(0..=shape.max_pairs_per_degree);
            if count == 0 {
                continue;
            }
            let list = (0..count)
                .map(|_| {
                    let mu_t = loop {
                        let mu = random_unit(rng);
                        if (mu - 1.0).norm() >= shape.min_distance_from_one {
                            break mu;
                        }
                    };
                    let mu_g = if shape.random_mu_g {
                        random_unit(rng)
                    } else {
                        Complex64::new(1.0, 0.0)
                    };
                    EigenPair::new(mu_g, mu_t)
                })
                .collect();
            degrees.insert(q, list);
        }
        if !degrees.is_empty() {
            return GradedSpectrum {
                top_degree,
                degrees,
                dims: None,
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(q: usize, mu_g: Complex64, mu_t: Complex64) -> GradedSpectrum {
        GradedSpectrum::from_triples(q, &[(q, mu_g, mu_t)]).unwrap()
    }

    #[test]
    fn acyclicity_examples() {
        let cert = validate_spectrum(&single(0, c(1.0, 0.0), c(-1.0, 0.0)), 1e-9).unwrap();
        assert!(cert.acyclic);
        assert!(cert.offending_pairs.is_empty());

        let cert = validate_spectrum(&single(1, c(1.0, 0.0), c(1.0, 0.0)), 1e-9).unwrap();
        assert!(!cert.acyclic);
        assert_eq!(cert.offending_pairs.len(), 1);
        assert_eq!(cert.offending_pairs[0].0, 1);

        let tiny = Complex64::from_polar(1.0, 1e-12);
        let cert = validate_spectrum(&single(0, c(1.0, 0.0), tiny), 1e-9).unwrap();
        assert!(!cert.acyclic);
    }

    #[test]
    fn malformed_spectra_are_rejected() {
        let err = GradedSpectrum::from_triples(1, &[(2, c(1.0, 0.0), c(1.0, 0.0))]).unwrap_err();
        assert!(matches!(&err, Error::InvalidSpectrum { field, .. } if field == "degrees.2"));

        let err = GradedSpectrum::from_triples(0, &[(0, c(1.0, 0.0), c(1.001, 0.0))]).unwrap_err();
        assert!(matches!(&err, Error::InvalidSpectrum { field, .. } if field == "degrees.0[0].mu_t"));

        let spec = GradedSpectrum::sphere();
        assert!(spec.clone().with_dims(BTreeMap::from([(0, 1), (2, 1)])).is_ok());
        assert!(spec.with_dims(BTreeMap::from([(0, 2), (2, 1)])).is_err());
    }

    #[test]
    fn zero_multiplicity_rejected() {
        let mut degrees = BTreeMap::new();
        degrees.insert(0, vec![EigenPair::new(c(1.0, 0.0), c(-1.0, 0.0)).with_multiplicity(0)]);
        assert!(GradedSpectrum::new(0, degrees).is_err());
    }

    #[test]
    fn lefschetz_examples() {
        let trivial = single(0, c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(lefschetz_number(&trivial, 5), c(1.0, 0.0));

        let sphere = GradedSpectrum::sphere();
        for n in -4..=4 {
            assert_eq!(lefschetz_number(&sphere, n), c(2.0, 0.0));
        }

        let (theta, phi) = (0.7_f64, 2.1_f64);
        let spec = GradedSpectrum::from_triples(
            1,
            &[
                (0, c(1.0, 0.0), Complex64::from_polar(1.0, theta)),
                (1, c(1.0, 0.0), Complex64::from_polar(1.0, phi)),
            ],
        )
        .unwrap();
        for n in [-3, 0, 1, 4, 9] {
            let expected =
                Complex64::from_polar(1.0, n as f64 * theta) - Complex64::from_polar(1.0, n as f64 * phi);
            assert!((lefschetz_number(&spec, n) - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn multiplicity_counts_exactly() {
        let mut degrees = BTreeMap::new();
        degrees.insert(1, vec![EigenPair::new(c(1.0, 0.0), c(1.0, 0.0)).with_multiplicity(1_000_000)]);
        let spec = GradedSpectrum::new(1, degrees).unwrap();
        assert_eq!(lefschetz_number(&spec, 17), c(-1_000_000.0, 0.0));
        assert_eq!(spec.euler_characteristic(), -1_000_000);
    }

    #[test]
    fn superdeterminant_examples() {
        let mu = Complex64::from_polar(1.0, 0.4);
        let z = c(0.3, -0.2);
        let even = single(0, c(1.0, 0.0), mu);
        let got = superdeterminant(&even, OperatorSide::TForward, z).unwrap();
        assert!((got - (1.0 - z * mu)).norm() < 1e-15);

        let got = superdeterminant(&GradedSpectrum::sphere(), OperatorSide::TForward, c(0.4, 0.0)).unwrap();
        assert!((got - c(0.36, 0.0)).norm() < 1e-15);

        let odd = single(1, c(1.0, 0.0), mu);
        let got = superdeterminant(&odd, OperatorSide::TForward, z).unwrap();
        assert!((got - 1.0 / (1.0 - z * mu)).norm() < 1e-14);

        let got = superdeterminant(&odd, OperatorSide::TInverse, z).unwrap();
        assert!((got - 1.0 / (1.0 - z / mu)).norm() < 1e-14);
    }

    #[test]
    fn superdeterminant_pole_in_odd_degree() {
        let odd = single(1, c(1.0, 0.0), c(1.0, 0.0));
        let err = superdeterminant(&odd, OperatorSide::TForward, c(1.0, 0.0)).unwrap_err();
        assert_eq!(err, Error::Pole { location: (1, 0) });
        // an even-degree zero is a zero of the product, not a pole
        let even = single(0, c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(superdeterminant(&even, OperatorSide::TForward, c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    /// Coefficients of prod_j (1 - w^j z) by multiplying out linear factors.
    fn expand_cyclic(p: u32) -> Vec<Complex64> {
        let mut coeffs = vec![c(1.0, 0.0)];
        for j in 0..p {
            let w = Complex64::from_polar(1.0, TAU * j as f64 / p as f64);
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, a) in coeffs.iter().enumerate() {
                next[k] += a;
                next[k + 1] -= a * w;
            }
            coeffs = next;
        }
        coeffs
    }

    #[test]
    fn cyclic_superdeterminant_is_one_minus_z_to_the_p() {
        for p in 1..=8u32 {
            let coeffs = expand_cyclic(p);
            for (k, a) in coeffs.iter().enumerate() {
                let expected = if k == 0 {
                    1.0
                } else if k == p as usize {
                    -1.0
                } else {
                    0.0
                };
                assert!((a - expected).norm() < 1e-12, "p={p} k={k} {a}");
            }
            let spec = GradedSpectrum::cyclic_permutation(p);
            for z in [c(0.3, 0.1), c(-0.7, 0.2), c(1.5, -0.4)] {
                let poly: Complex64 = coeffs.iter().enumerate().map(|(k, a)| a * z.powi(k as i32)).sum();
                let got = superdeterminant(&spec, OperatorSide::TForward, z).unwrap();
                assert!((got - poly).norm() < 1e-12 * (1.0 + poly.norm()));
                assert!((got - (1.0 - z.powi(p as i32))).norm() < 1e-12 * (1.0 + poly.norm()));
            }
        }
    }

    fn arb_unit() -> impl Strategy<Value = Complex64> {
        (0.0..TAU).prop_map(|t| Complex64::from_polar(1.0, t))
    }

    fn arb_spectrum() -> impl Strategy<Value = GradedSpectrum> {
        (0usize..4)
            .prop_flat_map(|top| {
                (
                    Just(top),
                    prop::collection::vec((0..=top, arb_unit(), arb_unit(), 1u32..4), 0..8),
                )
            })
            .prop_map(|(top, entries)| {
                let mut degrees: BTreeMap<usize, Vec<EigenPair>> = BTreeMap::new();
                for (q, g, t, m) in entries {
                    degrees.entry(q).or_default().push(EigenPair::new(g, t).with_multiplicity(m));
                }
                GradedSpectrum::new(top, degrees).unwrap()
            })
    }

    proptest! {
        #[test]
        fn lefschetz_is_additive(a in arb_spectrum(), b in arb_spectrum(), n in -20i64..20) {
            let joined = a.disjoint_union(&b);
            let lhs = lefschetz_number(&joined, n);
            let rhs = lefschetz_number(&a, n) + lefschetz_number(&b, n);
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }

        #[test]
        fn trivial_action_gives_euler_characteristic(a in arb_spectrum(), n in -20i64..20) {
            let one = Complex64::new(1.0, 0.0);
            let trivial = a.map_pairs(|p| EigenPair { mu_g: one, mu_t: one, ..*p }).unwrap();
            prop_assert_eq!(lefschetz_number(&trivial, n), Complex64::new(a.euler_characteristic() as f64, 0.0));
        }

        #[test]
        fn empty_perturbation_has_unit_superdeterminant(a in arb_spectrum()) {
            for side in [OperatorSide::TForward, OperatorSide::TInverse] {
                prop_assert_eq!(superdeterminant(&a, side, Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
            }
        }

        #[test]
        fn conjugation_reverses_time(a in arb_spectrum(), n in -15i64..15) {
            let real_g = a.map_pairs(|p| EigenPair { mu_g: Complex64::new(p.mu_g.re.signum(), 0.0), ..*p }).unwrap();
            let conj = real_g.map_pairs(|p| EigenPair { mu_t: p.mu_t.conj(), ..*p }).unwrap();
            let lhs = lefschetz_number(&conj, n);
            let rhs = lefschetz_number(&real_g, -n);
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn random_spectra_respect_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shape = RandomSpectrumShape::default();
        for _ in 0..200 {
            let spec = random_acyclic_spectrum(&mut rng, &shape);
            assert!(spec.top_degree() < 4);
            assert!(!spec.is_empty());
            assert!(validate_spectrum(&spec, 1e-9).unwrap().acyclic);
            for list in spec.degrees().values() {
                assert!(list.len() <= 5);
            }
            for (_, p) in spec.pairs() {
                assert!((p.mu_t - 1.0).norm() >= 0.1);
            }
        }
    }

    #[test]
    fn serde_uses_re_im_arrays() {
        let spec = single(0, c(1.0, 0.0), c(-1.0, 0.0));
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"top_degree":0,"degrees":{"0":[{"mu_g":[1.0,0.0],"mu_t":[-1.0,0.0],"multiplicity":1}]}}"#);
        let back: GradedSpectrum = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"top_degree":0,"degrees":{"0":[{"mu_g":[1.0,0.0],"mu_t":[1.001,0.0]}]}}"#;
        let err = serde_json::from_str::<GradedSpectrum>(bad).unwrap_err().to_string();
        assert!(err.contains("degrees.0[0].mu_t"), "{err}");
    }
}
