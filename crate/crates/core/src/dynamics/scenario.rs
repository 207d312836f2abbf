//! Scenario descriptions: the space `Y`, the commuting maps `g` and `T`, and
//! the lift of `T` to the flat bundle `E1`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{EigenPair, GradedSpectrum, UNIT_MODULUS_TOLERANCE};

/// Angles within this distance of a multiple of `2 pi` count as the identity rotation.
pub const ANGLE_TOLERANCE: f64 = 1e-10;

/// Declared bound `|fixed set of g^-1 T^n| <= prefactor * e^{exponent |n|}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthBound {
    pub prefactor: f64,
    /// The constant `c`; the dynamical zeta series needs `Re(sigma) > c`.
    pub exponent: f64,
}

impl GrowthBound {
    pub fn constant(prefactor: f64) -> Self {
        GrowthBound {
            prefactor,
            exponent: 0.0,
        }
    }

    pub fn at(&self, n: i64) -> f64 {
        self.prefactor * (self.exponent * n.unsigned_abs() as f64).exp()
    }
}

/// Analytic hypotheses that are recorded but never verified numerically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionFlags {
    #[serde(default)]
    pub novikov_shubin_positive: bool,
    #[serde(default)]
    pub svarc_milnor: bool,
}

fn is_zero(x: &i64) -> bool {
    *x == 0
}

/// Finitely many labelled points permuted by `T`, with `g = T^g_power`.
///
/// The lift of `T` to `E1` is diagonal in a fixed frame:
/// `fiber_phases[y][i]` is the phase carried from `(E1)_y` to `(E1)_{Ty}` in
/// component `i`, and `g` is lifted as the same power of `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationModel {
    pub t_map: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_phases: Option<Vec<Vec<Complex64>>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub g_power: i64,
}

/// Rotations of `S^1` or `S^2` about a common axis: `T` by `t_angle`, `g` by `g_angle`.
///
/// The bundle is trivial; `T` and `g` act on each fiber by the constant phases
/// `t_fiber[i]` and `g_fiber[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationModel {
    pub t_angle: f64,
    #[serde(default)]
    pub g_angle: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_fiber: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_fiber: Option<Vec<Complex64>>,
    /// Order of `T` when `t_angle` is a rational multiple of `2 pi`; `None` means infinite order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_order: Option<u64>,
}

fn default_sign() -> i8 {
    1
}

fn default_period() -> u64 {
    1
}

fn default_weight() -> f64 {
    1.0
}

/// One point of a Weyl-indexed fixed set, identical for every `n != 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylPoint {
    #[serde(default = "default_sign")]
    pub sign: i8,
    /// Eigenvalues of `g T_E^{-1}`-type fiber data: the trace at `n` is `sum_i lambda_i^{-n}`.
    pub fiber_eigenvalues: Vec<Complex64>,
    #[serde(default = "default_period")]
    pub primitive_period: u64,
    /// `psi^g(y)`.
    #[serde(default = "default_weight")]
    pub psi_g: f64,
    /// `(1/p(y)) int_{G/Z} int_0^{p(y)} psi_M[hy, s] ds d(hZ)`.
    #[serde(default = "default_weight")]
    pub averaged_cutoff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylLabel {
    pub name: String,
    pub points: Vec<WeylPoint>,
}

/// Fixed sets shaped as a disjoint union over Weyl group labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylModel {
    pub labels: Vec<WeylLabel>,
    /// `chi_{(g,0)}`, needed only by the torsion side.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_zero: Option<Complex64>,
}

/// Compact model `X` used as the factor of `Gamma x X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseModel {
    FinitePermutation(PermutationModel),
    CircleRotation(RotationModel),
    SphereRotation(RotationModel),
}

/// `Y = Gamma x X` with `Gamma = Z` acting by translation on the first factor
/// and `T` acting on `X` only; `g = e`. Copies `-window..=window` are enumerated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityProductModel {
    pub base: Box<BaseModel>,
    pub window: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    FinitePermutation(PermutationModel),
    CircleRotation(RotationModel),
    SphereRotation(RotationModel),
    WeylProduct(WeylModel),
    DiscreteIdentityProduct(IdentityProductModel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub model: Model,
    pub rank: usize,
    pub growth: GrowthBound,
    #[serde(default)]
    pub flags: AssumptionFlags,
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidScenario {
        field: field.into(),
        reason: reason.into(),
    }
}

fn check_units(field: &str, values: &[Complex64], rank: usize) -> Result<()> {
    if values.len() != rank {
        return Err(invalid(field, format!("expected {rank} entries, found {}", values.len())));
    }
    for (i, v) in values.iter().enumerate() {
        if !((v.norm() - 1.0).abs() <= UNIT_MODULUS_TOLERANCE) {
            return Err(invalid(format!("{field}[{i}]"), format!("|{v}| is not 1")));
        }
    }
    Ok(())
}

/// Distance from `theta` to the nearest multiple of `2 pi`.
pub(crate) fn angle_defect(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    r.min(TAU - r)
}

impl PermutationModel {
    pub fn cyclic(p: usize) -> Self {
        PermutationModel {
            t_map: (0..p).map(|i| (i + 1) % p).collect(),
            labels: None,
            fiber_phases: None,
            g_power: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.t_map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_map.is_empty()
    }

    pub fn label(&self, y: usize) -> String {
        match &self.labels {
            Some(labels) => labels[y].clone(),
            None => y.to_string(),
        }
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        match &self.labels {
            Some(labels) => labels.iter().position(|l| l == id),
            None => id.parse::<usize>().ok().filter(|&y| y < self.len()),
        }
    }

    pub fn phase(&self, y: usize, i: usize) -> Complex64 {
        self.fiber_phases
            .as_ref()
            .map(|p| p[y][i])
            .unwrap_or(Complex64::new(1.0, 0.0))
    }

    fn validate(&self, rank: usize) -> Result<()> {
        let n = self.len();
        let mut seen = vec![false; n];
        for (y, &image) in self.t_map.iter().enumerate() {
            if image >= n {
                return Err(invalid(format!("t_map[{y}]"), format!("{image} is not a point index")));
            }
            if std::mem::replace(&mut seen[image], true) {
                return Err(invalid(format!("t_map[{y}]"), "t_map is not a permutation"));
            }
        }
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(invalid("labels", format!("expected {n} labels")));
            }
            let mut sorted = labels.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != n {
                return Err(invalid("labels", "labels must be distinct"));
            }
        }
        if let Some(phases) = &self.fiber_phases {
            if phases.len() != n {
                return Err(invalid("fiber_phases", format!("expected one entry per point ({n})")));
            }
            for (y, p) in phases.iter().enumerate() {
                check_units(&format!("fiber_phases[{y}]"), p, rank)?;
            }
        }
        Ok(())
    }

    /// Cycles of `T`, each listed starting from its smallest point in `T`-order.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut visited = vec![false; self.len()];
        let mut cycles = Vec::new();
        for start in 0..self.len() {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut y = start;
            while !visited[y] {
                visited[y] = true;
                cycle.push(y);
                y = self.t_map[y];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Holonomy of the lift around a cycle: the diagonal of `T_E^p` on `(E1)_y`.
    pub fn holonomy(&self, cycle: &[usize], rank: usize) -> Vec<Complex64> {
        (0..rank)
            .map(|i| cycle.iter().map(|&y| self.phase(y, i)).product())
            .collect()
    }

    /// `H^0(Y, E1)`: on a cycle of length `p` with holonomy `h`, `T*` has the
    /// `p` roots of `h` as eigenvalues and `g* = (T*)^g_power`.
    pub fn cohomology_spectrum(&self, rank: usize) -> GradedSpectrum {
        let mut pairs = Vec::new();
        for cycle in self.cycles() {
            let p = cycle.len() as f64;
            for h in self.holonomy(&cycle, rank) {
                let theta = h.arg();
                for j in 0..cycle.len() {
                    let mu_t = Complex64::from_polar(1.0, (theta + TAU * j as f64) / p);
                    let mu_g = Complex64::from_polar(1.0, (theta + TAU * j as f64) / p * self.g_power as f64);
                    pairs.push(EigenPair::new(mu_g, mu_t));
                }
            }
        }
        let dim = pairs.len() as u64;
        let degrees = if pairs.is_empty() {
            BTreeMap::new()
        } else {
            BTreeMap::from([(0, pairs)])
        };
        GradedSpectrum::new(0, degrees)
            .and_then(|s| s.with_dims(BTreeMap::from([(0, dim)])))
            .expect("permutation spectra are unit modulus by construction")
    }
}

impl RotationModel {
    pub fn new(t_angle: f64) -> Self {
        RotationModel {
            t_angle,
            g_angle: 0.0,
            t_fiber: None,
            g_fiber: None,
            rotation_order: None,
        }
    }

    pub fn t_fiber(&self, rank: usize) -> Vec<Complex64> {
        self.t_fiber
            .clone()
            .unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); rank])
    }

    pub fn g_fiber(&self, rank: usize) -> Vec<Complex64> {
        self.g_fiber
            .clone()
            .unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); rank])
    }

    /// Angle of `g^-1 T^n`.
    pub fn angle(&self, n: i64) -> f64 {
        n as f64 * self.t_angle - self.g_angle
    }

    pub fn is_trivial_g(&self) -> bool {
        angle_defect(self.g_angle) <= ANGLE_TOLERANCE
            && self
                .g_fiber
                .as_ref()
                .is_none_or(|g| g.iter().all(|v| (v - 1.0).norm() <= UNIT_MODULUS_TOLERANCE))
    }

    fn validate(&self, rank: usize) -> Result<()> {
        if !self.t_angle.is_finite() || !self.g_angle.is_finite() {
            return Err(invalid("t_angle", "angles must be finite"));
        }
        if let Some(t) = &self.t_fiber {
            check_units("t_fiber", t, rank)?;
        }
        if let Some(g) = &self.g_fiber {
            check_units("g_fiber", g, rank)?;
        }
        if let Some(q) = self.rotation_order {
            if q == 0 || angle_defect(q as f64 * self.t_angle) > ANGLE_TOLERANCE {
                return Err(invalid("rotation_order", format!("T^{q} is not the identity")));
            }
        }
        Ok(())
    }

    /// Cohomology of `S^d` (`d` = 1 or 2): degrees 0 and `d`, rotations act
    /// trivially on the base and by the fiber phases on coefficients.
    pub fn cohomology_spectrum(&self, top_degree: usize, rank: usize) -> GradedSpectrum {
        let pairs: Vec<EigenPair> = self
            .g_fiber(rank)
            .into_iter()
            .zip(self.t_fiber(rank))
            .map(|(g, t)| EigenPair::new(g, t))
            .collect();
        let degrees = BTreeMap::from([(0, pairs.clone()), (top_degree, pairs)]);
        GradedSpectrum::new(top_degree, degrees)
            .and_then(|s| s.with_dims(BTreeMap::from([(0, rank as u64), (top_degree, rank as u64)])))
            .expect("validated fiber phases")
    }
}

impl WeylModel {
    fn validate(&self, rank: usize) -> Result<()> {
        for (l, label) in self.labels.iter().enumerate() {
            for (k, point) in label.points.iter().enumerate() {
                let field = format!("labels[{l}].points[{k}]");
                if point.sign != 1 && point.sign != -1 {
                    return Err(invalid(format!("{field}.sign"), "sign must be +1 or -1"));
                }
                check_units(&format!("{field}.fiber_eigenvalues"), &point.fiber_eigenvalues, rank)?;
                if point.primitive_period == 0 {
                    return Err(invalid(format!("{field}.primitive_period"), "must be positive"));
                }
                if !(point.psi_g >= 0.0) || !(point.averaged_cutoff >= 0.0) {
                    return Err(invalid(field, "cutoff weights must be non-negative"));
                }
            }
        }
        Ok(())
    }
}

impl BaseModel {
    fn validate(&self, rank: usize) -> Result<()> {
        match self {
            BaseModel::FinitePermutation(m) => {
                m.validate(rank)?;
                if m.g_power != 0 {
                    return Err(invalid("base.g_power", "the identity-product model needs g = e"));
                }
                Ok(())
            }
            BaseModel::CircleRotation(m) | BaseModel::SphereRotation(m) => {
                m.validate(rank)?;
                if !m.is_trivial_g() {
                    return Err(invalid("base.g_angle", "the identity-product model needs g = e"));
                }
                Ok(())
            }
        }
    }
}

impl Scenario {
    pub fn new(model: Model, rank: usize, growth: GrowthBound) -> Result<Self> {
        let scenario = Scenario {
            model,
            rank,
            growth,
            flags: AssumptionFlags::default(),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// `p` points cyclically permuted, trivial line bundle, `g = e`.
    pub fn cyclic(p: usize) -> Self {
        Self::new(
            Model::FinitePermutation(PermutationModel::cyclic(p)),
            1,
            GrowthBound::constant(p as f64),
        )
        .expect("cyclic model is valid")
    }

    /// Rotation of `S^2` by `t_angle`, trivial line bundle, `g = e`.
    pub fn sphere(t_angle: f64) -> Self {
        Self::new(Model::SphereRotation(RotationModel::new(t_angle)), 1, GrowthBound::constant(2.0))
            .expect("sphere model is valid")
    }

    /// Rotation of `S^1` by `t_angle`, trivial line bundle, `g = e`.
    pub fn circle(t_angle: f64) -> Self {
        Self::new(Model::CircleRotation(RotationModel::new(t_angle)), 1, GrowthBound::constant(0.0))
            .expect("circle model is valid")
    }

    /// `Z x X` for a compact base, enumerating copies `-window..=window`.
    pub fn identity_product(base: BaseModel, rank: usize, window: u32, base_growth: f64) -> Result<Self> {
        let copies = 2.0 * window as f64 + 1.0;
        Self::new(
            Model::DiscreteIdentityProduct(IdentityProductModel {
                base: Box::new(base),
                window,
            }),
            rank,
            GrowthBound::constant(copies * base_growth),
        )
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.model {
            Model::FinitePermutation(_) => "finite_permutation",
            Model::CircleRotation(_) => "circle_rotation",
            Model::SphereRotation(_) => "sphere_rotation",
            Model::WeylProduct(_) => "weyl_product",
            Model::DiscreteIdentityProduct(_) => "discrete_identity_product",
        }
    }

    pub fn is_compact_type(&self) -> bool {
        matches!(
            self.model,
            Model::FinitePermutation(_) | Model::CircleRotation(_) | Model::SphereRotation(_)
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(invalid("rank", "rank must be positive"));
        }
        if !(self.growth.prefactor >= 0.0) || !(self.growth.exponent >= 0.0) {
            return Err(invalid("growth", "growth constants must be non-negative"));
        }
        match &self.model {
            Model::FinitePermutation(m) => m.validate(self.rank),
            Model::CircleRotation(m) | Model::SphereRotation(m) => m.validate(self.rank),
            Model::WeylProduct(m) => m.validate(self.rank),
            Model::DiscreteIdentityProduct(m) => m.base.validate(self.rank),
        }
    }

    /// Cohomology `H^•(Y, E1)` with the induced `g*`, `T*`, for compact-type scenarios.
    ///
    /// The eigenvalue convention is the one for which the fixed-point sum
    /// `sum_y sgn det(1 - D_y(g^-1 T^n)) tr(g T_E^{-n})` equals `L(-n)`.
    pub fn cohomology_spectrum(&self) -> Result<GradedSpectrum> {
        match &self.model {
            Model::FinitePermutation(m) => Ok(m.cohomology_spectrum(self.rank)),
            Model::CircleRotation(m) => Ok(m.cohomology_spectrum(1, self.rank)),
            Model::SphereRotation(m) => Ok(m.cohomology_spectrum(2, self.rank)),
            _ => Err(Error::WrongKind {
                kind: self.kind_name(),
                operation: "cohomology_spectrum",
            }),
        }
    }
}
