use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Choice of `psi_Y`. The cutoff on the time direction is always the
/// indicator of `[0, 1)`, see [`psi_r`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffProfile {
    /// The scenario's own cutoff: `psi_Y = 1` on compact models, the
    /// identity-copy indicator on `Gamma x X`, the declared weights for Weyl data.
    #[default]
    Canonical,
    /// Explicit weights by point id; unlisted points get 0.
    Points(BTreeMap<String, f64>),
    /// Indicator of `{e} x X` inside `Gamma x X`.
    IdentityCopy,
}

/// `psi_R`: indicator of `[0, 1)`.
pub fn psi_r(s: f64) -> f64 {
    if (0.0..1.0).contains(&s) {
        1.0
    } else {
        0.0
    }
}

/// `int_0^p psi_R(s - k) ds` for an integer shift `k`: the unit interval
/// `[k, k+1)` lies in `[0, p)` exactly when `0 <= k < p`.
pub(crate) fn psi_r_mass(k: i64, p: u64) -> f64 {
    if k >= 0 && (k as u64) < p {
        1.0
    } else {
        0.0
    }
}

impl CutoffProfile {
    pub fn points<I, S>(weights: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        CutoffProfile::Points(weights.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}
