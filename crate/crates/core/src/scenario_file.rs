//! JSON scenario files: a spectrum, a dynamical scenario, or both, plus a
//! sigma grid, a truncation depth and check tolerances.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{CutoffProfile, Scenario};
use crate::error::{Error, Result};
use crate::spectra::GradedSpectrum;

pub const DEFAULT_TRUNCATION: u32 = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsBlock {
    pub scenario: Scenario,
    #[serde(default)]
    pub cutoffs: CutoffProfile,
}

/// `count` equally spaced real parts from `start` to `stop`, each combined
/// with every imaginary offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "default_offsets")]
    pub imag_offsets: Vec<f64>,
}

fn default_offsets() -> Vec<f64> {
    vec![0.0]
}

impl SweepGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let reals: Vec<f64> = match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            k => (0..k)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (k - 1) as f64)
                .collect(),
        };
        reals
            .iter()
            .flat_map(|&re| self.imag_offsets.iter().map(move |&im| Complex64::new(re, im)))
            .collect()
    }
}

fn default_fried() -> f64 {
    1e-9
}
fn default_atiyah_bott() -> f64 {
    1e-12
}
fn default_cutoff() -> f64 {
    1e-12
}
fn default_abel() -> f64 {
    1e-3
}
fn default_mellin() -> f64 {
    1e-4
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative to `|R(sigma)|`.
    #[serde(default = "default_fried")]
    pub fried: f64,
    #[serde(default = "default_atiyah_bott")]
    pub atiyah_bott: f64,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default = "default_abel")]
    pub abel: f64,
    #[serde(default = "default_mellin")]
    pub mellin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fried: default_fried(),
            atiyah_bott: default_atiyah_bott(),
            cutoff: default_cutoff(),
            abel: default_abel(),
            mellin: default_mellin(),
        }
    }
}

fn default_truncation() -> u32 {
    DEFAULT_TRUNCATION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<GradedSpectrum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepGrid>,
    #[serde(default = "default_truncation")]
    pub truncation: u32,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ScenarioFile {
    pub fn validate(&self) -> Result<()> {
        if self.spectrum.is_none() && self.dynamics.is_none() {
            return Err(Error::Parse("scenario file needs a spectrum or a dynamics block".into()));
        }
        if self.truncation == 0 {
            return Err(Error::Parse("truncation must be positive".into()));
        }
        if let Some(d) = &self.dynamics {
            d.scenario.validate()?;
            crate::dynamics::check_growth_bound(&d.scenario)?;
        }
        if let Some(s) = &self.sweep {
            let finite = s.start.is_finite() && s.stop.is_finite() && s.imag_offsets.iter().all(|x| x.is_finite());
            if !finite {
                return Err(Error::Parse("sweep grid values must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario files serialize")
    }

    pub fn require_spectrum(&self) -> Result<&GradedSpectrum> {
        self.spectrum
            .as_ref()
            .ok_or_else(|| Error::Parse(format!("{}: this check needs a spectrum block", self.name)))
    }

    pub fn require_dynamics(&self) -> Result<&DynamicsBlock> {
        self.dynamics
            .as_ref()
            .ok_or_else(|| Error::Parse(format!("{}: this check needs a dynamics block", self.name)))
    }
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<ScenarioFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    ScenarioFile::from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "tiny",
        "spectrum": {"top_degree": 0, "degrees": {"0": [{"mu_g": [1, 0], "mu_t": [-1, 0]}]}}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let f = ScenarioFile::from_json(MINIMAL).unwrap();
        assert_eq!(f.truncation, DEFAULT_TRUNCATION);
        assert_eq!(f.tolerances, Tolerances::default());
        assert!(f.dynamics.is_none());
    }

    #[test]
    fn needs_a_block() {
        let err = ScenarioFile::from_json(r#"{"name": "empty"}"#).unwrap_err();
        assert!(err.to_string().contains("spectrum or a dynamics"));
    }

    #[test]
    fn names_the_offending_pair() {
        let text = MINIMAL.replace("[-1, 0]", "[-1.001, 0]");
        let err = ScenarioFile::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("degrees.0[0].mu_t"), "{err}");
    }

    #[test]
    fn reports_line_of_syntax_errors() {
        let err = ScenarioFile::from_json("{\n\"name\": \"x\",\n oops }").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = MINIMAL.replace("\"name\"", "\"truncaton\": 5, \"name\"");
        assert!(ScenarioFile::from_json(&text).is_err());
    }

    #[test]
    fn grid_points() {
        let g = SweepGrid {
            start: 0.5,
            stop: 3.0,
            count: 6,
            imag_offsets: vec![0.0, 0.3],
        };
        let pts = g.points();
        assert_eq!(pts.len(), 12);
        assert_eq!(pts[0], Complex64::new(0.5, 0.0));
        assert_eq!(pts[1], Complex64::new(0.5, 0.3));
        assert_eq!(pts[10], Complex64::new(3.0, 0.0));
        assert!(SweepGrid { count: 0, ..g }.points().is_empty());
    }
}
