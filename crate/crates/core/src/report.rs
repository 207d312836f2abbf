//! Sweeps over a sigma grid and the pass/fail checks behind the command line.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{
    atiyah_bott_residual, cutoff_compatibility_residual, cutoff_property_defect, ruelle_dynamical, Scenario,
};
use crate::error::{Error, Result};
use crate::heat_mellin::{mellin_torsion, HeatTraceModel, MellinConfig};
use crate::scenario_file::ScenarioFile;
use crate::spectra::{
    lefschetz_number, non_acyclic_locations, random_acyclic_spectrum, GradedSpectrum, RandomSpectrumShape,
    DEFAULT_ACYCLICITY_TOLERANCE,
};
use crate::torsion::{circle_factor_torsion, torsion_fixed_point_form};
use crate::zeta_spectral::{
    fried_residual, ruelle_closed_form, ruelle_series, torsion_at_zero, torsion_closed_form, torsion_series,
};

/// Seed used by randomized suites unless overridden.
pub const DEFAULT_SEED: u64 = 20_160_917;

/// Sigma values probed by the Fried check when the file has no sweep grid.
pub const DEFAULT_FRIED_SIGMAS: [f64; 3] = [0.5, 1.0, 2.0];

/// Grid of the Mellin check: `n` and `sigma`.
pub const MELLIN_GRID: ([i64; 3], [f64; 3]) = ([1, 2, 3], [0.25, 1.0, 4.0]);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// `Re(sigma)` at or below the convergence abscissa.
    Domain,
    /// Some requested quantity could not be evaluated.
    Error,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Domain => "domain",
            RowStatus::Error => "error",
        }
    }
}

/// One sigma of a sweep. Torsion columns are evaluated at `sigma^2`, so that
/// `fried_residual = R(sigma) - e^{sigma chi_0} T(sigma^2)^2` compares columns directly.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub sigma: Complex64,
    pub r_series: Option<Complex64>,
    pub r_closed: Option<Complex64>,
    pub t_series: Option<Complex64>,
    pub t_closed: Option<Complex64>,
    pub fried_residual: Option<Complex64>,
    pub atiyah_bott_max_residual: Option<f64>,
    pub r_tail_bound: Option<f64>,
    pub t_tail_bound: Option<f64>,
    pub r_dynamical: Option<Complex64>,
    pub t_fixed_point: Option<Complex64>,
    pub status: RowStatus,
}

pub const CSV_HEADER: [&str; 20] = [
    "sigma_re",
    "sigma_im",
    "R_series_re",
    "R_series_im",
    "R_closed_re",
    "R_closed_im",
    "T_series_re",
    "T_series_im",
    "T_closed_re",
    "T_closed_im",
    "fried_residual_re",
    "fried_residual_im",
    "atiyah_bott_max_residual",
    "R_tail_bound",
    "T_tail_bound",
    "R_dynamical_re",
    "R_dynamical_im",
    "T_fixed_point_re",
    "T_fixed_point_im",
    "status",
];

/// Shortest round-trip decimal, switching to exponent form for very small or large magnitudes.
fn number(x: f64) -> String {
    let magnitude = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&magnitude) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn complex_cells(z: Option<Complex64>) -> [String; 2] {
    match z {
        Some(z) => [number(z.re), number(z.im)],
        None => [String::new(), String::new()],
    }
}

fn real_cell(x: Option<f64>) -> String {
    x.map(number).unwrap_or_default()
}

impl ReportRow {
    fn blank(sigma: Complex64, status: RowStatus) -> Self {
        ReportRow {
            sigma,
            r_series: None,
            r_closed: None,
            t_series: None,
            t_closed: None,
            fried_residual: None,
            atiyah_bott_max_residual: None,
            r_tail_bound: None,
            t_tail_bound: None,
            r_dynamical: None,
            t_fixed_point: None,
            status,
        }
    }

    pub fn cells(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(20);
        out.extend(complex_cells(Some(self.sigma)));
        out.extend(complex_cells(self.r_series));
        out.extend(complex_cells(self.r_closed));
        out.extend(complex_cells(self.t_series));
        out.extend(complex_cells(self.t_closed));
        out.extend(complex_cells(self.fried_residual));
        out.push(real_cell(self.atiyah_bott_max_residual));
        out.push(real_cell(self.r_tail_bound));
        out.push(real_cell(self.t_tail_bound));
        out.extend(complex_cells(self.r_dynamical));
        out.extend(complex_cells(self.t_fixed_point));
        out.push(self.status.as_str().to_string());
        out
    }
}

/// Convergence abscissa of the series in the file: `Re(sigma)` must exceed it.
pub fn convergence_abscissa(file: &ScenarioFile) -> f64 {
    let dynamical = file.dynamics.as_ref().map_or(0.0, |d| d.scenario.growth.exponent);
    let spectral = file.spectrum.as_ref().map_or(0.0, |s| {
        s.pairs().map(|(_, p)| p.mu_t.norm().ln().abs()).fold(0.0, f64::max)
    });
    dynamical.max(spectral)
}

/// `max_{0<|n|<=N} |atiyah_bott_residual(n)|` when both blocks are present and the scenario is compact.
fn atiyah_bott_max(file: &ScenarioFile, n_max: u32) -> Option<Result<f64>> {
    let spec = file.spectrum.as_ref()?;
    let dynamics = file.dynamics.as_ref()?;
    if !dynamics.scenario.is_compact_type() {
        return None;
    }
    Some(atiyah_bott_max_residual(&dynamics.scenario, spec, n_max))
}

pub fn atiyah_bott_max_residual(scenario: &Scenario, spec: &GradedSpectrum, n_max: u32) -> Result<f64> {
    let n_max = n_max as i64;
    let mut worst: f64 = 0.0;
    for n in (-n_max..=n_max).filter(|&n| n != 0) {
        worst = worst.max(atiyah_bott_residual(scenario, spec, n)?.norm());
    }
    Ok(worst)
}

fn sweep_row(file: &ScenarioFile, sigma: Complex64, atiyah_bott: Option<&Result<f64>>) -> ReportRow {
    if !(sigma.re > convergence_abscissa(file)) {
        return ReportRow::blank(sigma, RowStatus::Domain);
    }
    let n = file.truncation;
    let mut row = ReportRow::blank(sigma, RowStatus::Ok);
    let mut failed = false;
    let mut keep = |r: Result<Complex64>| -> Option<Complex64> {
        r.map_err(|_| failed = true).ok()
    };
    let sigma_sq = sigma * sigma;
    if let Some(spec) = &file.spectrum {
        let series = ruelle_series(spec, sigma, n);
        let torsion = torsion_series(spec, sigma_sq, n);
        row.r_tail_bound = series.as_ref().ok().map(|v| v.tail_bound);
        row.t_tail_bound = torsion.as_ref().ok().map(|v| v.tail_bound);
        row.r_series = keep(series.map(|v| v.value));
        row.t_series = keep(torsion.map(|v| v.value));
        row.r_closed = keep(ruelle_closed_form(spec, sigma));
        row.t_closed = keep(torsion_closed_form(spec, sigma_sq));
        row.fried_residual = keep(fried_residual(spec, sigma));
    }
    if let Some(d) = &file.dynamics {
        row.r_dynamical = keep(ruelle_dynamical(&d.scenario, &d.cutoffs, sigma, n).map(|v| v.value));
        row.t_fixed_point = keep(torsion_fixed_point_form(&d.scenario, &d.cutoffs, sigma_sq, n).map(|v| v.value));
    }
    match atiyah_bott {
        Some(Ok(x)) => row.atiyah_bott_max_residual = Some(*x),
        Some(Err(_)) => failed = true,
        None => {}
    }
    if failed {
        row.status = RowStatus::Error;
    }
    row
}

/// Rows for every grid point, in grid order.
pub fn sweep_rows(file: &ScenarioFile) -> Result<Vec<ReportRow>> {
    let grid = file
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Parse(format!("{}: sweep needs a sweep block", file.name)))?;
    let atiyah_bott = atiyah_bott_max(file, file.truncation);
    Ok(grid
        .points()
        .into_par_iter()
        .map(|sigma| sweep_row(file, sigma, atiyah_bott.as_ref()))
        .collect())
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let to_err = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        message: e.to_string(),
    };
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER).map_err(to_err)?;
    for row in rows {
        writer.write_record(row.cells()).map_err(to_err)?;
    }
    writer.flush().map_err(|e| Error::Io {
        path: "<csv>".into(),
        message: e.to_string(),
    })
}

pub fn run_sweep(file: &ScenarioFile, output: &Path) -> Result<usize> {
    let rows = sweep_rows(file)?;
    let io_err = |e: std::io::Error| Error::Io {
        path: output.display().to_string(),
        message: e.to_string(),
    };
    let handle = std::fs::File::create(output).map_err(io_err)?;
    write_csv(&rows, std::io::BufWriter::new(handle)).map_err(|e| match e {
        Error::Io { message, .. } => Error::Io {
            path: output.display().to_string(),
            message,
        },
        other => other,
    })?;
    Ok(rows.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Fried,
    AtiyahBott,
    Cutoff,
    Abel,
    Mellin,
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Fried => "fried",
            CheckKind::AtiyahBott => "atiyah-bott",
            CheckKind::Cutoff => "cutoff",
            CheckKind::Abel => "abel",
            CheckKind::Mellin => "mellin",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub kind: CheckKind,
    pub tolerance: f64,
    /// Largest measured residual.
    pub residual: f64,
    pub passed: bool,
    pub lines: Vec<String>,
}

impl CheckReport {
    fn new(kind: CheckKind, tolerance: f64) -> Self {
        CheckReport {
            kind,
            tolerance,
            residual: 0.0,
            passed: true,
            lines: Vec::new(),
        }
    }

    fn record(&mut self, label: String, residual: f64) {
        let ok = residual <= self.tolerance;
        self.passed &= ok;
        self.residual = self.residual.max(residual);
        self.lines
            .push(format!("{label}: residual {residual:.3e} {}", if ok { "ok" } else { "FAIL" }));
    }
}

fn require_acyclic(spec: &GradedSpectrum) -> Result<()> {
    let offenders = non_acyclic_locations(spec, DEFAULT_ACYCLICITY_TOLERANCE);
    if offenders.is_empty() {
        Ok(())
    } else {
        Err(Error::NotAcyclic { offenders })
    }
}

/// Runs one check. `Err` means the input cannot support the check (exit status 2).
pub fn run_check(
    file: &ScenarioFile,
    kind: CheckKind,
    tolerance: Option<f64>,
    truncation: Option<u32>,
) -> Result<CheckReport> {
    let tol = &file.tolerances;
    let n_max = truncation.unwrap_or(file.truncation);
    if n_max == 0 {
        return Err(Error::Precondition("truncation N must be positive".into()));
    }
    match kind {
        CheckKind::Fried => {
            let spec = file.require_spectrum()?;
            require_acyclic(spec)?;
            let mut report = CheckReport::new(kind, tolerance.unwrap_or(tol.fried));
            let t0 = torsion_at_zero(spec)?;
            report.lines.push(format!("T(0) = {t0}, T(0)^2 = {}", t0 * t0));
            let abscissa = convergence_abscissa(file);
            let mut sigmas: Vec<Complex64> = file
                .sweep
                .as_ref()
                .map(|g| g.points().into_iter().filter(|s| s.re > abscissa).collect())
                .unwrap_or_default();
            if sigmas.is_empty() {
                sigmas = DEFAULT_FRIED_SIGMAS.iter().map(|&s| Complex64::new(s, 0.0)).collect();
            }
            for sigma in sigmas {
                let r = ruelle_closed_form(spec, sigma)?;
                let residual = fried_residual(spec, sigma)?.norm() / r.norm();
                report.record(format!("sigma = {sigma}: R = {r}, relative"), residual);
            }
            Ok(report)
        }
        CheckKind::AtiyahBott => {
            let spec = file.require_spectrum()?;
            let scenario = &file.require_dynamics()?.scenario;
            if !scenario.is_compact_type() {
                return Err(Error::WrongKind {
                    kind: scenario.kind_name(),
                    operation: "atiyah-bott check",
                });
            }
            let mut report = CheckReport::new(kind, tolerance.unwrap_or(tol.atiyah_bott));
            let n_max = n_max as i64;
            for n in (-n_max..=n_max).filter(|&n| n != 0) {
                let residual = atiyah_bott_residual(scenario, spec, n)?;
                let spectral = lefschetz_number(spec, -n);
                let ok = residual.norm() <= report.tolerance;
                report.passed &= ok;
                report.residual = report.residual.max(residual.norm());
                if !ok || n.abs() <= 3 {
                    report.lines.push(format!(
                        "n = {n}: fixed points {}, L(-n) = {spectral}, residual {:.3e} {}",
                        residual + spectral,
                        residual.norm(),
                        if ok { "ok" } else { "FAIL" }
                    ));
                }
            }
            report
                .lines
                .push(format!("max residual over 0 < |n| <= {n_max}: {:.3e}", report.residual));
            Ok(report)
        }
        CheckKind::Cutoff => {
            let dynamics = file.require_dynamics()?;
            let mut report = CheckReport::new(kind, tolerance.unwrap_or(tol.cutoff));
            if let Ok(defect) = cutoff_property_defect(&dynamics.scenario, &dynamics.cutoffs) {
                report.lines.push(format!("cutoff property defect {defect:.3e}"));
            }
            let residual = cutoff_compatibility_residual(&dynamics.scenario, &dynamics.cutoffs)?;
            report.record("compatibility".into(), residual);
            Ok(report)
        }
        CheckKind::Abel => {
            let spec = file.require_spectrum()?;
            require_acyclic(spec)?;
            let mut report = CheckReport::new(kind, tolerance.unwrap_or(tol.abel));
            let t0 = torsion_at_zero(spec)?;
            let target = t0 * t0;
            let d3 = (ruelle_closed_form(spec, Complex64::new(1e-3, 0.0))? - target).norm();
            let d4 = (ruelle_closed_form(spec, Complex64::new(1e-4, 0.0))? - target).norm();
            report.lines.push(format!("|R(1e-3) - T(0)^2| = {d3:.3e}"));
            report.record("|R(1e-4) - T(0)^2|".into(), d4);
            if !(d4 < d3) {
                report.passed = false;
                report.lines.push("defect did not decrease from sigma = 1e-3 to 1e-4 FAIL".into());
            }
            Ok(report)
        }
        CheckKind::Mellin => {
            let mut report = CheckReport::new(kind, tolerance.unwrap_or(tol.mellin));
            let config = MellinConfig::default();
            for n in MELLIN_GRID.0 {
                for sigma in MELLIN_GRID.1 {
                    let expected = circle_factor_torsion(n, Complex64::new(sigma, 0.0))?.re;
                    match mellin_torsion(&HeatTraceModel::line(n)?, sigma, &config) {
                        Ok(value) => report.record(
                            format!("n = {n}, sigma = {sigma}: mellin {value:.10}, closed form {expected:.10}"),
                            (value - expected).abs(),
                        ),
                        Err(e @ Error::Accuracy { .. }) => {
                            report.passed = false;
                            report.lines.push(format!("n = {n}, sigma = {sigma}: {e} FAIL"));
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok(report)
        }
    }
}

/// Outcome of the randomized Fried suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub spectra: usize,
    pub evaluations: usize,
    /// Largest `|fried_residual| / |R|`.
    pub worst_relative: f64,
    pub failures: Vec<String>,
}

/// Sigma values of the randomized Fried suite: `{0.5, 1, 2} x {0, +-0.3i}`.
pub fn suite_sigmas() -> Vec<Complex64> {
    let mut out = Vec::new();
    for re in [0.5, 1.0, 2.0] {
        for im in [0.0, 0.3, -0.3] {
            out.push(Complex64::new(re, im));
        }
    }
    out
}

/// `count` random acyclic spectra from `seed`.
pub fn seeded_spectra(seed: u64, count: usize) -> Vec<GradedSpectrum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = RandomSpectrumShape::default();
    (0..count).map(|_| random_acyclic_spectrum(&mut rng, &shape)).collect()
}

pub fn fried_suite(seed: u64, count: usize, tolerance: f64) -> SuiteReport {
    let spectra = seeded_spectra(seed, count);
    let sigmas = suite_sigmas();
    let mut report = SuiteReport {
        seed,
        spectra: count,
        evaluations: 0,
        worst_relative: 0.0,
        failures: Vec::new(),
    };
    for (i, spec) in spectra.iter().enumerate() {
        for &sigma in &sigmas {
            report.evaluations += 1;
            let outcome = ruelle_closed_form(spec, sigma)
                .and_then(|r| Ok(fried_residual(spec, sigma)?.norm() / r.norm()));
            match outcome {
                Ok(rel) => {
                    report.worst_relative = report.worst_relative.max(rel);
                    if !(rel <= tolerance) {
                        report.failures.push(format!("spectrum {i}, sigma = {sigma}: relative residual {rel:.3e}"));
                    }
                }
                Err(e) => report.failures.push(format!("spectrum {i}, sigma = {sigma}: {e}")),
            }
        }
    }
    report
}
