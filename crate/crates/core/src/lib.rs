//! Equivariant Ruelle zeta functions and equivariant analytic torsion for
//! suspension flows, computed from cohomology spectra and from fixed-point
//! data, together with the identities relating them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod heat_mellin;
pub mod report;
pub mod scalar;
pub mod scenario_file;
pub mod spectra;
pub mod torsion;
pub mod zeta_spectral;

pub use error::{Error, Result};
pub use scalar::{ComplexScalar, Mp};
pub use scenario_file::{parse_scenario, ScenarioFile};
pub use spectra::{EigenPair, GradedSpectrum, OperatorSide};
pub use zeta_spectral::{Truncation, ZetaValue};
