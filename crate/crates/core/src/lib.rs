//! Reduced one-dimensional Thomas-Fermi and reduced Hartree-Fock models for a
//! homogeneous charged slab.
//!
//! The slab charge `μ(x)` lives on the transverse line. Both models are
//! solved on a uniform grid over `[-a, a]` by damped self-consistent
//! iterations; [`analysis`] holds the screening, Sommerfeld and
//! Lieb-Thirring diagnostics.

// `!(x > 0.0)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod energy;
pub mod error;
pub mod grid;
pub mod hartree;
pub mod linesearch;
pub mod rhf;
pub mod sources;
pub mod tf;
pub mod tridiag;

pub use analysis::{
    compare, fit_tail, lieb_thirring_check, screening_defect, sommerfeld_constants, tf_constant,
    ComparisonReport, LiebThirringCheck, Side, SommerfeldFit,
};
pub use energy::EnergyBreakdown;
pub use error::{Error, Result};
pub use grid::{make_grid, Grid, GridFunction};
pub use hartree::{MeanFieldPotential, NeutralResidual};
pub use rhf::{rhf_scf, ReducedState, RhfSettings, RhfSolution};
pub use sources::{ChargeComponent, ChargeProfile};
pub use tf::{tf_scf, TfSettings, TfSolution};
