//! Shared fixtures for the criterion benchmarks in `benches/`.

use slabdft::hartree::{potential, NeutralResidual};
use slabdft::rhf::{assemble_hamiltonian, Hamiltonian};
use slabdft::sources::evaluate;
use slabdft::tf::initial_density;
use slabdft::{make_grid, ChargeProfile, GridFunction, MeanFieldPotential};

/// `μ₁` sampled on `[-a, a]` with `n` nodes.
pub fn slab(a: f64, n: usize) -> GridFunction {
    evaluate(
        &ChargeProfile::case1(),
        &make_grid(a, n).expect("valid grid"),
    )
}

/// Neutral residual of the initial guess against `μ`.
pub fn initial_residual(mu: &GridFunction) -> NeutralResidual {
    NeutralResidual::from_difference(&initial_density(mu), mu, 1e-8 * mu.integrate())
        .expect("initial guess carries the charge of mu")
}

/// Mean-field Hamiltonian at the initial guess, the first operator the
/// rHF iteration diagonalizes.
pub fn initial_hamiltonian(mu: &GridFunction) -> (Hamiltonian, MeanFieldPotential) {
    let phi = potential(&initial_residual(mu));
    (assemble_hamiltonian(&phi), phi)
}
