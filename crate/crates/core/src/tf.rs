//! Reduced Thomas-Fermi model: energy, Euler-Lagrange density, Fermi level
//! by dichotomy and the self-consistent iteration with line-search mixing.

use serde::{Deserialize, Serialize};

use crate::analysis::{sommerfeld_constants, tf_constant};
use crate::energy::EnergyBreakdown;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::hartree::{hartree_energy, potential, MeanFieldPotential, NeutralResidual};
use crate::linesearch::golden_section;

/// Bracket doublings allowed before [`tf_fermi_level`] gives up.
pub const MAX_BRACKET_DOUBLINGS: usize = 200;

/// Solver settings. `energy_tol` is relative to `1 + |E|`; `density_tol`,
/// `dichotomy_tol` and `neutrality_tol` are relative to the charge `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TfSettings {
    pub c_tf: f64,
    pub max_iter: usize,
    pub energy_tol: f64,
    pub density_tol: f64,
    pub dichotomy_tol: f64,
    pub neutrality_tol: f64,
    pub linesearch_evals: usize,
}

impl Default for TfSettings {
    fn default() -> Self {
        Self {
            c_tf: tf_constant(3),
            max_iter: 500,
            energy_tol: 1e-10,
            density_tol: 1e-8,
            dichotomy_tol: 1e-10,
            neutrality_tol: 1e-8,
            linesearch_evals: 20,
        }
    }
}

impl TfSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.c_tf,
            self.energy_tol,
            self.density_tol,
            self.dichotomy_tol,
            self.neutrality_tol,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidSettings(
                "c_tf and all tolerances must be positive".into(),
            ));
        }
        if self.max_iter == 0 || self.linesearch_evals < 2 {
            return Err(Error::InvalidSettings(
                "max_iter must be positive and linesearch_evals at least 2".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfIteration {
    pub energy: f64,
    pub fermi_level: f64,
    pub density_change: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct TfSolution {
    pub rho: GridFunction,
    pub phi: MeanFieldPotential,
    pub fermi_level: f64,
    pub energy: EnergyBreakdown,
    pub history: Vec<TfIteration>,
    pub converged: bool,
    /// `max |(5/3) c ρ^{2/3} - (λ - Φ)_+|` at the returned state.
    pub el_residual: f64,
}

/// `ρ = ((3 / 5c) (λ - Φ)_+)^{3/2}`.
pub fn tf_density_from_potential(phi: &MeanFieldPotential, lambda: f64, c_tf: f64) -> GridFunction {
    let k = 3.0 / (5.0 * c_tf);
    phi.phi.map(|p| (k * (lambda - p).max(0.0)).powf(1.5))
}

/// Fermi level such that `|∫ρ(λ) - Z| <= tol`, found by bracketing and
/// bisection on the nondecreasing map `λ ↦ ∫ρ(λ)`.
pub fn tf_fermi_level(phi: &MeanFieldPotential, z: f64, c_tf: f64, tol: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::InvalidSettings(format!(
            "charge must be positive, got {z}"
        )));
    }
    let charge = |lambda: f64| tf_density_from_potential(phi, lambda, c_tf).integrate();
    let lo0 = phi.phi.min();
    let width = 2.0 * phi.grid().half_width();
    let mut step = (5.0 * c_tf / 3.0) * (z / width).powf(2.0 / 3.0);
    if !(step > 0.0) || !step.is_finite() {
        step = 1.0;
    }
    let mut lo = lo0;
    let mut hi = lo0 + step;
    let mut doublings = 0;
    while charge(hi) < z {
        lo = hi;
        step *= 2.0;
        hi = lo0 + step;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(Error::BracketFailure(MAX_BRACKET_DOUBLINGS));
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let q = charge(mid);
        if (q - z).abs() <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if q < z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `c ∫ρ^{5/3} + ½ D1(ρ - μ)`.
pub fn tf_energy(rho: &GridFunction, mu: &GridFunction, c_tf: f64) -> Result<EnergyBreakdown> {
    let tol = DEFAULT_NEUTRALITY_SCALE * mu.integrate().abs().max(rho.integrate().abs()).max(1.0);
    tf_energy_with_tol(rho, mu, c_tf, tol)
}

const DEFAULT_NEUTRALITY_SCALE: f64 = crate::hartree::DEFAULT_NEUTRALITY_RTOL;

pub fn tf_energy_with_tol(
    rho: &GridFunction,
    mu: &GridFunction,
    c_tf: f64,
    tol: f64,
) -> Result<EnergyBreakdown> {
    let res = NeutralResidual::from_difference(rho, mu, tol)?;
    let kinetic = c_tf * rho.map(|r| r.max(0.0).powf(5.0 / 3.0)).integrate();
    Ok(EnergyBreakdown::new(
        kinetic,
        0.0,
        0.5 * hartree_energy(&res),
    ))
}

/// `μ * ½e^{-|x|}` on the grid, rescaled to the charge of `μ`.
pub fn initial_density(mu: &GridFunction) -> GridFunction {
    let grid = mu.grid();
    let n = grid.len();
    let decay = (-grid.spacing()).exp();
    let mass: Vec<f64> = (0..n).map(|i| grid.weight(i) * mu.at(i)).collect();
    let mut left = vec![0.0; n];
    let mut acc = 0.0;
    for i in 0..n {
        acc = acc * decay + mass[i];
        left[i] = acc;
    }
    let mut out = vec![0.0; n];
    acc = 0.0;
    for i in (0..n).rev() {
        out[i] = 0.5 * (left[i] + acc * decay);
        acc = acc * decay + mass[i];
    }
    let rho = GridFunction::new(*grid, out);
    let z = mu.integrate();
    let m = rho.integrate();
    if m > 0.0 {
        rho.scale(z / m)
    } else {
        rho
    }
}

/// Thomas-Fermi self-consistent iteration. The returned solution carries the
/// best iterate even when `converged` is false.
pub fn tf_scf(mu: &GridFunction, settings: &TfSettings) -> Result<TfSolution> {
    settings.validate()?;
    let z = mu.integrate();
    if !(z > 0.0) {
        return Err(Error::InvalidProfile(format!(
            "total charge must be positive, got {z}"
        )));
    }
    let c = settings.c_tf;
    let ntol = settings.neutrality_tol * z;
    let ftol = settings.dichotomy_tol * z;

    let mut rho = initial_density(mu);
    let mut energy = tf_energy_with_tol(&rho, mu, c, ntol)?;
    let mut history = Vec::new();
    let mut converged = false;

    for _ in 0..settings.max_iter {
        let phi = potential(&NeutralResidual::from_difference(&rho, mu, ntol)?);
        let lambda = tf_fermi_level(&phi, z, c, ftol)?;
        // exact mass, so that energies along the segment are compared at the
        // same charge
        let candidate = tf_density_from_potential(&phi, lambda, c);
        let candidate = candidate.scale(z / candidate.integrate());

        let energy_at = |t: f64| -> f64 {
            let trial = candidate.combine(t, &rho, 1.0 - t);
            tf_energy_with_tol(&trial, mu, c, ntol)
                .map(|e| e.total)
                .unwrap_or(f64::INFINITY)
        };
        let e_full = energy_at(1.0);
        let (mut t, mut e_t) = golden_section(energy_at, 0.0, 1.0, settings.linesearch_evals - 1);
        if e_full <= e_t {
            t = 1.0;
            e_t = e_full;
        }
        if e_t > energy.total {
            t = 0.0;
        }

        let next = candidate.combine(t, &rho, 1.0 - t);
        let change = next.sub(&rho).l1_norm();
        let next_energy = tf_energy_with_tol(&next, mu, c, ntol)?;
        let de = (next_energy.total - energy.total).abs();
        history.push(TfIteration {
            energy: next_energy.total,
            fermi_level: lambda,
            density_change: change,
            step: t,
        });
        rho = next;
        energy = next_energy;
        if de < settings.energy_tol * (1.0 + energy.total.abs())
            && change < settings.density_tol * z
        {
            converged = true;
            break;
        }
    }

    let phi = potential(&NeutralResidual::from_difference(&rho, mu, ntol)?);
    let fermi_level = tf_fermi_level(&phi, z, c, ftol)?;
    let el_residual = tf_el_residual(&rho, &phi, fermi_level, c);
    Ok(TfSolution {
        rho,
        phi,
        fermi_level,
        energy,
        history,
        converged,
        el_residual,
    })
}

/// `max_i |(5/3) c ρ_i^{2/3} - (λ - Φ_i)_+|`.
pub fn tf_el_residual(rho: &GridFunction, phi: &MeanFieldPotential, lambda: f64, c_tf: f64) -> f64 {
    rho.values()
        .iter()
        .zip(phi.phi.values())
        .map(|(r, p)| (5.0 / 3.0 * c_tf * r.max(0.0).powf(2.0 / 3.0) - (lambda - p).max(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Closed-form density for `μ = Z δ_0`: `c₂ (|x| + α)^{-6}` with
/// `α = (2c₂ / 5Z)^{1/5}`.
pub fn dirac_closed_form(z: f64, grid: &Grid, c_tf: f64) -> GridFunction {
    let (_, c2) = sommerfeld_constants(c_tf);
    let alpha = dirac_offset(z, c_tf);
    grid.sample(|x| c2 * (x.abs() + alpha).powi(-6))
}

/// `α = (2c₂ / 5Z)^{1/5}`.
pub fn dirac_offset(z: f64, c_tf: f64) -> f64 {
    let (_, c2) = sommerfeld_constants(c_tf);
    (2.0 * c2 / (5.0 * z)).powf(0.2)
}
