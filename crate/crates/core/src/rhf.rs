//! Reduced Hartree-Fock model on the line.
//!
//! The state `G ≥ 0` is kept as a weighted set of orthonormal orbitals,
//! `G = Σ g_j |φ_j⟩⟨φ_j|`. Orbitals are orthonormal under the grid product
//! `h Σ u_i v_i`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::analysis::{lieb_thirring_check, LiebThirringCheck};
use crate::energy::EnergyBreakdown;
use crate::error::{Error, Result};
use crate::grid::{kinetic_energy_values, Grid, GridFunction};
use crate::hartree::{
    hartree_energy, hartree_pairing, potential, MeanFieldPotential, NeutralResidual,
};
use crate::tf::initial_density;
use crate::tridiag::SymTridiagonal;

/// Weights at or below this are dropped from a [`ReducedState`].
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Orbital components orthogonal to the already-kept span are dropped below
/// this norm when re-diagonalizing a mixture.
const SPAN_DROP: f64 = 1e-10;

/// Initial eigenvalue cutoff above the previous Fermi level.
const FERMI_MARGIN: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct ReducedState {
    grid: Grid,
    weights: Vec<f64>,
    orbitals: Vec<Vec<f64>>,
}

impl ReducedState {
    pub fn empty(grid: Grid) -> Self {
        Self {
            grid,
            weights: Vec::new(),
            orbitals: Vec::new(),
        }
    }

    /// Builds a state from weighted orbitals. Orbitals must already be
    /// orthonormal; weights at or below [`PRUNE_THRESHOLD`] are dropped and
    /// the rest sorted in descending order.
    pub fn from_parts(grid: Grid, weights: Vec<f64>, orbitals: Vec<Vec<f64>>) -> Self {
        assert_eq!(weights.len(), orbitals.len());
        let mut pairs: Vec<(f64, Vec<f64>)> = weights
            .into_iter()
            .zip(orbitals)
            .filter(|(w, _)| *w > PRUNE_THRESHOLD)
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (weights, orbitals) = pairs.into_iter().unzip();
        Self {
            grid,
            weights,
            orbitals,
        }
    }

    /// Rank-one state `Z |√(ρ/Z)⟩⟨√(ρ/Z)|` carrying density `ρ`, with `Z = ∫ρ`.
    /// The orbital is set to zero on the two end nodes so that its grid norm
    /// and the trapezoidal charge of its density agree.
    pub fn rank_one(rho: &GridFunction) -> Self {
        let grid = *rho.grid();
        let mut phi: Vec<f64> = rho.values().iter().map(|r| r.max(0.0).sqrt()).collect();
        let n = phi.len();
        phi[0] = 0.0;
        phi[n - 1] = 0.0;
        let norm = grid.norm(&phi);
        phi.iter_mut().for_each(|v| *v /= norm);
        Self::from_parts(grid, vec![rho.integrate()], vec![phi])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn orbitals(&self) -> &[Vec<f64>] {
        &self.orbitals
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn trace(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn trace_square(&self) -> f64 {
        self.weights.iter().map(|g| g * g).sum()
    }

    /// `½ Tr(-ΔG)`.
    pub fn kinetic(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.orbitals)
            .map(|(g, phi)| g * kinetic_energy_values(&self.grid, phi))
            .sum()
    }

    pub fn density(&self) -> GridFunction {
        density_of(self)
    }

    /// `Tr(G H)` for another state `H`: `Σ g_i h_j ⟨φ_i, ψ_j⟩²`.
    pub fn trace_product(&self, other: &ReducedState) -> f64 {
        let mut s = 0.0;
        for (g, u) in self.weights.iter().zip(&self.orbitals) {
            for (h, v) in other.weights.iter().zip(&other.orbitals) {
                let o = self.grid.dot(u, v);
                s += g * h * o * o;
            }
        }
        s
    }

    /// Largest `|⟨φ_i, φ_j⟩ - δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for i in 0..self.rank() {
            for j in 0..=i {
                let d = self.grid.dot(&self.orbitals[i], &self.orbitals[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((d - target).abs());
            }
        }
        err
    }
}

pub fn density_of(state: &ReducedState) -> GridFunction {
    let mut rho = vec![0.0; state.grid.len()];
    for (g, phi) in state.weights.iter().zip(&state.orbitals) {
        rho.iter_mut().zip(phi).for_each(|(r, p)| *r += g * p * p);
    }
    GridFunction::new(state.grid, rho)
}

/// `-½Δ + Φ` as a symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    grid: Grid,
    matrix: SymTridiagonal,
}

impl Hamiltonian {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.matrix.diag
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.matrix.off
    }

    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        self.matrix.matvec(phi)
    }

    pub fn eigenvalues_below(&self, cutoff: f64) -> Vec<f64> {
        self.matrix.eigenvalues_below(cutoff)
    }

    pub fn lowest_eigenvalue(&self) -> f64 {
        let (lo, hi) = self.matrix.gershgorin();
        self.matrix.kth_eigenvalue_in(0, lo, hi)
    }
}

pub fn assemble_hamiltonian(phi: &MeanFieldPotential) -> Hamiltonian {
    let grid = *phi.grid();
    let h2 = grid.spacing().powi(2);
    let diag = phi.phi.values().iter().map(|p| 1.0 / h2 + p).collect();
    let off = vec![-0.5 / h2; grid.len() - 1];
    Hamiltonian {
        grid,
        matrix: SymTridiagonal::new(diag, off),
    }
}

/// Eigenpairs with eigenvalue below `cutoff`, ascending, with orbitals
/// normalized under the grid product.
pub fn lowest_eigenpairs(h: &Hamiltonian, cutoff: f64) -> Vec<(f64, GridFunction)> {
    eigenpairs_of(h, h.eigenvalues_below(cutoff))
}

fn eigenpairs_of(h: &Hamiltonian, values: Vec<f64>) -> Vec<(f64, GridFunction)> {
    let scale = 1.0 / h.grid.spacing().sqrt();
    h.matrix
        .eigenvectors_for(values)
        .into_iter()
        .map(|(ev, v)| {
            (
                ev,
                GridFunction::new(h.grid, v.into_iter().map(|x| x * scale).collect()),
            )
        })
        .collect()
}

/// Solves `Σ_j (λ - ε_j)_+ / 2π = Z` exactly. `eigenvalues` must be sorted
/// ascending and contain every eigenvalue below `complete_below`.
pub fn rhf_fermi_level(eigenvalues: &[f64], z: f64, complete_below: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::InvalidSettings(format!(
            "charge must be positive, got {z}"
        )));
    }
    let mut partial = 0.0;
    for (k, &eps) in eigenvalues.iter().enumerate() {
        partial += eps;
        let lambda = (2.0 * PI * z + partial) / (k + 1) as f64;
        let next = eigenvalues.get(k + 1).copied().unwrap_or(complete_below);
        if lambda <= next {
            return Ok(lambda);
        }
    }
    Err(Error::InsufficientSpectrum {
        cutoff: complete_below,
        charge: z,
    })
}

/// `(λ - H)_+ / 2π` from the eigenpairs of `h` below `λ`.
pub fn reduced_state(h: &Hamiltonian, lambda: f64) -> ReducedState {
    let pairs = lowest_eigenpairs(h, lambda);
    state_from_pairs(h.grid, &pairs, lambda)
}

fn state_from_pairs(grid: Grid, pairs: &[(f64, GridFunction)], lambda: f64) -> ReducedState {
    let (weights, orbitals) = pairs
        .iter()
        .filter(|(ev, _)| *ev < lambda)
        .map(|(ev, phi)| ((lambda - ev) / (2.0 * PI), phi.values().to_vec()))
        .unzip();
    ReducedState::from_parts(grid, weights, orbitals)
}

/// `½Tr(-ΔG) + πTr(G²) + ½D1(ρ_G - μ)`, with the neutrality tolerance
/// relative to `∫μ`.
pub fn rhf_energy(state: &ReducedState, mu: &GridFunction) -> Result<EnergyBreakdown> {
    let tol = crate::hartree::DEFAULT_NEUTRALITY_RTOL * mu.integrate().abs().max(1.0);
    rhf_energy_with_tol(state, mu, tol)
}

/// Neutral residual `ρ_G - μ`. The charge constraint is checked on
/// `Tr G`; the trapezoidal charge of `ρ_G` also differs from `Tr G` by the
/// end-node terms, which are absorbed by the projection.
fn residual(state: &ReducedState, mu: &GridFunction, tol: f64) -> Result<NeutralResidual> {
    let defect = state.trace() - mu.integrate();
    if !(defect.abs() <= tol) {
        return Err(Error::NotNeutral { defect, tol });
    }
    NeutralResidual::from_difference_unchecked(&state.density(), mu)
}

pub fn rhf_energy_with_tol(
    state: &ReducedState,
    mu: &GridFunction,
    tol: f64,
) -> Result<EnergyBreakdown> {
    let res = residual(state, mu, tol)?;
    Ok(EnergyBreakdown::new(
        state.kinetic(),
        PI * state.trace_square(),
        0.5 * hartree_energy(&res),
    ))
}

/// `t G_b + (1 - t) G_a`, re-diagonalized in the span of both orbital sets.
pub fn mix(a: &ReducedState, b: &ReducedState, t: f64) -> Result<ReducedState> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let grid = a.grid;
    let mut coeffs = Vec::new();
    let mut vectors: Vec<&Vec<f64>> = Vec::new();
    for (g, u) in a.weights.iter().zip(&a.orbitals) {
        if (1.0 - t) * g > 0.0 {
            coeffs.push((1.0 - t) * g);
            vectors.push(u);
        }
    }
    for (g, u) in b.weights.iter().zip(&b.orbitals) {
        if t * g > 0.0 {
            coeffs.push(t * g);
            vectors.push(u);
        }
    }
    let m = vectors.len();
    if m == 0 {
        return Ok(ReducedState::empty(grid));
    }

    // Gram-Schmidt with one re-orthogonalization pass: U = Q R.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut r_cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    for u in &vectors {
        let mut w = (*u).clone();
        let mut coef = vec![0.0; basis.len()];
        for _ in 0..2 {
            for (k, q) in basis.iter().enumerate() {
                let c = grid.dot(q, &w);
                coef[k] += c;
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = grid.norm(&w);
        if norm > SPAN_DROP {
            w.iter_mut().for_each(|x| *x /= norm);
            basis.push(w);
            coef.push(norm);
        }
        r_cols.push(coef);
    }
    let k = basis.len();
    let mut r = DMatrix::<f64>::zeros(k, m);
    for (j, col) in r_cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            r[(i, j)] = *v;
        }
    }
    let c = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(coeffs));
    let mut small = &r * c * r.transpose();
    small = 0.5 * (&small + small.transpose());
    let eig = SymmetricEigen::new(small);

    let n = grid.len();
    let mut weights = Vec::with_capacity(k);
    let mut orbitals = Vec::with_capacity(k);
    for col in 0..k {
        let w = eig.eigenvalues[col];
        if w <= PRUNE_THRESHOLD {
            continue;
        }
        let mut phi = vec![0.0; n];
        for (i, q) in basis.iter().enumerate() {
            let y = eig.eigenvectors[(i, col)];
            phi.iter_mut().zip(q).for_each(|(p, v)| *p += y * v);
        }
        weights.push(w);
        orbitals.push(phi);
    }
    Ok(ReducedState::from_parts(grid, weights, orbitals))
}

/// Quadratic model `E(t) = E(0) + βt + qt²` of the energy along the segment
/// from `current` to `candidate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingQuadratic {
    pub e0: f64,
    pub beta: f64,
    pub q: f64,
}

impl MixingQuadratic {
    pub fn at(&self, t: f64) -> f64 {
        self.e0 + self.beta * t + self.q * t * t
    }

    pub fn argmin(&self) -> f64 {
        if self.q > 0.0 {
            (-self.beta / (2.0 * self.q)).clamp(0.0, 1.0)
        } else if self.beta < 0.0 {
            1.0
        } else {
            0.0
        }
    }
}

pub fn mixing_quadratic(
    current: &ReducedState,
    candidate: &ReducedState,
    mu: &GridFunction,
    tol: f64,
) -> Result<MixingQuadratic> {
    if current.grid != candidate.grid {
        return Err(Error::GridMismatch);
    }
    let fa = residual(current, mu, tol)?;
    let fb = residual(candidate, mu, tol)?;
    let delta = fb.f().sub(fa.f());

    let (ka, kb) = (current.kinetic(), candidate.kinetic());
    let taa = current.trace_square();
    let tbb = candidate.trace_square();
    let tab = current.trace_product(candidate);
    let d_aa = hartree_energy(&fa);

    let e0 = ka + PI * taa + 0.5 * d_aa;
    let beta = (kb - ka) + 2.0 * PI * (tab - taa) + hartree_pairing(fa.f(), &delta);
    let q = PI * (taa - 2.0 * tab + tbb) + 0.5 * hartree_pairing(&delta, &delta);
    Ok(MixingQuadratic {
        e0,
        beta,
        q: q.max(0.0),
    })
}

/// Exact minimizer over `[0, 1]` of the quadratic energy along the segment.
pub fn optimal_mixing_t(
    current: &ReducedState,
    candidate: &ReducedState,
    mu: &GridFunction,
) -> Result<f64> {
    let tol = crate::hartree::DEFAULT_NEUTRALITY_RTOL * mu.integrate().abs().max(1.0);
    Ok(mixing_quadratic(current, candidate, mu, tol)?.argmin())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RhfSettings {
    pub max_iter: usize,
    /// Relative to `1 + |E|`.
    pub energy_tol: f64,
    /// L¹ density change, relative to `Z`.
    pub density_tol: f64,
    /// Relative to `Z`.
    pub neutrality_tol: f64,
}

impl Default for RhfSettings {
    fn default() -> Self {
        Self {
            max_iter: 500,
            energy_tol: 1e-10,
            density_tol: 1e-8,
            neutrality_tol: 1e-8,
        }
    }
}

impl RhfSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0
            || !(self.energy_tol > 0.0)
            || !(self.density_tol > 0.0)
            || !(self.neutrality_tol > 0.0)
        {
            return Err(Error::InvalidSettings(
                "max_iter and all tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhfIteration {
    pub energy: f64,
    pub fermi_level: f64,
    pub density_change: f64,
    pub step: f64,
    pub rank: usize,
    pub lieb_thirring: LiebThirringCheck,
}

#[derive(Debug, Clone)]
pub struct RhfSolution {
    pub state: ReducedState,
    pub phi: MeanFieldPotential,
    pub fermi_level: f64,
    /// Eigenvalues of the final mean-field Hamiltonian below the Fermi level.
    pub orbital_energies: Vec<f64>,
    pub energy: EnergyBreakdown,
    pub history: Vec<RhfIteration>,
    pub converged: bool,
    /// `max_j |2π g_j - (λ - ε_j)_+|`, weights descending against
    /// eigenvalues ascending.
    pub el_residual: f64,
    /// `λ - max ε_j` over occupied levels.
    pub fermi_gap: f64,
}

/// Spectrum below the Fermi level of `h` and the Fermi level, raising the
/// eigenvalue cutoff until the spectrum is complete.
fn occupied_spectrum(h: &Hamiltonian, z: f64, guess: Option<f64>) -> Result<(Vec<f64>, f64)> {
    let e0 = h.lowest_eigenvalue();
    // a single level already gives λ = ε₀ + 2πZ, so this bound is always enough
    let ceiling = e0 + 2.0 * PI * z;
    let mut cutoff = guess.map_or(ceiling, |g| g.min(ceiling).max(e0));
    loop {
        let values = h.eigenvalues_below(cutoff);
        match rhf_fermi_level(&values, z, cutoff) {
            Ok(lambda) => return Ok((values, lambda)),
            Err(Error::InsufficientSpectrum { .. }) if cutoff < ceiling => {
                cutoff = (cutoff + (cutoff - e0).max(1.0)).min(ceiling);
            }
            Err(e) => return Err(e),
        }
    }
}

fn el_residual(state: &ReducedState, eigenvalues: &[f64], lambda: f64) -> f64 {
    let len = state.rank().max(eigenvalues.len());
    (0..len)
        .map(|j| {
            let g = state.weights.get(j).copied().unwrap_or(0.0);
            let target = eigenvalues.get(j).map_or(0.0, |e| (lambda - e).max(0.0));
            (2.0 * PI * g - target).abs()
        })
        .fold(0.0, f64::max)
}

/// Reduced Hartree-Fock self-consistent iteration with exact quadratic line
/// search. The returned solution carries the last iterate even when
/// `converged` is false.
pub fn rhf_scf(mu: &GridFunction, settings: &RhfSettings) -> Result<RhfSolution> {
    settings.validate()?;
    let z = mu.integrate();
    if !(z > 0.0) {
        return Err(Error::InvalidProfile(format!(
            "total charge must be positive, got {z}"
        )));
    }
    let tol = settings.neutrality_tol * z;

    let mut state = ReducedState::rank_one(&initial_density(mu));
    let mut energy = rhf_energy_with_tol(&state, mu, tol)?;
    let mut history = Vec::new();
    let mut converged = false;
    let mut lambda_prev: Option<f64> = None;

    for _ in 0..settings.max_iter {
        let rho = state.density();
        let phi = potential(&residual(&state, mu, tol)?);
        let h = assemble_hamiltonian(&phi);
        let (values, lambda) = occupied_spectrum(&h, z, lambda_prev.map(|l| l + FERMI_MARGIN))?;
        lambda_prev = Some(lambda);
        let occupied = values.into_iter().filter(|e| *e < lambda).collect();
        let candidate = state_from_pairs(h.grid, &eigenpairs_of(&h, occupied), lambda);

        let quad = mixing_quadratic(&state, &candidate, mu, tol)?;
        let t = quad.argmin();
        let next = mix(&state, &candidate, t)?;
        let next_energy = rhf_energy_with_tol(&next, mu, tol)?;
        let change = next.density().sub(&rho).l1_norm();
        let de = (next_energy.total - energy.total).abs();
        history.push(RhfIteration {
            energy: next_energy.total,
            fermi_level: lambda,
            density_change: change,
            step: t,
            rank: next.rank(),
            lieb_thirring: lieb_thirring_check(&next),
        });
        state = next;
        energy = next_energy;
        if de < settings.energy_tol * (1.0 + energy.total.abs())
            && change < settings.density_tol * z
        {
            converged = true;
            break;
        }
    }

    let phi = potential(&residual(&state, mu, tol)?);
    let h = assemble_hamiltonian(&phi);
    let (values, fermi_level) = occupied_spectrum(&h, z, lambda_prev.map(|l| l + FERMI_MARGIN))?;
    let orbital_energies: Vec<f64> = values.into_iter().filter(|e| *e < fermi_level).collect();
    let el_residual = el_residual(&state, &orbital_energies, fermi_level);
    let fermi_gap = orbital_energies
        .last()
        .map_or(f64::NAN, |e| fermi_level - e);
    Ok(RhfSolution {
        state,
        phi,
        fermi_level,
        orbital_energies,
        energy,
        history,
        converged,
        el_residual,
        fermi_gap,
    })
}
