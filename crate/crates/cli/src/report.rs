//! Serializable summary written to `results.json`.

use serde::Serialize;

use slabdft::analysis::{
    box_potential_limits, default_tail_window, potential_limits, sommerfeld_constants,
};
use slabdft::rhf::RhfIteration;
use slabdft::tf::TfIteration;
use slabdft::{
    fit_tail, lieb_thirring_check, screening_defect, ChargeComponent, ComparisonReport,
    EnergyBreakdown, GridFunction, LiebThirringCheck, RhfSolution, Side, SommerfeldFit, TfSolution,
};

use crate::config::{AnalysisConfig, RunConfig};

/// Neutrality tolerance for post-processing, relative to `Z`. Looser than the
/// solvers' because the orbital density and `Tr G` differ by end-node terms.
const DIAGNOSTIC_RTOL: f64 = 1e-6;

#[derive(Debug, Serialize)]
pub struct Results {
    pub model: String,
    pub grid: GridSummary,
    pub profile: ProfileSummary,
    pub tf: Option<TfSummary>,
    pub rhf: Option<RhfSummary>,
    pub comparison: Option<ComparisonReport>,
    pub checks: Checks,
    pub unconverged: bool,
}

#[derive(Debug, Serialize)]
pub struct GridSummary {
    pub a: f64,
    pub n: usize,
    pub h: f64,
}

#[derive(Debug, Serialize)]
pub struct ProfileSummary {
    pub name: String,
    pub total_charge: f64,
    pub support: (f64, f64),
    pub components: Vec<ChargeComponent>,
}

#[derive(Debug, Serialize)]
pub struct Limits {
    /// Half-line moments `∓4π ∫_{R∓} x (ρ - μ)`.
    pub left: f64,
    pub right: f64,
    /// `Φ(-a)` and `Φ(a)` of the discrete potential.
    pub box_left: f64,
    pub box_right: f64,
}

#[derive(Debug, Serialize)]
pub struct TailFit {
    pub side: Side,
    pub window: (f64, f64),
    pub fit: Option<SommerfeldFit>,
    pub error: Option<String>,
    /// `c₂` of the Sommerfeld law for the constant in use.
    pub c2_reference: f64,
}

#[derive(Debug, Serialize)]
pub struct TfSummary {
    pub converged: bool,
    pub unconverged: bool,
    pub iterations: usize,
    pub c_tf: f64,
    pub energy: EnergyBreakdown,
    pub fermi_level: f64,
    pub el_residual: f64,
    pub screening_defect: f64,
    pub potential_limits: Option<Limits>,
    pub sommerfeld: Vec<TailFit>,
    pub history: Vec<TfIteration>,
}

#[derive(Debug, Serialize)]
pub struct RhfSummary {
    pub converged: bool,
    pub unconverged: bool,
    pub iterations: usize,
    pub energy: EnergyBreakdown,
    pub fermi_level: f64,
    pub el_residual: f64,
    pub fermi_gap: f64,
    pub rank: usize,
    pub weights: Vec<f64>,
    pub weights_above_1e_3: usize,
    pub orbital_energies: Vec<f64>,
    pub lieb_thirring: LiebThirringCheck,
    pub screening_defect: f64,
    pub potential_limits: Option<Limits>,
    pub sommerfeld: Vec<TailFit>,
    pub history: Vec<RhfIteration>,
}

#[derive(Debug, Default, Serialize)]
pub struct Checks {
    /// `E_rHF >= E_TF`.
    pub energy_ordering: Option<bool>,
    pub tf_history_monotone: Option<bool>,
    pub rhf_history_monotone: Option<bool>,
    pub lieb_thirring_all_iterates: Option<bool>,
    /// Euler-Lagrange residual within `1e-6 (1 + |λ|)`.
    pub tf_el_within_tolerance: Option<bool>,
    pub rhf_el_within_tolerance: Option<bool>,
}

fn limits(rho: &GridFunction, mu: &GridFunction) -> Option<Limits> {
    let tol = DIAGNOSTIC_RTOL * mu.integrate();
    let (left, right) = potential_limits(rho, mu, tol).ok()?;
    let (box_left, box_right) = box_potential_limits(rho, mu, tol).ok()?;
    Some(Limits {
        left,
        right,
        box_left,
        box_right,
    })
}

fn tail_fits(
    rho: &GridFunction,
    support: (f64, f64),
    analysis: &AnalysisConfig,
    c_tf: f64,
) -> Vec<TailFit> {
    if !analysis.tail_fit {
        return Vec::new();
    }
    let a = rho.grid().half_width();
    let (_, c2) = sommerfeld_constants(c_tf);
    [
        (Side::Left, analysis.tail_windows.left),
        (Side::Right, analysis.tail_windows.right),
    ]
    .into_iter()
    .map(|(side, w)| {
        let window = w.unwrap_or_else(|| default_tail_window(support, a, side));
        let (fit, error) = match fit_tail(rho, window, side) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        TailFit {
            side,
            window,
            fit,
            error,
            c2_reference: c2,
        }
    })
    .collect()
}

fn monotone(energies: impl Iterator<Item = f64>) -> bool {
    let mut prev = f64::INFINITY;
    energies.into_iter().all(|e| {
        let ok = e <= prev + 1e-12 * (1.0 + prev.abs());
        prev = e;
        ok
    })
}

pub fn summarize_tf(sol: &TfSolution, mu: &GridFunction, config: &RunConfig) -> TfSummary {
    let c_tf = config.tf_settings().c_tf;
    let support = config.charge_profile().support();
    TfSummary {
        converged: sol.converged,
        unconverged: !sol.converged,
        iterations: sol.history.len(),
        c_tf,
        energy: sol.energy,
        fermi_level: sol.fermi_level,
        el_residual: sol.el_residual,
        screening_defect: screening_defect(&sol.rho, mu),
        potential_limits: limits(&sol.rho, mu),
        sommerfeld: tail_fits(&sol.rho, support, &config.analysis, c_tf),
        history: sol.history.clone(),
    }
}

pub fn summarize_rhf(sol: &RhfSolution, mu: &GridFunction, config: &RunConfig) -> RhfSummary {
    let rho = sol.state.density();
    let support = config.charge_profile().support();
    let weights = sol.state.weights().to_vec();
    RhfSummary {
        converged: sol.converged,
        unconverged: !sol.converged,
        iterations: sol.history.len(),
        energy: sol.energy,
        fermi_level: sol.fermi_level,
        el_residual: sol.el_residual,
        fermi_gap: sol.fermi_gap,
        rank: weights.len(),
        weights_above_1e_3: weights.iter().filter(|&&w| w > 1e-3).count(),
        weights,
        orbital_energies: sol.orbital_energies.clone(),
        lieb_thirring: lieb_thirring_check(&sol.state),
        screening_defect: screening_defect(&rho, mu),
        potential_limits: limits(&rho, mu),
        sommerfeld: tail_fits(&rho, support, &config.analysis, slabdft::tf_constant(3)),
        history: sol.history.clone(),
    }
}

pub fn checks(tf: Option<&TfSolution>, rhf: Option<&RhfSolution>) -> Checks {
    let el_ok = |res: f64, lambda: f64| res <= 1e-6 * (1.0 + lambda.abs());
    Checks {
        energy_ordering: tf.zip(rhf).map(|(t, r)| r.energy.total >= t.energy.total),
        tf_history_monotone: tf.map(|t| monotone(t.history.iter().map(|h| h.energy))),
        rhf_history_monotone: rhf.map(|r| monotone(r.history.iter().map(|h| h.energy))),
        lieb_thirring_all_iterates: rhf.map(|r| r.history.iter().all(|h| h.lieb_thirring.holds)),
        tf_el_within_tolerance: tf.map(|t| el_ok(t.el_residual, t.fermi_level)),
        rhf_el_within_tolerance: rhf.map(|r| el_ok(r.el_residual, r.fermi_level)),
    }
}
