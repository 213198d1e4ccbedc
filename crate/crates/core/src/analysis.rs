//! Post-processing: Thomas-Fermi constants, Sommerfeld tail fits, screening
//! diagnostics, model comparison and the semiclassical Lieb-Thirring check.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::hartree::{potential, NeutralResidual};
use crate::rhf::ReducedState;

/// Usual spin-1/2 Thomas-Fermi constant `(3/10)(3π²)^{2/3}`.
pub fn spinful_tf_constant() -> f64 {
    0.3 * (3.0 * PI * PI).powf(2.0 / 3.0)
}

/// `Γ(s/2)` for a positive integer `s`.
fn gamma_half(s: u32) -> f64 {
    let mut g = if s.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if s.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < 0.5 * s as f64 - 1e-12 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area of the unit sphere `S^{s-1}` in `R^s`.
pub fn unit_sphere_area(s: u32) -> f64 {
    2.0 * PI.powf(0.5 * s as f64) / gamma_half(s)
}

/// Spinless Thomas-Fermi constant in dimension `s`:
/// `s/(s+2) · (s/|S^{s-1}|)^{2/s} · 2π²`.
pub fn tf_constant(s: u32) -> f64 {
    assert!(s >= 1, "dimension must be positive");
    let sf = s as f64;
    sf / (sf + 2.0) * (sf / unit_sphere_area(s)).powf(2.0 / sf) * 2.0 * PI * PI
}

/// Sommerfeld constants `(c₁, c₂)` with `c₁ = 5⁵c³/(27π²)`, `c₂ = 5⁶c³/(27π³)`.
pub fn sommerfeld_constants(c_tf: f64) -> (f64, f64) {
    let c3 = c_tf.powi(3);
    (
        5f64.powi(5) * c3 / (27.0 * PI * PI),
        5f64.powi(6) * c3 / (27.0 * PI.powi(3)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SommerfeldFit {
    pub side: Side,
    pub window: (f64, f64),
    pub c_est: f64,
    pub x0_est: f64,
    pub rms_residual: f64,
}

/// Fits `ρ^{-1/6} = c^{-1/6} |x - x₀|` by least squares over the nodes in
/// `window` (given as positive distances for the left side, mirrored).
pub fn fit_tail(rho: &GridFunction, window: (f64, f64), side: Side) -> Result<SommerfeldFit> {
    let (x1, x2) = window;
    if !(x1 < x2) {
        return Err(Error::TailFit(format!("empty window [{x1}, {x2}]")));
    }
    let grid = rho.grid();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..grid.len() {
        let x = grid.node(i);
        let u = match side {
            Side::Right => x,
            Side::Left => -x,
        };
        if u >= x1 && u <= x2 {
            let r = rho.at(i);
            if !(r > 0.0) {
                return Err(Error::TailFit(format!(
                    "non-positive density {r} at x = {x}"
                )));
            }
            xs.push(u);
            ys.push(r.powf(-1.0 / 6.0));
        }
    }
    if xs.len() < 3 {
        return Err(Error::TailFit("fewer than three nodes in window".into()));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    if !(slope > 0.0) {
        return Err(Error::TailFit(format!(
            "non-increasing tail, slope {slope}"
        )));
    }
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    let u0 = -intercept / slope;
    Ok(SommerfeldFit {
        side,
        window,
        c_est: slope.powi(-6),
        x0_est: match side {
            Side::Right => u0,
            Side::Left => -u0,
        },
        rms_residual: rms,
    })
}

/// `∫ x (ρ - μ) dx`.
pub fn screening_defect(rho: &GridFunction, mu: &GridFunction) -> f64 {
    let grid = rho.grid();
    let v: Vec<f64> = (0..grid.len())
        .map(|i| grid.node(i) * (rho.at(i) - mu.at(i)))
        .collect();
    grid.integrate_values(&v)
}

/// `(Φ(-∞), Φ(+∞)) = (-4π ∫_{x<0} x f, 4π ∫_{x>0} x f)` for the neutral
/// residual `f = ρ - μ`.
pub fn potential_limits(rho: &GridFunction, mu: &GridFunction, tol: f64) -> Result<(f64, f64)> {
    let res = NeutralResidual::from_difference(rho, mu, tol)?;
    let grid = res.grid();
    let f = res.f();
    let c = grid.center();
    let mut left = 0.0;
    let mut right = 0.0;
    for i in 0..grid.len() {
        let m = grid.weight(i) * grid.node(i) * f.at(i);
        if i < c {
            left += m;
        } else if i > c {
            right += m;
        }
    }
    Ok((-4.0 * PI * left, 4.0 * PI * right))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiebThirringCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub ratio: f64,
}

/// Semiclassical inequality `½Tr(-ΔG) + π Tr(G²) >= c_TF(3) ∫ρ_G^{5/3}`.
pub fn lieb_thirring_check(state: &ReducedState) -> LiebThirringCheck {
    let lhs = state.kinetic() + PI * state.trace_square();
    let rho = state.density();
    let rhs = tf_constant(3) * rho.map(|r| r.max(0.0).powf(5.0 / 3.0)).integrate();
    LiebThirringCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-10 * lhs.abs(),
        ratio: if lhs > 0.0 { rhs / lhs } else { 0.0 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `‖ρ_a - ρ_b‖₁ / Z`, with `Z = ∫ρ_b`.
    pub l1_rel: f64,
    /// `max|ρ_a - ρ_b| / max ρ_b`.
    pub linf_rel: f64,
    /// `max |Φ_a - Φ_b - median(Φ_a - Φ_b)|`.
    pub potential_gap: f64,
}

pub fn compare(
    rho_a: &GridFunction,
    rho_b: &GridFunction,
    phi_a: &GridFunction,
    phi_b: &GridFunction,
) -> Result<ComparisonReport> {
    rho_a.check_same_grid(rho_b)?;
    rho_a.check_same_grid(phi_a)?;
    rho_a.check_same_grid(phi_b)?;
    let diff = rho_a.sub(rho_b);
    let z = rho_b.integrate();
    let peak = rho_b.max();
    let mut dphi: Vec<f64> = phi_a.sub(phi_b).into_values();
    let mut sorted = dphi.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    dphi.iter_mut().for_each(|v| *v = (*v - median).abs());
    Ok(ComparisonReport {
        l1_rel: if z > 0.0 { diff.l1_norm() / z } else { 0.0 },
        linf_rel: if peak > 0.0 {
            diff.max_abs() / peak
        } else {
            0.0
        },
        potential_gap: dphi.into_iter().fold(0.0, f64::max),
    })
}

/// Default Sommerfeld window: from 3 past the support edge to 5 before the
/// box end, as positive distances on each side.
pub fn default_tail_window(support: (f64, f64), half_width: f64, side: Side) -> (f64, f64) {
    let edge = match side {
        Side::Right => support.1,
        Side::Left => -support.0,
    };
    (edge + 3.0, half_width - 5.0)
}

/// Potential limits read off `Φ(±a)` of the discrete potential.
pub fn box_potential_limits(rho: &GridFunction, mu: &GridFunction, tol: f64) -> Result<(f64, f64)> {
    let pot = potential(&NeutralResidual::from_difference(rho, mu, tol)?);
    Ok((pot.left_limit, pot.right_limit))
}
