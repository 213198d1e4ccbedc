//! One-dimensional regularized Hartree machinery.
//!
//! For a neutral residual `f` the cumulative charge is `W(x) = ∫_{-a}^x f`,
//! the potential is `Φ(x) = -4π ∫_0^x W` and the Hartree energy is
//! `D1(f) = 4π ∫ W²`.
//!
//! The potential and the energy use `W` at interval midpoints, taken as the
//! quadrature mass left of the midpoint, `M_i = Σ_{j<=i} w_j f_j`. With this
//! choice `D1(f) = Σ w_i Φ_i f_i` and `Φ(a) - Φ(-a) = 4π Σ w_i x_i f_i` hold
//! to round-off, and `-Φ'' = 4πf` holds exactly at interior nodes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// Default neutrality tolerance relative to the reference charge.
pub const DEFAULT_NEUTRALITY_RTOL: f64 = 1e-8;

/// A neutral function `f`, typically `ρ - μ`, with its pre-projection defect.
#[derive(Debug, Clone)]
pub struct NeutralResidual {
    f: GridFunction,
    charge_defect: f64,
}

impl NeutralResidual {
    /// Checks `|∫f| <= tol` and removes the defect proportionally to `|f|`.
    pub fn new(f: GridFunction, tol: f64) -> Result<Self> {
        let carrier = f.map(f64::abs);
        Self::project(f, &carrier, tol)
    }

    /// `ρ - μ`, with any defect within `tol` removed along a normalized copy
    /// of `μ`.
    pub fn from_difference(rho: &GridFunction, mu: &GridFunction, tol: f64) -> Result<Self> {
        rho.check_same_grid(mu)?;
        Self::project(rho.sub(mu), mu, tol)
    }

    /// `ρ - μ` projected onto neutrality without a tolerance check, for
    /// callers that enforce the charge constraint by other means.
    pub(crate) fn from_difference_unchecked(rho: &GridFunction, mu: &GridFunction) -> Result<Self> {
        rho.check_same_grid(mu)?;
        Self::project(rho.sub(mu), mu, f64::INFINITY)
    }

    fn project(mut f: GridFunction, carrier: &GridFunction, tol: f64) -> Result<Self> {
        let defect = f.integrate();
        if !(defect.abs() <= tol) {
            return Err(Error::NotNeutral { defect, tol });
        }
        let mass = carrier.integrate();
        if defect != 0.0 && mass > 0.0 {
            let s = defect / mass;
            for (v, c) in f.values_mut().iter_mut().zip(carrier.values()) {
                *v -= s * c;
            }
        }
        Ok(Self {
            f,
            charge_defect: defect,
        })
    }

    pub fn f(&self) -> &GridFunction {
        &self.f
    }

    pub fn grid(&self) -> &Grid {
        self.f.grid()
    }

    /// `∫f` before projection.
    pub fn charge_defect(&self) -> f64 {
        self.charge_defect
    }
}

/// Mean-field potential in the gauge `Φ(0) = 0`.
#[derive(Debug, Clone)]
pub struct MeanFieldPotential {
    pub phi: GridFunction,
    pub left_limit: f64,
    pub right_limit: f64,
}

impl MeanFieldPotential {
    pub fn from_values(phi: GridFunction) -> Self {
        let n = phi.len();
        Self {
            left_limit: phi.at(0),
            right_limit: phi.at(n - 1),
            phi,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.phi.grid()
    }

    /// `Φ + c`; only used to probe gauge covariance.
    pub fn shifted(&self, c: f64) -> Self {
        Self::from_values(self.phi.map(|v| v + c))
    }
}

/// `W(x_i)` by cumulative trapezoid from the left end, `W(-a) = 0`.
pub fn cumulative(f: &GridFunction) -> GridFunction {
    let h = f.grid().spacing();
    let v = f.values();
    let mut w = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    w.push(0.0);
    for pair in v.windows(2) {
        acc += 0.5 * h * (pair[0] + pair[1]);
        w.push(acc);
    }
    GridFunction::new(*f.grid(), w)
}

/// `M_i = Σ_{j<=i} w_j f_j` for each of the `n - 1` intervals.
fn midpoint_cumulative(f: &GridFunction) -> Vec<f64> {
    let grid = f.grid();
    let mut acc = 0.0;
    (0..grid.len() - 1)
        .map(|i| {
            acc += grid.weight(i) * f.at(i);
            acc
        })
        .collect()
}

pub fn potential(res: &NeutralResidual) -> MeanFieldPotential {
    let grid = *res.grid();
    let h = grid.spacing();
    let c = grid.center();
    let wm = midpoint_cumulative(res.f());
    let mut phi = vec![0.0; grid.len()];
    for i in c..grid.len() - 1 {
        phi[i + 1] = phi[i] - 4.0 * PI * h * wm[i];
    }
    for i in (1..=c).rev() {
        phi[i - 1] = phi[i] + 4.0 * PI * h * wm[i - 1];
    }
    MeanFieldPotential::from_values(GridFunction::new(grid, phi))
}

/// `D1(f) = 4π ∫ W²`, midpoint rule on the interval values of `W`.
pub fn hartree_energy(res: &NeutralResidual) -> f64 {
    hartree_pairing(res.f(), res.f())
}

/// Symmetric bilinear form behind `D1`: `4π ∫ W_f W_g`. Neutrality of the
/// arguments is the caller's responsibility.
pub fn hartree_pairing(f: &GridFunction, g: &GridFunction) -> f64 {
    let h = f.grid().spacing();
    let wf = midpoint_cumulative(f);
    let wg = midpoint_cumulative(g);
    4.0 * PI * h * wf.iter().zip(&wg).map(|(a, b)| a * b).sum::<f64>()
}

/// `4π ∫ x f(x) dx`.
pub fn dipole_moment(f: &GridFunction) -> f64 {
    let grid = f.grid();
    let xf: Vec<f64> = (0..grid.len()).map(|i| grid.node(i) * f.at(i)).collect();
    4.0 * PI * grid.integrate_values(&xf)
}
