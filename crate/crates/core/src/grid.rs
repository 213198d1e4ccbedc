//! Uniform symmetric grid on `[-a, a]`, trapezoidal quadrature and the
//! three-point Dirichlet Laplacian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid with an odd number of nodes, so that `x = 0` is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    n: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "node count must be odd and at least 3, got {n}"
            )));
        }
        Ok(Self {
            half_width,
            n,
            spacing: 2.0 * half_width / (n - 1) as f64,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the node at `x = 0`.
    pub fn center(&self) -> usize {
        (self.n - 1) / 2
    }

    /// Node `i`. Computed relative to the center so that mirrored nodes are
    /// exact negatives of each other and the center is exactly zero.
    pub fn node(&self, i: usize) -> f64 {
        let c = self.center() as i64;
        let k = i as i64 - c;
        if k == c {
            self.half_width
        } else if k == -c {
            -self.half_width
        } else {
            k as f64 * self.spacing
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.weight(i)).collect()
    }

    pub fn zeros(&self) -> GridFunction {
        GridFunction::new(*self, vec![0.0; self.n])
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        GridFunction::new(*self, (0..self.n).map(|i| f(self.node(i))).collect())
    }

    /// Trapezoidal quadrature of raw nodal values.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        // summed in mirrored pairs so odd samples integrate to exactly zero
        let c = self.center();
        let mut interior = values[c];
        for k in 1..c {
            interior += values[c - k] + values[c + k];
        }
        self.spacing * (interior + 0.5 * (values[0] + values[self.n - 1]))
    }

    /// Inner product used for orbitals: `h * sum(u_i v_i)`, the product under
    /// which the tridiagonal Laplacian is symmetric.
    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.n);
        debug_assert_eq!(v.len(), self.n);
        self.spacing * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.dot(u, u).sqrt()
    }
}

pub fn make_grid(half_width: f64, n: usize) -> Result<Grid> {
    Grid::new(half_width, n)
}

/// Real values on the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Self {
        assert_eq!(
            values.len(),
            grid.len(),
            "grid function length must match the grid"
        );
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        GridFunction::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `alpha * self + beta * other`, pointwise.
    pub fn combine(&self, alpha: f64, other: &GridFunction, beta: f64) -> GridFunction {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        GridFunction::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.combine(1.0, other, -1.0)
    }

    pub fn scale(&self, alpha: f64) -> GridFunction {
        self.map(|v| alpha * v)
    }

    pub fn integrate(&self) -> f64 {
        self.grid.integrate_values(&self.values)
    }

    /// Trapezoidal `∫ |f|`.
    pub fn l1_norm(&self) -> f64 {
        let abs: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        self.grid.integrate_values(&abs)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }
}

/// Trapezoidal quadrature `sum_i w_i f(x_i)`.
pub fn integrate(f: &GridFunction) -> f64 {
    f.integrate()
}

/// `½ ∫ |φ'|²` with forward differences and zero Dirichlet ghost values on
/// both sides of the box.
pub fn kinetic_energy(phi: &GridFunction) -> f64 {
    kinetic_energy_values(phi.grid(), phi.values())
}

pub(crate) fn kinetic_energy_values(grid: &Grid, v: &[f64]) -> f64 {
    let h = grid.spacing();
    let n = v.len();
    let mut sum = v[0] * v[0] + v[n - 1] * v[n - 1];
    for w in v.windows(2) {
        let d = w[1] - w[0];
        sum += d * d;
    }
    0.5 * sum / h
}

/// `(-Δφ)_i = (2φ_i - φ_{i-1} - φ_{i+1}) / h²` with zero values outside.
pub fn apply_laplacian(phi: &GridFunction) -> GridFunction {
    let v = phi.values();
    let n = v.len();
    let h2 = phi.grid().spacing().powi(2);
    let out = (0..n)
        .map(|i| {
            let left = if i > 0 { v[i - 1] } else { 0.0 };
            let right = if i + 1 < n { v[i + 1] } else { 0.0 };
            (2.0 * v[i] - left - right) / h2
        })
        .collect();
    GridFunction::new(*phi.grid(), out)
}
