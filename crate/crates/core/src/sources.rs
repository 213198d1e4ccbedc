//! Analytic nonnegative charge profiles `μ(x)` and their exact charges.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// Relative mismatch between sampled and analytic charge above which
/// [`evaluate`] logs a warning.
pub const SAMPLING_WARN_THRESHOLD: f64 = 5e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChargeComponent {
    /// `height` on `(lo, hi)`.
    Box { lo: f64, hi: f64, height: f64 },
    /// `amplitude * exp(-inverse_width * (x - center)²)`.
    Gaussian {
        center: f64,
        inverse_width: f64,
        amplitude: f64,
    },
    /// Box of width `eps` and height `charge / eps` centered at the origin.
    MollifiedDirac { charge: f64, eps: f64 },
}

impl ChargeComponent {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ChargeComponent::Box { lo, hi, height } => lo < hi && height >= 0.0,
            ChargeComponent::Gaussian {
                inverse_width,
                amplitude,
                ..
            } => inverse_width > 0.0 && amplitude >= 0.0,
            ChargeComponent::MollifiedDirac { charge, eps } => charge > 0.0 && eps > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidProfile(format!("bad component {self:?}")))
        }
    }

    pub fn charge(&self) -> f64 {
        match *self {
            ChargeComponent::Box { lo, hi, height } => (hi - lo) * height,
            ChargeComponent::Gaussian {
                inverse_width,
                amplitude,
                ..
            } => amplitude * (PI / inverse_width).sqrt(),
            ChargeComponent::MollifiedDirac { charge, .. } => charge,
        }
    }

    /// Support as a closed interval; Gaussians are cut at 8 widths.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            ChargeComponent::Box { lo, hi, .. } => (lo, hi),
            ChargeComponent::Gaussian {
                center,
                inverse_width,
                ..
            } => {
                let r = 8.0 / inverse_width.sqrt();
                (center - r, center + r)
            }
            ChargeComponent::MollifiedDirac { eps, .. } => (-0.5 * eps, 0.5 * eps),
        }
    }

    fn as_box(&self) -> Option<(f64, f64, f64)> {
        match *self {
            ChargeComponent::Box { lo, hi, height } => Some((lo, hi, height)),
            ChargeComponent::MollifiedDirac { charge, eps } => {
                Some((-0.5 * eps, 0.5 * eps, charge / eps))
            }
            ChargeComponent::Gaussian { .. } => None,
        }
    }

    /// Nodal value at `x` on a grid of spacing `h`.
    fn sample(&self, x: f64, h: f64) -> f64 {
        match self.as_box() {
            // Cell average over [x - h/2, x + h/2]: half height on an edge
            // node, and the exact mass is carried by interior nodes.
            Some((lo, hi, height)) => {
                let l = (x - 0.5 * h).max(lo);
                let r = (x + 0.5 * h).min(hi);
                if r > l {
                    height * (r - l) / h
                } else {
                    0.0
                }
            }
            None => match *self {
                ChargeComponent::Gaussian {
                    center,
                    inverse_width,
                    amplitude,
                } => amplitude * (-inverse_width * (x - center).powi(2)).exp(),
                _ => unreachable!(),
            },
        }
    }
}

/// Sum of nonnegative components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeProfile {
    pub components: Vec<ChargeComponent>,
}

impl ChargeProfile {
    pub fn new(components: Vec<ChargeComponent>) -> Result<Self> {
        let profile = Self { components };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidProfile("profile has no components".into()));
        }
        for c in &self.components {
            c.validate()?;
        }
        if !(self.total_charge() > 0.0) {
            return Err(Error::InvalidProfile(
                "total charge must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn total_charge(&self) -> f64 {
        self.components.iter().map(ChargeComponent::charge).sum()
    }

    pub fn support(&self) -> (f64, f64) {
        self.components
            .iter()
            .map(ChargeComponent::support)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, r), (a, b)| {
                (l.min(a), r.max(b))
            })
    }

    /// `1(|x| < 2)`.
    pub fn case1() -> Self {
        Self {
            components: vec![ChargeComponent::Box {
                lo: -2.0,
                hi: 2.0,
                height: 1.0,
            }],
        }
    }

    /// `1(-5 < x < -2) + 2·1(1 < x < 3)`.
    pub fn case2() -> Self {
        Self {
            components: vec![
                ChargeComponent::Box {
                    lo: -5.0,
                    hi: -2.0,
                    height: 1.0,
                },
                ChargeComponent::Box {
                    lo: 1.0,
                    hi: 3.0,
                    height: 2.0,
                },
            ],
        }
    }

    /// `exp(-(x+2)²/4) + 2·exp(-(x-2)²)`.
    pub fn case3() -> Self {
        Self {
            components: vec![
                ChargeComponent::Gaussian {
                    center: -2.0,
                    inverse_width: 0.25,
                    amplitude: 1.0,
                },
                ChargeComponent::Gaussian {
                    center: 2.0,
                    inverse_width: 1.0,
                    amplitude: 2.0,
                },
            ],
        }
    }

    pub fn dirac(charge: f64, eps: f64) -> Self {
        Self {
            components: vec![ChargeComponent::MollifiedDirac { charge, eps }],
        }
    }
}

pub fn total_charge(profile: &ChargeProfile) -> f64 {
    profile.total_charge()
}

/// Relative difference between the quadrature of the sampled profile and its
/// analytic charge.
pub fn sampling_defect(profile: &ChargeProfile, grid: &Grid) -> f64 {
    let z = profile.total_charge();
    (sample_profile(profile, grid).integrate() - z).abs() / z
}

fn sample_profile(profile: &ChargeProfile, grid: &Grid) -> GridFunction {
    let h = grid.spacing();
    grid.sample(|x| profile.components.iter().map(|c| c.sample(x, h)).sum())
}

/// Sample `μ` on the grid. Logs a warning when the sampled charge is off by
/// more than [`SAMPLING_WARN_THRESHOLD`].
pub fn evaluate(profile: &ChargeProfile, grid: &Grid) -> GridFunction {
    let mu = sample_profile(profile, grid);
    let z = profile.total_charge();
    let rel = (mu.integrate() - z).abs() / z;
    if rel > SAMPLING_WARN_THRESHOLD {
        log::warn!(
            "sampled charge {} differs from analytic charge {} by {:.3}%",
            mu.integrate(),
            z,
            100.0 * rel
        );
    }
    mu
}
