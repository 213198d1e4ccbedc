//! JSON run configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use slabdft::analysis::spinful_tf_constant;
use slabdft::{tf_constant, ChargeProfile, Grid, RhfSettings, TfSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Tf,
    Rhf,
    Both,
}

impl Model {
    pub fn runs_tf(self) -> bool {
        matches!(self, Model::Tf | Model::Both)
    }

    pub fn runs_rhf(self) -> bool {
        matches!(self, Model::Rhf | Model::Both)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Tf => "tf",
            Model::Rhf => "rhf",
            Model::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CaseName {
    Case1,
    Case2,
    Case3,
    Dirac,
}

impl CaseName {
    pub fn profile(self) -> ChargeProfile {
        match self {
            CaseName::Case1 => ChargeProfile::case1(),
            CaseName::Case2 => ChargeProfile::case2(),
            CaseName::Case3 => ChargeProfile::case3(),
            CaseName::Dirac => ChargeProfile::dirac(1.0, 0.05),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TfConvention {
    #[default]
    Spinless,
    Spinful,
}

impl TfConvention {
    pub fn constant(self) -> f64 {
        match self {
            TfConvention::Spinless => tf_constant(3),
            TfConvention::Spinful => spinful_tf_constant(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub a: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { a: 15.0, n: 5001 }
    }
}

/// Tail-fit windows as positive distances from the origin on each side.
/// Missing windows default to `[support edge + 3, a - 5]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailWindows {
    pub left: Option<(f64, f64)>,
    pub right: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub tail_fit: bool,
    pub tail_windows: TailWindows,
    pub comparison: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            tail_fit: true,
            tail_windows: TailWindows::default(),
            comparison: true,
        }
    }
}

/// Overrides for the Thomas-Fermi solver; unset fields keep library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TfOverrides {
    pub max_iter: Option<usize>,
    pub energy_tol: Option<f64>,
    pub density_tol: Option<f64>,
    pub dichotomy_tol: Option<f64>,
    pub neutrality_tol: Option<f64>,
    pub linesearch_evals: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RhfOverrides {
    pub max_iter: Option<usize>,
    pub energy_tol: Option<f64>,
    pub density_tol: Option<f64>,
    pub neutrality_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    pub case: Option<CaseName>,
    pub profile: Option<ChargeProfile>,
    pub grid: GridConfig,
    pub tf: TfOverrides,
    pub rhf: RhfOverrides,
    pub c_tf_convention: TfConvention,
    pub analysis: AnalysisConfig,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: Model::Both,
            case: None,
            profile: None,
            grid: GridConfig::default(),
            tf: TfOverrides::default(),
            rhf: RhfOverrides::default(),
            c_tf_convention: TfConvention::Spinless,
            analysis: AnalysisConfig::default(),
            output: None,
        }
    }
}

impl RunConfig {
    /// The charge profile: the named case if given, else the explicit one,
    /// else case 1.
    pub fn charge_profile(&self) -> ChargeProfile {
        match (&self.case, &self.profile) {
            (Some(case), _) => case.profile(),
            (None, Some(p)) => p.clone(),
            (None, None) => ChargeProfile::case1(),
        }
    }

    pub fn profile_name(&self) -> String {
        match (&self.case, &self.profile) {
            (Some(case), _) => serde_json::to_value(case)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default(),
            (None, Some(_)) => "custom".into(),
            (None, None) => "case1".into(),
        }
    }

    pub fn make_grid(&self) -> Result<Grid> {
        Ok(Grid::new(self.grid.a, self.grid.n)?)
    }

    pub fn tf_settings(&self) -> TfSettings {
        let mut s = TfSettings {
            c_tf: self.c_tf_convention.constant(),
            ..TfSettings::default()
        };
        let o = &self.tf;
        if let Some(v) = o.max_iter {
            s.max_iter = v;
        }
        if let Some(v) = o.energy_tol {
            s.energy_tol = v;
        }
        if let Some(v) = o.density_tol {
            s.density_tol = v;
        }
        if let Some(v) = o.dichotomy_tol {
            s.dichotomy_tol = v;
        }
        if let Some(v) = o.neutrality_tol {
            s.neutrality_tol = v;
        }
        if let Some(v) = o.linesearch_evals {
            s.linesearch_evals = v;
        }
        s
    }

    pub fn rhf_settings(&self) -> RhfSettings {
        let mut s = RhfSettings::default();
        let o = &self.rhf;
        if let Some(v) = o.max_iter {
            s.max_iter = v;
        }
        if let Some(v) = o.energy_tol {
            s.energy_tol = v;
        }
        if let Some(v) = o.density_tol {
            s.density_tol = v;
        }
        if let Some(v) = o.neutrality_tol {
            s.neutrality_tol = v;
        }
        s
    }

    /// Every constraint violation, one message per field.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = Grid::new(self.grid.a, self.grid.n) {
            out.push(format!("grid: {e}"));
        }
        if self.case.is_some() && self.profile.is_some() {
            out.push("case and profile: give one or the other, not both".into());
        }
        if let Some(p) = &self.profile {
            if let Err(e) = p.validate() {
                out.push(format!("profile: {e}"));
            }
        }
        if let Err(e) = self.tf_settings().validate() {
            out.push(format!("tf: {e}"));
        }
        if let Err(e) = self.rhf_settings().validate() {
            out.push(format!("rhf: {e}"));
        }
        let windows = [
            ("left", self.analysis.tail_windows.left),
            ("right", self.analysis.tail_windows.right),
        ];
        for (side, w) in windows {
            if let Some((x1, x2)) = w {
                if !(0.0 <= x1 && x1 < x2) {
                    out.push(format!(
                        "analysis.tail_windows.{side}: need 0 <= x1 < x2, got [{x1}, {x2}]"
                    ));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            bail!("invalid configuration:\n  {}", v.join("\n  "))
        }
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let config: RunConfig = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse config file {}", path.display()))?;
    config
        .validate()
        .with_context(|| format!("in config file {}", path.display()))?;
    Ok(config)
}
