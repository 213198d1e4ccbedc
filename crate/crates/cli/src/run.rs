use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use anyhow::{Context, Result};

use slabdft::sources::evaluate;
use slabdft::{compare, rhf_scf, tf_scf, GridFunction, RhfSolution, TfSolution};

use crate::config::RunConfig;
use crate::output::{csv, svg_plot, Series};
use crate::report::{checks, summarize_rhf, summarize_tf, GridSummary, ProfileSummary, Results};

#[derive(Debug)]
pub struct RunOutcome {
    pub converged: bool,
    pub out_dir: PathBuf,
}

/// Solves the configured models and writes `results.json`, `density.csv`,
/// `diff.csv` (both models only) and, with `svg`, the plots.
pub fn run(config: &RunConfig, out_dir: &Path, svg: bool) -> Result<RunOutcome> {
    config.validate()?;
    let grid = config.make_grid()?;
    let profile = config.charge_profile();
    let mu = evaluate(&profile, &grid);
    let tf_settings = config.tf_settings();
    let rhf_settings = config.rhf_settings();

    log::info!(
        "model {} on profile {} (Z = {}), grid a = {}, n = {}",
        config.model,
        config.profile_name(),
        profile.total_charge(),
        grid.half_width(),
        grid.len()
    );
    let (tf, rhf) = thread::scope(|s| {
        let tf = config
            .model
            .runs_tf()
            .then(|| s.spawn(|| tf_scf(&mu, &tf_settings)));
        let rhf = config
            .model
            .runs_rhf()
            .then(|| s.spawn(|| rhf_scf(&mu, &rhf_settings)));
        (
            tf.map(|h| h.join().expect("TF solver thread panicked")),
            rhf.map(|h| h.join().expect("rHF solver thread panicked")),
        )
    });
    let tf: Option<TfSolution> = tf.transpose().context("Thomas-Fermi solve failed")?;
    let rhf: Option<RhfSolution> = rhf
        .transpose()
        .context("reduced Hartree-Fock solve failed")?;
    if let Some(t) = &tf {
        log::info!(
            "TF: E = {}, λ = {}, {} iterations, converged {}",
            t.energy.total,
            t.fermi_level,
            t.history.len(),
            t.converged
        );
    }
    if let Some(r) = &rhf {
        log::info!(
            "rHF: E = {}, λ = {}, rank {}, {} iterations, converged {}",
            r.energy.total,
            r.fermi_level,
            r.state.rank(),
            r.history.len(),
            r.converged
        );
    }

    let rho_rhf = rhf.as_ref().map(|r| r.state.density());
    let comparison = match (&tf, &rhf, &rho_rhf) {
        (Some(t), Some(r), Some(rho)) if config.analysis.comparison => {
            Some(compare(&t.rho, rho, &t.phi.phi, &r.phi.phi)?)
        }
        _ => None,
    };
    let converged =
        tf.as_ref().is_none_or(|t| t.converged) && rhf.as_ref().is_none_or(|r| r.converged);
    let results = Results {
        model: config.model.to_string(),
        grid: GridSummary {
            a: grid.half_width(),
            n: grid.len(),
            h: grid.spacing(),
        },
        profile: ProfileSummary {
            name: config.profile_name(),
            total_charge: profile.total_charge(),
            support: profile.support(),
            components: profile.components.clone(),
        },
        tf: tf.as_ref().map(|t| summarize_tf(t, &mu, config)),
        rhf: rhf.as_ref().map(|r| summarize_rhf(r, &mu, config)),
        comparison,
        checks: checks(tf.as_ref(), rhf.as_ref()),
        unconverged: !converged,
    };

    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let write = |name: &str, contents: String| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
    };
    write(
        "results.json",
        serde_json::to_string_pretty(&results)? + "\n",
    )?;

    let x = grid.nodes();
    let mut columns: Vec<(&str, &[f64])> = vec![("x", &x), ("mu", mu.values())];
    if let Some(t) = &tf {
        columns.push(("rho_tf", t.rho.values()));
    }
    if let Some(rho) = &rho_rhf {
        columns.push(("rho_rhf", rho.values()));
    }
    if let Some(t) = &tf {
        columns.push(("phi_tf", t.phi.phi.values()));
    }
    if let Some(r) = &rhf {
        columns.push(("phi_rhf", r.phi.phi.values()));
    }
    write("density.csv", csv(&columns))?;

    if let (Some(t), Some(r), Some(rho)) = (&tf, &rhf, &rho_rhf) {
        let drho = t.rho.sub(rho);
        let dphi = t.phi.phi.sub(&r.phi.phi);
        write(
            "diff.csv",
            csv(&[("x", &x), ("drho", drho.values()), ("dphi", dphi.values())]),
        )?;
        if svg {
            write("plot_diff.svg", difference_plot(&x, &drho, &dphi))?;
        }
    }
    if svg {
        write(
            "plot_density.svg",
            density_plot(&x, &mu, tf.as_ref(), rhf.as_ref(), rho_rhf.as_ref()),
        )?;
    }
    Ok(RunOutcome {
        converged,
        out_dir: out_dir.to_path_buf(),
    })
}

fn density_plot(
    x: &[f64],
    mu: &GridFunction,
    tf: Option<&TfSolution>,
    rhf: Option<&RhfSolution>,
    rho_rhf: Option<&GridFunction>,
) -> String {
    let mut series = vec![Series {
        label: "mu",
        values: mu.values().to_vec(),
        color: "red",
        dashed: false,
    }];
    if let (Some(r), Some(rho)) = (rhf, rho_rhf) {
        series.push(Series {
            label: "rho rHF",
            values: rho.values().to_vec(),
            color: "blue",
            dashed: false,
        });
        series.push(Series {
            label: "(phi - lambda)/10 rHF",
            values: r
                .phi
                .phi
                .values()
                .iter()
                .map(|p| (p - r.fermi_level) / 10.0)
                .collect(),
            color: "black",
            dashed: true,
        });
    }
    if let Some(t) = tf {
        series.push(Series {
            label: "rho TF",
            values: t.rho.values().to_vec(),
            color: "green",
            dashed: false,
        });
        series.push(Series {
            label: "(phi - lambda)/10 TF",
            values: t
                .phi
                .phi
                .values()
                .iter()
                .map(|p| (p - t.fermi_level) / 10.0)
                .collect(),
            color: "gray",
            dashed: true,
        });
    }
    svg_plot("charge, density and potential", x, &series)
}

fn difference_plot(x: &[f64], drho: &GridFunction, dphi: &GridFunction) -> String {
    svg_plot(
        "TF minus rHF",
        x,
        &[
            Series {
                label: "rho_TF - rho_rHF",
                values: drho.values().to_vec(),
                color: "blue",
                dashed: false,
            },
            Series {
                label: "phi_TF - phi_rHF",
                values: dphi.values().to_vec(),
                color: "black",
                dashed: true,
            },
        ],
    )
}
