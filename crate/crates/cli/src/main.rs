use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use slabdft_cli::{load_config, run, CaseName, Model, RunConfig};

/// Thomas-Fermi and reduced Hartree-Fock solvers for a charged slab.
#[derive(Debug, Parser)]
#[command(name = "slabdft", version)]
struct Args {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Named charge profile.
    #[arg(long, value_enum)]
    case: Option<CaseName>,

    #[arg(long, value_enum)]
    model: Option<Model>,

    /// Output directory [env: SLABDFT_OUT] [default: slabdft-out]
    #[arg(long)]
    out: Option<PathBuf>,

    /// Half width of the box [-a, a].
    #[arg(long)]
    grid_a: Option<f64>,

    /// Number of grid nodes (odd).
    #[arg(long)]
    grid_n: Option<usize>,

    /// Iteration cap for both solvers.
    #[arg(long)]
    max_iter: Option<usize>,

    /// Energy and density tolerance for both solvers.
    #[arg(long)]
    tol: Option<f64>,

    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
}

fn configure(args: &Args) -> Result<(RunConfig, PathBuf)> {
    let mut config = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(case) = args.case {
        config.case = Some(case);
        config.profile = None;
    }
    if let Some(model) = args.model {
        config.model = model;
    }
    if let Some(a) = args.grid_a {
        config.grid.a = a;
    }
    if let Some(n) = args.grid_n {
        config.grid.n = n;
    }
    if let Some(m) = args.max_iter {
        config.tf.max_iter = Some(m);
        config.rhf.max_iter = Some(m);
    }
    if let Some(tol) = args.tol {
        config.tf.energy_tol = Some(tol);
        config.tf.density_tol = Some(tol);
        config.rhf.energy_tol = Some(tol);
        config.rhf.density_tol = Some(tol);
    }
    config.validate()?;
    let out = args
        .out
        .clone()
        .or_else(|| config.output.clone())
        .or_else(|| std::env::var_os("SLABDFT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("slabdft-out"));
    Ok((config, out))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let result = configure(&args).and_then(|(config, out)| run(&config, &out, args.svg));
    match result {
        Ok(outcome) if outcome.converged => {
            log::info!("results written to {}", outcome.out_dir.display());
            ExitCode::SUCCESS
        }
        Ok(outcome) => {
            log::error!(
                "solver did not converge; partial results in {} are flagged \"unconverged\"",
                outcome.out_dir.display()
            );
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
