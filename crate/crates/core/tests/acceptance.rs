//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slabdft::analysis::{fit_tail, screening_defect, sommerfeld_constants, tf_constant, Side};
use slabdft::hartree::{
    dipole_moment, hartree_energy, hartree_pairing, potential, NeutralResidual,
};
use slabdft::rhf::{assemble_hamiltonian, lowest_eigenpairs};
use slabdft::sources::evaluate;
use slabdft::tf::{dirac_closed_form, tf_fermi_level};
use slabdft::{
    compare, lieb_thirring_check, make_grid, rhf_scf, tf_scf, ChargeProfile, Grid, GridFunction,
    MeanFieldPotential, ReducedState, RhfSettings, RhfSolution, TfSettings, TfSolution,
};

struct Case {
    mu: GridFunction,
    tf: TfSolution,
    rhf: RhfSolution,
}

fn solve_case(profile: &ChargeProfile, grid: &Grid) -> Case {
    let mu = evaluate(profile, grid);
    let (tf, rhf) = thread::scope(|s| {
        let tf = s.spawn(|| tf_scf(&mu, &TfSettings::default()).expect("TF solve"));
        let rhf = s.spawn(|| rhf_scf(&mu, &RhfSettings::default()).expect("rHF solve"));
        (tf.join().unwrap(), rhf.join().unwrap())
    });
    Case { mu, tf, rhf }
}

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: u32, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!(
            "criterion {id:>2}: {} | {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
}

fn weights_above(state: &ReducedState, threshold: f64) -> usize {
    state.weights().iter().filter(|&&w| w > threshold).count()
}

fn largest(state: &ReducedState) -> f64 {
    state.weights().first().copied().unwrap_or(0.0)
}

fn linf_rel(case: &Case) -> f64 {
    let rho_rhf = case.rhf.state.density();
    compare(&case.tf.rho, &rho_rhf, &case.tf.phi.phi, &case.rhf.phi.phi)
        .unwrap()
        .linf_rel
}

fn monotone(energies: impl Iterator<Item = f64>, start: f64) -> bool {
    let mut prev = start;
    for e in energies {
        if e > prev + 1e-12 * (1.0 + prev.abs()) {
            return false;
        }
        prev = e;
    }
    true
}

/// Random orthonormal orbitals built from Gaussian bumps, rough noise or a
/// mix of both, with random positive weights.
fn random_state(grid: &Grid, rng: &mut ChaCha8Rng) -> ReducedState {
    let rank = rng.gen_range(1..=5);
    let a = grid.half_width();
    let mut orbitals: Vec<Vec<f64>> = Vec::new();
    while orbitals.len() < rank {
        let kind = rng.gen_range(0..3);
        let c = rng.gen_range(-0.6 * a..0.6 * a);
        let w = rng.gen_range(0.3..3.0);
        let mut v: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| {
                let smooth = (-((x - c) / w).powi(2)).exp();
                match kind {
                    0 => smooth,
                    1 => smooth * (rng.gen_range(-1.0..1.0) + 0.2),
                    _ => smooth * (1.0 + 0.1 * rng.gen_range(-1.0..1.0)),
                }
            })
            .collect();
        let last = v.len() - 1;
        v[0] = 0.0;
        v[last] = 0.0;
        for _ in 0..2 {
            for q in &orbitals {
                let d = grid.dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
            }
        }
        let n = grid.norm(&v);
        if n > 1e-6 {
            v.iter_mut().for_each(|x| *x /= n);
            orbitals.push(v);
        }
    }
    let weights = (0..rank).map(|_| rng.gen_range(0.01..3.0)).collect();
    ReducedState::from_parts(*grid, weights, orbitals)
}

/// Random neutral residual: Gaussians of random sign, position and width,
/// neutralized by the projection.
fn random_residual(grid: &Grid, rng: &mut ChaCha8Rng) -> NeutralResidual {
    let terms: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.3..1.5),
            )
        })
        .collect();
    let f = grid.sample(|x| {
        terms
            .iter()
            .map(|(amp, c, w)| amp * (-((x - c) / w).powi(2)).exp())
            .sum()
    });
    NeutralResidual::new(f, f64::INFINITY).unwrap()
}

fn hartree_identities(rng: &mut ChaCha8Rng) -> (bool, f64) {
    let grid = make_grid(12.0, 2401).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let f = random_residual(&grid, rng);
        let g = random_residual(&grid, rng);
        let d1 = hartree_energy(&f);
        let phi = potential(&f);
        let pf: Vec<f64> = phi
            .phi
            .values()
            .iter()
            .zip(f.f().values())
            .map(|(a, b)| a * b)
            .collect();
        let int_phi_f = grid.integrate_values(&pf);
        worst = worst.max((d1 - int_phi_f).abs() / d1.abs().max(1e-300));

        let dip = dipole_moment(f.f());
        let limits = phi.right_limit - phi.left_limit;
        worst = worst.max((dip - limits).abs() / dip.abs().max(1.0));

        let plus = f.f().combine(1.0, g.f(), 1.0);
        let minus = f.f().combine(1.0, g.f(), -1.0);
        let lhs = hartree_pairing(&plus, &plus) + hartree_pairing(&minus, &minus);
        let rhs = 2.0 * (d1 + hartree_energy(&g));
        worst = worst.max((lhs - rhs).abs() / rhs);
        if d1 < 0.0 {
            return (false, f64::INFINITY);
        }
    }
    (worst <= 1e-6, worst)
}

fn gauge_covariance() -> (bool, f64) {
    let grid = make_grid(10.0, 1001).unwrap();
    let phi = MeanFieldPotential::from_values(grid.sample(|x| -3.0 * (-x * x / 4.0).exp()));
    let c = tf_constant(3);
    let base = tf_fermi_level(&phi, 2.0, c, 1e-12).unwrap();
    let mut worst: f64 = 0.0;
    for shift in [-5.0, -0.25, 0.7, 12.0] {
        let moved = tf_fermi_level(&phi.shifted(shift), 2.0, c, 1e-12).unwrap();
        worst = worst.max((moved - base - shift).abs());
    }
    (worst <= 1e-8, worst)
}

fn harmonic_oscillator() -> (bool, f64) {
    let grid = make_grid(10.0, 5001).unwrap();
    let h = assemble_hamiltonian(&MeanFieldPotential::from_values(
        grid.sample(|x| 0.5 * x * x),
    ));
    let pairs = lowest_eigenpairs(&h, 5.0);
    let worst = pairs
        .iter()
        .enumerate()
        .map(|(k, (ev, _))| (ev - (k as f64 + 0.5)).abs())
        .fold(0.0, f64::max);
    (pairs.len() == 5 && worst <= 1e-3, worst)
}

fn main() -> ExitCode {
    let grid = make_grid(15.0, 5001).unwrap();
    let wide = make_grid(30.0, 10001).unwrap();
    let profiles = [
        ChargeProfile::case1(),
        ChargeProfile::case2(),
        ChargeProfile::case3(),
    ];
    let c_tf = tf_constant(3);

    let (cases, wide_screening, dirac) = thread::scope(|s| {
        let handles: Vec<_> = profiles
            .iter()
            .map(|p| s.spawn(|| solve_case(p, &grid)))
            .collect();
        let wide_handle = s.spawn(|| {
            profiles
                .iter()
                .map(|p| {
                    let mu = evaluate(p, &wide);
                    let tf = tf_scf(&mu, &TfSettings::default()).expect("TF solve");
                    (screening_defect(&tf.rho, &mu), tf.rho)
                })
                .collect::<Vec<_>>()
        });
        let dirac_handle = s.spawn(|| {
            let mu = evaluate(&ChargeProfile::dirac(1.0, 0.05), &grid);
            tf_scf(&mu, &TfSettings::default()).expect("TF solve")
        });
        let cases: Vec<Case> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        (
            cases,
            wide_handle.join().unwrap(),
            dirac_handle.join().unwrap(),
        )
    });
    let mut report = Report { failures: 0 };

    let c1 = &cases[0];
    let n11 = weights_above(&c1.rhf.state, 1e-3);
    let g1 = largest(&c1.rhf.state);
    report.line(
        1,
        c1.rhf.converged && n11 == 11 && (1.02..=1.12).contains(&g1),
        format!("case1 rHF: {n11} weights > 1e-3 (want 11), largest {g1:.4} (want [1.02, 1.12])"),
    );

    let c2 = &cases[1];
    let g2 = largest(&c2.rhf.state);
    let rank2 = c2
        .rhf
        .state
        .weights()
        .iter()
        .filter(|&&w| w >= 1e-11)
        .count();
    report.line(
        2,
        c2.rhf.converged && (1.39..=1.49).contains(&g2) && (15..=19).contains(&rank2),
        format!("case2 rHF: largest {g2:.4} (want [1.39, 1.49]), rank at >= 1e-11 {rank2} (want 17 +- 2)"),
    );

    let c3 = &cases[2];
    let g3 = largest(&c3.rhf.state);
    let l3 = linf_rel(c3);
    report.line(
        3,
        c3.rhf.converged && (1.27..=1.37).contains(&g3) && l3 <= 5e-3,
        format!("case3: largest {g3:.4} (want [1.27, 1.37]), linf_rel {l3:.3e} (want <= 5e-3)"),
    );

    let l1 = linf_rel(c1);
    report.line(
        4,
        (3e-3..=3e-2).contains(&l1),
        format!("case1 TF vs rHF linf_rel {l1:.3e} (want [3e-3, 3e-2])"),
    );

    let narrow: Vec<f64> = cases
        .iter()
        .map(|c| screening_defect(&c.tf.rho, &c.mu))
        .collect();
    let narrow_max = narrow.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let wide_max = wide_screening
        .iter()
        .fold(0.0f64, |m, (d, _)| m.max(d.abs()));
    report.line(
        5,
        narrow_max <= 5e-2 && wide_max <= 1e-2,
        format!("TF screening max |defect|: a=15 {narrow_max:.3e} (want <= 5e-2), a=30 {wide_max:.3e} (want <= 1e-2)"),
    );

    let (_, c2_spinless) = sommerfeld_constants(c_tf);
    let fit = fit_tail(&c1.tf.rho, (5.0, 10.0), Side::Right).unwrap();
    let fit_left = fit_tail(&c1.tf.rho, (5.0, 10.0), Side::Left).unwrap();
    let rel = (fit.c_est / c2_spinless - 1.0).abs();
    let rel_left = (fit_left.c_est / c2_spinless - 1.0).abs();
    let synthetic_grid = make_grid(10.0, 2001).unwrap();
    let synthetic = synthetic_grid.sample(|x| c2_spinless / (x - 1.0).powi(6));
    let sfit = fit_tail(&synthetic, (3.0, 8.0), Side::Right).unwrap();
    let srel = (sfit.c_est / c2_spinless - 1.0)
        .abs()
        .max((sfit.x0_est - 1.0).abs());
    // same window on the a=30 box, reported only
    let wide_fit = fit_tail(&wide_screening[0].1, (5.0, 10.0), Side::Right).unwrap();
    report.line(
        6,
        rel <= 0.2 && rel_left <= 0.2 && fit.rms_residual.max(fit_left.rms_residual) <= 1e-3 && srel <= 1e-8,
        format!(
            "mu1 tail c_est/c2 - 1: right {rel:.3e}, left {rel_left:.3e} (want <= 0.2), rms {:.3e} (want <= 1e-3); synthetic {srel:.1e} (want <= 1e-8); a=30 box: c_est/c2 - 1 {:.1e}, rms {:.1e}",
            fit.rms_residual.max(fit_left.rms_residual),
            (wide_fit.c_est / c2_spinless - 1.0).abs(),
            wide_fit.rms_residual
        ),
    );

    let closed = dirac_closed_form(1.0, &grid, c_tf);
    let outer: Vec<f64> = (0..grid.len())
        .map(|i| if grid.node(i).abs() >= 1.0 { 1.0 } else { 0.0 })
        .collect();
    let diff: Vec<f64> = (0..grid.len())
        .map(|i| outer[i] * (dirac.rho.at(i) - closed.at(i)).abs())
        .collect();
    let mass: Vec<f64> = (0..grid.len()).map(|i| outer[i] * closed.at(i)).collect();
    let dirac_rel = grid.integrate_values(&diff) / grid.integrate_values(&mass);
    report.line(
        7,
        dirac.converged && dirac_rel <= 0.02,
        format!("Dirac eps=0.05 relative L1 on |x| >= 1: {dirac_rel:.3e} (want <= 2e-2)"),
    );

    let mut ordered = true;
    let mut histories = true;
    let mut gaps = Vec::new();
    for c in &cases {
        ordered &= c.rhf.energy.total >= c.tf.energy.total;
        gaps.push(c.rhf.energy.total - c.tf.energy.total);
        histories &= monotone(c.tf.history.iter().map(|h| h.energy), f64::INFINITY);
        histories &= monotone(c.rhf.history.iter().map(|h| h.energy), f64::INFINITY);
    }
    report.line(
        8,
        ordered && histories,
        format!(
            "E_rHF - E_TF per case [{}]; monotone histories {histories}",
            gaps.iter()
                .map(|g| format!("{g:.3e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );

    let iterates_hold = cases
        .iter()
        .all(|c| c.rhf.history.iter().all(|h| h.lieb_thirring.holds));
    let max_iter_ratio = cases
        .iter()
        .flat_map(|c| c.rhf.history.iter().map(|h| h.lieb_thirring.ratio))
        .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let small = make_grid(8.0, 401).unwrap();
    let mut random_hold = 0;
    let mut max_random_ratio: f64 = 0.0;
    for _ in 0..1000 {
        let check = lieb_thirring_check(&random_state(&small, &mut rng));
        random_hold += check.holds as usize;
        max_random_ratio = max_random_ratio.max(check.ratio);
    }
    report.line(
        9,
        iterates_hold && random_hold == 1000,
        format!(
            "Lieb-Thirring on SCF iterates {iterates_hold} (max ratio {max_iter_ratio:.4}), random states {random_hold}/1000 (max ratio {max_random_ratio:.4})"
        ),
    );

    let (hartree_ok, hartree_err) = hartree_identities(&mut rng);
    let mut el_ok = true;
    let mut el_worst: f64 = 0.0;
    for c in &cases {
        let tf_scaled = c.tf.el_residual / (1.0 + c.tf.fermi_level.abs());
        let rhf_scaled = c.rhf.el_residual / (1.0 + c.rhf.fermi_level.abs());
        el_worst = el_worst.max(tf_scaled).max(rhf_scaled);
        el_ok &= c.tf.converged && c.rhf.converged && tf_scaled <= 1e-6 && rhf_scaled <= 1e-6;
    }
    let (gauge_ok, gauge_err) = gauge_covariance();
    let (ho_ok, ho_err) = harmonic_oscillator();
    report.line(
        10,
        hartree_ok && el_ok && gauge_ok && ho_ok,
        format!(
            "Hartree identities {hartree_err:.1e}, EL residual / (1+|lambda|) {el_worst:.1e}, gauge {gauge_err:.1e}, oscillator {ho_err:.1e}"
        ),
    );

    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", report.failures);
        ExitCode::FAILURE
    }
}
