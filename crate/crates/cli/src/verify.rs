//! The `verify` subcommand: oracle-versus-analytic comparisons and symmetry
//! checks with a pass/fail report.

use crate::manifest::Manifest;
use crate::Cli;
use anyhow::Result;
use pecd_core::anisotropy::{compute_beta_set, Precomputed};
use pecd_core::field::{Polarization, PulseParams, PulseTrain};
use pecd_core::model::{generate_toy_chiral, mirror_achiralize, MolecularModel};
use pecd_core::observables::{default_theta_grid, momentum_distribution, pecd_map};
use pecd_core::oracle::{quadrature_average, AngularGrid, EulerGrid, ProjectionPart};
use pecd_core::quad::linspace;
use std::fmt::Write as _;
use std::path::Path;

struct Report {
    lines: Vec<(String, bool)>,
}

impl Report {
    fn new() -> Self {
        Report { lines: Vec::new() }
    }

    fn check(&mut self, name: &str, residual: f64, tolerance: f64) {
        let pass = residual < tolerance;
        let line = format!(
            "{} {name}: residual {residual:.3e} (tolerance {tolerance:.1e})",
            if pass { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        self.lines.push((line, pass));
    }

    fn all_passed(&self) -> bool {
        self.lines.iter().all(|(_, p)| *p)
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for (line, _) in &self.lines {
            writeln!(out, "{line}").unwrap();
        }
        writeln!(
            out,
            "{}",
            if self.all_passed() {
                "verification: all checks passed"
            } else {
                "verification: FAILURES present"
            }
        )
        .unwrap();
        out
    }
}

pub fn run(cli: &Cli, model_path: Option<&Path>) -> Result<i32> {
    let mut manifest = Manifest::new("verify", cli.seed, &cli.out)?;
    let model = match model_path {
        Some(path) => {
            let text = manifest.absorb_file(path)?;
            MolecularModel::from_json(&text)?
        }
        None => generate_toy_chiral(cli.seed, 2, 2, &linspace(0.06, 0.4, 6)),
    };
    let ip = model.ionization_potential();
    let train = PulseTrain::new(
        vec![
            PulseParams {
                amplitude: 1.2e-3,
                carrier: ip + 0.22,
                cep: 0.4,
                fwhm: 420.0,
                delay: 0.0,
            },
            PulseParams {
                amplitude: 1.2e-3,
                carrier: (ip + 0.22) / 2.0,
                cep: -0.3,
                fwhm: 420.0,
                delay: 0.0,
            },
        ],
        Polarization::LeftCircular,
    );
    let mut report = Report::new();

    // analytic tables against the quadrature oracle
    let pre = Precomputed::build(&model, &train)?;
    let plus = compute_beta_set(&model, &pre, 1);
    let minus = compute_beta_set(&model, &pre, -1);
    let oracle = quadrature_average(
        &model,
        &pre.tensor,
        &pre.integrals,
        1,
        &EulerGrid::default16(),
        &AngularGrid::new(16, 16),
    );
    let scale = |t: &pecd_core::anisotropy::BetaTable| {
        t.values
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(1e-300, f64::max)
    };
    let mut worst_one: f64 = 0.0;
    for l in 0..=2u32 {
        let numeric = oracle.project(ProjectionPart::OnePhoton, l, 0);
        for ie in 0..model.n_energies() {
            worst_one = worst_one.max((plus.one_photon.get(l, 0, ie) - numeric[ie]).norm());
        }
    }
    report.check(
        "one-photon beta vs quadrature",
        worst_one / scale(&plus.one_photon),
        1e-6,
    );
    let mut worst_two: f64 = 0.0;
    for l in 0..=4u32 {
        let numeric = oracle.project(ProjectionPart::TwoPhoton, l, 0);
        for ie in 0..model.n_energies() {
            worst_two = worst_two.max((plus.two_photon.get(l, 0, ie) - numeric[ie]).norm());
        }
    }
    report.check(
        "two-photon beta vs quadrature",
        worst_two / scale(&plus.two_photon),
        1e-6,
    );
    let mut worst_int: f64 = 0.0;
    for l in 1..=3u32 {
        let numeric = oracle.project(ProjectionPart::Interference, l, 1);
        for ie in 0..model.n_energies() {
            worst_int = worst_int.max((plus.interference.get(l, 1, ie) - numeric[ie]).norm());
        }
    }
    report.check(
        "interference beta vs quadrature",
        worst_int / scale(&plus.interference),
        1e-6,
    );

    // polarization reversal
    let mut worst_rev: f64 = 0.0;
    for (tp, tm) in [
        (&plus.one_photon, &minus.one_photon),
        (&plus.two_photon, &minus.two_photon),
    ] {
        let sc = scale(tp);
        for &(l, _) in &tp.channels {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            for ie in 0..model.n_energies() {
                worst_rev = worst_rev.max((tm.get(l, 0, ie) - tp.get(l, 0, ie) * sign).norm() / sc);
            }
        }
    }
    report.check("polarization-reversal relations", worst_rev, 1e-10);

    // achiral null
    let achiral = mirror_achiralize(&model);
    let betas_a = pecd_core::anisotropy::compute_all(&achiral, &train, 1)?;
    let map_a = pecd_map(&betas_a, &default_theta_grid())?;
    let worst_null = map_a.values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())) / 100.0;
    report.check("achiral-model null map", worst_null, 1e-10);

    // helicity-subtraction identity
    let map = pecd_map(&plus, &default_theta_grid())?;
    let phi = std::f64::consts::FRAC_PI_2;
    let peak = map
        .values
        .iter()
        .fold(1e-300f64, |acc, &v| acc.max(v.abs()));
    let mut worst_sub: f64 = 0.0;
    for (ie, &e) in map.energies.iter().enumerate() {
        for (it, &theta) in map.thetas.iter().enumerate() {
            let direct = (momentum_distribution(&plus, e, theta, phi)?
                - momentum_distribution(&minus, e, theta, phi)?)
                * 100.0
                / map.normalization;
            worst_sub = worst_sub.max((direct - map.value(ie, it)).abs() / peak);
        }
    }
    report.check("helicity-subtraction identity", worst_sub, 1e-10);

    // amplitude scaling laws
    let betas2 = pecd_core::anisotropy::compute_all(&model, &train.scaled(2.0), 1)?;
    let mut worst_scaling: f64 = 0.0;
    for ie in 0..model.n_energies() {
        for l in 0..=2u32 {
            let x = plus.one_photon.get(l, 0, ie);
            worst_scaling = worst_scaling
                .max((betas2.one_photon.get(l, 0, ie) - x * 4.0).norm() / x.norm().max(1e-30));
        }
        for l in 0..=4u32 {
            let x = plus.two_photon.get(l, 0, ie);
            worst_scaling = worst_scaling
                .max((betas2.two_photon.get(l, 0, ie) - x * 16.0).norm() / x.norm().max(1e-30));
        }
        for l in 1..=3u32 {
            let x = plus.interference.get(l, 1, ie);
            worst_scaling = worst_scaling
                .max((betas2.interference.get(l, 1, ie) - x * 8.0).norm() / x.norm().max(1e-30));
        }
    }
    report.check("amplitude scaling (ε², ε⁴, ε³)", worst_scaling, 1e-12);

    manifest.write_artifact("verify_report.txt", &report.render())?;
    manifest.record_timing("verify");
    manifest.finish()?;
    println!(
        "{}",
        if report.all_passed() {
            "verification: all checks passed"
        } else {
            "verification: FAILURES present"
        }
    );
    Ok(if report.all_passed() { 0 } else { 1 })
}
