//! Cross-validation of the analytic anisotropy tables against brute-force
//! Euler-angle quadrature.

use pecd_core::anisotropy::{compute_beta_set, Precomputed};
use pecd_core::field::{Polarization, PulseParams, PulseTrain};
use pecd_core::model::generate_toy_chiral;
use pecd_core::oracle::{quadrature_average, AngularGrid, EulerGrid, ProjectionPart};
use pecd_core::quad::linspace;

#[test]
fn analytic_betas_match_quadrature_average() {
    let model = generate_toy_chiral(301, 1, 2, &linspace(0.08, 0.4, 4));
    let ip = model.ionization_potential();
    let train = PulseTrain::new(
        vec![
            PulseParams {
                amplitude: 1.5e-3,
                carrier: ip + 0.2,
                cep: 0.3,
                fwhm: 420.0,
                delay: 0.0,
            },
            PulseParams {
                amplitude: 1.5e-3,
                carrier: (ip + 0.2) / 2.0,
                cep: -0.2,
                fwhm: 420.0,
                delay: 0.0,
            },
        ],
        Polarization::LeftCircular,
    );
    let pre = Precomputed::build(&model, &train).unwrap();
    let betas = compute_beta_set(&model, &pre, 1);
    let euler = EulerGrid::new(14, 14, 14);
    let angular = AngularGrid::new(16, 16);
    let oracle = quadrature_average(&model, &pre.tensor, &pre.integrals, 1, &euler, &angular);

    let mut worst: (f64, String) = (0.0, String::new());
    let scale_of = |rows: &Vec<Vec<num_complex::Complex64>>| -> f64 {
        rows.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    };
    // one-photon
    let sc = scale_of(&betas.one_photon.values);
    for l in 0..=2u32 {
        let numeric = oracle.project(ProjectionPart::OnePhoton, l, 0);
        for ie in 0..model.n_energies() {
            let a = betas.one_photon.get(l, 0, ie);
            let d = (a - numeric[ie]).norm() / sc;
            if d > worst.0 {
                worst = (d, format!("1ph L={l} ie={ie}: {a} vs {}", numeric[ie]));
            }
        }
    }
    // two-photon
    let sc = scale_of(&betas.two_photon.values);
    for l in 0..=4u32 {
        let numeric = oracle.project(ProjectionPart::TwoPhoton, l, 0);
        for ie in 0..model.n_energies() {
            let a = betas.two_photon.get(l, 0, ie);
            let d = (a - numeric[ie]).norm() / sc;
            if d > worst.0 {
                worst = (d, format!("2ph L={l} ie={ie}: {a} vs {}", numeric[ie]));
            }
        }
    }
    // interference: the distribution carries β e^{iφ} + c.c., projection at
    // M=+1 isolates β itself
    let sc = scale_of(&betas.interference.values);
    for l in 1..=3u32 {
        let numeric = oracle.project(ProjectionPart::Interference, l, 1);
        for ie in 0..model.n_energies() {
            let a = betas.interference.get(l, 1, ie);
            let d = (a - numeric[ie]).norm() / sc;
            if d > worst.0 {
                worst = (d, format!("int L={l} ie={ie}: {a} vs {}", numeric[ie]));
            }
        }
    }
    eprintln!("worst relative deviation: {:.3e} ({})", worst.0, worst.1);
    assert!(worst.0 < 1e-6, "worst deviation {} at {}", worst.0, worst.1);
}

#[test]
fn pecd_map_matches_oracle_subtraction() {
    // assemble the dichroism from the brute-force averaged distributions of
    // both helicities and compare against the analytic map on the oracle's
    // own angular nodes
    let model = generate_toy_chiral(301, 1, 2, &linspace(0.08, 0.4, 4));
    let ip = model.ionization_potential();
    let train = PulseTrain::new(
        vec![
            PulseParams {
                amplitude: 1.5e-3,
                carrier: ip + 0.2,
                cep: 0.3,
                fwhm: 420.0,
                delay: 0.0,
            },
            PulseParams {
                amplitude: 1.5e-3,
                carrier: (ip + 0.2) / 2.0,
                cep: -0.2,
                fwhm: 420.0,
                delay: 0.0,
            },
        ],
        Polarization::LeftCircular,
    );
    let pre = Precomputed::build(&model, &train).unwrap();
    let plus = compute_beta_set(&model, &pre, 1);
    let map =
        pecd_core::observables::pecd_map(&plus, &pecd_core::observables::default_theta_grid())
            .unwrap();
    let euler = EulerGrid::new(14, 14, 14);
    let angular = AngularGrid::new(16, 16);
    let oracle_plus =
        quadrature_average(&model, &pre.tensor, &pre.integrals, 1, &euler, &angular);
    let oracle_minus =
        quadrature_average(&model, &pre.tensor, &pre.integrals, -1, &euler, &angular);
    // φ grid node 4 of 16 is exactly π/2
    let iphi = 4;
    assert!((angular.phis[iphi] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    let nphi = angular.phis.len();
    let scale = 100.0 / map.normalization;
    let peak = map.values.iter().fold(1e-300f64, |a, &v| a.max(v.abs()));
    for ie in 0..model.n_energies() {
        for (it, &theta) in angular.thetas.iter().enumerate() {
            let ia = it * nphi + iphi;
            let oracle_pecd =
                (oracle_plus.total(ie, ia) - oracle_minus.total(ie, ia)) * scale;
            let analytic = map.at_angle(ie, theta);
            assert!(
                (oracle_pecd - analytic).abs() <= 1e-6 * peak,
                "ie={ie} theta={theta}: oracle {oracle_pecd} vs analytic {analytic}"
            );
        }
    }
}
