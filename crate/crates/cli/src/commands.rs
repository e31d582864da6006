//! Experiment drivers behind the subcommands.

use crate::manifest::Manifest;
use crate::{Cli, Command};
use anyhow::{Context, Result};
use pecd_core::anisotropy::{compute_beta_set, Precomputed};
use pecd_core::control::{
    bichromatic_map, delay_scan, dominant_frequency, principal_axis_optimize, ObjectiveMode,
    ObjectiveSpec, ParamBounds,
};
use pecd_core::field::{wigner_time_frequency, PulseTrain};
use pecd_core::model::{generate_toy_chiral, MolecularModel};
use pecd_core::observables::{
    argmax_pecd, default_theta_grid, hemisphere_average, hemisphere_average_backward, pecd_map,
};
use pecd_core::quad::linspace;
use pecd_core::units;
use serde::Deserialize;
use std::path::Path;

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Betas { model, pulses } => cmd_betas(cli, model, pulses),
        Command::Pecd { model, pulses } => cmd_pecd(cli, model, pulses),
        Command::DelayScan {
            model,
            pulses,
            cutoff_ev,
            tau_min_fs,
            tau_max_fs,
            tau_steps,
        } => cmd_delay_scan(
            cli,
            model,
            pulses,
            *cutoff_ev,
            *tau_min_fs,
            *tau_max_fs,
            *tau_steps,
        ),
        Command::BichromaticMap {
            model,
            pulses,
            omega_min_ev,
            omega_max_ev,
            omega_steps,
            phase_steps,
        } => cmd_bichromatic(
            cli,
            model,
            pulses,
            *omega_min_ev,
            *omega_max_ev,
            *omega_steps,
            *phase_steps,
        ),
        Command::Optimize {
            model,
            pulses,
            config,
        } => cmd_optimize(cli, model, pulses, config),
        Command::Verify { model } => crate::verify::run(cli, model.as_deref()),
        Command::WignerMap {
            pulses,
            time_steps,
            omega_steps,
        } => cmd_wigner(cli, pulses, *time_steps, *omega_steps),
        Command::GenModel {
            bound,
            lmax,
            grid_min_ev,
            grid_max_ev,
            grid_points,
        } => cmd_gen_model(cli, *bound, *lmax, *grid_min_ev, *grid_max_ev, *grid_points),
    }
}

fn load_inputs(
    manifest: &mut Manifest,
    model_path: &Path,
    pulses_path: &Path,
) -> Result<(MolecularModel, PulseTrain)> {
    let model_text = manifest.absorb_file(model_path)?;
    let model = MolecularModel::from_json(&model_text)
        .with_context(|| format!("loading model {}", model_path.display()))?;
    let pulse_text = manifest.absorb_file(pulses_path)?;
    let train = PulseTrain::from_json(&pulse_text)
        .with_context(|| format!("loading pulses {}", pulses_path.display()))?;
    Ok((model, train))
}

fn cmd_betas(cli: &Cli, model_path: &Path, pulses_path: &Path) -> Result<i32> {
    let mut manifest = Manifest::new("betas", cli.seed, &cli.out)?;
    let (model, train) = load_inputs(&mut manifest, model_path, pulses_path)?;
    let pre = Precomputed::build(&model, &train)?;
    for (mu0, tag) in [(1i32, "plus"), (-1, "minus")] {
        let set = compute_beta_set(&model, &pre, mu0);
        let mut csv = set.one_photon.to_csv();
        csv.push_str(
            set.two_photon
                .to_csv()
                .trim_start_matches("pathway,L,M,energy_ev,re,im\n"),
        );
        csv.push_str(
            set.interference
                .to_csv()
                .trim_start_matches("pathway,L,M,energy_ev,re,im\n"),
        );
        manifest.write_artifact(&format!("betas_{tag}.csv"), &csv)?;
        manifest.write_artifact(&format!("betas_{tag}.json"), &set.to_json())?;
    }
    manifest.record_timing("betas");
    manifest.finish()?;
    Ok(0)
}

fn cmd_pecd(cli: &Cli, model_path: &Path, pulses_path: &Path) -> Result<i32> {
    let mut manifest = Manifest::new("pecd", cli.seed, &cli.out)?;
    let (model, train) = load_inputs(&mut manifest, model_path, pulses_path)?;
    let betas = pecd_core::anisotropy::compute_all(&model, &train, 1)?;
    let map = pecd_map(&betas, &default_theta_grid())?;
    manifest.write_artifact("pecd_map.csv", &map.to_csv())?;
    manifest.write_artifact("pecd_map.json", &map.to_json())?;
    manifest.write_artifact("pecd_map_matrix.dat", &map.to_gnuplot_matrix())?;

    let forward = hemisphere_average(&map);
    let backward = hemisphere_average_backward(&map);
    let mut hemi = String::from("energy_ev,rho_forward,rho_backward\n");
    for (ie, &e) in map.energies.iter().enumerate() {
        hemi.push_str(&format!(
            "{:.11e},{:.11e},{:.11e}\n",
            e * units::HARTREE_EV,
            forward[ie],
            backward[ie]
        ));
    }
    manifest.write_artifact("hemisphere.csv", &hemi)?;

    let (ie, it, value) = argmax_pecd(&map);
    let summary = serde_json::json!({
        "normalization": map.normalization,
        "max_abs_pecd_percent": value,
        "at_energy_ev": map.energies[ie] * units::HARTREE_EV,
        "at_theta_deg": map.thetas[it].to_degrees(),
    });
    manifest.write_artifact("summary.json", &serde_json::to_string_pretty(&summary)?)?;
    manifest.record_timing("pecd");
    manifest.finish()?;
    Ok(0)
}

fn cmd_delay_scan(
    cli: &Cli,
    model_path: &Path,
    pulses_path: &Path,
    cutoff_ev: f64,
    tau_min_fs: f64,
    tau_max_fs: f64,
    tau_steps: usize,
) -> Result<i32> {
    let mut manifest = Manifest::new("delay-scan", cli.seed, &cli.out)?;
    manifest.absorb(
        "scan",
        &format!("{cutoff_ev},{tau_min_fs},{tau_max_fs},{tau_steps}"),
    );
    let (model, train) = load_inputs(&mut manifest, model_path, pulses_path)?;
    let taus: Vec<f64> = linspace(
        units::fs_to_au(tau_min_fs),
        units::fs_to_au(tau_max_fs),
        tau_steps.max(2),
    );
    let scan = delay_scan(&model, &train, units::ev_to_au(cutoff_ev), &taus)?;
    let mut csv = String::from("tau_fs,max_abs_pecd_percent\n");
    for &(tau, v) in &scan {
        csv.push_str(&format!("{:.11e},{:.11e}\n", units::au_to_fs(tau), v));
    }
    manifest.write_artifact("delay_scan.csv", &csv)?;
    let values: Vec<f64> = scan.iter().map(|&(_, v)| v).collect();
    let step = taus[1] - taus[0];
    let summary = serde_json::json!({
        "dominant_frequency_ev": dominant_frequency(step, &values) * units::HARTREE_EV,
        "mean_percent": values.iter().sum::<f64>() / values.len() as f64,
    });
    manifest.write_artifact("summary.json", &serde_json::to_string_pretty(&summary)?)?;
    manifest.record_timing("scan");
    manifest.finish()?;
    Ok(0)
}

fn cmd_bichromatic(
    cli: &Cli,
    model_path: &Path,
    pulses_path: &Path,
    omega_min_ev: f64,
    omega_max_ev: f64,
    omega_steps: usize,
    phase_steps: usize,
) -> Result<i32> {
    let mut manifest = Manifest::new("bichromatic-map", cli.seed, &cli.out)?;
    manifest.absorb(
        "grid",
        &format!("{omega_min_ev},{omega_max_ev},{omega_steps},{phase_steps}"),
    );
    let (model, template) = load_inputs(&mut manifest, model_path, pulses_path)?;
    let omegas = linspace(
        units::ev_to_au(omega_min_ev),
        units::ev_to_au(omega_max_ev),
        omega_steps.max(2),
    );
    let phases = linspace(0.0, 2.0 * std::f64::consts::PI, phase_steps.max(2));
    let map = bichromatic_map(&model, &omegas, &phases, &template)?;
    for (name, csv) in map.to_csv_panels() {
        manifest.write_artifact(&format!("bichromatic_{name}.csv"), &csv)?;
    }
    manifest.record_timing("map");
    manifest.finish()?;
    Ok(0)
}

/// Optimizer configuration in laboratory units.
#[derive(Deserialize)]
struct OptimizeConfig {
    objective: ObjectiveJson,
    #[serde(default = "default_intensity_cap")]
    intensity_cap_wcm2: f64,
    #[serde(default = "default_yield_cap")]
    yield_cap: f64,
    #[serde(default = "default_budget")]
    budget: usize,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default)]
    frequency_locks_ev: Vec<Option<f64>>,
    #[serde(default)]
    min_delay_gap_fs: Option<f64>,
    #[serde(default)]
    bounds: Option<BoundsJson>,
}

#[derive(Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum ObjectiveJson {
    FixedEnergy { energy_ev: f64 },
    FreeEnergy,
}

#[derive(Deserialize)]
struct BoundsJson {
    amplitude_au: (f64, f64),
    carrier_ev: (f64, f64),
    cep_rad: (f64, f64),
    fwhm_fs: (f64, f64),
    delay_fs: (f64, f64),
}

fn default_intensity_cap() -> f64 {
    units::DEFAULT_INTENSITY_CAP_WCM2
}
fn default_yield_cap() -> f64 {
    units::DEFAULT_YIELD_CAP
}
fn default_budget() -> usize {
    2000
}
fn default_tolerance() -> f64 {
    1e-4
}

fn cmd_optimize(
    cli: &Cli,
    model_path: &Path,
    pulses_path: &Path,
    config_path: &Path,
) -> Result<i32> {
    let mut manifest = Manifest::new("optimize", cli.seed, &cli.out)?;
    let (model, initial) = load_inputs(&mut manifest, model_path, pulses_path)?;
    let config_text = manifest.absorb_file(config_path)?;
    let config: OptimizeConfig =
        serde_json::from_str(&config_text).context("parsing optimizer config")?;

    let mode = match config.objective {
        ObjectiveJson::FixedEnergy { energy_ev } => ObjectiveMode::FixedEnergy {
            energy: units::ev_to_au(energy_ev),
        },
        ObjectiveJson::FreeEnergy => ObjectiveMode::FreeEnergy,
    };
    let mut spec = ObjectiveSpec::new(mode);
    spec.intensity_cap_wcm2 = config.intensity_cap_wcm2;
    spec.yield_cap = config.yield_cap;
    spec.frequency_locks = config
        .frequency_locks_ev
        .iter()
        .map(|o| o.map(units::ev_to_au))
        .collect();
    spec.min_delay_gap = config.min_delay_gap_fs.map(units::fs_to_au);
    if let Some(b) = &config.bounds {
        spec.bounds = ParamBounds {
            amplitude: b.amplitude_au,
            carrier: (
                units::ev_to_au(b.carrier_ev.0),
                units::ev_to_au(b.carrier_ev.1),
            ),
            cep: b.cep_rad,
            fwhm: (units::fs_to_au(b.fwhm_fs.0), units::fs_to_au(b.fwhm_fs.1)),
            delay: (units::fs_to_au(b.delay_fs.0), units::fs_to_au(b.delay_fs.1)),
        };
    }

    let outcome =
        principal_axis_optimize(&model, &spec, &initial, config.budget, config.tolerance)?;
    manifest.write_artifact(
        "optimized_pulses.json",
        &outcome.train.to_json(cli.units.system()),
    )?;
    let history = serde_json::json!({
        "evaluations": outcome.state.evaluations,
        "best_value_percent": outcome.state.best_value,
        "records": outcome
            .state
            .history
            .iter()
            .map(|r| serde_json::json!({"index": r.index, "value": r.value, "feasible": r.feasible}))
            .collect::<Vec<_>>(),
        "best_trace": outcome.state.best_trace,
    });
    manifest.write_artifact("history.json", &serde_json::to_string_pretty(&history)?)?;
    let eval = pecd_core::control::evaluate_train(&model, &outcome.train)?;
    let (ie, it, value) = argmax_pecd(&eval.map);
    let summary = serde_json::json!({
        "best_objective_percent": outcome.state.best_value,
        "max_abs_pecd_percent": value.abs(),
        "at_energy_ev": eval.map.energies[ie] * units::HARTREE_EV,
        "at_theta_deg": eval.map.thetas[it].to_degrees(),
        "peak_intensity_wcm2": outcome.train.peak_intensity_wcm2(),
        "ionization_yield": eval.ionization_yield,
    });
    manifest.write_artifact("summary.json", &serde_json::to_string_pretty(&summary)?)?;
    manifest.record_timing("optimize");
    manifest.finish()?;
    Ok(0)
}

fn cmd_wigner(cli: &Cli, pulses_path: &Path, time_steps: usize, omega_steps: usize) -> Result<i32> {
    let mut manifest = Manifest::new("wigner-map", cli.seed, &cli.out)?;
    let pulse_text = manifest.absorb_file(pulses_path)?;
    let train = PulseTrain::from_json(&pulse_text)?;
    if train.is_empty() {
        anyhow::bail!("cannot map an empty train");
    }
    let sigma_max = train
        .pulses
        .iter()
        .map(|p| p.sigma())
        .fold(0.0f64, f64::max);
    let t_lo = train
        .pulses
        .iter()
        .map(|p| p.delay - 5.0 * sigma_max)
        .fold(f64::INFINITY, f64::min);
    let t_hi = train
        .pulses
        .iter()
        .map(|p| p.delay + 5.0 * sigma_max)
        .fold(f64::NEG_INFINITY, f64::max);
    let carriers: Vec<f64> = train.pulses.iter().map(|p| p.carrier).collect();
    let w_lo = carriers.iter().cloned().fold(f64::INFINITY, f64::min) * 0.6;
    let w_hi = carriers.iter().cloned().fold(0.0f64, f64::max) * 1.4;
    let times = linspace(t_lo, t_hi, time_steps.max(2));
    let omegas = linspace(w_lo, w_hi, omega_steps.max(2));
    let map = wigner_time_frequency(&train, &times, &omegas);

    let mut matrix = String::new();
    matrix.push_str(&format!("{}", map.omegas.len()));
    for &w in &map.omegas {
        matrix.push_str(&format!(" {:.8e}", w * units::HARTREE_EV));
    }
    matrix.push('\n');
    for (it, &t) in map.times.iter().enumerate() {
        matrix.push_str(&format!("{:.8e}", units::au_to_fs(t)));
        for iw in 0..map.omegas.len() {
            matrix.push_str(&format!(" {:.8e}", map.value(it, iw)));
        }
        matrix.push('\n');
    }
    manifest.write_artifact("wigner_map.dat", &matrix)?;

    let marginal = map.time_marginal();
    let mut csv = String::from("time_fs,marginal\n");
    for (it, &t) in map.times.iter().enumerate() {
        csv.push_str(&format!(
            "{:.8e},{:.11e}\n",
            units::au_to_fs(t),
            marginal[it]
        ));
    }
    manifest.write_artifact("wigner_marginal.csv", &csv)?;
    manifest.record_timing("wigner");
    manifest.finish()?;
    Ok(0)
}

fn cmd_gen_model(
    cli: &Cli,
    bound: usize,
    lmax: u32,
    grid_min_ev: f64,
    grid_max_ev: f64,
    grid_points: usize,
) -> Result<i32> {
    let mut manifest = Manifest::new("gen-model", cli.seed, &cli.out)?;
    manifest.absorb(
        "gen",
        &format!("{bound},{lmax},{grid_min_ev},{grid_max_ev},{grid_points}"),
    );
    let grid = linspace(
        units::ev_to_au(grid_min_ev),
        units::ev_to_au(grid_max_ev),
        grid_points.max(2),
    );
    let model = generate_toy_chiral(cli.seed, bound, lmax, &grid);
    manifest.write_artifact("model.json", &model.to_json())?;
    manifest.record_timing("gen");
    manifest.finish()?;
    Ok(0)
}
