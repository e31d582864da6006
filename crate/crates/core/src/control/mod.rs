//! Control objectives, constraints, the derivative-free optimizer, and the
//! scan experiments: spectral-delay scans, bichromatic frequency/phase maps
//! and multi-REMPI setups.

mod praxis;

pub use praxis::{principal_axis_maximize, EvalRecord, OptimizerState};

use crate::anisotropy::{compute_beta_set, BetaSet, Precomputed};
use crate::error::{Error, Result};
use crate::field::{apply_spectral_delay, PulseParams, PulseTrain};
use crate::model::MolecularModel;
use crate::observables::{argmax_pecd, default_theta_grid, ionization_yield, pecd_map, PecdMap};
use crate::units;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// What the objective maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// max over θ of |PECD| at one photoelectron energy (a.u.).
    FixedEnergy { energy: f64 },
    /// max over (ε_k, θ) of |PECD|.
    FreeEnergy,
}

/// Box bounds applied per pulse-parameter kind (atomic units).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ParamBounds {
    pub amplitude: (f64, f64),
    pub carrier: (f64, f64),
    pub cep: (f64, f64),
    pub fwhm: (f64, f64),
    pub delay: (f64, f64),
}

impl Default for ParamBounds {
    fn default() -> Self {
        ParamBounds {
            amplitude: (0.0, 4e-3),
            carrier: (0.02, 1.2),
            cep: (-2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI),
            fwhm: (60.0, 2400.0),
            delay: (-4000.0, 4000.0),
        }
    }
}

/// Objective definition plus the constraint set.
#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    pub mode: ObjectiveMode,
    /// Peak-intensity cap in W/cm².
    pub intensity_cap_wcm2: f64,
    /// Cap on the total ionization probability proxy.
    pub yield_cap: f64,
    /// Per-pulse carrier locks: `Some(ω)` pins the carrier, `None` frees it.
    pub frequency_locks: Vec<Option<f64>>,
    pub bounds: ParamBounds,
    /// Minimum pairwise separation of pulse centers, enforcing a
    /// time-separated (pump-probe) layout when set.
    pub min_delay_gap: Option<f64>,
}

impl ObjectiveSpec {
    pub fn new(mode: ObjectiveMode) -> Self {
        ObjectiveSpec {
            mode,
            intensity_cap_wcm2: units::DEFAULT_INTENSITY_CAP_WCM2,
            yield_cap: units::DEFAULT_YIELD_CAP,
            frequency_locks: Vec::new(),
            bounds: ParamBounds::default(),
            min_delay_gap: None,
        }
    }
}

/// Map coefficients of the μ0 = +1 tables interpolated to one energy,
/// giving |PECD| maximized over θ analytically on the 181-point grid.
fn max_abs_pecd_at_energy(map: &PecdMap, epsilon: f64) -> Result<f64> {
    let grid = &map.energies;
    if epsilon < grid[0] || epsilon > grid[grid.len() - 1] {
        return Err(Error::Range(format!(
            "objective energy {epsilon} outside the model grid"
        )));
    }
    let hi = grid
        .partition_point(|&e| e < epsilon)
        .min(grid.len() - 1)
        .max(1);
    let lo = hi - 1;
    let t = (epsilon - grid[lo]) / (grid[hi] - grid[lo]);
    let c1 = map.coeff_p1[lo] + (map.coeff_p1[hi] - map.coeff_p1[lo]) * t;
    let c3 = map.coeff_p3[lo] + (map.coeff_p3[hi] - map.coeff_p3[lo]) * t;
    let cs = map.coeff_sin2[lo] + (map.coeff_sin2[hi] - map.coeff_sin2[lo]) * t;
    let mut best = 0.0f64;
    for &theta in &map.thetas {
        let x = theta.cos();
        let v = c1 * crate::angular::assoc_legendre_unchecked(1, 0, x)
            + c3 * crate::angular::assoc_legendre_unchecked(3, 0, x)
            + cs * (2.0 * theta).sin();
        best = best.max(v.abs());
    }
    Ok(best)
}

/// End-to-end evaluation products of one candidate train.
pub struct Evaluation {
    pub betas: BetaSet,
    pub map: PecdMap,
    pub ionization_yield: f64,
}

/// Full pipeline for the μ0 = +1 polarization.
pub fn evaluate_train(model: &MolecularModel, train: &PulseTrain) -> Result<Evaluation> {
    let pre = Precomputed::build(model, train)?;
    let betas = compute_beta_set(model, &pre, 1);
    let map = pecd_map(&betas, &default_theta_grid())?;
    let yield_proxy = ionization_yield(&betas);
    Ok(Evaluation {
        betas,
        map,
        ionization_yield: yield_proxy,
    })
}

/// Objective at a fixed photoelectron energy: max over θ of |PECD(ε*, θ)|,
/// in percent of the peak intensity. Constraint violations yield the
/// rejection value 0.
pub fn objective_gamma(model: &MolecularModel, train: &PulseTrain, spec: &ObjectiveSpec) -> f64 {
    let ObjectiveMode::FixedEnergy { energy } = spec.mode else {
        return objective_gamma_prime(model, train, spec);
    };
    match constrained_evaluation(model, train, spec) {
        Some(eval) => max_abs_pecd_at_energy(&eval.map, energy).unwrap_or(0.0),
        None => 0.0,
    }
}

/// Objective over the full map: max over (ε_k, θ) of |PECD|, in percent.
pub fn objective_gamma_prime(
    model: &MolecularModel,
    train: &PulseTrain,
    spec: &ObjectiveSpec,
) -> f64 {
    match constrained_evaluation(model, train, spec) {
        Some(eval) => argmax_pecd(&eval.map).2.abs(),
        None => 0.0,
    }
}

/// Evaluation gated by the constraint set; `None` marks rejection.
fn constrained_evaluation(
    model: &MolecularModel,
    train: &PulseTrain,
    spec: &ObjectiveSpec,
) -> Option<Evaluation> {
    if train.check_intensity_cap(spec.intensity_cap_wcm2).is_err() {
        return None;
    }
    if let Some(gap) = spec.min_delay_gap {
        for (i, a) in train.pulses.iter().enumerate() {
            for b in train.pulses.iter().skip(i + 1) {
                if (a.delay - b.delay).abs() < gap {
                    return None;
                }
            }
        }
    }
    let eval = evaluate_train(model, train).ok()?;
    if eval.ionization_yield > spec.yield_cap {
        return None;
    }
    Some(eval)
}

// ---------------------------------------------------------------------------
// Parameter vector encoding
// ---------------------------------------------------------------------------

/// Mapping between the optimizer vector and pulse-train parameters,
/// honoring frequency locks.
struct Encoding {
    template: PulseTrain,
    locks: Vec<Option<f64>>,
    /// (pulse index, field kind) per vector slot; kinds: 0 amplitude,
    /// 1 carrier, 2 cep, 3 fwhm, 4 delay.
    slots: Vec<(usize, u8)>,
}

impl Encoding {
    fn new(template: &PulseTrain, spec: &ObjectiveSpec) -> Encoding {
        let mut locks = spec.frequency_locks.clone();
        locks.resize(template.pulses.len(), None);
        // block-ordered slots: amplitudes, free carriers, ceps, fwhms, delays
        let mut slots = Vec::new();
        for kind in 0..5u8 {
            for (ip, lock) in locks.iter().enumerate() {
                if kind == 1 && lock.is_some() {
                    continue;
                }
                slots.push((ip, kind));
            }
        }
        Encoding {
            template: template.clone(),
            locks,
            slots,
        }
    }

    fn blocks(&self) -> Vec<Vec<usize>> {
        (0..5u8)
            .map(|kind| {
                self.slots
                    .iter()
                    .enumerate()
                    .filter(|(_, &(_, k))| k == kind)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect()
    }

    fn encode(&self) -> Vec<f64> {
        self.slots
            .iter()
            .map(|&(ip, kind)| {
                let p = &self.template.pulses[ip];
                match kind {
                    0 => p.amplitude,
                    1 => p.carrier,
                    2 => p.cep,
                    3 => p.fwhm,
                    _ => p.delay,
                }
            })
            .collect()
    }

    fn bounds(&self, b: &ParamBounds) -> (Vec<f64>, Vec<f64>) {
        let pick = |kind: u8| match kind {
            0 => b.amplitude,
            1 => b.carrier,
            2 => b.cep,
            3 => b.fwhm,
            _ => b.delay,
        };
        let lower = self.slots.iter().map(|&(_, k)| pick(k).0).collect();
        let upper = self.slots.iter().map(|&(_, k)| pick(k).1).collect();
        (lower, upper)
    }

    fn decode(&self, x: &[f64]) -> PulseTrain {
        let mut train = self.template.clone();
        for (p, lock) in train.pulses.iter_mut().zip(&self.locks) {
            if let Some(w) = lock {
                p.carrier = *w;
            }
        }
        for (&v, &(ip, kind)) in x.iter().zip(&self.slots) {
            let p = &mut train.pulses[ip];
            match kind {
                0 => p.amplitude = v,
                1 => p.carrier = v,
                2 => p.cep = v,
                3 => p.fwhm = v,
                _ => p.delay = v,
            }
        }
        train
    }
}

/// Outcome of a pulse optimization run.
pub struct OptimizationOutcome {
    pub train: PulseTrain,
    pub state: OptimizerState,
}

/// Maximizes the control objective over the train parameters with the
/// block-sequential principal-axis scheme.
///
/// The seed is recorded for reproducibility; the optimizer itself is fully
/// deterministic, so identical (seed, budget, initial) runs produce
/// identical histories.
pub fn principal_axis_optimize(
    model: &MolecularModel,
    spec: &ObjectiveSpec,
    initial: &PulseTrain,
    budget: usize,
    tol: f64,
) -> Result<OptimizationOutcome> {
    if budget == 0 {
        return Err(Error::Domain("optimizer budget must be at least 1".into()));
    }
    if spec.frequency_locks.len() > initial.pulses.len() {
        return Err(Error::Domain(format!(
            "{} frequency locks for {} pulses",
            spec.frequency_locks.len(),
            initial.pulses.len()
        )));
    }
    if let ObjectiveMode::FixedEnergy { energy } = spec.mode {
        let grid = &model.energy_grid;
        if energy < grid[0] || energy > grid[grid.len() - 1] {
            return Err(Error::Range(format!(
                "objective energy {energy} outside the model grid [{}, {}]",
                grid[0],
                grid[grid.len() - 1]
            )));
        }
    }
    initial.check_intensity_cap(spec.intensity_cap_wcm2)?;
    let encoding = Encoding::new(initial, spec);
    let x0 = encoding.encode();
    let (lower, upper) = encoding.bounds(&spec.bounds);
    let blocks = encoding.blocks();
    let objective = |x: &[f64]| -> (f64, bool) {
        let train = encoding.decode(x);
        let value = objective_gamma(model, &train, spec);
        // rejection value 0 flags infeasible candidates; feasible zeros are
        // indistinguishable for the maximization and marked feasible
        let feasible = constrained_evaluation(model, &train, spec).is_some();
        (value, feasible)
    };
    let state = principal_axis_maximize(objective, &x0, &lower, &upper, &blocks, budget, tol);
    let train = encoding.decode(&state.best_parameters);
    Ok(OptimizationOutcome { train, state })
}

/// Multi-REMPI setup at target energy ε*: `n` two-photon pathways, each a
/// (bound excitation, ionization) frequency pair locked to
/// ω_j = ε_r - ε_HOMO and ω_{j+n} = ε* + IP - ω_j, all other parameters
/// free.
pub fn multi_rempi_setup(
    model: &MolecularModel,
    target_energy: f64,
    n_pathways: usize,
) -> Result<(ObjectiveSpec, PulseTrain)> {
    if n_pathways == 0 {
        return Err(Error::Domain("need at least one REMPI pathway".into()));
    }
    if n_pathways > model.bound_states.len() {
        return Err(Error::Domain(format!(
            "{n_pathways} pathways requested but the model has only {} bound states",
            model.bound_states.len()
        )));
    }
    let grid = &model.energy_grid;
    if target_energy < grid[0] || target_energy > grid[grid.len() - 1] {
        return Err(Error::Range(format!(
            "target energy {target_energy} outside the model grid [{}, {}]",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    let ip = model.ionization_potential();
    let mut pulses = Vec::with_capacity(2 * n_pathways);
    // default amplitudes scale with the pulse count so the overlapping
    // initial train starts well inside the intensity cap
    let amplitude = 1.0e-3 / (2 * n_pathways) as f64;
    let default_pulse = move |carrier: f64| PulseParams {
        amplitude,
        carrier,
        cep: 0.0,
        fwhm: 360.0,
        delay: 0.0,
    };
    for r in 0..n_pathways {
        let excitation = model.bound_states[r].energy - model.homo_energy;
        pulses.push(default_pulse(excitation));
    }
    for r in 0..n_pathways {
        let excitation = model.bound_states[r].energy - model.homo_energy;
        pulses.push(default_pulse(target_energy + ip - excitation));
    }
    let train = PulseTrain::new(pulses, crate::field::Polarization::LeftCircular);
    let mut spec = ObjectiveSpec::new(ObjectiveMode::FixedEnergy {
        energy: target_energy,
    });
    spec.frequency_locks = train.pulses.iter().map(|p| Some(p.carrier)).collect();
    Ok((spec, train))
}

/// Spectral-delay scan: for each τ the high-frequency group is shifted and
/// the maximal |PECD| recorded.
pub fn delay_scan(
    model: &MolecularModel,
    train: &PulseTrain,
    cutoff: f64,
    taus: &[f64],
) -> Result<Vec<(f64, f64)>> {
    // validate the cutoff once on the unshifted train
    apply_spectral_delay(train, cutoff, 0.0)?;
    taus.par_iter()
        .map(|&tau| {
            let shifted = apply_spectral_delay(train, cutoff, tau)?;
            let eval = evaluate_train(model, &shifted)?;
            Ok((tau, argmax_pecd(&eval.map).2.abs()))
        })
        .collect()
}

/// Dominant angular frequency of a uniformly sampled scan, by discrete
/// Fourier transform with parabolic peak refinement. Used to read the
/// oscillation frequency off a delay scan.
pub fn dominant_frequency(step: f64, values: &[f64]) -> f64 {
    let n = values.len();
    assert!(n >= 4);
    let mean = values.iter().sum::<f64>() / n as f64;
    let spectrum: Vec<f64> = (0..n / 2)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in values.iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
                acc += Complex64::from_polar(v - mean, phase);
            }
            acc.norm_sqr()
        })
        .collect();
    let mut kmax = 1;
    for k in 1..spectrum.len() {
        if spectrum[k] > spectrum[kmax] {
            kmax = k;
        }
    }
    // parabolic refinement on the log power
    let refine = if kmax > 0 && kmax + 1 < spectrum.len() {
        let (ym, y0, yp) = (
            spectrum[kmax - 1].max(1e-300).ln(),
            spectrum[kmax].max(1e-300).ln(),
            spectrum[kmax + 1].max(1e-300).ln(),
        );
        let denom = ym - 2.0 * y0 + yp;
        if denom.abs() > 1e-12 {
            (0.5 * (ym - yp) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        }
    } else {
        0.0
    };
    2.0 * std::f64::consts::PI * (kmax as f64 + refine) / (n as f64 * step)
}

/// Bichromatic (ω, 2ω) photon-energy / relative-phase map.
#[derive(Debug, Clone)]
pub struct BichromaticMap {
    /// Fundamental carrier frequencies (a.u.).
    pub omegas: Vec<f64>,
    /// Relative phases added to the second harmonic (radians).
    pub phases: Vec<f64>,
    /// Signed PECD (percent) at the |PECD| argmax, `[iw * phases.len() + ip]`.
    pub pecd: Vec<f64>,
    /// Signed one-photon dichroism contribution 2β^{1ph}_{1,0} at its
    /// strongest energy, in percent of the squared-pathway peak.
    pub one_photon: Vec<f64>,
    /// Signed two-photon dichroism contribution at its strongest (ε, θ),
    /// in percent of the squared-pathway peak.
    pub two_photon: Vec<f64>,
    /// Signed interference contribution 6·Im β^{int}_{2,1} at its strongest
    /// energy, in percent of the squared-pathway peak.
    pub interference: Vec<f64>,
}

impl BichromaticMap {
    fn panel_csv(&self, values: &[f64]) -> String {
        let mut out = String::from("omega_ev,phase_rad,value_percent\n");
        for (iw, &w) in self.omegas.iter().enumerate() {
            for (ip, &p) in self.phases.iter().enumerate() {
                out.push_str(&format!(
                    "{:.11e},{:.6},{:.11e}\n",
                    w * units::HARTREE_EV,
                    p,
                    values[iw * self.phases.len() + ip]
                ));
            }
        }
        out
    }

    pub fn to_csv_panels(&self) -> [(String, String); 4] {
        [
            ("pecd".into(), self.panel_csv(&self.pecd)),
            ("one_photon".into(), self.panel_csv(&self.one_photon)),
            ("two_photon".into(), self.panel_csv(&self.two_photon)),
            ("interference".into(), self.panel_csv(&self.interference)),
        ]
    }
}

/// Peak of the azimuthally symmetric (one- plus two-photon) part of the
/// distribution over the grid and the default θ grid. Free of the relative
/// phase of a bichromatic pair, unlike the full peak intensity.
fn symmetric_peak(betas: &BetaSet) -> f64 {
    let thetas = default_theta_grid();
    let mut best = f64::NEG_INFINITY;
    for ie in 0..betas.energies().len() {
        for &theta in &thetas {
            let x = theta.cos();
            let mut v = 0.0;
            for table in [&betas.one_photon, &betas.two_photon] {
                for &(l, _) in &table.channels {
                    v += table.get(l, 0, ie).re * crate::angular::assoc_legendre_unchecked(l, 0, x);
                }
            }
            best = best.max(v);
        }
    }
    best
}

/// Scans the bichromatic template over fundamental frequency and relative
/// phase; the template must hold exactly two sub-pulses at carriers
/// (ω, 2ω).
pub fn bichromatic_map(
    model: &MolecularModel,
    omegas: &[f64],
    phases: &[f64],
    template: &PulseTrain,
) -> Result<BichromaticMap> {
    if template.pulses.len() != 2 {
        return Err(Error::Domain(
            "bichromatic template needs exactly two sub-pulses".into(),
        ));
    }
    let (i_fund, i_harm) = if template.pulses[0].carrier <= template.pulses[1].carrier {
        (0, 1)
    } else {
        (1, 0)
    };
    let ratio = template.pulses[i_harm].carrier / template.pulses[i_fund].carrier;
    if (ratio - 2.0).abs() > 1e-6 {
        return Err(Error::Domain(format!(
            "template carriers are not (ω, 2ω): ratio {ratio}"
        )));
    }
    let np = phases.len();
    let cells: Vec<(usize, usize)> = (0..omegas.len())
        .flat_map(|iw| (0..np).map(move |ip| (iw, ip)))
        .collect();
    let results: Result<Vec<(usize, usize, [f64; 4])>> = cells
        .par_iter()
        .map(|&(iw, ip)| {
            let mut train = template.clone();
            train.pulses[i_fund].carrier = omegas[iw];
            train.pulses[i_harm].carrier = 2.0 * omegas[iw];
            train.pulses[i_harm].cep += phases[ip];
            let eval = evaluate_train(model, &train)?;
            let map = &eval.map;
            // pathway panels are normalized by the peak of the squared-pathway
            // (one- plus two-photon) distribution, which carries no relative
            // phase; the total PECD panel keeps the full peak normalization
            let sym_peak = symmetric_peak(&eval.betas);
            let scale = if sym_peak > crate::observables::NORMALIZATION_THRESHOLD {
                100.0 / sym_peak
            } else {
                0.0
            };
            // total PECD at its own argmax
            let total = argmax_pecd(map).2;
            // one-photon panel: the odd-L 1ph coefficient at its largest energy
            let mut one = 0.0f64;
            for ie in 0..map.energies.len() {
                let v = 2.0 * eval.betas.one_photon.get(1, 0, ie).re * scale;
                if v.abs() > one.abs() {
                    one = v;
                }
            }
            // two-photon panel: odd-L two-photon shape maximized over (ε, θ)
            let mut two = 0.0f64;
            for ie in 0..map.energies.len() {
                let c1 = 2.0 * eval.betas.two_photon.get(1, 0, ie).re * scale;
                let c3 = 2.0 * eval.betas.two_photon.get(3, 0, ie).re * scale;
                for &theta in &map.thetas {
                    let x = theta.cos();
                    let v = c1 * crate::angular::assoc_legendre_unchecked(1, 0, x)
                        + c3 * crate::angular::assoc_legendre_unchecked(3, 0, x);
                    if v.abs() > two.abs() {
                        two = v;
                    }
                }
            }
            // interference panel: sin 2θ weight at its strongest energy
            let mut int_ = 0.0f64;
            for ie in 0..map.energies.len() {
                let v = 6.0 * eval.betas.interference.get(2, 1, ie).im * scale;
                if v.abs() > int_.abs() {
                    int_ = v;
                }
            }
            Ok((iw, ip, [total, one, two, int_]))
        })
        .collect();
    let results = results?;
    let n = omegas.len() * np;
    let mut map = BichromaticMap {
        omegas: omegas.to_vec(),
        phases: phases.to_vec(),
        pecd: vec![0.0; n],
        one_photon: vec![0.0; n],
        two_photon: vec![0.0; n],
        interference: vec![0.0; n],
    };
    for (iw, ip, vals) in results {
        let idx = iw * np + ip;
        map.pecd[idx] = vals[0];
        map.one_photon[idx] = vals[1];
        map.two_photon[idx] = vals[2];
        map.interference[idx] = vals[3];
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate_toy_chiral;
    use crate::quad::linspace;

    fn toy() -> MolecularModel {
        generate_toy_chiral(55, 2, 2, &linspace(0.05, 0.45, 10))
    }

    fn simple_train(model: &MolecularModel) -> PulseTrain {
        let ip = model.ionization_potential();
        PulseTrain::new(
            vec![PulseParams {
                amplitude: 1e-3,
                carrier: ip + 0.25,
                cep: 0.0,
                fwhm: 420.0,
                delay: 0.0,
            }],
            crate::field::Polarization::LeftCircular,
        )
    }

    #[test]
    fn zero_field_objectives_vanish() {
        let model = toy();
        let train = simple_train(&model).scaled(0.0);
        let spec = ObjectiveSpec::new(ObjectiveMode::FixedEnergy { energy: 0.25 });
        assert_eq!(objective_gamma(&model, &train, &spec), 0.0);
        let spec2 = ObjectiveSpec::new(ObjectiveMode::FreeEnergy);
        assert_eq!(objective_gamma_prime(&model, &train, &spec2), 0.0);
    }

    #[test]
    fn achiral_model_objective_is_zero() {
        let model = crate::model::mirror_achiralize(&toy());
        let train = simple_train(&model);
        let spec = ObjectiveSpec::new(ObjectiveMode::FreeEnergy);
        let v = objective_gamma_prime(&model, &train, &spec);
        assert!(v.abs() < 1e-8, "{v}");
    }

    #[test]
    fn gamma_prime_dominates_gamma() {
        let model = toy();
        let train = simple_train(&model);
        let free = ObjectiveSpec::new(ObjectiveMode::FreeEnergy);
        let vmax = objective_gamma_prime(&model, &train, &free);
        for &e in &[0.1, 0.2, 0.3, 0.4] {
            let spec = ObjectiveSpec::new(ObjectiveMode::FixedEnergy { energy: e });
            let v = objective_gamma(&model, &train, &spec);
            assert!(v <= vmax + 1e-12, "gamma({e}) = {v} > gamma' = {vmax}");
        }
    }

    #[test]
    fn gamma_consistent_with_map_argmax_row() {
        let model = toy();
        let train = simple_train(&model);
        let eval = evaluate_train(&model, &train).unwrap();
        let (ie, it, v) = argmax_pecd(&eval.map);
        let spec = ObjectiveSpec::new(ObjectiveMode::FixedEnergy {
            energy: eval.map.energies[ie],
        });
        let g = objective_gamma(&model, &train, &spec);
        assert!(
            (g - v.abs()).abs() < 1e-10 * v.abs(),
            "gamma {g} vs map argmax {v} at (ie={ie}, it={it})"
        );
    }

    #[test]
    fn intensity_cap_rejection() {
        let model = toy();
        let train = simple_train(&model).scaled(100.0);
        let spec = ObjectiveSpec::new(ObjectiveMode::FreeEnergy);
        assert!(train.peak_intensity_wcm2() > spec.intensity_cap_wcm2);
        assert_eq!(objective_gamma_prime(&model, &train, &spec), 0.0);
    }

    #[test]
    fn multi_rempi_energy_conservation() {
        let model = toy();
        let ip = model.ionization_potential();
        let target = 0.22;
        let (spec, train) = multi_rempi_setup(&model, target, 2).unwrap();
        assert_eq!(train.pulses.len(), 4);
        assert_eq!(spec.frequency_locks.len(), 4);
        for r in 0..2 {
            let sum = train.pulses[r].carrier + train.pulses[r + 2].carrier;
            assert!(
                (sum - (target + ip)).abs() < 1e-12,
                "pathway {r}: photon sum {sum}"
            );
            // the ionizing photon lands exactly at the target energy:
            // final-state detuning vanishes
            let eps_r = model.bound_states[r].energy;
            let delta_final = target - eps_r - train.pulses[r + 2].carrier;
            assert!(delta_final.abs() < 1e-12);
        }
        assert!(multi_rempi_setup(&model, target, 0).is_err());
        assert!(multi_rempi_setup(&model, target, 3).is_err());
    }

    #[test]
    fn out_of_grid_objectives_are_rejected_early() {
        let model = toy();
        let train = simple_train(&model);
        let spec = ObjectiveSpec::new(ObjectiveMode::FixedEnergy { energy: 0.9 });
        assert!(principal_axis_optimize(&model, &spec, &train, 10, 1e-4).is_err());
        assert!(multi_rempi_setup(&model, 0.9, 1).is_err());
        // more locks than pulses
        let mut bad = ObjectiveSpec::new(ObjectiveMode::FreeEnergy);
        bad.frequency_locks = vec![None, Some(0.3)];
        assert!(principal_axis_optimize(&model, &bad, &train, 10, 1e-4).is_err());
    }

    #[test]
    fn encoding_respects_locks_and_blocks() {
        let model = toy();
        let (spec, train) = multi_rempi_setup(&model, 0.22, 1).unwrap();
        let enc = Encoding::new(&train, &spec);
        // two pulses, carriers locked: 2·4 free parameters
        assert_eq!(enc.encode().len(), 8);
        let blocks = enc.blocks();
        assert_eq!(blocks.len(), 5);
        assert!(blocks[1].is_empty(), "carrier block must be empty");
        // decode keeps the locked carriers
        let x = enc.encode();
        let decoded = enc.decode(&x);
        for (a, b) in decoded.pulses.iter().zip(&train.pulses) {
            assert!((a.carrier - b.carrier).abs() < 1e-15);
        }
    }

    #[test]
    fn dominant_frequency_of_synthetic_signal() {
        let step = 0.4;
        let omega = 1.7;
        let values: Vec<f64> = (0..256)
            .map(|i| 2.0 + (omega * step * i as f64).cos())
            .collect();
        let found = dominant_frequency(step, &values);
        assert!(
            (found - omega).abs() < 0.03 * omega,
            "found {found}, expected {omega}"
        );
    }
}
