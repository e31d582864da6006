//! Sum-of-Gaussians pulse trains: field evaluation, analytic spectra, peak
//! intensity, and JSON serialization with explicit unit tags.

mod integrals;
mod spectral;

pub use integrals::{one_photon_integral, two_photon_integral, FieldIntegrals, SampledField};
pub use spectral::{apply_spectral_delay, wigner_time_frequency, WignerMap};

use crate::error::{Error, Result};
use crate::units;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Unit system used at the serialization boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSystem {
    /// Hartree atomic units everywhere.
    Au,
    /// eV for energies, fs for times (field amplitudes stay atomic).
    Lab,
}

/// Spherical polarization component carried by the whole train.
///
/// `mu0` = +1 is left circular, -1 right circular, 0 linear along z'.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    LeftCircular,
    Linear,
    RightCircular,
}

impl Polarization {
    pub fn mu0(self) -> i32 {
        match self {
            Polarization::LeftCircular => 1,
            Polarization::Linear => 0,
            Polarization::RightCircular => -1,
        }
    }

    pub fn from_mu0(mu0: i32) -> Result<Self> {
        match mu0 {
            1 => Ok(Polarization::LeftCircular),
            0 => Ok(Polarization::Linear),
            -1 => Ok(Polarization::RightCircular),
            other => Err(Error::Domain(format!("polarization mu0 = {other}"))),
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Polarization::LeftCircular => Polarization::RightCircular,
            Polarization::Linear => Polarization::Linear,
            Polarization::RightCircular => Polarization::LeftCircular,
        }
    }
}

/// One Gaussian sub-pulse; all fields in atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    /// Peak field amplitude (≥ 0).
    pub amplitude: f64,
    /// Carrier frequency.
    pub carrier: f64,
    /// Carrier-envelope phase in radians.
    pub cep: f64,
    /// Intensity full width at half maximum of the envelope.
    pub fwhm: f64,
    /// Envelope center.
    pub delay: f64,
}

impl PulseParams {
    /// Gaussian width σ = FWHM / (2 √(2 ln 2)).
    pub fn sigma(&self) -> f64 {
        self.fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
    }

    fn validate(&self, path: &str) -> Result<()> {
        if !(self.amplitude >= 0.0) {
            return Err(Error::schema(path, "amplitude must be >= 0"));
        }
        if !(self.fwhm > 0.0) {
            return Err(Error::schema(path, "fwhm must be > 0"));
        }
        if !(self.carrier >= 0.0) {
            return Err(Error::schema(path, "carrier must be >= 0"));
        }
        Ok(())
    }
}

/// Ordered list of sub-pulses sharing one polarization component.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    pub pulses: Vec<PulseParams>,
    pub polarization: Polarization,
}

impl PulseTrain {
    pub fn new(pulses: Vec<PulseParams>, polarization: Polarization) -> Self {
        PulseTrain {
            pulses,
            polarization,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Train with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut t = self.clone();
        for p in &mut t.pulses {
            p.amplitude *= factor;
        }
        t
    }

    /// Largest carrier frequency in the train (0 for an empty train).
    pub fn max_carrier(&self) -> f64 {
        self.pulses.iter().map(|p| p.carrier).fold(0.0, f64::max)
    }

    /// Peak field amplitude: grid scan refined by a parabolic fit through
    /// the three samples around the maximum.
    pub fn peak_field(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let grid = SampledField::for_train(self, 0.0);
        let (imax, best) = grid
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, v.abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if imax == 0 || imax + 1 == grid.values.len() {
            return best;
        }
        // vertex of the parabola through the squared samples
        let (ym, y0, yp) = (
            grid.values[imax - 1] * grid.values[imax - 1],
            grid.values[imax] * grid.values[imax],
            grid.values[imax + 1] * grid.values[imax + 1],
        );
        let denom = ym - 2.0 * y0 + yp;
        if denom.abs() < 1e-300 {
            return best;
        }
        let dt = 0.5 * (ym - yp) / denom * grid.step;
        let refined = evaluate_field(self, grid.time(imax) + dt).abs();
        refined.max(best)
    }

    /// Peak intensity in W/cm².
    pub fn peak_intensity_wcm2(&self) -> f64 {
        units::field_to_intensity_wcm2(self.peak_field())
    }

    /// Rejects the train if its peak intensity exceeds `cap_wcm2`.
    pub fn check_intensity_cap(&self, cap_wcm2: f64) -> Result<()> {
        let i = self.peak_intensity_wcm2();
        if i > cap_wcm2 {
            Err(Error::Constraint(format!(
                "peak intensity {i:.3e} W/cm² exceeds cap {cap_wcm2:.3e} W/cm²"
            )))
        } else {
            Ok(())
        }
    }
}

/// Real driving field Σ_j ε_j exp(-(t-τ_j)²/2σ_j²) cos(ω_j (t-τ_j) + φ_j).
pub fn evaluate_field(train: &PulseTrain, t: f64) -> f64 {
    train
        .pulses
        .iter()
        .map(|p| {
            let u = t - p.delay;
            let s = p.sigma();
            p.amplitude * (-u * u / (2.0 * s * s)).exp() * (p.carrier * u + p.cep).cos()
        })
        .sum()
}

/// Complex analytic-signal field Σ_j ε_j g_j(t-τ_j) e^{i(ω_j(t-τ_j)+φ_j)}.
///
/// The real field is the real part of this signal plus its negative-frequency
/// mirror, i.e. `evaluate_field` equals `Re` of this quantity for pulses
/// whose two spectral lobes do not overlap.
pub fn analytic_signal(train: &PulseTrain, t: f64) -> Complex64 {
    train
        .pulses
        .iter()
        .map(|p| {
            let u = t - p.delay;
            let s = p.sigma();
            Complex64::from_polar(
                p.amplitude * (-u * u / (2.0 * s * s)).exp(),
                p.carrier * u + p.cep,
            )
        })
        .sum()
}

/// Analytic Fourier transform ∫ e^{iωt} ℰ(t) dt of the train.
///
/// Each sub-pulse contributes two Gaussian lobes,
/// (ε σ √(2π)/2) e^{iωτ} [e^{iφ} e^{-σ²(ω+ω_j)²/2} + e^{-iφ} e^{-σ²(ω-ω_j)²/2}].
pub fn spectrum(train: &PulseTrain, omega: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in &train.pulses {
        let s = p.sigma();
        let scale = p.amplitude * s * (2.0 * PI).sqrt() / 2.0;
        let lobe_plus = (-s * s * (omega + p.carrier) * (omega + p.carrier) / 2.0).exp();
        let lobe_minus = (-s * s * (omega - p.carrier) * (omega - p.carrier) / 2.0).exp();
        let phase_tau = Complex64::from_polar(1.0, omega * p.delay);
        let cep = Complex64::from_polar(1.0, p.cep);
        acc += phase_tau * scale * (cep * lobe_plus + cep.conj() * lobe_minus);
    }
    acc
}

// ---------------------------------------------------------------------------
// JSON serialization with explicit unit tags
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Default)]
struct PulseJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude_au: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    carrier_au: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    carrier_ev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cep_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fwhm_au: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fwhm_fs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delay_au: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delay_fs: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct TrainJson {
    polarization: i32,
    pulses: Vec<PulseJson>,
}

fn pick(path: &str, field: &str, au: Option<f64>, lab: Option<f64>, to_au: f64) -> Result<f64> {
    match (au, lab) {
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(v * to_au),
        (Some(_), Some(_)) => Err(Error::schema(
            format!("{path}.{field}"),
            "both unit variants present; provide exactly one",
        )),
        (None, None) => Err(Error::schema(
            format!("{path}.{field}"),
            "missing field (no unit variant present)",
        )),
    }
}

impl PulseTrain {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: TrainJson = serde_json::from_str(text)?;
        let polarization = Polarization::from_mu0(raw.polarization)?;
        let mut pulses = Vec::with_capacity(raw.pulses.len());
        for (i, p) in raw.pulses.iter().enumerate() {
            let path = format!("pulses[{i}]");
            let amplitude = p
                .amplitude_au
                .ok_or_else(|| Error::schema(format!("{path}.amplitude_au"), "missing field"))?;
            let carrier = pick(
                &path,
                "carrier",
                p.carrier_au,
                p.carrier_ev,
                1.0 / units::HARTREE_EV,
            )?;
            let cep = p.cep_rad.unwrap_or(0.0);
            let fwhm = pick(&path, "fwhm", p.fwhm_au, p.fwhm_fs, 1.0 / units::AU_TIME_FS)?;
            let delay = pick(
                &path,
                "delay",
                p.delay_au,
                p.delay_fs,
                1.0 / units::AU_TIME_FS,
            )?;
            let pulse = PulseParams {
                amplitude,
                carrier,
                cep,
                fwhm,
                delay,
            };
            pulse.validate(&path)?;
            pulses.push(pulse);
        }
        Ok(PulseTrain::new(pulses, polarization))
    }

    pub fn to_json(&self, units_out: UnitSystem) -> String {
        let pulses = self
            .pulses
            .iter()
            .map(|p| {
                let mut j = PulseJson {
                    amplitude_au: Some(p.amplitude),
                    cep_rad: Some(p.cep),
                    ..Default::default()
                };
                match units_out {
                    UnitSystem::Au => {
                        j.carrier_au = Some(p.carrier);
                        j.fwhm_au = Some(p.fwhm);
                        j.delay_au = Some(p.delay);
                    }
                    UnitSystem::Lab => {
                        j.carrier_ev = Some(p.carrier * units::HARTREE_EV);
                        j.fwhm_fs = Some(p.fwhm * units::AU_TIME_FS);
                        j.delay_fs = Some(p.delay * units::AU_TIME_FS);
                    }
                }
                j
            })
            .collect();
        let raw = TrainJson {
            polarization: self.polarization.mu0(),
            pulses,
        };
        serde_json::to_string_pretty(&raw).expect("pulse train serialization cannot fail")
    }
}
