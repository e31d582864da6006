//! Spectral-phase manipulation and time-frequency analysis of pulse trains.

use super::{analytic_signal, PulseTrain};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Maximal spectral-lobe weight a sub-pulse may carry across the cutoff.
const SPECTRAL_OVERLAP_TOL: f64 = 1e-6;

/// Shifts the high-frequency sub-pulses (carrier above `cutoff`) earlier by
/// `tau`, leaving the power spectrum untouched.
///
/// Positive `tau` makes the high-frequency components arrive before the
/// low-frequency ones. Errors if either frequency group is empty or if a
/// sub-pulse's spectral lobe straddles the cutoff by more than 1e-6 of its
/// weight.
pub fn apply_spectral_delay(train: &PulseTrain, cutoff: f64, tau: f64) -> Result<PulseTrain> {
    let highs = train.pulses.iter().filter(|p| p.carrier > cutoff).count();
    let lows = train.pulses.len() - highs;
    if highs == 0 || lows == 0 {
        return Err(Error::Domain(format!(
            "cutoff {cutoff} does not split the train into two nonempty groups \
             ({lows} low, {highs} high)"
        )));
    }
    for (i, p) in train.pulses.iter().enumerate() {
        // weight of the pulse's power-spectrum lobe beyond the cutoff
        let distance = (p.carrier - cutoff).abs() * p.sigma();
        let crossing = 0.5 * libm::erfc(distance);
        if crossing > SPECTRAL_OVERLAP_TOL {
            return Err(Error::Domain(format!(
                "pulse {i} (carrier {}) has spectral weight {crossing:.2e} across \
                 the cutoff {cutoff}",
                p.carrier
            )));
        }
    }
    let mut out = train.clone();
    for p in &mut out.pulses {
        if p.carrier > cutoff {
            p.delay -= tau;
        }
    }
    Ok(out)
}

/// Wigner time-frequency distribution of the train on uniform grids.
#[derive(Debug, Clone)]
pub struct WignerMap {
    pub times: Vec<f64>,
    pub omegas: Vec<f64>,
    /// Row-major: `values[it * omegas.len() + iw]`.
    pub values: Vec<f64>,
}

impl WignerMap {
    pub fn value(&self, it: usize, iw: usize) -> f64 {
        self.values[it * self.omegas.len() + iw]
    }

    /// Frequency marginal ∫ W(t, ω) dω on the map's ω grid (trapezoid).
    pub fn time_marginal(&self) -> Vec<f64> {
        let nw = self.omegas.len();
        let dw = if nw > 1 {
            self.omegas[1] - self.omegas[0]
        } else {
            1.0
        };
        (0..self.times.len())
            .map(|it| {
                let row = &self.values[it * nw..(it + 1) * nw];
                let mut s = 0.0;
                for (i, &v) in row.iter().enumerate() {
                    let w = if i == 0 || i == nw - 1 { 0.5 } else { 1.0 };
                    s += w * v;
                }
                s * dw
            })
            .collect()
    }

    /// First-moment centroid (time, frequency) of the positive part.
    pub fn centroid(&self) -> (f64, f64) {
        let mut mass = 0.0;
        let mut mt = 0.0;
        let mut mw = 0.0;
        for (it, &t) in self.times.iter().enumerate() {
            for (iw, &w) in self.omegas.iter().enumerate() {
                let v = self.value(it, iw).max(0.0);
                mass += v;
                mt += v * t;
                mw += v * w;
            }
        }
        (mt / mass, mw / mass)
    }

    /// Centroid restricted to a frequency window.
    pub fn centroid_in_band(&self, w_lo: f64, w_hi: f64) -> (f64, f64) {
        let mut mass = 0.0;
        let mut mt = 0.0;
        let mut mw = 0.0;
        for (it, &t) in self.times.iter().enumerate() {
            for (iw, &w) in self.omegas.iter().enumerate() {
                if w < w_lo || w > w_hi {
                    continue;
                }
                let v = self.value(it, iw).max(0.0);
                mass += v;
                mt += v * t;
                mw += v * w;
            }
        }
        (mt / mass, mw / mass)
    }
}

/// Wigner distribution W(t, ω) = ∫ Ê(t+s/2) Ê*(t-s/2) e^{-iωs} ds of the
/// analytic-signal field, sampled on the given uniform grids.
pub fn wigner_time_frequency(train: &PulseTrain, times: &[f64], omegas: &[f64]) -> WignerMap {
    assert!(
        times.len() >= 2 && omegas.len() >= 2,
        "grids must be nontrivial"
    );
    // s-extent: the full envelope support around each t is bounded by the
    // train's own support width.
    let sigma_max = train
        .pulses
        .iter()
        .map(|p| p.sigma())
        .fold(0.0f64, f64::max);
    let delay_span = {
        let lo = train
            .pulses
            .iter()
            .map(|p| p.delay)
            .fold(f64::INFINITY, f64::min);
        let hi = train
            .pulses
            .iter()
            .map(|p| p.delay)
            .fold(f64::NEG_INFINITY, f64::max);
        (hi - lo).max(0.0)
    };
    let s_max = 2.0 * (delay_span + 8.0 * sigma_max);
    let omega_top = omegas
        .iter()
        .fold(train.max_carrier(), |a, &w| a.max(w.abs()));
    let ds = (2.0 * std::f64::consts::PI / omega_top.max(1e-6)) / 16.0;
    let ns = ((2.0 * s_max / ds).ceil() as usize + 1).max(3);

    let nw = omegas.len();
    let mut values = vec![0.0; times.len() * nw];
    values
        .par_chunks_mut(nw)
        .zip(times.par_iter())
        .for_each(|(row, &t)| {
            // precompute the correlation samples along s
            let corr: Vec<Complex64> = (0..ns)
                .map(|k| {
                    let s = -s_max + k as f64 * ds;
                    analytic_signal(train, t + 0.5 * s) * analytic_signal(train, t - 0.5 * s).conj()
                })
                .collect();
            for (iw, &w) in omegas.iter().enumerate() {
                let rot_step = Complex64::from_polar(1.0, -w * ds);
                let mut rot = Complex64::from_polar(1.0, w * s_max);
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &c) in corr.iter().enumerate() {
                    let trap = if k == 0 || k == ns - 1 { 0.5 } else { 1.0 };
                    acc += rot * c * trap;
                    rot *= rot_step;
                }
                row[iw] = (acc * ds).re;
            }
        });
    WignerMap {
        times: times.to_vec(),
        omegas: omegas.to_vec(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{spectrum, Polarization, PulseParams, PulseTrain};
    use crate::quad::linspace;

    fn two_color_train() -> PulseTrain {
        PulseTrain::new(
            vec![
                PulseParams {
                    amplitude: 1e-3,
                    carrier: 0.20,
                    cep: 0.2,
                    fwhm: 400.0,
                    delay: 0.0,
                },
                PulseParams {
                    amplitude: 8e-4,
                    carrier: 0.45,
                    cep: -0.5,
                    fwhm: 300.0,
                    delay: 120.0,
                },
            ],
            Polarization::LeftCircular,
        )
    }

    #[test]
    fn zero_delay_is_identity() {
        let train = two_color_train();
        let out = apply_spectral_delay(&train, 0.32, 0.0).unwrap();
        assert_eq!(out, train);
    }

    #[test]
    fn power_spectrum_unchanged() {
        let train = two_color_train();
        let shifted = apply_spectral_delay(&train, 0.32, 900.0).unwrap();
        let omegas = linspace(0.05, 0.6, 200);
        let scale = omegas
            .iter()
            .map(|&w| spectrum(&train, w).norm_sqr())
            .fold(0.0f64, f64::max);
        for &w in &omegas {
            let a = spectrum(&train, w).norm_sqr();
            let b = spectrum(&shifted, w).norm_sqr();
            assert!(
                (a - b).abs() < 1e-10 * scale,
                "omega {w}: {a} vs {b} (scale {scale})"
            );
        }
    }

    #[test]
    fn positive_delay_moves_high_band_earlier() {
        let train = two_color_train();
        let tau = 700.0;
        let shifted = apply_spectral_delay(&train, 0.32, tau).unwrap();
        let times = linspace(-900.0, 900.0, 121);
        let omegas = linspace(0.1, 0.55, 91);
        let map = wigner_time_frequency(&shifted, &times, &omegas);
        let (t_low, _) = map.centroid_in_band(0.15, 0.25);
        let (t_high, _) = map.centroid_in_band(0.40, 0.50);
        assert!(t_high < t_low, "high band at {t_high}, low band at {t_low}");
    }

    #[test]
    fn rejects_degenerate_split_and_straddling_cutoff() {
        let train = two_color_train();
        assert!(apply_spectral_delay(&train, 0.9, 10.0).is_err());
        // cutoff right on the low carrier: half the lobe crosses
        assert!(apply_spectral_delay(&train, 0.20, 10.0).is_err());
    }

    #[test]
    fn single_pulse_lobe_centered_on_carrier_and_delay() {
        let train = PulseTrain::new(
            vec![PulseParams {
                amplitude: 1e-3,
                carrier: 0.30,
                cep: 0.0,
                fwhm: 350.0,
                delay: 40.0,
            }],
            Polarization::LeftCircular,
        );
        let times = linspace(-500.0, 580.0, 109);
        let omegas = linspace(0.2, 0.4, 81);
        let map = wigner_time_frequency(&train, &times, &omegas);
        let (tc, wc) = map.centroid();
        let dt = times[1] - times[0];
        let dw = omegas[1] - omegas[0];
        assert!((tc - 40.0).abs() < dt, "time centroid {tc}");
        assert!((wc - 0.30).abs() < dw, "frequency centroid {wc}");
    }

    #[test]
    fn frequency_marginal_tracks_signal_power() {
        let train = two_color_train();
        let times = linspace(-700.0, 900.0, 41);
        let omegas = linspace(0.05, 0.62, 241);
        let map = wigner_time_frequency(&train, &times, &omegas);
        let marginal = map.time_marginal();
        // proportionality to |analytic signal|²: compare shapes against the
        // largest entry
        let power: Vec<f64> = times
            .iter()
            .map(|&t| crate::field::analytic_signal(&train, t).norm_sqr())
            .collect();
        let (imax, _) = power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let ratio = marginal[imax] / power[imax];
        for (i, (&m, &p)) in marginal.iter().zip(&power).enumerate() {
            assert!(
                (m - ratio * p).abs() <= 1e-6 * marginal[imax].abs(),
                "t index {i}: marginal {m} vs scaled power {}",
                ratio * p
            );
        }
    }

    #[test]
    fn delayed_pulses_produce_ordered_lobes() {
        let train = PulseTrain::new(
            vec![
                PulseParams {
                    amplitude: 1e-3,
                    carrier: 0.22,
                    cep: 0.0,
                    fwhm: 300.0,
                    delay: -250.0,
                },
                PulseParams {
                    amplitude: 1e-3,
                    carrier: 0.42,
                    cep: 0.0,
                    fwhm: 300.0,
                    delay: 310.0,
                },
            ],
            Polarization::LeftCircular,
        );
        let times = linspace(-800.0, 860.0, 101);
        let omegas = linspace(0.12, 0.52, 81);
        let map = wigner_time_frequency(&train, &times, &omegas);
        let (t1, w1) = map.centroid_in_band(0.17, 0.27);
        let (t2, w2) = map.centroid_in_band(0.37, 0.47);
        assert!(t1 < t2, "low-carrier lobe at {t1}, high at {t2}");
        assert!((w1 - 0.22).abs() < 0.01 && (w2 - 0.42).abs() < 0.01);
    }
}
