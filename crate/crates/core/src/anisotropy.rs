//! Orientation-averaged anisotropy parameters for the one-photon,
//! two-photon and interference ionization pathways.
//!
//! Every β is a sum over partial-wave channel pairs and spherical dipole
//! components weighted by four Wigner 3j symbols; orientation averaging has
//! already been performed analytically, so the only field dependence enters
//! through the cached one- and two-photon time integrals. The overall
//! normalization constants are frozen here and validated against the
//! brute-force Euler-angle averaging oracle.

use crate::angular::wigner3j_int;
use crate::error::{Error, Result};
use crate::field::{FieldIntegrals, PulseTrain};
use crate::model::{
    build_two_photon_tensor, channel_index, channels, MolecularModel, TwoPhotonTensor,
};
use crate::units;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Ionization pathway of a β table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pathway {
    OnePhoton,
    TwoPhoton,
    Interference,
}

impl Pathway {
    pub fn label(self) -> &'static str {
        match self {
            Pathway::OnePhoton => "1ph",
            Pathway::TwoPhoton => "2ph",
            Pathway::Interference => "int",
        }
    }
}

/// Channel prefactor 2π(2L+1) common to all three pathway formulas: the
/// Euler-angle volume 8π² times the (2L+1)/4π harmonic normalization.
fn channel_prefactor(big_l: u32) -> f64 {
    2.0 * PI * (2.0 * big_l as f64 + 1.0)
}

/// Relative sign of the interference β against the squared-amplitude
/// pathways. Pinned by the orientation-averaging oracle: the assembled
/// distribution must reproduce the brute-force average of
/// 2·Re[α⁽¹⁾α⁽²⁾*], and the total distribution must stay nonnegative.
const INTERFERENCE_SIGN: f64 = 1.0;

/// √((L-M)!/(L+M)!) for the M = μ0 interference channel.
fn m_norm(big_l: u32, m: i32) -> f64 {
    let li = big_l as i32;
    if m.abs() > li {
        return 0.0;
    }
    let mut ratio = 1.0;
    if m >= 0 {
        for k in (li - m + 1)..=(li + m) {
            ratio /= k as f64;
        }
    } else {
        for k in (li + m + 1)..=(li - m) {
            ratio *= k as f64;
        }
    }
    ratio.sqrt()
}

/// Anisotropy parameters β_{L,M}(ε_k) of one pathway and one polarization.
#[derive(Debug, Clone)]
pub struct BetaTable {
    pub pathway: Pathway,
    pub mu0: i32,
    /// Photoelectron energies (a.u.), the model grid.
    pub energies: Vec<f64>,
    /// (L, M) channels stored, in ascending L.
    pub channels: Vec<(u32, i32)>,
    /// `values[row][energy]`, row order matching `channels`.
    pub values: Vec<Vec<Complex64>>,
    /// Set for the linearly-polarized interference channel, which the
    /// standard circular-dichroism analysis does not use.
    pub nonstandard: bool,
}

impl BetaTable {
    /// Value at a stored (L, M) channel and grid node; structural zeros for
    /// absent channels.
    pub fn get(&self, big_l: u32, m: i32, ie: usize) -> Complex64 {
        match self.channels.iter().position(|&c| c == (big_l, m)) {
            Some(row) => self.values[row][ie],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Linear interpolation in energy; errors outside the grid.
    pub fn at_energy(&self, big_l: u32, m: i32, epsilon: f64) -> Result<Complex64> {
        let grid = &self.energies;
        if epsilon < grid[0] || epsilon > grid[grid.len() - 1] {
            return Err(Error::Range(format!(
                "energy {epsilon} outside β table range [{}, {}]",
                grid[0],
                grid[grid.len() - 1]
            )));
        }
        let hi = grid
            .partition_point(|&e| e < epsilon)
            .min(grid.len() - 1)
            .max(1);
        let lo = hi - 1;
        let t = (epsilon - grid[lo]) / (grid[hi] - grid[lo]);
        let a = self.get(big_l, m, lo);
        let b = self.get(big_l, m, hi);
        Ok(a + (b - a) * t)
    }

    /// JSON rendering with energies in eV and complex values as [re, im].
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "pathway": self.pathway.label(),
            "mu0": self.mu0,
            "nonstandard": self.nonstandard,
            "energies_ev": self.energies.iter().map(|e| e * units::HARTREE_EV).collect::<Vec<_>>(),
            "channels": self.channels.iter().enumerate().map(|(row, &(l, m))| {
                serde_json::json!({
                    "L": l,
                    "M": m,
                    "values": self.values[row].iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
                })
            }).collect::<Vec<_>>(),
        })
    }

    /// CSV rendering: `pathway,L,M,energy_ev,re,im` with 12 significant
    /// digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pathway,L,M,energy_ev,re,im\n");
        for (row, &(l, m)) in self.channels.iter().enumerate() {
            for (ie, &e) in self.energies.iter().enumerate() {
                let v = self.values[row][ie];
                out.push_str(&format!(
                    "{},{},{},{:.11e},{:.11e},{:.11e}\n",
                    self.pathway.label(),
                    l,
                    m,
                    e * units::HARTREE_EV,
                    v.re,
                    v.im
                ));
            }
        }
        out
    }
}

/// The three pathway tables of one polarization.
#[derive(Debug, Clone)]
pub struct BetaSet {
    pub one_photon: BetaTable,
    pub two_photon: BetaTable,
    pub interference: BetaTable,
}

impl BetaSet {
    pub fn mu0(&self) -> i32 {
        self.one_photon.mu0
    }

    pub fn energies(&self) -> &[f64] {
        &self.one_photon.energies
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({
            "mu0": self.mu0(),
            "one_photon": self.one_photon.to_json_value(),
            "two_photon": self.two_photon.to_json_value(),
            "interference": self.interference.to_json_value(),
        }))
        .expect("beta serialization cannot fail")
    }
}

/// Angular coupling coefficient of two dipole components into the rank-Q
/// channel: (2Q+1) · 3j(1,1,Q; μ,μ',-μ-μ') · 3j(1,1,Q; μ0,μ0,-2μ0).
pub fn g_coefficient(q: u32, mu: i32, mup: i32, mu0: i32) -> f64 {
    (2.0 * q as f64 + 1.0)
        * wigner3j_int(1, 1, q as i32, mu, mup, -mu - mup)
        * wigner3j_int(1, 1, q as i32, mu0, mu0, -2 * mu0)
}

/// Detunings entering the field integrals for `model`: the one-photon
/// detuning ε_k + IP per grid node, and per two-photon branch the
/// (final, intermediate) pair — branch 0 is the permanent-dipole route with
/// zero intermediate detuning, branch r ≥ 1 runs through bound state r-1.
pub fn model_detunings(model: &MolecularModel) -> (Vec<f64>, Vec<Vec<(f64, f64)>>) {
    let ip = model.ionization_potential();
    let deltas: Vec<f64> = model.energy_grid.iter().map(|&e| e + ip).collect();
    let mut branches = Vec::with_capacity(1 + model.bound_states.len());
    branches.push(deltas.iter().map(|&d| (d, 0.0)).collect());
    for b in &model.bound_states {
        let excitation = b.energy - model.homo_energy;
        branches.push(
            model
                .energy_grid
                .iter()
                .map(|&e| (e - b.energy, excitation))
                .collect(),
        );
    }
    (deltas, branches)
}

/// Builds the cached field integrals of `train` on the model's detunings.
pub fn build_field_integrals(model: &MolecularModel, train: &PulseTrain) -> Result<FieldIntegrals> {
    let (deltas, branches) = model_detunings(model);
    FieldIntegrals::build(train, &deltas, &branches)
}

/// Two-photon pathway weights U_{μμ'}(ℓ,m) = Σ_r T^r_{μμ'}(k,ℓ,m) ζ_r(k) at
/// grid node `ie`; layout `u[channel][mu_index*3 + mup_index]`.
pub fn pathway_weights(
    tensor: &TwoPhotonTensor,
    integrals: &FieldIntegrals,
    ie: usize,
) -> Vec<[Complex64; 9]> {
    let nch = crate::model::n_channels(tensor.lmax);
    let mut out = vec![[Complex64::new(0.0, 0.0); 9]; nch];
    for ch in 0..nch {
        for mu in 0..3 {
            for mup in 0..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..tensor.n_branches() {
                    acc += tensor.get(r, ch, mu, mup, ie) * integrals.zeta[r][ie];
                }
                out[ch][mu * 3 + mup] = acc;
            }
        }
    }
    out
}

fn parity_sign(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One-photon β_{L,0} at one grid node, for any L (structurally zero above
/// L = 2).
pub fn beta_one_photon_entry(
    model: &MolecularModel,
    integrals: &FieldIntegrals,
    mu0: i32,
    big_l: u32,
    ie: usize,
) -> Complex64 {
    let fourth = wigner3j_int(1, 1, big_l as i32, -mu0, mu0, 0);
    if fourth == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let f1 = integrals.f1[ie];
    let weight = f1 * f1.conj();
    let table = &model.continuum_from_homo;
    let mut sum = Complex64::new(0.0, 0.0);
    for (l, m) in channels(model.lmax) {
        let ch = channel_index(l, m);
        for (lp, mp) in channels(model.lmax) {
            let a = wigner3j_int(l as i32, lp as i32, big_l as i32, 0, 0, 0);
            if a == 0.0 {
                continue;
            }
            let b = wigner3j_int(l as i32, lp as i32, big_l as i32, m, -mp, mp - m);
            if b == 0.0 {
                continue;
            }
            let chp = channel_index(lp, mp);
            let base = (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt() * a * b;
            for mu in -1i32..=1 {
                for mup in -1i32..=1 {
                    let c = wigner3j_int(1, 1, big_l as i32, -mu, mup, mp - m);
                    if c == 0.0 {
                        continue;
                    }
                    let phase = parity_sign(mu - mp);
                    sum += table.get(ch, (mu + 1) as usize, ie)
                        * table.get(chp, (mup + 1) as usize, ie).conj()
                        * (phase * base * c * fourth);
                }
            }
        }
    }
    sum * weight * (channel_prefactor(big_l) * parity_sign(mu0))
}

/// Two-photon β_{L,0} at one grid node, for any L (structurally zero above
/// L = 4).
pub fn beta_two_photon_entry(
    tensor: &TwoPhotonTensor,
    integrals: &FieldIntegrals,
    mu0: i32,
    big_l: u32,
    ie: usize,
) -> Complex64 {
    let weights = pathway_weights(tensor, integrals, ie);
    beta_two_photon_entry_with(&weights, tensor.lmax, mu0, big_l) * channel_prefactor(big_l)
}

/// Inner two-photon sum given precomputed pathway weights (without the
/// 2π(2L+1) prefactor).
fn beta_two_photon_entry_with(
    weights: &[[Complex64; 9]],
    lmax: u32,
    mu0: i32,
    big_l: u32,
) -> Complex64 {
    // g coefficients for this polarization
    let mut g = [[[0.0f64; 3]; 3]; 3]; // [q][mu][mup]
    for q in 0..3u32 {
        for mu in -1i32..=1 {
            for mup in -1i32..=1 {
                g[q as usize][(mu + 1) as usize][(mup + 1) as usize] =
                    g_coefficient(q, mu, mup, mu0);
            }
        }
    }
    let li = big_l as i32;
    let mut sum = Complex64::new(0.0, 0.0);
    for (l, m) in channels(lmax) {
        let ch = channel_index(l, m);
        for (lp, mp) in channels(lmax) {
            let a = wigner3j_int(l as i32, lp as i32, li, 0, 0, 0);
            if a == 0.0 {
                continue;
            }
            let b = wigner3j_int(l as i32, lp as i32, li, m, -mp, mp - m);
            if b == 0.0 {
                continue;
            }
            let chp = channel_index(lp, mp);
            let base = (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt() * a * b;
            for mu in -1i32..=1 {
                for mup in -1i32..=1 {
                    let u1 = weights[ch][((mu + 1) * 3 + (mup + 1)) as usize];
                    if u1.norm_sqr() == 0.0 {
                        continue;
                    }
                    for nu in -1i32..=1 {
                        for nup in -1i32..=1 {
                            // selection from the third 3j symbol
                            if -mu - mup + nu + nup + mp - m != 0 {
                                continue;
                            }
                            let u2 = weights[chp][((nu + 1) * 3 + (nup + 1)) as usize];
                            if u2.norm_sqr() == 0.0 {
                                continue;
                            }
                            let mut qsum = 0.0;
                            for q1 in 0..3i32 {
                                let g1 = g[q1 as usize][(mu + 1) as usize][(mup + 1) as usize];
                                if g1 == 0.0 {
                                    continue;
                                }
                                for q2 in 0..3i32 {
                                    let g2 = g[q2 as usize][(nu + 1) as usize][(nup + 1) as usize];
                                    if g2 == 0.0 {
                                        continue;
                                    }
                                    let c = wigner3j_int(q1, q2, li, -mu - mup, nu + nup, mp - m);
                                    if c == 0.0 {
                                        continue;
                                    }
                                    let d = wigner3j_int(q1, q2, li, -2 * mu0, 2 * mu0, 0);
                                    qsum += g1 * g2 * c * d;
                                }
                            }
                            if qsum == 0.0 {
                                continue;
                            }
                            let phase = parity_sign(-mp - nu - nup);
                            sum += u1 * u2.conj() * (phase * base * qsum);
                        }
                    }
                }
            }
        }
    }
    sum
}

/// Interference β_{L,μ0} at one grid node (complex), for any L
/// (structurally zero above L = 3, and at L = 0 for circular polarization).
pub fn beta_interference_entry(
    model: &MolecularModel,
    tensor: &TwoPhotonTensor,
    integrals: &FieldIntegrals,
    mu0: i32,
    big_l: u32,
    ie: usize,
) -> Complex64 {
    let weights = pathway_weights(tensor, integrals, ie);
    beta_interference_entry_with(model, &weights, integrals, mu0, big_l, ie)
}

fn beta_interference_entry_with(
    model: &MolecularModel,
    weights: &[[Complex64; 9]],
    integrals: &FieldIntegrals,
    mu0: i32,
    big_l: u32,
    ie: usize,
) -> Complex64 {
    let li = big_l as i32;
    let mut g = [[[0.0f64; 3]; 3]; 3];
    for q in 0..3u32 {
        for nu in -1i32..=1 {
            for nup in -1i32..=1 {
                g[q as usize][(nu + 1) as usize][(nup + 1) as usize] =
                    g_coefficient(q, nu, nup, mu0);
            }
        }
    }
    let table = &model.continuum_from_homo;
    let mut sum = Complex64::new(0.0, 0.0);
    for (l, m) in channels(model.lmax) {
        let ch = channel_index(l, m);
        for (lp, mp) in channels(model.lmax) {
            let a = wigner3j_int(l as i32, lp as i32, li, 0, 0, 0);
            if a == 0.0 {
                continue;
            }
            let b = wigner3j_int(l as i32, lp as i32, li, m, -mp, mp - m);
            if b == 0.0 {
                continue;
            }
            let chp = channel_index(lp, mp);
            let base = (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt() * a * b * parity_sign(m);
            for mu in -1i32..=1 {
                let amp = table.get(ch, (mu + 1) as usize, ie);
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                for nu in -1i32..=1 {
                    for nup in -1i32..=1 {
                        // selection from the third 3j symbol
                        if mu - nu - nup + m - mp != 0 {
                            continue;
                        }
                        let u2 = weights[chp][((nu + 1) * 3 + (nup + 1)) as usize];
                        if u2.norm_sqr() == 0.0 {
                            continue;
                        }
                        let mut qsum = 0.0;
                        for q in 0..3i32 {
                            let gq = g[q as usize][(nu + 1) as usize][(nup + 1) as usize];
                            if gq == 0.0 {
                                continue;
                            }
                            let c = wigner3j_int(1, q, li, mu, -nu - nup, m - mp);
                            if c == 0.0 {
                                continue;
                            }
                            let d = wigner3j_int(1, q, li, mu0, -2 * mu0, mu0);
                            qsum += gq * c * d;
                        }
                        if qsum == 0.0 {
                            continue;
                        }
                        sum += amp * u2.conj() * (base * qsum);
                    }
                }
            }
        }
    }
    let pref = Complex64::new(0.0, -1.0)
        * (INTERFERENCE_SIGN * channel_prefactor(big_l) * m_norm(big_l, mu0));
    pref * integrals.f1[ie] * sum
}

/// Full one-photon table: L ∈ {0, 1, 2}, M = 0.
pub fn beta_one_photon(model: &MolecularModel, integrals: &FieldIntegrals, mu0: i32) -> BetaTable {
    let ne = model.n_energies();
    let channels_out: Vec<(u32, i32)> = (0..=2).map(|l| (l, 0)).collect();
    let values = channels_out
        .iter()
        .map(|&(l, _)| {
            (0..ne)
                .map(|ie| beta_one_photon_entry(model, integrals, mu0, l, ie))
                .collect()
        })
        .collect();
    BetaTable {
        pathway: Pathway::OnePhoton,
        mu0,
        energies: model.energy_grid.clone(),
        channels: channels_out,
        values,
        nonstandard: false,
    }
}

/// Full two-photon table: L ∈ {0..4}, M = 0.
pub fn beta_two_photon(
    model: &MolecularModel,
    tensor: &TwoPhotonTensor,
    integrals: &FieldIntegrals,
    mu0: i32,
) -> BetaTable {
    let ne = model.n_energies();
    let channels_out: Vec<(u32, i32)> = (0..=4).map(|l| (l, 0)).collect();
    // energy nodes are independent work items
    let columns: Vec<Vec<Complex64>> = (0..ne)
        .into_par_iter()
        .map(|ie| {
            let weights = pathway_weights(tensor, integrals, ie);
            channels_out
                .iter()
                .map(|&(l, _)| {
                    beta_two_photon_entry_with(&weights, tensor.lmax, mu0, l) * channel_prefactor(l)
                })
                .collect()
        })
        .collect();
    let mut values = vec![vec![Complex64::new(0.0, 0.0); ne]; channels_out.len()];
    for (ie, column) in columns.iter().enumerate() {
        for (row, &v) in column.iter().enumerate() {
            values[row][ie] = v;
        }
    }
    BetaTable {
        pathway: Pathway::TwoPhoton,
        mu0,
        energies: model.energy_grid.clone(),
        channels: channels_out,
        values,
        nonstandard: false,
    }
}

/// Full interference table: L ∈ {1, 2, 3} at M = μ0 for circular
/// polarization; the linear (μ0 = 0) channel is computed at M = 0 over
/// L ∈ {0..3} but flagged nonstandard.
pub fn beta_interference(
    model: &MolecularModel,
    tensor: &TwoPhotonTensor,
    integrals: &FieldIntegrals,
    mu0: i32,
) -> BetaTable {
    let ne = model.n_energies();
    let channels_out: Vec<(u32, i32)> = if mu0 == 0 {
        (0..=3).map(|l| (l, 0)).collect()
    } else {
        (1..=3).map(|l| (l, mu0)).collect()
    };
    let columns: Vec<Vec<Complex64>> = (0..ne)
        .into_par_iter()
        .map(|ie| {
            let weights = pathway_weights(tensor, integrals, ie);
            channels_out
                .iter()
                .map(|&(l, _)| beta_interference_entry_with(model, &weights, integrals, mu0, l, ie))
                .collect()
        })
        .collect();
    let mut values = vec![vec![Complex64::new(0.0, 0.0); ne]; channels_out.len()];
    for (ie, column) in columns.iter().enumerate() {
        for (row, &v) in column.iter().enumerate() {
            values[row][ie] = v;
        }
    }
    BetaTable {
        pathway: Pathway::Interference,
        mu0,
        energies: model.energy_grid.clone(),
        channels: channels_out,
        values,
        nonstandard: mu0 == 0,
    }
}

/// Precomputed model-side inputs shared by all polarizations of one
/// (model, train) pair.
pub struct Precomputed {
    pub tensor: TwoPhotonTensor,
    pub integrals: FieldIntegrals,
}

impl Precomputed {
    pub fn build(model: &MolecularModel, train: &PulseTrain) -> Result<Self> {
        Ok(Precomputed {
            tensor: build_two_photon_tensor(model),
            integrals: build_field_integrals(model, train)?,
        })
    }
}

/// All three pathway tables for one polarization.
pub fn compute_beta_set(model: &MolecularModel, pre: &Precomputed, mu0: i32) -> BetaSet {
    BetaSet {
        one_photon: beta_one_photon(model, &pre.integrals, mu0),
        two_photon: beta_two_photon(model, &pre.tensor, &pre.integrals, mu0),
        interference: beta_interference(model, &pre.tensor, &pre.integrals, mu0),
    }
}

/// Convenience entry point building everything from scratch.
pub fn compute_all(model: &MolecularModel, train: &PulseTrain, mu0: i32) -> Result<BetaSet> {
    let pre = Precomputed::build(model, train)?;
    Ok(compute_beta_set(model, &pre, mu0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Polarization, PulseParams};
    use crate::model::generate_toy_chiral;
    use crate::quad::linspace;

    fn toy() -> MolecularModel {
        generate_toy_chiral(101, 2, 2, &linspace(0.05, 0.45, 6))
    }

    fn train_for(model: &MolecularModel) -> PulseTrain {
        // one-photon resonant at mid-grid plus a two-photon color
        let ip = model.ionization_potential();
        let mid = 0.25;
        PulseTrain::new(
            vec![
                PulseParams {
                    amplitude: 2e-3,
                    carrier: ip + mid,
                    cep: 0.1,
                    fwhm: 420.0,
                    delay: 0.0,
                },
                PulseParams {
                    amplitude: 2e-3,
                    carrier: (ip + mid) / 2.0,
                    cep: -0.4,
                    fwhm: 420.0,
                    delay: 0.0,
                },
            ],
            Polarization::LeftCircular,
        )
    }

    #[test]
    fn g_reference_values() {
        // Q = 2, all indices +1: 5 · (1/√5)² = 1
        assert!((g_coefficient(2, 1, 1, 1) - 1.0).abs() < 1e-14);
        // Q = 1 with linear polarization contains 3j(1,1,1;0,0,0) = 0
        for mu in -1..=1 {
            for mup in -1..=1 {
                assert_eq!(g_coefficient(1, mu, mup, 0), 0.0);
            }
        }
    }

    #[test]
    fn g_polarization_flip() {
        for q in 0..3u32 {
            for mu in -1..=1 {
                for mup in -1..=1 {
                    for mu0 in [-1, 0, 1] {
                        let plus = g_coefficient(q, mu, mup, mu0);
                        let minus = g_coefficient(q, mu, mup, -mu0);
                        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                        assert!(
                            (minus - sign * plus).abs() < 1e-14,
                            "q={q} mu={mu} mup={mup} mu0={mu0}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn one_photon_structural_zeros() {
        let model = toy();
        let train = train_for(&model);
        let pre = Precomputed::build(&model, &train).unwrap();
        // linear polarization kills L = 1
        let lin = beta_one_photon(&model, &pre.integrals, 0);
        for ie in 0..model.n_energies() {
            assert_eq!(lin.get(1, 0, ie).norm(), 0.0);
        }
        // L = 3 vanishes for every polarization
        for mu0 in [-1, 0, 1] {
            for ie in 0..model.n_energies() {
                let v = beta_one_photon_entry(&model, &pre.integrals, mu0, 3, ie);
                assert_eq!(v.norm(), 0.0, "mu0={mu0} ie={ie}");
            }
        }
    }

    #[test]
    fn two_photon_vanishes_without_pathways() {
        // single bound state, zero ground dipole, zero bound dipole
        let grid = linspace(0.05, 0.45, 4);
        let mut model = generate_toy_chiral(19, 1, 2, &grid);
        model.ground_dipole = [Complex64::new(0.0, 0.0); 3];
        model.bound_states[0].dipole_from_homo = [Complex64::new(0.0, 0.0); 3];
        let train = train_for(&model);
        let pre = Precomputed::build(&model, &train).unwrap();
        let table = beta_two_photon(&model, &pre.tensor, &pre.integrals, 1);
        assert!(table.values.iter().flatten().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn two_photon_l_range() {
        let model = toy();
        let train = train_for(&model);
        let pre = Precomputed::build(&model, &train).unwrap();
        let table = beta_two_photon(&model, &pre.tensor, &pre.integrals, 1);
        // L = 5 absent from the table and numerically zero from the kernel
        assert_eq!(table.get(5, 0, 0).norm(), 0.0);
        let v5 = beta_two_photon_entry(&pre.tensor, &pre.integrals, 1, 5, 0);
        assert!(v5.norm() < 1e-18);
        // M != 0 structurally absent
        assert_eq!(table.get(2, 1, 0).norm(), 0.0);
    }

    #[test]
    fn interference_l_range() {
        let model = toy();
        let train = train_for(&model);
        let pre = Precomputed::build(&model, &train).unwrap();
        for mu0 in [-1i32, 1] {
            let l0 = beta_interference_entry(&model, &pre.tensor, &pre.integrals, mu0, 0, 1);
            assert!(l0.norm() < 1e-20, "L=0 must vanish for circular");
            let l4 = beta_interference_entry(&model, &pre.tensor, &pre.integrals, mu0, 4, 1);
            assert!(l4.norm() < 1e-20, "L=4 cannot contribute");
        }
        let table = beta_interference(&model, &pre.tensor, &pre.integrals, 1);
        assert_eq!(table.channels, vec![(1u32, 1i32), (2, 1), (3, 1)]);
        assert!(!table.nonstandard);
        assert!(beta_interference(&model, &pre.tensor, &pre.integrals, 0).nonstandard);
    }

    #[test]
    fn squared_pathways_are_real() {
        let model = toy();
        let train = train_for(&model);
        let pre = Precomputed::build(&model, &train).unwrap();
        for mu0 in [-1, 0, 1] {
            let one = beta_one_photon(&model, &pre.integrals, mu0);
            let two = beta_two_photon(&model, &pre.tensor, &pre.integrals, mu0);
            for table in [&one, &two] {
                for row in &table.values {
                    for v in row {
                        assert!(
                            v.im.abs() <= 1e-12 * v.re.abs().max(1e-30),
                            "imaginary residue {v}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn polarization_reversal_signs() {
        let model = toy();
        let train = train_for(&model);
        let pre = Precomputed::build(&model, &train).unwrap();
        let plus = compute_beta_set(&model, &pre, 1);
        let minus = compute_beta_set(&model, &pre, -1);
        for (table_p, table_m) in [
            (&plus.one_photon, &minus.one_photon),
            (&plus.two_photon, &minus.two_photon),
        ] {
            for &(l, _) in &table_p.channels {
                for ie in 0..model.n_energies() {
                    let vp = table_p.get(l, 0, ie);
                    let vm = table_m.get(l, 0, ie);
                    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                    assert!(
                        (vm - vp * sign).norm() <= 1e-10 * vp.norm().max(1e-25),
                        "{:?} L={l} ie={ie}: {vm} vs {vp}",
                        table_p.pathway
                    );
                }
            }
        }
        // interference: β^(-μ0)_{L,-μ0} = (-1)^{1+L} (L+μ0)!/(L-μ0)! β^(+μ0)_{L,+μ0}
        for l in 1..=3u32 {
            for ie in 0..model.n_energies() {
                let vp = plus.interference.get(l, 1, ie);
                let vm = minus.interference.get(l, -1, ie);
                let li = l as i32;
                let mut ratio = 1.0;
                for k in li..=(li + 1) {
                    ratio *= k as f64;
                }
                let sign = if (1 + l) % 2 == 0 { 1.0 } else { -1.0 };
                let expect = vp * (sign * ratio);
                assert!(
                    (vm - expect).norm() <= 1e-10 * vp.norm().max(1e-25),
                    "L={l} ie={ie}: {vm} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn amplitude_scaling_laws() {
        let model = toy();
        let train = train_for(&model);
        let doubled = train.scaled(2.0);
        let a = compute_all(&model, &train, 1).unwrap();
        let b = compute_all(&model, &doubled, 1).unwrap();
        for ie in 0..model.n_energies() {
            for l in 0..=2u32 {
                let x = a.one_photon.get(l, 0, ie);
                let y = b.one_photon.get(l, 0, ie);
                assert!((y - x * 4.0).norm() <= 1e-12 * x.norm().max(1e-30));
            }
            for l in 0..=4u32 {
                let x = a.two_photon.get(l, 0, ie);
                let y = b.two_photon.get(l, 0, ie);
                assert!((y - x * 16.0).norm() <= 1e-12 * x.norm().max(1e-30));
            }
            for l in 1..=3u32 {
                let x = a.interference.get(l, 1, ie);
                let y = b.interference.get(l, 1, ie);
                assert!((y - x * 8.0).norm() <= 1e-12 * x.norm().max(1e-30));
            }
        }
    }

    #[test]
    fn csv_has_expected_header_and_rows() {
        let model = toy();
        let train = train_for(&model);
        let set = compute_all(&model, &train, 1).unwrap();
        let csv = set.two_photon.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "pathway,L,M,energy_ev,re,im");
        assert_eq!(lines.len(), 1 + 5 * model.n_energies());
        assert!(lines[1].starts_with("2ph,0,0,"));
    }
}
