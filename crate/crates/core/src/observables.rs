//! Photoelectron momentum distributions, PECD maps, normalization and
//! hemisphere averages assembled from anisotropy tables.

use crate::angular::assoc_legendre_unchecked;
use crate::anisotropy::BetaSet;
use crate::error::{Error, Result};
use crate::quad;
use crate::units;

/// θ resolution used for normalization and map defaults: 181 points, 1°.
pub const THETA_GRID_POINTS: usize = 181;

/// Photoelectron-intensity floor below which the PECD map is set to zero.
pub const NORMALIZATION_THRESHOLD: f64 = 1e-12;

/// Uniform θ grid over [0, π].
pub fn default_theta_grid() -> Vec<f64> {
    quad::linspace(0.0, std::f64::consts::PI, THETA_GRID_POINTS)
}

/// Differential photoelectron distribution at (ε_k, θ, φ) for the set's
/// polarization:
///
/// Σ_L β^{1ph}_{L,0} P⁰_L + Σ_L β^{2ph}_{L,0} P⁰_L
/// + 2 Σ_L [Re β^{int}_{L,M} cos(Mφ) - Im β^{int}_{L,M} sin(Mφ)] P^M_L,
///
/// with M = μ0 and β interpolated linearly in ε_k.
pub fn momentum_distribution(betas: &BetaSet, epsilon: f64, theta: f64, phi: f64) -> Result<f64> {
    let x = theta.cos();
    let mut total = 0.0;
    for table in [&betas.one_photon, &betas.two_photon] {
        for &(l, m) in &table.channels {
            debug_assert_eq!(m, 0);
            let v = table.at_energy(l, m, epsilon)?;
            total += v.re * assoc_legendre_unchecked(l, 0, x);
        }
    }
    for &(l, m) in &betas.interference.channels {
        let v = betas.interference.at_energy(l, m, epsilon)?;
        let angle = m as f64 * phi;
        total +=
            2.0 * (v.re * angle.cos() - v.im * angle.sin()) * assoc_legendre_unchecked(l, m, x);
    }
    Ok(total)
}

/// Peak photoelectron intensity 𝓝: the maximum of the total distribution
/// over the energy grid and the 181-point θ grid at φ = π/2.
pub fn normalization(betas: &BetaSet) -> f64 {
    let phi = std::f64::consts::FRAC_PI_2;
    let thetas = default_theta_grid();
    let mut best = f64::NEG_INFINITY;
    for &e in betas.energies() {
        for &t in &thetas {
            let v = momentum_distribution(betas, e, t, phi)
                .expect("grid-node energies are always in range");
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Total ionization probability proxy: the distribution integrated over
/// energy and emission solid angle. Only the isotropic L = 0 rows survive
/// the angular integral,
/// ∫ dΩ dε σ = 4π ∫ (β^{1ph}_{0,0} + β^{2ph}_{0,0}) dε.
pub fn ionization_yield(betas: &BetaSet) -> f64 {
    let grid = betas.energies();
    let w = quad::trapezoid_weights(grid);
    let mut acc = 0.0;
    for (ie, wi) in w.iter().enumerate() {
        let b = betas.one_photon.get(0, 0, ie).re + betas.two_photon.get(0, 0, ie).re;
        acc += wi * b;
    }
    4.0 * std::f64::consts::PI * acc
}

/// Normalized dichroism map PECD(ε_k, θ) at φ = π/2, in percent of the peak
/// photoelectron intensity.
#[derive(Debug, Clone)]
pub struct PecdMap {
    pub energies: Vec<f64>,
    pub thetas: Vec<f64>,
    /// `values[ie * thetas.len() + it]`, percent.
    pub values: Vec<f64>,
    /// Peak photoelectron intensity used for normalization.
    pub normalization: f64,
    /// Per-energy coefficients (percent units) of the three angular shapes:
    /// P⁰₁(cos θ), P⁰₃(cos θ) and sin 2θ.
    pub coeff_p1: Vec<f64>,
    pub coeff_p3: Vec<f64>,
    pub coeff_sin2: Vec<f64>,
}

impl PecdMap {
    pub fn value(&self, ie: usize, it: usize) -> f64 {
        self.values[ie * self.thetas.len() + it]
    }

    /// Map value at an arbitrary angle for grid energy `ie`.
    pub fn at_angle(&self, ie: usize, theta: f64) -> f64 {
        let x = theta.cos();
        self.coeff_p1[ie] * assoc_legendre_unchecked(1, 0, x)
            + self.coeff_p3[ie] * assoc_legendre_unchecked(3, 0, x)
            + self.coeff_sin2[ie] * (2.0 * theta).sin()
    }

    /// CSV rendering: `energy_ev,theta_deg,pecd_percent`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("energy_ev,theta_deg,pecd_percent\n");
        for (ie, &e) in self.energies.iter().enumerate() {
            for (it, &t) in self.thetas.iter().enumerate() {
                out.push_str(&format!(
                    "{:.11e},{:.6},{:.11e}\n",
                    e * units::HARTREE_EV,
                    t.to_degrees(),
                    self.value(ie, it)
                ));
            }
        }
        out
    }

    /// JSON rendering with energies in eV and angles in degrees.
    pub fn to_json(&self) -> String {
        let nt = self.thetas.len();
        serde_json::to_string_pretty(&serde_json::json!({
            "normalization": self.normalization,
            "energies_ev": self.energies.iter().map(|e| e * units::HARTREE_EV).collect::<Vec<_>>(),
            "thetas_deg": self.thetas.iter().map(|t| t.to_degrees()).collect::<Vec<_>>(),
            "values_percent": (0..self.energies.len())
                .map(|ie| self.values[ie * nt..(ie + 1) * nt].to_vec())
                .collect::<Vec<_>>(),
        }))
        .expect("map serialization cannot fail")
    }

    /// Gnuplot nonuniform-matrix rendering: first row carries the θ grid in
    /// degrees, each following row an energy (eV) and its map values.
    pub fn to_gnuplot_matrix(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{}", self.thetas.len()));
        for &t in &self.thetas {
            out.push_str(&format!(" {:.6}", t.to_degrees()));
        }
        out.push('\n');
        for (ie, &e) in self.energies.iter().enumerate() {
            out.push_str(&format!("{:.11e}", e * units::HARTREE_EV));
            for it in 0..self.thetas.len() {
                out.push_str(&format!(" {:.11e}", self.value(ie, it)));
            }
            out.push('\n');
        }
        out
    }
}

/// Assembles the PECD map from the μ0 = +1 anisotropy tables:
///
/// PECD(ε,θ) = 2[β^{1ph}_{1,0} + β^{2ph}_{1,0}] P⁰₁ + 2 β^{2ph}_{3,0} P⁰₃
///             + 6 Im[β^{int}_{2,+1}] sin 2θ,
///
/// normalized by the peak intensity and expressed in percent; a peak below
/// [`NORMALIZATION_THRESHOLD`] zeroes the map.
pub fn pecd_map(betas_plus: &BetaSet, thetas: &[f64]) -> Result<PecdMap> {
    if betas_plus.mu0() != 1 {
        return Err(Error::Domain(format!(
            "pecd_map requires the μ0 = +1 tables, got μ0 = {}",
            betas_plus.mu0()
        )));
    }
    let energies = betas_plus.energies().to_vec();
    let ne = energies.len();
    let norm = normalization(betas_plus);
    let usable = norm > NORMALIZATION_THRESHOLD;
    let scale = if usable { 100.0 / norm } else { 0.0 };

    let mut coeff_p1 = vec![0.0; ne];
    let mut coeff_p3 = vec![0.0; ne];
    let mut coeff_sin2 = vec![0.0; ne];
    for ie in 0..ne {
        coeff_p1[ie] = scale
            * 2.0
            * (betas_plus.one_photon.get(1, 0, ie).re + betas_plus.two_photon.get(1, 0, ie).re);
        coeff_p3[ie] = scale * 2.0 * betas_plus.two_photon.get(3, 0, ie).re;
        coeff_sin2[ie] = scale * 6.0 * betas_plus.interference.get(2, 1, ie).im;
    }
    let mut values = vec![0.0; ne * thetas.len()];
    for ie in 0..ne {
        for (it, &t) in thetas.iter().enumerate() {
            let x = t.cos();
            values[ie * thetas.len() + it] = coeff_p1[ie] * assoc_legendre_unchecked(1, 0, x)
                + coeff_p3[ie] * assoc_legendre_unchecked(3, 0, x)
                + coeff_sin2[ie] * (2.0 * t).sin();
        }
    }
    Ok(PecdMap {
        energies,
        thetas: thetas.to_vec(),
        values,
        normalization: norm,
        coeff_p1,
        coeff_p3,
        coeff_sin2,
    })
}

/// Forward hemisphere average ρ_f(ε) = ∫₀^{π/2} PECD sin θ dθ by
/// Gauss–Legendre quadrature on the map's analytic angular form.
pub fn hemisphere_average(map: &PecdMap) -> Vec<f64> {
    hemisphere_integral(map, 0.0, std::f64::consts::FRAC_PI_2)
}

/// Backward hemisphere average ρ_b(ε) = ∫_{π/2}^{π} PECD sin θ dθ; equals
/// -ρ_f by the parity of the map.
pub fn hemisphere_average_backward(map: &PecdMap) -> Vec<f64> {
    hemisphere_integral(map, std::f64::consts::FRAC_PI_2, std::f64::consts::PI)
}

fn hemisphere_integral(map: &PecdMap, lo: f64, hi: f64) -> Vec<f64> {
    let (nodes, weights) = quad::gauss_legendre_on(32, lo, hi);
    (0..map.energies.len())
        .map(|ie| {
            nodes
                .iter()
                .zip(&weights)
                .map(|(&t, &w)| w * map.at_angle(ie, t) * t.sin())
                .sum()
        })
        .collect()
}

/// Location and value of the largest |PECD| cell; ties break toward the
/// smallest θ, then the smallest ε.
pub fn argmax_pecd(map: &PecdMap) -> (usize, usize, f64) {
    let mut best = (0usize, 0usize, map.value(0, 0));
    for it in 0..map.thetas.len() {
        for ie in 0..map.energies.len() {
            let v = map.value(ie, it);
            if v.abs() > best.2.abs() {
                best = (ie, it, v);
            }
        }
    }
    (best.0, best.1, best.2)
}
