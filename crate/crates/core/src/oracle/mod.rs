//! Independent ground-truth engines.
//!
//! Nothing here touches the analytic anisotropy formulas: molecular-frame
//! amplitudes are built per orientation with explicitly evaluated Wigner
//! rotation matrices, rotated to the laboratory frame, averaged by
//! brute-force Euler-angle quadrature, and projected onto Legendre channels
//! by spherical quadrature. Any disagreement with the analytic tables
//! localizes a convention bug on one side.

mod propagate;

pub use propagate::{propagate_weak_field, PropagationOptions, PropagationResult};

use crate::angular::{assoc_legendre_unchecked, sph_harm, wigner_d};
use crate::field::FieldIntegrals;
use crate::model::{channel_index, channels, MolecularModel, TwoPhotonTensor};
use crate::quad;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Euler-angle quadrature: trapezoid in α and γ, Gauss–Legendre in cos β.
#[derive(Debug, Clone)]
pub struct EulerGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub beta_weights: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl EulerGrid {
    pub fn new(n_alpha: usize, n_beta: usize, n_gamma: usize) -> Self {
        assert!(n_alpha >= 1 && n_beta >= 1 && n_gamma >= 1);
        let (nodes, weights) = quad::gauss_legendre(n_beta);
        EulerGrid {
            alphas: (0..n_alpha)
                .map(|i| 2.0 * PI * i as f64 / n_alpha as f64)
                .collect(),
            betas: nodes.iter().map(|&x| x.acos()).collect(),
            beta_weights: weights,
            gammas: (0..n_gamma)
                .map(|i| 2.0 * PI * i as f64 / n_gamma as f64)
                .collect(),
        }
    }

    /// Default (16, 16, 16) grid: exact for the band-limited integrands of
    /// small-lmax models.
    pub fn default16() -> Self {
        Self::new(16, 16, 16)
    }

    /// All (α, β, γ, weight) orientations; weights sum to 8π².
    pub fn orientations(&self) -> Vec<(f64, f64, f64, f64)> {
        let wa = 2.0 * PI / self.alphas.len() as f64;
        let wg = 2.0 * PI / self.gammas.len() as f64;
        let mut out = Vec::with_capacity(self.alphas.len() * self.betas.len() * self.gammas.len());
        for &a in &self.alphas {
            for (ib, &b) in self.betas.iter().enumerate() {
                for &g in &self.gammas {
                    out.push((a, b, g, wa * self.beta_weights[ib] * wg));
                }
            }
        }
        out
    }

    pub fn weight_total(&self) -> f64 {
        self.orientations().iter().map(|o| o.3).sum()
    }
}

/// Molecular-frame channel amplitudes of one orientation, plus the
/// propagation-branch state populated by [`propagate_weak_field`].
#[derive(Debug, Clone)]
pub struct AmplitudeSet {
    pub n_channels: usize,
    pub n_energies: usize,
    /// First-order channel amplitudes, layout `[ie * n_channels + ch]`.
    pub first_order: Vec<Complex64>,
    /// Second-order channel amplitudes, same layout.
    pub second_order: Vec<Complex64>,
    /// Ground-state amplitude (1 in the perturbative branch).
    pub ground: Complex64,
    /// Bound intermediate amplitudes (empty in the perturbative branch).
    pub bound: Vec<Complex64>,
}

impl AmplitudeSet {
    pub fn first(&self, ie: usize, ch: usize) -> Complex64 {
        self.first_order[ie * self.n_channels + ch]
    }

    pub fn second(&self, ie: usize, ch: usize) -> Complex64 {
        self.second_order[ie * self.n_channels + ch]
    }
}

/// Rotation coefficients of the polarization vector: c_μ = conj(D¹_{μ,μ0}).
fn polarization_coefficients(mu0: i32, alpha: f64, beta: f64, gamma: f64) -> [Complex64; 3] {
    let mut c = [Complex64::new(0.0, 0.0); 3];
    for mu in -1i32..=1 {
        c[(mu + 1) as usize] = wigner_d(1, mu, mu0, alpha, beta, gamma).conj();
    }
    c
}

/// First- and second-order molecular-frame channel amplitudes at one
/// orientation:
///
/// a¹_{ℓm} = i F₁(Δ_k) Σ_μ c_μ 𝓜^μ_{kℓm},
/// a²_{ℓm} = -Σ_{μμ'} c_μ c_μ' Σ_r T^r_{μμ'}(k,ℓ,m) ζ_r(k).
pub fn molecular_frame_amplitudes(
    model: &MolecularModel,
    tensor: &TwoPhotonTensor,
    integrals: &FieldIntegrals,
    mu0: i32,
    euler_angles: (f64, f64, f64),
) -> AmplitudeSet {
    let (alpha, beta, gamma) = euler_angles;
    let c = polarization_coefficients(mu0, alpha, beta, gamma);
    let nch = model.n_channels();
    let ne = model.n_energies();
    let mut first = vec![Complex64::new(0.0, 0.0); ne * nch];
    let mut second = vec![Complex64::new(0.0, 0.0); ne * nch];
    // products c_μ c_μ' for the second order
    let mut cc = [Complex64::new(0.0, 0.0); 9];
    for mu in 0..3 {
        for mup in 0..3 {
            cc[mu * 3 + mup] = c[mu] * c[mup];
        }
    }
    for ie in 0..ne {
        let f1 = integrals.f1[ie] * Complex64::new(0.0, 1.0);
        for ch in 0..nch {
            let mut a1 = Complex64::new(0.0, 0.0);
            for mu in 0..3 {
                a1 += c[mu] * model.continuum_from_homo.get(ch, mu, ie);
            }
            first[ie * nch + ch] = f1 * a1;

            let mut a2 = Complex64::new(0.0, 0.0);
            for mu in 0..3 {
                for mup in 0..3 {
                    let mut pathway = Complex64::new(0.0, 0.0);
                    for r in 0..tensor.n_branches() {
                        pathway += tensor.get(r, ch, mu, mup, ie) * integrals.zeta[r][ie];
                    }
                    a2 += cc[mu * 3 + mup] * pathway;
                }
            }
            second[ie * nch + ch] = -a2;
        }
    }
    AmplitudeSet {
        n_channels: nch,
        n_energies: ne,
        first_order: first,
        second_order: second,
        ground: Complex64::new(1.0, 0.0),
        bound: vec![],
    }
}

/// Laboratory-frame angular grid used for the quadrature average:
/// Gauss–Legendre in cos θ, uniform in φ.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    pub thetas: Vec<f64>,
    pub theta_weights: Vec<f64>,
    pub phis: Vec<f64>,
}

impl AngularGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (nodes, weights) = quad::gauss_legendre(n_theta);
        AngularGrid {
            thetas: nodes.iter().map(|&x| x.acos()).collect(),
            theta_weights: weights,
            phis: (0..n_phi)
                .map(|i| 2.0 * PI * i as f64 / n_phi as f64)
                .collect(),
        }
    }

    pub fn n_angles(&self) -> usize {
        self.thetas.len() * self.phis.len()
    }
}

/// Orientation-averaged laboratory-frame distributions, split by pathway:
/// |α¹|², |α²|², and the cross term 2·Re[α¹ α²*].
#[derive(Debug, Clone)]
pub struct OracleDistribution {
    pub energies: Vec<f64>,
    pub grid: AngularGrid,
    /// `[ie][itheta * n_phi + iphi]`
    pub one_photon: Vec<Vec<f64>>,
    pub two_photon: Vec<Vec<f64>>,
    pub interference: Vec<Vec<f64>>,
}

impl OracleDistribution {
    pub fn total(&self, ie: usize, ia: usize) -> f64 {
        self.one_photon[ie][ia] + self.two_photon[ie][ia] + self.interference[ie][ia]
    }

    /// Projects one pathway part onto the (L, M) Legendre channel,
    /// returning β^{oracle}_{L,M}(ε_k) for every grid energy.
    ///
    /// Uses the orthogonality of P^M_L e^{iMφ} under the spherical measure;
    /// for the squared pathways the imaginary parts must vanish.
    pub fn project(&self, part: ProjectionPart, big_l: u32, m: i32) -> Vec<Complex64> {
        let values = match part {
            ProjectionPart::OnePhoton => &self.one_photon,
            ProjectionPart::TwoPhoton => &self.two_photon,
            ProjectionPart::Interference => &self.interference,
        };
        let nphi = self.grid.phis.len();
        let dphi = 2.0 * PI / nphi as f64;
        let li = big_l as i32;
        // ∫ (P^M_L)² dcosθ = 2/(2L+1) · (L+M)!/(L-M)!
        let mut ratio = 1.0;
        if m >= 0 {
            for k in (li - m + 1)..=(li + m) {
                ratio *= k as f64;
            }
        } else {
            for k in (li + m + 1)..=(li - m) {
                ratio /= k as f64;
            }
        }
        let norm = 2.0 * PI * 2.0 / (2.0 * big_l as f64 + 1.0) * ratio;
        let p_values: Vec<f64> = self
            .grid
            .thetas
            .iter()
            .map(|&t| assoc_legendre_unchecked(big_l, m, t.cos()))
            .collect();
        let phase: Vec<Complex64> = self
            .grid
            .phis
            .iter()
            .map(|&p| Complex64::from_polar(1.0, -(m as f64) * p))
            .collect();
        values
            .iter()
            .map(|sigma| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (it, &wt) in self.grid.theta_weights.iter().enumerate() {
                    for (ip, ph) in phase.iter().enumerate() {
                        acc += ph * (sigma[it * nphi + ip] * wt * dphi * p_values[it]);
                    }
                }
                acc / norm
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionPart {
    OnePhoton,
    TwoPhoton,
    Interference,
}

/// Brute-force orientation average of the laboratory-frame photoelectron
/// distribution: per orientation the channel amplitudes are rotated with
/// explicit D-matrices, evaluated on the angular grid, squared and
/// accumulated with the Euler quadrature weights.
pub fn quadrature_average(
    model: &MolecularModel,
    tensor: &TwoPhotonTensor,
    integrals: &FieldIntegrals,
    mu0: i32,
    euler: &EulerGrid,
    angular: &AngularGrid,
) -> OracleDistribution {
    let nch = model.n_channels();
    let ne = model.n_energies();
    let n_ang = angular.n_angles();
    let nphi = angular.phis.len();
    let lmax = model.lmax;

    // lab-frame harmonics on the angular grid, [ch][angle]
    let mut y_table = vec![vec![Complex64::new(0.0, 0.0); n_ang]; nch];
    for (l, m) in channels(lmax) {
        let ch = channel_index(l, m);
        for (it, &theta) in angular.thetas.iter().enumerate() {
            for (ip, &phi) in angular.phis.iter().enumerate() {
                y_table[ch][it * nphi + ip] = sph_harm(l, m, theta, phi);
            }
        }
    }

    let orientations = euler.orientations();
    let zero_acc = || vec![vec![0.0f64; n_ang]; ne];

    // fixed-size chunks summed in order keep the reduction deterministic
    // across thread counts and schedules
    let chunk_size = orientations.len().div_ceil(64).max(1);
    let partials: Vec<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>)> = orientations
        .par_chunks(chunk_size)
        .map(|chunk| {
            chunk.iter().fold(
                (zero_acc(), zero_acc(), zero_acc()),
                |(mut one, mut two, mut int_), &(alpha, beta, gamma, w)| {
                    let amps = molecular_frame_amplitudes(
                        model,
                        tensor,
                        integrals,
                        mu0,
                        (alpha, beta, gamma),
                    );
                    // rotation matrices D^{(l)}_{m,M} for this orientation
                    let mut dmat = vec![Complex64::new(0.0, 0.0); nch * nch];
                    for (l, m) in channels(lmax) {
                        let ch = channel_index(l, m);
                        for big_m in -(l as i32)..=(l as i32) {
                            let chm = channel_index(l, big_m);
                            dmat[ch * nch + chm] = wigner_d(l, m, big_m, alpha, beta, gamma).conj();
                        }
                    }
                    let mut b1 = vec![Complex64::new(0.0, 0.0); nch];
                    let mut b2 = vec![Complex64::new(0.0, 0.0); nch];
                    for ie in 0..ne {
                        // lab-frame channel coefficients b_{ℓM} = Σ_m a_{ℓm} D*_{m,M}
                        for (l, big_m) in channels(lmax) {
                            let chm = channel_index(l, big_m);
                            let mut acc1 = Complex64::new(0.0, 0.0);
                            let mut acc2 = Complex64::new(0.0, 0.0);
                            for m in -(l as i32)..=(l as i32) {
                                let ch = channel_index(l, m);
                                let d = dmat[ch * nch + chm];
                                acc1 += amps.first(ie, ch) * d;
                                acc2 += amps.second(ie, ch) * d;
                            }
                            b1[chm] = acc1;
                            b2[chm] = acc2;
                        }
                        for ia in 0..n_ang {
                            let mut a1 = Complex64::new(0.0, 0.0);
                            let mut a2 = Complex64::new(0.0, 0.0);
                            for ch in 0..nch {
                                let y = y_table[ch][ia];
                                a1 += b1[ch] * y;
                                a2 += b2[ch] * y;
                            }
                            one[ie][ia] += w * a1.norm_sqr();
                            two[ie][ia] += w * a2.norm_sqr();
                            int_[ie][ia] += w * 2.0 * (a1 * a2.conj()).re;
                        }
                    }
                    (one, two, int_)
                },
            )
        })
        .collect();
    let mut one = zero_acc();
    let mut two = zero_acc();
    let mut int_ = zero_acc();
    for (p1, p2, p3) in partials {
        for ie in 0..ne {
            for ia in 0..n_ang {
                one[ie][ia] += p1[ie][ia];
                two[ie][ia] += p2[ie][ia];
                int_[ie][ia] += p3[ie][ia];
            }
        }
    }

    OracleDistribution {
        energies: model.energy_grid.clone(),
        grid: angular.clone(),
        one_photon: one,
        two_photon: two,
        interference: int_,
    }
}
