//! Weak-field time propagation of the coupled amplitude equations at a
//! fixed molecular orientation.
//!
//! The continuum is discretized on the model energy grid with
//! √(bin-weight)-scaled couplings, so the summed channel populations
//! approximate the energy-integrated density. Interaction-picture equations
//! are integrated with an adaptive embedded Dormand–Prince 5(4) pair.

use crate::error::{Error, Result};
use crate::field::{evaluate_field, PulseTrain};
use crate::model::MolecularModel;
use crate::quad::trapezoid_weights;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct PropagationOptions {
    /// Target local truncation error per step.
    pub local_tol: f64,
    /// Hard cap on accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions {
            local_tol: 1e-10,
            max_steps: 2_000_000,
        }
    }
}

/// Final-time amplitudes of one propagation run.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub ground: Complex64,
    pub bound: Vec<Complex64>,
    /// Continuum channel amplitudes as energy densities (bin scaling divided
    /// out), layout `[ie * n_channels + ch]`.
    pub continuum: Vec<Complex64>,
    /// Σ|α|² over all states with the binned continuum measure.
    pub norm: f64,
    /// Accepted integrator steps.
    pub steps: usize,
}

struct Couplings {
    n_bound: usize,
    n_channels: usize,
    n_energies: usize,
    /// ⟨Φ_r|Ô|Φ₀⟩ and its downward counterpart ⟨Φ₀|Ô|Φ_r⟩.
    up_bound: Vec<Complex64>,
    down_bound: Vec<Complex64>,
    /// ⟨Φ_k|Ô|Φ₀⟩·√w and downward, `[ie*nch+ch]`.
    up_cont: Vec<Complex64>,
    down_cont: Vec<Complex64>,
    /// ⟨Φ_k|Ô|Φ_r⟩·√w and downward, `[r][ie*nch+ch]`.
    up_bc: Vec<Vec<Complex64>>,
    down_bc: Vec<Vec<Complex64>>,
    /// ⟨Φ₀|Ô|Φ₀⟩.
    diag_ground: Complex64,
    /// Bound excitation energies ε_r - ε_HOMO.
    omega_bound: Vec<f64>,
    /// Continuum detunings ε_k + IP.
    delta_cont: Vec<f64>,
}

/// Spherical components of the interaction operator after frame rotation:
/// Ô = Σ_μ c_μ r̂_μ with c_μ = conj(D¹_{μ,μ0}).
fn build_couplings(model: &MolecularModel, mu0: i32, euler_angles: (f64, f64, f64)) -> Couplings {
    let (alpha, beta, gamma) = euler_angles;
    let mut c = [Complex64::new(0.0, 0.0); 3];
    for mu in -1i32..=1 {
        c[(mu + 1) as usize] = crate::angular::wigner_d(1, mu, mu0, alpha, beta, gamma).conj();
    }
    // downward dipole components: ⟨a|r̂_μ|b⟩ = (-1)^μ conj(⟨b|r̂_{-μ}|a⟩)
    let flip = |v: &[Complex64; 3]| -> [Complex64; 3] { [-v[2].conj(), v[1].conj(), -v[0].conj()] };
    let contract = |v: &[Complex64; 3]| -> Complex64 { c[0] * v[0] + c[1] * v[1] + c[2] * v[2] };

    let nb = model.bound_states.len();
    let nch = model.n_channels();
    let ne = model.n_energies();
    let ip = model.ionization_potential();
    let bin = trapezoid_weights(&model.energy_grid);

    let up_bound: Vec<Complex64> = model
        .bound_states
        .iter()
        .map(|b| contract(&b.dipole_from_homo))
        .collect();
    let down_bound: Vec<Complex64> = model
        .bound_states
        .iter()
        .map(|b| contract(&flip(&b.dipole_from_homo)))
        .collect();

    let mut up_cont = vec![Complex64::new(0.0, 0.0); ne * nch];
    let mut down_cont = vec![Complex64::new(0.0, 0.0); ne * nch];
    for ie in 0..ne {
        let scale = bin[ie].sqrt();
        for ch in 0..nch {
            let v = [
                model.continuum_from_homo.get(ch, 0, ie),
                model.continuum_from_homo.get(ch, 1, ie),
                model.continuum_from_homo.get(ch, 2, ie),
            ];
            up_cont[ie * nch + ch] = contract(&v) * scale;
            down_cont[ie * nch + ch] = contract(&flip(&v)) * scale;
        }
    }
    let mut up_bc = Vec::with_capacity(nb);
    let mut down_bc = Vec::with_capacity(nb);
    for r in 0..nb {
        let mut up = vec![Complex64::new(0.0, 0.0); ne * nch];
        let mut down = vec![Complex64::new(0.0, 0.0); ne * nch];
        for ie in 0..ne {
            let scale = bin[ie].sqrt();
            for ch in 0..nch {
                let v = [
                    model.continuum_from_bound[r].get(ch, 0, ie),
                    model.continuum_from_bound[r].get(ch, 1, ie),
                    model.continuum_from_bound[r].get(ch, 2, ie),
                ];
                up[ie * nch + ch] = contract(&v) * scale;
                down[ie * nch + ch] = contract(&flip(&v)) * scale;
            }
        }
        up_bc.push(up);
        down_bc.push(down);
    }

    Couplings {
        n_bound: nb,
        n_channels: nch,
        n_energies: ne,
        up_bound,
        down_bound,
        up_cont,
        down_cont,
        up_bc,
        down_bc,
        diag_ground: contract(&model.ground_dipole),
        omega_bound: model
            .bound_states
            .iter()
            .map(|b| b.energy - model.homo_energy)
            .collect(),
        delta_cont: model.energy_grid.iter().map(|&e| e + ip).collect(),
    }
}

impl Couplings {
    fn state_len(&self) -> usize {
        1 + self.n_bound + self.n_energies * self.n_channels
    }

    /// Interaction-picture right-hand side.
    fn rhs(&self, train: &PulseTrain, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let field = evaluate_field(train, t);
        let ie_field = Complex64::new(0.0, field);
        let nb = self.n_bound;
        let nch = self.n_channels;
        let ne = self.n_energies;

        let phase_bound: Vec<Complex64> = self
            .omega_bound
            .iter()
            .map(|&w| Complex64::from_polar(1.0, w * t))
            .collect();
        let phase_cont: Vec<Complex64> = self
            .delta_cont
            .iter()
            .map(|&d| Complex64::from_polar(1.0, d * t))
            .collect();

        let a0 = y[0];
        // ground state
        let mut acc0 = self.diag_ground * a0;
        for r in 0..nb {
            acc0 += self.down_bound[r] * phase_bound[r].conj() * y[1 + r];
        }
        for ie in 0..ne {
            let ph = phase_cont[ie].conj();
            for ch in 0..nch {
                let idx = ie * nch + ch;
                acc0 += self.down_cont[idx] * ph * y[1 + nb + idx];
            }
        }
        dy[0] = ie_field * acc0;

        // bound intermediates
        for r in 0..nb {
            let mut acc = self.up_bound[r] * phase_bound[r] * a0;
            for ie in 0..ne {
                let ph = phase_cont[ie].conj() * phase_bound[r];
                for ch in 0..nch {
                    let idx = ie * nch + ch;
                    acc += self.down_bc[r][idx] * ph * y[1 + nb + idx];
                }
            }
            dy[1 + r] = ie_field * acc;
        }

        // continuum channels
        for ie in 0..ne {
            for ch in 0..nch {
                let idx = ie * nch + ch;
                let mut acc = self.up_cont[idx] * phase_cont[ie] * a0;
                for r in 0..nb {
                    acc += self.up_bc[r][idx] * (phase_cont[ie] * phase_bound[r].conj()) * y[1 + r];
                }
                dy[1 + nb + idx] = ie_field * acc;
            }
        }
    }
}

// Dormand–Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Propagates the coupled amplitude equations through the pulse at one
/// molecular orientation, starting from the ground state.
pub fn propagate_weak_field(
    model: &MolecularModel,
    train: &PulseTrain,
    mu0: i32,
    euler_angles: (f64, f64, f64),
    opts: PropagationOptions,
) -> Result<PropagationResult> {
    if train.is_empty() {
        let nch = model.n_channels();
        let ne = model.n_energies();
        return Ok(PropagationResult {
            ground: Complex64::new(1.0, 0.0),
            bound: vec![Complex64::new(0.0, 0.0); model.bound_states.len()],
            continuum: vec![Complex64::new(0.0, 0.0); ne * nch],
            norm: 1.0,
            steps: 0,
        });
    }
    let couplings = build_couplings(model, mu0, euler_angles);
    let n = couplings.state_len();

    let margin = 8.0;
    let t_start = train
        .pulses
        .iter()
        .map(|p| p.delay - margin * p.sigma())
        .fold(f64::INFINITY, f64::min);
    let t_end = train
        .pulses
        .iter()
        .map(|p| p.delay + margin * p.sigma())
        .fold(f64::NEG_INFINITY, f64::max);

    let mut y = vec![Complex64::new(0.0, 0.0); n];
    y[0] = Complex64::new(1.0, 0.0);

    let omega_top = train
        .max_carrier()
        .max(couplings.delta_cont.last().copied().unwrap_or(0.1));
    let mut h = (2.0 * std::f64::consts::PI / omega_top) / 50.0;
    let h_min = 1e-12 * (t_end - t_start);
    let mut t = t_start;
    let mut steps = 0usize;
    let mut accepted = 0usize;

    let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut y_stage = vec![Complex64::new(0.0, 0.0); n];

    couplings.rhs(train, t, &y, &mut k[0]);
    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::Convergence(format!(
                "step budget exhausted at t = {t} of [{t_start}, {t_end}]"
            )));
        }
        steps += 1;
        if h < h_min {
            return Err(Error::Convergence(format!(
                "step size underflow at t = {t}: the system appears stiff"
            )));
        }
        let h_cur = h.min(t_end - t);
        for stage in 1..7 {
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let a = DP_A[stage - 1][j];
                    if a != 0.0 {
                        acc += kj[i] * a;
                    }
                }
                y_stage[i] = y[i] + acc * h_cur;
            }
            let (head, tail) = k.split_at_mut(stage);
            let _ = head;
            couplings.rhs(train, t + DP_C[stage] * h_cur, &y_stage, &mut tail[0]);
        }
        // fifth-order solution and embedded error estimate
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut y5 = y[i];
            let mut y4 = y[i];
            for j in 0..7 {
                if DP_B5[j] != 0.0 {
                    y5 += k[j][i] * (DP_B5[j] * h_cur);
                }
                if DP_B4[j] != 0.0 {
                    y4 += k[j][i] * (DP_B4[j] * h_cur);
                }
            }
            y_stage[i] = y5;
            let scale = 1.0 + y5.norm();
            err = err.max((y5 - y4).norm() / scale);
        }
        if err <= opts.local_tol {
            t += h_cur;
            y.copy_from_slice(&y_stage);
            k[0] = k[6].clone();
            accepted += 1;
        } else {
            couplings.rhs(train, t, &y, &mut k[0]);
        }
        let safety = 0.9 * (opts.local_tol / err.max(1e-300)).powf(0.2);
        h = h_cur * safety.clamp(0.2, 5.0);
    }

    let norm: f64 = y.iter().map(|a| a.norm_sqr()).sum();
    let bin = trapezoid_weights(&model.energy_grid);
    let nb = couplings.n_bound;
    let nch = couplings.n_channels;
    let mut continuum = vec![Complex64::new(0.0, 0.0); couplings.n_energies * nch];
    for ie in 0..couplings.n_energies {
        let scale = 1.0 / bin[ie].sqrt();
        for ch in 0..nch {
            continuum[ie * nch + ch] = y[1 + nb + ie * nch + ch] * scale;
        }
    }
    Ok(PropagationResult {
        ground: y[0],
        bound: y[1..1 + nb].to_vec(),
        continuum,
        norm,
        steps: accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Polarization, PulseParams};
    use crate::model::generate_toy_chiral;
    use crate::quad::linspace;

    fn micro_model() -> MolecularModel {
        generate_toy_chiral(47, 2, 1, &linspace(0.1, 0.35, 8))
    }

    fn resonant_train(model: &MolecularModel, amplitude: f64) -> crate::field::PulseTrain {
        let ip = model.ionization_potential();
        let w_exc = model.bound_states[0].energy - model.homo_energy;
        let eps_target = 0.22;
        crate::field::PulseTrain::new(
            vec![
                PulseParams {
                    amplitude,
                    carrier: w_exc,
                    cep: 0.0,
                    fwhm: 400.0,
                    delay: 0.0,
                },
                PulseParams {
                    amplitude,
                    carrier: eps_target + ip - w_exc,
                    cep: 0.7,
                    fwhm: 400.0,
                    delay: 0.0,
                },
            ],
            Polarization::LeftCircular,
        )
    }

    #[test]
    fn zero_field_stays_in_ground_state() {
        let model = micro_model();
        let train = resonant_train(&model, 0.0);
        let result =
            propagate_weak_field(&model, &train, 1, (0.4, 1.0, 2.2), Default::default()).unwrap();
        assert!((result.ground - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(result.bound.iter().all(|a| a.norm() < 1e-14));
        assert!(result.continuum.iter().all(|a| a.norm() < 1e-14));
    }

    #[test]
    fn exhausted_step_budget_is_diagnosed() {
        let model = micro_model();
        let amplitude = crate::units::intensity_wcm2_to_field(1e9);
        let train = resonant_train(&model, amplitude);
        let opts = PropagationOptions {
            local_tol: 1e-10,
            max_steps: 10,
        };
        let err = propagate_weak_field(&model, &train, 1, (0.1, 0.2, 0.3), opts).unwrap_err();
        assert!(err.to_string().contains("step budget"), "{err}");
    }

    #[test]
    fn weak_field_norm_stays_bounded() {
        let model = micro_model();
        let amplitude = crate::units::intensity_wcm2_to_field(1e9);
        let train = resonant_train(&model, amplitude);
        let result =
            propagate_weak_field(&model, &train, 1, (0.9, 0.6, 1.4), Default::default()).unwrap();
        assert!(result.norm <= 1.0 + 1e-8, "norm {}", result.norm);
        assert!(result.norm > 0.99);
    }
}
