//! Synthetic chiral test models and the mirror symmetrization.

use super::{channel_index, channels, BoundState, DipoleTable, MolecularModel};
use num_complex::Complex64;

/// SplitMix64: a tiny, platform-independent PRNG with a fixed stream order,
/// so toy models are bit-identical across runs and machines.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    pub fn next_signed(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }

    pub fn next_complex(&mut self, scale: f64) -> Complex64 {
        let re = self.next_signed();
        let im = self.next_signed();
        Complex64::new(re * scale, im * scale)
    }
}

/// HOMO energy of the toy models: threshold 11.88 eV below the continuum.
pub const TOY_HOMO_ENERGY: f64 = -0.4366;

/// Deterministic pseudo-random chiral model.
///
/// Bound excitation energies are fixed fractions of the ionization potential
/// spread over [0.60, 0.95]; every dipole table entry is a seeded complex
/// random number varying linearly in photoelectron energy. No reflection
/// symmetry is imposed, so the model is generically chiral.
pub fn generate_toy_chiral(seed: u64, n_bound: usize, lmax: u32, grid: &[f64]) -> MolecularModel {
    assert!(n_bound >= 1, "need at least one bound state");
    assert!(lmax >= 1, "need lmax >= 1");
    assert!(grid.len() >= 2, "need at least two energy nodes");
    let mut rng = SplitMix64::new(seed);

    let ip = -TOY_HOMO_ENERGY;
    let fractions: Vec<f64> = (0..n_bound)
        .map(|r| {
            if n_bound == 1 {
                0.60
            } else {
                0.60 + 0.35 * r as f64 / (n_bound - 1) as f64
            }
        })
        .collect();

    let ground_dipole = [
        rng.next_complex(0.4),
        rng.next_complex(0.4),
        rng.next_complex(0.4),
    ];

    let mut bound_states = Vec::with_capacity(n_bound);
    for &f in &fractions {
        let energy = TOY_HOMO_ENERGY + f * ip;
        let dipole_from_homo = [
            rng.next_complex(0.5),
            rng.next_complex(0.5),
            rng.next_complex(0.5),
        ];
        bound_states.push(BoundState {
            energy,
            dipole_from_homo,
        });
    }

    let e_mid = 0.5 * (grid[0] + grid[grid.len() - 1]);
    let half_span = 0.5 * (grid[grid.len() - 1] - grid[0]);
    let fill_table = |rng: &mut SplitMix64| {
        let mut table = DipoleTable::zeros(lmax, grid.len());
        for (l, m) in channels(lmax) {
            let ch = channel_index(l, m);
            let scale = 0.3 / (1.0 + l as f64);
            for mu in 0..3 {
                let base = rng.next_complex(scale);
                let slope = 0.4 * rng.next_signed();
                for (ie, &e) in grid.iter().enumerate() {
                    let x = (e - e_mid) / half_span;
                    table.set(ch, mu, ie, base * (1.0 + slope * x));
                }
            }
        }
        table
    };

    let continuum_from_homo = fill_table(&mut rng);
    let continuum_from_bound = (0..n_bound).map(|_| fill_table(&mut rng)).collect();

    let model = MolecularModel {
        homo_energy: TOY_HOMO_ENERGY,
        ground_dipole,
        bound_states,
        energy_grid: grid.to_vec(),
        lmax,
        continuum_from_homo,
        continuum_from_bound,
    };
    model.validate().expect("toy model construction is valid");
    model
}

/// Reflection phase for a continuum-table entry under the mirror map
/// (m, μ) → (-m, -μ).
fn mirror_phase(m: i32, mu: i32) -> f64 {
    if (m + mu).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn mirror_table(table: &DipoleTable) -> DipoleTable {
    let mut out = DipoleTable::zeros(table.lmax, table.n_energies);
    for (l, m) in channels(table.lmax) {
        let ch = channel_index(l, m);
        let ch_ref = channel_index(l, -m);
        for mu in -1i32..=1 {
            let mu_idx = (mu + 1) as usize;
            let mu_ref = (-mu + 1) as usize;
            let phase = mirror_phase(m, mu);
            for ie in 0..table.n_energies {
                out.set(ch, mu_idx, ie, table.get(ch_ref, mu_ref, ie) * phase);
            }
        }
    }
    out
}

fn mirror_vector(v: &[Complex64; 3]) -> [Complex64; 3] {
    // (μ) → (-μ) with phase (-1)^μ: components stored as [μ=-1, 0, +1]
    [-v[2], v[1], -v[0]]
}

fn average_tables(a: &DipoleTable, b: &DipoleTable) -> DipoleTable {
    let mut out = a.clone();
    for (x, y) in out.data.iter_mut().zip(&b.data) {
        *x = (*x + *y) * 0.5;
    }
    out
}

/// Symmetrizes every dipole table under the reflection (m → -m, μ → -μ with
/// the phase (-1)^{m+μ}), producing an achiral model: all odd-L anisotropy
/// coefficients of the result vanish identically.
///
/// Idempotent: applying it twice equals applying it once.
pub fn mirror_achiralize(model: &MolecularModel) -> MolecularModel {
    let mut out = model.clone();
    let avg3 = |v: &[Complex64; 3]| -> [Complex64; 3] {
        let m = mirror_vector(v);
        [
            (v[0] + m[0]) * 0.5,
            (v[1] + m[1]) * 0.5,
            (v[2] + m[2]) * 0.5,
        ]
    };
    out.ground_dipole = avg3(&model.ground_dipole);
    for b in &mut out.bound_states {
        b.dipole_from_homo = avg3(&b.dipole_from_homo);
    }
    out.continuum_from_homo = average_tables(
        &model.continuum_from_homo,
        &mirror_table(&model.continuum_from_homo),
    );
    out.continuum_from_bound = model
        .continuum_from_bound
        .iter()
        .map(|t| average_tables(t, &mirror_table(t)))
        .collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::linspace;

    #[test]
    fn seeded_generation_is_deterministic() {
        let grid = linspace(0.04, 0.55, 12);
        let a = generate_toy_chiral(42, 3, 2, &grid);
        let b = generate_toy_chiral(42, 3, 2, &grid);
        assert_eq!(a, b);
        let c = generate_toy_chiral(43, 3, 2, &grid);
        assert_ne!(a, c);
    }

    #[test]
    fn splitmix_reference_stream() {
        // Published SplitMix64 test vector for seed 0.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220A8397B1DCDAF);
        assert_eq!(rng.next_u64(), 0x6E789E6AA1B965F4);
        assert_eq!(rng.next_u64(), 0x06C45D188009454F);
    }

    #[test]
    fn threshold_matches_expected_ev() {
        let grid = linspace(0.04, 0.55, 8);
        let model = generate_toy_chiral(1, 1, 1, &grid);
        let ip_ev = model.ionization_potential() * crate::units::HARTREE_EV;
        assert!((ip_ev - 11.88).abs() < 0.01, "{ip_ev}");
    }

    #[test]
    fn mirror_is_idempotent() {
        let grid = linspace(0.04, 0.55, 9);
        let model = generate_toy_chiral(99, 2, 3, &grid);
        let once = mirror_achiralize(&model);
        let twice = mirror_achiralize(&once);
        for (a, b) in once
            .continuum_from_homo
            .data
            .iter()
            .zip(&twice.continuum_from_homo.data)
        {
            assert!((a - b).norm() < 1e-15);
        }
        for (a, b) in once.ground_dipole.iter().zip(&twice.ground_dipole) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn mirror_fixes_symmetric_entries() {
        // a model already symmetric under the reflection is left unchanged
        let grid = linspace(0.04, 0.55, 5);
        let symmetric = mirror_achiralize(&generate_toy_chiral(7, 1, 2, &grid));
        let again = mirror_achiralize(&symmetric);
        for (a, b) in symmetric.continuum_from_bound[0]
            .data
            .iter()
            .zip(&again.continuum_from_bound[0].data)
        {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
