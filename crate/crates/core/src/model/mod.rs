//! Molecular input data: orbital energies plus bound-bound and
//! bound-continuum partial-wave dipole tables, with JSON ingestion,
//! synthetic chiral test models, and the mirror symmetrization used by the
//! achirality null tests.
//!
//! Dipole tables are indexed by partial-wave channel (ℓ, m), spherical dipole
//! component μ ∈ {-1, 0, +1} and photoelectron energy node. The frozen-core,
//! single-channel picture is assumed throughout: only the highest occupied
//! orbital ionizes.

mod io;
mod toy;

pub use toy::{generate_toy_chiral, mirror_achiralize, SplitMix64};

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Dense (channel, μ, energy) table of complex dipole matrix elements.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleTable {
    pub lmax: u32,
    pub n_energies: usize,
    /// Layout: `data[(channel * 3 + mu_index) * n_energies + energy_index]`.
    pub data: Vec<Complex64>,
}

/// Flat channel index of the (ℓ, m) partial wave.
pub fn channel_index(l: u32, m: i32) -> usize {
    (l as i32 * l as i32 + l as i32 + m) as usize
}

/// Number of (ℓ, m) channels with ℓ ≤ lmax.
pub fn n_channels(lmax: u32) -> usize {
    ((lmax + 1) * (lmax + 1)) as usize
}

/// Iterator over (ℓ, m) channels in storage order.
pub fn channels(lmax: u32) -> impl Iterator<Item = (u32, i32)> {
    (0..=lmax).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m)))
}

impl DipoleTable {
    pub fn zeros(lmax: u32, n_energies: usize) -> Self {
        DipoleTable {
            lmax,
            n_energies,
            data: vec![Complex64::new(0.0, 0.0); n_channels(lmax) * 3 * n_energies],
        }
    }

    #[inline]
    pub fn get(&self, channel: usize, mu_index: usize, ie: usize) -> Complex64 {
        self.data[(channel * 3 + mu_index) * self.n_energies + ie]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, mu_index: usize, ie: usize, value: Complex64) {
        self.data[(channel * 3 + mu_index) * self.n_energies + ie] = value;
    }
}

/// A bound intermediate orbital reachable from the HOMO.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    /// Orbital energy (negative, above the HOMO).
    pub energy: f64,
    /// ⟨φ_r | r̂_μ | φ_HOMO⟩ for μ = -1, 0, +1.
    pub dipole_from_homo: [Complex64; 3],
}

/// Single-channel molecular model: one ionizing orbital, a set of bound
/// intermediates, and partial-wave continuum dipoles on an energy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularModel {
    /// HOMO orbital energy (negative); the ionization threshold is its
    /// negative.
    pub homo_energy: f64,
    /// Permanent dipole ⟨Φ₀| r̂_μ |Φ₀⟩ of the ground state.
    pub ground_dipole: [Complex64; 3],
    pub bound_states: Vec<BoundState>,
    /// Strictly increasing photoelectron energies (a.u.).
    pub energy_grid: Vec<f64>,
    pub lmax: u32,
    /// ⟨φ⁻_{k,ℓ,m} | r̂_μ | φ_HOMO⟩.
    pub continuum_from_homo: DipoleTable,
    /// ⟨φ⁻_{k,ℓ,m} | r̂_μ | φ_r⟩ per bound state, same order as `bound_states`.
    pub continuum_from_bound: Vec<DipoleTable>,
}

impl MolecularModel {
    /// Ionization potential |ε_HOMO|.
    pub fn ionization_potential(&self) -> f64 {
        -self.homo_energy
    }

    pub fn n_channels(&self) -> usize {
        n_channels(self.lmax)
    }

    pub fn n_energies(&self) -> usize {
        self.energy_grid.len()
    }

    /// Full invariant check; every loader goes through this.
    pub fn validate(&self) -> Result<()> {
        if !(self.homo_energy < 0.0) {
            return Err(Error::schema("homo_energy", "must be negative (bound)"));
        }
        if self.energy_grid.len() < 2 {
            return Err(Error::schema("energy_grid", "needs at least two nodes"));
        }
        for (i, w) in self.energy_grid.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::schema(
                    format!("energy_grid[{}]", i + 1),
                    format!("grid not strictly increasing ({} after {})", w[1], w[0]),
                ));
            }
        }
        if self.energy_grid[0] <= 0.0 {
            return Err(Error::schema("energy_grid[0]", "energies must be positive"));
        }
        for (r, b) in self.bound_states.iter().enumerate() {
            if !(b.energy < 0.0) {
                return Err(Error::schema(
                    format!("bound_states[{r}].energy"),
                    "bound energies must lie below threshold (be negative)",
                ));
            }
            if !(b.energy > self.homo_energy) {
                return Err(Error::schema(
                    format!("bound_states[{r}].energy"),
                    "bound state below the HOMO",
                ));
            }
        }
        let check_table = |table: &DipoleTable, path: &str| -> Result<()> {
            if table.lmax != self.lmax {
                return Err(Error::schema(path, "lmax mismatch"));
            }
            if table.n_energies != self.energy_grid.len() {
                return Err(Error::schema(path, "energy count mismatch"));
            }
            if table.data.len() != n_channels(self.lmax) * 3 * self.energy_grid.len() {
                return Err(Error::schema(path, "incomplete channel coverage"));
            }
            Ok(())
        };
        check_table(&self.continuum_from_homo, "continuum_from_homo")?;
        if self.continuum_from_bound.len() != self.bound_states.len() {
            return Err(Error::schema(
                "continuum_from_bound",
                "one table per bound state required",
            ));
        }
        for (r, t) in self.continuum_from_bound.iter().enumerate() {
            check_table(t, &format!("continuum_from_bound[{r}]"))?;
        }
        Ok(())
    }

    /// Linear interpolation of every dipole channel at energy `epsilon`.
    pub fn interpolate_dipoles(&self, epsilon: f64) -> Result<InterpolatedDipoles> {
        let grid = &self.energy_grid;
        if epsilon < grid[0] || epsilon > grid[grid.len() - 1] {
            return Err(Error::Range(format!(
                "energy {epsilon} outside table range [{}, {}]",
                grid[0],
                grid[grid.len() - 1]
            )));
        }
        let hi = grid
            .partition_point(|&e| e < epsilon)
            .min(grid.len() - 1)
            .max(1);
        let lo = hi - 1;
        let t = if grid[hi] > grid[lo] {
            (epsilon - grid[lo]) / (grid[hi] - grid[lo])
        } else {
            0.0
        };
        let lerp_table = |table: &DipoleTable| -> Vec<Complex64> {
            let nch = n_channels(self.lmax);
            let mut out = Vec::with_capacity(nch * 3);
            for ch in 0..nch {
                for mu in 0..3 {
                    let a = table.get(ch, mu, lo);
                    let b = table.get(ch, mu, hi);
                    out.push(a + (b - a) * t);
                }
            }
            out
        };
        Ok(InterpolatedDipoles {
            from_homo: lerp_table(&self.continuum_from_homo),
            from_bound: self.continuum_from_bound.iter().map(lerp_table).collect(),
        })
    }
}

/// Per-channel dipole values at one off-grid energy; layout
/// `values[channel * 3 + mu_index]`.
#[derive(Debug, Clone)]
pub struct InterpolatedDipoles {
    pub from_homo: Vec<Complex64>,
    pub from_bound: Vec<Vec<Complex64>>,
}

/// Two-photon tensor: branch 0 couples through the ground-state permanent
/// dipole, branch r ≥ 1 through the (r-1)-th bound intermediate.
#[derive(Debug, Clone)]
pub struct TwoPhotonTensor {
    pub lmax: u32,
    pub n_energies: usize,
    /// Layout per branch: `data[(channel * 9 + mu_index * 3 + mup_index) * n_energies + ie]`.
    pub branches: Vec<Vec<Complex64>>,
}

impl TwoPhotonTensor {
    #[inline]
    pub fn get(
        &self,
        branch: usize,
        channel: usize,
        mu: usize,
        mup: usize,
        ie: usize,
    ) -> Complex64 {
        self.branches[branch][(channel * 9 + mu * 3 + mup) * self.n_energies + ie]
    }

    pub fn n_branches(&self) -> usize {
        self.branches.len()
    }
}

/// Assembles T^{μ,μ'}(k, ℓ, m) for every two-photon pathway: the
/// permanent-dipole branch uses the continuum-from-HOMO table times the
/// ground dipole; each bound branch uses its continuum table times the
/// bound-from-HOMO dipole.
pub fn build_two_photon_tensor(model: &MolecularModel) -> TwoPhotonTensor {
    let nch = model.n_channels();
    let ne = model.n_energies();
    let mut branches = Vec::with_capacity(1 + model.bound_states.len());

    let fill = |table: &DipoleTable, second: &[Complex64; 3]| {
        let mut data = vec![Complex64::new(0.0, 0.0); nch * 9 * ne];
        for ch in 0..nch {
            for mu in 0..3 {
                for mup in 0..3 {
                    for ie in 0..ne {
                        data[(ch * 9 + mu * 3 + mup) * ne + ie] =
                            table.get(ch, mu, ie) * second[mup];
                    }
                }
            }
        }
        data
    };

    branches.push(fill(&model.continuum_from_homo, &model.ground_dipole));
    for (r, b) in model.bound_states.iter().enumerate() {
        branches.push(fill(&model.continuum_from_bound[r], &b.dipole_from_homo));
    }
    TwoPhotonTensor {
        lmax: model.lmax,
        n_energies: ne,
        branches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::linspace;

    #[test]
    fn channel_indexing_is_dense_and_ordered() {
        let mut seen = vec![false; n_channels(3)];
        for (l, m) in channels(3) {
            let idx = channel_index(l, m);
            assert!(!seen[idx]);
            seen[idx] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn toy_model_validates_and_counts() {
        let grid = linspace(0.05, 0.55, 16);
        let model = generate_toy_chiral(7, 2, 2, &grid);
        model.validate().unwrap();
        assert_eq!(model.bound_states.len(), 2);
        assert_eq!(model.n_energies(), 16);
        assert_eq!(model.continuum_from_homo.data.len(), n_channels(2) * 3 * 16);
    }

    #[test]
    fn monotonicity_is_enforced() {
        let grid = linspace(0.05, 0.5, 8);
        let mut model = generate_toy_chiral(3, 1, 1, &grid);
        model.energy_grid[3] = model.energy_grid[2];
        let err = model.validate().unwrap_err();
        assert!(err.to_string().contains("energy_grid"));
    }

    #[test]
    fn tensor_permanent_branch_vanishes_without_ground_dipole() {
        let grid = linspace(0.05, 0.5, 6);
        let mut model = generate_toy_chiral(11, 1, 1, &grid);
        model.ground_dipole = [Complex64::new(0.0, 0.0); 3];
        let tensor = build_two_photon_tensor(&model);
        assert!(tensor.branches[0].iter().all(|v| v.norm() == 0.0));
        assert!(tensor.branches[1].iter().any(|v| v.norm() > 0.0));
    }

    #[test]
    fn tensor_matches_elementwise_products() {
        let grid = linspace(0.05, 0.5, 5);
        let model = generate_toy_chiral(23, 2, 2, &grid);
        let tensor = build_two_photon_tensor(&model);
        for (l, m) in channels(2) {
            let ch = channel_index(l, m);
            for mu in 0..3 {
                for mup in 0..3 {
                    for ie in 0..5 {
                        let perm =
                            model.continuum_from_homo.get(ch, mu, ie) * model.ground_dipole[mup];
                        assert_eq!(tensor.get(0, ch, mu, mup, ie), perm);
                        for r in 0..model.bound_states.len() {
                            let expect = model.continuum_from_bound[r].get(ch, mu, ie)
                                * model.bound_states[r].dipole_from_homo[mup];
                            assert_eq!(tensor.get(r + 1, ch, mu, mup, ie), expect);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_reduces_to_bound_table_for_unit_dipoles() {
        let grid = linspace(0.05, 0.5, 4);
        let mut model = generate_toy_chiral(5, 1, 1, &grid);
        model.ground_dipole = [Complex64::new(0.0, 0.0); 3];
        model.bound_states[0].dipole_from_homo = [Complex64::new(1.0, 0.0); 3];
        let tensor = build_two_photon_tensor(&model);
        for ch in 0..model.n_channels() {
            for mu in 0..3 {
                for mup in 0..3 {
                    for ie in 0..4 {
                        assert_eq!(
                            tensor.get(1, ch, mu, mup, ie),
                            model.continuum_from_bound[0].get(ch, mu, ie)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn interpolation_exact_at_nodes_and_linear_between() {
        let grid = linspace(0.1, 0.4, 7);
        let model = generate_toy_chiral(17, 1, 2, &grid);
        // node reproduction
        let at_node = model.interpolate_dipoles(grid[3]).unwrap();
        for ch in 0..model.n_channels() {
            for mu in 0..3 {
                assert!(
                    (at_node.from_homo[ch * 3 + mu] - model.continuum_from_homo.get(ch, mu, 3))
                        .norm()
                        < 1e-15
                );
            }
        }
        // midpoint of a linear table is the arithmetic mean: the toy tables
        // are linear in energy by construction
        let mid = 0.5 * (grid[2] + grid[3]);
        let at_mid = model.interpolate_dipoles(mid).unwrap();
        for ch in 0..model.n_channels() {
            for mu in 0..3 {
                let mean = (model.continuum_from_homo.get(ch, mu, 2)
                    + model.continuum_from_homo.get(ch, mu, 3))
                    * 0.5;
                assert!((at_mid.from_homo[ch * 3 + mu] - mean).norm() < 1e-14);
            }
        }
        // out of range
        assert!(model.interpolate_dipoles(0.05).is_err());
        assert!(model.interpolate_dipoles(0.45).is_err());
    }

    #[test]
    fn interpolant_within_slope_bound() {
        let grid = linspace(0.1, 0.4, 7);
        let model = generate_toy_chiral(29, 1, 2, &grid);
        // between any two nodes the interpolant stays inside the segment hull
        for seg in 0..6 {
            let e = grid[seg] + 0.3 * (grid[seg + 1] - grid[seg]);
            let v = model.interpolate_dipoles(e).unwrap();
            for ch in 0..model.n_channels() {
                for mu in 0..3 {
                    let a = model.continuum_from_homo.get(ch, mu, seg);
                    let b = model.continuum_from_homo.get(ch, mu, seg + 1);
                    let x = v.from_homo[ch * 3 + mu];
                    let lo = a.re.min(b.re) - 1e-12;
                    let hi = a.re.max(b.re) + 1e-12;
                    assert!(x.re >= lo && x.re <= hi);
                }
            }
        }
    }
}
