//! JSON ingestion and serialization of molecular models.
//!
//! The schema mirrors the (k, ℓ, m, μ) indexing of partial-wave scattering
//! outputs so external converters stay thin adapters. Complex numbers are
//! `[re, im]` pairs; energies carry an explicit unit tag (`"au"` or `"ev"`).

use super::{channels, BoundState, DipoleTable, MolecularModel};
use crate::error::{Error, Result};
use crate::units;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct UnitsJson {
    energy: String,
}

#[derive(Serialize, Deserialize)]
struct BoundJson {
    energy: f64,
    dipole_from_homo: [[f64; 2]; 3],
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    l: u32,
    m: i32,
    mu: i32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    bound: Option<usize>,
    values: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    units: UnitsJson,
    homo_energy: f64,
    lmax: u32,
    ground_dipole: [[f64; 2]; 3],
    bound_states: Vec<BoundJson>,
    energy_grid: Vec<f64>,
    continuum_from_homo: Vec<ChannelJson>,
    continuum_from_bound: Vec<ChannelJson>,
}

fn to_c(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn from_c(v: Complex64) -> [f64; 2] {
    [v.re, v.im]
}

fn energy_scale(tag: &str) -> Result<f64> {
    match tag {
        "au" => Ok(1.0),
        "ev" => Ok(1.0 / units::HARTREE_EV),
        other => Err(Error::schema(
            "units.energy",
            format!("unknown energy unit `{other}` (expected `au` or `ev`)"),
        )),
    }
}

fn assemble_table(
    entries: &[ChannelJson],
    lmax: u32,
    n_energies: usize,
    want_bound: Option<usize>,
    path: &str,
) -> Result<DipoleTable> {
    let mut table = DipoleTable::zeros(lmax, n_energies);
    let mut filled = vec![false; super::n_channels(lmax) * 3];
    for (i, e) in entries.iter().enumerate() {
        if e.bound != want_bound {
            continue;
        }
        let epath = format!("{path}[{i}]");
        if e.l > lmax {
            return Err(Error::schema(format!("{epath}.l"), "l exceeds lmax"));
        }
        if e.m.abs() > e.l as i32 {
            return Err(Error::schema(format!("{epath}.m"), "|m| > l"));
        }
        if !(-1..=1).contains(&e.mu) {
            return Err(Error::schema(
                format!("{epath}.mu"),
                "mu must be -1, 0 or +1",
            ));
        }
        if e.values.len() != n_energies {
            return Err(Error::schema(
                format!("{epath}.values"),
                format!(
                    "expected {n_energies} entries matching the energy grid, got {}",
                    e.values.len()
                ),
            ));
        }
        let ch = super::channel_index(e.l, e.m);
        let mu_idx = (e.mu + 1) as usize;
        if filled[ch * 3 + mu_idx] {
            return Err(Error::schema(epath, "duplicate (l, m, mu) channel"));
        }
        filled[ch * 3 + mu_idx] = true;
        for (ie, &v) in e.values.iter().enumerate() {
            table.set(ch, mu_idx, ie, to_c(v));
        }
    }
    for (l, m) in channels(lmax) {
        for mu in -1i32..=1 {
            if !filled[super::channel_index(l, m) * 3 + (mu + 1) as usize] {
                return Err(Error::schema(
                    path,
                    format!("missing channel (l={l}, m={m}, mu={mu})"),
                ));
            }
        }
    }
    Ok(table)
}

impl MolecularModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ModelJson = serde_json::from_str(text)?;
        let scale = energy_scale(&raw.units.energy)?;
        let bound_states: Vec<BoundState> = raw
            .bound_states
            .iter()
            .map(|b| BoundState {
                energy: b.energy * scale,
                dipole_from_homo: [
                    to_c(b.dipole_from_homo[0]),
                    to_c(b.dipole_from_homo[1]),
                    to_c(b.dipole_from_homo[2]),
                ],
            })
            .collect();
        let energy_grid: Vec<f64> = raw.energy_grid.iter().map(|&e| e * scale).collect();
        let ne = energy_grid.len();
        let continuum_from_homo = assemble_table(
            &raw.continuum_from_homo,
            raw.lmax,
            ne,
            None,
            "continuum_from_homo",
        )?;
        let mut continuum_from_bound = Vec::with_capacity(bound_states.len());
        for r in 0..bound_states.len() {
            continuum_from_bound.push(assemble_table(
                &raw.continuum_from_bound,
                raw.lmax,
                ne,
                Some(r),
                "continuum_from_bound",
            )?);
        }
        let model = MolecularModel {
            homo_energy: raw.homo_energy * scale,
            ground_dipole: [
                to_c(raw.ground_dipole[0]),
                to_c(raw.ground_dipole[1]),
                to_c(raw.ground_dipole[2]),
            ],
            bound_states,
            energy_grid,
            lmax: raw.lmax,
            continuum_from_homo,
            continuum_from_bound,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        let table_entries = |table: &DipoleTable, bound: Option<usize>| -> Vec<ChannelJson> {
            let mut out = Vec::new();
            for (l, m) in channels(self.lmax) {
                let ch = super::channel_index(l, m);
                for mu in -1i32..=1 {
                    let mu_idx = (mu + 1) as usize;
                    out.push(ChannelJson {
                        l,
                        m,
                        mu,
                        bound,
                        values: (0..self.n_energies())
                            .map(|ie| from_c(table.get(ch, mu_idx, ie)))
                            .collect(),
                    });
                }
            }
            out
        };
        let mut continuum_from_bound = Vec::new();
        for (r, t) in self.continuum_from_bound.iter().enumerate() {
            continuum_from_bound.extend(table_entries(t, Some(r)));
        }
        let raw = ModelJson {
            units: UnitsJson {
                energy: "au".into(),
            },
            homo_energy: self.homo_energy,
            lmax: self.lmax,
            ground_dipole: [
                from_c(self.ground_dipole[0]),
                from_c(self.ground_dipole[1]),
                from_c(self.ground_dipole[2]),
            ],
            bound_states: self
                .bound_states
                .iter()
                .map(|b| BoundJson {
                    energy: b.energy,
                    dipole_from_homo: [
                        from_c(b.dipole_from_homo[0]),
                        from_c(b.dipole_from_homo[1]),
                        from_c(b.dipole_from_homo[2]),
                    ],
                })
                .collect(),
            energy_grid: self.energy_grid.clone(),
            continuum_from_homo: table_entries(&self.continuum_from_homo, None),
            continuum_from_bound,
        };
        serde_json::to_string_pretty(&raw).expect("model serialization cannot fail")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::generate_toy_chiral;
    use super::*;
    use crate::quad::linspace;

    #[test]
    fn roundtrip_preserves_model() {
        let grid = linspace(0.05, 0.5, 6);
        let model = generate_toy_chiral(13, 2, 2, &grid);
        let text = model.to_json();
        let back = MolecularModel::from_json(&text).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn counts_match_schema() {
        let grid = linspace(0.04, 0.5, 16);
        let model = generate_toy_chiral(5, 2, 2, &grid);
        let text = model.to_json();
        let raw: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(raw["bound_states"].as_array().unwrap().len(), 2);
        assert_eq!(raw["energy_grid"].as_array().unwrap().len(), 16);
        // (lmax+1)² · 3 channel entries per table
        assert_eq!(raw["continuum_from_homo"].as_array().unwrap().len(), 9 * 3);
        assert_eq!(
            raw["continuum_from_bound"].as_array().unwrap().len(),
            2 * 9 * 3
        );
    }

    #[test]
    fn non_monotone_grid_is_rejected() {
        let grid = linspace(0.05, 0.5, 4);
        let model = generate_toy_chiral(3, 1, 1, &grid);
        let mut raw: serde_json::Value = serde_json::from_str(&model.to_json()).unwrap();
        raw["energy_grid"] = serde_json::json!([0.2, 0.1, 0.3, 0.4]);
        let err = MolecularModel::from_json(&raw.to_string()).unwrap_err();
        assert!(err.to_string().contains("energy_grid"), "{err}");
    }

    #[test]
    fn missing_mu_component_is_rejected_with_path() {
        let grid = linspace(0.05, 0.5, 4);
        let model = generate_toy_chiral(3, 1, 1, &grid);
        let mut raw: serde_json::Value = serde_json::from_str(&model.to_json()).unwrap();
        raw["continuum_from_homo"].as_array_mut().unwrap().pop();
        let err = MolecularModel::from_json(&raw.to_string()).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("continuum_from_homo") && msg.contains("missing"),
            "{msg}"
        );
    }

    #[test]
    fn m_exceeding_l_is_rejected() {
        let grid = linspace(0.05, 0.5, 4);
        let model = generate_toy_chiral(3, 1, 1, &grid);
        let mut raw: serde_json::Value = serde_json::from_str(&model.to_json()).unwrap();
        raw["continuum_from_homo"][0]["m"] = serde_json::json!(5);
        let err = MolecularModel::from_json(&raw.to_string()).unwrap_err();
        assert!(err.to_string().contains("m"), "{err}");
    }

    #[test]
    fn ev_units_are_converted() {
        let grid = linspace(0.05, 0.5, 4);
        let model = generate_toy_chiral(3, 1, 1, &grid);
        let mut raw: serde_json::Value = serde_json::from_str(&model.to_json()).unwrap();
        raw["units"]["energy"] = serde_json::json!("ev");
        raw["homo_energy"] = serde_json::json!(model.homo_energy * crate::units::HARTREE_EV);
        raw["energy_grid"] = serde_json::json!(model
            .energy_grid
            .iter()
            .map(|e| e * crate::units::HARTREE_EV)
            .collect::<Vec<_>>());
        let bs: Vec<f64> = model
            .bound_states
            .iter()
            .map(|b| b.energy * crate::units::HARTREE_EV)
            .collect();
        raw["bound_states"][0]["energy"] = serde_json::json!(bs[0]);
        let back = MolecularModel::from_json(&raw.to_string()).unwrap();
        assert!((back.homo_energy - model.homo_energy).abs() < 1e-12);
        assert!((back.energy_grid[2] - model.energy_grid[2]).abs() < 1e-12);
    }
}
