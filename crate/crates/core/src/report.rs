// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV, JSON and manifest output. Everything is written in a fixed order with
//! no timestamps so identical inputs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuit::DimensionlessParams;
use crate::spectrum::{potential, InstantSpectrum};
use crate::Result;

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns given by name, one vector per column.
pub fn write_columns(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    let rows = columns.iter().map(|c| c.len()).min().unwrap_or(0);
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| format!("{:e}", c[i])))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Spectrum dump: a `#` header with the flux, level count and barrier, then
/// `delta, U_GHz, psi_0, …` rows.
pub fn spectrum_csv(spec: &InstantSpectrum, dp: &DimensionlessParams) -> String {
    let mut out = format!(
        "# phi_r = {}\n# n_left = {}\n# U_barrier_GHz = {:e}\n# energies_GHz = {}\n",
        spec.phi_r,
        spec.n_left,
        spec.geometry.u_barrier,
        spec.energies
            .iter()
            .map(|e| format!("{e:e}"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    out.push_str("delta,U_GHz");
    for m in 0..spec.wavefunctions.len() {
        out.push_str(&format!(",psi_{m}"));
    }
    out.push('\n');
    for i in 0..spec.grid.count {
        let x = spec.grid.x(i);
        out.push_str(&format!("{x:e},{:e}", potential(x, spec.phi_r, dp)));
        for psi in &spec.wavefunctions {
            out.push_str(&format!(",{:e}", psi[i]));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub command: String,
    pub config: serde_json::Value,
}

/// Record of every file a command emitted, with the resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn new(tool: &str, version: &str) -> Self {
        Self {
            tool: tool.to_string(),
            version: version.to_string(),
            entries: Vec::new(),
        }
    }

    pub fn record<C: Serialize>(&mut self, file: &Path, command: &str, config: &C) -> Result<()> {
        let name = file.file_name().map_or_else(
            || file.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        );
        self.entries.push(ManifestEntry {
            file: name,
            command: command.to_string(),
            config: serde_json::to_value(config)?,
        });
        Ok(())
    }

    /// Writes `manifest.json` into `dir`, merging with entries already there
    /// for other files.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let mut merged = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str::<Manifest>(&text).unwrap_or_else(|_| self.clone()),
            Err(_) => Manifest::new(&self.tool, &self.version),
        };
        merged.tool.clone_from(&self.tool);
        merged.version.clone_from(&self.version);
        for e in &self.entries {
            merged.entries.retain(|old| old.file != e.file);
            merged.entries.push(e.clone());
        }
        merged.entries.sort_by(|a, b| a.file.cmp(&b.file));
        write_json(&path, &merged)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_merges_by_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Manifest::new("qnd", "0.1.0");
        a.record(&dir.path().join("a.csv"), "spectrum", &1).unwrap();
        a.write(dir.path()).unwrap();
        let mut b = Manifest::new("qnd", "0.1.0");
        b.record(&dir.path().join("b.csv"), "phase", &2).unwrap();
        b.record(&dir.path().join("a.csv"), "spectrum", &3).unwrap();
        let path = b.write(dir.path()).unwrap();
        let m: Manifest = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(m.entries.len(), 2);
        assert_eq!(m.entries[0].file, "a.csv");
        assert_eq!(m.entries[0].config, serde_json::json!(3));
    }

    #[test]
    fn columns_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        write_columns(&p, &["x", "y"], &[&[1.0, 2.0], &[3.0, 4.5]]).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text, "x,y\n1e0,3e0\n2e0,4.5e0\n");
    }
}
