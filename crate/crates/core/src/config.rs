// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Plain-text `key = value` parameter documents.
//!
//! Keys carry their unit in the name (`C_fF`, `L_pH`, `I0_uA`, `Cr_pF`,
//! `Lr_nH`, `M_nH`); `phi_p` and `n_quanta` are dimensionless. Lines starting
//! with `#` are comments. Unspecified keys keep the working values.

use std::path::Path;

use crate::circuit::PhysicalParams;
use crate::{Error, Result};

/// Recognised keys with the SI factor their value is multiplied by.
pub const KEYS: [(&str, f64); 8] = [
    ("C_fF", 1e-15),
    ("L_pH", 1e-12),
    ("I0_uA", 1e-6),
    ("Cr_pF", 1e-12),
    ("Lr_nH", 1e-9),
    ("M_nH", 1e-9),
    ("phi_p", 1.0),
    ("n_quanta", 1.0),
];

fn field_for(key: &str) -> Option<(&'static str, f64)> {
    let name = match key {
        "C_fF" => "C",
        "L_pH" => "L",
        "I0_uA" => "I0",
        "Cr_pF" => "Cr",
        "Lr_nH" => "Lr",
        "M_nH" => "M",
        "phi_p" => "phi_p",
        "n_quanta" => "n_quanta",
        _ => return None,
    };
    let scale = KEYS.iter().find(|(k, _)| *k == key).map(|(_, s)| *s)?;
    Some((name, scale))
}

/// Applies a key-value document on top of `base`.
pub fn parse_params(text: &str, base: PhysicalParams) -> Result<PhysicalParams> {
    let mut pp = base;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        let (name, scale) = field_for(key)
            .ok_or_else(|| Error::Config(format!("line {}: unknown key {key:?}", lineno + 1)))?;
        let value: f64 = value.trim().parse().map_err(|_| {
            Error::Config(format!(
                "line {}: {key} is not a number: {:?}",
                lineno + 1,
                value.trim()
            ))
        })?;
        pp.set(name, value * scale)?;
    }
    pp.validate()?;
    Ok(pp)
}

pub fn load_params(path: &Path) -> Result<PhysicalParams> {
    let text = std::fs::read_to_string(path)?;
    parse_params(&text, PhysicalParams::working())
}

/// Renders parameters back into the document format.
pub fn render_params(pp: &PhysicalParams) -> String {
    let mut out = String::new();
    for (key, scale) in KEYS {
        let (name, _) = field_for(key).expect("known key");
        let value = pp.get(name).expect("known field") / scale;
        out.push_str(&format!("{key} = {value}\n"));
    }
    out
}
