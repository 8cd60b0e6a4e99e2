// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Flag values with mandatory unit suffixes.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Capacitance,
    Inductance,
    Current,
    Time,
}

impl Kind {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Kind::Capacitance => &[("fF", 1e-15), ("pF", 1e-12), ("nF", 1e-9)],
            Kind::Inductance => &[("pH", 1e-12), ("nH", 1e-9), ("uH", 1e-6), ("μH", 1e-6)],
            Kind::Current => &[("nA", 1e-9), ("uA", 1e-6), ("μA", 1e-6), ("mA", 1e-3)],
            // Times are kept in ns.
            Kind::Time => &[("ps", 1e-3), ("ns", 1.0), ("us", 1e3), ("μs", 1e3)],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Capacitance => "capacitance",
            Kind::Inductance => "inductance",
            Kind::Current => "current",
            Kind::Time => "time",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantityError(String);

impl fmt::Display for QuantityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for QuantityError {}

fn split_unit(text: &str, kind: Kind) -> Result<(&str, f64), QuantityError> {
    let text = text.trim();
    for &(suffix, scale) in kind.units() {
        if let Some(number) = text.strip_suffix(suffix) {
            return Ok((number.trim_end(), scale));
        }
    }
    let accepted: Vec<&str> = kind.units().iter().map(|(s, _)| *s).collect();
    Err(QuantityError(format!(
        "{text:?}: expected a {} with one of the units {}",
        kind.name(),
        accepted.join(", ")
    )))
}

fn number(text: &str, original: &str) -> Result<f64, QuantityError> {
    text.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| QuantityError(format!("{original:?}: not a number")))
}

/// Parses `"<number><unit>"` into SI units (ns for times). A bare zero is
/// accepted since it is the same in every unit.
pub fn parse(text: &str, kind: Kind) -> Result<f64, QuantityError> {
    if let Ok(0.0) = text.trim().parse::<f64>() {
        return Ok(0.0);
    }
    let (n, scale) = split_unit(text, kind)?;
    Ok(number(n, text)? * scale)
}

/// Parses `"<lo>:<hi><unit>"`; the unit may also be given on both ends.
pub fn parse_range(text: &str, kind: Kind) -> Result<(f64, f64), QuantityError> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| QuantityError(format!("{text:?}: expected <lo>:<hi><unit>")))?;
    let (hi_number, scale) = split_unit(hi, kind)?;
    let hi = number(hi_number, text)? * scale;
    let lo = match split_unit(lo, kind) {
        Ok((n, s)) => number(n, text)? * s,
        Err(_) => number(lo.trim(), text)? * scale,
    };
    if hi <= lo {
        return Err(QuantityError(format!("{text:?}: empty range")));
    }
    Ok((lo, hi))
}

/// The physical kind of a named circuit parameter.
pub fn kind_of(param: &str) -> Option<Kind> {
    match param {
        "C" | "Cr" => Some(Kind::Capacitance),
        "L" | "Lr" | "M" => Some(Kind::Inductance),
        "I0" => Some(Kind::Current),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs()
    }

    #[test]
    fn units_scale_to_si() {
        assert!(close(parse("700fF", Kind::Capacitance).unwrap(), 700e-15));
        assert!(close(parse("4.4pF", Kind::Capacitance).unwrap(), 4.4e-12));
        assert!(close(parse("1.8nH", Kind::Inductance).unwrap(), 1.8e-9));
        assert!(close(parse("720 pH", Kind::Inductance).unwrap(), 720e-12));
        assert!(close(parse("1.7uA", Kind::Current).unwrap(), 1.7e-6));
        assert!(close(parse("1.7μA", Kind::Current).unwrap(), 1.7e-6));
        assert!(close(parse("1ns", Kind::Time).unwrap(), 1.0));
        assert!(close(parse("500ps", Kind::Time).unwrap(), 0.5));
    }

    #[test]
    fn bare_and_mismatched_units_are_rejected() {
        assert!(parse("1.8", Kind::Inductance).is_err());
        assert!(parse("1.8pF", Kind::Inductance).is_err());
        assert!(parse("nH", Kind::Inductance).is_err());
        assert!(parse("10", Kind::Time).is_err());
    }

    #[test]
    fn zero_needs_no_unit() {
        assert_eq!(parse("0", Kind::Inductance).unwrap(), 0.0);
        assert_eq!(parse("0.0", Kind::Capacitance).unwrap(), 0.0);
    }

    #[test]
    fn ranges() {
        let (lo, hi) = parse_range("0.3:1.2pF", Kind::Capacitance).unwrap();
        assert!(close(lo, 0.3e-12) && close(hi, 1.2e-12));
        let (lo, hi) = parse_range("300fF:1.2pF", Kind::Capacitance).unwrap();
        assert!(close(lo, 300e-15) && close(hi, 1.2e-12));
        assert!(parse_range("0.3:1.2", Kind::Capacitance).is_err());
        assert!(parse_range("1.2:0.3pF", Kind::Capacitance).is_err());
    }
}
