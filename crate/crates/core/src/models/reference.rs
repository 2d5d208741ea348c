//! Frozen reference parameter sets.
//!
//! Each set ships as a plain-text constants file (`key = value` lines, `#`
//! comments, a mandatory `version` and `family`) embedded at compile time.

use alloc::vec::Vec;
use core::fmt;

use super::keys::ParamKeys;
use super::{FfwdParams, GrnParams, PlantParams, QicParams, ReproParams};

pub const GRN_TRISTABLE: &str = include_str!("../../params/grn_tristable.params");
pub const QIC_REFERENCE: &str = include_str!("../../params/qic_reference.params");
pub const FFWD_REFERENCE: &str = include_str!("../../params/ffwd_reference.params");
pub const REPRO_REFERENCE: &str = include_str!("../../params/repro_reference.params");

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsFile<'a> {
    pub version: u32,
    pub family: &'a str,
    pub values: Vec<(&'a str, f64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantsError {
    pub line: usize,
    pub message: &'static str,
}

impl fmt::Display for ConstantsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

pub fn parse_constants(text: &str) -> Result<ConstantsFile<'_>, ConstantsError> {
    let mut version = None;
    let mut family = None;
    let mut values: Vec<(&str, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message| ConstantsError { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(err("expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || !key.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_') {
            return Err(err("invalid key"));
        }
        match key {
            "version" => {
                let v = value.parse().map_err(|_| err("version must be an integer"))?;
                if version.replace(v).is_some() {
                    return Err(err("duplicate key"));
                }
            }
            "family" => {
                if family.replace(value).is_some() {
                    return Err(err("duplicate key"));
                }
            }
            _ => {
                let v: f64 = value.parse().map_err(|_| err("value is not a number"))?;
                if !v.is_finite() {
                    return Err(err("value is not finite"));
                }
                if values.iter().any(|(k, _)| *k == key) {
                    return Err(err("duplicate key"));
                }
                values.push((key, v));
            }
        }
    }
    let last = text.lines().count().max(1);
    Ok(ConstantsFile {
        version: version.ok_or(ConstantsError { line: last, message: "missing version" })?,
        family: family.ok_or(ConstantsError { line: last, message: "missing family" })?,
        values,
    })
}

/// Applies every value whose key `P` knows; returns the keys it did not take.
pub fn apply<'a, P: ParamKeys>(target: &mut P, file: &ConstantsFile<'a>) -> Vec<&'a str> {
    file.values
        .iter()
        .filter(|(k, v)| target.set(k, *v).is_err())
        .map(|(k, _)| *k)
        .collect()
}

fn load<P: ParamKeys>(mut base: P, text: &str) -> P {
    let file = parse_constants(text).expect("embedded constants file is well formed");
    let rest = apply(&mut base, &file);
    debug_assert!(rest.is_empty(), "unused keys {rest:?}");
    base
}

pub fn grn_tristable() -> GrnParams {
    // Seed values are overwritten key by key; the file is complete.
    let seed = GrnParams {
        o_basal: 0.0,
        o_self_max: 0.0,
        o_self_k: 0.0,
        o_complex_max: 0.0,
        o_complex_k: 0.0,
        n_basal: 0.0,
        n_complex_max: 0.0,
        n_complex_k: 0.0,
        n_repress_k: 0.0,
        n_repress_floor: 0.0,
        n_self: 2.0,
        n_complex: 2.0,
        n_repress: 2.0,
        gamma: 1.0,
    };
    load(seed, GRN_TRISTABLE)
}

pub fn qic_reference() -> (QicParams, PlantParams) {
    let file = parse_constants(QIC_REFERENCE).expect("embedded constants file is well formed");
    let mut q = QicParams::default();
    let mut p = PlantParams::default();
    for (k, v) in &file.values {
        if q.set(k, *v).is_err() {
            p.set(k, *v).expect("key belongs to the plant");
        }
    }
    (q, p)
}

pub fn ffwd_reference() -> FfwdParams {
    load(FfwdParams::default(), FFWD_REFERENCE)
}

pub fn repro_reference() -> ReproParams {
    load(ReproParams::default(), REPRO_REFERENCE)
}
