//! File formats, channel and code resolution, and the output document.

use anyhow::{bail, Context, Result};
use byzmac_core::codec::erasure_example::{build_erasure_example_code, ErasureExampleDecoder};
use byzmac_core::codec::Codebook;
use byzmac_core::mac::{builtin_avmac, builtin_channel};
use byzmac_core::{AvMac, DistributionVector, Mac};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// Channel file: `w` is indexed `[x][y][z]`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MacFile {
    pub label: String,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub w: Vec<Vec<Vec<f64>>>,
}

/// Arbitrarily varying channel file: `w` is indexed `[x][y][s][z]`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AvMacFile {
    pub label: String,
    pub nx: usize,
    pub ny: usize,
    pub ns: usize,
    pub nz: usize,
    pub w: Vec<Vec<Vec<Vec<f64>>>>,
}

impl MacFile {
    pub fn from_mac(mac: &Mac) -> Self {
        Self { label: mac.label.clone(), nx: mac.nx, ny: mac.ny, nz: mac.nz, w: mac.to_nested() }
    }

    pub fn to_mac(&self) -> Result<Mac> {
        let mac = Mac::from_nested(self.label.clone(), &self.w)?;
        if (mac.nx, mac.ny, mac.nz) != (self.nx, self.ny, self.nz) {
            bail!("declared sizes ({}, {}, {}) do not match the table", self.nx, self.ny, self.nz);
        }
        Ok(mac)
    }
}

impl AvMacFile {
    pub fn to_avmac(&self) -> Result<AvMac> {
        let av = AvMac::from_nested(self.label.clone(), &self.w)?;
        if (av.nx, av.ny, av.ns, av.nz) != (self.nx, self.ny, self.ns, self.nz) {
            bail!("declared sizes do not match the table");
        }
        Ok(av)
    }
}

fn read_text(path: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

/// `builtin:NAME` or a channel file.
pub fn load_channel(spec: &str) -> Result<Mac> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(builtin_channel(name)?);
    }
    let file: MacFile = serde_json::from_str(&read_text(spec)?).with_context(|| format!("parsing channel file {spec}"))?;
    file.to_mac()
}

/// `builtin:NAME`, an AV channel file, or any plain channel as a single state.
pub fn load_avmac(spec: &str) -> Result<AvMac> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(builtin_avmac(name)?);
    }
    let text = read_text(spec)?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing channel file {spec}"))?;
    if value.get("ns").is_some() {
        let file: AvMacFile = serde_json::from_value(value)?;
        file.to_avmac()
    } else {
        let file: MacFile = serde_json::from_value(value)?;
        Ok(AvMac::from_mac(&file.to_mac()?))
    }
}

/// A code together with the decoder it was built for, if any.
pub struct LoadedCode {
    pub codebook: Codebook,
    pub special: Option<ErasureExampleDecoder>,
}

/// `builtin:erasure-example:N`, a codebook file, or a `codebook gen` document.
pub fn load_code(spec: &str) -> Result<LoadedCode> {
    if let Some(rest) = spec.strip_prefix("builtin:erasure-example:") {
        let n: usize = rest.parse().with_context(|| format!("blocklength in `{spec}`"))?;
        let (codebook, dec) = build_erasure_example_code(n)?;
        return Ok(LoadedCode { codebook, special: Some(dec) });
    }
    let value: Value = serde_json::from_str(&read_text(spec)?).with_context(|| format!("parsing code file {spec}"))?;
    // A `codebook gen` output document carries the codebook as its result.
    let value = match value {
        Value::Object(mut m) if m.contains_key("schema_version") => m.remove("result").unwrap_or(Value::Null),
        v => v,
    };
    let cb: Codebook = serde_json::from_value(value).with_context(|| format!("parsing code file {spec}"))?;
    let cb = Codebook::new(cb.n, cb.words1, cb.words2, cb.comp1, cb.comp2)?;
    Ok(LoadedCode { codebook: cb, special: None })
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|e| anyhow::anyhow!("bad list entry `{t}`: {e}")))
        .collect()
}

pub fn parse_dist(s: &str) -> Result<DistributionVector> {
    Ok(DistributionVector::new(parse_list(s)?)?)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Document {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub result: Value,
}

pub fn write_document(path: &Path, doc: &Document) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn read_document(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Document = serde_json::from_str(&text)?;
    if doc.schema_version != SCHEMA_VERSION {
        bail!("unsupported schema version {}", doc.schema_version);
    }
    Ok(doc)
}

/// Twelve significant digits, trailing zeros trimmed.
pub fn fmt12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=12).contains(&mag) {
        let s = format!("{x:.11e}");
        let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        return format!("{mant}e{exp}");
    }
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
