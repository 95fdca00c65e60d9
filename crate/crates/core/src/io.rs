//! File formats: training-pair CSV, dataset metadata sidecar, potential
//! prediction CSV.
//!
//! Pair files have a mandatory header `b_xx,b_yy,b_zz,b_xy,b_xz,b_yz,s_xx,...,s_yz`
//! and one `(B, σ)` pair per row. Floats are written in shortest round-trip
//! form, so a write/read cycle is lossless.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::datagen::DatasetSpec;
use crate::error::{Error, Result};
use crate::tensor::{Invariants, SymTensor3, TensorPair, COMPONENT_NAMES};

pub const METADATA_VERSION: u32 = 1;

pub fn pair_header() -> Vec<String> {
    let b = COMPONENT_NAMES.iter().map(|c| format!("b_{c}"));
    let s = COMPONENT_NAMES.iter().map(|c| format!("s_{c}"));
    b.chain(s).collect()
}

pub fn write_pairs<W: Write>(w: W, pairs: &[TensorPair]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(pair_header())?;
    for p in pairs {
        out.write_record(p.b.components().iter().chain(p.sigma.components().iter()).map(|v| v.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_pairs<R: Read>(r: R) -> Result<Vec<TensorPair>> {
    let mut input = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = input.headers()?.iter().map(str::to_owned).collect();
    if header != pair_header() {
        return Err(Error::InvalidInput(format!(
            "line 1: expected header {}, found {}",
            pair_header().join(","),
            header.join(",")
        )));
    }
    let mut pairs = Vec::new();
    for record in input.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let mut values = [0.0; 12];
        for (k, field) in record.iter().enumerate() {
            values[k] = field
                .parse()
                .map_err(|_| Error::InvalidInput(format!("line {line}, column {}: cannot parse {field:?}", header[k])))?;
        }
        let b = SymTensor3::from_components(std::array::from_fn(|k| values[k]));
        let sigma = SymTensor3::from_components(std::array::from_fn(|k| values[6 + k]));
        if !b.is_finite() || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!("line {line}: non-finite value")));
        }
        pairs.push(TensorPair::new(b, sigma));
    }
    Ok(pairs)
}

pub fn save_pairs(path: impl AsRef<Path>, pairs: &[TensorPair]) -> Result<()> {
    write_pairs(BufWriter::new(File::create(path)?), pairs)
}

pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<TensorPair>> {
    read_pairs(BufReader::new(File::open(path)?))
}

/// Sidecar record that lets a dataset be regenerated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub format_version: u32,
    pub seed: u64,
    #[serde(flatten)]
    pub spec: DatasetSpec,
}

impl DatasetMetadata {
    pub fn new(seed: u64, spec: DatasetSpec) -> Self {
        Self { format_version: METADATA_VERSION, seed, spec }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let meta: Self = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        if meta.format_version != METADATA_VERSION {
            return Err(Error::FormatVersion { found: meta.format_version, expected: METADATA_VERSION });
        }
        Ok(meta)
    }
}

/// `data.csv` → `data.meta.json`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// `I1,I2,I3,phi_hat` rows.
pub fn write_potential_predictions<W: Write>(w: W, rows: &[(Invariants, f64)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["I1", "I2", "I3", "phi_hat"])?;
    for (inv, phi) in rows {
        out.write_record([inv.i1, inv.i2, inv.i3, *phi].map(|v| v.to_string()))?;
    }
    out.flush()?;
    Ok(())
}
