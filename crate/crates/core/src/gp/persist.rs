use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{GpModel, Kernel};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Self-describing JSON dump of a fitted GP. Reloading refits from the stored
/// data, which reproduces predictions bit-for-bit on the same platform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavedGp {
    pub format_version: u32,
    pub kernel: Kernel,
    pub noise: f64,
    /// Training inputs, one row per point.
    pub inputs: Vec<Vec<f64>>,
    /// Training targets, one row per point.
    pub targets: Vec<Vec<f64>>,
}

impl SavedGp {
    pub fn from_model(m: &GpModel) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            kernel: m.kernel(),
            noise: m.noise(),
            inputs: rows(m.inputs()),
            targets: rows(m.targets()),
        }
    }

    pub fn into_model(self) -> Result<GpModel> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::FormatVersion { found: self.format_version, expected: FORMAT_VERSION });
        }
        let x = from_rows(&self.inputs)?;
        let y = from_rows(&self.targets)?;
        GpModel::fit(&x, &y, self.kernel, self.noise)
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Shape("ragged rows in saved model".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reload_reproduces_predictions_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = DMatrix::from_fn(25, 3, |_, _| rng.random::<f64>() * 0.1 + 1.0 / 3.0);
        let y = DMatrix::from_fn(25, 2, |_, _| rng.random::<f64>().exp());
        let gp = GpModel::fit(&x, &y, Kernel::new(1.234_567_890_123, 0.1 / 3.0).unwrap(), 1e-10).unwrap();
        let mut buf = Vec::new();
        gp.to_saved().write_to(&mut buf).unwrap();
        let back = SavedGp::read_from(buf.as_slice()).unwrap().into_model().unwrap();
        let q = DMatrix::from_fn(9, 3, |_, _| rng.random::<f64>());
        assert_eq!(gp.predict_mean(&q).unwrap(), back.predict_mean(&q).unwrap());
        assert_eq!(gp.predict_var(&q).unwrap(), back.predict_var(&q).unwrap());
    }

    #[test]
    fn rejects_unknown_version() {
        let saved = SavedGp {
            format_version: 99,
            kernel: Kernel::new(1.0, 1.0).unwrap(),
            noise: 1e-10,
            inputs: vec![vec![0.0]],
            targets: vec![vec![0.0]],
        };
        assert!(matches!(saved.into_model(), Err(Error::FormatVersion { found: 99, .. })));
    }
}
