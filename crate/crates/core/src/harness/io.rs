//! Dataset files and atomic writes.
//!
//! A dataset file is two lines: a JSON header
//! `{"d", "n", "alpha", "true_mean"?, "inlier_mask"?}` and the point matrix as
//! base64 of little-endian f64, point-major.

use std::io::Write as _;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, GroundTruth};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub d: usize,
    pub n: usize,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_mean: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inlier_mask: Option<Vec<bool>>,
}

pub fn encode_dataset(data: &Dataset<f64>) -> Result<String> {
    let header = DatasetHeader {
        d: data.dim(),
        n: data.len(),
        alpha: data.alpha(),
        true_mean: data.truth().map(|t| t.true_mean.clone()),
        inlier_mask: data.truth().map(|t| t.inlier_mask.clone()),
    };
    let mut bytes = Vec::with_capacity(data.points().len() * 8);
    for x in data.points() {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    Ok(format!("{}\n{}\n", serde_json::to_string(&header)?, STANDARD.encode(bytes)))
}

pub fn decode_dataset(text: &str) -> Result<Dataset<f64>> {
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| Error::Format("missing dataset header".into()))?;
    let header: DatasetHeader = serde_json::from_str(head)?;
    let body = lines.next().unwrap_or("").trim();
    let bytes = STANDARD.decode(body).map_err(|e| Error::Format(format!("point block: {e}")))?;
    if bytes.len() != header.n * header.d * 8 {
        return Err(Error::Format(format!(
            "point block holds {} bytes, header implies {}",
            bytes.len(),
            header.n * header.d * 8
        )));
    }
    let points = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let truth = match (header.true_mean, header.inlier_mask) {
        (Some(true_mean), Some(inlier_mask)) => Some(GroundTruth { true_mean, inlier_mask }),
        (None, None) => None,
        _ => return Err(Error::Format("true_mean and inlier_mask must appear together".into())),
    };
    Dataset::new(header.d, points, header.alpha, truth)
}

/// Writes to a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_dataset(path: &Path, data: &Dataset<f64>) -> Result<()> {
    write_atomic(path, encode_dataset(data)?.as_bytes())
}

pub fn read_dataset(path: &Path) -> Result<Dataset<f64>> {
    decode_dataset(&read_text(path)?).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        e => e,
    })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Points from either a dataset file or a JSON array of vectors, or of objects with a `mu` field.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = read_text(path)?;
    if let Ok(data) = decode_dataset(&text) {
        return Ok(data.iter().map(<[f64]>::to_vec).collect());
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Plain(Vec<f64>),
        Candidate { mu: Vec<f64> },
    }
    let entries: Vec<Entry> =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    Ok(entries
        .into_iter()
        .map(|e| match e {
            Entry::Plain(v) | Entry::Candidate { mu: v } => v,
        })
        .collect())
}
