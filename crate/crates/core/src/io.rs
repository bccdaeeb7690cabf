//! On-disk formats for embedding datasets.
//!
//! `EMB1` layout, little-endian throughout:
//!
//! ```text
//! 0..4    b"EMB1"
//! 4..8    u32 version (= 1)
//! 8..12   u32 n
//! 12..16  u32 d
//! 16..20  u32 k
//! ...     n x u32 labels
//! ...     n*d x f32 vector entries, row-major
//! ```
//!
//! An optional `<file>.meta.json` sidecar carries class names and provenance.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};

pub const EMB1_MAGIC: &[u8; 4] = b"EMB1";
pub const EMB1_VERSION: u32 = 1;
const HEADER_LEN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitRole {
    Train,
    Eval,
}

/// Sidecar metadata stored next to an `EMB1` file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetManifest {
    #[serde(default)]
    pub class_names: Vec<String>,
    #[serde(default)]
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoder: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitRole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensionality: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<serde_json::Value>,
}

impl DatasetManifest {
    pub fn for_dataset(ds: &EmbeddingDataset) -> Self {
        Self {
            class_names: ds.class_names().to_vec(),
            dimensionality: Some(ds.dim()),
            ..Default::default()
        }
    }
}

pub fn manifest_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn encode_emb1(ds: &EmbeddingDataset) -> Result<Vec<u8>> {
    if ds.is_empty() {
        return Err(Error::Validation(
            "refusing to write a dataset with n=0".into(),
        ));
    }
    let to_u32 = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| Error::Validation(format!("{what}={v} does not fit in u32")))
    };
    let n = to_u32(ds.len(), "n")?;
    let d = to_u32(ds.dim(), "d")?;
    let k = to_u32(ds.num_classes(), "k")?;
    let mut buf = Vec::with_capacity(HEADER_LEN + ds.len() * 4 + ds.vectors().len() * 4);
    buf.extend_from_slice(EMB1_MAGIC);
    for v in [EMB1_VERSION, n, d, k] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for &l in ds.labels() {
        buf.extend_from_slice(&l.to_le_bytes());
    }
    for &x in ds.vectors() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    Ok(buf)
}

fn read_u32(bytes: &[u8], offset: usize) -> u32 {
    u32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap())
}

pub fn decode_emb1(bytes: &[u8]) -> Result<EmbeddingDataset> {
    if bytes.len() < 4 || &bytes[..4] != EMB1_MAGIC {
        return Err(Error::Format("missing EMB1 magic".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Corruption(format!(
            "header truncated at {} bytes",
            bytes.len()
        )));
    }
    let version = read_u32(bytes, 4);
    if version != EMB1_VERSION {
        return Err(Error::Format(format!("unsupported EMB1 version {version}")));
    }
    let n = read_u32(bytes, 8) as u64;
    let d = read_u32(bytes, 12) as u64;
    let k = read_u32(bytes, 16) as u64;
    if n == 0 {
        return Err(Error::Validation("file holds n=0 examples".into()));
    }
    if d == 0 {
        return Err(Error::Validation("file declares d=0".into()));
    }
    if k == 0 {
        return Err(Error::Validation("file declares k=0".into()));
    }
    // u32 * u32 fits in u64, so this cannot overflow.
    let expected = HEADER_LEN as u64 + 4 * n + 4 * n * d;
    let actual = bytes.len() as u64;
    if actual < expected {
        return Err(Error::Corruption(format!(
            "payload truncated: expected {expected} bytes, found {actual}"
        )));
    }
    if actual > expected {
        return Err(Error::Corruption(format!(
            "{} trailing bytes after payload",
            actual - expected
        )));
    }
    let (n, d, k) = (n as usize, d as usize, k as usize);
    let label_end = HEADER_LEN + 4 * n;
    let labels = bytes[HEADER_LEN..label_end]
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let vectors = bytes[label_end..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    EmbeddingDataset::new(d, k, labels, vectors)
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn write_manifest(path: &Path, manifest: &DatasetManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Loads an `EMB1` file, applying class names from its sidecar when present.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingDataset> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let ds = decode_emb1(&bytes)?;
    let meta = manifest_path(path);
    if !meta.exists() {
        return Ok(ds);
    }
    let manifest = read_manifest(&meta)?;
    if let Some(dim) = manifest.dimensionality {
        if dim != ds.dim() {
            return Err(Error::Validation(format!(
                "manifest dimensionality {dim} disagrees with header d={}",
                ds.dim()
            )));
        }
    }
    if manifest.class_names.is_empty() {
        Ok(ds)
    } else {
        ds.with_class_names(manifest.class_names)
    }
}

/// Writes the `EMB1` file plus a sidecar holding class names.
pub fn save_embeddings(ds: &EmbeddingDataset, path: impl AsRef<Path>) -> Result<()> {
    save_embeddings_with_manifest(ds, path, &DatasetManifest::for_dataset(ds))
}

pub fn save_embeddings_with_manifest(
    ds: &EmbeddingDataset,
    path: impl AsRef<Path>,
    manifest: &DatasetManifest,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_emb1(ds)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let mut manifest = manifest.clone();
    manifest.class_names = ds.class_names().to_vec();
    manifest.dimensionality = Some(ds.dim());
    write_manifest(&manifest_path(path), &manifest)
}

/// Imports `label,f0,...,f{d-1}` CSV.
///
/// If every label parses as a non-negative integer the labels are used as class
/// indices directly (k = max + 1); otherwise they are treated as names and
/// indexed in order of first appearance.
pub fn import_csv(path: impl AsRef<Path>, dim: usize) -> Result<EmbeddingDataset> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    import_csv_reader(file, dim)
}

pub fn import_csv_reader<R: std::io::Read>(reader: R, dim: usize) -> Result<EmbeddingDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Format(format!("csv header: {e}")))?
        .clone();
    let expected: Vec<String> = std::iter::once("label".to_string())
        .chain((0..dim).map(|j| format!("f{j}")))
        .collect();
    if header
        .iter()
        .map(str::trim)
        .ne(expected.iter().map(String::as_str))
    {
        return Err(Error::Format(format!(
            "csv header must be label,f0..f{}; got {:?}",
            dim.saturating_sub(1),
            header.iter().collect::<Vec<_>>()
        )));
    }

    let mut raw_labels = Vec::new();
    let mut vectors = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("csv: {e}")))?;
        if record.len() != dim + 1 {
            return Err(Error::Format(format!(
                "row {} has {} values, expected {}",
                line + 1,
                record.len().saturating_sub(1),
                dim
            )));
        }
        raw_labels.push(record[0].trim().to_string());
        for field in record.iter().skip(1) {
            let v: f32 = field.trim().parse().map_err(|_| {
                Error::Format(format!(
                    "row {}: cannot parse {field:?} as a number",
                    line + 1
                ))
            })?;
            vectors.push(v);
        }
    }
    if raw_labels.is_empty() {
        return Err(Error::Validation("csv holds no rows".into()));
    }

    let numeric: Option<Vec<u32>> = raw_labels.iter().map(|l| l.parse::<u32>().ok()).collect();
    match numeric {
        Some(labels) => {
            let k = labels.iter().max().map_or(0, |&m| m as usize + 1);
            EmbeddingDataset::new(dim, k, labels, vectors)
        }
        None => {
            let mut names: Vec<String> = Vec::new();
            let labels = raw_labels
                .iter()
                .map(|l| match names.iter().position(|n| n == l) {
                    Some(i) => i as u32,
                    None => {
                        names.push(l.clone());
                        (names.len() - 1) as u32
                    }
                })
                .collect();
            EmbeddingDataset::new(dim, names.len(), labels, vectors)?.with_class_names(names)
        }
    }
}

/// Writes `label,f0,...` CSV with integer class indices.
pub fn export_csv(ds: &EmbeddingDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::Format(format!("csv: {e}")))?;
    let header = std::iter::once("label".to_string()).chain((0..ds.dim()).map(|j| format!("f{j}")));
    wtr.write_record(header)
        .map_err(|e| Error::Format(format!("csv: {e}")))?;
    for (row, label) in ds.rows() {
        let fields = std::iter::once(label.to_string()).chain(row.iter().map(|v| v.to_string()));
        wtr.write_record(fields)
            .map_err(|e| Error::Format(format!("csv: {e}")))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}
