//! On-disk spectrum cache.
//!
//! Each entry is one file named by a SHA-256 content hash of the model
//! parameters and sector. The file holds a single line of JSON header, then
//! the eigenvalues and (optionally) the column-major eigenvectors as raw
//! little-endian `f64`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use faer::Mat;
use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::hamiltonian::{BasisTag, ModelParams};
use crate::spectral::Spectrum;
use crate::symmetry::SectorChoice;

/// Environment variable that overrides any configured cache directory.
pub const CACHE_DIR_ENV: &str = "SCARCHAIN_CACHE_DIR";

const FORMAT_VERSION: u32 = 1;

/// Content hash identifying one cached spectrum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey(String);

impl CacheKey {
    pub fn new(params: &ModelParams, choice: &SectorChoice, with_vectors: bool) -> Self {
        let payload = serde_json::json!({
            "format": FORMAT_VERSION,
            "params": params,
            "sector": choice,
            "vectors": with_vectors,
        });
        let digest = Sha256::digest(payload.to_string().as_bytes());
        CacheKey(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: u32,
    key: String,
    source: BasisTag,
    params: Option<ModelParams>,
    len: usize,
    /// Eigenvector length, 0 when no vectors are stored.
    vector_rows: usize,
}

#[derive(Clone, Debug)]
pub struct SpectrumCache {
    dir: PathBuf,
}

impl SpectrumCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    /// The cache named by the environment, else `configured`, else none.
    pub fn resolve(configured: Option<&Path>) -> Result<Option<Self>> {
        match std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()) {
            Some(dir) => Self::new(PathBuf::from(dir)).map(Some),
            None => configured.map(Self::new).transpose(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_of(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.spec", key.0))
    }

    /// The stored spectrum, or `None` on a miss. Unreadable entries are
    /// deleted and reported as misses.
    pub fn lookup(&self, key: &CacheKey) -> Option<Spectrum> {
        let path = self.path_of(key);
        let bytes = fs::read(&path).ok()?;
        match decode(&bytes, key) {
            Ok(spec) => Some(spec),
            Err(why) => {
                warn!("evicting corrupt cache entry {}: {why}", path.display());
                let _ = fs::remove_file(&path);
                None
            }
        }
    }

    /// Writes atomically through a temporary file.
    pub fn store(&self, key: &CacheKey, spec: &Spectrum) -> Result<()> {
        let header = Header {
            format: FORMAT_VERSION,
            key: key.0.clone(),
            source: spec.source,
            params: spec.params,
            len: spec.len(),
            vector_rows: spec.eigenvectors.as_ref().map_or(0, |v| v.nrows()),
        };
        let mut buf = serde_json::to_vec(&header)?;
        buf.push(b'\n');
        for x in &spec.eigenvalues {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        if let Some(v) = &spec.eigenvectors {
            for j in 0..v.ncols() {
                for i in 0..v.nrows() {
                    buf.extend_from_slice(&v[(i, j)].to_le_bytes());
                }
            }
        }
        let tmp = self.dir.join(format!(".{}.tmp{}", key.0, std::process::id()));
        let mut file = fs::File::create(&tmp)?;
        file.write_all(&buf)?;
        file.sync_all()?;
        fs::rename(&tmp, self.path_of(key))?;
        Ok(())
    }
}

fn decode(bytes: &[u8], key: &CacheKey) -> std::result::Result<Spectrum, String> {
    let split = bytes.iter().position(|&b| b == b'\n').ok_or("missing header line")?;
    let header: Header = serde_json::from_slice(&bytes[..split]).map_err(|e| format!("bad header: {e}"))?;
    if header.format != FORMAT_VERSION || header.key != key.0 {
        return Err("header does not match key".into());
    }
    let body = &bytes[split + 1..];
    let n_values = header.len + header.len * header.vector_rows;
    if body.len() != 8 * n_values {
        return Err(format!("expected {} payload bytes, found {}", 8 * n_values, body.len()));
    }
    let floats: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let (values, vectors) = floats.split_at(header.len);
    let eigenvectors = (header.vector_rows > 0)
        .then(|| Mat::from_fn(header.vector_rows, header.len, |i, j| vectors[j * header.vector_rows + i]));
    Ok(Spectrum { eigenvalues: values.to_vec(), eigenvectors, source: header.source, params: header.params })
}
