//! Raw feature-matrix files: little-endian f32 payload plus a JSON sidecar
//! (`<path>.json`) recording the shape.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    rows: usize,
    cols: usize,
    dtype: String,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".json");
    PathBuf::from(s)
}

/// Write a matrix as raw LE f32 with a JSON shape sidecar.
///
/// Both files go through a temp-then-rename so concurrent writers of the same
/// content never leave a torn file behind.
pub fn write_matrix(path: &Path, m: &Mat) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::Numerical("refusing to write non-finite features".into()));
    }
    let mut bytes = Vec::with_capacity(m.data().len() * 4);
    for v in m.data() {
        bytes.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    write_atomic(path, &bytes)?;
    let sidecar = Sidecar {
        rows: m.rows(),
        cols: m.cols(),
        dtype: "f32le".to_string(),
    };
    write_atomic(&sidecar_path(path), serde_json::to_string(&sidecar)?.as_bytes())?;
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    static COUNTER: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        COUNTER.fetch_add(1, std::sync::atomic::Ordering::SeqCst)
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<Mat> {
    let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    if sidecar.dtype != "f32le" {
        return Err(Error::invalid(format!("unsupported dtype {:?}", sidecar.dtype)));
    }
    let bytes = fs::read(path)?;
    let expected = sidecar.rows * sidecar.cols * 4;
    if bytes.len() != expected {
        return Err(Error::invalid(format!(
            "feature file {} has {} bytes, expected {} for {}x{}",
            path.display(),
            bytes.len(),
            expected,
            sidecar.rows,
            sidecar.cols
        )));
    }
    let mut data = Vec::with_capacity(sidecar.rows * sidecar.cols);
    for chunk in bytes.chunks_exact(4) {
        data.push(f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]) as f64);
    }
    let m = Mat::from_vec(sidecar.rows, sidecar.cols, data)?;
    if !m.is_finite() {
        return Err(Error::Numerical(format!(
            "feature file {} contains non-finite values",
            path.display()
        )));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_f32_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("feat.bin");
        let m = Mat::from_rows(&[vec![1.5, -2.25, 0.0], vec![3.0, 4.5, -0.125]]).unwrap();
        write_matrix(&path, &m).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("feat.bin");
        let m = Mat::from_rows(&[vec![1.0, 2.0]]).unwrap();
        write_matrix(&path, &m).unwrap();
        std::fs::write(&path, [0u8; 3]).unwrap();
        assert!(read_matrix(&path).is_err());
    }
}
