//! Field snapshot files: flat little-endian f64 payload plus a JSON sidecar.
//!
//! A scalar snapshot `name.bin` holds `n*n` row-major values; the sidecar
//! `name.json` records `{format_version, n, domain_length, time, name, kind}`.
//! Spectral snapshots use the same layout with interleaved re/im pairs.

use crate::error::{Error, Result};
use crate::field::{ScalarField, SpectralField};
use crate::grid::Grid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub format_version: u32,
    pub n: usize,
    pub domain_length: f64,
    pub time: f64,
    pub name: String,
    #[serde(default = "default_kind")]
    pub kind: String,
}

fn default_kind() -> String {
    "real".to_string()
}

fn paths(base: &Path) -> (PathBuf, PathBuf) {
    (base.with_extension("bin"), base.with_extension("json"))
}

/// Write a scalar field snapshot at `base` (extensions are appended).
pub fn write_snapshot(field: &ScalarField, base: &Path, time: f64, name: &str) -> Result<()> {
    let (bin_path, json_path) = paths(base);
    if let Some(dir) = bin_path.parent() {
        fs::create_dir_all(dir)?;
    }
    let sidecar = Sidecar {
        format_version: FORMAT_VERSION,
        n: field.grid().n(),
        domain_length: field.grid().domain_length(),
        time,
        name: name.to_string(),
        kind: "real".to_string(),
    };
    let mut bytes = Vec::with_capacity(field.values().len() * 8);
    for v in field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = fs::File::create(&bin_path)?;
    f.write_all(&bytes)?;
    fs::write(&json_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

/// Write a spectral snapshot (interleaved re/im).
pub fn write_spectral_snapshot(
    field: &SpectralField,
    base: &Path,
    time: f64,
    name: &str,
) -> Result<()> {
    let (bin_path, json_path) = paths(base);
    if let Some(dir) = bin_path.parent() {
        fs::create_dir_all(dir)?;
    }
    let sidecar = Sidecar {
        format_version: FORMAT_VERSION,
        n: field.grid().n(),
        domain_length: field.grid().domain_length(),
        time,
        name: name.to_string(),
        kind: "spectral".to_string(),
    };
    let mut bytes = Vec::with_capacity(field.coeffs().len() * 16);
    for c in field.coeffs() {
        bytes.extend_from_slice(&c.re.to_le_bytes());
        bytes.extend_from_slice(&c.im.to_le_bytes());
    }
    fs::File::create(&bin_path)?.write_all(&bytes)?;
    fs::write(&json_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

fn read_sidecar(json_path: &Path) -> Result<Sidecar> {
    let text = fs::read_to_string(json_path)?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("sidecar {}: {e}", json_path.display())))?;
    match raw.get("format_version").and_then(|v| v.as_u64()) {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => {
            return Err(Error::SnapshotVersion {
                expected: FORMAT_VERSION,
                found: v.to_string(),
            })
        }
        None => {
            return Err(Error::SnapshotVersion {
                expected: FORMAT_VERSION,
                found: "missing".to_string(),
            })
        }
    }
    Ok(serde_json::from_value(raw)?)
}

/// Read a scalar snapshot written by [`write_snapshot`].
pub fn read_snapshot(base: &Path) -> Result<(ScalarField, Sidecar)> {
    let (bin_path, json_path) = paths(base);
    let sidecar = read_sidecar(&json_path)?;
    if sidecar.kind != "real" {
        return Err(Error::Config(format!(
            "snapshot {} holds '{}' data, expected 'real'",
            bin_path.display(),
            sidecar.kind
        )));
    }
    let grid = Grid::new(sidecar.n, sidecar.domain_length)?;
    let expected = grid.len() * 8;
    let mut bytes = Vec::new();
    fs::File::open(&bin_path)?.read_to_end(&mut bytes)?;
    if bytes.len() < expected {
        return Err(Error::SnapshotTruncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() != expected {
        return Err(Error::SnapshotDimension {
            n: sidecar.n,
            expected,
            found: bytes.len(),
        });
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((ScalarField::from_values(grid, values)?, sidecar))
}

/// Read a spectral snapshot written by [`write_spectral_snapshot`].
pub fn read_spectral_snapshot(base: &Path) -> Result<(SpectralField, Sidecar)> {
    let (bin_path, json_path) = paths(base);
    let sidecar = read_sidecar(&json_path)?;
    if sidecar.kind != "spectral" {
        return Err(Error::Config(format!(
            "snapshot {} holds '{}' data, expected 'spectral'",
            bin_path.display(),
            sidecar.kind
        )));
    }
    let grid = Grid::new(sidecar.n, sidecar.domain_length)?;
    let expected = grid.len() * 16;
    let mut bytes = Vec::new();
    fs::File::open(&bin_path)?.read_to_end(&mut bytes)?;
    if bytes.len() < expected {
        return Err(Error::SnapshotTruncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() != expected {
        return Err(Error::SnapshotDimension {
            n: sidecar.n,
            expected,
            found: bytes.len(),
        });
    }
    let coeffs: Vec<Complex64> = bytes
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8")),
                f64::from_le_bytes(c[8..].try_into().expect("8")),
            )
        })
        .collect();
    Ok((SpectralField::from_coeffs(grid, coeffs)?, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(32, 2.0 * std::f64::consts::PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let values: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let field = ScalarField::from_values(grid, values.clone()).unwrap();
        let base = dir.path().join("theta_0001");
        write_snapshot(&field, &base, 0.25, "theta").unwrap();
        let (back, sidecar) = read_snapshot(&base).unwrap();
        assert_eq!(sidecar.time, 0.25);
        for (a, b) in values.iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // byte-compare the payload after a rewrite
        let bytes1 = std::fs::read(base.with_extension("bin")).unwrap();
        write_snapshot(&back, &base, 0.25, "theta").unwrap();
        let bytes2 = std::fs::read(base.with_extension("bin")).unwrap();
        assert_eq!(bytes1, bytes2);
    }

    #[test]
    fn spectral_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(16, 1.0).unwrap();
        let f = ScalarField::from_fn(grid, |x, y| (x * 6.28).sin() + y);
        let hat = crate::spectral::to_spectral(&f).unwrap();
        let base = dir.path().join("hat");
        write_spectral_snapshot(&hat, &base, 0.0, "hat").unwrap();
        let (back, _) = read_spectral_snapshot(&base).unwrap();
        assert_eq!(hat.coeffs(), back.coeffs());
    }

    #[test]
    fn corrupt_header_is_a_version_error() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(16, 1.0).unwrap();
        let field = ScalarField::zeros(grid);
        let base = dir.path().join("f");
        write_snapshot(&field, &base, 0.0, "f").unwrap();
        std::fs::write(
            base.with_extension("json"),
            r#"{"format_version": 99, "n": 16, "domain_length": 1.0, "time": 0.0, "name": "f", "kind": "real"}"#,
        )
        .unwrap();
        assert!(matches!(
            read_snapshot(&base),
            Err(Error::SnapshotVersion { .. })
        ));
    }

    #[test]
    fn dimension_and_truncation_are_distinct_errors() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(16, 1.0).unwrap();
        let field = ScalarField::zeros(grid);
        let base = dir.path().join("f");
        write_snapshot(&field, &base, 0.0, "f").unwrap();

        // sidecar says n=32 but payload is 16x16 -> dimension error
        std::fs::write(
            base.with_extension("json"),
            format!(
                r#"{{"format_version": {FORMAT_VERSION}, "n": 32, "domain_length": 1.0, "time": 0.0, "name": "f", "kind": "real"}}"#
            ),
        )
        .unwrap();
        assert!(matches!(
            read_snapshot(&base),
            Err(Error::SnapshotTruncated { .. }) // payload smaller than promised
        ));

        // truncated payload with the right sidecar
        write_snapshot(&field, &base, 0.0, "f").unwrap();
        let bytes = std::fs::read(base.with_extension("bin")).unwrap();
        std::fs::write(base.with_extension("bin"), &bytes[..bytes.len() - 8]).unwrap();
        assert!(matches!(
            read_snapshot(&base),
            Err(Error::SnapshotTruncated { .. })
        ));

        // oversized payload -> dimension error
        write_snapshot(&field, &base, 0.0, "f").unwrap();
        let mut bytes = std::fs::read(base.with_extension("bin")).unwrap();
        bytes.extend_from_slice(&[0u8; 16]);
        std::fs::write(base.with_extension("bin"), &bytes).unwrap();
        assert!(matches!(
            read_snapshot(&base),
            Err(Error::SnapshotDimension { .. })
        ));
    }
}
