//! Run manifest: a JSON record of everything a frame directory
//! contains, with the parameters that produced it and a checksum per
//! file. The manifest is deterministic: identical runs produce
//! byte-identical manifests (no timestamps, fixed key order).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{MomentumSection, NoiseSection, PositionSection, ScanSection};
use crate::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";
pub const MANIFEST_FORMAT: u32 = 1;

/// Geometry parameters echoed into the manifest, tagged by arrangement.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryEcho {
    Momentum(MomentumSection),
    Position(PositionSection),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraInfo {
    pub ny: usize,
    pub nx: usize,
    pub pitch_m: f64,
}

/// One recorded frame: the scan phase it was taken at and the two file
/// encodings with their checksums.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameEntry {
    pub phase_rad: f64,
    pub csv: String,
    pub pgm: String,
    pub sha256_csv: String,
    pub sha256_pgm: String,
}

/// The optional tilted-reference exposure for off-axis holography.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HologramEntry {
    pub phase_rad: f64,
    pub carrier_rad_per_m: [f64; 2],
    pub csv: String,
    pub pgm: String,
    pub sha256_csv: String,
    pub sha256_pgm: String,
}

/// Ground-truth object maps stored alongside the frames so a
/// reconstruction can score itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthEntry {
    pub magnitude_csv: String,
    pub phase_csv: String,
    pub pitch_m: f64,
    pub sha256_magnitude: String,
    pub sha256_phase: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: u32,
    pub geometry: GeometryEcho,
    pub scan: ScanSection,
    pub noise: Option<NoiseSection>,
    pub camera: CameraInfo,
    pub frames: Vec<FrameEntry>,
    pub hologram: Option<HologramEntry>,
    pub truth: TruthEntry,
}

/// Lowercase hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Serializes a manifest with stable formatting (pretty JSON, fixed
/// field order, trailing newline).
pub fn to_json(manifest: &Manifest) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(manifest)
        .map_err(|e| CliError::Validation(format!("manifest encoding: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Loads and parses `manifest.json` from a frame directory.
pub fn load(dir: &Path) -> Result<Manifest, CliError> {
    let path = dir.join(MANIFEST_NAME);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Publishes a set of named files as a fresh directory. The files are
/// written to a temporary sibling first and the directory is renamed
/// into place, so the target either appears complete or not at all.
pub fn publish_dir(out_dir: &Path, files: &[(String, Vec<u8>)]) -> Result<(), CliError> {
    if out_dir.exists() {
        return Err(CliError::Validation(format!(
            "output directory {} already exists; refusing to overwrite",
            out_dir.display()
        )));
    }
    let parent = match out_dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent)
        .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", parent.display())))?;
    let tmp = tempfile::TempDir::with_prefix_in(".qiup-", &parent)
        .map_err(|e| CliError::Validation(format!("cannot create a staging directory: {e}")))?;
    for (name, bytes) in files {
        let path = tmp.path().join(name);
        std::fs::write(&path, bytes)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    let staged = tmp.keep();
    match std::fs::rename(&staged, out_dir) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = std::fs::remove_dir_all(&staged);
            Err(CliError::Validation(format!(
                "cannot move results into {}: {e}",
                out_dir.display()
            )))
        }
    }
}

/// Reads a file that the manifest vouches for and checks its digest.
pub fn read_checked(dir: &Path, name: &str, sha256: &str) -> Result<Vec<u8>, CliError> {
    let path = dir.join(name);
    let bytes = std::fs::read(&path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let got = sha256_hex(&bytes);
    if got != sha256 {
        return Err(CliError::Validation(format!(
            "{} does not match the manifest checksum (expected {sha256}, got {got})",
            path.display()
        )));
    }
    Ok(bytes)
}
