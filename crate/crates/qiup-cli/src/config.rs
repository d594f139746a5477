//! Declarative run configuration: TOML parsing, validation and
//! resolution into simulator types.
//!
//! All physical quantities carry an explicit unit suffix in their key
//! (`_m`, `_rad`) so a config file cannot silently mix units. A run file
//! names an object source, exactly one geometry section (`momentum` or
//! `position`), and optional scan, noise and holography sections.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qiup_core::correlations::{CrystalModel, GaussianPumpModel};
use qiup_core::grid::ObjectMap;
use qiup_core::imaging::{GeometryMc, GeometryPc};
use qiup_core::io;

use crate::CliError;

/// Raw deserialized form of a run file. Unknown keys are rejected so a
/// typo in a unit suffix cannot pass silently.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub object: ObjectSection,
    pub geometry: GeometrySection,
    #[serde(default)]
    pub scan: ScanSection,
    pub noise: Option<NoiseSection>,
    pub holography: Option<HolographySection>,
    pub output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSection {
    /// 16-bit graymap holding the transmittance magnitude; the pitch
    /// rides in its header.
    pub pgm: Option<PathBuf>,
    /// Full-precision magnitude grid; requires `phase_csv` and `pitch_m`.
    pub magnitude_csv: Option<PathBuf>,
    pub phase_csv: Option<PathBuf>,
    pub pitch_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub momentum: Option<MomentumSection>,
    pub position: Option<PositionSection>,
}

/// Far-field arrangement: object and camera in the focal planes of the
/// idler and signal lenses.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumSection {
    pub f_idler_m: f64,
    pub f_camera_m: f64,
    pub lambda_signal_m: f64,
    pub lambda_idler_m: f64,
    pub pump_waist_m: f64,
    #[serde(default)]
    pub phi_in_rad: f64,
}

/// Near-field arrangement: object and camera in image planes of the
/// source, with separate arm magnifications.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PositionSection {
    pub m_signal: f64,
    pub m_idler: f64,
    pub crystal_length_m: f64,
    pub n_signal: f64,
    pub n_idler: f64,
    pub lambda_signal_m: f64,
    pub lambda_idler_m: f64,
    #[serde(default)]
    pub phi_in_rad: f64,
}

fn default_frames() -> u32 {
    4
}

fn default_span() -> f64 {
    TAU
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// Number of phase steps; at least 3.
    #[serde(default = "default_frames")]
    pub frames: u32,
    #[serde(default)]
    pub start_rad: f64,
    #[serde(default = "default_span")]
    pub span_rad: f64,
    /// Skip the correlation blur and record the bare interference
    /// pattern; used for reconstruction round trips.
    #[serde(default)]
    pub ideal_frames: bool,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            frames: default_frames(),
            start_rad: 0.0,
            span_rad: default_span(),
            ideal_frames: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub mean_counts: f64,
    pub seed: u64,
}

/// Adds one off-axis hologram exposure to the run: a single frame with a
/// linear reference tilt, in carrier cycles across the frame width and
/// height.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HolographySection {
    pub carrier_cycles_x: f64,
    #[serde(default)]
    pub carrier_cycles_y: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub frames: Option<u32>,
    pub seed: Option<u64>,
    pub mean_counts: Option<f64>,
    pub phi_in_rad: Option<f64>,
}

/// Geometry of a resolved run. The near-field variant is boxed; it
/// carries optional per-pixel phase maps and dwarfs the other arm.
#[derive(Debug, Clone)]
pub enum Geometry {
    Momentum(GeometryMc, MomentumSection),
    Position(Box<GeometryPc>, PositionSection),
}

impl Geometry {
    pub fn phi_in(&self) -> f64 {
        match self {
            Geometry::Momentum(g, _) => g.phi_in(),
            Geometry::Position(g, _) => g.phi_in(),
        }
    }
}

/// A fully validated run: object loaded, geometry constructed, scan
/// phases resolved.
pub struct ResolvedRun {
    pub object: ObjectMap,
    pub geometry: Geometry,
    pub scan: ScanSection,
    pub noise: Option<NoiseSection>,
    pub holography: Option<HolographySection>,
    pub output_dir: PathBuf,
}

impl ResolvedRun {
    /// Phase settings of the scan, `frames` steps from `start_rad`
    /// covering `span_rad` without repeating the endpoint.
    pub fn scan_phases(&self) -> Vec<f64> {
        let k = self.scan.frames as usize;
        (0..k)
            .map(|j| self.scan.start_rad + self.scan.span_rad * j as f64 / k as f64)
            .collect()
    }
}

fn validation<T: std::fmt::Display>(message: T) -> CliError {
    CliError::Validation(message.to_string())
}

/// Resolves a path in the run file relative to the run file's directory.
fn resolve_path(config_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        config_dir.join(path)
    }
}

fn load_object(section: &ObjectSection, config_dir: &Path) -> Result<ObjectMap, CliError> {
    match (&section.pgm, &section.magnitude_csv, &section.phase_csv) {
        (Some(pgm), None, None) => {
            if section.pitch_m.is_some() {
                return Err(validation(
                    "object.pitch_m conflicts with object.pgm; the graymap header carries the pitch",
                ));
            }
            let path = resolve_path(config_dir, pgm);
            let bytes = std::fs::read(&path)
                .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
            io::object_from_pgm(&bytes)
                .map_err(|e| validation(format!("object graymap {}: {e}", path.display())))
        }
        (None, Some(mag), Some(phase)) => {
            let pitch = section
                .pitch_m
                .ok_or_else(|| validation("object.pitch_m is required with a CSV pair"))?;
            let mag_path = resolve_path(config_dir, mag);
            let phase_path = resolve_path(config_dir, phase);
            let mag_text = std::fs::read_to_string(&mag_path)
                .map_err(|e| validation(format!("cannot read {}: {e}", mag_path.display())))?;
            let phase_text = std::fs::read_to_string(&phase_path)
                .map_err(|e| validation(format!("cannot read {}: {e}", phase_path.display())))?;
            io::object_from_csv_pair(&mag_text, &phase_text, pitch)
                .map_err(|e| validation(format!("object CSV pair: {e}")))
        }
        _ => Err(validation(
            "object must name either pgm or the magnitude_csv/phase_csv pair",
        )),
    }
}

fn build_geometry(section: &GeometrySection) -> Result<Geometry, CliError> {
    match (&section.momentum, &section.position) {
        (Some(mc), None) => {
            let pump = GaussianPumpModel::new(mc.pump_waist_m).map_err(validation)?;
            let g = GeometryMc::new(
                mc.f_idler_m,
                mc.f_camera_m,
                mc.lambda_signal_m,
                mc.lambda_idler_m,
                pump,
                mc.phi_in_rad,
            )
            .map_err(validation)?;
            Ok(Geometry::Momentum(g, mc.clone()))
        }
        (None, Some(pc)) => {
            let crystal = CrystalModel::new(
                pc.crystal_length_m,
                pc.n_signal,
                pc.n_idler,
                pc.lambda_signal_m,
                pc.lambda_idler_m,
            )
            .map_err(validation)?;
            let g = GeometryPc::new(pc.m_signal, pc.m_idler, crystal, pc.phi_in_rad)
                .map_err(validation)?;
            Ok(Geometry::Position(Box::new(g), pc.clone()))
        }
        _ => Err(validation(
            "config must contain exactly one geometry section (geometry.momentum or geometry.position)",
        )),
    }
}

/// Parses, validates and resolves a run file plus command-line overrides.
pub fn resolve(config_path: &Path, overrides: &Overrides) -> Result<ResolvedRun, CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| validation(format!("cannot read {}: {e}", config_path.display())))?;
    let mut raw: RawConfig =
        toml::from_str(&text).map_err(|e| validation(format!("config: {e}")))?;
    let config_dir = config_path.parent().unwrap_or_else(|| Path::new("."));

    if let Some(frames) = overrides.frames {
        raw.scan.frames = frames;
    }
    if let Some(phi) = overrides.phi_in_rad {
        match (&mut raw.geometry.momentum, &mut raw.geometry.position) {
            (Some(mc), None) => mc.phi_in_rad = phi,
            (None, Some(pc)) => pc.phi_in_rad = phi,
            _ => {}
        }
    }
    let mut noise = raw.noise.clone();
    if let Some(counts) = overrides.mean_counts {
        let seed = overrides.seed.or_else(|| noise.as_ref().map(|n| n.seed));
        noise = Some(NoiseSection {
            mean_counts: counts,
            seed: seed.unwrap_or(0),
        });
    } else if let Some(seed) = overrides.seed {
        if let Some(n) = &mut noise {
            n.seed = seed;
        } else {
            return Err(validation("--seed has no effect without noise.mean_counts"));
        }
    }

    if raw.scan.frames < 3 {
        return Err(validation(format!(
            "scan.frames must be at least 3 phase steps, got {}",
            raw.scan.frames
        )));
    }
    if !(raw.scan.span_rad.is_finite() && raw.scan.span_rad > 0.0)
        || !raw.scan.start_rad.is_finite()
    {
        return Err(validation(
            "scan phases must be finite with a positive span",
        ));
    }
    if let Some(n) = &noise {
        if !(n.mean_counts.is_finite() && n.mean_counts > 0.0) {
            return Err(validation(format!(
                "noise.mean_counts must be positive, got {}",
                n.mean_counts
            )));
        }
    }

    let object = load_object(&raw.object, config_dir)?;
    let geometry = build_geometry(&raw.geometry)?;

    if let Some(h) = &raw.holography {
        if matches!(geometry, Geometry::Position(..)) {
            return Err(validation(
                "holography requires the momentum geometry; the tilted reference is a far-field concept",
            ));
        }
        if !h.carrier_cycles_x.is_finite() || !h.carrier_cycles_y.is_finite() {
            return Err(validation("holography carrier cycles must be finite"));
        }
    }

    let output_dir = overrides
        .output_dir
        .clone()
        .unwrap_or_else(|| resolve_path(config_dir, &raw.output.dir));

    Ok(ResolvedRun {
        object,
        geometry,
        scan: raw.scan,
        noise,
        holography: raw.holography,
        output_dir,
    })
}
