//! `reconstruct`: rebuilds object maps from a simulated frame directory
//! and scores them against the ground truth stored in the manifest.
//!
//! All four estimators work from the CSV frames (full precision); the
//! graymaps exist for quick inspection only. Input files are verified
//! against the manifest checksums before use.

use ndarray::{s, Array2};
use num_complex::Complex64;
use serde::Serialize;

use qiup_core::grid::CameraFrame;
use qiup_core::imaging::{image_function, off_axis_holography, phase_stepping, visibility_map};
use qiup_core::io;

use crate::manifest::{self, GeometryEcho, Manifest, MANIFEST_FORMAT};
use crate::{from_imaging, CliError, Method, ReconstructArgs};

/// Border width excluded from the error metrics; edge pixels carry
/// windowing artifacts in the Fourier method.
const GUARD_PX: usize = 8;
/// Phase errors are measured only where the true magnitude exceeds this;
/// the phase of a dark pixel is undefined.
const MASK_THRESHOLD: f64 = 0.1;

#[derive(Serialize)]
struct SummaryOutputs {
    magnitude_csv: String,
    phase_csv: Option<String>,
    sha256_magnitude: String,
    sha256_phase: Option<String>,
}

/// Written as `summary.json` next to the reconstruction grids.
#[derive(Serialize)]
struct Summary {
    method: &'static str,
    frames_used: usize,
    guard_px: usize,
    mask_threshold: f64,
    rms_magnitude: Option<f64>,
    rms_phase: Option<f64>,
    outputs: SummaryOutputs,
}

enum Estimate {
    Magnitude(Array2<f64>),
    Complex(Array2<Complex64>),
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Visibility => "visibility",
            Method::ImageFunction => "image-function",
            Method::PhaseStepping => "phase-stepping",
            Method::OffAxis => "off-axis",
        }
    }
}

fn load_frame(
    dir: &std::path::Path,
    csv_name: &str,
    sha256: &str,
    pitch_m: f64,
    phase_rad: f64,
) -> Result<CameraFrame, CliError> {
    let bytes = manifest::read_checked(dir, csv_name, sha256)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Validation(format!("{csv_name} is not valid UTF-8 text")))?;
    io::frame_from_csv(&text, pitch_m, phase_rad)
        .map_err(|e| CliError::Validation(format!("{csv_name}: {e}")))
}

fn estimate(args: &ReconstructArgs, man: &Manifest) -> Result<(Estimate, usize), CliError> {
    let dir = &args.frames;
    if matches!(args.method, Method::OffAxis) {
        let h = man.hologram.as_ref().ok_or_else(|| {
            CliError::Validation(
                "the manifest has no hologram exposure; rerun simulate with a [holography] section"
                    .into(),
            )
        })?;
        let frame = load_frame(dir, &h.csv, &h.sha256_csv, man.camera.pitch_m, h.phase_rad)?;
        let map = off_axis_holography(&frame, h.carrier_rad_per_m).map_err(from_imaging)?;
        return Ok((Estimate::Complex(map), 1));
    }

    let mut frames = Vec::with_capacity(man.frames.len());
    for f in &man.frames {
        frames.push(load_frame(
            dir,
            &f.csv,
            &f.sha256_csv,
            man.camera.pitch_m,
            f.phase_rad,
        )?);
    }
    let used = frames.len();
    let est = match args.method {
        Method::Visibility => Estimate::Magnitude(visibility_map(&frames).map_err(from_imaging)?),
        Method::ImageFunction => {
            // The per-pixel scan swing is twice the interference term.
            let g = image_function(&frames).map_err(from_imaging)?;
            Estimate::Magnitude(g.map(|v| 0.5 * v))
        }
        Method::PhaseStepping => Estimate::Complex(phase_stepping(&frames).map_err(from_imaging)?),
        Method::OffAxis => unreachable!("handled above"),
    };
    Ok((est, used))
}

/// Ground truth in the camera's orientation: a negative near-field
/// magnification renders the image point-reflected, so the comparison
/// flips the truth the same way.
fn truth_in_camera_orientation(man: &Manifest, grid: Array2<f64>) -> Array2<f64> {
    let flipped = match &man.geometry {
        GeometryEcho::Momentum(_) => false,
        GeometryEcho::Position(p) => (p.m_signal / p.m_idler) < 0.0,
    };
    if flipped {
        grid.slice(s![..;-1, ..;-1]).to_owned()
    } else {
        grid
    }
}

fn rms_magnitude(est: &Array2<f64>, truth: &Array2<f64>) -> Option<f64> {
    let (ny, nx) = est.dim();
    if ny <= 2 * GUARD_PX || nx <= 2 * GUARD_PX {
        return None;
    }
    let interior = s![GUARD_PX..ny - GUARD_PX, GUARD_PX..nx - GUARD_PX];
    let diff = &est.slice(interior) - &truth.slice(interior);
    Some((diff.mapv(|d| d * d).mean().unwrap_or(0.0)).sqrt())
}

fn rms_phase(
    est: &Array2<Complex64>,
    truth_mag: &Array2<f64>,
    truth_phase: &Array2<f64>,
) -> Option<f64> {
    let (ny, nx) = est.dim();
    if ny <= 2 * GUARD_PX || nx <= 2 * GUARD_PX {
        return None;
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for r in GUARD_PX..ny - GUARD_PX {
        for c in GUARD_PX..nx - GUARD_PX {
            if truth_mag[[r, c]] <= MASK_THRESHOLD {
                continue;
            }
            let reference = Complex64::from_polar(1.0, truth_phase[[r, c]]);
            let delta = (est[[r, c]] * reference.conj()).arg();
            sum += delta * delta;
            count += 1;
        }
    }
    if count == 0 {
        None
    } else {
        Some((sum / count as f64).sqrt())
    }
}

pub fn run(args: &ReconstructArgs) -> Result<(), CliError> {
    let dir = &args.frames;
    let man = manifest::load(dir)?;
    if man.format != MANIFEST_FORMAT {
        return Err(CliError::Validation(format!(
            "unsupported manifest format {} (this build reads format {})",
            man.format, MANIFEST_FORMAT
        )));
    }
    let out_dir = args.out.clone().unwrap_or_else(|| dir.join("recon"));
    if out_dir.exists() {
        return Err(CliError::Validation(format!(
            "output directory {} already exists; refusing to overwrite",
            out_dir.display()
        )));
    }

    let (est, frames_used) = estimate(args, &man)?;

    let truth_mag_bytes =
        manifest::read_checked(dir, &man.truth.magnitude_csv, &man.truth.sha256_magnitude)?;
    let truth_phase_bytes =
        manifest::read_checked(dir, &man.truth.phase_csv, &man.truth.sha256_phase)?;
    let parse_grid = |bytes: Vec<u8>, name: &str| -> Result<Array2<f64>, CliError> {
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::Validation(format!("{name} is not valid UTF-8 text")))?;
        io::grid_from_csv(&text).map_err(|e| CliError::Validation(format!("{name}: {e}")))
    };
    let truth_mag =
        truth_in_camera_orientation(&man, parse_grid(truth_mag_bytes, &man.truth.magnitude_csv)?);
    let truth_phase =
        truth_in_camera_orientation(&man, parse_grid(truth_phase_bytes, &man.truth.phase_csv)?);

    let est_mag = match &est {
        Estimate::Magnitude(m) => m.clone(),
        Estimate::Complex(z) => z.map(|v| v.norm()),
    };
    if est_mag.dim() != truth_mag.dim() {
        return Err(CliError::Validation(format!(
            "reconstruction is {:?} pixels but the stored truth is {:?}",
            est_mag.dim(),
            truth_mag.dim()
        )));
    }

    let rms_mag = rms_magnitude(&est_mag, &truth_mag);
    let rms_ph = match &est {
        Estimate::Magnitude(_) => None,
        Estimate::Complex(z) => rms_phase(z, &truth_mag, &truth_phase),
    };

    let magnitude_csv = io::grid_to_csv(&est_mag).into_bytes();
    let phase_csv = match &est {
        Estimate::Magnitude(_) => None,
        Estimate::Complex(z) => Some(io::grid_to_csv(&z.map(|v| v.arg())).into_bytes()),
    };

    let summary = Summary {
        method: args.method.name(),
        frames_used,
        guard_px: GUARD_PX,
        mask_threshold: MASK_THRESHOLD,
        rms_magnitude: rms_mag,
        rms_phase: rms_ph,
        outputs: SummaryOutputs {
            magnitude_csv: "recon_magnitude.csv".into(),
            phase_csv: phase_csv.as_ref().map(|_| "recon_phase.csv".into()),
            sha256_magnitude: manifest::sha256_hex(&magnitude_csv),
            sha256_phase: phase_csv.as_ref().map(|b| manifest::sha256_hex(b)),
        },
    };
    let mut summary_json = serde_json::to_vec_pretty(&summary)
        .map_err(|e| CliError::Validation(format!("summary encoding: {e}")))?;
    summary_json.push(b'\n');

    let mut files = vec![("recon_magnitude.csv".to_string(), magnitude_csv)];
    if let Some(bytes) = phase_csv {
        files.push(("recon_phase.csv".to_string(), bytes));
    }
    files.push(("summary.json".to_string(), summary_json));
    manifest::publish_dir(&out_dir, &files)?;

    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3e}"));
    println!(
        "reconstruct: {} from {} frame(s), rms_magnitude={} rms_phase={} -> {}",
        args.method.name(),
        frames_used,
        show(rms_mag),
        show(rms_ph),
        out_dir.display()
    );
    Ok(())
}
