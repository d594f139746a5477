//! `simulate`: renders a phase-stepped frame stack from a run file and
//! publishes it as an output directory with a checksummed manifest.
//!
//! The directory is built in a temporary location and renamed into
//! place, so a failed run never leaves a partial output directory. An
//! existing target directory is refused rather than overwritten.

use std::f64::consts::TAU;

use qiup_core::correlations::{CrystalModel, GaussianPumpModel};
use qiup_core::grid::CameraFrame;
use qiup_core::imaging::{
    add_shot_noise, simulate_frame_mc, simulate_frame_mc_ideal, simulate_frame_mc_ideal_tilted,
    simulate_frame_pc, simulate_frame_pc_ideal, GeometryMc, GeometryPc,
};
use qiup_core::io;

use crate::config::{self, Geometry, Overrides, ResolvedRun};
use crate::manifest::{
    publish_dir, sha256_hex, to_json, CameraInfo, FrameEntry, GeometryEcho, HologramEntry,
    Manifest, TruthEntry, MANIFEST_FORMAT, MANIFEST_NAME,
};
use crate::{from_imaging, CliError, SimulateArgs};

/// Rebuilds the run geometry with a different interferometer phase; the
/// scan steps this phase frame by frame.
fn geometry_at(run: &ResolvedRun, phi: f64) -> Result<Geometry, CliError> {
    let validation = |e: &dyn std::fmt::Display| CliError::Validation(e.to_string());
    match &run.geometry {
        Geometry::Momentum(_, s) => {
            let pump = GaussianPumpModel::new(s.pump_waist_m).map_err(|e| validation(&e))?;
            let g = GeometryMc::new(
                s.f_idler_m,
                s.f_camera_m,
                s.lambda_signal_m,
                s.lambda_idler_m,
                pump,
                phi,
            )
            .map_err(|e| validation(&e))?;
            Ok(Geometry::Momentum(g, s.clone()))
        }
        Geometry::Position(_, s) => {
            let crystal = CrystalModel::new(
                s.crystal_length_m,
                s.n_signal,
                s.n_idler,
                s.lambda_signal_m,
                s.lambda_idler_m,
            )
            .map_err(|e| validation(&e))?;
            let g =
                GeometryPc::new(s.m_signal, s.m_idler, crystal, phi).map_err(|e| validation(&e))?;
            Ok(Geometry::Position(Box::new(g), s.clone()))
        }
    }
}

fn render_frame(run: &ResolvedRun, phi: f64) -> Result<CameraFrame, CliError> {
    match geometry_at(run, phi)? {
        Geometry::Momentum(g, _) => {
            if run.scan.ideal_frames {
                Ok(simulate_frame_mc_ideal(&run.object, &g))
            } else {
                simulate_frame_mc(&run.object, &g).map_err(from_imaging)
            }
        }
        Geometry::Position(g, _) => {
            if run.scan.ideal_frames {
                simulate_frame_pc_ideal(&run.object, &g).map_err(from_imaging)
            } else {
                simulate_frame_pc(&run.object, &g).map_err(from_imaging)
            }
        }
    }
}

fn with_noise(
    run: &ResolvedRun,
    frame: CameraFrame,
    index: usize,
) -> Result<CameraFrame, CliError> {
    match &run.noise {
        None => Ok(frame),
        Some(n) => add_shot_noise(&frame, n.mean_counts, n.seed.wrapping_add(index as u64))
            .map_err(from_imaging),
    }
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let overrides = Overrides {
        output_dir: args.output_dir.clone(),
        frames: args.frames,
        seed: args.seed,
        mean_counts: args.mean_counts,
        phi_in_rad: args.phi_in_rad,
    };
    let run = config::resolve(&args.config, &overrides)?;
    if run.output_dir.exists() {
        return Err(CliError::Validation(format!(
            "output directory {} already exists; refusing to overwrite",
            run.output_dir.display()
        )));
    }

    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut frame_entries = Vec::new();
    let phases = run.scan_phases();
    let mut camera: Option<CameraInfo> = None;

    for (j, &phi) in phases.iter().enumerate() {
        let frame = with_noise(&run, render_frame(&run, phi)?, j)?;
        if camera.is_none() {
            let (ny, nx) = frame.data().dim();
            camera = Some(CameraInfo {
                ny,
                nx,
                pitch_m: frame.pitch(),
            });
        }
        let csv_name = format!("frame_{j:03}.csv");
        let pgm_name = format!("frame_{j:03}.pgm");
        let csv = io::frame_to_csv(&frame).into_bytes();
        let pgm = io::frame_to_pgm(&frame).map_err(|e| CliError::Validation(e.to_string()))?;
        frame_entries.push(FrameEntry {
            phase_rad: phi,
            csv: csv_name.clone(),
            pgm: pgm_name.clone(),
            sha256_csv: sha256_hex(&csv),
            sha256_pgm: sha256_hex(&pgm),
        });
        files.push((csv_name, csv));
        files.push((pgm_name, pgm));
    }
    let camera = camera.expect("the scan has at least three frames");

    let hologram = match &run.holography {
        None => None,
        Some(h) => {
            let geometry = geometry_at(&run, run.geometry.phi_in())?;
            let Geometry::Momentum(g, _) = geometry else {
                return Err(CliError::Validation(
                    "holography requires the momentum geometry".into(),
                ));
            };
            let carrier = [
                h.carrier_cycles_x * TAU / (camera.nx as f64 * camera.pitch_m),
                h.carrier_cycles_y * TAU / (camera.ny as f64 * camera.pitch_m),
            ];
            let frame =
                simulate_frame_mc_ideal_tilted(&run.object, &g, carrier).map_err(from_imaging)?;
            let frame = with_noise(&run, frame, phases.len())?;
            let csv = io::frame_to_csv(&frame).into_bytes();
            let pgm = io::frame_to_pgm(&frame).map_err(|e| CliError::Validation(e.to_string()))?;
            let entry = HologramEntry {
                phase_rad: g.phi_in(),
                carrier_rad_per_m: carrier,
                csv: "hologram.csv".into(),
                pgm: "hologram.pgm".into(),
                sha256_csv: sha256_hex(&csv),
                sha256_pgm: sha256_hex(&pgm),
            };
            files.push(("hologram.csv".into(), csv));
            files.push(("hologram.pgm".into(), pgm));
            Some(entry)
        }
    };

    let (truth_mag, truth_phase) = io::object_to_csv_pair(&run.object);
    let truth = TruthEntry {
        magnitude_csv: "truth_magnitude.csv".into(),
        phase_csv: "truth_phase.csv".into(),
        pitch_m: run.object.pitch(),
        sha256_magnitude: sha256_hex(truth_mag.as_bytes()),
        sha256_phase: sha256_hex(truth_phase.as_bytes()),
    };
    files.push(("truth_magnitude.csv".into(), truth_mag.into_bytes()));
    files.push(("truth_phase.csv".into(), truth_phase.into_bytes()));

    let geometry_echo = match &run.geometry {
        Geometry::Momentum(_, s) => GeometryEcho::Momentum(s.clone()),
        Geometry::Position(_, s) => GeometryEcho::Position(s.clone()),
    };
    let manifest = Manifest {
        format: MANIFEST_FORMAT,
        geometry: geometry_echo,
        scan: run.scan.clone(),
        noise: run.noise.clone(),
        camera: CameraInfo { ..camera },
        frames: frame_entries,
        hologram,
        truth,
    };
    files.push((MANIFEST_NAME.into(), to_json(&manifest)?));

    publish_dir(&run.output_dir, &files)?;
    println!(
        "simulate: {} frames of {}x{} px (pitch {:e} m) -> {}",
        manifest.frames.len(),
        manifest.camera.ny,
        manifest.camera.nx,
        manifest.camera.pitch_m,
        run.output_dir.display()
    );
    Ok(())
}
