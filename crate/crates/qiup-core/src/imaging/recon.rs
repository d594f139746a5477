//! Reconstruction of object transmittance from camera-frame stacks.
//!
//! All routines work on frames of the form `1 + |T| cos(phi_in - arg T)`
//! per pixel. A scan over `phi_in` exposes `|T|` through the fringe
//! amplitude and `arg T` through the fringe position; a single tilted
//! frame exposes both through the sidebands of the carrier.

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::grid::{axis_coordinates, CameraFrame};

use super::ImagingError;

/// Minimum number of frames for a visibility scan.
pub const MIN_VISIBILITY_FRAMES: usize = 8;

/// Minimum distance of the holography carrier from the origin, in
/// frequency bins, so the two sidebands and the baseline separate.
pub const HOLOGRAPHY_MIN_CARRIER_BINS: f64 = 8.0;

const TAU: f64 = std::f64::consts::TAU;

fn check_stack(frames: &[CameraFrame], min: usize) -> Result<(), ImagingError> {
    if frames.len() < min {
        return Err(ImagingError::TooFewFrames {
            min,
            got: frames.len(),
        });
    }
    let dim = frames[0].data().dim();
    let pitch = frames[0].pitch();
    for frame in &frames[1..] {
        if frame.data().dim() != dim {
            return Err(ImagingError::FrameMismatch { what: "shape" });
        }
        if (frame.pitch() - pitch).abs() > 1e-12 * pitch {
            return Err(ImagingError::FrameMismatch {
                what: "pixel pitch",
            });
        }
    }
    Ok(())
}

/// Largest gap between consecutive scan phases on the circle.
fn max_cyclic_gap(phases: &[f64]) -> f64 {
    let mut reduced: Vec<f64> = phases.iter().map(|p| p.rem_euclid(TAU)).collect();
    reduced.sort_by(|a, b| a.total_cmp(b));
    let mut gap: f64 = 0.0;
    for pair in reduced.windows(2) {
        gap = gap.max(pair[1] - pair[0]);
    }
    gap.max(reduced[0] + TAU - reduced[reduced.len() - 1])
}

/// Per-pixel fringe visibility `(max - min) / (max + min)` over a phase
/// scan.
///
/// Needs at least eight frames whose phases leave no gap larger than an
/// eighth of the circle, so the scan brackets the fringe extremes. Pixels
/// with no recorded intensity return zero. The result equals `|T|` for
/// ideal frames when the scan hits the fringe extremes (any uniform scan
/// does for a real transmittance).
pub fn visibility_map(frames: &[CameraFrame]) -> Result<Array2<f64>, ImagingError> {
    check_stack(frames, MIN_VISIBILITY_FRAMES)?;
    let phases: Vec<f64> = frames.iter().map(|f| f.phase()).collect();
    let gap = max_cyclic_gap(&phases);
    let max_gap = TAU / MIN_VISIBILITY_FRAMES as f64 + 1e-9;
    if gap > max_gap {
        return Err(ImagingError::PhaseGapTooLarge {
            gap_rad: gap,
            max_rad: max_gap,
        });
    }
    Ok(extremes_map(frames, |hi, lo| {
        let sum = hi + lo;
        if sum > 0.0 {
            (hi - lo) / sum
        } else {
            0.0
        }
    }))
}

/// Per-pixel fringe amplitude `max - min` over a phase scan (twice the
/// modulation `|T|` for ideal frames).
///
/// Two frames suffice when they sit at the fringe extremes; a pair at
/// phases 0 and pi reproduces the full-scan result for a real, absorptive
/// transmittance.
pub fn image_function(frames: &[CameraFrame]) -> Result<Array2<f64>, ImagingError> {
    check_stack(frames, 2)?;
    Ok(extremes_map(frames, |hi, lo| hi - lo))
}

fn extremes_map(frames: &[CameraFrame], combine: impl Fn(f64, f64) -> f64) -> Array2<f64> {
    let mut hi = frames[0].data().clone();
    let mut lo = frames[0].data().clone();
    for frame in &frames[1..] {
        Zip::from(&mut hi)
            .and(&mut lo)
            .and(frame.data())
            .for_each(|h, l, &v| {
                *h = h.max(v);
                *l = l.min(v);
            });
    }
    Zip::from(&hi).and(&lo).map_collect(|&h, &l| combine(h, l))
}

/// Recovers the complex transmittance from a uniform phase scan.
///
/// The frames must sit at equal phase steps `2 pi / K` (in any order, with
/// an arbitrary common offset), `K >= 3`. Demodulation against the scan
/// phase isolates the fringe term: `(2 / K) sum_j frame_j e^{i phi_j}`
/// returns `T` itself under the frame convention
/// `1 + |T| cos(phi - arg T)`.
pub fn phase_stepping(frames: &[CameraFrame]) -> Result<Array2<Complex64>, ImagingError> {
    check_stack(frames, 3)?;
    let k = frames.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        let pa = frames[a].phase().rem_euclid(TAU);
        let pb = frames[b].phase().rem_euclid(TAU);
        pa.total_cmp(&pb)
    });
    let step = TAU / k as f64;
    let first = frames[order[0]].phase().rem_euclid(TAU);
    for (j, &idx) in order.iter().enumerate() {
        let expected = (first + j as f64 * step).rem_euclid(TAU);
        let got = frames[idx].phase().rem_euclid(TAU);
        let mut delta = (got - expected).abs();
        delta = delta.min(TAU - delta);
        if delta > 1e-9 {
            return Err(ImagingError::UnevenPhaseSteps { expected_count: k });
        }
    }

    let dim = frames[0].data().dim();
    let mut sum = Array2::from_elem(dim, Complex64::new(0.0, 0.0));
    for frame in frames {
        let rot = Complex64::from_polar(2.0 / k as f64, frame.phase());
        Zip::from(&mut sum).and(frame.data()).for_each(|s, &v| {
            *s += rot * v;
        });
    }
    Ok(sum)
}

fn signed_bin(k: usize, n: usize) -> f64 {
    if k > n / 2 {
        k as f64 - n as f64
    } else {
        k as f64
    }
}

fn fft_2d(data: &mut Array2<Complex64>, direction: FftDirection) {
    let (ny, nx) = data.dim();
    let mut planner = FftPlanner::new();

    let fft_x = planner.plan_fft(nx, direction);
    let mut buf = vec![Complex64::new(0.0, 0.0); nx];
    for mut row in data.rows_mut() {
        for (b, v) in buf.iter_mut().zip(row.iter()) {
            *b = *v;
        }
        fft_x.process(&mut buf);
        for (v, b) in row.iter_mut().zip(buf.iter()) {
            *v = *b;
        }
    }

    let fft_y = planner.plan_fft(ny, direction);
    let mut col = vec![Complex64::new(0.0, 0.0); ny];
    for c in 0..nx {
        for (r, b) in col.iter_mut().enumerate() {
            *b = data[[r, c]];
        }
        fft_y.process(&mut col);
        for (r, b) in col.iter().enumerate() {
            data[[r, c]] = *b;
        }
    }
}

/// Recovers the complex transmittance from a single frame taken with a
/// tilted reference beam.
///
/// The frame is demodulated by the known carrier `e^{-i carrier . rho}`,
/// which moves the fringe term to baseband; a circular low-pass at half
/// the carrier frequency rejects the baseline and the conjugate sideband,
/// and the known scan phase is divided out. The carrier must stay at
/// least [`HOLOGRAPHY_MIN_CARRIER_BINS`] frequency bins from the origin
/// and below half the Nyquist frequency of the camera grid, and the
/// object spectrum must fit inside half the carrier frequency.
pub fn off_axis_holography(
    frame: &CameraFrame,
    carrier_rad_per_m: [f64; 2],
) -> Result<Array2<Complex64>, ImagingError> {
    let (ny, nx) = frame.data().dim();
    let pitch = frame.pitch();
    let carrier = f64::hypot(carrier_rad_per_m[0], carrier_rad_per_m[1]);
    let bin = TAU / (nx.min(ny) as f64 * pitch);
    let min_carrier = HOLOGRAPHY_MIN_CARRIER_BINS * bin;
    if !carrier.is_finite() || carrier < min_carrier {
        return Err(ImagingError::CarrierTooSmall {
            carrier_rad_per_m: carrier,
            min_rad_per_m: min_carrier,
        });
    }
    let max_carrier = 0.5 * std::f64::consts::PI / pitch;
    if carrier > max_carrier {
        return Err(ImagingError::CarrierTooLarge {
            carrier_rad_per_m: carrier,
            max_rad_per_m: max_carrier,
        });
    }

    let xs = axis_coordinates(nx, pitch);
    let ys = axis_coordinates(ny, pitch);
    let mut field = Array2::from_shape_fn((ny, nx), |(r, c)| {
        let phi = carrier_rad_per_m[0] * xs[c] + carrier_rad_per_m[1] * ys[r];
        frame.data()[[r, c]] * Complex64::from_polar(1.0, -phi)
    });

    fft_2d(&mut field, FftDirection::Forward);
    let cutoff = 0.5 * carrier;
    for ((r, c), v) in field.indexed_iter_mut() {
        let fx = TAU * signed_bin(c, nx) / (nx as f64 * pitch);
        let fy = TAU * signed_bin(r, ny) / (ny as f64 * pitch);
        if f64::hypot(fx, fy) >= cutoff {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    fft_2d(&mut field, FftDirection::Inverse);

    let scale = 2.0 / (nx as f64 * ny as f64);
    let unwind = Complex64::from_polar(scale, -frame.phase());
    Ok(field.map(|v| (v * unwind).conj()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::GaussianPumpModel;
    use crate::grid::ObjectMap;
    use crate::imaging::{simulate_frame_mc_ideal, simulate_frame_mc_ideal_tilted, GeometryMc};
    use approx::assert_abs_diff_eq;

    fn geometry(phi_in: f64) -> GeometryMc {
        let pump = GaussianPumpModel::new(119e-6).unwrap();
        GeometryMc::new(75e-3, 100e-3, 810e-9, 1550e-9, pump, phi_in).unwrap()
    }

    /// Object with three patches: transparent, half-absorbing, opaque.
    fn patchwork() -> ObjectMap {
        let mut data = Array2::from_elem((24, 24), Complex64::new(1.0, 0.0));
        for r in 0..24 {
            for c in 8..16 {
                data[[r, c]] = Complex64::new(0.3, 0.0);
            }
            for c in 16..24 {
                data[[r, c]] = Complex64::new(0.0, 0.0);
            }
        }
        ObjectMap::new(data, 40e-6).unwrap()
    }

    fn ideal_scan(object: &ObjectMap, k: usize) -> Vec<CameraFrame> {
        (0..k)
            .map(|j| simulate_frame_mc_ideal(object, &geometry(TAU * j as f64 / k as f64)))
            .collect()
    }

    #[test]
    fn visibility_recovers_the_magnitude() {
        let object = patchwork();
        let map = visibility_map(&ideal_scan(&object, 8)).unwrap();
        for r in 0..24 {
            assert_abs_diff_eq!(map[[r, 2]], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(map[[r, 12]], 0.3, epsilon = 1e-12);
            assert_abs_diff_eq!(map[[r, 20]], 0.0, epsilon = 0.0);
        }
    }

    #[test]
    fn visibility_scan_preconditions() {
        let object = patchwork();
        assert!(matches!(
            visibility_map(&ideal_scan(&object, 7)),
            Err(ImagingError::TooFewFrames { min: 8, got: 7 })
        ));

        // Eight frames crammed into half the circle leave a wrap-around gap.
        let clustered: Vec<CameraFrame> = (0..8)
            .map(|j| {
                simulate_frame_mc_ideal(&object, &geometry(std::f64::consts::PI * j as f64 / 8.0))
            })
            .collect();
        assert!(matches!(
            visibility_map(&clustered),
            Err(ImagingError::PhaseGapTooLarge { .. })
        ));

        let mut mixed = ideal_scan(&object, 8);
        let small = ObjectMap::uniform(8, 8, 40e-6, Complex64::new(1.0, 0.0)).unwrap();
        mixed[3] = simulate_frame_mc_ideal(&small, &geometry(0.0));
        assert!(matches!(
            visibility_map(&mixed),
            Err(ImagingError::FrameMismatch { what: "shape" })
        ));
    }

    #[test]
    fn image_function_doubles_the_modulation() {
        let object = patchwork();
        let full = image_function(&ideal_scan(&object, 16)).unwrap();
        for r in 0..24 {
            assert_abs_diff_eq!(full[[r, 2]], 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(full[[r, 12]], 0.6, epsilon = 1e-12);
            assert_abs_diff_eq!(full[[r, 20]], 0.0, epsilon = 0.0);
        }

        // For a real transmittance the 0/pi pair already brackets the fringe.
        let pair = vec![
            simulate_frame_mc_ideal(&object, &geometry(0.0)),
            simulate_frame_mc_ideal(&object, &geometry(std::f64::consts::PI)),
        ];
        let short = image_function(&pair).unwrap();
        Zip::from(&full).and(&short).for_each(|a, b| {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        });

        assert!(matches!(
            image_function(&pair[..1]),
            Err(ImagingError::TooFewFrames { min: 2, got: 1 })
        ));
    }

    fn phase_blob(n: usize) -> ObjectMap {
        let c = (n as f64 - 1.0) / 2.0;
        let data = Array2::from_shape_fn((n, n), |(r, cc)| {
            let d2 = (r as f64 - c).powi(2) + (cc as f64 - c).powi(2);
            Complex64::from_polar(0.9 * (-d2 / 800.0).exp(), 0.7)
        });
        ObjectMap::new(data, 40e-6).unwrap()
    }

    #[test]
    fn phase_stepping_recovers_the_complex_transmittance() {
        let object = phase_blob(32);
        let recovered = phase_stepping(&ideal_scan(&object, 4)).unwrap();
        Zip::from(&recovered).and(object.data()).for_each(|a, b| {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-9);
        });

        // Any K >= 3 gives the same answer, as does a common phase offset.
        let k3 = phase_stepping(&ideal_scan(&object, 3)).unwrap();
        let k8 = phase_stepping(&ideal_scan(&object, 8)).unwrap();
        Zip::from(&k3).and(&k8).for_each(|a, b| {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-9);
        });

        let offset: Vec<CameraFrame> = (0..5)
            .map(|j| simulate_frame_mc_ideal(&object, &geometry(0.3 + TAU * j as f64 / 5.0)))
            .collect();
        let shifted = phase_stepping(&offset).unwrap();
        Zip::from(&shifted).and(object.data()).for_each(|a, b| {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-9);
        });
    }

    #[test]
    fn phase_stepping_preconditions() {
        let object = phase_blob(16);
        assert!(matches!(
            phase_stepping(&ideal_scan(&object, 2)),
            Err(ImagingError::TooFewFrames { min: 3, got: 2 })
        ));
        let uneven: Vec<CameraFrame> = [0.0, 1.0, 2.0]
            .iter()
            .map(|&p| simulate_frame_mc_ideal(&object, &geometry(p)))
            .collect();
        assert!(matches!(
            phase_stepping(&uneven),
            Err(ImagingError::UnevenPhaseSteps { expected_count: 3 })
        ));
    }

    /// Smooth complex object: Gaussian magnitude with a Gaussian phase bump.
    fn holo_object(n: usize) -> ObjectMap {
        let c = (n as f64 - 1.0) / 2.0;
        let data = Array2::from_shape_fn((n, n), |(r, cc)| {
            let d2 = (r as f64 - c).powi(2) + (cc as f64 - c).powi(2);
            let mag = (-d2 / (2.0 * 30.0f64.powi(2))).exp();
            let phase = 0.5 * (-d2 / (2.0 * 20.0f64.powi(2))).exp();
            Complex64::from_polar(mag, phase)
        });
        ObjectMap::new(data, 40e-6).unwrap()
    }

    #[test]
    fn holography_recovers_magnitude_and_phase() {
        let n = 256;
        let object = holo_object(n);
        let g = geometry(0.4);
        let pitch_c = g.magnification() * 40e-6;
        // 32 carrier cycles across the camera width.
        let carrier = [TAU * 32.0 / (n as f64 * pitch_c), 0.0];
        let frame = simulate_frame_mc_ideal_tilted(&object, &g, carrier).unwrap();
        let recovered = off_axis_holography(&frame, carrier).unwrap();

        let guard = 8;
        let mut sq_mag = 0.0;
        let mut sq_phase = 0.0;
        let mut count = 0.0;
        let mut phase_count = 0.0;
        for r in guard..n - guard {
            for c in guard..n - guard {
                let t = object.data()[[r, c]];
                let e = recovered[[r, c]];
                sq_mag += (e.norm() - t.norm()).powi(2);
                count += 1.0;
                if t.norm() > 0.1 {
                    let mut d = (e.arg() - t.arg()).abs();
                    d = d.min(TAU - d);
                    sq_phase += d * d;
                    phase_count += 1.0;
                }
            }
        }
        assert!((sq_mag / count).sqrt() < 2e-3, "magnitude rms too big");
        assert!((sq_phase / phase_count).sqrt() < 2e-3, "phase rms too big");
    }

    #[test]
    fn holography_carrier_bounds() {
        let object = holo_object(64);
        let g = geometry(0.0);
        let pitch_c = g.magnification() * 40e-6;
        let low = [TAU * 4.0 / (64.0 * pitch_c), 0.0];
        let frame = simulate_frame_mc_ideal_tilted(&object, &g, low).unwrap();
        assert!(matches!(
            off_axis_holography(&frame, low),
            Err(ImagingError::CarrierTooSmall { .. })
        ));

        let high = [0.6 * std::f64::consts::PI / pitch_c, 0.0];
        let frame = simulate_frame_mc_ideal_tilted(&object, &g, [1.0, 0.0]).unwrap();
        assert!(matches!(
            off_axis_holography(&frame, high),
            Err(ImagingError::CarrierTooLarge { .. })
        ));
    }
}
