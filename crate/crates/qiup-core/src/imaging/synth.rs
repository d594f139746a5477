//! Camera-frame synthesis for both imaging configurations.
//!
//! A frame records `1 + Re[conj(B) e^{i theta}]` per camera pixel, where
//! `B` is the object transmittance seen through the pair correlation. In
//! the ideal (delta-correlated) limit `B` is the transmittance at the
//! back-projected object point; with a finite correlation width it is a
//! Gaussian-weighted average around that point. The camera grid has the
//! object's dimensions with pitch scaled by the magnification, so camera
//! pixels back-project exactly onto object pixel centers.
//!
//! The weighted average is evaluated as a separable quadrature over the
//! object grid: two small matrices of Gaussian weights are applied along
//! the rows and columns. The baseline term 1 is exact (the correlation
//! density is normalized analytically); only the modulation term is
//! truncated to the object grid, which is opaque outside its extent.

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::grid::{axis_coordinates, CameraFrame, ObjectMap};
use crate::quad::GaussHermite;

use super::{GeometryMc, GeometryPc, ImagingError};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Requires at least four object pixels per blur width (the e^-1
/// half-width of the Gaussian kernel), so the quadrature resolves the
/// kernel.
fn ensure_sampling(cell: f64, blur_width: f64) -> Result<(), ImagingError> {
    if 4.0 * cell > blur_width {
        return Err(ImagingError::SamplingTooCoarse {
            pitch_m: cell,
            width_m: blur_width,
        });
    }
    Ok(())
}

/// Row-normalized Gaussian quadrature weights: entry `(i, j)` integrates a
/// unit density of standard deviation `std` centered at `eval[i]` over the
/// source cell at `source[j]` of width `cell`.
fn gaussian_weights(eval: &[f64], source: &[f64], std: f64, cell: f64) -> Array2<f64> {
    let norm = cell / (std * std::f64::consts::TAU.sqrt());
    let mut w = Array2::zeros((eval.len(), source.len()));
    for (i, &e) in eval.iter().enumerate() {
        for (j, &s) in source.iter().enumerate() {
            let u = (e - s) / std;
            w[[i, j]] = norm * (-0.5 * u * u).exp();
        }
    }
    w
}

/// Applies the separable kernel: `out[i_r, i_c] = sum_{j_r, j_c}
/// wy[i_r, j_r] wx[i_c, j_c] field[j_r, j_c]`.
fn weighted_blur(
    wy: &Array2<f64>,
    wx: &Array2<f64>,
    field: &Array2<Complex64>,
) -> Array2<Complex64> {
    let (ny_o, nx_o) = field.dim();
    let ny_c = wy.nrows();
    let nx_c = wx.nrows();
    let zero = Complex64::new(0.0, 0.0);

    let mut mixed = Array2::from_elem((ny_o, nx_c), zero);
    Zip::indexed(mixed.rows_mut()).par_for_each(|j_r, mut row| {
        for i_c in 0..nx_c {
            let mut acc = zero;
            for j_c in 0..nx_o {
                acc += wx[[i_c, j_c]] * field[[j_r, j_c]];
            }
            row[i_c] = acc;
        }
    });

    let mut out = Array2::from_elem((ny_c, nx_c), zero);
    Zip::indexed(out.rows_mut()).par_for_each(|i_r, mut row| {
        for i_c in 0..nx_c {
            let mut acc = zero;
            for j_r in 0..ny_o {
                acc += wy[[i_r, j_r]] * mixed[[j_r, i_c]];
            }
            row[i_c] = acc;
        }
    });
    out
}

fn frame_from_modulation(
    blurred: &Array2<Complex64>,
    phase: &Array2<Complex64>,
    pitch: f64,
    phi_in: f64,
) -> CameraFrame {
    let data = Zip::from(blurred)
        .and(phase)
        .map_collect(|b, p| 1.0 + (b.conj() * p).re);
    CameraFrame::new(data, pitch, phi_in).expect("synthesized frame values are finite")
}

/// Far-field frame with the finite-pump-waist blur.
///
/// Each camera pixel back-projects to the object point `rho_c / M` and
/// averages the transmittance under a Gaussian kernel of standard
/// deviation `f_I lambda_I / (2 pi w_p)`.
pub fn simulate_frame_mc(object: &ObjectMap, g: &GeometryMc) -> Result<CameraFrame, ImagingError> {
    ensure_sampling(object.pitch(), g.object_blur_width())?;
    let m = g.magnification();
    let pitch_c = m * object.pitch();
    let std = g.object_blur_std();

    let eval_x: Vec<f64> = axis_coordinates(object.nx(), pitch_c)
        .into_iter()
        .map(|x| x / m)
        .collect();
    let eval_y: Vec<f64> = axis_coordinates(object.ny(), pitch_c)
        .into_iter()
        .map(|y| y / m)
        .collect();
    let wx = gaussian_weights(&eval_x, &object.x_coordinates(), std, object.pitch());
    let wy = gaussian_weights(&eval_y, &object.y_coordinates(), std, object.pitch());

    let blurred = weighted_blur(&wy, &wx, object.data());
    let phase = Array2::from_elem(blurred.dim(), Complex64::from_polar(1.0, g.phi_in()));
    Ok(frame_from_modulation(&blurred, &phase, pitch_c, g.phi_in()))
}

/// Far-field frame in the ideal delta-correlated limit: the camera pixel
/// at `M rho_o` reads `1 + |T(rho_o)| cos(phi_in - arg T(rho_o))`.
pub fn simulate_frame_mc_ideal(object: &ObjectMap, g: &GeometryMc) -> CameraFrame {
    let pitch_c = g.magnification() * object.pitch();
    let phase = Complex64::from_polar(1.0, g.phi_in());
    let data = object.data().map(|t| 1.0 + (t.conj() * phase).re);
    CameraFrame::new(data, pitch_c, g.phi_in()).expect("synthesized frame values are finite")
}

/// Ideal far-field frame with a tilted reference beam: the interference
/// term gains a linear carrier phase `carrier . rho_c` across the camera,
/// with `carrier[0]` along x (columns) and `carrier[1]` along y (rows).
pub fn simulate_frame_mc_ideal_tilted(
    object: &ObjectMap,
    g: &GeometryMc,
    carrier_rad_per_m: [f64; 2],
) -> Result<CameraFrame, ImagingError> {
    if carrier_rad_per_m.iter().any(|a| !a.is_finite()) {
        return Err(ImagingError::BadGeometryParameter {
            name: "carrier",
            value: f64::NAN,
        });
    }
    let pitch_c = g.magnification() * object.pitch();
    let xs = axis_coordinates(object.nx(), pitch_c);
    let ys = axis_coordinates(object.ny(), pitch_c);
    let data = Array2::from_shape_fn(object.data().dim(), |(r, c)| {
        let phi = g.phi_in() + carrier_rad_per_m[0] * xs[c] + carrier_rad_per_m[1] * ys[r];
        1.0 + (object.data()[[r, c]].conj() * Complex64::from_polar(1.0, phi)).re
    });
    Ok(CameraFrame::new(data, pitch_c, g.phi_in()).expect("synthesized frame values are finite"))
}

/// Far-field frame when the joint momentum density factorizes into
/// independent signal and idler beams (no momentum correlation).
///
/// The interference term then collapses to the beam-weighted average of
/// the transmittance, a single constant over the camera: the frame is
/// spatially flat and its modulation shrinks with the illuminated area as
/// `1 / beam_spread^2`, vanishing in the broad-beam limit. `beam_spread_m`
/// is the standard deviation of the idler beam in the object plane.
pub fn simulate_frame_mc_separable(
    object: &ObjectMap,
    g: &GeometryMc,
    beam_spread_m: f64,
) -> Result<CameraFrame, ImagingError> {
    if !(beam_spread_m.is_finite() && beam_spread_m > 0.0) {
        return Err(ImagingError::BadBeamSpread(beam_spread_m));
    }
    let gh = GaussHermite::new(64);
    let scale = SQRT_2 * beam_spread_m;
    let mut mean = Complex64::new(0.0, 0.0);
    let mut weight_sum = 0.0;
    for (&ty, &wy) in gh.nodes().iter().zip(gh.weights()) {
        for (&tx, &wx) in gh.nodes().iter().zip(gh.weights()) {
            mean += wy * wx * object.sample(scale * tx, scale * ty);
            weight_sum += wy * wx;
        }
    }
    mean /= weight_sum;

    let pitch_c = g.magnification() * object.pitch();
    let value = 1.0 + (mean.conj() * Complex64::from_polar(1.0, g.phi_in())).re;
    let data = Array2::from_elem(object.data().dim(), value);
    Ok(CameraFrame::new(data, pitch_c, g.phi_in()).expect("synthesized frame values are finite"))
}

fn check_phase_map(map: Option<&Array2<f64>>, dim: (usize, usize)) -> Result<(), ImagingError> {
    if let Some(map) = map {
        if map.dim() != dim {
            return Err(ImagingError::PhaseMapShape {
                rows: dim.0,
                cols: dim.1,
                got_rows: map.dim().0,
                got_cols: map.dim().1,
            });
        }
    }
    Ok(())
}

fn pc_field_phases(object: &ObjectMap, g: &GeometryPc) -> Result<Array2<Complex64>, ImagingError> {
    let dim = object.data().dim();
    check_phase_map(g.signal_phase(), dim)?;
    check_phase_map(g.idler_phase_in(), dim)?;
    check_phase_map(g.idler_phase_out(), dim)?;
    let mut field = object.data().clone();
    for map in [g.idler_phase_in(), g.idler_phase_out()]
        .into_iter()
        .flatten()
    {
        Zip::from(&mut field)
            .and(map)
            .for_each(|f, &p| *f *= Complex64::from_polar(1.0, p));
    }
    Ok(field)
}

fn pc_reference_phase(g: &GeometryPc, dim: (usize, usize)) -> Array2<Complex64> {
    match g.signal_phase() {
        Some(map) => map.map(|&p| Complex64::from_polar(1.0, g.phi_in() + p)),
        None => Array2::from_elem(dim, Complex64::from_polar(1.0, g.phi_in())),
    }
}

/// Near-field frame with the finite position-correlation blur.
///
/// Each camera pixel back-projects through the signal imaging system to a
/// source point `rho_c / M_s` and averages the transmittance of the
/// object points whose idler back-projection is nearby, under a Gaussian
/// kernel of standard deviation `sqrt(L Lambda / 8 pi)` in the source
/// plane. Idler phase maps advance the object field before averaging; the
/// signal phase map and `phi_in` rotate the reference.
pub fn simulate_frame_pc(object: &ObjectMap, g: &GeometryPc) -> Result<CameraFrame, ImagingError> {
    let std = g.correlation_std();
    let cell = object.pitch() / g.m_idler().abs();
    ensure_sampling(cell, SQRT_2 * std)?;
    let field = pc_field_phases(object, g)?;

    let pitch_c = g.magnification().abs() * object.pitch();
    let eval_x: Vec<f64> = axis_coordinates(object.nx(), pitch_c)
        .into_iter()
        .map(|x| x / g.m_signal())
        .collect();
    let eval_y: Vec<f64> = axis_coordinates(object.ny(), pitch_c)
        .into_iter()
        .map(|y| y / g.m_signal())
        .collect();
    let src_x: Vec<f64> = object
        .x_coordinates()
        .iter()
        .map(|x| x / g.m_idler())
        .collect();
    let src_y: Vec<f64> = object
        .y_coordinates()
        .iter()
        .map(|y| y / g.m_idler())
        .collect();
    let wx = gaussian_weights(&eval_x, &src_x, std, cell);
    let wy = gaussian_weights(&eval_y, &src_y, std, cell);

    let blurred = weighted_blur(&wy, &wx, &field);
    let phase = pc_reference_phase(g, blurred.dim());
    Ok(frame_from_modulation(&blurred, &phase, pitch_c, g.phi_in()))
}

/// Near-field frame in the ideal delta-correlated limit.
///
/// With the aligned camera grid the back-projection maps camera pixels
/// onto object pixels directly, mirrored through the grid center when the
/// magnification is negative.
pub fn simulate_frame_pc_ideal(
    object: &ObjectMap,
    g: &GeometryPc,
) -> Result<CameraFrame, ImagingError> {
    let field = pc_field_phases(object, g)?;
    let reference = pc_reference_phase(g, field.dim());
    let flip = g.magnification() < 0.0;
    let (ny, nx) = field.dim();
    let data = Array2::from_shape_fn((ny, nx), |(r, c)| {
        let (sr, sc) = if flip {
            (ny - 1 - r, nx - 1 - c)
        } else {
            (r, c)
        };
        1.0 + (field[[sr, sc]].conj() * reference[[r, c]]).re
    });
    let pitch_c = g.magnification().abs() * object.pitch();
    Ok(CameraFrame::new(data, pitch_c, g.phi_in()).expect("synthesized frame values are finite"))
}
