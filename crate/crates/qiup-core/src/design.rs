//! Closed-form design figures for both imaging configurations: edge
//! response, blur, resolution, field of view, spatial-mode counts,
//! two-point resolution and axial resolution for spectral-domain ranging,
//! plus a three-column comparison table of representative setups.
//!
//! Conventions: the far-field blur quantities use the e^-1 half-width
//! `sigma = sqrt 2 x` (standard deviation); full widths at half maximum
//! carry `fwhm` in the name. Where a formula takes a single refractive
//! index the two crystal indices are combined as their geometric mean
//! (the formulas assume they are close).

use serde::Serialize;
use thiserror::Error;

use crate::correlations::{CrystalModel, GaussianPumpModel};
use crate::imaging::{GeometryMc, GeometryPc};

const PI: f64 = std::f64::consts::PI;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Error, PartialEq)]
pub enum DesignError {
    #[error("contrast threshold {0} must lie strictly between 0 and 1")]
    ContrastThresholdOutOfRange(f64),
}

fn single_index(crystal: &CrystalModel) -> f64 {
    (crystal.n_signal() * crystal.n_idler()).sqrt()
}

/// Edge spread function of the far-field configuration: the normalized
/// intensity profile across the image of a knife edge at object position
/// `edge_x0`, transmitting above the edge. Rises from 0 to 1 with value
/// 0.5 at the image of the edge, climbing from 0.24 to 0.76 over one blur
/// sigma.
pub fn esf_mc(x_camera_m: f64, edge_x0_m: f64, g: &GeometryMc) -> f64 {
    let sigma = blur_sigma_mc(g);
    let u = (x_camera_m - g.magnification() * edge_x0_m) / sigma;
    0.5 * libm::erfc(-u)
}

/// Camera-plane blur of the far-field configuration,
/// `f_c lambda_s / (sqrt 2 pi w_p)`: independent of the undetected
/// wavelength and inversely proportional to the pump waist.
pub fn blur_sigma_mc(g: &GeometryMc) -> f64 {
    g.f_camera() * g.lambda_signal() / (SQRT_2 * PI * g.pump().waist())
}

/// Object-plane resolution of the far-field configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolutionMc {
    /// e^-1 half-width `f_I lambda_I / (sqrt 2 pi w_p)`; depends only on
    /// the undetected wavelength.
    pub res_m: f64,
    /// Full width at half maximum, `2 sqrt(ln 2)` times `res_m`.
    pub res_fwhm_m: f64,
}

pub fn resolution_mc(g: &GeometryMc) -> ResolutionMc {
    let res = g.f_idler() * g.lambda_idler() / (SQRT_2 * PI * g.pump().waist());
    ResolutionMc {
        res_m: res,
        res_fwhm_m: 2.0 * 2.0f64.ln().sqrt() * res,
    }
}

/// Half-width-at-half-maximum divergence of the idler emission,
/// `lambda_I sqrt(2.78 n_s n_I / (pi L (n_s lambda_I + n_I lambda_s)))`.
pub fn idler_divergence(crystal: &CrystalModel) -> f64 {
    let denom = PI
        * crystal.length()
        * (crystal.n_signal() * crystal.lambda_idler()
            + crystal.n_idler() * crystal.lambda_signal());
    crystal.lambda_idler() * (2.78 * crystal.n_signal() * crystal.n_idler() / denom).sqrt()
}

/// Field of view of the far-field configuration: the object-plane extent
/// `2 f_I theta_I` illuminated by an idler beam of divergence `theta_I`.
pub fn fov_mc(f_idler_m: f64, theta_idler_rad: f64) -> f64 {
    2.0 * f_idler_m * theta_idler_rad
}

/// Number of resolvable spatial modes per direction in the far field,
/// `5 w_p sqrt(n / (L (lambda_I + lambda_s)))`. The idler focal length
/// cancels between field of view and resolution.
pub fn modes_mc(crystal: &CrystalModel, pump: &GaussianPumpModel) -> f64 {
    5.0 * pump.waist()
        * (single_index(crystal) / (crystal.length() * crystal.wavelength_sum())).sqrt()
}

/// Image function of two point transmitters separated by `d` along x,
/// centered on the axis, evaluated at the camera point `(x_c, y_c)`: a
/// pair of unit-peak Gaussians whose width is the position-correlation
/// kernel.
pub fn two_point_image(d_m: f64, g: &GeometryPc, x_camera_m: f64, y_camera_m: f64) -> f64 {
    let a = 4.0 * PI / (g.crystal().length() * g.crystal().wavelength_sum());
    let u = x_camera_m / g.m_signal();
    let v = y_camera_m / g.m_signal();
    let p = 0.5 * d_m / g.m_idler();
    let lobe = |x0: f64| (-a * ((u - x0).powi(2) + v * v)).exp();
    lobe(p) + lobe(-p)
}

/// Dip-to-peak contrast of the two-point image: the value midway between
/// the two image points divided by the value at an image point. Below 1
/// once the points are resolved; compared against a threshold it defines
/// the minimum resolvable distance.
pub fn two_point_contrast(d_m: f64, g: &GeometryPc) -> f64 {
    let dip = two_point_image(d_m, g, 0.0, 0.0);
    let x_peak = 0.5 * d_m * g.magnification();
    let peak = two_point_image(d_m, g, x_peak, 0.0);
    dip / peak
}

/// Minimum resolvable two-point distance of the near-field configuration
/// at the reference contrast threshold 0.81:
/// `0.53 M_I sqrt(L (lambda_I + lambda_s))`.
pub fn d_min(g: &GeometryPc) -> f64 {
    0.53 * g.m_idler().abs() * (g.crystal().length() * g.crystal().wavelength_sum()).sqrt()
}

/// Minimum distance at which the two-point contrast drops to
/// `beta_max`, found by root-solving the closed-form contrast. Validates
/// the 0.53 coefficient of [`d_min`] at `beta_max = 0.81`.
pub fn d_min_at(g: &GeometryPc, beta_max: f64) -> Result<f64, DesignError> {
    if !(beta_max.is_finite() && beta_max > 0.0 && beta_max < 1.0) {
        return Err(DesignError::ContrastThresholdOutOfRange(beta_max));
    }
    // In the reduced separation delta = d / (M_I sqrt(L Lambda)) the
    // contrast is beta(delta) = 2 e^{-pi delta^2} / (1 + e^{-4 pi delta^2}),
    // strictly decreasing from above 1 to 0 beyond its maximum at
    // delta^2 = ln 3 / (4 pi); every threshold in (0, 1) is bracketed.
    let beta = |delta: f64| {
        let x = PI * delta * delta;
        2.0 * (-x).exp() / (1.0 + (-4.0 * x).exp())
    };
    let mut lo = (3.0f64.ln() / (4.0 * PI)).sqrt();
    let mut hi = 10.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta(mid) > beta_max {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta = 0.5 * (lo + hi);
    let scale = g.m_idler().abs() * (g.crystal().length() * g.crystal().wavelength_sum()).sqrt();
    Ok(delta * scale)
}

/// Edge-response full width at half maximum of the near-field
/// configuration, `0.44 M_I sqrt(L (lambda_I + lambda_s) / n)`.
pub fn resolution_pc_fwhm(g: &GeometryPc) -> f64 {
    0.44 * g.m_idler().abs()
        * (g.crystal().length() * g.crystal().wavelength_sum() / single_index(g.crystal())).sqrt()
}

/// Field of view of the near-field configuration: the full width at half
/// maximum of the imaged pump profile, `sqrt(2 ln 2) M_I w_p`.
pub fn fov_pc(pump: &GaussianPumpModel, m_idler: f64) -> f64 {
    (2.0 * 2.0f64.ln()).sqrt() * m_idler.abs() * pump.waist()
}

/// Number of resolvable spatial modes per direction in the near field,
/// `2.7 w_p sqrt(n / (L (lambda_I + lambda_s)))`.
pub fn modes_pc(crystal: &CrystalModel, pump: &GaussianPumpModel) -> f64 {
    2.7 * pump.waist()
        * (single_index(crystal) / (crystal.length() * crystal.wavelength_sum())).sqrt()
}

/// Converts a spectral bandwidth from frequency to wavelength units at
/// the given center wavelength: `delta_lambda = lambda^2 delta_nu / c`.
pub fn bandwidth_from_frequency(lambda_m: f64, delta_nu_hz: f64) -> f64 {
    const C: f64 = 299_792_458.0;
    lambda_m * lambda_m * delta_nu_hz / C
}

/// Axial resolution of spectral-domain ranging with the idler bandwidth
/// `delta_lambda`: `0.44 lambda_I^2 / delta_lambda`.
pub fn oct_axial_resolution(lambda_idler_m: f64, delta_lambda_m: f64) -> f64 {
    0.44 * lambda_idler_m * lambda_idler_m / delta_lambda_m
}

/// Imaging configuration a design report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Configuration {
    MomentumCorrelation,
    PositionCorrelation,
}

/// Parameters a report column was computed from, echoed for traceability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignInputs {
    pub lambda_signal_m: f64,
    pub lambda_idler_m: f64,
    pub pump_waist_m: f64,
    pub crystal_length_m: f64,
    pub refractive_index: f64,
    /// Idler focal length; far-field setups only.
    pub f_idler_m: Option<f64>,
    /// Idler-arm magnification; near-field setups only.
    pub m_idler: Option<f64>,
}

/// One column of the design comparison: headline figures of a setup.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    pub configuration: Configuration,
    pub label: String,
    pub res_fwhm_m: f64,
    pub fov_m: f64,
    pub modes_per_direction: f64,
    pub inputs: DesignInputs,
}

#[allow(clippy::too_many_arguments)]
fn mc_report(
    label: &str,
    lambda_signal: f64,
    lambda_idler: f64,
    pump_waist: f64,
    crystal_length: f64,
    refractive_index: f64,
    f_idler: f64,
    f_camera: f64,
) -> DesignReport {
    let pump = GaussianPumpModel::new(pump_waist).expect("report parameters are valid");
    let crystal = CrystalModel::new(
        crystal_length,
        refractive_index,
        refractive_index,
        lambda_signal,
        lambda_idler,
    )
    .expect("report parameters are valid");
    let g = GeometryMc::new(f_idler, f_camera, lambda_signal, lambda_idler, pump, 0.0)
        .expect("report parameters are valid");
    DesignReport {
        configuration: Configuration::MomentumCorrelation,
        label: label.to_string(),
        res_fwhm_m: resolution_mc(&g).res_fwhm_m,
        fov_m: fov_mc(f_idler, idler_divergence(&crystal)),
        modes_per_direction: modes_mc(&crystal, &pump),
        inputs: DesignInputs {
            lambda_signal_m: lambda_signal,
            lambda_idler_m: lambda_idler,
            pump_waist_m: pump_waist,
            crystal_length_m: crystal_length,
            refractive_index,
            f_idler_m: Some(f_idler),
            m_idler: None,
        },
    }
}

fn pc_report(
    label: &str,
    lambda_signal: f64,
    lambda_idler: f64,
    pump_waist: f64,
    crystal_length: f64,
    refractive_index: f64,
    m_idler: f64,
) -> DesignReport {
    let pump = GaussianPumpModel::new(pump_waist).expect("report parameters are valid");
    let crystal = CrystalModel::new(
        crystal_length,
        refractive_index,
        refractive_index,
        lambda_signal,
        lambda_idler,
    )
    .expect("report parameters are valid");
    let g = GeometryPc::new(1.0, m_idler, crystal, 0.0).expect("report parameters are valid");
    DesignReport {
        configuration: Configuration::PositionCorrelation,
        label: label.to_string(),
        res_fwhm_m: resolution_pc_fwhm(&g),
        fov_m: fov_pc(&pump, m_idler),
        modes_per_direction: modes_pc(&crystal, &pump),
        inputs: DesignInputs {
            lambda_signal_m: lambda_signal,
            lambda_idler_m: lambda_idler,
            pump_waist_m: pump_waist,
            crystal_length_m: crystal_length,
            refractive_index,
            f_idler_m: None,
            m_idler: Some(m_idler),
        },
    }
}

/// Headline figures for three representative published setups: a
/// far-field telecom-idler imager, a far-field mid-infrared microscope
/// and a near-field mid-infrared microscope.
pub fn comparison_report() -> Vec<DesignReport> {
    vec![
        mc_report(
            "far field, 1550 nm idler",
            810e-9,
            1550e-9,
            119e-6,
            2e-3,
            1.4,
            75e-3,
            100e-3,
        ),
        mc_report(
            "far field, 3.8 um idler",
            800e-9,
            3.8e-6,
            430e-6,
            2e-3,
            1.8,
            100e-3,
            100e-3,
        ),
        pc_report(
            "near field, 3.8 um idler",
            800e-9,
            3.8e-6,
            430e-6,
            2e-3,
            1.8,
            0.25,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn geometry_mc(f_i: f64, f_c: f64, l_s: f64, l_i: f64, w: f64) -> GeometryMc {
        let pump = GaussianPumpModel::new(w).unwrap();
        GeometryMc::new(f_i, f_c, l_s, l_i, pump, 0.0).unwrap()
    }

    fn geometry_pc(length: f64, n: f64, l_s: f64, l_i: f64, m_s: f64, m_i: f64) -> GeometryPc {
        let crystal = CrystalModel::new(length, n, n, l_s, l_i).unwrap();
        GeometryPc::new(m_s, m_i, crystal, 0.0).unwrap()
    }

    #[test]
    fn edge_spread_function_shape() {
        let g = geometry_mc(75e-3, 100e-3, 810e-9, 1550e-9, 119e-6);
        let x0 = 30e-6;
        let center = g.magnification() * x0;
        assert_abs_diff_eq!(esf_mc(center, x0, &g), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(esf_mc(center + 1.0, x0, &g), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(esf_mc(center - 1.0, x0, &g), 0.0, epsilon = 1e-15);

        let sigma = blur_sigma_mc(&g);
        let low = esf_mc(center - 0.5 * sigma, x0, &g);
        let high = esf_mc(center + 0.5 * sigma, x0, &g);
        assert_abs_diff_eq!(low, 0.24, epsilon = 0.002);
        assert_abs_diff_eq!(high, 0.76, epsilon = 0.002);
    }

    #[test]
    fn blur_sigma_value_and_scaling() {
        let g = geometry_mc(75e-3, 100e-3, 810e-9, 1550e-9, 119e-6);
        assert_abs_diff_eq!(blur_sigma_mc(&g), 153.3e-6, epsilon = 0.15e-6);

        let doubled = geometry_mc(75e-3, 100e-3, 810e-9, 1550e-9, 238e-6);
        assert_relative_eq!(
            blur_sigma_mc(&g),
            2.0 * blur_sigma_mc(&doubled),
            max_relative = 1e-12
        );

        // The camera-side blur ignores the undetected wavelength.
        let other_idler = geometry_mc(75e-3, 100e-3, 810e-9, 3.8e-6, 119e-6);
        assert_relative_eq!(
            blur_sigma_mc(&g),
            blur_sigma_mc(&other_idler),
            max_relative = 1e-15
        );
    }

    #[test]
    fn resolution_values() {
        let g = geometry_mc(75e-3, 100e-3, 810e-9, 1550e-9, 119e-6);
        let r = resolution_mc(&g);
        assert_abs_diff_eq!(r.res_m, 220e-6, epsilon = 0.5e-6);
        assert_abs_diff_eq!(r.res_fwhm_m, 366e-6, epsilon = 0.5e-6);

        let mid_ir = geometry_mc(100e-3, 100e-3, 800e-9, 3.8e-6, 430e-6);
        assert_abs_diff_eq!(resolution_mc(&mid_ir).res_fwhm_m, 331e-6, epsilon = 0.5e-6);
    }

    #[test]
    fn blur_over_magnification_is_the_object_resolution() {
        let g = geometry_mc(75e-3, 100e-3, 810e-9, 1550e-9, 119e-6);
        assert_relative_eq!(
            blur_sigma_mc(&g) / g.magnification(),
            resolution_mc(&g).res_m,
            max_relative = 1e-12
        );
    }

    #[test]
    fn idler_divergence_value_and_scaling() {
        let crystal = CrystalModel::new(2e-3, 1.8, 1.8, 0.8e-6, 3.8e-6).unwrap();
        assert_abs_diff_eq!(idler_divergence(&crystal), 0.050, epsilon = 5e-4);

        let longer = CrystalModel::new(8e-3, 1.8, 1.8, 0.8e-6, 3.8e-6).unwrap();
        assert_relative_eq!(
            idler_divergence(&crystal),
            2.0 * idler_divergence(&longer),
            max_relative = 1e-12
        );

        // Doubling both indices multiplies the radicand by 4/2 = 2.
        let denser = CrystalModel::new(2e-3, 3.6, 3.6, 0.8e-6, 3.8e-6).unwrap();
        assert_relative_eq!(
            idler_divergence(&denser),
            SQRT_2 * idler_divergence(&crystal),
            max_relative = 1e-12
        );
    }

    #[test]
    fn field_of_view_mc() {
        assert_abs_diff_eq!(fov_mc(100e-3, 0.05), 10e-3, epsilon = 1e-15);
        assert_eq!(fov_mc(100e-3, 0.0), 0.0);

        let crystal = CrystalModel::new(2e-3, 1.4, 1.4, 810e-9, 1550e-9).unwrap();
        let fov = fov_mc(75e-3, idler_divergence(&crystal));
        assert_abs_diff_eq!(fov, 3.7e-3, epsilon = 0.1e-3);
    }

    #[test]
    fn mode_counts() {
        let crystal = CrystalModel::new(2e-3, 1.8, 1.8, 0.8e-6, 3.8e-6).unwrap();
        let pump = GaussianPumpModel::new(430e-6).unwrap();
        assert_abs_diff_eq!(modes_mc(&crystal, &pump), 30.1, epsilon = 0.05);
        assert_abs_diff_eq!(modes_pc(&crystal, &pump), 16.2, epsilon = 0.05);
        assert_relative_eq!(
            modes_mc(&crystal, &pump) / modes_pc(&crystal, &pump),
            5.0 / 2.7,
            max_relative = 1e-12
        );

        let telecom = CrystalModel::new(2e-3, 1.4, 1.4, 810e-9, 1550e-9).unwrap();
        let thin_pump = GaussianPumpModel::new(119e-6).unwrap();
        assert_abs_diff_eq!(modes_mc(&telecom, &thin_pump), 10.0, epsilon = 0.5);

        let double_pump = GaussianPumpModel::new(860e-6).unwrap();
        assert_relative_eq!(
            modes_mc(&crystal, &double_pump),
            2.0 * modes_mc(&crystal, &pump),
            max_relative = 1e-12
        );
    }

    #[test]
    fn two_point_contrast_and_minimum_distance() {
        let g = geometry_pc(2e-3, 1.8, 810e-9, 1550e-9, 1.0, 1.0);
        // Midway between well-separated points both Gaussians contribute
        // equally.
        let d = 70e-6;
        let dip = two_point_image(d, &g, 0.0, 0.0);
        let single = (-4.0 * PI / (2e-3 * 2.36e-6) * (0.5 * d).powi(2)).exp();
        assert_relative_eq!(dip, 2.0 * single, max_relative = 1e-12);

        assert_abs_diff_eq!(two_point_contrast(d, &g), 0.0767, epsilon = 1e-3);

        // A short crystal resolves the same pair completely.
        let sharp = geometry_pc(2e-8, 1.8, 810e-9, 1550e-9, 1.0, 1.0);
        assert!(two_point_contrast(d, &sharp) < 1e-12);

        assert_abs_diff_eq!(d_min(&g), 36.4e-6, epsilon = 0.05e-6);

        let doubled = geometry_pc(2e-3, 1.8, 810e-9, 1550e-9, 1.0, 2.0);
        assert_relative_eq!(d_min(&doubled), 2.0 * d_min(&g), max_relative = 1e-12);

        // The root-solved distance validates the 0.53 coefficient.
        let solved = d_min_at(&g, 0.81).unwrap();
        assert_relative_eq!(solved, d_min(&g), max_relative = 0.02);
        assert_relative_eq!(two_point_contrast(solved, &g), 0.81, max_relative = 1e-9);

        assert!(matches!(
            d_min_at(&g, 1.2),
            Err(DesignError::ContrastThresholdOutOfRange(_))
        ));
    }

    #[test]
    fn near_field_resolution_fov_and_scalings() {
        let g = geometry_pc(2e-3, 1.8, 0.8e-6, 3.8e-6, 1.0, 0.25);
        assert_abs_diff_eq!(resolution_pc_fwhm(&g), 7.9e-6, epsilon = 0.05e-6);

        let unity = geometry_pc(2e-3, 1.8, 0.8e-6, 3.8e-6, 1.0, 1.0);
        assert_relative_eq!(
            resolution_pc_fwhm(&unity),
            4.0 * resolution_pc_fwhm(&g),
            max_relative = 1e-12
        );

        let long = geometry_pc(8e-3, 1.8, 0.8e-6, 3.8e-6, 1.0, 0.25);
        assert_relative_eq!(
            resolution_pc_fwhm(&long),
            2.0 * resolution_pc_fwhm(&g),
            max_relative = 1e-12
        );

        let pump = GaussianPumpModel::new(430e-6).unwrap();
        assert_abs_diff_eq!(fov_pc(&pump, 0.25), 126.6e-6, epsilon = 0.1e-6);
        assert_abs_diff_eq!(fov_pc(&pump, 1.0), 506e-6, epsilon = 0.5e-6);
        let wide = GaussianPumpModel::new(860e-6).unwrap();
        assert_relative_eq!(
            fov_pc(&wide, 0.25),
            2.0 * fov_pc(&pump, 0.25),
            max_relative = 1e-12
        );
    }

    #[test]
    fn axial_resolution_values() {
        // A 10 THz bandwidth gives 13.2 um regardless of center wavelength.
        for lambda in [1550e-9, 3.8e-6] {
            let dl = bandwidth_from_frequency(lambda, 1e13);
            assert_abs_diff_eq!(oct_axial_resolution(lambda, dl), 13.2e-6, epsilon = 0.05e-6);
        }
        assert_abs_diff_eq!(
            oct_axial_resolution(1550e-9, 100e-9),
            10.6e-6,
            epsilon = 0.05e-6
        );
        assert_relative_eq!(
            oct_axial_resolution(1550e-9, 200e-9),
            0.5 * oct_axial_resolution(1550e-9, 100e-9),
            max_relative = 1e-12
        );
    }

    #[test]
    fn comparison_report_reproduces_the_published_table() {
        let reports = comparison_report();
        assert_eq!(reports.len(), 3);

        let telecom = &reports[0];
        assert_eq!(telecom.configuration, Configuration::MomentumCorrelation);
        assert_abs_diff_eq!(telecom.res_fwhm_m, 366e-6, epsilon = 1e-6);
        assert_abs_diff_eq!(telecom.fov_m, 3.7e-3, epsilon = 0.1e-3);
        assert_abs_diff_eq!(telecom.modes_per_direction, 10.0, epsilon = 1.0);

        let mid_ir = &reports[1];
        assert_abs_diff_eq!(mid_ir.res_fwhm_m, 330e-6, epsilon = 10e-6);
        assert_abs_diff_eq!(mid_ir.fov_m, 10e-3, epsilon = 1e-3);
        assert_abs_diff_eq!(mid_ir.modes_per_direction, 30.0, epsilon = 1.0);

        let near = &reports[2];
        assert_eq!(near.configuration, Configuration::PositionCorrelation);
        assert_abs_diff_eq!(near.res_fwhm_m, 8e-6, epsilon = 1e-6);
        assert_abs_diff_eq!(near.fov_m, 130e-6, epsilon = 10e-6);
        assert_abs_diff_eq!(near.modes_per_direction, 16.0, epsilon = 1.0);

        for r in &reports {
            assert!(r.res_fwhm_m > 0.0 && r.fov_m > 0.0 && r.modes_per_direction > 0.0);
        }
    }
}
