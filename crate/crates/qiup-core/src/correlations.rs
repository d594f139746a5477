//! Transverse-momentum and transverse-position correlations of the
//! emitted photon pair.
//!
//! Two routes are provided. The Gaussian closed forms describe the joint
//! densities of a pair produced by a Gaussian pump in a thin nonlinear
//! crystal: momenta are anti-correlated with a spread set by the pump
//! waist, positions are correlated with a spread set by the crystal length
//! and the wavelengths. The generic route takes an arbitrary joint
//! momentum amplitude on a 4-D grid and Fourier transforms each photon's
//! coordinates to obtain the joint position density.
//!
//! Normalization conventions: closed-form densities integrate to one over
//! their correlated relative coordinate; the grid amplitude is normalized
//! so the squared modulus sums to one times the grid cell volume. All
//! downstream imaging results are ratio-based, so these conventions cancel.

use std::f64::consts::{PI, TAU};

use ndarray::{Array4, Axis};
use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::grid::centered_coordinate;

#[derive(Debug, Error, PartialEq)]
pub enum CorrelationsError {
    #[error("pump waist {0} must be positive and finite")]
    PumpWaist(f64),
    #[error("crystal parameter {name} = {value} must be positive and finite")]
    CrystalParameter { name: &'static str, value: f64 },
    #[error("grid spacing {0} must be positive and finite")]
    BadSpacing(f64),
    #[error("amplitude grid must have at least two points per axis")]
    GridTooSmall,
    #[error("amplitude values must be finite")]
    NonFinite,
    #[error("squared amplitude sums to {0}, not 1, despite the normalized flag")]
    NormalizationOff(f64),
    #[error("amplitude must be normalized before transforming")]
    NotNormalized,
    #[error("amplitude is identically zero")]
    ZeroAmplitude,
    #[error(
        "amplitude at the grid boundary is {ratio} of the peak; enlarge the grid (aliasing risk)"
    )]
    BoundaryTooLarge { ratio: f64 },
}

/// Transverse momentum of one photon, radians per meter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMomentum {
    pub qx: f64,
    pub qy: f64,
}

/// Transverse position of one photon, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransversePosition {
    pub x: f64,
    pub y: f64,
}

/// Gaussian pump beam, characterized by its waist at the crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPumpModel {
    waist: f64,
}

impl GaussianPumpModel {
    pub fn new(waist_m: f64) -> Result<Self, CorrelationsError> {
        if !(waist_m.is_finite() && waist_m > 0.0) {
            return Err(CorrelationsError::PumpWaist(waist_m));
        }
        Ok(Self { waist: waist_m })
    }

    /// Pump waist in meters.
    pub fn waist(&self) -> f64 {
        self.waist
    }
}

/// Nonlinear crystal emitting the pair: length, refractive indices and
/// vacuum wavelengths of the signal and idler fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalModel {
    length: f64,
    n_signal: f64,
    n_idler: f64,
    lambda_signal: f64,
    lambda_idler: f64,
}

impl CrystalModel {
    pub fn new(
        length_m: f64,
        n_signal: f64,
        n_idler: f64,
        lambda_signal_m: f64,
        lambda_idler_m: f64,
    ) -> Result<Self, CorrelationsError> {
        for (name, value) in [
            ("length", length_m),
            ("n_signal", n_signal),
            ("n_idler", n_idler),
            ("lambda_signal", lambda_signal_m),
            ("lambda_idler", lambda_idler_m),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(CorrelationsError::CrystalParameter { name, value });
            }
        }
        Ok(Self {
            length: length_m,
            n_signal,
            n_idler,
            lambda_signal: lambda_signal_m,
            lambda_idler: lambda_idler_m,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_signal(&self) -> f64 {
        self.n_signal
    }

    pub fn n_idler(&self) -> f64 {
        self.n_idler
    }

    pub fn lambda_signal(&self) -> f64 {
        self.lambda_signal
    }

    pub fn lambda_idler(&self) -> f64 {
        self.lambda_idler
    }

    /// Sum of the two vacuum wavelengths, the combination that sets the
    /// position-correlation area together with the crystal length.
    pub fn wavelength_sum(&self) -> f64 {
        self.lambda_signal + self.lambda_idler
    }

    /// Per-axis standard deviation of the Gaussian position-correlation
    /// kernel: `sqrt(L (lambda_s + lambda_I) / (8 pi))`.
    pub fn position_correlation_std(&self) -> f64 {
        (self.length * self.wavelength_sum() / (8.0 * PI)).sqrt()
    }
}

/// Joint transverse-momentum density of the pair under a Gaussian pump:
/// `(w_p^2 / 2pi) exp(-|q_s + q_I|^2 w_p^2 / 2)`.
///
/// The density is normalized over the anti-correlated sum coordinate
/// `q_s + q_I`; it peaks when the momenta are exactly opposite, with a
/// spread inversely proportional to the pump waist.
pub fn momentum_density_gaussian(
    q_s: TransverseMomentum,
    q_i: TransverseMomentum,
    pump: &GaussianPumpModel,
) -> f64 {
    assert!(
        q_s.qx.is_finite() && q_s.qy.is_finite() && q_i.qx.is_finite() && q_i.qy.is_finite(),
        "momenta must be finite"
    );
    let w2 = pump.waist * pump.waist;
    let sx = q_s.qx + q_i.qx;
    let sy = q_s.qy + q_i.qy;
    w2 / TAU * (-0.5 * (sx * sx + sy * sy) * w2).exp()
}

/// Joint transverse-position density of the pair at conjugate planes with
/// magnifications `m_s` (signal) and `m_i` (idler):
/// `(4 / (L Lambda)) exp(-(4 pi / (L Lambda)) |rho_s/m_s - rho_i/m_i|^2)`
/// with `Lambda = lambda_s + lambda_I`.
///
/// Normalized over the correlated relative coordinate; it peaks when the
/// back-projected positions coincide, with a spread shrinking as the
/// crystal gets shorter.
pub fn position_density_gaussian(
    rho_s: TransversePosition,
    rho_i: TransversePosition,
    crystal: &CrystalModel,
    m_s: f64,
    m_i: f64,
) -> f64 {
    assert!(
        rho_s.x.is_finite() && rho_s.y.is_finite() && rho_i.x.is_finite() && rho_i.y.is_finite(),
        "positions must be finite"
    );
    assert!(
        m_s != 0.0 && m_i != 0.0 && m_s.is_finite() && m_i.is_finite(),
        "magnifications must be nonzero and finite"
    );
    let l_lambda = crystal.length * crystal.wavelength_sum();
    let vx = rho_s.x / m_s - rho_i.x / m_i;
    let vy = rho_s.y / m_s - rho_i.y / m_i;
    4.0 / l_lambda * (-(4.0 * PI / l_lambda) * (vx * vx + vy * vy)).exp()
}

/// Joint momentum amplitude `C(q_s, q_I)` sampled on a centered 4-D grid
/// with axes ordered `(q_sx, q_sy, q_Ix, q_Iy)` and one spacing `dq`
/// shared by all axes (axis lengths may differ).
#[derive(Debug, Clone, PartialEq)]
pub struct JointMomentumAmplitude {
    data: Array4<Complex64>,
    dq: f64,
    normalized: bool,
}

impl JointMomentumAmplitude {
    /// Wraps a sampled amplitude. With `normalized` set, the squared
    /// modulus times the cell volume must sum to one within 1e-6.
    pub fn new(
        data: Array4<Complex64>,
        dq: f64,
        normalized: bool,
    ) -> Result<Self, CorrelationsError> {
        if !(dq.is_finite() && dq > 0.0) {
            return Err(CorrelationsError::BadSpacing(dq));
        }
        if data.shape().iter().any(|&n| n < 2) {
            return Err(CorrelationsError::GridTooSmall);
        }
        if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(CorrelationsError::NonFinite);
        }
        let amp = Self {
            data,
            dq,
            normalized,
        };
        if normalized {
            let total = amp.total_probability();
            if (total - 1.0).abs() > 1e-6 {
                return Err(CorrelationsError::NormalizationOff(total));
            }
        }
        Ok(amp)
    }

    /// Samples `f(q_sx, q_sy, q_ix, q_iy)` on a centered grid and
    /// normalizes the result.
    pub fn from_function<F>(shape: [usize; 4], dq: f64, f: F) -> Result<Self, CorrelationsError>
    where
        F: Fn(f64, f64, f64, f64) -> Complex64,
    {
        if !(dq.is_finite() && dq > 0.0) {
            return Err(CorrelationsError::BadSpacing(dq));
        }
        let data = Array4::from_shape_fn(shape, |(i, j, k, l)| {
            f(
                centered_coordinate(i, shape[0], dq),
                centered_coordinate(j, shape[1], dq),
                centered_coordinate(k, shape[2], dq),
                centered_coordinate(l, shape[3], dq),
            )
        });
        Self::new(data, dq, false)?.normalize()
    }

    /// Rescales so the total probability is one.
    pub fn normalize(mut self) -> Result<Self, CorrelationsError> {
        let total = self.total_probability();
        if total <= 0.0 {
            return Err(CorrelationsError::ZeroAmplitude);
        }
        let scale = Complex64::new(1.0 / total.sqrt(), 0.0);
        self.data.mapv_inplace(|v| v * scale);
        self.normalized = true;
        Ok(self)
    }

    pub fn data(&self) -> &Array4<Complex64> {
        &self.data
    }

    pub fn dq(&self) -> f64 {
        self.dq
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `sum |C|^2 dq^4`.
    pub fn total_probability(&self) -> f64 {
        let cell = self.dq.powi(4);
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell
    }

    /// Momentum coordinates along one axis.
    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        let n = self.data.shape()[axis];
        (0..n).map(|i| centered_coordinate(i, n, self.dq)).collect()
    }
}

/// Joint position density of the pair with axes
/// `(rho_sx, rho_sy, rho_ix, rho_iy)` and per-axis spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDensity {
    data: Array4<f64>,
    spacings: [f64; 4],
}

impl PositionDensity {
    pub fn data(&self) -> &Array4<f64> {
        &self.data
    }

    pub fn spacings(&self) -> [f64; 4] {
        self.spacings
    }

    /// Position coordinates along one axis.
    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        let n = self.data.shape()[axis];
        (0..n)
            .map(|i| centered_coordinate(i, n, self.spacings[axis]))
            .collect()
    }

    /// `sum density * cell volume`; one for a normalized input amplitude.
    pub fn total_probability(&self) -> f64 {
        let cell: f64 = self.spacings.iter().product();
        self.data.sum() * cell
    }

    /// Pearson correlation coefficients between the signal and idler
    /// positions, one per transverse axis: `[corr(x_s, x_i), corr(y_s, y_i)]`.
    /// Near zero for separable pairs, near +1 for position-correlated
    /// pairs, near -1 for anti-correlated ones.
    pub fn signal_idler_correlation(&self) -> [f64; 2] {
        let coords: Vec<Vec<f64>> = (0..4).map(|axis| self.coordinates(axis)).collect();
        let mut total = 0.0;
        let mut mean = [0.0; 4];
        for ((i, j, k, l), &w) in self.data.indexed_iter() {
            total += w;
            mean[0] += w * coords[0][i];
            mean[1] += w * coords[1][j];
            mean[2] += w * coords[2][k];
            mean[3] += w * coords[3][l];
        }
        for m in &mut mean {
            *m /= total;
        }
        let mut var = [0.0; 4];
        let mut cov = [0.0; 2];
        for ((i, j, k, l), &w) in self.data.indexed_iter() {
            let d = [
                coords[0][i] - mean[0],
                coords[1][j] - mean[1],
                coords[2][k] - mean[2],
                coords[3][l] - mean[3],
            ];
            for axis in 0..4 {
                var[axis] += w * d[axis] * d[axis];
            }
            cov[0] += w * d[0] * d[2];
            cov[1] += w * d[1] * d[3];
        }
        [
            cov[0] / (var[0] * var[2]).sqrt(),
            cov[1] / (var[1] * var[3]).sqrt(),
        ]
    }
}

/// Transforms a normalized joint momentum amplitude to the joint position
/// density by a unitary Fourier transform of each photon's transverse
/// coordinates (kernel `exp(+i q . rho)`, `1/sqrt(2 pi)` per axis).
///
/// The amplitude must decay at the grid boundary (largest boundary modulus
/// below 1e-3 of the peak), otherwise the discrete transform would alias
/// and an error is returned. Position spacings come out as
/// `2 pi / (n_axis dq)`.
pub fn position_density_from_amplitude(
    c: &JointMomentumAmplitude,
) -> Result<PositionDensity, CorrelationsError> {
    if !c.normalized {
        return Err(CorrelationsError::NotNormalized);
    }
    let mut peak = 0.0f64;
    let mut boundary = 0.0f64;
    let shape: Vec<usize> = c.data.shape().to_vec();
    for (idx, value) in c.data.indexed_iter() {
        let idx = [idx.0, idx.1, idx.2, idx.3];
        let modulus = value.norm();
        peak = peak.max(modulus);
        if idx.iter().zip(&shape).any(|(&i, &n)| i == 0 || i == n - 1) {
            boundary = boundary.max(modulus);
        }
    }
    if peak == 0.0 {
        return Err(CorrelationsError::ZeroAmplitude);
    }
    let ratio = boundary / peak;
    if ratio >= 1e-3 {
        return Err(CorrelationsError::BoundaryTooLarge { ratio });
    }

    let mut field = c.data.clone();
    let mut planner = FftPlanner::<f64>::new();
    let mut spacings = [0.0; 4];
    for (axis, spacing) in spacings.iter_mut().enumerate() {
        *spacing = fourier_axis(&mut field, axis, c.dq, &mut planner);
    }
    Ok(PositionDensity {
        data: field.mapv(|v| v.norm_sqr()),
        spacings,
    })
}

/// In-place centered unitary Fourier transform along one axis; returns the
/// conjugate-coordinate spacing. Index `a` maps to coordinate
/// `(a - c) dq` with `c = (n-1)/2`, so the phase factors below reduce the
/// centered kernel `exp(i q_a rho_b)` to a plain DFT.
fn fourier_axis(
    data: &mut Array4<Complex64>,
    axis: usize,
    dq: f64,
    planner: &mut FftPlanner<f64>,
) -> f64 {
    let n = data.shape()[axis];
    let c = (n as f64 - 1.0) / 2.0;
    let fft = planner.plan_fft_inverse(n);
    let scale = dq / TAU.sqrt();
    let pre: Vec<Complex64> = (0..n)
        .map(|a| Complex64::from_polar(1.0, -TAU * c * a as f64 / n as f64))
        .collect();
    let post: Vec<Complex64> = (0..n)
        .map(|b| Complex64::from_polar(scale, TAU * (c * c - c * b as f64) / n as f64))
        .collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for mut lane in data.lanes_mut(Axis(axis)) {
        for (a, slot) in buf.iter_mut().enumerate() {
            *slot = lane[a] * pre[a];
        }
        fft.process(&mut buf);
        for (b, value) in buf.iter().enumerate() {
            lane[b] = value * post[b];
        }
    }
    TAU / (n as f64 * dq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn pump(w: f64) -> GaussianPumpModel {
        GaussianPumpModel::new(w).unwrap()
    }

    fn crystal(l: f64) -> CrystalModel {
        CrystalModel::new(l, 1.8, 1.7, 810e-9, 1550e-9).unwrap()
    }

    fn q(qx: f64, qy: f64) -> TransverseMomentum {
        TransverseMomentum { qx, qy }
    }

    fn r(x: f64, y: f64) -> TransversePosition {
        TransversePosition { x, y }
    }

    #[test]
    fn momentum_density_peaks_at_anticorrelation() {
        let p = pump(100e-6);
        let peak = momentum_density_gaussian(q(3e3, -2e3), q(-3e3, 2e3), &p);
        let off = momentum_density_gaussian(q(3e3, -2e3), q(-3e3 + 5e3, 2e3), &p);
        assert!(peak > off);
        assert_abs_diff_eq!(
            peak,
            p.waist().powi(2) / TAU,
            epsilon = 1e-12 * p.waist().powi(2)
        );
    }

    #[test]
    fn momentum_density_e_folding_point() {
        let p = pump(119e-6);
        let peak = momentum_density_gaussian(q(0.0, 0.0), q(0.0, 0.0), &p);
        let s = 2.0f64.sqrt() / p.waist();
        let folded = momentum_density_gaussian(q(s, 0.0), q(0.0, 0.0), &p);
        assert_relative_eq!(folded, peak * (-1.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn momentum_spread_inversely_proportional_to_waist() {
        // Numerical std of the sum coordinate along x halves when the
        // waist doubles.
        let std_of = |w: f64| {
            let p = pump(w);
            let sigma = 1.0 / w;
            let n = 801;
            let mut norm = 0.0;
            let mut second = 0.0;
            for i in 0..n {
                let s = (i as f64 - (n as f64 - 1.0) / 2.0) * (12.0 * sigma / (n as f64 - 1.0));
                let d = momentum_density_gaussian(q(s, 0.0), q(0.0, 0.0), &p);
                norm += d;
                second += d * s * s;
            }
            (second / norm).sqrt()
        };
        let w = 80e-6;
        assert_relative_eq!(std_of(w), 1.0 / w, max_relative = 1e-6);
        assert_relative_eq!(std_of(2.0 * w) * 2.0, std_of(w), max_relative = 1e-6);
    }

    #[test]
    fn momentum_density_normalized_over_sum_coordinate() {
        let p = pump(150e-6);
        let sigma = 1.0 / p.waist();
        let n = 512;
        let step = 16.0 * sigma / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let sx = (i as f64 - (n as f64 - 1.0) / 2.0) * step;
                let sy = (j as f64 - (n as f64 - 1.0) / 2.0) * step;
                total += momentum_density_gaussian(q(sx, sy), q(0.0, 0.0), &p) * step * step;
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn position_density_peaks_when_back_projections_coincide() {
        let cr = crystal(2e-3);
        let (m_s, m_i) = (3.0, 1.5);
        let peak = position_density_gaussian(r(3e-4 * 2.0, 0.0), r(3e-4, 0.0), &cr, m_s, m_i);
        let expected_peak = 4.0 / (cr.length() * cr.wavelength_sum());
        assert_relative_eq!(peak, expected_peak, max_relative = 1e-12);
        let off = position_density_gaussian(r(6.1e-4, 0.0), r(3e-4, 0.0), &cr, m_s, m_i);
        assert!(off < peak);
    }

    #[test]
    fn position_density_e_folding_point() {
        let cr = crystal(2e-3);
        let d = (cr.length() * cr.wavelength_sum() / (4.0 * PI)).sqrt();
        let peak = position_density_gaussian(r(0.0, 0.0), r(0.0, 0.0), &cr, 1.0, 1.0);
        let folded = position_density_gaussian(r(d, 0.0), r(0.0, 0.0), &cr, 1.0, 1.0);
        assert_relative_eq!(folded, peak * (-1.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn shorter_crystal_sharpens_position_correlation() {
        let std_of = |l: f64| {
            let cr = crystal(l);
            let sigma = cr.position_correlation_std();
            let n = 801;
            let step = 12.0 * sigma / (n as f64 - 1.0);
            let mut norm = 0.0;
            let mut second = 0.0;
            for i in 0..n {
                let v = (i as f64 - (n as f64 - 1.0) / 2.0) * step;
                let d = position_density_gaussian(r(v, 0.0), r(0.0, 0.0), &cr, 1.0, 1.0);
                norm += d;
                second += d * v * v;
            }
            (second / norm).sqrt()
        };
        let l = 2e-3;
        assert_relative_eq!(
            std_of(l),
            crystal(l).position_correlation_std(),
            max_relative = 1e-6
        );
        assert_relative_eq!(
            std_of(l / 2.0) * 2.0f64.sqrt(),
            std_of(l),
            max_relative = 1e-6
        );
    }

    #[test]
    fn position_density_normalized_over_relative_coordinate() {
        let cr = crystal(1e-3);
        let sigma = cr.position_correlation_std();
        let n = 512;
        let step = 16.0 * sigma / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let vx = (i as f64 - (n as f64 - 1.0) / 2.0) * step;
                let vy = (j as f64 - (n as f64 - 1.0) / 2.0) * step;
                total +=
                    position_density_gaussian(r(vx, vy), r(0.0, 0.0), &cr, 1.0, 1.0) * step * step;
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
    }

    /// Separable Gaussian with per-axis width factors.
    fn separable_amplitude(widths: [f64; 4], dq: f64) -> JointMomentumAmplitude {
        let shape = [
            (2.0 * 5.0 / (widths[0] * dq)).round() as usize,
            (2.0 * 5.0 / (widths[1] * dq)).round() as usize,
            (2.0 * 5.0 / (widths[2] * dq)).round() as usize,
            (2.0 * 5.0 / (widths[3] * dq)).round() as usize,
        ];
        JointMomentumAmplitude::from_function(shape, dq, |a, b, c, d| {
            let e = -0.5
                * (a * a * widths[0] * widths[0]
                    + b * b * widths[1] * widths[1]
                    + c * c * widths[2] * widths[2]
                    + d * d * widths[3] * widths[3]);
            Complex64::new(e.exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn separable_gaussian_transforms_to_reciprocal_widths() {
        let widths = [1.0, 1.3, 0.8, 1.1];
        let amp = separable_amplitude(widths, 0.28);
        let density = position_density_from_amplitude(&amp).unwrap();
        // Momentum amplitude exp(-q^2 w^2 / 2) has position density std
        // w / sqrt 2 per axis.
        for axis in 0..4 {
            let coords = density.coordinates(axis);
            let mut norm = 0.0;
            let mut second = 0.0;
            for (idx, &w) in density.data().indexed_iter() {
                let i = [idx.0, idx.1, idx.2, idx.3][axis];
                norm += w;
                second += w * coords[i] * coords[i];
            }
            let std = (second / norm).sqrt();
            assert_relative_eq!(std, widths[axis] / 2.0f64.sqrt(), max_relative = 1e-4);
        }
        // Separable input stays uncorrelated between signal and idler.
        let corr = density.signal_idler_correlation();
        assert!(corr[0].abs() < 1e-6, "corr_x = {}", corr[0]);
        assert!(corr[1].abs() < 1e-6, "corr_y = {}", corr[1]);
    }

    /// Pump-correlated amplitude: Gaussian in the sum and difference
    /// momenta with scales `w_p` and `sigma`.
    fn entangled_amplitude(w_p: f64, sigma: f64, n: usize, dq: f64) -> JointMomentumAmplitude {
        JointMomentumAmplitude::from_function([n, n, n, n], dq, |sx, sy, ix, iy| {
            let sum2 = (sx + ix).powi(2) + (sy + iy).powi(2);
            let diff2 = (sx - ix).powi(2) + (sy - iy).powi(2);
            Complex64::new((-sum2 * w_p * w_p / 4.0 - diff2 * sigma * sigma).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn narrow_difference_spectrum_gives_position_correlation() {
        // Predicted position correlation (w^2 - 4 s^2) / (w^2 + 4 s^2).
        let density =
            position_density_from_amplitude(&entangled_amplitude(1.0, 0.25, 32, 0.51)).unwrap();
        let corr = density.signal_idler_correlation();
        assert_abs_diff_eq!(corr[0], 0.6, epsilon = 5e-3);
        assert_abs_diff_eq!(corr[1], 0.6, epsilon = 5e-3);

        let density =
            position_density_from_amplitude(&entangled_amplitude(1.0, 1.0, 40, 0.256)).unwrap();
        let corr = density.signal_idler_correlation();
        assert_abs_diff_eq!(corr[0], -0.6, epsilon = 5e-3);
        assert_abs_diff_eq!(corr[1], -0.6, epsilon = 5e-3);
    }

    #[test]
    fn parseval_holds_through_the_transform() {
        let amp = entangled_amplitude(1.0, 0.25, 32, 0.51);
        let density = position_density_from_amplitude(&amp).unwrap();
        assert_abs_diff_eq!(amp.total_probability(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(density.total_probability(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn global_phase_leaves_density_unchanged() {
        let amp = separable_amplitude([1.0, 1.0, 1.0, 1.0], 0.5);
        let rotated = JointMomentumAmplitude::new(
            amp.data().mapv(|v| v * Complex64::from_polar(1.0, 1.234)),
            amp.dq(),
            true,
        )
        .unwrap();
        let a = position_density_from_amplitude(&amp).unwrap();
        let b = position_density_from_amplitude(&rotated).unwrap();
        let max_diff = a
            .data()
            .iter()
            .zip(b.data().iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(max_diff < 1e-12, "max diff {max_diff}");
    }

    #[test]
    fn boundary_heavy_amplitude_is_rejected() {
        let flat = Array4::from_elem([8, 8, 8, 8], Complex64::new(1.0, 0.0));
        let amp = JointMomentumAmplitude::new(flat, 1.0, false)
            .unwrap()
            .normalize()
            .unwrap();
        assert!(matches!(
            position_density_from_amplitude(&amp),
            Err(CorrelationsError::BoundaryTooLarge { .. })
        ));
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            GaussianPumpModel::new(0.0),
            Err(CorrelationsError::PumpWaist(0.0))
        );
        assert!(matches!(
            CrystalModel::new(-1.0, 1.8, 1.7, 810e-9, 1550e-9),
            Err(CorrelationsError::CrystalParameter { name: "length", .. })
        ));
        let tiny = Array4::from_elem([1, 2, 2, 2], Complex64::new(1.0, 0.0));
        assert!(matches!(
            JointMomentumAmplitude::new(tiny, 1.0, false),
            Err(CorrelationsError::GridTooSmall)
        ));
        let bad = Array4::from_elem([2, 2, 2, 2], Complex64::new(f64::NAN, 0.0));
        assert_eq!(
            JointMomentumAmplitude::new(bad, 1.0, false),
            Err(CorrelationsError::NonFinite)
        );
        let ok = Array4::from_elem([2, 2, 2, 2], Complex64::new(1.0, 0.0));
        assert!(matches!(
            JointMomentumAmplitude::new(ok.clone(), 1.0, true),
            Err(CorrelationsError::NormalizationOff(_))
        ));
        let unnormalized = JointMomentumAmplitude::new(ok, 1.0, false).unwrap();
        assert_eq!(
            position_density_from_amplitude(&unnormalized),
            Err(CorrelationsError::NotNormalized)
        );
        let zero = Array4::from_elem([2, 2, 2, 2], Complex64::new(0.0, 0.0));
        assert_eq!(
            JointMomentumAmplitude::new(zero, 1.0, false)
                .unwrap()
                .normalize(),
            Err(CorrelationsError::ZeroAmplitude)
        );
    }
}
