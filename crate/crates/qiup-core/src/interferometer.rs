//! Closed-form count rates and visibilities for two-path interferometers
//! that probe an object with one photon of a pair (or with the detected
//! photon itself, in the Mach-Zehnder reference case).
//!
//! All rates are probabilities in [0, 1]. The object is described by a
//! complex field transmittance `T = |T| exp(i gamma)`; an absorbed photon
//! goes to an undetected loss mode, so single-detector rates at the two
//! output ports of a lossless arrangement sum to at most one.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InterferometerError {
    #[error("transmittance magnitude {0} outside [0, 1]")]
    MagnitudeOutOfRange(f64),
    #[error("transmittance requires finite magnitude and phase")]
    NonFinite,
    #[error("phase scan is empty")]
    EmptyScan,
    #[error("phase scan needs at least {min} samples, got {got}")]
    ScanTooSparse { min: usize, got: usize },
    #[error("phase scan spans {span_rad} rad, less than one full period")]
    ScanSpanTooShort { span_rad: f64 },
    #[error("phase scan has {phases} phases but {rates} rates")]
    LengthMismatch { phases: usize, rates: usize },
    #[error("phase scan values must be sorted ascending")]
    Unsorted,
}

/// Complex field transmittance `T = |T| exp(i gamma)` of the probed object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmittance {
    magnitude: f64,
    phase: f64,
}

impl Transmittance {
    /// Magnitude must lie in [0, 1]; the phase is reduced into [0, 2pi).
    pub fn new(magnitude: f64, phase_gamma: f64) -> Result<Self, InterferometerError> {
        if !magnitude.is_finite() || !phase_gamma.is_finite() {
            return Err(InterferometerError::NonFinite);
        }
        if !(0.0..=1.0).contains(&magnitude) {
            return Err(InterferometerError::MagnitudeOutOfRange(magnitude));
        }
        Ok(Self {
            magnitude,
            phase: phase_gamma.rem_euclid(TAU),
        })
    }

    /// Builds from a complex value; the magnitude may not exceed one beyond
    /// rounding error.
    pub fn from_complex(t: Complex64) -> Result<Self, InterferometerError> {
        let norm = t.norm();
        if norm > 1.0 && norm <= 1.0 + 1e-12 {
            return Self::new(1.0, t.arg());
        }
        Self::new(norm, t.arg())
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// Phase `gamma` in [0, 2pi).
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }

    /// Fully transparent object (`T = 1`).
    pub fn transparent() -> Self {
        Self {
            magnitude: 1.0,
            phase: 0.0,
        }
    }

    /// Fully absorbing object (`T = 0`).
    pub fn opaque() -> Self {
        Self {
            magnitude: 0.0,
            phase: 0.0,
        }
    }
}

/// Tunable interferometric phase, reduced into [0, 2pi) on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSetting {
    phi: f64,
}

impl PhaseSetting {
    pub fn new(phi: f64) -> Self {
        Self {
            phi: phi.rem_euclid(TAU),
        }
    }

    pub fn radians(&self) -> f64 {
        self.phi
    }
}

/// Output ports of the Mach-Zehnder arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MzPort {
    A,
    B,
}

/// Signal output ports of the induced-coherence arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZwmPort {
    S1,
    S2,
}

/// Count rate of a Mach-Zehnder interferometer with the object in one arm
/// and the phase shifter in the other:
/// `(1 + |T|^2 +- 2|T| cos(phi - gamma)) / 4`, `+` at port A.
pub fn mz_count_rate(t: &Transmittance, phi: PhaseSetting, port: MzPort) -> f64 {
    let m = t.magnitude;
    let cross = 2.0 * m * (phi.radians() - t.phase).cos();
    match port {
        MzPort::A => (1.0 + m * m + cross) / 4.0,
        MzPort::B => (1.0 + m * m - cross) / 4.0,
    }
}

/// Fringe visibility of the Mach-Zehnder rates: `2|T| / (1 + |T|^2)`.
pub fn mz_visibility(t: &Transmittance) -> f64 {
    let m = t.magnitude;
    2.0 * m / (1.0 + m * m)
}

/// Count rate of the induced-coherence (two-source, shared-idler)
/// arrangement: `(1 +- |T| cos(phi + gamma)) / 2`, `+` at port S1. The
/// visibility equals `|T|` directly, which distinguishes this scheme from
/// the Mach-Zehnder case.
pub fn zwm_count_rate(t: &Transmittance, phi: PhaseSetting, port: ZwmPort) -> f64 {
    let m = t.magnitude;
    let cross = m * (phi.radians() + t.phase).cos();
    match port {
        ZwmPort::S1 => (1.0 + cross) / 2.0,
        ZwmPort::S2 => (1.0 - cross) / 2.0,
    }
}

/// Count rate of the nonlinear interferometer in which one source emits
/// twice into common signal/idler modes: `(1 + |T| cos(phi + gamma)) / 2`,
/// identical at both output ports (the emission probability itself
/// oscillates, so the two outputs brighten and darken together).
///
/// A double-pass geometry in which the idler traverses the object twice is
/// modeled by passing the squared transmittance explicitly.
pub fn su11_count_rate(t: &Transmittance, phi: PhaseSetting) -> f64 {
    let m = t.magnitude;
    (1.0 + m * (phi.radians() + t.phase).cos()) / 2.0
}

/// Singles and coincidence summary of the two-photon interferometer in
/// which signal and idler are recombined on separate beam splitters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParticleRates {
    /// Single-detector rate at either signal port; constant 1/2 at every
    /// phase (the undetected partner carries full which-path information).
    pub singles: f64,
    /// Visibility of the coincidence-rate fringe: `2|T| / (|T|^2 + 1)`.
    pub coincidence_visibility: f64,
}

/// Two-photon interferometer rates. Both returned quantities are
/// independent of the phase setting: the singles are flat and the
/// coincidence visibility summarizes a full phase scan.
pub fn two_particle_rates(t: &Transmittance, _phi: PhaseSetting) -> TwoParticleRates {
    let m = t.magnitude;
    TwoParticleRates {
        singles: 0.5,
        coincidence_visibility: 2.0 * m / (m * m + 1.0),
    }
}

/// A sampled count-rate scan over interferometric phase.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    phases: Vec<f64>,
    rates: Vec<f64>,
}

impl RateCurve {
    /// Phases must be sorted ascending and match the rates in length.
    pub fn new(phases: Vec<f64>, rates: Vec<f64>) -> Result<Self, InterferometerError> {
        if phases.len() != rates.len() {
            return Err(InterferometerError::LengthMismatch {
                phases: phases.len(),
                rates: rates.len(),
            });
        }
        if phases.windows(2).any(|w| w[0] > w[1]) {
            return Err(InterferometerError::Unsorted);
        }
        Ok(Self { phases, rates })
    }

    /// Samples `rate(phi)` at `samples` points spaced uniformly over
    /// [0, 2pi], both endpoints included.
    pub fn from_scan<F: FnMut(f64) -> f64>(samples: usize, mut rate: F) -> Self {
        assert!(samples >= 2, "a scan needs at least two samples");
        let phases: Vec<f64> = (0..samples)
            .map(|k| TAU * k as f64 / (samples - 1) as f64)
            .collect();
        let rates = phases.iter().map(|&p| rate(p)).collect();
        Self { phases, rates }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }
}

/// Minimum number of samples accepted by [`visibility_from_scan`].
pub const MIN_SCAN_SAMPLES: usize = 8;

/// Fringe visibility `(Rmax - Rmin) / (Rmax + Rmin)` of a sampled scan.
///
/// The extrema are taken exactly over the samples, so scans of noiseless
/// closed forms should place samples on the extremal phases. The scan must
/// hold at least [`MIN_SCAN_SAMPLES`] points and span a full period
/// (within 1e-9 rad). A scan that is identically zero has visibility zero.
pub fn visibility_from_scan(curve: &RateCurve) -> Result<f64, InterferometerError> {
    if curve.rates.is_empty() {
        return Err(InterferometerError::EmptyScan);
    }
    if curve.rates.len() < MIN_SCAN_SAMPLES {
        return Err(InterferometerError::ScanTooSparse {
            min: MIN_SCAN_SAMPLES,
            got: curve.rates.len(),
        });
    }
    let span = curve.phases.last().unwrap() - curve.phases.first().unwrap();
    if span < TAU - 1e-9 {
        return Err(InterferometerError::ScanSpanTooShort { span_rad: span });
    }
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for &r in &curve.rates {
        max = max.max(r);
        min = min.min(r);
    }
    if max == 0.0 && min == 0.0 {
        return Ok(0.0);
    }
    Ok((max - min) / (max + min))
}
