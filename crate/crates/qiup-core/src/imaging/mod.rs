//! Camera-frame synthesis and image reconstruction for imaging with
//! undetected photons.
//!
//! Two optical configurations are modeled:
//!
//! - momentum correlation (far field): object and camera sit in Fourier
//!   planes of the source; a camera pixel selects one signal momentum and
//!   the anti-correlated idler momentum probes one object point, blurred
//!   by the finite pump waist. Magnification is `f_c lambda_s / (f_I lambda_I)`.
//! - position correlation (near field): object and camera sit in image
//!   planes of the source; a camera pixel maps to one object point through
//!   the two imaging systems, blurred by the finite position correlation of
//!   the pair. Magnification is `M_s / M_I`, independent of wavelength.
//!
//! An ideal (delta-correlated) variant of each synthesis gives the
//! zero-blur reference frame. Reconstruction routines (visibility map,
//! image function, phase stepping, off-axis holography) and a shot-noise
//! model operate on the resulting frame stacks.
//!
//! Conventions: frames are `1 + |T| cos(phi_in - arg T)` after blurring,
//! so an empty object at zero phase gives the value 2.0. Images are erect
//! (positive magnification maps object point `p` to camera point `M p`);
//! the object is opaque outside its grid, so pixels within a kernel width
//! of the grid border see a partially dark surround.

mod noise;
mod recon;
mod synth;

pub use noise::add_shot_noise;
pub use recon::{
    image_function, off_axis_holography, phase_stepping, visibility_map,
    HOLOGRAPHY_MIN_CARRIER_BINS,
};
pub use synth::{
    simulate_frame_mc, simulate_frame_mc_ideal, simulate_frame_mc_ideal_tilted,
    simulate_frame_mc_separable, simulate_frame_pc, simulate_frame_pc_ideal,
};

use ndarray::Array2;
use thiserror::Error;

use crate::correlations::{
    CrystalModel, GaussianPumpModel, TransverseMomentum, TransversePosition,
};

#[derive(Debug, Error, PartialEq)]
pub enum ImagingError {
    #[error("geometry parameter {name} = {value} must be positive and finite")]
    BadGeometryParameter { name: &'static str, value: f64 },
    #[error("magnification {name} = {value} must be nonzero and finite")]
    BadMagnification { name: &'static str, value: f64 },
    #[error(
        "object pitch {pitch_m} m is too coarse: four pixels must fit in the blur width {width_m} m"
    )]
    SamplingTooCoarse { pitch_m: f64, width_m: f64 },
    #[error("phase map shape ({got_rows}, {got_cols}) does not match the object ({rows}, {cols})")]
    PhaseMapShape {
        rows: usize,
        cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("phase map values must be finite")]
    PhaseMapNonFinite,
    #[error("operation needs at least {min} frames, got {got}")]
    TooFewFrames { min: usize, got: usize },
    #[error("frames disagree in {what}")]
    FrameMismatch { what: &'static str },
    #[error("phase scan leaves a gap of {gap_rad} rad, larger than {max_rad} rad")]
    PhaseGapTooLarge { gap_rad: f64, max_rad: f64 },
    #[error("frame phases are not uniform steps of 2 pi / {expected_count}")]
    UnevenPhaseSteps { expected_count: usize },
    #[error(
        "carrier magnitude {carrier_rad_per_m} rad/m is below the minimum {min_rad_per_m} (object band would overlap the sideband)"
    )]
    CarrierTooSmall {
        carrier_rad_per_m: f64,
        min_rad_per_m: f64,
    },
    #[error(
        "carrier magnitude {carrier_rad_per_m} rad/m exceeds half the Nyquist frequency {max_rad_per_m}"
    )]
    CarrierTooLarge {
        carrier_rad_per_m: f64,
        max_rad_per_m: f64,
    },
    #[error("mean counts per pixel must be positive and finite, got {0}")]
    BadMeanCounts(f64),
    #[error("frame intensities must be non-negative for shot noise")]
    NegativeIntensity,
    #[error("beam spread {0} must be positive and finite")]
    BadBeamSpread(f64),
}

/// Far-field (momentum-correlation) imaging geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryMc {
    f_idler: f64,
    f_camera: f64,
    lambda_signal: f64,
    lambda_idler: f64,
    pump: GaussianPumpModel,
    phi_in: f64,
}

impl GeometryMc {
    /// `f_idler` images the idler onto the object, `f_camera` images the
    /// signal onto the camera; wavelengths are in vacuum.
    pub fn new(
        f_idler_m: f64,
        f_camera_m: f64,
        lambda_signal_m: f64,
        lambda_idler_m: f64,
        pump: GaussianPumpModel,
        phi_in_rad: f64,
    ) -> Result<Self, ImagingError> {
        for (name, value) in [
            ("f_idler", f_idler_m),
            ("f_camera", f_camera_m),
            ("lambda_signal", lambda_signal_m),
            ("lambda_idler", lambda_idler_m),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ImagingError::BadGeometryParameter { name, value });
            }
        }
        if !phi_in_rad.is_finite() {
            return Err(ImagingError::BadGeometryParameter {
                name: "phi_in",
                value: phi_in_rad,
            });
        }
        Ok(Self {
            f_idler: f_idler_m,
            f_camera: f_camera_m,
            lambda_signal: lambda_signal_m,
            lambda_idler: lambda_idler_m,
            pump,
            phi_in: phi_in_rad,
        })
    }

    /// Same geometry at a different interferometric phase.
    pub fn with_phase(&self, phi_in_rad: f64) -> Self {
        let mut g = self.clone();
        g.phi_in = phi_in_rad;
        g
    }

    pub fn f_idler(&self) -> f64 {
        self.f_idler
    }

    pub fn f_camera(&self) -> f64 {
        self.f_camera
    }

    pub fn lambda_signal(&self) -> f64 {
        self.lambda_signal
    }

    pub fn lambda_idler(&self) -> f64 {
        self.lambda_idler
    }

    pub fn pump(&self) -> &GaussianPumpModel {
        &self.pump
    }

    pub fn phi_in(&self) -> f64 {
        self.phi_in
    }

    /// Image magnification `f_c lambda_s / (f_I lambda_I)`.
    pub fn magnification(&self) -> f64 {
        self.f_camera * self.lambda_signal / (self.f_idler * self.lambda_idler)
    }

    /// Standard deviation of the Gaussian blur kernel in the object plane:
    /// `f_I lambda_I / (2 pi w_p)`.
    pub fn object_blur_std(&self) -> f64 {
        self.f_idler * self.lambda_idler / (std::f64::consts::TAU * self.pump.waist())
    }

    /// The object-plane blur width `f_I lambda_I / (sqrt 2 pi w_p)`, the
    /// e^-1 half-width of the kernel (sqrt 2 times the standard deviation).
    pub fn object_blur_width(&self) -> f64 {
        2.0f64.sqrt() * self.object_blur_std()
    }
}

/// Plane selector for the far-field momentum-to-position maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McPlane {
    /// Object plane, reached by the idler through the `f_I` lens.
    Object,
    /// Camera plane, reached by the signal through the `f_c` lens.
    Camera,
}

/// Far-field map from transverse momentum to position:
/// `rho = lambda f q / (2 pi)` with `(lambda_I, f_I)` for the object plane
/// and `(lambda_s, f_c)` for the camera plane.
pub fn map_momentum_mc(
    q: TransverseMomentum,
    g: &GeometryMc,
    plane: McPlane,
) -> TransversePosition {
    let scale = match plane {
        McPlane::Object => g.lambda_idler * g.f_idler,
        McPlane::Camera => g.lambda_signal * g.f_camera,
    } / std::f64::consts::TAU;
    TransversePosition {
        x: scale * q.qx,
        y: scale * q.qy,
    }
}

/// Near-field (position-correlation) imaging geometry.
///
/// `m_s` images the source onto the camera through the signal arm, `m_i`
/// images it onto the object through the idler arm. Optional phase maps
/// model propagation phases: `signal_phase` is sampled on the camera grid,
/// `idler_phase_in` on the object grid, and `idler_phase_out` is the
/// post-object idler phase, pre-evaluated per object pixel (its natural
/// argument is the back-projected source point of that pixel).
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryPc {
    m_signal: f64,
    m_idler: f64,
    crystal: CrystalModel,
    phi_in: f64,
    signal_phase: Option<Array2<f64>>,
    idler_phase_in: Option<Array2<f64>>,
    idler_phase_out: Option<Array2<f64>>,
}

impl GeometryPc {
    pub fn new(
        m_signal: f64,
        m_idler: f64,
        crystal: CrystalModel,
        phi_in_rad: f64,
    ) -> Result<Self, ImagingError> {
        for (name, value) in [("m_signal", m_signal), ("m_idler", m_idler)] {
            if !(value.is_finite() && value != 0.0) {
                return Err(ImagingError::BadMagnification { name, value });
            }
        }
        if !phi_in_rad.is_finite() {
            return Err(ImagingError::BadGeometryParameter {
                name: "phi_in",
                value: phi_in_rad,
            });
        }
        Ok(Self {
            m_signal,
            m_idler,
            crystal,
            phi_in: phi_in_rad,
            signal_phase: None,
            idler_phase_in: None,
            idler_phase_out: None,
        })
    }

    /// Same geometry at a different interferometric phase.
    pub fn with_phase(&self, phi_in_rad: f64) -> Self {
        let mut g = self.clone();
        g.phi_in = phi_in_rad;
        g
    }

    /// Adds a signal propagation phase, sampled on the camera grid.
    pub fn with_signal_phase(mut self, map: Array2<f64>) -> Result<Self, ImagingError> {
        validate_phase_map(&map)?;
        self.signal_phase = Some(map);
        Ok(self)
    }

    /// Adds an idler phase accumulated before the object, sampled on the
    /// object grid.
    pub fn with_idler_phase_in(mut self, map: Array2<f64>) -> Result<Self, ImagingError> {
        validate_phase_map(&map)?;
        self.idler_phase_in = Some(map);
        Ok(self)
    }

    /// Adds an idler phase accumulated after the object, pre-sampled per
    /// object pixel.
    pub fn with_idler_phase_out(mut self, map: Array2<f64>) -> Result<Self, ImagingError> {
        validate_phase_map(&map)?;
        self.idler_phase_out = Some(map);
        Ok(self)
    }

    pub fn m_signal(&self) -> f64 {
        self.m_signal
    }

    pub fn m_idler(&self) -> f64 {
        self.m_idler
    }

    pub fn crystal(&self) -> &CrystalModel {
        &self.crystal
    }

    pub fn phi_in(&self) -> f64 {
        self.phi_in
    }

    pub fn signal_phase(&self) -> Option<&Array2<f64>> {
        self.signal_phase.as_ref()
    }

    pub fn idler_phase_in(&self) -> Option<&Array2<f64>> {
        self.idler_phase_in.as_ref()
    }

    pub fn idler_phase_out(&self) -> Option<&Array2<f64>> {
        self.idler_phase_out.as_ref()
    }

    /// Signed image magnification `M_s / M_I`.
    pub fn magnification(&self) -> f64 {
        self.m_signal / self.m_idler
    }

    /// Per-axis standard deviation of the position-correlation kernel in
    /// the back-projected source plane.
    pub fn correlation_std(&self) -> f64 {
        self.crystal.position_correlation_std()
    }
}

fn validate_phase_map(map: &Array2<f64>) -> Result<(), ImagingError> {
    if map.iter().any(|v| !v.is_finite()) {
        return Err(ImagingError::PhaseMapNonFinite);
    }
    Ok(())
}
