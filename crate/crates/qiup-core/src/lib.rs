//! Simulation and analytics for quantum imaging and metrology with
//! undetected photons.
//!
//! A photon-pair source emits a signal photon that is detected and an idler
//! photon that probes an object but is never detected. When two such
//! emission paths are made indistinguishable, the detected signal carries an
//! interference pattern whose visibility and phase encode the object's
//! complex transmittance. This crate models that physics at several levels:
//!
//! - [`interferometer`]: closed-form count rates and visibilities for the
//!   canonical two-path arrangements (Mach-Zehnder with an object in one
//!   arm, induced-coherence pair sources, a nonlinear interferometer with
//!   two emissions into common modes, and a two-photon interferometer with
//!   separate signal/idler recombination).
//! - [`fock`]: a brute-force single-pair state-vector simulator used as a
//!   numerical oracle for the closed forms.
//! - [`correlations`]: transverse-momentum and transverse-position
//!   correlation densities of the emitted pair.
//! - [`imaging`]: camera-frame synthesis for momentum-correlation
//!   (far-field) and position-correlation (near-field) imaging, plus
//!   reconstruction (visibility maps, phase stepping, off-axis holography)
//!   and shot noise.
//! - [`design`]: closed-form design figures (edge-spread function, blur,
//!   resolution, field of view, spatial-mode count, axial resolution) and a
//!   three-column comparison report.
//! - [`metrology`]: Gaussian moment propagation through mode networks and
//!   error-propagation phase sensitivity.
//!
//! Count rates are normalized to probability-like units in [0, 1] (the
//! brightest ideal camera-frame value is 2.0: unit baseline plus unit
//! modulation). All quantities are SI.

pub mod correlations;
pub mod design;
pub mod fock;
pub mod grid;
pub mod imaging;
pub mod interferometer;
pub mod io;
pub mod metrology;
pub mod quad;

pub use interferometer::{PhaseSetting, Transmittance};
