//! Single-pair Fock-state oracle.
//!
//! A network is a list of optical elements applied in order to a state
//! holding at most one photon pair. Amplitudes live on pairs of mode
//! labels `(signal, idler)`; single-photon arrangements use a dummy
//! partner mode. The oracle makes no closed-form assumptions, so its
//! predictions serve as an independent check of the analytic count rates
//! in [`crate::interferometer`].
//!
//! Conventions:
//! - a 50/50 beam splitter maps `(a, b)` to `((a + i b)/sqrt 2, (i a + b)/sqrt 2)`;
//! - an object of complex transmittance `T` couples its input to a loss
//!   mode through the unitary `[[T, iR], [iR, conj(T)]]` with
//!   `R = sqrt(1 - |T|^2)`;
//! - sources add pair amplitude; emissions into already-occupied modes
//!   interfere, which lets the same network language express frustrated
//!   emission.
//!
//! States are never renormalized. Detection rates are squared moduli, so
//! they line up with the probabilities produced by the closed forms.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use thiserror::Error;

use crate::interferometer::{PhaseSetting, Transmittance};

#[derive(Debug, Error, PartialEq)]
pub enum FockError {
    #[error("mode label {0:?} declared more than once")]
    DuplicateMode(String),
    #[error("element references undeclared mode {0:?}")]
    UnknownMode(String),
    #[error(
        "source must emit into one signal and one idler mode, got {mode:?} in the wrong register"
    )]
    SourceRegisterMismatch { mode: String },
    #[error("element must couple two modes of the same register, got {a:?} and {b:?}")]
    MixedRegisters { a: String, b: String },
    #[error("element couples mode {0:?} to itself")]
    DegenerateElement(String),
    #[error("source weights carry total emission probability {0}, above one")]
    OverNormalized(f64),
    #[error("object transmittance magnitude {0} is not in [0, 1]")]
    ObjectGain(f64),
    #[error("network parameters must be finite")]
    NonFinite,
}

/// One optical element. Elements act on declared mode labels and are
/// applied in list order.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// Adds pair amplitude `weight` to `(signal, idler)`.
    Source {
        signal: String,
        idler: String,
        weight: Complex64,
    },
    /// 50/50 beam splitter between two modes of the same register.
    BeamSplitter { a: String, b: String },
    /// Multiplies every amplitude occupying `mode` by `exp(i phi)`.
    Phase { mode: String, phi: f64 },
    /// Partially transmitting object: couples `input` to `loss` with
    /// complex transmittance `transmittance`.
    Object {
        input: String,
        loss: String,
        transmittance: Complex64,
    },
}

/// Which register a mode label belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Register {
    Signal,
    Idler,
}

/// A pair-amplitude network: declared modes plus an ordered element list.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub signal_modes: Vec<String>,
    pub idler_modes: Vec<String>,
    pub elements: Vec<Element>,
}

/// Amplitudes of a single photon pair over `(signal mode, idler mode)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    amplitudes: BTreeMap<(String, String), Complex64>,
}

impl PairState {
    /// Amplitude on `(signal, idler)`; zero when unoccupied.
    pub fn amplitude(&self, signal: &str, idler: &str) -> Complex64 {
        self.amplitudes
            .get(&(signal.to_owned(), idler.to_owned()))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Total squared norm. One for networks whose emissions are
    /// orthogonal; it oscillates when emissions interfere.
    pub fn norm(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Click rate of a detector on one signal mode, idler traced out.
    pub fn signal_rate(&self, mode: &str) -> f64 {
        self.amplitudes
            .iter()
            .filter(|((s, _), _)| s == mode)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Click rate of a detector on one idler mode, signal traced out.
    pub fn idler_rate(&self, mode: &str) -> f64 {
        self.amplitudes
            .iter()
            .filter(|((_, i), _)| i == mode)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Joint click rate of one signal and one idler detector.
    pub fn coincidence_rate(&self, signal: &str, idler: &str) -> f64 {
        self.amplitude(signal, idler).norm_sqr()
    }

    /// Occupied keys, useful for inspecting small networks.
    pub fn occupied(&self) -> impl Iterator<Item = (&(String, String), &Complex64)> {
        self.amplitudes.iter()
    }
}

impl Network {
    /// Validates the network and applies every element in order.
    pub fn build_state(&self) -> Result<PairState, FockError> {
        let registry = self.validate()?;
        let mut amplitudes: BTreeMap<(String, String), Complex64> = BTreeMap::new();
        for element in &self.elements {
            match element {
                Element::Source {
                    signal,
                    idler,
                    weight,
                } => {
                    let slot = amplitudes
                        .entry((signal.clone(), idler.clone()))
                        .or_insert(Complex64::new(0.0, 0.0));
                    *slot += weight;
                }
                Element::BeamSplitter { a, b } => {
                    let inv = std::f64::consts::FRAC_1_SQRT_2;
                    let u = [
                        [Complex64::new(inv, 0.0), Complex64::new(0.0, inv)],
                        [Complex64::new(0.0, inv), Complex64::new(inv, 0.0)],
                    ];
                    apply_two_mode(&mut amplitudes, registry[a.as_str()], a, b, u);
                }
                Element::Phase { mode, phi } => {
                    let factor = Complex64::from_polar(1.0, *phi);
                    let register = registry[mode.as_str()];
                    for ((s, i), amp) in amplitudes.iter_mut() {
                        let here = match register {
                            Register::Signal => s == mode,
                            Register::Idler => i == mode,
                        };
                        if here {
                            *amp *= factor;
                        }
                    }
                }
                Element::Object {
                    input,
                    loss,
                    transmittance,
                } => {
                    let t = *transmittance;
                    let r = (1.0 - t.norm_sqr()).max(0.0).sqrt();
                    let u = [
                        [t, Complex64::new(0.0, r)],
                        [Complex64::new(0.0, r), t.conj()],
                    ];
                    apply_two_mode(&mut amplitudes, registry[input.as_str()], input, loss, u);
                }
            }
        }
        Ok(PairState { amplitudes })
    }

    fn validate(&self) -> Result<BTreeMap<&str, Register>, FockError> {
        let mut registry: BTreeMap<&str, Register> = BTreeMap::new();
        for (labels, register) in [
            (&self.signal_modes, Register::Signal),
            (&self.idler_modes, Register::Idler),
        ] {
            for label in labels {
                if registry.insert(label.as_str(), register).is_some() {
                    return Err(FockError::DuplicateMode(label.clone()));
                }
            }
        }

        let lookup = |label: &String| -> Result<Register, FockError> {
            registry
                .get(label.as_str())
                .copied()
                .ok_or_else(|| FockError::UnknownMode(label.clone()))
        };
        let mut emission = 0.0;
        for element in &self.elements {
            match element {
                Element::Source {
                    signal,
                    idler,
                    weight,
                } => {
                    if !weight.re.is_finite() || !weight.im.is_finite() {
                        return Err(FockError::NonFinite);
                    }
                    if lookup(signal)? != Register::Signal {
                        return Err(FockError::SourceRegisterMismatch {
                            mode: signal.clone(),
                        });
                    }
                    if lookup(idler)? != Register::Idler {
                        return Err(FockError::SourceRegisterMismatch {
                            mode: idler.clone(),
                        });
                    }
                    emission += weight.norm_sqr();
                }
                Element::BeamSplitter { a, b } => {
                    check_pair(a, b, lookup(a)?, lookup(b)?)?;
                }
                Element::Phase { mode, phi } => {
                    if !phi.is_finite() {
                        return Err(FockError::NonFinite);
                    }
                    lookup(mode)?;
                }
                Element::Object {
                    input,
                    loss,
                    transmittance,
                } => {
                    if !transmittance.re.is_finite() || !transmittance.im.is_finite() {
                        return Err(FockError::NonFinite);
                    }
                    let mag = transmittance.norm();
                    if mag > 1.0 + 1e-12 {
                        return Err(FockError::ObjectGain(mag));
                    }
                    check_pair(input, loss, lookup(input)?, lookup(loss)?)?;
                }
            }
        }
        // Interfering emissions (as in frustrated double emission) keep the
        // total below one while individual weights stay sub-normalized.
        if emission > 1.0 + 1e-9 {
            return Err(FockError::OverNormalized(emission));
        }
        Ok(registry)
    }
}

fn check_pair(a: &str, b: &str, ra: Register, rb: Register) -> Result<(), FockError> {
    if a == b {
        return Err(FockError::DegenerateElement(a.to_owned()));
    }
    if ra != rb {
        return Err(FockError::MixedRegisters {
            a: a.to_owned(),
            b: b.to_owned(),
        });
    }
    Ok(())
}

/// Applies a 2x2 unitary to modes `(a, b)` of one register, for every
/// partner mode of the other register.
fn apply_two_mode(
    amplitudes: &mut BTreeMap<(String, String), Complex64>,
    register: Register,
    a: &str,
    b: &str,
    u: [[Complex64; 2]; 2],
) {
    let partners: BTreeSet<String> = amplitudes
        .keys()
        .map(|(s, i)| match register {
            Register::Signal => i.clone(),
            Register::Idler => s.clone(),
        })
        .collect();
    let key = |label: &str, partner: &str| -> (String, String) {
        match register {
            Register::Signal => (label.to_owned(), partner.to_owned()),
            Register::Idler => (partner.to_owned(), label.to_owned()),
        }
    };
    for partner in partners {
        let key_a = key(a, &partner);
        let key_b = key(b, &partner);
        let va = amplitudes
            .get(&key_a)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0));
        let vb = amplitudes
            .get(&key_b)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0));
        amplitudes.insert(key_a, u[0][0] * va + u[0][1] * vb);
        amplitudes.insert(key_b, u[1][0] * va + u[1][1] * vb);
    }
}

/// Output ports of the single-photon Mach-Zehnder network.
#[derive(Debug, Clone, PartialEq)]
pub struct MzPortMap {
    pub port_a: String,
    pub port_b: String,
}

/// Ports of the induced-coherence network.
#[derive(Debug, Clone, PartialEq)]
pub struct ZwmPortMap {
    pub signal_1: String,
    pub signal_2: String,
    pub idler: String,
}

/// Ports of the double-emission nonlinear interferometer network.
#[derive(Debug, Clone, PartialEq)]
pub struct Su11PortMap {
    pub signal: String,
    pub idler: String,
}

/// Ports of the two-photon interferometer network.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticlePortMap {
    pub signal_1: String,
    pub signal_2: String,
    pub idler_1: String,
    pub idler_2: String,
}

/// Mach-Zehnder with the object in the first arm and the phase shifter in
/// the second. The photon travels in the signal register next to an inert
/// dummy idler; its rates match [`crate::interferometer::mz_count_rate`].
pub fn mz_network(t: &Transmittance, phi: PhaseSetting) -> (Network, MzPortMap) {
    let network = Network {
        signal_modes: vec!["arm_1".into(), "arm_2".into(), "absorbed".into()],
        idler_modes: vec!["dummy".into()],
        elements: vec![
            Element::Source {
                signal: "arm_2".into(),
                idler: "dummy".into(),
                weight: Complex64::new(1.0, 0.0),
            },
            Element::BeamSplitter {
                a: "arm_1".into(),
                b: "arm_2".into(),
            },
            Element::Object {
                input: "arm_1".into(),
                loss: "absorbed".into(),
                transmittance: t.as_complex(),
            },
            Element::Phase {
                mode: "arm_2".into(),
                phi: phi.radians(),
            },
            Element::BeamSplitter {
                a: "arm_1".into(),
                b: "arm_2".into(),
            },
        ],
    };
    (
        network,
        MzPortMap {
            port_a: "arm_1".into(),
            port_b: "arm_2".into(),
        },
    )
}

/// Induced-coherence arrangement: two sources share one idler mode, and
/// only the first emission traverses the object before the second source
/// can emit into the same beam. The pump phase of the second source is
/// chosen so the rates match [`crate::interferometer::zwm_count_rate`]
/// under this beam-splitter convention.
pub fn zwm_network(t: &Transmittance, phi: PhaseSetting) -> (Network, ZwmPortMap) {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let network = Network {
        signal_modes: vec!["signal_1".into(), "signal_2".into()],
        idler_modes: vec!["idler".into(), "absorbed".into()],
        elements: vec![
            Element::Source {
                signal: "signal_1".into(),
                idler: "idler".into(),
                weight: Complex64::new(inv, 0.0),
            },
            Element::Object {
                input: "idler".into(),
                loss: "absorbed".into(),
                transmittance: t.as_complex(),
            },
            Element::Source {
                signal: "signal_2".into(),
                idler: "idler".into(),
                weight: Complex64::from_polar(inv, -(phi.radians() + std::f64::consts::FRAC_PI_2)),
            },
            Element::BeamSplitter {
                a: "signal_1".into(),
                b: "signal_2".into(),
            },
        ],
    };
    (
        network,
        ZwmPortMap {
            signal_1: "signal_1".into(),
            signal_2: "signal_2".into(),
            idler: "idler".into(),
        },
    )
}

/// Double emission of a single source into common signal and idler modes,
/// with the object and the pump phase between the two passes. The two
/// emission amplitudes interfere directly, so the state norm itself
/// oscillates; rates match [`crate::interferometer::su11_count_rate`].
pub fn su11_network(t: &Transmittance, phi: PhaseSetting) -> (Network, Su11PortMap) {
    let network = Network {
        signal_modes: vec!["signal".into()],
        idler_modes: vec!["idler".into(), "absorbed".into()],
        elements: vec![
            Element::Source {
                signal: "signal".into(),
                idler: "idler".into(),
                weight: Complex64::new(0.5, 0.0),
            },
            Element::Object {
                input: "idler".into(),
                loss: "absorbed".into(),
                transmittance: t.as_complex(),
            },
            Element::Source {
                signal: "signal".into(),
                idler: "idler".into(),
                weight: Complex64::from_polar(0.5, -phi.radians()),
            },
        ],
    };
    (
        network,
        Su11PortMap {
            signal: "signal".into(),
            idler: "idler".into(),
        },
    )
}

/// Two-photon interferometer: separate beam splitters recombine the signal
/// pair and the idler pair, with the object on the first idler path. The
/// singles stay flat while coincidences carry the fringe, matching
/// [`crate::interferometer::two_particle_rates`].
pub fn two_particle_network(t: &Transmittance, phi: PhaseSetting) -> (Network, TwoParticlePortMap) {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let network = Network {
        signal_modes: vec!["signal_1".into(), "signal_2".into()],
        idler_modes: vec!["idler_1".into(), "idler_2".into(), "absorbed".into()],
        elements: vec![
            Element::Source {
                signal: "signal_1".into(),
                idler: "idler_1".into(),
                weight: Complex64::new(inv, 0.0),
            },
            Element::Object {
                input: "idler_1".into(),
                loss: "absorbed".into(),
                transmittance: t.as_complex(),
            },
            Element::Source {
                signal: "signal_2".into(),
                idler: "idler_2".into(),
                weight: Complex64::from_polar(inv, -phi.radians()),
            },
            Element::BeamSplitter {
                a: "idler_1".into(),
                b: "idler_2".into(),
            },
            Element::BeamSplitter {
                a: "signal_1".into(),
                b: "signal_2".into(),
            },
        ],
    };
    (
        network,
        TwoParticlePortMap {
            signal_1: "signal_1".into(),
            signal_2: "signal_2".into(),
            idler_1: "idler_1".into(),
            idler_2: "idler_2".into(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::{
        mz_count_rate, su11_count_rate, two_particle_rates, visibility_from_scan, zwm_count_rate,
        MzPort, RateCurve, ZwmPort,
    };
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn t(m: f64, g: f64) -> Transmittance {
        Transmittance::new(m, g).unwrap()
    }

    fn param_grid() -> Vec<(f64, f64, f64)> {
        let mut grid = Vec::new();
        for &m in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            for &g in &[0.0, 1.0, PI, 4.0] {
                for k in 0..12 {
                    grid.push((m, g, TAU * k as f64 / 12.0));
                }
            }
        }
        grid
    }

    #[test]
    fn mz_oracle_matches_closed_form() {
        for (m, g, phi) in param_grid() {
            let tr = t(m, g);
            let phase = PhaseSetting::new(phi);
            let (network, ports) = mz_network(&tr, phase);
            let state = network.build_state().unwrap();
            assert_abs_diff_eq!(
                state.signal_rate(&ports.port_a),
                mz_count_rate(&tr, phase, MzPort::A),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                state.signal_rate(&ports.port_b),
                mz_count_rate(&tr, phase, MzPort::B),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zwm_oracle_matches_closed_form() {
        for (m, g, phi) in param_grid() {
            let tr = t(m, g);
            let phase = PhaseSetting::new(phi);
            let (network, ports) = zwm_network(&tr, phase);
            let state = network.build_state().unwrap();
            assert_abs_diff_eq!(
                state.signal_rate(&ports.signal_1),
                zwm_count_rate(&tr, phase, ZwmPort::S1),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                state.signal_rate(&ports.signal_2),
                zwm_count_rate(&tr, phase, ZwmPort::S2),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn su11_oracle_matches_closed_form() {
        for (m, g, phi) in param_grid() {
            let tr = t(m, g);
            let phase = PhaseSetting::new(phi);
            let (network, ports) = su11_network(&tr, phase);
            let state = network.build_state().unwrap();
            let rate = su11_count_rate(&tr, phase);
            assert_abs_diff_eq!(state.signal_rate(&ports.signal), rate, epsilon = 1e-12);
            // The emission probability itself oscillates, so the norm
            // equals the rate and stays within [0, 1].
            assert_abs_diff_eq!(state.norm(), rate, epsilon = 1e-12);
            assert!((-1e-12..=1.0 + 1e-12).contains(&state.norm()));
        }
    }

    #[test]
    fn two_particle_oracle_matches_closed_form() {
        for (m, g, phi) in param_grid() {
            let tr = t(m, g);
            let phase = PhaseSetting::new(phi);
            let (network, ports) = two_particle_network(&tr, phase);
            let state = network.build_state().unwrap();
            let expected = two_particle_rates(&tr, phase);
            assert_abs_diff_eq!(
                state.signal_rate(&ports.signal_1),
                expected.singles,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                state.signal_rate(&ports.signal_2),
                expected.singles,
                epsilon = 1e-12
            );
            // Direct coincidence rate between the first signal and first
            // idler detectors.
            let coincidence = state.coincidence_rate(&ports.signal_1, &ports.idler_1);
            let direct = (1.0 + m * m - 2.0 * m * (phi + g).cos()) / 8.0;
            assert_abs_diff_eq!(coincidence, direct, epsilon = 1e-12);
            assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_particle_coincidence_visibility_from_scan() {
        for &m in &[0.0, 0.3, 0.5, 1.0] {
            let tr = t(m, 0.0);
            let curve = RateCurve::from_scan(33, |phi| {
                let (network, ports) = two_particle_network(&tr, PhaseSetting::new(phi));
                let state = network.build_state().unwrap();
                state.coincidence_rate(&ports.signal_1, &ports.idler_1)
            });
            let vis = visibility_from_scan(&curve).unwrap();
            let expected = two_particle_rates(&tr, PhaseSetting::new(0.0)).coincidence_visibility;
            assert_abs_diff_eq!(vis, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn frozen_spot_checks() {
        let phase0 = PhaseSetting::new(0.0);
        let (network, ports) = mz_network(&t(0.5, 0.0), phase0);
        let state = network.build_state().unwrap();
        assert_abs_diff_eq!(state.signal_rate(&ports.port_a), 0.5625, epsilon = 1e-12);

        let (network, ports) = zwm_network(&t(0.5, 0.0), phase0);
        let state = network.build_state().unwrap();
        assert_abs_diff_eq!(state.signal_rate(&ports.signal_1), 0.75, epsilon = 1e-12);

        let (network, ports) = su11_network(&t(1.0, 0.0), PhaseSetting::new(PI));
        let state = network.build_state().unwrap();
        assert_abs_diff_eq!(state.signal_rate(&ports.signal), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn beam_splitter_is_balanced_and_unitary() {
        let network = Network {
            signal_modes: vec!["a".into(), "b".into()],
            idler_modes: vec!["d".into()],
            elements: vec![
                Element::Source {
                    signal: "a".into(),
                    idler: "d".into(),
                    weight: Complex64::new(1.0, 0.0),
                },
                Element::BeamSplitter {
                    a: "a".into(),
                    b: "b".into(),
                },
            ],
        };
        let state = network.build_state().unwrap();
        assert_abs_diff_eq!(state.signal_rate("a"), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(state.signal_rate("b"), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-15);
        // Reflected amplitude picks up i relative to transmitted.
        let ratio = state.amplitude("b", "d") / state.amplitude("a", "d");
        assert_abs_diff_eq!(ratio.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ratio.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn object_splits_between_output_and_loss() {
        let tr = t(0.6, 0.3);
        let network = Network {
            signal_modes: vec!["s".into()],
            idler_modes: vec!["i".into(), "loss".into()],
            elements: vec![
                Element::Source {
                    signal: "s".into(),
                    idler: "i".into(),
                    weight: Complex64::new(1.0, 0.0),
                },
                Element::Object {
                    input: "i".into(),
                    loss: "loss".into(),
                    transmittance: tr.as_complex(),
                },
            ],
        };
        let state = network.build_state().unwrap();
        assert_abs_diff_eq!(state.idler_rate("i"), 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(state.idler_rate("loss"), 0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-15);
        let out = state.amplitude("s", "i");
        assert_abs_diff_eq!(out.arg(), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn phase_element_shifts_without_changing_rates() {
        let network = Network {
            signal_modes: vec!["s".into()],
            idler_modes: vec!["i".into()],
            elements: vec![
                Element::Source {
                    signal: "s".into(),
                    idler: "i".into(),
                    weight: Complex64::new(1.0, 0.0),
                },
                Element::Phase {
                    mode: "i".into(),
                    phi: 1.2,
                },
            ],
        };
        let state = network.build_state().unwrap();
        assert_abs_diff_eq!(state.signal_rate("s"), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(state.amplitude("s", "i").arg(), 1.2, epsilon = 1e-15);
    }

    #[test]
    fn validation_rejects_malformed_networks() {
        let dup = Network {
            signal_modes: vec!["x".into()],
            idler_modes: vec!["x".into()],
            elements: vec![],
        };
        assert_eq!(dup.build_state(), Err(FockError::DuplicateMode("x".into())));

        let unknown = Network {
            signal_modes: vec!["s".into()],
            idler_modes: vec!["i".into()],
            elements: vec![Element::Phase {
                mode: "ghost".into(),
                phi: 0.0,
            }],
        };
        assert_eq!(
            unknown.build_state(),
            Err(FockError::UnknownMode("ghost".into()))
        );

        let swapped = Network {
            signal_modes: vec!["s".into()],
            idler_modes: vec!["i".into()],
            elements: vec![Element::Source {
                signal: "i".into(),
                idler: "s".into(),
                weight: Complex64::new(1.0, 0.0),
            }],
        };
        assert_eq!(
            swapped.build_state(),
            Err(FockError::SourceRegisterMismatch { mode: "i".into() })
        );

        let mixed = Network {
            signal_modes: vec!["s".into()],
            idler_modes: vec!["i".into()],
            elements: vec![Element::BeamSplitter {
                a: "s".into(),
                b: "i".into(),
            }],
        };
        assert_eq!(
            mixed.build_state(),
            Err(FockError::MixedRegisters {
                a: "s".into(),
                b: "i".into()
            })
        );

        let degenerate = Network {
            signal_modes: vec!["s".into(), "s2".into()],
            idler_modes: vec!["i".into()],
            elements: vec![Element::BeamSplitter {
                a: "s".into(),
                b: "s".into(),
            }],
        };
        assert_eq!(
            degenerate.build_state(),
            Err(FockError::DegenerateElement("s".into()))
        );

        let heavy = Network {
            signal_modes: vec!["s".into()],
            idler_modes: vec!["i".into()],
            elements: vec![
                Element::Source {
                    signal: "s".into(),
                    idler: "i".into(),
                    weight: Complex64::new(1.0, 0.0),
                },
                Element::Source {
                    signal: "s".into(),
                    idler: "i".into(),
                    weight: Complex64::new(0.5, 0.0),
                },
            ],
        };
        assert!(matches!(
            heavy.build_state(),
            Err(FockError::OverNormalized(_))
        ));

        let gain = Network {
            signal_modes: vec!["s".into()],
            idler_modes: vec!["i".into(), "loss".into()],
            elements: vec![Element::Object {
                input: "i".into(),
                loss: "loss".into(),
                transmittance: Complex64::new(1.5, 0.0),
            }],
        };
        assert!(matches!(gain.build_state(), Err(FockError::ObjectGain(_))));
    }

    proptest! {
        #[test]
        fn oracle_agrees_with_closed_forms(
            m in 0.0..=1.0f64,
            g in 0.0..TAU,
            phi in 0.0..TAU,
        ) {
            let tr = t(m, g);
            let phase = PhaseSetting::new(phi);

            let (network, ports) = mz_network(&tr, phase);
            let state = network.build_state().unwrap();
            prop_assert!(
                (state.signal_rate(&ports.port_a) - mz_count_rate(&tr, phase, MzPort::A)).abs()
                    < 1e-12
            );

            let (network, ports) = zwm_network(&tr, phase);
            let state = network.build_state().unwrap();
            prop_assert!(
                (state.signal_rate(&ports.signal_1) - zwm_count_rate(&tr, phase, ZwmPort::S1)).abs()
                    < 1e-12
            );

            let (network, ports) = su11_network(&tr, phase);
            let state = network.build_state().unwrap();
            prop_assert!(
                (state.signal_rate(&ports.signal) - su11_count_rate(&tr, phase)).abs() < 1e-12
            );

            let (network, ports) = two_particle_network(&tr, phase);
            let state = network.build_state().unwrap();
            prop_assert!((state.signal_rate(&ports.signal_1) - 0.5).abs() < 1e-12);
            prop_assert!((state.norm() - 1.0).abs() < 1e-12);
        }
    }
}
