//! Phase-sensitivity analysis of Gaussian optical networks.
//!
//! States are tracked by their first and second moments: a mean field per
//! mode plus the fluctuation matrices `N_ij = <da_i^dag da_j>` and
//! `M_ij = <da_i da_j>`. Every network element acts as an exact Bogoliubov
//! transformation `a'_i = sum_j A_ij a_j + B_ij a_j^dag`, so Gaussian
//! statistics propagate in closed form through beam splitters, phase
//! shifts, squeezers and displacements.
//!
//! Intensity observables are evaluated by Gaussian moment factorization:
//! fourth moments reduce to products of the tracked second moments and
//! means, giving exact detection means and variances. The minimum
//! detectable phase follows from error propagation,
//! `dphi_min = dM / |d<M>/dphi|`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetrologyError {
    #[error("mode {mode} is out of range for a state with {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("operation needs two distinct modes, got {mode} twice")]
    DuplicateModes { mode: usize },
    #[error("squeezing parameter {0} must be non-negative")]
    NegativeSqueezing(f64),
    #[error("mean photon number {0} must be positive")]
    NonPositivePhotonNumber(f64),
    #[error("moment matrices must be finite")]
    NonFinite,
    #[error("number matrix must be Hermitian")]
    NotHermitian,
    #[error("pair matrix must be symmetric")]
    NotSymmetric,
    #[error("number matrix must be positive semidefinite")]
    NotPositiveSemidefinite,
    #[error(
        "observable slope {slope:e} is below the threshold {threshold:e}; the phase is not resolvable at this working point"
    )]
    VanishingSlope { slope: f64, threshold: f64 },
}

/// Gaussian state of an n-mode field, tracked by its first and second
/// moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    mean: Array1<Complex64>,
    number: Array2<Complex64>,
    pairing: Array2<Complex64>,
}

impl MomentState {
    /// The n-mode vacuum.
    pub fn vacuum(modes: usize) -> Self {
        Self {
            mean: Array1::zeros(modes),
            number: Array2::zeros((modes, modes)),
            pairing: Array2::zeros((modes, modes)),
        }
    }

    /// A product of coherent states with the given amplitudes.
    pub fn coherent(amplitudes: &[Complex64]) -> Self {
        let mut state = Self::vacuum(amplitudes.len());
        for (m, &a) in state.mean.iter_mut().zip(amplitudes) {
            *m = a;
        }
        state
    }

    /// Builds a state from explicit moments, validating physicality: the
    /// number matrix must be Hermitian positive semidefinite and the pair
    /// matrix symmetric.
    pub fn from_parts(
        mean: Array1<Complex64>,
        number: Array2<Complex64>,
        pairing: Array2<Complex64>,
    ) -> Result<Self, MetrologyError> {
        let n = mean.len();
        let finite = mean.iter().chain(number.iter()).chain(pairing.iter());
        if finite
            .into_iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(MetrologyError::NonFinite);
        }
        if number.dim() != (n, n) || pairing.dim() != (n, n) {
            return Err(MetrologyError::ModeOutOfRange { mode: n, modes: n });
        }
        for i in 0..n {
            for j in 0..n {
                if (number[[i, j]] - number[[j, i]].conj()).norm() > 1e-12 {
                    return Err(MetrologyError::NotHermitian);
                }
                if (pairing[[i, j]] - pairing[[j, i]]).norm() > 1e-12 {
                    return Err(MetrologyError::NotSymmetric);
                }
            }
        }
        if !hermitian_psd(&number) {
            return Err(MetrologyError::NotPositiveSemidefinite);
        }
        Ok(Self {
            mean,
            number,
            pairing,
        })
    }

    pub fn modes(&self) -> usize {
        self.mean.len()
    }

    /// Mean field amplitude per mode.
    pub fn mean(&self) -> &Array1<Complex64> {
        &self.mean
    }

    /// Fluctuation number matrix `N_ij = <da_i^dag da_j>`.
    pub fn number(&self) -> &Array2<Complex64> {
        &self.number
    }

    /// Fluctuation pair matrix `M_ij = <da_i da_j>`.
    pub fn pairing(&self) -> &Array2<Complex64> {
        &self.pairing
    }

    /// Mean photon number in one mode.
    pub fn mean_photons(&self, mode: usize) -> Result<f64, MetrologyError> {
        check_mode(mode, self.modes())?;
        Ok(self.number[[mode, mode]].re + self.mean[mode].norm_sqr())
    }

    /// Total mean photon number over all modes.
    pub fn total_photons(&self) -> f64 {
        (0..self.modes())
            .map(|i| self.number[[i, i]].re + self.mean[i].norm_sqr())
            .sum()
    }
}

/// Cholesky-style positive-semidefiniteness test with a tolerance scaled
/// to the matrix.
fn hermitian_psd(m: &Array2<Complex64>) -> bool {
    let n = m.nrows();
    let scale: f64 = (0..n).map(|i| m[[i, i]].re.abs()).fold(1e-30, f64::max);
    let tol = 1e-10 * scale;
    let mut chol = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m[[j, i]];
            for k in 0..j {
                sum -= chol[[i, k]] * chol[[j, k]].conj();
            }
            if i == j {
                if sum.re < -tol {
                    return false;
                }
                chol[[i, i]] = Complex64::new(sum.re.max(0.0).sqrt(), 0.0);
            } else if chol[[j, j]].re > tol.sqrt() {
                chol[[i, j]] = sum / chol[[j, j]];
            } else if sum.norm() > tol.sqrt().max(1e-8 * scale) {
                // A zero pivot with a nonzero off-diagonal entry breaks
                // positive semidefiniteness.
                return false;
            }
        }
    }
    true
}

/// One element of a Gaussian optical network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NetworkOp {
    /// Balanced beam splitter: `a -> (a + i b)/sqrt 2`, `b -> (i a + b)/sqrt 2`.
    BeamSplitter { a: usize, b: usize },
    /// Phase shift `a -> e^{i phi} a`.
    Phase { mode: usize, phi: f64 },
    /// Single-mode squeezer `a -> a cosh r - a^dag e^{i theta} sinh r`.
    Squeeze { mode: usize, r: f64, theta: f64 },
    /// Two-mode squeezer `a -> a cosh r - b^dag e^{i theta} sinh r` and
    /// symmetrically for `b`; models a parametric pair source.
    TwoModeSqueeze {
        a: usize,
        b: usize,
        r: f64,
        theta: f64,
    },
    /// Coherent displacement of one mode by `alpha`.
    Displace { mode: usize, alpha: Complex64 },
}

fn check_mode(mode: usize, modes: usize) -> Result<(), MetrologyError> {
    if mode >= modes {
        return Err(MetrologyError::ModeOutOfRange { mode, modes });
    }
    Ok(())
}

fn check_pair(a: usize, b: usize, modes: usize) -> Result<(), MetrologyError> {
    check_mode(a, modes)?;
    check_mode(b, modes)?;
    if a == b {
        return Err(MetrologyError::DuplicateModes { mode: a });
    }
    Ok(())
}

/// Mode transform of one element: matrices (A, B) of the ladder-operator
/// map plus a displacement vector.
type ModeTransform = (Array2<Complex64>, Array2<Complex64>, Array1<Complex64>);

/// Bogoliubov matrices (A, B) and displacement vector of one element.
fn op_matrices(op: &NetworkOp, modes: usize) -> Result<ModeTransform, MetrologyError> {
    let mut a_mat = Array2::eye(modes);
    let mut b_mat = Array2::zeros((modes, modes));
    let mut shift = Array1::zeros(modes);
    match *op {
        NetworkOp::BeamSplitter { a, b } => {
            check_pair(a, b, modes)?;
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let ih = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
            a_mat[[a, a]] = h;
            a_mat[[a, b]] = ih;
            a_mat[[b, a]] = ih;
            a_mat[[b, b]] = h;
        }
        NetworkOp::Phase { mode, phi } => {
            check_mode(mode, modes)?;
            a_mat[[mode, mode]] = Complex64::from_polar(1.0, phi);
        }
        NetworkOp::Squeeze { mode, r, theta } => {
            check_mode(mode, modes)?;
            if r < 0.0 {
                return Err(MetrologyError::NegativeSqueezing(r));
            }
            a_mat[[mode, mode]] = Complex64::new(r.cosh(), 0.0);
            b_mat[[mode, mode]] = -Complex64::from_polar(r.sinh(), theta);
        }
        NetworkOp::TwoModeSqueeze { a, b, r, theta } => {
            check_pair(a, b, modes)?;
            if r < 0.0 {
                return Err(MetrologyError::NegativeSqueezing(r));
            }
            let c = Complex64::new(r.cosh(), 0.0);
            let s = -Complex64::from_polar(r.sinh(), theta);
            a_mat[[a, a]] = c;
            a_mat[[b, b]] = c;
            b_mat[[a, b]] = s;
            b_mat[[b, a]] = s;
        }
        NetworkOp::Displace { mode, alpha } => {
            check_mode(mode, modes)?;
            shift[mode] = alpha;
        }
    }
    Ok((a_mat, b_mat, shift))
}

/// Propagates a Gaussian state through an ordered list of network
/// elements by exact Bogoliubov action on its moments.
pub fn propagate(state: &MomentState, ops: &[NetworkOp]) -> Result<MomentState, MetrologyError> {
    let modes = state.modes();
    let mut mean = state.mean.clone();
    let mut number = state.number.clone();
    let mut pairing = state.pairing.clone();
    for op in ops {
        let (a, b, shift) = op_matrices(op, modes)?;
        let a_conj = a.map(|z| z.conj());
        let b_conj = b.map(|z| z.conj());
        let n_bar = number.map(|z| z.conj());
        let m_bar = pairing.map(|z| z.conj());

        let new_mean = a.dot(&mean) + b.dot(&mean.map(|z| z.conj())) + shift;
        let new_number = a_conj.dot(&number).dot(&a.t())
            + a_conj.dot(&m_bar).dot(&b.t())
            + b_conj.dot(&pairing).dot(&a.t())
            + b_conj.dot(&n_bar.t()).dot(&b.t())
            + b_conj.dot(&b.t());
        let new_pairing = a.dot(&pairing).dot(&a.t())
            + a.dot(&number.t()).dot(&b.t())
            + b.dot(&number).dot(&a.t())
            + b.dot(&m_bar).dot(&b.t())
            + a.dot(&b.t());

        mean = new_mean;
        number = new_number;
        pairing = new_pairing;
    }
    Ok(MomentState {
        mean,
        number,
        pairing,
    })
}

/// Photon-counting observable at the output of a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionScheme {
    /// Photon number in one mode.
    Intensity { mode: usize },
    /// Photon-number difference `N_a - N_b`.
    IntensityDifference { a: usize, b: usize },
    /// Photon-number sum `N_a + N_b`.
    IntensitySum { a: usize, b: usize },
}

/// Mean and standard deviation of a detection observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableStats {
    pub mean: f64,
    pub std: f64,
}

/// Covariance of the photon numbers in two modes of a Gaussian state,
/// from moment factorization of the fourth-order terms.
fn number_covariance(state: &MomentState, i: usize, j: usize) -> f64 {
    let mu_i = state.mean[i];
    let mu_j = state.mean[j];
    let n_ij = state.number[[i, j]];
    let m_ij = state.pairing[[i, j]];
    let mut cov = 2.0 * (n_ij * mu_i * mu_j.conj()).re
        + 2.0 * (m_ij * mu_i.conj() * mu_j.conj()).re
        + n_ij.norm_sqr()
        + m_ij.norm_sqr();
    if i == j {
        cov += mu_i.norm_sqr() + state.number[[i, i]].re;
    }
    cov
}

/// Exact mean and standard deviation of an intensity observable on a
/// Gaussian state.
pub fn observable_stats(
    state: &MomentState,
    det: &DetectionScheme,
) -> Result<ObservableStats, MetrologyError> {
    let modes = state.modes();
    let (mean, var) = match *det {
        DetectionScheme::Intensity { mode } => {
            check_mode(mode, modes)?;
            (
                state.mean_photons(mode)?,
                number_covariance(state, mode, mode),
            )
        }
        DetectionScheme::IntensityDifference { a, b } => {
            check_pair(a, b, modes)?;
            let mean = state.mean_photons(a)? - state.mean_photons(b)?;
            let var = number_covariance(state, a, a) + number_covariance(state, b, b)
                - 2.0 * number_covariance(state, a, b);
            (mean, var)
        }
        DetectionScheme::IntensitySum { a, b } => {
            check_pair(a, b, modes)?;
            let mean = state.mean_photons(a)? + state.mean_photons(b)?;
            let var = number_covariance(state, a, a)
                + number_covariance(state, b, b)
                + 2.0 * number_covariance(state, a, b);
            (mean, var)
        }
    };
    Ok(ObservableStats {
        mean,
        std: var.max(0.0).sqrt(),
    })
}

/// Tuning knobs for the finite-difference slope in [`min_phase_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinPhaseOptions {
    /// Base step of the central difference.
    pub step_rad: f64,
    /// The slope counts as vanishing below `factor * dM`.
    pub slope_threshold_factor: f64,
}

impl Default for MinPhaseOptions {
    fn default() -> Self {
        Self {
            step_rad: 1e-5,
            slope_threshold_factor: 1e-9,
        }
    }
}

/// Minimum detectable phase shift of a phase-parametrized network at the
/// working point `phi0`, with the default derivative options.
///
/// Error propagation gives `dphi_min = dM / |d<M>/dphi|`; the slope is a
/// central finite difference refined once by Richardson extrapolation. A
/// slope below the configured threshold is reported as an error instead
/// of producing a spuriously huge sensitivity.
pub fn min_phase<F>(
    build: F,
    input: &MomentState,
    det: &DetectionScheme,
    phi0: f64,
) -> Result<f64, MetrologyError>
where
    F: Fn(f64) -> Vec<NetworkOp>,
{
    min_phase_with(build, input, det, phi0, &MinPhaseOptions::default())
}

/// [`min_phase`] with explicit derivative options.
pub fn min_phase_with<F>(
    build: F,
    input: &MomentState,
    det: &DetectionScheme,
    phi0: f64,
    options: &MinPhaseOptions,
) -> Result<f64, MetrologyError>
where
    F: Fn(f64) -> Vec<NetworkOp>,
{
    let mean_at = |phi: f64| -> Result<f64, MetrologyError> {
        Ok(observable_stats(&propagate(input, &build(phi))?, det)?.mean)
    };
    let spread = observable_stats(&propagate(input, &build(phi0))?, det)?.std;

    let h = options.step_rad;
    let coarse = (mean_at(phi0 + h)? - mean_at(phi0 - h)?) / (2.0 * h);
    let fine = (mean_at(phi0 + 0.5 * h)? - mean_at(phi0 - 0.5 * h)?) / h;
    let slope = (4.0 * fine - coarse) / 3.0;

    let threshold = options.slope_threshold_factor * spread;
    if slope.abs() <= threshold {
        return Err(MetrologyError::VanishingSlope {
            slope: slope.abs(),
            threshold,
        });
    }
    Ok(spread / slope.abs())
}

/// Shot-noise limit on the minimum detectable phase, `1/sqrt(n)`.
pub fn shot_noise_limit(n_bar: f64) -> Result<f64, MetrologyError> {
    if !(n_bar.is_finite() && n_bar > 0.0) {
        return Err(MetrologyError::NonPositivePhotonNumber(n_bar));
    }
    Ok(1.0 / n_bar.sqrt())
}

/// Heisenberg limit on the minimum detectable phase, `1/n`.
pub fn heisenberg_limit(n_bar: f64) -> Result<f64, MetrologyError> {
    if !(n_bar.is_finite() && n_bar > 0.0) {
        return Err(MetrologyError::NonPositivePhotonNumber(n_bar));
    }
    Ok(1.0 / n_bar)
}

/// Closed-form sensitivity of the squeezed, coherently seeded
/// interferometer with induced coherence:
/// `dphi_min = sqrt(e^{-2r} / (4 (1 + beta^2)))` with gain `r` and seed
/// amplitude `beta`.
pub fn zwm_boosted_sensitivity(r: f64, beta: f64) -> Result<f64, MetrologyError> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(MetrologyError::NegativeSqueezing(r));
    }
    Ok(((-2.0 * r).exp() / (4.0 * (1.0 + beta * beta))).sqrt())
}

/// One grid point of a sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub r: f64,
    pub beta: f64,
    pub delta_phi_min: f64,
    pub shot_noise_ref: f64,
    pub heisenberg_ref: f64,
}

/// Sensitivity of the boosted interferometer over a gain/seed grid, with
/// shot-noise and Heisenberg references at the effective photon number
/// `(1 + beta^2) e^{2r}` of each point.
pub fn sensitivity_sweep(gains: &[f64], seeds: &[f64]) -> Result<Vec<SweepPoint>, MetrologyError> {
    for &r in gains {
        if !(r.is_finite() && r >= 0.0) {
            return Err(MetrologyError::NegativeSqueezing(r));
        }
    }
    for &beta in seeds {
        if !beta.is_finite() {
            return Err(MetrologyError::NonFinite);
        }
    }
    let grid: Vec<(f64, f64)> = gains
        .iter()
        .flat_map(|&r| seeds.iter().map(move |&beta| (r, beta)))
        .collect();
    grid.into_par_iter()
        .map(|(r, beta)| {
            let n_eff = (1.0 + beta * beta) * (2.0 * r).exp();
            Ok(SweepPoint {
                r,
                beta,
                delta_phi_min: zwm_boosted_sensitivity(r, beta)?,
                shot_noise_ref: shot_noise_limit(n_eff)?,
                heisenberg_ref: heisenberg_limit(n_eff)?,
            })
        })
        .collect()
}

/// Elements of the two-crystal induced-coherence interferometer with a
/// phase `phi` on the shared idler: pair gain `r` in each crystal, the
/// two signal modes recombined on a balanced splitter. Modes are
/// (signal 1, signal 2, idler).
pub fn induced_coherence_network(r: f64, phi: f64) -> Vec<NetworkOp> {
    vec![
        NetworkOp::TwoModeSqueeze {
            a: 0,
            b: 2,
            r,
            theta: 0.0,
        },
        NetworkOp::Phase { mode: 2, phi },
        NetworkOp::TwoModeSqueeze {
            a: 1,
            b: 2,
            r,
            theta: 0.0,
        },
        NetworkOp::BeamSplitter { a: 0, b: 1 },
    ]
}
