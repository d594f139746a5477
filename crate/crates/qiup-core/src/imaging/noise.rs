//! Photon shot noise for synthesized camera frames.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::grid::CameraFrame;

use super::ImagingError;

/// Brightest value an ideal frame can take; `mean_counts` is calibrated
/// against it.
const FRAME_SCALE: f64 = 2.0;

/// Replaces each pixel by a Poisson draw of the photon count it would
/// collect, rescaled back to frame units.
///
/// `mean_counts` is the expected count at the brightest ideal frame value
/// 2.0, so a pixel of value `v` draws from mean `v * mean_counts / 2`.
/// The generator is seeded deterministically and pixels are drawn in row
/// major order: the same frame, counts and seed reproduce the same noisy
/// frame bit for bit. Relative fluctuations shrink as `1 / sqrt(counts)`,
/// recovering the noiseless frame in the bright limit.
pub fn add_shot_noise(
    frame: &CameraFrame,
    mean_counts: f64,
    seed: u64,
) -> Result<CameraFrame, ImagingError> {
    if !(mean_counts.is_finite() && mean_counts > 0.0) {
        return Err(ImagingError::BadMeanCounts(mean_counts));
    }
    if frame.data().iter().any(|&v| v < 0.0) {
        return Err(ImagingError::NegativeIntensity);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = mean_counts / FRAME_SCALE;
    let mut data = Array2::zeros(frame.data().dim());
    for (out, &v) in data.iter_mut().zip(frame.data().iter()) {
        let lambda = v * scale;
        let counts = if lambda > 0.0 {
            let poisson =
                Poisson::new(lambda).expect("positive finite mean is a valid Poisson parameter");
            poisson.sample(&mut rng)
        } else {
            0.0
        };
        *out = counts / scale;
    }
    Ok(CameraFrame::new(data, frame.pitch(), frame.phase()).expect("rescaled counts are finite"))
}
