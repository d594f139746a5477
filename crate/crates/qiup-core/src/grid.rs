//! Pixel grids for objects and camera frames.
//!
//! Both objects and frames live on uniform grids indexed `[row, col]`
//! (row = y, col = x). A grid of `n` pixels with pitch `p` puts pixel `i`
//! at coordinate `(i - (n - 1)/2) * p`, so every grid is centered on the
//! origin; odd sizes have a pixel exactly at zero, even sizes straddle it.

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("pixel pitch {0} must be positive and finite")]
    BadPitch(f64),
    #[error("map must contain at least one pixel")]
    Empty,
    #[error("map values must be finite")]
    NonFinite,
    #[error("transmittance magnitude {magnitude} at pixel ({row}, {col}) exceeds one")]
    MagnitudeOutOfRange {
        row: usize,
        col: usize,
        magnitude: f64,
    },
    #[error("feature of extent {feature_m} m does not fit in a grid of extent {grid_m} m")]
    FeatureOutsideGrid { feature_m: f64, grid_m: f64 },
}

/// Coordinate of pixel `index` on a centered grid of `len` pixels.
pub fn centered_coordinate(index: usize, len: usize, pitch: f64) -> f64 {
    (index as f64 - (len as f64 - 1.0) / 2.0) * pitch
}

/// Coordinates of every pixel along one axis.
pub fn axis_coordinates(len: usize, pitch: f64) -> Vec<f64> {
    (0..len)
        .map(|i| centered_coordinate(i, len, pitch))
        .collect()
}

/// Complex transmittance map of an object, sampled on a centered grid.
///
/// Magnitudes may not exceed one; the map is zero outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectMap {
    data: Array2<Complex64>,
    pitch: f64,
}

impl ObjectMap {
    pub fn new(data: Array2<Complex64>, pitch: f64) -> Result<Self, GridError> {
        if !(pitch.is_finite() && pitch > 0.0) {
            return Err(GridError::BadPitch(pitch));
        }
        if data.is_empty() {
            return Err(GridError::Empty);
        }
        for ((row, col), value) in data.indexed_iter() {
            if !value.re.is_finite() || !value.im.is_finite() {
                return Err(GridError::NonFinite);
            }
            let magnitude = value.norm();
            if magnitude > 1.0 + 1e-9 {
                return Err(GridError::MagnitudeOutOfRange {
                    row,
                    col,
                    magnitude,
                });
            }
        }
        Ok(Self { data, pitch })
    }

    /// Uniform map of one value.
    pub fn uniform(ny: usize, nx: usize, pitch: f64, value: Complex64) -> Result<Self, GridError> {
        Self::new(Array2::from_elem((ny, nx), value), pitch)
    }

    /// Vertical knife edge: fully transmitting for `x < 0`, opaque for
    /// `x >= 0`. On an even-sized grid the edge falls exactly on the
    /// boundary between the two central pixel columns.
    pub fn knife_edge(n: usize, pitch: f64) -> Result<Self, GridError> {
        let mut data = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
        for col in 0..n {
            if centered_coordinate(col, n, pitch) < 0.0 {
                data.column_mut(col).fill(Complex64::new(1.0, 0.0));
            }
        }
        Self::new(data, pitch)
    }

    /// Two single-pixel apertures on the central row, separated by
    /// `separation` along x and centered on the origin. The separation is
    /// rounded to the nearest whole number of pixels.
    pub fn pinhole_pair(n: usize, pitch: f64, separation: f64) -> Result<Self, GridError> {
        if !(separation.is_finite() && separation > 0.0) {
            return Err(GridError::FeatureOutsideGrid {
                feature_m: separation,
                grid_m: n as f64 * pitch,
            });
        }
        let half_pixels = (separation / (2.0 * pitch)).round();
        let center = (n as f64 - 1.0) / 2.0;
        let left = center - half_pixels;
        let right = center + half_pixels;
        if left < 0.0 || right > n as f64 - 1.0 {
            return Err(GridError::FeatureOutsideGrid {
                feature_m: separation,
                grid_m: n as f64 * pitch,
            });
        }
        let mut data = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
        let row = ((n as f64 - 1.0) / 2.0).round() as usize;
        data[[row, left as usize]] = Complex64::new(1.0, 0.0);
        data[[row, right as usize]] = Complex64::new(1.0, 0.0);
        Self::new(data, pitch)
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    /// Rows (y pixels).
    pub fn ny(&self) -> usize {
        self.data.nrows()
    }

    /// Columns (x pixels).
    pub fn nx(&self) -> usize {
        self.data.ncols()
    }

    pub fn x_coordinates(&self) -> Vec<f64> {
        axis_coordinates(self.nx(), self.pitch)
    }

    pub fn y_coordinates(&self) -> Vec<f64> {
        axis_coordinates(self.ny(), self.pitch)
    }

    /// Physical x extent from first to last pixel center.
    pub fn width(&self) -> f64 {
        (self.nx() as f64 - 1.0) * self.pitch
    }

    /// Physical y extent from first to last pixel center.
    pub fn height(&self) -> f64 {
        (self.ny() as f64 - 1.0) * self.pitch
    }

    /// Bilinear interpolation of the map at physical coordinates `(x, y)`;
    /// zero outside the grid, rolling off linearly over the outermost
    /// pixel so the sampled field stays continuous.
    pub fn sample(&self, x: f64, y: f64) -> Complex64 {
        let fx = x / self.pitch + (self.nx() as f64 - 1.0) / 2.0;
        let fy = y / self.pitch + (self.ny() as f64 - 1.0) / 2.0;
        let x0 = fx.floor();
        let y0 = fy.floor();
        let tx = fx - x0;
        let ty = fy - y0;
        let mut acc = Complex64::new(0.0, 0.0);
        for (dy, wy) in [(0.0, 1.0 - ty), (1.0, ty)] {
            for (dx, wx) in [(0.0, 1.0 - tx), (1.0, tx)] {
                let w = wx * wy;
                if w == 0.0 {
                    continue;
                }
                let col = x0 + dx;
                let row = y0 + dy;
                if col >= 0.0
                    && row >= 0.0
                    && (col as usize) < self.nx()
                    && (row as usize) < self.ny()
                {
                    acc += w * self.data[[row as usize, col as usize]];
                }
            }
        }
        acc
    }
}

/// One recorded camera frame: non-negative intensity on a centered grid,
/// tagged with the interferometric phase at which it was taken.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraFrame {
    data: Array2<f64>,
    pitch: f64,
    phase: f64,
}

impl CameraFrame {
    pub fn new(data: Array2<f64>, pitch: f64, phase: f64) -> Result<Self, GridError> {
        if !(pitch.is_finite() && pitch > 0.0) {
            return Err(GridError::BadPitch(pitch));
        }
        if data.is_empty() {
            return Err(GridError::Empty);
        }
        if data.iter().any(|v| !v.is_finite()) || !phase.is_finite() {
            return Err(GridError::NonFinite);
        }
        Ok(Self { data, pitch, phase })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    /// Interferometric phase setting of this exposure, in radians.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn ny(&self) -> usize {
        self.data.nrows()
    }

    pub fn nx(&self) -> usize {
        self.data.ncols()
    }

    pub fn x_coordinates(&self) -> Vec<f64> {
        axis_coordinates(self.nx(), self.pitch)
    }

    pub fn y_coordinates(&self) -> Vec<f64> {
        axis_coordinates(self.ny(), self.pitch)
    }
}
