//! Range-map pre-processing: dB magnitude, column normalization, uniform
//! sub-sampling, box smoothing and thresholding.

use std::fmt;

use crate::error::{Error, Result};
use crate::ingest::{PreprocConfig, RadarCube};

/// Affine map from a (possibly fractional) pixel index to a physical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisMap {
    pub origin: f64,
    pub step: f64,
}

impl AxisMap {
    pub fn new(origin: f64, step: f64) -> Self {
        Self { origin, step }
    }

    pub fn at(&self, index: f64) -> f64 {
        self.origin + index * self.step
    }

    pub fn index_of(&self, value: f64) -> f64 {
        (value - self.origin) / self.step
    }
}

/// Pixel grid dimensions plus the physical axis maps.
///
/// Centered coordinates put the origin at the image center with `x` along
/// columns and `y` pointing up (towards decreasing row index).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageGeometry {
    pub rows: usize,
    pub cols: usize,
    pub row_axis: AxisMap,
    pub col_axis: AxisMap,
}

impl ImageGeometry {
    pub fn unit(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_axis: AxisMap::new(0.0, 1.0),
            col_axis: AxisMap::new(0.0, 1.0),
        }
    }

    pub fn center_row(&self) -> f64 {
        (self.rows as f64 - 1.0) / 2.0
    }

    pub fn center_col(&self) -> f64 {
        (self.cols as f64 - 1.0) / 2.0
    }

    /// Pixel `(row, col)` to centered `(x, y)`.
    pub fn to_centered(&self, row: f64, col: f64) -> (f64, f64) {
        (col - self.center_col(), self.center_row() - row)
    }

    /// Centered `(x, y)` to pixel `(row, col)`.
    pub fn to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        (self.center_row() - y, x + self.center_col())
    }
}

/// Processing stage of a [`RangeMapImage`], in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    RawDb,
    Normalized,
    Downsampled,
    Filtered,
    Thresholded,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::RawDb => "raw_db",
            Stage::Normalized => "normalized",
            Stage::Downsampled => "downsampled",
            Stage::Filtered => "filtered",
            Stage::Thresholded => "thresholded",
        })
    }
}

/// Range bins (rows) by slow-time (columns), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeMapImage {
    pixels: Vec<f64>,
    rows: usize,
    cols: usize,
    /// Row index to range in meters.
    pub row_axis: AxisMap,
    /// Column index to time in seconds.
    pub col_axis: AxisMap,
    pub stage: Stage,
}

impl RangeMapImage {
    pub fn new(
        pixels: Vec<f64>,
        rows: usize,
        cols: usize,
        row_axis: AxisMap,
        col_axis: AxisMap,
        stage: Stage,
    ) -> Result<Self> {
        if pixels.len() != rows * cols {
            return Err(Error::Size(format!(
                "{} pixels do not fill a {rows}x{cols} image",
                pixels.len()
            )));
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::Data("range-map pixels must be finite".into()));
        }
        Ok(Self {
            pixels,
            rows,
            cols,
            row_axis,
            col_axis,
            stage,
        })
    }

    /// Unit-spaced axes with the origin at pixel (0, 0).
    pub fn from_pixels(pixels: Vec<f64>, rows: usize, cols: usize, stage: Stage) -> Result<Self> {
        Self::new(
            pixels,
            rows,
            cols,
            AxisMap::new(0.0, 1.0),
            AxisMap::new(0.0, 1.0),
            stage,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn geometry(&self) -> ImageGeometry {
        ImageGeometry {
            rows: self.rows,
            cols: self.cols,
            row_axis: self.row_axis,
            col_axis: self.col_axis,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.cols + col]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.pixels[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        self.pixels[col..].iter().step_by(self.cols).copied()
    }

    pub fn total_mass(&self) -> f64 {
        self.pixels.iter().sum()
    }

    fn with_pixels(&self, pixels: Vec<f64>, stage: Stage) -> Self {
        Self {
            pixels,
            stage,
            ..self.clone()
        }
    }

    fn require(&self, stage: Stage) -> Result<()> {
        if self.stage == stage {
            Ok(())
        } else {
            Err(Error::Data(format!(
                "range-map at stage {} where {stage} was expected",
                self.stage
            )))
        }
    }

    /// Binary PGM (P5), 8-bit, row-major, `round(255 * clamp(v, 0, 1))`.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.cols, self.rows).into_bytes();
        out.extend(
            self.pixels
                .iter()
                .map(|v| (255.0 * v.clamp(0.0, 1.0)).round() as u8),
        );
        out
    }
}

/// `20 log10 |x|` per sample, clamped below at `db_floor`.
pub fn magnitude_db(cube: &RadarCube, db_floor: f64) -> RangeMapImage {
    let pixels = cube
        .samples()
        .iter()
        .map(|s| {
            let p = (s.re as f64).powi(2) + (s.im as f64).powi(2);
            (10.0 * p.log10()).max(db_floor)
        })
        .collect();
    RangeMapImage {
        pixels,
        rows: cube.range_bins(),
        cols: cube.pulses(),
        row_axis: AxisMap::new(cube.range_offset, cube.range_resolution),
        col_axis: AxisMap::new(0.0, 1.0 / cube.prf),
        stage: Stage::RawDb,
    }
}

/// Shifts a column so its minimum is zero, then divides by the new maximum.
///
/// A column whose values are all equal maps to zeros.
pub fn normalize_column(column: &mut [f64]) {
    let min = column.iter().copied().fold(f64::INFINITY, f64::min);
    let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span > 0.0 {
        for v in column.iter_mut() {
            *v = (*v - min) / span;
        }
    } else {
        column.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// Per-column (slow-time) normalization to a `[0, 1]` scale.
pub fn normalize_columns(img: &RangeMapImage) -> Result<RangeMapImage> {
    img.require(Stage::RawDb)?;
    let (rows, cols) = (img.rows, img.cols);
    let mut out = vec![0.0; rows * cols];
    let mut column = vec![0.0; rows];
    for c in 0..cols {
        for (r, v) in column.iter_mut().enumerate() {
            *v = img.pixels[r * cols + c];
        }
        normalize_column(&mut column);
        for (r, v) in column.iter().enumerate() {
            out[r * cols + c] = *v;
        }
    }
    Ok(img.with_pixels(out, Stage::Normalized))
}

/// Nearest-index uniform selection of `dst` out of `src` positions.
pub fn uniform_indices(src: usize, dst: usize) -> Vec<usize> {
    let stride = src as f64 / dst as f64;
    (0..dst)
        .map(|i| ((i as f64 * stride).round() as usize).min(src - 1))
        .collect()
}

/// Uniform point sub-sampling to `(rows, cols)`.
///
/// Axis maps are rescaled by the stride. With an integer stride every
/// retained pixel keeps its exact physical coordinates; otherwise the
/// coordinate error is at most half a source sample.
pub fn downsample_slow_time(img: &RangeMapImage, target: (usize, usize)) -> Result<RangeMapImage> {
    img.require(Stage::Normalized)?;
    let (new_rows, new_cols) = target;
    if new_rows == 0 || new_cols == 0 || new_rows > img.rows || new_cols > img.cols {
        return Err(Error::Size(format!(
            "cannot downsample {}x{} to {new_rows}x{new_cols}",
            img.rows, img.cols
        )));
    }
    let row_idx = uniform_indices(img.rows, new_rows);
    let col_idx = uniform_indices(img.cols, new_cols);
    let mut pixels = Vec::with_capacity(new_rows * new_cols);
    for &r in &row_idx {
        let row = img.row(r);
        pixels.extend(col_idx.iter().map(|&c| row[c]));
    }
    Ok(RangeMapImage {
        pixels,
        rows: new_rows,
        cols: new_cols,
        row_axis: AxisMap::new(
            img.row_axis.origin,
            img.row_axis.step * img.rows as f64 / new_rows as f64,
        ),
        col_axis: AxisMap::new(
            img.col_axis.origin,
            img.col_axis.step * img.cols as f64 / new_cols as f64,
        ),
        stage: Stage::Downsampled,
    })
}

/// Uniform `(2k+1) x (2k+1)` mean filter with zero padding.
pub fn smooth(img: &RangeMapImage, k: usize) -> Result<RangeMapImage> {
    img.require(Stage::Downsampled)?;
    let (rows, cols) = (img.rows, img.cols);
    let side = 2 * k + 1;
    let weight = 1.0 / (side * side) as f64;

    // horizontal pass, then vertical
    let mut horiz = vec![0.0; rows * cols];
    for r in 0..rows {
        let row = img.row(r);
        for c in 0..cols {
            let lo = c.saturating_sub(k);
            let hi = (c + k).min(cols - 1);
            horiz[r * cols + c] = row[lo..=hi].iter().sum();
        }
    }
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        let lo = r.saturating_sub(k);
        let hi = (r + k).min(rows - 1);
        for c in 0..cols {
            let s: f64 = (lo..=hi).map(|rr| horiz[rr * cols + c]).sum();
            out[r * cols + c] = s * weight;
        }
    }
    Ok(img.with_pixels(out, Stage::Filtered))
}

/// Zeroes every pixel below `tau`.
pub fn threshold(img: &RangeMapImage, tau: f64) -> Result<RangeMapImage> {
    img.require(Stage::Filtered)?;
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Config(format!("threshold {tau} outside (0, 1]")));
    }
    let pixels = img
        .pixels
        .iter()
        .map(|&v| if v >= tau { v } else { 0.0 })
        .collect();
    Ok(img.with_pixels(pixels, Stage::Thresholded))
}

/// Every intermediate image of [`preprocess`].
#[derive(Debug, Clone)]
pub struct RangeMapStages {
    pub raw_db: RangeMapImage,
    pub normalized: RangeMapImage,
    pub downsampled: RangeMapImage,
    pub filtered: RangeMapImage,
    pub thresholded: RangeMapImage,
}

impl RangeMapStages {
    pub fn iter(&self) -> impl Iterator<Item = &RangeMapImage> {
        [
            &self.raw_db,
            &self.normalized,
            &self.downsampled,
            &self.filtered,
            &self.thresholded,
        ]
        .into_iter()
    }
}

/// Runs all four pre-processing steps on a cube.
pub fn preprocess(cube: &RadarCube, cfg: &PreprocConfig) -> Result<RangeMapStages> {
    let raw_db = magnitude_db(cube, cfg.db_floor);
    let normalized = normalize_columns(&raw_db)?;
    let downsampled = downsample_slow_time(&normalized, cfg.downsample_target)?;
    let filtered = smooth(&downsampled, cfg.kernel_half_width)?;
    let thresholded = threshold(&filtered, cfg.rm_threshold)?;
    Ok(RangeMapStages {
        raw_db,
        normalized,
        downsampled,
        filtered,
        thresholded,
    })
}
