//! Line detection in the thresholded range-map.
//!
//! The discrete Radon transform splits every pixel into four subpixels at
//! the quarter-cell centers and projects each onto `x' = x cos θ + y sin θ`,
//! with `(x, y)` centered on the image, `x` along columns and `y` pointing
//! up. Offset bins are one pixel wide and centered on integers; a subpixel
//! that lands on a bin border is shared evenly by both neighbors.
//!
//! A peak at `(θ, x')` is the line `x cos θ + y sin θ = x'`. In pixel
//! coordinates its slope is `cot θ` rows per column, and it crosses the
//! center column `x' / sin θ` rows above the center row.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::RadonConfig;
use crate::rangemap::{ImageGeometry, RangeMapImage, Stage};

/// Distance from a bin border below which a subpixel counts as on it.
pub const BORDER_EPS: f64 = 1e-9;

/// Quarter-cell offsets of the four subpixels.
pub const SUBPIXEL_OFFSETS: [f64; 2] = [-0.25, 0.25];

/// Projection accumulator, `n_offsets x n_angles`, offset-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RadonImage {
    accum: Vec<f64>,
    thetas: Vec<f64>,
    offsets: Vec<f64>,
    theta_step: f64,
}

impl RadonImage {
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Bin centers in pixels from the image center.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn theta_step(&self) -> f64 {
        self.theta_step
    }

    pub fn n_angles(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_offsets(&self) -> usize {
        self.offsets.len()
    }

    pub fn get(&self, offset: usize, angle: usize) -> f64 {
        self.accum[offset * self.thetas.len() + angle]
    }

    /// Projection profile at one angle.
    pub fn projection(&self, angle: usize) -> Vec<f64> {
        (0..self.n_offsets()).map(|o| self.get(o, angle)).collect()
    }

    pub fn max_value(&self) -> f64 {
        self.accum.iter().copied().fold(0.0, f64::max)
    }

    /// `(offset index, angle index)` of the global maximum.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0.0);
        for (i, &v) in self.accum.iter().enumerate() {
            if v > best.1 {
                best = (i, v);
            }
        }
        (best.0 / self.n_angles(), best.0 % self.n_angles())
    }

    /// PGM of the accumulator scaled by its maximum: angles across, offsets down.
    pub fn to_pgm(&self) -> Vec<u8> {
        let max = self.max_value();
        let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
        let mut out = format!("P5\n{} {}\n255\n", self.n_angles(), self.n_offsets()).into_bytes();
        out.extend(self.accum.iter().map(|v| (v * scale).round().clamp(0.0, 255.0) as u8));
        out
    }
}

/// Angle grid `{0, Δθ, ..., < 180}` in degrees.
pub fn theta_grid(theta_step: f64) -> Vec<f64> {
    let n = (180.0 / theta_step - 1e-9).ceil() as usize;
    (0..n).map(|k| k as f64 * theta_step).collect()
}

/// Half-count `L` of offset bins; bins are centered at `-L..=L`.
pub fn offset_half_count(rows: usize, cols: usize) -> usize {
    ((rows as f64).hypot(cols as f64) / 2.0).ceil() as usize
}

/// Adds `value` at projection `x_prime` to a profile whose bin `j` is
/// centered at `j - half`.
#[inline]
fn deposit(profile: &mut [f64], half: usize, x_prime: f64, value: f64) {
    let u = x_prime + half as f64 + 0.5;
    let j = u.floor();
    let frac = u - j;
    let j = j as usize;
    if frac < BORDER_EPS && j > 0 {
        profile[j - 1] += 0.5 * value;
        profile[j] += 0.5 * value;
    } else if 1.0 - frac < BORDER_EPS && j + 1 < profile.len() {
        profile[j] += 0.5 * value;
        profile[j + 1] += 0.5 * value;
    } else {
        profile[j] += value;
    }
}

/// Discrete Radon transform with the four-subpixel projection scheme.
///
/// Angles are processed in parallel; each angle owns its projection
/// profile, so the result is identical to a sequential run.
pub fn radon_transform(img: &RangeMapImage, theta_step: f64) -> Result<RadonImage> {
    if img.stage != Stage::Thresholded {
        return Err(Error::Data(format!(
            "Radon transform expects a thresholded range-map, got stage {}",
            img.stage
        )));
    }
    if !(theta_step > 0.0 && theta_step <= 90.0) {
        return Err(Error::Config(format!("theta_step {theta_step} outside (0, 90]")));
    }
    let (rows, cols) = (img.rows(), img.cols());
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyInput("range-map has no pixels".into()));
    }
    let geom = img.geometry();
    let (cr, cc) = (geom.center_row(), geom.center_col());
    let half = offset_half_count(rows, cols);
    let n_off = 2 * half + 1;
    let thetas = theta_grid(theta_step);

    let nonzero: Vec<(usize, usize, f64)> = (0..rows)
        .flat_map(|r| img.row(r).iter().enumerate().map(move |(c, &v)| (r, c, v)))
        .filter(|&(_, _, v)| v != 0.0)
        .collect();

    let profiles: Vec<Vec<f64>> = thetas
        .par_iter()
        .map(|&theta| {
            let (sin, cos) = theta.to_radians().sin_cos();
            let xs: Vec<[f64; 2]> = (0..cols)
                .map(|c| SUBPIXEL_OFFSETS.map(|d| ((c as f64 - cc) + d) * cos))
                .collect();
            let ys: Vec<[f64; 2]> = (0..rows)
                .map(|r| SUBPIXEL_OFFSETS.map(|d| ((cr - r as f64) + d) * sin))
                .collect();
            let mut profile = vec![0.0; n_off];
            for &(r, c, v) in &nonzero {
                let quarter = 0.25 * v;
                for xp in xs[c] {
                    for yp in ys[r] {
                        deposit(&mut profile, half, xp + yp, quarter);
                    }
                }
            }
            profile
        })
        .collect();

    let n_ang = thetas.len();
    let mut accum = vec![0.0; n_off * n_ang];
    for (a, profile) in profiles.iter().enumerate() {
        for (o, &v) in profile.iter().enumerate() {
            accum[o * n_ang + a] = v;
        }
    }
    let offsets = (0..n_off).map(|j| j as f64 - half as f64).collect();
    Ok(RadonImage {
        accum,
        thetas,
        offsets,
        theta_step,
    })
}

/// Coarse orientation of a detected peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassHint {
    Horizontal,
    Sloped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadonPeak {
    /// Degrees, on the transform's angle grid.
    pub theta: f64,
    /// Offset in pixels, refined to the mass centroid of the peak bin and its neighbors.
    pub x_prime: f64,
    pub value: f64,
    pub class_hint: ClassHint,
    pub angle_index: usize,
    pub offset_index: usize,
}

/// Local maxima of the accumulator.
///
/// A cell is a peak when it is the maximum of the `(2a+1) x (2b+1)`
/// neighborhood given by `min_separation = (degrees, bins)` and reaches
/// `min_rel_height` of the global maximum. Peaks are returned strongest
/// first, at most `max_peaks` of them.
pub fn detect_peaks(
    radon: &RadonImage,
    min_separation: (f64, usize),
    min_rel_height: f64,
    max_peaks: usize,
) -> Result<Vec<RadonPeak>> {
    let global = radon.max_value();
    if global <= 0.0 {
        return Err(Error::NoPeaks { min_rel_height });
    }
    let floor = min_rel_height * global;
    let (n_off, n_ang) = (radon.n_offsets(), radon.n_angles());
    let a = (min_separation.0 / radon.theta_step).round() as usize;
    let b = min_separation.1;
    let step = radon.theta_step;

    let mut peaks = Vec::new();
    for o in 0..n_off {
        for t in 0..n_ang {
            let v = radon.get(o, t);
            if v <= 0.0 || v < floor {
                continue;
            }
            let mut is_max = true;
            'scan: for oo in o.saturating_sub(b)..=(o + b).min(n_off - 1) {
                for tt in t.saturating_sub(a)..=(t + a).min(n_ang - 1) {
                    if (oo, tt) == (o, t) {
                        continue;
                    }
                    let w = radon.get(oo, tt);
                    // plateaus: the first cell in scan order wins
                    let earlier = (oo, tt) < (o, t);
                    if w > v || (earlier && w == v) {
                        is_max = false;
                        break 'scan;
                    }
                }
            }
            if !is_max {
                continue;
            }
            let theta = radon.thetas[t];
            let lo = o.saturating_sub(1);
            let hi = (o + 1).min(n_off - 1);
            let (mut mass, mut moment) = (0.0, 0.0);
            for oo in lo..=hi {
                let w = radon.get(oo, t);
                mass += w;
                moment += w * radon.offsets[oo];
            }
            let class_hint = if (theta - 90.0).abs() <= 2.0 * step + 1e-9 {
                ClassHint::Horizontal
            } else {
                ClassHint::Sloped
            };
            peaks.push(RadonPeak {
                theta,
                x_prime: moment / mass,
                value: v,
                class_hint,
                angle_index: t,
                offset_index: o,
            });
        }
    }
    if peaks.is_empty() {
        return Err(Error::NoPeaks { min_rel_height });
    }
    peaks.sort_by(|p, q| {
        q.value
            .total_cmp(&p.value)
            .then((p.offset_index, p.angle_index).cmp(&(q.offset_index, q.angle_index)))
    });
    peaks.truncate(max_peaks);
    Ok(peaks)
}

/// Text listing of peaks: one `theta_deg x_prime value` line each.
pub fn peaks_to_text(peaks: &[RadonPeak]) -> String {
    let mut s = String::from("# theta_deg x_prime value\n");
    for p in peaks {
        let _ = writeln!(s, "{:.3} {:.4} {:.6}", p.theta, p.x_prime, p.value);
    }
    s
}

/// A detected straight line of the range-map.
#[derive(Debug, Clone, PartialEq)]
pub struct LineModel {
    /// `m`: rows per column in pixel coordinates, `cot θ`.
    pub slope: f64,
    /// `n`: rows above the center row at the center column, `x' / sin θ`.
    pub intercept: f64,
    pub theta: f64,
    pub x_prime: f64,
    /// Peak strength the line came from.
    pub strength: f64,
    /// Column interval the line is valid over.
    pub valid_span: (f64, f64),
    pub geometry: ImageGeometry,
}

impl LineModel {
    /// Line through pixel coordinates, `row = slope * col + row_at_col0`.
    pub fn from_pixel_line(slope: f64, row_at_col0: f64, geometry: ImageGeometry) -> Self {
        let intercept = geometry.center_row() - row_at_col0 - slope * geometry.center_col();
        let theta = 1.0f64.atan2(slope).to_degrees();
        Self {
            slope,
            intercept,
            theta,
            x_prime: intercept * theta.to_radians().sin(),
            strength: 0.0,
            valid_span: (0.0, geometry.cols as f64 - 1.0),
            geometry,
        }
    }

    /// Row where the line crosses a (fractional) column.
    pub fn row_at(&self, col: f64) -> f64 {
        let g = &self.geometry;
        g.center_row() - self.intercept + self.slope * (col - g.center_col())
    }

    /// Row at column zero.
    pub fn pixel_intercept(&self) -> f64 {
        self.row_at(0.0)
    }

    /// Physical slope in meters per second.
    pub fn physical_slope(&self) -> f64 {
        self.slope * self.geometry.row_axis.step / self.geometry.col_axis.step
    }
}

/// Converts a Radon peak into a line.
pub fn peak_to_line(peak: &RadonPeak, geometry: ImageGeometry) -> Result<LineModel> {
    let (sin, cos) = peak.theta.to_radians().sin_cos();
    if peak.theta.rem_euclid(180.0).abs() < 1e-12 || sin.abs() < 1e-12 {
        return Err(Error::VerticalLine);
    }
    Ok(LineModel {
        slope: cos / sin,
        intercept: peak.x_prime / sin,
        theta: peak.theta,
        x_prime: peak.x_prime,
        strength: peak.value,
        valid_span: (0.0, geometry.cols as f64 - 1.0),
        geometry,
    })
}

/// Intersection of two consecutive lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionPoint {
    pub col: f64,
    pub row: f64,
    pub time_s: f64,
    pub range_m: f64,
}

/// Slope tolerance for a given angle step: `tan(Δθ / 2)`.
pub fn slope_epsilon(theta_step: f64) -> f64 {
    (theta_step / 2.0).to_radians().tan()
}

/// Solves `m_a x - y = -n_a`, `m_b x - y = -n_b` in pixel coordinates.
pub fn intersect_lines(a: &LineModel, b: &LineModel, slope_epsilon: f64) -> Result<TransitionPoint> {
    let det = a.slope - b.slope;
    if det.abs() <= slope_epsilon {
        return Err(Error::ParallelLines {
            a: a.slope,
            b: b.slope,
            epsilon: slope_epsilon,
        });
    }
    let (na, nb) = (a.pixel_intercept(), b.pixel_intercept());
    let col = (nb - na) / det;
    let row = (a.slope * nb - b.slope * na) / det;
    let g = &a.geometry;
    Ok(TransitionPoint {
        col,
        row,
        time_s: g.col_axis.at(col),
        range_m: g.row_axis.at(row),
    })
}

/// Intersections of each consecutive pair; clips every line's valid span
/// to its neighboring intersections. Fewer than two lines yield none.
pub fn transition_times(lines: &mut [LineModel], slope_epsilon: f64) -> Result<Vec<TransitionPoint>> {
    let mut out = Vec::with_capacity(lines.len().saturating_sub(1));
    for k in 1..lines.len() {
        let p = intersect_lines(&lines[k - 1], &lines[k], slope_epsilon)?;
        let prev = &mut lines[k - 1].valid_span;
        prev.1 = prev.1.min(p.col);
        let next = &mut lines[k].valid_span;
        next.0 = next.0.max(p.col);
        out.push(p);
    }
    Ok(out)
}

/// Range-map pixels supporting a line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSupport {
    pub mass: f64,
    /// Mass-weighted mean column.
    pub centroid_col: f64,
    /// First and last column of the heaviest contiguous run of support.
    pub span: (f64, f64),
}

/// Collects nonzero pixels within `max_rows` rows of the line.
///
/// Columns with support are grouped into runs, tolerating gaps of up to
/// `max_gap` empty columns; the run carrying the most mass gives the span.
pub fn line_support(line: &LineModel, img: &RangeMapImage, max_rows: f64, max_gap: usize) -> Option<LineSupport> {
    let mut col_mass = vec![0.0; img.cols()];
    for (c, cm) in col_mass.iter_mut().enumerate() {
        let center = line.row_at(c as f64);
        let lo = (center - max_rows).ceil().max(0.0);
        let hi = (center + max_rows).floor().min(img.rows() as f64 - 1.0);
        if lo > hi {
            continue;
        }
        for r in lo as usize..=hi as usize {
            *cm += img.get(r, c);
        }
    }
    let mass: f64 = col_mass.iter().sum();
    if mass <= 0.0 {
        return None;
    }
    let centroid_col = col_mass
        .iter()
        .enumerate()
        .map(|(c, m)| c as f64 * m)
        .sum::<f64>()
        / mass;

    let mut best: Option<(usize, usize, f64)> = None;
    let mut run: Option<(usize, usize, f64)> = None;
    for (c, &m) in col_mass.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        run = match run {
            Some((s, e, acc)) if c - e <= max_gap + 1 => Some((s, c, acc + m)),
            other => {
                if let Some(r) = other {
                    if best.is_none_or(|b| r.2 > b.2) {
                        best = Some(r);
                    }
                }
                Some((c, c, m))
            }
        };
    }
    if let Some(r) = run {
        if best.is_none_or(|b| r.2 > b.2) {
            best = Some(r);
        }
    }
    let (s, e, _) = best?;
    Some(LineSupport {
        mass,
        centroid_col,
        span: (s as f64, e as f64),
    })
}

/// Gap, in columns, bridged when measuring a line's support span.
pub const SUPPORT_MAX_GAP: usize = 3;

/// Detects, orders and merges the lines of a thresholded range-map.
///
/// Lines are ordered by the slow-time centroid of their supporting pixels.
/// Consecutive lines whose slopes differ by no more than the angle-grid
/// resolution are merged, keeping the stronger one. Each line's valid span
/// starts as its support span.
pub fn extract_lines(img: &RangeMapImage, radon: &RadonImage, cfg: &RadonConfig) -> Result<Vec<LineModel>> {
    let peaks = detect_peaks(
        radon,
        (cfg.min_separation_deg, cfg.min_separation_bins),
        cfg.min_rel_height,
        cfg.max_peaks,
    )?;
    let geometry = img.geometry();
    let mut lines: Vec<(LineModel, LineSupport)> = peaks
        .iter()
        .filter_map(|p| peak_to_line(p, geometry).ok())
        .filter_map(|mut line| {
            let support = line_support(&line, img, cfg.support_rows, SUPPORT_MAX_GAP)?;
            line.valid_span = support.span;
            Some((line, support))
        })
        .collect();
    lines.sort_by(|a, b| a.1.centroid_col.total_cmp(&b.1.centroid_col));

    let eps = slope_epsilon(cfg.theta_step);
    let mut merged: Vec<(LineModel, LineSupport)> = Vec::with_capacity(lines.len());
    for item in lines {
        match merged.last_mut() {
            Some(last) if (last.0.slope - item.0.slope).abs() <= eps => {
                let span = (
                    last.0.valid_span.0.min(item.0.valid_span.0),
                    last.0.valid_span.1.max(item.0.valid_span.1),
                );
                if item.0.strength > last.0.strength {
                    *last = item;
                }
                last.0.valid_span = span;
            }
            _ => merged.push(item),
        }
    }
    if merged.is_empty() {
        return Err(Error::NoPeaks {
            min_rel_height: cfg.min_rel_height,
        });
    }
    Ok(merged.into_iter().map(|(l, _)| l).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn thresholded(px: Vec<f64>, rows: usize, cols: usize) -> RangeMapImage {
        RangeMapImage::from_pixels(px, rows, cols, Stage::Thresholded).unwrap()
    }

    fn peak(theta: f64, x_prime: f64) -> RadonPeak {
        RadonPeak {
            theta,
            x_prime,
            value: 1.0,
            class_hint: ClassHint::Sloped,
            angle_index: 0,
            offset_index: 0,
        }
    }

    #[test]
    fn grid_and_bin_count() {
        assert_eq!(theta_grid(1.0).len(), 180);
        assert_eq!(*theta_grid(1.0).last().unwrap(), 179.0);
        assert_eq!(theta_grid(0.5).len(), 360);
        let img = thresholded(vec![0.0; 12], 3, 4);
        let r = radon_transform(&img, 1.0).unwrap();
        // hypot(3, 4) = 5 -> L = 3 -> 7 bins
        assert_eq!(r.n_offsets(), 7);
        assert_eq!(r.offsets(), &[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn center_pixel_projects_to_zero_offset() {
        let mut px = vec![0.0; 25];
        px[12] = 1.0;
        let r = radon_transform(&thresholded(px, 5, 5), 1.0).unwrap();
        let zero = r.offsets().iter().position(|&o| o == 0.0).unwrap();
        for a in 0..r.n_angles() {
            let p = r.projection(a);
            let total: f64 = p.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
            // subpixels sit at most 0.25*sqrt(2) from the center, inside bin 0
            assert_relative_eq!(p[zero], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn horizontal_line_peaks_at_ninety_degrees() {
        let (rows, cols, row) = (21, 40, 4);
        let mut px = vec![0.0; rows * cols];
        px[row * cols..(row + 1) * cols].iter_mut().for_each(|v| *v = 1.0);
        let r = radon_transform(&thresholded(px, rows, cols), 1.0).unwrap();
        let (o, a) = r.argmax();
        assert_eq!(r.thetas()[a], 90.0);
        // center row is 10, so the line is 6 rows above it
        assert_eq!(r.offsets()[o], 6.0);
        assert_relative_eq!(r.get(o, a), cols as f64, epsilon = 1e-9);
    }

    #[test]
    fn empty_and_wrong_stage_rejected() {
        let img = thresholded(vec![], 0, 0);
        assert!(matches!(radon_transform(&img, 1.0), Err(Error::EmptyInput(_))));
        let f = RangeMapImage::from_pixels(vec![0.0; 4], 2, 2, Stage::Filtered).unwrap();
        assert!(radon_transform(&f, 1.0).is_err());
    }

    #[test]
    fn all_zero_radon_has_no_peaks() {
        let r = radon_transform(&thresholded(vec![0.0; 16], 4, 4), 1.0).unwrap();
        assert!(matches!(
            detect_peaks(&r, (5.0, 5), 0.5, 6),
            Err(Error::NoPeaks { .. })
        ));
    }

    #[test]
    fn peak_to_line_examples() {
        let g = ImageGeometry::unit(21, 41);
        let l = peak_to_line(&peak(90.0, 10.0), g).unwrap();
        assert_relative_eq!(l.slope, 0.0, epsilon = 1e-15);
        assert_relative_eq!(l.intercept, 10.0, epsilon = 1e-12);
        // ten rows above the center row
        assert_relative_eq!(l.row_at(7.0), 0.0, epsilon = 1e-12);

        let l = peak_to_line(&peak(45.0, 0.0), g).unwrap();
        assert_relative_eq!(l.slope, 1.0, epsilon = 1e-12);
        assert_relative_eq!(l.intercept, 0.0, epsilon = 1e-12);

        let l = peak_to_line(&peak(30.0, 5.0), g).unwrap();
        assert_relative_eq!(l.slope, 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(l.intercept, 10.0, epsilon = 1e-12);

        assert!(matches!(peak_to_line(&peak(0.0, 3.0), g), Err(Error::VerticalLine)));
    }

    #[test]
    fn intersection_by_hand() {
        let g = ImageGeometry::unit(100, 100);
        let a = LineModel::from_pixel_line(0.0, 50.0, g);
        let b = LineModel::from_pixel_line(2.0, 0.0, g);
        let p = intersect_lines(&a, &b, 1e-3).unwrap();
        assert_relative_eq!(p.col, 25.0, epsilon = 1e-12);
        assert_relative_eq!(p.row, 50.0, epsilon = 1e-12);
        assert!(matches!(
            intersect_lines(&a, &a, 1e-3),
            Err(Error::ParallelLines { .. })
        ));
    }

    #[test]
    fn from_pixel_line_matches_peak_form() {
        let g = ImageGeometry::unit(128, 384);
        let l = LineModel::from_pixel_line(0.5, 20.0, g);
        let back = peak_to_line(&peak(l.theta, l.x_prime), g).unwrap();
        assert_relative_eq!(back.slope, 0.5, epsilon = 1e-12);
        assert_relative_eq!(back.pixel_intercept(), 20.0, epsilon = 1e-9);
    }

    #[test]
    fn transition_count_follows_line_count() {
        let g = ImageGeometry::unit(100, 100);
        let mut one = vec![LineModel::from_pixel_line(1.0, 0.0, g)];
        assert!(transition_times(&mut one, 1e-3).unwrap().is_empty());
        let mut two = vec![
            LineModel::from_pixel_line(-1.0, 80.0, g),
            LineModel::from_pixel_line(0.0, 30.0, g),
        ];
        let t = transition_times(&mut two, 1e-3).unwrap();
        assert_eq!(t.len(), 1);
        assert_relative_eq!(t[0].col, 50.0, epsilon = 1e-12);
        assert_eq!(two[0].valid_span.1, t[0].col);
        assert_eq!(two[1].valid_span.0, t[0].col);
        assert!(transition_times(&mut [], 1e-3).unwrap().is_empty());
    }

    #[test]
    fn class_hint_near_ninety() {
        let rows = 31;
        let cols = 61;
        let mut px = vec![0.0; rows * cols];
        px[5 * cols..6 * cols].iter_mut().for_each(|v| *v = 1.0);
        let r = radon_transform(&thresholded(px, rows, cols), 1.0).unwrap();
        let peaks = detect_peaks(&r, (5.0, 5), 0.5, 6).unwrap();
        assert_eq!(peaks[0].class_hint, ClassHint::Horizontal);
        assert_relative_eq!(peaks[0].x_prime, 10.0, epsilon = 1e-9);
    }

    #[test]
    fn border_hits_split_evenly() {
        let mut p = vec![0.0; 5];
        deposit(&mut p, 2, 0.5, 1.0);
        assert_eq!(p, vec![0.0, 0.0, 0.5, 0.5, 0.0]);
        let mut p = vec![0.0; 5];
        deposit(&mut p, 2, -0.2, 1.0);
        assert_eq!(p, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    }
}
