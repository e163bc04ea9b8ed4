//! Self-contained image output: binary PGM/PPM rasters and SVG line plots.

use std::fmt::Write as _;

use crate::error::Result;
use crate::ingest::{PipelineConfig, RadarCube};
use crate::microdoppler::spectrogram;
use crate::pipeline::{stft_params, Analysis, InPlaceAnalysis};
use crate::rangemap::{RangeMapImage, Stage};

pub type Rgb = [u8; 3];

/// Row-major RGB raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Pixmap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<Rgb>,
}

impl Pixmap {
    pub fn from_gray(values: &[f64], width: usize, height: usize) -> Self {
        let data = values
            .iter()
            .map(|v| {
                let g = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
                [g, g, g]
            })
            .collect();
        Self { width, height, data }
    }

    pub fn set(&mut self, x: i64, y: i64, c: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.data[y as usize * self.width + x as usize] = c;
        }
    }

    pub fn vertical_line(&mut self, x: f64, c: Rgb) {
        let x = x.round() as i64;
        for y in 0..self.height as i64 {
            self.set(x, y, c);
        }
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.data.iter().flatten());
        out
    }
}

pub const LINE_COLOR: Rgb = [230, 40, 40];
pub const TRANSITION_COLOR: Rgb = [40, 220, 60];

/// Black, red, yellow, white ramp for `v` in `[0, 1]`.
pub fn heat(v: f64) -> Rgb {
    let v = v.clamp(0.0, 1.0) * 3.0;
    let ch = |x: f64| (x.clamp(0.0, 1.0) * 255.0).round() as u8;
    [ch(v), ch(v - 1.0), ch(v - 2.0)]
}

/// PGM of a range-map stage; the dB stage is stretched over its own range.
pub fn range_map_pgm(img: &RangeMapImage) -> Vec<u8> {
    if img.stage != Stage::RawDb {
        return img.to_pgm();
    }
    let min = img.pixels().iter().copied().fold(f64::INFINITY, f64::min);
    let max = img.pixels().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if max > min { max - min } else { 1.0 };
    let mut out = format!("P5\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend(img.pixels().iter().map(|v| ((v - min) / span * 255.0).round() as u8));
    out
}

/// Thresholded range-map with detected lines over their valid spans and
/// transition columns marked.
pub fn range_map_overlay(analysis: &Analysis) -> Pixmap {
    let img = &analysis.stages.thresholded;
    let mut pm = Pixmap::from_gray(img.pixels(), img.cols(), img.rows());
    for t in &analysis.transitions {
        pm.vertical_line(t.col, TRANSITION_COLOR);
    }
    for line in &analysis.lines {
        let (a, b) = line.valid_span;
        let mut c = a.ceil();
        while c <= b {
            pm.set(c as i64, line.row_at(c).round() as i64, LINE_COLOR);
            c += 1.0;
        }
    }
    pm
}

/// Radon accumulator with detected peaks circled.
pub fn radon_overlay(analysis: &Analysis) -> Pixmap {
    let r = &analysis.radon;
    let max = r.max_value();
    let (w, h) = (r.n_angles(), r.n_offsets());
    let mut data = Vec::with_capacity(w * h);
    for o in 0..h {
        for a in 0..w {
            data.push(heat(if max > 0.0 { r.get(o, a) / max } else { 0.0 }));
        }
    }
    let mut pm = Pixmap { width: w, height: h, data };
    for p in &analysis.peaks {
        let (x, y) = (p.angle_index as i64, p.offset_index as i64);
        for d in -3..=3i64 {
            for (dx, dy) in [(d, -3), (d, 3), (-3, d), (3, d)] {
                pm.set(x + dx, y + dy, TRANSITION_COLOR);
            }
        }
    }
    pm
}

/// Whole-recording spectrogram, positive Doppler up, with transition
/// times as vertical lines. `None` when the cube is shorter than a window.
pub fn spectrogram_overlay(cube: &RadarCube, cfg: &PipelineConfig, analysis: &Analysis) -> Result<Option<Pixmap>> {
    let params = stft_params(cfg, cube.prf);
    if cube.pulses() < params.window_len {
        return Ok(None);
    }
    let spec = spectrogram(cube, (0, cube.pulses()), params, None)?;
    let scaled = spec.log_scaled(60.0);
    let mut pm = Pixmap {
        width: spec.n_frames(),
        height: spec.n_bins(),
        data: scaled.into_iter().map(heat).collect(),
    };
    let times = &spec.frame_times;
    let dt = if times.len() > 1 { times[1] - times[0] } else { 1.0 };
    for t in &analysis.transitions {
        pm.vertical_line((t.time_s - times[0]) / dt, TRANSITION_COLOR);
    }
    Ok(Some(pm))
}

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 300.0;
const MARGIN: f64 = 40.0;

/// Raw and filtered PBC of one in-place interval with the threshold line
/// and detected spans.
pub fn pbc_svg(a: &InPlaceAnalysis) -> String {
    let times = &a.pbc.frame_times;
    let (t0, t1) = match (times.first(), times.last()) {
        (Some(&f), Some(&l)) if l > f => (f, l),
        (Some(&f), _) => (f, f + 1.0),
        _ => (0.0, 1.0),
    };
    let all = a.raw_pbc.values.iter().chain(&a.pbc.values);
    let vmax = all.clone().copied().fold(0.0, f64::max).max(a.threshold);
    let vmin = all.copied().fold(f64::INFINITY, f64::min).min(a.threshold);
    let vspan = if vmax > vmin { vmax - vmin } else { 1.0 };
    let x = |t: f64| MARGIN + (t - t0) / (t1 - t0) * (SVG_W - 2.0 * MARGIN);
    let y = |v: f64| SVG_H - MARGIN - (v - vmin) / vspan * (SVG_H - 2.0 * MARGIN);
    let poly = |values: &[f64]| {
        times
            .iter()
            .zip(values)
            .map(|(&t, &v)| format!("{:.2},{:.2}", x(t), y(v)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for span in &a.spans {
        let _ = writeln!(
            s,
            r##"<rect class="span" x="{:.2}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="#f4d35e" fill-opacity="0.35"/>"##,
            x(span.start_s),
            x(span.end_s) - x(span.start_s),
            SVG_H - 2.0 * MARGIN
        );
    }
    let _ = writeln!(
        s,
        r##"<polyline class="pbc" fill="none" stroke="#999999" stroke-width="1" points="{}"/>"##,
        poly(&a.raw_pbc.values)
    );
    let _ = writeln!(
        s,
        r##"<polyline class="pbc-filtered" fill="none" stroke="#1f4e9c" stroke-width="1.5" points="{}"/>"##,
        poly(&a.pbc.values)
    );
    let _ = writeln!(
        s,
        r##"<line class="threshold" data-value="{:e}" x1="{MARGIN}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-dasharray="6 4"/>"##,
        a.threshold,
        SVG_W - MARGIN,
        y(a.threshold),
        y(a.threshold)
    );
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" font-size="12" font-family="sans-serif">time {t0:.2} s to {t1:.2} s</text>"#,
        SVG_H - 10.0
    );
    s.push_str("</svg>\n");
    s
}

/// All summary plots as `(file name, bytes)` pairs.
pub fn render_plots(cube: &RadarCube, cfg: &PipelineConfig, analysis: &Analysis) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = vec![
        ("rangemap.pgm".to_string(), analysis.stages.filtered.to_pgm()),
        ("rangemap_lines.ppm".to_string(), range_map_overlay(analysis).to_ppm()),
        ("radon_peaks.ppm".to_string(), radon_overlay(analysis).to_ppm()),
    ];
    if let Some(pm) = spectrogram_overlay(cube, cfg, analysis)? {
        out.push(("spectrogram.ppm".to_string(), pm.to_ppm()));
    }
    for a in &analysis.inplace {
        out.push((format!("pbc_line{}.svg", a.line_index), pbc_svg(a).into_bytes()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_header_and_size() {
        let pm = Pixmap::from_gray(&[0.0, 0.5, 1.0, 2.0], 2, 2);
        let bytes = pm.to_ppm();
        assert!(bytes.starts_with(b"P6\n2 2\n255\n"));
        assert_eq!(bytes.len(), 11 + 12);
        assert_eq!(&bytes[11..14], &[0, 0, 0]);
        assert_eq!(&bytes[20..23], &[255, 255, 255]);
    }

    #[test]
    fn heat_ramp_ends() {
        assert_eq!(heat(0.0), [0, 0, 0]);
        assert_eq!(heat(1.0), [255, 255, 255]);
        assert_eq!(heat(1.0 / 3.0), [255, 0, 0]);
    }
}
