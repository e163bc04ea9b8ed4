//! Synthetic radar cubes and range-map fixtures with known ground truth.
//!
//! A cube holds one point scatterer with a Gaussian range profile. Walk
//! events move it at constant radial speed, carrying the matching Doppler
//! tone; still bursts hold the range fixed and add a band-limited
//! micro-Doppler signal under a tapered cosine envelope. Quiet events leave
//! the subject standing still. A scenario made only of quiet events has no
//! subject at all and produces a noise-only cube.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::{Complex32, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ingest::RadarCube;
use crate::radon::LineModel;
use crate::rangemap::{AxisMap, ImageGeometry, RangeMapImage, Stage};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const CARRIER_HZ: f64 = 24.0e9;
pub const MAX_WALK_SPEED: f64 = 3.0;
/// Tones summed to form a still burst.
pub const BURST_TONES: usize = 16;

pub fn wavelength() -> f64 {
    SPEED_OF_LIGHT / CARRIER_HZ
}

/// Two-way Doppler shift of a radial speed; negative when approaching.
pub fn doppler_hz(speed_m_per_s: f64) -> f64 {
    2.0 * speed_m_per_s / wavelength()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Event {
    Walk {
        duration_s: f64,
        speed_m_per_s: f64,
    },
    StillBurst {
        duration_s: f64,
        band_hz: (f64, f64),
        /// Burst RMS amplitude relative to the body return.
        #[serde(default = "default_burst_amplitude")]
        amplitude: f64,
        /// Fraction of the span spent in the cosine ramps.
        #[serde(default = "default_taper")]
        taper: f64,
    },
    Quiet {
        duration_s: f64,
    },
}

fn default_burst_amplitude() -> f64 {
    0.5
}

fn default_taper() -> f64 {
    0.1
}

impl Event {
    pub fn duration_s(&self) -> f64 {
        match *self {
            Event::Walk { duration_s, .. } | Event::StillBurst { duration_s, .. } | Event::Quiet { duration_s } => {
                duration_s
            }
        }
    }

    pub fn walk(duration_s: f64, speed_m_per_s: f64) -> Self {
        Event::Walk {
            duration_s,
            speed_m_per_s,
        }
    }

    pub fn burst(duration_s: f64, band_hz: (f64, f64)) -> Self {
        Event::StillBurst {
            duration_s,
            band_hz,
            amplitude: default_burst_amplitude(),
            taper: default_taper(),
        }
    }

    pub fn quiet(duration_s: f64) -> Self {
        Event::Quiet { duration_s }
    }

    fn speed(&self) -> f64 {
        match *self {
            Event::Walk { speed_m_per_s, .. } => speed_m_per_s,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub events: Vec<Event>,
    pub start_range_m: f64,
    /// Per-pulse SNR against the body return; `None` gives a noiseless cube.
    pub noise_db: Option<f64>,
    pub prf: f64,
    pub range_resolution: f64,
    pub range_offset: f64,
    pub range_bins: usize,
    pub pulses: usize,
    /// Standard deviation of the Gaussian range profile.
    pub range_spread_m: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(rename = "event", default)]
    events: Vec<Event>,
    start_range_m: f64,
    noise_db: Option<f64>,
    prf: f64,
    range_resolution: f64,
    #[serde(default)]
    range_offset: f64,
    #[serde(rename = "M")]
    range_bins: usize,
    #[serde(rename = "N")]
    pulses: Option<usize>,
    range_spread_m: Option<f64>,
}

pub const DEFAULT_RANGE_SPREAD_M: f64 = 0.25;

impl ScenarioSpec {
    /// Walk towards the radar, sit, pause, stand: 30 s at 600 Hz.
    pub fn walk_sit_stand() -> Self {
        Self {
            events: vec![
                Event::walk(12.0, -0.8),
                Event::quiet(3.0),
                Event::burst(2.0, (-200.0, -40.0)),
                Event::quiet(5.0),
                Event::burst(1.5, (40.0, 200.0)),
                Event::quiet(6.5),
            ],
            start_range_m: 18.0,
            noise_db: Some(25.0),
            prf: 600.0,
            range_resolution: 0.1,
            range_offset: 0.0,
            range_bins: 256,
            pulses: 18_000,
            range_spread_m: DEFAULT_RANGE_SPREAD_M,
        }
    }

    /// Parses the TOML scenario format, one `[[event]]` table per event.
    /// Without `N` the cube is sized to the events.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        let total: f64 = file.events.iter().map(Event::duration_s).sum();
        let spec = Self {
            pulses: file.pulses.unwrap_or_else(|| (total * file.prf).round().max(1.0) as usize),
            events: file.events,
            start_range_m: file.start_range_m,
            noise_db: file.noise_db,
            prf: file.prf,
            range_resolution: file.range_resolution,
            range_offset: file.range_offset,
            range_bins: file.range_bins,
            range_spread_m: file.range_spread_m.unwrap_or(DEFAULT_RANGE_SPREAD_M),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "M = {}", self.range_bins);
        let _ = writeln!(s, "N = {}", self.pulses);
        let _ = writeln!(s, "prf = {:?}", self.prf);
        let _ = writeln!(s, "range_resolution = {:?}", self.range_resolution);
        let _ = writeln!(s, "range_offset = {:?}", self.range_offset);
        let _ = writeln!(s, "range_spread_m = {:?}", self.range_spread_m);
        let _ = writeln!(s, "start_range_m = {:?}", self.start_range_m);
        if let Some(db) = self.noise_db {
            let _ = writeln!(s, "noise_db = {db:?}");
        }
        for e in &self.events {
            s.push_str("\n[[event]]\n");
            match e {
                Event::Walk {
                    duration_s,
                    speed_m_per_s,
                } => {
                    let _ = writeln!(s, "kind = \"walk\"\nduration_s = {duration_s:?}\nspeed_m_per_s = {speed_m_per_s:?}");
                }
                Event::StillBurst {
                    duration_s,
                    band_hz,
                    amplitude,
                    taper,
                } => {
                    let _ = writeln!(
                        s,
                        "kind = \"still_burst\"\nduration_s = {duration_s:?}\nband_hz = [{:?}, {:?}]\namplitude = {amplitude:?}\ntaper = {taper:?}",
                        band_hz.0, band_hz.1
                    );
                }
                Event::Quiet { duration_s } => {
                    let _ = writeln!(s, "kind = \"quiet\"\nduration_s = {duration_s:?}");
                }
            }
        }
        s
    }

    pub fn duration_s(&self) -> f64 {
        self.pulses as f64 / self.prf
    }

    fn max_range(&self) -> f64 {
        self.range_offset + (self.range_bins as f64 - 1.0) * self.range_resolution
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.range_bins == 0 || self.pulses == 0 {
            return cfg(format!("scenario needs M, N >= 1, got {}x{}", self.range_bins, self.pulses));
        }
        for (name, v) in [
            ("prf", self.prf),
            ("range_resolution", self.range_resolution),
            ("range_spread_m", self.range_spread_m),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return cfg(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.range_offset.is_finite() {
            return cfg(format!("range_offset must be finite, got {}", self.range_offset));
        }
        if let Some(db) = self.noise_db {
            if !db.is_finite() {
                return cfg(format!("noise_db must be finite, got {db}"));
            }
        }
        let nyquist = self.prf / 2.0;
        let mut range = self.start_range_m;
        let (lo, hi) = (self.range_offset, self.max_range());
        if !(lo..=hi).contains(&range) {
            return cfg(format!("start range {range} m outside [{lo}, {hi}] m"));
        }
        for (i, e) in self.events.iter().enumerate() {
            let d = e.duration_s();
            if !(d.is_finite() && d > 0.0) {
                return cfg(format!("event {i} has non-positive duration {d}"));
            }
            match *e {
                Event::Walk { speed_m_per_s: v, .. } => {
                    if !(v.is_finite() && v.abs() <= MAX_WALK_SPEED) {
                        return cfg(format!("event {i}: walk speed {v} m/s outside +-{MAX_WALK_SPEED}"));
                    }
                    range += v * d;
                    if !(lo..=hi).contains(&range) {
                        return cfg(format!("event {i}: walk ends at {range:.2} m, outside [{lo}, {hi}] m"));
                    }
                }
                Event::StillBurst {
                    band_hz: (f1, f2),
                    amplitude,
                    taper,
                    ..
                } => {
                    if !(f1 < f2 && f1 >= -nyquist && f2 <= nyquist) {
                        return cfg(format!("event {i}: burst band [{f1}, {f2}] Hz outside +-{nyquist} Hz"));
                    }
                    if !(amplitude.is_finite() && amplitude >= 0.0) {
                        return cfg(format!("event {i}: burst amplitude must be >= 0, got {amplitude}"));
                    }
                    if !(0.0..=1.0).contains(&taper) {
                        return cfg(format!("event {i}: taper must lie in [0, 1], got {taper}"));
                    }
                }
                Event::Quiet { .. } => {}
            }
        }
        let needed = self.event_pulse_bounds().last().copied().unwrap_or(0);
        if needed > self.pulses {
            return Err(Error::Size(format!("events need {needed} pulses, cube has N = {}", self.pulses)));
        }
        Ok(())
    }

    /// Pulse index at which each event starts, plus the end of the last.
    fn event_pulse_bounds(&self) -> Vec<usize> {
        let mut t = 0.0;
        let mut out = vec![0];
        for e in &self.events {
            t += e.duration_s();
            out.push((t * self.prf).round() as usize);
        }
        out
    }

    fn has_subject(&self) -> bool {
        self.events.iter().any(|e| !matches!(e, Event::Quiet { .. }))
    }
}

/// One straight range-map line of the truth, in image coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthLine {
    pub slope: f64,
    pub intercept: f64,
    pub theta: f64,
    pub x_prime: f64,
}

impl TruthLine {
    pub fn from_model(line: &LineModel) -> Self {
        Self {
            slope: line.slope,
            intercept: line.intercept,
            theta: line.theta,
            x_prime: line.x_prime,
        }
    }
}

/// Constant-velocity stretch of the subject's range trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthMotion {
    pub start_s: f64,
    pub end_s: f64,
    pub start_range_m: f64,
    pub speed_m_per_s: f64,
}

impl TruthMotion {
    pub fn range_at(&self, t: f64) -> f64 {
        self.start_range_m + self.speed_m_per_s * (t - self.start_s)
    }

    /// The motion as a line of an image with the given geometry.
    pub fn line_in(&self, geometry: ImageGeometry) -> TruthLine {
        let slope = self.speed_m_per_s * geometry.col_axis.step / geometry.row_axis.step;
        let row0 = geometry.row_axis.index_of(self.range_at(geometry.col_axis.at(0.0)));
        TruthLine::from_model(&LineModel::from_pixel_line(slope, row0, geometry))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    pub transition_times_s: Vec<f64>,
    pub activity_spans_s: Vec<(f64, f64)>,
    pub line_params: Vec<TruthLine>,
    pub motions: Vec<TruthMotion>,
}

impl GroundTruth {
    /// `key = value` text, arrays in brackets.
    pub fn to_text(&self) -> String {
        let list = |items: Vec<String>| format!("[{}]", items.join(", "));
        let mut s = String::new();
        let _ = writeln!(
            s,
            "transition_times_s = {}",
            list(self.transition_times_s.iter().map(|t| format!("{t:?}")).collect())
        );
        let _ = writeln!(
            s,
            "activity_spans_s = {}",
            list(self.activity_spans_s.iter().map(|(a, b)| format!("[{a:?}, {b:?}]")).collect())
        );
        let _ = writeln!(
            s,
            "line_params = {}",
            list(
                self.line_params
                    .iter()
                    .map(|l| format!("[{:?}, {:?}, {:?}, {:?}]", l.slope, l.intercept, l.theta, l.x_prime))
                    .collect()
            )
        );
        let _ = writeln!(
            s,
            "motions = {}",
            list(
                self.motions
                    .iter()
                    .map(|m| format!("[{:?}, {:?}, {:?}, {:?}]", m.start_s, m.end_s, m.start_range_m, m.speed_m_per_s))
                    .collect()
            )
        );
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        let rows = |key: &str, width: usize| -> Result<Vec<Vec<f64>>> {
            let Some(v) = table.get(key) else {
                return Ok(Vec::new());
            };
            let bad = || Error::Config(format!("`{key}` must be an array of numbers"));
            let number = |v: &toml::Value| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)).ok_or_else(bad);
            v.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|item| match (width, item.as_array()) {
                    (1, _) => Ok(vec![number(item)?]),
                    (_, Some(a)) if a.len() == width => a.iter().map(number).collect(),
                    _ => Err(bad()),
                })
                .collect()
        };
        Ok(Self {
            transition_times_s: rows("transition_times_s", 1)?.into_iter().map(|r| r[0]).collect(),
            activity_spans_s: rows("activity_spans_s", 2)?.into_iter().map(|r| (r[0], r[1])).collect(),
            line_params: rows("line_params", 4)?
                .into_iter()
                .map(|r| TruthLine {
                    slope: r[0],
                    intercept: r[1],
                    theta: r[2],
                    x_prime: r[3],
                })
                .collect(),
            motions: rows("motions", 4)?
                .into_iter()
                .map(|r| TruthMotion {
                    start_s: r[0],
                    end_s: r[1],
                    start_range_m: r[2],
                    speed_m_per_s: r[3],
                })
                .collect(),
        })
    }
}

/// Tukey window value at normalized position `u` in `[0, 1]`.
pub fn tapered_envelope(u: f64, taper: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return 0.0;
    }
    let edge = taper / 2.0;
    if edge <= 0.0 {
        return 1.0;
    }
    let d = u.min(1.0 - u);
    if d >= edge {
        1.0
    } else {
        0.5 - 0.5 * (PI * d / edge).cos()
    }
}

/// Generates the cube and its ground truth. Identical `(spec, seed)` pairs
/// give bit-identical cubes.
pub fn synth_cube(spec: &ScenarioSpec, seed: u64) -> Result<(RadarCube, GroundTruth)> {
    spec.validate()?;
    let n = spec.pulses;
    let bounds = spec.event_pulse_bounds();
    let lambda = wavelength();
    let present = spec.has_subject();

    // per-pulse range and complex reflectivity of the subject
    let mut range = vec![spec.start_range_m; n];
    let mut reflect = vec![Complex64::new(0.0, 0.0); n];
    let mut r = spec.start_range_m;
    let mut tone_rng = ChaCha8Rng::seed_from_u64(seed);
    tone_rng.set_stream(u64::MAX);
    for (k, e) in spec.events.iter().enumerate() {
        let (p0, p1) = (bounds[k], bounds[k + 1]);
        let t0 = p0 as f64 / spec.prf;
        let burst = match *e {
            Event::StillBurst {
                band_hz,
                amplitude,
                taper,
                duration_s,
            } => {
                let tones: Vec<(f64, f64)> = (0..BURST_TONES)
                    .map(|i| {
                        let f = band_hz.0 + (band_hz.1 - band_hz.0) * (i as f64 + 0.5) / BURST_TONES as f64;
                        (f, tone_rng.random::<f64>() * 2.0 * PI)
                    })
                    .collect();
                Some((tones, amplitude / (BURST_TONES as f64).sqrt(), taper, duration_s))
            }
            _ => None,
        };
        let v = e.speed();
        for p in p0..p1 {
            let t = p as f64 / spec.prf;
            range[p] = r + v * (t - t0);
            if let Some((tones, a, taper, d)) = &burst {
                let env = a * tapered_envelope((t - t0) / d, *taper);
                reflect[p] = tones
                    .iter()
                    .map(|&(f, ph)| Complex64::from_polar(env, 2.0 * PI * f * (t - t0) + ph))
                    .sum();
            }
        }
        r += v * (p1 - p0) as f64 / spec.prf;
    }
    for p in bounds.last().copied().unwrap_or(0)..n {
        range[p] = r;
    }
    if present {
        for p in 0..n {
            reflect[p] += Complex64::from_polar(1.0, 4.0 * PI * range[p] / lambda);
        }
    }

    let noise_sigma = spec.noise_db.map(|db| (10f64.powf(-db / 10.0) / 2.0).sqrt());
    let two_var = 2.0 * spec.range_spread_m * spec.range_spread_m;
    let rows: Vec<Vec<Complex32>> = (0..spec.range_bins)
        .into_par_iter()
        .map(|b| {
            let rb = spec.range_offset + b as f64 * spec.range_resolution;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let normal = noise_sigma.map(|s| Normal::new(0.0, s).expect("finite sigma"));
            (0..n)
                .map(|p| {
                    let g = (-(rb - range[p]).powi(2) / two_var).exp();
                    let mut s = reflect[p] * g;
                    if let Some(dist) = &normal {
                        s += Complex64::new(dist.sample(&mut rng), dist.sample(&mut rng));
                    }
                    Complex32::new(s.re as f32, s.im as f32)
                })
                .collect()
        })
        .collect();
    let cube = RadarCube::new(
        rows.into_iter().flatten().collect(),
        spec.range_bins,
        n,
        spec.prf,
        spec.range_resolution,
        spec.range_offset,
    )?;
    Ok((cube, ground_truth(spec)))
}

fn ground_truth(spec: &ScenarioSpec) -> GroundTruth {
    let mut truth = GroundTruth::default();
    if !spec.has_subject() {
        return truth;
    }
    let bounds = spec.event_pulse_bounds();
    let time = |p: usize| p as f64 / spec.prf;
    let mut r = spec.start_range_m;
    for (k, e) in spec.events.iter().enumerate() {
        let (t0, t1) = (time(bounds[k]), time(bounds[k + 1]));
        let v = e.speed();
        match truth.motions.last_mut() {
            Some(last) if last.speed_m_per_s == v => last.end_s = t1,
            _ => {
                if !truth.motions.is_empty() {
                    truth.transition_times_s.push(t0);
                }
                truth.motions.push(TruthMotion {
                    start_s: t0,
                    end_s: t1,
                    start_range_m: r,
                    speed_m_per_s: v,
                });
            }
        }
        if matches!(e, Event::StillBurst { .. }) {
            truth.activity_spans_s.push((t0, t1));
        }
        r += v * (t1 - t0);
    }
    let end = time(spec.pulses);
    match truth.motions.last_mut() {
        Some(last) if last.speed_m_per_s == 0.0 => last.end_s = end,
        Some(_) if end > time(bounds[bounds.len() - 1]) => {
            truth.transition_times_s.push(time(bounds[bounds.len() - 1]));
            truth.motions.push(TruthMotion {
                start_s: time(bounds[bounds.len() - 1]),
                end_s: end,
                start_range_m: r,
                speed_m_per_s: 0.0,
            });
        }
        _ => {}
    }
    let geometry = ImageGeometry {
        rows: spec.range_bins,
        cols: spec.pulses,
        row_axis: AxisMap::new(spec.range_offset, spec.range_resolution),
        col_axis: AxisMap::new(0.0, 1.0 / spec.prf),
    };
    truth.line_params = truth.motions.iter().map(|m| m.line_in(geometry)).collect();
    truth
}

/// Rasterizes lines `(m, n)` (centered image coordinates, as in
/// [`LineModel`]) into a thresholded-stage image with unit axes.
///
/// Each line is drawn along its major axis with a two-pixel linear split
/// across the minor axis; overlapping lines keep the larger value.
/// `noise_density` is the fraction of pixels set to random values in
/// `[0.75, 1]`.
pub fn synth_line_image(
    lines: &[(f64, f64)],
    dims: (usize, usize),
    amplitude: f64,
    noise_density: f64,
    seed: u64,
) -> Result<(RangeMapImage, GroundTruth)> {
    let (rows, cols) = dims;
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyInput("line image needs nonzero dimensions".into()));
    }
    let geometry = ImageGeometry::unit(rows, cols);
    let mut px = vec![0.0f64; rows * cols];
    let mut put = |r: isize, c: isize, v: f64| {
        if r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols {
            let cell = &mut px[r as usize * cols + c as usize];
            *cell = cell.max(v);
        }
    };
    let models: Vec<LineModel> = lines
        .iter()
        .map(|&(m, n)| {
            let row0 = geometry.center_row() - n - m * geometry.center_col();
            LineModel::from_pixel_line(m, row0, geometry)
        })
        .collect();
    for line in &models {
        if line.slope.abs() <= 1.0 {
            for c in 0..cols {
                let y = line.row_at(c as f64);
                let f = y.floor();
                put(f as isize, c as isize, amplitude * (1.0 - (y - f)));
                put(f as isize + 1, c as isize, amplitude * (y - f));
            }
        } else {
            let row0 = line.pixel_intercept();
            for r in 0..rows {
                let x = (r as f64 - row0) / line.slope;
                let f = x.floor();
                put(r as isize, f as isize, amplitude * (1.0 - (x - f)));
                put(r as isize, f as isize + 1, amplitude * (x - f));
            }
        }
    }
    if noise_density > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in px.iter_mut() {
            if rng.random::<f64>() < noise_density {
                *v = v.max(rng.random_range(0.75..=1.0));
            }
        }
    }

    let mut truth = GroundTruth {
        line_params: models.iter().map(TruthLine::from_model).collect(),
        ..GroundTruth::default()
    };
    for pair in models.windows(2) {
        let det = pair[0].slope - pair[1].slope;
        if det != 0.0 {
            truth
                .transition_times_s
                .push((pair[1].pixel_intercept() - pair[0].pixel_intercept()) / det);
        }
    }
    let image = RangeMapImage::from_pixels(px, rows, cols, Stage::Thresholded)?;
    Ok((image, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small(events: Vec<Event>) -> ScenarioSpec {
        ScenarioSpec {
            events,
            start_range_m: 10.0,
            noise_db: Some(20.0),
            prf: 500.0,
            range_resolution: 0.1,
            range_offset: 0.0,
            range_bins: 200,
            pulses: 5000,
            range_spread_m: 0.25,
        }
    }

    #[test]
    fn doppler_of_one_meter_per_second() {
        assert_relative_eq!(wavelength(), 0.012_491_352, epsilon = 1e-8);
        assert_relative_eq!(doppler_hz(-1.0), -160.11, epsilon = 0.01);
    }

    #[test]
    fn quiet_only_is_pure_noise() {
        let (cube, truth) = synth_cube(&small(vec![Event::quiet(10.0)]), 3).unwrap();
        assert_eq!(truth, GroundTruth::default());
        let power: f64 = cube.samples().iter().map(|s| s.norm_sqr() as f64).sum::<f64>() / cube.samples().len() as f64;
        assert_relative_eq!(power, 0.01, max_relative = 0.02);
    }

    #[test]
    fn walk_has_matching_range_slope_and_tone() {
        let mut spec = small(vec![Event::walk(10.0, -1.0)]);
        spec.noise_db = None;
        let (cube, truth) = synth_cube(&spec, 1).unwrap();
        assert!(truth.transition_times_s.is_empty());
        assert_eq!(truth.motions.len(), 1);

        // range of the strongest bin follows the walk
        let peak_bin = |p: usize| {
            (0..cube.range_bins())
                .max_by(|&a, &b| cube.sample(a, p).norm().total_cmp(&cube.sample(b, p).norm()))
                .unwrap()
        };
        let (r0, r1) = (cube.bin_range_m(peak_bin(0)), cube.bin_range_m(peak_bin(4999)));
        assert_relative_eq!((r1 - r0) / (4999.0 / 500.0), -1.0, epsilon = 0.02);

        // phase advance per pulse at the peak bin matches -160 Hz
        let b = peak_bin(2500);
        let dphi = (cube.sample(b, 2501) * cube.sample(b, 2500).conj()).arg() as f64;
        assert_relative_eq!(dphi * 500.0 / (2.0 * PI), doppler_hz(-1.0), epsilon = 0.5);
    }

    #[test]
    fn walk_sit_stand_truth_by_construction() {
        let spec = small(vec![
            Event::walk(4.0, -0.8),
            Event::burst(1.5, (-150.0, -40.0)),
            Event::quiet(2.0),
            Event::burst(1.0, (40.0, 150.0)),
        ]);
        let (_, truth) = synth_cube(&spec, 9).unwrap();
        assert_eq!(truth.transition_times_s, vec![4.0]);
        assert_eq!(truth.activity_spans_s, vec![(4.0, 5.5), (7.5, 8.5)]);
        assert_eq!(truth.motions.len(), 2);
        assert_eq!(truth.motions[1].end_s, 10.0);
        assert_relative_eq!(truth.motions[1].start_range_m, 10.0 - 3.2, epsilon = 1e-12);
        assert_eq!(truth.line_params[1].slope, 0.0);
        assert_relative_eq!(truth.line_params[1].theta, 90.0);
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = small(vec![Event::walk(3.0, 0.5), Event::burst(2.0, (-100.0, -30.0))]);
        let (a, _) = synth_cube(&spec, 42).unwrap();
        let (b, _) = synth_cube(&spec, 42).unwrap();
        let (c, _) = synth_cube(&spec, 43).unwrap();
        assert_eq!(a.payload_bytes(), b.payload_bytes());
        assert_ne!(a.payload_bytes(), c.payload_bytes());
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            synth_cube(&small(vec![Event::quiet(0.0)]), 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            synth_cube(&small(vec![Event::walk(1.0, 3.5)]), 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            synth_cube(&small(vec![Event::burst(1.0, (-300.0, -20.0))]), 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            synth_cube(&small(vec![Event::quiet(11.0)]), 0),
            Err(Error::Size(_))
        ));
        assert!(matches!(
            synth_cube(&small(vec![Event::walk(6.0, 2.0)]), 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn toml_round_trip() {
        let spec = ScenarioSpec::walk_sit_stand();
        let back = ScenarioSpec::from_toml_str(&spec.to_toml_string()).unwrap();
        assert_eq!(back, spec);
        assert!(ScenarioSpec::from_toml_str("prf = 1.0\nbogus = 2\n").is_err());
        let text = "M = 64\nprf = 400.0\nrange_resolution = 0.2\nstart_range_m = 5.0\n\n[[event]]\nkind = \"quiet\"\nduration_s = 2.5\n";
        let s = ScenarioSpec::from_toml_str(text).unwrap();
        assert_eq!(s.pulses, 1000);
        assert_eq!(s.noise_db, None);
        let bad = "M = 64\nprf = 400.0\nrange_resolution = 0.2\nstart_range_m = 5.0\n\n[[event]]\nkind = \"quiet\"\nduration_s = 2.5\nspeed_m_per_s = 1.0\n";
        assert!(ScenarioSpec::from_toml_str(bad).is_err());
    }

    #[test]
    fn truth_text_round_trip() {
        let spec = small(vec![Event::walk(4.0, -0.8), Event::burst(1.5, (-150.0, -40.0))]);
        let (_, truth) = synth_cube(&spec, 1).unwrap();
        assert_eq!(GroundTruth::from_text(&truth.to_text()).unwrap(), truth);
    }

    #[test]
    fn envelope_shape() {
        assert_eq!(tapered_envelope(0.5, 0.1), 1.0);
        assert_eq!(tapered_envelope(0.0, 0.1), 0.0);
        assert_relative_eq!(tapered_envelope(0.025, 0.1), 0.5, epsilon = 1e-12);
        assert_eq!(tapered_envelope(1.2, 0.1), 0.0);
        assert_eq!(tapered_envelope(0.0, 0.0), 1.0);
    }

    #[test]
    fn horizontal_line_truth() {
        let n = 63.5 - 40.0;
        let (img, truth) = synth_line_image(&[(0.0, n)], (128, 384), 1.0, 0.0, 0).unwrap();
        assert_eq!(truth.line_params[0].theta, 90.0);
        assert_relative_eq!(truth.line_params[0].x_prime, 23.5);
        assert!(img.row(40).iter().all(|&v| v == 1.0));
        assert_relative_eq!(img.total_mass(), 384.0);
    }

    #[test]
    fn sloped_line_inverse_relations() {
        let (img, truth) = synth_line_image(&[(0.5, 10.0)], (128, 384), 1.0, 0.0, 0).unwrap();
        let t = truth.line_params[0];
        assert_relative_eq!(t.theta, (1.0f64 / 0.5).atan().to_degrees(), epsilon = 1e-12);
        assert_relative_eq!(t.x_prime, 10.0 * t.theta.to_radians().sin(), epsilon = 1e-12);
        assert!(img.total_mass() > 0.0);
    }

    #[test]
    fn crossing_lines_intersection() {
        // row = 0.5 c + 10 and row = -0.5 c + 110 meet at c = 100, row = 60
        let g = ImageGeometry::unit(128, 384);
        let n = |m: f64, row0: f64| g.center_row() - row0 - m * g.center_col();
        let (_, truth) = synth_line_image(&[(0.5, n(0.5, 10.0)), (-0.5, n(-0.5, 110.0))], (128, 384), 1.0, 0.0, 0).unwrap();
        assert_relative_eq!(truth.transition_times_s[0], 100.0, epsilon = 1e-9);
    }
}
