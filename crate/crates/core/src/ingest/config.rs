//! Pipeline configuration.
//!
//! The document is UTF-8 `key = value` text with dotted keys, for example
//! `pbc.ma_window = 5`. Keys that are absent keep their defaults, which are
//! the reference parameter values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Short-time analysis taper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Hann,
    Hamming,
    Rectangular,
}

impl WindowKind {
    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Hann => "hann",
            WindowKind::Hamming => "hamming",
            WindowKind::Rectangular => "rectangular",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hann" => Some(WindowKind::Hann),
            "hamming" => Some(WindowKind::Hamming),
            "rectangular" | "rect" => Some(WindowKind::Rectangular),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocConfig {
    /// Lower clamp for `20 log10 |x|`, in dB.
    pub db_floor: f64,
    /// `(rows, cols)` after uniform sub-sampling.
    pub downsample_target: (usize, usize),
    /// Smoothing kernel half-width `k`; the kernel side is `2k + 1`.
    pub kernel_half_width: usize,
    /// Range-map threshold on the normalized scale.
    pub rm_threshold: f64,
}

impl Default for PreprocConfig {
    fn default() -> Self {
        Self {
            db_floor: -120.0,
            downsample_target: (128, 384),
            kernel_half_width: 1,
            rm_threshold: 0.75,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadonConfig {
    /// Angle grid step in degrees.
    pub theta_step: f64,
    pub max_peaks: usize,
    /// Peaks below this fraction of the global maximum are dropped.
    pub min_rel_height: f64,
    /// Non-maximum suppression half-extent along the angle axis, degrees.
    pub min_separation_deg: f64,
    /// Non-maximum suppression half-extent along the offset axis, bins.
    pub min_separation_bins: usize,
    /// Pixels within this many rows of a line count as its support.
    pub support_rows: f64,
}

impl Default for RadonConfig {
    fn default() -> Self {
        Self {
            theta_step: 1.0,
            max_peaks: 6,
            min_rel_height: 0.5,
            min_separation_deg: 5.0,
            min_separation_bins: 5,
            support_rows: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StftConfig {
    /// Window length in pulses; `None` means 0.2 s worth of pulses.
    pub window_len: Option<usize>,
    /// Hop in pulses; `None` means a quarter window.
    pub hop: Option<usize>,
    pub window: WindowKind,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            window_len: None,
            hop: None,
            window: WindowKind::Hann,
        }
    }
}

pub const DEFAULT_STFT_WINDOW_S: f64 = 0.2;

impl StftConfig {
    /// Concrete `(window_len, hop)` in pulses for a given PRF.
    pub fn resolve(&self, prf: f64) -> (usize, usize) {
        let window_len = self
            .window_len
            .unwrap_or_else(|| ((DEFAULT_STFT_WINDOW_S * prf).round() as usize).max(2));
        let hop = self.hop.unwrap_or((window_len / 4).max(1));
        (window_len, hop)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PbcConfig {
    /// Positive Doppler band `(K_P1, K_P2)` in Hz.
    pub band_pos: (f64, f64),
    /// Negative Doppler band `(K_N1, K_N2)` in Hz.
    pub band_neg: (f64, f64),
    /// Moving-average length `w` in frames.
    pub ma_window: usize,
    /// Threshold as a fraction of the curve's dynamic range above its minimum.
    pub rel_threshold: f64,
    /// Shortest span kept, seconds.
    pub min_span: f64,
    /// Gaps shorter than this many frames are bridged; `None` means `ma_window`.
    pub gap_merge: Option<usize>,
}

impl Default for PbcConfig {
    fn default() -> Self {
        Self {
            band_pos: (20.0, 270.0),
            band_neg: (-270.0, -20.0),
            ma_window: 5,
            rel_threshold: 0.03,
            min_span: 0.5,
            gap_merge: None,
        }
    }
}

impl PbcConfig {
    pub fn gap_merge_frames(&self) -> usize {
        self.gap_merge.unwrap_or(self.ma_window)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmenterConfig {
    /// Physical slopes at or below this magnitude (m/s) count as in-place.
    pub slope_floor: f64,
    /// Seconds trimmed from each segment edge that touches a transition.
    pub transition_guard: f64,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            slope_floor: 0.1,
            transition_guard: 0.5,
        }
    }
}

/// Every tunable of the pipeline.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineConfig {
    pub preproc: PreprocConfig,
    pub radon: RadonConfig,
    pub stft: StftConfig,
    pub pbc: PbcConfig,
    pub segmenter: SegmenterConfig,
}

fn float(key: &str, v: &toml::Value) -> Result<f64> {
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .ok_or_else(|| Error::Config(format!("`{key}` must be a number, got {v}")))
}

fn uint(key: &str, v: &toml::Value) -> Result<usize> {
    v.as_integer()
        .and_then(|i| usize::try_from(i).ok())
        .ok_or_else(|| Error::Config(format!("`{key}` must be a non-negative integer, got {v}")))
}

fn auto_or_uint(key: &str, v: &toml::Value) -> Result<Option<usize>> {
    match v.as_str() {
        Some("auto") => Ok(None),
        _ => uint(key, v).map(Some),
    }
}

fn pair<T>(key: &str, v: &toml::Value, elem: fn(&str, &toml::Value) -> Result<T>) -> Result<(T, T)> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([a, b]) => Ok((elem(key, a)?, elem(key, b)?)),
        _ => Err(Error::Config(format!("`{key}` must be a two-element array, got {v}"))),
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => out.push((key, other.clone())),
        }
    }
}

fn check(ok: bool, key: &str, value: impl std::fmt::Display, bounds: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("`{key}` = {value} is out of range; expected {bounds}")))
    }
}

impl PipelineConfig {
    /// Parses a configuration document; absent keys keep their defaults.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(format!("malformed document: {}", e.message())))?;
        let mut entries = Vec::new();
        flatten("", &table, &mut entries);

        let mut cfg = PipelineConfig::default();
        for (key, v) in &entries {
            cfg.set(key, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &toml::Value) -> Result<()> {
        match key {
            "preproc.db_floor" => self.preproc.db_floor = float(key, v)?,
            "preproc.downsample_target" => self.preproc.downsample_target = pair(key, v, uint)?,
            "preproc.kernel_half_width" => self.preproc.kernel_half_width = uint(key, v)?,
            "preproc.rm_threshold" => self.preproc.rm_threshold = float(key, v)?,
            "radon.theta_step" => self.radon.theta_step = float(key, v)?,
            "radon.max_peaks" => self.radon.max_peaks = uint(key, v)?,
            "radon.min_rel_height" => self.radon.min_rel_height = float(key, v)?,
            "radon.min_separation_deg" => self.radon.min_separation_deg = float(key, v)?,
            "radon.min_separation_bins" => self.radon.min_separation_bins = uint(key, v)?,
            "radon.support_rows" => self.radon.support_rows = float(key, v)?,
            "stft.window_len" => self.stft.window_len = auto_or_uint(key, v)?,
            "stft.hop" => self.stft.hop = auto_or_uint(key, v)?,
            "stft.window" => {
                self.stft.window = v
                    .as_str()
                    .and_then(WindowKind::parse)
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "`{key}` must be one of \"hann\", \"hamming\", \"rectangular\", got {v}"
                        ))
                    })?
            }
            "pbc.band_pos" => self.pbc.band_pos = pair(key, v, float)?,
            "pbc.band_neg" => self.pbc.band_neg = pair(key, v, float)?,
            "pbc.ma_window" => self.pbc.ma_window = uint(key, v)?,
            "pbc.rel_threshold" => self.pbc.rel_threshold = float(key, v)?,
            "pbc.min_span" => self.pbc.min_span = float(key, v)?,
            "pbc.gap_merge" => self.pbc.gap_merge = auto_or_uint(key, v)?,
            "segmenter.slope_floor" => self.segmenter.slope_floor = float(key, v)?,
            "segmenter.transition_guard" => self.segmenter.transition_guard = float(key, v)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Checks every documented bound.
    pub fn validate(&self) -> Result<()> {
        let p = &self.preproc;
        check(p.db_floor.is_finite(), "preproc.db_floor", p.db_floor, "a finite dB value")?;
        let (r, c) = p.downsample_target;
        check(r >= 1 && c >= 1, "preproc.downsample_target", format!("[{r}, {c}]"), "both dimensions >= 1")?;
        check(
            p.rm_threshold > 0.0 && p.rm_threshold <= 1.0,
            "preproc.rm_threshold",
            p.rm_threshold,
            "(0, 1]",
        )?;

        let rd = &self.radon;
        check(
            rd.theta_step > 0.0 && rd.theta_step <= 90.0,
            "radon.theta_step",
            rd.theta_step,
            "(0, 90] degrees",
        )?;
        check(rd.max_peaks >= 1, "radon.max_peaks", rd.max_peaks, ">= 1")?;
        check(
            rd.min_rel_height > 0.0 && rd.min_rel_height <= 1.0,
            "radon.min_rel_height",
            rd.min_rel_height,
            "(0, 1]",
        )?;
        check(
            rd.min_separation_deg >= 0.0 && rd.min_separation_deg.is_finite(),
            "radon.min_separation_deg",
            rd.min_separation_deg,
            ">= 0",
        )?;
        check(
            rd.support_rows > 0.0 && rd.support_rows.is_finite(),
            "radon.support_rows",
            rd.support_rows,
            "> 0",
        )?;

        let s = &self.stft;
        if let Some(w) = s.window_len {
            check(w >= 2, "stft.window_len", w, ">= 2 pulses")?;
        }
        if let Some(h) = s.hop {
            check(h >= 1, "stft.hop", h, ">= 1 pulse")?;
        }

        let b = &self.pbc;
        check(
            b.band_pos.0 > 0.0 && b.band_pos.0 < b.band_pos.1 && b.band_pos.1.is_finite(),
            "pbc.band_pos",
            format!("[{}, {}]", b.band_pos.0, b.band_pos.1),
            "0 < K_P1 < K_P2",
        )?;
        check(
            b.band_neg.1 < 0.0 && b.band_neg.0 < b.band_neg.1 && b.band_neg.0.is_finite(),
            "pbc.band_neg",
            format!("[{}, {}]", b.band_neg.0, b.band_neg.1),
            "K_N1 < K_N2 < 0",
        )?;
        check(b.ma_window >= 1, "pbc.ma_window", b.ma_window, ">= 1")?;
        check(
            b.rel_threshold > 0.0 && b.rel_threshold < 1.0,
            "pbc.rel_threshold",
            b.rel_threshold,
            "(0, 1)",
        )?;
        check(b.min_span >= 0.0 && b.min_span.is_finite(), "pbc.min_span", b.min_span, ">= 0 s")?;

        let g = &self.segmenter;
        check(
            g.slope_floor >= 0.0 && g.slope_floor.is_finite(),
            "segmenter.slope_floor",
            g.slope_floor,
            ">= 0 m/s",
        )?;
        check(
            g.transition_guard >= 0.0 && g.transition_guard.is_finite(),
            "segmenter.transition_guard",
            g.transition_guard,
            ">= 0 s",
        )?;
        Ok(())
    }

    /// Serializes every key, so the output reloads to an identical config.
    pub fn to_kv_string(&self) -> String {
        fn opt(v: Option<usize>) -> String {
            v.map_or_else(|| "\"auto\"".to_string(), |v| v.to_string())
        }
        let mut s = String::new();
        let p = &self.preproc;
        let _ = writeln!(s, "preproc.db_floor = {:?}", p.db_floor);
        let _ = writeln!(
            s,
            "preproc.downsample_target = [{}, {}]",
            p.downsample_target.0, p.downsample_target.1
        );
        let _ = writeln!(s, "preproc.kernel_half_width = {}", p.kernel_half_width);
        let _ = writeln!(s, "preproc.rm_threshold = {:?}", p.rm_threshold);
        let r = &self.radon;
        let _ = writeln!(s, "radon.theta_step = {:?}", r.theta_step);
        let _ = writeln!(s, "radon.max_peaks = {}", r.max_peaks);
        let _ = writeln!(s, "radon.min_rel_height = {:?}", r.min_rel_height);
        let _ = writeln!(s, "radon.min_separation_deg = {:?}", r.min_separation_deg);
        let _ = writeln!(s, "radon.min_separation_bins = {}", r.min_separation_bins);
        let _ = writeln!(s, "radon.support_rows = {:?}", r.support_rows);
        let st = &self.stft;
        let _ = writeln!(s, "stft.window_len = {}", opt(st.window_len));
        let _ = writeln!(s, "stft.hop = {}", opt(st.hop));
        let _ = writeln!(s, "stft.window = \"{}\"", st.window.name());
        let b = &self.pbc;
        let _ = writeln!(s, "pbc.band_pos = [{:?}, {:?}]", b.band_pos.0, b.band_pos.1);
        let _ = writeln!(s, "pbc.band_neg = [{:?}, {:?}]", b.band_neg.0, b.band_neg.1);
        let _ = writeln!(s, "pbc.ma_window = {}", b.ma_window);
        let _ = writeln!(s, "pbc.rel_threshold = {:?}", b.rel_threshold);
        let _ = writeln!(s, "pbc.min_span = {:?}", b.min_span);
        let _ = writeln!(s, "pbc.gap_merge = {}", opt(b.gap_merge));
        let g = &self.segmenter;
        let _ = writeln!(s, "segmenter.slope_floor = {:?}", g.slope_floor);
        let _ = writeln!(s, "segmenter.transition_guard = {:?}", g.transition_guard);
        s
    }
}

/// Reads a configuration document from disk.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    PipelineConfig::from_kv_str(&text)
}
