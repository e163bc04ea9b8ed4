//! Radar cube container and its on-disk format.
//!
//! A cube is stored as two files sharing a base name:
//!
//! * `<base>.hdr` - UTF-8 text, one `key = value` per line with the keys
//!   `version`, `M`, `N`, `prf`, `range_resolution`, `range_offset`.
//! * `<base>.bin` - raw little-endian `f32` values, interleaved `(I, Q)`,
//!   range-bin-major: all `N` pulses of bin 0, then bin 1, and so on.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex32;

use crate::error::{Error, Result};

pub const CUBE_FORMAT_VERSION: i64 = 1;

const HEADER_KEYS: [&str; 6] = ["version", "M", "N", "prf", "range_resolution", "range_offset"];

/// Complex baseband samples indexed by `(range bin, slow-time pulse)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarCube {
    samples: Vec<Complex32>,
    range_bins: usize,
    pulses: usize,
    /// Pulse repetition frequency in Hz.
    pub prf: f64,
    /// Meters per range bin.
    pub range_resolution: f64,
    /// Range of bin 0 in meters.
    pub range_offset: f64,
}

impl RadarCube {
    /// Builds a cube from range-bin-major samples, checking every invariant.
    pub fn new(
        samples: Vec<Complex32>,
        range_bins: usize,
        pulses: usize,
        prf: f64,
        range_resolution: f64,
        range_offset: f64,
    ) -> Result<Self> {
        if range_bins == 0 || pulses == 0 {
            return Err(Error::Size(format!(
                "cube must have at least one bin and one pulse, got {range_bins}x{pulses}"
            )));
        }
        if samples.len() != range_bins * pulses {
            return Err(Error::Size(format!(
                "{} samples do not fill a {range_bins}x{pulses} cube",
                samples.len()
            )));
        }
        if !(prf.is_finite() && prf > 0.0) {
            return Err(Error::Data(format!("prf must be positive, got {prf}")));
        }
        if !(range_resolution.is_finite() && range_resolution > 0.0) {
            return Err(Error::Data(format!(
                "range_resolution must be positive, got {range_resolution}"
            )));
        }
        if !range_offset.is_finite() {
            return Err(Error::Data(format!("range_offset must be finite, got {range_offset}")));
        }
        if let Some(i) = samples.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::Data(format!(
                "non-finite sample at bin {}, pulse {}",
                i / pulses,
                i % pulses
            )));
        }
        Ok(Self {
            samples,
            range_bins,
            pulses,
            prf,
            range_resolution,
            range_offset,
        })
    }

    /// Number of range bins (`M`).
    pub fn range_bins(&self) -> usize {
        self.range_bins
    }

    /// Number of slow-time pulses (`N`).
    pub fn pulses(&self) -> usize {
        self.pulses
    }

    pub fn sample(&self, bin: usize, pulse: usize) -> Complex32 {
        self.samples[bin * self.pulses + pulse]
    }

    /// All pulses of one range bin.
    pub fn bin(&self, bin: usize) -> &[Complex32] {
        &self.samples[bin * self.pulses..(bin + 1) * self.pulses]
    }

    pub fn samples(&self) -> &[Complex32] {
        &self.samples
    }

    pub fn duration_s(&self) -> f64 {
        self.pulses as f64 / self.prf
    }

    pub fn bin_range_m(&self, bin: usize) -> f64 {
        self.range_offset + bin as f64 * self.range_resolution
    }

    pub fn header_text(&self) -> String {
        format!(
            "version = {}\nM = {}\nN = {}\nprf = {:?}\nrange_resolution = {:?}\nrange_offset = {:?}\n",
            CUBE_FORMAT_VERSION,
            self.range_bins,
            self.pulses,
            self.prf,
            self.range_resolution,
            self.range_offset
        )
    }

    pub fn payload_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.samples.len() * 8);
        for s in &self.samples {
            out.extend_from_slice(&s.re.to_le_bytes());
            out.extend_from_slice(&s.im.to_le_bytes());
        }
        out
    }

    /// Writes `<base>.hdr` and `<base>.bin`, returning both paths.
    pub fn write(&self, path: &Path) -> Result<(PathBuf, PathBuf)> {
        let (hdr, bin) = cube_paths(path);
        fs::write(&hdr, self.header_text()).map_err(|e| Error::io(&hdr, e))?;
        fs::write(&bin, self.payload_bytes()).map_err(|e| Error::io(&bin, e))?;
        Ok((hdr, bin))
    }
}

/// Resolves the header/payload pair for a cube path.
///
/// `run`, `run.hdr` and `run.bin` all name the pair `run.hdr` / `run.bin`.
pub fn cube_paths(path: &Path) -> (PathBuf, PathBuf) {
    let base = match path.extension().and_then(|e| e.to_str()) {
        Some("hdr") | Some("bin") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let with = |ext: &str| {
        let mut s = OsString::from(base.as_os_str());
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".hdr"), with(".bin"))
}

/// Cube metadata parsed from a header file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeHeader {
    pub range_bins: usize,
    pub pulses: usize,
    pub prf: f64,
    pub range_resolution: f64,
    pub range_offset: f64,
}

pub fn parse_header(text: &str, path: &Path) -> Result<CubeHeader> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::format(path, e.message().to_string()))?;
    for key in table.keys() {
        if !HEADER_KEYS.contains(&key.as_str()) {
            return Err(Error::format(path, format!("unknown header key `{key}`")));
        }
    }
    let get = |key: &str| {
        table
            .get(key)
            .ok_or_else(|| Error::format(path, format!("missing header key `{key}`")))
    };
    let int = |key: &str| -> Result<i64> {
        get(key)?
            .as_integer()
            .ok_or_else(|| Error::format(path, format!("`{key}` must be an integer")))
    };
    let float = |key: &str| -> Result<f64> {
        let v = get(key)?;
        v.as_float()
            .or_else(|| v.as_integer().map(|i| i as f64))
            .ok_or_else(|| Error::format(path, format!("`{key}` must be a number")))
    };

    let version = int("version")?;
    if version != CUBE_FORMAT_VERSION {
        return Err(Error::format(path, format!("unsupported version {version}")));
    }
    let dim = |key: &str| -> Result<usize> {
        let v = int(key)?;
        usize::try_from(v)
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::format(path, format!("`{key}` must be a positive integer, got {v}")))
    };
    Ok(CubeHeader {
        range_bins: dim("M")?,
        pulses: dim("N")?,
        prf: float("prf")?,
        range_resolution: float("range_resolution")?,
        range_offset: float("range_offset")?,
    })
}

pub fn read_header(path: &Path) -> Result<CubeHeader> {
    let (hdr, _) = cube_paths(path);
    let text = fs::read_to_string(&hdr).map_err(|e| match e.kind() {
        std::io::ErrorKind::InvalidData => Error::format(&hdr, "header is not UTF-8"),
        _ => Error::format(&hdr, format!("cannot read header: {e}")),
    })?;
    parse_header(&text, &hdr)
}

/// Loads a cube from its header/payload pair.
pub fn load_radar_cube(path: &Path) -> Result<RadarCube> {
    let header = read_header(path)?;
    let (_, bin) = cube_paths(path);
    let bytes = fs::read(&bin).map_err(|e| Error::io(&bin, e))?;
    let expected = header
        .range_bins
        .checked_mul(header.pulses)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::Size("header dimensions overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::Size(format!(
            "payload holds {} bytes ({} floats), header {}x{} requires {} floats",
            bytes.len(),
            bytes.len() as f64 / 4.0,
            header.range_bins,
            header.pulses,
            expected / 4
        )));
    }
    let samples = bytes
        .chunks_exact(8)
        .map(|c| {
            Complex32::new(
                f32::from_le_bytes([c[0], c[1], c[2], c[3]]),
                f32::from_le_bytes([c[4], c[5], c[6], c[7]]),
            )
        })
        .collect();
    RadarCube::new(
        samples,
        header.range_bins,
        header.pulses,
        header.prf,
        header.range_resolution,
        header.range_offset,
    )
}
