//! Micro-Doppler spectrograms and the power burst curve (PBC).
//!
//! The PBC sums spectrogram power over two Doppler bands that exclude the
//! strong near-zero-Doppler body return. After a causal moving average, the
//! frames at or above `min + rel_threshold * (max - min)` delimit the
//! individual in-place activities.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::ingest::{RadarCube, WindowKind};
use crate::rangemap::RangeMapImage;

/// Resolved short-time analysis parameters, in pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StftParams {
    pub window_len: usize,
    pub hop: usize,
    pub window: WindowKind,
}

impl StftParams {
    /// Transform length: the window length, padded by one when even so
    /// that the two-sided frequency axis is symmetric about 0 Hz.
    pub fn nfft(&self) -> usize {
        self.window_len | 1
    }
}

pub fn window_coefficients(kind: WindowKind, len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = (len - 1) as f64;
    (0..len)
        .map(|n| {
            let phase = 2.0 * PI * n as f64 / denom;
            match kind {
                WindowKind::Hann => 0.5 - 0.5 * phase.cos(),
                WindowKind::Hamming => 0.54 - 0.46 * phase.cos(),
                WindowKind::Rectangular => 1.0,
            }
        })
        .collect()
}

/// Time-frequency power map, Doppler-bin-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    power: Vec<f64>,
    /// Bin center frequencies in Hz, ascending and symmetric about zero.
    pub freq_axis: Vec<f64>,
    /// Frame center times in seconds.
    pub frame_times: Vec<f64>,
    pub params: StftParams,
}

impl Spectrogram {
    /// Builds a spectrogram from `[bin][frame]` power values.
    pub fn from_parts(power: Vec<f64>, freq_axis: Vec<f64>, frame_times: Vec<f64>, params: StftParams) -> Result<Self> {
        if power.len() != freq_axis.len() * frame_times.len() {
            return Err(Error::Size(format!(
                "{} power values for {} bins x {} frames",
                power.len(),
                freq_axis.len(),
                frame_times.len()
            )));
        }
        if power.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Data("spectrogram power must be finite and non-negative".into()));
        }
        Ok(Self {
            power,
            freq_axis,
            frame_times,
            params,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.freq_axis.len()
    }

    pub fn n_frames(&self) -> usize {
        self.frame_times.len()
    }

    pub fn get(&self, bin: usize, frame: usize) -> f64 {
        self.power[bin * self.n_frames() + frame]
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    /// Bin whose center is closest to `freq`.
    pub fn nearest_bin(&self, freq: f64) -> usize {
        let mut best = 0;
        for (k, f) in self.freq_axis.iter().enumerate() {
            if (f - freq).abs() < (self.freq_axis[best] - freq).abs() {
                best = k;
            }
        }
        best
    }

    /// Log-compressed PGM over `dynamic_range_db` below the image maximum;
    /// positive Doppler at the top, time left to right.
    pub fn to_pgm(&self, dynamic_range_db: f64) -> Vec<u8> {
        let (bins, frames) = (self.n_bins(), self.n_frames());
        let mut out = format!("P5\n{frames} {bins}\n255\n").into_bytes();
        out.extend(self.log_scaled(dynamic_range_db).iter().map(|v| (v * 255.0).round() as u8));
        out
    }

    /// Values in `[0, 1]`, `[row][frame]` with row 0 the highest frequency.
    pub fn log_scaled(&self, dynamic_range_db: f64) -> Vec<f64> {
        let max = self.power.iter().copied().fold(0.0, f64::max);
        let (bins, frames) = (self.n_bins(), self.n_frames());
        let mut out = Vec::with_capacity(bins * frames);
        for row in 0..bins {
            let k = bins - 1 - row;
            for n in 0..frames {
                let p = self.get(k, n);
                let v = if max > 0.0 && p > 0.0 {
                    (1.0 + 10.0 * (p / max).log10() / dynamic_range_db).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                out.push(v);
            }
        }
        out
    }
}

/// Short-time Fourier analysis of the slow-time signal over pulses
/// `span.0..span.1`.
///
/// The signal is the sum over the range bins in `mask` (all bins when
/// `None`). Power is the squared magnitude; the Doppler axis is two-sided
/// and scaled by the PRF.
pub fn spectrogram(
    cube: &RadarCube,
    span: (usize, usize),
    params: StftParams,
    mask: Option<&[usize]>,
) -> Result<Spectrogram> {
    let (start, end) = span;
    if start >= end || end > cube.pulses() {
        return Err(Error::Size(format!(
            "pulse span {start}..{end} outside cube of {} pulses",
            cube.pulses()
        )));
    }
    if params.window_len < 1 || params.hop < 1 {
        return Err(Error::Config("STFT window and hop must be positive".into()));
    }
    if end - start < params.window_len {
        return Err(Error::Size(format!(
            "span of {} pulses is shorter than one {}-pulse window",
            end - start,
            params.window_len
        )));
    }
    if let Some(bins) = mask {
        if let Some(&b) = bins.iter().find(|&&b| b >= cube.range_bins()) {
            return Err(Error::Size(format!("mask bin {b} outside cube of {} bins", cube.range_bins())));
        }
    }

    let all_bins: Vec<usize>;
    let bins = match mask {
        Some(b) => b,
        None => {
            all_bins = (0..cube.range_bins()).collect();
            &all_bins
        }
    };
    let mut signal = vec![Complex64::new(0.0, 0.0); end - start];
    for &b in bins {
        for (acc, s) in signal.iter_mut().zip(&cube.bin(b)[start..end]) {
            *acc += Complex64::new(s.re as f64, s.im as f64);
        }
    }

    let w = params.window_len;
    let nfft = params.nfft();
    let half = (nfft - 1) / 2;
    let n_frames = (end - start - w) / params.hop + 1;
    let taper = window_coefficients(params.window, w);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(nfft);

    let frames: Vec<Vec<f64>> = (0..n_frames)
        .into_par_iter()
        .map(|i| {
            let s = i * params.hop;
            let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
            for (j, slot) in buf.iter_mut().take(w).enumerate() {
                *slot = signal[s + j] * taper[j];
            }
            fft.process(&mut buf);
            // shift so that index 0 is the most negative frequency
            (0..nfft).map(|k| buf[(k + nfft - half) % nfft].norm_sqr()).collect()
        })
        .collect();

    let mut power = vec![0.0; nfft * n_frames];
    for (n, col) in frames.iter().enumerate() {
        for (k, &p) in col.iter().enumerate() {
            power[k * n_frames + n] = p;
        }
    }
    let freq_axis = (0..nfft)
        .map(|k| (k as f64 - half as f64) * cube.prf / nfft as f64)
        .collect();
    let frame_times = (0..n_frames)
        .map(|i| (start as f64 + (i * params.hop) as f64 + (w as f64 - 1.0) / 2.0) / cube.prf)
        .collect();
    Ok(Spectrogram {
        power,
        freq_axis,
        frame_times,
        params,
    })
}

/// Source range bins covered by the occupied rows of a thresholded
/// range-map within columns `cols.0..=cols.1`.
pub fn range_mask(rm_th: &RangeMapImage, cols: (usize, usize), cube: &RadarCube) -> Vec<usize> {
    let last = cols.1.min(rm_th.cols().saturating_sub(1));
    let half_row = rm_th.row_axis.step.abs() / 2.0;
    let mut bins = Vec::new();
    for r in 0..rm_th.rows() {
        if !(cols.0..=last).any(|c| rm_th.get(r, c) > 0.0) {
            continue;
        }
        let range = rm_th.row_axis.at(r as f64);
        let lo = ((range - half_row - cube.range_offset) / cube.range_resolution).ceil().max(0.0) as usize;
        let hi = ((range + half_row - cube.range_offset) / cube.range_resolution).floor();
        if hi < 0.0 {
            continue;
        }
        let hi = (hi as usize).min(cube.range_bins() - 1);
        bins.extend(lo..=hi);
    }
    bins.sort_unstable();
    bins.dedup();
    bins
}

/// Per-frame band power, optionally smoothed.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub values: Vec<f64>,
    pub frame_times: Vec<f64>,
    pub filtered: bool,
}

impl PowerCurve {
    /// Two columns, `time_s value`, one frame per line.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# time_s value\n");
        for (t, v) in self.frame_times.iter().zip(&self.values) {
            let _ = writeln!(s, "{t:.6} {v:.9e}");
        }
        s
    }
}

fn check_band(name: &str, band: (f64, f64), positive: bool) -> Result<()> {
    let ok = band.0 < band.1
        && if positive {
            band.0 > 0.0
        } else {
            band.1 < 0.0
        };
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} band [{}, {}] Hz must be ordered and exclude 0 Hz",
            band.0, band.1
        )))
    }
}

/// Sums power over the bins whose center lies in either band.
pub fn power_burst_curve(spec: &Spectrogram, band_pos: (f64, f64), band_neg: (f64, f64)) -> Result<PowerCurve> {
    check_band("positive", band_pos, true)?;
    check_band("negative", band_neg, false)?;
    let (lo, hi) = match (spec.freq_axis.first(), spec.freq_axis.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::EmptyInput("spectrogram has no Doppler bins".into())),
    };
    let df = if spec.n_bins() > 1 {
        (hi - lo) / (spec.n_bins() - 1) as f64
    } else {
        0.0
    };
    if band_pos.1 > hi + df / 2.0 || band_neg.0 < lo - df / 2.0 {
        return Err(Error::Config(format!(
            "bands [{}, {}] and [{}, {}] Hz exceed the Doppler axis [{lo:.1}, {hi:.1}] Hz",
            band_neg.0, band_neg.1, band_pos.0, band_pos.1
        )));
    }
    let in_band: Vec<usize> = spec
        .freq_axis
        .iter()
        .enumerate()
        .filter(|(_, &f)| (band_pos.0..=band_pos.1).contains(&f) || (band_neg.0..=band_neg.1).contains(&f))
        .map(|(k, _)| k)
        .collect();
    let values = (0..spec.n_frames())
        .map(|n| in_band.iter().map(|&k| spec.get(k, n)).sum())
        .collect();
    Ok(PowerCurve {
        values,
        frame_times: spec.frame_times.clone(),
        filtered: false,
    })
}

/// Causal `w`-point moving average; the first `w - 1` frames average the
/// values available so far.
pub fn smooth_pbc(pbc: &PowerCurve, w: usize) -> Result<PowerCurve> {
    if pbc.filtered {
        return Err(Error::Data("power curve is already filtered".into()));
    }
    if w == 0 {
        return Err(Error::Config("moving-average window must be >= 1".into()));
    }
    let values = (0..pbc.values.len())
        .map(|n| {
            let count = (n + 1).min(w);
            pbc.values[n + 1 - count..=n].iter().sum::<f64>() / count as f64
        })
        .collect();
    Ok(PowerCurve {
        values,
        frame_times: pbc.frame_times.clone(),
        filtered: true,
    })
}

/// Activity interval found on a filtered PBC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivitySpan {
    pub start_s: f64,
    pub end_s: f64,
    pub peak_power: f64,
    /// First and last frame, inclusive.
    pub frame_span: (usize, usize),
}

/// `min + rel_threshold * (max - min)` over the curve, `None` when flat.
pub fn burst_threshold(values: &[f64], rel_threshold: f64) -> Option<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (max > min).then(|| min + rel_threshold * (max - min))
}

/// Splits a filtered PBC into activity spans.
///
/// Runs of frames at or above the threshold become spans; runs separated
/// by fewer than `gap_merge` below-threshold frames are joined, then spans
/// shorter than `min_span` seconds are dropped.
pub fn segment_pbc(pbc: &PowerCurve, rel_threshold: f64, min_span: f64, gap_merge: usize) -> Result<Vec<ActivitySpan>> {
    if !pbc.filtered {
        return Err(Error::Data("segmentation expects a filtered power curve".into()));
    }
    let threshold = burst_threshold(&pbc.values, rel_threshold).ok_or(Error::NoActivity)?;

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut open: Option<usize> = None;
    for (n, &v) in pbc.values.iter().enumerate() {
        match (v >= threshold, open) {
            (true, None) => open = Some(n),
            (false, Some(s)) => {
                runs.push((s, n - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        runs.push((s, pbc.values.len() - 1));
    }

    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(runs.len());
    for run in runs {
        match merged.last_mut() {
            Some(last) if run.0 - last.1 - 1 < gap_merge => last.1 = run.1,
            _ => merged.push(run),
        }
    }

    Ok(merged
        .into_iter()
        .filter_map(|(s, e)| {
            let start_s = pbc.frame_times[s];
            let end_s = pbc.frame_times[e];
            let peak_power = pbc.values[s..=e].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (end_s > start_s && end_s - start_s >= min_span).then_some(ActivitySpan {
                start_s,
                end_s,
                peak_power,
                frame_span: (s, e),
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex32;
    use proptest::prelude::*;

    fn curve(values: Vec<f64>, filtered: bool) -> PowerCurve {
        let frame_times = (0..values.len()).map(|n| n as f64 * 0.1).collect();
        PowerCurve {
            values,
            frame_times,
            filtered,
        }
    }

    fn hann(window_len: usize, hop: usize) -> StftParams {
        StftParams {
            window_len,
            hop,
            window: WindowKind::Hann,
        }
    }

    fn tone_cube(freq: f64, prf: f64, pulses: usize) -> RadarCube {
        let s = (0..pulses)
            .map(|p| {
                let ph = 2.0 * PI * freq * p as f64 / prf;
                Complex32::new(ph.cos() as f32, ph.sin() as f32)
            })
            .collect();
        RadarCube::new(s, 1, pulses, prf, 0.1, 0.0).unwrap()
    }

    #[test]
    fn tone_gives_single_ridge() {
        let cube = tone_cube(100.0, 1000.0, 2000);
        let spec = spectrogram(&cube, (0, 2000), hann(200, 50), None).unwrap();
        assert_eq!(spec.n_bins(), 201);
        let target = spec.nearest_bin(100.0);
        assert!((spec.freq_axis[target] - 100.0).abs() <= 1000.0 / 201.0 / 2.0);
        for n in 0..spec.n_frames() {
            let best = (0..spec.n_bins()).max_by(|&a, &b| spec.get(a, n).total_cmp(&spec.get(b, n))).unwrap();
            assert_eq!(best, target, "frame {n}");
        }
    }

    #[test]
    fn axis_is_symmetric_and_times_increase() {
        let cube = tone_cube(0.0, 600.0, 1000);
        let spec = spectrogram(&cube, (100, 900), hann(120, 30), None).unwrap();
        let k = spec.n_bins();
        assert_eq!(k % 2, 1);
        for i in 0..k {
            assert_relative_eq!(spec.freq_axis[i], -spec.freq_axis[k - 1 - i], epsilon = 1e-9);
        }
        assert_eq!(spec.freq_axis[k / 2], 0.0);
        assert!(spec.frame_times.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(spec.frame_times[0], (100.0 + 59.5) / 600.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_signal_zero_power() {
        let cube = RadarCube::new(vec![Complex32::new(0.0, 0.0); 3 * 400], 3, 400, 500.0, 0.1, 0.0).unwrap();
        let spec = spectrogram(&cube, (0, 400), hann(64, 16), Some(&[0, 2])).unwrap();
        assert!(spec.power().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn span_shorter_than_window_is_size_error() {
        let cube = tone_cube(10.0, 500.0, 100);
        assert!(matches!(
            spectrogram(&cube, (0, 50), hann(64, 16), None),
            Err(Error::Size(_))
        ));
        assert!(matches!(
            spectrogram(&cube, (0, 200), hann(64, 16), None),
            Err(Error::Size(_))
        ));
    }

    fn flat_spec(freqs: Vec<f64>, frames: usize, power_at: impl Fn(f64) -> f64) -> Spectrogram {
        let mut power = Vec::new();
        for &f in &freqs {
            power.extend(std::iter::repeat_n(power_at(f), frames));
        }
        let times = (0..frames).map(|n| n as f64).collect();
        Spectrogram::from_parts(power, freqs, times, hann(64, 16)).unwrap()
    }

    #[test]
    fn pbc_counts_in_band_bins() {
        // 10 Hz spacing from -300 to 300: 5 bins in each band of width 40
        let freqs: Vec<f64> = (-30..=30).map(|k| k as f64 * 10.0).collect();
        let spec = flat_spec(freqs.clone(), 4, |f| if (100.0..=140.0).contains(&f.abs()) { 1.0 } else { 0.0 });
        let pbc = power_burst_curve(&spec, (20.0, 270.0), (-270.0, -20.0)).unwrap();
        assert_eq!(pbc.values, vec![10.0; 4]);
        assert!(!pbc.filtered);

        let dc = flat_spec(freqs, 3, |f| if f == 0.0 { 5.0 } else { 0.0 });
        let pbc = power_burst_curve(&dc, (20.0, 270.0), (-270.0, -20.0)).unwrap();
        assert_eq!(pbc.values, vec![0.0; 3]);
    }

    #[test]
    fn pbc_band_over_zero_is_config_error() {
        let spec = flat_spec((-30..=30).map(|k| k as f64 * 10.0).collect(), 2, |_| 1.0);
        assert!(matches!(
            power_burst_curve(&spec, (-5.0, 270.0), (-270.0, -20.0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            power_burst_curve(&spec, (20.0, 270.0), (-270.0, 10.0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            power_burst_curve(&spec, (20.0, 400.0), (-270.0, -20.0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn moving_average_examples() {
        let c = smooth_pbc(&curve(vec![3.0; 12], false), 5).unwrap();
        assert!(c.filtered);
        assert!(c.values.iter().all(|&v| (v - 3.0).abs() < 1e-15));

        let mut impulse = vec![0.0; 25];
        impulse[10] = 1.0;
        let c = smooth_pbc(&curve(impulse, false), 5).unwrap();
        for (n, &v) in c.values.iter().enumerate() {
            let want = if (10..=14).contains(&n) { 0.2 } else { 0.0 };
            assert_relative_eq!(v, want, epsilon = 1e-15);
        }

        // warm-up averages what is available
        let c = smooth_pbc(&curve(vec![2.0, 4.0, 6.0], false), 5).unwrap();
        assert_eq!(c.values, vec![2.0, 3.0, 4.0]);
        assert!(smooth_pbc(&c, 5).is_err());
    }

    #[test]
    fn threshold_three_percent() {
        assert_relative_eq!(burst_threshold(&[0.0, 0.5, 1.0], 0.03).unwrap(), 0.03);
        assert_relative_eq!(burst_threshold(&[2.0, 12.0], 0.03).unwrap(), 2.3);
        assert_eq!(burst_threshold(&[4.0, 4.0], 0.03), None);
    }

    #[test]
    fn run_extraction() {
        let c = curve(vec![0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0], true);
        let spans = segment_pbc(&c, 0.03, 0.0, 0).unwrap();
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].frame_span, (2, 4));
        assert_relative_eq!(spans[0].start_s, 0.2);
        assert_relative_eq!(spans[0].end_s, 0.4);
        assert_eq!(spans[0].peak_power, 1.0);
    }

    #[test]
    fn flat_curve_has_no_activity() {
        let c = curve(vec![0.7; 9], true);
        assert!(matches!(segment_pbc(&c, 0.03, 0.0, 0), Err(Error::NoActivity)));
        assert!(segment_pbc(&curve(vec![0.0, 1.0], false), 0.03, 0.0, 0).is_err());
    }

    #[test]
    fn gaps_merge_and_short_spans_drop() {
        let v = vec![0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0];
        let spans = segment_pbc(&curve(v.clone(), true), 0.03, 0.0, 3).unwrap();
        let frames: Vec<_> = spans.iter().map(|s| s.frame_span).collect();
        assert_eq!(frames, vec![(1, 6), (11, 12)]);
        let spans = segment_pbc(&curve(v, true), 0.03, 0.2, 3).unwrap();
        assert_eq!(spans.len(), 1);
    }

    proptest! {
        #[test]
        fn pbc_is_additive(
            a in prop::collection::vec(0.0f64..10.0, 61 * 3),
            b in prop::collection::vec(0.0f64..10.0, 61 * 3),
        ) {
            let freqs: Vec<f64> = (-30..=30).map(|k| k as f64 * 10.0).collect();
            let times = vec![0.0, 1.0, 2.0];
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let mk = |p: Vec<f64>| Spectrogram::from_parts(p, freqs.clone(), times.clone(), hann(64, 16)).unwrap();
            let bands = ((20.0, 270.0), (-270.0, -20.0));
            let pa = power_burst_curve(&mk(a), bands.0, bands.1).unwrap();
            let pb = power_burst_curve(&mk(b), bands.0, bands.1).unwrap();
            let ps = power_burst_curve(&mk(sum), bands.0, bands.1).unwrap();
            for n in 0..3 {
                prop_assert!((ps.values[n] - pa.values[n] - pb.values[n]).abs() <= 1e-9);
            }
        }

        #[test]
        fn moving_average_preserves_mass_with_zero_tails(
            inner in prop::collection::vec(0.0f64..5.0, 1..40),
            w in 1usize..8,
        ) {
            let mut v = vec![0.0; w - 1];
            v.extend(&inner);
            v.extend(std::iter::repeat_n(0.0, w - 1));
            let c = smooth_pbc(&curve(v.clone(), false), w).unwrap();
            let before: f64 = v.iter().sum();
            let after: f64 = c.values[w - 1..].iter().sum();
            prop_assert!((before - after).abs() <= 1e-9);
        }

        #[test]
        fn higher_threshold_never_widens(
            v in prop::collection::vec(0.0f64..1.0, 5..60),
            r1 in 0.01f64..0.99,
            r2 in 0.01f64..0.99,
        ) {
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let c = curve(v, true);
            let (Ok(wide), Ok(narrow)) = (segment_pbc(&c, lo, 0.0, 0), segment_pbc(&c, hi, 0.0, 0)) else {
                return Ok(());
            };
            for s in &narrow {
                let host = wide.iter().find(|w| w.frame_span.0 <= s.frame_span.0 && s.frame_span.1 <= w.frame_span.1);
                prop_assert!(host.is_some(), "{:?} not inside any of {:?}", s, wide);
            }
        }
    }
}
