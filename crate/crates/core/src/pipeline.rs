//! End-to-end run: cube and config in, timeline, report and optional
//! debug artifacts out.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ingest::{load_config, load_radar_cube, PipelineConfig, RadarCube};
use crate::microdoppler::{
    burst_threshold, power_burst_curve, range_mask, segment_pbc, smooth_pbc, spectrogram, ActivitySpan, PowerCurve,
    Spectrogram, StftParams,
};
use crate::plot;
use crate::radon::{
    detect_peaks, extract_lines, peaks_to_text, radon_transform, slope_epsilon, transition_times, LineModel, RadonImage,
    RadonPeak, TransitionPoint,
};
use crate::rangemap::{preprocess, RangeMapStages};
use crate::segmenter::{build_timeline, classify_slope, guarded_interval, MotionClass, Timeline};

/// Micro-Doppler analysis of one in-place line.
#[derive(Debug, Clone)]
pub struct InPlaceAnalysis {
    pub line_index: usize,
    /// Guarded interval in seconds.
    pub interval_s: (f64, f64),
    pub pulse_span: (usize, usize),
    /// Range bins summed into the slow-time signal; empty means all bins.
    pub mask: Vec<usize>,
    pub spectrogram: Spectrogram,
    pub raw_pbc: PowerCurve,
    pub pbc: PowerCurve,
    pub threshold: f64,
    pub spans: Vec<ActivitySpan>,
}

/// Every intermediate product of one pipeline pass.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub stages: RangeMapStages,
    pub radon: RadonImage,
    pub peaks: Vec<RadonPeak>,
    pub lines: Vec<LineModel>,
    pub transitions: Vec<TransitionPoint>,
    pub inplace: Vec<InPlaceAnalysis>,
    pub timeline: Timeline,
    pub observation_s: (f64, f64),
}

impl Analysis {
    pub fn spans(&self) -> Vec<ActivitySpan> {
        self.inplace.iter().flat_map(|a| a.spans.iter().copied()).collect()
    }
}

pub fn stft_params(cfg: &PipelineConfig, prf: f64) -> StftParams {
    let (window_len, hop) = cfg.stft.resolve(prf);
    StftParams {
        window_len,
        hop,
        window: cfg.stft.window,
    }
}

/// Runs range-map pre-processing, line detection, per-line micro-Doppler
/// analysis and timeline fusion. Errors carry the failing stage.
pub fn analyze(cube: &RadarCube, cfg: &PipelineConfig) -> Result<Analysis> {
    cfg.validate()?;
    let stages = preprocess(cube, &cfg.preproc).map_err(|e| e.in_stage("rangemap"))?;
    let rc = &cfg.radon;
    let in_radon = |e: Error| e.in_stage("radon");
    let radon = radon_transform(&stages.thresholded, rc.theta_step).map_err(in_radon)?;
    let peaks = detect_peaks(
        &radon,
        (rc.min_separation_deg, rc.min_separation_bins),
        rc.min_rel_height,
        rc.max_peaks,
    )
    .map_err(in_radon)?;
    let mut lines = extract_lines(&stages.thresholded, &radon, rc).map_err(in_radon)?;
    let transitions = transition_times(&mut lines, slope_epsilon(rc.theta_step)).map_err(in_radon)?;

    let params = stft_params(cfg, cube.prf);
    let mut inplace = Vec::new();
    for i in 0..lines.len() {
        if classify_slope(&lines[i], cfg.segmenter.slope_floor).0 != MotionClass::InPlace {
            continue;
        }
        let Some(interval) = guarded_interval(&lines, &transitions, i, cfg.segmenter.transition_guard) else {
            continue;
        };
        let analysis = analyze_in_place(cube, &stages, &lines[i], i, interval, params, cfg)
            .map_err(|e| e.in_stage("microdoppler"))?;
        inplace.extend(analysis);
    }

    let observation_s = (0.0, cube.duration_s());
    let spans: BTreeMap<usize, Vec<ActivitySpan>> = inplace.iter().map(|a| (a.line_index, a.spans.clone())).collect();
    let timeline = build_timeline(
        &lines,
        &transitions,
        &spans,
        cfg.segmenter.slope_floor,
        cfg.segmenter.transition_guard,
        observation_s,
    )
    .map_err(|e| e.in_stage("segmenter"))?;
    Ok(Analysis {
        stages,
        radon,
        peaks,
        lines,
        transitions,
        inplace,
        timeline,
        observation_s,
    })
}

/// `None` when the interval is shorter than one analysis window.
fn analyze_in_place(
    cube: &RadarCube,
    stages: &RangeMapStages,
    line: &LineModel,
    line_index: usize,
    interval_s: (f64, f64),
    params: StftParams,
    cfg: &PipelineConfig,
) -> Result<Option<InPlaceAnalysis>> {
    let p0 = (interval_s.0 * cube.prf).ceil().max(0.0) as usize;
    let p1 = ((interval_s.1 * cube.prf).floor() as usize + 1).min(cube.pulses());
    if p1 <= p0 || p1 - p0 < params.window_len {
        return Ok(None);
    }
    let col_axis = stages.thresholded.col_axis;
    let cols = (
        col_axis.index_of(interval_s.0).ceil().max(0.0) as usize,
        col_axis.index_of(interval_s.1).floor().max(0.0) as usize,
    );
    let near_line: Vec<usize> = range_mask(&stages.thresholded, cols, cube)
        .into_iter()
        .filter(|&b| {
            let row = stages.thresholded.row_axis.index_of(cube.bin_range_m(b));
            (row - line.row_at((cols.0 + cols.1) as f64 / 2.0)).abs() <= cfg.radon.support_rows + 1.0
        })
        .collect();
    let mask = (!near_line.is_empty()).then_some(near_line.as_slice());
    let spec = spectrogram(cube, (p0, p1), params, mask)?;
    let raw_pbc = power_burst_curve(&spec, cfg.pbc.band_pos, cfg.pbc.band_neg)?;
    let pbc = smooth_pbc(&raw_pbc, cfg.pbc.ma_window)?;
    let threshold = burst_threshold(&pbc.values, cfg.pbc.rel_threshold).ok_or(Error::NoActivity)?;
    let spans = segment_pbc(&pbc, cfg.pbc.rel_threshold, cfg.pbc.min_span, cfg.pbc.gap_merge_frames())?;
    Ok(Some(InPlaceAnalysis {
        line_index,
        interval_s,
        pulse_span: (p0, p1),
        mask: near_line,
        spectrogram: spec,
        raw_pbc,
        pbc,
        threshold,
        spans,
    }))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Write every intermediate image and curve.
    pub dump_stages: bool,
    /// Render the summary plots.
    pub plots: bool,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub cube: PathBuf,
    pub timeline: Timeline,
    pub transitions: Vec<TransitionPoint>,
    pub spans: Vec<ActivitySpan>,
    pub lines: Vec<LineModel>,
    pub parameters: PipelineConfig,
    /// Emitted files, relative to the output directory.
    pub artifact_paths: Vec<PathBuf>,
}

pub const REPORT_FILE: &str = "report.txt";
pub const TIMELINE_FILE: &str = "timeline.csv";
pub const CONFIG_FILE: &str = "config.toml";

impl RunReport {
    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "cube = {}", self.cube.display());
        let _ = writeln!(s, "lines = {}", self.lines.len());
        for (i, l) in self.lines.iter().enumerate() {
            let axis = l.geometry.col_axis;
            let _ = writeln!(
                s,
                "line.{i} = theta_deg {:.1} x_prime {:.3} slope_m_per_s {:.3} span_s {:.3} {:.3}",
                l.theta,
                l.x_prime,
                l.physical_slope(),
                axis.at(l.valid_span.0),
                axis.at(l.valid_span.1)
            );
        }
        let _ = writeln!(s, "transitions = {}", self.transitions.len());
        for (i, t) in self.transitions.iter().enumerate() {
            let _ = writeln!(s, "transition.{i} = time_s {:.3} range_m {:.3}", t.time_s, t.range_m);
        }
        let _ = writeln!(s, "spans = {}", self.spans.len());
        for (i, a) in self.spans.iter().enumerate() {
            let _ = writeln!(
                s,
                "span.{i} = start_s {:.3} end_s {:.3} peak_power {:.6e}",
                a.start_s, a.end_s, a.peak_power
            );
        }
        let _ = writeln!(s, "segments = {}", self.timeline.segments.len());
        let _ = writeln!(s, "coverage = {:.4}", self.timeline.coverage);
        for p in &self.artifact_paths {
            let _ = writeln!(s, "artifact = {}", p.display());
        }
        s
    }
}

/// Collects written files so that a failed run can remove them.
struct Artifacts<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> Artifacts<'a> {
    fn write(&mut self, name: impl Into<PathBuf>, bytes: impl AsRef<[u8]>) -> Result<()> {
        let name = name.into();
        let path = self.dir.join(&name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.written.push(name);
        Ok(())
    }

    fn discard(&self) {
        for name in &self.written {
            let _ = fs::remove_file(self.dir.join(name));
        }
    }
}

/// Loads, analyzes and writes `timeline.csv`, `config.toml` (the config
/// actually used) and `report.txt` into `out_dir`, plus any requested
/// debug artifacts. Nothing is left behind when a step fails.
pub fn run_pipeline(cube_path: &Path, config_path: Option<&Path>, out_dir: &Path, opts: RunOptions) -> Result<RunReport> {
    let cfg = match config_path {
        Some(p) => load_config(p)?,
        None => PipelineConfig::default(),
    };
    let cube = load_radar_cube(cube_path)?;
    let analysis = analyze(&cube, &cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut files = Artifacts {
        dir: out_dir,
        written: Vec::new(),
    };
    let result = write_run(&mut files, cube_path, &cube, &cfg, &analysis, opts);
    if result.is_err() {
        files.discard();
    }
    result
}

fn write_run(
    files: &mut Artifacts<'_>,
    cube_path: &Path,
    cube: &RadarCube,
    cfg: &PipelineConfig,
    analysis: &Analysis,
    opts: RunOptions,
) -> Result<RunReport> {
    files.write(TIMELINE_FILE, analysis.timeline.to_csv())?;
    files.write(CONFIG_FILE, cfg.to_kv_string())?;
    if opts.dump_stages {
        for img in analysis.stages.iter() {
            files.write(format!("rangemap_{}.pgm", img.stage), plot::range_map_pgm(img))?;
        }
        files.write("radon.pgm", analysis.radon.to_pgm())?;
        files.write("peaks.txt", peaks_to_text(&analysis.peaks))?;
        for a in &analysis.inplace {
            files.write(format!("spectrogram_line{}.pgm", a.line_index), a.spectrogram.to_pgm(60.0))?;
            files.write(format!("pbc_line{}.txt", a.line_index), a.raw_pbc.to_text())?;
            files.write(format!("pbc_line{}_filtered.txt", a.line_index), a.pbc.to_text())?;
        }
    }
    if opts.plots {
        for (name, bytes) in plot::render_plots(cube, cfg, analysis)? {
            files.write(name, bytes)?;
        }
    }
    let mut report = RunReport {
        cube: cube_path.to_path_buf(),
        timeline: analysis.timeline.clone(),
        transitions: analysis.transitions.clone(),
        spans: analysis.spans(),
        lines: analysis.lines.clone(),
        parameters: cfg.clone(),
        artifact_paths: files.written.clone(),
    };
    report.artifact_paths.push(PathBuf::from(REPORT_FILE));
    files.write(REPORT_FILE, report.to_text())?;
    Ok(report)
}
