use std::fs;
use std::path::Path;

use motionseg::ingest::{load_config, load_radar_cube, PipelineConfig};
use motionseg::microdoppler::burst_threshold;
use motionseg::pipeline::{analyze, run_pipeline, RunOptions, CONFIG_FILE, REPORT_FILE, TIMELINE_FILE};
use motionseg::plot::{pbc_svg, render_plots};
use motionseg::segmenter::Timeline;
use motionseg::synth::{synth_cube, ScenarioSpec};

fn write_preset(dir: &Path) -> std::path::PathBuf {
    let (cube, _) = synth_cube(&ScenarioSpec::walk_sit_stand(), 3).unwrap();
    cube.write(&dir.join("wss")).unwrap().0
}

#[test]
fn snapshot_and_listed_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let hdr = write_preset(dir.path());
    let out = dir.path().join("out");
    let report = run_pipeline(
        &hdr,
        None,
        &out,
        RunOptions {
            dump_stages: true,
            plots: false,
        },
    )
    .unwrap();
    assert_eq!(load_config(&out.join(CONFIG_FILE)).unwrap(), PipelineConfig::default());
    assert_eq!(report.artifact_paths.last().unwrap(), Path::new(REPORT_FILE));
    for p in &report.artifact_paths {
        assert!(out.join(p).is_file(), "{} missing", p.display());
    }
    assert!(out.join("rangemap_thresholded.pgm").is_file());
    assert!(out.join("peaks.txt").is_file());
}

#[test]
fn failed_write_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let hdr = write_preset(dir.path());
    let out = dir.path().join("out");
    // a directory where the report should go makes the last write fail
    fs::create_dir_all(out.join(REPORT_FILE)).unwrap();
    let err = run_pipeline(&hdr, None, &out, RunOptions::default()).unwrap_err();
    assert!(matches!(err.root(), motionseg::Error::Io { .. }), "{err}");
    assert!(!out.join(TIMELINE_FILE).exists());
    assert!(!out.join(CONFIG_FILE).exists());
}

#[test]
fn pbc_plot_marks_the_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let hdr = write_preset(dir.path());
    let cfg = PipelineConfig::default();
    let analysis = analyze(&load_radar_cube(&hdr).unwrap(), &cfg).unwrap();
    assert!(!analysis.inplace.is_empty());
    for a in &analysis.inplace {
        let v = &a.pbc.values;
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        let expected = lo + 0.03 * (hi - lo);
        assert_eq!(burst_threshold(v, 0.03), Some(a.threshold));
        assert!((a.threshold - expected).abs() <= 1e-12 * hi.abs());

        let svg = pbc_svg(a);
        let marker = svg.split(r#"class="threshold" data-value=""#).nth(1).unwrap();
        let value: f64 = marker.split('"').next().unwrap().parse().unwrap();
        assert!((value - expected).abs() <= 1e-12 * hi.abs(), "{value} vs {expected}");
    }
}

#[test]
fn empty_timeline_still_plots() {
    let dir = tempfile::tempdir().unwrap();
    let hdr = write_preset(dir.path());
    let cube = load_radar_cube(&hdr).unwrap();
    let cfg = PipelineConfig::default();
    let mut analysis = analyze(&cube, &cfg).unwrap();
    analysis.lines.clear();
    analysis.transitions.clear();
    analysis.inplace.clear();
    analysis.timeline = Timeline::default();
    let plots = render_plots(&cube, &cfg, &analysis).unwrap();
    let names: Vec<&str> = plots.iter().map(|(n, _)| n.as_str()).collect();
    assert!(names.contains(&"rangemap_lines.ppm") && names.contains(&"radon_peaks.ppm"), "{names:?}");
    assert!(plots.iter().all(|(_, bytes)| !bytes.is_empty()));
}
