//! `motionseg` command-line front end.
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 for data,
//! format and i/o errors, 4 when processing finds nothing to segment.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use motionseg::ingest::{cube_paths, read_header};
use motionseg::pipeline::{run_pipeline, RunOptions, RunReport};
use motionseg::synth::{synth_cube, ScenarioSpec};
use motionseg::Error;

#[derive(Parser)]
#[command(name = "motionseg", version, about = "Segment radar activity recordings into motion intervals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment a recording and write the timeline, report and config snapshot.
    Run {
        /// Cube path (`<base>`, `<base>.hdr` or `<base>.bin`).
        cube: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write every intermediate image and curve.
        #[arg(long)]
        dump_stages: bool,
    },
    /// Generate a synthetic recording and its ground truth.
    Synth {
        /// Scenario file; the built-in walk-sit-stand scenario when omitted.
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output base path; writes `<out>.hdr`, `<out>.bin` and `<out>.truth.txt`.
        #[arg(long, default_value = "synth")]
        out: PathBuf,
    },
    /// Run the pipeline and render range-map, Radon, spectrogram and PBC plots.
    Plot {
        cube: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        dump_stages: bool,
    },
    /// Print the header of a cube.
    Inspect { cube: PathBuf },
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::Config(_) => 2,
        Error::Format { .. } | Error::Size(_) | Error::Data(_) | Error::EmptyInput(_) | Error::Io { .. } => 3,
        Error::NoPeaks { .. }
        | Error::VerticalLine
        | Error::ParallelLines { .. }
        | Error::NoActivity
        | Error::Consistency(_)
        | Error::Stage { .. } => 4,
    }
}

fn print_summary(report: &RunReport, out: &Path) {
    println!(
        "{} lines, {} transitions, {} activity spans, {} segments (coverage {:.1}%)",
        report.lines.len(),
        report.transitions.len(),
        report.spans.len(),
        report.timeline.segments.len(),
        report.timeline.coverage * 100.0
    );
    for t in &report.transitions {
        println!("transition at {:.3} s, {:.2} m", t.time_s, t.range_m);
    }
    println!("wrote {} files to {}", report.artifact_paths.len(), out.display());
}

fn synth_command(spec: Option<&Path>, seed: u64, out: &Path) -> motionseg::Result<()> {
    let spec = match spec {
        Some(p) => ScenarioSpec::load(p)?,
        None => ScenarioSpec::walk_sit_stand(),
    };
    let (cube, truth) = synth_cube(&spec, seed)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    let (hdr, bin) = cube.write(out)?;
    let mut truth_path = cube_paths(out).0.with_extension("");
    truth_path.as_mut_os_string().push(".truth.txt");
    fs::write(&truth_path, truth.to_text()).map_err(|e| Error::Io {
        path: truth_path.clone(),
        source: e,
    })?;
    println!("wrote {}, {}, {}", hdr.display(), bin.display(), truth_path.display());
    Ok(())
}

fn inspect(cube: &Path) -> motionseg::Result<()> {
    let h = read_header(cube)?;
    println!("M = {}", h.range_bins);
    println!("N = {}", h.pulses);
    println!("prf = {}", h.prf);
    println!("range_resolution = {}", h.range_resolution);
    println!("range_offset = {}", h.range_offset);
    println!("duration_s = {:.3}", h.pulses as f64 / h.prf);
    println!(
        "range_span_m = {:.3} {:.3}",
        h.range_offset,
        h.range_offset + (h.range_bins as f64 - 1.0) * h.range_resolution
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            cube,
            config,
            out,
            dump_stages,
        } => run_pipeline(
            cube,
            config.as_deref(),
            out,
            RunOptions {
                dump_stages: *dump_stages,
                plots: false,
            },
        )
        .map(|r| print_summary(&r, out)),
        Command::Plot {
            cube,
            config,
            out,
            dump_stages,
        } => run_pipeline(
            cube,
            config.as_deref(),
            out,
            RunOptions {
                dump_stages: *dump_stages,
                plots: true,
            },
        )
        .map(|r| print_summary(&r, out)),
        Command::Synth { spec, seed, out } => synth_command(spec.as_deref(), *seed, out),
        Command::Inspect { cube } => inspect(cube),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
