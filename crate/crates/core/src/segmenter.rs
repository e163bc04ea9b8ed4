//! Fuses range-map lines, their transitions and in-place activity spans into
//! one labeled timeline whose segments never cross a transition.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::microdoppler::ActivitySpan;
use crate::radon::{LineModel, TransitionPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionClass {
    Translation,
    InPlace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Approaching,
    Receding,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    RadonLine,
    PbcSpan,
}

impl fmt::Display for MotionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MotionClass::Translation => "translation",
            MotionClass::InPlace => "in_place",
        })
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Approaching => "approaching",
            Direction::Receding => "receding",
            Direction::None => "none",
        })
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::RadonLine => "radon_line",
            Source::PbcSpan => "pbc_span",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionSegment {
    pub start_s: f64,
    pub end_s: f64,
    pub motion_class: MotionClass,
    pub direction: Direction,
    pub source: Source,
    /// Zero for in-place segments.
    pub slope_m_per_s: f64,
}

impl MotionSegment {
    /// True when `t` lies strictly inside the segment.
    pub fn straddles(&self, t: f64) -> bool {
        self.start_s < t && t < self.end_s
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Timeline {
    pub segments: Vec<MotionSegment>,
    /// Labeled fraction of the observation window.
    pub coverage: f64,
}

pub const CSV_HEADER: &str = "start_s,end_s,class,direction,slope_m_per_s,source";

impl Timeline {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for seg in &self.segments {
            let _ = writeln!(
                s,
                "{:.3},{:.3},{},{},{:.3},{}",
                seg.start_s, seg.end_s, seg.motion_class, seg.direction, seg.slope_m_per_s, seg.source
            );
        }
        s
    }
}

/// Class and direction of a physical slope in meters per second.
pub fn classify_physical_slope(slope_m_per_s: f64, slope_floor: f64) -> (MotionClass, Direction, f64) {
    if slope_m_per_s.abs() <= slope_floor {
        (MotionClass::InPlace, Direction::None, 0.0)
    } else if slope_m_per_s < 0.0 {
        (MotionClass::Translation, Direction::Approaching, slope_m_per_s)
    } else {
        (MotionClass::Translation, Direction::Receding, slope_m_per_s)
    }
}

/// Classifies a line by its slope converted through the image axis maps.
pub fn classify_slope(line: &LineModel, slope_floor: f64) -> (MotionClass, Direction, f64) {
    classify_physical_slope(line.physical_slope(), slope_floor)
}

/// Time interval of a line after removing `guard_s` on every side that
/// borders a transition. `None` when nothing is left.
pub fn guarded_interval(lines: &[LineModel], transitions: &[TransitionPoint], index: usize, guard_s: f64) -> Option<(f64, f64)> {
    let line = &lines[index];
    let axis = line.geometry.col_axis;
    let (a, b) = (axis.at(line.valid_span.0), axis.at(line.valid_span.1));
    let (mut start, mut end) = (a.min(b), a.max(b));
    if index > 0 {
        start = start.max(transitions[index - 1].time_s + guard_s);
    }
    if index + 1 < lines.len() {
        end = end.min(transitions[index].time_s - guard_s);
    }
    (end > start).then_some((start, end))
}

/// Builds the timeline.
///
/// `lines` are in slow-time order with `transitions[k]` between `lines[k]`
/// and `lines[k + 1]`. Translation lines yield one segment over their
/// guarded interval; in-place lines yield one segment per entry of
/// `inplace_spans[line index]`, clipped to the same interval. Overlaps are
/// removed by moving the later segment's start to the earlier one's end.
pub fn build_timeline(
    lines: &[LineModel],
    transitions: &[TransitionPoint],
    inplace_spans: &BTreeMap<usize, Vec<ActivitySpan>>,
    slope_floor: f64,
    guard_s: f64,
    observation_s: (f64, f64),
) -> Result<Timeline> {
    let expected = lines.len().saturating_sub(1);
    if transitions.len() != expected {
        return Err(Error::Consistency(format!(
            "{} lines need {expected} transitions, got {}",
            lines.len(),
            transitions.len()
        )));
    }
    for (k, t) in transitions.iter().enumerate() {
        let (before, after) = (&lines[k], &lines[k + 1]);
        let tol = 1e-9 * (1.0 + t.col.abs());
        if t.col < before.valid_span.0 - tol || t.col > after.valid_span.1 + tol {
            return Err(Error::Consistency(format!(
                "transition {k} at column {:.2} lies outside lines spanning [{:.2}, {:.2}] and [{:.2}, {:.2}]",
                t.col, before.valid_span.0, before.valid_span.1, after.valid_span.0, after.valid_span.1
            )));
        }
    }
    if let Some((&i, _)) = inplace_spans.iter().find(|(&i, _)| i >= lines.len()) {
        return Err(Error::Consistency(format!("activity spans given for missing line {i}")));
    }

    let mut segments = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        let (class, direction, slope) = classify_slope(line, slope_floor);
        let Some((start, end)) = guarded_interval(lines, transitions, i, guard_s) else {
            continue;
        };
        match class {
            MotionClass::Translation => segments.push(MotionSegment {
                start_s: start,
                end_s: end,
                motion_class: class,
                direction,
                source: Source::RadonLine,
                slope_m_per_s: slope,
            }),
            MotionClass::InPlace => {
                for span in inplace_spans.get(&i).into_iter().flatten() {
                    let (s, e) = (span.start_s.max(start), span.end_s.min(end));
                    if e > s {
                        segments.push(MotionSegment {
                            start_s: s,
                            end_s: e,
                            motion_class: class,
                            direction,
                            source: Source::PbcSpan,
                            slope_m_per_s: 0.0,
                        });
                    }
                }
            }
        }
    }
    if let Some(i) = inplace_spans.keys().find(|&&i| classify_slope(&lines[i], slope_floor).0 != MotionClass::InPlace) {
        return Err(Error::Consistency(format!("activity spans given for translation line {i}")));
    }

    segments.sort_by(|a, b| a.start_s.total_cmp(&b.start_s).then(a.end_s.total_cmp(&b.end_s)));
    let mut resolved: Vec<MotionSegment> = Vec::with_capacity(segments.len());
    for mut seg in segments {
        if let Some(prev) = resolved.last() {
            seg.start_s = seg.start_s.max(prev.end_s);
        }
        if seg.end_s > seg.start_s {
            resolved.push(seg);
        }
    }

    let window = observation_s.1 - observation_s.0;
    let labeled: f64 = resolved.iter().map(|s| s.end_s - s.start_s).sum();
    let coverage = if window > 0.0 { (labeled / window).min(1.0) } else { 0.0 };
    Ok(Timeline {
        segments: resolved,
        coverage,
    })
}
