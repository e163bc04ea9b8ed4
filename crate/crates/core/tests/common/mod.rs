//! Test-only reference implementations, kept independent of the library's
//! optimized code paths.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Brute-force four-subpixel Radon transform.
///
/// Visits every pixel (zero or not) and every subpixel, and bins each
/// projection by scanning all bin intervals. Returns `[angle][offset]`.
pub fn brute_force_radon(pixels: &[f64], rows: usize, cols: usize, theta_step: f64) -> Vec<Vec<f64>> {
    let half = ((rows as f64).hypot(cols as f64) / 2.0).ceil() as i64;
    let centers: Vec<f64> = (-half..=half).map(|j| j as f64).collect();
    let center_row = (rows as f64 - 1.0) / 2.0;
    let center_col = (cols as f64 - 1.0) / 2.0;
    let mut thetas = Vec::new();
    let mut k = 0usize;
    while (k as f64) * theta_step < 180.0 - 1e-9 {
        thetas.push(k as f64 * theta_step);
        k += 1;
    }

    let mut out = Vec::with_capacity(thetas.len());
    for theta in thetas {
        let (sin, cos) = theta.to_radians().sin_cos();
        let mut profile = vec![0.0; centers.len()];
        for r in 0..rows {
            for c in 0..cols {
                let v = pixels[r * cols + c];
                for dx in [-0.25, 0.25] {
                    for dy in [-0.25, 0.25] {
                        let x = (c as f64 - center_col) + dx;
                        let y = (center_row - r as f64) + dy;
                        let xp = x * cos + y * sin;
                        let q = 0.25 * v;
                        let mut placed = false;
                        for (j, &mid) in centers.iter().enumerate() {
                            let lo = mid - 0.5;
                            let hi = mid + 0.5;
                            if (xp - lo).abs() < 1e-9 && j > 0 {
                                profile[j - 1] += 0.5 * q;
                                profile[j] += 0.5 * q;
                                placed = true;
                                break;
                            }
                            if xp > lo && xp < hi && (hi - xp).abs() >= 1e-9 {
                                profile[j] += q;
                                placed = true;
                                break;
                            }
                        }
                        assert!(placed, "subpixel projection {xp} fell outside all bins");
                    }
                }
            }
        }
        out.push(profile);
    }
    out
}

/// Sparse random image in `[0, 1]` with roughly `density` nonzero pixels,
/// values either 0 or at least `floor` as after thresholding.
pub fn random_thresholded(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64, floor: f64) -> Vec<f64> {
    (0..rows * cols)
        .map(|_| {
            if rng.random::<f64>() < density {
                floor + (1.0 - floor) * rng.random::<f64>()
            } else {
                0.0
            }
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nearest frame index for an instant, given frame center times.
pub fn nearest_frame(times: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (i, &ft) in times.iter().enumerate() {
        if (ft - t).abs() < (times[best] - t).abs() {
            best = i;
        }
    }
    best
}

use motionseg::synth::{Event, ScenarioSpec, DEFAULT_RANGE_SPREAD_M};

const PRF: f64 = 600.0;
const RANGE_BINS: usize = 256;
const RANGE_RES: f64 = 0.1;

/// Walk, pause, sit, pause, stand, pause over 30 s with randomized speed,
/// direction, durations and SNR in [20, 30] dB.
pub fn random_walk_sit_stand(rng: &mut ChaCha8Rng) -> ScenarioSpec {
    let walk_s = rng.random_range(11.0..14.0);
    let speed: f64 = rng.random_range(0.6..1.2) * if rng.random::<bool>() { -1.0 } else { 1.0 };
    let distance = speed.abs() * walk_s;
    let near = rng.random_range(3.0..(RANGE_BINS as f64 * RANGE_RES - 2.0 - distance));
    let start_range_m = if speed < 0.0 { near + distance } else { near };
    let events = vec![
        Event::walk(walk_s, speed),
        Event::quiet(rng.random_range(2.0..3.5)),
        Event::burst(rng.random_range(1.5..2.5), (-200.0, -40.0)),
        Event::quiet(rng.random_range(2.5..5.0)),
        Event::burst(rng.random_range(1.2..2.0), (40.0, 200.0)),
    ];
    ScenarioSpec {
        events,
        start_range_m,
        noise_db: Some(rng.random_range(20.0..30.0)),
        prf: PRF,
        range_resolution: RANGE_RES,
        range_offset: 0.0,
        range_bins: RANGE_BINS,
        pulses: (30.0 * PRF) as usize,
        range_spread_m: DEFAULT_RANGE_SPREAD_M,
    }
}

/// A still subject with two bursts separated by a quiet gap, 15 s.
pub fn random_two_burst(rng: &mut ChaCha8Rng) -> ScenarioSpec {
    let events = vec![
        Event::quiet(rng.random_range(1.5..3.0)),
        Event::burst(rng.random_range(1.2..2.5), (-200.0, -40.0)),
        Event::quiet(rng.random_range(2.0..5.0)),
        Event::burst(rng.random_range(1.0..2.0), (40.0, 200.0)),
    ];
    ScenarioSpec {
        events,
        start_range_m: rng.random_range(3.0..22.0),
        noise_db: Some(rng.random_range(20.0..30.0)),
        prf: PRF,
        range_resolution: RANGE_RES,
        range_offset: 0.0,
        range_bins: RANGE_BINS,
        pulses: (15.0 * PRF) as usize,
        range_spread_m: DEFAULT_RANGE_SPREAD_M,
    }
}
