use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dataset::{synth_graph, GraphKind, PhiSource};
use crate::error::{Error, Result};
use crate::graph::PoseGraph;
use crate::spectral::{
    assemble_fim, criteria_from_fim, criteria_from_laplacian, verify_bound, weighted_laplacian,
    WeightScheme,
};

/// Speedup required at the largest size of a planar (`ℓ = 3`) sweep.
pub const MIN_PLANAR_SPEEDUP: f64 = 5.0;
const MIN_TICKS_PER_SAMPLE: u32 = 10;
const SWEEP_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingPoint {
    pub n: usize,
    pub us_fim: f64,
    pub us_lap: f64,
    pub speedup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub ell: usize,
    pub points: Vec<TimingPoint>,
    /// Bound violations of the max-eigenvalue Laplacian over the swept graphs.
    pub violation_count: usize,
    /// Speedup non-decreasing over sizes `n > 2`.
    pub speedup_monotone: bool,
    /// Speedup floor at the largest size; `None` when not asserted (`ℓ ≠ 3`).
    pub floor_met: Option<bool>,
}

impl BenchSummary {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.violation_count > 0 {
            out.push(format!("{} bound violations", self.violation_count));
        }
        if !self.speedup_monotone {
            let s: Vec<String> = self.points.iter().map(|p| format!("{:.2}", p.speedup)).collect();
            out.push(format!("speedup not monotone: [{}]", s.join(", ")));
        }
        if self.floor_met == Some(false) {
            let last = self.points.last().expect("non-empty sweep");
            out.push(format!(
                "speedup {:.2} at n = {} is below {MIN_PLANAR_SPEEDUP}",
                last.speedup, last.n
            ));
        }
        out
    }
}

/// Smallest observable step of the monotonic clock.
fn timer_tick() -> Duration {
    let mut best = Duration::from_secs(1);
    for _ in 0..50 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min(b - a);
    }
    best.max(Duration::from_nanos(1))
}

/// Median microseconds per call over `repeats` samples after one discarded
/// warm-up call. Samples shorter than ten clock ticks are discarded and
/// retaken with twice as many calls.
fn median_micros(repeats: usize, tick: Duration, mut f: impl FnMut()) -> f64 {
    f();
    let mut samples = Vec::with_capacity(repeats);
    let mut batch = 1u32;
    while samples.len() < repeats {
        let start = Instant::now();
        for _ in 0..batch {
            f();
        }
        let elapsed = start.elapsed();
        if elapsed < tick * MIN_TICKS_PER_SAMPLE {
            batch *= 2;
            continue;
        }
        samples.push(elapsed.as_secs_f64() * 1e6 / batch as f64);
    }
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

fn sweep_graph(n: usize, ell: usize) -> Result<PoseGraph> {
    synth_graph(
        GraphKind::ChainWithLoops { seed: SWEEP_SEED },
        n,
        &PhiSource::Randomized {
            seed: SWEEP_SEED,
            ell,
        },
    )
}

/// Times both routes on seeded loopy chains of each size. Runs on the
/// calling thread only.
pub fn timing_sweep(sizes: &[usize], ell: usize, repeats: usize) -> Result<BenchSummary> {
    if repeats < 3 {
        return Err(Error::InvalidArgument(format!("repeats must be at least 3, got {repeats}")));
    }
    if sizes.is_empty() || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("sizes must be non-empty and ascending".into()));
    }
    if sizes[0] < 2 {
        return Err(Error::InvalidArgument("sizes must be at least 2".into()));
    }
    let tick = timer_tick();
    let mut points = Vec::with_capacity(sizes.len());
    let mut violation_count = 0;
    for &n in sizes {
        let g = sweep_graph(n, ell)?;
        let fim_report = criteria_from_fim(&assemble_fim(&g)?)?;
        let lap_report = criteria_from_laplacian(&weighted_laplacian(&g, WeightScheme::MaxEig)?, None)?;
        violation_count += verify_bound(&fim_report, &lap_report).violations.len();

        let us_fim = median_micros(repeats, tick, || {
            let y = assemble_fim(&g).expect("size checked above");
            std::hint::black_box(criteria_from_fim(&y).expect("checked above"));
        });
        let us_lap = median_micros(repeats, tick, || {
            let l = weighted_laplacian(&g, WeightScheme::MaxEig).expect("checked above");
            std::hint::black_box(criteria_from_laplacian(&l, None).expect("checked above"));
        });
        log::info!("n = {n}: fim {us_fim:.0} us, laplacian {us_lap:.0} us");
        points.push(TimingPoint {
            n,
            us_fim,
            us_lap,
            speedup: us_fim / us_lap,
        });
    }
    let asserted: Vec<f64> = points.iter().filter(|p| p.n > 2).map(|p| p.speedup).collect();
    let speedup_monotone = asserted.windows(2).all(|w| w[1] >= w[0]);
    let floor_met = (ell == 3).then(|| points.last().expect("non-empty").speedup >= MIN_PLANAR_SPEEDUP);
    Ok(BenchSummary {
        ell,
        points,
        violation_count,
        speedup_monotone,
        floor_met,
    })
}
