use std::time::Instant;

use super::{rng_for, GridSource, Report};
use crate::error::Result;
use crate::pm_system::ScalarBasis;
use crate::sampling::{Measure, Ordering};
use crate::transform::{forward_sht_with, inverse_sht, ForwardOptions, HarmonicCoefficients};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub trials: usize,
    /// Report the mean instead of the median.
    pub mean: bool,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { trials: 5, mean: false, seed: 0 }
    }
}

/// Wall times in seconds: inverse, forward, and the solve step of the forward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRecord {
    pub band_limit: usize,
    pub tau_i: f64,
    pub tau_f: f64,
    pub tau_f1: f64,
}

/// One untimed warmup, then `trials` timed inverse/forward pairs on the
/// condition-minimized uniform grid.
pub fn bench(band_limits: &[usize], options: BenchOptions, grids: &GridSource) -> Result<Vec<BenchRecord>> {
    let trials = options.trials.max(1);
    let mut out = Vec::with_capacity(band_limits.len());
    for &band_limit in band_limits {
        let grid = grids.grid(band_limit, Measure::Uniform, Ordering::ConditionMinimized)?;
        let basis = ScalarBasis { band_limit };
        let mut rng = rng_for(options.seed, band_limit);
        let (mut ti, mut tf, mut tf1) = (Vec::new(), Vec::new(), Vec::new());
        for trial in 0..=trials {
            let coeffs = HarmonicCoefficients::random(band_limit, &mut rng);
            let start = Instant::now();
            let samples = inverse_sht(&coeffs, &grid)?;
            let inverse = start.elapsed().as_secs_f64();
            let (_, stats) = forward_sht_with(&samples, &grid, &basis, ForwardOptions::default())?;
            if trial > 0 {
                ti.push(inverse);
                tf.push(stats.total_seconds);
                tf1.push(stats.solve_seconds);
            }
        }
        let summarize = |v: &mut Vec<f64>| if options.mean { mean(v) } else { median(v) };
        out.push(BenchRecord {
            band_limit,
            tau_i: summarize(&mut ti),
            tau_f: summarize(&mut tf),
            tau_f1: summarize(&mut tf1),
        });
    }
    Ok(out)
}

pub fn bench_report(seed: u64, records: &[BenchRecord]) -> Report {
    let mut report = Report::new("bench", seed, &["L", "tau_i", "tau_f", "tau_f1"]);
    for r in records {
        report.push(vec![
            r.band_limit.to_string(),
            format!("{:.6e}", r.tau_i),
            format!("{:.6e}", r.tau_f),
            format!("{:.6e}", r.tau_f1),
        ]);
    }
    report
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
