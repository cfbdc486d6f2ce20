//! Accuracy, conditioning, error-surface and timing studies.
//!
//! Every study is deterministic given its seed. Random draws come from
//! ChaCha8 with the seed as key and the band-limit as stream, so a
//! band-limit's numbers do not depend on which other band-limits are swept.

mod report;
mod timing;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use report::Report;
pub use timing::{bench, bench_report, loglog_slope, BenchOptions, BenchRecord};

use crate::error::Result;
use crate::oracle::dense_lsq_analysis;
use crate::pm_system::build_block;
use crate::sampling::{ColatitudeGrid, GridCache, Measure, Ordering};
use crate::transform::{forward_sht, inverse_sht, HarmonicCoefficients, SpatialSamples};

/// Generator for one band-limit of a sweep.
pub fn rng_for(seed: u64, band_limit: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(band_limit as u64);
    rng
}

/// Where grids come from: built fresh, or through an on-disk cache.
#[derive(Debug, Clone, Default)]
pub struct GridSource {
    pub cache: Option<GridCache>,
}

impl GridSource {
    pub fn cached(cache: GridCache) -> Self {
        Self { cache: Some(cache) }
    }

    pub fn grid(&self, band_limit: usize, measure: Measure, ordering: Ordering) -> Result<ColatitudeGrid> {
        match &self.cache {
            Some(cache) => cache.get(band_limit, measure, ordering),
            None => ColatitudeGrid::build(band_limit, measure, ordering),
        }
    }
}

/// Per-band-limit error averaged over trials; `failure` is set when a trial
/// could not be completed.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub band_limit: usize,
    pub trials: usize,
    pub e_max: f64,
    pub e_mean: f64,
    pub failure: Option<String>,
}

fn error_sweep(
    band_limits: &[usize],
    trials: usize,
    seed: u64,
    grids: &GridSource,
    mut trial: impl FnMut(&ColatitudeGrid, &mut ChaCha8Rng) -> Result<(f64, f64)>,
) -> Vec<ErrorRecord> {
    band_limits
        .iter()
        .map(|&band_limit| {
            let outcome = (|| -> Result<(f64, f64)> {
                let grid = grids.grid(band_limit, Measure::Uniform, Ordering::ConditionMinimized)?;
                let mut rng = rng_for(seed, band_limit);
                let (mut max, mut mean) = (0.0, 0.0);
                for _ in 0..trials {
                    let (a, b) = trial(&grid, &mut rng)?;
                    max += a;
                    mean += b;
                }
                Ok((max / trials as f64, mean / trials as f64))
            })();
            match outcome {
                Ok((e_max, e_mean)) => ErrorRecord { band_limit, trials, e_max, e_mean, failure: None },
                Err(e) => ErrorRecord {
                    band_limit,
                    trials,
                    e_max: f64::NAN,
                    e_mean: f64::NAN,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Spectral round trip: random coefficients, inverse then forward.
pub fn exp1(band_limits: &[usize], trials: usize, seed: u64, grids: &GridSource) -> Vec<ErrorRecord> {
    error_sweep(band_limits, trials.max(1), seed, grids, |grid, rng| {
        let truth = HarmonicCoefficients::random(grid.band_limit(), rng);
        let back = forward_sht(&inverse_sht(&truth, grid)?, grid)?;
        back.error_against(&truth)
    })
}

/// Spatial round trip: random samples, forward then inverse.
pub fn exp2(band_limits: &[usize], trials: usize, seed: u64, grids: &GridSource) -> Vec<ErrorRecord> {
    error_sweep(band_limits, trials.max(1), seed, grids, |grid, rng| {
        let truth = SpatialSamples::random(grid.band_limit(), rng);
        let back = inverse_sht(&forward_sht(&truth, grid)?, grid)?;
        back.error_against(&truth)
    })
}

pub fn error_report(command: &str, seed: u64, records: &[ErrorRecord]) -> Report {
    let mut report = Report::new(command, seed, &["L", "trials", "e_max", "e_mean", "status"]);
    for r in records {
        report.push(vec![
            r.band_limit.to_string(),
            r.trials.to_string(),
            format!("{:.6e}", r.e_max),
            format!("{:.6e}", r.e_mean),
            r.failure.clone().unwrap_or_else(|| "ok".into()),
        ]);
    }
    report
}

/// `E_ℓ^m`: `|f_t - f_r|` per coefficient of the spectral round trip,
/// averaged over trials, in storage order.
pub fn error_surface(band_limit: usize, trials: usize, seed: u64, grids: &GridSource) -> Result<Vec<f64>> {
    let grid = grids.grid(band_limit, Measure::Uniform, Ordering::ConditionMinimized)?;
    let mut rng = rng_for(seed, band_limit);
    let trials = trials.max(1);
    let mut sum = vec![0.0; band_limit * band_limit];
    for _ in 0..trials {
        let truth = HarmonicCoefficients::random(band_limit, &mut rng);
        let back = forward_sht(&inverse_sht(&truth, &grid)?, &grid)?;
        for (s, (a, b)) in sum.iter_mut().zip(back.values().iter().zip(truth.values())) {
            *s += (a - b).norm();
        }
    }
    Ok(sum.into_iter().map(|s| s / trials as f64).collect())
}

pub fn error_surface_report(band_limit: usize, seed: u64, surface: &[f64]) -> Report {
    let mut report = Report::new("errsurface", seed, &["ell", "m", "error"]);
    for (i, e) in surface.iter().enumerate() {
        let (ell, m) = HarmonicCoefficients::degree_order(i);
        debug_assert!(ell < band_limit);
        report.push(vec![ell.to_string(), m.to_string(), format!("{e:.6e}")]);
    }
    report
}

/// Mean of `E_ℓ^m` over `|m| < L/4` and over `|m| >= 3L/4`.
pub fn order_band_means(band_limit: usize, surface: &[f64]) -> (f64, f64) {
    let (mut low, mut n_low, mut high, mut n_high) = (0.0, 0usize, 0.0, 0usize);
    for (i, &e) in surface.iter().enumerate() {
        let (_, m) = HarmonicCoefficients::degree_order(i);
        let a = m.unsigned_abs() as usize;
        if 4 * a < band_limit {
            low += e;
            n_low += 1;
        } else if 4 * a >= 3 * band_limit {
            high += e;
            n_high += 1;
        }
    }
    (low / n_low.max(1) as f64, high / n_high.max(1) as f64)
}

/// `κ(P_m)` for `m = 0..L-1`.
pub fn condition_profile(grid: &ColatitudeGrid) -> Result<Vec<f64>> {
    (0..grid.band_limit())
        .map(|m| Ok(build_block(grid, m as i64)?.condition_number()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRecord {
    pub band_limit: usize,
    pub kappas: Vec<f64>,
}

impl ConditionRecord {
    pub fn max_kappa(&self) -> f64 {
        self.kappas.iter().copied().fold(0.0, f64::max)
    }
}

pub fn cond(
    band_limits: &[usize],
    measure: Measure,
    ordering: Ordering,
    grids: &GridSource,
) -> Result<Vec<ConditionRecord>> {
    band_limits
        .iter()
        .map(|&band_limit| {
            let grid = grids.grid(band_limit, measure, ordering)?;
            Ok(ConditionRecord { band_limit, kappas: condition_profile(&grid)? })
        })
        .collect()
}

pub fn cond_report(measure: Measure, ordering: Ordering, records: &[ConditionRecord]) -> Report {
    let mut report = Report::new("cond", 0, &["L", "measure", "ordering", "m", "kappa", "max_kappa"]);
    for r in records {
        let max = r.max_kappa();
        for (m, k) in r.kappas.iter().enumerate() {
            report.push(vec![
                r.band_limit.to_string(),
                measure.tag().into(),
                ordering.tag().into(),
                m.to_string(),
                format!("{k:.6e}"),
                format!("{max:.6e}"),
            ]);
        }
    }
    report
}

/// Relative coefficient error `‖f_r - f_t‖₂ / ‖f_t‖₂` of the dense
/// least-squares analysis of exactly synthesized samples, averaged over trials.
pub fn lsq_baseline(grid: &ColatitudeGrid, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = rng_for(seed, grid.band_limit());
    let trials = trials.max(1);
    let mut total = 0.0;
    for _ in 0..trials {
        let truth = HarmonicCoefficients::random(grid.band_limit(), &mut rng);
        let samples = inverse_sht(&truth, grid)?;
        let back = dense_lsq_analysis(&samples, grid)?;
        total += relative_error(back.values(), truth.values());
    }
    Ok(total / trials as f64)
}

pub fn relative_error(got: &[Complex64], truth: &[Complex64]) -> f64 {
    let diff: f64 = got.iter().zip(truth).map(|(a, b)| (a - b).norm_sqr()).sum();
    let norm: f64 = truth.iter().map(|z| z.norm_sqr()).sum();
    (diff / norm).sqrt()
}
