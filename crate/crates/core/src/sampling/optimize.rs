//! Greedy condition-number minimization of the ring ordering.
//!
//! `θ_{L-1}` is pinned to the candidate farthest from the poles. Then for
//! `m = L-2` down to `0`, `θ_m` is the unassigned candidate that minimizes
//! `κ(P_m)` with `P_m` built over `[θ_m, θ_{m+1}, .., θ_{L-1}]`.
//!
//! All candidates at one step share the `n - 1` rows of the already placed
//! suffix. With `A = U Σ Vᵀ` the SVD of those rows (full `V`, last column
//! spanning the null space of `A`), a candidate row `r` gives
//! `[r; A] V = [c; Σ 0]` with `c = r V`, whose singular values are the roots
//! of the secular equation `1 + Σ_j c_j² / (d_j² - σ²) = 0` with poles
//! `d = (σ_1, .., σ_{n-1}, 0)`. Each candidate then costs `O(n²)` instead of
//! a fresh `O(n³)` SVD.

use std::f64::consts::FRAC_PI_2;

use faer::{Mat, MatRef};
use rayon::prelude::*;

use super::{nearest_equator, validate_candidates, ColatitudeGrid, Measure, Ordering};
use crate::error::{Error, Result};
use crate::pm_system::condition_number;

/// Relative window inside which two condition numbers count as tied.
const TIE_TOLERANCE: f64 = 1e-9;
/// Below `TINY_RATIO * scale` a secular weight is treated as zero.
const TINY_RATIO: f64 = 1e-15;
/// Condition numbers past this are reported as infinite.
const KAPPA_CEILING: f64 = 1e40;
const SECULAR_ITERATIONS: usize = 128;

/// Source of the rows of `P_m`: row `i` holds the order-`m` basis at
/// `thetas[i]` for degrees `m..L-1`.
pub trait BlockRows: Sync {
    fn band_limit(&self) -> usize;
    fn rows(&self, m: usize, thetas: &[f64]) -> Mat<f64>;
}

pub fn optimize_order<B: BlockRows>(
    candidates: &[f64],
    band_limit: usize,
    measure: Measure,
    rows: &B,
) -> Result<ColatitudeGrid> {
    validate_candidates(candidates, band_limit)?;
    if rows.band_limit() != band_limit {
        return Err(Error::BandLimitMismatch {
            left: band_limit,
            right: rows.band_limit(),
        });
    }
    let anchor = match measure {
        Measure::Uniform => (band_limit - 1) / 2,
        _ => nearest_equator(candidates),
    };

    let mut permutation = vec![usize::MAX; band_limit];
    permutation[band_limit - 1] = anchor;
    let mut remaining: Vec<usize> = (0..band_limit).filter(|&t| t != anchor).collect();

    for m in (0..band_limit.saturating_sub(1)).rev() {
        let placed: Vec<f64> = permutation[m + 1..].iter().map(|&t| candidates[t]).collect();
        let trial: Vec<f64> = remaining.iter().map(|&t| candidates[t]).collect();
        let placed_rows = rows.rows(m, &placed);
        let trial_rows = rows.rows(m, &trial);
        let kappas = candidate_conditions(placed_rows.as_ref(), trial_rows.as_ref());
        let pick = match pick_candidate(&kappas, &trial) {
            Some(pick) => pick,
            None => {
                // Past the secular solver's resolution: rank candidates by
                // dense singular values, which stay finite unless exactly singular.
                let dense = dense_conditions(placed_rows.as_ref(), trial_rows.as_ref());
                pick_candidate(&dense, &trial).ok_or(Error::IllConditionedGrid { m })?
            }
        };
        permutation[m] = remaining.remove(pick);
    }

    ColatitudeGrid::with_candidates(candidates, measure, Ordering::ConditionMinimized, permutation)
}

/// Index of the smallest finite κ; near-ties go to the co-latitude closer to
/// the equator, then to the earlier candidate.
fn pick_candidate(kappas: &[f64], thetas: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &kappa) in kappas.iter().enumerate() {
        if !kappa.is_finite() {
            continue;
        }
        let Some(b) = best else {
            best = Some(i);
            continue;
        };
        let current = kappas[b];
        let smaller = kappa < current * (1.0 - TIE_TOLERANCE);
        let tied_nearer_equator = (kappa - current).abs() <= TIE_TOLERANCE * current
            && (thetas[i] - FRAC_PI_2).abs() < (thetas[b] - FRAC_PI_2).abs();
        if smaller || tied_nearer_equator {
            best = Some(i);
        }
    }
    best
}

/// Condition number of `[r; placed]` for every row `r` of `trial`.
///
/// `placed` is `(n-1) × n`, `trial` is `k × n`.
pub(crate) fn candidate_conditions(placed: MatRef<'_, f64>, trial: MatRef<'_, f64>) -> Vec<f64> {
    let n = trial.ncols();
    assert_eq!(placed.ncols(), n);
    assert_eq!(placed.nrows() + 1, n);
    if n == 1 {
        return (0..trial.nrows())
            .map(|i| if trial[(i, 0)] != 0.0 { 1.0 } else { f64::INFINITY })
            .collect();
    }
    let svd = match placed.svd() {
        Ok(svd) => svd,
        Err(_) => return vec![f64::INFINITY; trial.nrows()],
    };
    let sigma: Vec<f64> = (0..n - 1).map(|j| svd.S()[j]).collect();
    let projected = trial * svd.V();
    (0..trial.nrows())
        .into_par_iter()
        .map(|i| {
            let weights: Vec<f64> = (0..n).map(|j| projected[(i, j)]).collect();
            rank_one_condition(&sigma, &weights)
        })
        .collect()
}

fn dense_conditions(placed: MatRef<'_, f64>, trial: MatRef<'_, f64>) -> Vec<f64> {
    let n = trial.ncols();
    (0..trial.nrows())
        .into_par_iter()
        .map(|i| {
            let block = Mat::from_fn(n, n, |r, c| if r == 0 { trial[(i, c)] } else { placed[(r - 1, c)] });
            condition_number(block.as_ref())
        })
        .collect()
}

/// κ of the `n × n` matrix whose Gram matrix is `diag(d², 0) + c cᵀ`,
/// `d = sigma` (length `n - 1`), `c = weights` (length `n`).
fn rank_one_condition(sigma: &[f64], weights: &[f64]) -> f64 {
    let n = weights.len();
    let null_weight = weights[n - 1];
    let norm_c = weights.iter().map(|c| c * c).sum::<f64>().sqrt();
    let scale = norm_c.max(sigma.first().copied().unwrap_or(0.0));
    let tiny = TINY_RATIO * scale;
    if null_weight.abs() <= tiny || scale == 0.0 {
        return f64::INFINITY;
    }

    let mut poles = Vec::with_capacity(n);
    let mut deflated_min = f64::INFINITY;
    let mut deflated_max = 0.0f64;
    for (&d, &c) in sigma.iter().zip(weights) {
        if c.abs() <= tiny {
            deflated_min = deflated_min.min(d);
            deflated_max = deflated_max.max(d);
        } else {
            poles.push((d, c * c));
        }
    }
    poles.push((0.0, null_weight * null_weight));

    let secular = |s: f64| -> f64 {
        1.0 + poles
            .iter()
            .map(|&(d, w)| w / ((d - s) * (d + s)))
            .sum::<f64>()
    };

    // Smallest root lies in (0, lowest positive pole).
    let lowest_pole = poles
        .iter()
        .filter(|(d, _)| *d > 0.0)
        .map(|(d, _)| *d)
        .fold(f64::INFINITY, f64::min);
    let upper = if lowest_pole.is_finite() { lowest_pole } else { norm_c * 2.0 };
    let floor = upper / KAPPA_CEILING;
    let sigma_min = if secular(floor) > 0.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (floor.ln(), upper.ln());
        for _ in 0..SECULAR_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if secular(mid.exp()) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    };

    // Largest root lies in (top pole, sqrt(top² + ‖c‖²)].
    let top = poles.iter().map(|(d, _)| *d).fold(0.0, f64::max);
    let weight_sum: f64 = poles.iter().map(|(_, w)| *w).sum();
    let (mut lo, mut hi) = (top, (top * top + weight_sum).sqrt());
    for _ in 0..SECULAR_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if secular(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma_max = hi.max(deflated_max);
    let sigma_min = sigma_min.min(deflated_min);
    if sigma_min <= 0.0 {
        f64::INFINITY
    } else {
        let kappa = sigma_max / sigma_min;
        if kappa > KAPPA_CEILING {
            f64::INFINITY
        } else {
            kappa
        }
    }
}
