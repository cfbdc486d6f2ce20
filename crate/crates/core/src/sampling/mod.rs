//! Sample placement.
//!
//! A grid for band-limit `L` is `L` co-latitudes `θ_0..θ_{L-1}`; ring `k`
//! sits at `θ_k` and carries `2k + 1` equispaced longitudes, so the grid
//! holds `Σ (2k+1) = L²` samples. The co-latitudes are a permutation of a
//! candidate set (equiangular, or equal-mass under an alternative measure);
//! the permutation is what the grid cache persists.

mod cache;
mod measure;
mod optimize;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

pub use cache::{decode_grid, encode_grid, load_grid, save_grid, GridCache, GRID_MAGIC};
pub use measure::{measure_candidates, tan_cube_root_tail_mass};
pub use optimize::{optimize_order, BlockRows};

use crate::error::{Error, Result};

/// Measure along co-latitude used to place the candidate rings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// `dθ`: the equiangular set `π(2t+1)/(2L-1)`.
    Uniform,
    /// `sin θ dθ`
    Sine,
    /// `|tan θ|^{1/3} dθ`
    TanCubeRoot,
}

impl Measure {
    pub fn tag(self) -> &'static str {
        match self {
            Measure::Uniform => "uniform",
            Measure::Sine => "sine",
            Measure::TanCubeRoot => "tan13",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Measure::Uniform),
            "sine" => Ok(Measure::Sine),
            "tan13" => Ok(Measure::TanCubeRoot),
            other => Err(Error::InvalidInput(format!("unknown measure '{other}'"))),
        }
    }
}

/// How candidates are assigned to ring indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// Pole first, then alternating from the extremes inward.
    Interleaved,
    /// Greedy minimization of every per-order condition number.
    ConditionMinimized,
}

impl Ordering {
    pub fn tag(self) -> &'static str {
        match self {
            Ordering::Interleaved => "interleaved",
            Ordering::ConditionMinimized => "condmin",
        }
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interleaved" => Ok(Ordering::Interleaved),
            "condmin" => Ok(Ordering::ConditionMinimized),
            other => Err(Error::InvalidInput(format!("unknown ordering '{other}'"))),
        }
    }
}

/// Ring co-latitudes for one band-limit. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ColatitudeGrid {
    band_limit: usize,
    thetas: Vec<f64>,
    permutation: Vec<usize>,
    measure: Measure,
    ordering: Ordering,
}

impl ColatitudeGrid {
    /// Builds a grid from a permutation of the measure's candidate set;
    /// `thetas[k] = candidates[permutation[k]]`.
    pub fn from_permutation(
        band_limit: usize,
        measure: Measure,
        ordering: Ordering,
        permutation: Vec<usize>,
    ) -> Result<Self> {
        let candidates = candidates(band_limit, measure)?;
        Self::with_candidates(&candidates, measure, ordering, permutation)
    }

    fn with_candidates(
        candidates: &[f64],
        measure: Measure,
        ordering: Ordering,
        permutation: Vec<usize>,
    ) -> Result<Self> {
        let band_limit = candidates.len();
        if permutation.len() != band_limit {
            return Err(Error::InvalidInput(format!(
                "permutation has {} entries, expected {band_limit}",
                permutation.len()
            )));
        }
        let mut seen = vec![false; band_limit];
        for &t in &permutation {
            if t >= band_limit || std::mem::replace(&mut seen[t], true) {
                return Err(Error::InvalidInput(format!(
                    "permutation is not a bijection on 0..{band_limit}"
                )));
            }
        }
        let thetas = permutation.iter().map(|&t| candidates[t]).collect();
        Ok(Self {
            band_limit,
            thetas,
            permutation,
            measure,
            ordering,
        })
    }

    /// Default grid: interleaved ordering of the measure's candidates.
    pub fn interleaved(band_limit: usize, measure: Measure) -> Result<Self> {
        let candidates = candidates(band_limit, measure)?;
        interleaved_order(&candidates, band_limit, measure)
    }

    /// Condition-minimized ordering of the measure's candidates.
    pub fn condition_minimized(band_limit: usize, measure: Measure) -> Result<Self> {
        let candidates = candidates(band_limit, measure)?;
        let rows = crate::pm_system::LegendreRows::new(band_limit);
        optimize_order(&candidates, band_limit, measure, &rows)
    }

    pub fn build(band_limit: usize, measure: Measure, ordering: Ordering) -> Result<Self> {
        match ordering {
            Ordering::Interleaved => Self::interleaved(band_limit, measure),
            Ordering::ConditionMinimized => Self::condition_minimized(band_limit, measure),
        }
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn theta(&self, k: usize) -> f64 {
        self.thetas[k]
    }

    /// `θ^m = [θ_|m|, .., θ_{L-1}]`
    pub fn suffix(&self, m: i64) -> &[f64] {
        &self.thetas[m.unsigned_abs() as usize..]
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn ring_len(k: usize) -> usize {
        2 * k + 1
    }

    /// Offset of ring `k` in flat sample storage (`k²`).
    pub fn ring_offset(k: usize) -> usize {
        k * k
    }

    pub fn sample_count(&self) -> usize {
        (0..self.band_limit).map(Self::ring_len).sum()
    }

    pub fn ring_longitudes(&self, k: usize) -> RingLongitudes {
        ring_longitudes(k)
    }
}

/// Equispaced longitudes `φ_j = j Δ_k`, `Δ_k = 2π/(2k+1)`, of ring `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RingLongitudes {
    pub ring_index: usize,
    pub phis: Vec<f64>,
}

impl RingLongitudes {
    pub fn spacing(&self) -> f64 {
        2.0 * PI / (2 * self.ring_index + 1) as f64
    }
}

pub fn ring_longitudes(k: usize) -> RingLongitudes {
    let n = 2 * k + 1;
    let phis = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    RingLongitudes { ring_index: k, phis }
}

/// The equiangular set `π(2t+1)/(2L-1)`, `t = 0..L-1`; the last entry is `π`.
pub fn equiangular_candidates(band_limit: usize) -> Result<Vec<f64>> {
    if band_limit == 0 {
        return Err(Error::InvalidBandLimit(0));
    }
    let denom = (2 * band_limit - 1) as f64;
    Ok((0..band_limit)
        .map(|t| {
            if t + 1 == band_limit {
                PI
            } else {
                PI * (2 * t + 1) as f64 / denom
            }
        })
        .collect())
}

/// Candidate set for a measure, strictly increasing and ending at `π`.
pub fn candidates(band_limit: usize, measure: Measure) -> Result<Vec<f64>> {
    match measure {
        Measure::Uniform => equiangular_candidates(band_limit),
        other => measure_candidates(band_limit, other),
    }
}

/// Index pattern `[L-1, 0, L-2, 1, L-3, 2, ..]`: the pole first, then rings
/// alternate from the extremes inward so the largest rings sit near the equator.
pub fn interleaved_permutation(band_limit: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(band_limit);
    let (mut lo, mut hi) = (0usize, band_limit);
    let mut take_high = true;
    while lo < hi {
        if take_high {
            hi -= 1;
            out.push(hi);
        } else {
            out.push(lo);
            lo += 1;
        }
        take_high = !take_high;
    }
    out
}

/// Interleaved grid from a strictly increasing candidate set.
pub fn interleaved_order(candidates: &[f64], band_limit: usize, measure: Measure) -> Result<ColatitudeGrid> {
    validate_candidates(candidates, band_limit)?;
    ColatitudeGrid::with_candidates(
        candidates,
        measure,
        Ordering::Interleaved,
        interleaved_permutation(band_limit),
    )
}

pub(crate) fn validate_candidates(candidates: &[f64], band_limit: usize) -> Result<()> {
    if band_limit == 0 {
        return Err(Error::InvalidBandLimit(0));
    }
    if candidates.len() != band_limit {
        return Err(Error::InvalidInput(format!(
            "{} candidates for band-limit {band_limit}",
            candidates.len()
        )));
    }
    if candidates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("candidates must be strictly increasing".into()));
    }
    if candidates.iter().any(|&t| !(t > 0.0 && t <= PI)) {
        return Err(Error::InvalidInput("candidates must lie in (0, π]".into()));
    }
    Ok(())
}

/// Index of the candidate nearest the equator.
pub(crate) fn nearest_equator(candidates: &[f64]) -> usize {
    let mut best = 0;
    for (t, theta) in candidates.iter().enumerate() {
        if (theta - FRAC_PI_2).abs() < (candidates[best] - FRAC_PI_2).abs() {
            best = t;
        }
    }
    best
}
