//! Forward and inverse spherical harmonic transforms on a [`ColatitudeGrid`].

mod forward;
mod inverse;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

pub use forward::{forward_sht, forward_sht_with, spin_forward_sht, ForwardOptions, ForwardStats};
pub use inverse::{inverse_sht, inverse_sht_with, spin_inverse_sht};

use crate::error::{Error, Result};
use crate::sampling::ColatitudeGrid;

/// `f_ℓ^m` for `0 <= ℓ < L`, `|m| <= ℓ`, stored at `ℓ² + ℓ + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoefficients {
    band_limit: usize,
    values: Vec<Complex64>,
}

impl HarmonicCoefficients {
    pub fn zeros(band_limit: usize) -> Self {
        Self {
            band_limit,
            values: vec![Complex64::new(0.0, 0.0); band_limit * band_limit],
        }
    }

    pub fn from_values(band_limit: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != band_limit * band_limit {
            return Err(Error::InvalidInput(format!(
                "{} coefficients for L = {band_limit}, expected {}",
                values.len(),
                band_limit * band_limit
            )));
        }
        Ok(Self { band_limit, values })
    }

    /// Real and imaginary parts uniform on `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(band_limit: usize, rng: &mut R) -> Self {
        let values = (0..band_limit * band_limit).map(|_| random_complex(rng)).collect();
        Self { band_limit, values }
    }

    pub fn index(ell: usize, m: i64) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= ell);
        ell * ell + (ell as i64 + m) as usize
    }

    /// Inverse of [`Self::index`].
    pub fn degree_order(index: usize) -> (usize, i64) {
        let ell = (index as f64).sqrt() as usize;
        let ell = if (ell + 1) * (ell + 1) <= index { ell + 1 } else if ell * ell > index { ell - 1 } else { ell };
        (ell, index as i64 - (ell * ell + ell) as i64)
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, ell: usize, m: i64) -> Complex64 {
        self.values[Self::index(ell, m)]
    }

    pub fn set(&mut self, ell: usize, m: i64, value: Complex64) {
        let i = Self::index(ell, m);
        self.values[i] = value;
    }

    /// `(ℓ, m, f_ℓ^m)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex64)> + '_ {
        (0..self.band_limit).flat_map(move |ell| {
            let l = ell as i64;
            (-l..=l).map(move |m| (ell, m, self.get(ell, m)))
        })
    }

    /// Largest and mean absolute entrywise difference.
    pub fn error_against(&self, other: &Self) -> Result<(f64, f64)> {
        check_band_limits(self.band_limit, other.band_limit)?;
        Ok(max_mean_error(&self.values, &other.values))
    }
}

/// Samples `f(θ_k, φ_j)`; ring `k` holds `2k+1` values starting at `k²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialSamples {
    band_limit: usize,
    values: Vec<Complex64>,
}

impl SpatialSamples {
    pub fn zeros(band_limit: usize) -> Self {
        Self {
            band_limit,
            values: vec![Complex64::new(0.0, 0.0); band_limit * band_limit],
        }
    }

    pub fn from_values(band_limit: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != band_limit * band_limit {
            return Err(Error::InvalidInput(format!(
                "{} samples for L = {band_limit}, expected {}",
                values.len(),
                band_limit * band_limit
            )));
        }
        Ok(Self { band_limit, values })
    }

    pub fn random<R: Rng + ?Sized>(band_limit: usize, rng: &mut R) -> Self {
        let values = (0..band_limit * band_limit).map(|_| random_complex(rng)).collect();
        Self { band_limit, values }
    }

    /// Evaluates `f(θ_k, φ_j)` at every sample point of `grid`.
    pub fn from_fn(grid: &ColatitudeGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let band_limit = grid.band_limit();
        let mut values = Vec::with_capacity(band_limit * band_limit);
        for k in 0..band_limit {
            let theta = grid.theta(k);
            let n = 2 * k + 1;
            for j in 0..n {
                values.push(f(theta, 2.0 * PI * j as f64 / n as f64));
            }
        }
        Self { band_limit, values }
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn ring(&self, k: usize) -> &[Complex64] {
        &self.values[k * k..(k + 1) * (k + 1)]
    }

    pub fn ring_mut(&mut self, k: usize) -> &mut [Complex64] {
        &mut self.values[k * k..(k + 1) * (k + 1)]
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Complex64]> {
        (0..self.band_limit).map(move |k| self.ring(k))
    }

    pub fn error_against(&self, other: &Self) -> Result<(f64, f64)> {
        check_band_limits(self.band_limit, other.band_limit)?;
        Ok(max_mean_error(&self.values, &other.values))
    }
}

fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

fn max_mean_error(a: &[Complex64], b: &[Complex64]) -> (f64, f64) {
    let mut max = 0.0f64;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let e = (x - y).norm();
        max = max.max(e);
        sum += e;
    }
    (max, sum / a.len().max(1) as f64)
}

pub(crate) fn check_band_limits(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::BandLimitMismatch { left, right });
    }
    Ok(())
}

/// `e^{2πi r/N}` for `r = 0..N`, from exact integer phases.
pub(crate) fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|r| {
            let (s, c) = (2.0 * PI * r as f64 / n as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

/// `(G_m, G_{-m}) = Δ_k Σ_j f_j e^{∓imφ_j}` on a ring of `2k+1` samples.
///
/// Exact for rings whose content is limited to orders `|m'| <= k`.
pub fn ring_analysis(ring: &[Complex64], m: i64) -> Result<(Complex64, Complex64)> {
    if ring.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("ring length {} is not odd", ring.len())));
    }
    let k = (ring.len() - 1) / 2;
    if m.unsigned_abs() as usize > k {
        return Err(Error::Aliasing { m, k });
    }
    let table = twiddles(ring.len());
    let (plus, minus) = ring_bins(ring, m.unsigned_abs() as usize, &table);
    Ok(if m < 0 { (minus, plus) } else { (plus, minus) })
}

/// `Δ Σ_j f_j e^{∓imφ_j}` for `m >= 0`, with `table` from [`twiddles`].
pub(crate) fn ring_bins(ring: &[Complex64], m: usize, table: &[Complex64]) -> (Complex64, Complex64) {
    let n = ring.len();
    let step = m % n;
    let mut idx = 0usize;
    let mut plus = Complex64::new(0.0, 0.0);
    let mut minus = Complex64::new(0.0, 0.0);
    for &f in ring {
        let w = table[idx];
        plus += f * w.conj();
        minus += f * w;
        idx += step;
        if idx >= n {
            idx -= n;
        }
    }
    let delta = 2.0 * PI / n as f64;
    (plus * delta, minus * delta)
}
