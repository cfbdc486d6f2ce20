use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{check_band_limits, ring_bins, twiddles, HarmonicCoefficients, SpatialSamples};
use crate::error::Result;
use crate::pm_system::{Basis, BlockFactor, LegendreBlock, OrderColumns, ScalarBasis, SpinBasis};
use crate::sampling::ColatitudeGrid;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ForwardOptions {
    /// Keep one DFT spectrum per ring and peel orders directly at the
    /// aliased bins `±m mod (2k+1)` instead of updating samples.
    pub spectral: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ForwardStats {
    /// Time spent factoring and solving the `P_m` systems.
    pub solve_seconds: f64,
    pub total_seconds: f64,
}

pub fn forward_sht(samples: &SpatialSamples, grid: &ColatitudeGrid) -> Result<HarmonicCoefficients> {
    let basis = ScalarBasis { band_limit: grid.band_limit() };
    forward_sht_with(samples, grid, &basis, ForwardOptions::default()).map(|(c, _)| c)
}

pub fn spin_forward_sht(samples: &SpatialSamples, grid: &ColatitudeGrid, spin: i64) -> Result<HarmonicCoefficients> {
    let basis = SpinBasis::new(grid.band_limit(), spin)?;
    forward_sht_with(samples, grid, &basis, ForwardOptions::default()).map(|(c, _)| c)
}

/// Columns for order `o`, reusing the `|o|` evaluator when the basis has a
/// mirror relation.
pub(crate) fn order_system<B: Basis>(basis: &B, o: i64) -> Result<(OrderColumns, f64)> {
    let abs = o.unsigned_abs() as usize;
    match basis.mirror_sign(abs) {
        Some(sign) if o < 0 => Ok((basis.order_columns(abs as i64)?, sign)),
        _ => Ok((basis.order_columns(o)?, 1.0)),
    }
}

enum Rings {
    Samples(Vec<Vec<Complex64>>),
    Spectra(Vec<Vec<Complex64>>),
}

/// Order-peeling analysis: for `m = L-1` down to `0`, read `G_{±m}` off the
/// rings `k >= m`, solve `P_{±m} f_{±m} = g_{±m}`, then remove the order-`±m`
/// part from the rings `k < m`, where it would alias.
pub fn forward_sht_with<B: Basis>(
    samples: &SpatialSamples,
    grid: &ColatitudeGrid,
    basis: &B,
    options: ForwardOptions,
) -> Result<(HarmonicCoefficients, ForwardStats)> {
    let start = Instant::now();
    let band_limit = grid.band_limit();
    check_band_limits(samples.band_limit(), band_limit)?;
    check_band_limits(basis.band_limit(), band_limit)?;

    let tables: Vec<Vec<Complex64>> = (0..band_limit).map(|k| twiddles(2 * k + 1)).collect();
    let mut rings = if options.spectral {
        let mut planner = FftPlanner::new();
        Rings::Spectra(
            samples
                .rings()
                .map(|r| {
                    let mut spectrum = r.to_vec();
                    planner.plan_fft_forward(spectrum.len()).process(&mut spectrum);
                    spectrum
                })
                .collect(),
        )
    } else {
        Rings::Samples(samples.rings().map(<[Complex64]>::to_vec).collect())
    };

    let mut coeffs = HarmonicCoefficients::zeros(band_limit);
    let mut solve_seconds = 0.0;

    for m in (0..band_limit).rev() {
        let (g_plus, g_minus): (Vec<Complex64>, Vec<Complex64>) = match &rings {
            Rings::Samples(r) => r[m..]
                .par_iter()
                .zip(&tables[m..])
                .map(|(ring, table)| ring_bins(ring, m, table))
                .unzip(),
            Rings::Spectra(s) => s[m..]
                .iter()
                .map(|spectrum| {
                    let n = spectrum.len();
                    let delta = 2.0 * PI / n as f64;
                    (spectrum[m % n] * delta, spectrum[(n - m % n) % n] * delta)
                })
                .unzip(),
        };

        let (plus_cols, plus_sign) = order_system(basis, m as i64)?;
        let minus = if m > 0 { Some(order_system(basis, -(m as i64))?) } else { None };
        let suffix = grid.suffix(m as i64);

        let solve_start = Instant::now();
        let plus_block = LegendreBlock {
            order: m as i64,
            sign: plus_sign,
            first_degree: plus_cols.first_degree(),
            matrix: plus_cols.rows(suffix),
        };
        let plus_factor = BlockFactor::new(&plus_block)?;
        let (f_plus, f_minus) = match (&minus, basis.mirror_sign(m)) {
            (None, _) => (plus_factor.solve_many(&[&g_plus], &[plus_sign]).remove(0), Vec::new()),
            (Some(_), Some(sign)) => {
                let mut both = plus_factor.solve_many(&[&g_plus, &g_minus], &[1.0, sign]);
                let f_minus = both.pop().unwrap_or_default();
                (both.pop().unwrap_or_default(), f_minus)
            }
            (Some((cols, sign)), None) => {
                let block = LegendreBlock {
                    order: -(m as i64),
                    sign: *sign,
                    first_degree: cols.first_degree(),
                    matrix: cols.rows(suffix),
                };
                let factor = BlockFactor::new(&block)?;
                (
                    plus_factor.solve_many(&[&g_plus], &[1.0]).remove(0),
                    factor.solve_many(&[&g_minus], &[*sign]).remove(0),
                )
            }
        };
        solve_seconds += solve_start.elapsed().as_secs_f64();

        let first_plus = plus_cols.first_degree();
        for (i, &v) in f_plus.iter().enumerate() {
            coeffs.set(first_plus + i, m as i64, v);
        }
        if let Some((cols, _)) = &minus {
            for (i, &v) in f_minus.iter().enumerate() {
                coeffs.set(cols.first_degree() + i, -(m as i64), v);
            }
        }
        if m == 0 {
            break;
        }

        // Remove c₊ e^{imφ} + c₋ e^{-imφ} from rings k < m, with
        // c± = Σ_ℓ f_ℓ^{±m} basis_ℓ^{±m}(θ_k).
        let (minus_cols, minus_sign) = minus.expect("m > 0");
        let shares_columns = basis.mirror_sign(m).is_some();
        let thetas = grid.thetas();
        let contribution = |k: usize| -> (Complex64, Complex64) {
            let mut buf = vec![0.0; plus_cols.len()];
            plus_cols.fill(thetas[k], &mut buf);
            let c_plus: Complex64 = f_plus.iter().zip(&buf).map(|(f, p)| f * p).sum();
            if !shares_columns {
                buf.resize(minus_cols.len(), 0.0);
                minus_cols.fill(thetas[k], &mut buf);
            }
            let c_minus: Complex64 = f_minus.iter().zip(&buf).map(|(f, p)| f * p).sum::<Complex64>() * minus_sign;
            (c_plus * plus_sign, c_minus)
        };
        match &mut rings {
            Rings::Samples(r) => r[..m]
                .par_iter_mut()
                .zip(&tables[..m])
                .enumerate()
                .for_each(|(k, (ring, table))| {
                    let (c_plus, c_minus) = contribution(k);
                    let n = ring.len();
                    let step = m % n;
                    let mut idx = 0;
                    for v in ring.iter_mut() {
                        let w = table[idx];
                        *v -= c_plus * w + c_minus * w.conj();
                        idx += step;
                        if idx >= n {
                            idx -= n;
                        }
                    }
                }),
            Rings::Spectra(s) => s[..m].par_iter_mut().enumerate().for_each(|(k, spectrum)| {
                let (c_plus, c_minus) = contribution(k);
                let n = spectrum.len();
                spectrum[m % n] -= c_plus * n as f64;
                spectrum[(n - m % n) % n] -= c_minus * n as f64;
            }),
        }
    }

    Ok((
        coeffs,
        ForwardStats {
            solve_seconds,
            total_seconds: start.elapsed().as_secs_f64(),
        },
    ))
}
