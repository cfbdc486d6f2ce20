use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::forward::order_system;
use super::{check_band_limits, HarmonicCoefficients, SpatialSamples};
use crate::error::Result;
use crate::pm_system::{Basis, OrderColumns, ScalarBasis, SpinBasis};
use crate::sampling::ColatitudeGrid;

pub fn inverse_sht(coeffs: &HarmonicCoefficients, grid: &ColatitudeGrid) -> Result<SpatialSamples> {
    inverse_sht_with(coeffs, grid, &ScalarBasis { band_limit: grid.band_limit() })
}

pub fn spin_inverse_sht(coeffs: &HarmonicCoefficients, grid: &ColatitudeGrid, spin: i64) -> Result<SpatialSamples> {
    inverse_sht_with(coeffs, grid, &SpinBasis::new(grid.band_limit(), spin)?)
}

struct OrderTerm {
    columns: OrderColumns,
    /// `f_ℓ^{+m}` and `f_ℓ^{-m}` for `ℓ = first_degree..L-1`.
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
    /// Columns of `-m` when they are not a signed copy of the `+m` ones.
    minus_columns: Option<OrderColumns>,
    minus_sign: f64,
}

/// Synthesis by separation of variables: on ring `k`, every order `m`
/// contributes `(1/2π) G_m(θ_k) = Σ_ℓ f_ℓ^m basis_ℓ^m(θ_k)` to DFT bin
/// `m mod (2k+1)`, and one inverse DFT per ring yields the samples.
pub fn inverse_sht_with<B: Basis>(
    coeffs: &HarmonicCoefficients,
    grid: &ColatitudeGrid,
    basis: &B,
) -> Result<SpatialSamples> {
    let band_limit = grid.band_limit();
    check_band_limits(coeffs.band_limit(), band_limit)?;
    check_band_limits(basis.band_limit(), band_limit)?;

    let gather = |o: i64, first: usize| -> Vec<Complex64> {
        (first..band_limit).map(|ell| coeffs.get(ell, o)).collect()
    };
    let mut terms = Vec::with_capacity(band_limit);
    for m in 0..band_limit {
        let (columns, _) = order_system(basis, m as i64)?;
        let plus = gather(m as i64, columns.first_degree());
        let (minus, minus_columns, minus_sign) = if m == 0 {
            (Vec::new(), None, 1.0)
        } else {
            let (cols, sign) = order_system(basis, -(m as i64))?;
            let minus = gather(-(m as i64), cols.first_degree());
            let own = basis.mirror_sign(m).is_none().then_some(cols);
            (minus, own, sign)
        };
        terms.push(OrderTerm {
            columns,
            plus,
            minus,
            minus_columns,
            minus_sign,
        });
    }

    let thetas = grid.thetas();
    let rings: Vec<Vec<Complex64>> = (0..band_limit)
        .into_par_iter()
        .map_init(FftPlanner::new, |planner, k| {
            let n = 2 * k + 1;
            let theta = thetas[k];
            let mut bins = vec![Complex64::new(0.0, 0.0); n];
            let mut buf = vec![0.0; band_limit];
            for (m, term) in terms.iter().enumerate() {
                let len = term.columns.len();
                term.columns.fill(theta, &mut buf[..len]);
                let c_plus: Complex64 = term.plus.iter().zip(&buf[..len]).map(|(f, p)| f * p).sum();
                bins[m % n] += c_plus;
                if m == 0 {
                    continue;
                }
                let c_minus: Complex64 = match &term.minus_columns {
                    None => term.minus.iter().zip(&buf[..len]).map(|(f, p)| f * p).sum::<Complex64>() * term.minus_sign,
                    Some(cols) => {
                        let len = cols.len();
                        cols.fill(theta, &mut buf[..len]);
                        term.minus.iter().zip(&buf[..len]).map(|(f, p)| f * p).sum()
                    }
                };
                bins[(n - m % n) % n] += c_minus;
            }
            planner.plan_fft_inverse(n).process(&mut bins);
            bins
        })
        .collect();

    SpatialSamples::from_values(band_limit, rings.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::FOUR_PI;
    use crate::sampling::Measure;
    use crate::transform::forward_sht;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_from_monopole() {
        let grid = ColatitudeGrid::interleaved(7, Measure::Uniform).unwrap();
        let mut c = HarmonicCoefficients::zeros(7);
        c.set(0, 0, Complex64::new(FOUR_PI.sqrt(), 0.0));
        let s = inverse_sht(&c, &grid).unwrap();
        for v in s.values() {
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn zonal_dipole() {
        let grid = ColatitudeGrid::interleaved(5, Measure::Uniform).unwrap();
        let mut c = HarmonicCoefficients::zeros(5);
        c.set(1, 0, Complex64::new(1.0, 0.0));
        let s = inverse_sht(&c, &grid).unwrap();
        for k in 0..5 {
            let expected = (3.0 / FOUR_PI).sqrt() * grid.theta(k).cos();
            for v in s.ring(k) {
                assert_abs_diff_eq!(v.re, expected, epsilon = 1e-14);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn round_trip_small() {
        for band_limit in 1..12 {
            let grid = ColatitudeGrid::condition_minimized(band_limit, Measure::Uniform).unwrap();
            let c = HarmonicCoefficients::random(band_limit, &mut ChaCha8Rng::seed_from_u64(band_limit as u64));
            let back = forward_sht(&inverse_sht(&c, &grid).unwrap(), &grid).unwrap();
            let (max, _) = back.error_against(&c).unwrap();
            assert!(max < 1e-12, "L = {band_limit}: {max}");
        }
    }

    #[test]
    fn mismatched_band_limits() {
        let grid = ColatitudeGrid::interleaved(5, Measure::Uniform).unwrap();
        assert!(inverse_sht(&HarmonicCoefficients::zeros(4), &grid).is_err());
    }
}
