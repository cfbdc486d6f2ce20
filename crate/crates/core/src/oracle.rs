//! Slow reference transforms.
//!
//! [`direct_synthesis`] sums the full expansion at every sample point and
//! [`dense_lsq_analysis`] solves the full `L² × L²` synthesis system. Neither
//! shares code with the fast transforms beyond the basis evaluators.

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
use num_complex::Complex64;

use crate::basis::legendre_column;
use crate::error::{Error, Result};
use crate::sampling::ColatitudeGrid;
use crate::transform::{HarmonicCoefficients, SpatialSamples};

pub const DIRECT_SYNTHESIS_MAX_L: usize = 128;
pub const DENSE_LSQ_MAX_L: usize = 64;

/// `P̃_ℓ^m(θ_k)` for every ring, order `-L < m < L` and degree, as
/// `table[k][ℓ² + ℓ + m]`.
fn basis_table(grid: &ColatitudeGrid) -> Result<Vec<Vec<f64>>> {
    let band_limit = grid.band_limit();
    let mut table = vec![vec![0.0; band_limit * band_limit]; band_limit];
    for (k, row) in table.iter_mut().enumerate() {
        for m in -(band_limit as i64 - 1)..band_limit as i64 {
            let column = legendre_column(m, grid.theta(k), band_limit)?;
            for ell in column.first_degree()..band_limit {
                row[HarmonicCoefficients::index(ell, m)] = column.values[ell - column.first_degree()];
            }
        }
    }
    Ok(table)
}

fn phase(m: i64, j: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (m * j as i64) as f64 / n as f64)
}

/// `f(θ_k, φ_j) = Σ_ℓ Σ_m f_ℓ^m Y_ℓ^m(θ_k, φ_j)` term by term.
pub fn direct_synthesis(coeffs: &HarmonicCoefficients, grid: &ColatitudeGrid) -> Result<SpatialSamples> {
    let band_limit = grid.band_limit();
    if band_limit > DIRECT_SYNTHESIS_MAX_L {
        return Err(Error::SizeGuard {
            what: "direct synthesis",
            max: DIRECT_SYNTHESIS_MAX_L,
            got: band_limit,
        });
    }
    if coeffs.band_limit() != band_limit {
        return Err(Error::BandLimitMismatch {
            left: coeffs.band_limit(),
            right: band_limit,
        });
    }
    let table = basis_table(grid)?;
    let mut values = Vec::with_capacity(band_limit * band_limit);
    for (k, row) in table.iter().enumerate() {
        let n = 2 * k + 1;
        for j in 0..n {
            let mut sum = Complex64::new(0.0, 0.0);
            for (ell, m, f) in coeffs.iter() {
                sum += f * row[HarmonicCoefficients::index(ell, m)] * phase(m, j, n);
            }
            values.push(sum);
        }
    }
    SpatialSamples::from_values(band_limit, values)
}

/// Least-squares solution of `Y f = samples` with the dense `L² × L²`
/// synthesis matrix `Y`, by column-pivoted QR.
pub fn dense_lsq_analysis(samples: &SpatialSamples, grid: &ColatitudeGrid) -> Result<HarmonicCoefficients> {
    let band_limit = grid.band_limit();
    if band_limit > DENSE_LSQ_MAX_L {
        return Err(Error::SizeGuard {
            what: "dense least squares",
            max: DENSE_LSQ_MAX_L,
            got: band_limit,
        });
    }
    if samples.band_limit() != band_limit {
        return Err(Error::BandLimitMismatch {
            left: samples.band_limit(),
            right: band_limit,
        });
    }
    let size = band_limit * band_limit;
    let table = basis_table(grid)?;
    let mut rows = Vec::with_capacity(size);
    for k in 0..band_limit {
        for j in 0..2 * k + 1 {
            rows.push((k, j));
        }
    }
    let matrix = Mat::<Complex64>::from_fn(size, size, |r, c| {
        let (k, j) = rows[r];
        let (_, m) = HarmonicCoefficients::degree_order(c);
        table[k][c] * phase(m, j, 2 * k + 1)
    });

    let qr = matrix.col_piv_qr();
    let r = qr.R();
    let diag: Vec<f64> = (0..size).map(|i| r[(i, i)].norm()).collect();
    let top = diag.iter().copied().fold(0.0, f64::max);
    let tolerance = top * size as f64 * f64::EPSILON;
    let rank = diag.iter().filter(|&&d| d > tolerance).count();
    if rank < size {
        return Err(Error::SingularSystem { rank, size });
    }

    let rhs = Mat::<Complex64>::from_fn(size, 1, |i, _| samples.values()[i]);
    let x = qr.solve_lstsq(&rhs);
    HarmonicCoefficients::from_values(band_limit, (0..size).map(|i| x[(i, 0)]).collect())
}
