//! Per-order linear systems `g_m = P_m f_m`.
//!
//! Row `i` of `P_m` belongs to ring `k = |m| + i`, column `j` to degree
//! `ℓ = first_degree + j`, and the entry is `2π` times the basis value at
//! `θ_k`. For the scalar basis `P_{-m} = (-1)^m P_m`, so negative orders reuse
//! the `|m|` matrix with a sign flag.

use std::f64::consts::PI;

use faer::linalg::solvers::{ColPivQr, SolveLstsq};
use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::basis::{parity_sign, LegendreRecurrence, SpinRecurrence};
use crate::error::{Error, Result};
use crate::sampling::{BlockRows, ColatitudeGrid};

const TWO_PI: f64 = 2.0 * PI;
/// Solves fail when `σ_min / σ_max` drops below this.
pub const SINGULAR_THRESHOLD: f64 = 1e-14;

/// Latitudinal basis used to assemble the blocks.
pub trait Basis: Sync {
    fn band_limit(&self) -> usize;

    fn spin(&self) -> i64;

    /// Evaluator for the order-`m` columns.
    fn order_columns(&self, m: i64) -> Result<OrderColumns>;

    /// `Some(σ)` when the order `-m` block equals `σ` times the order `m`
    /// block, in which case only `m >= 0` blocks are ever built.
    fn mirror_sign(&self, m: usize) -> Option<f64>;
}

/// Scalar harmonics, `P̃_ℓ^m = Y_ℓ^m(θ, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct ScalarBasis {
    pub band_limit: usize,
}

impl Basis for ScalarBasis {
    fn band_limit(&self) -> usize {
        self.band_limit
    }

    fn spin(&self) -> i64 {
        0
    }

    fn order_columns(&self, m: i64) -> Result<OrderColumns> {
        check_order(m, self.band_limit)?;
        Ok(OrderColumns::Legendre {
            recurrence: LegendreRecurrence::new(m.unsigned_abs() as usize, self.band_limit),
            sign: if m < 0 { parity_sign(m) } else { 1.0 },
        })
    }

    fn mirror_sign(&self, m: usize) -> Option<f64> {
        Some(parity_sign(m as i64))
    }
}

/// Spin-weighted harmonics `ₛY_ℓ^m(θ, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct SpinBasis {
    pub band_limit: usize,
    pub spin: i64,
}

impl SpinBasis {
    pub fn new(band_limit: usize, spin: i64) -> Result<Self> {
        if band_limit == 0 {
            return Err(Error::InvalidBandLimit(0));
        }
        if spin.unsigned_abs() as usize >= band_limit {
            return Err(Error::OutOfRange {
                what: "spin",
                value: spin,
                band_limit,
            });
        }
        Ok(Self { band_limit, spin })
    }
}

impl Basis for SpinBasis {
    fn band_limit(&self) -> usize {
        self.band_limit
    }

    fn spin(&self) -> i64 {
        self.spin
    }

    fn order_columns(&self, m: i64) -> Result<OrderColumns> {
        Ok(OrderColumns::Spin(SpinRecurrence::new(self.spin, m, self.band_limit)?))
    }

    fn mirror_sign(&self, m: usize) -> Option<f64> {
        (self.spin == 0).then(|| parity_sign(m as i64))
    }
}

fn check_order(m: i64, band_limit: usize) -> Result<()> {
    if band_limit == 0 {
        return Err(Error::InvalidBandLimit(0));
    }
    if m.unsigned_abs() as usize >= band_limit {
        return Err(Error::OutOfRange {
            what: "order",
            value: m,
            band_limit,
        });
    }
    Ok(())
}

/// Column evaluator for one order.
#[derive(Debug, Clone)]
pub enum OrderColumns {
    Legendre { recurrence: LegendreRecurrence, sign: f64 },
    Spin(SpinRecurrence),
}

impl OrderColumns {
    pub fn first_degree(&self) -> usize {
        match self {
            OrderColumns::Legendre { recurrence, .. } => recurrence.order(),
            OrderColumns::Spin(r) => r.first_degree(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            OrderColumns::Legendre { recurrence, .. } => recurrence.len(),
            OrderColumns::Spin(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Basis values at `θ` for degrees `first_degree..L-1`.
    pub fn fill(&self, theta: f64, out: &mut [f64]) {
        match self {
            OrderColumns::Legendre { recurrence, sign } => {
                recurrence.fill(theta, out);
                if *sign < 0.0 {
                    out.iter_mut().for_each(|v| *v = -*v);
                }
            }
            OrderColumns::Spin(r) => r.fill(theta, out),
        }
    }

    /// `2π` times the basis values, one row per co-latitude.
    pub fn rows(&self, thetas: &[f64]) -> Mat<f64> {
        let n = self.len();
        let mut out = Mat::zeros(thetas.len(), n);
        let mut buf = vec![0.0; n];
        for (i, &theta) in thetas.iter().enumerate() {
            self.fill(theta, &mut buf);
            for (j, v) in buf.iter().enumerate() {
                out[(i, j)] = TWO_PI * v;
            }
        }
        out
    }
}

/// Row source for the ordering optimizer.
#[derive(Debug, Clone, Copy)]
pub struct LegendreRows {
    band_limit: usize,
}

impl LegendreRows {
    pub fn new(band_limit: usize) -> Self {
        Self { band_limit }
    }
}

impl BlockRows for LegendreRows {
    fn band_limit(&self) -> usize {
        self.band_limit
    }

    fn rows(&self, m: usize, thetas: &[f64]) -> Mat<f64> {
        let columns = OrderColumns::Legendre {
            recurrence: LegendreRecurrence::new(m, self.band_limit),
            sign: 1.0,
        };
        columns.rows(thetas)
    }
}

/// `P_m` over the ring suffix `θ^m`.
///
/// For a scalar negative order, `matrix` holds the `|m|` block and `sign`
/// is the mirror factor; otherwise `matrix` is the block itself and `sign`
/// is `1`.
#[derive(Debug, Clone)]
pub struct LegendreBlock {
    pub order: i64,
    pub sign: f64,
    pub first_degree: usize,
    pub matrix: Mat<f64>,
}

impl LegendreBlock {
    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// The block of the requested order, sign applied.
    pub fn signed_matrix(&self) -> Mat<f64> {
        if self.sign < 0.0 {
            Mat::from_fn(self.nrows(), self.ncols(), |i, j| -self.matrix[(i, j)])
        } else {
            self.matrix.clone()
        }
    }

    pub fn condition_number(&self) -> f64 {
        condition_number(self.matrix.as_ref())
    }

    pub fn factor(&self) -> Result<BlockFactor> {
        BlockFactor::new(self)
    }
}

/// Scalar `P_m` for `grid`.
pub fn build_block(grid: &ColatitudeGrid, m: i64) -> Result<LegendreBlock> {
    build_block_with(&ScalarBasis { band_limit: grid.band_limit() }, grid, m)
}

pub fn build_block_with<B: Basis>(basis: &B, grid: &ColatitudeGrid, m: i64) -> Result<LegendreBlock> {
    if basis.band_limit() != grid.band_limit() {
        return Err(Error::BandLimitMismatch {
            left: basis.band_limit(),
            right: grid.band_limit(),
        });
    }
    check_order(m, grid.band_limit())?;
    let order = m.unsigned_abs() as usize;
    let (stored, sign) = match basis.mirror_sign(order) {
        Some(s) if m < 0 => (order as i64, s),
        _ => (m, 1.0),
    };
    let columns = basis.order_columns(stored)?;
    Ok(LegendreBlock {
        order: m,
        sign,
        first_degree: columns.first_degree(),
        matrix: columns.rows(grid.suffix(m)),
    })
}

/// `σ_max / σ_min`; `+∞` when the smallest singular value is zero.
pub fn condition_number(matrix: MatRef<'_, f64>) -> f64 {
    if matrix.nrows() == 0 || matrix.ncols() == 0 {
        return 1.0;
    }
    let sv = match matrix.singular_values() {
        Ok(sv) => sv,
        Err(_) => return f64::INFINITY,
    };
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Longitudinal Fourier values `G_m(θ_k)` over `θ^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GVector {
    pub order: i64,
    pub values: Vec<Complex64>,
}

/// Coefficients `f_ℓ^m`, `ℓ = first_degree..L-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSlice {
    pub order: i64,
    pub first_degree: usize,
    pub values: Vec<Complex64>,
}

/// Column-pivoted QR of one block, reusable for several right-hand sides.
pub struct BlockFactor {
    order: i64,
    sign: f64,
    first_degree: usize,
    nrows: usize,
    qr: ColPivQr<f64>,
}

impl BlockFactor {
    pub fn new(block: &LegendreBlock) -> Result<Self> {
        let qr = block.matrix.col_piv_qr();
        let n = block.ncols();
        if n > 0 {
            let r = qr.R();
            let diag: Vec<f64> = (0..n.min(r.nrows())).map(|i| r[(i, i)].abs()).collect();
            let max = diag.iter().copied().fold(0.0, f64::max);
            let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
            // The R diagonal only estimates κ, so confirm with singular values.
            if diag.len() < n || !(min > 100.0 * SINGULAR_THRESHOLD * max) {
                let kappa = block.condition_number();
                if !(kappa * SINGULAR_THRESHOLD < 1.0) {
                    return Err(Error::IllConditionedSolve { m: block.order, kappa });
                }
            }
        }
        Ok(Self {
            order: block.order,
            sign: block.sign,
            first_degree: block.first_degree,
            nrows: block.nrows(),
            qr,
        })
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn first_degree(&self) -> usize {
        self.first_degree
    }

    /// Least-squares solutions for several complex right-hand sides at once,
    /// all against the stored (unsigned) block. `sign[i]` multiplies solution `i`.
    pub fn solve_many(&self, rhs: &[&[Complex64]], signs: &[f64]) -> Vec<Vec<Complex64>> {
        let k = rhs.len();
        let mut b = Mat::zeros(self.nrows, 2 * k);
        for (c, g) in rhs.iter().enumerate() {
            assert_eq!(g.len(), self.nrows);
            for (i, z) in g.iter().enumerate() {
                b[(i, 2 * c)] = z.re;
                b[(i, 2 * c + 1)] = z.im;
            }
        }
        let x = self.qr.solve_lstsq(&b);
        (0..k)
            .map(|c| {
                (0..x.nrows())
                    .map(|i| signs[c] * Complex64::new(x[(i, 2 * c)], x[(i, 2 * c + 1)]))
                    .collect()
            })
            .collect()
    }

    /// `f_m` for the block's own order.
    pub fn solve(&self, g: &GVector) -> Result<CoefficientSlice> {
        if g.values.len() != self.nrows {
            return Err(Error::InvalidInput(format!(
                "g has {} entries, block has {} rows",
                g.values.len(),
                self.nrows
            )));
        }
        let values = self.solve_many(&[&g.values], &[self.sign]).remove(0);
        Ok(CoefficientSlice {
            order: self.order,
            first_degree: self.first_degree,
            values,
        })
    }
}

/// Factor and solve in one step.
pub fn solve(block: &LegendreBlock, g: &GVector) -> Result<CoefficientSlice> {
    if g.order != block.order {
        return Err(Error::InvalidInput(format!(
            "g is order {}, block is order {}",
            g.order, block.order
        )));
    }
    block.factor()?.solve(g)
}
