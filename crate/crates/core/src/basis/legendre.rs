use super::{ldexp, parity_sign, scaled_powi, FOUR_PI, RESCALE_BITS, RESCALE_DOWN, RESCALE_UP};
use crate::error::{Error, Result};

/// `P̃_ℓ^m(θ)` for `ℓ = |m|..L-1` at a single co-latitude.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreColumn {
    pub order: i64,
    pub theta: f64,
    /// `values[i] = P̃_{|m| + i}^m(θ)`.
    pub values: Vec<f64>,
}

impl LegendreColumn {
    pub fn first_degree(&self) -> usize {
        self.order.unsigned_abs() as usize
    }

    /// Value at degree `ell`, or `None` below `|m|` or past the band-limit.
    pub fn get(&self, ell: usize) -> Option<f64> {
        ell.checked_sub(self.first_degree())
            .and_then(|i| self.values.get(i).copied())
    }
}

/// Recurrence coefficients for one non-negative order, reusable across
/// co-latitudes.
///
/// With `a_ℓ = sqrt((ℓ² - m²) / ((2ℓ - 1)(2ℓ + 1)))` the normalized functions
/// satisfy `cos θ P̃_ℓ = a_{ℓ+1} P̃_{ℓ+1} + a_ℓ P̃_{ℓ-1}`, seeded by
/// `P̃_m^m = (-1)^m sqrt((2m+1)/4π) sqrt((2m)!) / (2^m m!) sin^m θ`.
#[derive(Debug, Clone)]
pub struct LegendreRecurrence {
    order: usize,
    band_limit: usize,
    /// `(-1)^m sqrt((2m+1)/4π) sqrt((2m)!) / (2^m m!)`
    seed_factor: f64,
    /// `a[i] = a_{m+i}` for `i = 0..L-m`.
    a: Vec<f64>,
}

impl LegendreRecurrence {
    /// Panics if `order >= band_limit`; use [`legendre_column`] for a checked
    /// entry point.
    pub fn new(order: usize, band_limit: usize) -> Self {
        assert!(order < band_limit, "order {order} >= band-limit {band_limit}");
        let m = order as f64;
        let mut seed_factor = ((2.0 * m + 1.0) / FOUR_PI).sqrt();
        for i in 1..=order {
            let i = i as f64;
            seed_factor *= ((2.0 * i - 1.0) / (2.0 * i)).sqrt();
        }
        seed_factor *= parity_sign(order as i64);
        let a = (order..band_limit)
            .map(|ell| {
                let l = ell as f64;
                ((l * l - m * m) / ((2.0 * l - 1.0) * (2.0 * l + 1.0))).sqrt()
            })
            .collect();
        Self {
            order,
            band_limit,
            seed_factor,
            a,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    /// Number of degrees produced, `L - m`.
    pub fn len(&self) -> usize {
        self.band_limit - self.order
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes `P̃_{m+i}^m(θ)` into `out[i]`; `out.len()` must equal [`Self::len`].
    pub fn fill(&self, theta: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.len());
        let (sin, cos) = theta.sin_cos();
        let mut seed = scaled_powi(sin.abs(), self.order as u32);
        seed.mul(self.seed_factor);
        if seed.mantissa == 0.0 {
            out.fill(0.0);
            return;
        }

        let mut exponent = seed.exponent;
        let mut prev = 0.0;
        let mut cur = seed.mantissa;
        out[0] = ldexp(cur, exponent);
        for i in 1..out.len() {
            let next = (cos * cur - self.a[i - 1] * prev) / self.a[i];
            prev = cur;
            cur = next;
            if exponent < 0 && cur.abs() > RESCALE_UP {
                cur *= RESCALE_DOWN;
                prev *= RESCALE_DOWN;
                exponent += RESCALE_BITS;
            }
            out[i] = if exponent == 0 {
                cur
            } else {
                ldexp(cur, exponent)
            };
        }
    }
}

/// Evaluates `P̃_ℓ^m(θ) = Y_ℓ^m(θ, 0)` for `ℓ = |m|..L-1`.
///
/// Negative orders use `P̃_ℓ^{-m} = (-1)^m P̃_ℓ^m`.
pub fn legendre_column(m: i64, theta: f64, band_limit: usize) -> Result<LegendreColumn> {
    check_theta(theta)?;
    let order = m.unsigned_abs() as usize;
    if band_limit == 0 {
        return Err(Error::InvalidBandLimit(0));
    }
    if order >= band_limit {
        return Err(Error::OutOfRange {
            what: "order",
            value: m,
            band_limit,
        });
    }
    let recurrence = LegendreRecurrence::new(order, band_limit);
    let mut values = vec![0.0; recurrence.len()];
    recurrence.fill(theta, &mut values);
    if m < 0 && order % 2 == 1 {
        values.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(LegendreColumn {
        order: m,
        theta,
        values,
    })
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=std::f64::consts::PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "co-latitude {theta} outside [0, π]"
        )))
    }
}
