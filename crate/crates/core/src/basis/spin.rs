use super::legendre::{check_theta, LegendreRecurrence};
use super::{ldexp, parity_sign, scaled_powi, Scaled, FOUR_PI, RESCALE_BITS, RESCALE_DOWN, RESCALE_UP};
use crate::error::{Error, Result};

/// `ₛY_ℓ^m(θ, 0)` for `ℓ = max(|m|, |s|)..L-1` at a single co-latitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinColumn {
    pub spin: i64,
    pub order: i64,
    pub theta: f64,
    pub first_degree: usize,
    /// `values[i] = ₛY_{first_degree + i}^m(θ, 0)`.
    pub values: Vec<f64>,
}

impl SpinColumn {
    pub fn get(&self, ell: usize) -> Option<f64> {
        ell.checked_sub(self.first_degree)
            .and_then(|i| self.values.get(i).copied())
    }
}

/// Reusable recurrence for `ₛY_ℓ^m(θ, 0) = (-1)^s sqrt((2ℓ+1)/4π) d^ℓ_{m,-s}(θ)`.
///
/// Spin zero goes through [`LegendreRecurrence`] so the scalar and spin-0
/// paths produce identical bits.
#[derive(Debug, Clone)]
pub struct SpinRecurrence {
    spin: i64,
    order: i64,
    band_limit: usize,
    first_degree: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Scalar {
        recurrence: LegendreRecurrence,
        sign: f64,
    },
    Wigner(WignerCoefficients),
}

/// `d^{ℓ+1} = (cos_coef[i] cos θ - shift[i]) d^ℓ - back[i] d^{ℓ-1}`, with
/// `i = ℓ - ℓ0`, from
/// `ℓ sqrt(((ℓ+1)²-a²)((ℓ+1)²-b²)) d^{ℓ+1}
///    = (2ℓ+1)(ℓ(ℓ+1) cos θ - ab) d^ℓ - (ℓ+1) sqrt((ℓ²-a²)(ℓ²-b²)) d^{ℓ-1}`.
#[derive(Debug, Clone)]
struct WignerCoefficients {
    a: i64,
    b: i64,
    cos_coef: Vec<f64>,
    shift: Vec<f64>,
    back: Vec<f64>,
    /// `(-1)^s sqrt((2ℓ+1)/4π)` per output degree.
    output_scale: Vec<f64>,
}

impl SpinRecurrence {
    pub fn new(spin: i64, order: i64, band_limit: usize) -> Result<Self> {
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
        if order.unsigned_abs() as usize >= band_limit {
            return Err(Error::OutOfRange {
                what: "order",
                value: order,
                band_limit,
            });
        }
        let first_degree = order.unsigned_abs().max(spin.unsigned_abs()) as usize;
        let kind = if spin == 0 {
            Kind::Scalar {
                recurrence: LegendreRecurrence::new(order.unsigned_abs() as usize, band_limit),
                sign: if order < 0 { parity_sign(order) } else { 1.0 },
            }
        } else {
            Kind::Wigner(WignerCoefficients::new(order, -spin, first_degree, band_limit, spin))
        };
        Ok(Self {
            spin,
            order,
            band_limit,
            first_degree,
            kind,
        })
    }

    pub fn spin(&self) -> i64 {
        self.spin
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn first_degree(&self) -> usize {
        self.first_degree
    }

    pub fn len(&self) -> usize {
        self.band_limit - self.first_degree
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes `ₛY_{first_degree+i}^m(θ, 0)` into `out[i]`.
    pub fn fill(&self, theta: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.len());
        match &self.kind {
            Kind::Scalar { recurrence, sign } => {
                recurrence.fill(theta, out);
                if *sign < 0.0 {
                    out.iter_mut().for_each(|v| *v = -*v);
                }
            }
            Kind::Wigner(coefs) => coefs.fill(self.first_degree, theta, out),
        }
    }
}

impl WignerCoefficients {
    fn new(a: i64, b: i64, first_degree: usize, band_limit: usize, spin: i64) -> Self {
        let (af, bf) = (a as f64, b as f64);
        let steps = band_limit - first_degree;
        let mut cos_coef = Vec::with_capacity(steps);
        let mut shift = Vec::with_capacity(steps);
        let mut back = Vec::with_capacity(steps);
        for ell in first_degree..band_limit {
            let l = ell as f64;
            let up = l * (((l + 1.0).powi(2) - af * af) * ((l + 1.0).powi(2) - bf * bf)).sqrt();
            cos_coef.push((2.0 * l + 1.0) * l * (l + 1.0) / up);
            shift.push((2.0 * l + 1.0) * af * bf / up);
            back.push((l + 1.0) * ((l * l - af * af) * (l * l - bf * bf)).max(0.0).sqrt() / up);
        }
        let sign = parity_sign(spin);
        let output_scale = (first_degree..band_limit)
            .map(|ell| sign * ((2 * ell + 1) as f64 / FOUR_PI).sqrt())
            .collect();
        Self {
            a,
            b,
            cos_coef,
            shift,
            back,
            output_scale,
        }
    }

    /// `d^j_{a,b}(θ)` at `j = max(|a|, |b|)`, where the explicit sum has one term.
    fn seed(&self, j: usize, theta: f64) -> Scaled {
        let (a, b, ji) = (self.a, self.b, j as i64);
        let half_cos = (theta / 2.0).cos().abs();
        let half_sin = (theta / 2.0).sin().abs();
        // (sign, binomial index x for sqrt(C(2j, j+x)), power of cos, power of sin)
        let (sign, x, p, q) = if a.abs() >= b.abs() {
            if a == ji {
                (parity_sign(ji - b), b, ji + b, ji - b)
            } else {
                (1.0, b, ji - b, ji + b)
            }
        } else if b == ji {
            (1.0, a, ji + a, ji - a)
        } else {
            (parity_sign(ji + a), a, ji - a, ji + a)
        };
        let mut seed = sqrt_binomial(2 * j, (ji + x) as usize);
        seed.mul(sign);
        seed.mul_scaled(scaled_powi(half_cos, p as u32));
        seed.mul_scaled(scaled_powi(half_sin, q as u32));
        seed
    }

    fn fill(&self, first_degree: usize, theta: f64, out: &mut [f64]) {
        let seed = self.seed(first_degree, theta);
        if seed.mantissa == 0.0 {
            out.fill(0.0);
            return;
        }
        let cos = theta.cos();
        let mut exponent = seed.exponent;
        let mut prev = 0.0;
        let mut cur = seed.mantissa;
        out[0] = self.output_scale[0] * ldexp(cur, exponent);
        for i in 1..out.len() {
            let k = i - 1;
            let next = (self.cos_coef[k] * cos - self.shift[k]) * cur - self.back[k] * prev;
            prev = cur;
            cur = next;
            if exponent < 0 && cur.abs() > RESCALE_UP {
                cur *= RESCALE_DOWN;
                prev *= RESCALE_DOWN;
                exponent += RESCALE_BITS;
            }
            let d = if exponent == 0 { cur } else { ldexp(cur, exponent) };
            out[i] = self.output_scale[i] * d;
        }
    }
}

/// `sqrt(C(n, k))` as a rescaled product.
fn sqrt_binomial(n: usize, k: usize) -> Scaled {
    let k = k.min(n - k);
    let mut acc = Scaled::new(1.0);
    for i in 1..=k {
        acc.mul((((n - k + i) as f64) / i as f64).sqrt());
    }
    acc
}

/// Evaluates `ₛY_ℓ^m(θ, 0)` for `ℓ = max(|m|, |s|)..L-1`.
pub fn spin_column(s: i64, m: i64, theta: f64, band_limit: usize) -> Result<SpinColumn> {
    check_theta(theta)?;
    let recurrence = SpinRecurrence::new(s, m, band_limit)?;
    let mut values = vec![0.0; recurrence.len()];
    recurrence.fill(theta, &mut values);
    Ok(SpinColumn {
        spin: s,
        order: m,
        theta,
        first_degree: recurrence.first_degree(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{legendre_column, wigner_d_direct};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn direct_spin(s: i64, m: i64, ell: usize, theta: f64) -> f64 {
        parity_sign(s) * ((2 * ell + 1) as f64 / FOUR_PI).sqrt() * wigner_d_direct(ell, m, -s, theta).unwrap()
    }

    #[test]
    fn spin_zero_equals_legendre_bitwise() {
        for m in -4..=4i64 {
            for &theta in &[0.2, PI / 3.0, 2.9] {
                let spin = spin_column(0, m, theta, 6).unwrap();
                let scalar = legendre_column(m, theta, 6).unwrap();
                assert_eq!(spin.values, scalar.values);
                assert_eq!(spin.first_degree, scalar.first_degree());
            }
        }
    }

    #[test]
    fn spin_zero_degree_one_at_sixty_degrees() {
        let spin = spin_column(0, 1, PI / 3.0, 2).unwrap();
        let scalar = legendre_column(1, PI / 3.0, 2).unwrap();
        assert_eq!(spin.get(1), scalar.get(1));
    }

    #[test]
    fn spin_one_order_one_degree_one() {
        // ₁Y_1^1(θ,0) = -sqrt(3/4π) sin²(θ/2); ₋₁Y_1^1(θ,0) = -sqrt(3/4π) cos²(θ/2).
        for &theta in &[0.3, 1.2, 2.5] {
            let plus = spin_column(1, 1, theta, 2).unwrap();
            let minus = spin_column(-1, 1, theta, 2).unwrap();
            let norm = (3.0 / FOUR_PI).sqrt();
            assert_abs_diff_eq!(plus.values[0], -norm * (theta / 2.0).sin().powi(2), epsilon = 1e-15);
            assert_abs_diff_eq!(minus.values[0], -norm * (theta / 2.0).cos().powi(2), epsilon = 1e-15);
        }
    }

    #[test]
    fn matches_wigner_oracle_up_to_degree_ten() {
        for s in -3..=3i64 {
            for m in -10..=10i64 {
                for &theta in &[0.0, 0.1, 0.9, PI / 2.0, 2.4, PI] {
                    let col = spin_column(s, m, theta, 11).unwrap();
                    for ell in col.first_degree..11 {
                        assert_abs_diff_eq!(col.get(ell).unwrap(), direct_spin(s, m, ell, theta), epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn reflection_and_order_symmetries() {
        // ₛY_ℓ^m(θ) = (-1)^{ℓ+m} ₋ₛY_ℓ^m(π-θ) and ₛY_ℓ^{-m} = (-1)^{m+s} ₋ₛY_ℓ^m.
        let band_limit = 12;
        for s in -3..=3i64 {
            for m in -6..=6i64 {
                let a = spin_column(s, m, 0.8, band_limit).unwrap();
                let b = spin_column(-s, m, PI - 0.8, band_limit).unwrap();
                let c = spin_column(s, -m, 0.8, band_limit).unwrap();
                let d = spin_column(-s, m, 0.8, band_limit).unwrap();
                for ell in a.first_degree..band_limit {
                    let sign = parity_sign(ell as i64 + m);
                    assert_abs_diff_eq!(a.get(ell).unwrap(), sign * b.get(ell).unwrap(), epsilon = 1e-12);
                    let sign = parity_sign(m + s);
                    assert_abs_diff_eq!(c.get(ell).unwrap(), sign * d.get(ell).unwrap(), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn range_errors() {
        assert!(matches!(spin_column(4, 0, 1.0, 4), Err(Error::OutOfRange { what: "spin", .. })));
        assert!(matches!(spin_column(0, -4, 1.0, 4), Err(Error::OutOfRange { what: "order", .. })));
    }

    #[test]
    fn large_degree_stays_bounded() {
        let band_limit = 2048;
        for &(s, m) in &[(2i64, 5i64), (-3, 1000), (1, -2047)] {
            let col = spin_column(s, m, 0.01, band_limit).unwrap();
            for (i, v) in col.values.iter().enumerate() {
                let ell = (col.first_degree + i) as f64;
                assert!(v.is_finite());
                assert!(v.abs() <= ((2.0 * ell + 1.0) / FOUR_PI).sqrt() * (1.0 + 1e-10));
            }
        }
    }
}
