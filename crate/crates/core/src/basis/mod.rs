//! Latitudinal basis functions.
//!
//! `P̃_ℓ^m(θ) = Y_ℓ^m(θ, 0)` is evaluated for fixed `(m, θ)` and all degrees
//! `ℓ = |m|..L-1` by the upward three-term recurrence, which is stable in the
//! direction of increasing degree. The seed `P̃_|m|^|m|` carries `sin^|m| θ`,
//! which underflows long before `|m| = 4096` near the poles, so the recurrence
//! runs on a mantissa with a separate power-of-two exponent.
//!
//! Spin-weighted harmonics use the same scheme on Wigner-d functions.

mod direct;
mod legendre;
mod spin;

pub use direct::{legendre_direct, wigner_d_direct, DIRECT_MAX_DEGREE};
pub use legendre::{legendre_column, LegendreColumn, LegendreRecurrence};
pub use spin::{spin_column, SpinColumn, SpinRecurrence};

pub(crate) const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Renormalization window for the rescaled recurrences: `[2^-500, 2^500]`.
const RESCALE_BITS: i32 = 500;
const RESCALE_UP: f64 = f64::from_bits(((1023 + RESCALE_BITS) as u64) << 52);
const RESCALE_DOWN: f64 = f64::from_bits(((1023 - RESCALE_BITS) as u64) << 52);

/// `(-1)^m` as a float.
#[inline]
pub fn parity_sign(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A value represented as `mantissa * 2^exponent`, used to carry seeds whose
/// magnitude is far outside the `f64` range.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scaled {
    pub mantissa: f64,
    pub exponent: i32,
}

impl Scaled {
    pub fn new(value: f64) -> Self {
        let mut s = Self {
            mantissa: value,
            exponent: 0,
        };
        s.renormalize();
        s
    }

    pub fn mul(&mut self, factor: f64) {
        self.mantissa *= factor;
        self.renormalize();
    }

    pub fn mul_scaled(&mut self, other: Scaled) {
        self.mantissa *= other.mantissa;
        self.exponent += other.exponent;
        self.renormalize();
    }

    pub fn renormalize(&mut self) {
        if self.mantissa == 0.0 || !self.mantissa.is_finite() {
            return;
        }
        while self.mantissa.abs() < RESCALE_DOWN {
            self.mantissa *= RESCALE_UP;
            self.exponent -= RESCALE_BITS;
        }
        while self.mantissa.abs() > RESCALE_UP {
            self.mantissa *= RESCALE_DOWN;
            self.exponent += RESCALE_BITS;
        }
    }

    #[cfg(test)]
    pub fn value(self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }
}

/// `base^n` for `base >= 0` without intermediate underflow.
pub(crate) fn scaled_powi(base: f64, n: u32) -> Scaled {
    if n == 0 {
        return Scaled::new(1.0);
    }
    if base == 0.0 {
        return Scaled::new(0.0);
    }
    let (fraction, exp) = frexp(base);
    // fraction in [0.5, 1): 0.5^256 = 2^-256 stays inside the window.
    let mut acc = Scaled::new(1.0);
    let mut remaining = n;
    while remaining > 0 {
        let chunk = remaining.min(256);
        acc.mul(fraction.powi(chunk as i32));
        remaining -= chunk;
    }
    acc.exponent += exp * n as i32;
    acc
}

/// Splits a positive finite `x` into `f * 2^e` with `f` in `[0.5, 1)`.
pub(crate) fn frexp(x: f64) -> (f64, i32) {
    debug_assert!(x > 0.0 && x.is_finite());
    let mut x = x;
    let mut bias = 0;
    if x < f64::MIN_POSITIVE {
        x *= RESCALE_UP;
        bias = -RESCALE_BITS;
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let fraction = f64::from_bits((bits & !(0x7ff_u64 << 52)) | (1022_u64 << 52));
    (fraction, raw_exp - 1022 + bias)
}

/// `x * 2^e`, rounding gracefully to zero or subnormals.
pub(crate) fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e)
}
