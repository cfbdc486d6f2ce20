//! Slow evaluators built straight from the defining formulas, kept independent
//! of the recurrences so they can serve as test oracles.

use super::FOUR_PI;
use crate::error::{Error, Result};

/// Largest degree the factorial-based evaluators accept.
pub const DIRECT_MAX_DEGREE: usize = 30;

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Associated Legendre function `P_ℓ^m(x)` for `m >= 0`, from the expansion
/// of `d^{ℓ+m}/dx^{ℓ+m} (x² - 1)^ℓ` term by term.
fn associated_legendre(ell: usize, m: usize, x: f64) -> f64 {
    let q = ell + m;
    // Coefficient of x^{2k-q} after differentiating x^{2k} q times.
    let mut poly = vec![0.0; ell - m + 1];
    for k in 0..=ell {
        if 2 * k < q {
            continue;
        }
        let sign = if (ell - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        poly[2 * k - q] += sign * binomial(ell, k) * factorial(2 * k) / factorial(2 * k - q);
    }
    let value = poly.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let cs = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let envelope = (1.0 - x * x).max(0.0).powf(m as f64 / 2.0);
    cs / (2f64.powi(ell as i32) * factorial(ell)) * envelope * value
}

/// `N_ℓ^m P_ℓ^m(cos θ)` evaluated from the explicit definition, including the
/// negative-order relation `P_ℓ^{-m} = (-1)^m (ℓ-m)!/(ℓ+m)! P_ℓ^m`.
pub fn legendre_direct(ell: usize, m: i64, theta: f64) -> Result<f64> {
    if ell > DIRECT_MAX_DEGREE {
        return Err(Error::OutOfRange {
            what: "degree",
            value: ell as i64,
            band_limit: DIRECT_MAX_DEGREE + 1,
        });
    }
    let order = m.unsigned_abs() as usize;
    if order > ell {
        return Err(Error::OutOfRange {
            what: "order",
            value: m,
            band_limit: ell + 1,
        });
    }
    let x = theta.cos();
    let (plus, minus) = if m >= 0 {
        (ell + order, ell - order)
    } else {
        (ell - order, ell + order)
    };
    let norm = ((2 * ell + 1) as f64 / FOUR_PI * factorial(minus) / factorial(plus)).sqrt();
    let p_pos = associated_legendre(ell, order, x);
    let p = if m >= 0 {
        p_pos
    } else {
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * factorial(ell - order) / factorial(ell + order) * p_pos
    };
    Ok(norm * p)
}

/// Wigner small-d function `d^j_{a,b}(β)` from the explicit finite sum
/// `Σ_k (-1)^{k-b+a} sqrt((j+b)!(j-b)!(j+a)!(j-a)!) / ((j+b-k)! k! (j-a-k)! (k-b+a)!)
///  cos^{2j-2k+b-a}(β/2) sin^{2k-b+a}(β/2)`.
pub fn wigner_d_direct(j: usize, a: i64, b: i64, beta: f64) -> Result<f64> {
    if j > DIRECT_MAX_DEGREE {
        return Err(Error::OutOfRange {
            what: "degree",
            value: j as i64,
            band_limit: DIRECT_MAX_DEGREE + 1,
        });
    }
    let ji = j as i64;
    if a.abs() > ji || b.abs() > ji {
        return Err(Error::OutOfRange {
            what: "order",
            value: a.abs().max(b.abs()),
            band_limit: j + 1,
        });
    }
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let f = |n: i64| factorial(n as usize);
    let prefactor = (f(ji + b) * f(ji - b) * f(ji + a) * f(ji - a)).sqrt();
    let k_min = 0.max(b - a);
    let k_max = (ji + b).min(ji - a);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let sign = if (k - b + a).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let denom = f(ji + b - k) * f(k) * f(ji - a - k) * f(k - b + a);
        sum += sign / denom * c.powi((2 * ji - 2 * k + b - a) as i32) * s.powi((2 * k - b + a) as i32);
    }
    Ok(prefactor * sum)
}
