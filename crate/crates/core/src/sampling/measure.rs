//! Equal-mass candidate sets under the alternative co-latitude measures.
//!
//! Starting from the south pole `Θ_0 = π`, each consecutive pair of candidates
//! encloses `1/L` of the total mass of the measure: `2/L` for `sin θ dθ` and
//! `2π/(L√3)` for `|tan θ|^{1/3} dθ`. Results are returned sorted ascending.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::Measure;
use crate::error::{Error, Result};

const QUADRATURE_TOLERANCE: f64 = 1e-12;
const BISECTION_ITERATIONS: usize = 200;

pub fn measure_candidates(band_limit: usize, measure: Measure) -> Result<Vec<f64>> {
    if band_limit == 0 {
        return Err(Error::InvalidBandLimit(0));
    }
    let mut descending = Vec::with_capacity(band_limit);
    descending.push(PI);
    match measure {
        Measure::Uniform => return super::equiangular_candidates(band_limit),
        Measure::Sine => {
            // cos Θ_t = -1 + 2t/L
            for t in 1..band_limit {
                let c = -1.0 + 2.0 * t as f64 / band_limit as f64;
                descending.push(c.acos());
            }
        }
        Measure::TanCubeRoot => {
            let step = tan_cube_root_total_mass() / band_limit as f64;
            for t in 1..band_limit {
                descending.push(solve_tail_mass(t as f64 * step, t)?);
            }
        }
    }
    descending.reverse();
    Ok(descending)
}

/// `∫_0^π |tan θ|^{1/3} dθ = 2π/√3`.
fn tan_cube_root_total_mass() -> f64 {
    2.0 * PI / 3f64.sqrt()
}

/// `∫_θ^π |tan x|^{1/3} dx`.
pub fn tan_cube_root_tail_mass(theta: f64) -> f64 {
    if theta >= FRAC_PI_2 {
        half_mass(PI - theta)
    } else {
        tan_cube_root_total_mass() - half_mass(theta)
    }
}

/// `∫_0^x tan^{1/3} θ dθ` for `x ∈ [0, π/2]`.
///
/// With `u = tan^{1/3} θ` the integrand becomes `3u³/(1+u⁶)`, smooth on
/// `[0, 1]`; past `π/4` the complement is integrated in `v = 1/u`, where it
/// becomes `3v/(1+v⁶)`, so the pole at `π/2` never enters the quadrature.
fn half_mass(x: f64) -> f64 {
    let x = x.clamp(0.0, FRAC_PI_2);
    if x <= FRAC_PI_4 {
        let upper = x.tan().cbrt();
        adaptive_simpson(&|u: f64| 3.0 * u.powi(3) / (1.0 + u.powi(6)), 0.0, upper)
    } else {
        let upper = (FRAC_PI_2 - x).tan().cbrt();
        PI / 3f64.sqrt() - adaptive_simpson(&|v: f64| 3.0 * v / (1.0 + v.powi(6)), 0.0, upper)
    }
}

/// Finds `θ` with `tail_mass(θ) = target` by bisection; the tail mass is
/// strictly decreasing in `θ`.
fn solve_tail_mass(target: f64, t: usize) -> Result<f64> {
    let (mut lo, mut hi) = (0.0f64, PI);
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mass = tan_cube_root_tail_mass(mid);
        if !mass.is_finite() {
            return Err(Error::RootNotConverged { t });
        }
        if mass > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let residual = (tan_cube_root_tail_mass(theta) - target).abs();
    if residual > 1e-9 || !(theta > 0.0 && theta < PI) {
        return Err(Error::RootNotConverged { t });
    }
    Ok(theta)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, QUADRATURE_TOLERANCE, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}
