//! Coefficient and signal files.
//!
//! ```text
//! OPTISPH-COEF v1          OPTISPH-SIG v1
//! L <int>                  L <int>
//! ℓ m re im   (L² lines)   k j re im   (L² lines)
//! ```
//!
//! Coefficient lines follow the `ℓ² + ℓ + m` storage order, signal lines are
//! ordered by ring then longitude. Floats carry 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::transform::{HarmonicCoefficients, SpatialSamples};

pub const COEF_MAGIC: &str = "OPTISPH-COEF";
pub const SIG_MAGIC: &str = "OPTISPH-SIG";
const VERSION: &str = "v1";

fn header(out: &mut String, magic: &str, band_limit: usize) {
    let _ = writeln!(out, "{magic} {VERSION}\nL {band_limit}");
}

fn push_line(out: &mut String, a: i64, b: i64, z: Complex64) {
    let _ = writeln!(out, "{a} {b} {:.16e} {:.16e}", z.re, z.im);
}

pub fn encode_coefficients(coeffs: &HarmonicCoefficients) -> String {
    let mut out = String::new();
    header(&mut out, COEF_MAGIC, coeffs.band_limit());
    for (ell, m, z) in coeffs.iter() {
        push_line(&mut out, ell as i64, m, z);
    }
    out
}

pub fn encode_samples(samples: &SpatialSamples) -> String {
    let mut out = String::new();
    header(&mut out, SIG_MAGIC, samples.band_limit());
    for (k, ring) in samples.rings().enumerate() {
        for (j, &z) in ring.iter().enumerate() {
            push_line(&mut out, k as i64, j as i64, z);
        }
    }
    out
}

/// Parses the header and body; `expected(i)` gives the index pair of line `i`.
fn decode(text: &str, magic: &str, expected: impl Fn(usize) -> (i64, i64)) -> Result<(usize, Vec<Complex64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines.next().ok_or_else(|| Error::Malformed("empty file".into()))?;
    match first.trim().split_once(' ') {
        Some((m, VERSION)) if m == magic => {}
        Some((m, v)) if m == magic => return Err(Error::Version(v.to_string())),
        _ => return Err(Error::Malformed(format!("expected `{magic} {VERSION}` header, got {first:?}"))),
    }
    let band_limit: usize = lines
        .next()
        .and_then(|l| l.trim().strip_prefix("L "))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Malformed("expected `L <int>` line".into()))?;
    if band_limit == 0 {
        return Err(Error::InvalidBandLimit(0));
    }
    let count = band_limit * band_limit;
    let mut values = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        if i >= count {
            return Err(Error::Malformed(format!("more than {count} data lines")));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Malformed(format!("bad data line {}: {line:?}", i + 3));
        if fields.len() != 4 {
            return Err(bad());
        }
        let a: i64 = fields[0].parse().map_err(|_| bad())?;
        let b: i64 = fields[1].parse().map_err(|_| bad())?;
        if (a, b) != expected(i) {
            return Err(Error::Malformed(format!(
                "line {} has indices ({a}, {b}), expected {:?}",
                i + 3,
                expected(i)
            )));
        }
        let re: f64 = fields[2].parse().map_err(|_| bad())?;
        let im: f64 = fields[3].parse().map_err(|_| bad())?;
        values.push(Complex64::new(re, im));
    }
    if values.len() != count {
        return Err(Error::Malformed(format!("{} data lines, expected {count}", values.len())));
    }
    Ok((band_limit, values))
}

pub fn decode_coefficients(text: &str) -> Result<HarmonicCoefficients> {
    let (band_limit, values) = decode(text, COEF_MAGIC, |i| {
        let (ell, m) = HarmonicCoefficients::degree_order(i);
        (ell as i64, m)
    })?;
    HarmonicCoefficients::from_values(band_limit, values)
}

pub fn decode_samples(text: &str) -> Result<SpatialSamples> {
    let (band_limit, values) = decode(text, SIG_MAGIC, |i| {
        let k = (i as f64).sqrt() as usize;
        let k = if (k + 1) * (k + 1) <= i { k + 1 } else if k * k > i { k - 1 } else { k };
        (k as i64, (i - k * k) as i64)
    })?;
    SpatialSamples::from_values(band_limit, values)
}

pub fn write_coefficients(coeffs: &HarmonicCoefficients, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_coefficients(coeffs))?;
    Ok(())
}

pub fn read_coefficients(path: impl AsRef<Path>) -> Result<HarmonicCoefficients> {
    decode_coefficients(&fs::read_to_string(path)?)
}

pub fn write_samples(samples: &SpatialSamples, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_samples(samples))?;
    Ok(())
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<SpatialSamples> {
    decode_samples(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coefficients_round_trip_exactly() {
        let c = HarmonicCoefficients::random(6, &mut ChaCha8Rng::seed_from_u64(4));
        let text = encode_coefficients(&c);
        assert!(text.starts_with("OPTISPH-COEF v1\nL 6\n0 0 "));
        assert_eq!(text.lines().count(), 2 + 36);
        assert_eq!(decode_coefficients(&text).unwrap(), c);
    }

    #[test]
    fn samples_round_trip_exactly() {
        let s = SpatialSamples::random(5, &mut ChaCha8Rng::seed_from_u64(9));
        let text = encode_samples(&s);
        assert!(text.lines().nth(4).unwrap().starts_with("1 1 "));
        assert_eq!(decode_samples(&text).unwrap(), s);
    }

    #[test]
    fn rejects_bad_files() {
        let c = HarmonicCoefficients::zeros(2);
        let text = encode_coefficients(&c);
        assert!(matches!(decode_coefficients(&text.replace("v1", "v7")), Err(Error::Version(_))));
        assert!(matches!(decode_samples(&text), Err(Error::Malformed(_))));
        let truncated: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert!(matches!(decode_coefficients(&truncated), Err(Error::Malformed(_))));
        let swapped = text.replacen("1 -1 ", "1 0 ", 1);
        assert!(matches!(decode_coefficients(&swapped), Err(Error::Malformed(_))));
    }
}
