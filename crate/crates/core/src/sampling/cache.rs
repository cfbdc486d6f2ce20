//! Text grid files.
//!
//! ```text
//! OPTISPH-GRID v1
//! L <int>
//! measure <uniform|sine|tan13>
//! ordering <interleaved|condmin>
//! <L permutation indices, one per line>
//! crc32 <8 hex digits>
//! ```
//!
//! The checksum covers every byte before the `crc32` line. Co-latitudes are
//! re-derived from the measure and permutation on load.

use std::fs;
use std::path::{Path, PathBuf};

use super::{ColatitudeGrid, Measure, Ordering};
use crate::error::{Error, Result};

pub const GRID_MAGIC: &str = "OPTISPH-GRID";
const GRID_VERSION: &str = "v1";

pub fn encode_grid(grid: &ColatitudeGrid) -> String {
    let mut body = format!(
        "{GRID_MAGIC} {GRID_VERSION}\nL {}\nmeasure {}\nordering {}\n",
        grid.band_limit(),
        grid.measure().tag(),
        grid.ordering().tag()
    );
    for t in grid.permutation() {
        body.push_str(&t.to_string());
        body.push('\n');
    }
    let crc = crc32fast::hash(body.as_bytes());
    body.push_str(&format!("crc32 {crc:08x}\n"));
    body
}

pub fn decode_grid(text: &str) -> Result<ColatitudeGrid> {
    let first = text.lines().next().ok_or_else(|| Error::Malformed("empty grid file".into()))?;
    match first.split_once(' ') {
        Some((GRID_MAGIC, GRID_VERSION)) => {}
        Some((GRID_MAGIC, other)) => return Err(Error::Version(other.to_string())),
        _ => return Err(Error::Malformed(format!("bad header line {first:?}"))),
    }

    let trimmed = text.strip_suffix('\n').unwrap_or(text);
    let (body_len, crc_line) = match trimmed.rfind('\n') {
        Some(pos) => (pos + 1, &trimmed[pos + 1..]),
        None => return Err(Error::Malformed("missing checksum line".into())),
    };
    let stored = crc_line
        .strip_prefix("crc32 ")
        .and_then(|h| u32::from_str_radix(h.trim(), 16).ok())
        .ok_or_else(|| Error::Malformed("missing checksum line".into()))?;
    let body = &text[..body_len];
    let computed = crc32fast::hash(body.as_bytes());
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }

    let mut lines = body.lines().skip(1);
    let mut field = |key: &str| -> Result<&str> {
        lines
            .next()
            .and_then(|l| l.strip_prefix(key))
            .and_then(|l| l.strip_prefix(' '))
            .ok_or_else(|| Error::Malformed(format!("expected `{key}` line")))
    };
    let band_limit: usize = field("L")?
        .parse()
        .map_err(|_| Error::Malformed("band-limit is not an integer".into()))?;
    let measure: Measure = field("measure")?
        .parse()
        .map_err(|e: Error| Error::Malformed(e.to_string()))?;
    let ordering: Ordering = field("ordering")?
        .parse()
        .map_err(|e: Error| Error::Malformed(e.to_string()))?;
    let permutation = lines
        .map(|l| {
            l.trim()
                .parse::<usize>()
                .map_err(|_| Error::Malformed(format!("bad permutation entry {l:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if permutation.len() != band_limit {
        return Err(Error::Malformed(format!(
            "{} permutation entries for L = {band_limit}",
            permutation.len()
        )));
    }
    ColatitudeGrid::from_permutation(band_limit, measure, ordering, permutation)
}

pub fn save_grid(grid: &ColatitudeGrid, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_grid(grid))?;
    Ok(())
}

pub fn load_grid(path: impl AsRef<Path>) -> Result<ColatitudeGrid> {
    decode_grid(&fs::read_to_string(path)?)
}

/// Directory of grid files keyed by `(L, measure, ordering)`; each grid is
/// built at most once.
#[derive(Debug, Clone)]
pub struct GridCache {
    dir: PathBuf,
}

impl GridCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, band_limit: usize, measure: Measure, ordering: Ordering) -> PathBuf {
        self.dir
            .join(format!("grid-L{band_limit}-{}-{}.txt", measure.tag(), ordering.tag()))
    }

    pub fn get(&self, band_limit: usize, measure: Measure, ordering: Ordering) -> Result<ColatitudeGrid> {
        let path = self.path_for(band_limit, measure, ordering);
        if path.exists() {
            if let Ok(grid) = load_grid(&path) {
                if grid.band_limit() == band_limit && grid.measure() == measure && grid.ordering() == ordering {
                    return Ok(grid);
                }
            }
        }
        let grid = ColatitudeGrid::build(band_limit, measure, ordering)?;
        fs::create_dir_all(&self.dir)?;
        // Write then rename so concurrent readers never see a partial file.
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        save_grid(&grid, &tmp)?;
        fs::rename(&tmp, &path)?;
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        for measure in [Measure::Uniform, Measure::Sine, Measure::TanCubeRoot] {
            let grid = ColatitudeGrid::interleaved(17, measure).unwrap();
            let back = decode_grid(&encode_grid(&grid)).unwrap();
            assert_eq!(back, grid);
            assert!(back.thetas().iter().zip(grid.thetas()).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn condmin_round_trip() {
        let grid = ColatitudeGrid::condition_minimized(64, Measure::Uniform).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        save_grid(&grid, &path).unwrap();
        let back = load_grid(&path).unwrap();
        assert_eq!(back.permutation(), grid.permutation());
        assert_eq!(back.ordering(), Ordering::ConditionMinimized);
    }

    #[test]
    fn truncated_file_is_malformed() {
        let text = encode_grid(&ColatitudeGrid::interleaved(8, Measure::Uniform).unwrap());
        let cut = &text[..text.len() / 2];
        assert!(matches!(decode_grid(cut), Err(Error::Malformed(_)) | Err(Error::Checksum { .. })));
        let no_crc: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert!(matches!(decode_grid(&no_crc), Err(Error::Malformed(_))));
        assert!(matches!(decode_grid(""), Err(Error::Malformed(_))));
    }

    #[test]
    fn version_and_checksum_errors() {
        let text = encode_grid(&ColatitudeGrid::interleaved(5, Measure::Uniform).unwrap());
        let v2 = text.replacen("v1", "v2", 1);
        assert!(matches!(decode_grid(&v2), Err(Error::Version(v)) if v == "v2"));
        let flipped = text.replace("\n0\n", "\n9\n");
        assert_ne!(flipped, text);
        assert!(matches!(decode_grid(&flipped), Err(Error::Checksum { .. })));
    }

    #[test]
    fn large_permutation_file_is_small() {
        let grid = ColatitudeGrid::interleaved(4096, Measure::Uniform).unwrap();
        assert!(encode_grid(&grid).len() <= 64 * 1024);
    }

    #[test]
    fn cache_builds_once() {
        let dir = tempfile::tempdir().unwrap();
        let cache = GridCache::new(dir.path());
        let a = cache.get(12, Measure::Uniform, Ordering::ConditionMinimized).unwrap();
        let path = cache.path_for(12, Measure::Uniform, Ordering::ConditionMinimized);
        assert!(path.exists());
        let stamp = fs::metadata(&path).unwrap().modified().unwrap();
        let b = cache.get(12, Measure::Uniform, Ordering::ConditionMinimized).unwrap();
        assert_eq!(a, b);
        assert_eq!(fs::metadata(&path).unwrap().modified().unwrap(), stamp);
    }
}
