//! End-to-end acceptance run: one PASS/FAIL line per criterion, written to
//! stderr directly so it shows without `--nocapture`.
//!
//! All criteria run in a single test so that nothing competes with the
//! timing measurements. Criteria listed in `KNOWN_RED` are expected to fail
//! and are explained in the README; the test fails if the set of failing
//! criteria differs from it in either direction.

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use optisph_core::basis::{legendre_column, legendre_direct, parity_sign, spin_column, wigner_d_direct};
use optisph_core::experiments::{
    bench, condition_profile, error_surface, exp1, exp2, loglog_slope, lsq_baseline, order_band_means, BenchOptions,
    GridSource,
};
use optisph_core::oracle::{dense_lsq_analysis, direct_synthesis};
use optisph_core::sampling::GridCache;
use optisph_core::transform::{forward_sht, inverse_sht, spin_forward_sht, spin_inverse_sht};
use optisph_core::{ColatitudeGrid, HarmonicCoefficients, Measure, Ordering, SpatialSamples};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const KNOWN_RED: &[u32] = &[7];
const SEED: u64 = 1;

type Criterion = (u32, &'static str, f64, fn(&GridSource) -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn grids() -> GridSource {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-grids");
    std::fs::create_dir_all(&dir).unwrap();
    GridSource::cached(GridCache::new(dir))
}

fn condmin(grids: &GridSource, band_limit: usize) -> ColatitudeGrid {
    grids.grid(band_limit, Measure::Uniform, Ordering::ConditionMinimized).unwrap()
}

fn max_kappa(grid: &ColatitudeGrid) -> f64 {
    condition_profile(grid).unwrap().into_iter().fold(0.0, f64::max)
}

fn sample_count(_: &GridSource) -> Outcome {
    let mut bad = Vec::new();
    for band_limit in 1..=256usize {
        let grid = ColatitudeGrid::interleaved(band_limit, Measure::Uniform).unwrap();
        let rings: usize = (0..band_limit).map(ColatitudeGrid::ring_len).sum();
        let samples = SpatialSamples::zeros(band_limit).values().len();
        let expected = band_limit * band_limit;
        if grid.sample_count() != expected || rings != expected || samples != expected {
            bad.push(band_limit);
        }
    }
    Outcome::new(bad.is_empty(), format!("L = 1..256, mismatches {bad:?}"))
}

fn basis_oracle(grids: &GridSource) -> Outcome {
    let grid = condmin(grids, 32);
    let (mut direct, mut parity, mut mirror) = (0.0f64, 0.0f64, 0.0f64);
    for &theta in grid.thetas() {
        for m in -10i64..=10 {
            let col = legendre_column(m, theta, 11).unwrap();
            let reflected = legendre_column(m, PI - theta, 11).unwrap();
            let negated = legendre_column(-m, theta, 11).unwrap();
            for ell in m.unsigned_abs() as usize..=10 {
                let v = col.get(ell).unwrap();
                direct = direct.max((v - legendre_direct(ell, m, theta).unwrap()).abs());
                let p = parity_sign(ell as i64 + m);
                parity = parity.max((reflected.get(ell).unwrap() - p * v).abs());
                mirror = mirror.max((negated.get(ell).unwrap() - parity_sign(m) * v).abs());
            }
        }
    }
    let worst = direct.max(parity).max(mirror);
    Outcome::new(
        worst <= 1e-12,
        format!("direct {direct:.2e}, parity {parity:.2e}, -m {mirror:.2e} (<= 1e-12)"),
    )
}

fn cross_validation(grids: &GridSource) -> Outcome {
    let grid = condmin(grids, 16);
    let truth = HarmonicCoefficients::random(16, &mut ChaCha8Rng::seed_from_u64(SEED));
    let slow_samples = direct_synthesis(&truth, &grid).unwrap();
    let fast_samples = inverse_sht(&truth, &grid).unwrap();
    let (pointwise, _) = fast_samples.error_against(&slow_samples).unwrap();

    let fast = forward_sht(&slow_samples, &grid).unwrap();
    let slow = dense_lsq_analysis(&slow_samples, &grid).unwrap();
    let relative = fast
        .values()
        .iter()
        .zip(slow.values())
        .map(|(a, b)| (a - b).norm() / b.norm())
        .fold(0.0, f64::max);
    Outcome::new(
        relative <= 1e-8 && pointwise <= 1e-12,
        format!("forward vs lsq rel {relative:.2e} (<= 1e-8), inverse vs direct {pointwise:.2e} (<= 1e-12)"),
    )
}

fn experiment_one(grids: &GridSource) -> Outcome {
    let r = exp1(&[64, 256], 10, SEED, grids);
    let ok = r.iter().all(|x| x.failure.is_none())
        && r[0].e_max <= 1e-7
        && r[0].e_mean <= 1e-9
        && r[1].e_max <= 1e-5;
    Outcome::new(
        ok,
        format!(
            "L=64 E_max {:.2e} (<= 1e-7) E_mean {:.2e} (<= 1e-9); L=256 E_max {:.2e} (<= 1e-5)",
            r[0].e_max, r[0].e_mean, r[1].e_max
        ),
    )
}

fn experiment_two(grids: &GridSource) -> Outcome {
    let r = exp2(&[64], 10, SEED, grids);
    Outcome::new(
        r[0].failure.is_none() && r[0].e_max <= 1e-7,
        format!("L=64 E_max {:.2e} (<= 1e-7)", r[0].e_max),
    )
}

fn conditioning(grids: &GridSource) -> Outcome {
    let reference = max_kappa(&condmin(grids, 64));
    let interleaved = max_kappa(&grids.grid(64, Measure::Uniform, Ordering::Interleaved).unwrap());
    let mut ok = reference < interleaved;
    let mut detail = format!("uniform condmin {reference:.3e} < interleaved {interleaved:.3e}");
    for measure in [Measure::Sine, Measure::TanCubeRoot] {
        for ordering in [Ordering::Interleaved, Ordering::ConditionMinimized] {
            let k = max_kappa(&grids.grid(64, measure, ordering).unwrap());
            ok &= k >= reference;
            detail.push_str(&format!("; {measure}/{ordering} {k:.3e}"));
        }
    }
    Outcome::new(ok, detail)
}

fn least_squares_baseline(grids: &GridSource) -> Outcome {
    let grid = grids.grid(64, Measure::Uniform, Ordering::Interleaved).unwrap();
    let e = lsq_baseline(&grid, 2, SEED).unwrap();
    Outcome::new(
        (1e-8..=1e-4).contains(&e),
        format!("relative coefficient error {e:.2e} (window [1e-8, 1e-4])"),
    )
}

fn scaling(grids: &GridSource) -> Outcome {
    let ls = [64usize, 128, 256, 512];
    for &l in &ls {
        condmin(grids, l);
    }
    let r = bench(&ls, BenchOptions { seed: SEED, ..Default::default() }, grids).unwrap();
    let xs: Vec<f64> = ls.iter().map(|&l| l as f64).collect();
    let ti = loglog_slope(&xs, &r.iter().map(|x| x.tau_i).collect::<Vec<_>>());
    let tf = loglog_slope(&xs, &r.iter().map(|x| x.tau_f).collect::<Vec<_>>());
    let solve_within = r.iter().all(|x| x.tau_f1 <= x.tau_f);
    Outcome::new(
        (2.5..=3.5).contains(&ti) && (2.5..=4.2).contains(&tf) && solve_within,
        format!("tau_I slope {ti:.2} ([2.5, 3.5]), tau_F slope {tf:.2} ([2.5, 4.2]), tau_F1 <= tau_F {solve_within}"),
    )
}

fn error_trend(grids: &GridSource) -> Outcome {
    let surface = error_surface(256, 10, SEED, grids).unwrap();
    let (low, high) = order_band_means(256, &surface);
    Outcome::new(
        low >= high,
        format!("mean |m| < L/4 {low:.3e} >= mean |m| >= 3L/4 {high:.3e}"),
    )
}

fn spin_consistency(grids: &GridSource) -> Outcome {
    let grid = condmin(grids, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let c = HarmonicCoefficients::random(16, &mut rng);
    let s = SpatialSamples::random(16, &mut rng);
    let identical = spin_inverse_sht(&c, &grid, 0).unwrap() == inverse_sht(&c, &grid).unwrap()
        && spin_forward_sht(&s, &grid, 0).unwrap() == forward_sht(&s, &grid).unwrap();

    let mut worst = 0.0f64;
    for &theta in condmin(grids, 32).thetas() {
        for spin in -3i64..=3 {
            for m in -3i64..=3 {
                let col = spin_column(spin, m, theta, 4).unwrap();
                for ell in col.first_degree..=3 {
                    let d = wigner_d_direct(ell, m, -spin, theta).unwrap();
                    let expected = parity_sign(spin) * ((2 * ell + 1) as f64 / (4.0 * PI)).sqrt() * d;
                    worst = worst.max((col.get(ell).unwrap() - expected).abs());
                }
            }
        }
    }
    Outcome::new(
        identical && worst <= 1e-12,
        format!("s = 0 bit-identical {identical}, spin columns vs Wigner-d {worst:.2e} (<= 1e-12)"),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        (1, "sample count", 1.0, sample_count),
        (2, "basis oracle", 5.0, basis_oracle),
        (3, "transform cross-validation", 30.0, cross_validation),
        (4, "spectral round trip", 300.0, experiment_one),
        (5, "spatial round trip", 120.0, experiment_two),
        (6, "conditioning", 600.0, conditioning),
        (7, "least-squares baseline", 600.0, least_squares_baseline),
        (8, "complexity scaling", 1200.0, scaling),
        (9, "error-surface trend", 600.0, error_trend),
        (10, "spin consistency", 30.0, spin_consistency),
    ];
    let grids = grids();
    let mut failing = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run(&grids);
        let seconds = start.elapsed().as_secs_f64();
        let pass = outcome.pass && seconds <= budget;
        writeln!(
            std::io::stderr().lock(),
            "{} criterion {id:>2} {name}: {} [{seconds:.1}s, budget {budget}s]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail
        )
        .unwrap();
        if !pass {
            failing.push(id);
        }
    }
    assert_eq!(failing, KNOWN_RED, "failing criteria differ from the documented set");
}
