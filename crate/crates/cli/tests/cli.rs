use std::path::Path;
use std::process::{Command, Output};

use optisph_core::io::{read_coefficients, read_samples, write_coefficients};
use optisph_core::{Complex64, HarmonicCoefficients};
use tempfile::TempDir;

fn optisph(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optisph"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn grid_file(dir: &Path, band_limit: usize) -> String {
    let name = format!("grid{band_limit}.txt");
    let out = optisph(dir, &["grid", "-L", &band_limit.to_string(), "--out", &name]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    name
}

/// Deterministic coefficients with real and imaginary parts in [-1, 1].
fn coefficients(band_limit: usize) -> HarmonicCoefficients {
    let values = (0..band_limit * band_limit)
        .map(|i| Complex64::new((1.3 * i as f64).sin(), (0.7 * i as f64 + 0.2).cos()))
        .collect();
    HarmonicCoefficients::from_values(band_limit, values).unwrap()
}

#[test]
fn inverse_of_monopole_is_all_ones() {
    let dir = TempDir::new().unwrap();
    let grid = grid_file(dir.path(), 5);
    let mut c = HarmonicCoefficients::zeros(5);
    c.set(0, 0, Complex64::new((4.0 * std::f64::consts::PI).sqrt(), 0.0));
    write_coefficients(&c, dir.path().join("c.txt")).unwrap();
    for extra in [None, Some("--oracle")] {
        let mut args = vec!["inverse", "c.txt", grid.as_str(), "s.txt"];
        args.extend(extra);
        let out = optisph(dir.path(), &args);
        assert!(out.status.success());
        let s = read_samples(dir.path().join("s.txt")).unwrap();
        assert_eq!(s.values().len(), 25);
        for v in s.values() {
            assert!((v - 1.0).norm() <= 1e-13, "{v}");
        }
    }
}

#[test]
fn forward_inverse_round_trip() {
    let dir = TempDir::new().unwrap();
    let grid = grid_file(dir.path(), 32);
    let c = coefficients(32);
    write_coefficients(&c, dir.path().join("c.txt")).unwrap();
    assert!(optisph(dir.path(), &["inverse", "c.txt", &grid, "s.txt"]).status.success());
    assert!(optisph(dir.path(), &["forward", "s.txt", &grid, "back.txt"]).status.success());
    let back = read_coefficients(dir.path().join("back.txt")).unwrap();
    let (max, _) = back.error_against(&c).unwrap();
    assert!(max <= 1e-8, "{max}");
}

#[test]
fn oracle_forward_matches_fast_forward() {
    let dir = TempDir::new().unwrap();
    let grid = grid_file(dir.path(), 8);
    write_coefficients(&coefficients(8), dir.path().join("c.txt")).unwrap();
    assert!(optisph(dir.path(), &["inverse", "c.txt", &grid, "s.txt"]).status.success());
    assert!(optisph(dir.path(), &["forward", "s.txt", &grid, "fast.txt"]).status.success());
    assert!(optisph(dir.path(), &["forward", "--oracle", "s.txt", &grid, "slow.txt"]).status.success());
    let fast = read_coefficients(dir.path().join("fast.txt")).unwrap();
    let slow = read_coefficients(dir.path().join("slow.txt")).unwrap();
    assert!(fast.error_against(&slow).unwrap().0 <= 1e-10);
}

#[test]
fn band_limit_mismatch_exits_2_naming_both() {
    let dir = TempDir::new().unwrap();
    let grid = grid_file(dir.path(), 5);
    write_coefficients(&coefficients(4), dir.path().join("c.txt")).unwrap();
    let out = optisph(dir.path(), &["inverse", "c.txt", &grid, "s.txt"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("L = 4") && err.contains("L = 5"), "{err}");
    assert!(!dir.path().join("s.txt").exists());
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let grid = grid_file(dir.path(), 3);
    std::fs::write(dir.path().join("bad.txt"), "OPTISPH-SIG v1\nL 3\n0 0 1.0\n").unwrap();
    assert_eq!(optisph(dir.path(), &["forward", "bad.txt", &grid, "c.txt"]).status.code(), Some(2));
    assert_eq!(optisph(dir.path(), &["forward", "missing.txt", &grid, "c.txt"]).status.code(), Some(2));
    assert_eq!(optisph(dir.path(), &["grid", "-L", "0"]).status.code(), Some(2));
    assert_eq!(optisph(dir.path(), &["exp1", "-L", "4", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(optisph(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn single_ring_grid() {
    let dir = TempDir::new().unwrap();
    let out = optisph(dir.path(), &["grid", "-L", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("max_kappa=1.000000e0 at m=0"));
    assert!(dir.path().join("grid-L1-uniform-condmin.txt").exists());
}

#[test]
fn condmin_summary_beats_interleaved() {
    let dir = TempDir::new().unwrap();
    let kappa = |ordering: &str| -> f64 {
        let out = optisph(dir.path(), &["grid", "-L", "32", "--ordering", ordering]);
        let text = stdout(&out);
        let field = text.split("max_kappa=").nth(1).unwrap();
        field.split_whitespace().next().unwrap().parse().unwrap()
    };
    assert!(kappa("condmin") < kappa("interleaved"));
}

#[test]
fn report_headers() {
    let dir = TempDir::new().unwrap();
    let cases: [(&[&str], &str); 5] = [
        (&["exp1", "-L", "2,3", "--trials", "2", "--seed", "4"], "# optisph exp1 seed=4\nL,trials,e_max,e_mean,status\n"),
        (&["exp2", "-L", "2", "--trials", "1"], "# optisph exp2 seed=0\nL,trials,e_max,e_mean,status\n"),
        (&["errsurface", "-L", "2", "--trials", "1"], "# optisph errsurface seed=0\nell,m,error\n"),
        (&["cond", "-L", "3"], "# optisph cond seed=0\nL,measure,ordering,m,kappa,max_kappa\n"),
        (&["bench", "-L", "4", "--trials", "1"], "# optisph bench seed=0\nL,tau_i,tau_f,tau_f1\n"),
    ];
    for (args, header) in cases {
        let out = optisph(dir.path(), args);
        assert!(out.status.success(), "{args:?}");
        assert!(stdout(&out).starts_with(header), "{args:?}: {}", stdout(&out));
    }
}

#[test]
fn reports_are_deterministic_and_sized() {
    let dir = TempDir::new().unwrap();
    let args = ["exp1", "-L", "2,4", "--trials", "3", "--seed", "9"];
    let a = stdout(&optisph(dir.path(), &args));
    assert_eq!(a, stdout(&optisph(dir.path(), &args)));
    let rows = |text: &str| text.lines().skip(2).count();
    assert_eq!(rows(&a), 2);
    let surface = stdout(&optisph(dir.path(), &["errsurface", "-L", "3", "--trials", "1"]));
    assert_eq!(rows(&surface), 9);
    for line in surface.lines().skip(2) {
        let e: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(e <= 1e-13);
    }
}

#[test]
fn report_to_file_with_cache() {
    let dir = TempDir::new().unwrap();
    let out = optisph(dir.path(), &["cond", "-L", "4,6", "--out", "k.csv", "--cache-dir", "."]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(dir.path().join("k.csv")).unwrap();
    assert_eq!(text.lines().count(), 2 + 4 + 6);
    assert!(dir.path().join("grid-L6-uniform-condmin.txt").exists());
}
