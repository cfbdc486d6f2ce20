use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optisph_core::experiments::{
    bench, bench_report, cond, cond_report, condition_profile, error_report, error_surface, error_surface_report,
    exp1, exp2, BenchOptions, GridSource, Report,
};
use optisph_core::io::{read_coefficients, read_samples, write_coefficients, write_samples};
use optisph_core::oracle::{dense_lsq_analysis, direct_synthesis};
use optisph_core::sampling::{load_grid, save_grid, GridCache};
use optisph_core::transform::{forward_sht, inverse_sht};
use optisph_core::{ColatitudeGrid, Error, Measure, Ordering};

/// Optimal-dimensionality sampling and spherical harmonic transforms.
#[derive(Debug, Parser)]
#[command(name = "optisph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a grid, write it to a cache file and print its largest κ_m.
    Grid {
        #[arg(short = 'L', value_name = "L")]
        band_limit: usize,
        #[arg(long, default_value = "uniform")]
        measure: Measure,
        #[arg(long, default_value = "condmin")]
        ordering: Ordering,
        /// Defaults to `grid-L<L>-<measure>-<ordering>.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Signal file to coefficient file.
    Forward(TransformArgs),
    /// Coefficient file to signal file.
    Inverse(TransformArgs),
    /// Spectral round-trip error sweep.
    Exp1(SweepArgs),
    /// Spatial round-trip error sweep.
    Exp2(SweepArgs),
    /// Per-coefficient round-trip error at one band-limit.
    Errsurface {
        #[arg(short = 'L', value_name = "L")]
        band_limit: usize,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// κ_m for every order of each band-limit.
    Cond {
        #[arg(short = 'L', value_name = "L", value_delimiter = ',', required = true)]
        band_limits: Vec<usize>,
        #[arg(long, default_value = "uniform")]
        measure: Measure,
        #[arg(long, default_value = "condmin")]
        ordering: Ordering,
        #[command(flatten)]
        output: Output,
    },
    /// Wall times of the inverse, the forward and the forward's solve step.
    Bench {
        #[arg(short = 'L', value_name = "L", value_delimiter = ',', required = true)]
        band_limits: Vec<usize>,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report the mean of the trials instead of the median.
        #[arg(long)]
        mean: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
struct TransformArgs {
    input: PathBuf,
    grid: PathBuf,
    out: PathBuf,
    /// Use the slow reference transform.
    #[arg(long)]
    oracle: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(short = 'L', value_name = "L", value_delimiter = ',', required = true)]
    band_limits: Vec<usize>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reuse grids from this directory, building missing ones.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl Output {
    fn grids(&self) -> GridSource {
        self.cache_dir
            .as_ref()
            .map(|dir| GridSource::cached(GridCache::new(dir)))
            .unwrap_or_default()
    }

    fn emit(&self, report: &Report) -> Result<(), Failure> {
        match &self.out {
            Some(path) => report.write(path)?,
            None => print!("{}", report.to_csv()),
        }
        Ok(())
    }
}

/// A diagnostic and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Self { code: 2, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RootNotConverged { .. }
            | Error::IllConditionedGrid { .. }
            | Error::IllConditionedSolve { .. }
            | Error::Aliasing { .. }
            | Error::SingularSystem { .. } => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

fn check_band_limit(band_limit: usize) -> Result<(), Failure> {
    if band_limit == 0 {
        return Err(Error::InvalidBandLimit(0).into());
    }
    Ok(())
}

fn load_matching_grid(path: &Path, file: &Path, band_limit: usize) -> Result<ColatitudeGrid, Failure> {
    let grid = load_grid(path)?;
    if grid.band_limit() != band_limit {
        return Err(Failure::usage(format!(
            "band-limit mismatch: {} has L = {band_limit} but grid {} has L = {}",
            file.display(),
            path.display(),
            grid.band_limit()
        )));
    }
    Ok(grid)
}

fn sweep_failures(records: &[optisph_core::experiments::ErrorRecord]) -> Result<(), Failure> {
    let failed: Vec<String> = records
        .iter()
        .filter_map(|r| r.failure.as_ref().map(|f| format!("L = {}: {f}", r.band_limit)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure { code: 1, message: failed.join("\n") })
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Grid { band_limit, measure, ordering, out } => {
            check_band_limit(band_limit)?;
            let grid = ColatitudeGrid::build(band_limit, measure, ordering)?;
            let path = out.unwrap_or_else(|| GridCache::new(".").path_for(band_limit, measure, ordering));
            save_grid(&grid, &path)?;
            let kappas = condition_profile(&grid)?;
            let (argmax, max) = kappas
                .iter()
                .copied()
                .enumerate()
                .fold((0, 0.0), |best, (m, k)| if k > best.1 { (m, k) } else { best });
            println!("L={band_limit} measure={measure} ordering={ordering} max_kappa={max:.6e} at m={argmax}");
            println!("wrote {}", path.display());
        }
        Command::Forward(args) => {
            let samples = read_samples(&args.input)?;
            let grid = load_matching_grid(&args.grid, &args.input, samples.band_limit())?;
            let coeffs = if args.oracle {
                dense_lsq_analysis(&samples, &grid)?
            } else {
                forward_sht(&samples, &grid)?
            };
            write_coefficients(&coeffs, &args.out)?;
        }
        Command::Inverse(args) => {
            let coeffs = read_coefficients(&args.input)?;
            let grid = load_matching_grid(&args.grid, &args.input, coeffs.band_limit())?;
            let samples = if args.oracle {
                direct_synthesis(&coeffs, &grid)?
            } else {
                inverse_sht(&coeffs, &grid)?
            };
            write_samples(&samples, &args.out)?;
        }
        Command::Exp1(args) | Command::Exp2(args) if args.band_limits.contains(&0) => {
            return Err(Error::InvalidBandLimit(0).into());
        }
        Command::Exp1(args) => {
            let records = exp1(&args.band_limits, args.trials as usize, args.seed, &args.output.grids());
            args.output.emit(&error_report("exp1", args.seed, &records))?;
            sweep_failures(&records)?;
        }
        Command::Exp2(args) => {
            let records = exp2(&args.band_limits, args.trials as usize, args.seed, &args.output.grids());
            args.output.emit(&error_report("exp2", args.seed, &records))?;
            sweep_failures(&records)?;
        }
        Command::Errsurface { band_limit, trials, seed, output } => {
            check_band_limit(band_limit)?;
            let surface = error_surface(band_limit, trials as usize, seed, &output.grids())?;
            output.emit(&error_surface_report(band_limit, seed, &surface))?;
        }
        Command::Cond { band_limits, measure, ordering, output } => {
            band_limits.iter().try_for_each(|&l| check_band_limit(l))?;
            let records = cond(&band_limits, measure, ordering, &output.grids())?;
            output.emit(&cond_report(measure, ordering, &records))?;
        }
        Command::Bench { band_limits, trials, seed, mean, output } => {
            band_limits.iter().try_for_each(|&l| check_band_limit(l))?;
            let options = BenchOptions { trials: trials as usize, mean, seed };
            let records = bench(&band_limits, options, &output.grids())?;
            output.emit(&bench_report(seed, &records))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("optisph: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
