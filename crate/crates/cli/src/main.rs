//! `spinrot`: batch front end for the spin-rotation interferometer
//! simulation.
//!
//! Exit codes: 0 success, 2 invalid input or configuration, 3 numerical
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "spinrot",
    version,
    about = "Spin-rotation coupling in a two-path neutron interferometer"
)]
struct Cli {
    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a configured experiment and write trace, counts, fit and manifest.
    Run(RunArgs),
    /// Rotating-observer photon frequency or particle energy.
    Photon(PhotonArgs),
    /// Repeat a run over values of one parameter and tabulate the fitted beat.
    Sweep(SweepArgs),
    /// Fit a beat to an external counts CSV (`t_s,counts`).
    Fit(FitArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PhotonArgs {
    /// Wave angular frequency in the inertial frame, rad/s.
    #[arg(long)]
    omega: Option<f64>,
    /// Observer (or plate) rotation rate, rad/s.
    #[arg(long = "Omega", allow_hyphen_values = true)]
    rotation: f64,
    /// Observer Lorentz factor.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// `+` or `-`.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    helicity: String,
    /// Particle energy in the inertial frame, J (use with --M).
    #[arg(long)]
    energy: Option<f64>,
    /// Total angular momentum quantum number along the rotation axis.
    #[arg(long = "M", allow_hyphen_values = true)]
    m: Option<f64>,
    /// Frequency and helicity after a rotating half-wave plate.
    #[arg(long)]
    half_wave_plate: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// One of Omega, B, wavelength, chi, seed.
    #[arg(long)]
    parameter: String,
    /// Comma-separated values.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "range")]
    values: Option<String>,
    /// `start:stop:count`, inclusive and evenly spaced.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Counts CSV with header `t_s,counts`.
    #[arg(long)]
    counts: PathBuf,
    /// Known beat angular frequency, rad/s; skips the frequency search.
    #[arg(long)]
    freq_hint: Option<f64>,
    /// Bin width, s; defaults to the median bin spacing.
    #[arg(long)]
    dwell: Option<f64>,
    /// Config whose constants to use for the energy report.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory to write `fit.txt` into; stdout only if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => commands::run(&a.config, &a.out, cli.quiet),
        Command::Photon(a) => commands::photon(&commands::PhotonRequest {
            omega: a.omega,
            rotation: a.rotation,
            gamma: a.gamma,
            helicity: a.helicity,
            energy: a.energy,
            m: a.m,
            half_wave_plate: a.half_wave_plate,
        }),
        Command::Sweep(a) => commands::sweep(
            &a.config,
            &a.parameter,
            a.values.as_deref(),
            a.range.as_deref(),
            &a.out,
            cli.quiet,
        ),
        Command::Fit(a) => commands::fit(
            &a.counts,
            a.freq_hint,
            a.dwell,
            a.config.as_deref(),
            a.out.as_deref(),
            cli.quiet,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinrot: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
