use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use spinrot_core::config::{config_digest, ExperimentConfig, SweepParameter};
use spinrot_core::detection::{
    energy_shift_report, fit_beat, fit_intensity, sample_counts, BeatFit,
};
use spinrot_core::exec::{try_map_indexed, Execution};
use spinrot_core::interferometer::simulate_trace;
use spinrot_core::report::{self, FitReport, FitSource, RunManifest, SweepRow};
use spinrot_core::wave::{
    doppler_shift, half_wave_plate_shift, rotating_observer_energy, Helicity, RotatingObserver,
};
use spinrot_core::{Error, PhysicalConstants, Result};

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn read_config(path: &Path) -> Result<(String, ExperimentConfig)> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidConfig {
        field: path.display().to_string(),
        message: format!("cannot read config: {e}"),
    })?;
    let cfg = ExperimentConfig::from_json(&text)?;
    Ok((text, cfg))
}

/// Fit the counts when present, otherwise the noiseless trace.
fn fit_run(
    trace: &spinrot_core::IntensityTrace,
    counts: Option<&spinrot_core::CountTrace>,
) -> Result<(FitSource, BeatFit)> {
    match counts {
        Some(c) => Ok((FitSource::Counts, fit_beat(c, None)?)),
        None => Ok((FitSource::Intensity, fit_intensity(trace, None)?)),
    }
}

pub fn run(config: &Path, out: &Path, quiet: bool) -> Result<()> {
    let (text, cfg) = read_config(config)?;
    let experiment = cfg.resolve()?;
    let constants = experiment.constants;
    let mut warnings = experiment.interferometer.warnings(&constants);

    let trace = simulate_trace(&experiment.interferometer, &constants)?;
    fs::create_dir_all(out)?;
    report::write_trace_csv(create(out, "trace.csv")?, &trace)?;

    let counts = experiment.counting.map(|c| sample_counts(&trace, &c));
    if let Some(c) = &counts {
        report::write_counts_csv(create(out, "counts.csv")?, c)?;
    }

    let summary = match fit_run(&trace, counts.as_ref()) {
        Ok((source, fit)) => {
            let fit_report = FitReport {
                source,
                fit,
                energy: energy_shift_report(&fit, &constants),
            };
            fs::write(out.join("fit.txt"), fit_report.to_string())?;
            Some(fit_report)
        }
        Err(e @ (Error::DegenerateFit(_) | Error::InsufficientData(_))) => {
            fs::write(out.join("fit.txt"), format!("fit_status = {e}\n"))?;
            warnings.push(format!("no beat fitted: {e}"));
            None
        }
        Err(e) => return Err(e),
    };

    let manifest = RunManifest {
        config_digest: config_digest(&text)?,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        constants_used: constants,
        warnings,
    };
    fs::write(out.join("manifest.txt"), manifest.to_string())?;

    if !quiet {
        println!(
            "wrote {} samples to {}",
            trace.len(),
            out.join("trace.csv").display()
        );
        if let Some(r) = summary {
            println!(
                "beat: omega = {:.6e} rad/s, amplitude = {:.6e}, energy shift = {:.6e} eV",
                r.fit.angular_frequency, r.fit.amplitude, r.energy.electronvolts
            );
        }
        for w in &manifest.warnings {
            println!("warning: {w}");
        }
    }
    Ok(())
}

pub struct PhotonRequest {
    pub omega: Option<f64>,
    pub rotation: f64,
    pub gamma: f64,
    pub helicity: String,
    pub energy: Option<f64>,
    pub m: Option<f64>,
    pub half_wave_plate: bool,
}

pub fn photon(req: &PhotonRequest) -> Result<()> {
    let helicity: Helicity = req.helicity.parse()?;
    if let Some(energy) = req.energy {
        let m = req
            .m
            .ok_or_else(|| Error::Parse("--energy needs --M".into()))?;
        let obs = RotatingObserver::new(req.rotation, req.gamma)?;
        let e = rotating_observer_energy(energy, m, &obs, &PhysicalConstants::default())?;
        println!("{e:e}");
        return Ok(());
    }
    let omega = req
        .omega
        .ok_or_else(|| Error::Parse("--omega is required (or --energy with --M)".into()))?;
    if req.half_wave_plate {
        let (omega_out, h_out) = half_wave_plate_shift(omega, req.rotation, helicity)?;
        println!("omega_out = {omega_out}");
        println!("helicity_out = {}", h_out.symbol());
    } else {
        let obs = RotatingObserver::new(req.rotation, req.gamma)?;
        println!("{}", doppler_shift(omega, &obs, helicity)?);
    }
    Ok(())
}

fn parse_values(values: Option<&str>, range: Option<&str>) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::InvalidConfig {
        field: "range".into(),
        message: msg,
    };
    let mut out = match (values, range) {
        (Some(list), None) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| bad(format!("`{s}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?,
        (None, Some(range_text)) => {
            let parts: Vec<&str> = range_text.split(':').collect();
            if parts.len() != 3 {
                return Err(bad(format!(
                    "expected start:stop:count, got `{range_text}`"
                )));
            }
            let start: f64 = parts[0]
                .parse()
                .map_err(|_| bad(format!("bad start `{}`", parts[0])))?;
            let stop: f64 = parts[1]
                .parse()
                .map_err(|_| bad(format!("bad stop `{}`", parts[1])))?;
            let count: usize = parts[2]
                .parse()
                .map_err(|_| bad(format!("bad count `{}`", parts[2])))?;
            match count {
                0 => Vec::new(),
                1 => vec![start],
                n => (0..n)
                    .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
                    .collect(),
            }
        }
        (None, None) => return Err(bad("give --values or --range".into())),
        (Some(_), Some(_)) => return Err(bad("give only one of --values and --range".into())),
    };
    if out.is_empty() {
        return Err(bad("sweep range is empty".into()));
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(bad("sweep values must be finite".into()));
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

pub fn sweep(
    config: &Path,
    parameter: &str,
    values: Option<&str>,
    range: Option<&str>,
    out: &Path,
    quiet: bool,
) -> Result<()> {
    let parameter: SweepParameter = parameter.parse()?;
    let values = parse_values(values, range)?;
    let (_, cfg) = read_config(config)?;
    // validate every point before running any
    let experiments = values
        .iter()
        .map(|&v| cfg.with_parameter(parameter, v)?.resolve())
        .collect::<Result<Vec<_>>>()?;

    let rows = try_map_indexed(experiments.len(), Execution::Parallel, |k| {
        let exp = &experiments[k];
        let trace = simulate_trace(&exp.interferometer, &exp.constants)?;
        let counts = exp.counting.map(|c| sample_counts(&trace, &c));
        let (_, fit) = fit_run(&trace, counts.as_ref())?;
        let energy = energy_shift_report(&fit, &exp.constants);
        Ok::<_, Error>(SweepRow {
            value: values[k],
            angular_frequency: fit.angular_frequency,
            amplitude: fit.amplitude,
            visibility: fit.visibility(),
            energy_shift_ev: energy.electronvolts,
        })
    })?;

    fs::create_dir_all(out)?;
    report::write_sweep_csv(create(out, "sweep.csv")?, &rows)?;
    if !quiet {
        println!(
            "swept {} over {} points; wrote {}",
            parameter.name(),
            rows.len(),
            out.join("sweep.csv").display()
        );
    }
    Ok(())
}

pub fn fit(
    counts_path: &Path,
    freq_hint: Option<f64>,
    dwell: Option<f64>,
    config: Option<&Path>,
    out: Option<&Path>,
    quiet: bool,
) -> Result<()> {
    let text = fs::read_to_string(counts_path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", counts_path.display())))?;
    let counts = report::read_counts_csv(&text, dwell)?;
    let constants = match config {
        Some(p) => read_config(p)?.1.constants()?,
        None => PhysicalConstants::default(),
    };
    let fit = fit_beat(&counts, freq_hint)?;
    let fit_report = FitReport {
        source: FitSource::Counts,
        fit,
        energy: energy_shift_report(&fit, &constants),
    };
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("fit.txt"), fit_report.to_string())?;
    }
    if !quiet {
        print!("{fit_report}");
    }
    Ok(())
}
