//! CSV and plain-text outputs.
//!
//! CSV files are comma-separated with a header row, LF line endings and
//! floats in `{:.16e}` form (17 significant digits, exact round trip).

use std::fmt;
use std::io::{self, Write};

use crate::constants::PhysicalConstants;
use crate::detection::{BeatFit, CountTrace, EnergyShift};
use crate::error::{Error, Result};
use crate::interferometer::IntensityTrace;

pub const TRACE_HEADER: &str = "t_s,intensity";
pub const COUNTS_HEADER: &str = "t_s,counts";
pub const SWEEP_HEADER: &str = "value,fitted_omega_rad_s,amplitude,visibility,energy_shift_ev";

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trace_csv<W: Write>(mut w: W, trace: &IntensityTrace) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for (t, i) in trace.times.iter().zip(&trace.intensity) {
        writeln!(w, "{},{}", format_f64(*t), format_f64(*i))?;
    }
    Ok(())
}

pub fn write_counts_csv<W: Write>(mut w: W, counts: &CountTrace) -> io::Result<()> {
    writeln!(w, "{COUNTS_HEADER}")?;
    for (t, c) in counts.bin_centers.iter().zip(&counts.counts) {
        writeln!(w, "{},{}", format_f64(*t), c)?;
    }
    Ok(())
}

fn parse_rows<'a>(
    text: &'a str,
    header: &str,
) -> Result<impl Iterator<Item = (usize, &'a str, &'a str)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == header => {}
        Some(h) => {
            return Err(Error::Parse(format!(
                "expected header `{header}`, found `{}`",
                h.trim()
            )))
        }
        None => return Err(Error::Parse("empty CSV".into())),
    }
    let rows: Vec<_> = lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            let mut parts = l.splitn(2, ',');
            let a = parts.next().unwrap_or("").trim();
            let b = parts.next().unwrap_or("").trim();
            (k + 2, a, b)
        })
        .collect();
    Ok(rows.into_iter())
}

fn parse_f64(line: usize, s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {line}: `{s}` is not a number")))
}

pub fn read_trace_csv(text: &str) -> Result<IntensityTrace> {
    let mut trace = IntensityTrace {
        times: Vec::new(),
        intensity: Vec::new(),
    };
    for (line, a, b) in parse_rows(text, TRACE_HEADER)? {
        trace.times.push(parse_f64(line, a)?);
        trace.intensity.push(parse_f64(line, b)?);
    }
    Ok(trace)
}

/// Parse a counts CSV. Without an explicit `dwell`, the bin width is the
/// median spacing of the bin centers.
pub fn read_counts_csv(text: &str, dwell: Option<f64>) -> Result<CountTrace> {
    let mut centers = Vec::new();
    let mut counts = Vec::new();
    for (line, a, b) in parse_rows(text, COUNTS_HEADER)? {
        centers.push(parse_f64(line, a)?);
        let c = match b.parse::<u64>() {
            Ok(c) => c,
            Err(_) => {
                let x = parse_f64(line, b)?;
                if x >= 0.0 && x.fract() == 0.0 {
                    x as u64
                } else {
                    return Err(Error::Parse(format!(
                        "line {line}: count `{b}` is not a nonnegative integer"
                    )));
                }
            }
        };
        counts.push(c);
    }
    let dwell = match dwell {
        Some(d) => d,
        None => {
            if centers.len() < 2 {
                return Err(Error::Parse(
                    "need at least two bins to infer the dwell time".into(),
                ));
            }
            let mut gaps: Vec<f64> = centers.windows(2).map(|p| p[1] - p[0]).collect();
            gaps.sort_by(f64::total_cmp);
            gaps[gaps.len() / 2]
        }
    };
    CountTrace::new(centers, counts, dwell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitSource {
    Counts,
    Intensity,
}

/// Contents of `fit.txt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub source: FitSource,
    pub fit: BeatFit,
    pub energy: EnergyShift,
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = match self.source {
            FitSource::Counts => "counts_per_s",
            FitSource::Intensity => "normalized_intensity",
        };
        let fit = &self.fit;
        writeln!(
            f,
            "source = {}",
            match self.source {
                FitSource::Counts => "counts",
                FitSource::Intensity => "intensity",
            }
        )?;
        writeln!(f, "units = {unit}")?;
        writeln!(f, "offset = {}", format_f64(fit.offset))?;
        writeln!(f, "amplitude = {}", format_f64(fit.amplitude))?;
        writeln!(f, "amplitude_stderr = {}", format_f64(fit.amplitude_stderr))?;
        writeln!(
            f,
            "angular_frequency_rad_per_s = {}",
            format_f64(fit.angular_frequency)
        )?;
        writeln!(f, "phase_rad = {}", format_f64(fit.phase))?;
        writeln!(f, "residual_rms = {}", format_f64(fit.residual_rms))?;
        writeln!(f, "visibility = {}", format_f64(fit.visibility()))?;
        writeln!(f, "energy_shift_j = {}", format_f64(self.energy.joules))?;
        writeln!(
            f,
            "energy_shift_ev = {}",
            format_f64(self.energy.electronvolts)
        )
    }
}

/// Parse `key = value` lines.
pub fn parse_key_values(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

/// Contents of `manifest.txt`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_digest: String,
    pub tool_version: String,
    pub constants_used: PhysicalConstants,
    pub warnings: Vec<String>,
}

impl fmt::Display for RunManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.constants_used;
        writeln!(f, "config_digest = {}", self.config_digest)?;
        writeln!(f, "tool_version = {}", self.tool_version)?;
        writeln!(f, "constants.hbar = {}", format_f64(c.hbar))?;
        writeln!(f, "constants.neutron_mass = {}", format_f64(c.neutron_mass))?;
        writeln!(f, "constants.planck_h = {}", format_f64(c.planck_h))?;
        writeln!(
            f,
            "constants.gyromagnetic_ratio_neutron = {}",
            format_f64(c.gyromagnetic_ratio_neutron)
        )?;
        writeln!(f, "constants.ev_per_joule = {}", format_f64(c.ev_per_joule))?;
        writeln!(f, "warnings = {}", self.warnings.len())?;
        for w in &self.warnings {
            writeln!(f, "warning = {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub angular_frequency: f64,
    pub amplitude: f64,
    pub visibility: f64,
    pub energy_shift_ev: f64,
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            format_f64(r.value),
            format_f64(r.angular_frequency),
            format_f64(r.amplitude),
            format_f64(r.visibility),
            format_f64(r.energy_shift_ev)
        )?;
    }
    Ok(())
}
