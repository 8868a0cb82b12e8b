//! Text formats for inputs and experiment artifacts.
//!
//! Floats are written with 17 significant digits so every value survives a
//! write/read cycle bit for bit. Configurations are `0`/`1` strings with
//! site 1 leftmost.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fock::{self, Configuration};
use crate::measurement::{Distribution, MeasurementRecord};
use crate::ssep::{DensityProfile, SsepState};
use crate::zeno::{ConvergenceReport, GeneratorMatrix};

pub const DISTRIBUTION_HEADER: &str = "config,probability";
pub const RECORD_HEADER: &str = "step,config";
pub const CONVERGENCE_HEADER: &str = "M,L,distance,seconds";
pub const GENERATOR_HEADER: &str = "config_from,config_to,rate";
pub const DENSITY_HEADER: &str = "site,density";
pub const SAMPLES_HEADER: &str = "seed,final_config,clock";

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_error(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, reason: reason.into() }
}

fn parse_float(field: &str, line: usize) -> Result<f64> {
    let value: f64 = field.trim().parse().map_err(|_| parse_error(line, format!("{field:?} is not a number")))?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(parse_error(line, format!("{field:?} is not finite")))
    }
}

fn parse_configuration(field: &str, line: usize) -> Result<Configuration> {
    field.trim().parse::<Configuration>().map_err(|e| match e {
        Error::Parse { reason, .. } => parse_error(line, reason),
        other => parse_error(line, other.to_string()),
    })
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

fn expect_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, header: &str) -> Result<()> {
    match lines.next() {
        Some((_, l)) if l == header => Ok(()),
        Some((n, l)) => Err(parse_error(n, format!("expected header {header:?}, found {l:?}"))),
        None => Err(parse_error(1, format!("missing header {header:?}"))),
    }
}

fn split_fields(line: &str, count: usize, number: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() == count {
        Ok(fields)
    } else {
        Err(parse_error(number, format!("expected {count} fields, found {}", fields.len())))
    }
}

/// Every configuration with its probability, in basis order.
pub fn write_distribution(q: &Distribution) -> String {
    let mut out = String::from(DISTRIBUTION_HEADER);
    out.push('\n');
    for (x, p) in q.iter() {
        let _ = writeln!(out, "{x},{}", format_float(p));
    }
    out
}

/// Reads a `config,probability` table. Configurations that are not listed
/// have probability zero; repeated configurations are rejected.
pub fn parse_distribution(text: &str) -> Result<Distribution> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, DISTRIBUTION_HEADER)?;
    let mut n_sites = None;
    let mut entries: BTreeMap<usize, f64> = BTreeMap::new();
    for (number, line) in lines {
        let fields = split_fields(line, 2, number)?;
        let x = parse_configuration(fields[0], number)?;
        match n_sites {
            None => n_sites = Some(x.n_sites()),
            Some(n) if n != x.n_sites() => {
                return Err(parse_error(number, format!("configuration {x} has {} sites, expected {n}", x.n_sites())))
            }
            Some(_) => {}
        }
        let p = parse_float(fields[1], number)?;
        if entries.insert(x.index(), p).is_some() {
            return Err(parse_error(number, format!("configuration {x} listed twice")));
        }
    }
    let n_sites = n_sites.ok_or_else(|| Error::Distribution("no entries".into()))?;
    let mut probabilities = vec![0.0; fock::dimension(n_sites)];
    for (index, p) in entries {
        probabilities[index] = p;
    }
    Distribution::new(n_sites, probabilities)
}

/// One finite real per line; blank lines are ignored.
pub fn parse_potential(text: &str) -> Result<Vec<f64>> {
    let values = content_lines(text).map(|(n, l)| parse_float(l, n)).collect::<Result<Vec<_>>>()?;
    fock::check_sites(values.len())?;
    Ok(values)
}

/// `key=value` lines; `#` starts a comment line. Later keys override earlier
/// ones.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (number, line) in content_lines(text) {
        if line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| parse_error(number, format!("expected key=value, found {line:?}")))?;
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(parse_error(number, format!("invalid key {key:?}")));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Step 0 is the initial configuration, steps `1..=L` the outcomes.
pub fn write_record(record: &MeasurementRecord) -> String {
    let mut out = String::from(RECORD_HEADER);
    out.push('\n');
    for (step, x) in std::iter::once(&record.initial).chain(&record.outcomes).enumerate() {
        let _ = writeln!(out, "{step},{x}");
    }
    out
}

/// Steps must run `0, 1, 2, ...` over configurations of one ring size.
pub fn parse_record(text: &str) -> Result<Vec<(u64, Configuration)>> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, RECORD_HEADER)?;
    let mut steps: Vec<(u64, Configuration)> = Vec::new();
    for (number, line) in lines {
        let fields = split_fields(line, 2, number)?;
        let step: u64 = fields[0].trim().parse().map_err(|_| parse_error(number, "step is not an integer"))?;
        if step != steps.len() as u64 {
            return Err(parse_error(number, format!("expected step {}, found {step}", steps.len())));
        }
        let x = parse_configuration(fields[1], number)?;
        if let Some((_, first)) = steps.first() {
            if first.n_sites() != x.n_sites() {
                return Err(parse_error(
                    number,
                    format!("configuration {x} has {} sites, expected {}", x.n_sites(), first.n_sites()),
                ));
            }
        }
        steps.push((step, x));
    }
    Ok(steps)
}

pub fn write_convergence(report: &ConvergenceReport) -> String {
    let mut out = String::from(CONVERGENCE_HEADER);
    out.push('\n');
    for p in &report.points {
        let _ = writeln!(out, "{},{},{},{}", p.m, p.steps, format_float(p.distance), format_float(p.seconds));
    }
    out
}

pub fn write_generator(x: &GeneratorMatrix) -> String {
    let mut out = String::from(GENERATOR_HEADER);
    out.push('\n');
    for (from, to, rate) in x.triplets() {
        let _ = writeln!(out, "{from},{to},{}", format_float(rate));
    }
    out
}

pub fn write_density(profile: &DensityProfile) -> String {
    let mut out = String::from(DENSITY_HEADER);
    out.push('\n');
    for (i, rho) in profile.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, format_float(*rho));
    }
    out
}

pub fn parse_density(text: &str) -> Result<DensityProfile> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, DENSITY_HEADER)?;
    let mut values = Vec::new();
    for (number, line) in lines {
        let fields = split_fields(line, 2, number)?;
        let site: usize = fields[0].trim().parse().map_err(|_| parse_error(number, "site is not an integer"))?;
        if site != values.len() + 1 {
            return Err(parse_error(number, format!("expected site {}, found {site}", values.len() + 1)));
        }
        values.push(parse_float(fields[1], number)?);
    }
    Ok(DensityProfile::new(values))
}

pub fn write_samples(samples: &[(u64, SsepState)]) -> String {
    let mut out = String::from(SAMPLES_HEADER);
    out.push('\n');
    for (seed, s) in samples {
        let _ = writeln!(out, "{seed},{},{}", s.config, format_float(s.clock));
    }
    out
}
