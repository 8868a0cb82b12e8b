//! Flag values merged with an optional `key=value` config file. Flags win.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use zeno_ssep::fock::Configuration;
use zeno_ssep::hamiltonian::{HamiltonianSpec, PotentialFamily};
use zeno_ssep::io;

use crate::CliError;

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Number of ring sites N
    #[arg(long, global = true)]
    pub n: Option<String>,
    /// Potential family: zero, constant, cosine, random or file
    #[arg(long, global = true)]
    pub v: Option<String>,
    /// Potential width (random), value (constant) or amplitude (cosine)
    #[arg(long, global = true)]
    pub w: Option<String>,
    /// Cosine wavenumber
    #[arg(long, global = true)]
    pub k: Option<String>,
    /// Potential file: one real per line
    #[arg(long = "potential-file", global = true)]
    pub potential_file: Option<String>,
    /// Interaction strength
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Rescaled time
    #[arg(long, global = true)]
    pub tau: Option<String>,
    /// Measurement interval
    #[arg(long, global = true)]
    pub t: Option<String>,
    /// Total measurement time T
    #[arg(long = "total-time", global = true)]
    pub total_time: Option<String>,
    /// Comma-separated measurement counts
    #[arg(long, global = true)]
    pub m: Option<String>,
    /// Number of sampled trajectories
    #[arg(long, global = true)]
    pub trajectories: Option<String>,
    /// Initial configuration, site 1 leftmost (e.g. 1010)
    #[arg(long, global = true)]
    pub init: Option<String>,
    /// Initial distribution file (config,probability)
    #[arg(long, global = true)]
    pub distribution: Option<String>,
    /// Number of measurement steps
    #[arg(long, global = true)]
    pub steps: Option<String>,
    /// Comma-separated K values for lemma-check
    #[arg(long, global = true)]
    pub ks: Option<String>,
    /// Perturbation decay exponent for lemma-check
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Perturbation scale for lemma-check
    #[arg(long, global = true)]
    pub scale: Option<String>,
    /// Matrix dimension for lemma-check
    #[arg(long, global = true)]
    pub dim: Option<String>,
    /// Number of random potentials for independence
    #[arg(long, global = true)]
    pub specs: Option<String>,
    /// Comma-separated couplings for independence
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambdas: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// key=value config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

pub struct Settings {
    flags: BTreeMap<&'static str, String>,
    file: BTreeMap<String, String>,
}

fn invalid(key: &str, value: &str, reason: impl Display) -> CliError {
    CliError::Validation(format!("--{key} {value:?}: {reason}"))
}

impl Settings {
    pub fn new(flags: Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Validation(format!("--config {}: {e}", path.display())))?;
                io::parse_key_values(&text).map_err(|e| CliError::Validation(format!("--config {}: {e}", path.display())))?
            }
            None => BTreeMap::new(),
        };
        let pairs = [
            ("n", flags.n),
            ("v", flags.v),
            ("w", flags.w),
            ("k", flags.k),
            ("potential-file", flags.potential_file),
            ("lambda", flags.lambda),
            ("seed", flags.seed),
            ("tau", flags.tau),
            ("t", flags.t),
            ("total-time", flags.total_time),
            ("m", flags.m),
            ("trajectories", flags.trajectories),
            ("init", flags.init),
            ("distribution", flags.distribution),
            ("steps", flags.steps),
            ("ks", flags.ks),
            ("alpha", flags.alpha),
            ("scale", flags.scale),
            ("dim", flags.dim),
            ("specs", flags.specs),
            ("lambdas", flags.lambdas),
            ("out", flags.out),
        ];
        if let Some(unknown) = file.keys().find(|k| !pairs.iter().any(|(name, _)| name == k)) {
            return Err(CliError::Validation(format!("--config: unknown key {unknown:?}")));
        }
        let flags = pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
        Ok(Self { flags, file })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.flags.get(key).or_else(|| self.file.get(key)).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        self.raw(key).map(|v| v.trim().parse::<T>().map_err(|e| invalid(key, v, e))).transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| CliError::Validation(format!("--{key} is required")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| v.split(',').map(|item| item.trim().parse::<T>().map_err(|e| invalid(key, v, e))).collect())
            .transpose()
    }

    pub fn positive(&self, key: &str, default: Option<f64>) -> Result<f64, CliError> {
        let value = match default {
            Some(d) => self.get_or(key, d)?,
            None => self.require(key)?,
        };
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(invalid(key, &value.to_string(), "must be positive and finite"))
        }
    }

    pub fn n_sites(&self) -> Result<usize, CliError> {
        let n: usize = self.require("n")?;
        if (1..=zeno_ssep::fock::MAX_SITES).contains(&n) {
            Ok(n)
        } else {
            Err(invalid("n", &n.to_string(), format!("must be in 1..={}", zeno_ssep::fock::MAX_SITES)))
        }
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.get_or("seed", 0)
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.raw("out").unwrap_or("."))
    }

    pub fn init(&self, n_sites: usize) -> Result<Configuration, CliError> {
        let raw = self.raw("init").ok_or_else(|| CliError::Validation("--init is required".into()))?;
        let x: Configuration = raw.trim().parse().map_err(|e| invalid("init", raw, e))?;
        if x.n_sites() != n_sites {
            return Err(invalid("init", raw, format!("has {} sites, expected {n_sites}", x.n_sites())));
        }
        Ok(x)
    }

    pub fn potential(&self, n_sites: usize) -> Result<Vec<f64>, CliError> {
        let family = self.raw("v").unwrap_or(if self.raw("potential-file").is_some() { "file" } else { "zero" });
        let potential = match family {
            "zero" => PotentialFamily::Zero.sample(n_sites),
            "constant" => PotentialFamily::Constant(self.get_or("w", 0.0)?).sample(n_sites),
            "cosine" => PotentialFamily::Cosine { amplitude: self.get_or("w", 1.0)?, wavenumber: self.get_or("k", 1.0)? }
                .sample(n_sites),
            "random" => PotentialFamily::Uniform { width: self.get_or("w", 1.0)?, seed: self.seed()? }.sample(n_sites),
            "file" => {
                let path = self
                    .raw("potential-file")
                    .ok_or_else(|| CliError::Validation("--v file needs --potential-file".into()))?;
                let text = std::fs::read_to_string(path).map_err(|e| invalid("potential-file", path, e))?;
                let values = io::parse_potential(&text).map_err(|e| invalid("potential-file", path, e))?;
                if values.len() != n_sites {
                    return Err(invalid("potential-file", path, format!("has {} values, expected {n_sites}", values.len())));
                }
                Ok(values)
            }
            other => return Err(invalid("v", other, "expected zero, constant, cosine, random or file")),
        };
        potential.map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn spec(&self, n_sites: usize) -> Result<HamiltonianSpec, CliError> {
        let lambda = self.get_or("lambda", 0.0)?;
        HamiltonianSpec::new(self.potential(n_sites)?, lambda).map_err(|e| CliError::Validation(e.to_string()))
    }
}
