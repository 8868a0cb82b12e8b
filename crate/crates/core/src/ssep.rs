//! Classical symmetric exclusion on the ring: exact master equation,
//! continuous-time sampling and density profiles.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::fock::{self, Configuration};
use crate::measurement::Distribution;
use crate::zeno::{GeneratorMatrix, SSEP_RATE};

/// `q_tau = exp(tau X) q0`.
pub fn master_evolve(x: &GeneratorMatrix, q0: &Distribution, tau: f64) -> Result<Distribution> {
    x.spectral()?.evolve(q0, tau)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsepState {
    pub config: Configuration,
    pub clock: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GillespieRun {
    pub state: SsepState,
    /// Exchanges performed across bond `(n, n+1)`, indexed by `n - 1`.
    pub bond_events: Vec<u64>,
}

fn check_ring(x0: Configuration, tau: f64) -> Result<()> {
    if x0.n_sites() < 3 {
        return Err(Error::RingTooSmall("exclusion sampling"));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(param("tau", format!("{tau} must be finite and nonnegative")));
    }
    Ok(())
}

fn run(x0: Configuration, tau: f64, rng: &mut ChaCha8Rng) -> GillespieRun {
    let n_sites = x0.n_sites();
    let mut config = x0;
    let mut clock = 0.0;
    let mut bond_events = vec![0u64; n_sites];
    let mut active = Vec::with_capacity(n_sites);
    loop {
        active.clear();
        active.extend((1..=n_sites).filter(|&n| config.occupied(n) != config.occupied(config.next_site(n))));
        if active.is_empty() {
            break;
        }
        let total_rate = SSEP_RATE * active.len() as f64;
        let wait = -(1.0 - rng.random::<f64>()).ln() / total_rate;
        if clock + wait > tau {
            break;
        }
        clock += wait;
        let bond = active[rng.random_range(0..active.len())];
        config = config.swapped(bond, config.next_site(bond));
        bond_events[bond - 1] += 1;
    }
    GillespieRun { state: SsepState { config, clock: tau }, bond_events }
}

/// Exact continuous-time simulation up to clock `tau` with per-bond event
/// counts.
pub fn gillespie_run(x0: Configuration, tau: f64, seed: u64) -> Result<GillespieRun> {
    check_ring(x0, tau)?;
    Ok(run(x0, tau, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// State at clock `tau` started from `x0`.
pub fn gillespie_sample(x0: Configuration, tau: f64, seed: u64) -> Result<SsepState> {
    Ok(gillespie_run(x0, tau, seed)?.state)
}

/// Final states of `count` independent runs; run `i` uses seed `base_seed + i`.
pub fn gillespie_ensemble(x0: Configuration, tau: f64, count: u64, base_seed: u64) -> Result<Vec<(u64, SsepState)>> {
    check_ring(x0, tau)?;
    Ok((0..count)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            (seed, run(x0, tau, &mut ChaCha8Rng::seed_from_u64(seed)).state)
        })
        .collect())
}

/// Empirical law of the final configurations.
pub fn empirical_distribution(n_sites: usize, states: &[(u64, SsepState)]) -> Result<Distribution> {
    fock::check_sites(n_sites)?;
    if states.is_empty() {
        return Err(param("samples", "no samples"));
    }
    let mut probabilities = vec![0.0; fock::dimension(n_sites)];
    let weight = 1.0 / states.len() as f64;
    for (_, s) in states {
        if s.config.n_sites() != n_sites {
            return Err(Error::SiteMismatch { expected: n_sites, got: s.config.n_sites() });
        }
        probabilities[s.config.index()] += weight;
    }
    let total: f64 = probabilities.iter().sum();
    probabilities.iter_mut().for_each(|p| *p /= total);
    Distribution::new(n_sites, probabilities)
}

/// Site occupation probabilities `rho_1, ..., rho_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityProfile {
    values: Vec<f64>,
}

impl DensityProfile {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn from_configuration(x: Configuration) -> Self {
        Self::new((1..=x.n_sites()).map(|n| if x.occupied(n) { 1.0 } else { 0.0 }).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_sites(&self) -> usize {
        self.values.len()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_deviation(&self, other: &DensityProfile) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Variance of the normalized profile in the displacement from `center`
    /// (1-based), taking the shortest way round the ring, ties broken toward
    /// positive displacements.
    pub fn spatial_variance(&self, center: usize) -> f64 {
        let n = self.values.len() as i64;
        let total = self.total();
        let mut mean = 0.0;
        let mut second = 0.0;
        for (i, rho) in self.values.iter().enumerate() {
            let mut d = (i as i64 + 1 - center as i64).rem_euclid(n);
            if 2 * d > n {
                d -= n;
            }
            let w = rho / total;
            mean += w * d as f64;
            second += w * (d * d) as f64;
        }
        second - mean * mean
    }
}

/// `rho_n = sum_x q(x) x_n`.
pub fn density_profile(q: &Distribution) -> DensityProfile {
    let n_sites = q.n_sites();
    let mut values = vec![0.0; n_sites];
    for (b, p) in q.probabilities().iter().enumerate() {
        for (n, v) in values.iter_mut().enumerate() {
            if b >> n & 1 == 1 {
                *v += p;
            }
        }
    }
    DensityProfile::new(values)
}

/// Solution of the lattice heat equation
/// `d/dtau rho_n = (rho_{n+1} + rho_{n-1} - 2 rho_n) / 4` on the ring, by
/// Fourier modes of the circulant Laplacian.
pub fn heat_equation_reference(rho0: &DensityProfile, tau: f64) -> Result<DensityProfile> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(param("tau", format!("{tau} must be finite and nonnegative")));
    }
    let n = rho0.n_sites();
    if n == 0 {
        return Err(param("profile", "empty density profile"));
    }
    let angle = |k: usize, j: usize| TAU * (k * j) as f64 / n as f64;
    let values = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let decay = (-SSEP_RATE * tau * 2.0 * (1.0 - (TAU * k as f64 / n as f64).cos())).exp();
                    let (re, im) = rho0
                        .values
                        .iter()
                        .enumerate()
                        .fold((0.0, 0.0), |(re, im), (m, r)| (re + r * angle(k, m).cos(), im - r * angle(k, m).sin()));
                    decay * (re * angle(k, j).cos() - im * angle(k, j).sin())
                })
                .sum::<f64>()
                / n as f64
        })
        .collect();
    Ok(DensityProfile::new(values))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_power_law_exponent(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(param("fit", "need at least two paired points"));
    }
    if xs.iter().chain(ys).any(|&v| v.is_nan() || v <= 0.0) {
        return Err(param("fit", "power-law fit needs positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(cov / var)
}
