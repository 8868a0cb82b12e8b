//! The emergent classical generator and the long-time measurement limit.
//!
//! Measuring every `t = 1/M` up to `T = tau M` gives `floor(tau M^2)` steps of
//! `U_{1/M} = I + X/M^2 + O(M^-3)`, and the product converges to
//! `exp(tau X)`, where
//!
//! ```text
//! X_{xy} = -1/2 <y| [H, [H, P_x]] |y>
//! ```
//!
//! For the ring Hamiltonian `X` is the symmetric exclusion generator with rate
//! `1/4` per active bond, whatever the potential and interaction.

use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::fock::{self, Configuration, OperatorMatrix};
use crate::hamiltonian::{build_hamiltonian, HamiltonianSpec};
use crate::measurement::{matrix_power, transition_matrix, Distribution, Spectrum};

/// Exchange rate of a single active bond in the emergent process.
pub const SSEP_RATE: f64 = 0.25;

/// Real `2^N x 2^N` generator; `d/dtau q = X q` preserves probability.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMatrix {
    n_sites: usize,
    matrix: DMatrix<f64>,
}

impl GeneratorMatrix {
    pub fn from_matrix(n_sites: usize, matrix: DMatrix<f64>) -> Result<Self> {
        fock::check_sites(n_sites)?;
        let dim = fock::dimension(n_sites);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(param("generator", format!("expected {dim}x{dim} matrix")));
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Rate of `from -> to` (`from != to`), or the diagonal when equal.
    pub fn rate(&self, to: Configuration, from: Configuration) -> f64 {
        self.matrix[(to.index(), from.index())]
    }

    pub fn max_column_sum(&self) -> f64 {
        self.matrix.column_iter().map(|c| c.sum().abs()).fold(0.0, f64::max)
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    /// Most negative off-diagonal entry, or zero.
    pub fn min_off_diagonal(&self) -> f64 {
        let dim = self.matrix.nrows();
        (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .filter(|(r, c)| r != c)
            .map(|(r, c)| self.matrix[(r, c)])
            .fold(0.0, f64::min)
    }

    /// Largest entry linking two configurations that are not one adjacent
    /// exchange apart.
    pub fn max_non_adjacent_entry(&self) -> f64 {
        let n_sites = self.n_sites;
        let mut worst = 0.0f64;
        for from in Configuration::all(n_sites).expect("valid site count") {
            let neighbours: Vec<_> =
                (1..=n_sites).map(|n| from.swapped(n, from.next_site(n)).index()).collect();
            for to in 0..self.matrix.nrows() {
                if to != from.index() && !neighbours.contains(&to) {
                    worst = worst.max(self.matrix[(to, from.index())].abs());
                }
            }
        }
        worst
    }

    /// `X^T f`: the generator acting on observables `f(x)`.
    pub fn act_on_observable(&self, f: &DVector<f64>) -> DVector<f64> {
        self.matrix.transpose() * f
    }

    /// Eigendecomposition of the symmetrized generator, reusable across times.
    pub fn spectral(&self) -> Result<GeneratorSpectrum> {
        let symmetric = (&self.matrix + self.matrix.transpose()) * 0.5;
        let eigen = SymmetricEigen::try_new(symmetric, f64::EPSILON, 0).ok_or(Error::Eigendecomposition)?;
        Ok(GeneratorSpectrum { n_sites: self.n_sites, rates: eigen.eigenvalues, modes: eigen.eigenvectors })
    }

    pub fn max_deviation(&self, other: &GeneratorMatrix) -> Result<f64> {
        if self.n_sites != other.n_sites {
            return Err(Error::SiteMismatch { expected: self.n_sites, got: other.n_sites });
        }
        Ok((&self.matrix - &other.matrix).amax())
    }

    /// Nonzero entries as `(from, to, rate)`, column-major.
    pub fn triplets(&self) -> Vec<(Configuration, Configuration, f64)> {
        let n_sites = self.n_sites;
        let dim = self.matrix.nrows();
        let config = |i: usize| Configuration::new(i as u32, n_sites).expect("index in range");
        (0..dim)
            .flat_map(|from| (0..dim).map(move |to| (from, to)))
            .filter(|&(from, to)| self.matrix[(to, from)] != 0.0)
            .map(|(from, to)| (config(from), config(to), self.matrix[(to, from)]))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct GeneratorSpectrum {
    n_sites: usize,
    rates: DVector<f64>,
    modes: DMatrix<f64>,
}

impl GeneratorSpectrum {
    /// `exp(tau X)`
    pub fn exp(&self, tau: f64) -> DMatrix<f64> {
        let mut scaled = self.modes.clone();
        for (mut col, rate) in scaled.column_iter_mut().zip(self.rates.iter()) {
            col *= (rate * tau).exp();
        }
        scaled * self.modes.transpose()
    }

    /// `exp(tau X) q0`
    pub fn evolve(&self, q0: &Distribution, tau: f64) -> Result<Distribution> {
        if q0.n_sites() != self.n_sites {
            return Err(Error::SiteMismatch { expected: self.n_sites, got: q0.n_sites() });
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(param("tau", format!("{tau} must be finite and nonnegative")));
        }
        let mut coefficients = self.modes.transpose() * q0.probabilities();
        for (c, rate) in coefficients.iter_mut().zip(self.rates.iter()) {
            *c *= (rate * tau).exp();
        }
        Distribution::from_computed(self.n_sites, &self.modes * coefficients)
    }
}

/// `X_{xy} = -1/2 Tr(P_y [H, [H, P_x]])`.
///
/// With `P_x = |x><x|` the commutator `[H, P_x]` lives on row and column `x`
/// only, and the trace against `P_y` contracts to
/// `H_{yx} H_{xy} - delta_{xy} (H^2)_{xx}`; no `2^N`-cubed products are needed.
pub fn generator_from_double_commutator(h: &OperatorMatrix) -> Result<GeneratorMatrix> {
    let scale = h.max_abs().max(1.0);
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian(defect));
    }
    let m = h.matrix();
    let dim = h.dim();
    let mut x = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut h_squared_diagonal = 0.0;
        for row in 0..dim {
            let forward = m[(row, col)];
            let backward = m[(col, row)];
            let product = (forward * backward).re;
            h_squared_diagonal += product;
            x[(row, col)] = product;
        }
        x[(col, col)] -= h_squared_diagonal;
    }
    GeneratorMatrix::from_matrix(h.n_sites(), x)
}

/// Symmetric exclusion generator on the `N`-ring: each bond holding exactly one
/// particle exchanges its two values at rate `1/4`.
pub fn ssep_generator_closed_form(n_sites: usize) -> Result<GeneratorMatrix> {
    fock::check_sites(n_sites)?;
    if n_sites < 3 {
        return Err(Error::RingTooSmall("the exclusion generator"));
    }
    let dim = fock::dimension(n_sites);
    let mut x = DMatrix::zeros(dim, dim);
    for from in Configuration::all(n_sites)? {
        for n in 1..=n_sites {
            let next = from.next_site(n);
            if from.occupied(n) != from.occupied(next) {
                let to = from.swapped(n, next);
                x[(to.index(), from.index())] += SSEP_RATE;
                x[(from.index(), from.index())] -= SSEP_RATE;
            }
        }
    }
    GeneratorMatrix::from_matrix(n_sites, x)
}

/// Largest entrywise difference between the emergent generators of any two
/// specs. All specs must share one ring of at least three sites.
pub fn verify_potential_independence(specs: &[HamiltonianSpec]) -> Result<f64> {
    let Some(first) = specs.first() else {
        return Err(param("specs", "at least one Hamiltonian is required"));
    };
    let n_sites = first.n_sites();
    if n_sites < 3 {
        return Err(Error::RingTooSmall("potential independence"));
    }
    if let Some(other) = specs.iter().find(|s| s.n_sites() != n_sites) {
        return Err(Error::SiteMismatch { expected: n_sites, got: other.n_sites() });
    }
    let generators = specs
        .par_iter()
        .map(|s| generator_from_double_commutator(&build_hamiltonian(s)))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i + 1..] {
            worst = worst.max(a.max_deviation(b)?);
        }
    }
    Ok(worst)
}

/// `|Y_K| = scale * K^-exponent` in operator norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationSchedule {
    pub scale: f64,
    pub exponent: f64,
    pub seed: u64,
}

impl PerturbationSchedule {
    pub fn new(scale: f64, exponent: f64, seed: u64) -> Result<Self> {
        if exponent <= 1.0 || !exponent.is_finite() {
            return Err(Error::PerturbationExponent(exponent));
        }
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(param("c", format!("perturbation scale {scale} must be nonnegative")));
        }
        Ok(Self { scale, exponent, seed })
    }

    /// Seeded uniform entries in `[-1, 1]`, rescaled to the exact norm.
    pub fn perturbation(&self, dim: usize, k: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k);
        let raw = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..=1.0));
        let norm = operator_norm(&raw);
        let target = self.scale * (k as f64).powf(-self.exponent);
        if norm == 0.0 {
            raw
        } else {
            raw * (target / norm)
        }
    }
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `|(I + X/K + Y_K)^K - exp(X)|` in operator norm for each `K`, in the given
/// order. `schedule = None` sets `Y_K = 0`.
pub fn semigroup_limit_check(
    x: &DMatrix<f64>,
    schedule: Option<PerturbationSchedule>,
    ks: &[u64],
) -> Result<Vec<(u64, f64)>> {
    if !x.is_square() || x.nrows() == 0 {
        return Err(param("X", "generator must be a nonempty square matrix"));
    }
    if let Some(&bad) = ks.iter().find(|&&k| k == 0) {
        return Err(param("k", format!("K = {bad} must be positive")));
    }
    let dim = x.nrows();
    let limit = x.clone().exp();
    Ok(ks
        .par_iter()
        .map(|&k| {
            let mut step = DMatrix::identity(dim, dim) + x / k as f64;
            if let Some(schedule) = schedule {
                step += schedule.perturbation(dim, k);
            }
            (k, operator_norm(&(matrix_power(&step, k) - &limit)))
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergencePoint {
    pub m: u64,
    /// Number of measurement steps `floor(tau M^2)`.
    pub steps: u64,
    pub distance: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub tau: f64,
    pub n_sites: usize,
    pub summary: String,
    pub points: Vec<ConvergencePoint>,
}

/// Total variation between the measured distribution at `t = 1/M`,
/// `T = tau M`, and the limit `exp(tau X) q0`, for each `M`.
///
/// The measured side is `(U_{1/M})^{[tau M^2] - 1} (U_{1/M} q0)`; the trailing
/// fractional step `U_s` tends to the identity and is left out.
pub fn zeno_scan(h: &OperatorMatrix, tau: f64, q0: &Distribution, ms: &[u64]) -> Result<ConvergenceReport> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(param("tau", format!("{tau} must be positive")));
    }
    if q0.n_sites() != h.n_sites() {
        return Err(Error::SiteMismatch { expected: h.n_sites(), got: q0.n_sites() });
    }
    if ms.is_empty() || ms.contains(&0) || ms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(param("m", "measurement counts must be positive and strictly increasing"));
    }
    let spectrum = Spectrum::new(h)?;
    let limit = generator_from_double_commutator(h)?.spectral()?.evolve(q0, tau)?;
    let points = ms
        .par_iter()
        .map(|&m| {
            let start = Instant::now();
            let steps = (tau * (m * m) as f64).floor() as u64;
            let u = transition_matrix(&spectrum, 1.0 / m as f64);
            let measured = Distribution::from_computed(q0.n_sites(), u.power(steps) * q0.probabilities())?;
            let distance = measured.total_variation(&limit)?;
            Ok(ConvergencePoint { m, steps, distance, seconds: start.elapsed().as_secs_f64() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        tau,
        n_sites: h.n_sites(),
        summary: format!("N={} tau={tau}", h.n_sites()),
        points,
    })
}

/// `max |(U_t - I)/t^2 - X|` for each `t`.
pub fn finite_difference_generator(spectrum: &Spectrum, x: &GeneratorMatrix, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(&bad) = ts.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(param("t", format!("{bad} must be positive")));
    }
    if x.n_sites() != spectrum.n_sites() {
        return Err(Error::SiteMismatch { expected: spectrum.n_sites(), got: x.n_sites() });
    }
    let dim = fock::dimension(x.n_sites());
    Ok(ts
        .iter()
        .map(|&t| {
            let u = transition_matrix(spectrum, t);
            let quotient = (u.matrix() - DMatrix::<f64>::identity(dim, dim)) / (t * t);
            (t, (quotient - x.matrix()).amax())
        })
        .collect())
}
