//! Periodic-chain Hamiltonian with hopping, on-site potential and
//! nearest-neighbour density interaction:
//!
//! ```text
//! H = sum_n [ h (a_n^* a_{n+1} + a_{n+1}^* a_n) + v(n) a_n^* a_n + lambda a_n^* a_n a_{n+1}^* a_{n+1} ]
//! ```
//!
//! with `a_{N+1} = a_1` and hopping amplitude `h = -1/2` unless overridden.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param, Error, Result};
use crate::fock::{self, BasisOrdering, Configuration, OperatorMatrix};
use crate::measurement::Spectrum;
use crate::ssep::DensityProfile;

pub const DEFAULT_HOPPING: f64 = -0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    n_sites: usize,
    potential: Vec<f64>,
    coupling: f64,
    hopping: f64,
}

impl HamiltonianSpec {
    pub fn new(potential: Vec<f64>, coupling: f64) -> Result<Self> {
        Self::with_hopping(potential, coupling, DEFAULT_HOPPING)
    }

    /// Spec with a non-standard hopping amplitude. Only `-1/2` reproduces the
    /// usual model; other values exist to probe what the emergent generator
    /// depends on.
    pub fn with_hopping(potential: Vec<f64>, coupling: f64, hopping: f64) -> Result<Self> {
        let n_sites = potential.len();
        fock::check_sites(n_sites)?;
        if let Some(bad) = potential.iter().find(|v| !v.is_finite()) {
            return Err(param("potential", format!("entry {bad} is not finite")));
        }
        if !coupling.is_finite() {
            return Err(param("lambda", format!("{coupling} is not finite")));
        }
        if !hopping.is_finite() {
            return Err(param("hopping", format!("{hopping} is not finite")));
        }
        Ok(Self { n_sites, potential, coupling, hopping })
    }

    /// Free hopping only.
    pub fn free(n_sites: usize) -> Result<Self> {
        fock::check_sites(n_sites)?;
        Self::new(vec![0.0; n_sites], 0.0)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }
}

/// Named potential shapes.
#[derive(Clone, Debug, PartialEq)]
pub enum PotentialFamily {
    Zero,
    Constant(f64),
    /// `v(n) = amplitude * cos(2 pi k n / N)`
    Cosine { amplitude: f64, wavenumber: f64 },
    /// Independent uniform entries in `[-width, width]`.
    Uniform { width: f64, seed: u64 },
}

impl PotentialFamily {
    pub fn sample(&self, n_sites: usize) -> Result<Vec<f64>> {
        fock::check_sites(n_sites)?;
        Ok(match *self {
            PotentialFamily::Zero => vec![0.0; n_sites],
            PotentialFamily::Constant(c) => vec![c; n_sites],
            PotentialFamily::Cosine { amplitude, wavenumber } => (1..=n_sites)
                .map(|n| amplitude * (TAU * wavenumber * n as f64 / n_sites as f64).cos())
                .collect(),
            PotentialFamily::Uniform { width, seed } => {
                if !(width >= 0.0 && width.is_finite()) {
                    return Err(param("w", format!("width {width} must be finite and nonnegative")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n_sites).map(|_| rng.random_range(-width..=width)).collect()
            }
        })
    }
}

/// Assembles `H` from the fermionic action on occupation words.
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> OperatorMatrix {
    let n_sites = spec.n_sites;
    let ordering = BasisOrdering::JordanWigner;
    let mut h = nalgebra::DMatrix::<C64>::zeros(fock::dimension(n_sites), fock::dimension(n_sites));
    for col in 0..fock::dimension(n_sites) as u32 {
        let x = Configuration::new(col, n_sites).expect("word within dimension");
        let mut diagonal = 0.0;
        for n in 1..=n_sites {
            let next = x.next_site(n);
            for (to, from) in [(n, next), (next, n)] {
                if let Some((sign, row)) = ordering.hop(col, to, from) {
                    h[(row as usize, col as usize)] += C64::new(spec.hopping * sign, 0.0);
                }
            }
            if x.occupied(n) {
                diagonal += spec.potential[n - 1];
                if x.occupied(next) {
                    diagonal += spec.coupling;
                }
            }
        }
        h[(col as usize, col as usize)] += C64::new(diagonal, 0.0);
    }
    OperatorMatrix::from_matrix(n_sites, h).expect("dimension matches site count")
}

/// Hopping term alone (`v = 0`, `lambda = 0`) with the spec's amplitude.
pub fn hopping_part(spec: &HamiltonianSpec) -> OperatorMatrix {
    let free = HamiltonianSpec { potential: vec![0.0; spec.n_sites], coupling: 0.0, ..spec.clone() };
    build_hamiltonian(&free)
}

/// Site occupations `<x0| e^{itH} A_n^1 e^{-itH} |x0>` along a time grid,
/// without any measurement.
pub fn free_density_evolution(
    spectrum: &Spectrum,
    x0: Configuration,
    times: &[f64],
) -> Result<Vec<DensityProfile>> {
    if x0.n_sites() != spectrum.n_sites() {
        return Err(Error::SiteMismatch { expected: spectrum.n_sites(), got: x0.n_sites() });
    }
    if let Some(bad) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(param("times", format!("{bad} is not a finite nonnegative time")));
    }
    let n_sites = x0.n_sites();
    Ok(times
        .iter()
        .map(|&t| {
            let psi = spectrum.evolve_basis_state(x0, t);
            let mut density = vec![0.0; n_sites];
            for (bits, amp) in psi.iter().enumerate() {
                let weight = amp.norm_sqr();
                for (n, d) in density.iter_mut().enumerate() {
                    if bits >> n & 1 == 1 {
                        *d += weight;
                    }
                }
            }
            DensityProfile::new(density)
        })
        .collect())
}
