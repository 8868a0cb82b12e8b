//! Unitary evolution interleaved with configuration measurements.
//!
//! One evolve-then-measure step of length `t` moves outcome `y` to outcome `x`
//! with probability `|<x|e^{-itH}|y>|^2`; these numbers form the doubly
//! stochastic transition matrix `U_t`, columns indexed by the previous outcome.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::fock::{self, Configuration, OperatorMatrix};

/// Tolerance on sums and negative entries of a probability vector.
pub const DISTRIBUTION_SUM_TOL: f64 = 1e-12;
pub const NEGATIVE_ENTRY_TOL: f64 = 1e-14;
/// Normalization drift accepted (and removed) in computed distributions;
/// thousands of chained stochastic products drift past `1e-12`.
pub const COMPUTED_SUM_TOL: f64 = 1e-9;

/// Eigendecomposition `H = V diag(E) V^*` of a Hermitian operator, reused for
/// every evolution time.
#[derive(Clone, Debug)]
pub struct Spectrum {
    n_sites: usize,
    energies: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        let scale = h.max_abs().max(1.0);
        let defect = h.hermiticity_defect();
        if defect > 1e-12 * scale {
            return Err(Error::NotHermitian(defect));
        }
        // symmetrize so round-off in the input cannot leak into the solver
        let m = h.matrix();
        let hermitian = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eigen = SymmetricEigen::try_new(hermitian, f64::EPSILON, 0).ok_or(Error::Eigendecomposition)?;
        Ok(Self { n_sites: h.n_sites(), energies: eigen.eigenvalues, vectors: eigen.eigenvectors })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn propagator(&self, time: f64) -> Propagator {
        if time == 0.0 {
            let unitary = OperatorMatrix::identity(self.n_sites).expect("valid site count");
            return Propagator { time, unitary };
        }
        let phases = self.energies.map(|e| C64::from_polar(1.0, -e * time));
        let mut scaled = self.vectors.clone();
        for (mut col, phase) in scaled.column_iter_mut().zip(phases.iter()) {
            col *= *phase;
        }
        let unitary = scaled * self.vectors.adjoint();
        Propagator {
            time,
            unitary: OperatorMatrix::from_matrix(self.n_sites, unitary).expect("dimension preserved"),
        }
    }

    /// `e^{-itH} psi`
    pub fn evolve(&self, psi: &DVector<C64>, time: f64) -> DVector<C64> {
        let mut coefficients = self.vectors.adjoint() * psi;
        for (c, e) in coefficients.iter_mut().zip(self.energies.iter()) {
            *c *= C64::from_polar(1.0, -e * time);
        }
        &self.vectors * coefficients
    }

    /// `e^{-itH} |x>`
    pub fn evolve_basis_state(&self, x: Configuration, time: f64) -> DVector<C64> {
        let mut psi = DVector::zeros(fock::dimension(self.n_sites));
        psi[x.index()] = C64::new(1.0, 0.0);
        self.evolve(&psi, time)
    }

    /// `<x|e^{-itH}|x>`
    pub fn return_amplitude(&self, x: Configuration, time: f64) -> C64 {
        let row = self.vectors.row(x.index());
        row.iter()
            .zip(self.energies.iter())
            .map(|(v, e)| v.norm_sqr() * C64::from_polar(1.0, -e * time))
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct Propagator {
    time: f64,
    unitary: OperatorMatrix,
}

impl Propagator {
    pub fn time(&self) -> f64 {
        self.time
    }

    /// `e^{-itH}`
    pub fn unitary(&self) -> &OperatorMatrix {
        &self.unitary
    }

    /// `max |U^* U - I|`
    pub fn unitarity_defect(&self) -> f64 {
        let u = self.unitary.matrix();
        let dim = u.nrows();
        (u.adjoint() * u - DMatrix::<C64>::identity(dim, dim)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `U_t` with entry `(x, y) = |<x|e^{-itH}|y>|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    n_sites: usize,
    time: f64,
    matrix: DMatrix<f64>,
}

impl TransitionMatrix {
    pub fn from_propagator(propagator: &Propagator) -> Self {
        let unitary = propagator.unitary();
        Self {
            n_sites: unitary.n_sites(),
            time: propagator.time,
            matrix: unitary.matrix().map(|z| z.norm_sqr()),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Transition probability from outcome `from` to outcome `to`.
    pub fn probability(&self, to: Configuration, from: Configuration) -> f64 {
        self.matrix[(to.index(), from.index())]
    }

    /// Largest deviation of any row or column sum from one.
    pub fn stochasticity_defect(&self) -> f64 {
        let rows = self.matrix.row_iter().map(|r| (r.sum() - 1.0).abs());
        let cols = self.matrix.column_iter().map(|c| (c.sum() - 1.0).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    /// `U_t q`
    pub fn apply(&self, q: &Distribution) -> Result<Distribution> {
        check_same_sites(self.n_sites, q.n_sites())?;
        Distribution::from_computed(self.n_sites, &self.matrix * q.probabilities())
    }

    /// `U_t^k` by repeated squaring.
    pub fn power(&self, k: u64) -> DMatrix<f64> {
        matrix_power(&self.matrix, k)
    }
}

fn check_same_sites(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::SiteMismatch { expected, got })
    }
}

/// `m^k` by binary exponentiation.
pub fn matrix_power(m: &DMatrix<f64>, mut k: u64) -> DMatrix<f64> {
    let dim = m.nrows();
    let mut result = DMatrix::identity(dim, dim);
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `U_t` for the Hamiltonian behind `spectrum`.
pub fn transition_matrix(spectrum: &Spectrum, time: f64) -> TransitionMatrix {
    TransitionMatrix::from_propagator(&spectrum.propagator(time))
}

/// Probability vector over the `2^N` configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    n_sites: usize,
    probabilities: DVector<f64>,
}

impl Distribution {
    /// Validates nonnegativity and normalization; entries in
    /// `[-1e-14, 0)` are clamped to zero.
    pub fn new(n_sites: usize, probabilities: Vec<f64>) -> Result<Self> {
        Self::checked(n_sites, DVector::from_vec(probabilities), DISTRIBUTION_SUM_TOL)
    }

    /// Result of a numerical evolution: normalization drift up to
    /// [`COMPUTED_SUM_TOL`] is divided out.
    pub(crate) fn from_computed(n_sites: usize, probabilities: DVector<f64>) -> Result<Self> {
        let mut q = Self::checked(n_sites, probabilities, COMPUTED_SUM_TOL)?;
        let total = q.probabilities.sum();
        q.probabilities /= total;
        Ok(q)
    }

    fn checked(n_sites: usize, mut probabilities: DVector<f64>, sum_tol: f64) -> Result<Self> {
        fock::check_sites(n_sites)?;
        let dim = fock::dimension(n_sites);
        if probabilities.len() != dim {
            return Err(Error::Distribution(format!("expected {dim} entries, got {}", probabilities.len())));
        }
        for p in probabilities.iter_mut() {
            if !p.is_finite() || *p < -NEGATIVE_ENTRY_TOL {
                return Err(Error::Distribution(format!("entry {p} is not a probability")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total = probabilities.sum();
        if (total - 1.0).abs() > sum_tol {
            return Err(Error::Distribution(format!("entries sum to {total}")));
        }
        Ok(Self { n_sites, probabilities })
    }

    pub fn point(x: Configuration) -> Self {
        let mut probabilities = DVector::zeros(fock::dimension(x.n_sites()));
        probabilities[x.index()] = 1.0;
        Self { n_sites: x.n_sites(), probabilities }
    }

    pub fn uniform(n_sites: usize) -> Result<Self> {
        fock::check_sites(n_sites)?;
        let dim = fock::dimension(n_sites);
        Ok(Self { n_sites, probabilities: DVector::from_element(dim, 1.0 / dim as f64) })
    }

    /// Uniform over configurations holding `particles` particles.
    pub fn uniform_sector(n_sites: usize, particles: u32) -> Result<Self> {
        fock::check_sites(n_sites)?;
        if particles as usize > n_sites {
            return Err(param("particles", format!("{particles} exceeds {n_sites} sites")));
        }
        let dim = fock::dimension(n_sites);
        let members = (0..dim).filter(|b| b.count_ones() == particles).count();
        let probabilities = DVector::from_fn(dim, |b, _| {
            if b.count_ones() == particles {
                1.0 / members as f64
            } else {
                0.0
            }
        });
        Ok(Self { n_sites, probabilities })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn probabilities(&self) -> &DVector<f64> {
        &self.probabilities
    }

    pub fn probability(&self, x: Configuration) -> f64 {
        self.probabilities[x.index()]
    }

    /// `(configuration, probability)` in basis order.
    pub fn iter(&self) -> impl Iterator<Item = (Configuration, f64)> + '_ {
        let n_sites = self.n_sites;
        self.probabilities
            .iter()
            .enumerate()
            .map(move |(b, &p)| (Configuration::new(b as u32, n_sites).expect("index in range"), p))
    }

    /// Probability mass of each particle-number sector, indexed by count.
    pub fn sector_masses(&self) -> Vec<f64> {
        let mut masses = vec![0.0; self.n_sites + 1];
        for (b, p) in self.probabilities.iter().enumerate() {
            masses[b.count_ones() as usize] += p;
        }
        masses
    }

    /// `(1/2) sum |p - q|`
    pub fn total_variation(&self, other: &Distribution) -> Result<f64> {
        check_same_sites(self.n_sites, other.n_sites)?;
        Ok(0.5 * (&self.probabilities - &other.probabilities).abs().sum())
    }
}

/// `L = floor(T/t)`, `s = T - L t`, guarding against `T/t` landing just below
/// an integer through round-off.
fn split_total_time(interval: f64, total: f64) -> (u64, f64) {
    let ratio = total / interval;
    let mut steps = ratio.floor();
    if (ratio - ratio.round()).abs() < 1e-12 * ratio.max(1.0) {
        steps = ratio.round();
    }
    let remainder = (total - steps * interval).max(0.0);
    (steps as u64, remainder)
}

/// Outcome distribution of the configuration measurement at time `T`, with
/// measurements every `t` starting from the configuration-diagonal state
/// `sum_x q0(x) |x><x|`:
///
/// `p_T^t = U_s (U_t)^{L-1} p_0^t`, `p_0^t = U_t q0`, `T = L t + s`.
///
/// For `T < t` this is a single evolution for `T` followed by one measurement.
pub fn repeated_measurement_distribution(
    spectrum: &Spectrum,
    interval: f64,
    total_time: f64,
    q0: &Distribution,
) -> Result<Distribution> {
    if !(interval > 0.0 && interval.is_finite()) {
        return Err(param("t", format!("measurement interval {interval} must be positive")));
    }
    if !(total_time >= 0.0 && total_time.is_finite()) {
        return Err(param("T", format!("total time {total_time} must be nonnegative")));
    }
    check_same_sites(spectrum.n_sites(), q0.n_sites())?;
    let (steps, remainder) = split_total_time(interval, total_time);
    let step = transition_matrix(spectrum, interval);
    let after_steps = &step.power(steps) * q0.probabilities();
    let tail = transition_matrix(spectrum, remainder);
    Distribution::from_computed(q0.n_sites(), tail.matrix() * after_steps)
}

/// First-outcome law `|<x|e^{-itH}|psi>|^2` for a pure initial state.
pub fn first_outcome_from_pure_state(spectrum: &Spectrum, interval: f64, psi: &DVector<C64>) -> Result<Distribution> {
    let dim = fock::dimension(spectrum.n_sites());
    if psi.len() != dim {
        return Err(param("psi", format!("expected {dim} amplitudes, got {}", psi.len())));
    }
    let norm = psi.norm();
    if !(norm - 1.0).abs().lt(&1e-10) {
        return Err(param("psi", format!("state norm {norm} is not 1")));
    }
    let evolved = spectrum.evolve(psi, interval);
    Distribution::from_computed(spectrum.n_sites(), evolved.map(|z| z.norm_sqr()))
}

/// `p_T^t` for a pure initial state: `U_s (U_t)^{L-1} p_0^t`.
pub fn repeated_measurement_from_pure_state(
    spectrum: &Spectrum,
    interval: f64,
    total_time: f64,
    psi: &DVector<C64>,
) -> Result<Distribution> {
    if !(interval > 0.0 && interval.is_finite()) {
        return Err(param("t", format!("measurement interval {interval} must be positive")));
    }
    if !(total_time >= 0.0 && total_time.is_finite()) {
        return Err(param("T", format!("total time {total_time} must be nonnegative")));
    }
    let (steps, remainder) = split_total_time(interval, total_time);
    if steps == 0 {
        return first_outcome_from_pure_state(spectrum, remainder, psi);
    }
    let first = first_outcome_from_pure_state(spectrum, interval, psi)?;
    let step = transition_matrix(spectrum, interval);
    let interior = &step.power(steps - 1) * first.probabilities();
    let tail = transition_matrix(spectrum, remainder);
    Distribution::from_computed(spectrum.n_sites(), tail.matrix() * interior)
}

/// Realized outcome sequence of repeated configuration measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub seed: u64,
    pub interval: f64,
    pub initial: Configuration,
    /// Outcomes `x_1, ..., x_L`.
    pub outcomes: Vec<Configuration>,
}

impl MeasurementRecord {
    pub fn last(&self) -> Configuration {
        self.outcomes.last().copied().unwrap_or(self.initial)
    }
}

/// Per-column samplers for `U_t`.
///
/// Round-off negatives are clamped and each column renormalized before it
/// becomes a sampling law.
pub struct TrajectorySampler<'a> {
    transition: &'a TransitionMatrix,
    columns: Vec<Option<WeightedIndex<f64>>>,
}

impl<'a> TrajectorySampler<'a> {
    pub fn new(transition: &'a TransitionMatrix) -> Self {
        let dim = transition.matrix.ncols();
        Self { transition, columns: (0..dim).map(|_| None).collect() }
    }

    fn column(&mut self, from: usize) -> &WeightedIndex<f64> {
        let matrix = &self.transition.matrix;
        self.columns[from].get_or_insert_with(|| {
            let weights: Vec<f64> = matrix.column(from).iter().map(|p| p.max(0.0)).collect();
            WeightedIndex::new(weights).expect("stochastic column has positive mass")
        })
    }

    fn step(&mut self, from: Configuration, rng: &mut ChaCha8Rng) -> Configuration {
        let n_sites = self.transition.n_sites;
        let to = self.column(from.index()).sample(rng);
        Configuration::new(to as u32, n_sites).expect("index in range")
    }

    pub fn sample(&mut self, steps: usize, x0: Configuration, seed: u64) -> MeasurementRecord {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut current = x0;
        let outcomes = (0..steps)
            .map(|_| {
                current = self.step(current, &mut rng);
                current
            })
            .collect();
        MeasurementRecord { seed, interval: self.transition.time, initial: x0, outcomes }
    }
}

/// One measurement trajectory of `steps` outcomes, reproducible from `seed`.
pub fn sample_trajectory(
    transition: &TransitionMatrix,
    steps: usize,
    x0: Configuration,
    seed: u64,
) -> Result<MeasurementRecord> {
    check_same_sites(transition.n_sites, x0.n_sites())?;
    Ok(TrajectorySampler::new(transition).sample(steps, x0, seed))
}

/// Histogram of the final outcome over `count` trajectories. Trajectory `i`
/// uses seed `base_seed + i`, so the result does not depend on the thread
/// count.
pub fn final_outcome_counts(
    transition: &TransitionMatrix,
    steps: usize,
    x0: Configuration,
    count: u64,
    base_seed: u64,
) -> Result<Vec<u64>> {
    check_same_sites(transition.n_sites, x0.n_sites())?;
    let dim = transition.matrix.ncols();
    Ok((0..count)
        .into_par_iter()
        .fold(
            || (TrajectorySampler::new(transition), vec![0u64; dim]),
            |(mut sampler, mut counts), i| {
                let record = sampler.sample(steps, x0, base_seed.wrapping_add(i));
                counts[record.last().index()] += 1;
                (sampler, counts)
            },
        )
        .map(|(_, counts)| counts)
        .reduce(
            || vec![0u64; dim],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        ))
}

/// Probability that `M` equally spaced configuration measurements over `[0, T]`
/// all return `x0`: `(U_{T/M})_{x0,x0}^M`.
pub fn zeno_survival(spectrum: &Spectrum, total_time: f64, measurements: u64, x0: Configuration) -> Result<f64> {
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(param("T", format!("total time {total_time} must be positive")));
    }
    if measurements == 0 {
        return Err(param("m", "at least one measurement is required"));
    }
    check_same_sites(spectrum.n_sites(), x0.n_sites())?;
    let stay = spectrum.return_amplitude(x0, total_time / measurements as f64).norm_sqr().min(1.0);
    Ok(stay.powf(measurements as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hamiltonian, hopping_part, HamiltonianSpec, PotentialFamily};

    fn spectrum_for(n_sites: usize, width: f64, coupling: f64, seed: u64) -> Spectrum {
        let v = PotentialFamily::Uniform { width, seed }.sample(n_sites).unwrap();
        Spectrum::new(&build_hamiltonian(&HamiltonianSpec::new(v, coupling).unwrap())).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn propagator_identity_and_group_law() {
        let spectrum = spectrum_for(4, 2.0, 0.8, 5);
        let id = OperatorMatrix::identity(4).unwrap();
        assert!((spectrum.propagator(0.0).unitary() - &id).max_abs() < 1e-12);
        let (t, s) = (0.37, 1.21);
        let product = spectrum.propagator(t).unitary() * spectrum.propagator(s).unitary();
        assert!((&product - spectrum.propagator(t + s).unitary()).max_abs() < 1e-11);
        assert!(spectrum.propagator(3.3).unitarity_defect() < 1e-11);
    }

    #[test]
    fn two_site_propagator_is_analytic() {
        let spectrum = Spectrum::new(&build_hamiltonian(&HamiltonianSpec::free(2).unwrap())).unwrap();
        let t = 0.7;
        let u = spectrum.propagator(t);
        let (a, b) = (0b01, 0b10);
        assert!((u.unitary().get(a, a) - C64::new(t.cos(), 0.0)).norm() < 1e-13);
        assert!((u.unitary().get(a, b) - C64::new(0.0, t.sin())).norm() < 1e-13);
        let transition = TransitionMatrix::from_propagator(&u);
        assert!(close(transition.matrix()[(a, b)], t.sin().powi(2), 1e-13));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 1)] = C64::new(1.0, 0.0);
        let op = OperatorMatrix::from_matrix(2, m).unwrap();
        assert!(matches!(Spectrum::new(&op), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn transition_matrix_is_doubly_stochastic() {
        let spectrum = spectrum_for(6, 3.0, 0.7, 17);
        assert_eq!(transition_matrix(&spectrum, 0.0).stochasticity_defect(), 0.0);
        for t in [0.01, 0.1, 0.3, 1.0] {
            let u = transition_matrix(&spectrum, t);
            assert!(u.stochasticity_defect() < 1e-12, "t={t}");
            assert!(u.matrix().iter().all(|&p| (0.0..=1.0 + 1e-12).contains(&p)));
            for (r, c) in (0..64).flat_map(|r| (0..64).map(move |c| (r, c))) {
                if (r as u32).count_ones() != (c as u32).count_ones() {
                    assert!(u.matrix()[(r, c)] < 1e-24);
                }
            }
        }
    }

    #[test]
    fn measurement_distribution_degenerate_cases() {
        let spectrum = spectrum_for(4, 1.0, 0.5, 2);
        let x0: Configuration = "1100".parse().unwrap();
        let q0 = Distribution::point(x0);
        let single = repeated_measurement_distribution(&spectrum, 0.5, 0.2, &q0).unwrap();
        let direct = transition_matrix(&spectrum, 0.2).apply(&q0).unwrap();
        assert!(single.total_variation(&direct).unwrap() < 1e-14);

        let uniform = Distribution::uniform(4).unwrap();
        let out = repeated_measurement_distribution(&spectrum, 0.13, 3.7, &uniform).unwrap();
        assert!(out.total_variation(&uniform).unwrap() < 1e-13);

        assert!(repeated_measurement_distribution(&spectrum, 0.0, 1.0, &q0).is_err());
        assert!(repeated_measurement_distribution(&spectrum, 0.1, -1.0, &q0).is_err());
    }

    /// Sum over every intermediate outcome chain of the step probabilities,
    /// restricted to the particle-number sector of `start`.
    fn chain_sum(u: &DMatrix<f64>, steps: usize, start: usize, target: usize) -> f64 {
        if steps == 0 {
            return if start == target { 1.0 } else { 0.0 };
        }
        (0..u.nrows())
            .filter(|&mid| mid.count_ones() == start.count_ones())
            .map(|mid| u[(mid, start)] * chain_sum(u, steps - 1, mid, target))
            .sum()
    }

    #[test]
    fn measurement_distribution_matches_outcome_chain() {
        let spectrum = spectrum_for(4, 2.0, 0.9, 3);
        let x0: Configuration = "1000".parse().unwrap();
        let (t, total) = (0.25, 2.0);
        let p = repeated_measurement_distribution(&spectrum, t, total, &Distribution::point(x0)).unwrap();
        let u = transition_matrix(&spectrum, t);
        for x in Configuration::all(4).unwrap().filter(|x| x.particle_count() == 1) {
            let brute = chain_sum(u.matrix(), 8, x0.index(), x.index());
            assert!(close(p.probability(x), brute, 1e-12), "{x}: {} vs {brute}", p.probability(x));
        }
        // non-integer T/t leaves a fractional final step
        let p = repeated_measurement_distribution(&spectrum, 0.3, 1.0, &Distribution::point(x0)).unwrap();
        let tail = transition_matrix(&spectrum, 0.1);
        let expected = tail.matrix() * (u_power(&spectrum, 0.3, 3) * Distribution::point(x0).probabilities());
        assert!((p.probabilities() - expected).amax() < 1e-13);
    }

    fn u_power(spectrum: &Spectrum, t: f64, k: u64) -> DMatrix<f64> {
        transition_matrix(spectrum, t).power(k)
    }

    #[test]
    fn pure_state_reduces_to_diagonal_case_for_basis_states() {
        let spectrum = spectrum_for(4, 1.5, 0.3, 8);
        let x0: Configuration = "0110".parse().unwrap();
        let psi = spectrum.evolve_basis_state(x0, 0.0);
        for total in [0.05, 0.4, 1.3] {
            let pure = repeated_measurement_from_pure_state(&spectrum, 0.2, total, &psi).unwrap();
            let diag = repeated_measurement_distribution(&spectrum, 0.2, total, &Distribution::point(x0)).unwrap();
            assert!(pure.total_variation(&diag).unwrap() < 1e-12);
        }
    }

    #[test]
    fn trajectory_at_zero_interval_is_constant() {
        let spectrum = spectrum_for(4, 1.0, 0.0, 1);
        let u = transition_matrix(&spectrum, 0.0);
        let x0: Configuration = "1011".parse().unwrap();
        let record = sample_trajectory(&u, 25, x0, 4).unwrap();
        assert!(record.outcomes.iter().all(|&x| x == x0));
    }

    #[test]
    fn trajectories_are_reproducible_and_conserve_particles() {
        let spectrum = spectrum_for(5, 2.0, 1.0, 6);
        let u = transition_matrix(&spectrum, 0.4);
        let x0: Configuration = "10110".parse().unwrap();
        let a = sample_trajectory(&u, 200, x0, 99).unwrap();
        assert_eq!(a, sample_trajectory(&u, 200, x0, 99).unwrap());
        assert!(a.outcomes.iter().all(|x| x.particle_count() == 3));
        let mut prev = x0;
        for &x in &a.outcomes {
            assert!(u.probability(x, prev) > 0.0);
            prev = x;
        }
    }

    #[test]
    fn sampled_final_outcomes_match_matrix_power() {
        let spectrum = spectrum_for(4, 2.0, 0.7, 12);
        let u = transition_matrix(&spectrum, 0.2);
        let x0: Configuration = "1010".parse().unwrap();
        let count = 100_000;
        let counts = final_outcome_counts(&u, 10, x0, count, 2024).unwrap();
        let exact = u.power(10) * Distribution::point(x0).probabilities();
        let tv: f64 = 0.5 * counts.iter().zip(exact.iter()).map(|(&c, &p)| (c as f64 / count as f64 - p).abs()).sum::<f64>();
        assert!(tv < 0.01, "tv {tv}");
    }

    #[test]
    fn zeno_survival_cases() {
        let x0: Configuration = "1010".parse().unwrap();
        let diagonal = {
            let spec = HamiltonianSpec::new(vec![1.0, -2.0, 0.5, 3.0], 1.0).unwrap();
            let h = &build_hamiltonian(&spec) - &hopping_part(&spec);
            Spectrum::new(&h).unwrap()
        };
        for m in [1, 7, 100] {
            assert!(close(zeno_survival(&diagonal, 2.0, m, x0).unwrap(), 1.0, 1e-12));
        }
        let two_site = Spectrum::new(&build_hamiltonian(&HamiltonianSpec::free(2).unwrap())).unwrap();
        let x: Configuration = "10".parse().unwrap();
        for m in [1u64, 3, 10, 50] {
            let expected = (1.0f64 / m as f64).cos().powi(2 * m as i32);
            assert!(close(zeno_survival(&two_site, 1.0, m, x).unwrap(), expected, 1e-12));
        }
        assert!(zeno_survival(&two_site, 1.0, 0, x).is_err());
        assert!(zeno_survival(&two_site, 0.0, 3, x).is_err());
    }

    #[test]
    fn zeno_deficit_follows_inverse_measurement_count() {
        let spectrum = spectrum_for(4, 1.0, 0.6, 21);
        let x0: Configuration = "1010".parse().unwrap();
        let deficits: Vec<f64> =
            [10, 20, 40, 80, 160].iter().map(|&m| 1.0 - zeno_survival(&spectrum, 1.0, m, x0).unwrap()).collect();
        for pair in deficits.windows(2) {
            let ratio = pair[1] / pair[0];
            assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(2, vec![0.5, 0.5, 0.0, 0.0]).is_ok());
        assert!(Distribution::new(2, vec![0.5, 0.5, 0.0]).is_err());
        assert!(Distribution::new(2, vec![0.6, 0.5, 0.0, -0.1]).is_err());
        assert!(Distribution::new(2, vec![0.5, 0.4, 0.0, 0.0]).is_err());
        assert!(Distribution::new(2, vec![f64::NAN, 1.0, 0.0, 0.0]).is_err());
        let clamped = Distribution::new(2, vec![1.0, -1e-16, 0.0, 0.0]).unwrap();
        assert_eq!(clamped.probabilities()[1], 0.0);
        let sector = Distribution::uniform_sector(4, 2).unwrap();
        assert!(close(sector.probabilities().sum(), 1.0, 1e-15));
        assert!(close(sector.sector_masses()[2], 1.0, 1e-15));
    }
}
