//! Fermionic Fock space over a ring of `N` sites.
//!
//! Basis vectors are indexed by occupation words: bit `n - 1` of the index
//! holds the occupation of site `n`. Operators are dense complex matrices of
//! dimension `2^N`.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest ring accepted anywhere in the crate. A dense `2^16` square complex
/// matrix is ~64 GiB, so experiments in practice stay at `N <= 10`.
pub const MAX_SITES: usize = 16;

pub(crate) fn check_sites(n_sites: usize) -> Result<()> {
    if (1..=MAX_SITES).contains(&n_sites) {
        Ok(())
    } else {
        Err(Error::SiteCount(n_sites))
    }
}

pub(crate) fn check_site(site: usize, n_sites: usize) -> Result<()> {
    check_sites(n_sites)?;
    if (1..=n_sites).contains(&site) {
        Ok(())
    } else {
        Err(Error::SiteIndex { site, n_sites })
    }
}

/// Hilbert space dimension `2^N`.
pub fn dimension(n_sites: usize) -> usize {
    1usize << n_sites
}

/// Particle configuration `x = (x_1, ..., x_N)` stored as an occupation word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    bits: u32,
    n_sites: u8,
}

impl Configuration {
    pub fn new(bits: u32, n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        if bits >> n_sites != 0 {
            return Err(Error::ConfigurationBits { bits, n_sites });
        }
        Ok(Self { bits, n_sites: n_sites as u8 })
    }

    /// Configuration from per-site occupations, site 1 first.
    pub fn from_occupations(occupations: &[bool]) -> Result<Self> {
        let bits = occupations
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &occ)| if occ { acc | (1 << i) } else { acc });
        Self::new(bits, occupations.len())
    }

    pub fn empty(n_sites: usize) -> Result<Self> {
        Self::new(0, n_sites)
    }

    pub fn full(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        Self::new(((1u64 << n_sites) - 1) as u32, n_sites)
    }

    /// Basis index of `|x>`; equal to the occupation word.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites as usize
    }

    /// Occupation `x_n` of site `n` (1-based).
    pub fn occupied(&self, site: usize) -> bool {
        debug_assert!((1..=self.n_sites()).contains(&site));
        self.bits >> (site - 1) & 1 == 1
    }

    pub fn particle_count(&self) -> u32 {
        self.bits.count_ones()
    }

    /// The configuration with the values at sites `n` and `m` exchanged.
    pub fn swapped(&self, n: usize, m: usize) -> Self {
        let (a, b) = (self.occupied(n), self.occupied(m));
        if a == b {
            return *self;
        }
        let mask = (1u32 << (n - 1)) | (1u32 << (m - 1));
        Self { bits: self.bits ^ mask, n_sites: self.n_sites }
    }

    /// Periodic right neighbour of `site`.
    pub fn next_site(&self, site: usize) -> usize {
        site % self.n_sites() + 1
    }

    /// Number of ring bonds `(n, n+1)` holding exactly one particle.
    pub fn active_bonds(&self) -> usize {
        (1..=self.n_sites())
            .filter(|&n| self.occupied(n) != self.occupied(self.next_site(n)))
            .count()
    }

    /// Every configuration of `n_sites` sites in basis order.
    pub fn all(n_sites: usize) -> Result<impl Iterator<Item = Configuration>> {
        check_sites(n_sites)?;
        Ok((0..dimension(n_sites) as u64).map(move |b| Configuration { bits: b as u32, n_sites: n_sites as u8 }))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in 1..=self.n_sites() {
            f.write_str(if self.occupied(n) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parses a `0`/`1` string, site 1 leftmost.
impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let occupations = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: 1,
                    reason: format!("configuration character {other:?} is not 0 or 1"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_occupations(&occupations)
    }
}

/// Sign and ordering convention for fermionic operators on occupation words.
///
/// `JordanWigner` is the ordered product `a_1^{x_1*} ... a_N^{x_N*} |vac>`: the
/// operator on site `n` picks up `(-1)` for every occupied site before `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BasisOrdering {
    #[default]
    JordanWigner,
}

impl BasisOrdering {
    fn parity_before(self, bits: u32, site: usize) -> f64 {
        match self {
            BasisOrdering::JordanWigner => {
                let below = bits & ((1u32 << (site - 1)) - 1);
                if below.count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// `a_n |bits>` as `(amplitude, word)`, or `None` when site `n` is empty.
    pub fn annihilate(self, bits: u32, site: usize) -> Option<(f64, u32)> {
        let mask = 1u32 << (site - 1);
        (bits & mask != 0).then(|| (self.parity_before(bits, site), bits & !mask))
    }

    /// `a_n^* |bits>` as `(amplitude, word)`, or `None` when site `n` is full.
    pub fn create(self, bits: u32, site: usize) -> Option<(f64, u32)> {
        let mask = 1u32 << (site - 1);
        (bits & mask == 0).then(|| (self.parity_before(bits, site), bits | mask))
    }

    /// `a_n^* a_m |bits>`.
    pub fn hop(self, bits: u32, to: usize, from: usize) -> Option<(f64, u32)> {
        let (s1, mid) = self.annihilate(bits, from)?;
        let (s2, out) = self.create(mid, to)?;
        Some((s1 * s2, out))
    }
}

/// Dense operator on the `2^N`-dimensional Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    n_sites: usize,
    matrix: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn from_matrix(n_sites: usize, matrix: DMatrix<C64>) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = dimension(n_sites);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Parameter {
                name: "matrix",
                reason: format!("expected {dim}x{dim}, got {}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn zeros(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = dimension(n_sites);
        Ok(Self { n_sites, matrix: DMatrix::zeros(dim, dim) })
    }

    pub fn identity(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = dimension(n_sites);
        Ok(Self { n_sites, matrix: DMatrix::identity(dim, dim) })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// Matrix element `<row|A|col>`.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self { n_sites: self.n_sites, matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { n_sites: self.n_sites, matrix: &self.matrix * C64::new(factor, 0.0) }
    }

    /// `AB - BA`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `AB + BA`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A^*|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every off-diagonal entry vanishes within `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let dim = self.dim();
        (0..dim).all(|r| (0..dim).all(|c| r == c || self.matrix[(r, c)].norm() <= tol))
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: Self) -> OperatorMatrix {
        assert_eq!(self.n_sites, rhs.n_sites, "operator site counts differ");
        OperatorMatrix { n_sites: self.n_sites, matrix: &self.matrix * &rhs.matrix }
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: Self) -> OperatorMatrix {
        assert_eq!(self.n_sites, rhs.n_sites, "operator site counts differ");
        OperatorMatrix { n_sites: self.n_sites, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: Self) -> OperatorMatrix {
        assert_eq!(self.n_sites, rhs.n_sites, "operator site counts differ");
        OperatorMatrix { n_sites: self.n_sites, matrix: &self.matrix - &rhs.matrix }
    }
}

fn single_site_operator(
    site: usize,
    n_sites: usize,
    action: impl Fn(u32) -> Option<(f64, u32)>,
) -> Result<OperatorMatrix> {
    check_site(site, n_sites)?;
    let mut op = OperatorMatrix::zeros(n_sites)?;
    for col in 0..dimension(n_sites) as u32 {
        if let Some((amp, row)) = action(col) {
            op.matrix[(row as usize, col as usize)] = C64::new(amp, 0.0);
        }
    }
    Ok(op)
}

/// Annihilation operator `a_n` on site `n` (1-based).
pub fn build_annihilator(site: usize, n_sites: usize) -> Result<OperatorMatrix> {
    let ordering = BasisOrdering::JordanWigner;
    single_site_operator(site, n_sites, |bits| ordering.annihilate(bits, site))
}

/// Creation operator `a_n^*`.
pub fn build_creator(site: usize, n_sites: usize) -> Result<OperatorMatrix> {
    let ordering = BasisOrdering::JordanWigner;
    single_site_operator(site, n_sites, |bits| ordering.create(bits, site))
}

/// `A_n^1 = a_n^* a_n`, diagonal with entry `x_n` at `(x, x)`.
pub fn number_operator(site: usize, n_sites: usize) -> Result<OperatorMatrix> {
    single_site_operator(site, n_sites, |bits| (bits >> (site - 1) & 1 == 1).then_some((1.0, bits)))
}

/// `A_n^0 = a_n a_n^*`, the projector onto an empty site `n`.
pub fn hole_operator(site: usize, n_sites: usize) -> Result<OperatorMatrix> {
    single_site_operator(site, n_sites, |bits| (bits >> (site - 1) & 1 == 0).then_some((1.0, bits)))
}

/// Total particle number `sum_n A_n^1`.
pub fn total_number_operator(n_sites: usize) -> Result<OperatorMatrix> {
    check_sites(n_sites)?;
    let mut op = OperatorMatrix::zeros(n_sites)?;
    for bits in 0..dimension(n_sites) {
        op.matrix[(bits, bits)] = C64::new(bits.count_ones() as f64, 0.0);
    }
    Ok(op)
}

/// `P_x = prod_n A_n^{x_n}`: the rank-one projector onto `|x>`.
pub fn config_projector(x: Configuration) -> OperatorMatrix {
    let n_sites = x.n_sites();
    let dim = dimension(n_sites);
    let mut matrix = DMatrix::zeros(dim, dim);
    matrix[(x.index(), x.index())] = C64::new(1.0, 0.0);
    OperatorMatrix { n_sites, matrix }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta(n: usize, m: usize) -> f64 {
        if n == m {
            1.0
        } else {
            0.0
        }
    }

    #[test]
    fn single_site_annihilator() {
        let a = build_annihilator(1, 1).unwrap();
        assert_eq!(a.get(0, 1), C64::new(1.0, 0.0));
        assert_eq!(a.get(0, 0), C64::new(0.0, 0.0));
        assert_eq!(a.get(1, 0), C64::new(0.0, 0.0));
        assert_eq!(a.get(1, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn canonical_anticommutation() {
        for n_sites in 1..=6 {
            let a: Vec<_> = (1..=n_sites).map(|n| build_annihilator(n, n_sites).unwrap()).collect();
            let id = OperatorMatrix::identity(n_sites).unwrap();
            for n in 0..n_sites {
                for m in 0..n_sites {
                    assert_eq!(a[n].anticommutator(&a[m]).max_abs(), 0.0);
                    let mixed = a[n].adjoint().anticommutator(&a[m]);
                    let defect = (&mixed - &id.scale(delta(n, m))).max_abs();
                    assert!(defect < 1e-13, "N={n_sites} n={n} m={m} defect={defect}");
                }
            }
        }
    }

    #[test]
    fn creator_is_adjoint_of_annihilator() {
        for n in 1..=4 {
            let a = build_annihilator(n, 4).unwrap();
            assert_eq!(build_creator(n, 4).unwrap(), a.adjoint());
        }
    }

    #[test]
    fn occupation_projectors_commute_and_sum_to_identity() {
        let n_sites = 4;
        let id = OperatorMatrix::identity(n_sites).unwrap();
        for n in 1..=n_sites {
            let a = build_annihilator(n, n_sites).unwrap();
            let a0 = &a * &a.adjoint();
            let a1 = &a.adjoint() * &a;
            assert_eq!(a0, hole_operator(n, n_sites).unwrap());
            assert_eq!(&a0 + &a1, id);
            assert_eq!((&(&a1 * &a1) - &a1).max_abs(), 0.0);
            for m in 1..=n_sites {
                let b1 = number_operator(m, n_sites).unwrap();
                assert_eq!(a1.commutator(&b1).max_abs(), 0.0);
                assert_eq!(a0.commutator(&b1).max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn number_operator_matches_product() {
        let n_sites = 6;
        for n in 1..=n_sites {
            let a = build_annihilator(n, n_sites).unwrap();
            let product = &a.adjoint() * &a;
            assert_eq!(number_operator(n, n_sites).unwrap(), product);
            for x in 0..dimension(n_sites) {
                assert_eq!(product.get(x, x).re, (x >> (n - 1) & 1) as f64);
            }
        }
        let single = number_operator(1, 1).unwrap();
        assert_eq!(single.get(0, 0).re, 0.0);
        assert_eq!(single.get(1, 1).re, 1.0);
    }

    #[test]
    fn total_number_spectrum_is_binomial() {
        let n_sites = 5;
        let total = (1..=n_sites).fold(OperatorMatrix::zeros(n_sites).unwrap(), |acc, n| {
            &acc + &number_operator(n, n_sites).unwrap()
        });
        assert_eq!(total, total_number_operator(n_sites).unwrap());
        let mut counts = [0usize; 6];
        for x in 0..dimension(n_sites) {
            counts[total.get(x, x).re as usize] += 1;
        }
        assert_eq!(counts, [1, 5, 10, 10, 5, 1]);
    }

    #[test]
    fn projectors_form_resolution_of_identity() {
        let n_sites = 3;
        let projectors: Vec<_> = Configuration::all(n_sites).unwrap().map(config_projector).collect();
        let sum = projectors.iter().fold(OperatorMatrix::zeros(n_sites).unwrap(), |acc, p| &acc + p);
        assert_eq!(sum, OperatorMatrix::identity(n_sites).unwrap());
        for (i, p) in projectors.iter().enumerate() {
            assert_eq!(&(p * p), p);
            for (j, q) in projectors.iter().enumerate() {
                if i != j {
                    assert_eq!((p * q).max_abs(), 0.0);
                }
            }
        }
    }

    #[test]
    fn projector_is_product_of_site_projectors() {
        let n_sites = 4;
        for x in Configuration::all(n_sites).unwrap() {
            let product = (1..=n_sites).fold(OperatorMatrix::identity(n_sites).unwrap(), |acc, n| {
                let factor = if x.occupied(n) {
                    number_operator(n, n_sites).unwrap()
                } else {
                    hole_operator(n, n_sites).unwrap()
                };
                &acc * &factor
            });
            let p = config_projector(x);
            assert_eq!(product, p);
            assert_eq!(p.trace(), C64::new(1.0, 0.0));
            assert!(p.is_diagonal(0.0));
        }
    }

    #[test]
    fn rejects_bad_indices() {
        assert_eq!(build_annihilator(0, 3), Err(Error::SiteIndex { site: 0, n_sites: 3 }));
        assert_eq!(build_annihilator(4, 3), Err(Error::SiteIndex { site: 4, n_sites: 3 }));
        assert_eq!(number_operator(1, 17), Err(Error::SiteCount(17)));
        assert_eq!(OperatorMatrix::zeros(0), Err(Error::SiteCount(0)));
        assert!(Configuration::new(0b1000, 3).is_err());
    }

    #[test]
    fn configuration_strings() {
        let x: Configuration = "1010".parse().unwrap();
        assert_eq!(x.bits(), 0b0101);
        assert!(x.occupied(1) && !x.occupied(2) && x.occupied(3));
        assert_eq!(x.to_string(), "1010");
        assert_eq!(x.active_bonds(), 4);
        assert_eq!(x.swapped(1, 2).to_string(), "0110");
        assert_eq!(Configuration::full(4).unwrap().active_bonds(), 0);
        assert!("10a".parse::<Configuration>().is_err());
        assert!("".parse::<Configuration>().is_err());
    }
}
