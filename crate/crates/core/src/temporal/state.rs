use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Where a pulse sits relative to the dynamic beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    /// Arriving from the source.
    A,
    /// Circulating in the inner loop.
    B,
    /// Travelling to the detector.
    C,
}

/// A single photon: region, time bin (1-based) and centre shift within the bin.
///
/// Region-C photons are labelled by their output bin, i.e. a pulse leaving at beamsplitter
/// `t` sits in bin `t - 1`.
#[derive(Debug, Clone, Copy)]
pub struct PhotonLabel {
    pub region: Region,
    pub time_bin: usize,
    pub shift: f64,
}

impl PhotonLabel {
    pub fn new(region: Region, time_bin: usize, shift: f64) -> Self {
        // -0.0 + 0.0 == +0.0, so equal shifts always share one bit pattern
        Self {
            region,
            time_bin,
            shift: shift + 0.0,
        }
    }
}

impl PartialEq for PhotonLabel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PhotonLabel {}

impl PartialOrd for PhotonLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PhotonLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.region
            .cmp(&other.region)
            .then(self.time_bin.cmp(&other.time_bin))
            .then(self.shift.total_cmp(&other.shift))
    }
}

/// A multiset of photon labels (kept sorted) with its amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub photons: Vec<PhotonLabel>,
    pub amplitude: Complex64,
}

/// `prod_k mult_k!` over runs of identical labels in a sorted list.
pub(crate) fn multiplicity_factorial(sorted: &[PhotonLabel]) -> f64 {
    let mut total = 1.0;
    let mut run = 1usize;
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            run += 1;
            total *= run as f64;
        } else {
            run = 1;
        }
    }
    total
}

/// Superposition over photon configurations of an `m`-bin pulse train.
///
/// The amplitude of a configuration multiplies the *normalised* state
/// `prod_k (L_k^†)^{n_k} / sqrt(n_k!) |0⟩`, where `n_k` counts identical labels `L_k`.
/// Distinct labels are treated as orthogonal here, so `sum |γ|^2` is the norm in that basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalState {
    m: usize,
    configs: BTreeMap<Vec<PhotonLabel>, Complex64>,
}

impl TemporalState {
    /// `prod_i (A^†(i, 0))^{k_i} / sqrt(k_i!) |0⟩`.
    pub fn from_occupation(occupation: &[usize]) -> Result<Self> {
        let m = occupation.len();
        if m == 0 {
            return Err(Error::ZeroModes);
        }
        let photons = occupation
            .iter()
            .enumerate()
            .flat_map(|(idx, &k)| std::iter::repeat_n(PhotonLabel::new(Region::A, idx + 1, 0.0), k))
            .collect();
        Self::from_configurations(m, [(photons, Complex64::new(1.0, 0.0))])
    }

    /// Sums amplitudes of configurations that coincide after sorting.
    pub fn from_configurations<I>(m: usize, configs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<PhotonLabel>, Complex64)>,
    {
        if m == 0 {
            return Err(Error::ZeroModes);
        }
        let mut map = BTreeMap::new();
        for (mut photons, amplitude) in configs {
            photons.sort();
            *map.entry(photons).or_insert(Complex64::new(0.0, 0.0)) += amplitude;
        }
        Ok(Self { m, configs: map })
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    /// Configurations in canonical order.
    pub fn configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        self.configs
            .iter()
            .map(|(photons, &amplitude)| Configuration {
                photons: photons.clone(),
                amplitude,
            })
    }

    pub(crate) fn entries(&self) -> impl Iterator<Item = (&[PhotonLabel], Complex64)> {
        self.configs.iter().map(|(p, &a)| (p.as_slice(), a))
    }

    pub fn amplitude(&self, photons: &[PhotonLabel]) -> Complex64 {
        let mut key = photons.to_vec();
        key.sort();
        self.configs
            .get(&key)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// `sum |γ|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.configs.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn labels(&self) -> impl Iterator<Item = &PhotonLabel> {
        self.configs.keys().flatten()
    }

    /// Total photon count, taken from the first configuration.
    pub fn photon_count(&self) -> usize {
        self.configs.keys().next().map_or(0, Vec::len)
    }

    /// Probability of finding exactly the bins in `bins` (sorted), summed over shifts.
    pub fn bin_probability(&self, bins: &[usize]) -> f64 {
        self.configs
            .iter()
            .filter(|(photons, _)| {
                let mut b: Vec<usize> = photons.iter().map(|p| p.time_bin).collect();
                b.sort_unstable();
                b == bins
            })
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}
