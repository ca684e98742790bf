//! Bit mapping, transmission, and maximum-likelihood detection.
//!
//! A channel use maps a bit word to a (column, constellation point) pair: the
//! spatial bits pick the active column in natural binary order, the symbol
//! bits pick the point from that column's constellation. The receiver sees
//! `y[r] = h[column][r] * point + noise[r]` and detects by exhaustive search
//! over every (column, point) hypothesis.
//!
//! Columns may carry different constellation orders (the rate-adaptive
//! schemes do exactly that), so the hypothesis set is described by an
//! [`Alphabet`]: one constellation per column.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{sample_cn01, Channel};
use crate::config::{log2_exact, BitWord};
use crate::constellation::Constellation;
use crate::error::{Error, Result};

/// The full transmission hypothesis set: one constellation per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    cols: Vec<Constellation>,
    spatial_bits: u32,
}

impl Alphabet {
    /// Every column carries the same constellation.
    pub fn uniform(n_columns: usize, constellation: Constellation) -> Result<Self> {
        Self::per_column(vec![constellation; n_columns])
    }

    /// Explicit per-column constellations. The column count must be a power
    /// of two so the spatial index is exactly addressable by bits.
    pub fn per_column(cols: Vec<Constellation>) -> Result<Self> {
        let n = cols.len();
        let spatial_bits = log2_exact(n).ok_or_else(|| {
            Error::Dimension(format!("column count must be a power of two, got {n}"))
        })?;
        if n * cols.iter().map(Constellation::order).max().unwrap_or(0) < 2 {
            return Err(Error::Dimension(
                "alphabet must offer at least two hypotheses".into(),
            ));
        }
        Ok(Alphabet { cols, spatial_bits })
    }

    /// Number of columns.
    pub fn n_columns(&self) -> usize {
        self.cols.len()
    }

    /// Spatial bits per channel use.
    pub fn spatial_bits(&self) -> u32 {
        self.spatial_bits
    }

    /// The constellation column `n` carries.
    pub fn column_constellation(&self, n: usize) -> &Constellation {
        &self.cols[n]
    }

    /// The bit word that selects `(column, label)`.
    pub fn word_for(&self, column: usize, label: u32) -> BitWord {
        BitWord::new(
            column as u32,
            self.spatial_bits,
            label,
            self.cols[column].bits(),
        )
    }

    /// Draw a uniformly random column, then a uniformly random point from
    /// that column's constellation.
    pub fn random_word<R: Rng + ?Sized>(&self, rng: &mut R) -> BitWord {
        let column = rng.gen_range(0..self.cols.len() as u32) as usize;
        let label = rng.gen_range(0..self.cols[column].order() as u32);
        self.word_for(column, label)
    }

    /// Average bits per channel use (columns are equiprobable).
    pub fn mean_bits_per_use(&self) -> f64 {
        let sym: u32 = self.cols.iter().map(Constellation::bits).sum();
        self.spatial_bits as f64 + sym as f64 / self.cols.len() as f64
    }
}

/// The (column, constellation point) a bit word selects.
pub fn map_word(alphabet: &Alphabet, word: BitWord) -> (usize, Complex64) {
    let column = word.spatial_value() as usize;
    let point = alphabet.column_constellation(column).point(word.symbol_value());
    (column, point)
}

/// Noise-free receive vector for an active column radiating `point`.
pub fn transmit(channel: &Channel, column: usize, point: Complex64) -> Vec<Complex64> {
    channel.column(column).iter().map(|h| h * point).collect()
}

/// Add circularly-symmetric complex Gaussian noise of variance `n0` per
/// receive antenna.
pub fn add_noise<R: Rng + ?Sized>(y: &mut [Complex64], rng: &mut R, n0: f64) {
    let scale = n0.sqrt();
    for v in y.iter_mut() {
        *v += sample_cn01(rng) * scale;
    }
}

/// Exhaustive maximum-likelihood detection: the hypothesis minimizing
/// `sum_r |y[r] - h[column][r] * point|^2`. Metric ties resolve to the
/// lexicographically smallest (column, label).
pub fn ml_detect(channel: &Channel, alphabet: &Alphabet, y: &[Complex64]) -> BitWord {
    let mut best_metric = f64::INFINITY;
    let mut best = BitWord::new(0, alphabet.spatial_bits(), 0, alphabet.cols[0].bits());
    for (column, constellation) in alphabet.cols.iter().enumerate() {
        let h = channel.column(column);
        for label in 0..constellation.order() as u32 {
            let s = constellation.point(label);
            let metric: f64 = y
                .iter()
                .zip(h)
                .map(|(yr, hr)| (yr - hr * s).norm_sqr())
                .sum();
            if metric < best_metric {
                best_metric = metric;
                best = alphabet.word_for(column, label);
            }
        }
    }
    best
}

/// Bit errors charged when `detected` is delivered in place of `transmitted`.
///
/// Spatial parts must be the same length and are compared bit for bit. Symbol
/// parts may differ in length when columns carry different orders: the
/// overlapping most-significant bits are compared, and any transmitted bits
/// beyond the detected length are charged as errors (they were sent but not
/// delivered). Detected bits beyond the transmitted length are spurious
/// insertions, not errors against transmitted bits, and are not charged.
/// For equal-length words this is exactly the Hamming distance.
pub fn bit_errors(transmitted: BitWord, detected: BitWord) -> Result<u32> {
    if transmitted.spatial_len() != detected.spatial_len() {
        return Err(Error::Dimension(format!(
            "spatial parts must have equal length ({} != {})",
            transmitted.spatial_len(),
            detected.spatial_len()
        )));
    }
    let spatial = (transmitted.spatial_value() ^ detected.spatial_value()).count_ones();
    let (a, b) = (transmitted.symbol_len(), detected.symbol_len());
    let overlap = a.min(b);
    let tx_prefix = transmitted.symbol_value() >> (a - overlap);
    let rx_prefix = detected.symbol_value() >> (b - overlap);
    let symbol = (tx_prefix ^ rx_prefix).count_ones();
    let lost = (a - overlap) as u32;
    Ok(spatial + symbol + lost)
}
