//! Rayleigh-faded links between surface columns and receive antennas.
//!
//! Each of the `n_total_units` unit cells sees an i.i.d. standard complex
//! Gaussian gain to every receive antenna. A column radiates coherently, so
//! the gain a receive antenna sees from column `n` is the sum of that column's
//! unit gains: complex Gaussian with variance `rows_per_column`. The receive
//! model only ever needs these per-column aggregates, which is what [`Channel`]
//! stores.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Draw one standard circularly-symmetric complex Gaussian, CN(0, 1).
pub fn sample_cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Inner products a detector needs about an ordered pair of columns:
/// `tau1 = ||h_n||^2`, `tau2 = ||h_m||^2`, `tau3 = <h_n, h_m>` (sum over
/// receive antennas of `h_{r,n} * conj(h_{r,m})`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnPairStats {
    /// Squared norm of the first column's aggregate gain vector.
    pub tau1: f64,
    /// Squared norm of the second column's aggregate gain vector.
    pub tau2: f64,
    /// Inner product between the two aggregate gain vectors.
    pub tau3: Complex64,
}

/// Per-column aggregate channel gains: `column(n)[r]` is the gain from column
/// `n` to receive antenna `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    n_rx: usize,
    cols: Vec<Vec<Complex64>>,
}

impl Channel {
    /// A zeroed channel of the given shape, ready for [`Channel::redraw`].
    pub fn zeroed(n_rx: usize, n_columns: usize) -> Self {
        Channel {
            n_rx,
            cols: vec![vec![Complex64::default(); n_rx]; n_columns],
        }
    }

    /// Draw a fresh channel: every unit cell gets an i.i.d. CN(0, 1) gain per
    /// receive antenna, and columns aggregate their `rows_per_column` cells.
    pub fn draw<R: Rng + ?Sized>(
        rng: &mut R,
        n_rx: usize,
        n_columns: usize,
        rows_per_column: usize,
    ) -> Self {
        let mut ch = Self::zeroed(n_rx, n_columns);
        ch.redraw(rng, rows_per_column);
        ch
    }

    /// Redraw this channel in place (same shape, fresh fading realization).
    /// Unit gains are drawn column by column, cell by cell, antenna by
    /// antenna, and summed in that fixed order, so a given random stream
    /// always produces the identical channel.
    pub fn redraw<R: Rng + ?Sized>(&mut self, rng: &mut R, rows_per_column: usize) {
        for col in &mut self.cols {
            col.fill(Complex64::default());
            for _cell in 0..rows_per_column {
                for gain in col.iter_mut() {
                    *gain += sample_cn01(rng);
                }
            }
        }
    }

    /// Wrap explicit per-column aggregate gains (e.g. a measured channel).
    /// `cols[n][r]` is the gain from column `n` to antenna `r`.
    pub fn from_column_gains(cols: Vec<Vec<Complex64>>) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::Dimension("channel needs at least one column".into()));
        }
        let n_rx = cols[0].len();
        if n_rx == 0 {
            return Err(Error::Dimension(
                "channel needs at least one receive antenna".into(),
            ));
        }
        if cols.iter().any(|c| c.len() != n_rx) {
            return Err(Error::Dimension(
                "all channel columns must have the same number of antenna gains".into(),
            ));
        }
        Ok(Channel { n_rx, cols })
    }

    /// Number of receive antennas.
    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    /// Number of surface columns.
    pub fn n_columns(&self) -> usize {
        self.cols.len()
    }

    /// Aggregate gain vector of one column (one entry per receive antenna).
    pub fn column(&self, n: usize) -> &[Complex64] {
        &self.cols[n]
    }

    /// Norms and inner product for an ordered column pair.
    pub fn column_pair_stats(&self, n: usize, m: usize) -> ColumnPairStats {
        let (a, b) = (&self.cols[n], &self.cols[m]);
        ColumnPairStats {
            tau1: a.iter().map(|h| h.norm_sqr()).sum(),
            tau2: b.iter().map(|h| h.norm_sqr()).sum(),
            tau3: a.iter().zip(b).map(|(x, y)| x * y.conj()).sum(),
        }
    }
}
