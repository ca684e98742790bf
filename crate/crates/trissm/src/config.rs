//! System configuration, SNR points, and bit words.
//!
//! A link is described by [`SystemConfig`]: a transmit surface of `n_total_units`
//! unit cells arranged as `n_columns` columns of `rows_per_column` cells each, a
//! receiver with `n_rx` antennas, and a symbol constellation of order `mod_order`.
//! Every channel use activates exactly one column (selected by the spatial bits)
//! and radiates one constellation point (selected by the symbol bits).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constellation family for the symbol domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModKind {
    /// Phase-shift keying (unit-modulus points).
    Psk,
    /// Quadrature amplitude modulation (grid points, unit mean energy).
    Qam,
}

impl ModKind {
    /// Whether this family supports a constellation of the given order.
    pub fn supports_order(self, order: usize) -> bool {
        if order == 1 {
            return true;
        }
        if !order.is_power_of_two() || order < 2 {
            return false;
        }
        match self {
            ModKind::Psk => true,
            // Square grids plus the 4x2 rectangular 8-point grid.
            ModKind::Qam => order == 8 || is_even_power_of_two(order),
        }
    }
}

fn is_even_power_of_two(x: usize) -> bool {
    x.is_power_of_two() && x.trailing_zeros().is_multiple_of(2)
}

/// Exact base-2 logarithm of a power of two.
pub fn log2_exact(x: usize) -> Option<u32> {
    if x.is_power_of_two() {
        Some(x.trailing_zeros())
    } else {
        None
    }
}

/// One point on an SNR sweep: `rho` is the linear SNR and `n0` the matching
/// per-receive-antenna complex noise variance, tied by `n0 = 1/rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    /// SNR in dB.
    pub snr_db: f64,
    /// Linear SNR, `10^(snr_db/10)`.
    pub rho: f64,
    /// Noise variance per receive antenna, `1/rho`.
    pub n0: f64,
}

/// Convert an SNR in dB to an [`SnrPoint`].
pub fn snr_db_to_point(snr_db: f64) -> SnrPoint {
    let rho = 10f64.powf(snr_db / 10.0);
    SnrPoint {
        snr_db,
        rho,
        n0: 1.0 / rho,
    }
}

/// Static description of a link under study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Number of surface columns `N` (spatial alphabet size; power of two).
    pub n_columns: usize,
    /// Unit cells per column `L_N`.
    pub rows_per_column: usize,
    /// Total unit cells `L = N * L_N`.
    pub n_total_units: usize,
    /// Receive antennas `N_r`.
    pub n_rx: usize,
    /// Symbol constellation order `M` (power of two; `1` means no symbol bits).
    pub mod_order: usize,
    /// Symbol constellation family.
    pub mod_kind: ModKind,
    /// SNR sweep in dB, strictly ascending.
    pub snr_grid_db: Vec<f64>,
}

impl SystemConfig {
    /// Spatial bits per channel use, `log2(n_columns)`.
    pub fn spatial_bits(&self) -> u32 {
        log2_exact(self.n_columns).expect("validated config")
    }

    /// Symbol bits per channel use, `log2(mod_order)`.
    pub fn symbol_bits(&self) -> u32 {
        log2_exact(self.mod_order).expect("validated config")
    }

    /// Total bits per channel use.
    pub fn bits_per_use(&self) -> u32 {
        self.spatial_bits() + self.symbol_bits()
    }

    /// SNR grid as [`SnrPoint`]s.
    pub fn snr_points(&self) -> Vec<SnrPoint> {
        self.snr_grid_db.iter().copied().map(snr_db_to_point).collect()
    }
}

/// Check every structural invariant of a [`SystemConfig`].
pub fn validate_config(cfg: &SystemConfig) -> Result<()> {
    if cfg.n_columns == 0 || !cfg.n_columns.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "n_columns must be a power of two, got {}",
            cfg.n_columns
        )));
    }
    if cfg.rows_per_column == 0 {
        return Err(Error::Dimension("rows_per_column must be at least 1".into()));
    }
    if cfg.n_total_units != cfg.n_columns * cfg.rows_per_column {
        return Err(Error::Dimension(format!(
            "n_total_units must equal n_columns * rows_per_column ({} != {} * {})",
            cfg.n_total_units, cfg.n_columns, cfg.rows_per_column
        )));
    }
    if cfg.n_rx == 0 {
        return Err(Error::Dimension("n_rx must be at least 1".into()));
    }
    if cfg.mod_order == 0 || !cfg.mod_order.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "mod_order must be a power of two, got {}",
            cfg.mod_order
        )));
    }
    if !cfg.mod_kind.supports_order(cfg.mod_order) {
        return Err(Error::UnsupportedOrder {
            order: cfg.mod_order,
            family: match cfg.mod_kind {
                ModKind::Psk => "psk",
                ModKind::Qam => "qam",
            },
        });
    }
    if cfg.n_columns * cfg.mod_order < 2 {
        return Err(Error::Dimension(
            "n_columns * mod_order must be at least 2 (one bit per use)".into(),
        ));
    }
    if cfg.snr_grid_db.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("snr_grid_db entries must be finite".into()));
    }
    if cfg.snr_grid_db.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("snr_grid_db must be strictly ascending".into()));
    }
    Ok(())
}

/// A transmitted or detected bit word: spatial bits (natural binary, MSB first)
/// followed by symbol bits (constellation label, MSB first).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitWord {
    word: u32,
    spatial_len: u8,
    symbol_len: u8,
}

impl BitWord {
    /// Assemble a word from its spatial and symbol parts.
    pub fn new(spatial: u32, spatial_len: u32, symbol: u32, symbol_len: u32) -> Self {
        debug_assert!(spatial_len + symbol_len <= 32);
        debug_assert!(spatial_len == 32 || spatial < (1u32 << spatial_len).max(1));
        debug_assert!(symbol_len == 32 || symbol < (1u32 << symbol_len).max(1));
        BitWord {
            word: (spatial << symbol_len) | symbol,
            spatial_len: spatial_len as u8,
            symbol_len: symbol_len as u8,
        }
    }

    /// Total number of bits.
    pub fn len(&self) -> usize {
        (self.spatial_len + self.symbol_len) as usize
    }

    /// Whether the word carries no bits.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of spatial bits.
    pub fn spatial_len(&self) -> usize {
        self.spatial_len as usize
    }

    /// Number of symbol bits.
    pub fn symbol_len(&self) -> usize {
        self.symbol_len as usize
    }

    /// Value of the spatial part.
    pub fn spatial_value(&self) -> u32 {
        self.word >> self.symbol_len
    }

    /// Value of the symbol part (the constellation label).
    pub fn symbol_value(&self) -> u32 {
        if self.symbol_len == 0 {
            0
        } else {
            self.word & ((1u32 << self.symbol_len) - 1)
        }
    }

    /// The raw packed word (spatial bits above symbol bits).
    pub fn packed(&self) -> u32 {
        self.word
    }

    /// Bits as 0/1 values, MSB first (spatial part, then symbol part).
    pub fn bits(&self) -> Vec<u8> {
        (0..self.len())
            .map(|i| ((self.word >> (self.len() - 1 - i)) & 1) as u8)
            .collect()
    }
}

/// Hamming distance between two equal-length bit words.
pub fn hamming(a: BitWord, b: BitWord) -> Result<u32> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "hamming distance needs equal word lengths ({} != {})",
            a.len(),
            b.len()
        )));
    }
    Ok((a.word ^ b.word).count_ones())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cfg() -> SystemConfig {
        SystemConfig {
            n_columns: 4,
            rows_per_column: 4,
            n_total_units: 16,
            n_rx: 4,
            mod_order: 2,
            mod_kind: ModKind::Psk,
            snr_grid_db: vec![-10.0, 0.0, 10.0],
        }
    }

    #[test]
    fn valid_config_passes() {
        validate_config(&base_cfg()).unwrap();
    }

    #[test]
    fn unit_total_mismatch_rejected() {
        let cfg = SystemConfig {
            n_total_units: 15,
            ..base_cfg()
        };
        let err = validate_config(&cfg).unwrap_err();
        assert!(err.to_string().contains("n_total_units"));
    }

    #[test]
    fn non_power_of_two_columns_rejected() {
        let cfg = SystemConfig {
            n_columns: 3,
            n_total_units: 12,
            ..base_cfg()
        };
        assert!(validate_config(&cfg).is_err());
    }

    #[test]
    fn order_one_with_single_column_rejected() {
        // One column and one symbol carries no information.
        let cfg = SystemConfig {
            n_columns: 1,
            n_total_units: 4,
            mod_order: 1,
            ..base_cfg()
        };
        assert!(validate_config(&cfg).is_err());
    }

    #[test]
    fn order_one_column_keying_accepted() {
        let cfg = SystemConfig {
            n_columns: 2,
            n_total_units: 8,
            mod_order: 1,
            ..base_cfg()
        };
        validate_config(&cfg).unwrap();
        assert_eq!(cfg.bits_per_use(), 1);
    }

    #[test]
    fn qam_rejects_order_32() {
        let cfg = SystemConfig {
            mod_order: 32,
            mod_kind: ModKind::Qam,
            ..base_cfg()
        };
        assert!(validate_config(&cfg).is_err());
        // while 8 and 16 are fine
        for order in [8usize, 16] {
            let cfg = SystemConfig {
                mod_order: order,
                mod_kind: ModKind::Qam,
                ..base_cfg()
            };
            validate_config(&cfg).unwrap();
        }
    }

    #[test]
    fn descending_snr_grid_rejected() {
        let cfg = SystemConfig {
            snr_grid_db: vec![0.0, -2.0],
            ..base_cfg()
        };
        assert!(validate_config(&cfg).is_err());
    }

    #[test]
    fn snr_point_roundtrip() {
        let p = snr_db_to_point(10.0);
        assert!((p.rho - 10.0).abs() < 1e-12);
        // n0 is defined as 1/rho, bit for bit.
        assert_eq!(p.n0, 1.0 / p.rho);
        let z = snr_db_to_point(0.0);
        assert_eq!(z.rho, 1.0);
        assert_eq!(z.n0, 1.0);
    }

    #[test]
    fn bit_word_layout_msb_first() {
        // spatial 10, symbol 011
        let w = BitWord::new(0b10, 2, 0b011, 3);
        assert_eq!(w.len(), 5);
        assert_eq!(w.spatial_value(), 0b10);
        assert_eq!(w.symbol_value(), 0b011);
        assert_eq!(w.bits(), vec![1, 0, 0, 1, 1]);
    }

    #[test]
    fn bit_word_empty_symbol_part() {
        let w = BitWord::new(1, 1, 0, 0);
        assert_eq!(w.len(), 1);
        assert_eq!(w.symbol_value(), 0);
        assert_eq!(w.bits(), vec![1]);
    }

    #[test]
    fn hamming_counts_differing_bits() {
        let a = BitWord::new(0b00, 2, 0b00, 2);
        let b = BitWord::new(0b11, 2, 0b01, 2);
        assert_eq!(hamming(a, b).unwrap(), 3);
        assert_eq!(hamming(a, a).unwrap(), 0);
    }

    #[test]
    fn hamming_rejects_length_mismatch() {
        let a = BitWord::new(0, 1, 0, 0);
        let b = BitWord::new(0, 1, 0, 1);
        assert!(hamming(a, b).is_err());
    }
}
