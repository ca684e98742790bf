//! Deterministic, parallel Monte Carlo bit-error-rate estimation.
//!
//! Trials are partitioned into fixed chunks of 2^16 channel uses. Chunk `i`
//! of SNR lane `j` draws from three private random streams derived from
//! `(seed, purpose, j, i)` — channel, payload bits, noise — so the estimate
//! is a pure function of `(seed, configuration, stop rule)`: chunks may run
//! on any number of worker threads in any order and reduce by integer
//! addition without changing a single bit of the output.
//!
//! Chunks are issued in waves of 8; the stop rule is evaluated between waves
//! only, which keeps the set of chunks that contribute to the tally — and
//! therefore the result — independent of scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::config::{snr_db_to_point, validate_config, SystemConfig};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::rng::{substream, Purpose};
use crate::txrx::{add_noise, bit_errors, map_word, ml_detect, Alphabet};
use num_complex::Complex64;

/// Channel uses per work chunk.
pub const CHUNK_TRIALS: u64 = 1 << 16;

/// Chunks issued between stop-rule checks.
pub const WAVE_CHUNKS: u64 = 8;

/// When to stop accumulating trials at one SNR point: after `min_bit_errors`
/// have been seen, or after `max_trials` channel uses, whichever comes first
/// (checked at wave granularity; trials never exceed `max_trials`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    /// Bit errors after which the estimate is considered resolved.
    pub min_bit_errors: u64,
    /// Hard cap on channel uses.
    pub max_trials: u64,
}

impl StopRule {
    /// Validate and build a stop rule.
    pub fn new(min_bit_errors: u64, max_trials: u64) -> Result<Self> {
        if min_bit_errors == 0 || max_trials == 0 {
            return Err(Error::Domain(
                "stop rule thresholds must both be positive".into(),
            ));
        }
        Ok(StopRule {
            min_bit_errors,
            max_trials,
        })
    }

    /// Default rule: 200 bit errors or 10^8 transmitted bits per SNR point,
    /// whichever comes first, with the bit budget converted to channel uses.
    pub fn default_for(bits_per_use: f64) -> Self {
        let max_trials = ((1e8 / bits_per_use).floor() as u64).max(1);
        StopRule {
            min_bit_errors: 200,
            max_trials,
        }
    }
}

/// Monte Carlo tally for one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// SNR in dB.
    pub snr_db: f64,
    /// Channel uses simulated.
    pub trials: u64,
    /// Bit errors observed.
    pub bit_errors: u64,
    /// Bits transmitted.
    pub bits_total: u64,
    /// `bit_errors / bits_total`.
    pub ber: f64,
    /// Normal-approximation 95% confidence half-width,
    /// `1.96 * sqrt(ber * (1 - ber) / bits_total)`.
    pub ci95_half_width: f64,
}

impl SimResult {
    fn from_tally(snr_db: f64, trials: u64, bit_errors: u64, bits_total: u64) -> Self {
        let ber = bit_errors as f64 / bits_total as f64;
        SimResult {
            snr_db,
            trials,
            bit_errors,
            bits_total,
            ber,
            ci95_half_width: 1.96 * (ber * (1.0 - ber) / bits_total as f64).sqrt(),
        }
    }
}

/// How the channel evolves across trials.
enum FadingMode<'a> {
    /// Fresh i.i.d. realization every channel use.
    PerUse { rows_per_column: usize },
    /// One fixed realization for every trial.
    Fixed(&'a Channel),
}

/// Identifies one chunk's random streams: master seed, SNR lane, chunk index.
#[derive(Debug, Clone, Copy)]
struct ChunkId {
    seed: u64,
    lane: u32,
    chunk: u32,
}

impl ChunkId {
    fn stream(self, purpose: Purpose) -> rand_chacha::ChaCha8Rng {
        substream(self.seed, purpose, self.lane, self.chunk)
    }
}

/// Run one chunk of trials and return `(bit_errors, bits_transmitted)`.
fn run_chunk(
    mode: &FadingMode<'_>,
    alphabet: &Alphabet,
    n_rx: usize,
    n0: f64,
    id: ChunkId,
    trials: u64,
) -> (u64, u64) {
    let mut channel_rng = id.stream(Purpose::McChannel);
    let mut bits_rng = id.stream(Purpose::McBits);
    let mut noise_rng = id.stream(Purpose::McNoise);
    let mut scratch = match mode {
        FadingMode::PerUse { .. } => Some(Channel::zeroed(n_rx, alphabet.n_columns())),
        FadingMode::Fixed(_) => None,
    };
    let mut y = vec![Complex64::default(); n_rx];
    let mut errors = 0u64;
    let mut bits = 0u64;
    for _ in 0..trials {
        let channel: &Channel = match mode {
            FadingMode::PerUse { rows_per_column } => {
                let ch = scratch.as_mut().expect("scratch channel exists in per-use mode");
                ch.redraw(&mut channel_rng, *rows_per_column);
                ch
            }
            FadingMode::Fixed(ch) => ch,
        };
        let word = alphabet.random_word(&mut bits_rng);
        let (column, point) = map_word(alphabet, word);
        for (yr, hr) in y.iter_mut().zip(channel.column(column)) {
            *yr = hr * point;
        }
        add_noise(&mut y, &mut noise_rng, n0);
        let detected = ml_detect(channel, alphabet, &y);
        errors += bit_errors(word, detected)
            .expect("words from one alphabet share the spatial length") as u64;
        bits += word.len() as u64;
    }
    (errors, bits)
}

/// Estimate the BER at one SNR point, chunked and wave-scheduled.
fn simulate_point(
    mode: &FadingMode<'_>,
    alphabet: &Alphabet,
    n_rx: usize,
    snr_db: f64,
    lane: u32,
    stop: &StopRule,
    seed: u64,
) -> SimResult {
    let n0 = snr_db_to_point(snr_db).n0;
    let mut trials = 0u64;
    let mut errors = 0u64;
    let mut bits = 0u64;
    let mut next_chunk = 0u64;
    loop {
        // Chunk i covers trials [i*CHUNK, min((i+1)*CHUNK, max_trials)).
        let wave: Vec<(u32, u64)> = (0..WAVE_CHUNKS)
            .map_while(|k| {
                let i = next_chunk + k;
                let start = i * CHUNK_TRIALS;
                if start >= stop.max_trials {
                    return None;
                }
                let count = CHUNK_TRIALS.min(stop.max_trials - start);
                Some((i as u32, count))
            })
            .collect();
        if wave.is_empty() {
            break;
        }
        next_chunk += wave.len() as u64;
        let tallies: Vec<(u64, u64, u64)> = wave
            .par_iter()
            .map(|&(chunk, count)| {
                let id = ChunkId { seed, lane, chunk };
                let (e, b) = run_chunk(mode, alphabet, n_rx, n0, id, count);
                (e, b, count)
            })
            .collect();
        for (e, b, t) in tallies {
            errors += e;
            bits += b;
            trials += t;
        }
        if errors >= stop.min_bit_errors || trials >= stop.max_trials {
            break;
        }
    }
    SimResult::from_tally(snr_db, trials, errors, bits)
}

/// Monte Carlo BER sweep with a fresh fading realization every channel use.
/// The configuration's constellation rides on every column.
pub fn simulate_ber(cfg: &SystemConfig, stop: &StopRule, seed: u64) -> Result<Vec<SimResult>> {
    validate_config(cfg)?;
    let alphabet = Alphabet::uniform(cfg.n_columns, Constellation::for_config(cfg)?)?;
    let mode = FadingMode::PerUse {
        rows_per_column: cfg.rows_per_column,
    };
    Ok(cfg
        .snr_grid_db
        .iter()
        .enumerate()
        .map(|(lane, &snr_db)| {
            simulate_point(&mode, &alphabet, cfg.n_rx, snr_db, lane as u32, stop, seed)
        })
        .collect())
}

/// Monte Carlo BER sweep over one fixed channel realization, supporting
/// per-column constellation orders (variable-length bit words).
pub fn simulate_fixed_channel_ber(
    channel: &Channel,
    alphabet: &Alphabet,
    snr_grid_db: &[f64],
    stop: &StopRule,
    seed: u64,
) -> Result<Vec<SimResult>> {
    if channel.n_columns() != alphabet.n_columns() {
        return Err(Error::Dimension(format!(
            "channel has {} columns but the alphabet has {}",
            channel.n_columns(),
            alphabet.n_columns()
        )));
    }
    if snr_grid_db.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("snr grid entries must be finite".into()));
    }
    let mode = FadingMode::Fixed(channel);
    Ok(snr_grid_db
        .iter()
        .enumerate()
        .map(|(lane, &snr_db)| {
            simulate_point(
                &mode,
                alphabet,
                channel.n_rx(),
                snr_db,
                lane as u32,
                stop,
                seed,
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModKind;
    use crate::rng::{substream, Purpose};

    fn two_column_cfg(snr_grid_db: Vec<f64>) -> SystemConfig {
        SystemConfig {
            n_columns: 2,
            rows_per_column: 4,
            n_total_units: 8,
            n_rx: 1,
            mod_order: 1,
            mod_kind: ModKind::Psk,
            snr_grid_db,
        }
    }

    #[test]
    fn deep_noise_ber_is_one_half() {
        let cfg = two_column_cfg(vec![-40.0]);
        let stop = StopRule::new(50_000, 200_000).unwrap();
        let res = simulate_ber(&cfg, &stop, 1234).unwrap();
        assert_eq!(res.len(), 1);
        let r = res[0];
        assert!((r.ber - 0.5).abs() < 0.02, "ber = {}", r.ber);
        assert_eq!(r.ber, r.bit_errors as f64 / r.bits_total as f64);
    }

    #[test]
    fn tallies_and_stop_rule_bookkeeping() {
        let cfg = two_column_cfg(vec![0.0]);
        // Error stop unreachable: runs to the trial cap, partial last chunk.
        let stop = StopRule::new(u64::MAX, 100_000).unwrap();
        let r = simulate_ber(&cfg, &stop, 7).unwrap()[0];
        assert_eq!(r.trials, 100_000);
        assert_eq!(r.bits_total, 100_000); // one bit per use here
        assert!(r.ci95_half_width > 0.0);
        // Trial cap below one chunk is honored exactly.
        let stop = StopRule::new(u64::MAX, 123).unwrap();
        let r = simulate_ber(&cfg, &stop, 7).unwrap()[0];
        assert_eq!(r.trials, 123);
    }

    #[test]
    fn error_stop_quantizes_to_wave_boundaries() {
        let cfg = two_column_cfg(vec![-10.0]);
        let stop = StopRule::new(1, u64::MAX / CHUNK_TRIALS).unwrap();
        let r = simulate_ber(&cfg, &stop, 7).unwrap()[0];
        // At -10 dB errors are plentiful: exactly one wave runs.
        assert_eq!(r.trials, CHUNK_TRIALS * WAVE_CHUNKS);
        assert!(r.bit_errors >= 1);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = SystemConfig {
            n_columns: 2,
            rows_per_column: 2,
            n_total_units: 4,
            n_rx: 2,
            mod_order: 4,
            mod_kind: ModKind::Psk,
            snr_grid_db: vec![0.0, 6.0],
        };
        let stop = StopRule::new(2_000, 2 * CHUNK_TRIALS * WAVE_CHUNKS).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| simulate_ber(&cfg, &stop, 99).unwrap())
        };
        let single = run(1);
        let multi = run(4);
        assert_eq!(single, multi);
        // And rerunning with the same seed is bit-identical.
        assert_eq!(single, run(4));
    }

    #[test]
    fn noiseless_fixed_channel_has_zero_errors() {
        let mut rng = substream(5, Purpose::ChannelDraw, 0, 0);
        let channel = Channel::draw(&mut rng, 2, 2, 4);
        let alphabet = Alphabet::per_column(vec![
            Constellation::psk(2).unwrap(),
            Constellation::psk(8).unwrap(),
        ])
        .unwrap();
        let stop = StopRule::new(10, 20_000).unwrap();
        let res =
            simulate_fixed_channel_ber(&channel, &alphabet, &[200.0], &stop, 3).unwrap();
        assert_eq!(res[0].bit_errors, 0);
        assert_eq!(res[0].ber, 0.0);
        // Mixed orders: total bits reflect the per-column word lengths.
        assert!(res[0].bits_total >= 2 * res[0].trials);
        assert!(res[0].bits_total <= 4 * res[0].trials);
    }

    #[test]
    fn single_column_fixed_channel_is_coherent_mary_detection() {
        // One column, no spatial bits: detection is M-ary on a fixed vector.
        let channel = Channel::from_column_gains(vec![vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.8),
        ]])
        .unwrap();
        let alphabet = Alphabet::per_column(vec![Constellation::psk(4).unwrap()]).unwrap();
        let stop = StopRule::new(500, 500_000).unwrap();
        let res =
            simulate_fixed_channel_ber(&channel, &alphabet, &[-5.0, 5.0], &stop, 11).unwrap();
        // Higher SNR must beat lower SNR by more than the CI slack.
        assert!(res[0].ber > res[1].ber + 3.0 * res[1].ci95_half_width);
    }

    #[test]
    fn fixed_channel_dimension_mismatch_rejected() {
        let channel = Channel::from_column_gains(vec![vec![Complex64::new(1.0, 0.0)]]).unwrap();
        let alphabet = Alphabet::uniform(2, Constellation::psk(2).unwrap()).unwrap();
        let stop = StopRule::new(1, 10).unwrap();
        assert!(simulate_fixed_channel_ber(&channel, &alphabet, &[0.0], &stop, 1).is_err());
    }

    #[test]
    fn stop_rule_validation_and_default() {
        assert!(StopRule::new(0, 10).is_err());
        assert!(StopRule::new(10, 0).is_err());
        let d = StopRule::default_for(4.0);
        assert_eq!(d.min_bit_errors, 200);
        assert_eq!(d.max_trials, 25_000_000);
    }
}
