//! Experiment spec files: the JSON contract between callers and the runner.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use trissm::adaptive::{default_candidates, Candidate, PairDomain};
use trissm::channel::Channel;
use trissm::config::{validate_config, SystemConfig};
use trissm::montecarlo::StopRule;
use trissm::Complex64;

/// What the runner should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Closed-form error-probability curves only.
    Analyze,
    /// Monte Carlo link simulation alongside the closed-form curves.
    Simulate,
    /// Channel-adaptive rate-allocation report.
    Adapt,
    /// Simulated error rates of the uniform and adaptive allocations on one
    /// fixed channel.
    Compare,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Analyze => "analyze",
            Mode::Simulate => "simulate",
            Mode::Adapt => "adapt",
            Mode::Compare => "compare",
        }
    }
}

/// Stop-rule section of a spec file.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopSpec {
    pub min_bit_errors: u64,
    pub max_trials: u64,
}

/// Fixed-channel adaptation section: required in `adapt` and `compare` modes.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptationSpec {
    /// Fixed channel gains, one row per receive antenna, one `[re, im]`
    /// entry per surface column.
    pub channel: Vec<Vec<[f64; 2]>>,
    /// Average rate target in bits per channel use.
    pub xi_bar: f64,
    /// Candidate per-column constellations (defaults to BPSK, QPSK, 8QAM,
    /// 16QAM).
    #[serde(default)]
    pub candidates: Option<Vec<Candidate>>,
    /// Which hypothesis pairs the distance objective minimizes over.
    #[serde(default)]
    pub domain: PairDomain,
    /// Baseline constellation for `compare` mode; defaults to the uniform
    /// order implied by `xi_bar`.
    #[serde(default)]
    pub uniform: Option<Candidate>,
    /// SNR grid for `compare` mode (defaults to the standard sweep).
    #[serde(default)]
    pub snr_grid_db: Option<Vec<f64>>,
}

/// A full experiment description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub mode: Mode,
    /// Fading-link scenario: required in `analyze` and `simulate` modes.
    #[serde(default)]
    pub scenario: Option<SystemConfig>,
    /// Fixed-channel adaptation inputs: required in `adapt` and `compare`
    /// modes.
    #[serde(default)]
    pub adaptation: Option<AdaptationSpec>,
    /// Master RNG seed for every stochastic stage.
    pub seed: u64,
    /// Monte Carlo stop rule; defaults to 200 bit errors or a 10^8-bit
    /// budget per SNR point.
    #[serde(default)]
    pub stop: Option<StopSpec>,
    /// Output file name, resolved inside the output directory.
    pub output_path: String,
}

impl ExperimentSpec {
    /// Parse and validate a spec file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read spec file {}", path.display()))?;
        let spec: ExperimentSpec = serde_json::from_str(&text)
            .with_context(|| format!("malformed experiment spec {}", path.display()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Check mode-specific required sections and the scenario invariants.
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::Analyze | Mode::Simulate => {
                let Some(scenario) = &self.scenario else {
                    bail!("{} mode requires the `scenario` field", self.mode.as_str());
                };
                if self.adaptation.is_some() {
                    bail!(
                        "`adaptation` is not used in {} mode; remove it",
                        self.mode.as_str()
                    );
                }
                validate_config(scenario).context("invalid `scenario`")?;
            }
            Mode::Adapt | Mode::Compare => {
                let Some(adaptation) = &self.adaptation else {
                    bail!("{} mode requires the `adaptation` field", self.mode.as_str());
                };
                if self.scenario.is_some() {
                    bail!(
                        "`scenario` is not used in {} mode; remove it",
                        self.mode.as_str()
                    );
                }
                adaptation.validate()?;
            }
        }
        if let Some(stop) = &self.stop {
            StopRule::new(stop.min_bit_errors, stop.max_trials).context("invalid `stop`")?;
        }
        if self.output_path.is_empty() {
            bail!("`output_path` must not be empty");
        }
        Ok(())
    }

    /// The stop rule to use, given the scenario's rate.
    pub fn stop_rule(&self, bits_per_use: f64) -> StopRule {
        match &self.stop {
            Some(s) => StopRule {
                min_bit_errors: s.min_bit_errors,
                max_trials: s.max_trials,
            },
            None => StopRule::default_for(bits_per_use),
        }
    }
}

impl AdaptationSpec {
    fn validate(&self) -> Result<()> {
        self.to_channel()?;
        if !(self.xi_bar.is_finite() && self.xi_bar > 0.0) {
            bail!("`adaptation.xi_bar` must be positive, got {}", self.xi_bar);
        }
        if let Some(cands) = &self.candidates {
            if cands.is_empty() {
                bail!("`adaptation.candidates` must not be empty when present");
            }
        }
        if let Some(grid) = &self.snr_grid_db {
            if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
                bail!("`adaptation.snr_grid_db` must be non-empty and finite");
            }
        }
        Ok(())
    }

    /// Reassemble the row-major gain matrix into per-column gain vectors.
    pub fn to_channel(&self) -> Result<Channel> {
        let n_rx = self.channel.len();
        if n_rx == 0 {
            bail!("`adaptation.channel` must have at least one row");
        }
        let n_columns = self.channel[0].len();
        if self.channel.iter().any(|row| row.len() != n_columns) {
            bail!("`adaptation.channel` rows must all have the same length");
        }
        let cols: Vec<Vec<Complex64>> = (0..n_columns)
            .map(|n| {
                (0..n_rx)
                    .map(|r| {
                        let [re, im] = self.channel[r][n];
                        Complex64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        Channel::from_column_gains(cols).context("invalid `adaptation.channel`")
    }

    /// The candidate pool, falling back to the default set.
    pub fn candidate_pool(&self) -> Vec<Candidate> {
        self.candidates.clone().unwrap_or_else(default_candidates)
    }
}

/// The standard SNR sweep: -10 dB to 30 dB in 2 dB steps.
pub fn default_grid() -> Vec<f64> {
    (-10..=30).step_by(2).map(f64::from).collect()
}
