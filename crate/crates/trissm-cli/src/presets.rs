//! Canned experiments: each preset writes the curve data for one study.

use std::path::{Path, PathBuf};

use anyhow::{bail, Result};

use trissm::adaptive::Candidate;
use trissm::config::{ModKind, SystemConfig};

use crate::run::{execute, StopOverride};
use crate::spec::{default_grid, AdaptationSpec, ExperimentSpec, Mode};

/// Seed presets run under unless overridden; fixed so repeated runs are
/// byte-identical.
pub const DEFAULT_SEED: u64 = 0x5EED_CA5E;

/// A named, self-contained experiment.
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
}

/// Every available preset, in display order.
pub fn catalog() -> Vec<Preset> {
    vec![
        Preset {
            name: "fig2",
            description: "Two columns, one receive antenna, spatial bits only; \
                          column heights 2 and 4 (two output files)",
        },
        Preset {
            name: "fig3",
            description: "BPSK over four columns of four cells, four receive \
                          antennas: simulated BER against the union bound",
        },
        Preset {
            name: "fig4",
            description: "BPSK, four receive antennas, column-count sweep \
                          N = 2, 4, 8 at four cells per column",
        },
        Preset {
            name: "fig5",
            description: "Four columns of four cells, four receive antennas, \
                          constellation sweep QPSK / 8PSK / 16QAM",
        },
        Preset {
            name: "fig6",
            description: "BPSK over four columns of four cells, receive-antenna \
                          sweep N_r = 1, 2, 4",
        },
        Preset {
            name: "fig7",
            description: "Fixed two-column channel at 3 bits per use: uniform \
                          QPSK versus the adaptive allocation, plus the \
                          allocation report",
        },
    ]
}

/// The fixed channel realization the `fig7` preset studies, one row per
/// receive antenna, one `[re, im]` gain per column.
const FIXED_CHANNEL: [[[f64; 2]; 2]; 2] = [
    [[-2.1550, -1.8483], [-0.2703, 2.5219]],
    [[-0.1560, 2.2516], [-0.4722, -1.4695]],
];

fn scenario(
    n_columns: usize,
    rows_per_column: usize,
    n_rx: usize,
    mod_order: usize,
    mod_kind: ModKind,
) -> SystemConfig {
    SystemConfig {
        n_columns,
        rows_per_column,
        n_total_units: n_columns * rows_per_column,
        n_rx,
        mod_order,
        mod_kind,
        snr_grid_db: default_grid(),
    }
}

fn simulate_spec(output: &str, cfg: SystemConfig) -> ExperimentSpec {
    ExperimentSpec {
        mode: Mode::Simulate,
        scenario: Some(cfg),
        adaptation: None,
        seed: DEFAULT_SEED,
        stop: None,
        output_path: output.to_owned(),
    }
}

fn fixed_channel_adaptation() -> AdaptationSpec {
    AdaptationSpec {
        channel: FIXED_CHANNEL
            .iter()
            .map(|row| row.to_vec())
            .collect(),
        xi_bar: 3.0,
        candidates: None,
        domain: Default::default(),
        uniform: Some(Candidate {
            order: 4,
            kind: ModKind::Psk,
        }),
        snr_grid_db: None,
    }
}

/// The experiment list behind a preset name.
fn specs_for(name: &str) -> Result<Vec<ExperimentSpec>> {
    use ModKind::{Psk, Qam};
    Ok(match name {
        "fig2" => vec![
            simulate_spec("fig2_ln2.csv", scenario(2, 2, 1, 1, Psk)),
            simulate_spec("fig2_ln4.csv", scenario(2, 4, 1, 1, Psk)),
        ],
        "fig3" => vec![simulate_spec("fig3.csv", scenario(4, 4, 4, 2, Psk))],
        "fig4" => vec![
            simulate_spec("fig4_n2.csv", scenario(2, 4, 4, 2, Psk)),
            simulate_spec("fig4_n4.csv", scenario(4, 4, 4, 2, Psk)),
            simulate_spec("fig4_n8.csv", scenario(8, 4, 4, 2, Psk)),
        ],
        "fig5" => vec![
            simulate_spec("fig5_m4psk.csv", scenario(4, 4, 4, 4, Psk)),
            simulate_spec("fig5_m8psk.csv", scenario(4, 4, 4, 8, Psk)),
            simulate_spec("fig5_m16qam.csv", scenario(4, 4, 4, 16, Qam)),
        ],
        "fig6" => vec![
            simulate_spec("fig6_nr1.csv", scenario(4, 4, 1, 2, Psk)),
            simulate_spec("fig6_nr2.csv", scenario(4, 4, 2, 2, Psk)),
            simulate_spec("fig6_nr4.csv", scenario(4, 4, 4, 2, Psk)),
        ],
        "fig7" => vec![
            ExperimentSpec {
                mode: Mode::Compare,
                scenario: None,
                adaptation: Some(fixed_channel_adaptation()),
                seed: DEFAULT_SEED,
                stop: None,
                output_path: "fig7_compare.csv".to_owned(),
            },
            ExperimentSpec {
                mode: Mode::Adapt,
                scenario: None,
                adaptation: Some(fixed_channel_adaptation()),
                seed: DEFAULT_SEED,
                stop: None,
                output_path: "fig7_allocation.json".to_owned(),
            },
        ],
        other => bail!("unknown preset `{other}`; run `trissm presets` for the list"),
    })
}

/// Run a preset, writing its files under `out_dir`. Returns the paths
/// written.
pub fn run(
    name: &str,
    out_dir: &Path,
    seed_override: Option<u64>,
    stop_override: StopOverride,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for mut spec in specs_for(name)? {
        if let Some(seed) = seed_override {
            spec.seed = seed;
        }
        spec.validate()?;
        files.extend(execute(&spec, out_dir, stop_override)?);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use trissm::config::validate_config;

    #[test]
    fn catalog_has_six_presets() {
        assert_eq!(catalog().len(), 6);
    }

    #[test]
    fn every_preset_spec_validates() {
        for preset in catalog() {
            for spec in specs_for(preset.name).unwrap() {
                spec.validate().unwrap();
                if let Some(cfg) = &spec.scenario {
                    validate_config(cfg).unwrap();
                }
            }
        }
    }

    #[test]
    fn unknown_preset_is_rejected() {
        assert!(specs_for("fig99").is_err());
    }
}
