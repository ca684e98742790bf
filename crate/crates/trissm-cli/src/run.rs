//! Mode executors: turn a validated spec into output files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use trissm::adaptive::{optimize_improved, optimize_si, Candidate, DistanceReport, PairDomain, RateAllocation};
use trissm::analysis::analyze_curve;
use trissm::config::ModKind;
use trissm::constellation::Constellation;
use trissm::montecarlo::{simulate_ber, simulate_fixed_channel_ber, SimResult, StopRule};
use trissm::txrx::Alphabet;

use crate::spec::{default_grid, AdaptationSpec, ExperimentSpec, Mode};

/// Fixed header of curve CSV files; columns a mode does not produce stay
/// empty.
pub const CURVE_HEADER: &str = "snr_db,abep_vb,abep_eb,abep_asy,ber_mc,trials,bit_errors,ci95";

/// Fixed header of compare-mode CSV files.
pub const COMPARE_HEADER: &str = "snr_db,scheme,ber_mc,trials,bit_errors,ci95";

/// Command-line overrides applied on top of the spec's stop rule.
#[derive(Debug, Clone, Copy, Default)]
pub struct StopOverride {
    pub min_bit_errors: Option<u64>,
    pub max_trials: Option<u64>,
}

impl StopOverride {
    fn apply(&self, base: StopRule) -> Result<StopRule> {
        Ok(StopRule::new(
            self.min_bit_errors.unwrap_or(base.min_bit_errors),
            self.max_trials.unwrap_or(base.max_trials),
        )?)
    }
}

/// Run one experiment, writing its output file under `out_dir`.
/// Returns the paths written.
pub fn execute(
    spec: &ExperimentSpec,
    out_dir: &Path,
    stop_override: StopOverride,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let text = match spec.mode {
        Mode::Analyze => render_analyze(spec)?,
        Mode::Simulate => render_simulate(spec, stop_override)?,
        Mode::Adapt => render_adapt(spec)?,
        Mode::Compare => render_compare(spec, stop_override)?,
    };
    let path = out_dir.join(&spec.output_path);
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(vec![path])
}

/// Shortest round-trip representation in scientific notation, so files are
/// byte-stable and lossless.
fn prob(v: f64) -> String {
    format!("{v:e}")
}

fn scenario_of(spec: &ExperimentSpec) -> &trissm::config::SystemConfig {
    spec.scenario.as_ref().expect("validated spec has a scenario")
}

fn adaptation_of(spec: &ExperimentSpec) -> &AdaptationSpec {
    spec.adaptation
        .as_ref()
        .expect("validated spec has an adaptation section")
}

fn render_analyze(spec: &ExperimentSpec) -> Result<String> {
    let cfg = scenario_of(spec);
    let curve = analyze_curve(cfg)?;
    let mut out = String::with_capacity(64 * (curve.len() + 1));
    writeln!(out, "{CURVE_HEADER}")?;
    for p in curve {
        writeln!(
            out,
            "{},{},{},{},,,,",
            p.snr_db,
            prob(p.abep_vb),
            prob(p.abep_eb),
            prob(p.abep_asy),
        )?;
    }
    Ok(out)
}

fn render_simulate(spec: &ExperimentSpec, stop_override: StopOverride) -> Result<String> {
    let cfg = scenario_of(spec);
    let stop = stop_override.apply(spec.stop_rule(cfg.bits_per_use() as f64))?;
    let curve = analyze_curve(cfg)?;
    let sim = simulate_ber(cfg, &stop, spec.seed)?;
    let mut out = String::with_capacity(96 * (curve.len() + 1));
    writeln!(out, "{CURVE_HEADER}")?;
    for (p, r) in curve.iter().zip(&sim) {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            p.snr_db,
            prob(p.abep_vb),
            prob(p.abep_eb),
            prob(p.abep_asy),
            prob(r.ber),
            r.trials,
            r.bit_errors,
            prob(r.ci95_half_width),
        )?;
    }
    Ok(out)
}

/// The rate-allocation report emitted by `adapt` mode.
#[derive(Debug, Serialize)]
struct AdaptReport {
    xi_bar: f64,
    domain: PairDomain,
    candidates: Vec<Candidate>,
    improved: ImprovedEntry,
    simplified: SimplifiedEntry,
}

#[derive(Debug, Serialize)]
struct ImprovedEntry {
    allocation: RateAllocation,
    distance: DistanceReport,
}

#[derive(Debug, Serialize)]
struct SimplifiedEntry {
    allocation: RateAllocation,
    objective: f64,
}

fn render_adapt(spec: &ExperimentSpec) -> Result<String> {
    let adaptation = adaptation_of(spec);
    let channel = adaptation.to_channel()?;
    let pool = adaptation.candidate_pool();
    let (improved, distance) =
        optimize_improved(&channel, adaptation.xi_bar, &pool, adaptation.domain)?;
    let (simplified, objective) = optimize_si(&channel, adaptation.xi_bar, &pool)?;
    let report = AdaptReport {
        xi_bar: adaptation.xi_bar,
        domain: adaptation.domain,
        candidates: pool,
        improved: ImprovedEntry {
            allocation: improved,
            distance,
        },
        simplified: SimplifiedEntry {
            allocation: simplified,
            objective,
        },
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    Ok(text)
}

/// The baseline every-column constellation for `compare` mode: explicit in
/// the spec, or the order that meets the rate target uniformly.
fn uniform_baseline(adaptation: &AdaptationSpec, n_columns: usize) -> Result<Constellation> {
    if let Some(c) = adaptation.uniform {
        return Constellation::new(c.kind, c.order)
            .context("invalid `adaptation.uniform` constellation");
    }
    let spatial = (n_columns as f64).log2();
    let symbol_bits = adaptation.xi_bar - spatial;
    let rounded = symbol_bits.round();
    if rounded < 0.0 || (symbol_bits - rounded).abs() > 1e-9 {
        bail!(
            "no implied uniform baseline: rate target {} minus {} spatial bits \
             is not a whole symbol-bit count; set `adaptation.uniform`",
            adaptation.xi_bar,
            spatial,
        );
    }
    Ok(Constellation::new(ModKind::Psk, 1usize << rounded as u32)?)
}

fn render_compare(spec: &ExperimentSpec, stop_override: StopOverride) -> Result<String> {
    let adaptation = adaptation_of(spec);
    let channel = adaptation.to_channel()?;
    let pool = adaptation.candidate_pool();
    let (improved, _) = optimize_improved(&channel, adaptation.xi_bar, &pool, adaptation.domain)?;
    let uniform = Alphabet::uniform(
        channel.n_columns(),
        uniform_baseline(adaptation, channel.n_columns())?,
    )?;
    let grid = adaptation
        .snr_grid_db
        .clone()
        .unwrap_or_else(default_grid);
    let stop = stop_override.apply(spec.stop_rule(adaptation.xi_bar))?;
    let schemes: [(&str, Alphabet); 2] = [("uniform", uniform), ("improved", improved.alphabet()?)];

    let mut out = String::with_capacity(80 * (2 * grid.len() + 1));
    writeln!(out, "{COMPARE_HEADER}")?;
    for (name, alphabet) in &schemes {
        let results = simulate_fixed_channel_ber(&channel, alphabet, &grid, &stop, spec.seed)?;
        for r in &results {
            writeln!(out, "{}", compare_row(name, r))?;
        }
    }
    Ok(out)
}

fn compare_row(scheme: &str, r: &SimResult) -> String {
    format!(
        "{},{},{},{},{},{}",
        r.snr_db,
        scheme,
        prob(r.ber),
        r.trials,
        r.bit_errors,
        prob(r.ci95_half_width),
    )
}
