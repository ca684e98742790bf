//! Channel-adaptive per-column rate allocation.
//!
//! Given one fixed channel realization, the transmitter may give each column
//! its own constellation order, keeping the *average* bits per channel use at
//! a target while moving rate away from weak or strongly coupled columns.
//! The improved scheme maximizes the minimum squared receive distance over
//! all candidate allocations by exhaustive enumeration; the simplified (SI)
//! scheme maximizes a cheaper cross-column surrogate that drops the
//! symbol-energy terms' dependence on the pair (exact for unit-modulus
//! constellations).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::config::{log2_exact, ModKind};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::txrx::Alphabet;

/// Relative tolerance under which two objective values count as tied, at
/// which point the deterministic tie-break (smallest maximum order, then
/// lexicographic candidate sequence) decides. Exact geometric symmetries
/// routinely produce mathematically equal objectives, so a raw `>` would let
/// rounding noise pick the winner.
const TIE_EPS: f64 = 1e-12;

/// One allowed per-column constellation choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Candidate {
    /// Constellation order.
    pub order: usize,
    /// Constellation family.
    pub kind: ModKind,
}

impl Candidate {
    /// Bits this candidate carries per symbol.
    fn bits(&self) -> u32 {
        log2_exact(self.order).expect("validated candidate")
    }

    /// Sort key: order first, then family (PSK before QAM).
    fn sort_key(&self) -> (usize, u8) {
        (self.order, match self.kind {
            ModKind::Psk => 0,
            ModKind::Qam => 1,
        })
    }

    /// Build this candidate's constellation.
    fn constellation(&self) -> Result<Constellation> {
        Constellation::new(self.kind, self.order)
    }
}

/// The default candidate set: binary and quaternary PSK, then grid
/// constellations for the higher orders.
pub fn default_candidates() -> Vec<Candidate> {
    vec![
        Candidate { order: 2, kind: ModKind::Psk },
        Candidate { order: 4, kind: ModKind::Psk },
        Candidate { order: 8, kind: ModKind::Qam },
        Candidate { order: 16, kind: ModKind::Qam },
    ]
}

/// Which ordered hypothesis pairs a minimum-distance search ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairDomain {
    /// Every pair of distinct hypotheses `(n, m) != (n_hat, m_hat)` — the
    /// full error-event set, matching the union bound's pair sum.
    #[default]
    AllDistinct,
    /// Only pairs with different columns (`n_hat != n`), any symbols.
    CrossColumn,
    /// Only pairs with different columns *and* different symbol indices
    /// (`n_hat != n` and `m_hat != m`) — the strictest reading of the
    /// adaptive objective; selectable for exact-reproduction runs.
    CrossColumnDistinctSymbol,
}

impl PairDomain {
    fn admits(self, n: usize, m: u32, n_hat: usize, m_hat: u32) -> bool {
        match self {
            PairDomain::AllDistinct => n != n_hat || m != m_hat,
            PairDomain::CrossColumn => n != n_hat,
            PairDomain::CrossColumnDistinctSymbol => n != n_hat && m != m_hat,
        }
    }
}

/// A per-column rate assignment meeting an average-rate target exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateAllocation {
    /// The constellation each column carries.
    pub per_column: Vec<Candidate>,
    /// Per-column rates in bits per use: spatial bits plus that column's
    /// symbol bits.
    pub xi_n: Vec<f64>,
    /// The average of `xi_n` (the rate target, met exactly).
    pub xi_bar: f64,
}

impl RateAllocation {
    fn from_candidates(per_column: Vec<Candidate>) -> Self {
        let n = per_column.len();
        let spatial = log2_exact(n).expect("column count is a power of two") as f64;
        let xi_n: Vec<f64> = per_column
            .iter()
            .map(|c| spatial + c.bits() as f64)
            .collect();
        let xi_bar = xi_n.iter().sum::<f64>() / n as f64;
        RateAllocation {
            per_column,
            xi_n,
            xi_bar,
        }
    }

    /// The per-column constellation orders.
    pub fn orders(&self) -> Vec<usize> {
        self.per_column.iter().map(|c| c.order).collect()
    }

    /// The largest order any column carries.
    pub fn max_order(&self) -> usize {
        self.per_column.iter().map(|c| c.order).max().unwrap_or(0)
    }

    /// Materialize the allocation as a detection alphabet.
    pub fn alphabet(&self) -> Result<Alphabet> {
        let cols = self
            .per_column
            .iter()
            .map(Candidate::constellation)
            .collect::<Result<Vec<_>>>()?;
        Alphabet::per_column(cols)
    }

    /// Tie-break key: smallest maximum order wins, then the lexicographically
    /// smallest per-column (order, family) sequence.
    fn tie_key(&self) -> (usize, Vec<(usize, u8)>) {
        (
            self.max_order(),
            self.per_column.iter().map(Candidate::sort_key).collect(),
        )
    }
}

/// The minimum squared receive distance over a pair domain, with the pair
/// achieving it and that pair's channel inner products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    /// The minimum of `|s|^2 tau1 + |s_hat|^2 tau2 - 2 Re{s conj(s_hat) tau3}`.
    pub d_min_sq: f64,
    /// The `((n, m), (n_hat, m_hat))` pair attaining the minimum.
    pub argmin_pair: ((usize, u32), (usize, u32)),
    /// Squared norm of the first column's gain vector.
    pub tau1: f64,
    /// Squared norm of the second column's gain vector.
    pub tau2: f64,
    /// Inner product of the two columns' gain vectors.
    pub tau3: Complex64,
}

/// Exact minimum squared receive distance of an alphabet on a fixed channel,
/// over the ordered pairs a domain admits.
pub fn min_distance(
    channel: &Channel,
    alphabet: &Alphabet,
    domain: PairDomain,
) -> Result<DistanceReport> {
    if channel.n_columns() != alphabet.n_columns() {
        return Err(Error::Dimension(format!(
            "channel has {} columns but the alphabet has {}",
            channel.n_columns(),
            alphabet.n_columns()
        )));
    }
    let n = channel.n_columns();
    let mut best: Option<DistanceReport> = None;
    for col in 0..n {
        for col_hat in 0..n {
            let stats = channel.column_pair_stats(col, col_hat);
            let c = alphabet.column_constellation(col);
            let c_hat = alphabet.column_constellation(col_hat);
            for m in 0..c.order() as u32 {
                let s = c.point(m);
                for m_hat in 0..c_hat.order() as u32 {
                    if !domain.admits(col, m, col_hat, m_hat) {
                        continue;
                    }
                    let s_hat = c_hat.point(m_hat);
                    let d_sq = (s.norm_sqr() * stats.tau1 + s_hat.norm_sqr() * stats.tau2
                        - 2.0 * (s * s_hat.conj() * stats.tau3).re)
                        .max(0.0);
                    if best.is_none_or(|b| d_sq < b.d_min_sq) {
                        best = Some(DistanceReport {
                            d_min_sq: d_sq,
                            argmin_pair: ((col, m), (col_hat, m_hat)),
                            tau1: stats.tau1,
                            tau2: stats.tau2,
                            tau3: stats.tau3,
                        });
                    }
                }
            }
        }
    }
    best.ok_or_else(|| {
        Error::Infeasible("the pair domain admits no hypothesis pairs".into())
    })
}

/// All per-column assignments from `candidates` whose average rate equals
/// `xi_bar` exactly, in deterministic (lexicographic) order.
pub fn enumerate_allocations(
    n_columns: usize,
    xi_bar: f64,
    candidates: &[Candidate],
) -> Result<Vec<RateAllocation>> {
    let spatial = log2_exact(n_columns).ok_or_else(|| {
        Error::Dimension(format!(
            "column count must be a power of two, got {n_columns}"
        ))
    })? as f64;
    if candidates.is_empty() {
        return Err(Error::Domain("candidate set must be nonempty".into()));
    }
    for c in candidates {
        if !c.kind.supports_order(c.order) {
            return Err(Error::UnsupportedOrder {
                order: c.order,
                family: match c.kind {
                    ModKind::Psk => "psk",
                    ModKind::Qam => "qam",
                },
            });
        }
    }
    let mut pool: Vec<Candidate> = candidates.to_vec();
    pool.sort_by_key(Candidate::sort_key);
    pool.dedup();

    // Total symbol bits the columns must share.
    let total_symbol_bits = n_columns as f64 * (xi_bar - spatial);
    let target = total_symbol_bits.round();
    if (total_symbol_bits - target).abs() > 1e-9 || target < 0.0 {
        return Err(Error::Infeasible(format!(
            "average rate {xi_bar} needs {total_symbol_bits} total symbol bits \
             across {n_columns} columns, which is not a nonnegative integer"
        )));
    }
    let mut search = AllocationSearch {
        pool: &pool,
        n_columns,
        target: target as u32,
        min_bits: pool.iter().map(Candidate::bits).min().unwrap(),
        max_bits: pool.iter().map(Candidate::bits).max().unwrap(),
        stack: Vec::with_capacity(n_columns),
        out: Vec::new(),
    };
    search.descend(0);
    let out = search.out;
    if out.is_empty() {
        return Err(Error::Infeasible(format!(
            "no assignment of the candidate orders to {n_columns} columns \
             averages {xi_bar} bits per use"
        )));
    }
    Ok(out)
}

/// Depth-first enumeration of per-column candidate assignments hitting an
/// exact total of symbol bits, pruned by the reachable-bit range.
struct AllocationSearch<'a> {
    pool: &'a [Candidate],
    n_columns: usize,
    target: u32,
    min_bits: u32,
    max_bits: u32,
    stack: Vec<Candidate>,
    out: Vec<RateAllocation>,
}

impl AllocationSearch<'_> {
    fn descend(&mut self, used: u32) {
        let left_cols = (self.n_columns - self.stack.len()) as u32;
        if left_cols == 0 {
            if used == self.target {
                self.out
                    .push(RateAllocation::from_candidates(self.stack.clone()));
            }
            return;
        }
        let remaining = self.target.saturating_sub(used);
        if used > self.target
            || remaining < left_cols * self.min_bits
            || remaining > left_cols * self.max_bits
        {
            return;
        }
        for i in 0..self.pool.len() {
            let candidate = self.pool[i];
            self.stack.push(candidate);
            self.descend(used + candidate.bits());
            self.stack.pop();
        }
    }
}

/// Is `(obj_a, alloc_a)` a strictly better pick than `(obj_b, alloc_b)`?
/// Larger objective wins; objectives within [`TIE_EPS`] relative distance
/// fall through to the deterministic tie-break.
fn beats(obj_a: f64, a: &RateAllocation, obj_b: f64, b: &RateAllocation) -> bool {
    let tied = (obj_a - obj_b).abs() <= TIE_EPS * obj_a.abs().max(obj_b.abs());
    if tied {
        a.tie_key() < b.tie_key()
    } else {
        obj_a > obj_b
    }
}

/// The improved scheme: over every allocation meeting the rate target,
/// maximize the minimum squared receive distance on this channel.
pub fn optimize_improved(
    channel: &Channel,
    xi_bar: f64,
    candidates: &[Candidate],
    domain: PairDomain,
) -> Result<(RateAllocation, DistanceReport)> {
    let allocations = enumerate_allocations(channel.n_columns(), xi_bar, candidates)?;
    let mut best: Option<(RateAllocation, DistanceReport)> = None;
    for alloc in allocations {
        let report = min_distance(channel, &alloc.alphabet()?, domain)?;
        let replace = match &best {
            None => true,
            Some((b_alloc, b_report)) => {
                beats(report.d_min_sq, &alloc, b_report.d_min_sq, b_alloc)
            }
        };
        if replace {
            best = Some((alloc, report));
        }
    }
    best.ok_or_else(|| Error::Infeasible("no feasible allocation".into()))
}

/// The simplified (SI) scheme's objective for one allocation: the worst
/// ordered column pair's `tau1 + tau2 - max_{m, m_hat} 2 Re{s_m conj(s_m_hat)
/// tau3}`. For unit-modulus constellations this equals the true cross-column
/// minimum squared distance; in general it drops the per-pair symbol-energy
/// weighting, which is what makes it cheap.
fn si_objective(channel: &Channel, alloc: &RateAllocation) -> Result<f64> {
    let n = channel.n_columns();
    let consts: Vec<Constellation> = alloc
        .per_column
        .iter()
        .map(Candidate::constellation)
        .collect::<Result<_>>()?;
    let mut worst = f64::INFINITY;
    for col in 0..n {
        for col_hat in 0..n {
            if col == col_hat {
                continue;
            }
            let stats = channel.column_pair_stats(col, col_hat);
            let mut coupling = f64::NEG_INFINITY;
            for s in consts[col].points() {
                for s_hat in consts[col_hat].points() {
                    coupling = coupling.max(2.0 * (s * s_hat.conj() * stats.tau3).re);
                }
            }
            worst = worst.min(stats.tau1 + stats.tau2 - coupling);
        }
    }
    if worst.is_finite() {
        Ok(worst)
    } else {
        Err(Error::Infeasible(
            "the simplified objective needs at least two columns".into(),
        ))
    }
}

/// The simplified scheme: maximize [`si_objective`] over every allocation
/// meeting the rate target. Returns the winner and its objective value.
pub fn optimize_si(
    channel: &Channel,
    xi_bar: f64,
    candidates: &[Candidate],
) -> Result<(RateAllocation, f64)> {
    let allocations = enumerate_allocations(channel.n_columns(), xi_bar, candidates)?;
    let mut best: Option<(RateAllocation, f64)> = None;
    for alloc in allocations {
        let obj = si_objective(channel, &alloc)?;
        let replace = match &best {
            None => true,
            Some((b_alloc, b_obj)) => beats(obj, &alloc, *b_obj, b_alloc),
        };
        if replace {
            best = Some((alloc, obj));
        }
    }
    best.ok_or_else(|| Error::Infeasible("no feasible allocation".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Purpose};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn psk_candidates(orders: &[usize]) -> Vec<Candidate> {
        orders
            .iter()
            .map(|&order| Candidate { order, kind: ModKind::Psk })
            .collect()
    }

    fn random_channel(seed: u64, n_rx: usize, n_columns: usize) -> Channel {
        let mut rng = substream(seed, Purpose::ChannelDraw, 0, 0);
        Channel::draw(&mut rng, n_rx, n_columns, 1)
    }

    #[test]
    fn enumeration_matches_hand_count() {
        let allocs = enumerate_allocations(2, 3.0, &psk_candidates(&[2, 4, 8])).unwrap();
        let orders: Vec<Vec<usize>> = allocs.iter().map(RateAllocation::orders).collect();
        assert_eq!(orders, vec![vec![2, 8], vec![4, 4], vec![8, 2]]);
        for a in &allocs {
            assert_eq!(a.xi_bar, 3.0);
            let mean = a.xi_n.iter().sum::<f64>() / a.xi_n.len() as f64;
            assert_eq!(mean, 3.0);
        }
        assert_eq!(allocs[0].xi_n, vec![2.0, 4.0]);
    }

    #[test]
    fn enumeration_trivial_and_infeasible_cases() {
        let only = enumerate_allocations(2, 2.0, &psk_candidates(&[2, 4, 8])).unwrap();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].orders(), vec![2, 2]);
        assert!(matches!(
            enumerate_allocations(2, 10.0, &psk_candidates(&[2, 4])),
            Err(Error::Infeasible(_))
        ));
        // Fractional total symbol bits cannot be met exactly.
        assert!(enumerate_allocations(2, 2.25, &psk_candidates(&[2, 4])).is_err());
        assert!(enumerate_allocations(3, 3.0, &psk_candidates(&[2])).is_err());
        assert!(enumerate_allocations(2, 3.0, &[]).is_err());
    }

    #[test]
    fn min_distance_orthogonal_columns() {
        // Orthogonal unit columns: tau3 = 0, so cross-column distances are
        // tau1 + tau2 regardless of the symbols.
        let channel = Channel::from_column_gains(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
        .unwrap();
        let alphabet = Alphabet::uniform(2, Constellation::psk(2).unwrap()).unwrap();
        let cross = min_distance(&channel, &alphabet, PairDomain::CrossColumn).unwrap();
        assert_abs_diff_eq!(cross.d_min_sq, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cross.tau3.norm(), 0.0, epsilon = 1e-15);
        // The full domain also sees the in-column binary pairs at 4*tau1.
        let all = min_distance(&channel, &alphabet, PairDomain::AllDistinct).unwrap();
        assert_abs_diff_eq!(all.d_min_sq, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn min_distance_single_column_binary() {
        let channel = Channel::from_column_gains(vec![vec![
            Complex64::new(0.6, 0.3),
            Complex64::new(-0.2, 0.9),
        ]])
        .unwrap();
        let alphabet = Alphabet::per_column(vec![Constellation::psk(2).unwrap()]).unwrap();
        let norm_sq: f64 = channel.column(0).iter().map(|h| h.norm_sqr()).sum();
        let report = min_distance(&channel, &alphabet, PairDomain::AllDistinct).unwrap();
        assert_abs_diff_eq!(report.d_min_sq, 4.0 * norm_sq, epsilon = 1e-12);
    }

    #[test]
    fn min_distance_matches_brute_force_vector_oracle() {
        for seed in 0..20u64 {
            let channel = random_channel(seed, 2, 4);
            let alphabet = Alphabet::per_column(vec![
                Constellation::psk(2).unwrap(),
                Constellation::qam(16).unwrap(),
                Constellation::psk(4).unwrap(),
                Constellation::qam(8).unwrap(),
            ])
            .unwrap();
            for domain in [
                PairDomain::AllDistinct,
                PairDomain::CrossColumn,
                PairDomain::CrossColumnDistinctSymbol,
            ] {
                let report = min_distance(&channel, &alphabet, domain).unwrap();
                // Independent oracle: assemble the received difference
                // vectors explicitly and take the smallest norm.
                let mut oracle = f64::INFINITY;
                for n in 0..4usize {
                    for m in 0..alphabet.column_constellation(n).order() as u32 {
                        for n_hat in 0..4usize {
                            for m_hat in
                                0..alphabet.column_constellation(n_hat).order() as u32
                            {
                                if !domain.admits(n, m, n_hat, m_hat) {
                                    continue;
                                }
                                let s = alphabet.column_constellation(n).point(m);
                                let s_hat =
                                    alphabet.column_constellation(n_hat).point(m_hat);
                                let d: f64 = (0..2)
                                    .map(|r| {
                                        (channel.column(n)[r] * s
                                            - channel.column(n_hat)[r] * s_hat)
                                            .norm_sqr()
                                    })
                                    .sum();
                                oracle = oracle.min(d);
                            }
                        }
                    }
                }
                assert_abs_diff_eq!(report.d_min_sq, oracle, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pair_domain_can_be_empty() {
        let channel = random_channel(3, 2, 1);
        let alphabet = Alphabet::per_column(vec![Constellation::psk(2).unwrap()]).unwrap();
        assert!(min_distance(&channel, &alphabet, PairDomain::CrossColumn).is_err());
    }

    #[test]
    fn identical_columns_tie_breaks_to_smallest_max_order() {
        // Both columns equal: every cross pair with equal symbol values has
        // zero distance, so every allocation ties at 0 and the tie-break
        // must pick the smallest maximum order, deterministically.
        let col = vec![Complex64::new(0.8, -0.1), Complex64::new(0.3, 0.4)];
        let channel = Channel::from_column_gains(vec![col.clone(), col]).unwrap();
        let (alloc, report) = optimize_improved(
            &channel,
            3.0,
            &psk_candidates(&[2, 4, 8]),
            PairDomain::AllDistinct,
        )
        .unwrap();
        assert_eq!(alloc.orders(), vec![4, 4]);
        assert_abs_diff_eq!(report.d_min_sq, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_feasible_allocation_is_returned() {
        let channel = random_channel(8, 2, 2);
        let (alloc, _) = optimize_improved(
            &channel,
            2.0,
            &psk_candidates(&[2, 4, 8]),
            PairDomain::AllDistinct,
        )
        .unwrap();
        assert_eq!(alloc.orders(), vec![2, 2]);
        assert!(optimize_improved(
            &channel,
            20.0,
            &psk_candidates(&[2, 4]),
            PairDomain::AllDistinct
        )
        .is_err());
    }

    #[test]
    fn psk_simplified_objective_equals_cross_column_distance() {
        // For unit-modulus symbols the SI surrogate is exactly the
        // cross-column minimum distance, so both optimizers must agree.
        for seed in 100..112u64 {
            let channel = random_channel(seed, 4, 2);
            let candidates = psk_candidates(&[2, 4, 8]);
            let (si_alloc, si_obj) = optimize_si(&channel, 3.0, &candidates).unwrap();
            let (imp_alloc, imp_report) = optimize_improved(
                &channel,
                3.0,
                &candidates,
                PairDomain::CrossColumn,
            )
            .unwrap();
            assert_eq!(si_alloc.orders(), imp_alloc.orders());
            assert_relative_eq!(si_obj, imp_report.d_min_sq, max_relative = 1e-9);
        }
    }

    #[test]
    fn channel_scaling_leaves_the_argmax_unchanged() {
        for seed in 200..210u64 {
            let base = random_channel(seed, 3, 4);
            let scaled = Channel::from_column_gains(
                (0..4)
                    .map(|n| base.column(n).iter().map(|h| h * 2.5).collect())
                    .collect(),
            )
            .unwrap();
            let candidates = default_candidates();
            let (a0, r0) = optimize_improved(
                &base,
                3.0,
                &candidates,
                PairDomain::AllDistinct,
            )
            .unwrap();
            let (a1, r1) = optimize_improved(
                &scaled,
                3.0,
                &candidates,
                PairDomain::AllDistinct,
            )
            .unwrap();
            assert_eq!(a0.per_column, a1.per_column);
            assert_relative_eq!(r1.d_min_sq, 6.25 * r0.d_min_sq, max_relative = 1e-12);
        }
    }

    #[test]
    fn si_needs_two_columns() {
        let channel = random_channel(7, 2, 1);
        assert!(optimize_si(&channel, 2.0, &psk_candidates(&[2, 4])).is_err());
    }
}
