//! Pharmacology-aware reward shaping: smooth property desirability, a
//! similarity factor centered on a target Tanimoto value, and a
//! frequency-based duplication penalty backed by an LRU generation history.
//!
//! The composite reward is
//! `total = dup_fac * (w_prop * prop_smooth + w_sim * sim_fac)`, every
//! component bounded in [0, 1].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use crate::chem::{canonical_smiles, morgan_fingerprint, tanimoto, MolGraph};
use crate::float;
use crate::peptide::Peptide;
use crate::properties::{Property, PropertyTriple};

/// All reward hyperparameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RewardConfig {
    /// Per-property desirability thresholds (LogD, MRT, SIF).
    pub thresholds: [f64; 3],
    /// Per-property sigmoid scale factors.
    pub scales: [f64; 3],
    /// Similarity steepness.
    pub alpha: f64,
    /// Target similarity center.
    pub s0: f64,
    /// Duplication decay exponent.
    pub gamma: f64,
    pub w_prop: f64,
    pub w_sim: f64,
    /// Generation-history LRU capacity.
    pub history_capacity: usize,
    pub fp_radius: u32,
    pub fp_n_bits: u32,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            thresholds: [4.2, 1.63, 10.1],
            scales: [0.4, 0.3, 1.5],
            alpha: 10.0,
            s0: 0.6,
            gamma: 1.0,
            w_prop: 0.8,
            w_sim: 0.2,
            history_capacity: 4096,
            fp_radius: 2,
            fp_n_bits: 2048,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.scales.iter().any(|&k| k <= 0.0) {
            return Err("scale factors must be positive".to_string());
        }
        if self.alpha <= 0.0 {
            return Err("alpha must be positive".to_string());
        }
        if self.gamma < 0.0 {
            return Err("gamma must be nonnegative".to_string());
        }
        if float::abs(self.w_prop + self.w_sim - 1.0) > 1e-12 {
            return Err(format!(
                "weights must sum to 1, got {} + {}",
                self.w_prop, self.w_sim
            ));
        }
        if self.history_capacity == 0 {
            return Err("history capacity must be at least 1".to_string());
        }
        if self.fp_n_bits < 64 {
            return Err("fingerprint width must be at least 64 bits".to_string());
        }
        Ok(())
    }
}

/// Bounded least-recently-used map from canonical SMILES to occurrence
/// count. Eviction erases the count, so a molecule scored again after
/// falling out of the window starts fresh.
#[derive(Debug, Clone)]
pub struct GenerationHistory {
    capacity: usize,
    tick: u64,
    entries: BTreeMap<String, HistoryEntry>,
    by_recency: BTreeMap<u64, String>,
}

#[derive(Debug, Clone, Copy)]
struct HistoryEntry {
    count: u64,
    last_tick: u64,
}

impl GenerationHistory {
    pub fn new(capacity: usize) -> GenerationHistory {
        GenerationHistory {
            capacity: capacity.max(1),
            tick: 0,
            entries: BTreeMap::new(),
            by_recency: BTreeMap::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Occurrences recorded so far for this molecule.
    pub fn count(&self, canonical: &str) -> u64 {
        self.entries.get(canonical).map_or(0, |e| e.count)
    }

    /// Returns the prior occurrence count, then records this occurrence and
    /// refreshes recency, evicting the least-recently-seen molecule if the
    /// capacity is exceeded.
    pub fn observe(&mut self, canonical: &str) -> u64 {
        self.tick += 1;
        let tick = self.tick;
        if let Some(entry) = self.entries.get_mut(canonical) {
            let prior = entry.count;
            self.by_recency.remove(&entry.last_tick);
            entry.count += 1;
            entry.last_tick = tick;
            self.by_recency.insert(tick, canonical.to_string());
            return prior;
        }
        self.entries.insert(
            canonical.to_string(),
            HistoryEntry {
                count: 1,
                last_tick: tick,
            },
        );
        self.by_recency.insert(tick, canonical.to_string());
        if self.entries.len() > self.capacity {
            if let Some((&oldest, _)) = self.by_recency.iter().next() {
                if let Some(evicted) = self.by_recency.remove(&oldest) {
                    self.entries.remove(&evicted);
                }
            }
        }
        0
    }
}

/// Per-component reward decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RewardBreakdown {
    /// Per-property sigmoid terms (LogD, MRT, SIF).
    pub prop_terms: [f64; 3],
    pub prop_smooth: f64,
    pub tanimoto: f64,
    pub sim_fac: f64,
    pub dup_fac: f64,
    pub total: f64,
}

/// Mean of the per-property sigmoids `sigma((x_i - t_i) / k_i)`.
pub fn property_desirability(props: &PropertyTriple, cfg: &RewardConfig) -> f64 {
    property_terms(props, cfg).iter().sum::<f64>() / 3.0
}

fn property_terms(props: &PropertyTriple, cfg: &RewardConfig) -> [f64; 3] {
    let mut terms = [0.0; 3];
    for (i, p) in Property::ALL.into_iter().enumerate() {
        terms[i] = float::sigmoid((props.get(p) - cfg.thresholds[i]) / cfg.scales[i]);
    }
    terms
}

/// `sigma(alpha * (s - s0))` on the Tanimoto similarity of the two graphs'
/// circular fingerprints.
pub fn similarity_factor(seed: &MolGraph, candidate: &MolGraph, cfg: &RewardConfig) -> f64 {
    let s = graph_tanimoto(seed, candidate, cfg);
    float::sigmoid(cfg.alpha * (s - cfg.s0))
}

fn graph_tanimoto(seed: &MolGraph, candidate: &MolGraph, cfg: &RewardConfig) -> f64 {
    let a = morgan_fingerprint(seed, cfg.fp_radius, cfg.fp_n_bits);
    let b = morgan_fingerprint(candidate, cfg.fp_radius, cfg.fp_n_bits);
    tanimoto(&a, &b).expect("widths match by construction")
}

/// `(1 / max(1, n + 1))^gamma` where `n` is the molecule's prior occurrence
/// count; records the occurrence.
pub fn duplication_factor(
    canonical: &str,
    history: &mut GenerationHistory,
    cfg: &RewardConfig,
) -> f64 {
    let n = history.observe(canonical);
    let denom = 1u64.max(n + 1);
    float::powf(1.0 / denom as f64, cfg.gamma)
}

/// Composite reward for a candidate against its seed. The generation history
/// is updated exactly once per call.
pub fn score(
    seed: &MolGraph,
    candidate: &MolGraph,
    props: &PropertyTriple,
    history: &mut GenerationHistory,
    cfg: &RewardConfig,
) -> RewardBreakdown {
    let canonical = canonical_smiles(candidate);
    score_with_canonical(seed, candidate, &canonical, props, history, cfg)
}

/// [`score`] with the candidate's canonical SMILES already computed.
pub fn score_with_canonical(
    seed: &MolGraph,
    candidate: &MolGraph,
    candidate_canonical: &str,
    props: &PropertyTriple,
    history: &mut GenerationHistory,
    cfg: &RewardConfig,
) -> RewardBreakdown {
    let prop_terms = property_terms(props, cfg);
    let prop_smooth = prop_terms.iter().sum::<f64>() / 3.0;
    let s = graph_tanimoto(seed, candidate, cfg);
    let sim_fac = float::sigmoid(cfg.alpha * (s - cfg.s0));
    let dup_fac = duplication_factor(candidate_canonical, history, cfg);
    let total = dup_fac * (cfg.w_prop * prop_smooth + cfg.w_sim * sim_fac);
    RewardBreakdown {
        prop_terms,
        prop_smooth,
        tanimoto: s,
        sim_fac,
        dup_fac,
        total,
    }
}

/// Peptide-level convenience wrapper over [`score`].
pub fn score_peptides(
    seed: &Peptide,
    candidate: &Peptide,
    props: &PropertyTriple,
    history: &mut GenerationHistory,
    cfg: &RewardConfig,
) -> RewardBreakdown {
    score_with_canonical(
        seed.assembled(),
        candidate.assembled(),
        candidate.canonical(),
        props,
        history,
        cfg,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformError {
    NegativeRaw(f64),
    NonPositiveHigh(f64),
    DegenerateRange { low: f64, high: f64 },
    ZeroSlope,
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformError::NegativeRaw(x) => write!(f, "raw value {x} must be nonnegative"),
            TransformError::NonPositiveHigh(h) => write!(f, "high anchor {h} must be positive"),
            TransformError::DegenerateRange { low, high } => {
                write!(f, "range [{low}, {high}] is degenerate")
            }
            TransformError::ZeroSlope => write!(f, "slope k must be nonzero"),
        }
    }
}

impl core::error::Error for TransformError {}

/// Square-root score transformation, clamped into [0, 1].
pub fn sqrt_transform(raw: f64, high: f64) -> Result<f64, TransformError> {
    if high.is_nan() || high <= 0.0 {
        return Err(TransformError::NonPositiveHigh(high));
    }
    if raw.is_nan() || raw < 0.0 {
        return Err(TransformError::NegativeRaw(raw));
    }
    Ok(float::sqrt(raw / high).min(1.0))
}

/// Reverse-sigmoid score transformation with a shifted inflection point:
/// `1 / (1 + 10^(-k * 10 * (raw - (high + low)/2 - shift) / (high - low)))`.
pub fn reverse_sigmoid_shift(
    raw: f64,
    low: f64,
    high: f64,
    shift: f64,
    k: f64,
) -> Result<f64, TransformError> {
    if high.is_nan() || low.is_nan() || high <= low {
        return Err(TransformError::DegenerateRange { low, high });
    }
    if k == 0.0 {
        return Err(TransformError::ZeroSlope);
    }
    let normalized = 10.0 * (raw - (high + low) / 2.0 - shift) / (high - low);
    Ok(1.0 / (1.0 + float::powf(10.0, -k * normalized)))
}
