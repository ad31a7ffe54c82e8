use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::properties::PropertyTriple;

use super::monomer::{Monomer, MonomerVocabulary};
use super::{AssemblyError, Peptide};

/// An original/mutated peptide pair differing in exactly one monomer slot.
#[derive(Debug, Clone)]
pub struct PeptidePair {
    pub original: Peptide,
    pub mutated: Peptide,
    /// 1-based monomer index of the substitution.
    pub position: usize,
    pub leaving: Monomer,
    pub incoming: Monomer,
    pub original_props: Option<PropertyTriple>,
    pub mutated_props: Option<PropertyTriple>,
}

impl PeptidePair {
    pub fn with_props(mut self, original: PropertyTriple, mutated: PropertyTriple) -> PeptidePair {
        self.original_props = Some(original);
        self.mutated_props = Some(mutated);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MutateError {
    PositionOutOfRange { position: usize, len: usize },
    Assembly(AssemblyError),
}

impl fmt::Display for MutateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutateError::PositionOutOfRange { position, len } => {
                write!(f, "position {position} out of range 1..={len}")
            }
            MutateError::Assembly(e) => write!(f, "mutated peptide failed to assemble: {e}"),
        }
    }
}

impl core::error::Error for MutateError {}

impl From<AssemblyError> for MutateError {
    fn from(e: AssemblyError) -> Self {
        MutateError::Assembly(e)
    }
}

/// Replaces the monomer at `position` (1-based) and re-assembles.
pub fn mutate(
    peptide: &Peptide,
    position: usize,
    incoming: &Monomer,
) -> Result<PeptidePair, MutateError> {
    let len = peptide.len();
    if position == 0 || position > len {
        return Err(MutateError::PositionOutOfRange { position, len });
    }
    let mut monomers = peptide.monomers().to_vec();
    let leaving = monomers[position - 1].clone();
    monomers[position - 1] = incoming.clone();
    let mutated = Peptide::from_monomers(monomers)?;
    Ok(PeptidePair {
        original: peptide.clone(),
        mutated,
        position,
        leaving,
        incoming: incoming.clone(),
        original_props: None,
        mutated_props: None,
    })
}

/// Counters describing what an augmentation run skipped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AugmentStats {
    pub attempts: usize,
    pub identity_skips: usize,
    pub assembly_failures: usize,
    pub duplicates_removed: usize,
}

const RETRY_FACTOR: usize = 10;

/// Draws up to `k` single-position mutations of `seed`.
///
/// Positions are sampled uniformly from 2..=n (position 1 anchors the
/// sequence), incoming monomers uniformly from the vocabulary. Identity
/// draws and failed assemblies are skipped and redrawn up to a retry cap;
/// mutated peptides are deduplicated by canonical SMILES before return.
/// Output is fully determined by `rng_seed`.
pub fn augment(
    seed: &Peptide,
    vocab: &MonomerVocabulary,
    k: usize,
    rng_seed: u64,
) -> Vec<PeptidePair> {
    augment_with_stats(seed, vocab, k, rng_seed).0
}

/// [`augment`] plus skip counters.
pub fn augment_with_stats(
    seed: &Peptide,
    vocab: &MonomerVocabulary,
    k: usize,
    rng_seed: u64,
) -> (Vec<PeptidePair>, AugmentStats) {
    let mut stats = AugmentStats::default();
    let entries: Vec<&Monomer> = vocab.iter().collect();
    if entries.is_empty() || k == 0 || seed.len() < 2 {
        return (Vec::new(), stats);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut raw: Vec<PeptidePair> = Vec::new();
    let cap = k.saturating_mul(RETRY_FACTOR);
    while raw.len() < k && stats.attempts < cap {
        stats.attempts += 1;
        let position = rng.gen_range(2..=seed.len());
        let incoming = entries[rng.gen_range(0..entries.len())];
        if incoming.id() == seed.monomers()[position - 1].id() {
            stats.identity_skips += 1;
            continue;
        }
        match mutate(seed, position, incoming) {
            Ok(pair) => raw.push(pair),
            Err(_) => stats.assembly_failures += 1,
        }
    }
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for pair in raw {
        if seen.insert(String::from(pair.mutated.canonical())) {
            out.push(pair);
        } else {
            stats.duplicates_removed += 1;
        }
    }
    (out, stats)
}
