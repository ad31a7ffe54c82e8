//! Property prediction interface, a deterministic built-in surrogate,
//! three-level property bucketing, and pair improvement categorization.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chem::{total_hydrogens, BondOrder, Element, MolGraph};
use crate::float;
use crate::peptide::{Peptide, PeptidePair};

/// The three predicted endpoints: lipophilicity at pH 7 (unitless), mean
/// residence time in hours, and simulated-intestinal-fluid half-life in
/// hours.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PropertyTriple {
    pub logd: f64,
    pub mrt: f64,
    pub sif: f64,
}

impl PropertyTriple {
    pub fn get(&self, property: Property) -> f64 {
        match property {
            Property::LogD => self.logd,
            Property::Mrt => self.mrt,
            Property::Sif => self.sif,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.logd.is_finite() && self.mrt.is_finite() && self.sif.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Property {
    LogD,
    #[cfg_attr(feature = "serde", serde(rename = "MRT"))]
    Mrt,
    #[cfg_attr(feature = "serde", serde(rename = "SIF"))]
    Sif,
}

impl Property {
    pub const ALL: [Property; 3] = [Property::LogD, Property::Mrt, Property::Sif];

    pub fn name(self) -> &'static str {
        match self {
            Property::LogD => "LogD",
            Property::Mrt => "MRT",
            Property::Sif => "SIF",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Discretized property level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Bucket {
    Low,
    Medium,
    High,
}

impl Bucket {
    pub fn name(self) -> &'static str {
        match self {
            Bucket::Low => "low",
            Bucket::Medium => "medium",
            Bucket::High => "high",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Bucket::Low => 0,
            Bucket::Medium => 1,
            Bucket::High => 2,
        }
    }
}

/// Per-property (low cut, high cut) pairs. Values below the low cut are
/// `low`, values above the high cut are `high`, and the closed band between
/// them is `medium`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct BucketThresholds {
    pub logd: (f64, f64),
    pub mrt: (f64, f64),
    pub sif: (f64, f64),
}

impl Default for BucketThresholds {
    fn default() -> Self {
        BucketThresholds {
            logd: (3.0, 4.2),
            mrt: (0.56, 1.63),
            sif: (3.4, 10.1),
        }
    }
}

impl BucketThresholds {
    pub fn cuts(&self, property: Property) -> (f64, f64) {
        match property {
            Property::LogD => self.logd,
            Property::Mrt => self.mrt,
            Property::Sif => self.sif,
        }
    }

    pub fn high_cut(&self, property: Property) -> f64 {
        self.cuts(property).1
    }

    pub fn validate(&self) -> Result<(), String> {
        for p in Property::ALL {
            let (lo, hi) = self.cuts(p);
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(format!("{p}: low cut {lo} must be below high cut {hi}"));
            }
        }
        Ok(())
    }
}

/// Maps a value onto its level: `low` strictly below the low cut, `high`
/// strictly above the high cut, `medium` on the closed band between them.
pub fn bucketize(x: f64, property: Property, thresholds: &BucketThresholds) -> Bucket {
    let (lo, hi) = thresholds.cuts(property);
    if x < lo {
        Bucket::Low
    } else if x > hi {
        Bucket::High
    } else {
        Bucket::Medium
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictError {
    /// The predictor produced a non-finite value.
    NonFinite,
    /// The predictor refused the input.
    Failed,
}

impl fmt::Display for PredictError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictError::NonFinite => write!(f, "predictor returned a non-finite value"),
            PredictError::Failed => write!(f, "predictor failed on the input"),
        }
    }
}

impl core::error::Error for PredictError {}

/// Anything that can annotate a molecular graph with the three endpoints.
/// Implementations must be safe for concurrent calls.
pub trait PropertyPredictor: Sync {
    fn predict_graph(&self, mol: &MolGraph) -> Result<PropertyTriple, PredictError>;
}

/// Predicts the assembled peptide's properties, rejecting non-finite output.
pub fn predict(
    peptide: &Peptide,
    predictor: &dyn PropertyPredictor,
) -> Result<PropertyTriple, PredictError> {
    let triple = predictor.predict_graph(peptide.assembled())?;
    if !triple.is_finite() {
        return Err(PredictError::NonFinite);
    }
    Ok(triple)
}

/// Descriptors feeding the surrogate predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Descriptors {
    pub aliphatic_carbons: usize,
    pub aromatic_atoms: usize,
    pub halogens: usize,
    pub hbond_donors: usize,
    pub hbond_acceptors: usize,
    pub n_methyl_amides: usize,
    pub ring_count: usize,
    pub nonnatural_atoms: usize,
}

/// Counts the structural descriptors used by the surrogate. Donors are N/O
/// atoms carrying at least one hydrogen; acceptors are all N/O atoms. The
/// non-natural count covers atoms whose element, charge, isotope,
/// aromaticity, or degree falls outside the patterns of the twenty natural
/// amino acids.
pub fn descriptors(mol: &MolGraph) -> Descriptors {
    let mut d = Descriptors {
        ring_count: mol.ring_count(),
        ..Descriptors::default()
    };
    for i in 0..mol.atom_count() {
        let atom = mol.atom(i);
        let hydrogens = total_hydrogens(mol, i);
        match atom.element {
            Element::C if !atom.aromatic => d.aliphatic_carbons += 1,
            Element::N | Element::O => {
                d.hbond_acceptors += 1;
                if hydrogens >= 1 {
                    d.hbond_donors += 1;
                }
            }
            _ => {}
        }
        if atom.aromatic {
            d.aromatic_atoms += 1;
        }
        if atom.element.is_halogen() {
            d.halogens += 1;
        }
        if is_n_methyl_amide_nitrogen(mol, i) {
            d.n_methyl_amides += 1;
        }
        if !is_natural_pattern(mol, i) {
            d.nonnatural_atoms += 1;
        }
    }
    d
}

fn is_carbonyl_carbon(mol: &MolGraph, c: usize) -> bool {
    mol.atom(c).element == Element::C
        && !mol.atom(c).aromatic
        && mol.neighbors(c).iter().any(|nb| {
            mol.atom(nb.atom).element == Element::O
                && mol.bond(nb.bond).order == BondOrder::Double
        })
}

fn is_n_methyl_amide_nitrogen(mol: &MolGraph, n: usize) -> bool {
    let atom = mol.atom(n);
    if atom.element != Element::N || atom.aromatic {
        return false;
    }
    let mut has_carbonyl_neighbor = false;
    let mut has_methyl_neighbor = false;
    for nb in mol.neighbors(n) {
        if mol.bond(nb.bond).order != BondOrder::Single {
            continue;
        }
        if is_carbonyl_carbon(mol, nb.atom) {
            has_carbonyl_neighbor = true;
        }
        let candidate = mol.atom(nb.atom);
        if candidate.element == Element::C
            && !candidate.aromatic
            && mol.degree(nb.atom) == 1
            && total_hydrogens(mol, nb.atom) == 3
        {
            has_methyl_neighbor = true;
        }
    }
    has_carbonyl_neighbor && has_methyl_neighbor
}

/// Element/aromaticity/degree patterns that occur in the twenty natural
/// amino acids.
fn is_natural_pattern(mol: &MolGraph, i: usize) -> bool {
    let atom = mol.atom(i);
    if atom.charge != 0 || atom.isotope.is_some() {
        return false;
    }
    let degree = mol.degree(i);
    match (atom.element, atom.aromatic) {
        (Element::C, false) => degree <= 4,
        (Element::C, true) | (Element::N, true) => degree <= 3,
        (Element::N, false) => degree <= 3,
        (Element::O, false) => degree <= 2,
        (Element::S, false) => degree <= 2,
        (Element::H, false) => degree <= 1,
        _ => false,
    }
}

/// Linear-form coefficients of the surrogate predictor. The defaults are
/// calibrated so that the bundled seed corpus spans all three buckets of
/// each property; they are NOT chemically validated.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SurrogateCoefficients {
    pub logd_intercept: f64,
    pub logd_aliphatic_carbon: f64,
    pub logd_aromatic_atom: f64,
    pub logd_halogen: f64,
    pub logd_hbond_donor: f64,
    pub logd_hbond_acceptor: f64,
    pub mrt_intercept: f64,
    pub mrt_n_methyl_amide: f64,
    pub mrt_logd: f64,
    pub mrt_ring: f64,
    pub sif_intercept: f64,
    pub sif_n_methyl_amide: f64,
    pub sif_nonnatural_atom: f64,
    pub sif_logd: f64,
}

impl Default for SurrogateCoefficients {
    fn default() -> Self {
        SurrogateCoefficients {
            logd_intercept: 2.2,
            logd_aliphatic_carbon: 0.30,
            logd_aromatic_atom: 0.12,
            logd_halogen: 0.90,
            logd_hbond_donor: 0.95,
            logd_hbond_acceptor: 0.18,
            mrt_intercept: -1.2,
            mrt_n_methyl_amide: 0.50,
            mrt_logd: 0.45,
            mrt_ring: 0.25,
            sif_intercept: 3.35,
            sif_n_methyl_amide: 0.80,
            sif_nonnatural_atom: 0.45,
            sif_logd: 1.50,
        }
    }
}

/// Deterministic stand-in for a learned property model: a linear form over
/// interpretable descriptors, squashed through softplus for the two
/// nonnegative endpoints.
#[derive(Debug, Clone, Copy, Default)]
pub struct SurrogatePredictor {
    pub coefficients: SurrogateCoefficients,
}

impl SurrogatePredictor {
    pub fn new(coefficients: SurrogateCoefficients) -> SurrogatePredictor {
        SurrogatePredictor { coefficients }
    }

    pub fn predict(&self, mol: &MolGraph) -> PropertyTriple {
        let c = &self.coefficients;
        let d = descriptors(mol);
        let logd = c.logd_intercept
            + c.logd_aliphatic_carbon * d.aliphatic_carbons as f64
            + c.logd_aromatic_atom * d.aromatic_atoms as f64
            + c.logd_halogen * d.halogens as f64
            - c.logd_hbond_donor * d.hbond_donors as f64
            - c.logd_hbond_acceptor * d.hbond_acceptors as f64;
        let mrt = float::softplus(
            c.mrt_intercept
                + c.mrt_n_methyl_amide * d.n_methyl_amides as f64
                + c.mrt_logd * logd
                + c.mrt_ring * d.ring_count as f64,
        );
        let sif = float::softplus(
            c.sif_intercept
                + c.sif_n_methyl_amide * d.n_methyl_amides as f64
                + c.sif_nonnatural_atom * d.nonnatural_atoms as f64
                + c.sif_logd * logd,
        );
        PropertyTriple { logd, mrt, sif }
    }
}

impl PropertyPredictor for SurrogatePredictor {
    fn predict_graph(&self, mol: &MolGraph) -> Result<PropertyTriple, PredictError> {
        Ok(self.predict(mol))
    }
}

/// Surrogate prediction with default coefficients.
pub fn surrogate_predict(mol: &MolGraph) -> PropertyTriple {
    SurrogatePredictor::default().predict(mol)
}

/// Which properties moved into the high bucket, and how many.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImprovementLabel {
    pub logd: bool,
    pub mrt: bool,
    pub sif: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Arity {
    None,
    Single,
    Dual,
    Triple,
}

impl Arity {
    pub fn name(self) -> &'static str {
        match self {
            Arity::None => "none",
            Arity::Single => "single",
            Arity::Dual => "dual",
            Arity::Triple => "triple",
        }
    }
}

impl ImprovementLabel {
    pub fn contains(&self, property: Property) -> bool {
        match property {
            Property::LogD => self.logd,
            Property::Mrt => self.mrt,
            Property::Sif => self.sif,
        }
    }

    pub fn improved(&self) -> Vec<Property> {
        Property::ALL
            .into_iter()
            .filter(|&p| self.contains(p))
            .collect()
    }

    pub fn count(&self) -> usize {
        usize::from(self.logd) + usize::from(self.mrt) + usize::from(self.sif)
    }

    pub fn arity(&self) -> Arity {
        match self.count() {
            0 => Arity::None,
            1 => Arity::Single,
            2 => Arity::Dual,
            _ => Arity::Triple,
        }
    }
}

/// A property improves when the mutated value lands in `high` while the
/// original was not already there.
pub fn categorize_props(
    original: &PropertyTriple,
    mutated: &PropertyTriple,
    thresholds: &BucketThresholds,
) -> ImprovementLabel {
    let moved_high = |p: Property| {
        bucketize(mutated.get(p), p, thresholds) == Bucket::High
            && bucketize(original.get(p), p, thresholds) != Bucket::High
    };
    ImprovementLabel {
        logd: moved_high(Property::LogD),
        mrt: moved_high(Property::Mrt),
        sif: moved_high(Property::Sif),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CategorizeError {
    MissingAnnotations,
}

impl fmt::Display for CategorizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pair lacks property annotations")
    }
}

impl core::error::Error for CategorizeError {}

/// Categorizes an annotated pair; both property triples must be present.
pub fn categorize_pair(
    pair: &PeptidePair,
    thresholds: &BucketThresholds,
) -> Result<ImprovementLabel, CategorizeError> {
    match (&pair.original_props, &pair.mutated_props) {
        (Some(original), Some(mutated)) => Ok(categorize_props(original, mutated, thresholds)),
        _ => Err(CategorizeError::MissingAnnotations),
    }
}

/// Improvement group used for training-set enrichment: a single or dual
/// combination of properties. Written as property names joined by `+`,
/// e.g. `"LogD"` or `"LogD+SIF"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImprovementGroup {
    pub logd: bool,
    pub mrt: bool,
    pub sif: bool,
}

impl ImprovementGroup {
    pub fn matches(&self, label: &ImprovementLabel) -> bool {
        self.logd == label.logd && self.mrt == label.mrt && self.sif == label.sif
    }

    /// The three single and three dual groups, in a fixed order.
    pub fn default_groups() -> Vec<ImprovementGroup> {
        let mut groups = Vec::new();
        for mask in 1u8..7 {
            let group = ImprovementGroup {
                logd: mask & 1 != 0,
                mrt: mask & 2 != 0,
                sif: mask & 4 != 0,
            };
            groups.push(group);
        }
        groups.sort_by_key(|g| {
            (
                usize::from(g.logd) + usize::from(g.mrt) + usize::from(g.sif),
                !g.logd,
                !g.mrt,
                !g.sif,
            )
        });
        groups
    }
}

impl fmt::Display for ImprovementGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in Property::ALL {
            let included = match p {
                Property::LogD => self.logd,
                Property::Mrt => self.mrt,
                Property::Sif => self.sif,
            };
            if included {
                if !first {
                    f.write_str("+")?;
                }
                f.write_str(p.name())?;
                first = false;
            }
        }
        Ok(())
    }
}

impl core::str::FromStr for ImprovementGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut group = ImprovementGroup {
            logd: false,
            mrt: false,
            sif: false,
        };
        for part in s.split('+') {
            match part.trim() {
                "LogD" | "logd" => group.logd = true,
                "MRT" | "mrt" => group.mrt = true,
                "SIF" | "sif" => group.sif = true,
                other => return Err(format!("unknown property '{other}' in group '{s}'")),
            }
        }
        if !(group.logd || group.mrt || group.sif) {
            return Err(format!("empty improvement group '{s}'"));
        }
        Ok(group)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ImprovementGroup {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for ImprovementGroup {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sampling configuration for split construction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SplitCaps {
    /// Per-group sample cap for the training set.
    pub sft_group_cap: usize,
    /// Size of the pool drawn from the training set.
    pub rl_pool_size: usize,
    /// Hold-out set cap.
    pub test_size: usize,
    /// Single/dual improvement groups enriched into the training set.
    pub groups: Vec<ImprovementGroup>,
}

impl Default for SplitCaps {
    fn default() -> Self {
        SplitCaps {
            sft_group_cap: 4000,
            rl_pool_size: 600,
            test_size: 1880,
            groups: ImprovementGroup::default_groups(),
        }
    }
}

/// One categorized pair, by reference to the caller's collection.
#[derive(Debug, Clone)]
pub struct SplitItem<'a> {
    pub label: ImprovementLabel,
    pub original_canonical: &'a str,
}

/// Index-based split of a categorized pair list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitResult {
    pub sft: Vec<usize>,
    pub rl_pool: Vec<usize>,
    pub test: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Builds the training/pool/hold-out split:
/// every triple-improvement pair enters the training set, each configured
/// single/dual group contributes up to `sft_group_cap` sampled pairs, the
/// pool draws `rl_pool_size` from the training set, and the hold-out set
/// samples up to `test_size` sub-triple pairs whose original peptide does
/// not occur in the training set. Deterministic for a given `rng_seed`;
/// short inputs produce smaller splits plus a warning.
pub fn build_splits(items: &[SplitItem<'_>], caps: &SplitCaps, rng_seed: u64) -> SplitResult {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut result = SplitResult::default();

    let mut sft: Vec<usize> = items
        .iter()
        .enumerate()
        .filter(|(_, item)| item.label.arity() == Arity::Triple)
        .map(|(i, _)| i)
        .collect();
    for group in &caps.groups {
        let members: Vec<usize> = items
            .iter()
            .enumerate()
            .filter(|(_, item)| group.matches(&item.label))
            .map(|(i, _)| i)
            .collect();
        sft.extend(sample_without_replacement(
            &members,
            caps.sft_group_cap,
            &mut rng,
        ));
    }
    sft.sort_unstable();
    sft.dedup();

    let mut rl_pool = sample_without_replacement(&sft, caps.rl_pool_size, &mut rng);
    rl_pool.sort_unstable();
    if rl_pool.len() < caps.rl_pool_size {
        result.warnings.push(format!(
            "pool smaller than requested: {} < {}",
            rl_pool.len(),
            caps.rl_pool_size
        ));
    }

    let sft_originals: BTreeSet<&str> = sft
        .iter()
        .map(|&i| items[i].original_canonical)
        .collect();
    let test_candidates: Vec<usize> = items
        .iter()
        .enumerate()
        .filter(|(_, item)| {
            item.label.arity() < Arity::Triple
                && !sft_originals.contains(item.original_canonical)
        })
        .map(|(i, _)| i)
        .collect();
    let mut test = sample_without_replacement(&test_candidates, caps.test_size, &mut rng);
    test.sort_unstable();
    if test.len() < caps.test_size {
        result.warnings.push(format!(
            "hold-out set smaller than requested: {} < {}",
            test.len(),
            caps.test_size
        ));
    }

    result.sft = sft;
    result.rl_pool = rl_pool;
    result.test = test;
    result
}

/// Partial Fisher-Yates draw of `k` items.
fn sample_without_replacement(pool: &[usize], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if pool.len() <= k {
        return pool.to_vec();
    }
    let mut indices: Vec<usize> = pool.to_vec();
    for i in 0..k {
        let j = rng.gen_range(i..indices.len());
        indices.swap(i, j);
    }
    indices.truncate(k);
    indices
}
