//! Generation-quality metrics: validity, novelty, uniqueness, the
//! all-threshold success rate, unique high-quality molecules per seed, the
//! per-seed success rate, and bucket transition matrices.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::chem::{canonical_smiles, parse_smiles, validate_valence};
use crate::prompts::parse_output;
use crate::properties::{
    bucketize, Bucket, BucketThresholds, Property, PropertyPredictor, PropertyTriple,
};

/// One generation attempt, after parsing and annotation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenRecord {
    pub seed_id: String,
    pub raw_output: Option<String>,
    pub smiles: Option<String>,
    pub canonical: Option<String>,
    pub props: Option<PropertyTriple>,
    pub valid: bool,
}

/// A generation attempt as it arrives from a dump: either tagged output text
/// or a bare SMILES, with optional precomputed properties.
#[derive(Debug, Clone, Default)]
pub struct RawGeneration {
    pub seed_id: String,
    pub output_text: Option<String>,
    pub smiles: Option<String>,
    pub props: Option<PropertyTriple>,
}

/// Seed-grouped generation attempts plus the training index used for
/// novelty.
#[derive(Debug, Clone, Default)]
pub struct GenerationSet {
    pub records: Vec<GenRecord>,
    pub training_index: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    EmptySet,
    NoValidRecords,
    NoSeeds,
    EmptyInput,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::EmptySet => write!(f, "no generation records"),
            EvalError::NoValidRecords => write!(f, "no valid generation records"),
            EvalError::NoSeeds => write!(f, "no seed groups present"),
            EvalError::EmptyInput => write!(f, "empty input"),
        }
    }
}

impl core::error::Error for EvalError {}

impl GenerationSet {
    /// Processes raw attempts: extract the answer molecule (from tagged text
    /// when no bare SMILES is given), parse it, check valence, canonicalize,
    /// and annotate with properties (given ones win, otherwise the
    /// predictor). A record is valid only when every step succeeds and the
    /// properties are finite.
    pub fn assemble(
        inputs: Vec<RawGeneration>,
        training_index: BTreeSet<String>,
        predictor: &dyn PropertyPredictor,
    ) -> GenerationSet {
        let mut records = Vec::with_capacity(inputs.len());
        for input in inputs {
            let smiles = match (&input.smiles, &input.output_text) {
                (Some(s), _) => Some(s.clone()),
                (None, Some(text)) => {
                    let parsed = parse_output(text);
                    if parsed.well_formed {
                        parsed.smiles
                    } else {
                        None
                    }
                }
                (None, None) => None,
            };
            let mut canonical = None;
            let mut props = None;
            let mut valid = false;
            if let Some(ref s) = smiles {
                if let Ok(graph) = parse_smiles(s) {
                    if validate_valence(&graph).valid {
                        let annotated = match input.props {
                            Some(p) if p.is_finite() => Some(p),
                            Some(_) => None,
                            None => predictor.predict_graph(&graph).ok().filter(|p| p.is_finite()),
                        };
                        if let Some(p) = annotated {
                            canonical = Some(canonical_smiles(&graph));
                            props = Some(p);
                            valid = true;
                        }
                    }
                }
            }
            records.push(GenRecord {
                seed_id: input.seed_id,
                raw_output: input.output_text,
                smiles,
                canonical,
                props,
                valid,
            });
        }
        GenerationSet {
            records,
            training_index,
        }
    }

    fn valid_records(&self) -> impl Iterator<Item = &GenRecord> {
        self.records.iter().filter(|r| r.valid)
    }

    fn unique_valid_canonicals(&self) -> BTreeSet<&str> {
        self.valid_records()
            .filter_map(|r| r.canonical.as_deref())
            .collect()
    }

    /// Fraction of attempts that parsed, passed valence, and were annotated.
    pub fn validity(&self) -> Result<f64, EvalError> {
        if self.records.is_empty() {
            return Err(EvalError::EmptySet);
        }
        let valid = self.valid_records().count();
        Ok(valid as f64 / self.records.len() as f64)
    }

    /// Fraction of uniquely generated molecules absent from the training
    /// index. Defined as 0 when there are no unique valid molecules.
    pub fn novelty(&self) -> f64 {
        let unique = self.unique_valid_canonicals();
        if unique.is_empty() {
            return 0.0;
        }
        let novel = unique
            .iter()
            .filter(|c| !self.training_index.contains(**c))
            .count();
        novel as f64 / unique.len() as f64
    }

    /// Distinct molecules among valid attempts.
    pub fn uniqueness(&self) -> Result<f64, EvalError> {
        let valid = self.valid_records().count();
        if valid == 0 {
            return Err(EvalError::NoValidRecords);
        }
        Ok(self.unique_valid_canonicals().len() as f64 / valid as f64)
    }

    /// Fraction of ALL attempts whose molecule strictly exceeds every high
    /// threshold; invalid attempts count as failures.
    pub fn hqsr(&self, thresholds: &BucketThresholds) -> Result<f64, EvalError> {
        if self.records.is_empty() {
            return Err(EvalError::EmptySet);
        }
        let passing = self
            .records
            .iter()
            .filter(|r| r.valid && r.props.as_ref().is_some_and(|p| is_high_quality(p, thresholds)))
            .count();
        Ok(passing as f64 / self.records.len() as f64)
    }

    fn high_quality_by_seed(&self, thresholds: &BucketThresholds) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut by_seed: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for record in &self.records {
            by_seed.entry(record.seed_id.as_str()).or_default();
        }
        for record in self.valid_records() {
            let (Some(canonical), Some(props)) = (&record.canonical, &record.props) else {
                continue;
            };
            if is_high_quality(props, thresholds) {
                by_seed
                    .entry(record.seed_id.as_str())
                    .or_default()
                    .insert(canonical.as_str());
            }
        }
        by_seed
    }

    /// Mean count of unique high-quality molecules per seed.
    pub fn uhqs(&self, thresholds: &BucketThresholds) -> Result<f64, EvalError> {
        let by_seed = self.high_quality_by_seed(thresholds);
        if by_seed.is_empty() {
            return Err(EvalError::NoSeeds);
        }
        let total: usize = by_seed.values().map(|s| s.len()).sum();
        Ok(total as f64 / by_seed.len() as f64)
    }

    /// Fraction of seeds with at least one high-quality molecule.
    pub fn hqsr_s(&self, thresholds: &BucketThresholds) -> Result<f64, EvalError> {
        let by_seed = self.high_quality_by_seed(thresholds);
        if by_seed.is_empty() {
            return Err(EvalError::NoSeeds);
        }
        let succeeded = by_seed.values().filter(|s| !s.is_empty()).count();
        Ok(succeeded as f64 / by_seed.len() as f64)
    }

    /// Samples per seed when uniform across seeds.
    pub fn samples_per_seed(&self) -> Option<usize> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.seed_id.as_str()).or_default() += 1;
        }
        let mut values = counts.values();
        let first = *values.next()?;
        values.all(|&v| v == first).then_some(first)
    }

    /// All six metrics in one pass.
    pub fn report(&self, thresholds: &BucketThresholds) -> Result<EvalReport, EvalError> {
        let validity = self.validity()?;
        let mut warnings = Vec::new();
        if self.unique_valid_canonicals().is_empty() {
            warnings.push("no unique valid molecules; novelty defined as 0".to_string());
        }
        let novelty = self.novelty();
        let uniqueness = match self.uniqueness() {
            Ok(u) => u,
            Err(_) => {
                warnings.push("no valid records; uniqueness defined as 0".to_string());
                0.0
            }
        };
        let hqsr = self.hqsr(thresholds)?;
        let uhqs = self.uhqs(thresholds)?;
        let hqsr_s = self.hqsr_s(thresholds)?;
        Ok(EvalReport {
            total_records: self.records.len(),
            valid_records: self.valid_records().count(),
            seed_count: self.high_quality_by_seed(thresholds).len(),
            samples_per_seed: self.samples_per_seed(),
            validity,
            novelty,
            uniqueness,
            hqsr,
            uhqs,
            hqsr_s,
            warnings,
        })
    }
}

/// Strictly above every high threshold.
pub fn is_high_quality(props: &PropertyTriple, thresholds: &BucketThresholds) -> bool {
    Property::ALL
        .into_iter()
        .all(|p| props.get(p) > thresholds.high_cut(p))
}

/// Six-metric evaluation summary.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub total_records: usize,
    pub valid_records: usize,
    pub seed_count: usize,
    pub samples_per_seed: Option<usize>,
    pub validity: f64,
    pub novelty: f64,
    pub uniqueness: f64,
    pub hqsr: f64,
    pub uhqs: f64,
    pub hqsr_s: f64,
    pub warnings: Vec<String>,
}

impl EvalReport {
    /// Renders the metrics as an aligned fixed-width table.
    pub fn render_table(&self, label: &str) -> String {
        let uhqs = match self.samples_per_seed {
            Some(k) => format!("{:.2}/{k}", self.uhqs),
            None => format!("{:.2}", self.uhqs),
        };
        let mut out = String::new();
        out.push_str(&format!(
            "{:<24} {:>6} {:>6} {:>6} {:>6} {:>10} {:>7}\n",
            "Set", "Val", "Nov", "Uni", "HQSR", "UHQS", "HQSR-S"
        ));
        out.push_str(&format!(
            "{:<24} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>10} {:>7.3}\n",
            label, self.validity, self.novelty, self.uniqueness, self.hqsr, uhqs, self.hqsr_s
        ));
        out
    }
}

/// Row-stochastic 3x3 bucket transition matrix. Rows without mass stay all
/// zero and are reported through `counts`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransitionMatrix {
    pub property: Property,
    pub rows: [[f64; 3]; 3],
    /// Items observed per before-bucket.
    pub counts: [usize; 3],
}

impl TransitionMatrix {
    pub fn row_has_mass(&self, bucket: Bucket) -> bool {
        self.counts[bucket.index()] > 0
    }
}

/// Fraction of items moving from each before-bucket to each after-bucket.
pub fn transition_matrix(
    pairs: &[(PropertyTriple, PropertyTriple)],
    property: Property,
    thresholds: &BucketThresholds,
) -> Result<TransitionMatrix, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut tallies = [[0usize; 3]; 3];
    for (before, after) in pairs {
        let from = bucketize(before.get(property), property, thresholds).index();
        let to = bucketize(after.get(property), property, thresholds).index();
        tallies[from][to] += 1;
    }
    let mut rows = [[0.0; 3]; 3];
    let mut counts = [0usize; 3];
    for (i, tally) in tallies.iter().enumerate() {
        let mass: usize = tally.iter().sum();
        counts[i] = mass;
        if mass > 0 {
            for (j, &n) in tally.iter().enumerate() {
                rows[i][j] = n as f64 / mass as f64;
            }
        }
    }
    Ok(TransitionMatrix {
        property,
        rows,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn record(seed: &str, canonical: Option<&str>, props: Option<(f64, f64, f64)>) -> GenRecord {
        let valid = canonical.is_some() && props.is_some();
        GenRecord {
            seed_id: seed.to_string(),
            raw_output: None,
            smiles: canonical.map(|c| c.to_string()),
            canonical: canonical.map(|c| c.to_string()),
            props: props.map(|(logd, mrt, sif)| PropertyTriple { logd, mrt, sif }),
            valid,
        }
    }

    fn high() -> (f64, f64, f64) {
        (5.0, 2.0, 12.0)
    }

    fn low() -> (f64, f64, f64) {
        (1.0, 0.2, 1.0)
    }

    #[test]
    fn validity_ratio() {
        let set = GenerationSet {
            records: vec![
                record("s", Some("C"), Some(low())),
                record("s", None, None),
            ],
            training_index: BTreeSet::new(),
        };
        assert_eq!(set.validity().unwrap(), 0.5);
        let empty = GenerationSet::default();
        assert_eq!(empty.validity(), Err(EvalError::EmptySet));
    }

    #[test]
    fn novelty_over_unique_molecules() {
        let mut training = BTreeSet::new();
        training.insert("CC".to_string());
        let set = GenerationSet {
            records: vec![
                record("s", Some("CC"), Some(low())),
                record("s", Some("CC"), Some(low())),
                record("s", Some("CCO"), Some(low())),
                record("s", Some("CCN"), Some(low())),
                record("s", Some("CCCC"), Some(low())),
            ],
            training_index: training,
        };
        // Unique molecules: CC, CCO, CCN, CCCC; novel: 3 of 4.
        assert_eq!(set.novelty(), 0.75);

        let empty = GenerationSet {
            records: vec![record("s", None, None)],
            training_index: BTreeSet::new(),
        };
        assert_eq!(empty.novelty(), 0.0);
    }

    #[test]
    fn uniqueness_counts_repeats() {
        let set = GenerationSet {
            records: (0..4).map(|_| record("s", Some("CC"), Some(low()))).collect(),
            training_index: BTreeSet::new(),
        };
        assert_eq!(set.uniqueness().unwrap(), 0.25);
    }

    #[test]
    fn hqsr_counts_invalid_attempts_as_failures() {
        let t = BucketThresholds::default();
        let set = GenerationSet {
            records: vec![
                record("s", Some("A"), Some(high())),
                record("s", Some("B"), Some(low())),
                record("s", None, None),
                record("s", Some("C"), Some(high())),
            ],
            training_index: BTreeSet::new(),
        };
        assert_eq!(set.hqsr(&t).unwrap(), 0.5);
    }

    #[test]
    fn boundary_values_fail_the_strict_inequality() {
        let t = BucketThresholds::default();
        let at_cut = PropertyTriple {
            logd: t.logd.1,
            mrt: 2.0,
            sif: 12.0,
        };
        assert!(!is_high_quality(&at_cut, &t));
    }

    #[test]
    fn uhqs_deduplicates_within_seed() {
        let t = BucketThresholds::default();
        let mut records = Vec::new();
        for _ in 0..10 {
            records.push(record("s1", Some("HQ1"), Some(high())));
        }
        records.push(record("s2", Some("HQ1"), Some(high())));
        records.push(record("s2", Some("HQ2"), Some(high())));
        let set = GenerationSet {
            records,
            training_index: BTreeSet::new(),
        };
        // Seed 1 contributes 1 unique molecule, seed 2 contributes 2.
        assert_eq!(set.uhqs(&t).unwrap(), 1.5);
        assert_eq!(set.hqsr_s(&t).unwrap(), 1.0);
    }

    #[test]
    fn hqsr_s_counts_seeds_without_successes() {
        let t = BucketThresholds::default();
        let set = GenerationSet {
            records: vec![
                record("s1", Some("A"), Some(high())),
                record("s2", Some("B"), Some(low())),
            ],
            training_index: BTreeSet::new(),
        };
        assert_eq!(set.hqsr_s(&t).unwrap(), 0.5);
    }

    #[test]
    fn assemble_parses_and_annotates() {
        use crate::properties::SurrogatePredictor;
        let predictor = SurrogatePredictor::default();
        let set = GenerationSet::assemble(
            vec![
                RawGeneration {
                    seed_id: "s".to_string(),
                    output_text: Some("<think>swap</think>\n<SMILES>O=C1CNC(=O)CN1</SMILES>".to_string()),
                    ..RawGeneration::default()
                },
                RawGeneration {
                    seed_id: "s".to_string(),
                    output_text: Some("no tags".to_string()),
                    ..RawGeneration::default()
                },
                RawGeneration {
                    seed_id: "s".to_string(),
                    smiles: Some("C(C)(C)(C)(C)C".to_string()),
                    ..RawGeneration::default()
                },
                RawGeneration {
                    seed_id: "s".to_string(),
                    smiles: Some("CC(".to_string()),
                    ..RawGeneration::default()
                },
                RawGeneration {
                    seed_id: "s".to_string(),
                    smiles: Some("CCO".to_string()),
                    props: Some(PropertyTriple {
                        logd: f64::NAN,
                        mrt: 0.0,
                        sif: 0.0,
                    }),
                    ..RawGeneration::default()
                },
            ],
            BTreeSet::new(),
            &predictor,
        );
        let valids: Vec<bool> = set.records.iter().map(|r| r.valid).collect();
        assert_eq!(valids, vec![true, false, false, false, false]);
        assert!(set.records[0].props.is_some());
    }

    #[test]
    fn transition_identity_and_normalization() {
        let t = BucketThresholds::default();
        let triple = |logd| PropertyTriple {
            logd,
            mrt: 1.0,
            sif: 5.0,
        };
        let pairs: Vec<(PropertyTriple, PropertyTriple)> = vec![
            (triple(1.0), triple(1.0)),
            (triple(3.5), triple(3.5)),
            (triple(5.0), triple(5.0)),
        ];
        let m = transition_matrix(&pairs, Property::LogD, &t).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.rows[i][j], if i == j { 1.0 } else { 0.0 });
            }
        }

        let pairs: Vec<(PropertyTriple, PropertyTriple)> = vec![
            (triple(1.0), triple(5.0)),
            (triple(1.5), triple(6.0)),
        ];
        let m = transition_matrix(&pairs, Property::LogD, &t).unwrap();
        assert_eq!(m.rows[0], [0.0, 0.0, 1.0]);
        assert!(!m.row_has_mass(Bucket::Medium));
        assert_eq!(m.rows[1], [0.0; 3]);
    }

    #[test]
    fn report_renders_per_seed_format() {
        let t = BucketThresholds::default();
        let set = GenerationSet {
            records: vec![
                record("s1", Some("A"), Some(high())),
                record("s1", Some("B"), Some(low())),
                record("s2", Some("C"), Some(high())),
                record("s2", Some("D"), Some(high())),
            ],
            training_index: BTreeSet::new(),
        };
        let report = set.report(&t).unwrap();
        assert_eq!(report.samples_per_seed, Some(2));
        let table = report.render_table("generated");
        assert!(table.contains("/2"));
        assert!(table.contains("HQSR-S"));
    }
}
