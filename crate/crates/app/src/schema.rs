//! Line-delimited JSON record schemas shared by the pipeline stages.
//!
//! Files are one JSON object per line. Stages consume the previous stage's
//! records and add fields; optional fields are omitted when absent so reruns
//! are byte-stable.

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use pepforge_core::peptide::{parse_helm, MonomerVocabulary, Peptide, PeptidePair};
use pepforge_core::properties::{Arity, Bucket, ImprovementLabel, Property, PropertyTriple};

/// Seed peptide input record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedRecord {
    pub id: String,
    pub helm: String,
}

/// A peptide as persisted in pair records.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PeptideRecord {
    pub helm: String,
    pub canonical_smiles: String,
    pub monomer_ids: Vec<String>,
    /// Annotation fields (logd, mrt, sif) inlined into the record.
    #[serde(flatten)]
    pub props: Option<PropertyTriple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buckets: Option<BucketRecord>,
}

impl PeptideRecord {
    pub fn from_peptide(peptide: &Peptide) -> PeptideRecord {
        PeptideRecord {
            helm: peptide.helm(),
            canonical_smiles: peptide.canonical().to_string(),
            monomer_ids: peptide
                .monomer_ids()
                .into_iter()
                .map(str::to_string)
                .collect(),
            props: None,
            buckets: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BucketRecord {
    pub logd: Bucket,
    pub mrt: Bucket,
    pub sif: Bucket,
}

impl BucketRecord {
    pub fn from_props(
        props: &PropertyTriple,
        thresholds: &pepforge_core::properties::BucketThresholds,
    ) -> BucketRecord {
        use pepforge_core::properties::bucketize;
        BucketRecord {
            logd: bucketize(props.logd, Property::LogD, thresholds),
            mrt: bucketize(props.mrt, Property::Mrt, thresholds),
            sif: bucketize(props.sif, Property::Sif, thresholds),
        }
    }
}

/// One augmentation pair, possibly annotated and categorized by later
/// stages.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairRecord {
    pub seed_id: String,
    /// 1-based monomer index of the substitution.
    pub position: usize,
    pub leaving_id: String,
    pub leaving_smiles: String,
    pub incoming_id: String,
    pub incoming_smiles: String,
    pub original: PeptideRecord,
    pub mutated: PeptideRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub improved: Option<Vec<Property>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arity: Option<Arity>,
}

impl PairRecord {
    pub fn from_pair(seed_id: &str, pair: &PeptidePair) -> PairRecord {
        PairRecord {
            seed_id: seed_id.to_string(),
            position: pair.position,
            leaving_id: pair.leaving.id().to_string(),
            leaving_smiles: pair.leaving.smiles().to_string(),
            incoming_id: pair.incoming.id().to_string(),
            incoming_smiles: pair.incoming.smiles().to_string(),
            original: PeptideRecord::from_peptide(&pair.original),
            mutated: PeptideRecord::from_peptide(&pair.mutated),
            improved: None,
            arity: None,
        }
    }

    pub fn improvement_label(&self) -> Option<ImprovementLabel> {
        let improved = self.improved.as_ref()?;
        Some(ImprovementLabel {
            logd: improved.contains(&Property::LogD),
            mrt: improved.contains(&Property::Mrt),
            sif: improved.contains(&Property::Sif),
        })
    }

    /// Rebuilds the full pair (graphs included) from the record via the
    /// vocabulary.
    pub fn hydrate(&self, vocab: &MonomerVocabulary) -> Result<PeptidePair> {
        let original = parse_helm(&self.original.helm, vocab)
            .with_context(|| format!("rehydrating original of {}", self.seed_id))?;
        let incoming = vocab
            .get(&self.incoming_id)
            .with_context(|| format!("incoming monomer {} missing from vocabulary", self.incoming_id))?;
        let pair = pepforge_core::peptide::mutate(&original, self.position, incoming)
            .with_context(|| format!("rehydrating mutation of {}", self.seed_id))?;
        Ok(pair)
    }
}

/// SFT dataset record: rendered prompt and target plus the substitution
/// metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptRecord {
    pub prompt: String,
    pub target: String,
    pub metadata: PromptMetadata,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptMetadata {
    pub seed_id: String,
    pub position: usize,
    pub leaving: String,
    pub incoming: String,
}

/// Generation dump record: either raw tagged output text or a bare SMILES,
/// with optional precomputed properties.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct GenerationRecord {
    pub seed_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smiles: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mrt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sif: Option<f64>,
}

impl GenerationRecord {
    pub fn props(&self) -> Option<PropertyTriple> {
        match (self.logd, self.mrt, self.sif) {
            (Some(logd), Some(mrt), Some(sif)) => Some(PropertyTriple { logd, mrt, sif }),
            _ => None,
        }
    }
}

/// Reads a JSONL file, reporting the 1-based line number of any bad record.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(record) => records.push(record),
            Err(e) => bail!("{}:{}: {e}", path.display(), i + 1),
        }
    }
    Ok(records)
}

/// Writes records as JSONL. Output is byte-deterministic for identical
/// record sequences.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}
