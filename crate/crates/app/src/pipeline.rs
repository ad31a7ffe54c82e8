//! Dataset pipeline stages. Each stage reads the previous stage's JSONL,
//! writes the next, and prints a one-line summary to stderr. All stages are
//! deterministic under the configured rng seed.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use pepforge_core::chem::parse_smiles;
use pepforge_core::evalkit::{transition_matrix, EvalReport, GenerationSet, RawGeneration, TransitionMatrix};
use pepforge_core::peptide::{augment_with_stats, parse_helm, MonomerVocabulary};
use pepforge_core::prompts::{build_prompt_parts, PromptStyle};
use pepforge_core::properties::{
    build_splits, categorize_props, Property, PropertyPredictor, SplitCaps, SplitItem,
    SurrogatePredictor,
};

use crate::config::{AppConfig, ObjectiveMode, PromptStyleName};
use crate::schema::{
    read_jsonl, write_jsonl, BucketRecord, GenerationRecord, PairRecord, PromptMetadata,
    PromptRecord, SeedRecord,
};

pub fn load_vocabulary(path: &Path) -> Result<MonomerVocabulary> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading vocabulary {}", path.display()))?;
    MonomerVocabulary::from_tsv(&text)
        .map_err(|e| anyhow::anyhow!("vocabulary {}: {e}", path.display()))
}

#[derive(Debug, Default)]
pub struct AugmentSummary {
    pub seeds: usize,
    pub seeds_skipped: usize,
    pub pairs: usize,
    pub attempts: usize,
    pub identity_skips: usize,
    pub assembly_failures: usize,
    pub duplicates_removed: usize,
    pub warnings: Vec<String>,
}

/// Stage 1: single-position mutation augmentation over a seed file.
/// Each seed record uses the stream seeded by `rng_seed + record index`.
pub fn run_augment(
    config: &AppConfig,
    seeds_path: &Path,
    k: usize,
    out: &Path,
) -> Result<AugmentSummary> {
    let vocab = load_vocabulary(&config.vocabulary)?;
    let seeds: Vec<SeedRecord> = read_jsonl(seeds_path)?;
    let mut summary = AugmentSummary::default();
    let mut records = Vec::new();
    for (index, seed) in seeds.iter().enumerate() {
        summary.seeds += 1;
        let peptide = match parse_helm(&seed.helm, &vocab) {
            Ok(p) => p,
            Err(e) => {
                summary.seeds_skipped += 1;
                summary
                    .warnings
                    .push(format!("seed '{}' skipped: {e}", seed.id));
                continue;
            }
        };
        let stream_seed = config.rng_seed.wrapping_add(index as u64);
        let (pairs, stats) = augment_with_stats(&peptide, &vocab, k, stream_seed);
        summary.attempts += stats.attempts;
        summary.identity_skips += stats.identity_skips;
        summary.assembly_failures += stats.assembly_failures;
        summary.duplicates_removed += stats.duplicates_removed;
        for pair in &pairs {
            records.push(PairRecord::from_pair(&seed.id, pair));
        }
    }
    summary.pairs = records.len();
    if summary.seeds == 0 {
        summary.warnings.push("seed file is empty".to_string());
    }
    write_jsonl(out, &records)?;
    eprintln!(
        "augment: {} seeds ({} skipped), {} pairs from {} attempts ({} identity, {} failed, {} duplicate){}",
        summary.seeds,
        summary.seeds_skipped,
        summary.pairs,
        summary.attempts,
        summary.identity_skips,
        summary.assembly_failures,
        summary.duplicates_removed,
        if summary.warnings.is_empty() {
            String::new()
        } else {
            format!("; {} warnings", summary.warnings.len())
        }
    );
    for warning in &summary.warnings {
        eprintln!("  warning: {warning}");
    }
    Ok(summary)
}

/// Stage 2: property annotation and improvement categorization.
pub fn run_annotate(config: &AppConfig, input: &Path, out: &Path) -> Result<usize> {
    let predictor = SurrogatePredictor::new(config.surrogate);
    let mut records: Vec<PairRecord> = read_jsonl(input)?;
    let mut skipped = 0usize;
    let mut annotated = Vec::with_capacity(records.len());
    for (i, mut record) in records.drain(..).enumerate() {
        match annotate_record(&mut record, &predictor, config) {
            Ok(()) => annotated.push(record),
            Err(e) => {
                skipped += 1;
                eprintln!("  record {}: skipped: {e}", i + 1);
            }
        }
    }
    write_jsonl(out, &annotated)?;
    eprintln!("annotate: {} records ({} skipped)", annotated.len(), skipped);
    Ok(annotated.len())
}

fn annotate_record(
    record: &mut PairRecord,
    predictor: &SurrogatePredictor,
    config: &AppConfig,
) -> Result<()> {
    let original_graph = parse_smiles(&record.original.canonical_smiles)
        .map_err(|e| anyhow::anyhow!("original: {e}"))?;
    let mutated_graph = parse_smiles(&record.mutated.canonical_smiles)
        .map_err(|e| anyhow::anyhow!("mutated: {e}"))?;
    let original_props = predictor
        .predict_graph(&original_graph)
        .map_err(|e| anyhow::anyhow!("original: {e}"))?;
    let mutated_props = predictor
        .predict_graph(&mutated_graph)
        .map_err(|e| anyhow::anyhow!("mutated: {e}"))?;
    let label = categorize_props(&original_props, &mutated_props, &config.thresholds);
    record.original.buckets = Some(BucketRecord::from_props(&original_props, &config.thresholds));
    record.mutated.buckets = Some(BucketRecord::from_props(&mutated_props, &config.thresholds));
    record.original.props = Some(original_props);
    record.mutated.props = Some(mutated_props);
    record.improved = Some(label.improved());
    record.arity = Some(label.arity());
    Ok(())
}

#[derive(Debug, serde::Serialize)]
pub struct SplitSummary {
    pub input: usize,
    pub sft: usize,
    pub rl_pool: usize,
    pub test: usize,
    pub warnings: Vec<String>,
}

/// Stage 3: training/pool/hold-out split construction.
pub fn run_split(
    config: &AppConfig,
    caps: &SplitCaps,
    input: &Path,
    outdir: &Path,
) -> Result<SplitSummary> {
    let records: Vec<PairRecord> = read_jsonl(input)?;
    let mut items = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let Some(label) = record.improvement_label() else {
            bail!("{}:{}: record is not annotated; run annotate first", input.display(), i + 1);
        };
        items.push(SplitItem {
            label,
            original_canonical: &record.original.canonical_smiles,
        });
    }
    let result = build_splits(&items, caps, config.rng_seed);

    let pick = |indices: &[usize]| -> Vec<PairRecord> {
        indices.iter().map(|&i| records[i].clone()).collect()
    };
    fs::create_dir_all(outdir).with_context(|| format!("creating {}", outdir.display()))?;
    write_jsonl(&outdir.join("sft.jsonl"), &pick(&result.sft))?;
    write_jsonl(&outdir.join("rl_pool.jsonl"), &pick(&result.rl_pool))?;
    write_jsonl(&outdir.join("test.jsonl"), &pick(&result.test))?;
    let summary = SplitSummary {
        input: records.len(),
        sft: result.sft.len(),
        rl_pool: result.rl_pool.len(),
        test: result.test.len(),
        warnings: result.warnings.clone(),
    };
    fs::write(
        outdir.join("split_summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    eprintln!(
        "split: {} -> sft {}, rl_pool {}, test {}{}",
        summary.input,
        summary.sft,
        summary.rl_pool,
        summary.test,
        if summary.warnings.is_empty() {
            String::new()
        } else {
            format!("; {} warnings", summary.warnings.len())
        }
    );
    for warning in &summary.warnings {
        eprintln!("  warning: {warning}");
    }
    Ok(summary)
}

pub fn prompt_style(
    name: PromptStyleName,
    objective: ObjectiveMode,
    improved: &[Property],
) -> PromptStyle {
    let base = match name {
        PromptStyleName::Cot => PromptStyle::cot(),
        PromptStyleName::NonCot => PromptStyle::non_cot(),
        PromptStyleName::CotOneShot => PromptStyle::cot_one_shot(),
    };
    match objective {
        ObjectiveMode::All => base,
        ObjectiveMode::Improved => base.with_objective(improved),
    }
}

/// Stage 4: render the SFT dataset from annotated pairs.
pub fn run_build_prompts(
    style: PromptStyleName,
    objective: ObjectiveMode,
    input: &Path,
    out: &Path,
) -> Result<usize> {
    let records: Vec<PairRecord> = read_jsonl(input)?;
    let mut prompts = Vec::with_capacity(records.len());
    for record in &records {
        let improved: Vec<Property> = record.improved.clone().unwrap_or_default();
        let style = prompt_style(style, objective, &improved);
        let sample = build_prompt_parts(
            &record.original.canonical_smiles,
            &record.mutated.canonical_smiles,
            record.position,
            &record.leaving_smiles,
            &record.incoming_smiles,
            &style,
        );
        prompts.push(PromptRecord {
            prompt: sample.prompt.clone(),
            target: sample.target(),
            metadata: PromptMetadata {
                seed_id: record.seed_id.clone(),
                position: record.position,
                leaving: record.leaving_smiles.clone(),
                incoming: record.incoming_smiles.clone(),
            },
        });
    }
    write_jsonl(out, &prompts)?;
    eprintln!("build-prompts: {} samples", prompts.len());
    Ok(prompts.len())
}

/// What the evaluate stage consumes.
pub enum EvalInput {
    /// Generation dump records.
    Generations(PathBuf),
    /// Annotated pair records, treating each mutated peptide as a
    /// generation from its original.
    Pairs(PathBuf),
}

pub struct EvalOutputs {
    pub report: EvalReport,
    pub transitions: Vec<TransitionMatrix>,
}

/// Stage 5: six-metric report plus bucket transition matrices (pairs input
/// only). Writes `report.json`, `report.txt`, and one CSV per property.
pub fn run_evaluate(
    config: &AppConfig,
    input: &EvalInput,
    training: Option<&Path>,
    label: &str,
    outdir: &Path,
) -> Result<EvalOutputs> {
    let predictor = SurrogatePredictor::new(config.surrogate);
    let training_index: BTreeSet<String> = match training {
        Some(path) => {
            let records: Vec<PairRecord> = read_jsonl(path)?;
            records
                .into_iter()
                .map(|r| r.mutated.canonical_smiles)
                .collect()
        }
        None => BTreeSet::new(),
    };

    let mut transition_pairs = Vec::new();
    let raw: Vec<RawGeneration> = match input {
        EvalInput::Generations(path) => {
            let records: Vec<GenerationRecord> = read_jsonl(path)?;
            records
                .into_iter()
                .map(|r| RawGeneration {
                    seed_id: r.seed_id.clone(),
                    output_text: r.output_text.clone(),
                    smiles: r.smiles.clone(),
                    props: r.props(),
                })
                .collect()
        }
        EvalInput::Pairs(path) => {
            let records: Vec<PairRecord> = read_jsonl(path)?;
            for record in &records {
                if let (Some(before), Some(after)) = (record.original.props, record.mutated.props)
                {
                    transition_pairs.push((before, after));
                }
            }
            records
                .into_iter()
                .map(|r| RawGeneration {
                    seed_id: r.seed_id,
                    output_text: None,
                    smiles: Some(r.mutated.canonical_smiles),
                    props: r.mutated.props,
                })
                .collect()
        }
    };

    let set = GenerationSet::assemble(raw, training_index, &predictor);
    let report = set
        .report(&config.thresholds)
        .map_err(|e| anyhow::anyhow!("evaluate: {e}"))?;

    let mut transitions = Vec::new();
    if !transition_pairs.is_empty() {
        for property in Property::ALL {
            transitions.push(
                transition_matrix(&transition_pairs, property, &config.thresholds)
                    .map_err(|e| anyhow::anyhow!("transitions: {e}"))?,
            );
        }
    }

    fs::create_dir_all(outdir).with_context(|| format!("creating {}", outdir.display()))?;
    fs::write(
        outdir.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    fs::write(outdir.join("report.txt"), report.render_table(label))?;
    for matrix in &transitions {
        let name = format!("transitions_{}.csv", matrix.property.name().to_lowercase());
        fs::write(outdir.join(name), transition_csv(matrix))?;
    }
    eprint!("evaluate:\n{}", report.render_table(label));
    Ok(EvalOutputs {
        report,
        transitions,
    })
}

/// CSV rendering: one row per before-bucket with its observation count.
pub fn transition_csv(matrix: &TransitionMatrix) -> String {
    let mut out = String::from("from,low,medium,high,count\n");
    for (i, bucket) in ["low", "medium", "high"].iter().enumerate() {
        out.push_str(&format!(
            "{bucket},{},{},{},{}\n",
            matrix.rows[i][0], matrix.rows[i][1], matrix.rows[i][2], matrix.counts[i]
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_csv_shape() {
        let m = TransitionMatrix {
            property: Property::LogD,
            rows: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            counts: [3, 2, 1],
        };
        let csv = transition_csv(&m);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("from,low,medium,high,count\n"));
        assert!(csv.contains("low,1,0,0,3"));
    }
}
