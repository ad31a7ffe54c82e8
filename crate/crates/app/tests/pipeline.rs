//! Pipeline stage behavior on small and degenerate inputs.

use std::path::PathBuf;

use pepforge::config::AppConfig;
use pepforge::pipeline::{run_augment, run_evaluate, EvalInput};
use pepforge::schema::{read_jsonl, write_jsonl, GenerationRecord};

fn config() -> AppConfig {
    AppConfig {
        vocabulary: PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/monomers.tsv"),
        ..AppConfig::default()
    }
}

#[test]
fn empty_seed_file_yields_empty_output_and_a_warning() {
    let tmp = tempfile::tempdir().unwrap();
    let seeds = tmp.path().join("seeds.jsonl");
    std::fs::write(&seeds, "").unwrap();
    let out = tmp.path().join("pairs.jsonl");
    let summary = run_augment(&config(), &seeds, 10, &out).unwrap();
    assert_eq!(summary.pairs, 0);
    assert!(!summary.warnings.is_empty());
    let records: Vec<serde_json::Value> = read_jsonl(&out).unwrap();
    assert!(records.is_empty());
}

#[test]
fn unparseable_seeds_are_skipped_with_reasons() {
    let tmp = tempfile::tempdir().unwrap();
    let seeds = tmp.path().join("seeds.jsonl");
    std::fs::write(
        &seeds,
        concat!(
            "{\"id\":\"good\",\"helm\":\"PEPTIDE1{G.A.G}$PEPTIDE1,PEPTIDE1,3:R2-1:R1$$$\"}\n",
            "{\"id\":\"bad\",\"helm\":\"PEPTIDE1{G.[Zz].G}$PEPTIDE1,PEPTIDE1,3:R2-1:R1$$$\"}\n",
        ),
    )
    .unwrap();
    let out = tmp.path().join("pairs.jsonl");
    let summary = run_augment(&config(), &seeds, 5, &out).unwrap();
    assert_eq!(summary.seeds, 2);
    assert_eq!(summary.seeds_skipped, 1);
    assert!(summary.warnings.iter().any(|w| w.contains("Zz")));
    assert!(summary.pairs > 0);
}

#[test]
fn evaluate_accepts_generation_dumps_with_tagged_output() {
    let tmp = tempfile::tempdir().unwrap();
    let dump = tmp.path().join("dump.jsonl");
    let records = vec![
        GenerationRecord {
            seed_id: "s1".into(),
            output_text: Some("<think>swap</think>\n<SMILES>O=C1CNC(=O)CN1</SMILES>".into()),
            ..GenerationRecord::default()
        },
        GenerationRecord {
            seed_id: "s1".into(),
            output_text: Some("no tags here".into()),
            ..GenerationRecord::default()
        },
        GenerationRecord {
            seed_id: "s2".into(),
            smiles: Some("O=C1CNC(=O)C(CC(C)C)N1".into()),
            logd: Some(5.0),
            mrt: Some(2.0),
            sif: Some(12.0),
            ..GenerationRecord::default()
        },
        GenerationRecord {
            seed_id: "s2".into(),
            smiles: Some("C(C)(C)(C)(C)C".into()),
            ..GenerationRecord::default()
        },
    ];
    write_jsonl(&dump, &records).unwrap();
    let out = tmp.path().join("eval");
    let outputs = run_evaluate(
        &config(),
        &EvalInput::Generations(dump),
        None,
        "dump",
        &out,
    )
    .unwrap();
    assert_eq!(outputs.report.total_records, 4);
    assert_eq!(outputs.report.valid_records, 2);
    assert_eq!(outputs.report.validity, 0.5);
    // One seed in two reaches the thresholds via the supplied annotations.
    assert_eq!(outputs.report.hqsr_s, 0.5);
    assert!(outputs.transitions.is_empty());
    assert!(out.join("report.json").exists());
    assert!(out.join("report.txt").exists());
}
