//! Sanity checks over the bundled vocabulary and seed corpus.

use std::collections::BTreeSet;
use std::path::PathBuf;

use pepforge::schema::SeedRecord;
use pepforge_core::peptide::{parse_helm, MonomerVocabulary};
use pepforge_core::properties::{
    bucketize, surrogate_predict, Bucket, BucketThresholds, Property,
};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn vocabulary() -> MonomerVocabulary {
    let text = std::fs::read_to_string(data_dir().join("monomers.tsv")).unwrap();
    MonomerVocabulary::from_tsv(&text).unwrap()
}

fn seeds() -> Vec<SeedRecord> {
    let text = std::fs::read_to_string(data_dir().join("seeds.jsonl")).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn vocabulary_loads_with_attachments_resolved() {
    let vocab = vocabulary();
    assert!(vocab.len() >= 40, "vocabulary too small: {}", vocab.len());
    let natural = vocab.iter().filter(|m| m.natural()).count();
    assert_eq!(natural, 20);
}

#[test]
fn every_seed_parses_and_assembles() {
    let vocab = vocabulary();
    let seeds = seeds();
    assert_eq!(seeds.len(), 20);
    let mut ids = BTreeSet::new();
    for seed in &seeds {
        assert!(ids.insert(seed.id.clone()), "duplicate id {}", seed.id);
        let peptide = parse_helm(&seed.helm, &vocab)
            .unwrap_or_else(|e| panic!("{}: {e}", seed.id));
        assert!(peptide.len() >= 5);
        assert_eq!(peptide.assembled().ring_count(), peptide
            .monomers()
            .iter()
            .map(|m| m.graph().ring_count())
            .sum::<usize>() + 1);
    }
}

#[test]
fn assembled_macrocycles_have_order_invariant_canonical_forms() {
    use pepforge_core::chem::{canonical_smiles, parse_smiles, write_smiles_with_ranks};
    use pepforge_core::peptide::assemble_cyclic;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    let vocab = vocabulary();
    let monomers: Vec<_> = vocab.iter().cloned().collect();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..30 {
        let n = rng.gen_range(2..=7);
        let sequence: Vec<_> = (0..n)
            .map(|_| monomers[rng.gen_range(0..monomers.len())].clone())
            .collect();
        let assembled = assemble_cyclic(&sequence).unwrap();
        let canonical = canonical_smiles(&assembled);
        for _ in 0..5 {
            let mut ranks: Vec<usize> = (0..assembled.atom_count()).collect();
            for i in (1..ranks.len()).rev() {
                let j = rng.gen_range(0..=i);
                ranks.swap(i, j);
            }
            let rendering = write_smiles_with_ranks(&assembled, &ranks);
            let reparsed = parse_smiles(&rendering).unwrap();
            assert!(assembled.isomorphic_to(&reparsed), "{rendering}");
            assert_eq!(canonical_smiles(&reparsed), canonical, "{rendering}");
        }
    }
}

#[test]
fn seed_corpus_spans_all_buckets_per_property() {
    let vocab = vocabulary();
    let thresholds = BucketThresholds::default();
    let mut buckets: [BTreeSet<Bucket>; 3] = Default::default();
    let mut rows = Vec::new();
    for seed in seeds() {
        let peptide = parse_helm(&seed.helm, &vocab).unwrap();
        let props = surrogate_predict(peptide.assembled());
        for (i, p) in Property::ALL.into_iter().enumerate() {
            buckets[i].insert(bucketize(props.get(p), p, &thresholds));
        }
        rows.push(format!(
            "{}: logd {:.2} mrt {:.2} sif {:.2}",
            seed.id, props.logd, props.mrt, props.sif
        ));
    }
    for (i, p) in Property::ALL.into_iter().enumerate() {
        assert_eq!(
            buckets[i].len(),
            3,
            "{p} does not span all buckets:\n{}",
            rows.join("\n")
        );
    }
}
