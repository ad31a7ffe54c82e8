//! Property tests over the library invariants.

use proptest::prelude::*;

use pepforge_core::chem::{
    canonical_smiles, morgan_fingerprint, parse_smiles, tanimoto, validate_valence, write_smiles,
    write_smiles_with_ranks, Atom, BondOrder, Element, Fingerprint, MolGraph,
};
use pepforge_core::evalkit::{GenRecord, GenerationSet};
use pepforge_core::grpo::{advantages, kl_estimate};
use pepforge_core::properties::{
    bucketize, surrogate_predict, BucketThresholds, Property, PropertyTriple,
};
use pepforge_core::prompts::{build_prompt_parts, parse_output, PromptStyle};
use pepforge_core::reward::{property_desirability, GenerationHistory, RewardConfig};

const ELEMENTS: [Element; 6] = [
    Element::C,
    Element::N,
    Element::O,
    Element::S,
    Element::P,
    Element::Cl,
];
const ORDERS: [BondOrder; 3] = [BondOrder::Single, BondOrder::Double, BondOrder::Triple];

/// Builds a connected molecule from raw draws: a random tree plus up to two
/// extra ring-closing edges, keeping only valence-valid results.
fn arb_molecule() -> impl Strategy<Value = MolGraph> {
    (
        2usize..9,
        proptest::collection::vec(any::<u8>(), 16),
        proptest::collection::vec(any::<u8>(), 16),
        proptest::collection::vec(any::<u8>(), 16),
    )
        .prop_filter_map("valence-valid molecule", |(n, elems, parents, orders)| {
            let mut mol = MolGraph::new();
            for i in 0..n {
                let element = ELEMENTS[elems[i] as usize % ELEMENTS.len()];
                mol.add_atom(Atom::new(element));
            }
            for i in 1..n {
                let parent = parents[i] as usize % i;
                let order = ORDERS[orders[i] as usize % ORDERS.len()];
                mol.add_bond(parent, i, order).ok()?;
            }
            // Up to two extra edges close rings.
            for k in 0..2 {
                let a = parents[8 + k] as usize % n;
                let b = elems[8 + k] as usize % n;
                if a != b && mol.bond_between(a, b).is_none() && orders[8 + k] % 3 == 0 {
                    let _ = mol.add_bond(a, b, BondOrder::Single);
                }
            }
            validate_valence(&mol).valid.then_some(mol)
        })
}

fn permutation(n: usize, seed: &[u8]) -> Vec<usize> {
    let mut ranks: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = seed[i % seed.len()] as usize % (i + 1);
        ranks.swap(i, j);
    }
    ranks
}

proptest! {
    #[test]
    fn parse_write_round_trip_is_isomorphic(mol in arb_molecule()) {
        let written = write_smiles(&mol);
        let reparsed = parse_smiles(&written).unwrap();
        prop_assert!(mol.isomorphic_to(&reparsed));

        let canonical = canonical_smiles(&mol);
        let canon_parsed = parse_smiles(&canonical).unwrap();
        prop_assert!(mol.isomorphic_to(&canon_parsed));
    }

    #[test]
    fn canonical_and_fingerprint_are_permutation_invariant(
        mol in arb_molecule(),
        seed in proptest::collection::vec(any::<u8>(), 16),
    ) {
        let canonical = canonical_smiles(&mol);
        let fp = morgan_fingerprint(&mol, 2, 1024);
        let ranks = permutation(mol.atom_count(), &seed);
        let rendering = write_smiles_with_ranks(&mol, &ranks);
        let reparsed = parse_smiles(&rendering).unwrap();
        prop_assert_eq!(canonical_smiles(&reparsed), canonical);
        prop_assert_eq!(morgan_fingerprint(&reparsed, 2, 1024), fp);
    }

    #[test]
    fn element_change_changes_fingerprint(mol in arb_molecule(), pick in any::<u8>()) {
        let idx = pick as usize % mol.atom_count();
        let original = mol.atom(idx).element;
        let replacement = if original == Element::C { Element::N } else { Element::C };
        let mut changed = mol.clone();
        changed.atom_mut(idx).element = replacement;
        // Keep only valence-valid replacements.
        if validate_valence(&changed).valid {
            prop_assert_ne!(
                morgan_fingerprint(&mol, 2, 2048),
                morgan_fingerprint(&changed, 2, 2048)
            );
        }
    }

    #[test]
    fn tanimoto_is_symmetric_and_bounded(
        a in proptest::collection::btree_set(0u32..256, 0..40),
        b in proptest::collection::btree_set(0u32..256, 0..40),
    ) {
        let fa = Fingerprint::from_bits(a.clone(), 256);
        let fb = Fingerprint::from_bits(b.clone(), 256);
        let ab = tanimoto(&fa, &fb).unwrap();
        let ba = tanimoto(&fb, &fa).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(ab == 1.0, a == b);
    }

    #[test]
    fn bucketize_is_monotone(x in -50.0f64..50.0, y in -50.0f64..50.0) {
        let t = BucketThresholds::default();
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        for p in Property::ALL {
            prop_assert!(bucketize(lo, p, &t) <= bucketize(hi, p, &t));
        }
    }

    #[test]
    fn surrogate_is_permutation_invariant(
        mol in arb_molecule(),
        seed in proptest::collection::vec(any::<u8>(), 16),
    ) {
        let ranks = permutation(mol.atom_count(), &seed);
        let rendering = write_smiles_with_ranks(&mol, &ranks);
        let reparsed = parse_smiles(&rendering).unwrap();
        prop_assert_eq!(surrogate_predict(&mol), surrogate_predict(&reparsed));
    }

    #[test]
    fn desirability_is_monotone_and_bounded(
        logd in -20.0f64..20.0,
        mrt in 0.0f64..40.0,
        sif in 0.0f64..40.0,
        bump in 0.0f64..10.0,
    ) {
        let cfg = RewardConfig::default();
        let base = PropertyTriple { logd, mrt, sif };
        let value = property_desirability(&base, &cfg);
        prop_assert!((0.0..=1.0).contains(&value));
        for p in Property::ALL {
            let mut raised = base;
            match p {
                Property::LogD => raised.logd += bump,
                Property::Mrt => raised.mrt += bump,
                Property::Sif => raised.sif += bump,
            }
            prop_assert!(property_desirability(&raised, &cfg) >= value);
        }
    }

    #[test]
    fn duplication_decay_follows_the_count(gamma in 0.0f64..3.0, repeats in 1usize..8) {
        let cfg = RewardConfig { gamma, ..RewardConfig::default() };
        let mut history = GenerationHistory::new(64);
        for m in 1..=repeats {
            let fac = pepforge_core::reward::duplication_factor("X", &mut history, &cfg);
            let expected = (1.0 / m as f64).powf(gamma);
            prop_assert!((fac - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn advantages_normalize_and_center(
        rewards in proptest::collection::vec(-10.0f64..10.0, 2..12),
        shift in -50.0f64..50.0,
        scale in 0.1f64..20.0,
    ) {
        let base = advantages(&rewards).unwrap();
        let sum: f64 = base.iter().sum();
        prop_assert!(sum.abs() < 1e-9);
        let shifted: Vec<f64> = rewards.iter().map(|r| r + shift).collect();
        let scaled: Vec<f64> = rewards.iter().map(|r| r * scale).collect();
        for (a, b) in base.iter().zip(advantages(&shifted).unwrap()) {
            prop_assert!((a - b).abs() < 1e-6);
        }
        for (a, b) in base.iter().zip(advantages(&scaled).unwrap()) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn kl_estimate_is_nonnegative(theta in -20.0f64..20.0, reference in -20.0f64..20.0) {
        let kl = kl_estimate(theta, reference);
        prop_assert!(kl >= 0.0);
        prop_assert_eq!(kl == 0.0, theta == reference);
    }

    #[test]
    fn prompt_target_round_trips(
        position in 1usize..12,
        leaving in "[A-Za-z0-9()=@#+-]{1,30}",
        incoming in "[A-Za-z0-9()=@#+-]{1,30}",
    ) {
        let sample = build_prompt_parts(
            "O=C1CNC(=O)CN1",
            "O=C1CNC(=O)C(C)N1",
            position,
            &leaving,
            &incoming,
            &PromptStyle::cot(),
        );
        let parsed = parse_output(&sample.target());
        prop_assert!(parsed.well_formed);
        prop_assert_eq!(parsed.think.as_deref(), sample.think.as_deref());
        prop_assert_eq!(parsed.smiles.as_deref(), Some(sample.answer_smiles.as_str()));
    }

    #[test]
    fn metrics_are_permutation_invariant_and_uhqs_bounds_hqsr_s(
        flags in proptest::collection::vec((0u8..3, 0u8..4, any::<bool>()), 1..40),
        rotation in any::<usize>(),
    ) {
        let t = BucketThresholds::default();
        let records: Vec<GenRecord> = flags
            .iter()
            .map(|&(seed, molecule, high)| GenRecord {
                seed_id: format!("s{seed}"),
                raw_output: None,
                smiles: Some(format!("M{molecule}")),
                canonical: Some(format!("M{molecule}")),
                props: Some(if high {
                    PropertyTriple { logd: 5.0, mrt: 2.0, sif: 12.0 }
                } else {
                    PropertyTriple { logd: 0.0, mrt: 0.1, sif: 0.5 }
                }),
                valid: true,
            })
            .collect();
        let mut rotated = records.clone();
        rotated.rotate_left(rotation % records.len().max(1));
        let set = GenerationSet { records, training_index: Default::default() };
        let set_rotated = GenerationSet { records: rotated, training_index: Default::default() };
        prop_assert_eq!(set.validity().unwrap(), set_rotated.validity().unwrap());
        prop_assert_eq!(set.novelty(), set_rotated.novelty());
        prop_assert_eq!(set.uniqueness().unwrap(), set_rotated.uniqueness().unwrap());
        prop_assert_eq!(set.hqsr(&t).unwrap(), set_rotated.hqsr(&t).unwrap());
        prop_assert_eq!(set.uhqs(&t).unwrap(), set_rotated.uhqs(&t).unwrap());
        prop_assert_eq!(set.hqsr_s(&t).unwrap(), set_rotated.hqsr_s(&t).unwrap());
        // Every successful seed contributes at least one unique molecule.
        prop_assert!(set.uhqs(&t).unwrap() >= set.hqsr_s(&t).unwrap());
    }
}
