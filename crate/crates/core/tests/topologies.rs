use pepforge_core::chem::{canonical_smiles, parse_smiles, write_smiles_with_ranks, validate_valence};

#[test]
fn tricky_topologies_round_trip() {
    let cases = [
        "C1CCC2(CC1)CCCC2",          // spiro
        "c1ccc2ccccc2c1",            // fused aromatic
        "C1CC2CCC1CC2",              // bridged bicyclic
        "C12(CCCCC1)CCCCC2",         // spiro written with double closure on one atom
        "C1CC1C1CC1",                // digit reuse after closure
        "O=C1NC(=O)NC(=O)N1",        // triazine-dione-like ring
        "C1=CC=CC=C1",               // kekulized benzene (aliphatic flags)
        "N1CC2CCC1CC2",              // aza-bridged
        "[nH]1cccc1",                // bracket aromatic opener
        "S1(=O)(=O)CCCC1",           // cyclic sulfone
        "C%11CC%11",                 // two-digit closure
        "ClC(Cl)(Cl)Cl",             // heavy substitution
        "ICBr",                      // halogen chain
        "[13C]1CC1",                 // isotope in ring
    ];
    for s in cases {
        let mol = parse_smiles(s).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert!(validate_valence(&mol).valid, "{s} fails valence");
        let canonical = canonical_smiles(&mol);
        let reparsed = parse_smiles(&canonical).unwrap_or_else(|e| panic!("{s} -> {canonical}: {e}"));
        assert!(mol.isomorphic_to(&reparsed), "{s} -> {canonical}");
        assert_eq!(canonical_smiles(&reparsed), canonical, "{s} unstable");
        // Invariance over a few fixed scrambles.
        let n = mol.atom_count();
        for stride in [3usize, 7, 11] {
            if n > 1 && gcd(stride, n) == 1 {
                let ranks: Vec<usize> = (0..n).map(|i| (i * stride + 1) % n).collect();
                let rendering = write_smiles_with_ranks(&mol, &ranks);
                let rp = parse_smiles(&rendering).unwrap_or_else(|e| panic!("{rendering}: {e}"));
                assert_eq!(canonical_smiles(&rp), canonical, "{s} via {rendering}");
            }
        }
    }
}

fn gcd(a: usize, b: usize) -> usize { if b == 0 { a } else { gcd(b, a % b) } }
