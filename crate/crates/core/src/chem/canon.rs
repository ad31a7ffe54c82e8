//! Canonical atom ranking by iterative neighborhood refinement.
//!
//! Atoms start in classes keyed by their local attributes, then classes are
//! split by the multiset of (bond order, neighbor class) pairs until stable.
//! Remaining ties are resolved by individualizing each tied atom of the
//! first tied class in turn and taking the lexicographically smallest
//! rendering, so the output does not depend on input atom order.

use alloc::string::String;
use alloc::vec::Vec;

use super::graph::MolGraph;
use super::valence::total_hydrogens;
use super::write::write_smiles_with_ranks;

/// Upper bound on explored complete labelings. Chemically reasonable inputs
/// stay far below it; beyond the bound the result is still deterministic for
/// a given atom order.
const LEAF_LIMIT: usize = 20_000;

/// Produces a deterministic SMILES rendering that is invariant under input
/// atom reordering and re-parses to an isomorphic graph.
pub fn canonical_smiles(mol: &MolGraph) -> String {
    if mol.is_empty() {
        return String::new();
    }
    let mut colors = initial_colors(mol);
    refine(mol, &mut colors);
    let mut best: Option<String> = None;
    let mut leaves = 0usize;
    search(mol, colors, &mut best, &mut leaves);
    best.expect("search yields at least one labeling")
}

/// Order-invariant atom attributes: element, aromatic flag, charge,
/// isotope, chirality, stated hydrogens, total hydrogens, degree.
type AtomKey = (u64, bool, i8, u16, u64, u16, u8, usize);

fn initial_colors(mol: &MolGraph) -> Vec<usize> {
    let n = mol.atom_count();
    let mut keys: Vec<AtomKey> = Vec::with_capacity(n);
    for i in 0..n {
        let a = mol.atom(i);
        keys.push((
            u64::from(a.element.atomic_number()),
            a.aromatic,
            a.charge,
            a.isotope.unwrap_or(0),
            a.chirality.code(),
            a.explicit_h.map_or(u16::MAX, u16::from),
            total_hydrogens(mol, i),
            mol.degree(i),
        ));
    }
    densify(&keys)
}

fn densify<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(&k).expect("key present"))
        .collect()
}

/// Splits classes by neighborhood until the partition stops changing.
fn refine(mol: &MolGraph, colors: &mut Vec<usize>) {
    let n = mol.atom_count();
    loop {
        let mut keys: Vec<(usize, Vec<(u64, usize)>)> = Vec::with_capacity(n);
        for i in 0..n {
            let mut neighborhood: Vec<(u64, usize)> = mol
                .neighbors(i)
                .iter()
                .map(|nb| (mol.bond(nb.bond).order.code(), colors[nb.atom]))
                .collect();
            neighborhood.sort_unstable();
            keys.push((colors[i], neighborhood));
        }
        let next = densify(&keys);
        if next == *colors {
            return;
        }
        *colors = next;
    }
}

fn class_count(colors: &[usize]) -> usize {
    colors.iter().max().map_or(0, |m| m + 1)
}

fn search(mol: &MolGraph, colors: Vec<usize>, best: &mut Option<String>, leaves: &mut usize) {
    if *leaves >= LEAF_LIMIT {
        return;
    }
    let n = mol.atom_count();
    if class_count(&colors) == n {
        *leaves += 1;
        let rendered = write_smiles_with_ranks(mol, &colors);
        if best.as_ref().is_none_or(|b| rendered < *b) {
            *best = Some(rendered);
        }
        return;
    }
    // First tied class by color value.
    let target = (0..n)
        .map(|i| colors[i])
        .filter(|&c| colors.iter().filter(|&&x| x == c).count() > 1)
        .min()
        .expect("non-discrete partition has a tied class");
    for atom in 0..n {
        if colors[atom] != target {
            continue;
        }
        if *leaves >= LEAF_LIMIT {
            return;
        }
        let mut child: Vec<usize> = colors.iter().map(|&c| c * 2).collect();
        for (j, c) in child.iter_mut().enumerate() {
            if colors[j] == target && j != atom {
                *c += 1;
            }
        }
        refine(mol, &mut child);
        search(mol, child, best, leaves);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse::parse_smiles;

    #[test]
    fn reorder_invariance() {
        let a = canonical_smiles(&parse_smiles("OCC").unwrap());
        let b = canonical_smiles(&parse_smiles("CCO").unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn single_carbon_is_a_fixed_point() {
        assert_eq!(canonical_smiles(&parse_smiles("C").unwrap()), "C");
    }

    #[test]
    fn canonical_round_trips_to_isomorphic_graph() {
        for s in [
            "NCC(=O)O",
            "O=C1CNC(=O)CN1",
            "N[C@H](CC(C)C)C(=O)O",
            "[NH2+][C@@H](c1c(Sc2ccc(cc2)F)ccc(c1)C#N)C(=O)[O-]",
            "c1ccc2ccccc2c1",
        ] {
            let mol = parse_smiles(s).unwrap();
            let canon = canonical_smiles(&mol);
            let reparsed = parse_smiles(&canon).unwrap();
            assert!(mol.isomorphic_to(&reparsed), "{s} -> {canon}");
            assert_eq!(canonical_smiles(&reparsed), canon, "{s} not stable");
        }
    }

    #[test]
    fn permuted_renderings_share_one_canonical_form() {
        use crate::chem::write::write_smiles_with_ranks;
        let sources = [
            "N[C@@H](Cc1ccc(O)cc1)C(=O)O",
            "CC(C)(C)c1cc(Cl)cc(Cl)c1",
            "O=C1CNC(=O)CN1",
        ];
        for s in sources {
            let mol = parse_smiles(s).unwrap();
            let canon = canonical_smiles(&mol);
            let n = mol.atom_count();
            for step in 1..6usize {
                // Permutations from co-prime strides.
                if n.is_multiple_of(step + 1) {
                    continue;
                }
                let ranks: Vec<usize> = (0..n).map(|i| (i * (step + 1)) % n).collect();
                let mut sorted = ranks.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != n {
                    continue;
                }
                let rendering = write_smiles_with_ranks(&mol, &ranks);
                let reparsed = parse_smiles(&rendering).unwrap();
                assert_eq!(canonical_smiles(&reparsed), canon, "{s} via {rendering}");
            }
        }
    }

    #[test]
    fn stereo_tag_changes_identity() {
        let l_pro = canonical_smiles(&parse_smiles("N1[C@@H](CCC1)C(=O)O").unwrap());
        let d_pro = canonical_smiles(&parse_smiles("N1[C@H](CCC1)C(=O)O").unwrap());
        assert_ne!(l_pro, d_pro);
    }

    #[test]
    fn symmetric_molecules_terminate() {
        // High rotational symmetry exercises the tie-breaking search.
        let benzene = canonical_smiles(&parse_smiles("c1ccccc1").unwrap());
        assert_eq!(benzene, "c1ccccc1");
        let cyclohexane = canonical_smiles(&parse_smiles("C1CCCCC1").unwrap());
        assert_eq!(cyclohexane, "C1CCCCC1");
    }
}
