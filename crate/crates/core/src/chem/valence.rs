//! Valence model.
//!
//! An atom's bond-order sum counts single/aromatic bonds as one unit, double
//! as two, triple as three, plus any bracket-stated hydrogens. The allowed
//! valences are the element's base valences shifted by the formal charge
//! (so `N+` allows 4, `O-` allows 1). An atom is acceptable when its bond
//! order sum does not exceed the largest allowed valence; the implicit
//! hydrogen count is the nonnegative slack against the smallest allowed
//! valence that fits.
//!
//! Aromatic atoms reserve one unit for the delocalized system when computing
//! implicit hydrogens (clamped at zero for contributors like furan-type
//! oxygen), which reproduces the conventional hydrogen counts for lowercase
//! ring atoms without any aromaticity perception.

use alloc::vec::Vec;

use super::graph::MolGraph;

fn shifted_valences(mol: &MolGraph, i: usize) -> impl Iterator<Item = i16> + '_ {
    let atom = mol.atom(i);
    let charge = i16::from(atom.charge);
    atom.element
        .base_valences()
        .iter()
        .map(move |&v| v + charge)
        .filter(|&v| v >= 0)
}

fn max_allowed(mol: &MolGraph, i: usize) -> Option<i16> {
    shifted_valences(mol, i).max()
}

/// Bond-order sum including bracket-stated hydrogens.
pub(crate) fn bond_order_sum(mol: &MolGraph, i: usize) -> u16 {
    let bonds: u16 = mol
        .neighbors(i)
        .iter()
        .map(|nb| mol.bond(nb.bond).order.valence_units())
        .sum();
    bonds + u16::from(mol.atom(i).explicit_h.unwrap_or(0))
}

/// Implicit hydrogen count: zero for bracket atoms, valence slack otherwise.
pub fn implicit_hydrogens(mol: &MolGraph, i: usize) -> u8 {
    let atom = mol.atom(i);
    if atom.explicit_h.is_some() {
        return 0;
    }
    let mut sum = i16::try_from(bond_order_sum(mol, i)).unwrap_or(i16::MAX);
    if atom.aromatic {
        sum += 1;
    }
    let target = shifted_valences(mol, i).filter(|&v| v >= sum).min();
    match target {
        Some(v) => (v - sum) as u8,
        None => 0,
    }
}

/// Stated plus implied hydrogens. Hydrogens present as graph atoms are not
/// counted here; they contribute to the degree instead.
pub fn total_hydrogens(mol: &MolGraph, i: usize) -> u8 {
    match mol.atom(i).explicit_h {
        Some(h) => h,
        None => implicit_hydrogens(mol, i),
    }
}

/// Per-atom valence diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomValence {
    pub atom: usize,
    pub bond_order_sum: u16,
    pub max_allowed: Option<i16>,
    pub implicit_h: u8,
    pub ok: bool,
}

/// Whole-molecule valence verdict with per-atom diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceVerdict {
    pub valid: bool,
    pub atoms: Vec<AtomValence>,
}

impl ValenceVerdict {
    pub fn failures(&self) -> impl Iterator<Item = &AtomValence> {
        self.atoms.iter().filter(|a| !a.ok)
    }
}

/// Checks every atom against the charge-shifted valence table.
pub fn validate_valence(mol: &MolGraph) -> ValenceVerdict {
    let mut atoms = Vec::with_capacity(mol.atom_count());
    let mut valid = true;
    for i in 0..mol.atom_count() {
        let sum = bond_order_sum(mol, i);
        let max = max_allowed(mol, i);
        // An empty charge-shifted valence set never fits.
        let ok = match max {
            Some(max) => i32::from(sum) <= i32::from(max),
            None => false,
        };
        valid &= ok;
        atoms.push(AtomValence {
            atom: i,
            bond_order_sum: sum,
            max_allowed: max,
            implicit_h: implicit_hydrogens(mol, i),
            ok,
        });
    }
    ValenceVerdict { valid, atoms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse::parse_smiles;

    #[test]
    fn pentavalent_carbon_is_invalid() {
        let mol = parse_smiles("C(C)(C)(C)(C)C").unwrap();
        let verdict = validate_valence(&mol);
        assert!(!verdict.valid);
        assert_eq!(verdict.failures().count(), 1);
        assert_eq!(verdict.atoms[0].bond_order_sum, 5);
    }

    #[test]
    fn cyclic_glycylglycine_is_valid() {
        let mol = parse_smiles("O=C1CNC(=O)CN1").unwrap();
        assert!(validate_valence(&mol).valid);
    }

    #[test]
    fn ammonium_is_valid_via_charge_shift() {
        let mol = parse_smiles("[NH4+]").unwrap();
        let verdict = validate_valence(&mol);
        assert!(verdict.valid);
        assert_eq!(verdict.atoms[0].max_allowed, Some(4));
    }

    #[test]
    fn implicit_hydrogens_fill_valence_slack() {
        let mol = parse_smiles("NCC(=O)O").unwrap();
        let counts: Vec<u8> = (0..5).map(|i| implicit_hydrogens(&mol, i)).collect();
        assert_eq!(counts, vec![2, 2, 0, 0, 1]);
    }

    #[test]
    fn aromatic_implicit_hydrogens() {
        // Benzene carbons carry one implicit hydrogen each.
        let mol = parse_smiles("c1ccccc1").unwrap();
        assert!(validate_valence(&mol).valid);
        assert!((0..6).all(|i| implicit_hydrogens(&mol, i) == 1));

        // Pyridine nitrogen carries none.
        let mol = parse_smiles("c1ccncc1").unwrap();
        assert!(validate_valence(&mol).valid);
        let n_idx = mol
            .atoms()
            .iter()
            .position(|a| a.element == crate::chem::Element::N)
            .unwrap();
        assert_eq!(implicit_hydrogens(&mol, n_idx), 0);

        // Pyrrole requires its bracketed hydrogen.
        let mol = parse_smiles("c1cc[nH]c1").unwrap();
        assert!(validate_valence(&mol).valid);

        // Furan-type oxygen contributes a lone pair, not a hydrogen.
        let mol = parse_smiles("c1ccoc1").unwrap();
        assert!(validate_valence(&mol).valid);
        let o_idx = mol
            .atoms()
            .iter()
            .position(|a| a.element == crate::chem::Element::O)
            .unwrap();
        assert_eq!(implicit_hydrogens(&mol, o_idx), 0);
    }

    #[test]
    fn sulfur_hypervalence_within_table() {
        let mol = parse_smiles("CS(=O)(=O)C").unwrap();
        assert!(validate_valence(&mol).valid);
        let mol = parse_smiles("OS(=O)(=O)(=O)O").unwrap();
        assert!(!validate_valence(&mol).valid);
    }

    #[test]
    fn negative_oxygen_allows_single_bond_only() {
        assert!(validate_valence(&parse_smiles("C[O-]").unwrap()).valid);
        assert!(!validate_valence(&parse_smiles("C=[O-]").unwrap()).valid);
    }
}
