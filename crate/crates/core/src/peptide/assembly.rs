use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::chem::{validate_valence, BondOrder, MolGraph};

use super::monomer::{is_leaving_oxygen, Monomer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssemblyError {
    /// Head-to-tail cyclization needs at least two monomers.
    TooFewMonomers(usize),
    /// Monomer at this position has no leaving oxygen on its acid carbon.
    NoLeavingOxygen { position: usize },
    /// Monomer at this position has no available hydrogen on its amine.
    NoAmineHydrogen { position: usize },
    /// The condensed product failed the valence check.
    InvalidProduct,
    /// The condensed product is not a single connected molecule.
    Disconnected,
}

impl fmt::Display for AssemblyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssemblyError::TooFewMonomers(n) => {
                write!(f, "cyclic assembly needs at least 2 monomers, got {n}")
            }
            AssemblyError::NoLeavingOxygen { position } => {
                write!(f, "monomer {position}: acid carbon has no leaving oxygen")
            }
            AssemblyError::NoAmineHydrogen { position } => {
                write!(f, "monomer {position}: amine nitrogen has no available hydrogen")
            }
            AssemblyError::InvalidProduct => write!(f, "assembled molecule fails valence"),
            AssemblyError::Disconnected => write!(f, "assembled molecule is not connected"),
        }
    }
}

impl core::error::Error for AssemblyError {}

/// Condenses the monomer sequence into one head-to-tail macrocycle.
///
/// For each consecutive pair (wrapping around), the leaving oxygen on the
/// donor's acid carbon is deleted and a single bond is formed from that
/// carbon to the acceptor's amine nitrogen, consuming one of the nitrogen's
/// hydrogens. Positively charged amines are neutralized by the condensation,
/// so zwitterionic monomers yield a neutral amide backbone.
pub fn assemble_cyclic(monomers: &[Monomer]) -> Result<MolGraph, AssemblyError> {
    let n = monomers.len();
    if n < 2 {
        return Err(AssemblyError::TooFewMonomers(n));
    }

    let mut graph = MolGraph::new();
    let mut offsets = Vec::with_capacity(n);
    for monomer in monomers {
        let offset = graph.atom_count();
        offsets.push(offset);
        for atom in monomer.graph().atoms() {
            graph.add_atom(atom.clone());
        }
        for bond in monomer.graph().bonds() {
            graph
                .add_bond(bond.a + offset, bond.b + offset, bond.order)
                .expect("monomer bonds are valid");
        }
    }

    let mut removed = vec![false; graph.atom_count()];
    for donor in 0..n {
        let acceptor = (donor + 1) % n;
        let acid_c = offsets[donor] + monomers[donor].c_attach();
        let amine_n = offsets[acceptor] + monomers[acceptor].n_attach();

        let leaving = graph
            .neighbors(acid_c)
            .iter()
            .map(|nb| nb.atom)
            .filter(|&o| !removed[o] && is_leaving_oxygen(&graph, o))
            .min()
            .ok_or(AssemblyError::NoLeavingOxygen { position: donor + 1 })?;
        removed[leaving] = true;

        {
            let atom = graph.atom(amine_n);
            let available = atom
                .explicit_h
                .map(u16::from)
                .unwrap_or_else(|| u16::from(crate::chem::implicit_hydrogens(&graph, amine_n)));
            if available == 0 {
                return Err(AssemblyError::NoAmineHydrogen {
                    position: acceptor + 1,
                });
            }
        }
        let atom = graph.atom_mut(amine_n);
        if let Some(h) = atom.explicit_h {
            atom.explicit_h = Some(h.saturating_sub(1));
        }
        if atom.charge > 0 {
            atom.charge -= 1;
        }

        graph
            .add_bond(acid_c, amine_n, BondOrder::Single)
            .map_err(|_| AssemblyError::InvalidProduct)?;
    }

    graph.remove_atoms(&removed);

    if !graph.is_connected() {
        return Err(AssemblyError::Disconnected);
    }
    if !validate_valence(&graph).valid {
        return Err(AssemblyError::InvalidProduct);
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::{canonical_smiles, parse_smiles, total_hydrogens, Element};

    fn monomer(id: &str, smiles: &str) -> Monomer {
        Monomer::new(id, smiles, true).unwrap()
    }

    #[test]
    fn two_glycines_give_the_six_ring_diketopiperazine() {
        let gly = monomer("G", "NCC(=O)O");
        let assembled = assemble_cyclic(&[gly.clone(), gly]).unwrap();
        let expected = parse_smiles("O=C1CNC(=O)CN1").unwrap();
        assert!(assembled.isomorphic_to(&expected));
        assert_eq!(
            canonical_smiles(&assembled),
            canonical_smiles(&expected)
        );
    }

    #[test]
    fn proline_acceptor_keeps_no_nh() {
        let gly = monomer("G", "NCC(=O)O");
        let pro = monomer("P", "N1[C@@H](CCC1)C(=O)O");
        let assembled = assemble_cyclic(&[gly, pro]).unwrap();
        assert!(validate_valence(&assembled).valid);
        // The proline nitrogen is now tertiary: three bonds, no hydrogen.
        let ring_n = (0..assembled.atom_count())
            .find(|&i| assembled.atom(i).element == Element::N && assembled.degree(i) == 3)
            .expect("tertiary nitrogen present");
        assert_eq!(total_hydrogens(&assembled, ring_n), 0);
    }

    #[test]
    fn heavy_atom_bookkeeping() {
        let gly = monomer("G", "NCC(=O)O");
        let ala = monomer("A", "N[C@@H](C)C(=O)O");
        let leu = monomer("L", "N[C@@H](CC(C)C)C(=O)O");
        let monomers = [gly, ala, leu];
        let total: usize = monomers.iter().map(|m| m.graph().heavy_atom_count()).sum();
        let assembled = assemble_cyclic(&monomers).unwrap();
        assert_eq!(assembled.heavy_atom_count(), total - monomers.len());
    }

    #[test]
    fn zwitterion_assembles_to_neutral_amide() {
        let gly = monomer("G", "NCC(=O)O");
        let zwit = Monomer::new(
            "X",
            "[NH2+][C@@H](Cc1cc(C(C)(C)C)cc(c1Cl)Cl)C(=O)[O-]",
            false,
        )
        .unwrap();
        let assembled = assemble_cyclic(&[gly, zwit]).unwrap();
        assert_eq!(assembled.net_charge(), 0);
        assert!(validate_valence(&assembled).valid);
    }

    #[test]
    fn too_few_monomers_is_an_error() {
        let gly = monomer("G", "NCC(=O)O");
        assert_eq!(
            assemble_cyclic(&[gly]).unwrap_err(),
            AssemblyError::TooFewMonomers(1)
        );
    }

    #[test]
    fn macrocycle_contains_all_backbone_amides() {
        let seq = [
            monomer("G", "NCC(=O)O"),
            monomer("A", "N[C@@H](C)C(=O)O"),
            monomer("V", "N[C@@H](C(C)C)C(=O)O"),
            monomer("S", "N[C@@H](CO)C(=O)O"),
        ];
        let assembled = assemble_cyclic(&seq).unwrap();
        assert_eq!(assembled.ring_count(), 1);
        let ring = assembled.ring_membership();
        // Backbone ring spans 3 atoms per residue.
        assert_eq!(ring.iter().filter(|&&r| r).count(), 3 * seq.len());
    }
}
