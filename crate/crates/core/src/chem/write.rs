use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::graph::{BondOrder, MolGraph};
use super::element::Element;
use super::valence::implicit_hydrogens;

/// Renders the graph in source atom order.
pub fn write_smiles(mol: &MolGraph) -> String {
    let ranks: Vec<usize> = (0..mol.atom_count()).collect();
    write_smiles_with_ranks(mol, &ranks)
}

/// Renders the graph visiting atoms by ascending rank. `ranks` must assign a
/// distinct value to every atom; any permutation yields a valid rendering of
/// the same molecule.
pub fn write_smiles_with_ranks(mol: &MolGraph, ranks: &[usize]) -> String {
    assert_eq!(ranks.len(), mol.atom_count());
    if mol.is_empty() {
        return String::new();
    }
    let mut writer = Writer {
        mol,
        ranks,
        visit_order: vec![usize::MAX; mol.atom_count()],
        closure_bond: vec![false; mol.bond_count()],
        opens: vec![Vec::new(); mol.atom_count()],
        pending_close: vec![Vec::new(); mol.atom_count()],
        digits_in_use: Vec::new(),
        out: String::new(),
    };

    let mut components = mol.connected_components();
    components.sort_by_key(|comp| comp.iter().map(|&i| ranks[i]).min());
    let roots: Vec<usize> = components
        .iter()
        .map(|comp| *comp.iter().min_by_key(|&&i| ranks[i]).expect("non-empty"))
        .collect();

    let mut counter = 0usize;
    for &root in &roots {
        writer.survey(root, None, &mut counter);
    }
    for (i, &root) in roots.iter().enumerate() {
        if i > 0 {
            writer.out.push('.');
        }
        writer.emit(root, None);
    }
    writer.out
}

struct Writer<'a> {
    mol: &'a MolGraph,
    ranks: &'a [usize],
    visit_order: Vec<usize>,
    closure_bond: Vec<bool>,
    /// Ring closures opened at this atom, as (closing atom, bond index).
    opens: Vec<Vec<(usize, usize)>>,
    /// Digits waiting to be closed at this atom.
    pending_close: Vec<Vec<u16>>,
    digits_in_use: Vec<u16>,
    out: String,
}

impl Writer<'_> {
    fn sorted_neighbors(&self, u: usize) -> Vec<(usize, usize)> {
        let mut nbs: Vec<(usize, usize)> = self
            .mol
            .neighbors(u)
            .iter()
            .map(|nb| (nb.atom, nb.bond))
            .collect();
        nbs.sort_by_key(|&(atom, _)| self.ranks[atom]);
        nbs
    }

    /// First pass: fixes the spanning tree and records ring-closure bonds.
    fn survey(&mut self, start: usize, start_bond: Option<usize>, counter: &mut usize) {
        // Stack entries: (atom, incoming bond, sorted neighbors, cursor).
        type Frame = (usize, Option<usize>, Vec<(usize, usize)>, usize);
        let mut stack: Vec<Frame> = Vec::new();
        self.visit_order[start] = *counter;
        *counter += 1;
        stack.push((start, start_bond, self.sorted_neighbors(start), 0));
        while let Some((u, parent_bond, neighbors, cursor)) = stack.last().cloned() {
            if cursor >= neighbors.len() {
                stack.pop();
                continue;
            }
            stack.last_mut().expect("non-empty stack").3 += 1;
            let (v, bond) = neighbors[cursor];
            if Some(bond) == parent_bond || self.closure_bond[bond] {
                continue;
            }
            if self.visit_order[v] == usize::MAX {
                self.visit_order[v] = *counter;
                *counter += 1;
                stack.push((v, Some(bond), self.sorted_neighbors(v), 0));
            } else {
                self.closure_bond[bond] = true;
                let (first, second) = if self.visit_order[v] < self.visit_order[u] {
                    (v, u)
                } else {
                    (u, v)
                };
                self.opens[first].push((second, bond));
            }
        }
    }

    fn alloc_digit(&mut self) -> u16 {
        let mut digit = 1u16;
        while self.digits_in_use.contains(&digit) {
            digit += 1;
        }
        assert!(digit < 100, "ring closure digits exhausted");
        self.digits_in_use.push(digit);
        digit
    }

    fn release_digit(&mut self, digit: u16) {
        self.digits_in_use.retain(|&d| d != digit);
    }

    fn push_digit(&mut self, digit: u16) {
        if digit > 9 {
            self.out.push('%');
        }
        self.out.push_str(&format!("{digit}"));
    }

    /// Second pass: emits atoms, ring digits, and branches.
    fn emit(&mut self, start: usize, start_parent: Option<usize>) {
        // Work items: either an atom to visit or a literal to append.
        enum Item {
            Atom { atom: usize, via_bond: Option<usize> },
            Text(char),
        }
        let mut stack = vec![Item::Atom {
            atom: start,
            via_bond: start_parent,
        }];
        while let Some(item) = stack.pop() {
            let (u, via_bond) = match item {
                Item::Text(c) => {
                    self.out.push(c);
                    continue;
                }
                Item::Atom { atom, via_bond } => (atom, via_bond),
            };
            if let Some(bond) = via_bond {
                let b = self.mol.bond(bond);
                if b.order != self.default_order(b.a, b.b) {
                    self.out.push_str(b.order.symbol());
                }
            }
            self.out.push_str(&atom_token(self.mol, u));

            let mut closings = core::mem::take(&mut self.pending_close[u]);
            closings.sort_unstable();
            for digit in closings {
                self.push_digit(digit);
                self.release_digit(digit);
            }
            for (closer, bond) in self.opens[u].clone() {
                let digit = self.alloc_digit();
                let b = self.mol.bond(bond);
                if b.order != self.default_order(b.a, b.b) {
                    self.out.push_str(b.order.symbol());
                }
                self.push_digit(digit);
                self.pending_close[closer].push(digit);
            }

            let children: Vec<(usize, usize)> = self
                .sorted_neighbors(u)
                .into_iter()
                .filter(|&(v, bond)| {
                    Some(bond) != via_bond
                        && !self.closure_bond[bond]
                        && self.visit_order[v] > self.visit_order[u]
                })
                .collect();
            // Push in reverse so children pop in rank order; all but the
            // last child are parenthesized.
            for (i, &(v, bond)) in children.iter().enumerate().rev() {
                let last = i + 1 == children.len();
                if !last {
                    stack.push(Item::Text(')'));
                }
                stack.push(Item::Atom {
                    atom: v,
                    via_bond: Some(bond),
                });
                if !last {
                    stack.push(Item::Text('('));
                }
            }
        }
    }

    fn default_order(&self, a: usize, b: usize) -> BondOrder {
        if self.mol.atom(a).aromatic && self.mol.atom(b).aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }
}

fn atom_token(mol: &MolGraph, i: usize) -> String {
    let atom = mol.atom(i);
    let needs_bracket = atom.element == Element::H
        || atom.isotope.is_some()
        || atom.charge != 0
        || atom.chirality != super::graph::Chirality::None
        || atom.explicit_h.is_some();
    let symbol = if atom.aromatic {
        atom.element.symbol().to_ascii_lowercase()
    } else {
        String::from(atom.element.symbol())
    };
    if !needs_bracket {
        return symbol;
    }
    let mut token = String::from("[");
    if let Some(isotope) = atom.isotope {
        token.push_str(&format!("{isotope}"));
    }
    token.push_str(&symbol);
    token.push_str(atom.chirality.tag());
    let h = atom.explicit_h.unwrap_or_else(|| implicit_hydrogens(mol, i));
    match h {
        0 => {}
        1 => token.push('H'),
        n => token.push_str(&format!("H{n}")),
    }
    match atom.charge {
        0 => {}
        1 => token.push('+'),
        -1 => token.push('-'),
        c if c > 0 => token.push_str(&format!("+{c}")),
        c => token.push_str(&format!("{c}")),
    }
    token.push(']');
    token
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse::parse_smiles;

    fn round_trips(smiles: &str) {
        let mol = parse_smiles(smiles).unwrap();
        let written = write_smiles(&mol);
        let reparsed = parse_smiles(&written).unwrap();
        assert!(
            mol.isomorphic_to(&reparsed),
            "{smiles} -> {written} broke the graph"
        );
    }

    #[test]
    fn identity_order_round_trips() {
        for s in [
            "C",
            "NCC(=O)O",
            "O=C1CNC(=O)CN1",
            "c1ccccc1",
            "c1ccc2ccccc2c1",
            "CC(C)(C)c1cc(Cl)cc(Cl)c1",
            "[NH2+][C@@H](Cc1cc(C(C)(C)C)cc(c1Cl)Cl)C(=O)[O-]",
            "N1[C@@H](CCC1)C(=O)O",
            "[13CH4]",
            "O.C",
            "C#N",
            "C%12CC%12",
        ] {
            round_trips(s);
        }
    }

    #[test]
    fn permuted_ranks_round_trip() {
        let mol = parse_smiles("N[C@H](CC(C)C)C(=O)O").unwrap();
        let n = mol.atom_count();
        // A fixed scrambling of ranks.
        let ranks: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
        let written = write_smiles_with_ranks(&mol, &ranks);
        let reparsed = parse_smiles(&written).unwrap();
        assert!(mol.isomorphic_to(&reparsed));
    }

    #[test]
    fn single_bond_between_aromatic_atoms_is_explicit() {
        let mol = parse_smiles("c1ccccc1-c1ccccc1").unwrap();
        let written = write_smiles(&mol);
        assert!(written.contains('-'), "{written}");
        let reparsed = parse_smiles(&written).unwrap();
        assert!(mol.isomorphic_to(&reparsed));
    }

    #[test]
    fn components_are_dot_separated() {
        let mol = parse_smiles("O.CC").unwrap();
        assert_eq!(write_smiles(&mol), "O.CC");
    }
}
