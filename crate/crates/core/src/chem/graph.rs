use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::element::Element;
use super::valence::total_hydrogens;

/// Tetrahedral chirality tag as written in the source SMILES. The tag is
/// carried as an atom attribute; no 3D interpretation is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Chirality {
    #[default]
    None,
    /// `@@`
    Clockwise,
    /// `@`
    Counterclockwise,
}

impl Chirality {
    pub fn code(self) -> u64 {
        match self {
            Chirality::None => 0,
            Chirality::Clockwise => 1,
            Chirality::Counterclockwise => 2,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Chirality::None => "",
            Chirality::Clockwise => "@@",
            Chirality::Counterclockwise => "@",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to an atom's bond-order sum. Aromatic bonds count one
    /// unit; the delocalized contribution is handled by the valence model.
    pub fn valence_units(self) -> u16 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    pub fn code(self) -> u64 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BondOrder::Single => "-",
            BondOrder::Double => "=",
            BondOrder::Triple => "#",
            BondOrder::Aromatic => ":",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: Element,
    /// Formal charge, within `[-4, 4]`.
    pub charge: i8,
    /// Hydrogen count as stated in a bracket atom; `None` for atoms written
    /// outside brackets, whose hydrogen count is implied by valence.
    pub explicit_h: Option<u8>,
    pub chirality: Chirality,
    pub aromatic: bool,
    pub isotope: Option<u16>,
}

impl Atom {
    pub fn new(element: Element) -> Atom {
        Atom {
            element,
            charge: 0,
            explicit_h: None,
            chirality: Chirality::None,
            aromatic: false,
            isotope: None,
        }
    }

    pub fn aromatic(element: Element) -> Atom {
        Atom {
            aromatic: true,
            ..Atom::new(element)
        }
    }
}

/// Undirected bond between two atom indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if atom == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub atom: usize,
    pub bond: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphError {
    InvalidAtomIndex(usize),
    SelfBond(usize),
    DuplicateBond(usize, usize),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::InvalidAtomIndex(i) => write!(f, "bond references missing atom {i}"),
            GraphError::SelfBond(i) => write!(f, "bond from atom {i} to itself"),
            GraphError::DuplicateBond(a, b) => write!(f, "duplicate bond between {a} and {b}"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Molecular graph: atoms in source order plus undirected bonds.
#[derive(Debug, Clone, Default)]
pub struct MolGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<Neighbor>>,
}

impl MolGraph {
    pub fn new() -> MolGraph {
        MolGraph::default()
    }

    pub fn add_atom(&mut self, atom: Atom) -> usize {
        self.atoms.push(atom);
        self.adjacency.push(Vec::new());
        self.atoms.len() - 1
    }

    pub fn add_bond(&mut self, a: usize, b: usize, order: BondOrder) -> Result<usize, GraphError> {
        if a >= self.atoms.len() {
            return Err(GraphError::InvalidAtomIndex(a));
        }
        if b >= self.atoms.len() {
            return Err(GraphError::InvalidAtomIndex(b));
        }
        if a == b {
            return Err(GraphError::SelfBond(a));
        }
        if self.bond_between(a, b).is_some() {
            return Err(GraphError::DuplicateBond(a, b));
        }
        let idx = self.bonds.len();
        self.bonds.push(Bond { a, b, order });
        self.adjacency[a].push(Neighbor { atom: b, bond: idx });
        self.adjacency[b].push(Neighbor { atom: a, bond: idx });
        Ok(idx)
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn atom_mut(&mut self, i: usize) -> &mut Atom {
        &mut self.atoms[i]
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[Neighbor] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|n| n.atom == b)
            .map(|n| n.bond)
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms
            .iter()
            .filter(|a| a.element != Element::H)
            .count()
    }

    pub fn net_charge(&self) -> i32 {
        self.atoms.iter().map(|a| i32::from(a.charge)).sum()
    }

    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut component = Vec::new();
            seen[start] = true;
            while let Some(u) = stack.pop() {
                component.push(u);
                for nb in &self.adjacency[u] {
                    if !seen[nb.atom] {
                        seen[nb.atom] = true;
                        stack.push(nb.atom);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().len()
    }

    pub fn is_connected(&self) -> bool {
        !self.is_empty() && self.component_count() == 1
    }

    /// Cyclomatic ring count: `bonds - atoms + components`.
    pub fn ring_count(&self) -> usize {
        (self.bonds.len() + self.component_count()).saturating_sub(self.atoms.len())
    }

    /// Per-atom flag: true when the atom lies on at least one cycle, i.e.
    /// it is an endpoint of a non-bridge bond.
    pub fn ring_membership(&self) -> Vec<bool> {
        let n = self.atoms.len();
        let mut in_ring = vec![false; n];
        if n == 0 {
            return in_ring;
        }
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0usize;
        // Iterative DFS computing low-link values; an edge (u, v) is a bridge
        // iff low[v] > disc[u].
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // Stack entries: (atom, incoming bond, next neighbor cursor).
            let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(&mut (u, parent_bond, ref mut cursor)) = stack.last_mut() {
                if *cursor < self.adjacency[u].len() {
                    let nb = self.adjacency[u][*cursor];
                    *cursor += 1;
                    if Some(nb.bond) == parent_bond {
                        continue;
                    }
                    if disc[nb.atom] == usize::MAX {
                        disc[nb.atom] = timer;
                        low[nb.atom] = timer;
                        timer += 1;
                        stack.push((nb.atom, Some(nb.bond), 0));
                    } else {
                        // Back edge: part of a cycle.
                        low[u] = low[u].min(disc[nb.atom]);
                        in_ring[u] = true;
                        in_ring[nb.atom] = true;
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[u]);
                        if low[u] <= disc[p] {
                            // Tree edge on a cycle.
                            in_ring[u] = true;
                            in_ring[p] = true;
                        }
                    }
                }
            }
        }
        in_ring
    }

    /// Drops the flagged atoms (with their incident bonds) and compacts
    /// indices, preserving relative order of the surviving atoms.
    pub fn remove_atoms(&mut self, remove: &[bool]) {
        debug_assert_eq!(remove.len(), self.atoms.len());
        let mut remap = vec![usize::MAX; self.atoms.len()];
        let mut kept = 0usize;
        for (i, &dropped) in remove.iter().enumerate() {
            if !dropped {
                remap[i] = kept;
                kept += 1;
            }
        }
        let old_atoms = core::mem::take(&mut self.atoms);
        let old_bonds = core::mem::take(&mut self.bonds);
        self.adjacency.clear();
        for (i, atom) in old_atoms.into_iter().enumerate() {
            if !remove[i] {
                self.atoms.push(atom);
                self.adjacency.push(Vec::new());
            }
        }
        for bond in old_bonds {
            if remove[bond.a] || remove[bond.b] {
                continue;
            }
            let idx = self.bonds.len();
            let (a, b) = (remap[bond.a], remap[bond.b]);
            self.bonds.push(Bond {
                a,
                b,
                order: bond.order,
            });
            self.adjacency[a].push(Neighbor { atom: b, bond: idx });
            self.adjacency[b].push(Neighbor { atom: a, bond: idx });
        }
    }

    /// Attributed graph isomorphism. Atoms match on element, charge,
    /// aromaticity, isotope, chirality tag, and total hydrogen count; bonds
    /// must agree in order.
    pub fn isomorphic_to(&self, other: &MolGraph) -> bool {
        if self.atom_count() != other.atom_count() || self.bond_count() != other.bond_count() {
            return false;
        }
        let n = self.atom_count();
        if n == 0 {
            return true;
        }
        let key = |g: &MolGraph, i: usize| -> (u64, i8, bool, u16, u64, u8, usize) {
            let a = g.atom(i);
            (
                a.element.atomic_number() as u64,
                a.charge,
                a.aromatic,
                a.isotope.unwrap_or(0),
                a.chirality.code(),
                total_hydrogens(g, i),
                g.degree(i),
            )
        };
        let self_keys: Vec<_> = (0..n).map(|i| key(self, i)).collect();
        let other_keys: Vec<_> = (0..n).map(|i| key(other, i)).collect();
        {
            let mut a = self_keys.clone();
            let mut b = other_keys.clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return false;
            }
        }
        // Order atoms by ascending candidate count to fail fast.
        let mut order: Vec<usize> = (0..n).collect();
        let candidate_count = |i: usize| {
            other_keys
                .iter()
                .filter(|k| **k == self_keys[i])
                .count()
        };
        order.sort_by_key(|&i| candidate_count(i));

        let mut mapping = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.match_from(other, &order, 0, &mut mapping, &mut used, &self_keys, &other_keys)
    }

    #[allow(clippy::too_many_arguments)]
    fn match_from(
        &self,
        other: &MolGraph,
        order: &[usize],
        depth: usize,
        mapping: &mut [usize],
        used: &mut [bool],
        self_keys: &[(u64, i8, bool, u16, u64, u8, usize)],
        other_keys: &[(u64, i8, bool, u16, u64, u8, usize)],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let u = order[depth];
        'candidates: for v in 0..other.atom_count() {
            if used[v] || other_keys[v] != self_keys[u] {
                continue;
            }
            // All already-mapped neighbors of u must map onto neighbors of v
            // with matching bond order, and vice versa by degree equality.
            for nb in self.neighbors(u) {
                let w = mapping[nb.atom];
                if w == usize::MAX {
                    continue;
                }
                match other.bond_between(v, w) {
                    Some(bidx) if other.bond(bidx).order == self.bond(nb.bond).order => {}
                    _ => continue 'candidates,
                }
            }
            // Reverse check: mapped neighbors of v must be neighbors of u.
            for nb in other.neighbors(v) {
                if let Some(w) = mapping.iter().position(|&m| m == nb.atom) {
                    if self.bond_between(u, w).is_none() {
                        continue 'candidates;
                    }
                }
            }
            mapping[u] = v;
            used[v] = true;
            if self.match_from(other, order, depth + 1, mapping, used, self_keys, other_keys) {
                return true;
            }
            mapping[u] = usize::MAX;
            used[v] = false;
        }
        false
    }
}
