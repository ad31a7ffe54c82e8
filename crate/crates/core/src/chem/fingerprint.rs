//! Circular (extended-connectivity) fingerprints and Tanimoto similarity.
//!
//! Every atom contributes one identifier per radius level: the radius-0
//! identifier hashes the atom's local attributes, and each further round
//! hashes the previous identifier together with the sorted
//! (bond order, neighbor identifier) pairs. Identifiers are folded into a
//! fixed-width bit set with set semantics. Hashing uses a fixed 64-bit mixer
//! with a hard-coded seed so bit sets are identical across runs and
//! platforms.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use super::graph::MolGraph;
use super::valence::total_hydrogens;

const HASH_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Finalizer from the splitmix64 generator.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn combine(state: u64, value: u64) -> u64 {
    mix64(state ^ value)
}

/// Hashed circular-environment bit set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    bits: BTreeSet<u32>,
    n_bits: u32,
    radius: u32,
}

impl Fingerprint {
    pub fn bits(&self) -> &BTreeSet<u32> {
        &self.bits
    }

    pub fn n_bits(&self) -> u32 {
        self.n_bits
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn count(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, bit: u32) -> bool {
        self.bits.contains(&bit)
    }

    /// Builds a fingerprint from raw bit indices (mainly for tests).
    pub fn from_bits(bits: impl IntoIterator<Item = u32>, n_bits: u32) -> Fingerprint {
        let bits: BTreeSet<u32> = bits.into_iter().collect();
        assert!(bits.iter().all(|&b| b < n_bits), "bit index out of range");
        Fingerprint {
            bits,
            n_bits,
            radius: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FingerprintError {
    MismatchedWidth { left: u32, right: u32 },
}

impl fmt::Display for FingerprintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FingerprintError::MismatchedWidth { left, right } => {
                write!(f, "fingerprint widths differ: {left} vs {right}")
            }
        }
    }
}

impl core::error::Error for FingerprintError {}

/// Computes the circular fingerprint of a molecular graph.
pub fn morgan_fingerprint(mol: &MolGraph, radius: u32, n_bits: u32) -> Fingerprint {
    assert!(n_bits >= 64, "n_bits must be at least 64");
    let n = mol.atom_count();
    let ring = mol.ring_membership();
    let mut ids: Vec<u64> = (0..n)
        .map(|i| {
            let a = mol.atom(i);
            let mut h = combine(HASH_SEED, u64::from(a.element.atomic_number()));
            h = combine(h, a.charge as u64);
            h = combine(h, mol.degree(i) as u64);
            h = combine(h, u64::from(total_hydrogens(mol, i)));
            h = combine(h, u64::from(a.aromatic));
            h = combine(h, u64::from(ring[i]));
            h = combine(h, a.chirality.code());
            h
        })
        .collect();

    let mut bits = BTreeSet::new();
    for &id in &ids {
        bits.insert((id % u64::from(n_bits)) as u32);
    }
    for round in 1..=radius {
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let mut env: Vec<(u64, u64)> = mol
                .neighbors(i)
                .iter()
                .map(|nb| (mol.bond(nb.bond).order.code(), ids[nb.atom]))
                .collect();
            env.sort_unstable();
            let mut h = combine(HASH_SEED, u64::from(round));
            h = combine(h, ids[i]);
            for (order, nid) in env {
                h = combine(h, order);
                h = combine(h, nid);
            }
            next.push(h);
        }
        ids = next;
        for &id in &ids {
            bits.insert((id % u64::from(n_bits)) as u32);
        }
    }
    Fingerprint {
        bits,
        n_bits,
        radius,
    }
}

/// Tanimoto similarity `|a ∩ b| / |a ∪ b|`; two empty sets count as
/// identical (1.0).
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    if a.n_bits != b.n_bits {
        return Err(FingerprintError::MismatchedWidth {
            left: a.n_bits,
            right: b.n_bits,
        });
    }
    let intersection = a.bits.intersection(&b.bits).count();
    let union = a.bits.union(&b.bits).count();
    if union == 0 {
        return Ok(1.0);
    }
    Ok(intersection as f64 / union as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse::parse_smiles;

    #[test]
    fn single_atom_radius_zero_sets_one_bit() {
        let mol = parse_smiles("C").unwrap();
        let fp = morgan_fingerprint(&mol, 0, 2048);
        assert_eq!(fp.count(), 1);
    }

    #[test]
    fn ethane_has_two_environments_at_radius_one() {
        // Both atoms share one environment per radius level.
        let mol = parse_smiles("CC").unwrap();
        let fp = morgan_fingerprint(&mol, 1, 2048);
        assert_eq!(fp.count(), 2);
    }

    #[test]
    fn atom_order_does_not_change_bits() {
        let a = morgan_fingerprint(&parse_smiles("OCC").unwrap(), 2, 2048);
        let b = morgan_fingerprint(&parse_smiles("CCO").unwrap(), 2, 2048);
        assert_eq!(a, b);
    }

    #[test]
    fn element_change_changes_bits() {
        let a = morgan_fingerprint(&parse_smiles("CCO").unwrap(), 2, 2048);
        let b = morgan_fingerprint(&parse_smiles("CCN").unwrap(), 2, 2048);
        assert_ne!(a, b);
    }

    #[test]
    fn stereo_tag_changes_bits() {
        let l = morgan_fingerprint(&parse_smiles("N1[C@@H](CCC1)C(=O)O").unwrap(), 2, 2048);
        let d = morgan_fingerprint(&parse_smiles("N1[C@H](CCC1)C(=O)O").unwrap(), 2, 2048);
        assert_ne!(l, d);
    }

    #[test]
    fn tanimoto_identities() {
        let x = Fingerprint::from_bits([1, 2, 3], 64);
        let y = Fingerprint::from_bits([2, 3, 4], 64);
        let z = Fingerprint::from_bits([10, 11], 64);
        assert_eq!(tanimoto(&x, &x).unwrap(), 1.0);
        assert_eq!(tanimoto(&x, &y).unwrap(), 0.5);
        assert_eq!(tanimoto(&x, &z).unwrap(), 0.0);
        let empty = Fingerprint::from_bits([], 64);
        assert_eq!(tanimoto(&empty, &empty).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_widths_error() {
        let x = Fingerprint::from_bits([1], 64);
        let y = Fingerprint::from_bits([1], 128);
        assert!(tanimoto(&x, &y).is_err());
    }
}
