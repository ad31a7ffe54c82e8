//! Cyclic peptide model: monomer vocabulary, HELM parsing, head-to-tail
//! assembly into a single macrocyclic molecule, and single-position mutation
//! augmentation.
//!
//! The HELM subset accepted here is a single `PEPTIDE` polymer with one
//! backbone connection closing the macrocycle; see `docs/helm-grammar.md` in
//! the repository root.

mod assembly;
mod helm;
mod monomer;
mod mutate;

pub use assembly::{assemble_cyclic, AssemblyError};
pub use helm::{parse_helm, write_helm, HelmError};
pub use monomer::{detect_attachments, AttachmentError, Monomer, MonomerError, MonomerVocabulary, VocabError};
pub use mutate::{augment, augment_with_stats, mutate, AugmentStats, MutateError, PeptidePair};

use alloc::string::String;
use alloc::vec::Vec;

use crate::chem::{canonical_smiles, MolGraph};

/// Backbone topology of an assembled peptide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    HeadToTailCyclic,
}

/// An assembled cyclic peptide: the ordered monomers, the macrocyclic
/// molecular graph, and its canonical SMILES.
#[derive(Debug, Clone)]
pub struct Peptide {
    monomers: Vec<Monomer>,
    topology: Topology,
    assembled: MolGraph,
    canonical: String,
}

impl Peptide {
    /// Assembles the monomer sequence head-to-tail into a macrocycle.
    pub fn from_monomers(monomers: Vec<Monomer>) -> Result<Peptide, AssemblyError> {
        let assembled = assemble_cyclic(&monomers)?;
        let canonical = canonical_smiles(&assembled);
        Ok(Peptide {
            monomers,
            topology: Topology::HeadToTailCyclic,
            assembled,
            canonical,
        })
    }

    pub fn monomers(&self) -> &[Monomer] {
        &self.monomers
    }

    pub fn monomer_ids(&self) -> Vec<&str> {
        self.monomers.iter().map(|m| m.id()).collect()
    }

    pub fn len(&self) -> usize {
        self.monomers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomers.is_empty()
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn assembled(&self) -> &MolGraph {
        &self.assembled
    }

    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    /// Renders the peptide in the HELM subset used by this crate.
    pub fn helm(&self) -> String {
        write_helm(&self.monomer_ids())
    }
}
