//! A minimal SMILES toolkit: molecular graphs, parsing, valence validation,
//! canonical writing, circular fingerprints, and Tanimoto similarity.
//!
//! The supported SMILES subset covers organic-subset atoms
//! (B, C, N, O, P, S, F, Cl, Br, I plus bracketed H), bracket atoms with
//! isotope / chirality / hydrogen count / charge, ring closures including
//! `%nn`, branches, and the bond symbols `-`, `=`, `#`, `:`. Directional
//! stereo-bond symbols (`/`, `\`) are read as single bonds with a warning.
//! Aromaticity is taken from lowercase flags as written; no perception or
//! kekulization is attempted. See `docs/smiles-grammar.md` in the repository
//! root for the full grammar.

mod canon;
mod element;
mod fingerprint;
mod graph;
mod parse;
mod valence;
mod write;

pub use canon::canonical_smiles;
pub use element::Element;
pub use fingerprint::{morgan_fingerprint, tanimoto, Fingerprint, FingerprintError};
pub use graph::{Atom, Bond, BondOrder, Chirality, GraphError, MolGraph, Neighbor};
pub use parse::{parse_smiles, parse_smiles_verbose, ParseError, ParseErrorKind, ParseWarning};
pub use valence::{
    implicit_hydrogens, total_hydrogens, validate_valence, AtomValence, ValenceVerdict,
};
pub use write::{write_smiles, write_smiles_with_ranks};
