//! Core library for cyclic peptide optimization pipelines.
//!
//! The crate provides the non-neural machinery needed to drive an external
//! sequence generator toward better ADMET profiles:
//!
//! - [`chem`] — a small SMILES toolkit: parsing, valence checking, canonical
//!   writing, circular fingerprints, and Tanimoto similarity.
//! - [`peptide`] — monomer vocabularies, HELM parsing, head-to-tail cyclic
//!   assembly, and single-position mutation augmentation.
//! - [`properties`] — a property-predictor interface with a deterministic
//!   surrogate, three-level bucketing, and pair improvement categorization.
//! - [`reward`] — sigmoid property desirability, similarity shaping, and a
//!   frequency-based duplication penalty with an LRU generation history.
//! - [`grpo`] — group-relative advantage normalization, the clipped
//!   importance-ratio surrogate, and a nonnegative KL estimator.
//! - [`prompts`] — reasoning/answer prompt construction and output parsing.
//! - [`evalkit`] — validity/novelty/uniqueness and high-quality success
//!   metrics plus bucket transition matrices.
//!
//! Everything here is `no_std`-compatible (alloc required); IO, file formats,
//! and the service live in the companion `pepforge` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod chem;
pub mod evalkit;
pub mod grpo;
pub mod peptide;
pub mod prompts;
pub mod properties;
pub mod reward;

pub(crate) mod float;
