//! Prompt construction for monomer-substitution training samples, parsing of
//! tagged model output, and a faithfulness audit of the reasoning text
//! against the structural edit.
//!
//! Reasoning is wrapped in `<think>` / `</think>` and the answer molecule in
//! `<SMILES>` / `</SMILES>`; tag matching is case-sensitive with surrounding
//! whitespace tolerated.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::chem::{canonical_smiles, morgan_fingerprint, parse_smiles, Fingerprint, ParseError};
use crate::peptide::{Peptide, PeptidePair};
use crate::properties::Property;

pub const THINK_OPEN: &str = "<think>";
pub const THINK_CLOSE: &str = "</think>";
pub const SMILES_OPEN: &str = "<SMILES>";
pub const SMILES_CLOSE: &str = "</SMILES>";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PromptKind {
    Cot,
    NonCot,
    CotOneShot,
}

/// Prompt flavor plus the property-goal sentence used in the guides line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptStyle {
    pub kind: PromptKind,
    pub objective_text: String,
}

const PROPERTY_PHRASES: [(Property, &str); 3] = [
    (Property::LogD, "lipophilicity (LogD)"),
    (Property::Mrt, "mean residence time (MRT_Rat)"),
    (Property::Sif, "SIF stability"),
];

/// Goal sentence covering the given properties, e.g.
/// "Increase lipophilicity (LogD), mean residence time (MRT_Rat), and SIF
/// stability." Empty input falls back to all three.
pub fn objective_sentence(properties: &[Property]) -> String {
    let chosen: Vec<&str> = PROPERTY_PHRASES
        .iter()
        .filter(|(p, _)| properties.is_empty() || properties.contains(p))
        .map(|(_, phrase)| *phrase)
        .collect();
    let joined = match chosen.len() {
        1 => chosen[0].to_string(),
        2 => format!("{} and {}", chosen[0], chosen[1]),
        _ => format!("{}, {}, and {}", chosen[0], chosen[1], chosen[2]),
    };
    format!("Increase {joined}.")
}

/// The goal restated as the clause that ends a reasoning sentence.
fn objective_clause(sentence: &str) -> String {
    let trimmed = sentence.trim_end_matches('.');
    let mut chars = trimmed.chars();
    match chars.next() {
        Some(first) => format!("{}{}", first.to_lowercase(), chars.as_str()),
        None => String::new(),
    }
}

impl PromptStyle {
    pub fn cot() -> PromptStyle {
        PromptStyle {
            kind: PromptKind::Cot,
            objective_text: objective_sentence(&[]),
        }
    }

    pub fn non_cot() -> PromptStyle {
        PromptStyle {
            kind: PromptKind::NonCot,
            objective_text: objective_sentence(&[]),
        }
    }

    pub fn cot_one_shot() -> PromptStyle {
        PromptStyle {
            kind: PromptKind::CotOneShot,
            objective_text:
                "Increase lipophilicity (LogD), mean residence time in rat (MRT_Rat), and stability in simulated intestinal fluid (SIF)."
                    .to_string(),
        }
    }

    /// Same kind with the goal sentence restricted to `properties`.
    pub fn with_objective(mut self, properties: &[Property]) -> PromptStyle {
        self.objective_text = objective_sentence(properties);
        self
    }
}

/// One rendered training sample: the prompt, the target pieces, and the
/// substitution metadata they were built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CotSample {
    pub kind: PromptKind,
    pub prompt: String,
    /// Reasoning text of the target; absent for the plain style.
    pub think: Option<String>,
    pub answer_smiles: String,
    pub position: usize,
    pub leaving_smiles: String,
    pub incoming_smiles: String,
}

impl CotSample {
    /// The training completion: reasoning block (when present) followed by
    /// the tagged answer molecule.
    pub fn target(&self) -> String {
        match &self.think {
            Some(think) => format!(
                "{THINK_OPEN}{think}{THINK_CLOSE}\n{SMILES_OPEN}{}{SMILES_CLOSE}",
                self.answer_smiles
            ),
            None => format!("{SMILES_OPEN}{}{SMILES_CLOSE}", self.answer_smiles),
        }
    }
}

const BACKGROUND_REASONING: &str = "Background: We are modifying peptides to meet specific ADMET property improvements by reasoning step-by-step.\nThe required answer format is wrapped only within <SMILES> and </SMILES> HTML tags.";
const BACKGROUND_PLAIN: &str = "Background: We are modifying peptides to meet specific ADMET property improvements.\nThe required answer format is wrapped only within <SMILES> and </SMILES> HTML tags.";
const THINKING_GUIDES: &str = "Thinking Process Guides: Please enclose your step-by-step reasoning process within <think> and </think> HTML tags.\nThis process should clearly explain how you modify the monomer in the original SMILES before providing the final SMILES.";
const THINKING_GUIDES_ONE_SHOT: &str = "Thinking Process Guides: Please enclose your step-by-step reasoning process within <think> and </think> HTML tags.\nThis process should clearly explain how you would modify the monomer in the original SMILES before providing the final SMILES.";

const ONE_SHOT_INPUT: &str = "CC(C)C[C@@H]1NC(=O)[C@@H](CC(C)C)NC(=O)[C@@H](CC(C)C)NC(=O)[C@H](Cc2ccc(O)cc2)NC(=O)[C@@H]2CCCN2C(=O)[C@@H](CC(C)C)NC1=O";
const ONE_SHOT_THINK: &str = "At position 5, the monomer changed from N1[C@@H](CCC1)C(=O)O to [NH2+][C@@H](c1c(Sc2ccc(cc2)F)ccc(c1)C#N)C(=O)[O-] to increase lipophilicity (LogD), mean residence time (MRT_Rat), and SIF stability.";
const ONE_SHOT_OUTPUT: &str = "CC(C)C[C@@H]1NC(=O)[C@@H](CC(C)C)NC(=O)[C@@H](CC(C)C)NC(=O)[C@H](Cc2ccc(O)cc2)NC(=O)[C@H](c2cc(C#N)ccc2Sc2ccc(F)cc2)NC(=O)[C@@H](CC(C)C)NC1=O";

/// Builds the prompt and target for a mutation pair. Byte-deterministic:
/// identical pair and style yield identical text.
pub fn build_prompt(pair: &PeptidePair, style: &PromptStyle) -> CotSample {
    build_prompt_parts(
        pair.original.canonical(),
        pair.mutated.canonical(),
        pair.position,
        pair.leaving.smiles(),
        pair.incoming.smiles(),
        style,
    )
}

/// [`build_prompt`] on raw fields, for callers that store pairs in flat
/// records.
pub fn build_prompt_parts(
    input_smiles: &str,
    output_smiles: &str,
    position: usize,
    leaving_smiles: &str,
    incoming_smiles: &str,
    style: &PromptStyle,
) -> CotSample {
    let objective = &style.objective_text;
    let prompt = match style.kind {
        PromptKind::Cot => format!(
            "{BACKGROUND_REASONING}\n\nPeptide Modify Guides: {objective}\n\n{THINKING_GUIDES}\n\nInput SMILES:\n{SMILES_OPEN}{input_smiles}{SMILES_CLOSE}"
        ),
        PromptKind::NonCot => format!(
            "{BACKGROUND_PLAIN}\n\nPeptide Modify Guides: {objective}\n\nInput SMILES:\n{SMILES_OPEN}{input_smiles}{SMILES_CLOSE}"
        ),
        PromptKind::CotOneShot => format!(
            "{BACKGROUND_REASONING}\n\nPeptide Modify Guides: {objective}\n\n{THINKING_GUIDES_ONE_SHOT}\n\nInput SMILES (example):\n{SMILES_OPEN}{ONE_SHOT_INPUT}{SMILES_CLOSE}\n\nOutput (example):\n{THINK_OPEN}{ONE_SHOT_THINK}{THINK_CLOSE}\n{SMILES_OPEN}{ONE_SHOT_OUTPUT}{SMILES_CLOSE}\n\nInput SMILES (template):\n{SMILES_OPEN}{input_smiles}{SMILES_CLOSE}"
        ),
    };
    let think = match style.kind {
        PromptKind::NonCot => None,
        _ => Some(format!(
            "At position {position}, the monomer changed from {leaving_smiles} to {incoming_smiles} to {}.",
            objective_clause(objective)
        )),
    };
    CotSample {
        kind: style.kind,
        prompt,
        think,
        answer_smiles: output_smiles.to_string(),
        position,
        leaving_smiles: leaving_smiles.to_string(),
        incoming_smiles: incoming_smiles.to_string(),
    }
}

/// Model output broken into its tagged spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedOutput {
    pub think: Option<String>,
    pub smiles: Option<String>,
    pub well_formed: bool,
    pub diagnostics: Vec<String>,
}

/// Extracts the first reasoning span (optional) and the answer molecule.
/// Well-formed output carries exactly one `<SMILES>` span; anything else is
/// reported through `diagnostics`.
pub fn parse_output(text: &str) -> ParsedOutput {
    let mut diagnostics = Vec::new();
    let think = match find_span(text, THINK_OPEN, THINK_CLOSE, 0) {
        Some((start, end)) => Some(text[start..end].trim().to_string()),
        None => {
            if text.contains(THINK_OPEN) {
                diagnostics.push("unterminated <think> span".to_string());
            }
            None
        }
    };
    let mut spans = Vec::new();
    let mut cursor = 0;
    while let Some((start, end)) = find_span(text, SMILES_OPEN, SMILES_CLOSE, cursor) {
        spans.push(text[start..end].trim().to_string());
        cursor = end + SMILES_CLOSE.len();
    }
    let well_formed = spans.len() == 1;
    let smiles = if well_formed {
        Some(spans[0].clone())
    } else {
        if spans.is_empty() {
            diagnostics.push("no <SMILES> span found".to_string());
        } else {
            diagnostics.push(format!("expected one <SMILES> span, found {}", spans.len()));
        }
        None
    };
    ParsedOutput {
        think,
        smiles,
        well_formed,
        diagnostics,
    }
}

fn find_span(text: &str, open: &str, close: &str, from: usize) -> Option<(usize, usize)> {
    let start = text[from..].find(open)? + from + open.len();
    let end = text[start..].find(close)? + start;
    Some((start, end))
}

/// The substitution stated by a reasoning span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReasoningClaim {
    pub position: Option<usize>,
    pub leaving_smiles: String,
    pub incoming_smiles: String,
}

/// Pulls a "position X, ... from A to B" claim out of free reasoning text.
pub fn extract_claim(think: &str) -> Option<ReasoningClaim> {
    let position = think.find("position").and_then(|at| {
        let rest = &think[at + "position".len()..];
        let digits: String = rest
            .trim_start()
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .collect();
        digits.parse::<usize>().ok()
    });
    let from_at = think.find(" from ")?;
    let after_from = &think[from_at + " from ".len()..];
    let to_at = after_from.find(" to ")?;
    let leaving = after_from[..to_at].trim();
    let after_to = &after_from[to_at + " to ".len()..];
    let incoming_end = after_to.find(" to ").unwrap_or(after_to.len());
    let incoming = after_to[..incoming_end]
        .trim()
        .trim_end_matches(['.', ','])
        .trim();
    if leaving.is_empty() || incoming.is_empty() {
        return None;
    }
    Some(ReasoningClaim {
        position,
        leaving_smiles: trim_claim_token(leaving),
        incoming_smiles: trim_claim_token(incoming),
    })
}

fn trim_claim_token(token: &str) -> String {
    token.split_whitespace().next().unwrap_or("").to_string()
}

/// Outcome of checking a reasoning claim against the structural edit.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FaithfulnessReport {
    pub claim_found: bool,
    /// The stated leaving monomer occurs in the seed peptide.
    pub leaving_matches_seed: Option<bool>,
    /// Environment bits unique to the stated incoming monomer show up among
    /// the bits gained by the output (fingerprint heuristic; may
    /// under-report for very small monomers).
    pub incoming_evidenced: Option<bool>,
    pub output_changed: bool,
    /// Structural changes beyond what the claim explains.
    pub unexplained_changes: bool,
    pub faithful: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditError {
    NotWellFormed,
    BadOutputSmiles(ParseError),
    BadClaimSmiles { which: &'static str, error: ParseError },
}

impl fmt::Display for AuditError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditError::NotWellFormed => write!(f, "output is not well-formed"),
            AuditError::BadOutputSmiles(e) => write!(f, "output SMILES: {e}"),
            AuditError::BadClaimSmiles { which, error } => {
                write!(f, "claimed {which} monomer SMILES: {error}")
            }
        }
    }
}

impl core::error::Error for AuditError {}

const AUDIT_FP_RADIUS: u32 = 2;
const AUDIT_FP_BITS: u32 = 2048;
/// Minimum fraction of the incoming monomer's distinctive bits that must be
/// gained for the claim to count as evidenced.
const INCOMING_EVIDENCE_FRACTION: f64 = 0.3;
/// Gained/lost bits beyond this count, not explained by the stated swap,
/// flag the output as carrying additional changes.
const UNEXPLAINED_BIT_TOLERANCE: usize = 24;

/// Checks the reasoning text of a parsed output against the seed peptide:
/// does the stated leaving monomer occur in the seed, does the stated
/// incoming monomer show up in the output's gained structure, and did the
/// output change more than the claim explains.
pub fn audit_reasoning(parsed: &ParsedOutput, seed: &Peptide) -> Result<FaithfulnessReport, AuditError> {
    if !parsed.well_formed {
        return Err(AuditError::NotWellFormed);
    }
    let output_smiles = parsed.smiles.as_deref().expect("well-formed output");
    let output = parse_smiles(output_smiles).map_err(AuditError::BadOutputSmiles)?;
    let output_canonical = canonical_smiles(&output);
    let output_changed = output_canonical != seed.canonical();

    let claim = parsed.think.as_deref().and_then(extract_claim);
    let Some(claim) = claim else {
        return Ok(FaithfulnessReport {
            claim_found: false,
            leaving_matches_seed: None,
            incoming_evidenced: None,
            output_changed,
            unexplained_changes: false,
            faithful: false,
        });
    };

    let leaving = parse_smiles(&claim.leaving_smiles).map_err(|error| AuditError::BadClaimSmiles {
        which: "leaving",
        error,
    })?;
    let incoming = parse_smiles(&claim.incoming_smiles).map_err(|error| AuditError::BadClaimSmiles {
        which: "incoming",
        error,
    })?;

    let leaving_canonical = canonical_smiles(&leaving);
    let leaving_matches_seed = seed
        .monomers()
        .iter()
        .any(|m| m.canonical() == leaving_canonical);

    let fp = |g: &crate::chem::MolGraph| morgan_fingerprint(g, AUDIT_FP_RADIUS, AUDIT_FP_BITS);
    let seed_fp = fp(seed.assembled());
    let output_fp = fp(&output);
    let incoming_fp = fp(&incoming);
    let leaving_fp = fp(&leaving);

    let gained: Vec<u32> = diff_bits(&output_fp, &seed_fp);
    let lost: Vec<u32> = diff_bits(&seed_fp, &output_fp);
    let incoming_distinct: Vec<u32> = diff_bits(&incoming_fp, &seed_fp);

    let incoming_evidenced = if incoming_distinct.is_empty() {
        // Nothing distinguishes the incoming monomer from the seed at this
        // radius; the heuristic cannot rule either way.
        output_changed
    } else {
        let hits = incoming_distinct
            .iter()
            .filter(|b| gained.binary_search(b).is_ok())
            .count();
        (hits as f64 / incoming_distinct.len() as f64) >= INCOMING_EVIDENCE_FRACTION
    };

    let unexplained = {
        let extra_gained = gained
            .iter()
            .filter(|b| !incoming_fp.contains(**b))
            .count();
        let extra_lost = lost.iter().filter(|b| !leaving_fp.contains(**b)).count();
        extra_gained + extra_lost > UNEXPLAINED_BIT_TOLERANCE
    };

    let faithful = leaving_matches_seed && incoming_evidenced && output_changed && !unexplained;
    Ok(FaithfulnessReport {
        claim_found: true,
        leaving_matches_seed: Some(leaving_matches_seed),
        incoming_evidenced: Some(incoming_evidenced),
        output_changed,
        unexplained_changes: unexplained,
        faithful,
    })
}

fn diff_bits(a: &Fingerprint, b: &Fingerprint) -> Vec<u32> {
    a.bits().difference(b.bits()).copied().collect()
}
