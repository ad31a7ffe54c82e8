use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::monomer::MonomerVocabulary;
use super::{AssemblyError, Peptide};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HelmError {
    Malformed(String),
    UnknownMonomer(String),
    TooFewMonomers(usize),
    /// Missing connection section or one that is not the 1<->n backbone bond.
    UnsupportedTopology(String),
    Assembly(AssemblyError),
}

impl fmt::Display for HelmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HelmError::Malformed(reason) => write!(f, "malformed HELM: {reason}"),
            HelmError::UnknownMonomer(symbol) => write!(f, "unknown monomer symbol '{symbol}'"),
            HelmError::TooFewMonomers(n) => {
                write!(f, "cyclic peptide needs at least 2 monomers, got {n}")
            }
            HelmError::UnsupportedTopology(reason) => {
                write!(f, "topology unsupported: {reason}")
            }
            HelmError::Assembly(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for HelmError {}

impl From<AssemblyError> for HelmError {
    fn from(e: AssemblyError) -> Self {
        HelmError::Assembly(e)
    }
}

/// Parses a single-polymer head-to-tail cyclic peptide in the HELM subset,
/// resolving monomer symbols against the vocabulary and assembling eagerly.
pub fn parse_helm(text: &str, vocab: &MonomerVocabulary) -> Result<Peptide, HelmError> {
    let text = text.trim();
    let sections: Vec<&str> = text.split('$').collect();
    if sections.len() < 2 {
        return Err(HelmError::Malformed(
            "expected polymer and connection sections separated by '$'".to_string(),
        ));
    }
    let (polymer_id, symbols) = parse_polymer_section(sections[0])?;
    if symbols.len() < 2 {
        return Err(HelmError::TooFewMonomers(symbols.len()));
    }

    let connection = sections[1].trim();
    if connection.is_empty() {
        return Err(HelmError::UnsupportedTopology(
            "no connection section; only head-to-tail cyclic peptides are supported".to_string(),
        ));
    }
    check_head_to_tail(connection, &polymer_id, symbols.len())?;

    let mut monomers = Vec::with_capacity(symbols.len());
    for symbol in &symbols {
        let monomer = vocab
            .get(symbol)
            .ok_or_else(|| HelmError::UnknownMonomer(symbol.clone()))?;
        monomers.push(monomer.clone());
    }
    Ok(Peptide::from_monomers(monomers)?)
}

fn parse_polymer_section(section: &str) -> Result<(String, Vec<String>), HelmError> {
    let section = section.trim();
    let open = section
        .find('{')
        .ok_or_else(|| HelmError::Malformed("polymer section missing '{'".to_string()))?;
    let close = section
        .rfind('}')
        .filter(|&c| c > open)
        .ok_or_else(|| HelmError::Malformed("polymer section missing '}'".to_string()))?;
    if close != section.len() - 1 {
        return Err(HelmError::Malformed(
            "unexpected text after polymer body".to_string(),
        ));
    }
    let polymer_id = &section[..open];
    if !polymer_id.starts_with("PEPTIDE") {
        return Err(HelmError::Malformed(format!(
            "expected a PEPTIDE polymer, got '{polymer_id}'"
        )));
    }
    if section[..open].contains('|') || section[close..].contains('|') {
        return Err(HelmError::Malformed(
            "multiple polymers are not supported".to_string(),
        ));
    }
    let body = &section[open + 1..close];
    if body.is_empty() {
        return Err(HelmError::Malformed("empty monomer list".to_string()));
    }
    let mut symbols = Vec::new();
    for token in body.split('.') {
        let token = token.trim();
        let symbol = if let Some(stripped) = token.strip_prefix('[') {
            stripped
                .strip_suffix(']')
                .ok_or_else(|| HelmError::Malformed(format!("unclosed monomer bracket '{token}'")))?
        } else {
            token
        };
        if symbol.is_empty() {
            return Err(HelmError::Malformed("empty monomer symbol".to_string()));
        }
        symbols.push(symbol.to_string());
    }
    Ok((polymer_id.to_string(), symbols))
}

/// Accepts `n:R2-1:R1` or `1:R1-n:R2` between the polymer and itself.
fn check_head_to_tail(connection: &str, polymer_id: &str, n: usize) -> Result<(), HelmError> {
    let parts: Vec<&str> = connection.split(',').collect();
    if parts.len() != 3 {
        return Err(HelmError::Malformed(format!(
            "connection '{connection}' should be 'POLYMER,POLYMER,a:Rx-b:Ry'"
        )));
    }
    if parts[0].trim() != polymer_id || parts[1].trim() != polymer_id {
        return Err(HelmError::UnsupportedTopology(
            "connection does not join the peptide to itself".to_string(),
        ));
    }
    let ends: Vec<&str> = parts[2].trim().split('-').collect();
    if ends.len() != 2 {
        return Err(HelmError::Malformed(format!(
            "connection endpoints '{}' should be 'a:Rx-b:Ry'",
            parts[2]
        )));
    }
    let parse_end = |end: &str| -> Result<(usize, String), HelmError> {
        let mut it = end.trim().split(':');
        let idx = it
            .next()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| HelmError::Malformed(format!("bad connection endpoint '{end}'")))?;
        let port = it
            .next()
            .ok_or_else(|| HelmError::Malformed(format!("bad connection endpoint '{end}'")))?;
        Ok((idx, port.trim().to_string()))
    };
    let (a_idx, a_port) = parse_end(ends[0])?;
    let (b_idx, b_port) = parse_end(ends[1])?;
    let head_to_tail = (a_idx == n && a_port == "R2" && b_idx == 1 && b_port == "R1")
        || (a_idx == 1 && a_port == "R1" && b_idx == n && b_port == "R2");
    if !head_to_tail {
        return Err(HelmError::UnsupportedTopology(format!(
            "connection '{}' is not the {n}:R2-1:R1 backbone closure",
            parts[2]
        )));
    }
    Ok(())
}

/// Renders monomer ids in the HELM subset emitted by this crate:
/// `PEPTIDE1{...}$PEPTIDE1,PEPTIDE1,n:R2-1:R1$$$`. Multi-character symbols
/// are bracketed.
pub fn write_helm(monomer_ids: &[&str]) -> String {
    let body: Vec<String> = monomer_ids
        .iter()
        .map(|id| {
            if id.chars().count() == 1 {
                (*id).to_string()
            } else {
                format!("[{id}]")
            }
        })
        .collect();
    format!(
        "PEPTIDE1{{{}}}$PEPTIDE1,PEPTIDE1,{}:R2-1:R1$$$",
        body.join("."),
        monomer_ids.len()
    )
}
