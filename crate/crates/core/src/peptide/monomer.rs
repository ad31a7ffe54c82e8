use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::chem::{
    canonical_smiles, parse_smiles, total_hydrogens, validate_valence, Element, MolGraph,
    ParseError,
};

/// A single amino-acid building block with resolved attachment atoms.
#[derive(Debug, Clone)]
pub struct Monomer {
    id: String,
    smiles: String,
    canonical: String,
    graph: MolGraph,
    /// Backbone amine nitrogen.
    n_attach: usize,
    /// Carboxyl carbon that forms the amide bond.
    c_attach: usize,
    natural: bool,
}

impl Monomer {
    pub fn new(id: &str, smiles: &str, natural: bool) -> Result<Monomer, MonomerError> {
        let graph = parse_smiles(smiles).map_err(MonomerError::Parse)?;
        let verdict = validate_valence(&graph);
        if !verdict.valid {
            return Err(MonomerError::Valence {
                atom: verdict.failures().next().map_or(0, |a| a.atom),
            });
        }
        let (n_attach, c_attach) = detect_attachments(&graph)?;
        let canonical = canonical_smiles(&graph);
        Ok(Monomer {
            id: id.to_string(),
            smiles: smiles.to_string(),
            canonical,
            graph,
            n_attach,
            c_attach,
            natural,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn smiles(&self) -> &str {
        &self.smiles
    }

    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    pub fn graph(&self) -> &MolGraph {
        &self.graph
    }

    pub fn n_attach(&self) -> usize {
        self.n_attach
    }

    pub fn c_attach(&self) -> usize {
        self.c_attach
    }

    pub fn natural(&self) -> bool {
        self.natural
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonomerError {
    Parse(ParseError),
    Valence { atom: usize },
    Attachment(AttachmentError),
}

impl fmt::Display for MonomerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonomerError::Parse(e) => write!(f, "monomer SMILES: {e}"),
            MonomerError::Valence { atom } => write!(f, "monomer fails valence at atom {atom}"),
            MonomerError::Attachment(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MonomerError {}

impl From<AttachmentError> for MonomerError {
    fn from(e: AttachmentError) -> Self {
        MonomerError::Attachment(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttachmentError {
    /// No carbon bonded to both a carbonyl oxygen and a leaving oxygen.
    NoCarboxyl,
    /// No nitrogen with an available hydrogen.
    NoEligibleNitrogen,
}

impl fmt::Display for AttachmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttachmentError::NoCarboxyl => write!(f, "no carboxyl group found"),
            AttachmentError::NoEligibleNitrogen => {
                write!(f, "no amine nitrogen with an available hydrogen")
            }
        }
    }
}

impl core::error::Error for AttachmentError {}

/// True when `o` can leave during amide formation: a terminal single-bonded
/// oxygen that is either a hydroxyl or a negatively charged oxide.
pub(crate) fn is_leaving_oxygen(mol: &MolGraph, o: usize) -> bool {
    let atom = mol.atom(o);
    if atom.element != Element::O || atom.aromatic || mol.degree(o) != 1 {
        return false;
    }
    let bond = mol.bond(mol.neighbors(o)[0].bond);
    if bond.order != crate::chem::BondOrder::Single {
        return false;
    }
    total_hydrogens(mol, o) >= 1 || atom.charge < 0
}

fn is_carbonyl_oxygen(mol: &MolGraph, o: usize) -> bool {
    let atom = mol.atom(o);
    atom.element == Element::O
        && !atom.aromatic
        && mol.degree(o) == 1
        && mol.bond(mol.neighbors(o)[0].bond).order == crate::chem::BondOrder::Double
}

/// Finds the carboxyl carbon of atom `c`'s acid pattern, if any.
pub(crate) fn is_carboxyl_carbon(mol: &MolGraph, c: usize) -> bool {
    let atom = mol.atom(c);
    if atom.element != Element::C || atom.aromatic {
        return false;
    }
    let mut has_carbonyl = false;
    let mut has_leaving = false;
    for nb in mol.neighbors(c) {
        has_carbonyl |= is_carbonyl_oxygen(mol, nb.atom);
        has_leaving |= is_leaving_oxygen(mol, nb.atom);
    }
    has_carbonyl && has_leaving
}

/// Locates the backbone attachment atoms of a free amino acid:
/// the carbon of the last carboxylic-acid pattern in atom order, and the
/// non-aromatic nitrogen with at least one available hydrogen that lies
/// closest to that carbon's alpha carbon (ties broken by lowest index).
pub fn detect_attachments(mol: &MolGraph) -> Result<(usize, usize), AttachmentError> {
    let c_attach = (0..mol.atom_count())
        .rfind(|&i| is_carboxyl_carbon(mol, i))
        .ok_or(AttachmentError::NoCarboxyl)?;

    // Alpha carbon: a carbon neighbor of the acid carbon, if present.
    let alpha = mol
        .neighbors(c_attach)
        .iter()
        .map(|nb| nb.atom)
        .filter(|&a| mol.atom(a).element == Element::C)
        .min()
        .unwrap_or(c_attach);

    let eligible: Vec<usize> = (0..mol.atom_count())
        .filter(|&i| {
            let a = mol.atom(i);
            a.element == Element::N && !a.aromatic && total_hydrogens(mol, i) >= 1
        })
        .collect();
    if eligible.is_empty() {
        return Err(AttachmentError::NoEligibleNitrogen);
    }

    let dist = bfs_distances(mol, alpha);
    let n_attach = eligible
        .into_iter()
        .min_by_key(|&i| (dist[i], i))
        .expect("non-empty eligible set");
    Ok((n_attach, c_attach))
}

fn bfs_distances(mol: &MolGraph, start: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; mol.atom_count()];
    let mut queue: alloc::collections::VecDeque<usize> = alloc::collections::VecDeque::new();
    dist[start] = 0;
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        for nb in mol.neighbors(u) {
            if dist[nb.atom] == usize::MAX {
                dist[nb.atom] = dist[u] + 1;
                queue.push_back(nb.atom);
            }
        }
    }
    dist
}

/// Monomer vocabulary indexed by id and by canonical SMILES.
#[derive(Debug, Clone, Default)]
pub struct MonomerVocabulary {
    by_id: BTreeMap<String, Monomer>,
    by_canonical: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VocabError {
    DuplicateId(String),
    DuplicateStructure { id: String, existing: String },
    BadRecord { line: usize, reason: String },
    Monomer { line: usize, id: String, error: MonomerError },
}

impl fmt::Display for VocabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VocabError::DuplicateId(id) => write!(f, "duplicate monomer id '{id}'"),
            VocabError::DuplicateStructure { id, existing } => {
                write!(f, "monomer '{id}' duplicates the structure of '{existing}'")
            }
            VocabError::BadRecord { line, reason } => {
                write!(f, "vocabulary line {line}: {reason}")
            }
            VocabError::Monomer { line, id, error } => {
                write!(f, "vocabulary line {line} ('{id}'): {error}")
            }
        }
    }
}

impl core::error::Error for VocabError {}

impl MonomerVocabulary {
    pub fn new() -> MonomerVocabulary {
        MonomerVocabulary::default()
    }

    pub fn insert(&mut self, monomer: Monomer) -> Result<(), VocabError> {
        if self.by_id.contains_key(monomer.id()) {
            return Err(VocabError::DuplicateId(monomer.id().to_string()));
        }
        if let Some(existing) = self.by_canonical.get(monomer.canonical()) {
            return Err(VocabError::DuplicateStructure {
                id: monomer.id().to_string(),
                existing: existing.clone(),
            });
        }
        self.by_canonical
            .insert(monomer.canonical().to_string(), monomer.id().to_string());
        self.by_id.insert(monomer.id().to_string(), monomer);
        Ok(())
    }

    /// Parses the tab-separated vocabulary format:
    /// `id<TAB>smiles<TAB>natural_flag`, one record per line. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn from_tsv(text: &str) -> Result<MonomerVocabulary, VocabError> {
        let mut vocab = MonomerVocabulary::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_number = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 3 {
                return Err(VocabError::BadRecord {
                    line: line_number,
                    reason: "expected id<TAB>smiles<TAB>natural_flag".to_string(),
                });
            }
            let natural = match fields[2].trim() {
                "true" | "1" => true,
                "false" | "0" => false,
                other => {
                    return Err(VocabError::BadRecord {
                        line: line_number,
                        reason: alloc::format!("bad natural flag '{other}'"),
                    })
                }
            };
            let monomer =
                Monomer::new(fields[0].trim(), fields[1].trim(), natural).map_err(|error| {
                    VocabError::Monomer {
                        line: line_number,
                        id: fields[0].trim().to_string(),
                        error,
                    }
                })?;
            vocab.insert(monomer)?;
        }
        Ok(vocab)
    }

    pub fn get(&self, id: &str) -> Option<&Monomer> {
        self.by_id.get(id)
    }

    /// Looks a monomer up by the canonical SMILES of its free form.
    pub fn lookup_structure(&self, canonical: &str) -> Option<&Monomer> {
        self.by_canonical
            .get(canonical)
            .and_then(|id| self.by_id.get(id))
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    /// Monomers in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &Monomer> {
        self.by_id.values()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for m in self.iter() {
            out.push_str(m.id());
            out.push('\t');
            out.push_str(m.smiles());
            out.push('\t');
            out.push_str(if m.natural() { "true" } else { "false" });
            out.push('\n');
        }
        out
    }
}
