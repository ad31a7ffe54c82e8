use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::element::Element;
use super::graph::{Atom, BondOrder, Chirality, MolGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnexpectedChar(char),
    UnsupportedElement(String),
    UnclosedBracket,
    MalformedBracket,
    ChargeOutOfRange(i32),
    InvalidIsotope,
    UnclosedBranch,
    UnmatchedBranchClose,
    RingBondBeforeAtom,
    RingDigitReopened(u16),
    RingSelfBond(u16),
    UnmatchedRingDigit(u16),
    ConflictingRingBond(u16),
    DuplicateBond,
    DanglingBond,
    BondBeforeAtom,
}

/// Parse failure with the byte offset of the offending input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl ParseError {
    fn new(kind: ParseErrorKind, offset: usize) -> ParseError {
        ParseError { kind, offset }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let offset = self.offset;
        match &self.kind {
            ParseErrorKind::EmptyInput => write!(f, "empty SMILES input"),
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character '{c}' at byte {offset}")
            }
            ParseErrorKind::UnsupportedElement(s) => {
                write!(f, "unsupported element '{s}' at byte {offset}")
            }
            ParseErrorKind::UnclosedBracket => write!(f, "unclosed '[' at byte {offset}"),
            ParseErrorKind::MalformedBracket => write!(f, "malformed bracket atom at byte {offset}"),
            ParseErrorKind::ChargeOutOfRange(c) => {
                write!(f, "formal charge {c} out of range [-4, 4] at byte {offset}")
            }
            ParseErrorKind::InvalidIsotope => write!(f, "invalid isotope at byte {offset}"),
            ParseErrorKind::UnclosedBranch => write!(f, "unclosed '(' at byte {offset}"),
            ParseErrorKind::UnmatchedBranchClose => write!(f, "unmatched ')' at byte {offset}"),
            ParseErrorKind::RingBondBeforeAtom => {
                write!(f, "ring closure digit before any atom at byte {offset}")
            }
            ParseErrorKind::RingDigitReopened(d) => {
                write!(f, "ring closure digit {d} reopened at byte {offset}")
            }
            ParseErrorKind::RingSelfBond(d) => {
                write!(f, "ring closure digit {d} closes onto its own atom at byte {offset}")
            }
            ParseErrorKind::UnmatchedRingDigit(d) => {
                write!(f, "ring closure digit {d} never closed (opened at byte {offset})")
            }
            ParseErrorKind::ConflictingRingBond(d) => {
                write!(f, "conflicting bond symbols on ring closure {d} at byte {offset}")
            }
            ParseErrorKind::DuplicateBond => {
                write!(f, "more than one bond between the same atom pair at byte {offset}")
            }
            ParseErrorKind::DanglingBond => write!(f, "dangling bond symbol at byte {offset}"),
            ParseErrorKind::BondBeforeAtom => write!(f, "bond symbol before any atom at byte {offset}"),
        }
    }
}

impl core::error::Error for ParseError {}

/// Non-fatal notes produced while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// `/` or `\` read as a plain single bond.
    StrippedStereoBond { offset: usize },
}

/// Parses a SMILES string in the supported subset into a [`MolGraph`].
pub fn parse_smiles(text: &str) -> Result<MolGraph, ParseError> {
    parse_smiles_verbose(text).map(|(graph, _)| graph)
}

/// Like [`parse_smiles`] but also returns non-fatal warnings (currently only
/// stripped directional-bond symbols).
pub fn parse_smiles_verbose(text: &str) -> Result<(MolGraph, Vec<ParseWarning>), ParseError> {
    Parser::new(text.trim()).run()
}

struct RingOpen {
    atom: usize,
    bond: Option<BondOrder>,
    offset: usize,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    graph: MolGraph,
    prev: Option<usize>,
    pending_bond: Option<(BondOrder, usize)>,
    branch_stack: Vec<(usize, usize)>,
    rings: BTreeMap<u16, RingOpen>,
    warnings: Vec<ParseWarning>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            graph: MolGraph::new(),
            prev: None,
            pending_bond: None,
            branch_stack: Vec::new(),
            rings: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn run(mut self) -> Result<(MolGraph, Vec<ParseWarning>), ParseError> {
        if self.bytes.is_empty() {
            return Err(ParseError::new(ParseErrorKind::EmptyInput, 0));
        }
        while let Some(c) = self.peek() {
            let at = self.pos;
            match c {
                b'[' => {
                    let atom = self.parse_bracket_atom()?;
                    self.push_atom(atom, at)?;
                }
                b'A'..=b'Z' => {
                    let atom = self.parse_organic_atom()?;
                    self.push_atom(atom, at)?;
                }
                b'b' | b'c' | b'n' | b'o' | b'p' | b's' => {
                    self.pos += 1;
                    let element = Element::from_symbol(&(c as char).to_ascii_uppercase().to_string())
                        .expect("aromatic organic symbol");
                    self.push_atom(Atom::aromatic(element), at)?;
                }
                b'-' => {
                    self.take_bond(BondOrder::Single, at)?;
                }
                b'=' => {
                    self.take_bond(BondOrder::Double, at)?;
                }
                b'#' => {
                    self.take_bond(BondOrder::Triple, at)?;
                }
                b':' => {
                    self.take_bond(BondOrder::Aromatic, at)?;
                }
                b'/' | b'\\' => {
                    self.warnings
                        .push(ParseWarning::StrippedStereoBond { offset: at });
                    self.take_bond(BondOrder::Single, at)?;
                }
                b'(' => {
                    let Some(prev) = self.prev else {
                        return Err(ParseError::new(ParseErrorKind::UnexpectedChar('('), at));
                    };
                    self.branch_stack.push((prev, at));
                    self.pos += 1;
                }
                b')' => {
                    let Some((prev, _)) = self.branch_stack.pop() else {
                        return Err(ParseError::new(ParseErrorKind::UnmatchedBranchClose, at));
                    };
                    self.prev = Some(prev);
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    self.pos += 1;
                    self.ring_closure(u16::from(c - b'0'), at)?;
                }
                b'%' => {
                    self.pos += 1;
                    let d1 = self.peek();
                    self.pos += 1;
                    let d2 = self.peek();
                    self.pos += 1;
                    match (d1, d2) {
                        (Some(a), Some(b)) if a.is_ascii_digit() && b.is_ascii_digit() => {
                            let digit = u16::from(a - b'0') * 10 + u16::from(b - b'0');
                            self.ring_closure(digit, at)?;
                        }
                        _ => {
                            return Err(ParseError::new(ParseErrorKind::UnexpectedChar('%'), at))
                        }
                    }
                }
                b'.' => {
                    if self.pending_bond.is_some() {
                        return Err(ParseError::new(ParseErrorKind::DanglingBond, at));
                    }
                    self.prev = None;
                    self.pos += 1;
                }
                other => {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedChar(other as char),
                        at,
                    ));
                }
            }
        }
        if let Some((_, offset)) = self.pending_bond {
            return Err(ParseError::new(ParseErrorKind::DanglingBond, offset));
        }
        if let Some(&(_, offset)) = self.branch_stack.last() {
            return Err(ParseError::new(ParseErrorKind::UnclosedBranch, offset));
        }
        if let Some((digit, open)) = self.rings.iter().next() {
            return Err(ParseError::new(
                ParseErrorKind::UnmatchedRingDigit(*digit),
                open.offset,
            ));
        }
        Ok((self.graph, self.warnings))
    }

    fn take_bond(&mut self, order: BondOrder, at: usize) -> Result<(), ParseError> {
        if self.prev.is_none() {
            return Err(ParseError::new(ParseErrorKind::BondBeforeAtom, at));
        }
        if self.pending_bond.is_some() {
            return Err(ParseError::new(ParseErrorKind::DanglingBond, at));
        }
        self.pending_bond = Some((order, at));
        self.pos += 1;
        Ok(())
    }

    fn push_atom(&mut self, atom: Atom, at: usize) -> Result<(), ParseError> {
        let idx = self.graph.add_atom(atom);
        if let Some(prev) = self.prev {
            let order = match self.pending_bond.take() {
                Some((order, _)) => order,
                None => default_order(&self.graph, prev, idx),
            };
            self.graph
                .add_bond(prev, idx, order)
                .map_err(|_| ParseError::new(ParseErrorKind::DuplicateBond, at))?;
        } else if let Some((_, offset)) = self.pending_bond.take() {
            return Err(ParseError::new(ParseErrorKind::DanglingBond, offset));
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn ring_closure(&mut self, digit: u16, at: usize) -> Result<(), ParseError> {
        let Some(current) = self.prev else {
            return Err(ParseError::new(ParseErrorKind::RingBondBeforeAtom, at));
        };
        let pending = self.pending_bond.take().map(|(order, _)| order);
        if let Some(open) = self.rings.remove(&digit) {
            if open.atom == current {
                return Err(ParseError::new(ParseErrorKind::RingSelfBond(digit), at));
            }
            let order = match (open.bond, pending) {
                (Some(a), Some(b)) if a != b => {
                    return Err(ParseError::new(ParseErrorKind::ConflictingRingBond(digit), at));
                }
                (Some(a), _) => a,
                (None, Some(b)) => b,
                (None, None) => default_order(&self.graph, open.atom, current),
            };
            self.graph
                .add_bond(open.atom, current, order)
                .map_err(|_| ParseError::new(ParseErrorKind::DuplicateBond, at))?;
        } else {
            if self.rings.contains_key(&digit) {
                return Err(ParseError::new(ParseErrorKind::RingDigitReopened(digit), at));
            }
            self.rings.insert(
                digit,
                RingOpen {
                    atom: current,
                    bond: pending,
                    offset: at,
                },
            );
        }
        Ok(())
    }

    fn parse_organic_atom(&mut self) -> Result<Atom, ParseError> {
        let at = self.pos;
        let c = self.bytes[self.pos];
        // Two-letter organic-subset symbols first.
        if c == b'C' && self.bytes.get(self.pos + 1) == Some(&b'l') {
            self.pos += 2;
            return Ok(Atom::new(Element::Cl));
        }
        if c == b'B' && self.bytes.get(self.pos + 1) == Some(&b'r') {
            self.pos += 2;
            return Ok(Atom::new(Element::Br));
        }
        let symbol = (c as char).to_string();
        let element = Element::from_symbol(&symbol)
            .filter(|e| e.organic_subset())
            .ok_or_else(|| ParseError::new(ParseErrorKind::UnsupportedElement(symbol), at))?;
        self.pos += 1;
        Ok(Atom::new(element))
    }

    fn parse_bracket_atom(&mut self) -> Result<Atom, ParseError> {
        let open_at = self.pos;
        self.pos += 1; // consume '['

        let close = self.bytes[self.pos..]
            .iter()
            .position(|&b| b == b']')
            .map(|off| self.pos + off)
            .ok_or_else(|| ParseError::new(ParseErrorKind::UnclosedBracket, open_at))?;

        let isotope = match self.read_number(close) {
            Ok(value) => value,
            Err((at, _)) => return Err(ParseError::new(ParseErrorKind::InvalidIsotope, at)),
        };
        if isotope == Some(0) {
            return Err(ParseError::new(ParseErrorKind::InvalidIsotope, open_at + 1));
        }

        // Element symbol, possibly lowercase aromatic.
        let sym_at = self.pos;
        let first = *self
            .bytes
            .get(self.pos)
            .filter(|_| self.pos < close)
            .ok_or_else(|| ParseError::new(ParseErrorKind::MalformedBracket, open_at))?;
        let (element, aromatic) = if first.is_ascii_lowercase() {
            let symbol = ((first as char).to_ascii_uppercase()).to_string();
            let element = Element::from_symbol(&symbol)
                .filter(|e| e.aromatic_capable())
                .ok_or_else(|| {
                    ParseError::new(ParseErrorKind::UnsupportedElement((first as char).to_string()), sym_at)
                })?;
            self.pos += 1;
            (element, true)
        } else if first.is_ascii_uppercase() {
            let mut symbol = (first as char).to_string();
            if let Some(&second) = self.bytes.get(self.pos + 1) {
                if self.pos + 1 < close && second.is_ascii_lowercase() {
                    // A trailing lowercase letter can only extend the element
                    // symbol, so "[CH4]" keeps H as the hydrogen-count token
                    // while "[Si]" reports the full unsupported symbol.
                    let mut two = symbol.clone();
                    two.push(second as char);
                    if Element::from_symbol(&two).is_some() {
                        symbol = two;
                    } else {
                        return Err(ParseError::new(
                            ParseErrorKind::UnsupportedElement(two),
                            sym_at,
                        ));
                    }
                }
            }
            let element = Element::from_symbol(&symbol)
                .ok_or_else(|| ParseError::new(ParseErrorKind::UnsupportedElement(symbol.clone()), sym_at))?;
            self.pos += symbol.len();
            (element, false)
        } else {
            return Err(ParseError::new(ParseErrorKind::MalformedBracket, sym_at));
        };

        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        atom.isotope = isotope;

        // Chirality tag.
        if self.pos < close && self.bytes[self.pos] == b'@' {
            if self.bytes.get(self.pos + 1) == Some(&b'@') {
                atom.chirality = Chirality::Clockwise;
                self.pos += 2;
            } else {
                atom.chirality = Chirality::Counterclockwise;
                self.pos += 1;
            }
        }

        // Hydrogen count; a bracket atom with no H token has exactly zero.
        let mut explicit_h: u8 = 0;
        if self.pos < close && self.bytes[self.pos] == b'H' {
            self.pos += 1;
            let count = match self.read_number(close) {
                Ok(Some(n)) if n <= 9 => n as u8,
                Ok(Some(_)) => {
                    return Err(ParseError::new(ParseErrorKind::MalformedBracket, self.pos))
                }
                Ok(None) => 1,
                Err((at, _)) => return Err(ParseError::new(ParseErrorKind::MalformedBracket, at)),
            };
            explicit_h = count;
        }
        atom.explicit_h = Some(explicit_h);

        // Formal charge.
        if self.pos < close && (self.bytes[self.pos] == b'+' || self.bytes[self.pos] == b'-') {
            let sign: i32 = if self.bytes[self.pos] == b'+' { 1 } else { -1 };
            let sign_byte = self.bytes[self.pos];
            let charge_at = self.pos;
            self.pos += 1;
            let mut magnitude: i32 = 1;
            match self.read_number(close) {
                Ok(Some(n)) => magnitude = n as i32,
                Ok(None) => {
                    // Repeated '+' / '-' shorthand.
                    while self.pos < close && self.bytes[self.pos] == sign_byte {
                        magnitude += 1;
                        self.pos += 1;
                    }
                }
                Err((at, _)) => return Err(ParseError::new(ParseErrorKind::MalformedBracket, at)),
            }
            let charge = sign * magnitude;
            if !(-4..=4).contains(&charge) {
                return Err(ParseError::new(ParseErrorKind::ChargeOutOfRange(charge), charge_at));
            }
            atom.charge = charge as i8;
        }

        if self.pos != close {
            return Err(ParseError::new(ParseErrorKind::MalformedBracket, self.pos));
        }
        self.pos = close + 1;
        Ok(atom)
    }

    /// Reads an unsigned decimal number ending before `limit`. Returns
    /// `Ok(None)` when no digit is present.
    #[allow(clippy::type_complexity)]
    fn read_number(&mut self, limit: usize) -> Result<Option<u16>, (usize, u32)> {
        let start = self.pos;
        let mut value: u32 = 0;
        while self.pos < limit && self.bytes[self.pos].is_ascii_digit() {
            value = value * 10 + u32::from(self.bytes[self.pos] - b'0');
            if value > u32::from(u16::MAX) {
                return Err((start, value));
            }
            self.pos += 1;
        }
        if self.pos == start {
            Ok(None)
        } else {
            Ok(Some(value as u16))
        }
    }
}

/// Elided bonds are aromatic between two aromatic atoms, single otherwise.
fn default_order(graph: &MolGraph, a: usize, b: usize) -> BondOrder {
    if graph.atom(a).aromatic && graph.atom(b).aromatic {
        BondOrder::Aromatic
    } else {
        BondOrder::Single
    }
}
