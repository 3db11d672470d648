//! Formulas of the multi-modal intuitionistic language, characters, and
//! polarity signatures.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A character of the converse-closed alphabet. `a` is forward, `a^` is its
/// backward converse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    pub base: String,
    pub backward: bool,
}

impl Character {
    pub fn forward(base: impl Into<String>) -> Self {
        Character { base: base.into(), backward: false }
    }

    pub fn backward(base: impl Into<String>) -> Self {
        Character { base: base.into(), backward: true }
    }

    pub fn converse(&self) -> Self {
        Character { base: self.base.clone(), backward: !self.backward }
    }

    pub fn is_forward(&self) -> bool {
        !self.backward
    }

    /// Parses `a` or `a^`.
    pub fn parse(text: &str) -> Result<Self, FormulaError> {
        let t = text.trim();
        let (base, backward) = match t.strip_suffix('^') {
            Some(b) => (b, true),
            None => (t, false),
        };
        if is_ident(base) {
            Ok(Character { base: base.to_string(), backward })
        } else {
            Err(FormulaError::Parse { offset: 0, message: format!("bad character `{text}`") })
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.backward {
            write!(f, "{}^", self.base)
        } else {
            write!(f, "{}", self.base)
        }
    }
}

impl serde::Serialize for Character {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Character {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Character::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Converse of a string of characters: x1...xn becomes conv(xn)...conv(x1).
pub fn converse_string(s: &[Character]) -> Vec<Character> {
    s.iter().rev().map(Character::converse).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Arc<str>),
    Bottom,
    Or(Arc<Formula>, Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Dia(Character, Arc<Formula>),
    Box(Character, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Arc::from(name))
    }

    pub fn top() -> Self {
        Formula::Imp(Arc::new(Formula::Bottom), Arc::new(Formula::Bottom))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn dia(x: Character, a: Formula) -> Self {
        Formula::Dia(x, Arc::new(a))
    }

    pub fn boxed(x: Character, a: Formula) -> Self {
        Formula::Box(x, Arc::new(a))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Imp(a, b) if **a == Formula::Bottom && **b == Formula::Bottom)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    /// Right-nested disjunction of a non-empty list.
    pub fn big_or(items: &[Formula]) -> Option<Formula> {
        let (last, rest) = items.split_last()?;
        Some(rest.iter().rev().fold(last.clone(), |acc, f| Formula::or(f.clone(), acc)))
    }

    /// Right-nested conjunction of a non-empty list.
    pub fn big_and(items: &[Formula]) -> Option<Formula> {
        let (last, rest) = items.split_last()?;
        Some(rest.iter().rev().fold(last.clone(), |acc, f| Formula::and(f.clone(), acc)))
    }

    /// Number of nodes in the syntax tree.
    pub fn length(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 1,
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Imp(a, b) => 1 + a.length() + b.length(),
            Formula::Dia(_, a) | Formula::Box(_, a) => 1 + a.length(),
        }
    }

    /// Every character occurring in a modality.
    pub fn characters(&self, out: &mut BTreeSet<Character>) {
        match self {
            Formula::Atom(_) | Formula::Bottom => {}
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Imp(a, b) => {
                a.characters(out);
                b.characters(out);
            }
            Formula::Dia(x, a) | Formula::Box(x, a) => {
                out.insert(x.clone());
                a.characters(out);
            }
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Bottom => {}
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Imp(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
            Formula::Dia(_, a) | Formula::Box(_, a) => a.atoms(out),
        }
    }

    pub fn subformulas(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Formula::Atom(_) | Formula::Bottom => {}
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Imp(a, b) => {
                a.subformulas(out);
                b.subformulas(out);
            }
            Formula::Dia(_, a) | Formula::Box(_, a) => a.subformulas(out),
        }
    }

    fn level(&self) -> u8 {
        if self.is_top() {
            return 4;
        }
        match self {
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        if self.is_top() {
            return write!(f, "true");
        }
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Bottom => write!(f, "false"),
            Formula::Imp(a, b) => {
                a.write_at(f, 2)?;
                write!(f, " -> ")?;
                b.write_at(f, 1)
            }
            Formula::Or(a, b) => {
                a.write_at(f, 3)?;
                write!(f, " | ")?;
                b.write_at(f, 2)
            }
            Formula::And(a, b) => {
                a.write_at(f, 4)?;
                write!(f, " & ")?;
                b.write_at(f, 3)
            }
            Formula::Dia(x, a) => {
                write!(f, "<{x}>")?;
                a.write_at(f, 4)
            }
            Formula::Box(x, a) => {
                write!(f, "[{x}]")?;
                a.write_at(f, 4)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("character `{0}` is not in the alphabet")]
    Alphabet(String),
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Sym(&'static str),
    End,
}

/// Shared tokenizer for formulas and sequents. Offsets are byte positions.
pub(crate) struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    pub(crate) fn save(&self) -> usize {
        self.pos
    }

    pub(crate) fn restore(&mut self, pos: usize) {
        self.pos = pos;
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Returns the next token and its starting offset without consuming it.
    pub(crate) fn peek(&mut self) -> Result<(Tok, usize), FormulaError> {
        let save = self.pos;
        let r = self.next();
        self.pos = save;
        r
    }

    pub(crate) fn next(&mut self) -> Result<(Tok, usize), FormulaError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            self.pos += len;
            return Ok((Tok::Ident(rest[..len].to_string()), start));
        }
        const SYMS: [&str; 12] = ["->", "=>", "&", "|", "<", ">", "[", "]", "(", ")", "^", ","];
        for s in SYMS {
            if rest.starts_with(s) {
                self.pos += s.len();
                return Ok((Tok::Sym(s), start));
            }
        }
        if rest.starts_with('-') {
            self.pos += 1;
            return Ok((Tok::Sym("-"), start));
        }
        Err(FormulaError::Parse { offset: start, message: format!("unexpected character `{c}`") })
    }

    pub(crate) fn expect(&mut self, sym: &'static str) -> Result<usize, FormulaError> {
        match self.next()? {
            (Tok::Sym(s), at) if s == sym => Ok(at),
            (t, at) => Err(FormulaError::Parse { offset: at, message: format!("expected `{sym}`, found {}", describe(&t)) }),
        }
    }

    pub(crate) fn character(&mut self) -> Result<Character, FormulaError> {
        match self.next()? {
            (Tok::Ident(name), _) => {
                let backward = matches!(self.peek()?, (Tok::Sym("^"), _));
                if backward {
                    self.next()?;
                }
                Ok(Character { base: name, backward })
            }
            (t, at) => Err(FormulaError::Parse { offset: at, message: format!("expected character, found {}", describe(&t)) }),
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disjunction()?;
        if let (Tok::Sym("->"), _) = self.peek()? {
            self.next()?;
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.conjunction()?;
        if let (Tok::Sym("|"), _) = self.peek()? {
            self.next()?;
            let rhs = self.disjunction()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.unary()?;
        if let (Tok::Sym("&"), _) = self.peek()? {
            self.next()?;
            let rhs = self.conjunction()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.next()? {
            (Tok::Ident(name), _) => Ok(match name.as_str() {
                "false" => Formula::Bottom,
                "true" => Formula::top(),
                _ => Formula::atom(&name),
            }),
            (Tok::Sym("("), _) => {
                let f = self.formula()?;
                self.expect(")")?;
                Ok(f)
            }
            (Tok::Sym("<"), _) => {
                let x = self.character()?;
                self.expect(">")?;
                Ok(Formula::dia(x, self.unary()?))
            }
            (Tok::Sym("["), _) => {
                let x = self.character()?;
                self.expect("]")?;
                Ok(Formula::boxed(x, self.unary()?))
            }
            (t, at) => Err(FormulaError::Parse { offset: at, message: format!("expected formula, found {}", describe(&t)) }),
        }
    }
}

pub(crate) fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::End => "end of input".to_string(),
    }
}

/// Parses a formula. `->` is right-associative; modalities bind tighter than
/// `&`, which binds tighter than `|`, which binds tighter than `->`.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut lx = Lexer::new(text);
    let f = lx.formula()?;
    match lx.next()? {
        (Tok::End, _) => Ok(f),
        (t, at) => Err(FormulaError::Parse { offset: at, message: format!("trailing input {}", describe(&t)) }),
    }
}

/// Parses a formula and rejects characters outside `alphabet` (forward
/// bases). An empty alphabet accepts every character.
pub fn parse_formula_in(text: &str, alphabet: &BTreeSet<String>) -> Result<Formula, FormulaError> {
    let f = parse_formula(text)?;
    check_alphabet(&f, alphabet)?;
    Ok(f)
}

pub fn check_alphabet(f: &Formula, alphabet: &BTreeSet<String>) -> Result<(), FormulaError> {
    if alphabet.is_empty() {
        return Ok(());
    }
    let mut cs = BTreeSet::new();
    f.characters(&mut cs);
    match cs.into_iter().find(|c| !alphabet.contains(&c.base)) {
        Some(c) => Err(FormulaError::Alphabet(c.to_string())),
        None => Ok(()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedFormulaSet {
    pub polarity: Polarity,
    pub members: BTreeSet<Formula>,
}

impl SignedFormulaSet {
    /// Members that are propositional atoms.
    pub fn atoms(&self) -> BTreeSet<Formula> {
        self.members.iter().filter(|f| f.is_atom()).cloned().collect()
    }

    pub fn is_subset(&self, other: &SignedFormulaSet) -> bool {
        self.members.is_subset(&other.members)
    }
}

pub fn signature(a: &Formula, polarity: Polarity) -> SignedFormulaSet {
    let mut members = BTreeSet::new();
    members.insert(Formula::Bottom);
    members.insert(Formula::top());
    sig_into(a, polarity, &mut members);
    SignedFormulaSet { polarity, members }
}

fn sig_into(a: &Formula, pol: Polarity, out: &mut BTreeSet<Formula>) {
    if a.is_top() {
        return;
    }
    match a {
        Formula::Atom(_) => {
            if pol == Polarity::Pos {
                out.insert(a.clone());
            }
        }
        Formula::Bottom => {}
        Formula::Or(b, c) | Formula::And(b, c) => {
            out.insert(a.clone());
            sig_into(b, pol, out);
            sig_into(c, pol, out);
        }
        Formula::Imp(b, c) => {
            out.insert(a.clone());
            sig_into(b, pol.flip(), out);
            sig_into(c, pol, out);
        }
        Formula::Dia(_, b) | Formula::Box(_, b) => {
            out.insert(a.clone());
            sig_into(b, pol, out);
        }
    }
}
