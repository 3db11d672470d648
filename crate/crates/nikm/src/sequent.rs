//! Nested sequents: trees of named single-conclusion Gentzen sequents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{Character, Formula, FormulaError, Lexer, Tok};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(pub u32);

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

impl Name {
    pub fn parse(s: &str) -> Option<Name> {
        s.strip_prefix('w')?.parse().ok().map(Name)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GentzenSequent {
    pub ant: Vec<Formula>,
    pub out: Option<Formula>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedSequent {
    pub name: Name,
    pub ant: Vec<Formula>,
    pub out: Option<Formula>,
    pub children: Vec<(Character, NestedSequent)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropagationGraph {
    pub nodes: Vec<Name>,
    pub edges: Vec<(Name, Character, Name)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequentError {
    #[error(transparent)]
    Syntax(#[from] FormulaError),
    #[error("more than one output formula")]
    MultipleOutputs,
    #[error("duplicate component name {0}")]
    DuplicateName(Name),
    #[error("no component named {0}")]
    UnknownName(Name),
}

/// Name-free structural key. Equal keys mean equal sequents up to multiset
/// reordering of antecedents and siblings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Canon {
    ant: Vec<Formula>,
    out: Option<Formula>,
    children: Vec<(Character, Canon)>,
}

impl NestedSequent {
    pub fn leaf(name: Name, ant: Vec<Formula>, out: Option<Formula>) -> Self {
        NestedSequent { name, ant, out, children: Vec::new() }
    }

    /// Single component `ant => out` named w0.
    pub fn flat(ant: Vec<Formula>, out: Option<Formula>) -> Self {
        NestedSequent::leaf(Name(0), ant, out)
    }

    pub fn names(&self) -> Vec<Name> {
        let mut v = Vec::new();
        self.walk(&mut |n| v.push(n.name));
        v
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a NestedSequent)) {
        f(self);
        for (_, c) in &self.children {
            c.walk(f);
        }
    }

    pub fn nodes(&self) -> Vec<&NestedSequent> {
        let mut v = Vec::new();
        self.walk(&mut |n| v.push(n));
        v
    }

    pub fn max_name(&self) -> Name {
        self.names().into_iter().max().unwrap_or(Name(0))
    }

    pub fn fresh_name(&self) -> Name {
        Name(self.max_name().0 + 1)
    }

    pub fn find(&self, w: Name) -> Option<&NestedSequent> {
        if self.name == w {
            return Some(self);
        }
        self.children.iter().find_map(|(_, c)| c.find(w))
    }

    pub fn find_mut(&mut self, w: Name) -> Option<&mut NestedSequent> {
        if self.name == w {
            return Some(self);
        }
        self.children.iter_mut().find_map(|(_, c)| c.find_mut(w))
    }

    pub fn contains(&self, w: Name) -> bool {
        self.find(w).is_some()
    }

    /// Parent name and edge character of `w`.
    pub fn parent_of(&self, w: Name) -> Option<(Name, Character)> {
        for (x, c) in &self.children {
            if c.name == w {
                return Some((self.name, x.clone()));
            }
            if let Some(r) = c.parent_of(w) {
                return Some(r);
            }
        }
        None
    }

    /// Flattens the tree into its named components.
    pub fn components(&self) -> Vec<(Name, GentzenSequent)> {
        self.nodes()
            .into_iter()
            .map(|n| (n.name, GentzenSequent { ant: n.ant.clone(), out: n.out.clone() }))
            .collect()
    }

    /// Tree edges (parent, character, child) in preorder.
    pub fn tree_edges(&self) -> Vec<(Name, Character, Name)> {
        let mut v = Vec::new();
        self.walk(&mut |n| {
            for (x, c) in &n.children {
                v.push((n.name, x.clone(), c.name));
            }
        });
        v
    }

    pub fn propagation_graph(&self) -> PropagationGraph {
        let mut edges = Vec::new();
        for (u, x, v) in self.tree_edges() {
            edges.push((v, x.converse(), u));
            edges.push((u, x, v));
        }
        PropagationGraph { nodes: self.names(), edges }
    }

    /// The unique output formula and its component, if right-filled.
    pub fn output(&self) -> Option<(Name, &Formula)> {
        self.nodes().into_iter().find_map(|n| n.out.as_ref().map(|f| (n.name, f)))
    }

    pub fn output_count(&self) -> usize {
        self.nodes().iter().filter(|n| n.out.is_some()).count()
    }

    pub fn strip_output(&self) -> NestedSequent {
        let mut g = self.clone();
        g.strip_in_place();
        g
    }

    fn strip_in_place(&mut self) {
        self.out = None;
        for (_, c) in &mut self.children {
            c.strip_in_place();
        }
    }

    /// Single output and pairwise distinct names.
    pub fn validate(&self) -> Result<(), SequentError> {
        if self.output_count() > 1 {
            return Err(SequentError::MultipleOutputs);
        }
        let mut seen = BTreeSet::new();
        for n in self.names() {
            if !seen.insert(n) {
                return Err(SequentError::DuplicateName(n));
            }
        }
        Ok(())
    }

    /// Adds `s.ant` to the antecedent and `s.out` to the consequent of `w`.
    pub fn graft(&self, w: Name, s: &GentzenSequent) -> Result<NestedSequent, SequentError> {
        let mut g = self.clone();
        if s.out.is_some() && g.output_count() > 0 {
            return Err(SequentError::MultipleOutputs);
        }
        let node = g.find_mut(w).ok_or(SequentError::UnknownName(w))?;
        node.ant.extend(s.ant.iter().cloned());
        if s.out.is_some() {
            node.out = s.out.clone();
        }
        Ok(g)
    }

    pub fn canon(&self) -> Canon {
        let mut ant = self.ant.clone();
        ant.sort();
        let mut children: Vec<(Character, Canon)> = self.children.iter().map(|(x, c)| (x.clone(), c.canon())).collect();
        children.sort();
        Canon { ant, out: self.out.clone(), children }
    }

    pub fn canon_eq(&self, other: &NestedSequent) -> bool {
        self.canon() == other.canon()
    }

    /// Renames components; names missing from `map` are kept.
    pub fn rename(&self, map: &BTreeMap<Name, Name>) -> NestedSequent {
        NestedSequent {
            name: *map.get(&self.name).unwrap_or(&self.name),
            ant: self.ant.clone(),
            out: self.out.clone(),
            children: self.children.iter().map(|(x, c)| (x.clone(), c.rename(map))).collect(),
        }
    }

    /// Renames every component to its preorder index.
    pub fn renumbered(&self) -> (NestedSequent, BTreeMap<Name, Name>) {
        let map: BTreeMap<Name, Name> = self.names().into_iter().enumerate().map(|(i, n)| (n, Name(i as u32))).collect();
        (self.rename(&map), map)
    }

    /// A name correspondence from `self` onto `other` witnessing canonical
    /// equality.
    pub fn iso_map(&self, other: &NestedSequent) -> Option<BTreeMap<Name, Name>> {
        if self.canon() != other.canon() {
            return None;
        }
        let mut map = BTreeMap::new();
        iso_into(self, other, &mut map);
        Some(map)
    }

    pub fn formula_count(&self) -> usize {
        self.nodes().iter().map(|n| n.ant.len() + usize::from(n.out.is_some())).sum()
    }

    pub fn parse(text: &str) -> Result<NestedSequent, SequentError> {
        let mut lx = Lexer::new(text);
        let mut counter = 0u32;
        let g = parse_sequent(&mut lx, &mut counter)?;
        match lx.next()? {
            (Tok::End, _) => {}
            (t, at) => {
                return Err(FormulaError::Parse { offset: at, message: format!("trailing input {}", crate::formula::describe(&t)) }.into())
            }
        }
        g.validate()?;
        Ok(g)
    }
}

fn iso_into(a: &NestedSequent, b: &NestedSequent, map: &mut BTreeMap<Name, Name>) {
    map.insert(a.name, b.name);
    let mut used = vec![false; b.children.len()];
    for (x, ca) in &a.children {
        let key = ca.canon();
        let j = (0..b.children.len())
            .find(|&j| !used[j] && b.children[j].0 == *x && b.children[j].1.canon() == key)
            .expect("canonical equality guarantees a partner");
        used[j] = true;
        iso_into(ca, &b.children[j].1, map);
    }
}

/// Merge of two nested sequents at their roots; the result keeps `g`'s root
/// name.
pub fn merge_odot(g: &NestedSequent, k: &NestedSequent) -> Result<NestedSequent, SequentError> {
    if g.output_count() > 0 && k.output_count() > 0 {
        return Err(SequentError::MultipleOutputs);
    }
    let gn: BTreeSet<Name> = g.names().into_iter().collect();
    if let Some(n) = k.names().into_iter().skip(1).find(|n| gn.contains(n)) {
        return Err(SequentError::DuplicateName(n));
    }
    let mut out = g.clone();
    out.ant.extend(k.ant.iter().cloned());
    if out.out.is_none() {
        out.out = k.out.clone();
    }
    out.children.extend(k.children.iter().cloned());
    Ok(out)
}

pub fn components(g: &NestedSequent) -> Vec<(Name, GentzenSequent)> {
    g.components()
}

pub fn propagation_graph(g: &NestedSequent) -> PropagationGraph {
    g.propagation_graph()
}

pub fn strip_output(g: &NestedSequent) -> NestedSequent {
    g.strip_output()
}

pub fn graft(g: &NestedSequent, w: Name, s: &GentzenSequent) -> Result<NestedSequent, SequentError> {
    g.graft(w, s)
}

fn parse_sequent(lx: &mut Lexer<'_>, counter: &mut u32) -> Result<NestedSequent, SequentError> {
    let name = Name(*counter);
    *counter += 1;
    let ant = parse_flist(lx)?;
    lx.expect("=>")?;
    let outs = parse_flist(lx)?;
    if outs.len() > 1 {
        return Err(SequentError::MultipleOutputs);
    }
    let mut children = Vec::new();
    while let (Tok::Sym(","), _) = lx.peek()? {
        lx.next()?;
        lx.expect("(")?;
        let x = lx.character()?;
        lx.expect(")")?;
        lx.expect("[")?;
        let child = parse_sequent(lx, counter)?;
        lx.expect("]")?;
        children.push((x, child));
    }
    Ok(NestedSequent { name, ant, out: outs.into_iter().next(), children })
}

/// `-` or a comma-separated list of formulas, stopping before `, (x)[`.
fn parse_flist(lx: &mut Lexer<'_>) -> Result<Vec<Formula>, SequentError> {
    if let (Tok::Sym("-"), _) = lx.peek()? {
        lx.next()?;
        return Ok(Vec::new());
    }
    let mut v = vec![lx.formula()?];
    loop {
        if !matches!(lx.peek()?, (Tok::Sym(","), _)) || nest_ahead(lx) {
            return Ok(v);
        }
        lx.next()?;
        v.push(lx.formula()?);
    }
}

/// Whether the input continues with `, ( char ) [`.
fn nest_ahead(lx: &mut Lexer<'_>) -> bool {
    let save = lx.save();
    let ok = (|| -> Result<bool, FormulaError> {
        lx.expect(",")?;
        lx.expect("(")?;
        lx.character()?;
        lx.expect(")")?;
        lx.expect("[")?;
        Ok(true)
    })()
    .unwrap_or(false);
    lx.restore(save);
    ok
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Formula]) -> fmt::Result {
    if items.is_empty() {
        return write!(f, "-");
    }
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for NestedSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.ant)?;
        write!(f, " => ")?;
        write_list(f, self.out.as_slice())?;
        for (x, c) in &self.children {
            write!(f, ", ({x})[{c}]")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for NestedSequent {
    type Err = SequentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NestedSequent::parse(s)
    }
}
