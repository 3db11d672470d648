//! Height-preserving proof transformations: the admissible structural rules,
//! inversion of the invertible left rules, and cut elimination.

mod cut;
mod simulate;

use std::collections::BTreeMap;

use thiserror::Error;

pub(crate) use simulate::embed;
pub use cut::{eliminate_cut, eliminate_cut_monitored, CutStats};

use crate::calculus::{apply_backward, reindex, Proof, RuleError, RuleId, RuleInstance};
use crate::formula::{Character, Formula};
use crate::grammar::{Logic, Reachability};
use crate::sequent::{Name, NestedSequent};
use simulate::{identity, simulate, Decomp, Obligations};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("side condition fails: {0}")]
    SideCondition(String),
    #[error("proof does not embed into the target: {0}")]
    Cover(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// A structural rule, read top-down from premise to conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdmissibleKind {
    /// Drops the output `false` at `at`.
    BotR { at: Name },
    /// Nests the whole sequent under a fresh root.
    Nec { character: Character },
    WL { at: Name, formulas: Vec<Formula> },
    /// Adds an output to an output-free sequent.
    WR { at: Name, formula: Formula },
    /// Adds an empty `character`-child to `at`.
    Ew { at: Name, character: Character },
    /// Removes one of two copies of `formula` at `at`.
    CL { at: Name, formula: Formula },
    /// Removes the child `drop` of `at`, a duplicate of its sibling `keep`.
    Ec { at: Name, keep: Name, drop: Name },
    /// Moves the child `child` of `at` into `dest` by merging.
    Sft { at: Name, child: Name, dest: Name },
}

fn shape(msg: impl Into<String>) -> TransformError {
    TransformError::Shape(msg.into())
}

fn node_mut(g: &mut NestedSequent, w: Name) -> Result<&mut NestedSequent, TransformError> {
    g.find_mut(w).ok_or_else(|| shape(format!("no component {w}")))
}

/// Removes the subtree rooted at `child` (a child of `at`) and returns it.
fn detach(g: &mut NestedSequent, at: Name, child: Name) -> Result<(Character, NestedSequent), TransformError> {
    let node = node_mut(g, at)?;
    let i = node.children.iter().position(|(_, c)| c.name == child).ok_or_else(|| shape(format!("{child} is not a child of {at}")))?;
    Ok(node.children.remove(i))
}

/// The conclusion of the rule applied to `g`, with the component map used to
/// replay a proof of `g` on it.
pub fn admissible_conclusion(kind: &AdmissibleKind, g: &NestedSequent, logic: &Logic) -> Result<(NestedSequent, BTreeMap<Name, Name>), TransformError> {
    let mut t = g.clone();
    let mut phi = identity(g);
    match kind {
        AdmissibleKind::BotR { at } => {
            let n = node_mut(&mut t, *at)?;
            if n.out != Some(Formula::Bottom) {
                return Err(shape(format!("output at {at} is not `false`")));
            }
            n.out = None;
        }
        AdmissibleKind::Nec { character } => {
            t = NestedSequent { name: g.fresh_name(), ant: vec![], out: None, children: vec![(character.clone(), g.clone())] };
        }
        AdmissibleKind::WL { at, formulas } => node_mut(&mut t, *at)?.ant.extend(formulas.iter().cloned()),
        AdmissibleKind::WR { at, formula } => {
            if g.output_count() > 0 {
                return Err(shape("premise of wR must be output-free"));
            }
            node_mut(&mut t, *at)?.out = Some(formula.clone());
        }
        AdmissibleKind::Ew { at, character } => {
            let fresh = g.fresh_name();
            node_mut(&mut t, *at)?.children.push((character.clone(), NestedSequent::leaf(fresh, vec![], None)));
        }
        AdmissibleKind::CL { at, formula } => {
            let n = node_mut(&mut t, *at)?;
            if n.ant.iter().filter(|f| *f == formula).count() < 2 {
                return Err(shape(format!("`{formula}` does not occur twice at {at}")));
            }
            let i = n.ant.iter().rposition(|f| f == formula).expect("counted above");
            n.ant.remove(i);
        }
        AdmissibleKind::Ec { at, keep, drop } => {
            let (x, dropped) = detach(&mut t, *at, *drop)?;
            let n = t.find(*at).expect("detached from it");
            let (y, kept) = n.children.iter().find(|(_, c)| c.name == *keep).ok_or_else(|| shape(format!("{keep} is not a child of {at}")))?;
            if *y != x {
                return Err(shape("duplicated children differ in their edge label"));
            }
            let iso = dropped.iso_map(kept).ok_or_else(|| shape(format!("{drop} and {keep} differ")))?;
            phi.extend(iso);
        }
        AdmissibleKind::Sft { at, child, dest } => {
            let (x, moved) = detach(&mut t, *at, *child)?;
            if moved.contains(*dest) {
                return Err(shape(format!("{dest} lies inside the moved subtree")));
            }
            let reach = Reachability::compute(&logic.grammar, &t.propagation_graph());
            if !reach.holds(*at, &x, *dest) {
                return Err(TransformError::SideCondition(format!("{dest} is not reachable from {at} along L({x})")));
            }
            let n = node_mut(&mut t, *dest)?;
            if moved.out.is_some() && n.out.is_some() {
                return Err(shape("merge would create two outputs"));
            }
            n.ant.extend(moved.ant.iter().cloned());
            if moved.out.is_some() {
                n.out = moved.out.clone();
            }
            n.children.extend(moved.children.iter().cloned());
            phi.insert(*child, *dest);
        }
    }
    t.validate().map_err(|e| shape(e.to_string()))?;
    Ok((t, phi))
}

/// A proof of the rule's conclusion from a proof `p` of its premise, no
/// higher than `p`.
pub fn apply_admissible(kind: &AdmissibleKind, p: &Proof, logic: &Logic) -> Result<Proof, TransformError> {
    let p = p.normalize_to(&p.conclusion, logic)?;
    let (t, phi) = admissible_conclusion(kind, &p.conclusion, logic)?;
    simulate(&p, &t, &phi, &Obligations::default(), logic)
}

/// A proof of premise `premise_index` of `inst` (an orL, andL, diaL,
/// boxLprop or dX instance on `p`'s conclusion), no higher than `p`.
pub fn invert_rule(inst: &RuleInstance, premise_index: usize, p: &Proof, logic: &Logic) -> Result<Proof, TransformError> {
    let p = p.normalize_to(&p.conclusion, logic)?;
    invert(&p, inst, premise_index, logic)
}

fn invert(p: &Proof, inst: &RuleInstance, i: usize, logic: &Logic) -> Result<Proof, TransformError> {
    let g = &p.conclusion;
    let ps = apply_backward(g, inst, logic)?;
    let t = ps.get(i).ok_or_else(|| shape(format!("{} has no premise {i}", inst.rule)))?;
    let f = inst.principal_formula(g).cloned();
    let obl = match (inst.rule, f) {
        (RuleId::AndL, Some(f)) => Obligations::one(inst.at, f, Decomp::And),
        (RuleId::OrL, Some(f)) => Obligations::one(inst.at, f, Decomp::Or(i)),
        (RuleId::DiaL, Some(f)) => Obligations::one(inst.at, f, Decomp::Dia(g.fresh_name())),
        (RuleId::BoxLProp | RuleId::DX, _) => Obligations::default(),
        (r, _) => return Err(shape(format!("{r} is not invertible"))),
    };
    simulate(p, t, &identity(g), &obl, logic)
}

/// `inst`, given on `from`, moved onto the canonically related `to` with the
/// identity name map.
fn transfer(inst: &RuleInstance, from: &NestedSequent, to: &NestedSequent) -> Result<RuleInstance, TransformError> {
    Ok(reindex(inst, from, to, &identity(from))?)
}

fn shift(p: &Proof, at: Name, child: Name, dest: Name, logic: &Logic) -> Result<Proof, TransformError> {
    let (t, phi) = admissible_conclusion(&AdmissibleKind::Sft { at, child, dest }, &p.conclusion, logic)?;
    simulate(p, &t, &phi, &Obligations::default(), logic)
}
