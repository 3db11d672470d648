//! The rules of the nested calculus as backward rule applications, proof
//! objects, and an independent checker.

mod json;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::formula::{Character, Formula};
use crate::grammar::{Logic, Reachability};
use crate::sequent::{Name, NestedSequent};

pub use json::{proof_from_json, proof_to_json, JsonMode, ProofJsonError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    Id,
    BotL,
    OrL,
    OrR1,
    OrR2,
    AndL,
    AndR,
    ImpL,
    ImpR,
    DiaRProp,
    BoxLProp,
    DiaL,
    BoxR,
    DX,
}

impl RuleId {
    pub const ALL: [RuleId; 14] = [
        RuleId::Id,
        RuleId::BotL,
        RuleId::OrL,
        RuleId::OrR1,
        RuleId::OrR2,
        RuleId::AndL,
        RuleId::AndR,
        RuleId::ImpL,
        RuleId::ImpR,
        RuleId::DiaRProp,
        RuleId::BoxLProp,
        RuleId::DiaL,
        RuleId::BoxR,
        RuleId::DX,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Id => "id",
            RuleId::BotL => "botL",
            RuleId::OrL => "orL",
            RuleId::OrR1 => "orR1",
            RuleId::OrR2 => "orR2",
            RuleId::AndL => "andL",
            RuleId::AndR => "andR",
            RuleId::ImpL => "impL",
            RuleId::ImpR => "impR",
            RuleId::DiaRProp => "diaRprop",
            RuleId::BoxLProp => "boxLprop",
            RuleId::DiaL => "diaL",
            RuleId::BoxR => "boxR",
            RuleId::DX => "dX",
        }
    }

    pub fn parse(s: &str) -> Option<RuleId> {
        RuleId::ALL.into_iter().find(|r| r.as_str() == s)
    }

    pub fn is_initial(self) -> bool {
        matches!(self, RuleId::Id | RuleId::BotL)
    }

    /// Rules whose principal formula sits in an antecedent.
    pub fn is_left(self) -> bool {
        matches!(self, RuleId::Id | RuleId::BotL | RuleId::OrL | RuleId::AndL | RuleId::ImpL | RuleId::BoxLProp | RuleId::DiaL)
    }

    pub fn is_right(self) -> bool {
        matches!(self, RuleId::OrR1 | RuleId::OrR2 | RuleId::AndR | RuleId::ImpR | RuleId::DiaRProp | RuleId::BoxR)
    }

    pub fn arity(self) -> usize {
        match self {
            RuleId::Id | RuleId::BotL => 0,
            RuleId::OrL | RuleId::AndR | RuleId::ImpL => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Ant,
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    pub side: Side,
    pub index: usize,
}

impl Address {
    pub fn ant(index: usize) -> Self {
        Address { side: Side::Ant, index }
    }

    pub fn out() -> Self {
        Address { side: Side::Out, index: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub at: Name,
    pub principal: Option<Address>,
    pub target: Option<Name>,
    pub character: Option<Character>,
    /// A string of L(x) tracing the propagation path. Advisory only.
    pub witness: Option<Vec<Character>>,
}

impl RuleInstance {
    pub fn new(rule: RuleId, at: Name, principal: Option<Address>) -> Self {
        RuleInstance { rule, at, principal, target: None, character: None, witness: None }
    }

    pub fn on_ant(rule: RuleId, at: Name, index: usize) -> Self {
        RuleInstance::new(rule, at, Some(Address::ant(index)))
    }

    pub fn on_out(rule: RuleId, at: Name) -> Self {
        RuleInstance::new(rule, at, Some(Address::out()))
    }

    pub fn propagate(rule: RuleId, at: Name, principal: Address, target: Name, x: Character) -> Self {
        RuleInstance { rule, at, principal: Some(principal), target: Some(target), character: Some(x), witness: None }
    }

    pub fn serial(at: Name, x: Character) -> Self {
        RuleInstance { rule: RuleId::DX, at, principal: None, target: None, character: Some(x), witness: None }
    }

    /// The principal formula inside `g`.
    pub fn principal_formula<'a>(&self, g: &'a NestedSequent) -> Option<&'a Formula> {
        let node = g.find(self.at)?;
        match self.principal? {
            Address { side: Side::Ant, index } => node.ant.get(index),
            Address { side: Side::Out, .. } => node.out.as_ref(),
        }
    }

    pub fn renamed(&self, map: &BTreeMap<Name, Name>) -> RuleInstance {
        let r = |n: Name| *map.get(&n).unwrap_or(&n);
        RuleInstance { at: r(self.at), target: self.target.map(r), ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub conclusion: NestedSequent,
    pub rule: RuleInstance,
    pub premises: Vec<Proof>,
}

impl Proof {
    pub fn leaf(conclusion: NestedSequent, rule: RuleInstance) -> Self {
        Proof { conclusion, rule, premises: Vec::new() }
    }

    pub fn height(&self) -> usize {
        self.premises.iter().map(|p| p.height() + 1).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Proof::size).sum::<usize>()
    }

    /// Largest component name anywhere in the proof.
    pub fn max_name(&self) -> Name {
        self.premises.iter().map(Proof::max_name).fold(self.conclusion.max_name(), Name::max)
    }

    pub fn rules(&self) -> Vec<RuleId> {
        let mut v = vec![self.rule.rule];
        for p in &self.premises {
            v.extend(p.rules());
        }
        v
    }

    /// Renames components in every node.
    pub fn rename(&self, map: &BTreeMap<Name, Name>) -> Proof {
        Proof {
            conclusion: self.conclusion.rename(map),
            rule: self.rule.renamed(map),
            premises: self.premises.iter().map(|p| p.rename(map)).collect(),
        }
    }

    /// Rebuilds the proof so that its conclusion is exactly `target` and
    /// every premise is exactly the output of `apply_backward`.
    pub fn normalize_to(&self, target: &NestedSequent, logic: &Logic) -> Result<Proof, RuleError> {
        let map = self
            .conclusion
            .iso_map(target)
            .ok_or_else(|| RuleError::Shape(format!("conclusion `{}` does not match `{}`", self.conclusion, target)))?;
        let inst = reindex(&self.rule, &self.conclusion, target, &map)?;
        let expected = apply_backward(target, &inst, logic)?;
        if expected.len() != self.premises.len() {
            return Err(RuleError::Shape(format!("{} expects {} premises", inst.rule, expected.len())));
        }
        let premises = self
            .premises
            .iter()
            .zip(&expected)
            .map(|(p, e)| p.normalize_to(e, logic))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Proof { conclusion: target.clone(), rule: inst, premises })
    }
}

/// Moves an instance from `from` to `to` along `map`, locating the principal
/// formula by value.
pub(crate) fn reindex(inst: &RuleInstance, from: &NestedSequent, to: &NestedSequent, map: &BTreeMap<Name, Name>) -> Result<RuleInstance, RuleError> {
    let mut out = inst.renamed(map);
    if let Some(Address { side: Side::Ant, .. }) = inst.principal {
        let f = inst.principal_formula(from).ok_or(RuleError::Address(inst.at))?;
        let node = to.find(out.at).ok_or(RuleError::Address(out.at))?;
        let index = node.ant.iter().position(|g| g == f).ok_or(RuleError::Address(out.at))?;
        out.principal = Some(Address::ant(index));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("no principal formula addressed at {0}")]
    Address(Name),
    #[error("principal formula has the wrong shape: {0}")]
    Shape(String),
    #[error("side condition fails: {target} is not reachable from {at} along L({character})")]
    SideCondition { at: Name, target: Name, character: Character },
    #[error("d rule for `{0}` needs a seriality axiom")]
    NotSerial(Character),
    #[error("premise has more than one output formula")]
    SingleOutput,
}

fn principal_of<'a>(g: &'a NestedSequent, inst: &RuleInstance, side: Side) -> Result<&'a Formula, RuleError> {
    match inst.principal {
        Some(a) if a.side == side => inst.principal_formula(g).ok_or(RuleError::Address(inst.at)),
        _ => Err(RuleError::Address(inst.at)),
    }
}

fn shape(rule: RuleId, f: &Formula) -> RuleError {
    RuleError::Shape(format!("{rule} cannot act on `{f}`"))
}

fn check_character(inst: &RuleInstance, x: &Character) -> Result<(), RuleError> {
    match &inst.character {
        Some(c) if c != x => Err(RuleError::Shape(format!("instance character `{c}` differs from `{x}`"))),
        _ => Ok(()),
    }
}

fn with_node(g: &NestedSequent, w: Name, f: impl FnOnce(&mut NestedSequent)) -> NestedSequent {
    let mut h = g.clone();
    f(h.find_mut(w).expect("component exists"));
    h
}

/// Premises of `inst` applied to `g`, read bottom-up.
pub fn apply_backward(g: &NestedSequent, inst: &RuleInstance, logic: &Logic) -> Result<Vec<NestedSequent>, RuleError> {
    let w = inst.at;
    let node = g.find(w).ok_or(RuleError::Address(w))?;
    let idx = inst.principal.map(|a| a.index).unwrap_or(0);
    let premises = match inst.rule {
        RuleId::Id => {
            let f = principal_of(g, inst, Side::Ant)?;
            if !f.is_atom() || node.out.as_ref() != Some(f) {
                return Err(shape(RuleId::Id, f));
            }
            vec![]
        }
        RuleId::BotL => {
            let f = principal_of(g, inst, Side::Ant)?;
            if *f != Formula::Bottom {
                return Err(shape(RuleId::BotL, f));
            }
            vec![]
        }
        RuleId::OrL => {
            let Formula::Or(b, c) = principal_of(g, inst, Side::Ant)? else {
                return Err(shape(RuleId::OrL, principal_of(g, inst, Side::Ant)?));
            };
            vec![
                with_node(g, w, |n| n.ant[idx] = (**b).clone()),
                with_node(g, w, |n| n.ant[idx] = (**c).clone()),
            ]
        }
        RuleId::AndL => {
            let Formula::And(b, c) = principal_of(g, inst, Side::Ant)? else {
                return Err(shape(RuleId::AndL, principal_of(g, inst, Side::Ant)?));
            };
            vec![with_node(g, w, |n| {
                n.ant[idx] = (**b).clone();
                n.ant.insert(idx + 1, (**c).clone());
            })]
        }
        RuleId::OrR1 | RuleId::OrR2 => {
            let Formula::Or(b, c) = principal_of(g, inst, Side::Out)? else {
                return Err(shape(inst.rule, principal_of(g, inst, Side::Out)?));
            };
            let pick = if inst.rule == RuleId::OrR1 { b } else { c };
            vec![with_node(g, w, |n| n.out = Some((**pick).clone()))]
        }
        RuleId::AndR => {
            let Formula::And(b, c) = principal_of(g, inst, Side::Out)? else {
                return Err(shape(RuleId::AndR, principal_of(g, inst, Side::Out)?));
            };
            vec![
                with_node(g, w, |n| n.out = Some((**b).clone())),
                with_node(g, w, |n| n.out = Some((**c).clone())),
            ]
        }
        RuleId::ImpL => {
            let Formula::Imp(b, c) = principal_of(g, inst, Side::Ant)? else {
                return Err(shape(RuleId::ImpL, principal_of(g, inst, Side::Ant)?));
            };
            let left = with_node(&g.strip_output(), w, |n| n.out = Some((**b).clone()));
            let right = with_node(g, w, |n| n.ant.push((**c).clone()));
            vec![left, right]
        }
        RuleId::ImpR => {
            let Formula::Imp(b, c) = principal_of(g, inst, Side::Out)? else {
                return Err(shape(RuleId::ImpR, principal_of(g, inst, Side::Out)?));
            };
            vec![with_node(g, w, |n| {
                n.ant.push((**b).clone());
                n.out = Some((**c).clone());
            })]
        }
        RuleId::DiaRProp | RuleId::BoxLProp => {
            let side = if inst.rule == RuleId::DiaRProp { Side::Out } else { Side::Ant };
            let f = principal_of(g, inst, side)?;
            let (x, b) = match (inst.rule, f) {
                (RuleId::DiaRProp, Formula::Dia(x, b)) | (RuleId::BoxLProp, Formula::Box(x, b)) => (x, b),
                _ => return Err(shape(inst.rule, f)),
            };
            check_character(inst, x)?;
            let u = inst.target.ok_or(RuleError::Address(w))?;
            if !g.contains(u) {
                return Err(RuleError::Address(u));
            }
            let reach = Reachability::compute(&logic.grammar, &g.propagation_graph());
            if !reach.holds(w, x, u) {
                return Err(RuleError::SideCondition { at: w, target: u, character: x.clone() });
            }
            if inst.rule == RuleId::DiaRProp {
                let mut h = with_node(g, w, |n| n.out = None);
                h.find_mut(u).expect("target exists").out = Some((**b).clone());
                vec![h]
            } else {
                vec![with_node(g, u, |n| n.ant.push((**b).clone()))]
            }
        }
        RuleId::DiaL => {
            let Formula::Dia(x, b) = principal_of(g, inst, Side::Ant)? else {
                return Err(shape(RuleId::DiaL, principal_of(g, inst, Side::Ant)?));
            };
            check_character(inst, x)?;
            let fresh = g.fresh_name();
            vec![with_node(g, w, |n| {
                n.ant.remove(idx);
                n.children.push((x.clone(), NestedSequent::leaf(fresh, vec![(**b).clone()], None)));
            })]
        }
        RuleId::BoxR => {
            let Formula::Box(x, b) = principal_of(g, inst, Side::Out)? else {
                return Err(shape(RuleId::BoxR, principal_of(g, inst, Side::Out)?));
            };
            check_character(inst, x)?;
            let fresh = g.fresh_name();
            vec![with_node(g, w, |n| {
                n.out = None;
                n.children.push((x.clone(), NestedSequent::leaf(fresh, vec![], Some((**b).clone()))));
            })]
        }
        RuleId::DX => {
            let x = inst.character.clone().ok_or(RuleError::Address(w))?;
            if !logic.is_serial(&x) {
                return Err(RuleError::NotSerial(x));
            }
            let fresh = g.fresh_name();
            vec![with_node(g, w, |n| n.children.push((x.clone(), NestedSequent::leaf(fresh, vec![], None))))]
        }
    };
    if premises.iter().any(|p| p.output_count() > 1) {
        return Err(RuleError::SingleOutput);
    }
    Ok(premises)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at node {path:?} ({rule}): {reason}")]
pub struct CheckError {
    /// Premise indices from the root.
    pub path: Vec<usize>,
    pub rule: RuleId,
    pub reason: String,
}

/// Re-derives every inference, including reachability side conditions.
pub fn check_proof(p: &Proof, logic: &Logic) -> Result<(), CheckError> {
    check_at(p, logic, &mut Vec::new())
}

fn check_at(p: &Proof, logic: &Logic, path: &mut Vec<usize>) -> Result<(), CheckError> {
    let fail = |reason: String, path: &Vec<usize>| CheckError { path: path.clone(), rule: p.rule.rule, reason };
    p.conclusion.validate().map_err(|e| fail(e.to_string(), path))?;
    let expected = apply_backward(&p.conclusion, &p.rule, logic).map_err(|e| fail(e.to_string(), path))?;
    if expected.len() != p.premises.len() {
        return Err(fail(format!("expected {} premises, found {}", expected.len(), p.premises.len()), path));
    }
    for (i, (q, e)) in p.premises.iter().zip(&expected).enumerate() {
        if q.conclusion.output_count() > 1 {
            return Err(fail(format!("premise {i} has more than one output formula"), path));
        }
        if !q.conclusion.canon_eq(e) {
            return Err(fail(format!("premise {i} is `{}`, rule yields `{}`", q.conclusion, e), path));
        }
        path.push(i);
        check_at(q, logic, path)?;
        path.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::grammar::AxiomSet;

    fn s(t: &str) -> NestedSequent {
        NestedSequent::parse(t).unwrap()
    }

    #[test]
    fn imp_rules() {
        let logic = Logic::base();
        let g = s("r => p -> q");
        let ps = apply_backward(&g, &RuleInstance::on_out(RuleId::ImpR, Name(0)), &logic).unwrap();
        assert!(ps[0].canon_eq(&s("r, p => q")));
        let h = s("p -> q => r, (a)[- => -]");
        let ps = apply_backward(&h, &RuleInstance::on_ant(RuleId::ImpL, Name(0), 0), &logic).unwrap();
        assert!(ps[0].canon_eq(&s("p -> q => p, (a)[- => -]")));
        assert!(ps[1].canon_eq(&s("p -> q, q => r, (a)[- => -]")));
    }

    #[test]
    fn propagation_side_condition() {
        let logic = Logic::base();
        let g = s("[a]p => -, (b)[- => p]");
        let inst = RuleInstance::propagate(RuleId::BoxLProp, Name(0), Address::ant(0), Name(1), Character::forward("a"));
        assert!(matches!(apply_backward(&g, &inst, &logic), Err(RuleError::SideCondition { .. })));
        let ok = s("[a]p => -, (a)[- => p]");
        let ps = apply_backward(&ok, &inst, &logic).unwrap();
        assert!(ps[0].canon_eq(&s("[a]p => -, (a)[p => p]")));
    }

    #[test]
    fn example_box_propagation() {
        let ax = AxiomSet::empty().with_path(Character::forward("z"), vec![Character::forward("y"), Character::backward("x")]);
        let logic = Logic::new(ax).unwrap();
        let g = s("r => -, (x)[q => -, (y^)[[z]p => s]]");
        let inst = RuleInstance::propagate(RuleId::BoxLProp, Name(2), Address::ant(0), Name(0), Character::forward("z"));
        let ps = apply_backward(&g, &inst, &logic).unwrap();
        assert!(ps[0].canon_eq(&s("r, p => -, (x)[q => -, (y^)[[z]p => s]]")));
    }

    #[test]
    fn checker_rejects_bad_premise() {
        let logic = Logic::base();
        let conc = s("p & q => p");
        let bad = Proof {
            conclusion: conc.clone(),
            rule: RuleInstance::on_ant(RuleId::AndL, Name(0), 0),
            premises: vec![Proof::leaf(s("q => p"), RuleInstance::on_ant(RuleId::Id, Name(0), 0))],
        };
        assert!(check_proof(&bad, &logic).is_err());
        let good = Proof {
            conclusion: conc,
            rule: RuleInstance::on_ant(RuleId::AndL, Name(0), 0),
            premises: vec![Proof::leaf(s("p, q => p"), RuleInstance::on_ant(RuleId::Id, Name(0), 0))],
        };
        check_proof(&good, &logic).unwrap();
        assert_eq!(good.height(), 1);
        let _ = parse_formula("p").unwrap();
    }
}
