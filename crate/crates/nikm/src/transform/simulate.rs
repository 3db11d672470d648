//! Replays a proof of `G` on a target `T` through a component map `phi`.
//!
//! The target must cover the source: every tree edge `(u, x, v)` of `G` maps
//! to an `L(x)`-path from `phi(u)` to `phi(v)` in `T`, every antecedent
//! formula at `w` is present at `phi(w)` (or is covered by an obligation), and
//! the output of `G` sits at the image of its component unless it is absent
//! or `false`. Obligations record that a formula has already been decomposed
//! in the target; when the source decomposes it again the step is skipped.
//! The result never grows in height.

use std::collections::BTreeMap;

use super::TransformError;
use crate::calculus::{apply_backward, Address, Proof, RuleId, RuleInstance, Side};
use crate::formula::Formula;
use crate::grammar::{Logic, Reachability};
use crate::sequent::{Name, NestedSequent};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Decomp {
    And,
    Or(usize),
    /// The child of the target component holding the body.
    Dia(Name),
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Obligations(Vec<(Name, Formula, Decomp)>);

impl Obligations {
    pub(crate) fn one(at: Name, f: Formula, d: Decomp) -> Self {
        Obligations(vec![(at, f, d)])
    }

    fn find(&self, at: Name, f: &Formula) -> Option<&Decomp> {
        self.0.iter().find(|(n, g, _)| *n == at && g == f).map(|(_, _, d)| d)
    }

    fn with(&self, at: Name, f: Formula, d: Decomp) -> Self {
        let mut v = self.0.clone();
        v.push((at, f, d));
        Obligations(v)
    }
}

pub(crate) fn identity(g: &NestedSequent) -> BTreeMap<Name, Name> {
    g.names().into_iter().map(|n| (n, n)).collect()
}

pub(crate) fn simulate(p: &Proof, target: &NestedSequent, phi: &BTreeMap<Name, Name>, obl: &Obligations, logic: &Logic) -> Result<Proof, TransformError> {
    check_cover(&p.conclusion, target, phi, obl, logic)?;
    step(p, target, phi, obl, logic)
}

/// Replays `p` on `target` with the identity map.
pub(crate) fn embed(p: &Proof, target: &NestedSequent, logic: &Logic) -> Result<Proof, TransformError> {
    simulate(p, target, &identity(&p.conclusion), &Obligations::default(), logic)
}

fn image(phi: &BTreeMap<Name, Name>, w: Name) -> Result<Name, TransformError> {
    phi.get(&w).copied().ok_or_else(|| TransformError::Cover(format!("{w} has no image")))
}

fn covered(f: &Formula, at: Name, t: &NestedSequent, obl: &Obligations) -> bool {
    let Some(node) = t.find(at) else { return false };
    if node.ant.contains(f) {
        return true;
    }
    match (f, obl.find(at, f)) {
        (Formula::And(b, c), Some(Decomp::And)) => covered(b, at, t, obl) && covered(c, at, t, obl),
        (Formula::Or(b, _), Some(Decomp::Or(0))) => covered(b, at, t, obl),
        (Formula::Or(_, c), Some(Decomp::Or(1))) => covered(c, at, t, obl),
        (Formula::Dia(x, b), Some(Decomp::Dia(child))) => {
            node.children.iter().any(|(y, c)| y == x && c.name == *child) && covered(b, *child, t, obl)
        }
        _ => false,
    }
}

fn check_cover(g: &NestedSequent, t: &NestedSequent, phi: &BTreeMap<Name, Name>, obl: &Obligations, logic: &Logic) -> Result<(), TransformError> {
    for n in g.names() {
        let m = image(phi, n)?;
        if !t.contains(m) {
            return Err(TransformError::Cover(format!("image {m} of {n} is not in the target")));
        }
    }
    let reach = Reachability::compute(&logic.grammar, &t.propagation_graph());
    for (u, x, v) in g.tree_edges() {
        if !reach.holds(phi[&u], &x, phi[&v]) {
            return Err(TransformError::Cover(format!("edge {u} -{x}-> {v} has no L({x})-path between {} and {}", phi[&u], phi[&v])));
        }
    }
    for n in g.nodes() {
        for f in &n.ant {
            if !covered(f, phi[&n.name], t, obl) {
                return Err(TransformError::Cover(format!("`{f}` at {} is missing at {}", n.name, phi[&n.name])));
            }
        }
    }
    if let Some((w, a)) = g.output() {
        if *a != Formula::Bottom && t.output() != Some((phi[&w], a)) {
            return Err(TransformError::Cover(format!("output `{a}` at {w} is not the target output")));
        }
    }
    Ok(())
}

fn new_child(g: &NestedSequent, premise: &Proof) -> Result<Name, TransformError> {
    premise
        .conclusion
        .names()
        .into_iter()
        .find(|n| !g.contains(*n))
        .ok_or_else(|| TransformError::Shape("premise has no fresh component".into()))
}

fn step(p: &Proof, t: &NestedSequent, phi: &BTreeMap<Name, Name>, obl: &Obligations, logic: &Logic) -> Result<Proof, TransformError> {
    let g = &p.conclusion;
    let inst = &p.rule;
    let tw = image(phi, inst.at)?;
    let principal = inst.principal_formula(g).cloned();
    let ant_index = |f: &Formula| -> Result<usize, TransformError> {
        t.find(tw)
            .and_then(|n| n.ant.iter().position(|h| h == f))
            .ok_or_else(|| TransformError::Cover(format!("`{f}` missing at {tw}")))
    };
    let mut phi2 = phi.clone();
    let mut obls = vec![obl.clone(); p.premises.len()];
    let inst2 = match inst.rule {
        RuleId::AndL | RuleId::OrL | RuleId::DiaL => {
            let f = principal.ok_or(TransformError::Shape("missing principal formula".into()))?;
            if let Some(d) = obl.find(tw, &f) {
                let i = match (inst.rule, d) {
                    (RuleId::AndL, Decomp::And) => 0,
                    (RuleId::OrL, Decomp::Or(b)) => *b,
                    (RuleId::DiaL, Decomp::Dia(c)) => {
                        phi2.insert(new_child(g, &p.premises[0])?, *c);
                        0
                    }
                    _ => return Err(TransformError::Shape(format!("obligation does not match {}", inst.rule))),
                };
                return step(&p.premises[i], t, &phi2, obl, logic);
            }
            let inst2 = RuleInstance { at: tw, principal: Some(Address::ant(ant_index(&f)?)), target: None, witness: None, ..inst.clone() };
            match inst.rule {
                RuleId::AndL => obls[0] = obl.with(tw, f, Decomp::And),
                RuleId::OrL => {
                    for (b, o) in obls.iter_mut().enumerate() {
                        *o = obl.with(tw, f.clone(), Decomp::Or(b));
                    }
                }
                _ => {
                    let c = t.fresh_name();
                    phi2.insert(new_child(g, &p.premises[0])?, c);
                    obls[0] = obl.with(tw, f, Decomp::Dia(c));
                }
            }
            inst2
        }
        RuleId::Id | RuleId::BotL | RuleId::ImpL | RuleId::BoxLProp => {
            let f = principal.ok_or(TransformError::Shape("missing principal formula".into()))?;
            let target = inst.target.map(|u| image(phi, u)).transpose()?;
            RuleInstance { at: tw, principal: Some(Address::ant(ant_index(&f)?)), target, witness: None, ..inst.clone() }
        }
        RuleId::OrR1 | RuleId::OrR2 | RuleId::AndR | RuleId::ImpR | RuleId::DiaRProp | RuleId::BoxR => {
            let f = principal.ok_or(TransformError::Shape("missing principal formula".into()))?;
            if t.output() != Some((tw, &f)) {
                return Err(TransformError::Cover(format!("target output is not `{f}` at {tw}")));
            }
            if inst.rule == RuleId::BoxR {
                phi2.insert(new_child(g, &p.premises[0])?, t.fresh_name());
            }
            let target = inst.target.map(|u| image(phi, u)).transpose()?;
            RuleInstance { at: tw, principal: Some(Address { side: Side::Out, index: 0 }), target, witness: None, ..inst.clone() }
        }
        RuleId::DX => {
            phi2.insert(new_child(g, &p.premises[0])?, t.fresh_name());
            RuleInstance { at: tw, witness: None, ..inst.clone() }
        }
    };
    let ts = apply_backward(t, &inst2, logic)?;
    let premises = p
        .premises
        .iter()
        .zip(&ts)
        .zip(&obls)
        .map(|((q, tq), o)| step(q, tq, &phi2, o, logic))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Proof { conclusion: t.clone(), rule: inst2, premises })
}
