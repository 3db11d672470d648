//! Bounded backward proof search.
//!
//! Invertible rules are applied eagerly. Disjunction choice on the right,
//! diamond propagation targets, and left implication are the only choice
//! points, and they are bounded by iterative deepening on their count.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::calculus::{apply_backward, Address, Proof, RuleId, RuleInstance};
use crate::formula::{Character, Formula};
use crate::grammar::{Logic, Reachability};
use crate::sequent::{Canon, Name, NestedSequent, SequentError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Choice points (right disjunction, diamond target, left implication)
    /// allowed along a branch.
    pub max_noninvertible: usize,
    /// Times one box formula may be propagated to one target on a branch.
    pub max_propagations_per_pair: usize,
    /// Components created by diaL, boxR and dX along a branch.
    pub max_new_components: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_noninvertible: 12, max_propagations_per_pair: 1, max_new_components: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    /// Not a disproof.
    #[error("no proof within budget")]
    NoProofWithinBudget,
    #[error(transparent)]
    Input(#[from] SequentError),
}

#[derive(Clone, Default)]
struct Branch {
    fresh_used: usize,
    props: BTreeMap<(Name, Formula, Name), usize>,
    serial_done: BTreeSet<(Name, Character)>,
    ancestors: Vec<Canon>,
}

struct Searcher<'a> {
    logic: &'a Logic,
    budget: SearchBudget,
    failed: HashSet<(Canon, usize, usize)>,
}

struct Outcome {
    proof: Option<Proof>,
    /// The failure depended on the ancestor loop check and must not be memoized.
    looped: bool,
}

impl Outcome {
    fn found(p: Proof) -> Self {
        Outcome { proof: Some(p), looped: false }
    }
}

pub fn prove(g: &NestedSequent, logic: &Logic, budget: SearchBudget) -> Result<Proof, SearchError> {
    g.validate()?;
    let mut s = Searcher { logic, budget, failed: HashSet::new() };
    for k in 0..=budget.max_noninvertible {
        if let Some(p) = s.solve(g, k, Branch::default()).proof {
            return Ok(p);
        }
    }
    Err(SearchError::NoProofWithinBudget)
}

/// Proves the formula as the single-component sequent `=> a`.
pub fn prove_formula(a: &Formula, logic: &Logic, budget: SearchBudget) -> Result<Proof, SearchError> {
    prove(&NestedSequent::flat(vec![], Some(a.clone())), logic, budget)
}

fn node_step(g: &NestedSequent, inst: RuleInstance, premises: Vec<Proof>) -> Proof {
    Proof { conclusion: g.clone(), rule: inst, premises }
}

impl<'a> Searcher<'a> {
    fn premises(&self, g: &NestedSequent, inst: &RuleInstance) -> Vec<NestedSequent> {
        apply_backward(g, inst, self.logic).expect("search only builds applicable instances")
    }

    fn solve(&mut self, g: &NestedSequent, k: usize, mut br: Branch) -> Outcome {
        if let Some(leaf) = initial(g) {
            return Outcome::found(leaf);
        }
        let canon = g.canon();
        let fresh_left = self.budget.max_new_components.saturating_sub(br.fresh_used);
        if self.failed.contains(&(canon.clone(), k, fresh_left)) {
            return Outcome { proof: None, looped: false };
        }
        if br.ancestors.contains(&canon) {
            return Outcome { proof: None, looped: true };
        }
        br.ancestors.push(canon.clone());
        let out = self.expand(g, k, br);
        if out.proof.is_none() && !out.looped {
            self.failed.insert((canon, k, fresh_left));
        }
        out
    }

    fn unary(&mut self, g: &NestedSequent, inst: RuleInstance, k: usize, br: Branch) -> Outcome {
        let ps = self.premises(g, &inst);
        let o = self.solve(&ps[0], k, br);
        Outcome { proof: o.proof.map(|p| node_step(g, inst, vec![p])), looped: o.looped }
    }

    fn binary(&mut self, g: &NestedSequent, inst: RuleInstance, k: usize, br: Branch) -> Outcome {
        let ps = self.premises(g, &inst);
        let a = self.solve(&ps[0], k, br.clone());
        let Some(pa) = a.proof else { return a };
        let b = self.solve(&ps[1], k, br);
        let looped = a.looped || b.looped;
        Outcome { proof: b.proof.map(|pb| node_step(g, inst, vec![pa, pb])), looped }
    }

    fn expand(&mut self, g: &NestedSequent, k: usize, mut br: Branch) -> Outcome {
        let can_fresh = br.fresh_used < self.budget.max_new_components;

        // Invertible left rules, in preorder and antecedent order.
        for n in g.nodes() {
            for (i, f) in n.ant.iter().enumerate() {
                match f {
                    Formula::And(..) => return self.unary(g, RuleInstance::on_ant(RuleId::AndL, n.name, i), k, br),
                    Formula::Or(..) => return self.binary(g, RuleInstance::on_ant(RuleId::OrL, n.name, i), k, br),
                    Formula::Dia(..) if can_fresh => {
                        br.fresh_used += 1;
                        return self.unary(g, RuleInstance::on_ant(RuleId::DiaL, n.name, i), k, br);
                    }
                    _ => {}
                }
            }
        }

        // Invertible right rules on the output.
        if let Some((w, f)) = g.output() {
            match f {
                Formula::Imp(..) => return self.unary(g, RuleInstance::on_out(RuleId::ImpR, w), k, br),
                Formula::And(..) => return self.binary(g, RuleInstance::on_out(RuleId::AndR, w), k, br),
                Formula::Box(..) if can_fresh => {
                    br.fresh_used += 1;
                    return self.unary(g, RuleInstance::on_out(RuleId::BoxR, w), k, br);
                }
                _ => {}
            }
        }

        // Box propagation, blocked when the formula is already present.
        let reach = Reachability::compute(&self.logic.grammar, &g.propagation_graph());
        for n in g.nodes() {
            for (i, f) in n.ant.iter().enumerate() {
                let Formula::Box(x, a) = f else { continue };
                for u in reach.reach(n.name, x) {
                    let key = (n.name, f.clone(), u);
                    let used = br.props.get(&key).copied().unwrap_or(0);
                    let present = g.find(u).is_some_and(|c| c.ant.contains(a));
                    if present || used >= self.budget.max_propagations_per_pair {
                        continue;
                    }
                    br.props.insert(key, used + 1);
                    let inst = RuleInstance::propagate(RuleId::BoxLProp, n.name, Address::ant(i), u, x.clone());
                    return self.unary(g, inst, k, br);
                }
            }
        }

        // Seriality, once per component and character, only when some
        // modal formula could use the new child.
        if can_fresh && !self.logic.axioms.serial.is_empty() && has_modal_demand(g) {
            for n in g.nodes() {
                for x in &self.logic.axioms.serial {
                    if br.serial_done.contains(&(n.name, x.clone())) || !reach.reach(n.name, x).is_empty() {
                        continue;
                    }
                    br.serial_done.insert((n.name, x.clone()));
                    br.fresh_used += 1;
                    return self.unary(g, RuleInstance::serial(n.name, x.clone()), k, br);
                }
            }
        }

        if k == 0 {
            return Outcome { proof: None, looped: false };
        }
        let mut looped = false;
        let mut attempt = |s: &mut Self, inst: RuleInstance, br: &Branch| -> Option<Proof> {
            let o = if inst.rule == RuleId::ImpL { s.binary(g, inst, k - 1, br.clone()) } else { s.unary(g, inst, k - 1, br.clone()) };
            looped |= o.looped;
            o.proof
        };

        if let Some((w, f)) = g.output() {
            match f {
                Formula::Or(..) => {
                    for r in [RuleId::OrR1, RuleId::OrR2] {
                        if let Some(p) = attempt(self, RuleInstance::on_out(r, w), &br) {
                            return Outcome::found(p);
                        }
                    }
                }
                Formula::Dia(x, _) => {
                    for u in reach.reach(w, x) {
                        let inst = RuleInstance::propagate(RuleId::DiaRProp, w, Address::out(), u, x.clone());
                        if let Some(p) = attempt(self, inst, &br) {
                            return Outcome::found(p);
                        }
                    }
                }
                _ => {}
            }
        }

        for n in g.nodes() {
            for (i, f) in n.ant.iter().enumerate() {
                let Formula::Imp(_, b) = f else { continue };
                if n.ant.contains(b) || n.ant.iter().take(i).any(|e| e == f) {
                    continue;
                }
                if let Some(p) = attempt(self, RuleInstance::on_ant(RuleId::ImpL, n.name, i), &br) {
                    return Outcome::found(p);
                }
            }
        }
        Outcome { proof: None, looped }
    }
}

/// An id or botL leaf closing `g`, if any.
fn initial(g: &NestedSequent) -> Option<Proof> {
    for n in g.nodes() {
        if let Some(i) = n.ant.iter().position(|f| *f == Formula::Bottom) {
            return Some(Proof::leaf(g.clone(), RuleInstance::on_ant(RuleId::BotL, n.name, i)));
        }
    }
    let (w, out) = g.output()?;
    if !out.is_atom() {
        return None;
    }
    let node = g.find(w)?;
    let i = node.ant.iter().position(|f| f == out)?;
    Some(Proof::leaf(g.clone(), RuleInstance::on_ant(RuleId::Id, w, i)))
}

fn has_modal_demand(g: &NestedSequent) -> bool {
    let boxes = g.nodes().iter().any(|n| n.ant.iter().any(|f| matches!(f, Formula::Box(..))));
    boxes || matches!(g.output(), Some((_, Formula::Dia(..))))
}
