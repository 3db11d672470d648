//! Cut elimination. `cut(L, R)` takes a proof `L` of `G↓{Γ ⊢ A}` and a proof
//! `R` of `G{Γ, A ⊢ Δ}` and returns a proof of `G{Γ ⊢ Δ}`. Cases are tried
//! in order: initial rules, `L` not principal, `R` not principal, principal
//! reductions. Every recursive call is checked against the lexicographic
//! measure (length of the cut formula, sum of heights).

use super::simulate::embed;
use super::{invert, shape, shift, transfer, TransformError};
use crate::calculus::{apply_backward, Proof, RuleId, RuleInstance};
use crate::formula::Formula;
use crate::grammar::Logic;
use crate::sequent::{Name, NestedSequent};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CutStats {
    pub calls: usize,
    pub max_depth: usize,
    /// Recursive calls whose measure did not strictly decrease.
    pub measure_violations: usize,
}

/// A cut-free proof of `right`'s conclusion with one `cut_formula` removed
/// at `cut_at`.
pub fn eliminate_cut(left: &Proof, right: &Proof, cut_at: Name, cut_formula: &Formula, logic: &Logic) -> Result<Proof, TransformError> {
    eliminate_cut_monitored(left, right, cut_at, cut_formula, logic).map(|(p, _)| p)
}

pub fn eliminate_cut_monitored(
    left: &Proof,
    right: &Proof,
    cut_at: Name,
    cut_formula: &Formula,
    logic: &Logic,
) -> Result<(Proof, CutStats), TransformError> {
    let mut gc = right.conclusion.clone();
    let node = gc.find_mut(cut_at).ok_or_else(|| shape(format!("no component {cut_at}")))?;
    let i = node.ant.iter().rposition(|f| f == cut_formula).ok_or_else(|| shape(format!("`{cut_formula}` is not in the antecedent of {cut_at}")))?;
    node.ant.remove(i);
    if !left.conclusion.canon_eq(&with_output(&gc, cut_at, cut_formula)) {
        return Err(shape(format!("left conclusion `{}` does not match the context of `{}`", left.conclusion, right.conclusion)));
    }
    let mut c = Cutter { logic, stats: CutStats::default(), stack: Vec::new() };
    let p = c.cut(left, right, &gc, cut_at, cut_formula)?;
    Ok((p, c.stats))
}

fn with_output(g: &NestedSequent, w: Name, a: &Formula) -> NestedSequent {
    let mut h = g.strip_output();
    h.find_mut(w).expect("component exists").out = Some(a.clone());
    h
}

fn with_ant(g: &NestedSequent, w: Name, a: &Formula) -> NestedSequent {
    let mut h = g.clone();
    h.find_mut(w).expect("component exists").ant.push(a.clone());
    h
}

fn align(p: &Proof, target: &NestedSequent, logic: &Logic) -> Result<Proof, TransformError> {
    if p.conclusion == *target {
        Ok(p.clone())
    } else {
        Ok(p.normalize_to(target, logic)?)
    }
}

fn fresh_in(parent: &NestedSequent, premise: &Proof) -> Result<Name, TransformError> {
    premise.conclusion.names().into_iter().find(|n| !parent.contains(*n)).ok_or_else(|| shape("premise has no fresh component"))
}

fn leaf(g: &NestedSequent, rule: RuleId, at: Name, f: &Formula) -> Option<Proof> {
    let i = g.find(at)?.ant.iter().position(|h| h == f)?;
    Some(Proof::leaf(g.clone(), RuleInstance::on_ant(rule, at, i)))
}

struct Cutter<'a> {
    logic: &'a Logic,
    stats: CutStats,
    stack: Vec<(usize, usize)>,
}

impl Cutter<'_> {
    fn cut(&mut self, l: &Proof, r: &Proof, gc: &NestedSequent, w: Name, a: &Formula) -> Result<Proof, TransformError> {
        let l = align(l, &with_output(gc, w, a), self.logic)?;
        let r = align(r, &with_ant(gc, w, a), self.logic)?;
        let measure = (a.length(), l.height() + r.height());
        if self.stack.last().is_some_and(|top| measure >= *top) {
            self.stats.measure_violations += 1;
        }
        self.stack.push(measure);
        self.stats.calls += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.stack.len());
        let out = self.cases(&l, &r, gc, w, a);
        self.stack.pop();
        out
    }

    fn cases(&mut self, l: &Proof, r: &Proof, gc: &NestedSequent, w: Name, a: &Formula) -> Result<Proof, TransformError> {
        let logic = self.logic;
        match l.rule.rule {
            // The cut atom is already in the antecedent: contract.
            RuleId::Id => return embed(r, gc, logic),
            RuleId::BotL => {
                return leaf(gc, RuleId::BotL, l.rule.at, &Formula::Bottom).ok_or_else(|| shape("lost `false` in the antecedent"));
            }
            _ => {}
        }
        match r.rule.rule {
            RuleId::Id => {
                let (u, p) = r.conclusion.output().expect("id has an output");
                if let Some(leaf) = leaf(gc, RuleId::Id, u, p) {
                    return Ok(leaf);
                }
                return align(l, gc, logic);
            }
            RuleId::BotL => {
                if let Some(leaf) = leaf(gc, RuleId::BotL, r.rule.at, &Formula::Bottom) {
                    return Ok(leaf);
                }
                return embed(l, gc, logic);
            }
            _ => {}
        }
        if !l.rule.rule.is_right() {
            return self.left_permute(l, r, gc, w, a);
        }
        let r_principal = r.rule.at == w && r.rule.rule.is_left() && r.rule.principal_formula(&r.conclusion) == Some(a);
        if !r_principal {
            return self.right_permute(l, r, gc, w, a);
        }
        self.principal(l, r, gc, w, a)
    }

    /// The last rule of `L` acts on the context: apply it to the cut
    /// conclusion and push the cut into its premises.
    fn left_permute(&mut self, l: &Proof, r: &Proof, gc: &NestedSequent, w: Name, a: &Formula) -> Result<Proof, TransformError> {
        let logic = self.logic;
        let inst = transfer(&l.rule, &l.conclusion, gc)?;
        let qs = apply_backward(gc, &inst, logic)?;
        let mut premises = Vec::new();
        if inst.rule == RuleId::ImpL {
            premises.push(align(&l.premises[0], &qs[0], logic)?);
            let r2 = embed(r, &with_ant(&qs[1], w, a), logic)?;
            premises.push(self.cut(&l.premises[1], &r2, &qs[1], w, a)?);
        } else {
            let inst_r = transfer(&l.rule, &l.conclusion, &r.conclusion)?;
            for (i, q) in qs.iter().enumerate() {
                let ri = invert(r, &inst_r, i, logic)?;
                premises.push(self.cut(&l.premises[i], &ri, q, w, a)?);
            }
        }
        Ok(Proof { conclusion: gc.clone(), rule: inst, premises })
    }

    /// `L` is principal but the last rule of `R` acts elsewhere: adapt `L` to
    /// each premise of that rule and cut there.
    fn right_permute(&mut self, l: &Proof, r: &Proof, gc: &NestedSequent, w: Name, a: &Formula) -> Result<Proof, TransformError> {
        let logic = self.logic;
        let inst = transfer(&r.rule, &r.conclusion, gc)?;
        let qs = apply_backward(gc, &inst, logic)?;
        let mut premises = Vec::new();
        for (i, q) in qs.iter().enumerate() {
            let li = match inst.rule {
                RuleId::AndL | RuleId::OrL | RuleId::DiaL => {
                    let inst_l = transfer(&r.rule, &r.conclusion, &l.conclusion)?;
                    invert(l, &inst_l, i, logic)?
                }
                _ => embed(l, &with_output(q, w, a), logic)?,
            };
            premises.push(self.cut(&li, &r.premises[i], q, w, a)?);
        }
        Ok(Proof { conclusion: gc.clone(), rule: inst, premises })
    }

    fn principal(&mut self, l: &Proof, r: &Proof, gc: &NestedSequent, w: Name, a: &Formula) -> Result<Proof, TransformError> {
        let logic = self.logic;
        match (a, l.rule.rule, r.rule.rule) {
            (Formula::And(b, c), RuleId::AndR, RuleId::AndL) => {
                let g1 = with_ant(gc, w, c);
                let l1 = embed(&l.premises[0], &with_output(&g1, w, b), logic)?;
                let x = self.cut(&l1, &r.premises[0], &g1, w, b)?;
                self.cut(&l.premises[1], &x, gc, w, c)
            }
            (Formula::Or(b, c), RuleId::OrR1 | RuleId::OrR2, RuleId::OrL) => {
                let (i, part) = if l.rule.rule == RuleId::OrR1 { (0, b) } else { (1, c) };
                self.cut(&l.premises[0], &r.premises[i], gc, w, part)
            }
            (Formula::Imp(b, c), RuleId::ImpR, RuleId::ImpL) => {
                // Remove the implication from both premises of impL first.
                let g1 = with_output(gc, w, b);
                let r1 = self.cut(l, &r.premises[0], &g1, w, a)?;
                let g2 = with_ant(gc, w, c);
                let l2 = embed(l, &with_output(&g2, w, a), logic)?;
                let r2 = self.cut(&l2, &r.premises[1], &g2, w, a)?;
                let g3 = with_output(gc, w, c);
                let x = self.cut(&r1, &l.premises[0], &g3, w, b)?;
                self.cut(&x, &r2, gc, w, c)
            }
            (Formula::Box(_, b), RuleId::BoxR, RuleId::BoxLProp) => {
                let u = r.rule.target.ok_or_else(|| shape("boxLprop without target"))?;
                let g1 = with_ant(gc, u, b);
                let lw = embed(l, &with_output(&g1, w, a), logic)?;
                let r1 = self.cut(&lw, &r.premises[0], &g1, w, a)?;
                let f = fresh_in(&l.conclusion, &l.premises[0])?;
                let ls = shift(&l.premises[0], w, f, u, logic)?;
                self.cut(&ls, &r1, gc, u, b)
            }
            (Formula::Dia(_, b), RuleId::DiaRProp, RuleId::DiaL) => {
                let u = l.rule.target.ok_or_else(|| shape("diaRprop without target"))?;
                let f = fresh_in(&r.conclusion, &r.premises[0])?;
                let rs = shift(&r.premises[0], w, f, u, logic)?;
                self.cut(&l.premises[0], &rs, gc, u, b)
            }
            (_, lr, rr) => Err(shape(format!("no principal reduction for {lr} against {rr} on `{a}`"))),
        }
    }
}
