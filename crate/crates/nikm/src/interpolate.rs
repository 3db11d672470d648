//! Lyndon interpolation by replaying a proof in the biased calculus.
//!
//! Every antecedent formula of a proof node is assigned to the left or the
//! right part; the output always belongs to the right part. Replaying the
//! proof computes an interpolant (a set of `name: formula` pairs) at every
//! node, and the side proofs for each pair are assembled bottom-up from the
//! side proofs of the premises. Where no assembly applies, the side proof is
//! found by bounded search and counted as a fallback.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::calculus::{apply_backward, check_proof, Address, CheckError, Proof, RuleError, RuleId, RuleInstance, Side};
use crate::formula::{signature, Character, Formula, Polarity};
use crate::grammar::Logic;
use crate::search::{prove, SearchBudget};
use crate::sequent::{Name, NestedSequent};
use crate::transform::{embed, TransformError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Left,
    Right,
}

impl Part {
    pub fn flip(self) -> Part {
        match self {
            Part::Left => Part::Right,
            Part::Right => Part::Left,
        }
    }
}

/// For each component, the part of each antecedent formula, in order.
pub type Bias = BTreeMap<Name, Vec<Part>>;

/// Every antecedent formula of `g` in part `part`.
pub fn uniform_bias(g: &NestedSequent, part: Part) -> Bias {
    g.nodes().into_iter().map(|n| (n.name, vec![part; n.ant.len()])).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpolationError {
    #[error("bias does not fit the sequent: {0}")]
    Bias(String),
    #[error("expected a proof of `=> A -> B` ending in impR, found {0}")]
    NotAnImplication(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("no side proof of `{0}` within budget")]
    SideProof(String),
    #[error("side proof rejected: {0}")]
    Check(#[from] CheckError),
    #[error("signature containment fails: {0}")]
    Signature(String),
}

type Result<T> = std::result::Result<T, InterpolationError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiasedSequent {
    pub name: Name,
    pub left_antecedent: Vec<Formula>,
    pub right_antecedent: Vec<Formula>,
    pub consequent: Option<Formula>,
    pub children: Vec<(Character, BiasedSequent)>,
}

impl BiasedSequent {
    pub fn from_sequent(g: &NestedSequent, bias: &Bias) -> Result<Self> {
        let parts = bias.get(&g.name).filter(|m| m.len() == g.ant.len()).ok_or_else(|| InterpolationError::Bias(format!("component {}", g.name)))?;
        let pick = |p: Part| g.ant.iter().zip(parts).filter(|(_, q)| **q == p).map(|(f, _)| f.clone()).collect();
        Ok(BiasedSequent {
            name: g.name,
            left_antecedent: pick(Part::Left),
            right_antecedent: pick(Part::Right),
            consequent: g.out.clone(),
            children: g.children.iter().map(|(x, c)| Ok((x.clone(), BiasedSequent::from_sequent(c, bias)?))).collect::<Result<_>>()?,
        })
    }

    /// The underlying sequent together with its bias.
    pub fn forget(&self) -> (NestedSequent, Bias) {
        let mut bias = Bias::new();
        let g = self.forget_into(&mut bias);
        (g, bias)
    }

    fn forget_into(&self, bias: &mut Bias) -> NestedSequent {
        let mut ant = self.left_antecedent.clone();
        ant.extend(self.right_antecedent.iter().cloned());
        let mut parts = vec![Part::Left; self.left_antecedent.len()];
        parts.extend(vec![Part::Right; self.right_antecedent.len()]);
        bias.insert(self.name, parts);
        NestedSequent { name: self.name, ant, out: self.consequent.clone(), children: self.children.iter().map(|(x, c)| (x.clone(), c.forget_into(bias))).collect() }
    }

    /// Left antecedents only, without output.
    pub fn left_part(&self) -> NestedSequent {
        NestedSequent {
            name: self.name,
            ant: self.left_antecedent.clone(),
            out: None,
            children: self.children.iter().map(|(x, c)| (x.clone(), c.left_part())).collect(),
        }
    }

    /// Right antecedents with the output.
    pub fn right_part(&self) -> NestedSequent {
        NestedSequent {
            name: self.name,
            ant: self.right_antecedent.clone(),
            out: self.consequent.clone(),
            children: self.children.iter().map(|(x, c)| (x.clone(), c.right_part())).collect(),
        }
    }

    /// Exchanges the two antecedent parts everywhere; the output stays.
    pub fn swap_bias(&self) -> Self {
        BiasedSequent {
            name: self.name,
            left_antecedent: self.right_antecedent.clone(),
            right_antecedent: self.left_antecedent.clone(),
            consequent: self.consequent.clone(),
            children: self.children.iter().map(|(x, c)| (x.clone(), c.swap_bias())).collect(),
        }
    }

    /// `sig°(L) ∪ sig°(R)` with `°` flipped on the left part, atoms only.
    pub fn signature(&self, pol: Polarity) -> BTreeSet<Formula> {
        let mut s = sequent_signature(&self.left_part(), pol.flip());
        s.extend(sequent_signature(&self.right_part(), pol));
        s
    }
}

fn write_formulas(f: &mut fmt::Formatter<'_>, xs: &[Formula]) -> fmt::Result {
    if xs.is_empty() {
        return write!(f, "-");
    }
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for BiasedSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formulas(f, &self.left_antecedent)?;
        write!(f, " | ")?;
        write_formulas(f, &self.right_antecedent)?;
        write!(f, " => ")?;
        write_formulas(f, self.consequent.as_slice())?;
        for (x, c) in &self.children {
            write!(f, ", ({x})[{c}]")?;
        }
        Ok(())
    }
}

/// Atoms of the signature of a sequent: antecedents count with flipped polarity.
pub fn sequent_signature(g: &NestedSequent, pol: Polarity) -> BTreeSet<Formula> {
    let mut s = BTreeSet::new();
    for n in g.nodes() {
        for a in &n.ant {
            s.extend(signature(a, pol.flip()).atoms());
        }
        if let Some(o) = &n.out {
            s.extend(signature(o, pol).atoms());
        }
    }
    s
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interpolant {
    pub pairs: BTreeSet<(Name, Formula)>,
}

impl Interpolant {
    pub fn single(w: Name, f: Formula) -> Self {
        Interpolant { pairs: BTreeSet::from([(w, f)]) }
    }

    /// Formulas paired with `w`, in canonical order.
    pub fn at(&self, w: Name) -> Vec<Formula> {
        self.pairs.iter().filter(|(n, _)| *n == w).map(|(_, f)| f.clone()).collect()
    }

    pub fn names(&self) -> BTreeSet<Name> {
        self.pairs.iter().map(|(n, _)| *n).collect()
    }

    pub fn signature(&self, pol: Polarity) -> BTreeSet<Formula> {
        self.pairs.iter().flat_map(|(_, f)| signature(f, pol).atoms()).collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.pairs.iter().map(|(w, f)| json!({"name": w.to_string(), "formula": f.to_string()})).collect())
    }
}

impl fmt::Display for Interpolant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (w, a)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}: {a}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    Imp,
    Join,
    Meet,
}

/// Pointwise combination over `names`, with the defaults for sides that
/// have nothing at a name.
pub fn combine(kind: Combine, i: &Interpolant, j: &Interpolant, names: &BTreeSet<Name>) -> Interpolant {
    let mut pairs = BTreeSet::new();
    for w in names {
        let (cs, ds) = (i.at(*w), j.at(*w));
        let both = |c: &Formula, d: &Formula| match kind {
            Combine::Imp => Formula::imp(c.clone(), d.clone()),
            Combine::Join => Formula::or(c.clone(), d.clone()),
            Combine::Meet => Formula::and(c.clone(), d.clone()),
        };
        if cs.is_empty() && ds.is_empty() {
            pairs.insert((*w, match kind {
                Combine::Imp => Formula::imp(Formula::top(), Formula::Bottom),
                Combine::Join => Formula::Bottom,
                Combine::Meet => Formula::top(),
            }));
        } else if ds.is_empty() {
            pairs.extend(cs.iter().map(|c| (*w, if kind == Combine::Imp { Formula::imp(c.clone(), Formula::Bottom) } else { c.clone() })));
        } else if cs.is_empty() {
            pairs.extend(ds.iter().map(|d| (*w, if kind == Combine::Imp { Formula::imp(Formula::top(), d.clone()) } else { d.clone() })));
        } else {
            for c in &cs {
                pairs.extend(ds.iter().map(|d| (*w, both(c, d))));
            }
        }
    }
    Interpolant { pairs }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lift {
    Box,
    Dia,
}

/// Replaces the pairs at `u` by one pair at `w`: `[x]` of their disjunction
/// or `<x>` of their conjunction.
pub fn modal_lift(kind: Lift, x: &Character, i: &Interpolant, w: Name, u: Name) -> Interpolant {
    let at_u = i.at(u);
    if at_u.is_empty() {
        return i.clone();
    }
    let mut pairs: BTreeSet<_> = i.pairs.iter().filter(|(n, _)| *n != u).cloned().collect();
    pairs.insert((w, lifted(kind, x, &at_u)));
    Interpolant { pairs }
}

fn lifted(kind: Lift, x: &Character, items: &[Formula]) -> Formula {
    match kind {
        Lift::Box => Formula::boxed(x.clone(), Formula::big_or(items).expect("non-empty")),
        Lift::Dia => Formula::dia(x.clone(), Formula::big_and(items).expect("non-empty")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IRule {
    IdI1,
    IdI2,
    BotLI1,
    BotLI2,
    OrLI1,
    OrLI2,
    AndRI,
    ImpLI1,
    ImpLI2,
    BoxRI,
    DiaLI1,
    DiaLI2,
    DI,
    /// A rule whose premise interpolant is passed down unchanged.
    Pass(RuleId),
}

impl fmt::Display for IRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IRule::IdI1 => "idI1",
            IRule::IdI2 => "idI2",
            IRule::BotLI1 => "botLI1",
            IRule::BotLI2 => "botLI2",
            IRule::OrLI1 => "orLI1",
            IRule::OrLI2 => "orLI2",
            IRule::AndRI => "andRI",
            IRule::ImpLI1 => "impLI1",
            IRule::ImpLI2 => "impLI2",
            IRule::BoxRI => "boxRI",
            IRule::DiaLI1 => "diaLI1",
            IRule::DiaLI2 => "diaLI2",
            IRule::DI => "dI",
            IRule::Pass(r) => return write!(f, "{r}I"),
        };
        f.write_str(s)
    }
}

/// A proof annotated with a bias and an interpolant at every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationProof {
    pub rule: IRule,
    pub inst: RuleInstance,
    pub conclusion: NestedSequent,
    pub bias: Bias,
    pub interpolant: Interpolant,
    pub premises: Vec<InterpolationProof>,
}

impl InterpolationProof {
    pub fn biased(&self) -> BiasedSequent {
        BiasedSequent::from_sequent(&self.conclusion, &self.bias).expect("bias built with the sequent")
    }

    pub fn height(&self) -> usize {
        self.premises.iter().map(|p| p.height() + 1).max().unwrap_or(0)
    }

    /// Nodes whose interpolant breaks name or signature containment.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        self.collect_violations(&mut v);
        v
    }

    fn collect_violations(&self, out: &mut Vec<String>) {
        let b = self.biased();
        let (l, r) = (b.left_part(), b.right_part());
        let names: BTreeSet<Name> = self.conclusion.names().into_iter().collect();
        if !self.interpolant.names().is_subset(&names) {
            out.push(format!("{}: names of {} outside the sequent", self.rule, self.interpolant));
        }
        for pol in [Polarity::Pos, Polarity::Neg] {
            let allowed: BTreeSet<Formula> = sequent_signature(&l, pol.flip()).intersection(&sequent_signature(&r, pol)).cloned().collect();
            if !self.interpolant.signature(pol).is_subset(&allowed) {
                out.push(format!("{}: {:?} signature of {} escapes {b}", self.rule, pol, self.interpolant));
            }
        }
        for p in &self.premises {
            p.collect_violations(out);
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule.to_string(),
            "sequent": self.biased().to_string(),
            "interpolant": self.interpolant.to_json(),
            "premises": self.premises.iter().map(InterpolationProof::to_json).collect::<Vec<_>>(),
        })
    }
}

fn left_of(g: &NestedSequent, bias: &Bias) -> NestedSequent {
    select(g, bias, Part::Left)
}

fn right_of(g: &NestedSequent, bias: &Bias) -> NestedSequent {
    select(g, bias, Part::Right)
}

fn select(g: &NestedSequent, bias: &Bias, part: Part) -> NestedSequent {
    let parts = &bias[&g.name];
    NestedSequent {
        name: g.name,
        ant: g.ant.iter().zip(parts).filter(|(_, q)| **q == part).map(|(f, _)| f.clone()).collect(),
        out: if part == Part::Right { g.out.clone() } else { None },
        children: g.children.iter().map(|(x, c)| (x.clone(), select(c, bias, part))).collect(),
    }
}

fn flipped(bias: &Bias) -> Bias {
    bias.iter().map(|(n, ps)| (*n, ps.iter().map(|p| p.flip()).collect())).collect()
}

fn check_bias(g: &NestedSequent, bias: &Bias) -> Result<()> {
    BiasedSequent::from_sequent(g, bias).map(|_| ())
}

/// Replays `p` in the biased calculus, starting from `bias` on its conclusion.
pub fn derive_interpolation_proof(p: &Proof, bias: &Bias, logic: &Logic) -> Result<InterpolationProof> {
    check_bias(&p.conclusion, bias)?;
    let p = p.normalize_to(&p.conclusion, logic)?;
    derive(&p, bias, logic)
}

fn derive(p: &Proof, bias: &Bias, logic: &Logic) -> Result<InterpolationProof> {
    let g = &p.conclusion;
    let inst = &p.rule;
    let w = inst.at;
    let part = match inst.principal {
        Some(Address { side: Side::Ant, index }) => bias[&w][index],
        _ => Part::Right,
    };
    let idx = inst.principal.map(|a| a.index).unwrap_or(0);
    let with = |f: &dyn Fn(&mut Bias)| {
        let mut b = bias.clone();
        f(&mut b);
        b
    };
    let fresh = g.fresh_name();
    let (rule, biases) = match inst.rule {
        RuleId::Id => (if part == Part::Left { IRule::IdI1 } else { IRule::IdI2 }, vec![]),
        RuleId::BotL => (if part == Part::Left { IRule::BotLI1 } else { IRule::BotLI2 }, vec![]),
        RuleId::OrL => (if part == Part::Left { IRule::OrLI1 } else { IRule::OrLI2 }, vec![bias.clone(), bias.clone()]),
        RuleId::AndR => (IRule::AndRI, vec![bias.clone(), bias.clone()]),
        RuleId::ImpL => {
            let right = with(&|b| b.get_mut(&w).unwrap().push(part));
            if part == Part::Left {
                (IRule::ImpLI1, vec![flipped(bias), right])
            } else {
                (IRule::ImpLI2, vec![bias.clone(), right])
            }
        }
        RuleId::AndL => (IRule::Pass(RuleId::AndL), vec![with(&|b| b.get_mut(&w).unwrap().insert(idx + 1, part))]),
        RuleId::ImpR => (IRule::Pass(RuleId::ImpR), vec![with(&|b| b.get_mut(&w).unwrap().push(Part::Right))]),
        RuleId::BoxLProp => {
            let u = inst.target.ok_or(RuleError::Address(w))?;
            (IRule::Pass(RuleId::BoxLProp), vec![with(&|b| b.get_mut(&u).unwrap().push(part))])
        }
        RuleId::OrR1 | RuleId::OrR2 | RuleId::DiaRProp => (IRule::Pass(inst.rule), vec![bias.clone()]),
        RuleId::DiaL => {
            let b = with(&|b| {
                b.get_mut(&w).unwrap().remove(idx);
                b.insert(fresh, vec![part]);
            });
            (if part == Part::Left { IRule::DiaLI1 } else { IRule::DiaLI2 }, vec![b])
        }
        RuleId::BoxR => (IRule::BoxRI, vec![with(&|b| {
            b.insert(fresh, vec![]);
        })]),
        RuleId::DX => (IRule::DI, vec![with(&|b| {
            b.insert(fresh, vec![]);
        })]),
    };
    let premises = p.premises.iter().zip(&biases).map(|(q, b)| derive(q, b, logic)).collect::<Result<Vec<_>>>()?;
    let interpolant = conclude(rule, inst, g, &premises)?;
    Ok(InterpolationProof { rule, inst: inst.clone(), conclusion: g.clone(), bias: bias.clone(), interpolant, premises })
}

/// The interpolant `rule` assigns to `g` given the premise derivations.
fn conclude(rule: IRule, inst: &RuleInstance, g: &NestedSequent, premises: &[InterpolationProof]) -> Result<Interpolant> {
    let w = inst.at;
    let principal = inst.principal_formula(g).cloned();
    let fresh = g.fresh_name();
    let is = |i: usize| &premises[i].interpolant;
    // Only names carrying a pair on some side; see `combine`.
    let joint = || is(0).names().union(&is(1).names()).copied().collect::<BTreeSet<_>>();
    let character = || -> Result<Character> {
        match (&principal, &inst.character) {
            (Some(Formula::Dia(x, _) | Formula::Box(x, _)), _) => Ok(x.clone()),
            (_, Some(x)) => Ok(x.clone()),
            _ => Err(RuleError::Address(w).into()),
        }
    };
    Ok(match rule {
        IRule::IdI1 => Interpolant::single(w, principal.clone().expect("id has a principal")),
        IRule::IdI2 | IRule::BotLI2 => Interpolant::single(w, Formula::top()),
        IRule::BotLI1 => Interpolant::single(w, Formula::Bottom),
        IRule::OrLI1 => combine(Combine::Join, is(0), is(1), &joint()),
        IRule::OrLI2 | IRule::AndRI | IRule::ImpLI2 => combine(Combine::Meet, is(0), is(1), &joint()),
        IRule::ImpLI1 => combine(Combine::Imp, is(0), is(1), &joint()),
        IRule::DiaLI1 => modal_lift(Lift::Dia, &character()?, is(0), w, fresh),
        IRule::BoxRI | IRule::DiaLI2 | IRule::DI => modal_lift(Lift::Box, &character()?, is(0), w, fresh),
        IRule::Pass(_) => is(0).clone(),
    })
}

/// Proofs of `L(G) ▷ w(=> C)` and `R(G) ▷ w(C =>)` for every pair `w: C`.
pub type SideProofs = BTreeMap<(Name, Formula), (Proof, Proof)>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SideStats {
    /// Side proofs assembled from premise side proofs.
    pub assembled: usize,
    /// Subgoals closed by bounded search instead.
    pub fallbacks: usize,
    /// Pairs dropped for lack of side proofs.
    pub pruned: usize,
}

/// Side proofs of every pair of `ip`, together with the derivation restricted
/// to the pairs that have them.
pub fn extract_side_proofs(ip: &InterpolationProof, logic: &Logic, budget: SearchBudget) -> Result<(InterpolationProof, SideProofs, SideStats)> {
    let b = Builder::new(logic, budget);
    let (ip, sides) = b.sides(ip)?;
    Ok((ip, sides, b.stats()))
}

fn out_at(h: &NestedSequent, w: Name, e: &Formula) -> NestedSequent {
    let mut t = h.clone();
    t.find_mut(w).expect("name of the sequent").out = Some(e.clone());
    t
}

fn ant_at(h: &NestedSequent, w: Name, e: &Formula) -> NestedSequent {
    let mut t = h.clone();
    t.find_mut(w).expect("name of the sequent").ant.push(e.clone());
    t
}

fn on_formula(rule: RuleId, h: &NestedSequent, w: Name, f: &Formula) -> Result<RuleInstance> {
    let i = h.find(w).and_then(|n| n.ant.iter().rposition(|g| g == f)).ok_or_else(|| RuleError::Shape(format!("`{f}` missing at {w}")))?;
    Ok(RuleInstance::on_ant(rule, w, i))
}

/// `inst` from `g` moved onto `h`, which shares its names.
fn retarget(inst: &RuleInstance, g: &NestedSequent, h: &NestedSequent) -> Result<RuleInstance> {
    let mut out = RuleInstance { witness: None, ..inst.clone() };
    if let Some(Address { side: Side::Ant, .. }) = inst.principal {
        let f = inst.principal_formula(g).ok_or(RuleError::Address(inst.at))?;
        out.principal = on_formula(inst.rule, h, inst.at, f)?.principal;
    }
    Ok(out)
}

/// Removes the empty leaf `u` from every node of `p`, if the proof never uses it.
fn drop_leaf(p: &Proof, u: Name, logic: &Logic) -> Option<Proof> {
    fn go(p: &Proof, u: Name) -> Option<Proof> {
        if p.rule.at == u || p.rule.target == Some(u) {
            return None;
        }
        let mut c = p.conclusion.clone();
        let (parent, _) = c.parent_of(u)?;
        let node = c.find_mut(parent)?;
        let i = node.children.iter().position(|(_, k)| k.name == u)?;
        let k = &node.children[i].1;
        if !k.ant.is_empty() || k.out.is_some() || !k.children.is_empty() {
            return None;
        }
        node.children.remove(i);
        let premises = p.premises.iter().map(|q| go(q, u)).collect::<Option<Vec<_>>>()?;
        Some(Proof { conclusion: c, rule: p.rule.clone(), premises })
    }
    let q = go(p, u)?;
    check_proof(&q, logic).ok().map(|_| q)
}

enum Origin {
    Both(Formula, Formula),
    First(Formula),
    Second(Formula),
}

fn origin(kind: Combine, w: Name, e: &Formula, i: &Interpolant, j: &Interpolant) -> Result<Origin> {
    let (cs, ds) = (i.at(w), j.at(w));
    let bad = || RuleError::Shape(format!("`{e}` is not a combination at {w}"));
    match (cs.is_empty(), ds.is_empty(), kind, e) {
        (false, false, _, Formula::Imp(c, d) | Formula::Or(c, d) | Formula::And(c, d)) => Ok(Origin::Both((**c).clone(), (**d).clone())),
        (false, true, Combine::Imp, Formula::Imp(c, _)) => Ok(Origin::First((**c).clone())),
        (false, true, _, _) => Ok(Origin::First(e.clone())),
        (true, false, Combine::Imp, Formula::Imp(_, d)) => Ok(Origin::Second((**d).clone())),
        (true, false, _, _) => Ok(Origin::Second(e.clone())),
        _ => Err(bad().into()),
    }
}

struct Builder<'a> {
    logic: &'a Logic,
    budget: SearchBudget,
    assembled: Cell<usize>,
    fallbacks: Cell<usize>,
    pruned: Cell<usize>,
}

impl<'a> Builder<'a> {
    fn new(logic: &'a Logic, budget: SearchBudget) -> Self {
        Builder { logic, budget, assembled: Cell::new(0), fallbacks: Cell::new(0), pruned: Cell::new(0) }
    }

    fn stats(&self) -> SideStats {
        SideStats { assembled: self.assembled.get(), fallbacks: self.fallbacks.get(), pruned: self.pruned.get() }
    }

    /// Applies `inst` to `t` and closes its premises with `subs`, weakening
    /// each subproof into the premise it is meant for.
    fn by(&self, t: NestedSequent, inst: RuleInstance, subs: impl FnOnce(&[NestedSequent]) -> Result<Vec<Proof>>) -> Result<Proof> {
        let es = apply_backward(&t, &inst, self.logic)?;
        let ps = subs(&es)?;
        if ps.len() != es.len() {
            return Err(RuleError::Shape(format!("{} needs {} premises", inst.rule, es.len())).into());
        }
        let premises = ps.into_iter().zip(&es).map(|(p, e)| self.fit(p, e)).collect::<Result<Vec<_>>>()?;
        Ok(Proof { conclusion: t, rule: inst, premises })
    }

    fn fit(&self, p: Proof, e: &NestedSequent) -> Result<Proof> {
        if p.conclusion == *e {
            Ok(p)
        } else if p.conclusion.canon_eq(e) {
            Ok(p.normalize_to(e, self.logic)?)
        } else {
            Ok(embed(&p, e, self.logic)?)
        }
    }

    fn search(&self, t: &NestedSequent) -> Result<Proof> {
        self.fallbacks.set(self.fallbacks.get() + 1);
        prove(t, self.logic, self.budget).map_err(|_| InterpolationError::SideProof(t.to_string()))
    }

    fn top(&self, t: NestedSequent, w: Name) -> Result<Proof> {
        self.by(t, RuleInstance::on_out(RuleId::ImpR, w), |es| {
            let inst = on_formula(RuleId::BotL, &es[0], w, &Formula::Bottom)?;
            Ok(vec![Proof::leaf(es[0].clone(), inst)])
        })
    }

    fn leaf(&self, t: NestedSequent, rule: RuleId, w: Name, f: &Formula) -> Result<Proof> {
        let inst = on_formula(rule, &t, w, f)?;
        apply_backward(&t, &inst, self.logic)?;
        Ok(Proof::leaf(t, inst))
    }

    /// `t` has output `big_and(items)` at `u`.
    fn and_r(&self, t: NestedSequent, u: Name, items: &[Formula], get: &dyn Fn(&Formula) -> Result<Proof>) -> Result<Proof> {
        if items.len() == 1 {
            return self.fit(get(&items[0])?, &t);
        }
        self.by(t, RuleInstance::on_out(RuleId::AndR, u), |es| Ok(vec![get(&items[0])?, self.and_r(es[1].clone(), u, &items[1..], get)?]))
    }

    /// `t` has `big_and(items)` in the antecedent at `u`; uses the first item.
    fn and_l(&self, t: NestedSequent, u: Name, items: &[Formula], first: Proof) -> Result<Proof> {
        if items.len() == 1 {
            return self.fit(first, &t);
        }
        let f = Formula::big_and(items).expect("non-empty");
        let inst = on_formula(RuleId::AndL, &t, u, &f)?;
        self.by(t, inst, |es| Ok(vec![self.and_l(es[0].clone(), u, &items[1..], first)?]))
    }

    /// `t` has output `big_or(items)` at `u`; proves the first disjunct.
    fn or_r(&self, t: NestedSequent, u: Name, items: &[Formula], first: Proof) -> Result<Proof> {
        if items.len() == 1 {
            return self.fit(first, &t);
        }
        self.by(t, RuleInstance::on_out(RuleId::OrR1, u), |_| Ok(vec![first]))
    }

    /// `t` has `big_or(items)` in the antecedent at `u`.
    fn or_l(&self, t: NestedSequent, u: Name, items: &[Formula], get: &dyn Fn(&Formula) -> Result<Proof>) -> Result<Proof> {
        if items.len() == 1 {
            return self.fit(get(&items[0])?, &t);
        }
        let f = Formula::big_or(items).expect("non-empty");
        let inst = on_formula(RuleId::OrL, &t, u, &f)?;
        self.by(t, inst, |es| Ok(vec![get(&items[0])?, self.or_l(es[1].clone(), u, &items[1..], get)?]))
    }

    /// Side proofs for every pair of `ip`, bottom-up. A pair whose side
    /// proofs can be neither assembled nor found is dropped, and the
    /// returned derivation recomputes each interpolant from the surviving
    /// premise pairs.
    fn sides(&self, ip: &InterpolationProof) -> Result<(InterpolationProof, SideProofs)> {
        let (premises, subs): (Vec<_>, Vec<_>) = ip.premises.iter().map(|q| self.sides(q)).collect::<Result<Vec<_>>>()?.into_iter().unzip();
        let interpolant = conclude(ip.rule, &ip.inst, &ip.conclusion, &premises)?;
        let mut ip = InterpolationProof { premises, interpolant, ..ip.clone() };
        let l = left_of(&ip.conclusion, &ip.bias);
        let r = right_of(&ip.conclusion, &ip.bias);
        let mut out = SideProofs::new();
        let mut failure = None;
        for (w, e) in &ip.interpolant.pairs {
            let lt = out_at(&l, *w, e);
            let rt = ant_at(&r, *w, e);
            let n = Node { ip: &ip, subs: &subs, w: *w, e };
            let p1 = self.left_side(&n, lt.clone()).or_else(|_| self.search(&lt));
            let p2 = p1.is_ok().then(|| self.right_side(&n, rt.clone()).or_else(|_| self.search(&rt)));
            match (p1, p2) {
                (Ok(p1), Some(Ok(p2))) => {
                    self.assembled.set(self.assembled.get() + 2);
                    out.insert((*w, e.clone()), (p1, p2));
                }
                (Err(e), _) | (_, Some(Err(e))) => {
                    failure.get_or_insert(e);
                }
                (Ok(_), None) => unreachable!(),
            }
        }
        let kept: BTreeSet<(Name, Formula)> = out.keys().cloned().collect();
        self.pruned.set(self.pruned.get() + ip.interpolant.pairs.len() - kept.len());
        if kept.is_empty() {
            return Err(failure.unwrap_or_else(|| InterpolationError::SideProof(ip.biased().to_string())));
        }
        ip.interpolant.pairs = kept;
        Ok((ip, out))
    }

    /// A proof of `L ▷ w(=> e)`.
    fn left_side(&self, n: &Node, t: NestedSequent) -> Result<Proof> {
        let (ip, w, e) = (n.ip, n.w, n.e);
        let g = &ip.conclusion;
        let v = ip.inst.at;
        let u = g.fresh_name();
        match ip.rule {
            IRule::IdI1 => self.leaf(t, RuleId::Id, w, e),
            IRule::BotLI1 => self.leaf(t, RuleId::BotL, w, e),
            IRule::IdI2 | IRule::BotLI2 => self.top(t, w),
            IRule::Pass(rule) => {
                let q = n.s1(0, w, e)?;
                if matches!(rule, RuleId::AndL | RuleId::BoxLProp) && n.principal_part() == Part::Left {
                    self.by(t.clone(), retarget(&ip.inst, g, &t)?, |_| Ok(vec![q]))
                } else {
                    self.fit(q, &t)
                }
            }
            IRule::OrLI1 => {
                let inst = retarget(&ip.inst, g, &t)?;
                match n.origin(Combine::Join)? {
                    Origin::Both(c, d) => self.by(t, inst, |es| {
                        Ok(vec![
                            self.by(es[0].clone(), RuleInstance::on_out(RuleId::OrR1, w), |_| Ok(vec![n.s1(0, w, &c)?]))?,
                            self.by(es[1].clone(), RuleInstance::on_out(RuleId::OrR2, w), |_| Ok(vec![n.s1(1, w, &d)?]))?,
                        ])
                    }),
                    Origin::First(c) => self.by(t, inst, |es| Ok(vec![n.s1(0, w, &c)?, self.search(&es[1])?])),
                    Origin::Second(d) => self.by(t, inst, |es| Ok(vec![self.search(&es[0])?, n.s1(1, w, &d)?])),
                }
            }
            IRule::OrLI2 | IRule::AndRI | IRule::ImpLI2 => match n.origin(Combine::Meet)? {
                Origin::Both(c, d) => self.by(t, RuleInstance::on_out(RuleId::AndR, w), |_| Ok(vec![n.s1(0, w, &c)?, n.s1(1, w, &d)?])),
                Origin::First(c) => self.fit(n.s1(0, w, &c)?, &t),
                Origin::Second(d) => self.fit(n.s1(1, w, &d)?, &t),
            },
            IRule::ImpLI1 => {
                let o = n.origin(Combine::Imp)?;
                self.by(t, RuleInstance::on_out(RuleId::ImpR, w), |es| {
                    let inst = retarget(&ip.inst, g, &es[0])?;
                    Ok(vec![self.by(es[0].clone(), inst, |fs| {
                        Ok(match &o {
                            Origin::Both(c, d) => vec![n.s2(0, w, c)?, n.s1(1, w, d)?],
                            Origin::First(c) => vec![n.s2(0, w, c)?, self.search(&fs[1])?],
                            Origin::Second(d) => vec![self.search(&fs[0])?, n.s1(1, w, d)?],
                        })
                    })?])
                })
            }
            IRule::DiaLI1 => {
                let x = n.character()?;
                let items = ip.premises[0].interpolant.at(u);
                if w == v && !items.is_empty() && *e == lifted(Lift::Dia, &x, &items) {
                    let inst = retarget(&ip.inst, g, &t)?;
                    self.by(t, inst, |es| {
                        let dia = RuleInstance::propagate(RuleId::DiaRProp, v, Address::out(), u, x.clone());
                        Ok(vec![self.by(es[0].clone(), dia, |fs| Ok(vec![self.and_r(fs[0].clone(), u, &items, &|d| n.s1(0, u, d))?]))?])
                    })
                } else {
                    let inst = retarget(&ip.inst, g, &t)?;
                    self.by(t, inst, |_| Ok(vec![n.s1(0, w, e)?]))
                }
            }
            IRule::BoxRI | IRule::DiaLI2 | IRule::DI => {
                let x = n.character()?;
                let items = ip.premises[0].interpolant.at(u);
                if w == v && !items.is_empty() && *e == lifted(Lift::Box, &x, &items) {
                    self.by(t, RuleInstance::on_out(RuleId::BoxR, v), |es| Ok(vec![self.or_r(es[0].clone(), u, &items, n.s1(0, u, &items[0])?)?]))
                } else if ip.rule == IRule::DI {
                    self.by(t, RuleInstance::serial(v, x), |_| Ok(vec![n.s1(0, w, e)?]))
                } else {
                    let q = n.s1(0, w, e)?;
                    let q = drop_leaf(&q, u, self.logic).ok_or_else(|| RuleError::Shape("uses the new component".into()))?;
                    self.fit(q, &t)
                }
            }
        }
    }

    /// A proof of `R ▷ w(e =>)`.
    fn right_side(&self, n: &Node, t: NestedSequent) -> Result<Proof> {
        let (ip, w, e) = (n.ip, n.w, n.e);
        let g = &ip.conclusion;
        let v = ip.inst.at;
        let u = g.fresh_name();
        match ip.rule {
            IRule::IdI1 => {
                let inst = RuleInstance::on_ant(RuleId::Id, w, t.find(w).expect("named").ant.len() - 1);
                Ok(Proof::leaf(t, inst))
            }
            IRule::BotLI1 => self.leaf(t, RuleId::BotL, w, &Formula::Bottom),
            IRule::IdI2 => {
                let p = ip.inst.principal_formula(g).cloned().expect("id has a principal");
                self.leaf(t, RuleId::Id, v, &p)
            }
            IRule::BotLI2 => self.leaf(t, RuleId::BotL, v, &Formula::Bottom),
            IRule::Pass(rule) => {
                let q = n.s2(0, w, e)?;
                let on_left = matches!(rule, RuleId::AndL | RuleId::BoxLProp) && n.principal_part() == Part::Left;
                if on_left {
                    self.fit(q, &t)
                } else {
                    self.by(t.clone(), retarget(&ip.inst, g, &t)?, |_| Ok(vec![q]))
                }
            }
            IRule::OrLI1 => match n.origin(Combine::Join)? {
                Origin::Both(c, d) => {
                    let inst = on_formula(RuleId::OrL, &t, w, e)?;
                    self.by(t, inst, |_| Ok(vec![n.s2(0, w, &c)?, n.s2(1, w, &d)?]))
                }
                Origin::First(c) => self.fit(n.s2(0, w, &c)?, &t),
                Origin::Second(d) => self.fit(n.s2(1, w, &d)?, &t),
            },
            IRule::OrLI2 | IRule::AndRI | IRule::ImpLI2 => match n.origin(Combine::Meet)? {
                Origin::Both(c, d) => {
                    let split = on_formula(RuleId::AndL, &t, w, e)?;
                    self.by(t, split, |es| {
                        let inst = retarget(&ip.inst, g, &es[0])?;
                        Ok(vec![self.by(es[0].clone(), inst, |_| Ok(vec![n.s2(0, w, &c)?, n.s2(1, w, &d)?]))?])
                    })
                }
                Origin::First(c) => {
                    let inst = retarget(&ip.inst, g, &t)?;
                    self.by(t, inst, |fs| Ok(vec![n.s2(0, w, &c)?, self.search(&fs[1])?]))
                }
                Origin::Second(d) => {
                    let inst = retarget(&ip.inst, g, &t)?;
                    self.by(t, inst, |fs| Ok(vec![self.search(&fs[0])?, n.s2(1, w, &d)?]))
                }
            },
            IRule::ImpLI1 => {
                let inst = on_formula(RuleId::ImpL, &t, w, e)?;
                let o = n.origin(Combine::Imp)?;
                self.by(t, inst, |fs| {
                    Ok(match &o {
                        Origin::Both(c, d) => vec![n.s1(0, w, c)?, n.s2(1, w, d)?],
                        Origin::First(c) => vec![n.s1(0, w, c)?, self.leaf(fs[1].clone(), RuleId::BotL, w, &Formula::Bottom)?],
                        Origin::Second(d) => vec![self.top(fs[0].clone(), w)?, n.s2(1, w, d)?],
                    })
                })
            }
            IRule::DiaLI1 => {
                let x = n.character()?;
                let items = ip.premises[0].interpolant.at(u);
                if w == v && !items.is_empty() && *e == lifted(Lift::Dia, &x, &items) {
                    let inst = on_formula(RuleId::DiaL, &t, v, e)?;
                    self.by(t, inst, |es| Ok(vec![self.and_l(es[0].clone(), u, &items, n.s2(0, u, &items[0])?)?]))
                } else {
                    let q = drop_leaf(&n.s2(0, w, e)?, u, self.logic).ok_or_else(|| RuleError::Shape("uses the new component".into()))?;
                    self.fit(q, &t)
                }
            }
            IRule::BoxRI | IRule::DiaLI2 | IRule::DI => {
                let x = n.character()?;
                let items = ip.premises[0].interpolant.at(u);
                let open = match ip.rule {
                    IRule::DI => RuleInstance::serial(v, x.clone()),
                    _ => retarget(&ip.inst, g, &t)?,
                };
                if w == v && !items.is_empty() && *e == lifted(Lift::Box, &x, &items) {
                    self.by(t, open, |es| {
                        let Address { index, .. } = on_formula(RuleId::BoxLProp, &es[0], v, e)?.principal.expect("set above");
                        let prop = RuleInstance::propagate(RuleId::BoxLProp, v, Address::ant(index), u, x.clone());
                        Ok(vec![self.by(es[0].clone(), prop, |fs| Ok(vec![self.or_l(fs[0].clone(), u, &items, &|d| n.s2(0, u, d))?]))?])
                    })
                } else {
                    self.by(t, open, |_| Ok(vec![n.s2(0, w, e)?]))
                }
            }
        }
    }
}

struct Node<'a> {
    ip: &'a InterpolationProof,
    subs: &'a [SideProofs],
    w: Name,
    e: &'a Formula,
}

impl Node<'_> {
    fn get(&self, i: usize, w: Name, c: &Formula) -> Result<&(Proof, Proof)> {
        self.subs.get(i).and_then(|s| s.get(&(w, c.clone()))).ok_or_else(|| RuleError::Shape(format!("premise {i} has no pair {w}: {c}")).into())
    }

    fn s1(&self, i: usize, w: Name, c: &Formula) -> Result<Proof> {
        Ok(self.get(i, w, c)?.0.clone())
    }

    fn s2(&self, i: usize, w: Name, c: &Formula) -> Result<Proof> {
        Ok(self.get(i, w, c)?.1.clone())
    }

    fn origin(&self, kind: Combine) -> Result<Origin> {
        origin(kind, self.w, self.e, &self.ip.premises[0].interpolant, &self.ip.premises[1].interpolant)
    }

    fn principal_part(&self) -> Part {
        match self.ip.inst.principal {
            Some(Address { side: Side::Ant, index }) => self.ip.bias[&self.ip.inst.at][index],
            _ => Part::Right,
        }
    }

    fn character(&self) -> Result<Character> {
        match (self.ip.inst.principal_formula(&self.ip.conclusion), &self.ip.inst.character) {
            (Some(Formula::Dia(x, _) | Formula::Box(x, _)), _) => Ok(x.clone()),
            (_, Some(x)) => Ok(x.clone()),
            _ => Err(RuleError::Address(self.ip.inst.at).into()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    Join,
    #[default]
    Meet,
}

#[derive(Clone, Debug)]
pub struct LyndonInterpolant {
    pub interpolant: Formula,
    pub pairs: Interpolant,
    /// A proof of `=> A -> I`.
    pub proof_a_to_i: Proof,
    /// A proof of `=> I -> B`.
    pub proof_i_to_b: Proof,
    pub derivation: InterpolationProof,
    pub stats: SideStats,
}

/// Budget for side goals that are closed by search.
pub const SIDE_BUDGET: SearchBudget = SearchBudget { max_noninvertible: 8, max_propagations_per_pair: 1, max_new_components: 6 };

/// An interpolant of `A -> B` from a proof of `=> A -> B`, with proofs of
/// `A -> I` and `I -> B` and a signature check.
pub fn lyndon_interpolant(p: &Proof, logic: &Logic, mode: Mode) -> Result<LyndonInterpolant> {
    let g = &p.conclusion;
    let not_imp = || InterpolationError::NotAnImplication(g.to_string());
    let Some(Formula::Imp(a, b)) = g.out.as_ref() else { return Err(not_imp()) };
    if !g.ant.is_empty() || !g.children.is_empty() || p.rule.rule != RuleId::ImpR {
        return Err(not_imp());
    }
    let (a, b) = ((**a).clone(), (**b).clone());
    let w = g.name;
    let premise = &p.premises[0];
    let bias = Bias::from([(w, vec![Part::Left])]);
    let derivation = derive_interpolation_proof(premise, &bias, logic)?;
    let root = |f: Formula| NestedSequent::leaf(w, vec![], Some(f));
    let bld = Builder::new(logic, SIDE_BUDGET);
    let conjoin = |items: &[Formula]| {
        match mode {
            Mode::Meet => Formula::big_and(items),
            Mode::Join => Formula::big_or(items),
        }
        .expect("non-empty")
    };
    let root_items = |ip: &InterpolationProof| {
        let items = ip.interpolant.at(w);
        if items.is_empty() || ip.interpolant.names().len() != 1 {
            return Err(InterpolationError::Bias(format!("root interpolant {}", ip.interpolant)));
        }
        Ok(items)
    };
    let (derivation, i, proof_a_to_i, proof_i_to_b, stats) = match extract_side_proofs(&derivation, logic, SIDE_BUDGET) {
        Ok((derivation, sides, stats)) => {
            let items = root_items(&derivation)?;
            let i = conjoin(&items);
            let left = |c: &Formula| Ok(sides[&(w, c.clone())].0.clone());
            let right = |c: &Formula| Ok(sides[&(w, c.clone())].1.clone());
            let proof_a_to_i = bld.by(root(Formula::imp(a.clone(), i.clone())), RuleInstance::on_out(RuleId::ImpR, w), |es| {
                Ok(vec![match mode {
                    Mode::Meet => bld.and_r(es[0].clone(), w, &items, &left)?,
                    Mode::Join => bld.or_r(es[0].clone(), w, &items, left(&items[0])?)?,
                }])
            })?;
            let proof_i_to_b = bld.by(root(Formula::imp(i.clone(), b.clone())), RuleInstance::on_out(RuleId::ImpR, w), |es| {
                Ok(vec![match mode {
                    Mode::Meet => bld.and_l(es[0].clone(), w, &items, right(&items[0])?)?,
                    Mode::Join => bld.or_l(es[0].clone(), w, &items, &right)?,
                }])
            })?;
            (derivation, i, proof_a_to_i, proof_i_to_b, stats)
        }
        // Pairs may close the right part only jointly; prove the root goals directly.
        Err(InterpolationError::SideProof(_)) => {
            let i = conjoin(&root_items(&derivation)?);
            let proof_a_to_i = bld.search(&root(Formula::imp(a.clone(), i.clone())))?;
            let proof_i_to_b = bld.search(&root(Formula::imp(i.clone(), b.clone())))?;
            (derivation, i, proof_a_to_i, proof_i_to_b, bld.stats())
        }
        Err(e) => return Err(e),
    };
    check_proof(&proof_a_to_i, logic)?;
    check_proof(&proof_i_to_b, logic)?;
    check_signature(&i, &a, &b)?;
    Ok(LyndonInterpolant { interpolant: i, pairs: derivation.interpolant.clone(), proof_a_to_i, proof_i_to_b, derivation, stats })
}

/// `sig°(i) ⊆ sig°(a) ∩ sig°(b)` on atoms, for both polarities.
pub fn check_signature(i: &Formula, a: &Formula, b: &Formula) -> Result<()> {
    for pol in [Polarity::Pos, Polarity::Neg] {
        let si = signature(i, pol).atoms();
        let sa = signature(a, pol).atoms();
        let sb = signature(b, pol).atoms();
        let allowed: BTreeSet<_> = sa.intersection(&sb).cloned().collect();
        if let Some(bad) = si.difference(&allowed).next() {
            return Err(InterpolationError::Signature(format!("{bad} occurs with polarity {pol:?} in `{i}`")));
        }
    }
    Ok(())
}

/// Removes `true` conjuncts, `false` disjuncts and `true -> C` antecedents.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::And(b, c) => match (simplify(b), simplify(c)) {
            (x, y) if x.is_top() => y,
            (x, y) if y.is_top() => x,
            (x, y) => Formula::and(x, y),
        },
        Formula::Or(b, c) => match (simplify(b), simplify(c)) {
            (Formula::Bottom, y) => y,
            (x, Formula::Bottom) => x,
            (x, y) => Formula::or(x, y),
        },
        _ if f.is_top() => f.clone(),
        Formula::Imp(b, c) => match (simplify(b), simplify(c)) {
            (x, y) if x.is_top() => y,
            (x, y) => Formula::imp(x, y),
        },
        Formula::Dia(x, b) => Formula::dia(x.clone(), simplify(b)),
        Formula::Box(x, b) => Formula::boxed(x.clone(), simplify(b)),
        _ => f.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::grammar::AxiomSet;
    use crate::search::prove_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn interpolate(s: &str, logic: &Logic) -> LyndonInterpolant {
        let p = prove_formula(&f(s), logic, SearchBudget::default()).unwrap();
        lyndon_interpolant(&p, logic, Mode::Meet).unwrap()
    }

    #[test]
    fn named_propositional_cases() {
        let logic = Logic::base();
        assert_eq!(interpolate("p & q -> q | r", &logic).interpolant, f("q"));
        assert_eq!(interpolate("false -> p", &logic).interpolant, Formula::Bottom);
        assert_eq!(interpolate("p -> (q -> p)", &logic).interpolant, f("p"));
    }

    #[test]
    fn modal_case_under_t() {
        let axioms = AxiomSet::empty().with_path(Character::forward("a"), vec![]);
        let logic = Logic::new(axioms).unwrap();
        let r = interpolate("[a](p & q) -> q", &logic);
        check_signature(&r.interpolant, &f("[a](p & q)"), &f("q")).unwrap();
        assert_eq!(r.stats.fallbacks, 0);
    }

    #[test]
    fn combine_and_lift() {
        let (w, u) = (Name(0), Name(1));
        let i = Interpolant { pairs: BTreeSet::from([(w, f("p")), (u, f("q"))]) };
        let j = Interpolant::single(w, f("r"));
        let names = BTreeSet::from([w, u]);
        let c = combine(Combine::Imp, &i, &j, &names);
        assert_eq!(c.pairs, BTreeSet::from([(w, f("p -> r")), (u, f("q -> false"))]));
        let none = Interpolant::default();
        assert_eq!(combine(Combine::Meet, &i, &none, &names), i);
        assert_eq!(combine(Combine::Imp, &none, &none, &names).at(w), vec![f("true -> false")]);
        assert_eq!(combine(Combine::Join, &none, &j, &names).at(u), vec![Formula::Bottom]);
        let x = Character::forward("a");
        let l = modal_lift(Lift::Box, &x, &i, w, u);
        assert_eq!(l.pairs, BTreeSet::from([(w, f("p")), (w, f("[a]q"))]));
        assert_eq!(modal_lift(Lift::Dia, &x, &j, w, u), j);
        let v = Name(2);
        let k = Interpolant { pairs: BTreeSet::from([(u, f("p")), (u, f("q")), (v, f("r"))]) };
        assert_eq!(modal_lift(Lift::Dia, &x, &k, w, u).pairs, BTreeSet::from([(w, f("<a>(p & q)")), (v, f("r"))]));
    }

    #[test]
    fn swap_is_an_involution() {
        let g = NestedSequent::parse("p, q => r, (a)[s => -]").unwrap();
        let mut bias = uniform_bias(&g, Part::Left);
        bias.get_mut(&Name(0)).unwrap()[1] = Part::Right;
        let b = BiasedSequent::from_sequent(&g, &bias).unwrap();
        assert_eq!(b.swap_bias().swap_bias(), b);
        assert_eq!(b.to_string(), "p | q => r, (a)[s | - => -]");
        let (h, bias2) = b.forget();
        assert!(h.canon_eq(&g));
        assert_eq!(BiasedSequent::from_sequent(&h, &bias2).unwrap(), b);
    }

    #[test]
    fn simplifier() {
        assert_eq!(simplify(&f("true & (false | p)")), f("p"));
        assert_eq!(simplify(&f("true -> q")), f("q"));
    }
}
