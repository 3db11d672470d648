//! Shared corpora for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nikm::calculus::Address;
use nikm::grammar::{Grammar, PathAxiom};
use nikm::search::{prove, prove_formula, SearchBudget};
use nikm::sequent::PropagationGraph;
use nikm::{apply_backward, parse_formula, AxiomSet, Character, Formula, Logic, Name, NestedSequent, Proof, RuleId, RuleInstance};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

pub fn c(s: &str) -> Character {
    match s.strip_suffix('^') {
        Some(b) => Character::backward(b),
        None => Character::forward(s),
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Atomic instances of the intuitionistic modal axioms, with `<->` split
/// into a conjunction of both directions.
pub fn axiom_instances() -> Vec<(&'static str, Formula)> {
    let iff = |a: &str, b: &str| Formula::and(Formula::imp(f(a), f(b)), Formula::imp(f(b), f(a)));
    vec![
        ("A1", f("[a](p -> q) -> [a]p -> [a]q")),
        ("A2", iff("[a](p & q)", "[a]p & [a]q")),
        ("A3", iff("<a>(p | q)", "<a>p | <a>q")),
        ("A4", f("[a](p -> q) -> <a>p -> <a>q")),
        ("A5", f("[a]p & <a>q -> <a>(p & q)")),
        ("A6", f("<a>false -> false")),
        ("A7", f("(p -> [a]<a^>p) & (<a>[a^]p -> p)")),
        ("A8", f("(<a>p -> [a]q) -> [a](p -> q)")),
        ("A9", f("<a>(p -> q) -> [a]p -> <a>q")),
    ]
}

pub struct CubeInstance {
    pub name: &'static str,
    pub axioms: AxiomSet,
    pub goal: Formula,
}

/// T, 4, B, 5 as path axioms on `a` and D as seriality of `a`.
pub fn cube_instances() -> Vec<CubeInstance> {
    let a = c("a");
    let path = |rhs: Vec<Character>| AxiomSet::empty().with_path(a.clone(), rhs);
    vec![
        CubeInstance { name: "T", axioms: path(vec![]), goal: f("[a]p -> p") },
        CubeInstance { name: "4", axioms: path(vec![c("a"), c("a")]), goal: f("[a]p -> [a][a]p") },
        CubeInstance { name: "B", axioms: path(vec![c("a^")]), goal: f("<a^>p -> <a>p") },
        CubeInstance { name: "5", axioms: path(vec![c("a^"), c("a")]), goal: f("<a^><a>p -> <a>p") },
        CubeInstance { name: "D", axioms: AxiomSet::empty().with_serial(a.clone()), goal: f("[a]p -> <a>p") },
    ]
}

/// Applies `inst` to the single open goal.
fn step(g: &NestedSequent, inst: RuleInstance, logic: &Logic) -> NestedSequent {
    let ps = apply_backward(g, &inst, logic).unwrap();
    assert_eq!(ps.len(), 1);
    ps.into_iter().next().unwrap()
}

/// The example proof of the path axiom `x -> x1 ... xn`, built rule by rule:
/// `(<x1>...<xn>p -> <x>p) & ([x]p -> [x1]...[xn]p)`.
pub fn ipa_example(n: usize) -> (Logic, Formula, Proof) {
    let x = c("x");
    let xs: Vec<Character> = (1..=n).map(|i| c(&format!("x{i}"))).collect();
    let logic = Logic::new(AxiomSet::empty().with_path(x.clone(), xs.clone())).unwrap();
    let p = f("p");
    let dias = xs.iter().rev().fold(p.clone(), |acc, y| Formula::dia(y.clone(), acc));
    let boxes = xs.iter().rev().fold(p.clone(), |acc, y| Formula::boxed(y.clone(), acc));
    let left_goal = Formula::imp(dias, Formula::dia(x.clone(), p.clone()));
    let right_goal = Formula::imp(Formula::boxed(x.clone(), p.clone()), boxes);
    let goal = Formula::and(left_goal, right_goal);
    let w = Name(0);
    let root = NestedSequent::flat(vec![], Some(goal.clone()));
    let prems = apply_backward(&root, &RuleInstance::on_out(RuleId::AndR, w), &logic).unwrap();

    let chain = |start: &NestedSequent, body: &dyn Fn(&NestedSequent, &mut Vec<(NestedSequent, RuleInstance)>)| {
        let mut steps = Vec::new();
        body(start, &mut steps);
        steps
    };
    let build = |steps: Vec<(NestedSequent, RuleInstance)>, leaf: (NestedSequent, RuleInstance)| {
        let mut proof = Proof::leaf(leaf.0, leaf.1);
        for (g, inst) in steps.into_iter().rev() {
            proof = Proof { conclusion: g, rule: inst, premises: vec![proof] };
        }
        proof
    };

    // left branch: impR, diaL n times, diaRprop from the root to the deepest child, id
    let steps = chain(&prems[0], &|g, out| {
        let mut g = g.clone();
        let inst = RuleInstance::on_out(RuleId::ImpR, w);
        out.push((g.clone(), inst.clone()));
        g = step(&g, inst, &logic);
        let mut at = w;
        for _ in 0..n {
            let idx = g.find(at).unwrap().ant.iter().position(|a| matches!(a, Formula::Dia(..))).unwrap();
            let inst = RuleInstance::on_ant(RuleId::DiaL, at, idx);
            out.push((g.clone(), inst.clone()));
            let next = g.fresh_name();
            g = step(&g, inst, &logic);
            at = next;
        }
        let inst = RuleInstance::propagate(RuleId::DiaRProp, w, Address::out(), at, x.clone());
        out.push((g.clone(), inst.clone()));
        let g2 = step(&g, inst, &logic);
        out.push((g2, RuleInstance::on_ant(RuleId::Id, at, 0)));
    });
    let mut steps = steps;
    let leaf = steps.pop().unwrap();
    let left = build(steps, leaf);

    // right branch: impR, boxR n times, boxLprop from the root to the deepest child, id
    let steps = chain(&prems[1], &|g, out| {
        let mut g = g.clone();
        let inst = RuleInstance::on_out(RuleId::ImpR, w);
        out.push((g.clone(), inst.clone()));
        g = step(&g, inst, &logic);
        let mut at = w;
        for _ in 0..n {
            let inst = RuleInstance::on_out(RuleId::BoxR, at);
            out.push((g.clone(), inst.clone()));
            let next = g.fresh_name();
            g = step(&g, inst, &logic);
            at = next;
        }
        let inst = RuleInstance::propagate(RuleId::BoxLProp, w, Address::ant(0), at, x.clone());
        out.push((g.clone(), inst.clone()));
        let g2 = step(&g, inst, &logic);
        out.push((g2, RuleInstance::on_ant(RuleId::Id, at, 0)));
    });
    let mut steps = steps;
    let leaf = steps.pop().unwrap();
    let right = build(steps, leaf);

    let proof = Proof { conclusion: root, rule: RuleInstance::on_out(RuleId::AndR, w), premises: vec![left, right] };
    (logic, goal, proof)
}

pub const ATOMS: [&str; 3] = ["p", "q", "r"];

/// A random formula over `p, q, r` and the characters `a`, `a^`.
pub fn random_formula(rng: &mut StdRng, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.05) { Formula::Bottom } else { Formula::atom(ATOMS[rng.gen_range(0..ATOMS.len())]) };
    }
    let sub = |rng: &mut StdRng| random_formula(rng, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::and(sub(rng), sub(rng)),
        1 => Formula::or(sub(rng), sub(rng)),
        2 => Formula::imp(sub(rng), sub(rng)),
        3 => Formula::dia(if rng.gen_bool(0.8) { c("a") } else { c("a^") }, sub(rng)),
        _ => Formula::boxed(if rng.gen_bool(0.8) { c("a") } else { c("a^") }, sub(rng)),
    }
}

/// Formulas over `p, q, r` and the characters `a`, `a^`, `b`.
pub fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![1 => Just(Formula::Bottom), 6 => prop::sample::select(ATOMS.to_vec()).prop_map(Formula::atom)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let ch = prop::sample::select(vec![c("a"), c("a^"), c("b")]);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (ch.clone(), inner.clone()).prop_map(|(x, a)| Formula::dia(x, a)),
            (ch, inner).prop_map(|(x, a)| Formula::boxed(x, a)),
        ]
    })
}

/// Implications valid in every logic, instantiated with random subformulas.
pub fn random_theorem(rng: &mut StdRng) -> Formula {
    let x = random_formula(rng, 1);
    let y = random_formula(rng, 1);
    let z = random_formula(rng, 1);
    let a = c("a");
    let b = c("a^");
    let (imp, and, or) = (Formula::imp, Formula::and, Formula::or);
    let bx = |f: Formula| Formula::boxed(a.clone(), f);
    let dx = |f: Formula| Formula::dia(a.clone(), f);
    match rng.gen_range(0..16) {
        0 => imp(x.clone(), x),
        1 => imp(and(x.clone(), y.clone()), and(y, x)),
        2 => imp(x.clone(), or(x, y)),
        3 => imp(or(x.clone(), y.clone()), or(y, x)),
        4 => imp(x.clone(), imp(y, x)),
        5 => imp(and(x.clone(), imp(x, y.clone())), y),
        6 => imp(bx(and(x.clone(), y)), bx(x)),
        7 => imp(and(bx(x.clone()), bx(y.clone())), bx(and(x, y))),
        8 => imp(dx(and(x.clone(), y)), dx(x)),
        9 => imp(or(dx(x.clone()), dx(y.clone())), dx(or(x, y))),
        10 => imp(bx(imp(x.clone(), y.clone())), imp(dx(x), dx(y))),
        11 => imp(x.clone(), bx(Formula::dia(b, x))),
        12 => imp(Formula::Bottom, x),
        13 => imp(and(x.clone(), y.clone()), or(y, z)),
        14 => imp(imp(x.clone(), y.clone()), imp(imp(y, z.clone()), imp(x, z))),
        _ => imp(and(bx(x.clone()), dx(y.clone())), dx(and(x, y))),
    }
}

pub const CORPUS_BUDGET: SearchBudget = SearchBudget { max_noninvertible: 8, max_propagations_per_pair: 1, max_new_components: 6 };

/// `count` distinct random theorems with their proofs under `logic`.
pub fn theorem_corpus(seed: u64, count: usize, logic: &Logic) -> Vec<(Formula, Proof)> {
    let mut r = rng(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 20 * count {
        tries += 1;
        let goal = random_theorem(&mut r);
        if !seen.insert(goal.clone()) {
            continue;
        }
        if let Ok(p) = prove_formula(&goal, logic, CORPUS_BUDGET) {
            out.push((goal, p));
        }
    }
    out
}

/// Proofs of sequents `A => B` (the premise of each theorem's impR), so that
/// antecedents are populated.
pub fn sequent_corpus(seed: u64, count: usize, logic: &Logic) -> Vec<Proof> {
    theorem_corpus(seed, count, logic)
        .into_iter()
        .filter_map(|(goal, _)| {
            let Formula::Imp(a, b) = goal else { return None };
            let g = NestedSequent::flat(vec![(*a).clone()], Some((*b).clone()));
            prove(&g, logic, CORPUS_BUDGET).ok()
        })
        .collect()
}

pub fn modal_logics() -> Vec<(&'static str, Logic)> {
    let a = c("a");
    vec![
        ("T", Logic::new(AxiomSet::empty().with_path(a.clone(), vec![])).unwrap()),
        ("4", Logic::new(AxiomSet::empty().with_path(a.clone(), vec![a.clone(), a.clone()])).unwrap()),
    ]
}

/// Random path axioms over `a, b` whose grammar has at most `max_prods`
/// productions; each axiom contributes itself and its converse.
pub fn random_axioms(rng: &mut StdRng, max_prods: usize) -> AxiomSet {
    let chars = [c("a"), c("a^"), c("b"), c("b^")];
    let n = rng.gen_range(0..=max_prods / 2);
    let mut ax = AxiomSet::empty();
    for _ in 0..n {
        let lhs = chars[rng.gen_range(0..4)].clone();
        let len = rng.gen_range(0..=2);
        let rhs = (0..len).map(|_| chars[rng.gen_range(0..4)].clone()).collect();
        ax.paths.push(PathAxiom { lhs, rhs });
    }
    ax
}

/// A random tree-shaped nested sequent with at most `max_nodes` components.
pub fn random_tree(rng: &mut StdRng, max_nodes: usize) -> NestedSequent {
    let chars = [c("a"), c("a^"), c("b"), c("b^")];
    let n = rng.gen_range(1..=max_nodes);
    let mut g = NestedSequent::flat(vec![], None);
    for i in 1..n {
        let parent = Name(rng.gen_range(0..i) as u32);
        let x = chars[rng.gen_range(0..4)].clone();
        g.find_mut(parent).unwrap().children.push((x, NestedSequent::leaf(Name(i as u32), vec![], None)));
    }
    g
}

/// Shortest known witness word for each `(x, u, v)` with `u -x-> v`.
pub type Witnesses = BTreeMap<(Character, Name, Name), Vec<Character>>;

/// Naive closure independent of `Reachability`: every fact carries a walk
/// word derived from its character, kept shortest by relaxation.
pub fn witness_words(grammar: &Grammar, pg: &PropagationGraph) -> Witnesses {
    let mut facts = Witnesses::new();
    let better = |facts: &mut Witnesses, key: (Character, Name, Name), w: Vec<Character>| match facts.get(&key) {
        Some(old) if old.len() <= w.len() => false,
        _ => {
            facts.insert(key, w);
            true
        }
    };
    for (u, x, v) in &pg.edges {
        better(&mut facts, (x.clone(), *u, *v), vec![x.clone()]);
    }
    loop {
        let mut changed = false;
        for (x, rhs) in &grammar.productions {
            for &u in &pg.nodes {
                let mut cur = BTreeMap::from([(u, Vec::new())]);
                for y in rhs {
                    let mut next: BTreeMap<Name, Vec<Character>> = BTreeMap::new();
                    for (m, w) in &cur {
                        for &v in &pg.nodes {
                            if let Some(s) = facts.get(&(y.clone(), *m, v)) {
                                let t = [w.as_slice(), s.as_slice()].concat();
                                if next.get(&v).map_or(true, |o| o.len() > t.len()) {
                                    next.insert(v, t);
                                }
                            }
                        }
                    }
                    cur = next;
                }
                for (v, w) in cur {
                    changed |= better(&mut facts, (x.clone(), u, v), w);
                }
            }
        }
        if !changed {
            return facts;
        }
    }
}

/// Whether `word` labels some walk from `u` to `v`.
pub fn is_walk(pg: &PropagationGraph, u: Name, word: &[Character], v: Name) -> bool {
    let mut at = BTreeSet::from([u]);
    for x in word {
        at = pg.edges.iter().filter(|(a, y, _)| at.contains(a) && y == x).map(|(_, _, b)| *b).collect();
    }
    at.contains(&v)
}
