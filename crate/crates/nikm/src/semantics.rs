//! Finite bi-relational models: validation, evaluation of formulas and
//! nested sequents, and exhaustive enumeration of small models.
//!
//! Worlds are `0..n` with `n <= 4`; sets of worlds are bitmasks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Character, Formula};
use crate::grammar::AxiomSet;
use crate::par;
use crate::sequent::{Name, NestedSequent};

pub const MAX_WORLDS: usize = 4;
pub const MAX_FORWARD_CHARACTERS: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub worlds: usize,
    /// `leq[w]` is the set of `u` with `w <= u`.
    pub leq: Vec<u64>,
    /// `rel[x][w]` is the set of `x`-successors of `w`.
    pub rel: BTreeMap<Character, Vec<u64>>,
    /// Worlds where each atom holds.
    pub valuation: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("model enumeration supports at most {MAX_WORLDS} worlds")]
    TooManyWorlds,
    #[error("model enumeration supports at most {MAX_FORWARD_CHARACTERS} forward characters, got {0}")]
    TooManyCharacters(usize),
    #[error("model JSON: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: &'static str,
    pub detail: String,
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn all_worlds(n: usize) -> u64 {
    (1u64 << n) - 1
}

fn compose(n: usize, r: &[u64], s: &[u64]) -> Vec<u64> {
    (0..n).map(|w| bits(r[w]).fold(0, |acc, v| acc | s[v])).collect()
}

impl Model {
    /// Successor masks of `x`, empty when `x` is not interpreted.
    pub fn relation(&self, x: &Character) -> Vec<u64> {
        self.rel.get(x).cloned().unwrap_or_else(|| vec![0; self.worlds])
    }

    pub fn holds(&self, w: usize, atom: &str) -> bool {
        self.valuation.get(atom).is_some_and(|m| m >> w & 1 == 1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs = |rows: &[u64]| -> Vec<[usize; 2]> { (0..self.worlds).flat_map(|w| bits(rows[w]).map(move |u| [w, u])).collect() };
        let mut valuation: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for w in 0..self.worlds {
            let atoms = self.valuation.iter().filter(|(_, m)| *m >> w & 1 == 1).map(|(p, _)| p.clone()).collect();
            valuation.insert(w.to_string(), atoms);
        }
        let j = ModelJson {
            worlds: self.worlds,
            leq: pairs(&self.leq),
            rel: self.rel.iter().map(|(x, r)| (x.to_string(), pairs(r))).collect(),
            valuation,
        };
        serde_json::to_value(j).expect("models serialize")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Model, SemanticsError> {
        let j: ModelJson = serde_json::from_value(v.clone()).map_err(|e| SemanticsError::Json(e.to_string()))?;
        if j.worlds > 64 {
            return Err(SemanticsError::Json("too many worlds".into()));
        }
        let rows = |ps: &[[usize; 2]]| -> Result<Vec<u64>, SemanticsError> {
            let mut r = vec![0u64; j.worlds];
            for [a, b] in ps {
                if *a >= j.worlds || *b >= j.worlds {
                    return Err(SemanticsError::Json(format!("world out of range in ({a}, {b})")));
                }
                r[*a] |= 1 << b;
            }
            Ok(r)
        };
        let mut rel = BTreeMap::new();
        for (x, ps) in &j.rel {
            rel.insert(Character::parse(x).map_err(|e| SemanticsError::Json(e.to_string()))?, rows(ps)?);
        }
        let mut valuation: BTreeMap<String, u64> = BTreeMap::new();
        for (w, atoms) in &j.valuation {
            let w: usize = w.parse().map_err(|_| SemanticsError::Json(format!("bad world `{w}`")))?;
            if w >= j.worlds {
                return Err(SemanticsError::Json(format!("world {w} out of range")));
            }
            for p in atoms {
                *valuation.entry(p.clone()).or_default() |= 1 << w;
            }
        }
        Ok(Model { worlds: j.worlds, leq: rows(&j.leq)?, rel, valuation })
    }
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    worlds: usize,
    leq: Vec<[usize; 2]>,
    rel: BTreeMap<String, Vec<[usize; 2]>>,
    valuation: BTreeMap<String, Vec<String>>,
}

fn f1(n: usize, leq: &[u64], r: &[u64]) -> Option<(usize, usize, usize)> {
    for w in 0..n {
        for w2 in bits(leq[w]) {
            for v in bits(r[w]) {
                if r[w2] & leq[v] == 0 {
                    return Some((w, w2, v));
                }
            }
        }
    }
    None
}

fn f2(n: usize, leq: &[u64], r: &[u64]) -> Option<(usize, usize, usize)> {
    for w in 0..n {
        for v in bits(r[w]) {
            for v2 in bits(leq[v]) {
                if !bits(leq[w]).any(|w2| r[w2] >> v2 & 1 == 1) {
                    return Some((w, v, v2));
                }
            }
        }
    }
    None
}

fn converse_rel(n: usize, r: &[u64]) -> Vec<u64> {
    let mut c = vec![0u64; n];
    for w in 0..n {
        for v in bits(r[w]) {
            c[v] |= 1 << w;
        }
    }
    c
}

fn path_violation(n: usize, rel: &dyn Fn(&Character) -> Vec<u64>, lhs: &Character, rhs: &[Character]) -> Option<(usize, usize)> {
    let mut comp: Vec<u64> = (0..n).map(|w| 1u64 << w).collect();
    for c in rhs {
        comp = compose(n, &comp, &rel(c));
    }
    let target = rel(lhs);
    (0..n).find_map(|w| bits(comp[w] & !target[w]).next().map(|u| (w, u)))
}

/// Checks the preorder, (F1)-(F3), monotonicity, and the frame conditions of
/// the axioms. Violations are returned as data.
pub fn validate_model(m: &Model, axioms: &AxiomSet) -> Result<(), Vec<Violation>> {
    let n = m.worlds;
    let mut v = Vec::new();
    let mut push = |condition: &'static str, detail: String| v.push(Violation { condition, detail });
    if m.leq.len() != n || m.rel.values().any(|r| r.len() != n) {
        push("shape", "relation rows do not match the number of worlds".into());
        return Err(v);
    }
    for w in 0..n {
        if m.leq[w] >> w & 1 == 0 {
            push("preorder", format!("{w} <= {w} fails"));
        }
        for u in bits(m.leq[w]) {
            if m.leq[u] & !m.leq[w] != 0 {
                push("preorder", format!("transitivity fails through {w} <= {u}"));
            }
        }
    }
    let mut chars: BTreeSet<Character> = m.rel.keys().cloned().collect();
    chars.extend(m.rel.keys().map(Character::converse));
    for x in &chars {
        let r = m.relation(x);
        if let Some((w, w2, u)) = f1(n, &m.leq, &r) {
            push("F1", format!("{w} <= {w2}, {w} R_{x} {u}, no matching successor of {w2}"));
        }
        if let Some((w, u, u2)) = f2(n, &m.leq, &r) {
            push("F2", format!("{w} R_{x} {u}, {u} <= {u2}, no matching predecessor of {u2}"));
        }
        let c = m.relation(&x.converse());
        if converse_rel(n, &r) != c {
            push("F3", format!("R_{x} is not the converse of R_{}", x.converse()));
        }
    }
    for (p, mask) in &m.valuation {
        for w in bits(*mask) {
            if m.leq[w] & !mask != 0 {
                push("monotonicity", format!("{p} holds at {w} but not at every world above it"));
            }
        }
    }
    for x in &axioms.serial {
        let r = m.relation(x);
        if let Some(w) = (0..n).find(|&w| r[w] == 0) {
            push("seriality", format!("{w} has no {x}-successor"));
        }
    }
    for ax in &axioms.paths {
        if let Some((w, u)) = path_violation(n, &|c| m.relation(c), &ax.lhs, &ax.rhs) {
            push("path", format!("({w}, {u}) is in the composite relation for {} but not in R_{}", show_string(&ax.rhs), ax.lhs));
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

fn show_string(s: &[Character]) -> String {
    if s.is_empty() {
        return "eps".into();
    }
    s.iter().map(Character::to_string).collect::<Vec<_>>().join(" ")
}

/// A frame over a fixed character list, with relations indexed like `chars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub worlds: usize,
    pub leq: Vec<u64>,
    pub chars: Vec<Character>,
    pub rel: Vec<Vec<u64>>,
}

impl Frame {
    pub fn with_valuation(&self, atoms: &[String], val: &[u64]) -> Model {
        Model {
            worlds: self.worlds,
            leq: self.leq.clone(),
            rel: self.chars.iter().cloned().zip(self.rel.iter().cloned()).collect(),
            valuation: atoms.iter().cloned().zip(val.iter().copied()).collect(),
        }
    }

    fn from_model(m: &Model, extra: &BTreeSet<Character>) -> Frame {
        let mut chars: BTreeSet<Character> = m.rel.keys().cloned().collect();
        chars.extend(extra.iter().cloned());
        let chars: Vec<Character> = chars.into_iter().collect();
        let rel = chars.iter().map(|x| m.relation(x)).collect();
        Frame { worlds: m.worlds, leq: m.leq.clone(), chars, rel }
    }
}

#[derive(Clone, Debug)]
enum Op {
    Atom(Option<usize>),
    Bot,
    Or(usize, usize),
    And(usize, usize),
    Imp(usize, usize),
    Dia(Option<usize>, usize),
    Box(Option<usize>, usize),
}

/// Formulas compiled against a character list and an atom list, evaluated
/// bottom-up to world masks.
#[derive(Clone, Debug, Default)]
struct Program {
    ops: Vec<Op>,
    index: HashMap<Formula, usize>,
}

impl Program {
    fn add(&mut self, f: &Formula, chars: &[Character], atoms: &[String]) -> usize {
        if let Some(&i) = self.index.get(f) {
            return i;
        }
        let ch = |x: &Character| chars.iter().position(|c| c == x);
        let op = match f {
            Formula::Atom(p) => Op::Atom(atoms.iter().position(|a| **a == **p)),
            Formula::Bottom => Op::Bot,
            Formula::Or(a, b) => Op::Or(self.add(a, chars, atoms), self.add(b, chars, atoms)),
            Formula::And(a, b) => Op::And(self.add(a, chars, atoms), self.add(b, chars, atoms)),
            Formula::Imp(a, b) => Op::Imp(self.add(a, chars, atoms), self.add(b, chars, atoms)),
            Formula::Dia(x, a) => Op::Dia(ch(x), self.add(a, chars, atoms)),
            Formula::Box(x, a) => Op::Box(ch(x), self.add(a, chars, atoms)),
        };
        self.ops.push(op);
        self.index.insert(f.clone(), self.ops.len() - 1);
        self.ops.len() - 1
    }

    fn eval(&self, fr: &Frame, val: &[u64], out: &mut Vec<u64>) {
        let n = fr.worlds;
        out.clear();
        for op in &self.ops {
            let m = match *op {
                Op::Atom(i) => i.map_or(0, |i| val[i]),
                Op::Bot => 0,
                Op::Or(a, b) => out[a] | out[b],
                Op::And(a, b) => out[a] & out[b],
                Op::Imp(a, b) => {
                    let bad = out[a] & !out[b];
                    (0..n).filter(|&w| fr.leq[w] & bad == 0).fold(0, |acc, w| acc | 1 << w)
                }
                Op::Dia(c, a) => match c {
                    None => 0,
                    Some(c) => (0..n).filter(|&w| fr.rel[c][w] & out[a] != 0).fold(0, |acc, w| acc | 1 << w),
                },
                Op::Box(c, a) => match c {
                    None => all_worlds(n),
                    Some(c) => (0..n)
                        .filter(|&w| bits(fr.leq[w]).all(|u| fr.rel[c][u] & !out[a] == 0))
                        .fold(0, |acc, w| acc | 1 << w),
                },
            };
            out.push(m);
        }
    }
}

/// A nested sequent compiled for repeated validity checks.
#[derive(Clone, Debug)]
pub struct CompiledSequent {
    program: Program,
    /// Preorder components: (parent index and edge character, antecedent ops, output op).
    comps: Vec<(Option<(usize, Option<usize>)>, Vec<usize>, Option<usize>)>,
    names: Vec<Name>,
}

impl CompiledSequent {
    pub fn new(g: &NestedSequent, chars: &[Character], atoms: &[String]) -> Self {
        let mut program = Program::default();
        let nodes = g.nodes();
        let names: Vec<Name> = nodes.iter().map(|n| n.name).collect();
        let mut comps = Vec::new();
        for n in &nodes {
            let parent = g.parent_of(n.name).map(|(p, x)| {
                (names.iter().position(|&m| m == p).expect("parent is a node"), chars.iter().position(|c| *c == x))
            });
            let ant = n.ant.iter().map(|f| program.add(f, chars, atoms)).collect();
            let out = n.out.as_ref().map(|f| program.add(f, chars, atoms));
            comps.push((parent, ant, out));
        }
        CompiledSequent { program, comps, names }
    }

    /// Worlds at which each component fails: its antecedent holds there and
    /// its output does not.
    fn bad(&self, fr: &Frame, masks: &[u64]) -> Vec<u64> {
        let full = all_worlds(fr.worlds);
        self.comps
            .iter()
            .map(|(_, ant, out)| {
                let conj = ant.iter().fold(full, |acc, &i| acc & masks[i]);
                let disj = out.map_or(0, |i| masks[i]);
                conj & !disj
            })
            .collect()
    }

    /// An interpretation refuting the sequent, if one exists.
    pub fn refute(&self, fr: &Frame, val: &[u64]) -> Option<BTreeMap<Name, usize>> {
        let mut masks = Vec::with_capacity(self.program.ops.len());
        self.program.eval(fr, val, &mut masks);
        let mut feas = self.bad(fr, &masks);
        for i in (0..self.comps.len()).rev() {
            if let Some((p, c)) = self.comps[i].0 {
                let child = feas[i];
                let keep = (0..fr.worlds)
                    .filter(|&w| c.is_some_and(|c| fr.rel[c][w] & child != 0))
                    .fold(0, |acc, w| acc | 1 << w);
                feas[p] &= keep;
            }
        }
        let root = bits(feas[0]).next()?;
        let mut iota = BTreeMap::new();
        let mut world = vec![0usize; self.comps.len()];
        world[0] = root;
        iota.insert(self.names[0], root);
        for i in 1..self.comps.len() {
            let (p, c) = self.comps[i].0.expect("non-root has a parent");
            let succ = fr.rel[c.expect("feasible edge has a relation")][world[p]] & feas[i];
            world[i] = bits(succ).next().expect("feasibility propagates downwards");
            iota.insert(self.names[i], world[i]);
        }
        Some(iota)
    }

    pub fn valid_in(&self, fr: &Frame, val: &[u64]) -> bool {
        self.refute(fr, val).is_none()
    }
}

/// Whether `a` holds at world `w`.
pub fn eval_formula(m: &Model, w: usize, a: &Formula) -> bool {
    let mut cs = BTreeSet::new();
    a.characters(&mut cs);
    let fr = Frame::from_model(m, &cs);
    let atoms: Vec<String> = m.valuation.keys().cloned().collect();
    let val: Vec<u64> = m.valuation.values().copied().collect();
    let mut p = Program::default();
    let i = p.add(a, &fr.chars, &atoms);
    let mut masks = Vec::new();
    p.eval(&fr, &val, &mut masks);
    masks[i] >> w & 1 == 1
}

/// True iff some tree edge is not mapped into its relation, or some
/// component is satisfied at its world: an antecedent formula fails there or
/// the output holds there.
pub fn eval_sequent(m: &Model, iota: &BTreeMap<Name, usize>, g: &NestedSequent) -> bool {
    for (u, x, v) in g.tree_edges() {
        let r = m.relation(&x);
        if r[iota[&u]] >> iota[&v] & 1 == 0 {
            return true;
        }
    }
    g.nodes().iter().any(|n| {
        let w = iota[&n.name];
        n.ant.iter().any(|a| !eval_formula(m, w, a)) || n.out.as_ref().is_some_and(|o| eval_formula(m, w, o))
    })
}

/// All models over the given forward characters and atoms, up to isomorphism,
/// with at most `max_worlds` worlds and satisfying the axioms' conditions.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    pub chars: Vec<Character>,
    pub atoms: Vec<String>,
    pub frames: Vec<Frame>,
}

impl ModelSpace {
    pub fn new(forward: &BTreeSet<String>, atoms: &BTreeSet<String>, axioms: &AxiomSet, max_worlds: usize) -> Result<Self, SemanticsError> {
        if max_worlds > MAX_WORLDS {
            return Err(SemanticsError::TooManyWorlds);
        }
        let mut bases = forward.clone();
        bases.extend(axioms.serial.iter().map(|c| c.base.clone()));
        for p in &axioms.paths {
            bases.insert(p.lhs.base.clone());
            bases.extend(p.rhs.iter().map(|c| c.base.clone()));
        }
        if bases.len() > MAX_FORWARD_CHARACTERS {
            return Err(SemanticsError::TooManyCharacters(bases.len()));
        }
        let chars: Vec<Character> = bases.iter().flat_map(|b| [Character::forward(b.clone()), Character::backward(b.clone())]).collect();
        let mut frames = Vec::new();
        for n in 1..=max_worlds {
            frames.extend(frames_of_size(n, &chars, axioms));
        }
        Ok(ModelSpace { chars, atoms: atoms.iter().cloned().collect(), frames })
    }

    /// Every monotone valuation of the atoms on `fr`, in a fixed order.
    pub fn valuations(&self, fr: &Frame) -> Vec<Vec<u64>> {
        let ups = up_sets(fr);
        let mut out = vec![Vec::new()];
        for _ in &self.atoms {
            out = out.into_iter().flat_map(|v| ups.iter().map(move |&u| [v.as_slice(), &[u]].concat())).collect();
        }
        out
    }

    pub fn model_count(&self) -> usize {
        self.frames.iter().map(|f| up_sets(f).len().pow(self.atoms.len() as u32)).sum()
    }

    pub fn compile(&self, g: &NestedSequent) -> CompiledSequent {
        CompiledSequent::new(g, &self.chars, &self.atoms)
    }

    /// First model (in enumeration order) with an interpretation refuting `g`.
    pub fn refute(&self, g: &NestedSequent) -> Option<(Model, BTreeMap<Name, usize>)> {
        let c = self.compile(g);
        par::find_map_first(&self.frames, |fr| {
            self.valuations(fr).into_iter().find_map(|val| c.refute(fr, &val).map(|iota| (fr.with_valuation(&self.atoms, &val), iota)))
        })
    }

    /// Number of sequents in `gs` refuted somewhere in the space, checked in
    /// parallel over frames.
    pub fn count_refuted_par(&self, gs: &[NestedSequent]) -> usize {
        let cs: Vec<CompiledSequent> = gs.iter().map(|g| self.compile(g)).collect();
        let per_frame = par::map(&self.frames, |fr| self.refuted_in_frame(fr, &cs));
        merge_refuted(per_frame)
    }

    pub fn count_refuted_seq(&self, gs: &[NestedSequent]) -> usize {
        let cs: Vec<CompiledSequent> = gs.iter().map(|g| self.compile(g)).collect();
        let per_frame = par::map_seq(&self.frames, |fr| self.refuted_in_frame(fr, &cs));
        merge_refuted(per_frame)
    }

    /// Indices of sequents refuted by some valuation on `fr`.
    pub fn refuted_in_frame(&self, fr: &Frame, cs: &[CompiledSequent]) -> Vec<bool> {
        let mut hit = vec![false; cs.len()];
        for val in self.valuations(fr) {
            for (i, c) in cs.iter().enumerate() {
                if !hit[i] && !c.valid_in(fr, &val) {
                    hit[i] = true;
                }
            }
        }
        hit
    }
}

fn merge_refuted(per_frame: Vec<Vec<bool>>) -> usize {
    let Some(first) = per_frame.first() else { return 0 };
    (0..first.len()).filter(|&i| per_frame.iter().any(|h| h[i])).count()
}

fn up_sets(fr: &Frame) -> Vec<u64> {
    (0..1u64 << fr.worlds).filter(|&s| bits(s).all(|w| fr.leq[w] & !s == 0)).collect()
}

fn preorders(n: usize) -> Vec<Vec<u64>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for m in 0..1u64 << pairs.len() {
        let mut leq: Vec<u64> = (0..n).map(|w| 1 << w).collect();
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if m >> k & 1 == 1 {
                leq[a] |= 1 << b;
            }
        }
        if (0..n).all(|w| bits(leq[w]).all(|u| leq[u] & !leq[w] == 0)) {
            out.push(leq);
        }
    }
    out
}

fn relations(n: usize, leq: &[u64]) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for m in 0..1u64 << (n * n) {
        let r: Vec<u64> = (0..n).map(|w| (m >> (w * n)) & all_worlds(n)).collect();
        let c = converse_rel(n, &r);
        if f1(n, leq, &r).is_none() && f2(n, leq, &r).is_none() && f1(n, leq, &c).is_none() && f2(n, leq, &c).is_none() {
            out.push(r);
        }
    }
    out
}

fn permute(rows: &[u64], perm: &[usize]) -> Vec<u64> {
    let mut out = vec![0u64; rows.len()];
    for (w, &row) in rows.iter().enumerate() {
        out[perm[w]] = bits(row).fold(0, |acc, u| acc | 1 << perm[u]);
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Frames with exactly `n` worlds, one per isomorphism class.
fn frames_of_size(n: usize, chars: &[Character], axioms: &AxiomSet) -> Vec<Frame> {
    let perms = permutations(n);
    let forward: Vec<usize> = (0..chars.len()).filter(|&i| chars[i].is_forward()).collect();
    let mut out = Vec::new();
    for leq in preorders(n) {
        let rels = relations(n, &leq);
        let mut choice = vec![0usize; forward.len()];
        loop {
            let mut rel = vec![Vec::new(); chars.len()];
            for (k, &i) in forward.iter().enumerate() {
                rel[i] = rels[choice[k]].clone();
                rel[i + 1] = converse_rel(n, &rel[i]);
            }
            let fr = Frame { worlds: n, leq: leq.clone(), chars: chars.to_vec(), rel };
            if satisfies_axioms(&fr, axioms) && is_canonical(&fr, &perms) {
                out.push(fr);
            }
            // odometer over forward characters
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < rels.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    out
}

fn frame_key(leq: &[u64], rel: &[Vec<u64>]) -> Vec<u64> {
    let mut k = leq.to_vec();
    for r in rel {
        k.extend_from_slice(r);
    }
    k
}

fn is_canonical(fr: &Frame, perms: &[Vec<usize>]) -> bool {
    let key = frame_key(&fr.leq, &fr.rel);
    perms.iter().all(|p| {
        let rel: Vec<Vec<u64>> = fr.rel.iter().map(|r| permute(r, p)).collect();
        frame_key(&permute(&fr.leq, p), &rel) >= key
    })
}

fn satisfies_axioms(fr: &Frame, axioms: &AxiomSet) -> bool {
    let n = fr.worlds;
    let rel = |x: &Character| -> Vec<u64> {
        fr.chars.iter().position(|c| c == x).map(|i| fr.rel[i].clone()).unwrap_or_else(|| vec![0; n])
    };
    axioms.serial.iter().all(|x| rel(x).iter().all(|&r| r != 0))
        && axioms.paths.iter().all(|p| path_violation(n, &rel, &p.lhs, &p.rhs).is_none())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: Model,
    pub world: usize,
}

/// The first enumerated model (by size, then enumeration order) with a world
/// refuting `a`.
pub fn find_countermodel(a: &Formula, axioms: &AxiomSet, max_worlds: usize) -> Result<Option<Countermodel>, SemanticsError> {
    let g = NestedSequent::flat(vec![], Some(a.clone()));
    Ok(sequent_countermodel(&g, axioms, max_worlds)?.map(|(model, iota)| Countermodel { model, world: iota[&Name(0)] }))
}

/// A model and interpretation refuting `g`, searching models by size.
pub fn sequent_countermodel(g: &NestedSequent, axioms: &AxiomSet, max_worlds: usize) -> Result<Option<(Model, BTreeMap<Name, usize>)>, SemanticsError> {
    if max_worlds > MAX_WORLDS {
        return Err(SemanticsError::TooManyWorlds);
    }
    let (forward, atoms) = vocabulary(g);
    for n in 1..=max_worlds {
        let mut space = ModelSpace::new(&forward, &atoms, axioms, 0)?;
        space.frames = frames_of_size(n, &space.chars, axioms);
        if let Some(hit) = space.refute(g) {
            return Ok(Some(hit));
        }
    }
    Ok(None)
}

/// Forward character bases and atoms occurring in `g`.
pub fn vocabulary(g: &NestedSequent) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut chars = BTreeSet::new();
    let mut atoms = BTreeSet::new();
    for n in g.nodes() {
        for f in n.ant.iter().chain(n.out.iter()) {
            f.characters(&mut chars);
            f.atoms(&mut atoms);
        }
        for (x, _) in &n.children {
            chars.insert(x.clone());
        }
    }
    (chars.into_iter().map(|c| c.base).collect(), atoms.into_iter().map(|a| a.to_string()).collect())
}
