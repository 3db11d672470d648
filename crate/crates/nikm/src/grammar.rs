//! Axiom sets, their grammars, and the propagation side condition decided by
//! CFL-reachability over propagation graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{converse_string, Character};
use crate::sequent::{Name, PropagationGraph};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathAxiom {
    pub lhs: Character,
    pub rhs: Vec<Character>,
}

/// Seriality axioms and intuitionistic path axioms. An empty alphabet leaves
/// the alphabet open.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomSet {
    #[serde(default)]
    pub alphabet: BTreeSet<String>,
    #[serde(default)]
    pub serial: BTreeSet<Character>,
    #[serde(default)]
    pub paths: Vec<PathAxiom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("character `{0}` is not in the alphabet")]
    Alphabet(String),
    #[error("axiom file: {0}")]
    Json(String),
}

impl AxiomSet {
    pub fn empty() -> Self {
        AxiomSet::default()
    }

    pub fn from_json(text: &str) -> Result<Self, GrammarError> {
        let ax: AxiomSet = serde_json::from_str(text).map_err(|e| GrammarError::Json(e.to_string()))?;
        ax.validate()?;
        Ok(ax)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("axiom sets serialize")
    }

    pub fn with_path(mut self, lhs: Character, rhs: Vec<Character>) -> Self {
        self.paths.push(PathAxiom { lhs, rhs });
        self
    }

    pub fn with_serial(mut self, x: Character) -> Self {
        self.serial.insert(x);
        self
    }

    pub fn allows(&self, x: &Character) -> bool {
        self.alphabet.is_empty() || self.alphabet.contains(&x.base)
    }

    pub fn validate(&self) -> Result<(), GrammarError> {
        let all = self.serial.iter().chain(self.paths.iter().flat_map(|p| std::iter::once(&p.lhs).chain(p.rhs.iter())));
        for x in all {
            if !self.allows(x) {
                return Err(GrammarError::Alphabet(x.to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Grammar {
    pub productions: BTreeSet<(Character, Vec<Character>)>,
}

impl Grammar {
    pub fn characters(&self) -> BTreeSet<Character> {
        let mut out = BTreeSet::new();
        for (l, r) in &self.productions {
            out.insert(l.clone());
            out.extend(r.iter().cloned());
        }
        out
    }
}

/// Adds x -> s and conv(x) -> conv(s) for every path axiom, where conv
/// reverses the string and converts each character.
pub fn build_grammar(axioms: &AxiomSet) -> Result<Grammar, GrammarError> {
    axioms.validate()?;
    let mut productions = BTreeSet::new();
    for p in &axioms.paths {
        productions.insert((p.lhs.clone(), p.rhs.clone()));
        productions.insert((p.lhs.converse(), converse_string(&p.rhs)));
    }
    Ok(Grammar { productions })
}

/// An axiom set paired with its compiled grammar.
#[derive(Clone, Debug, Default)]
pub struct Logic {
    pub axioms: AxiomSet,
    pub grammar: Grammar,
}

impl Logic {
    pub fn new(axioms: AxiomSet) -> Result<Self, GrammarError> {
        let grammar = build_grammar(&axioms)?;
        Ok(Logic { axioms, grammar })
    }

    pub fn base() -> Self {
        Logic::default()
    }

    pub fn is_serial(&self, x: &Character) -> bool {
        self.axioms.serial.contains(x)
    }
}

/// Whether `x` rewrites to `s` in at most `bound` one-step rewrites.
/// Computes the fewest rewrites deriving each substring of `s` from each
/// character, by relaxation to a fixpoint; exists as a test oracle.
pub fn derives_bounded(g: &Grammar, x: &Character, s: &[Character], bound: usize) -> bool {
    let n = s.len();
    let mut cost: HashMap<(&Character, usize, usize), usize> = HashMap::new();
    for (i, c) in s.iter().enumerate() {
        cost.insert((c, i, i + 1), 0);
    }
    loop {
        let mut changed = false;
        for (lhs, rhs) in &g.productions {
            for i in 0..=n {
                for j in i..=n {
                    let Some(c) = sequence_cost(&cost, rhs, i, j) else { continue };
                    let c = c + 1;
                    if c <= bound && cost.get(&(lhs, i, j)).map_or(true, |&old| c < old) {
                        cost.insert((lhs, i, j), c);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    cost.get(&(x, 0, n)).is_some_and(|&c| c <= bound)
}

/// Fewest rewrites turning the sequence `rhs` into `s[i..j]`.
fn sequence_cost(cost: &HashMap<(&Character, usize, usize), usize>, rhs: &[Character], i: usize, j: usize) -> Option<usize> {
    let len = j - i;
    let mut best: Vec<Option<usize>> = vec![None; len + 1];
    best[0] = Some(0);
    for y in rhs {
        let mut next = vec![None; len + 1];
        for p in 0..=len {
            let Some(b) = best[p] else { continue };
            for q in p..=len {
                if let Some(&c) = cost.get(&(y, i + p, i + q)) {
                    next[q] = Some(next[q].map_or(b + c, |old: usize| old.min(b + c)));
                }
            }
        }
        best = next;
    }
    best[len]
}

/// All-pairs solution of the CFL-reachability problem for the languages
/// L(x), over one propagation graph.
#[derive(Clone, Debug, Default)]
pub struct Reachability {
    by_char: HashMap<Character, BTreeMap<Name, BTreeSet<Name>>>,
    nodes: Vec<Name>,
}

impl Reachability {
    pub fn compute(g: &Grammar, pg: &PropagationGraph) -> Self {
        let mut chars: BTreeSet<Character> = g.characters();
        chars.extend(pg.edges.iter().map(|e| e.1.clone()));
        let base: BTreeMap<Character, usize> = chars.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();

        // Binarized productions over nonterminal ids.
        let mut next_id = base.len();
        let mut eps: Vec<usize> = Vec::new();
        let mut unary: Vec<(usize, usize)> = Vec::new();
        let mut binary: Vec<(usize, usize, usize)> = Vec::new();
        for (lhs, rhs) in &g.productions {
            let x = base[lhs];
            let ids: Vec<usize> = rhs.iter().map(|c| base[c]).collect();
            match ids.len() {
                0 => eps.push(x),
                1 => unary.push((x, ids[0])),
                _ => {
                    let mut head = x;
                    for k in 0..ids.len() - 2 {
                        let fresh = next_id;
                        next_id += 1;
                        binary.push((head, ids[k], fresh));
                        head = fresh;
                    }
                    binary.push((head, ids[ids.len() - 2], ids[ids.len() - 1]));
                }
            }
        }
        let mut unary_by_rhs: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(x, a) in &unary {
            unary_by_rhs.entry(a).or_default().push(x);
        }
        let mut by_first: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        let mut by_second: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for &(x, a, b) in &binary {
            by_first.entry(a).or_default().push((x, b));
            by_second.entry(b).or_default().push((x, a));
        }

        let mut facts: HashSet<(Name, usize, Name)> = HashSet::new();
        let mut out: HashMap<(Name, usize), Vec<Name>> = HashMap::new();
        let mut inc: HashMap<(Name, usize), Vec<Name>> = HashMap::new();
        let mut work: VecDeque<(Name, usize, Name)> = VecDeque::new();
        let add = |f: (Name, usize, Name), work: &mut VecDeque<_>, facts: &mut HashSet<_>, out: &mut HashMap<_, Vec<Name>>, inc: &mut HashMap<_, Vec<Name>>| {
            if facts.insert(f) {
                out.entry((f.0, f.1)).or_default().push(f.2);
                inc.entry((f.2, f.1)).or_default().push(f.0);
                work.push_back(f);
            }
        };
        for (u, c, v) in &pg.edges {
            add((*u, base[c], *v), &mut work, &mut facts, &mut out, &mut inc);
        }
        for &x in &eps {
            for &n in &pg.nodes {
                add((n, x, n), &mut work, &mut facts, &mut out, &mut inc);
            }
        }
        while let Some((u, a, v)) = work.pop_front() {
            if let Some(xs) = unary_by_rhs.get(&a) {
                for &x in xs {
                    add((u, x, v), &mut work, &mut facts, &mut out, &mut inc);
                }
            }
            if let Some(rules) = by_first.get(&a) {
                for &(x, b) in rules {
                    let ws = out.get(&(v, b)).cloned().unwrap_or_default();
                    for w in ws {
                        add((u, x, w), &mut work, &mut facts, &mut out, &mut inc);
                    }
                }
            }
            if let Some(rules) = by_second.get(&a) {
                for &(x, b) in rules {
                    let ts = inc.get(&(u, b)).cloned().unwrap_or_default();
                    for t in ts {
                        add((t, x, v), &mut work, &mut facts, &mut out, &mut inc);
                    }
                }
            }
        }

        let chars: Vec<Character> = chars.into_iter().collect();
        let mut by_char: HashMap<Character, BTreeMap<Name, BTreeSet<Name>>> = HashMap::new();
        for (u, n, v) in facts {
            if n < chars.len() {
                by_char.entry(chars[n].clone()).or_default().entry(u).or_default().insert(v);
            }
        }
        Reachability { by_char, nodes: pg.nodes.clone() }
    }

    /// `{ u : source ->^{L(x)} u }`.
    pub fn reach(&self, source: Name, x: &Character) -> BTreeSet<Name> {
        self.by_char.get(x).and_then(|m| m.get(&source)).cloned().unwrap_or_default()
    }

    pub fn holds(&self, source: Name, x: &Character, target: Name) -> bool {
        self.by_char.get(x).and_then(|m| m.get(&source)).is_some_and(|s| s.contains(&target))
    }

    pub fn nodes(&self) -> &[Name] {
        &self.nodes
    }
}

/// `{ u : pg |= source ->^{L(x)} u }`.
pub fn reach(g: &Grammar, pg: &PropagationGraph, source: Name, x: &Character) -> BTreeSet<Name> {
    Reachability::compute(g, pg).reach(source, x)
}
