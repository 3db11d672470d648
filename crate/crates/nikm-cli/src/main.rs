//! Batch front end: `nikm <command> [flags]`. Machine output is JSON on
//! stdout; failures print a JSON reason on stderr and exit with 1 for a
//! negative answer or 2 for bad input.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nikm::calculus::{proof_from_json, proof_to_json, JsonMode};
use nikm::grammar::Reachability;
use nikm::interpolate::{lyndon_interpolant, Mode};
use nikm::search::{prove, SearchBudget, SearchError};
use nikm::semantics::{find_countermodel, SemanticsError};
use nikm::transform::eliminate_cut_monitored;
use nikm::{check_proof, parse_formula, AxiomSet, Character, Formula, Logic, Name, NestedSequent, Proof};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "nikm", version, about = "Proof search, checking, cut elimination and interpolation for intuitionistic grammar logics")]
struct Cli {
    /// Axiom set as JSON (`{"serial": [..], "paths": [{"lhs": .., "rhs": [..]}]}`); empty by default.
    #[arg(long, global = true, value_name = "FILE")]
    axioms: Option<PathBuf>,
    /// Non-invertible choices allowed along a branch.
    #[arg(long, global = true, default_value_t = 12)]
    max_branch: usize,
    /// Propagations of one formula to one component along a branch.
    #[arg(long, global = true, default_value_t = 1)]
    max_prop: usize,
    /// Components created along a branch.
    #[arg(long, global = true, default_value_t = 8)]
    max_fresh: usize,
    /// Human-readable output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a proof of a formula or of a sequent `Γ => A, (x)[..]`.
    Prove {
        #[arg(allow_hyphen_values = true)]
        goal: String,
    },
    /// Check a proof file.
    Check { proof: PathBuf },
    /// Eliminate a cut between a proof of `G↓{Γ => A}` and a proof of `G{Γ, A => Δ}`.
    Cutelim {
        left: PathBuf,
        right: PathBuf,
        /// Component of the right conclusion holding the cut formula.
        #[arg(long, default_value = "w0")]
        at: String,
        /// The cut formula.
        #[arg(long)]
        formula: String,
    },
    /// Prove `A -> B` and compute a Lyndon interpolant with its side proofs.
    Interpolate {
        goal: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Meet)]
        mode: ModeArg,
    },
    /// Search finite models for a countermodel.
    Countermodel {
        goal: String,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
    },
    /// Print the grammar of the axiom set and answer reachability queries on a sequent.
    GrammarReach {
        #[arg(allow_hyphen_values = true)]
        sequent: Option<String>,
        /// Restrict queries to this source component.
        #[arg(long)]
        from: Option<String>,
        /// Restrict queries to this character.
        #[arg(long = "char")]
        character: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Join,
    Meet,
}

enum Failure {
    /// No proof, no countermodel, or a rejected proof.
    Negative(Value),
    Input(Value),
}

type Outcome = Result<String, Failure>;

fn input(kind: &str, reason: impl ToString) -> Failure {
    Failure::Input(json!({ "error": kind, "reason": reason.to_string() }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Negative(v)) => {
            eprintln!("{v}");
            ExitCode::from(1)
        }
        Err(Failure::Input(v)) => {
            eprintln!("{v}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let logic = load_logic(cli.axioms.as_deref())?;
    let budget = SearchBudget { max_noninvertible: cli.max_branch, max_propagations_per_pair: cli.max_prop, max_new_components: cli.max_fresh };
    match &cli.command {
        Command::Prove { goal } => {
            let g = parse_goal(goal)?;
            match prove(&g, &logic, budget) {
                Ok(p) => emit_proof(&p, &logic, cli.pretty),
                Err(SearchError::NoProofWithinBudget) => Err(Failure::Negative(json!({ "error": "NoProofWithinBudget", "goal": g.to_string() }))),
                Err(e) => Err(input("sequent", e)),
            }
        }
        Command::Check { proof } => {
            let p = load_proof(proof, &logic)?;
            match check_proof(&p, &logic) {
                Ok(()) => render(&json!({ "valid": true, "conclusion": p.conclusion.to_string(), "height": p.height() }), cli.pretty),
                Err(e) => Err(Failure::Negative(json!({ "error": "CheckError", "path": e.path, "rule": e.rule.as_str(), "reason": e.reason }))),
            }
        }
        Command::Cutelim { left, right, at, formula } => {
            let (l, r) = (load_proof(left, &logic)?, load_proof(right, &logic)?);
            for (which, p) in [("left", &l), ("right", &r)] {
                check_proof(p, &logic).map_err(|e| input("CheckError", format!("{which} proof: {e}")))?;
            }
            let at = Name::parse(at).ok_or_else(|| input("name", format!("bad component name `{at}`")))?;
            let a = parse_formula(formula).map_err(|e| input("formula", e))?;
            let (p, stats) = eliminate_cut_monitored(&l, &r, at, &a, &logic).map_err(|e| input("cut", e))?;
            check_proof(&p, &logic).map_err(|e| Failure::Negative(json!({ "error": "CheckError", "reason": e.to_string() })))?;
            if cli.pretty {
                return Ok(format!("{}calls {}, measure violations {}", pretty_proof(&p), stats.calls, stats.measure_violations));
            }
            emit_proof(&p, &logic, false)
        }
        Command::Interpolate { goal, mode } => {
            let a = parse_formula(goal).map_err(|e| input("formula", e))?;
            if !matches!(a, Formula::Imp(..)) {
                return Err(input("formula", format!("`{a}` is not an implication")));
            }
            let p = match nikm::search::prove_formula(&a, &logic, budget) {
                Ok(p) => p,
                Err(SearchError::NoProofWithinBudget) => return Err(Failure::Negative(json!({ "error": "NoProofWithinBudget", "goal": a.to_string() }))),
                Err(e) => return Err(input("formula", e)),
            };
            let mode = match mode {
                ModeArg::Join => Mode::Join,
                ModeArg::Meet => Mode::Meet,
            };
            let r = lyndon_interpolant(&p, &logic, mode).map_err(|e| Failure::Negative(json!({ "error": "Interpolation", "reason": e.to_string() })))?;
            if cli.pretty {
                return Ok(format!("interpolant: {}\nA -> I:\n{}I -> B:\n{}", r.interpolant, pretty_proof(&r.proof_a_to_i), pretty_proof(&r.proof_i_to_b)));
            }
            let to_json = |q: &Proof| proof_to_json(q, JsonMode::Full, &logic).map_err(|e| input("proof", e));
            render(
                &json!({
                    "interpolant": r.interpolant.to_string(),
                    "pairs": r.pairs.to_json(),
                    "proof_A_to_I": to_json(&r.proof_a_to_i)?,
                    "proof_I_to_B": to_json(&r.proof_i_to_b)?,
                    "signature_check": "pass",
                }),
                false,
            )
        }
        Command::Countermodel { goal, max_worlds } => {
            let a = parse_formula(goal).map_err(|e| input("formula", e))?;
            match find_countermodel(&a, &logic.axioms, *max_worlds) {
                Ok(Some(c)) => render(&json!({ "model": c.model.to_json(), "world": c.world }), cli.pretty),
                Ok(None) => Err(Failure::Negative(json!({ "error": "NoCountermodel", "max_worlds": max_worlds }))),
                Err(e @ (SemanticsError::TooManyWorlds | SemanticsError::TooManyCharacters(_))) => Err(input("bounds", e)),
                Err(e) => Err(input("model", e)),
            }
        }
        Command::GrammarReach { sequent, from, character } => {
            let productions: Vec<Value> = logic.grammar.productions.iter().map(|(x, s)| json!([x.to_string(), s.iter().map(Character::to_string).collect::<Vec<_>>()])).collect();
            let mut out = json!({ "productions": productions });
            if let Some(text) = sequent {
                let g = NestedSequent::parse(text).map_err(|e| input("sequent", e))?;
                let pg = g.propagation_graph();
                let table = Reachability::compute(&logic.grammar, &pg);
                let sources: Vec<Name> = match from {
                    Some(s) => vec![Name::parse(s).filter(|n| g.find(*n).is_some()).ok_or_else(|| input("name", format!("no component `{s}`")))?],
                    None => g.names(),
                };
                let chars: BTreeSet<Character> = match character {
                    Some(c) => BTreeSet::from([Character::parse(c).map_err(|e| input("character", e))?]),
                    None => logic.grammar.characters().into_iter().chain(pg.edges.iter().map(|(_, x, _)| x.clone())).collect(),
                };
                let queries: Vec<Value> = sources
                    .iter()
                    .flat_map(|&w| chars.iter().map(move |x| (w, x)))
                    .map(|(w, x)| json!({ "from": w.to_string(), "char": x.to_string(), "reach": table.reach(w, x).iter().map(Name::to_string).collect::<Vec<_>>() }))
                    .collect();
                out["queries"] = Value::Array(queries);
            }
            render(&out, cli.pretty)
        }
    }
}

fn load_logic(path: Option<&Path>) -> Result<Logic, Failure> {
    let Some(path) = path else { return Ok(Logic::base()) };
    let text = fs::read_to_string(path).map_err(|e| input("io", format!("{}: {e}", path.display())))?;
    let axioms = AxiomSet::from_json(&text).map_err(|e| input("axioms", e))?;
    Logic::new(axioms).map_err(|e| input("axioms", e))
}

fn load_proof(path: &Path, logic: &Logic) -> Result<Proof, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input("io", format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| input("json", e))?;
    proof_from_json(&v, logic).map_err(|e| input("proof", e))
}

/// A sequent if the text has `=>`, otherwise a formula to prove at the root.
fn parse_goal(text: &str) -> Result<NestedSequent, Failure> {
    if text.contains("=>") {
        NestedSequent::parse(text).map_err(|e| input("sequent", e))
    } else {
        let a = parse_formula(text).map_err(|e| input("formula", e))?;
        Ok(NestedSequent::flat(vec![], Some(a)))
    }
}

fn emit_proof(p: &Proof, logic: &Logic, pretty: bool) -> Outcome {
    if pretty {
        return Ok(pretty_proof(p).trim_end().to_string());
    }
    let v = proof_to_json(p, JsonMode::Full, logic).map_err(|e| input("proof", e))?;
    render(&v, false)
}

fn render(v: &Value, pretty: bool) -> Outcome {
    Ok(if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) }.expect("values serialize"))
}

/// One line per inference, premises indented under their conclusion.
fn pretty_proof(p: &Proof) -> String {
    fn go(p: &Proof, depth: usize, out: &mut String) {
        out.push_str(&format!("{}{}  [{} at {}]\n", "  ".repeat(depth), p.conclusion, p.rule.rule.as_str(), p.rule.at));
        for q in &p.premises {
            go(q, depth + 1, out);
        }
    }
    let mut out = String::new();
    go(p, 0, &mut out);
    out
}
