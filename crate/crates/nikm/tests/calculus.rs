mod common;

use common::{c, f, ipa_example, random_formula, random_tree, rng, theorem_corpus};
use nikm::calculus::{proof_from_json, proof_to_json, Address, JsonMode, RuleError};
use nikm::search::{prove, SearchBudget};
use nikm::sequent::GentzenSequent;
use nikm::{apply_backward, check_proof, AxiomSet, Logic, Name, NestedSequent, Proof, RuleId, RuleInstance};
use rand::Rng;

fn seq(s: &str) -> NestedSequent {
    NestedSequent::parse(s).unwrap()
}

/// Every instance addressable in `g`: each rule on each formula, propagations
/// to each component along each character, and dX at each component.
fn instances(g: &NestedSequent) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    let chars = [c("a"), c("a^")];
    for node in g.nodes() {
        let w = node.name;
        for rule in RuleId::ALL {
            for i in 0..node.ant.len() {
                out.push(RuleInstance::on_ant(rule, w, i));
            }
            out.push(RuleInstance::on_out(rule, w));
        }
        for t in g.names() {
            for x in &chars {
                for i in 0..node.ant.len() {
                    out.push(RuleInstance::propagate(RuleId::BoxLProp, w, Address::ant(i), t, x.clone()));
                }
                out.push(RuleInstance::propagate(RuleId::DiaRProp, w, Address::out(), t, x.clone()));
            }
        }
        for x in &chars {
            out.push(RuleInstance::serial(w, x.clone()));
        }
    }
    out
}

#[test]
fn path_axiom_examples_check() {
    for n in 1..=4 {
        let (logic, goal, p) = ipa_example(n);
        assert_eq!(p.conclusion.out.as_ref(), Some(&goal));
        assert_eq!(check_proof(&p, &logic), Ok(()), "n = {n}");
        assert!(check_proof(&p, &Logic::base()).is_err(), "n = {n}");
    }
}

#[test]
fn premises_keep_one_output() {
    let mut r = rng(31);
    let logics = [Logic::base(), Logic::new(AxiomSet::empty().with_serial(c("a")).with_path(c("a"), vec![c("a"), c("a")])).unwrap()];
    let mut applied = 0;
    for _ in 0..60 {
        let mut g = random_tree(&mut r, 4);
        for w in g.names() {
            g.find_mut(w).unwrap().ant = (0..r.gen_range(0..3)).map(|_| random_formula(&mut r, 2)).collect();
        }
        let names = g.names();
        g.find_mut(names[r.gen_range(0..names.len())]).unwrap().out = Some(random_formula(&mut r, 2));
        for logic in &logics {
            for inst in instances(&g) {
                if let Ok(ps) = apply_backward(&g, &inst, logic) {
                    applied += 1;
                    assert_eq!(ps.len(), inst.rule.arity(), "{inst:?}");
                    for q in ps {
                        assert!(q.output_count() <= 1, "{g} / {inst:?} / {q}");
                        assert!(q.validate().is_ok());
                    }
                }
            }
        }
    }
    assert!(applied >= 300, "{applied}");
}

#[test]
fn generalized_identity_is_derivable() {
    let mut r = rng(32);
    let budget = SearchBudget::default();
    let logic = Logic::base();
    let mut tried = 0;
    while tried < 150 {
        let a = random_formula(&mut r, 3);
        if a.length() > 6 {
            continue;
        }
        tried += 1;
        let mut g = random_tree(&mut r, 4);
        let names = g.names();
        let w = names[r.gen_range(0..names.len())];
        let side = random_formula(&mut r, 1);
        g = g.graft(names[0], &GentzenSequent { ant: vec![side], out: None }).unwrap();
        g = g.graft(w, &GentzenSequent { ant: vec![a.clone()], out: Some(a.clone()) }).unwrap();
        let p = prove(&g, &logic, budget).unwrap_or_else(|e| panic!("{g}: {e}"));
        assert_eq!(check_proof(&p, &logic), Ok(()));
    }
}

#[test]
fn tampering_is_rejected_with_a_path() {
    let logic = Logic::base();
    let (_, p) = theorem_corpus(33, 10, &logic).into_iter().find(|(_, p)| p.height() >= 3).unwrap();
    let mut bad = p.clone();
    let mut node = &mut bad;
    let mut path = vec![];
    while !node.premises.is_empty() {
        path.push(0);
        node = &mut node.premises[0];
    }
    node.rule = RuleInstance::on_out(RuleId::BotL, node.rule.at);
    let e = check_proof(&bad, &logic).unwrap_err();
    assert_eq!(e.path, path);

    let mut bad = p.clone();
    bad.rule = RuleInstance::on_out(RuleId::OrR1, bad.rule.at);
    assert_eq!(check_proof(&bad, &logic).unwrap_err().path, Vec::<usize>::new());
}

#[test]
fn json_round_trips() {
    let logic = Logic::base();
    for (_, p) in theorem_corpus(34, 20, &logic) {
        for mode in [JsonMode::Full, JsonMode::Compact] {
            let v = proof_to_json(&p, mode, &logic).unwrap();
            let q: Proof = proof_from_json(&v, &logic).unwrap();
            assert_eq!(check_proof(&q, &logic), Ok(()));
            assert!(q.conclusion.canon_eq(&p.conclusion));
            assert_eq!(q.height(), p.height());
        }
    }
    assert!(proof_from_json(&serde_json::json!({"rule": "nope"}), &logic).is_err());
}

#[test]
fn side_conditions() {
    let g = seq("[a]p => -, (a)[- => -, (a)[- => p]]");
    let base = Logic::base();
    let four = Logic::new(AxiomSet::empty().with_path(c("a"), vec![c("a"), c("a")])).unwrap();
    let inst = RuleInstance::propagate(RuleId::BoxLProp, Name(0), Address::ant(0), Name(2), c("a"));
    assert!(matches!(apply_backward(&g, &inst, &base), Err(RuleError::SideCondition { .. })));
    let ps = apply_backward(&g, &inst, &four).unwrap();
    assert_eq!(ps[0].find(Name(2)).unwrap().ant, vec![f("p")]);

    let serial = Logic::new(AxiomSet::empty().with_serial(c("a"))).unwrap();
    let d = RuleInstance::serial(Name(0), c("a"));
    assert_eq!(apply_backward(&seq("- => p"), &d, &base), Err(RuleError::NotSerial(c("a"))));
    let ps = apply_backward(&seq("- => p"), &d, &serial).unwrap();
    assert_eq!(ps[0].names().len(), 2);
}
