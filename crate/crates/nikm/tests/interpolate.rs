mod common;

use std::collections::BTreeSet;

use common::{arb_formula, c, f, modal_logics, rng, sequent_corpus, theorem_corpus};
use nikm::interpolate::{
    check_signature, combine, derive_interpolation_proof, extract_side_proofs, lyndon_interpolant, modal_lift, simplify, uniform_bias, BiasedSequent, Combine, Interpolant, Lift, Mode, Part, SIDE_BUDGET,
};
use nikm::search::{prove_formula, SearchBudget};
use nikm::semantics::find_countermodel;
use nikm::{check_proof, Formula, Logic, Name, NestedSequent, Polarity};
use proptest::prelude::*;
use rand::Rng;

fn atoms(a: &Formula, pol: Polarity) -> BTreeSet<Formula> {
    nikm::formula::signature(a, pol).atoms()
}

fn arb_interpolant() -> impl Strategy<Value = Interpolant> {
    prop::collection::btree_set((0u32..3, arb_formula()), 0..3).prop_map(|s| Interpolant { pairs: s.into_iter().map(|(n, a)| (Name(n), a)).collect() })
}

proptest! {
    #[test]
    fn combinations_stay_within_signatures(i in arb_interpolant(), j in arb_interpolant()) {
        let names: BTreeSet<Name> = i.names().union(&j.names()).cloned().collect();
        for pol in [Polarity::Pos, Polarity::Neg] {
            let imp = combine(Combine::Imp, &i, &j, &names);
            let mut allowed = i.signature(pol.flip());
            allowed.extend(j.signature(pol));
            prop_assert!(imp.signature(pol).is_subset(&allowed));
            for kind in [Combine::Join, Combine::Meet] {
                let k = combine(kind, &i, &j, &names);
                let mut allowed = i.signature(pol);
                allowed.extend(j.signature(pol));
                prop_assert!(k.signature(pol).is_subset(&allowed));
                prop_assert_eq!(k.names(), names.clone());
            }
        }
    }

    #[test]
    fn lifts_keep_signatures(i in arb_interpolant()) {
        for kind in [Lift::Box, Lift::Dia] {
            let k = modal_lift(kind, &c("a"), &i, Name(0), Name(1));
            for pol in [Polarity::Pos, Polarity::Neg] {
                prop_assert_eq!(k.signature(pol), i.signature(pol));
            }
            prop_assert!(!k.names().contains(&Name(1)) || i.at(Name(1)).is_empty());
        }
    }

    #[test]
    fn simplify_keeps_signatures(a in arb_formula()) {
        for pol in [Polarity::Pos, Polarity::Neg] {
            prop_assert!(atoms(&simplify(&a), pol).is_subset(&atoms(&a, pol)));
        }
    }
}

#[test]
fn biases_swap_and_split() {
    let g = NestedSequent::parse("p, q => r, (a)[s => -]").unwrap();
    let mut bias = uniform_bias(&g, Part::Left);
    bias.get_mut(&Name(0)).unwrap()[1] = Part::Right;
    let b = BiasedSequent::from_sequent(&g, &bias).unwrap();
    assert_eq!(b.to_string(), "p | q => r, (a)[s | - => -]");
    assert_eq!(b.swap_bias().swap_bias(), b);
    let (back, bias2) = b.forget();
    assert!(back.canon_eq(&g));
    assert_eq!(BiasedSequent::from_sequent(&back, &bias2).unwrap(), b);
    assert!(b.left_part().canon_eq(&NestedSequent::parse("p => -, (a)[s => -]").unwrap()));
    assert!(b.right_part().canon_eq(&NestedSequent::parse("q => r, (a)[- => -]").unwrap()));
    bias.remove(&Name(1));
    assert!(BiasedSequent::from_sequent(&g, &bias).is_err());
}

#[test]
fn derivations_respect_names_and_signatures() {
    let mut r = rng(61);
    let logic = Logic::base();
    for p in sequent_corpus(62, 25, &logic) {
        let mut bias = uniform_bias(&p.conclusion, Part::Left);
        for parts in bias.values_mut() {
            for q in parts.iter_mut() {
                if r.gen_bool(0.5) {
                    *q = Part::Right;
                }
            }
        }
        let ip = derive_interpolation_proof(&p, &bias, &logic).unwrap();
        assert_eq!(ip.violations(), Vec::<String>::new(), "{}", p.conclusion);
        assert!(ip.conclusion.canon_eq(&p.conclusion));
    }
}

#[test]
fn side_proofs_check() {
    let logic = Logic::base();
    let mut checked = 0;
    for (_, p) in theorem_corpus(63, 25, &logic) {
        let premise = &p.premises[0];
        let ip = derive_interpolation_proof(premise, &uniform_bias(&premise.conclusion, Part::Left), &logic).unwrap();
        let Ok((pruned, sides, _)) = extract_side_proofs(&ip, &logic, SIDE_BUDGET) else { continue };
        let b = pruned.biased();
        for ((w, e), (l, rt)) in &sides {
            if pruned.interpolant.pairs.contains(&(*w, e.clone())) {
                assert_eq!(check_proof(l, &logic), Ok(()));
                assert_eq!(check_proof(rt, &logic), Ok(()));
                assert_eq!(l.conclusion.find(*w).unwrap().out.as_ref(), Some(e));
                assert!(rt.conclusion.find(*w).unwrap().ant.contains(e));
                assert!(b.left_part().names().iter().all(|n| l.conclusion.contains(*n)));
                checked += 1;
            }
        }
    }
    assert!(checked >= 20, "{checked}");
}

#[test]
fn named_interpolants() {
    let logic = Logic::base();
    let cases = [
        ("(p & q) -> (q | r)", Mode::Meet, "q"),
        ("p -> (q -> p)", Mode::Join, "p"),
        ("[a](p & q) -> [a]p", Mode::Meet, "[a]p"),
        ("<a>(p & q) -> <a>p", Mode::Meet, "<a>p"),
    ];
    for (goal, mode, want) in cases {
        let p = prove_formula(&f(goal), &logic, SearchBudget::default()).unwrap();
        let r = lyndon_interpolant(&p, &logic, mode).unwrap();
        assert_eq!(simplify(&r.interpolant), f(want), "{goal}");
    }
}

#[test]
fn interpolants_are_valid_in_modal_logics() {
    let mut logics = modal_logics();
    logics.push(("K", Logic::base()));
    for (name, logic) in &logics {
        let mut done = 0;
        for (goal, p) in theorem_corpus(64, 20, logic) {
            let Formula::Imp(a, b) = &goal else { continue };
            let Ok(r) = lyndon_interpolant(&p, logic, Mode::Meet) else { continue };
            assert_eq!(check_proof(&r.proof_a_to_i, logic), Ok(()));
            assert_eq!(check_proof(&r.proof_i_to_b, logic), Ok(()));
            assert!(check_signature(&r.interpolant, a, b).is_ok());
            for side in [Formula::imp((**a).clone(), r.interpolant.clone()), Formula::imp(r.interpolant.clone(), (**b).clone())] {
                assert!(find_countermodel(&side, &logic.axioms, 2).unwrap().is_none(), "{name}: {side}");
            }
            done += 1;
        }
        assert!(done >= 15, "{name}: {done}");
    }
}

#[test]
fn requires_an_implication_proof() {
    let logic = Logic::base();
    let p = prove_formula(&f("(q -> q) | p"), &logic, SearchBudget::default()).unwrap();
    assert!(lyndon_interpolant(&p, &logic, Mode::Meet).is_err());
}
