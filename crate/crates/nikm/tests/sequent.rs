mod common;

use common::{c, f, random_formula, random_tree, rng};
use nikm::sequent::{merge_odot, GentzenSequent, SequentError};
use nikm::{Name, NestedSequent};
use rand::rngs::StdRng;
use rand::Rng;

/// A random tree with formulas in its components and at most one output.
fn random_sequent(r: &mut StdRng) -> NestedSequent {
    let mut g = random_tree(r, 5);
    let names = g.names();
    for &w in &names {
        let k = r.gen_range(0..3);
        let ant: Vec<_> = (0..k).map(|_| random_formula(r, 2)).collect();
        g.find_mut(w).unwrap().ant = ant;
    }
    if r.gen_bool(0.7) {
        let w = names[r.gen_range(0..names.len())];
        g.find_mut(w).unwrap().out = Some(random_formula(r, 2));
    }
    g
}

fn seq(s: &str) -> NestedSequent {
    NestedSequent::parse(s).unwrap()
}

#[test]
fn printing_round_trips() {
    let mut r = rng(21);
    for _ in 0..300 {
        let g = random_sequent(&mut r);
        let back = seq(&g.to_string());
        assert!(back.canon_eq(&g), "{g}");
        assert_eq!(back.to_string(), g.to_string());
        assert!(g.output_count() <= 1);
    }
}

#[test]
fn names_are_assigned_in_preorder() {
    let g = seq("p => -, (a)[q => -, (b)[- => r]], (a^)[- => -]");
    assert_eq!(g.names(), vec![Name(0), Name(1), Name(2), Name(3)]);
    assert_eq!(g.parent_of(Name(2)), Some((Name(1), c("b"))));
    assert_eq!(g.output().map(|(w, a)| (w, a.clone())), Some((Name(2), f("r"))));
}

#[test]
fn canonical_equality_ignores_order() {
    let a = seq("p, q => r, (a)[s => -], (b)[- => -]");
    let b = seq("q, p => r, (b)[- => -], (a)[s => -]");
    assert!(a.canon_eq(&b));
    let map = a.iso_map(&b).unwrap();
    assert_eq!(b.find(map[&Name(1)]).unwrap().ant, vec![f("s")]);
    assert!(!a.canon_eq(&seq("p, q => r, (a)[s => -], (a)[- => -]")));
    assert!(!a.canon_eq(&seq("p, p, q => r, (a)[s => -], (b)[- => -]")));
}

#[test]
fn rejects_two_outputs() {
    assert_eq!(NestedSequent::parse("- => p, (a)[- => q]"), Err(SequentError::MultipleOutputs));
    assert!(NestedSequent::parse("- => p, q").is_err());
    assert!(NestedSequent::parse("p => (a)[").is_err());
}

#[test]
fn merge_at_the_root() {
    let g = seq("p => -, (a)[q => -]");
    let mut k = seq("r => s, (b)[- => -]");
    k.children[0].1.name = Name(7);
    let m = merge_odot(&g, &k).unwrap();
    assert!(m.canon_eq(&seq("p, r => s, (a)[q => -], (b)[- => -]")));
    assert_eq!(m.name, g.name);
    assert_eq!(merge_odot(&seq("- => p"), &seq("- => q")), Err(SequentError::MultipleOutputs));
    assert_eq!(merge_odot(&g, &seq("- => -, (b)[- => -]")), Err(SequentError::DuplicateName(Name(1))));
}

#[test]
fn graft_adds_to_a_component() {
    let g = seq("p => -, (a)[q => -]");
    let s = GentzenSequent { ant: vec![f("r")], out: Some(f("t")) };
    let h = g.graft(Name(1), &s).unwrap();
    assert!(h.canon_eq(&seq("p => -, (a)[q, r => t]")));
    assert_eq!(h.graft(Name(0), &s), Err(SequentError::MultipleOutputs));
    assert_eq!(g.graft(Name(9), &s), Err(SequentError::UnknownName(Name(9))));
    assert!(h.strip_output().canon_eq(&seq("p => -, (a)[q, r => -]")));
}

#[test]
fn propagation_graph_has_converse_edges() {
    let mut r = rng(22);
    for _ in 0..200 {
        let g = random_sequent(&mut r);
        let pg = g.propagation_graph();
        assert_eq!(pg.nodes, g.names());
        assert_eq!(pg.edges.len(), 2 * g.tree_edges().len());
        for (u, x, v) in &g.tree_edges() {
            assert!(pg.edges.contains(&(*u, x.clone(), *v)));
            assert!(pg.edges.contains(&(*v, x.converse(), *u)));
        }
    }
}

#[test]
fn renumbering_preserves_shape() {
    let mut r = rng(23);
    for _ in 0..100 {
        let g = random_sequent(&mut r);
        let (h, map) = g.renumbered();
        assert!(h.canon_eq(&g));
        assert_eq!(h.names(), (0..map.len() as u32).map(Name).collect::<Vec<_>>());
        assert_eq!(h.formula_count(), g.formula_count());
    }
}
