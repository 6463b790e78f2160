mod common;

use std::collections::BTreeSet;

use ifol::check::{random_concept, random_fixture, rng};
use ifol::grounding::{pars, render_formula, Templates};
use ifol::prp::ConceptStore;
use ifol::relalg::{complement, natural_join, project_out, ActiveDomain, JoinSpec, Relation};
use ifol::session::demo::{self, DemoOptions, DEMO_TEMPLATES};
use ifol::syntax::{parse_formula, AbstractedTerm, Definitions, Formula, Predicate, Tense, Term};
use proptest::prelude::*;

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b", "clip_3"]).prop_map(Term::constant),
        prop::sample::select(Tense::ALL.to_vec()).prop_map(Term::Time),
        (0u64..5000).prop_map(Term::Stamp),
    ]
}

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        Just(Formula::Top),
        Just(Formula::atom(Predicate::new("p", 0), vec![]).unwrap()),
        term().prop_map(|t| Formula::atom(Predicate::new("q", 1), vec![t]).unwrap()),
        (term(), term()).prop_map(|(a, b)| Formula::atom(Predicate::new("r", 2), vec![a, b]).unwrap()),
        (term(), term()).prop_map(|(a, b)| Formula::identity(a, b)),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), any::<prop::sample::Index>()).prop_map(|(f, i)| {
                let free = f.free_vars();
                if free.is_empty() {
                    f
                } else {
                    Formula::exists_var(&free[i.index(free.len())], f).unwrap()
                }
            }),
            inner.prop_map(|f| {
                let abs = Term::Abs(Box::new(AbstractedTerm::closed(f)));
                Formula::atom(Predicate::new("k", 1), vec![abs]).unwrap()
            }),
        ]
    })
}

fn relation(k: usize) -> impl Strategy<Value = Relation<u8>> {
    prop::collection::vec(prop::collection::vec(0u8..4, k), 0..12).prop_map(move |rows| Relation::from_tuples(k, rows).unwrap())
}

fn set(r: &Relation<u8>) -> BTreeSet<Vec<u8>> {
    r.iter().cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn formula_display_parses_back(f in formula()) {
        let text = f.to_string();
        let g = parse_formula(&text).unwrap();
        prop_assert_eq!(&g, &f);
        prop_assert_eq!(g.to_string(), text);
    }

    #[test]
    fn interning_is_structural(f in formula()) {
        let mut s = ConceptStore::new();
        for (n, a) in [("p", 0), ("q", 1), ("r", 2), ("k", 1)] {
            s.declare(Predicate::new(n, a)).unwrap();
        }
        let u = s.interpret(&f).unwrap();
        let count = s.concept_count();
        prop_assert_eq!(s.interpret(&parse_formula(&f.to_string()).unwrap()).unwrap(), u);
        prop_assert_eq!(s.concept_count(), count);
        prop_assert_eq!(s.arity(u), f.free_arity());
    }

    #[test]
    fn join_matches_nested_loops(a in relation(3), b in relation(2), m in 0usize..=2, flip in any::<bool>()) {
        let pairs: Vec<(usize, usize)> = match (m, flip) {
            (0, _) => vec![],
            (1, false) => vec![(1, 2)],
            (1, true) => vec![(3, 1)],
            _ => vec![(1, 1), (2, 2)],
        };
        let spec = JoinSpec::new(pairs.clone());
        let j = natural_join(&a, &b, &spec).unwrap();
        prop_assert_eq!(j.arity(), 5 - pairs.len());
        prop_assert_eq!(set(&j), common::join(&set(&a), &set(&b), &pairs));
        if pairs.is_empty() {
            prop_assert_eq!(j.len(), a.len() * b.len());
        }
    }

    #[test]
    fn complement_is_an_involution(r in relation(2)) {
        let ad = ActiveDomain::new(0u8..4);
        let c = complement(&r, &ad).unwrap();
        prop_assert_eq!(c.len() + r.len(), 16);
        prop_assert_eq!(complement(&c, &ad).unwrap(), r);
    }

    #[test]
    fn projection_drops_one_column(r in relation(3), n in 1usize..=3) {
        let p = project_out(&r, n);
        prop_assert_eq!(p.arity(), 2);
        prop_assert!(p.len() <= r.len());
        prop_assert_eq!(project_out(&project_out(&p, 1), 1).is_true(), !r.is_empty());
    }

    #[test]
    fn memo_is_transparent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut fx = random_fixture(&mut r);
        let u = random_concept(&mut r, &mut fx, 4);
        let cached = fx.world.extension(&fx.store, u).unwrap();
        let again = fx.world.extension(&fx.store, u).unwrap();
        prop_assert_eq!(&*cached, &fx.world.extension_uncached(&fx.store, u).unwrap());
        prop_assert_eq!(cached, again);
    }

    #[test]
    fn walk_sentences_survive_render_and_pars(
        figure in prop::sample::select(vec!["person", "old_man", "robot"]),
        tense in prop::sample::select(vec![Tense::Past, Tense::Present]),
        from in prop::option::of(prop::sample::select(vec!["the_couches", "the_kitchen"])),
        through in prop::option::of(prop::sample::select(vec!["the_door", "the_hall"])),
        to in prop::option::of(prop::sample::select(vec!["the_table", "the_window"])),
    ) {
        let t = Templates::parse(DEMO_TEMPLATES).unwrap();
        let slot = |kw: &str, v: Option<&str>| Term::constant(&v.map_or("NULL".to_owned(), |v| format!("{kw}_{v}")));
        let args = vec![Term::Time(tense), Term::constant(figure), slot("from", from), slot("through", through), slot("to", to)];
        let f = Formula::atom(Predicate::new("Walk", 5), args).unwrap();
        let text = render_formula(&t, &Definitions::new(), &f).unwrap();
        prop_assert_eq!(pars(&t, &Definitions::new(), &text).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn demo_follows_the_labels(labels in prop::collection::vec(any::<bool>(), 1..8), budget in 0usize..3) {
        let corpus: String = labels.iter().enumerate().map(|(i, l)| format!("clip c{i} satisfies={l}\n")).collect();
        let opts = DemoOptions { corpus, budget, ..DemoOptions::default() };
        let a = demo::run(&opts).unwrap();
        let b = demo::run(&opts).unwrap();
        prop_assert!(a.passed(), "{:?}", a.failures);
        prop_assert_eq!(&a.lines, &b.lines);
        prop_assert_eq!(a.session.trace(), b.session.trace());
        let positives = labels.iter().filter(|l| **l).count();
        prop_assert_eq!(a.session.extracted_facts().len(), positives);
    }
}
