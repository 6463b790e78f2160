//! Randomized law checks over small worlds: the homomorphism laws of
//! extensions, agreement with a substitution-based evaluator, the union law
//! and join column bookkeeping. Seeded, so every run is reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::prp::{ConceptId, ConceptNode, ConceptStore, Elem, Individual, TRUTH};
use crate::relalg::{self, JoinSpec, Relation};
use crate::syntax::{Formula, Predicate, Term, Variable};
use crate::worlds::{Table, World};

pub type CheckRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CheckRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random world with its store: up to 5 particulars `d0..`, predicates
/// `p0..p3` of random arity in `0..=3`, each with at most 16 rows.
#[derive(Debug)]
pub struct Fixture {
    pub store: ConceptStore,
    pub world: World,
    pub domain: Vec<String>,
    pub preds: Vec<Predicate>,
}

pub fn random_fixture(rng: &mut CheckRng) -> Fixture {
    let mut store = ConceptStore::new();
    let n = rng.gen_range(1..=5);
    let domain: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
    let elems: Vec<Elem> = domain.iter().map(|d| Elem::Particular(store.named(d))).collect();
    let mut world = World::new(0).with_particulars(elems.iter().copied());
    let mut preds = Vec::new();
    for (i, arity) in [0usize, 1, 2, 3].into_iter().enumerate() {
        let arity = if i == 0 { arity } else { rng.gen_range(0..=3) };
        let p = Predicate::new(format!("p{i}"), arity);
        store.declare(p.clone()).expect("fresh predicate");
        let rows = rng.gen_range(0..=16);
        let table = Relation::from_tuples(arity, (0..rows).map(|_| (0..arity).map(|_| *elems.choose(rng).expect("domain")).collect()))
            .expect("rows have the predicate arity");
        world = world.with_table(p.clone(), table).expect("declared table");
        preds.push(p);
    }
    Fixture { store, world, domain, preds }
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn random_term(rng: &mut CheckRng, fx: &Fixture) -> Term {
    if rng.gen_bool(0.7) {
        Term::var(VARS.choose(rng).expect("vars"))
    } else {
        Term::constant(fx.domain.choose(rng).expect("domain"))
    }
}

fn random_leaf(rng: &mut CheckRng, fx: &Fixture) -> Formula {
    match rng.gen_range(0..10) {
        0 => Formula::Top,
        1 => Formula::identity(random_term(rng, fx), random_term(rng, fx)),
        _ => {
            let p = fx.preds.choose(rng).expect("preds").clone();
            let args = (0..p.arity()).map(|_| random_term(rng, fx)).collect();
            Formula::atom(p, args).expect("arity matches")
        }
    }
}

/// A random concept tree of depth at most `depth` whose every node has
/// arity at most 3, built directly with the algebra operators.
pub fn random_concept(rng: &mut CheckRng, fx: &mut Fixture, depth: usize) -> ConceptId {
    if depth == 0 || rng.gen_bool(0.3) {
        let f = random_leaf(rng, fx);
        return fx.store.interpret(&f).expect("declared predicates");
    }
    loop {
        match rng.gen_range(0..3) {
            0 => {
                let u = random_concept(rng, fx, depth - 1);
                let v = random_concept(rng, fx, depth - 1);
                let (k, j) = (fx.store.arity(u), fx.store.arity(v));
                let s = random_join(rng, k, j);
                if s.result_arity(k, j) <= 3 {
                    return fx.store.conj(u, v, s);
                }
            }
            1 => {
                let u = random_concept(rng, fx, depth - 1);
                return fx.store.neg(u);
            }
            _ => {
                let u = random_concept(rng, fx, depth - 1);
                let k = fx.store.arity(u);
                if k >= 1 {
                    let n = rng.gen_range(1..=k);
                    return fx.store.exists(n, u);
                }
            }
        }
    }
}

/// A valid `S` for arities `k` and `j`.
pub fn random_join(rng: &mut CheckRng, k: usize, j: usize) -> JoinSpec {
    let m = rng.gen_range(0..=k.min(j));
    let mut left: Vec<usize> = (1..=k).collect();
    let mut right: Vec<usize> = (1..=j).collect();
    left.shuffle(rng);
    right.shuffle(rng);
    JoinSpec::new(left.into_iter().zip(right).take(m))
}

/// A random sentence with at most `connectives` conjunctions and negations,
/// closed by existential quantifiers.
pub fn random_sentence(rng: &mut CheckRng, fx: &Fixture, connectives: usize) -> Formula {
    let mut f = random_open(rng, fx, connectives);
    while let Some(v) = f.free_vars().first().cloned() {
        f = Formula::exists_var(&v, f).expect("free variable");
    }
    f
}

fn random_open(rng: &mut CheckRng, fx: &Fixture, budget: usize) -> Formula {
    let f = if budget == 0 || rng.gen_bool(0.25) {
        random_leaf(rng, fx)
    } else if rng.gen_bool(0.4) {
        Formula::not(random_open(rng, fx, budget - 1))
    } else {
        let left = rng.gen_range(0..budget);
        Formula::and(random_open(rng, fx, left), random_open(rng, fx, budget - 1 - left))
    };
    let free = f.free_vars();
    if !free.is_empty() && rng.gen_bool(0.3) {
        let v = free.choose(rng).expect("nonempty");
        return Formula::exists_var(v, f).expect("free variable");
    }
    f
}

/// Substitution semantics: quantifiers range over the active domain and
/// atoms are looked up row by row.
pub fn tarski(store: &ConceptStore, world: &World, f: &Formula, g: &BTreeMap<Variable, Elem>) -> bool {
    let value = |t: &Term| -> Option<Elem> {
        match t {
            Term::Var(v) => g.get(v).copied(),
            Term::Const(c) => store.find_particular(&Individual::Named(c.clone())).map(Elem::Particular),
            Term::Time(t) => store.find_particular(&Individual::Time(*t)).map(Elem::Particular),
            Term::Stamp(n) => store.find_particular(&Individual::Stamp(*n)).map(Elem::Particular),
            Term::Abs(_) => None,
        }
    };
    match f {
        Formula::Top => true,
        Formula::Atom { pred, args } => {
            let row: Option<Vec<Elem>> = args.iter().map(value).collect();
            match (row, world.table(pred)) {
                (Some(row), Some(t)) => t.contains(&row),
                _ => false,
            }
        }
        Formula::Identity(a, b) => match (value(a), value(b)) {
            (Some(x), Some(y)) => x == y,
            _ => a == b,
        },
        Formula::Conj { lhs, rhs, .. } => tarski(store, world, lhs, g) && tarski(store, world, rhs, g),
        Formula::Neg(x) => !tarski(store, world, x, g),
        Formula::Exists { n, body } => {
            let v = body.free_vars()[n - 1].clone();
            world.active_domain().iter().any(|d| {
                let mut h = g.clone();
                h.insert(v.clone(), *d);
                tarski(store, world, body, &h)
            })
        }
    }
}

/// `R1 ⋈_S R2` by comparing every pair of rows.
pub fn nested_loop_join<T: Ord + Clone>(r1: &Relation<T>, r2: &Relation<T>, s: &JoinSpec) -> BTreeSet<Vec<T>> {
    let joined: BTreeSet<usize> = s.pairs().iter().map(|&(_, b)| b).collect();
    let mut out = BTreeSet::new();
    for a in r1.iter() {
        for b in r2.iter() {
            if s.pairs().iter().all(|&(i, j)| a[i - 1] == b[j - 1]) {
                let mut row = a.clone();
                row.extend((1..=b.len()).filter(|c| !joined.contains(c)).map(|c| b[c - 1].clone()));
                out.insert(row);
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} cases, {} ms)", self.name, self.cases, self.elapsed.as_millis())?;
        for m in self.failures.iter().take(5) {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}

fn timed(name: &'static str, run: impl FnOnce(&mut Vec<String>) -> usize) -> CheckOutcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let cases = run(&mut failures);
    CheckOutcome { name, cases, failures, elapsed: start.elapsed() }
}

/// Checks one node of a concept tree against the operator applied to its
/// children's extensions.
pub fn law_holds(fx: &Fixture, u: ConceptId) -> Result<bool, String> {
    let h = |c| fx.world.extension(&fx.store, c).map_err(|e| e.to_string());
    let got = h(u)?;
    let want: Table = match fx.store.node(u) {
        ConceptNode::Truth => Relation::truth(),
        ConceptNode::Conj { lhs, rhs, join } => relalg::natural_join(&*h(*lhs)?, &*h(*rhs)?, join).map_err(|e| e.to_string())?,
        ConceptNode::Neg(x) => relalg::complement(&*h(*x)?, fx.world.active_domain()).map_err(|e| e.to_string())?,
        ConceptNode::Exists { n, body } => relalg::project_out(&*h(*body)?, *n),
        ConceptNode::Atom { .. } | ConceptNode::Identity { .. } => return Ok(true),
    };
    let uncached = fx.world.extension_uncached(&fx.store, u).map_err(|e| e.to_string())?;
    Ok(*got == want && uncached == want)
}

fn subconcepts(store: &ConceptStore, u: ConceptId, out: &mut BTreeSet<ConceptId>) {
    if !out.insert(u) {
        return;
    }
    match store.node(u) {
        ConceptNode::Conj { lhs, rhs, .. } => {
            subconcepts(store, *lhs, out);
            subconcepts(store, *rhs, out);
        }
        ConceptNode::Neg(x) | ConceptNode::Exists { body: x, .. } => subconcepts(store, *x, out),
        _ => {}
    }
}

pub fn homomorphism_suite(cases: usize, seed: u64) -> CheckOutcome {
    timed("homomorphism laws", |failures| {
        let mut r = rng(seed);
        for case in 0..cases {
            let mut fx = random_fixture(&mut r);
            let u = random_concept(&mut r, &mut fx, 4);
            let mut nodes = BTreeSet::from([TRUTH]);
            subconcepts(&fx.store, u, &mut nodes);
            for n in nodes {
                match law_holds(&fx, n) {
                    Ok(true) => {}
                    Ok(false) => failures.push(format!("case {case}: law fails at {n}")),
                    Err(e) => failures.push(format!("case {case}: {n}: {e}")),
                }
            }
        }
        cases
    })
}

pub fn tarski_suite(cases: usize, seed: u64) -> CheckOutcome {
    timed("Tarski agreement", |failures| {
        let mut r = rng(seed);
        for case in 0..cases {
            let mut fx = random_fixture(&mut r);
            let f = random_sentence(&mut r, &fx, 3);
            let oracle = tarski(&fx.store, &fx.world, &f, &BTreeMap::new());
            match fx.world.eval_sentence(&mut fx.store, &f) {
                Ok(v) if v == oracle => {}
                Ok(v) => failures.push(format!("case {case}: {f}: engine {v}, oracle {oracle}")),
                Err(e) => failures.push(format!("case {case}: {f}: {e}")),
            }
        }
        cases
    })
}

pub fn union_suite(seed: u64) -> CheckOutcome {
    timed("union law", |failures| {
        let mut r = rng(seed);
        let mut cases = 0;
        for _round in 0..20 {
            let mut fx = random_fixture(&mut r);
            for arity in 0..=3 {
                let p = Predicate::new(format!("q{arity}"), arity);
                fx.store.declare(p.clone()).expect("fresh predicate");
                for size in 1..=3 {
                    let mut members = Vec::new();
                    let mut expected = Relation::empty(arity);
                    for i in 0..size {
                        let args: Vec<Term> = (0..arity).map(|v| Term::var(VARS[v])).collect();
                        let pi = Predicate::new(format!("{}_{i}", p.name()), arity);
                        let _ = fx.store.declare(pi.clone());
                        let rows = r.gen_range(0..=6);
                        let elems: Vec<Elem> = fx.world.active_domain().iter().copied().collect();
                        let table = Relation::from_tuples(
                            arity,
                            (0..rows).map(|_| (0..arity).map(|_| *elems.choose(&mut r).expect("domain")).collect()),
                        )
                        .expect("arity");
                        fx.world = fx.world.with_table(pi.clone(), table.clone()).expect("table");
                        expected = expected.union(&table).expect("same arity");
                        members.push(fx.store.interpret(&Formula::atom(pi, args).expect("arity")).expect("declared"));
                    }
                    let u = fx.store.union(&members).expect("same arity");
                    cases += 1;
                    match fx.world.extension(&fx.store, u) {
                        Ok(got) if *got == expected => {}
                        Ok(got) => failures.push(format!("arity {arity}, |B|={size}: {} rows, expected {}", got.len(), expected.len())),
                        Err(e) => failures.push(e.to_string()),
                    }
                }
            }
        }
        let t: Relation<u8> = Relation::truth();
        if relalg::natural_join(&t, &Relation::falsity(), &JoinSpec::empty()).ok() != Some(Relation::falsity()) {
            failures.push("{<>} join {} is not empty".into());
        }
        cases + 1
    })
}

pub fn join_suite(cases: usize, seed: u64) -> CheckOutcome {
    timed("join bookkeeping", |failures| {
        let s = JoinSpec::new([(4, 1), (2, 3)]);
        let r1 = Relation::from_tuples(5, [vec!["a", "b", "c", "d", "e"], vec!["a", "z", "c", "d", "e"]]).expect("arity");
        let r2 = Relation::from_tuples(4, [vec!["d", "f", "b", "g"]]).expect("arity");
        let got = relalg::natural_join(&r1, &r2, &s).expect("valid S");
        let want = Relation::from_tuples(7, [vec!["a", "b", "c", "d", "e", "f", "g"]]).expect("arity");
        if got != want {
            failures.push(format!("worked example: {:?}", got.iter().collect::<Vec<_>>()));
        }
        let mut r = rng(seed);
        for case in 0..cases {
            let gen = |r: &mut CheckRng, k: usize| {
                let n = r.gen_range(0..=16);
                Relation::from_tuples(k, (0..n).map(|_| (0..k).map(|_| r.gen_range(0u8..3)).collect())).expect("arity")
            };
            let (a, b) = (gen(&mut r, 5), gen(&mut r, 4));
            let spec = if case % 2 == 0 { s.clone() } else { random_join(&mut r, 5, 4) };
            let j = relalg::natural_join(&a, &b, &spec).expect("valid S");
            let oracle = nested_loop_join(&a, &b, &spec);
            if j.arity() != 9 - spec.len() || j.iter().cloned().collect::<BTreeSet<_>>() != oracle {
                failures.push(format!("case {case}: S = {spec}"));
            }
        }
        cases + 1
    })
}

pub fn run_all(cases: usize, seed: u64) -> Vec<CheckOutcome> {
    vec![
        homomorphism_suite(cases, seed),
        tarski_suite(cases, seed.wrapping_add(1)),
        union_suite(seed.wrapping_add(2)),
        join_suite(cases, seed.wrapping_add(3)),
    ]
}
